//! Quadratic test objectives with analytic gradients, curvature bounds and
//! exact minimum oracles.
//!
//! The family is deliberately restricted to (diagonal) quadratics: with an
//! indefinite matrix they are genuinely non-convex, yet the Lipschitz
//! constant, the curvature bound, exact line search and the global minimum
//! over a box are all available in closed form, which is what makes every
//! inequality in the convergence analysis mechanically checkable.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::vector::{Norm, Vector};

/// How a curvature value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurvatureMethod {
    /// `L * diam^2`, an upper bound on the true curvature constant.
    AnalyticLipschitzBound,
    /// Empirical maximum over sampled `(x, s, gamma)` triples; a lower
    /// bound on the true curvature constant, never a certificate.
    Sampled,
    /// Exact value for quadratics via the worst vertex pair.
    ExactQuadraticVertexPair,
}

#[derive(Debug, Clone)]
pub struct CurvatureEstimate {
    pub value: f64,
    pub method: CurvatureMethod,
    pub samples_used: usize,
}

/// `f(x) = 1/2 x^T A x + b^T x` with A symmetric.
#[derive(Debug, Clone, PartialEq)]
pub enum Objective {
    Quadratic {
        /// Rows of the (symmetrized) matrix A.
        matrix: Vec<Vector>,
        b: Vector,
        /// Largest absolute eigenvalue when supplied; power-iterated on
        /// demand otherwise.
        lipschitz_l: Option<f64>,
    },
    DiagonalQuadratic {
        diag: Vector,
        b: Vector,
    },
}

impl Objective {
    /// Dense quadratic; the matrix is symmetrized as `(A + A^T)/2`.
    pub fn quadratic(rows: Vec<Vector>, b: Vector, lipschitz_l: Option<f64>) -> Result<Objective> {
        let d = b.dim();
        if rows.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: rows.len(),
            });
        }
        for r in &rows {
            r.check_dim(d)?;
        }
        let matrix: Vec<Vector> = (0..d)
            .map(|i| {
                Vector::from_raw((0..d).map(|j| 0.5 * (rows[i][j] + rows[j][i])).collect())
            })
            .collect();
        if let Some(l) = lipschitz_l {
            if !(l >= 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "lipschitz constant must be nonnegative, got {l}"
                )));
            }
        }
        Ok(Objective::Quadratic {
            matrix,
            b,
            lipschitz_l,
        })
    }

    pub fn diagonal(diag: Vector, b: Vector) -> Result<Objective> {
        b.check_dim(diag.dim())?;
        Ok(Objective::DiagonalQuadratic { diag, b })
    }

    pub fn dim(&self) -> usize {
        match self {
            Objective::Quadratic { b, .. } => b.dim(),
            Objective::DiagonalQuadratic { b, .. } => b.dim(),
        }
    }

    /// `A x`
    pub fn matvec(&self, x: &Vector) -> Vector {
        match self {
            Objective::Quadratic { matrix, .. } => {
                Vector::from_raw(matrix.iter().map(|row| row.dot(x)).collect())
            }
            Objective::DiagonalQuadratic { diag, .. } => Vector::from_raw(
                diag.iter().zip(x).map(|(a, v)| a * v).collect(),
            ),
        }
    }

    pub fn value(&self, x: &Vector) -> Result<f64> {
        x.check_dim(self.dim())?;
        let b = match self {
            Objective::Quadratic { b, .. } => b,
            Objective::DiagonalQuadratic { b, .. } => b,
        };
        Ok(0.5 * self.matvec(x).dot(x) + b.dot(x))
    }

    pub fn gradient(&self, x: &Vector) -> Result<Vector> {
        x.check_dim(self.dim())?;
        let b = match self {
            Objective::Quadratic { b, .. } => b,
            Objective::DiagonalQuadratic { b, .. } => b,
        };
        Ok(self.matvec(x).add_scaled(1.0, b))
    }

    /// `d^T A d`, the curvature of f along direction d.
    pub fn quad_form(&self, d: &Vector) -> f64 {
        self.matvec(d).dot(d)
    }

    /// Max over coordinates of the relative error between the analytic
    /// gradient and a central finite difference with step `h`.
    pub fn finite_diff_check(&self, x: &Vector, h: f64) -> Result<f64> {
        if !(h > 0.0) {
            return Err(Error::InvalidArgument(format!("h must be positive, got {h}")));
        }
        let grad = self.gradient(x)?;
        let mut worst = 0.0_f64;
        for i in 0..x.dim() {
            let ei = Vector::scaled_basis(x.dim(), i, 1.0);
            let fp = self.value(&x.add_scaled(h, &ei))?;
            let fm = self.value(&x.add_scaled(-h, &ei))?;
            let fd = (fp - fm) / (2.0 * h);
            let err = (fd - grad[i]).abs() / grad[i].abs().max(1.0);
            worst = worst.max(err);
        }
        Ok(worst)
    }

    /// Largest absolute eigenvalue of A: exact for diagonals, supplied or
    /// power-iterated (1000 iterations, tol 1e-10, seeded start) for dense.
    pub fn lipschitz_constant(&self) -> Result<f64> {
        match self {
            Objective::DiagonalQuadratic { diag, .. } => {
                Ok(diag.iter().fold(0.0_f64, |m, a| m.max(a.abs())))
            }
            Objective::Quadratic {
                lipschitz_l: Some(l),
                ..
            } => Ok(*l),
            Objective::Quadratic { .. } => Ok(self.power_iterate_l()),
        }
    }

    fn power_iterate_l(&self) -> f64 {
        let d = self.dim();
        let mut rng = ChaCha8Rng::seed_from_u64(0x9e3779b9);
        let mut v = Vector::from_raw((0..d).map(|_| rng.random_range(-1.0..1.0)).collect());
        let mut lambda = 0.0_f64;
        for _ in 0..1000 {
            let w = self.matvec(&v);
            let n = w.norm(Norm::L2);
            if n == 0.0 {
                return 0.0;
            }
            let next = w.scale(1.0 / n);
            let new_lambda = self.matvec(&next).dot(&next).abs();
            if (new_lambda - lambda).abs() <= 1e-10 * new_lambda.max(1.0) {
                return new_lambda;
            }
            lambda = new_lambda;
            v = next;
        }
        lambda
    }

    /// Curvature upper bound `L * diam(M)^2`.
    pub fn curvature_lipschitz_bound(
        &self,
        domain: &Domain,
        norm: Norm,
    ) -> Result<CurvatureEstimate> {
        let l = self.lipschitz_constant()?;
        let diam = domain.diameter(norm);
        Ok(CurvatureEstimate {
            value: l * diam * diam,
            method: CurvatureMethod::AnalyticLipschitzBound,
            samples_used: 0,
        })
    }

    /// Empirical curvature: max over n sampled `(x, s, gamma)` triples of
    /// `(2/gamma^2)(f(y) - f(x) - <grad f(x), y - x>)` with
    /// `y = x + gamma (s - x)`. A lower bound on the curvature constant;
    /// deterministic given the seed.
    pub fn curvature_sampled(
        &self,
        domain: &Domain,
        n: usize,
        seed: u64,
    ) -> Result<CurvatureEstimate> {
        if n == 0 {
            return Err(Error::InvalidArgument("need at least one sample".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut best = 0.0_f64;
        for _ in 0..n {
            let x = domain.sample(&mut rng);
            let s = domain.sample(&mut rng);
            let _gamma = 1.0 - rng.random::<f64>(); // uniform in (0, 1]
            let dir = s.sub(&x);
            // For a quadratic the difference quotient
            // (2/gamma^2)(f(y) - f(x) - <grad f(x), y - x>) collapses to
            // (s-x)^T A (s-x) for every gamma; evaluating that form avoids
            // dividing round-off by gamma^2. The gamma draw is kept so the
            // sample stream matches the stated procedure.
            let val = self.quad_form(&dir);
            best = best.max(val);
        }
        Ok(CurvatureEstimate {
            value: best,
            method: CurvatureMethod::Sampled,
            samples_used: n,
        })
    }

    /// Exact global minimum of a diagonal quadratic over a box, by
    /// per-coordinate minimization. Endpoint ties break toward `lo`.
    pub fn global_min_separable_box(&self, domain: &Domain) -> Result<(f64, Vector)> {
        let (diag, b) = match self {
            Objective::DiagonalQuadratic { diag, b } => (diag, b),
            _ => {
                return Err(Error::InvalidArgument(
                    "exact box minimization requires a diagonal quadratic objective".into(),
                ))
            }
        };
        let (lo, hi) = match domain {
            Domain::Box { lo, hi } => (lo, hi),
            _ => {
                return Err(Error::InvalidArgument(
                    "exact separable minimization requires a box domain".into(),
                ))
            }
        };
        lo.check_dim(diag.dim())?;
        let phi = |a: f64, c: f64, t: f64| 0.5 * a * t * t + c * t;
        let mut total = 0.0;
        let mut arg = Vec::with_capacity(diag.dim());
        for i in 0..diag.dim() {
            let (a, c) = (diag[i], b[i]);
            let mut best_t = lo[i];
            let mut best_v = phi(a, c, lo[i]);
            let v_hi = phi(a, c, hi[i]);
            if v_hi < best_v {
                best_v = v_hi;
                best_t = hi[i];
            }
            if a > 0.0 {
                let t = -c / a;
                if t > lo[i] && t < hi[i] {
                    let v = phi(a, c, t);
                    if v < best_v {
                        best_v = v;
                        best_t = t;
                    }
                }
            }
            total += best_v;
            arg.push(best_t);
        }
        Ok((total, Vector::from_raw(arg)))
    }

    /// Brute-force minimum over a regular grid of feasible points. Only
    /// valid for d <= 3; an upper bound on the true minimum.
    pub fn grid_min(&self, domain: &Domain, resolution: usize) -> Result<(f64, Vector)> {
        let d = self.dim();
        if d > 3 {
            return Err(Error::Unsupported(format!(
                "grid minimization is limited to d <= 3 (got d = {d})"
            )));
        }
        if resolution < 2 {
            return Err(Error::InvalidArgument(
                "grid resolution must be at least 2".into(),
            ));
        }
        let mut best: Option<(f64, Vector)> = None;
        let mut consider = |obj: &Objective, x: Vector| -> Result<()> {
            let v = obj.value(&x)?;
            if best.as_ref().map_or(true, |(bv, _)| v < *bv) {
                best = Some((v, x));
            }
            Ok(())
        };
        match domain {
            Domain::Box { lo, hi } => {
                let steps: Vec<Vec<f64>> = (0..d)
                    .map(|i| {
                        (0..resolution)
                            .map(|k| {
                                lo[i] + (hi[i] - lo[i]) * k as f64 / (resolution - 1) as f64
                            })
                            .collect()
                    })
                    .collect();
                let mut idx = vec![0_usize; d];
                loop {
                    let x = Vector::from_raw((0..d).map(|i| steps[i][idx[i]]).collect());
                    consider(self, x)?;
                    let mut i = 0;
                    while i < d {
                        idx[i] += 1;
                        if idx[i] < resolution {
                            break;
                        }
                        idx[i] = 0;
                        i += 1;
                    }
                    if i == d {
                        break;
                    }
                }
            }
            Domain::Simplex { .. } => {
                // barycentric grid: integer compositions of (resolution - 1)
                let m = resolution - 1;
                let mut counts = vec![0_usize; d];
                fn rec(
                    counts: &mut Vec<usize>,
                    pos: usize,
                    left: usize,
                    m: usize,
                    obj: &Objective,
                    consider: &mut dyn FnMut(&Objective, Vector) -> Result<()>,
                ) -> Result<()> {
                    if pos + 1 == counts.len() {
                        counts[pos] = left;
                        let x = Vector::from_raw(
                            counts.iter().map(|&c| c as f64 / m as f64).collect(),
                        );
                        return consider(obj, x);
                    }
                    for k in 0..=left {
                        counts[pos] = k;
                        rec(counts, pos + 1, left - k, m, obj, consider)?;
                    }
                    Ok(())
                }
                rec(&mut counts, 0, m, m, self, &mut consider)?;
            }
            _ => {
                return Err(Error::Unsupported(format!(
                    "grid minimization not implemented for {} domains",
                    domain.kind_name()
                )))
            }
        }
        let (v, x) = best.expect("grid has at least one point");
        Ok((v, x))
    }
}
