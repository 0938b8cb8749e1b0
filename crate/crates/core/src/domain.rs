//! Compact convex feasible sets: linear minimization oracles, membership
//! tests and diameters.
//!
//! All tie-breaking is deterministic (lowest index), so identical inputs
//! give bit-identical LMO outputs across runs.

use rand::Rng;

use crate::error::{Error, Result};
use crate::vector::{Norm, Vector};

/// A compact convex feasible set exposing an LMO, a membership test and a
/// diameter.
#[derive(Debug, Clone, PartialEq)]
pub enum Domain {
    /// Unit probability simplex `{x >= 0, sum x = 1}`.
    Simplex { dim: usize },
    /// Axis-aligned box `[lo, hi]` with `lo_i < hi_i` for all i.
    Box { lo: Vector, hi: Vector },
    /// `{ ||x||_1 <= radius }`.
    L1Ball { radius: f64, dim: usize },
    /// Convex hull of an explicit vertex list.
    AtomSet { vertices: Vec<Vector> },
}

impl Domain {
    pub fn simplex(dim: usize) -> Result<Domain> {
        if dim == 0 {
            return Err(Error::InvalidArgument("simplex dimension must be >= 1".into()));
        }
        Ok(Domain::Simplex { dim })
    }

    pub fn boxed(lo: Vector, hi: Vector) -> Result<Domain> {
        hi.check_dim(lo.dim())?;
        for i in 0..lo.dim() {
            if !(lo[i] < hi[i]) {
                return Err(Error::InvalidArgument(format!(
                    "box coordinate {i} is degenerate or inverted: lo={} hi={}",
                    lo[i], hi[i]
                )));
            }
        }
        Ok(Domain::Box { lo, hi })
    }

    pub fn l1_ball(radius: f64, dim: usize) -> Result<Domain> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "l1-ball radius must be positive and finite, got {radius}"
            )));
        }
        if dim == 0 {
            return Err(Error::InvalidArgument("l1-ball dimension must be >= 1".into()));
        }
        Ok(Domain::L1Ball { radius, dim })
    }

    pub fn atom_set(vertices: Vec<Vector>) -> Result<Domain> {
        let first = vertices
            .first()
            .ok_or_else(|| Error::InvalidArgument("atom set needs at least one vertex".into()))?;
        let d = first.dim();
        for v in &vertices {
            v.check_dim(d)?;
        }
        Ok(Domain::AtomSet { vertices })
    }

    pub fn dim(&self) -> usize {
        match self {
            Domain::Simplex { dim } => *dim,
            Domain::Box { lo, .. } => lo.dim(),
            Domain::L1Ball { dim, .. } => *dim,
            Domain::AtomSet { vertices } => vertices[0].dim(),
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Domain::Simplex { .. } => "simplex",
            Domain::Box { .. } => "box",
            Domain::L1Ball { .. } => "l1ball",
            Domain::AtomSet { .. } => "atomset",
        }
    }

    /// Linear minimization oracle: `argmin_{s in M} <s, c>`.
    ///
    /// Ties break to the lowest coordinate index (simplex, l1-ball), to
    /// `lo_i` when `c_i >= 0` (box), and to the lowest list index (atom
    /// set). The result is always an extreme point.
    pub fn lmo(&self, c: &Vector) -> Result<Vector> {
        c.check_dim(self.dim())?;
        Ok(match self {
            Domain::Simplex { dim } => {
                let mut best = 0;
                for i in 1..*dim {
                    if c[i] < c[best] {
                        best = i;
                    }
                }
                Vector::scaled_basis(*dim, best, 1.0)
            }
            Domain::Box { lo, hi } => {
                let coords = (0..lo.dim())
                    .map(|i| if c[i] >= 0.0 { lo[i] } else { hi[i] })
                    .collect();
                Vector::from_raw(coords)
            }
            Domain::L1Ball { radius, dim } => {
                let mut best = 0;
                for i in 1..*dim {
                    if c[i].abs() > c[best].abs() {
                        best = i;
                    }
                }
                let sign = if c[best] > 0.0 { -1.0 } else { 1.0 };
                Vector::scaled_basis(*dim, best, sign * radius)
            }
            Domain::AtomSet { vertices } => {
                let mut best = 0;
                let mut best_val = vertices[0].dot(c);
                for (i, v) in vertices.iter().enumerate().skip(1) {
                    let val = v.dot(c);
                    if val < best_val {
                        best = i;
                        best_val = val;
                    }
                }
                vertices[best].clone()
            }
        })
    }

    /// Membership test within additive tolerance `tol`.
    ///
    /// For atom sets this is decided by exact convex-hull membership only
    /// for d <= 3 (Caratheodory search over vertex subsets); higher
    /// dimensions return an unsupported-operation error.
    pub fn contains(&self, x: &Vector, tol: f64) -> Result<bool> {
        x.check_dim(self.dim())?;
        Ok(match self {
            Domain::Simplex { .. } => {
                x.iter().all(|&v| v >= -tol) && (x.sum() - 1.0).abs() <= tol
            }
            Domain::Box { lo, hi } => {
                (0..lo.dim()).all(|i| x[i] >= lo[i] - tol && x[i] <= hi[i] + tol)
            }
            Domain::L1Ball { radius, .. } => x.norm(Norm::L1) <= radius + tol,
            Domain::AtomSet { vertices } => {
                let d = self.dim();
                if d > 3 {
                    return Err(Error::Unsupported(format!(
                        "convex-hull membership for atom sets is only supported for d <= 3 (got d = {d})"
                    )));
                }
                hull_contains(vertices, x, tol)
            }
        })
    }

    /// Diameter of the set in the requested norm.
    pub fn diameter(&self, norm: Norm) -> f64 {
        match self {
            Domain::Simplex { .. } => match norm {
                Norm::L1 => 2.0,
                Norm::L2 => 2.0_f64.sqrt(),
                Norm::Linf => 1.0,
            },
            Domain::Box { lo, hi } => hi.sub(lo).norm(norm),
            Domain::L1Ball { radius, .. } => 2.0 * radius,
            Domain::AtomSet { vertices } => {
                let mut best = 0.0_f64;
                for i in 0..vertices.len() {
                    for j in (i + 1)..vertices.len() {
                        best = best.max(vertices[i].sub(&vertices[j]).norm(norm));
                    }
                }
                best
            }
        }
    }

    /// The deterministic default start point: the first vertex.
    pub fn first_vertex(&self) -> Vector {
        match self {
            Domain::Simplex { dim } => Vector::scaled_basis(*dim, 0, 1.0),
            Domain::Box { lo, .. } => lo.clone(),
            Domain::L1Ball { radius, dim } => Vector::scaled_basis(*dim, 0, *radius),
            Domain::AtomSet { vertices } => vertices[0].clone(),
        }
    }

    /// Full vertex list where enumerable. Box corners are capped at d <= 20
    /// to keep the enumeration finite in practice.
    pub fn vertices(&self) -> Result<Vec<Vector>> {
        match self {
            Domain::Simplex { dim } => Ok((0..*dim)
                .map(|i| Vector::scaled_basis(*dim, i, 1.0))
                .collect()),
            Domain::Box { lo, hi } => {
                let d = lo.dim();
                if d > 20 {
                    return Err(Error::Unsupported(format!(
                        "box vertex enumeration limited to d <= 20 (got d = {d})"
                    )));
                }
                let mut out = Vec::with_capacity(1 << d);
                for mask in 0..(1_usize << d) {
                    let coords = (0..d)
                        .map(|i| if mask >> i & 1 == 1 { hi[i] } else { lo[i] })
                        .collect();
                    out.push(Vector::from_raw(coords));
                }
                Ok(out)
            }
            Domain::L1Ball { radius, dim } => {
                let mut out = Vec::with_capacity(2 * dim);
                for i in 0..*dim {
                    out.push(Vector::scaled_basis(*dim, i, *radius));
                    out.push(Vector::scaled_basis(*dim, i, -*radius));
                }
                Ok(out)
            }
            Domain::AtomSet { vertices } => Ok(vertices.clone()),
        }
    }

    /// Draw a random feasible point.
    pub fn sample<R: Rng>(&self, rng: &mut R) -> Vector {
        match self {
            Domain::Simplex { dim } => {
                // normalized exponentials = uniform Dirichlet
                let mut coords: Vec<f64> = (0..*dim)
                    .map(|_| -(1.0 - rng.random::<f64>()).ln())
                    .collect();
                let s: f64 = coords.iter().sum();
                for c in &mut coords {
                    *c /= s;
                }
                Vector::from_raw(coords)
            }
            Domain::Box { lo, hi } => {
                let coords = (0..lo.dim())
                    .map(|i| lo[i] + rng.random::<f64>() * (hi[i] - lo[i]))
                    .collect();
                Vector::from_raw(coords)
            }
            Domain::L1Ball { radius, dim } => {
                // half vertices, half uniform interior (Dirichlet magnitudes,
                // random signs, radial scaling)
                if rng.random::<f64>() < 0.5 {
                    let i = rng.random_range(0..*dim);
                    let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
                    Vector::scaled_basis(*dim, i, sign * radius)
                } else {
                    let mut mags: Vec<f64> = (0..*dim)
                        .map(|_| -(1.0 - rng.random::<f64>()).ln())
                        .collect();
                    let s: f64 = mags.iter().sum();
                    let scale = radius * rng.random::<f64>().powf(1.0 / *dim as f64);
                    for m in &mut mags {
                        *m = *m / s * scale;
                        if rng.random::<bool>() {
                            *m = -*m;
                        }
                    }
                    Vector::from_raw(mags)
                }
            }
            Domain::AtomSet { vertices } => {
                let mut weights: Vec<f64> = (0..vertices.len())
                    .map(|_| -(1.0 - rng.random::<f64>()).ln())
                    .collect();
                let s: f64 = weights.iter().sum();
                for w in &mut weights {
                    *w /= s;
                }
                let d = vertices[0].dim();
                let mut coords = vec![0.0; d];
                for (w, v) in weights.iter().zip(vertices) {
                    for i in 0..d {
                        coords[i] += w * v[i];
                    }
                }
                Vector::from_raw(coords)
            }
        }
    }
}

/// Convex-hull membership by Caratheodory: x is in conv(V) iff some
/// affinely independent subset of at most d+1 vertices expresses x as a
/// convex combination. Only called for d <= 3.
fn hull_contains(vertices: &[Vector], x: &Vector, tol: f64) -> bool {
    let d = x.dim();
    let n = vertices.len();
    for size in 1..=(d + 1).min(n) {
        let mut subset: Vec<usize> = (0..size).collect();
        loop {
            if subset_expresses(vertices, &subset, x, tol) {
                return true;
            }
            if !next_combination(&mut subset, n) {
                break;
            }
        }
    }
    false
}

/// Advance `idx` to the next k-combination of 0..n in lexicographic order.
fn next_combination(idx: &mut [usize], n: usize) -> bool {
    let k = idx.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if idx[i] < n - k + i {
            idx[i] += 1;
            for j in (i + 1)..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Solve sum lambda_i v_i = x, sum lambda_i = 1 restricted to `idx`, and
/// accept when the residual is within tol and all lambda_i >= -tol.
fn subset_expresses(vertices: &[Vector], idx: &[usize], x: &Vector, tol: f64) -> bool {
    let d = x.dim();
    let k = idx.len();
    // rows: d coordinate equations plus the affine constraint
    let rows = d + 1;
    let mut a = vec![vec![0.0; k]; rows];
    let mut rhs = vec![0.0; rows];
    for r in 0..d {
        for (col, &vi) in idx.iter().enumerate() {
            a[r][col] = vertices[vi][r];
        }
        rhs[r] = x[r];
    }
    for col in 0..k {
        a[d][col] = 1.0;
    }
    rhs[d] = 1.0;

    // least-squares via normal equations; skip singular (affinely
    // dependent) subsets
    let mut ata = vec![vec![0.0; k]; k];
    let mut atb = vec![0.0; k];
    for i in 0..k {
        for j in 0..k {
            ata[i][j] = (0..rows).map(|r| a[r][i] * a[r][j]).sum();
        }
        atb[i] = (0..rows).map(|r| a[r][i] * rhs[r]).sum();
    }
    let lambda = match solve_dense(&mut ata, &mut atb) {
        Some(l) => l,
        None => return false,
    };
    if lambda.iter().any(|&l| l < -tol - 1e-12) {
        return false;
    }
    // residual check
    let mut worst = 0.0_f64;
    for r in 0..rows {
        let got: f64 = (0..k).map(|c| a[r][c] * lambda[c]).sum();
        worst = worst.max((got - rhs[r]).abs());
    }
    worst <= tol + 1e-9
}

/// Gaussian elimination with partial pivoting on a small dense system.
fn solve_dense(a: &mut [Vec<f64>], b: &mut [f64]) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| {
            a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap()
        })?;
        if a[pivot][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in (col + 1)..n {
            let f = a[row][col] / a[col][col];
            for c in col..n {
                a[row][c] -= f * a[col][c];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = ((row + 1)..n).map(|c| a[row][c] * x[c]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    Some(x)
}
