//! The Frank-Wolfe gap: `g = max_{s in M} <s - x, -grad>`, the measure of
//! non-stationarity everything else in this crate is built around.

use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::vector::Vector;

/// Round-off guard for the gap. Exact arithmetic guarantees `g >= 0`; a raw
/// value below `-GAP_CLAMP_TOL` signals a defective LMO rather than noise.
pub const GAP_CLAMP_TOL: f64 = 1e-10;

/// Feasibility tolerance applied to the query point.
pub const FEASIBILITY_TOL: f64 = 1e-9;

/// Outcome of a gap computation.
#[derive(Debug, Clone)]
pub struct GapResult {
    /// The Frank-Wolfe gap, clamped to be nonnegative.
    pub gap: f64,
    /// The minimizing atom `s = LMO(grad)`.
    pub atom: Vector,
    /// The update direction `s - x`.
    pub direction: Vector,
}

/// Clamp a raw gap value: small negative round-off is zeroed, anything
/// below `-1e-10` is an internal error (broken oracle).
pub fn clamp_gap(raw: f64) -> Result<f64> {
    if raw >= -GAP_CLAMP_TOL {
        Ok(raw.max(0.0))
    } else {
        Err(Error::Internal(format!(
            "negative Frank-Wolfe gap {raw:e} exceeds round-off tolerance {GAP_CLAMP_TOL:e}; \
             the linear minimization oracle is defective"
        )))
    }
}

/// Compute the Frank-Wolfe gap of a point given its gradient.
///
/// `x` must be feasible within [`FEASIBILITY_TOL`]. Atom-set domains in
/// d > 3 skip the membership check (feasibility there is guaranteed
/// structurally by the solver, which only forms convex combinations).
pub fn fw_gap(x: &Vector, grad: &Vector, domain: &Domain) -> Result<GapResult> {
    grad.check_dim(x.dim())?;
    x.check_dim(domain.dim())?;
    match domain.contains(x, FEASIBILITY_TOL) {
        Ok(true) => {}
        Ok(false) => {
            return Err(Error::Infeasible(format!(
                "point {:?} violates the {} constraints (tol {FEASIBILITY_TOL:e})",
                x.as_slice(),
                domain.kind_name()
            )))
        }
        Err(Error::Unsupported(_)) => {}
        Err(e) => return Err(e),
    }
    let atom = domain.lmo(grad)?;
    let direction = atom.sub(x);
    // <x - s, grad> = <s - x, -grad>
    let gap = clamp_gap(x.sub(&atom).dot(grad))?;
    Ok(GapResult {
        gap,
        atom,
        direction,
    })
}
