//! Empirical decay-rate fitting on trace columns. Diagnostic only: the
//! mechanical bound checks, not the fitted slope, are what the harness
//! asserts.

use crate::error::{Error, Result};

/// Least-squares line on `(log(t+1), log y)` over a window of iterations.
#[derive(Debug, Clone, PartialEq)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub window: (usize, usize),
}

/// Explicit no-fit outcome (all values in the window are zero, or fewer
/// than 10 usable points).
#[derive(Debug, Clone, PartialEq)]
pub enum RateFitOutcome {
    Fit(RateFit),
    NoFit { reason: String },
}

/// Fit `log y = slope * log(t+1) + intercept` on the points of `series`
/// (pairs of iteration index and a positive value) with `t` inside the
/// window, inclusive. Points with `y <= 0` are excluded.
pub fn fit_rate(series: &[(usize, f64)], window: (usize, usize)) -> Result<RateFitOutcome> {
    let (t_min, t_max) = window;
    if t_min > t_max {
        return Err(Error::InvalidArgument(format!(
            "empty window: {t_min}..{t_max}"
        )));
    }
    let pts: Vec<(f64, f64)> = series
        .iter()
        .filter(|(t, y)| *t >= t_min && *t <= t_max && *y > 0.0)
        .map(|(t, y)| (((t + 1) as f64).ln(), y.ln()))
        .collect();
    if pts.len() < 10 {
        return Ok(RateFitOutcome::NoFit {
            reason: format!(
                "need at least 10 positive points in window [{t_min}, {t_max}], found {}",
                pts.len()
            ),
        });
    }
    let n = pts.len() as f64;
    let mean_x = pts.iter().map(|(x, _)| x).sum::<f64>() / n;
    let mean_y = pts.iter().map(|(_, y)| y).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|(x, _)| (x - mean_x) * (x - mean_x)).sum();
    let sxy: f64 = pts.iter().map(|(x, y)| (x - mean_x) * (y - mean_y)).sum();
    let syy: f64 = pts.iter().map(|(_, y)| (y - mean_y) * (y - mean_y)).sum();
    if sxx == 0.0 {
        return Ok(RateFitOutcome::NoFit {
            reason: "window has no spread in t".into(),
        });
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let r_squared = if syy == 0.0 {
        1.0 // constant series fit exactly by a flat line
    } else {
        (1.0 - (syy - slope * sxy) / syy).clamp(0.0, 1.0)
    };
    Ok(RateFitOutcome::Fit(RateFit {
        slope,
        intercept,
        r_squared,
        window,
    }))
}
