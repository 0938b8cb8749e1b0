//! Config-driven experiment orchestration: resolve the curvature constant
//! and h0, run the solver, re-verify every bound, write the artifacts.

use std::path::{Path, PathBuf};

use crate::config::{CMode, ExperimentConfig};
use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::objective::Objective;
use crate::solver::{check_trace, solve, BoundReport, H0Provenance, RunTrace, SolverConfig};
use crate::trace_io::{render_trace_csv, write_atomic};

/// Samples used when `c_mode = sampled`.
pub const SAMPLED_C_SAMPLES: usize = 100_000;

#[derive(Debug)]
pub struct ExperimentOutcome {
    pub trace: RunTrace,
    pub report: BoundReport,
    pub curvature_c: f64,
    /// Whether the run certifies `C >= C_f` (true only for the analytic
    /// bound, or an explicit C at least as large).
    pub c_certified: bool,
    pub h0: Option<(f64, H0Provenance)>,
    pub trace_path: Option<PathBuf>,
    pub report_path: Option<PathBuf>,
}

fn resolve_c(cfg: &ExperimentConfig) -> Result<(f64, bool)> {
    let analytic = cfg
        .objective
        .curvature_lipschitz_bound(&cfg.domain, cfg.norm)?
        .value;
    let (c, certified) = match cfg.c_mode {
        CMode::Analytic => (analytic, true),
        CMode::Sampled => (
            cfg.objective
                .curvature_sampled(&cfg.domain, SAMPLED_C_SAMPLES, cfg.seed)?
                .value,
            false,
        ),
        CMode::Explicit(c) => (c, c >= analytic - 1e-12 * analytic.abs().max(1.0)),
    };
    if !(c > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "resolved curvature constant is {c}; use `solver.c_mode = explicit` with a \
             positive `solver.c` for objectives with zero curvature"
        )));
    }
    Ok((c, certified))
}

fn resolve_h0(obj: &Objective, domain: &Domain, x0: &crate::vector::Vector) -> Result<Option<(f64, H0Provenance)>> {
    if let (Objective::DiagonalQuadratic { .. }, Domain::Box { .. }) = (obj, domain) {
        let (fmin, _) = obj.global_min_separable_box(domain)?;
        // A start point at the argmin can leave a tiny negative
        // difference through round-off; the bounds need h0 >= 0.
        let h0 = (obj.value(x0)? - fmin).max(0.0);
        return Ok(Some((h0, H0Provenance::ExactOracle)));
    }
    Ok(None)
}

fn resolve_path(base: Option<&Path>, p: &str) -> PathBuf {
    let p = PathBuf::from(p);
    match base {
        Some(dir) if p.is_relative() => dir.join(p),
        _ => p,
    }
}

/// Run one experiment end to end. `out_dir`, when given, anchors relative
/// output paths.
pub fn run_experiment(
    cfg: &ExperimentConfig,
    out_dir: Option<&Path>,
) -> Result<ExperimentOutcome> {
    let (c, c_certified) = resolve_c(cfg)?;
    let x0 = cfg
        .x0
        .clone()
        .unwrap_or_else(|| cfg.domain.first_vertex());
    let solver_cfg = SolverConfig {
        step_rule: cfg.step_rule,
        curvature_c: c,
        epsilon: cfg.epsilon,
        max_iters: cfg.max_iters,
        seed: cfg.seed,
    };
    let mut trace = solve(&cfg.objective, &cfg.domain, &solver_cfg, &x0)?;
    let h0 = resolve_h0(&cfg.objective, &cfg.domain, &x0)?;
    if let Some((h0_val, prov)) = h0 {
        trace.annotate_h0(h0_val, prov);
    }
    let report = check_trace(&cfg.objective, &cfg.domain, &trace, c, c_certified)?;

    let trace_path = cfg
        .trace_path
        .as_deref()
        .map(|p| resolve_path(out_dir, p));
    if let Some(p) = &trace_path {
        write_atomic(p, render_trace_csv(&trace, cfg.digits).as_bytes())?;
    }
    let report_path = cfg
        .report_path
        .as_deref()
        .map(|p| resolve_path(out_dir, p));
    if let Some(p) = &report_path {
        let text = render_report(&trace, &report, c, c_certified);
        write_atomic(p, text.as_bytes())?;
    }

    Ok(ExperimentOutcome {
        trace,
        report,
        curvature_c: c,
        c_certified,
        h0,
        trace_path,
        report_path,
    })
}

pub fn render_report(
    trace: &RunTrace,
    report: &BoundReport,
    c: f64,
    c_certified: bool,
) -> String {
    let mut out = String::new();
    out.push_str(&format!("step_rule = {}\n", trace.config.step_rule.name()));
    out.push_str(&format!("curvature_c = {c:.17e}\n"));
    out.push_str(&format!("c_certified = {c_certified}\n"));
    match trace.h0 {
        Some((h0, H0Provenance::ExactOracle)) => {
            out.push_str(&format!("h0 = {h0:.17e} (exact_oracle)\n"))
        }
        Some((h0, H0Provenance::GridEstimate)) => {
            out.push_str(&format!("h0 = {h0:.17e} (grid_estimate)\n"))
        }
        None => out.push_str("h0 = unknown\n"),
    }
    out.push_str(&format!("iterations = {}\n", trace.records.len()));
    out.push_str(&format!("terminated_early = {}\n", trace.terminated_early));
    if let Some(last) = trace.records.last() {
        out.push_str(&format!("final_gap = {:.17e}\n", last.gap));
        out.push_str(&format!("final_f = {:.17e}\n", last.f_value));
    }
    out.push('\n');
    out.push_str(&report.render());
    out
}

#[derive(Debug)]
pub struct SuiteEntry {
    pub name: String,
    pub outcome: Result<ExperimentOutcome>,
}

#[derive(Debug)]
pub struct SuiteSummary {
    pub entries: Vec<SuiteEntry>,
}

impl SuiteSummary {
    /// Total number of failed checks plus configs that errored out.
    pub fn failures(&self) -> usize {
        self.entries
            .iter()
            .map(|e| match &e.outcome {
                Ok(o) => o.report.failures(),
                Err(_) => 1,
            })
            .sum()
    }
}

/// Run every `.cfg` file in a directory, in name order.
pub fn run_suite(dir: &Path, out_dir: Option<&Path>) -> Result<SuiteSummary> {
    let io_err = |source: std::io::Error| Error::Io {
        path: dir.display().to_string(),
        source,
    };
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(io_err)?
        .collect::<std::io::Result<Vec<_>>>()
        .map_err(io_err)?
        .into_iter()
        .map(|e| e.path())
        .filter(|p| p.extension().map_or(false, |e| e == "cfg"))
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(Error::InvalidArgument(format!(
            "no .cfg files found in {}",
            dir.display()
        )));
    }
    let entries = paths
        .into_iter()
        .map(|path| {
            let name = path
                .file_name()
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_default();
            let outcome = std::fs::read_to_string(&path)
                .map_err(|source| Error::Io {
                    path: path.display().to_string(),
                    source,
                })
                .and_then(|text| crate::config::parse_config(&text))
                .and_then(|cfg| run_experiment(&cfg, out_dir));
            SuiteEntry { name, outcome }
        })
        .collect();
    Ok(SuiteSummary { entries })
}
