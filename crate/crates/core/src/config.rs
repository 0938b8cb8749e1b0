//! Line-oriented experiment configuration: `section.key = value` with
//! sections `objective`, `domain`, `solver`, `output`. Vectors are
//! comma-separated reals in brackets, matrices semicolon-separated rows.

use std::collections::BTreeMap;

use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::gap::FEASIBILITY_TOL;
use crate::objective::Objective;
use crate::solver::StepRule;
use crate::trace_io::DEFAULT_DIGITS;
use crate::vector::{Norm, Vector};

/// How the curvature constant handed to the solver is resolved.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CMode {
    /// `L * diam^2`; certifies `C >= C_f`.
    Analytic,
    /// Empirical estimate; heuristic, never a certificate.
    Sampled,
    Explicit(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub objective: Objective,
    pub domain: Domain,
    pub step_rule: StepRule,
    pub c_mode: CMode,
    pub epsilon: f64,
    pub max_iters: usize,
    pub seed: u64,
    pub x0: Option<Vector>,
    pub norm: Norm,
    pub trace_path: Option<String>,
    pub report_path: Option<String>,
    pub digits: usize,
}

struct RawConfig {
    entries: BTreeMap<String, (usize, String)>,
}

impl RawConfig {
    fn take(&mut self, key: &str) -> Option<(usize, String)> {
        self.entries.remove(key)
    }

    fn require(&mut self, key: &str) -> Result<(usize, String)> {
        self.take(key).ok_or_else(|| Error::Parse {
            line: 0,
            message: format!("missing required field `{key}`"),
        })
    }
}

fn field_err(line: usize, key: &str, what: &str) -> Error {
    Error::Parse {
        line,
        message: format!("field `{key}`: {what}"),
    }
}

fn parse_f64(line: usize, key: &str, s: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| field_err(line, key, &format!("expected a real number, got {s:?}")))
}

fn parse_usize(line: usize, key: &str, s: &str) -> Result<usize> {
    s.trim()
        .parse::<usize>()
        .map_err(|_| field_err(line, key, &format!("expected a nonnegative integer, got {s:?}")))
}

fn parse_vector(line: usize, key: &str, s: &str) -> Result<Vector> {
    let s = s.trim();
    let inner = s
        .strip_prefix('[')
        .and_then(|s| s.strip_suffix(']'))
        .ok_or_else(|| field_err(line, key, "expected a bracketed vector like [1, 2]"))?;
    let coords = inner
        .split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| field_err(line, key, &format!("bad vector entry {p:?}")))
        })
        .collect::<Result<Vec<f64>>>()?;
    Vector::new(coords).map_err(|e| field_err(line, key, &e.to_string()))
}

fn parse_matrix(line: usize, key: &str, s: &str) -> Result<Vec<Vector>> {
    let s = s.trim();
    let inner = s
        .strip_prefix('[')
        .and_then(|s| s.strip_suffix(']'))
        .ok_or_else(|| field_err(line, key, "expected a bracketed matrix like [1, 0; 0, 1]"))?;
    inner
        .split(';')
        .map(|row| parse_vector(line, key, &format!("[{row}]")))
        .collect()
}

/// Parse and fully validate a config. Defaults: `epsilon = 1e-8`,
/// `max_iters = 1000`, `seed = 0`, `c_mode = analytic`, `norm = l2`,
/// `digits = 17`.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let mut entries: BTreeMap<String, (usize, String)> = BTreeMap::new();
    for (idx, raw_line) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw_line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or(Error::Parse {
            line: lineno,
            message: format!("expected `section.key = value`, got {line:?}"),
        })?;
        let key = key.trim().to_string();
        if !key.contains('.') {
            return Err(Error::Parse {
                line: lineno,
                message: format!("key {key:?} is missing its section prefix"),
            });
        }
        if entries.contains_key(&key) {
            return Err(Error::Parse {
                line: lineno,
                message: format!("duplicate key `{key}`"),
            });
        }
        entries.insert(key, (lineno, value.trim().to_string()));
    }
    let mut raw = RawConfig { entries };

    // objective block
    let (oline, okind) = raw.require("objective.kind")?;
    let objective = match okind.as_str() {
        "diagonal_quadratic" => {
            let (l, v) = raw.require("objective.diag")?;
            let diag = parse_vector(l, "objective.diag", &v)?;
            let b = match raw.take("objective.b") {
                Some((l, v)) => parse_vector(l, "objective.b", &v)?,
                None => Vector::zeros(diag.dim()),
            };
            Objective::diagonal(diag, b)
                .map_err(|e| field_err(oline, "objective", &e.to_string()))?
        }
        "quadratic" => {
            let (l, v) = raw.require("objective.matrix")?;
            let rows = parse_matrix(l, "objective.matrix", &v)?;
            for (i, row) in rows.iter().enumerate() {
                for j in 0..row.dim().min(rows.len()) {
                    if (rows[i][j] - rows[j][i]).abs() > 1e-12 {
                        return Err(field_err(
                            l,
                            "objective.matrix",
                            &format!(
                                "matrix is not symmetric at ({i},{j}): {} vs {}",
                                rows[i][j], rows[j][i]
                            ),
                        ));
                    }
                }
            }
            let b = match raw.take("objective.b") {
                Some((l, v)) => parse_vector(l, "objective.b", &v)?,
                None => Vector::zeros(rows.len()),
            };
            let lipschitz_l = match raw.take("objective.lipschitz_l") {
                Some((l, v)) => Some(parse_f64(l, "objective.lipschitz_l", &v)?),
                None => None,
            };
            Objective::quadratic(rows, b, lipschitz_l)
                .map_err(|e| field_err(oline, "objective", &e.to_string()))?
        }
        other => {
            return Err(field_err(
                oline,
                "objective.kind",
                &format!("unknown kind {other:?} (want quadratic or diagonal_quadratic)"),
            ))
        }
    };

    // domain block
    let (dline, dkind) = raw.require("domain.kind")?;
    let domain = match dkind.as_str() {
        "simplex" => {
            let (l, v) = raw.require("domain.dim")?;
            Domain::simplex(parse_usize(l, "domain.dim", &v)?)
        }
        "box" => {
            let (ll, lv) = raw.require("domain.lo")?;
            let (hl, hv) = raw.require("domain.hi")?;
            Domain::boxed(
                parse_vector(ll, "domain.lo", &lv)?,
                parse_vector(hl, "domain.hi", &hv)?,
            )
        }
        "l1ball" => {
            let (rl, rv) = raw.require("domain.radius")?;
            let (nl, nv) = raw.require("domain.dim")?;
            Domain::l1_ball(
                parse_f64(rl, "domain.radius", &rv)?,
                parse_usize(nl, "domain.dim", &nv)?,
            )
        }
        "atomset" => {
            let (vl, vv) = raw.require("domain.vertices")?;
            Domain::atom_set(parse_matrix(vl, "domain.vertices", &vv)?)
        }
        other => {
            return Err(field_err(
                dline,
                "domain.kind",
                &format!("unknown kind {other:?} (want simplex, box, l1ball or atomset)"),
            ))
        }
    }
    .map_err(|e| field_err(dline, "domain", &e.to_string()))?;

    if domain.dim() != objective.dim() {
        return Err(field_err(
            dline,
            "domain",
            &format!(
                "domain dimension {} does not match objective dimension {}",
                domain.dim(),
                objective.dim()
            ),
        ));
    }

    // solver block
    let step_rule = match raw.take("solver.step_rule") {
        Some((l, v)) => StepRule::parse(&v).ok_or_else(|| {
            field_err(
                l,
                "solver.step_rule",
                &format!("unknown rule {v:?} (want line_search, quad_bound or classic_decay)"),
            )
        })?,
        None => StepRule::QuadBound,
    };
    let c_mode = match raw.take("solver.c_mode") {
        Some((l, v)) => match v.as_str() {
            "analytic" => CMode::Analytic,
            "sampled" => CMode::Sampled,
            "explicit" => {
                let (cl, cv) = raw.require("solver.c")?;
                let c = parse_f64(cl, "solver.c", &cv)?;
                if !(c > 0.0) {
                    return Err(field_err(cl, "solver.c", "must be positive"));
                }
                CMode::Explicit(c)
            }
            other => {
                return Err(field_err(
                    l,
                    "solver.c_mode",
                    &format!("unknown mode {other:?} (want analytic, sampled or explicit)"),
                ))
            }
        },
        None => CMode::Analytic,
    };
    let epsilon = match raw.take("solver.epsilon") {
        Some((l, v)) => {
            let e = parse_f64(l, "solver.epsilon", &v)?;
            if !(e >= 0.0) {
                return Err(field_err(l, "solver.epsilon", "must be nonnegative"));
            }
            e
        }
        None => 1e-8,
    };
    let max_iters = match raw.take("solver.max_iters") {
        Some((l, v)) => parse_usize(l, "solver.max_iters", &v)?,
        None => 1000,
    };
    let seed = match raw.take("solver.seed") {
        Some((l, v)) => v
            .parse::<u64>()
            .map_err(|_| field_err(l, "solver.seed", &format!("expected an integer, got {v:?}")))?,
        None => 0,
    };
    let norm = match raw.take("solver.norm") {
        Some((l, v)) => Norm::parse(&v).ok_or_else(|| {
            field_err(l, "solver.norm", &format!("unknown norm {v:?} (want l1, l2 or linf)"))
        })?,
        None => Norm::L2,
    };
    let x0 = match raw.take("solver.x0") {
        Some((l, v)) => {
            let x0 = parse_vector(l, "solver.x0", &v)?;
            x0.check_dim(domain.dim())
                .map_err(|e| field_err(l, "solver.x0", &e.to_string()))?;
            match domain.contains(&x0, FEASIBILITY_TOL) {
                Ok(true) => {}
                Ok(false) => return Err(field_err(l, "solver.x0", "start point is infeasible")),
                Err(Error::Unsupported(_)) => {}
                Err(e) => return Err(e),
            }
            Some(x0)
        }
        None => None,
    };

    // output block
    let trace_path = raw.take("output.trace").map(|(_, v)| v);
    let report_path = raw.take("output.report").map(|(_, v)| v);
    let digits = match raw.take("output.digits") {
        Some((l, v)) => {
            let d = parse_usize(l, "output.digits", &v)?;
            if d == 0 || d > 17 {
                return Err(field_err(l, "output.digits", "must be between 1 and 17"));
            }
            d
        }
        None => DEFAULT_DIGITS,
    };

    if let Some((key, (line, _))) = raw.entries.iter().next() {
        return Err(Error::Parse {
            line: *line,
            message: format!("unknown key `{key}`"),
        });
    }

    Ok(ExperimentConfig {
        objective,
        domain,
        step_rule,
        c_mode,
        epsilon,
        max_iters,
        seed,
        x0,
        norm,
        trace_path,
        report_path,
        digits,
    })
}

fn fmt_full(v: f64) -> String {
    format!("{v:.16e}")
}

fn fmt_vector(v: &Vector) -> String {
    let parts: Vec<String> = v.iter().map(|&x| fmt_full(x)).collect();
    format!("[{}]", parts.join(", "))
}

fn fmt_matrix(rows: &[Vector]) -> String {
    let parts: Vec<String> = rows
        .iter()
        .map(|r| {
            r.iter()
                .map(|&x| fmt_full(x))
                .collect::<Vec<_>>()
                .join(", ")
        })
        .collect();
    format!("[{}]", parts.join("; "))
}

/// Render a config in canonical form; `parse_config` of the output yields
/// an identical config.
pub fn emit_canonical(cfg: &ExperimentConfig) -> String {
    let mut out = String::new();
    match &cfg.objective {
        Objective::DiagonalQuadratic { diag, b } => {
            out.push_str("objective.kind = diagonal_quadratic\n");
            out.push_str(&format!("objective.diag = {}\n", fmt_vector(diag)));
            out.push_str(&format!("objective.b = {}\n", fmt_vector(b)));
        }
        Objective::Quadratic {
            matrix,
            b,
            lipschitz_l,
        } => {
            out.push_str("objective.kind = quadratic\n");
            out.push_str(&format!("objective.matrix = {}\n", fmt_matrix(matrix)));
            out.push_str(&format!("objective.b = {}\n", fmt_vector(b)));
            if let Some(l) = lipschitz_l {
                out.push_str(&format!("objective.lipschitz_l = {}\n", fmt_full(*l)));
            }
        }
    }
    match &cfg.domain {
        Domain::Simplex { dim } => {
            out.push_str("domain.kind = simplex\n");
            out.push_str(&format!("domain.dim = {dim}\n"));
        }
        Domain::Box { lo, hi } => {
            out.push_str("domain.kind = box\n");
            out.push_str(&format!("domain.lo = {}\n", fmt_vector(lo)));
            out.push_str(&format!("domain.hi = {}\n", fmt_vector(hi)));
        }
        Domain::L1Ball { radius, dim } => {
            out.push_str("domain.kind = l1ball\n");
            out.push_str(&format!("domain.radius = {}\n", fmt_full(*radius)));
            out.push_str(&format!("domain.dim = {dim}\n"));
        }
        Domain::AtomSet { vertices } => {
            out.push_str("domain.kind = atomset\n");
            out.push_str(&format!("domain.vertices = {}\n", fmt_matrix(vertices)));
        }
    }
    out.push_str(&format!("solver.step_rule = {}\n", cfg.step_rule.name()));
    match cfg.c_mode {
        CMode::Analytic => out.push_str("solver.c_mode = analytic\n"),
        CMode::Sampled => out.push_str("solver.c_mode = sampled\n"),
        CMode::Explicit(c) => {
            out.push_str("solver.c_mode = explicit\n");
            out.push_str(&format!("solver.c = {}\n", fmt_full(c)));
        }
    }
    out.push_str(&format!("solver.epsilon = {}\n", fmt_full(cfg.epsilon)));
    out.push_str(&format!("solver.max_iters = {}\n", cfg.max_iters));
    out.push_str(&format!("solver.seed = {}\n", cfg.seed));
    out.push_str(&format!("solver.norm = {}\n", cfg.norm.name()));
    if let Some(x0) = &cfg.x0 {
        out.push_str(&format!("solver.x0 = {}\n", fmt_vector(x0)));
    }
    if let Some(p) = &cfg.trace_path {
        out.push_str(&format!("output.trace = {p}\n"));
    }
    if let Some(p) = &cfg.report_path {
        out.push_str(&format!("output.report = {p}\n"));
    }
    out.push_str(&format!("output.digits = {}\n", cfg.digits));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "\
objective.kind = diagonal_quadratic
objective.diag = [1, -1]
domain.kind = box
domain.lo = [-1, -1]
domain.hi = [1, 1]
solver.step_rule = quad_bound
";

    #[test]
    fn minimal_config_parses_with_defaults() {
        let cfg = parse_config(MINIMAL).unwrap();
        assert_eq!(cfg.step_rule, StepRule::QuadBound);
        assert_eq!(cfg.c_mode, CMode::Analytic);
        assert_eq!(cfg.epsilon, 1e-8);
        assert_eq!(cfg.max_iters, 1000);
        assert_eq!(cfg.seed, 0);
        assert_eq!(cfg.norm, Norm::L2);
        assert_eq!(cfg.digits, 17);
    }

    #[test]
    fn degenerate_box_coordinate_rejected() {
        let text = MINIMAL.replace("domain.hi = [1, 1]", "domain.hi = [-1, 1]");
        let err = parse_config(&text).unwrap_err();
        assert!(err.to_string().contains("degenerate"), "{err}");
    }

    #[test]
    fn unknown_key_named_with_line() {
        let text = format!("{MINIMAL}solver.bogus = 3\n");
        let err = parse_config(&text).unwrap_err();
        assert!(err.to_string().contains("solver.bogus"), "{err}");
    }

    #[test]
    fn non_symmetric_matrix_rejected() {
        let text = "\
objective.kind = quadratic
objective.matrix = [1, 2; 0, 1]
domain.kind = simplex
domain.dim = 2
";
        let err = parse_config(text).unwrap_err();
        assert!(err.to_string().contains("not symmetric"), "{err}");
    }

    #[test]
    fn infeasible_x0_rejected() {
        let text = format!("{MINIMAL}solver.x0 = [2, 0]\n");
        let err = parse_config(&text).unwrap_err();
        assert!(err.to_string().contains("infeasible"), "{err}");
    }

    #[test]
    fn canonical_round_trip() {
        let text = format!("{MINIMAL}solver.x0 = [0.5, -0.25]\nsolver.epsilon = 1e-7\n");
        let cfg = parse_config(&text).unwrap();
        let emitted = emit_canonical(&cfg);
        let reparsed = parse_config(&emitted).unwrap();
        assert_eq!(cfg, reparsed);
    }

    #[test]
    fn comments_and_blank_lines_ignored() {
        let text = format!("# a comment\n\n{MINIMAL}\n# trailing\n");
        assert!(parse_config(&text).is_ok());
    }
}
