//! CSV serialization of run traces. The header is a frozen interface.

use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::solver::RunTrace;

/// Frozen column schema; tests compare this string verbatim.
pub const CSV_HEADER: &str = "t,f,gap,min_gap,gamma,decrease_bound,theorem_rhs,refined_rhs";

/// Default significant digits: 17 renders f64 round-trip exact.
pub const DEFAULT_DIGITS: usize = 17;

fn fmt(v: f64, digits: usize) -> String {
    format!("{:.*e}", digits.saturating_sub(1), v)
}

fn fmt_opt(v: Option<f64>, digits: usize) -> String {
    v.map(|v| fmt(v, digits)).unwrap_or_default()
}

/// Render a trace as CSV with the given number of significant digits.
pub fn render_trace_csv(trace: &RunTrace, digits: usize) -> String {
    let mut out = String::with_capacity(64 * (trace.records.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in &trace.records {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            r.t,
            fmt(r.f_value, digits),
            fmt(r.gap, digits),
            fmt(r.min_gap, digits),
            fmt(r.gamma, digits),
            fmt(r.decrease_bound, digits),
            fmt_opt(r.theorem_rhs, digits),
            fmt_opt(r.refined_rhs, digits),
        ));
    }
    out
}

/// Write a trace CSV atomically (temp file + rename).
pub fn emit_trace_csv(trace: &RunTrace, path: &Path, digits: usize) -> Result<()> {
    let content = render_trace_csv(trace, digits);
    write_atomic(path, content.as_bytes())
}

pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let io_err = |source: std::io::Error| Error::Io {
        path: path.display().to_string(),
        source,
    };
    let tmp = path.with_extension("tmp");
    {
        let mut f = std::fs::File::create(&tmp).map_err(io_err)?;
        f.write_all(bytes).map_err(io_err)?;
        f.sync_all().map_err(io_err)?;
    }
    std::fs::rename(&tmp, path).map_err(io_err)?;
    Ok(())
}

/// One parsed CSV row.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvRow {
    pub t: usize,
    pub f: f64,
    pub gap: f64,
    pub min_gap: f64,
    pub gamma: f64,
    pub decrease_bound: f64,
    pub theorem_rhs: Option<f64>,
    pub refined_rhs: Option<f64>,
}

/// Parse trace CSV text, verifying the frozen header.
pub fn parse_trace_csv(text: &str) -> Result<Vec<CsvRow>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header == CSV_HEADER => {}
        Some((_, header)) => {
            return Err(Error::Parse {
                line: 1,
                message: format!("unexpected CSV header {header:?}, want {CSV_HEADER:?}"),
            })
        }
        None => {
            return Err(Error::Parse {
                line: 1,
                message: "empty CSV".into(),
            })
        }
    }
    let mut rows = Vec::new();
    for (idx, line) in lines {
        if line.is_empty() {
            continue;
        }
        let lineno = idx + 1;
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 8 {
            return Err(Error::Parse {
                line: lineno,
                message: format!("expected 8 fields, got {}", fields.len()),
            });
        }
        let num = |s: &str, name: &str| -> Result<f64> {
            s.parse::<f64>().map_err(|_| Error::Parse {
                line: lineno,
                message: format!("bad {name} value {s:?}"),
            })
        };
        let opt = |s: &str, name: &str| -> Result<Option<f64>> {
            if s.is_empty() {
                Ok(None)
            } else {
                num(s, name).map(Some)
            }
        };
        rows.push(CsvRow {
            t: fields[0].parse().map_err(|_| Error::Parse {
                line: lineno,
                message: format!("bad iteration index {:?}", fields[0]),
            })?,
            f: num(fields[1], "f")?,
            gap: num(fields[2], "gap")?,
            min_gap: num(fields[3], "min_gap")?,
            gamma: num(fields[4], "gamma")?,
            decrease_bound: num(fields[5], "decrease_bound")?,
            theorem_rhs: opt(fields[6], "theorem_rhs")?,
            refined_rhs: opt(fields[7], "refined_rhs")?,
        });
    }
    Ok(rows)
}
