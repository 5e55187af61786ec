use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::project_multiplier_step;
use crate::driver::IterationTrace;
use crate::error::{Error, Result};
use crate::problems::KnownSolution;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TableFormat {
    Md,
    Csv,
    Json,
}

impl TableFormat {
    pub fn extension(&self) -> &'static str {
        match self {
            TableFormat::Md => "md",
            TableFormat::Csv => "csv",
            TableFormat::Json => "json",
        }
    }
}

impl FromStr for TableFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "md" => Ok(TableFormat::Md),
            "csv" => Ok(TableFormat::Csv),
            "json" => Ok(TableFormat::Json),
            _ => Err(Error::InvalidConfig(format!("unknown output format '{s}'"))),
        }
    }
}

/// One displayed row. Logs are base 10 rounded to one decimal, `alpha_max`
/// to four decimals and multipliers to two. Missing cells (terminal row, or
/// a zero norm) are `None`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub iter: usize,
    pub log_mu: f64,
    pub log_dz: Option<f64>,
    pub log_u: Option<f64>,
    pub log_v: Option<f64>,
    pub alpha_max: Option<f64>,
    pub lambda: Vec<f64>,
}

fn round_to(x: f64, digits: i32) -> f64 {
    let s = 10f64.powi(digits);
    let r = (x * s).round() / s;
    // Avoid printing "-0.0".
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

fn log1(x: f64) -> Option<f64> {
    (x > 0.0 && x.is_finite()).then(|| round_to(x.log10(), 1))
}

/// Rows of a trace. When `known` is given the subspace split is recomputed
/// from it, otherwise the split stored in the trace is used.
pub fn table_rows(trace: &IterationTrace, known: Option<&KnownSolution>) -> Vec<TableRow> {
    trace
        .records
        .iter()
        .map(|r| {
            let info = r.step.as_ref();
            let proj = info.and_then(|s| match known {
                Some(k) => Some(project_multiplier_step(&s.step, k)),
                None => s.projection,
            });
            TableRow {
                iter: r.iter,
                log_mu: round_to(r.residuals.mu.log10(), 1),
                log_dz: info.and_then(|s| log1(crate::problems::norm2(&s.step.dz))),
                log_u: proj.and_then(|p| log1(p.u_component)),
                log_v: proj.and_then(|p| log1(p.v_component)),
                alpha_max: info.map(|s| round_to(s.alpha_max, 4)),
                lambda: r.iterate.lambda.iter().map(|&l| round_to(l, 2)).collect(),
            }
        })
        .collect()
}

const HEADER: [&str; 7] = [
    "iter",
    "log mu",
    "log ||dz||",
    "log ||U^T dl_B||",
    "log ||V^T dl_B||",
    "alpha_max",
    "lambda",
];

fn cell(x: Option<f64>, digits: usize) -> String {
    x.map(|v| format!("{v:.digits$}")).unwrap_or_default()
}

fn lambda_cell(l: &[f64], sep: &str) -> String {
    l.iter().map(|x| format!("{x:.2}")).collect::<Vec<_>>().join(sep)
}

pub fn emit_table(trace: &IterationTrace, known: Option<&KnownSolution>, format: TableFormat) -> String {
    render_rows(&table_rows(trace, known), format)
}

pub fn render_rows(rows: &[TableRow], format: TableFormat) -> String {
    let mut out = String::new();
    match format {
        TableFormat::Md => {
            let _ = writeln!(out, "| {} |", HEADER.join(" | "));
            let _ = writeln!(out, "|{}", "---|".repeat(HEADER.len()));
            for r in rows {
                let _ = writeln!(
                    out,
                    "| {} | {:.1} | {} | {} | {} | {} | ({}) |",
                    r.iter,
                    r.log_mu,
                    cell(r.log_dz, 1),
                    cell(r.log_u, 1),
                    cell(r.log_v, 1),
                    cell(r.alpha_max, 4),
                    lambda_cell(&r.lambda, ", ")
                );
            }
        }
        TableFormat::Csv => {
            let _ = writeln!(out, "iter,log_mu,log_dz,log_u,log_v,alpha_max,lambda");
            for r in rows {
                let _ = writeln!(
                    out,
                    "{},{:.1},{},{},{},{},{}",
                    r.iter,
                    r.log_mu,
                    cell(r.log_dz, 1),
                    cell(r.log_u, 1),
                    cell(r.log_v, 1),
                    cell(r.alpha_max, 4),
                    lambda_cell(&r.lambda, ";")
                );
            }
        }
        TableFormat::Json => {
            out = serde_json::to_string_pretty(rows).expect("table rows serialize");
            out.push('\n');
        }
    }
    out
}

pub fn parse_json_table(text: &str) -> Result<Vec<TableRow>> {
    serde_json::from_str(text).map_err(|e| Error::InvalidConfig(format!("table JSON: {e}")))
}
