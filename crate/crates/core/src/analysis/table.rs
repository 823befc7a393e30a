use std::fmt::Write as _;

use super::{ErrorRecord, Norm, StudyReport};
use crate::error::{Error, Result};

pub const CSV_HEADER: &str = "level,h_max,linf_u,order_u,linf_grad,order_grad,l2_u,l2_lambda";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TableFormat {
    Csv,
    Markdown,
}

/// Five significant digits with a signed two-digit exponent, e.g.
/// `2.8553e-01`.
pub fn format_sci(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    let s = format!("{x:.4e}");
    let (mantissa, exp) = s.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mantissa}e{sign}{:02}", exp.abs())
}

pub fn format_order(x: Option<f64>) -> String {
    x.map_or(String::new(), |v| format!("{v:.4}"))
}

pub fn render_table(report: &StudyReport, format: TableFormat) -> String {
    let ou = report.orders(Norm::LinfSolution);
    let og = report.orders(Norm::LinfGradient);
    let mut out = String::new();
    match format {
        TableFormat::Csv => {
            out.push_str(CSV_HEADER);
            out.push('\n');
            for (l, r) in report.records.iter().enumerate() {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},{},{}",
                    l + 1,
                    format_sci(r.h_max),
                    format_sci(r.linf_solution),
                    format_order(ou[l]),
                    format_sci(r.linf_gradient),
                    format_order(og[l]),
                    format_sci(r.l2_solution),
                    format_sci(r.l2_lambda_flux),
                );
            }
        }
        TableFormat::Markdown => {
            if !report.title.is_empty() {
                let _ = writeln!(out, "Numerical convergence test: {}\n", report.title);
            }
            out.push_str(
                "| Mesh | max{h} | Solution L∞ error | order | Gradient L∞ error | order |\n",
            );
            out.push_str("|---|---|---|---|---|---|\n");
            for (l, r) in report.records.iter().enumerate() {
                let _ = writeln!(
                    out,
                    "| Level {} | {} | {} | {} | {} | {} |",
                    l + 1,
                    format_sci(r.h_max),
                    format_sci(r.linf_solution),
                    format_order(ou[l]),
                    format_sci(r.linf_gradient),
                    format_order(og[l]),
                );
            }
            if report.records.len() >= 2 {
                let _ = writeln!(
                    out,
                    "\nOverall order (level 1 to {}): solution {}, gradient {}",
                    report.records.len(),
                    format_order(report.overall_order(Norm::LinfSolution)),
                    format_order(report.overall_order(Norm::LinfGradient)),
                );
            }
        }
    }
    out
}

/// Reads the records back from [`render_table`]'s CSV output. Order columns
/// are recomputed, not read.
pub fn parse_csv(text: &str) -> Result<Vec<ErrorRecord>> {
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty());
    match lines.next() {
        Some((_, h)) if h.trim() == CSV_HEADER => {}
        _ => {
            return Err(Error::Parse {
                line: 1,
                message: format!("expected header `{CSV_HEADER}`"),
            })
        }
    }
    let mut records = Vec::new();
    for (i, line) in lines {
        let fields: Vec<&str> = line.split(',').collect();
        let bad = |message: String| Error::Parse {
            line: i + 1,
            message,
        };
        if fields.len() != 8 {
            return Err(bad(format!("expected 8 fields, got {}", fields.len())));
        }
        let num = |k: usize| -> Result<f64> {
            fields[k]
                .trim()
                .parse()
                .map_err(|_| bad(format!("field {} is not a number: {:?}", k + 1, fields[k])))
        };
        records.push(ErrorRecord {
            h_max: num(1)?,
            linf_solution: num(2)?,
            linf_gradient: num(4)?,
            l2_solution: num(6)?,
            l2_lambda_flux: num(7)?,
        });
    }
    Ok(records)
}
