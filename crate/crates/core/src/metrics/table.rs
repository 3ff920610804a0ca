//! Results CSV, plain-text summary, and plot-data tables.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::Path;

use super::{RunRecord, SweepReport};
use crate::error::{Error, Result};

pub const CSV_HEADER: [&str; 9] = [
    "layout",
    "cable_id",
    "kappa",
    "seed",
    "feasible",
    "energy",
    "objective",
    "oracle_objective",
    "opt_gap",
];

/// `%.12g`: 12 significant digits, trailing zeros stripped, exponent form
/// outside `1e-4 <= |x| < 1e12`.
pub fn format_g12(x: f64) -> String {
    if x == 0.0 {
        return if x.is_sign_negative() {
            "-0".into()
        } else {
            "0".into()
        };
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..12).contains(&exp) {
        let fixed = format!("{x:.*}", (11 - exp) as usize);
        strip_zeros(&fixed).to_string()
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", strip_zeros(mantissa), exp.abs())
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(format_g12).unwrap_or_default()
}

pub fn render_csv(records: &[RunRecord]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER).expect("in-memory write");
    for r in records {
        w.write_record([
            r.layout.clone(),
            r.cable_id.clone(),
            format_g12(r.kappa),
            r.seed.to_string(),
            r.feasible.to_string(),
            format_g12(r.energy),
            opt(r.objective),
            format_g12(r.oracle_objective),
            opt(r.opt_gap),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
}

pub fn write_csv(path: &Path, records: &[RunRecord]) -> Result<()> {
    std::fs::write(path, render_csv(records))?;
    Ok(())
}

fn schema(row: usize, detail: impl std::fmt::Display) -> Error {
    Error::Schema(format!("row {row}: {detail}"))
}

fn real(row: usize, name: &str, s: &str) -> Result<f64> {
    let v: f64 = s
        .parse()
        .map_err(|_| schema(row, format!("{name} '{s}' is not a number")))?;
    if !v.is_finite() {
        return Err(schema(row, format!("{name} must be finite")));
    }
    Ok(v)
}

fn opt_real(row: usize, name: &str, s: &str) -> Result<Option<f64>> {
    if s.is_empty() {
        Ok(None)
    } else {
        real(row, name, s).map(Some)
    }
}

/// Parses a results CSV. A feasible row without a gap cell gets the gap
/// recomputed; infeasible rows must leave objective and gap empty.
pub fn read_csv(text: &str) -> Result<Vec<RunRecord>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(text.as_bytes());
    let header = reader
        .headers()
        .map_err(|e| Error::Schema(e.to_string()))?
        .clone();
    if header.iter().ne(CSV_HEADER) {
        return Err(Error::Schema(format!(
            "header must be '{}'",
            CSV_HEADER.join(",")
        )));
    }
    let mut records = Vec::new();
    for (i, row) in reader.records().enumerate() {
        let n = i + 2;
        let row = row.map_err(|e| schema(n, e))?;
        let f = |k: usize| row.get(k).unwrap_or("");
        let feasible = match f(4) {
            "true" => true,
            "false" => false,
            other => return Err(schema(n, format!("feasible '{other}' is not true/false"))),
        };
        let objective = opt_real(n, "objective", f(6))?;
        let oracle_objective = real(n, "oracle_objective", f(7))?;
        let mut opt_gap = opt_real(n, "opt_gap", f(8))?;
        if feasible != objective.is_some() {
            return Err(schema(
                n,
                "objective must be present exactly for feasible rows",
            ));
        }
        if !feasible && opt_gap.is_some() {
            return Err(schema(n, "infeasible rows carry no gap"));
        }
        if let (Some(o), None) = (objective, opt_gap) {
            opt_gap = super::relative_gap(o, oracle_objective);
        }
        records.push(RunRecord {
            layout: f(0).to_string(),
            cable_id: f(1).to_string(),
            kappa: real(n, "kappa", f(2))?,
            seed: f(3)
                .parse()
                .map_err(|_| schema(n, format!("seed '{}' is not an unsigned integer", f(3))))?,
            feasible,
            energy: real(n, "energy", f(5))?,
            objective,
            oracle_objective,
            opt_gap,
        });
    }
    Ok(records)
}

/// Tab-separated per-cell table; undefined gap statistics are empty cells.
pub fn render_summary(report: &SweepReport) -> String {
    let mut out = String::from(
        "layout\tcable_id\tkappa\truns\tfeasible\temp_prob\topt_gap_mean\t\
         opt_gap_min\topt_gap_q1\topt_gap_median\topt_gap_q3\topt_gap_max\n",
    );
    for c in &report.cells {
        let gap = match &c.opt_gap {
            Some(g) => {
                let q = &g.quartiles;
                [g.mean, q.min, q.q1, q.median, q.q3, q.max].map(format_g12)
            }
            None => Default::default(),
        };
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}",
            c.layout,
            c.cable_id,
            format_g12(c.kappa),
            c.runs,
            c.feasible,
            format_g12(c.emp_prob),
            gap.join("\t")
        )
        .expect("string write");
    }
    out
}

/// Whitespace-separated tables per layout, keyed by file name:
/// `<layout>_emp_prob.dat` and `<layout>_opt_gap.dat` (cable rows, one
/// column per κ) and `<layout>_opt_gap_box.dat` (one row per cell).
/// Missing values are written as `nan`.
pub fn plot_tables(report: &SweepReport) -> Vec<(String, String)> {
    let layouts: BTreeSet<&str> = report.cells.iter().map(|c| c.layout.as_str()).collect();
    let mut files = Vec::new();
    for layout in layouts {
        let cells: Vec<_> = report.cells.iter().filter(|c| c.layout == layout).collect();
        let mut kappas: Vec<f64> = cells.iter().map(|c| c.kappa).collect();
        kappas.sort_by(f64::total_cmp);
        kappas.dedup();
        let cables: BTreeSet<&str> = cells.iter().map(|c| c.cable_id.as_str()).collect();
        let nan = || "nan".to_string();

        let grid = |value: &dyn Fn(&super::CellSummary) -> Option<f64>| {
            let mut t = String::from("# cable");
            for k in &kappas {
                write!(t, " kappa={}", format_g12(*k)).expect("string write");
            }
            t.push('\n');
            for cable in &cables {
                t.push_str(cable);
                for &k in &kappas {
                    let v = report
                        .cell(layout, cable, k)
                        .and_then(value)
                        .map_or_else(nan, format_g12);
                    write!(t, " {v}").expect("string write");
                }
                t.push('\n');
            }
            t
        };
        files.push((
            format!("{layout}_emp_prob.dat"),
            grid(&|c| Some(c.emp_prob)),
        ));
        files.push((
            format!("{layout}_opt_gap.dat"),
            grid(&|c| c.opt_gap.map(|g| g.mean)),
        ));

        let mut boxes = String::from("# cable kappa count min q1 median q3 max\n");
        for c in &cells {
            let stats = match &c.opt_gap {
                Some(g) => {
                    let q = &g.quartiles;
                    [q.min, q.q1, q.median, q.q3, q.max].map(format_g12)
                }
                None => std::array::from_fn(|_| nan()),
            };
            writeln!(
                boxes,
                "{} {} {} {}",
                c.cable_id,
                format_g12(c.kappa),
                c.opt_gap.map_or(0, |g| g.count),
                stats.join(" ")
            )
            .expect("string write");
        }
        files.push((format!("{layout}_opt_gap_box.dat"), boxes));
    }
    files
}
