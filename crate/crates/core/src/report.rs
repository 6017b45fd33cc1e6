//! CSV serialization of experiment tables.
//!
//! One row per trial with a fixed header, LF line endings and floats in
//! shortest round-trip form. Failed trials keep their row with `NaN` values
//! and the failure message in `status`. Aggregates follow in a trailing
//! block of `# key = value` lines.

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{Error, Result};
use crate::experiment::{EngineOutcome, ReportTable, TrialRow};
use crate::generators::EnsembleKind;
use crate::probability::ProbabilityReport;

pub const HEADER: [&str; 27] = [
    "trial",
    "N",
    "seed",
    "kind",
    "status",
    "alpha1_sq",
    "p_reg2",
    "p_reg1",
    "alpha1_sq_est",
    "p_reg2_est",
    "p_reg1_est",
    "sigma1",
    "sigma2",
    "epsilon_forward",
    "epsilon_inverse",
    "ratio_bound",
    "ratio_actual",
    "ratio_applicable",
    "principal_eigenvalue",
    "lambda1",
    "lambda2",
    "shift",
    "parseval_defect",
    "bound_ok",
    "parseval_ok",
    "engine_p_zero",
    "engine_principal_mass",
];

const STATUS_OK: &str = "ok";
const STATUS_FAILED: &str = "failed: ";

fn report_values(r: &ProbabilityReport) -> [f64; 12] {
    [
        r.alpha1_sq,
        r.p_reg2,
        r.p_reg1,
        r.alpha1_sq_est,
        r.p_reg2_est,
        r.p_reg1_est,
        r.sigma1,
        r.sigma2,
        r.epsilon_forward,
        r.epsilon_inverse,
        r.ratio_bound,
        r.ratio_actual,
    ]
}

fn record(row: &TrialRow) -> Vec<String> {
    let mut out = vec![
        row.trial.to_string(),
        row.order.to_string(),
        row.seed.to_string(),
        row.kind.as_str().to_string(),
    ];
    let nan = f64::NAN.to_string();
    match &row.outcome {
        Ok(r) => {
            out.push(STATUS_OK.to_string());
            out.extend(report_values(r).iter().map(f64::to_string));
            out.push(r.ratio_applicable.to_string());
            for v in [r.principal_eigenvalue, r.lambda1, r.lambda2, r.shift, r.parseval_defect] {
                out.push(v.to_string());
            }
            out.push(r.bound_ok().to_string());
            out.push(r.parseval_ok().to_string());
        }
        Err(msg) => {
            out.push(format!("{STATUS_FAILED}{msg}"));
            out.extend(std::iter::repeat_n(nan.clone(), 12));
            out.push("false".into());
            out.extend(std::iter::repeat_n(nan.clone(), 5));
            out.push("false".into());
            out.push("false".into());
        }
    }
    match row.engine {
        Some(e) => {
            out.push(e.p_zero.to_string());
            out.push(e.principal_mass.to_string());
        }
        None => {
            out.push(nan.clone());
            out.push(nan);
        }
    }
    out
}

/// Renders the table as CSV text, including the aggregate footer.
pub fn to_csv_string(table: &ReportTable) -> Result<String> {
    if table.rows.is_empty() {
        return Err(Error::config("refusing to write a table with no rows"));
    }
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(HEADER)?;
    for row in &table.rows {
        w.write_record(record(row))?;
    }
    let mut text = String::from_utf8(w.into_inner().map_err(|e| Error::Io(e.into_error()))?)
        .expect("csv output is utf-8");
    for (key, value) in table.aggregates.entries() {
        text.push_str(&format!("# {key} = {value}\n"));
    }
    Ok(text)
}

pub fn emit_csv(table: &ReportTable, path: impl AsRef<Path>) -> Result<()> {
    let text = to_csv_string(table)?;
    std::fs::write(path, text)?;
    Ok(())
}

fn parse_field<T: std::str::FromStr>(rec: &csv::StringRecord, idx: usize, line: u64) -> Result<T> {
    let raw = rec.get(idx).unwrap_or("");
    raw.parse().map_err(|_| Error::Parse {
        path: String::new(),
        line: line as usize,
        message: format!("column {}: cannot parse {raw:?}", HEADER[idx]),
    })
}

/// Parses CSV text written by [`to_csv_string`]. Aggregates are recomputed
/// from the rows; use [`parse_aggregate_block`] to read the written ones.
pub fn parse_csv(text: &str) -> Result<ReportTable> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let header = rdr.headers()?.clone();
    if header.iter().ne(HEADER.iter().copied()) {
        return Err(Error::Parse {
            path: String::new(),
            line: 1,
            message: "unexpected header".into(),
        });
    }
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        let f = |i: usize| parse_field::<f64>(&rec, i, line);
        let kind: EnsembleKind = parse_field(&rec, 3, line)?;
        let status = rec.get(4).unwrap_or("");
        let outcome = if status == STATUS_OK {
            Ok(ProbabilityReport {
                order: parse_field(&rec, 1, line)?,
                alpha1_sq: f(5)?,
                p_reg2: f(6)?,
                p_reg1: f(7)?,
                alpha1_sq_est: f(8)?,
                p_reg2_est: f(9)?,
                p_reg1_est: f(10)?,
                sigma1: f(11)?,
                sigma2: f(12)?,
                epsilon_forward: f(13)?,
                epsilon_inverse: f(14)?,
                ratio_bound: f(15)?,
                ratio_actual: f(16)?,
                ratio_applicable: parse_field(&rec, 17, line)?,
                principal_eigenvalue: f(18)?,
                lambda1: f(19)?,
                lambda2: f(20)?,
                shift: f(21)?,
                parseval_defect: f(22)?,
            })
        } else {
            Err(status.strip_prefix(STATUS_FAILED).unwrap_or(status).to_string())
        };
        let (pz, pm) = (f(25)?, f(26)?);
        let engine = if pz.is_nan() && pm.is_nan() {
            None
        } else {
            Some(EngineOutcome {
                p_zero: pz,
                principal_mass: pm,
            })
        };
        rows.push(TrialRow {
            trial: parse_field(&rec, 0, line)?,
            order: parse_field(&rec, 1, line)?,
            seed: parse_field(&rec, 2, line)?,
            kind,
            outcome,
            engine,
        });
    }
    if rows.is_empty() {
        return Err(Error::config("CSV has no rows"));
    }
    Ok(ReportTable::from_rows(rows))
}

pub fn read_csv(path: impl AsRef<Path>) -> Result<ReportTable> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    parse_csv(&text).map_err(|e| match e {
        Error::Parse { line, message, .. } => Error::Parse {
            path: path.display().to_string(),
            line,
            message,
        },
        other => other,
    })
}

/// Reads the `# key = value` footer.
pub fn parse_aggregate_block(text: &str) -> BTreeMap<String, f64> {
    text.lines()
        .filter_map(|l| l.strip_prefix('#'))
        .filter_map(|l| l.split_once('='))
        .filter_map(|(k, v)| Some((k.trim().to_string(), v.trim().parse().ok()?)))
        .collect()
}
