//! Text formats.
//!
//! `symm-v1` stores a symmetric matrix as its nonzero upper triangle:
//!
//! ```text
//! symm-v1 <N> <NNZ>
//! <i> <j> <value>      # NNZ lines, 0-based, i <= j
//! ```
//!
//! `lham-v1` stores a local Hamiltonian as Pauli strings:
//!
//! ```text
//! lham-v1 <n> <H1|H2>
//! X <mask-hex> <K>
//! Z <mask-hex> <J>
//! ```
//!
//! Values are written with 17 significant digits so a write/read round trip
//! is exact.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::generators::{LocalHamiltonianSpec, LocalModel, PauliTerm};
use crate::matrix::SymmetricMatrix;

fn parse_err(source: &str, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: source.to_string(),
        line,
        message: message.into(),
    }
}

fn parse_value(source: &str, line: usize, token: &str) -> Result<f64> {
    let v: f64 = token
        .parse()
        .map_err(|_| parse_err(source, line, format!("invalid number {token:?}")))?;
    if !v.is_finite() {
        return Err(parse_err(source, line, format!("non-finite value {token:?}")));
    }
    Ok(v)
}

/// Non-blank lines with their 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty())
}

pub fn format_matrix(m: &SymmetricMatrix) -> String {
    let entries: Vec<_> = m.upper_nonzeros().collect();
    let mut out = format!("symm-v1 {} {}\n", m.order(), entries.len());
    for (i, j, v) in entries {
        writeln!(out, "{i} {j} {v:.16e}").unwrap();
    }
    out
}

pub fn parse_matrix(text: &str, source: &str) -> Result<SymmetricMatrix> {
    let mut lines = content_lines(text);
    let (hl, header) = lines.next().ok_or_else(|| parse_err(source, 1, "empty file"))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    let (order, nnz) = match fields.as_slice() {
        ["symm-v1", n, nnz] => (
            n.parse::<usize>()
                .ok()
                .filter(|n| *n > 0)
                .ok_or_else(|| parse_err(source, hl, format!("invalid order {n:?}")))?,
            nnz.parse::<usize>()
                .map_err(|_| parse_err(source, hl, format!("invalid entry count {nnz:?}")))?,
        ),
        _ => return Err(parse_err(source, hl, "expected header `symm-v1 N NNZ`")),
    };
    let mut m = SymmetricMatrix::zeros(order)?;
    let mut seen = std::collections::HashSet::new();
    let mut count = 0;
    for (ln, line) in lines {
        count += 1;
        if count > nnz {
            return Err(parse_err(source, ln, format!("more than the declared {nnz} entries")));
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let [i, j, v] = fields.as_slice() else {
            return Err(parse_err(source, ln, "expected `i j value`"));
        };
        let index = |t: &str| {
            t.parse::<usize>()
                .ok()
                .filter(|x| *x < order)
                .ok_or_else(|| parse_err(source, ln, format!("index {t:?} outside 0..{order}")))
        };
        let (i, j) = (index(i)?, index(j)?);
        if i > j {
            return Err(parse_err(source, ln, format!("entry ({i}, {j}) is in the lower triangle")));
        }
        if !seen.insert((i, j)) {
            return Err(parse_err(source, ln, format!("duplicate entry ({i}, {j})")));
        }
        m.set(i, j, parse_value(source, ln, v)?)?;
    }
    if count != nnz {
        return Err(parse_err(
            source,
            text.lines().count().max(1),
            format!("declared {nnz} entries but found {count}"),
        ));
    }
    Ok(m)
}

pub fn read_matrix(path: impl AsRef<Path>) -> Result<SymmetricMatrix> {
    let path = path.as_ref();
    parse_matrix(&fs::read_to_string(path)?, &path.display().to_string())
}

pub fn write_matrix(path: impl AsRef<Path>, m: &SymmetricMatrix) -> Result<()> {
    fs::write(path, format_matrix(m))?;
    Ok(())
}

pub fn format_lham(spec: &LocalHamiltonianSpec) -> String {
    let mut out = format!("lham-v1 {} {}\n", spec.qubits(), spec.model());
    for (kind, terms) in [("X", spec.x_terms()), ("Z", spec.z_terms())] {
        for t in terms {
            writeln!(out, "{kind} {:x} {:.16e}", t.mask, t.coeff).unwrap();
        }
    }
    out
}

pub fn parse_lham(text: &str, source: &str) -> Result<LocalHamiltonianSpec> {
    let mut lines = content_lines(text);
    let (hl, header) = lines.next().ok_or_else(|| parse_err(source, 1, "empty file"))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    let (qubits, model) = match fields.as_slice() {
        ["lham-v1", n, model] => (
            n.parse::<usize>()
                .map_err(|_| parse_err(source, hl, format!("invalid qubit count {n:?}")))?,
            model
                .parse::<LocalModel>()
                .map_err(|e| parse_err(source, hl, e.to_string()))?,
        ),
        _ => return Err(parse_err(source, hl, "expected header `lham-v1 n model`")),
    };
    let mut x_terms = Vec::new();
    let mut z_terms = Vec::new();
    for (ln, line) in lines {
        let fields: Vec<&str> = line.split_whitespace().collect();
        let [kind, mask, coeff] = fields.as_slice() else {
            return Err(parse_err(source, ln, "expected `X|Z mask-hex coefficient`"));
        };
        let digits = mask.trim_start_matches("0x");
        let mask = u64::from_str_radix(digits, 16)
            .map_err(|_| parse_err(source, ln, format!("invalid hex mask {mask:?}")))?;
        let term = PauliTerm {
            mask,
            coeff: parse_value(source, ln, coeff)?,
        };
        match *kind {
            "X" => x_terms.push(term),
            "Z" => z_terms.push(term),
            other => return Err(parse_err(source, ln, format!("unknown term kind {other:?}"))),
        }
    }
    LocalHamiltonianSpec::new(qubits, model, x_terms, z_terms).map_err(|e| parse_err(source, hl, e.to_string()))
}

pub fn read_lham(path: impl AsRef<Path>) -> Result<LocalHamiltonianSpec> {
    let path = path.as_ref();
    parse_lham(&fs::read_to_string(path)?, &path.display().to_string())
}

pub fn write_lham(path: impl AsRef<Path>, spec: &LocalHamiltonianSpec) -> Result<()> {
    fs::write(path, format_lham(spec))?;
    Ok(())
}
