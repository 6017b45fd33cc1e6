//! Scatter plots of estimated against computed probabilities, as plain SVG.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::experiment::ReportTable;
use crate::probability::ProbabilityReport;

const PANEL: f64 = 260.0;
const MARGIN: f64 = 50.0;
const GAP: f64 = 40.0;
const TICKS: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];

struct Pair {
    id: &'static str,
    title: &'static str,
    get: fn(&ProbabilityReport) -> (f64, f64),
}

const PAIRS: [Pair; 3] = [
    Pair {
        id: "alpha1_sq",
        title: "alpha1^2",
        get: |r| (r.alpha1_sq, r.alpha1_sq_est),
    },
    Pair {
        id: "p_reg1",
        title: "P_reg1",
        get: |r| (r.p_reg1, r.p_reg1_est),
    },
    Pair {
        id: "p_reg2",
        title: "P_reg2",
        get: |r| (r.p_reg2, r.p_reg2_est),
    },
];

/// Renders three panels (computed on x, estimated on y, both over [0, 1]).
/// Non-finite points and failed rows are skipped.
pub fn render_svg(table: &ReportTable) -> Result<String> {
    if table.rows.is_empty() {
        return Err(Error::config("cannot plot a table with no rows"));
    }
    let width = 2.0 * MARGIN + 3.0 * PANEL + 2.0 * GAP;
    let height = 2.0 * MARGIN + PANEL;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(s, r#"<rect width="{width}" height="{height}" fill="white"/>"#);
    for (p, pair) in PAIRS.iter().enumerate() {
        let x0 = MARGIN + p as f64 * (PANEL + GAP);
        let y0 = MARGIN + PANEL;
        let px = |v: f64| x0 + v * PANEL;
        let py = |v: f64| y0 - v * PANEL;
        let _ = writeln!(s, r#"<g class="panel" id="{}">"#, pair.id);
        let _ = writeln!(
            s,
            r#"<rect x="{x0}" y="{MARGIN}" width="{PANEL}" height="{PANEL}" fill="none" stroke="black"/>"#
        );
        for t in TICKS {
            let _ = writeln!(
                s,
                r#"<line x1="{:.2}" y1="{y0}" x2="{:.2}" y2="{:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="middle">{t}</text>"#,
                px(t),
                px(t),
                y0 + 4.0,
                px(t),
                y0 + 16.0
            );
            let _ = writeln!(
                s,
                r#"<line x1="{:.2}" y1="{:.2}" x2="{x0}" y2="{:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end">{t}</text>"#,
                x0 - 4.0,
                py(t),
                py(t),
                x0 - 6.0,
                py(t) + 4.0
            );
        }
        let _ = writeln!(
            s,
            r#"<line class="identity" x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="gray" stroke-dasharray="4 3"/>"#,
            px(0.0),
            py(0.0),
            px(1.0),
            py(1.0)
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-size="13">{}</text>"#,
            px(0.5),
            MARGIN - 12.0,
            pair.title
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">computed</text>"#,
            px(0.5),
            y0 + 32.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" transform="rotate(-90 {:.2} {:.2})">estimated</text>"#,
            x0 - 32.0,
            py(0.5),
            x0 - 32.0,
            py(0.5)
        );
        for r in table.rows.iter().filter_map(|r| r.report()) {
            let (x, y) = (pair.get)(r);
            if !(x.is_finite() && y.is_finite()) {
                continue;
            }
            let _ = writeln!(
                s,
                r#"<circle class="marker" cx="{:.2}" cy="{:.2}" r="3" fill="steelblue" fill-opacity="0.7"/>"#,
                px(x.clamp(0.0, 1.0)),
                py(y.clamp(0.0, 1.0))
            );
        }
        s.push_str("</g>\n");
    }
    s.push_str("</svg>\n");
    Ok(s)
}

pub fn emit_plot(table: &ReportTable, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, render_svg(table)?)?;
    Ok(())
}
