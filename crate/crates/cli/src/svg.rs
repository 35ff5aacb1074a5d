use std::fmt::Write as _;
use std::fs::File;
use std::path::Path;

use trochoid::io::{read_curve_csv, read_spectrum_csv};
use trochoid::Complex64;

use crate::error::{CliError, Result};

const WIDTH: f64 = 640.0;
const MARGIN: f64 = 24.0;
const DOT_RADIUS: f64 = 1.6;

/// Scatter of `eigenvalues` plus the closed `boundary` path, with equal
/// scales on both axes. Output depends only on the inputs.
pub fn render_svg(eigenvalues: &[Complex64], boundary: &[Complex64]) -> Result<String> {
    if eigenvalues.is_empty() {
        return Err(CliError::Core(trochoid::Error::InvalidInput("spectrum is empty".into())));
    }
    let all = eigenvalues.iter().chain(boundary);
    if all.clone().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(CliError::Core(trochoid::Error::InvalidInput("non-finite point".into())));
    }
    let (mut x0, mut x1, mut y0, mut y1) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for z in all {
        x0 = x0.min(z.re);
        x1 = x1.max(z.re);
        y0 = y0.min(z.im);
        y1 = y1.max(z.im);
    }
    let span = (x1 - x0).max(y1 - y0).max(1e-12);
    let unit = (WIDTH - 2.0 * MARGIN) / span;
    let height = ((y1 - y0) * unit + 2.0 * MARGIN).ceil();
    let px = |x: f64| MARGIN + (x - x0) * unit;
    let py = |y: f64| height - MARGIN - (y - y0) * unit;

    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{height}" viewBox="0 0 {WIDTH} {height}">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        out,
        r##"<g stroke="#bbbbbb" stroke-width="0.8"><line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}"/><line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}"/></g>"##,
        px(x0), py(0.0), px(x1), py(0.0), px(0.0), py(y0), px(0.0), py(y1)
    );
    let _ = writeln!(out, r##"<g fill="#1f5fbf">"##);
    for z in eigenvalues {
        let _ = writeln!(out, r#"<circle cx="{:.2}" cy="{:.2}" r="{DOT_RADIUS}"/>"#, px(z.re), py(z.im));
    }
    let _ = writeln!(out, "</g>");
    if let Some((first, rest)) = boundary.split_first() {
        let mut d = format!("M{:.2},{:.2}", px(first.re), py(first.im));
        for z in rest {
            let _ = write!(d, " L{:.2},{:.2}", px(z.re), py(z.im));
        }
        d.push_str(" Z");
        let _ = writeln!(out, r#"<path d="{d}" fill="none" stroke="black" stroke-width="1.2"/>"#);
    }
    out.push_str("</svg>\n");
    Ok(out)
}

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| CliError::file(path, e))
}

/// Renders a `re,im` spectrum CSV and an optional `phi,re,im` boundary CSV.
pub fn render_svg_files(spectrum: &Path, boundary: Option<&Path>, out: &Path) -> Result<()> {
    let eigenvalues = read_spectrum_csv::<f64>(open(spectrum)?)?;
    let curve: Vec<Complex64> = match boundary {
        Some(p) => read_curve_csv::<f64>(open(p)?)?.into_iter().map(|s| s.z).collect(),
        None => Vec::new(),
    };
    let svg = render_svg(&eigenvalues, &curve)?;
    std::fs::write(out, svg).map_err(|e| CliError::file(out, e))
}
