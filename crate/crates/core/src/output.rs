//! Report files: JSON, one CSV per series, optional SVG charts. Every file
//! is written to a temporary sibling and renamed into place.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::harness::RunReport;

fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    let name = path
        .file_name()
        .ok_or_else(|| Error::Config(format!("{} is not a file path", path.display())))?;
    let tmp = path.with_file_name(format!(".{}.tmp", name.to_string_lossy()));
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

fn slug(s: &str) -> String {
    s.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() {
                c.to_ascii_lowercase()
            } else {
                '-'
            }
        })
        .collect::<String>()
        .split('-')
        .filter(|p| !p.is_empty())
        .collect::<Vec<_>>()
        .join("-")
}

fn csv_bytes(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| Error::Format(e.to_string());
    w.write_record(header).map_err(csv_err)?;
    for r in rows {
        w.write_record(&r).map_err(csv_err)?;
    }
    w.into_inner().map_err(|e| Error::Format(e.to_string()))
}

/// A self-contained line chart of `log₂|y|` against `k`.
pub fn svg_chart(title: &str, points: &[(i32, f64)]) -> String {
    const W: f64 = 480.0;
    const H: f64 = 320.0;
    const PAD: f64 = 40.0;
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|p| p.1 != 0.0 && p.1.is_finite())
        .map(|&(k, v)| (k as f64, v.abs().log2()))
        .collect();
    let mut out = String::new();
    let _ = write!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#
    );
    let _ = write!(
        out,
        r#"<text x="{PAD}" y="20" font-family="monospace" font-size="12">{title}</text>"#
    );
    let _ = write!(
        out,
        r#"<rect x="{PAD}" y="{PAD}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        W - 2.0 * PAD,
        H - 2.0 * PAD
    );
    if !pts.is_empty() {
        let (x0, x1) = pts
            .iter()
            .fold((f64::MAX, f64::MIN), |a, p| (a.0.min(p.0), a.1.max(p.0)));
        let (y0, y1) = pts
            .iter()
            .fold((f64::MAX, f64::MIN), |a, p| (a.0.min(p.1), a.1.max(p.1)));
        let sx = |x: f64| PAD + (x - x0) / (x1 - x0).max(1e-9) * (W - 2.0 * PAD);
        let sy = |y: f64| H - PAD - (y - y0) / (y1 - y0).max(1e-9) * (H - 2.0 * PAD);
        let path: Vec<String> = pts
            .iter()
            .map(|p| format!("{:.2},{:.2}", sx(p.0), sy(p.1)))
            .collect();
        let _ = write!(
            out,
            r#"<polyline fill="none" stroke="steelblue" stroke-width="2" points="{}"/>"#,
            path.join(" ")
        );
        for p in &pts {
            let _ = write!(
                out,
                r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="steelblue"/>"#,
                sx(p.0),
                sy(p.1)
            );
        }
        let _ = write!(
            out,
            r#"<text x="{PAD}" y="{}" font-family="monospace" font-size="10">k {x0}..{x1}, log2|y| {y0:.2}..{y1:.2}</text>"#,
            H - 12.0
        );
    }
    out.push_str("</svg>\n");
    out
}

/// Write `report.json`, `checks.csv` and the series sidecars into `dir`;
/// returns every path written.
pub fn write_report(report: &RunReport, dir: &Path, svg: bool) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let mut put = |name: String, bytes: Vec<u8>| -> Result<()> {
        let p = dir.join(name);
        atomic_write(&p, &bytes)?;
        written.push(p);
        Ok(())
    };

    let checks = report.checks.iter().map(|c| {
        vec![
            c.suite.clone(),
            c.name.clone(),
            c.anchor.clone(),
            c.k.map(|k| k.to_string()).unwrap_or_default(),
            format!("{:e}", c.value),
            format!("{:e}", c.scale),
            format!("{:e}", c.tolerance),
            c.pass.to_string(),
        ]
    });
    put(
        "checks.csv".into(),
        csv_bytes(
            &[
                "suite",
                "name",
                "anchor",
                "k",
                "value",
                "scale",
                "tolerance",
                "pass",
            ],
            checks,
        )?,
    )?;

    for d in &report.decay {
        let stem = slug(&format!(
            "decay {} {} {}",
            d.suite,
            d.series.term,
            d.s.map(|s| format!("s{s}")).unwrap_or_default()
        ));
        let rows = d
            .series
            .points
            .iter()
            .map(|&(k, v)| vec![k.to_string(), format!("{v:e}")]);
        put(format!("{stem}.csv"), csv_bytes(&["k", "abs_value"], rows)?)?;
        if svg {
            let title = format!("{} slope {:.3}", d.series.term, d.series.slope);
            put(
                format!("{stem}.svg"),
                svg_chart(&title, &d.series.points).into_bytes(),
            )?;
        }
    }
    for c in &report.chains {
        let stem = slug(&format!("chain {} s{}", c.chain.name, c.s));
        let rows = c.chain.points.iter().map(|p| {
            vec![
                p.k.to_string(),
                format!("{:e}", p.lhs),
                format!("{:e}", p.rhs),
                p.step.map(|s| format!("{s:e}")).unwrap_or_default(),
            ]
        });
        put(
            format!("{stem}.csv"),
            csv_bytes(&["k", "lhs", "rhs", "step"], rows)?,
        )?;
        if svg {
            let pts: Vec<(i32, f64)> = c
                .chain
                .points
                .iter()
                .filter(|p| p.rhs > 0.0)
                .map(|p| (p.k, p.lhs / p.rhs))
                .collect();
            put(
                format!("{stem}.svg"),
                svg_chart(&c.chain.name, &pts).into_bytes(),
            )?;
        }
    }
    // the report goes last so its presence marks a complete run
    put("report.json".into(), serde_json::to_vec_pretty(report)?)?;
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slugs_are_file_safe() {
        assert_eq!(
            slug("decay classical-identity I232 s0.5"),
            "decay-classical-identity-i232-s0-5"
        );
    }

    #[test]
    fn chart_skips_zeros() {
        let svg = svg_chart("t", &[(0, 0.0), (1, 2.0), (2, 4.0)]);
        assert_eq!(svg.matches("<circle").count(), 2);
        assert!(svg.ends_with("</svg>\n"));
    }
}
