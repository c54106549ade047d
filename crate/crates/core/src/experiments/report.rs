//! JSON, CSV and SVG renderings of an [`ExperimentResult`].

use std::fmt::Write as _;
use std::io::Write;

use super::ExperimentResult;
use crate::error::Result;

/// Pretty-printed JSON with the result's fields verbatim.
pub fn write_json(result: &ExperimentResult, out: &mut impl Write) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, result)?;
    writeln!(out)?;
    Ok(())
}

/// `scale,estimate,stderr` rows.
pub fn write_csv(result: &ExperimentResult, out: &mut impl Write) -> Result<()> {
    writeln!(out, "scale,estimate,stderr")?;
    for p in &result.points {
        writeln!(out, "{},{},{}", p.scale, p.estimate, p.stderr)?;
    }
    Ok(())
}

const W: f64 = 640.0;
const H: f64 = 480.0;
const MARGIN: f64 = 60.0;

/// Self-contained log-log scatter of the points with error bars, plus the
/// fitted line through the centroid of the logged points when a fit exists.
pub fn write_svg(result: &ExperimentResult, out: &mut impl Write) -> Result<()> {
    let pts: Vec<(f64, f64, f64, f64)> = result
        .points
        .iter()
        .filter(|p| p.scale > 0.0 && p.estimate > 0.0)
        .map(|p| {
            let lo = (p.estimate - p.stderr).max(p.estimate * 1e-3);
            (p.scale.log10(), p.estimate.log10(), lo.log10(), (p.estimate + p.stderr).log10())
        })
        .collect();
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="24" text-anchor="middle" font-size="14">{}</text>"#,
        W / 2.0,
        escape(&result.experiment_id)
    );
    if pts.is_empty() {
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" text-anchor="middle">no positive points to plot</text>"#,
            W / 2.0,
            H / 2.0
        );
        let _ = writeln!(svg, "</svg>");
        out.write_all(svg.as_bytes())?;
        return Ok(());
    }
    let (mut x0, mut x1) = bounds(pts.iter().map(|p| p.0));
    let (mut y0, mut y1) = bounds(pts.iter().flat_map(|p| [p.2, p.3]));
    pad(&mut x0, &mut x1);
    pad(&mut y0, &mut y1);
    let sx = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (W - 2.0 * MARGIN);
    let sy = |y: f64| H - MARGIN - (y - y0) / (y1 - y0) * (H - 2.0 * MARGIN);
    let _ = writeln!(
        svg,
        r#"<rect x="{MARGIN}" y="{MARGIN}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        W - 2.0 * MARGIN,
        H - 2.0 * MARGIN
    );
    for (v, label) in [(x0, x0), (x1, x1)] {
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">1e{:.2}</text>"#,
            sx(v),
            H - MARGIN + 18.0,
            label
        );
    }
    for (v, label) in [(y0, y0), (y1, y1)] {
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="end">1e{:.2}</text>"#,
            MARGIN - 6.0,
            sy(v) + 4.0,
            label
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="middle">log scale</text>"#,
        W / 2.0,
        H - 16.0
    );
    for &(x, y, lo, hi) in &pts {
        let _ = writeln!(
            svg,
            r#"<line x1="{0:.1}" y1="{1:.1}" x2="{0:.1}" y2="{2:.1}" stroke="gray"/>"#,
            sx(x),
            sy(lo),
            sy(hi)
        );
        let _ = writeln!(svg, r#"<circle cx="{:.1}" cy="{:.1}" r="3.5" fill="steelblue"/>"#, sx(x), sy(y));
    }
    if let Some(fit) = result.fit {
        if pts.len() >= 2 {
            let mx = pts.iter().map(|p| p.0).sum::<f64>() / pts.len() as f64;
            let my = pts.iter().map(|p| p.1).sum::<f64>() / pts.len() as f64;
            let line = |x: f64| my + fit.slope * (x - mx);
            let _ = writeln!(
                svg,
                r#"<line x1="{:.1}" y1="{:.1}" x2="{:.1}" y2="{:.1}" stroke="firebrick" stroke-dasharray="6 4"/>"#,
                sx(x0),
                sy(line(x0)),
                sx(x1),
                sy(line(x1))
            );
            let _ = writeln!(
                svg,
                r#"<text x="{}" y="{}" fill="firebrick">slope {:.4} ± {:.4}</text>"#,
                MARGIN + 8.0,
                MARGIN + 16.0,
                fit.slope,
                fit.slope_stderr
            );
        }
    }
    let _ = writeln!(svg, "</svg>");
    out.write_all(svg.as_bytes())?;
    Ok(())
}

fn bounds(it: impl Iterator<Item = f64>) -> (f64, f64) {
    it.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)))
}

fn pad(lo: &mut f64, hi: &mut f64) {
    let span = (*hi - *lo).max(0.1);
    *lo -= 0.05 * span;
    *hi += 0.05 * span;
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
