//! Minimal static SVG charts. Output is a pure function of the inputs so
//! regenerated files are byte-identical.

use std::fmt::Write;

const W: f64 = 640.0;
const H: f64 = 400.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;
const COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

pub struct Series<'a> {
    pub label: &'a str,
    pub points: Vec<(f64, f64)>,
}

fn header(out: &mut String, title: &str) {
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    )
    .unwrap();
    writeln!(out, r#"<rect width="{W}" height="{H}" fill="white"/>"#).unwrap();
    writeln!(
        out,
        r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
        W / 2.0,
        escape(title)
    )
    .unwrap();
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn range(vals: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = vals
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo < 1e-300 {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    }
}

fn axes(out: &mut String, x_label: &str, y_label: &str) {
    let (x0, y0, x1, y1) = (LEFT, H - BOTTOM, W - RIGHT, TOP);
    writeln!(out, r#"<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}" stroke="black"/>"#).unwrap();
    writeln!(out, r#"<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}" stroke="black"/>"#).unwrap();
    writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        (x0 + x1) / 2.0,
        H - 12.0,
        escape(x_label)
    )
    .unwrap();
    writeln!(
        out,
        r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">{}</text>"#,
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0,
        escape(y_label)
    )
    .unwrap();
}

/// Line chart; with `log_y` the y axis is log10 (non-positive values dropped).
pub fn line_chart(title: &str, x_label: &str, y_label: &str, series: &[Series], log_y: bool) -> String {
    let ty = |y: f64| if log_y { y.log10() } else { y };
    let keep = |y: f64| !log_y || y > 0.0;
    let (xmin, xmax) = range(series.iter().flat_map(|s| s.points.iter().map(|p| p.0)));
    let (ymin, ymax) = range(
        series
            .iter()
            .flat_map(|s| s.points.iter().filter(|p| keep(p.1)).map(|p| ty(p.1))),
    );
    let sx = |x: f64| LEFT + (x - xmin) / (xmax - xmin) * (W - LEFT - RIGHT);
    let sy = |y: f64| H - BOTTOM - (y - ymin) / (ymax - ymin) * (H - TOP - BOTTOM);

    let mut out = String::new();
    header(&mut out, title);
    axes(&mut out, x_label, y_label);
    for (k, (v, lab)) in [(ymin, ymin), (ymax, ymax)].iter().enumerate() {
        let shown = if log_y { 10f64.powf(*lab) } else { *lab };
        writeln!(
            out,
            r#"<text x="{}" y="{:.1}" text-anchor="end" dy="{}">{:.3e}</text>"#,
            LEFT - 4.0,
            sy(*v),
            if k == 0 { "0" } else { "0.8em" },
            shown
        )
        .unwrap();
    }
    writeln!(out, r#"<text x="{LEFT}" y="{}" text-anchor="start">{xmin}</text>"#, H - BOTTOM + 16.0).unwrap();
    writeln!(out, r#"<text x="{}" y="{}" text-anchor="end">{xmax}</text>"#, W - RIGHT, H - BOTTOM + 16.0).unwrap();
    for (i, s) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let pts: Vec<String> = s
            .points
            .iter()
            .filter(|p| keep(p.1) && p.1.is_finite())
            .map(|p| format!("{:.2},{:.2}", sx(p.0), sy(ty(p.1))))
            .collect();
        writeln!(
            out,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            pts.join(" ")
        )
        .unwrap();
        let ly = TOP + 14.0 + 16.0 * i as f64;
        writeln!(
            out,
            r#"<line x1="{}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/><text x="{}" y="{}">{}</text>"#,
            W - RIGHT - 150.0,
            W - RIGHT - 130.0,
            W - RIGHT - 125.0,
            ly + 4.0,
            escape(s.label)
        )
        .unwrap();
    }
    out.push_str("</svg>\n");
    out
}

/// Vertical bar chart with one bar per `(label, value)`.
pub fn bar_chart(title: &str, y_label: &str, bars: &[(String, f64)]) -> String {
    let ymax = bars.iter().map(|b| b.1).filter(|v| v.is_finite()).fold(0.0, f64::max);
    let ymax = if ymax > 0.0 { ymax * 1.1 } else { 1.0 };
    let plot_w = W - LEFT - RIGHT;
    let slot = plot_w / bars.len().max(1) as f64;
    let mut out = String::new();
    header(&mut out, title);
    axes(&mut out, "", y_label);
    writeln!(
        out,
        r#"<text x="{}" y="{TOP}" text-anchor="end" dy="0.8em">{:.3e}</text>"#,
        LEFT - 4.0,
        ymax
    )
    .unwrap();
    for (i, (label, v)) in bars.iter().enumerate() {
        let h = if v.is_finite() { v / ymax * (H - TOP - BOTTOM) } else { 0.0 };
        let x = LEFT + slot * i as f64 + slot * 0.15;
        writeln!(
            out,
            r#"<rect x="{x:.2}" y="{:.2}" width="{:.2}" height="{h:.2}" fill="{}"/>"#,
            H - BOTTOM - h,
            slot * 0.7,
            COLORS[i % COLORS.len()]
        )
        .unwrap();
        writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{v:.5}</text>"#,
            x + slot * 0.35,
            H - BOTTOM - h - 4.0
        )
        .unwrap();
        writeln!(
            out,
            r#"<text x="{:.2}" y="{}" text-anchor="middle">{}</text>"#,
            x + slot * 0.35,
            H - BOTTOM + 16.0,
            escape(label)
        )
        .unwrap();
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn charts_are_deterministic_and_well_formed() {
        let s = [Series {
            label: "train",
            points: vec![(0.0, 1.0), (1.0, 0.1), (2.0, 0.01)],
        }];
        let a = line_chart("loss", "epoch", "mse", &s, true);
        assert_eq!(a, line_chart("loss", "epoch", "mse", &s, true));
        assert!(a.starts_with("<svg") && a.ends_with("</svg>\n"));
        let b = bar_chart("rmse", "m/s", &[("LS".into(), 0.08), ("V1".into(), 0.03)]);
        assert_eq!(b.matches("<rect").count(), 3);
    }
}
