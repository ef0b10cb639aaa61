//! Stacked-band plot of a continuation as SVG.
//!
//! Bands are stacked in ascending label order, so diverged initial conditions
//! (label -1) sit at the bottom. Each band polygon carries its label and the
//! exact fractions it was drawn from in `data-` attributes.

use std::fmt::Write as _;
use std::io;
use std::path::Path;

use basins_core::continuation::ContinuationResult;
use basins_core::export::fmt_f64;
use basins_core::{Label, DIVERGED};

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 64.0;
const RIGHT: f64 = 120.0;
const TOP: f64 = 20.0;
const BOTTOM: f64 = 48.0;

const PALETTE: [&str; 12] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#bcbd22", "#17becf",
    "#aec7e8", "#ffbb78", "#98df8a",
];
const DIVERGED_COLOR: &str = "#7f7f7f";

/// Fill color of `label`: cycles through a fixed 12-color palette.
pub fn label_color(label: Label) -> &'static str {
    if label == DIVERGED {
        return DIVERGED_COLOR;
    }
    PALETTE[(label - 1).rem_euclid(PALETTE.len() as Label) as usize]
}

fn x_positions(result: &ContinuationResult) -> (Vec<f64>, f64, f64) {
    let values: Vec<f64> = result.parameters.iter().map(|p| p.first().copied().unwrap_or(0.0)).collect();
    let monotone = values.windows(2).all(|w| w[0] < w[1]) || values.windows(2).all(|w| w[0] > w[1]);
    let xs: Vec<f64> = if monotone {
        values.clone()
    } else {
        (0..values.len()).map(|i| i as f64).collect()
    };
    let lo = xs.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (xs, lo, hi)
}

/// Render `result` with `x_label` under the horizontal axis. A single
/// parameter value is drawn as full-width rectangles.
pub fn stacked_band_svg(result: &ContinuationResult, x_label: &str) -> String {
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let (xs, lo, hi) = x_positions(result);
    let px = |x: f64| {
        if hi > lo {
            LEFT + plot_w * (x - lo) / (hi - lo)
        } else {
            LEFT
        }
    };
    let py = |c: f64| TOP + plot_h * (1.0 - c);
    let labels: Vec<Label> = result.labels().into_iter().collect();

    // Columns of (x pixel, step) pairs; one value is stretched across the axis.
    let columns: Vec<(f64, usize)> = if xs.len() == 1 {
        vec![(LEFT, 0), (LEFT + plot_w, 0)]
    } else {
        xs.iter().enumerate().map(|(s, &x)| (px(x), s)).collect()
    };

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);

    let mut below = vec![0.0; result.len()];
    for &label in &labels {
        let fractions: Vec<f64> = result.fractions.iter().map(|f| f.get(label)).collect();
        let above: Vec<f64> = below.iter().zip(&fractions).map(|(b, f)| b + f).collect();
        let mut points: Vec<String> = columns
            .iter()
            .map(|&(x, s)| format!("{x:.4},{:.4}", py(above[s])))
            .collect();
        points.extend(columns.iter().rev().map(|&(x, s)| format!("{x:.4},{:.4}", py(below[s]))));
        let data: Vec<String> = fractions.iter().map(|&f| fmt_f64(f)).collect();
        let _ = writeln!(
            svg,
            r#"<polygon data-label="{label}" data-fractions="{}" fill="{}" stroke="none" points="{}"/>"#,
            data.join(" "),
            label_color(label),
            points.join(" ")
        );
        below = above;
    }

    let _ = writeln!(
        svg,
        r#"<rect x="{LEFT}" y="{TOP}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>"#
    );
    for tick in [0.0, 0.5, 1.0] {
        let y = py(tick);
        let _ = writeln!(
            svg,
            r#"<line x1="{}" y1="{y}" x2="{LEFT}" y2="{y}" stroke="black"/><text x="{}" y="{}" text-anchor="end">{tick:.1}</text>"#,
            LEFT - 5.0,
            LEFT - 8.0,
            y + 4.0
        );
    }
    let base = TOP + plot_h;
    let value = |s: usize| result.parameters[s].first().copied().unwrap_or(0.0);
    let ends: Vec<(f64, String)> = if xs.len() == 1 {
        vec![(LEFT + plot_w / 2.0, format!("{}", value(0)))]
    } else {
        let last = xs.len() - 1;
        vec![(px(xs[0]), format!("{}", value(0))), (px(xs[last]), format!("{}", value(last)))]
    };
    for (x, text) in ends {
        let _ = writeln!(
            svg,
            r#"<line x1="{x:.4}" y1="{base}" x2="{x:.4}" y2="{}" stroke="black"/><text x="{x:.4}" y="{}" text-anchor="middle">{text}</text>"#,
            base + 5.0,
            base + 18.0
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 10.0,
        escape(x_label)
    );
    let _ = writeln!(
        svg,
        r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">basin fraction</text>"#,
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0
    );

    for (i, &label) in labels.iter().rev().enumerate() {
        let y = TOP + 8.0 + 18.0 * i as f64;
        let x = WIDTH - RIGHT + 14.0;
        let name = if label == DIVERGED {
            "diverged".to_string()
        } else {
            format!("attractor {label}")
        };
        let _ = writeln!(
            svg,
            r#"<rect x="{x}" y="{y}" width="12" height="12" fill="{}"/><text x="{}" y="{}">{name}</text>"#,
            label_color(label),
            x + 18.0,
            y + 10.0
        );
    }
    svg.push_str("</svg>\n");
    svg
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

pub fn write_stacked_band_plot(result: &ContinuationResult, x_label: &str, path: &Path) -> io::Result<()> {
    if result.is_empty() {
        return Err(io::Error::new(io::ErrorKind::InvalidInput, "nothing to plot"));
    }
    std::fs::write(path, stacked_band_svg(result, x_label))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn palette_cycles() {
        assert_eq!(label_color(1), PALETTE[0]);
        assert_eq!(label_color(13), PALETTE[0]);
        assert_eq!(label_color(12), PALETTE[11]);
        assert_eq!(label_color(DIVERGED), DIVERGED_COLOR);
    }
}
