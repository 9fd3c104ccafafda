//! Minimal deterministic SVG 1.1 scatter plot.

use std::fmt::Write;

use crad::{DataMatrix, Labels};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 40.0;
const NOISE_COLOR: &str = "#9e9e9e";
const PALETTE: [&str; 10] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#17becf",
    "#bcbd22", "#393b79",
];

fn extent(values: &[f64]) -> (f64, f64) {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if hi > lo {
        (lo, hi)
    } else {
        (lo - 0.5, lo + 0.5)
    }
}

/// Scatter of columns `cols` colored by label; label `0` is drawn as gray crosses.
pub fn scatter(x: &DataMatrix, labels: &Labels, cols: (usize, usize)) -> String {
    let xs = x.column(cols.0);
    let ys = x.column(cols.1);
    let (x0, x1) = extent(&xs);
    let (y0, y1) = extent(&ys);
    let sx = |v: f64| MARGIN + (v - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
    let sy = |v: f64| HEIGHT - MARGIN - (v - y0) / (y1 - y0) * (HEIGHT - 2.0 * MARGIN);

    let mut s = String::new();
    s.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">"
    );
    let _ = writeln!(
        s,
        "<rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>"
    );
    let _ = writeln!(
        s,
        "<rect x=\"{MARGIN}\" y=\"{MARGIN}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#cccccc\"/>",
        WIDTH - 2.0 * MARGIN,
        HEIGHT - 2.0 * MARGIN
    );
    let _ = writeln!(
        s,
        "<text x=\"{MARGIN}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\">x{} [{x0:.3}, {x1:.3}]  x{} [{y0:.3}, {y1:.3}]</text>",
        HEIGHT - 12.0,
        cols.0 + 1,
        cols.1 + 1
    );
    for ((&a, &b), &l) in xs.iter().zip(&ys).zip(labels.as_slice()) {
        let (px, py) = (sx(a), sy(b));
        if l <= 0 {
            let _ = writeln!(
                s,
                "<path d=\"M{:.2} {:.2}L{:.2} {:.2}M{:.2} {:.2}L{:.2} {:.2}\" stroke=\"{NOISE_COLOR}\" stroke-width=\"1\"/>",
                px - 3.0,
                py - 3.0,
                px + 3.0,
                py + 3.0,
                px - 3.0,
                py + 3.0,
                px + 3.0,
                py - 3.0
            );
        } else {
            let color = PALETTE[(l as usize - 1) % PALETTE.len()];
            let _ = writeln!(
                s,
                "<circle cx=\"{px:.2}\" cy=\"{py:.2}\" r=\"3\" fill=\"{color}\"/>"
            );
        }
    }
    s.push_str("</svg>\n");
    s
}
