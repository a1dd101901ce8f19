//! Minimal self-contained SVG line plots for convergence curves and traces.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    pub dashed: bool,
}

const PALETTE: [&str; 5] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"];
const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 76.0;
const RIGHT: f64 = 616.0;
const TOP: f64 = 48.0;
const BOTTOM: f64 = 418.0;

fn fmt_num(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if v.abs() >= 0.01 && v.abs() < 10000.0 {
        let s = format!("{v:.3}");
        let s = s.trim_end_matches('0').trim_end_matches('.');
        return s.to_string();
    }
    format!("{v:.1e}")
}

fn tick_label(v: f64, log: bool) -> String {
    if log {
        format!("1e{}", v.round() as i64)
    } else {
        fmt_num(v)
    }
}

/// Axis tick positions in mapped (possibly log10) coordinates.
fn ticks(lo: f64, hi: f64, log: bool) -> Vec<f64> {
    if log {
        let a = lo.ceil() as i64;
        let b = hi.floor() as i64;
        if a > b {
            return vec![lo, hi];
        }
        let step = 1 + (b - a) as usize / 8;
        (a..=b).step_by(step).map(|k| k as f64).collect()
    } else {
        (0..=4).map(|k| lo + (hi - lo) * k as f64 / 4.0).collect()
    }
}

pub fn line_plot(
    path: &Path,
    title: &str,
    xlabel: &str,
    ylabel: &str,
    logx: bool,
    logy: bool,
    series: &[Series],
) -> io::Result<()> {
    let map = |v: f64, log: bool| -> Option<f64> {
        if log {
            (v > 0.0).then(|| v.log10())
        } else {
            v.is_finite().then_some(v)
        }
    };
    let mapped: Vec<Vec<(f64, f64)>> = series
        .iter()
        .map(|s| {
            s.points
                .iter()
                .filter_map(|&(x, y)| Some((map(x, logx)?, map(y, logy)?)))
                .collect()
        })
        .collect();

    let (mut x0, mut x1) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY);
    for pts in &mapped {
        for &(x, y) in pts {
            x0 = x0.min(x);
            x1 = x1.max(x);
            y0 = y0.min(y);
            y1 = y1.max(y);
        }
    }
    if !x0.is_finite() {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    if x1 - x0 < 1e-12 {
        x0 -= 0.5;
        x1 += 0.5;
    }
    if y1 - y0 < 1e-12 {
        y0 -= 0.5;
        y1 += 0.5;
    }
    let (px, py) = (0.05 * (x1 - x0), 0.05 * (y1 - y0));
    let (x0, x1, y0, y1) = (x0 - px, x1 + px, y0 - py, y1 + py);
    let sx = |v: f64| LEFT + (v - x0) / (x1 - x0) * (RIGHT - LEFT);
    let sy = |v: f64| BOTTOM - (v - y0) / (y1 - y0) * (BOTTOM - TOP);

    let mut s = String::new();
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {WIDTH} {HEIGHT}\" \
         font-family=\"sans-serif\" font-size=\"13\">"
    );
    let _ = writeln!(s, "<rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>");
    let _ = writeln!(
        s,
        "<text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">{title}</text>",
        (LEFT + RIGHT) / 2.0
    );

    for tx in ticks(x0, x1, logx) {
        let x = sx(tx);
        let _ = writeln!(
            s,
            "<line x1=\"{x:.1}\" y1=\"{TOP}\" x2=\"{x:.1}\" y2=\"{BOTTOM}\" \
             stroke=\"#dddddd\"/>"
        );
        let _ = writeln!(
            s,
            "<text x=\"{x:.1}\" y=\"{}\" text-anchor=\"middle\">{}</text>",
            BOTTOM + 18.0,
            tick_label(tx, logx)
        );
    }
    for ty in ticks(y0, y1, logy) {
        let y = sy(ty);
        let _ = writeln!(
            s,
            "<line x1=\"{LEFT}\" y1=\"{y:.1}\" x2=\"{RIGHT}\" y2=\"{y:.1}\" \
             stroke=\"#dddddd\"/>"
        );
        let _ = writeln!(
            s,
            "<text x=\"{}\" y=\"{:.1}\" text-anchor=\"end\">{}</text>",
            LEFT - 6.0,
            y + 4.0,
            tick_label(ty, logy)
        );
    }
    let _ = writeln!(
        s,
        "<rect x=\"{LEFT}\" y=\"{TOP}\" width=\"{}\" height=\"{}\" fill=\"none\" \
         stroke=\"black\"/>",
        RIGHT - LEFT,
        BOTTOM - TOP
    );
    let _ = writeln!(
        s,
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{xlabel}</text>",
        (LEFT + RIGHT) / 2.0,
        HEIGHT - 14.0
    );
    let _ = writeln!(
        s,
        "<text x=\"18\" y=\"{}\" text-anchor=\"middle\" transform=\"rotate(-90 18 {})\">{ylabel}</text>",
        (TOP + BOTTOM) / 2.0,
        (TOP + BOTTOM) / 2.0
    );

    for (k, (ser, pts)) in series.iter().zip(&mapped).enumerate() {
        if pts.is_empty() {
            continue;
        }
        let color = PALETTE[k % PALETTE.len()];
        let dash = if ser.dashed { " stroke-dasharray=\"6 4\"" } else { "" };
        let coords: Vec<String> = pts
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
            .collect();
        let _ = writeln!(
            s,
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.8\"{dash}/>",
            coords.join(" ")
        );
        for &(x, y) in pts {
            let _ = writeln!(
                s,
                "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"2.6\" fill=\"{color}\"/>",
                sx(x),
                sy(y)
            );
        }
        let ly = TOP + 16.0 + 18.0 * k as f64;
        let _ = writeln!(
            s,
            "<line x1=\"{}\" y1=\"{ly:.1}\" x2=\"{}\" y2=\"{ly:.1}\" stroke=\"{color}\" \
             stroke-width=\"1.8\"{dash}/>",
            RIGHT - 150.0,
            RIGHT - 120.0
        );
        let _ = writeln!(
            s,
            "<text x=\"{}\" y=\"{:.1}\">{}</text>",
            RIGHT - 114.0,
            ly + 4.0,
            ser.label
        );
    }
    let _ = writeln!(s, "</svg>");
    fs::write(path, s)
}
