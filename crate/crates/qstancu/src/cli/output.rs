//! CSV and SVG writers shared by the commands.
//!
//! CSV files are UTF-8 with a header row; numeric cells use scientific
//! notation with 17 significant digits so reruns are byte-comparable.
//! Plots are standalone SVG polylines rendered here, with no plotting
//! dependency.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::Result;

/// One CSV cell.
pub enum Cell {
    Int(u64),
    Num(f64),
    Text(String),
    Bool(bool),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Num(v) => format_sci(*v),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
        }
    }
}

/// 17 significant digits, scientific notation.
pub fn format_sci(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes comment lines (prefixed `#`), a header row, then data rows.
pub fn write_csv(
    path: &Path,
    comments: &[String],
    header: &[&str],
    rows: &[Vec<Cell>],
) -> Result<()> {
    let mut out = String::new();
    for c in comments {
        writeln!(out, "# {c}").unwrap();
    }
    writeln!(out, "{}", header.join(",")).unwrap();
    for row in rows {
        let line: Vec<String> = row.iter().map(Cell::render).collect();
        writeln!(out, "{}", line.join(",")).unwrap();
    }
    fs::write(path, out)?;
    Ok(())
}

/// A polyline plot of `E_n` against `n`, with exceptional indices marked.
pub struct ErrorPlot<'a> {
    pub title: &'a str,
    /// `(n, error, exceptional)` in increasing `n`.
    pub series: &'a [(u64, f64, bool)],
}

const W: f64 = 720.0;
const H: f64 = 480.0;
const MARGIN: f64 = 56.0;

pub fn write_error_plot(path: &Path, plot: &ErrorPlot) -> Result<()> {
    let pts = plot.series;
    let x_max = pts.last().map_or(1.0, |p| p.0 as f64).max(1.0);
    // log scale on the error axis when everything is positive
    let log_y = pts.iter().all(|p| p.1 > 0.0);
    let ys: Vec<f64> = pts
        .iter()
        .map(|p| if log_y { p.1.log10() } else { p.1 })
        .collect();
    let (y_lo, y_hi) = ys.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
        (lo.min(v), hi.max(v))
    });
    let y_span = (y_hi - y_lo).max(1e-12);
    let sx = |n: f64| MARGIN + (W - 2.0 * MARGIN) * n / x_max;
    let sy = |v: f64| H - MARGIN - (H - 2.0 * MARGIN) * (v - y_lo) / y_span;

    let mut svg = String::new();
    writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">"
    )
    .unwrap();
    writeln!(svg, "<rect width=\"{W}\" height=\"{H}\" fill=\"white\"/>").unwrap();
    writeln!(
        svg,
        "<text x=\"{:.1}\" y=\"24\" font-family=\"sans-serif\" font-size=\"15\" text-anchor=\"middle\">{}</text>",
        W / 2.0,
        plot.title
    )
    .unwrap();
    // axes
    writeln!(
        svg,
        "<line x1=\"{m}\" y1=\"{b:.1}\" x2=\"{r:.1}\" y2=\"{b:.1}\" stroke=\"black\"/>",
        m = MARGIN,
        b = H - MARGIN,
        r = W - MARGIN
    )
    .unwrap();
    writeln!(
        svg,
        "<line x1=\"{m}\" y1=\"{m}\" x2=\"{m}\" y2=\"{b:.1}\" stroke=\"black\"/>",
        m = MARGIN,
        b = H - MARGIN
    )
    .unwrap();
    writeln!(
        svg,
        "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">n</text>",
        W / 2.0,
        H - 16.0
    )
    .unwrap();
    let y_label = if log_y { "log10 E_n" } else { "E_n" };
    writeln!(
        svg,
        "<text x=\"16\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 16 {:.1})\">{y_label}</text>",
        H / 2.0,
        H / 2.0
    )
    .unwrap();
    // the error polyline
    let path_pts: Vec<String> = pts
        .iter()
        .zip(&ys)
        .map(|(p, &v)| format!("{:.2},{:.2}", sx(p.0 as f64), sy(v)))
        .collect();
    writeln!(
        svg,
        "<polyline points=\"{}\" fill=\"none\" stroke=\"steelblue\" stroke-width=\"1.5\"/>",
        path_pts.join(" ")
    )
    .unwrap();
    // exceptional indices as markers
    for (p, &v) in pts.iter().zip(&ys) {
        if p.2 {
            writeln!(
                svg,
                "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3\" fill=\"crimson\"/>",
                sx(p.0 as f64),
                sy(v)
            )
            .unwrap();
        }
    }
    writeln!(svg, "</svg>").unwrap();
    fs::write(path, svg)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sci_format_has_17_significant_digits() {
        assert_eq!(format_sci(1.0), "1.0000000000000000e0");
        assert_eq!(format_sci(0.5), "5.0000000000000000e-1");
        let s = format_sci(std::f64::consts::PI);
        assert!(s.starts_with("3.1415926535897931e0"), "{s}");
    }

    #[test]
    fn csv_roundtrip_layout() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        write_csv(
            &path,
            &["settings here".into()],
            &["n", "value", "ok"],
            &[vec![Cell::Int(3), Cell::Num(0.25), Cell::Bool(true)]],
        )
        .unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text, "# settings here\nn,value,ok\n3,2.5000000000000000e-1,true\n");
    }

    #[test]
    fn svg_plot_is_wellformed() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p.svg");
        let series = vec![(1, 0.5, false), (2, 0.25, false), (4, 0.4, true), (5, 0.1, false)];
        write_error_plot(&path, &ErrorPlot { title: "errors", series: &series }).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("<svg"));
        assert!(text.trim_end().ends_with("</svg>"));
        assert!(text.contains("polyline"));
        assert_eq!(text.matches("<circle").count(), 1);
    }
}
