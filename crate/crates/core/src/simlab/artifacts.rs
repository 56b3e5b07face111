//! Artifact emission: CSV tables and small standalone SVG charts.
//!
//! Output is byte-deterministic: rows are sorted, floats use Rust's default
//! shortest-roundtrip formatting, and nothing depends on clocks or map
//! iteration order.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use nalgebra::DVector;

use super::{CvReport, SimReport};
use crate::error::{Error, Result};

const CHART_WIDTH: f64 = 800.0;
const CHART_HEIGHT: f64 = 500.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 160.0; // leaves room for the legend
const MARGIN_TOP: f64 = 30.0;
const MARGIN_BOTTOM: f64 = 55.0;

/// Writes the simulation tables and the accuracy chart into `dir`,
/// returning the paths written (sorted order of the reports is preserved).
///
/// Files: `table1_3.csv` (per-coefficient bias and MSE), `table4.csv`
/// (direction ratio and exponent summaries), `fig1.csv` and `fig1.svg`
/// (mean absolute prediction error by sample size).
pub fn emit_artifacts(reports: &[SimReport], dir: &Path) -> Result<Vec<PathBuf>> {
    if reports.is_empty() {
        return Err(Error::EmptyReport);
    }
    std::fs::create_dir_all(dir).map_err(|e| io_err(dir, &e))?;
    let mut written = Vec::new();

    let t13 = dir.join("table1_3.csv");
    {
        let mut w = csv_writer(&t13)?;
        write_record(
            &mut w,
            &t13,
            &["scenario", "n", "coefficient", "method", "abs_bias", "mse"],
        )?;
        for rep in reports {
            for (method, metrics) in [("m1", &rep.m1), ("m2", &rep.m2)] {
                for (j, (bias, mse)) in metrics.bias_abs.iter().zip(&metrics.mse).enumerate() {
                    write_record(
                        &mut w,
                        &t13,
                        &[
                            &rep.scenario,
                            &rep.n.to_string(),
                            &format!("beta{j}"),
                            method,
                            &bias.to_string(),
                            &mse.to_string(),
                        ],
                    )?;
                }
            }
        }
        w.flush().map_err(|e| io_err(&t13, &e))?;
    }
    written.push(t13);

    let t4 = dir.join("table4.csv");
    {
        let mut w = csv_writer(&t4)?;
        write_record(&mut w, &t4, &["scenario", "n", "k_ratio", "m_hat"])?;
        for rep in reports {
            write_record(
                &mut w,
                &t4,
                &[
                    &rep.scenario,
                    &rep.n.to_string(),
                    &rep.median_k_ratio.map_or(String::new(), |v| v.to_string()),
                    &rep.mean_m_hat.map_or(String::new(), |v| v.to_string()),
                ],
            )?;
        }
        w.flush().map_err(|e| io_err(&t4, &e))?;
    }
    written.push(t4);

    let f1 = dir.join("fig1.csv");
    {
        let mut w = csv_writer(&f1)?;
        write_record(&mut w, &f1, &["scenario", "n", "method", "mae"])?;
        for rep in reports {
            for (method, metrics) in [("m1", &rep.m1), ("m2", &rep.m2)] {
                write_record(
                    &mut w,
                    &f1,
                    &[
                        &rep.scenario,
                        &rep.n.to_string(),
                        method,
                        &metrics.mae_y.to_string(),
                    ],
                )?;
            }
        }
        w.flush().map_err(|e| io_err(&f1, &e))?;
    }
    written.push(f1);

    let svg_path = dir.join("fig1.svg");
    write_mae_chart(reports, &svg_path)?;
    written.push(svg_path);

    Ok(written)
}

/// Writes the per-repeat cross-validation table (`repeat,sse_m1,sse_m2`).
pub fn write_cv_csv(report: &CvReport, path: &Path) -> Result<()> {
    if report.pairs.is_empty() {
        return Err(Error::EmptyReport);
    }
    let mut w = csv_writer(path)?;
    write_record(&mut w, path, &["repeat", "sse_m1", "sse_m2"])?;
    for pair in &report.pairs {
        write_record(
            &mut w,
            path,
            &[
                &pair.repeat.to_string(),
                &pair.sse_m1.to_string(),
                &pair.sse_m2.to_string(),
            ],
        )?;
    }
    w.flush().map_err(|e| io_err(path, &e))
}

/// One line per (scenario, method); x is the sample size, y the pooled MAE.
fn write_mae_chart(reports: &[SimReport], path: &Path) -> Result<()> {
    let mut series: Vec<Series> = Vec::new();
    let mut scenarios: Vec<String> = reports.iter().map(|r| r.scenario.clone()).collect();
    scenarios.sort();
    scenarios.dedup();
    for scenario in &scenarios {
        let dash = match scenario.as_str() {
            "s2" => Some("8,4"),
            "s3" => Some("2,4"),
            _ => None,
        };
        for (method, color) in [("m1", "#1f77b4"), ("m2", "#d62728")] {
            let mut pts: Vec<(f64, f64)> = reports
                .iter()
                .filter(|r| &r.scenario == scenario)
                .map(|r| {
                    let m = if method == "m1" { &r.m1 } else { &r.m2 };
                    (r.n as f64, m.mae_y)
                })
                .collect();
            pts.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
            series.push(Series {
                label: format!("{scenario} {method}"),
                color,
                dash,
                line: true,
                markers: true,
                points: pts,
            });
        }
    }
    let svg = line_chart(
        "Mean absolute prediction error",
        "sample size",
        "MAE",
        &series,
    );
    std::fs::write(path, svg).map_err(|e| io_err(path, &e))
}

/// Observed responses with both methods' fitted values, by observation.
pub fn write_fit_overlay_svg(
    y: &DVector<f64>,
    fitted_m1: &DVector<f64>,
    fitted_m2: &DVector<f64>,
    path: &Path,
) -> Result<()> {
    if y.len() != fitted_m1.len() || y.len() != fitted_m2.len() {
        return Err(Error::DimensionMismatch {
            context: "fitted vectors vs response",
            expected: y.len(),
            got: fitted_m1.len().min(fitted_m2.len()),
        });
    }
    if y.is_empty() {
        return Err(Error::EmptyReport);
    }
    let index_points = |v: &DVector<f64>| -> Vec<(f64, f64)> {
        v.iter().enumerate().map(|(i, x)| (i as f64, *x)).collect()
    };
    let series = [
        Series {
            label: "observed".to_owned(),
            color: "#555555",
            dash: None,
            line: false,
            markers: true,
            points: index_points(y),
        },
        Series {
            label: "baseline fit".to_owned(),
            color: "#1f77b4",
            dash: None,
            line: true,
            markers: false,
            points: index_points(fitted_m1),
        },
        Series {
            label: "combined fit".to_owned(),
            color: "#d62728",
            dash: Some("6,3"),
            line: true,
            markers: false,
            points: index_points(fitted_m2),
        },
    ];
    let svg = line_chart("Observed vs fitted", "observation", "value", &series);
    std::fs::write(path, svg).map_err(|e| io_err(path, &e))
}

struct Series {
    label: String,
    color: &'static str,
    dash: Option<&'static str>,
    line: bool,
    markers: bool,
    points: Vec<(f64, f64)>,
}

/// Renders a fixed-size 800 × 500 chart. Pure string assembly — every byte
/// is a function of the inputs.
fn line_chart(title: &str, xlabel: &str, ylabel: &str, series: &[Series]) -> String {
    let (mut xmin, mut xmax) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut ymin, mut ymax) = (0.0_f64, f64::NEG_INFINITY);
    for s in series {
        for &(x, y) in &s.points {
            xmin = xmin.min(x);
            xmax = xmax.max(x);
            ymin = ymin.min(y);
            ymax = ymax.max(y);
        }
    }
    if !xmin.is_finite() {
        xmin = 0.0;
        xmax = 1.0;
    }
    if !ymax.is_finite() {
        ymax = 1.0;
    }
    if xmax - xmin < 1e-12 {
        xmin -= 1.0;
        xmax += 1.0;
    }
    if ymax - ymin < 1e-12 {
        ymax = ymin + 1.0;
    }
    ymax += 0.05 * (ymax - ymin);

    let plot_w = CHART_WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = CHART_HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let sx = move |x: f64| MARGIN_LEFT + (x - xmin) / (xmax - xmin) * plot_w;
    let sy = move |y: f64| MARGIN_TOP + plot_h - (y - ymin) / (ymax - ymin) * plot_h;

    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {CHART_WIDTH:.0} {CHART_HEIGHT:.0}\" \
         width=\"{CHART_WIDTH:.0}\" height=\"{CHART_HEIGHT:.0}\">"
    );
    let _ = writeln!(
        out,
        "  <rect x=\"0\" y=\"0\" width=\"{CHART_WIDTH:.0}\" height=\"{CHART_HEIGHT:.0}\" fill=\"white\"/>"
    );
    let _ = writeln!(
        out,
        "  <text x=\"{:.2}\" y=\"20\" font-family=\"sans-serif\" font-size=\"15\" text-anchor=\"middle\">{}</text>",
        MARGIN_LEFT + plot_w / 2.0,
        escape(title)
    );

    // Axes.
    let x0 = MARGIN_LEFT;
    let y0 = MARGIN_TOP + plot_h;
    let _ = writeln!(
        out,
        "  <line x1=\"{x0:.2}\" y1=\"{y0:.2}\" x2=\"{:.2}\" y2=\"{y0:.2}\" stroke=\"black\"/>",
        MARGIN_LEFT + plot_w
    );
    let _ = writeln!(
        out,
        "  <line x1=\"{x0:.2}\" y1=\"{:.2}\" x2=\"{x0:.2}\" y2=\"{y0:.2}\" stroke=\"black\"/>",
        MARGIN_TOP
    );

    // Ticks: five on each axis.
    for t in 0..=4 {
        let fx = xmin + (xmax - xmin) * t as f64 / 4.0;
        let px = sx(fx);
        let _ = writeln!(
            out,
            "  <line x1=\"{px:.2}\" y1=\"{y0:.2}\" x2=\"{px:.2}\" y2=\"{:.2}\" stroke=\"black\"/>",
            y0 + 5.0
        );
        let _ = writeln!(
            out,
            "  <text x=\"{px:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">{}</text>",
            y0 + 20.0,
            fmt_tick(fx)
        );
        let fy = ymin + (ymax - ymin) * t as f64 / 4.0;
        let py = sy(fy);
        let _ = writeln!(
            out,
            "  <line x1=\"{:.2}\" y1=\"{py:.2}\" x2=\"{x0:.2}\" y2=\"{py:.2}\" stroke=\"black\"/>",
            x0 - 5.0
        );
        let _ = writeln!(
            out,
            "  <text x=\"{:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"end\">{}</text>",
            x0 - 8.0,
            py + 4.0,
            fmt_tick(fy)
        );
    }
    let _ = writeln!(
        out,
        "  <text x=\"{:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\">{}</text>",
        MARGIN_LEFT + plot_w / 2.0,
        CHART_HEIGHT - 12.0,
        escape(xlabel)
    );
    let _ = writeln!(
        out,
        "  <text x=\"18\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 18 {:.2})\">{}</text>",
        MARGIN_TOP + plot_h / 2.0,
        MARGIN_TOP + plot_h / 2.0,
        escape(ylabel)
    );

    // Series lines, markers and legend.
    for (i, s) in series.iter().enumerate() {
        if s.line && s.points.len() > 1 {
            let pts: Vec<String> = s
                .points
                .iter()
                .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
                .collect();
            let dash = s
                .dash
                .map(|d| format!(" stroke-dasharray=\"{d}\""))
                .unwrap_or_default();
            let _ = writeln!(
                out,
                "  <polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.8\"{} points=\"{}\"/>",
                s.color,
                dash,
                pts.join(" ")
            );
        }
        if s.markers {
            for &(x, y) in &s.points {
                let _ = writeln!(
                    out,
                    "  <circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"2.6\" fill=\"{}\"/>",
                    sx(x),
                    sy(y),
                    s.color
                );
            }
        }
        let ly = MARGIN_TOP + 14.0 + 18.0 * i as f64;
        let lx = CHART_WIDTH - MARGIN_RIGHT + 16.0;
        let _ = writeln!(
            out,
            "  <line x1=\"{lx:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"{}\" stroke-width=\"1.8\"{}/>",
            ly - 4.0,
            lx + 24.0,
            ly - 4.0,
            s.color,
            s.dash
                .map(|d| format!(" stroke-dasharray=\"{d}\""))
                .unwrap_or_default()
        );
        let _ = writeln!(
            out,
            "  <text x=\"{:.2}\" y=\"{ly:.2}\" font-family=\"sans-serif\" font-size=\"12\">{}</text>",
            lx + 30.0,
            escape(&s.label)
        );
    }
    out.push_str("</svg>\n");
    out
}

fn fmt_tick(v: f64) -> String {
    if v == 0.0 {
        return "0".to_owned();
    }
    let a = v.abs();
    if a >= 100.0 {
        format!("{v:.0}")
    } else if a >= 1.0 {
        format!("{v:.1}")
    } else {
        format!("{v:.3}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn csv_writer(path: &Path) -> Result<csv::Writer<std::fs::File>> {
    csv::Writer::from_path(path).map_err(|e| io_err(path, &e))
}

fn write_record<W: std::io::Write>(
    w: &mut csv::Writer<W>,
    path: &Path,
    fields: &[&str],
) -> Result<()> {
    w.write_record(fields).map_err(|e| io_err(path, &e))
}

fn io_err(path: &Path, e: &dyn std::fmt::Display) -> Error {
    Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    }
}
