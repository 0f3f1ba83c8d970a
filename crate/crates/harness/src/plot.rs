//! Standalone SVG learning curves and the ratio heat table.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{HarnessError, Result};
use crate::metrics::{read_metrics, MetricsTable};
use crate::ratio::{CapacityResult, RatioTable};
use crate::stats::{aggregate_metric, mean_fill_episode, Metric};

const PALETTE: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"];
const PANEL_W: f64 = 480.0;
const PANEL_H: f64 = 320.0;
const MARGIN_L: f64 = 60.0;
const MARGIN_R: f64 = 20.0;
const MARGIN_T: f64 = 36.0;
const MARGIN_B: f64 = 48.0;

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub points: Vec<f64>,
    /// Episode drawn as a dashed vertical bar, e.g. the mean fill episode.
    pub marker: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Panel {
    pub title: String,
    pub y_label: String,
    pub series: Vec<Series>,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn y_range(panel: &Panel) -> (f64, f64) {
    let values = panel.series.iter().flat_map(|s| s.points.iter().copied()).filter(|v| v.is_finite());
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    let lo = lo.min(0.0);
    if hi - lo < 1e-12 {
        (lo, lo + 1.0)
    } else {
        (lo, hi + (hi - lo) * 0.05)
    }
}

fn draw_panel(svg: &mut String, panel: &Panel, ox: f64, oy: f64) {
    let plot_w = PANEL_W - MARGIN_L - MARGIN_R;
    let plot_h = PANEL_H - MARGIN_T - MARGIN_B;
    let (x0, y0) = (ox + MARGIN_L, oy + MARGIN_T);
    let n = panel.series.iter().map(|s| s.points.len()).max().unwrap_or(0).max(2);
    let (lo, hi) = y_range(panel);
    let sx = |e: f64| x0 + e / (n - 1) as f64 * plot_w;
    let sy = |v: f64| y0 + plot_h - (v - lo) / (hi - lo) * plot_h;

    let _ = writeln!(svg, r#"<g class="panel">"#);
    let _ = writeln!(svg, r#"<text x="{:.1}" y="{:.1}" font-size="14" text-anchor="middle">{}</text>"#, x0 + plot_w / 2.0, oy + 20.0, escape(&panel.title));
    let _ = writeln!(svg, r##"<rect x="{x0:.1}" y="{y0:.1}" width="{plot_w:.1}" height="{plot_h:.1}" fill="none" stroke="#444"/>"##);
    for i in 0..=4 {
        let v = lo + (hi - lo) * i as f64 / 4.0;
        let y = sy(v);
        let _ = writeln!(svg, r##"<line x1="{:.1}" y1="{y:.1}" x2="{x0:.1}" y2="{y:.1}" stroke="#444"/>"##, x0 - 4.0);
        let _ = writeln!(svg, r#"<text x="{:.1}" y="{:.1}" font-size="10" text-anchor="end">{}</text>"#, x0 - 6.0, y + 3.0, fmt_tick(v));
        let e = (n - 1) as f64 * i as f64 / 4.0;
        let x = sx(e);
        let _ = writeln!(svg, r##"<line x1="{x:.1}" y1="{:.1}" x2="{x:.1}" y2="{:.1}" stroke="#444"/>"##, y0 + plot_h, y0 + plot_h + 4.0);
        let _ = writeln!(svg, r#"<text x="{x:.1}" y="{:.1}" font-size="10" text-anchor="middle">{}</text>"#, y0 + plot_h + 16.0, e.round());
    }
    let _ = writeln!(svg, r#"<text x="{:.1}" y="{:.1}" font-size="11" text-anchor="middle">episode</text>"#, x0 + plot_w / 2.0, oy + PANEL_H - 10.0);
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="{:.1}" font-size="11" text-anchor="middle" transform="rotate(-90 {:.1} {:.1})">{}</text>"#,
        ox + 14.0,
        y0 + plot_h / 2.0,
        ox + 14.0,
        y0 + plot_h / 2.0,
        escape(&panel.y_label)
    );

    for (k, s) in panel.series.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let mut points = String::new();
        for (e, v) in s.points.iter().enumerate().filter(|(_, v)| v.is_finite()) {
            let _ = write!(points, "{:.1},{:.1} ", sx(e as f64), sy(*v));
        }
        let _ = writeln!(svg, r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#, points.trim_end());
        if let Some(m) = s.marker {
            let x = sx(m.min((n - 1) as f64));
            let _ = writeln!(
                svg,
                r#"<line class="fill-marker" x1="{x:.1}" y1="{y0:.1}" x2="{x:.1}" y2="{:.1}" stroke="{color}" stroke-dasharray="4 3"/>"#,
                y0 + plot_h
            );
        }
        let ly = y0 + 14.0 + 14.0 * k as f64;
        let lx = x0 + plot_w - 110.0;
        let _ = writeln!(svg, r#"<line x1="{lx:.1}" y1="{:.1}" x2="{:.1}" y2="{:.1}" stroke="{color}" stroke-width="2"/>"#, ly - 4.0, lx + 18.0, ly - 4.0);
        let _ = writeln!(svg, r#"<text class="legend" x="{:.1}" y="{ly:.1}" font-size="11">{}</text>"#, lx + 22.0, escape(&s.label));
    }
    let _ = writeln!(svg, "</g>");
}

fn fmt_tick(v: f64) -> String {
    if v.abs() >= 100.0 {
        format!("{v:.0}")
    } else {
        format!("{v:.2}")
    }
}

/// Panels laid out left to right in one document.
pub fn render_panels(title: &str, panels: &[Panel]) -> String {
    let width = PANEL_W * panels.len().max(1) as f64;
    let height = PANEL_H + 30.0;
    let mut svg = String::new();
    let _ = writeln!(svg, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}" font-family="sans-serif">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(svg, r#"<text x="{:.1}" y="20" font-size="16" text-anchor="middle">{}</text>"#, width / 2.0, escape(title));
    for (i, p) in panels.iter().enumerate() {
        draw_panel(&mut svg, p, PANEL_W * i as f64, 30.0);
    }
    svg.push_str("</svg>\n");
    svg
}

/// Heat table of SEC/NSEC ratios; cells above one shade green, below red.
pub fn render_ratio_table(table: &RatioTable) -> String {
    let cell = 80.0;
    let (left, top) = (110.0, 70.0);
    let width = left + cell * table.nsec_capacities.len() as f64 + 20.0;
    let height = top + cell * table.sec_capacities.len() as f64 + 20.0;
    let mut svg = String::new();
    let _ = writeln!(svg, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}" font-family="sans-serif">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(svg, r#"<text x="{:.1}" y="20" font-size="14" text-anchor="middle">SEC / NSEC final reward</text>"#, width / 2.0);
    let _ = writeln!(svg, r#"<text x="{:.1}" y="42" font-size="11" text-anchor="middle">NSEC capacity</text>"#, left + cell * table.nsec_capacities.len() as f64 / 2.0);
    for (j, c) in table.nsec_capacities.iter().enumerate() {
        let _ = writeln!(svg, r#"<text x="{:.1}" y="{:.1}" font-size="11" text-anchor="middle">{c}</text>"#, left + cell * (j as f64 + 0.5), top - 8.0);
    }
    for (i, (c, row)) in table.sec_capacities.iter().zip(&table.cells).enumerate() {
        let y = top + cell * i as f64;
        let _ = writeln!(svg, r#"<text x="{:.1}" y="{:.1}" font-size="11" text-anchor="end">SEC {c}</text>"#, left - 8.0, y + cell / 2.0 + 4.0);
        for (j, v) in row.iter().enumerate() {
            let x = left + cell * j as f64;
            let (fill, text) = match v {
                Some(r) => (heat(*r), format!("{r:.3}")),
                None => ("#cccccc".to_string(), "n/a".to_string()),
            };
            let _ = writeln!(svg, r##"<rect x="{x:.1}" y="{y:.1}" width="{cell:.1}" height="{cell:.1}" fill="{fill}" stroke="#fff"/>"##);
            let _ = writeln!(svg, r#"<text x="{:.1}" y="{:.1}" font-size="12" text-anchor="middle">{text}</text>"#, x + cell / 2.0, y + cell / 2.0 + 4.0);
        }
    }
    svg.push_str("</svg>\n");
    svg
}

fn heat(ratio: f64) -> String {
    let t = ((ratio - 1.0) / 0.5).clamp(-1.0, 1.0);
    let fade = |c: f64| (255.0 - (255.0 - c) * t.abs()).round() as u8;
    if t >= 0.0 {
        format!("#{:02x}{:02x}{:02x}", fade(44.0), fade(160.0), fade(44.0))
    } else {
        format!("#{:02x}{:02x}{:02x}", fade(214.0), fade(39.0), fade(40.0))
    }
}

fn write_svg(path: &Path, svg: &str) -> Result<()> {
    std::fs::write(path, svg).map_err(HarnessError::io(path))
}

fn label_of(path: &Path, table: &MetricsTable) -> String {
    table
        .meta("label")
        .map(str::to_string)
        .unwrap_or_else(|| path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default())
}

fn y_label(metric: Metric) -> &'static str {
    match metric {
        Metric::Reward => "mean reward",
        Metric::Steps => "mean steps",
        Metric::Entropy => "mean policy entropy (nats)",
    }
}

/// One SVG per metric, each with one smoothed curve per CSV. Every CSV is
/// validated before anything is written.
pub fn emit_plots(csv_paths: &[PathBuf], out_dir: &Path, window: usize, metrics: &[Metric]) -> Result<Vec<PathBuf>> {
    if csv_paths.is_empty() {
        return Err(HarnessError::Invalid("no CSV files to plot".into()));
    }
    let tables = csv_paths.iter().map(|p| read_metrics(p).map(|t| (label_of(p, &t), t))).collect::<Result<Vec<_>>>()?;
    std::fs::create_dir_all(out_dir).map_err(HarnessError::io(out_dir))?;
    let mut written = Vec::new();
    for &metric in metrics {
        let series = tables
            .iter()
            .map(|(label, t)| Series {
                label: label.clone(),
                points: aggregate_metric(&t.rows, metric, window),
                marker: t.rows.iter().any(|r| r.memory_filled).then(|| mean_fill_episode(&t.rows)).flatten(),
            })
            .collect();
        let panel = Panel { title: format!("{} (window {window})", metric.label()), y_label: y_label(metric).into(), series };
        let path = out_dir.join(format!("{}.svg", metric.label()));
        write_svg(&path, &render_panels(metric.label(), &[panel]))?;
        written.push(path);
    }
    Ok(written)
}

/// Capacity-grid figures: one panel per capacity with SEC and NSEC curves
/// and their mean fill episodes.
pub fn emit_sweep_plots(sec: &[CapacityResult], nsec: &[CapacityResult], out_dir: &Path, window: usize) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    for metric in [Metric::Reward, Metric::Entropy] {
        let panels: Vec<Panel> = sec
            .iter()
            .zip(nsec)
            .map(|(s, n)| Panel {
                title: format!("EC {}", s.capacity),
                y_label: y_label(metric).into(),
                series: [("SEC", s), ("NSEC", n)]
                    .into_iter()
                    .map(|(label, r)| Series { label: label.into(), points: aggregate_metric(&r.rows, metric, window), marker: mean_fill_episode(&r.rows) })
                    .collect(),
            })
            .collect();
        let path = out_dir.join(format!("sweep_{}.svg", metric.label()));
        write_svg(&path, &render_panels(&format!("{} by memory capacity", metric.label()), &panels))?;
        written.push(path);
    }
    Ok(written)
}

pub fn emit_ratio_plot(table: &RatioTable, path: &Path) -> Result<()> {
    write_svg(path, &render_ratio_table(table))
}
