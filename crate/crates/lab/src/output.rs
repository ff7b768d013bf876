//! Result files: `results.json`, one CSV and one SVG per table, and the `runs.jsonl` log.

use std::fmt::Write as _;
use std::fs::{self, OpenOptions};
use std::io::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};

use crate::config::Format;
use crate::record::{RunRecord, RunResults, Table};

/// Environment variable naming the cache directory.
pub const CACHE_ENV: &str = "SMOOTHLAB_CACHE";

/// Write the requested formats into `dir` and append `record` to `dir/runs.jsonl`.
pub fn write_outputs(dir: &Path, record: &RunRecord, formats: &[Format]) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut written = Vec::new();
    let run = &record.run;
    if formats.contains(&Format::Json) {
        let path = dir.join("results.json");
        fs::write(&path, results_json(run)).with_context(|| format!("writing {}", path.display()))?;
        written.push(path);
    }
    for table in &run.tables {
        if formats.contains(&Format::Csv) {
            let path = dir.join(format!("{}.csv", table.name));
            write_csv(&path, table)?;
            written.push(path);
        }
        if formats.contains(&Format::Svg) && !table.plot.is_empty() {
            let path = dir.join(format!("{}.svg", table.name));
            fs::write(&path, loglog_svg(table)).with_context(|| format!("writing {}", path.display()))?;
            written.push(path);
        }
    }
    let log = dir.join("runs.jsonl");
    let mut f = OpenOptions::new()
        .create(true)
        .append(true)
        .open(&log)
        .with_context(|| format!("opening {}", log.display()))?;
    writeln!(f, "{}", serde_json::to_string(record)?)?;
    written.push(log);
    Ok(written)
}

pub fn results_json(run: &RunResults) -> String {
    let mut s = serde_json::to_string_pretty(run).expect("results serialize");
    s.push('\n');
    s
}

fn write_csv(path: &Path, table: &Table) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("writing {}", path.display()))?;
    w.write_record(&table.columns)?;
    for row in &table.rows {
        w.write_record(row.iter().map(|x| format!("{x:e}")))?;
    }
    w.flush()?;
    Ok(())
}

/// `dir/<hash>.json` inside the cache directory, when one is configured.
pub fn cache_path(hash: &str) -> Option<PathBuf> {
    let dir = std::env::var_os(CACHE_ENV).filter(|d| !d.is_empty())?;
    Some(PathBuf::from(dir).join(format!("{hash}.json")))
}

pub fn cache_load(hash: &str) -> Option<RunResults> {
    let path = cache_path(hash)?;
    let text = fs::read_to_string(path).ok()?;
    let run: RunResults = serde_json::from_str(&text).ok()?;
    (run.config_hash == hash).then_some(run)
}

pub fn cache_store(run: &RunResults) -> Result<()> {
    let Some(path) = cache_path(&run.config_hash) else { return Ok(()) };
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    fs::write(&path, results_json(run)).with_context(|| format!("writing {}", path.display()))
}

const W: f64 = 640.0;
const H: f64 = 420.0;
const MARGIN: [f64; 4] = [70.0, 20.0, 30.0, 50.0];
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

/// Log-log line plot of the `plot` columns against the first column.
pub fn loglog_svg(table: &Table) -> String {
    let xs = table.column(&table.columns[0]).unwrap_or_default();
    let series: Vec<(String, Vec<(f64, f64)>)> = table
        .plot
        .iter()
        .filter_map(|c| {
            let ys = table.column(c)?;
            let pts: Vec<(f64, f64)> = xs
                .iter()
                .zip(&ys)
                .filter(|(x, y)| **x > 0.0 && **y > 0.0)
                .map(|(x, y)| (x.log10(), y.log10()))
                .collect();
            Some((c.clone(), pts))
        })
        .collect();
    let all: Vec<(f64, f64)> = series.iter().flat_map(|s| s.1.iter().copied()).collect();
    let (x0, x1) = bounds(all.iter().map(|p| p.0));
    let (y0, y1) = bounds(all.iter().map(|p| p.1));
    let [left, right, top, bottom] = MARGIN;
    let px = |x: f64| left + (x - x0) / (x1 - x0) * (W - left - right);
    let py = |y: f64| H - bottom - (y - y0) / (y1 - y0) * (H - top - bottom);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{:.1}" y="18" text-anchor="middle">{}</text>"#, W / 2.0, escape(&table.name));
    let _ = writeln!(
        s,
        r#"<rect x="{left}" y="{top}" width="{:.1}" height="{:.1}" fill="none" stroke="black"/>"#,
        W - left - right,
        H - top - bottom
    );
    for k in (x0.ceil() as i32)..=(x1.floor() as i32) {
        let x = px(k as f64);
        let _ = writeln!(
            s,
            r#"<line x1="{x:.1}" y1="{:.1}" x2="{x:.1}" y2="{:.1}" stroke="black"/>"#,
            H - bottom,
            H - bottom + 5.0
        );
        let _ = writeln!(s, r#"<text x="{x:.1}" y="{:.1}" text-anchor="middle">1e{k}</text>"#, H - bottom + 18.0);
    }
    for k in (y0.ceil() as i32)..=(y1.floor() as i32) {
        let y = py(k as f64);
        let _ = writeln!(s, r#"<line x1="{:.1}" y1="{y:.1}" x2="{left}" y2="{y:.1}" stroke="black"/>"#, left - 5.0);
        let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="end">1e{k}</text>"#, left - 8.0, y + 4.0);
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
        left + (W - left - right) / 2.0,
        H - 12.0,
        escape(&table.columns[0])
    );
    for (i, (name, pts)) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let path: Vec<String> = pts.iter().map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y))).collect();
        let _ =
            writeln!(s, r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#, path.join(" "));
        for &(x, y) in pts {
            let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="{color}"/>"#, px(x), py(y));
        }
        let ly = top + 16.0 + 16.0 * i as f64;
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{ly:.1}" fill="{color}" text-anchor="end">{}</text>"#,
            W - right - 8.0,
            escape(name)
        );
    }
    s.push_str("</svg>\n");
    s
}

fn bounds(it: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = it.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    let pad = ((hi - lo) * 0.05).max(0.05);
    (lo - pad, hi + pad)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
