//! CSV, sidecar and plot-script writers.

use std::fmt::Write as _;
use std::fs;
use std::path::{Component, Path, PathBuf};

use ofdm_sync::{HistogramResult, TraceResult};

use crate::error::{CliError, Result};

pub const TRACE_HEADER: &str = "n,m_old,m_new,m_delayed_r";
pub const HISTOGRAM_HEADER: &str = "bin_left,bin_right,count_old_norm,count_new_norm";
pub const META_FILE: &str = "meta.txt";
pub const SIGNIFICANT_DIGITS: usize = 9;

/// Shortest `%.{digits}g`-style rendering: `digits` significant digits,
/// trailing zeros dropped, scientific form outside `[1e-5, 10^digits)`.
pub fn format_sig(v: f64, digits: usize) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -5 || exp >= digits as i32 {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa), exp.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp) as usize;
        trim_zeros(&format!("{v:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn sig(v: f64) -> String {
    format_sig(v, SIGNIFICANT_DIGITS)
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

fn sidecar_path(csv: &Path) -> PathBuf {
    csv.with_file_name(META_FILE)
}

/// Writes `key = value` lines.
pub fn write_meta(path: &Path, entries: &[(String, String)]) -> Result<()> {
    let mut text = String::new();
    for (k, v) in entries {
        let _ = writeln!(text, "{k} = {v}");
    }
    write_file(path, &text)
}

/// Writes the trace CSV to `path` and `entries` to `meta.txt` beside it.
pub fn write_trace_csv(
    result: &TraceResult,
    path: &Path,
    entries: &[(String, String)],
) -> Result<()> {
    let mut text = String::with_capacity(48 * result.indices.len());
    text.push_str(TRACE_HEADER);
    text.push('\n');
    for (i, n) in result.indices.iter().enumerate() {
        let _ = writeln!(
            text,
            "{n},{},{},{}",
            sig(result.m_old[i]),
            sig(result.m_new[i]),
            sig(result.m_delayed_r[i])
        );
    }
    write_file(path, &text)?;
    write_meta(&sidecar_path(path), entries)
}

/// Writes normalized histograms over the shared bin edges, then `meta.txt`
/// with the means and variances appended to `entries`.
pub fn write_histogram_csv(
    result: &HistogramResult,
    path: &Path,
    entries: &[(String, String)],
) -> Result<()> {
    let bins = result.counts_old.len();
    if result.trials == 0 || bins == 0 {
        return Err(ofdm_sync::Error::NoTrials.into());
    }
    if result.counts_new.len() != bins || result.bin_edges.len() != bins + 1 {
        return Err(ofdm_sync::Error::LengthMismatch {
            expected: bins + 1,
            actual: result.bin_edges.len(),
        }
        .into());
    }

    let old = result.normalized_old();
    let new = result.normalized_new();
    let mut text = String::new();
    text.push_str(HISTOGRAM_HEADER);
    text.push('\n');
    for b in 0..bins {
        let _ = writeln!(
            text,
            "{},{},{},{}",
            sig(result.bin_edges[b]),
            sig(result.bin_edges[b + 1]),
            sig(old[b]),
            sig(new[b])
        );
    }
    write_file(path, &text)?;

    let mut meta = entries.to_vec();
    meta.extend([
        ("mean_old".to_string(), sig(result.mean_old)),
        ("mean_new".to_string(), sig(result.mean_new)),
        ("var_old".to_string(), sig(result.var_old)),
        ("var_new".to_string(), sig(result.var_new)),
        ("degenerate".to_string(), result.degenerate.to_string()),
    ]);
    write_meta(&sidecar_path(path), &meta)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotKind {
    Trace,
    Histogram,
}

fn clean(p: &Path) -> Vec<Component<'_>> {
    p.components()
        .filter(|c| !matches!(c, Component::CurDir))
        .collect()
}

/// Path of `target` relative to `base`; both must be relative or both
/// absolute.
fn relative_to(base: &Path, target: &Path) -> Option<PathBuf> {
    if base.is_absolute() != target.is_absolute() {
        return None;
    }
    let (b, t) = (clean(base), clean(target));
    let common = b.iter().zip(&t).take_while(|(x, y)| x == y).count();
    if b[common..]
        .iter()
        .any(|c| !matches!(c, Component::Normal(_)))
    {
        return None;
    }
    let mut out: PathBuf = b[common..].iter().map(|_| "..").collect();
    out.extend(&t[common..]);
    Some(out)
}

fn py_string(path: &Path) -> String {
    let parts: Vec<String> = path
        .components()
        .map(|c| format!("{:?}", c.as_os_str().to_string_lossy()))
        .collect();
    parts.join(", ")
}

/// Writes a matplotlib script that reads `csvs` relative to its own
/// location and saves a PNG next to itself.
pub fn emit_plot_script(kind: PlotKind, csvs: &[PathBuf], script: &Path) -> Result<()> {
    let dir = script.parent().unwrap_or(Path::new(""));
    let mut sources = Vec::new();
    for csv in csvs {
        if !csv.is_file() {
            return Err(CliError::MissingCsv(csv.clone()));
        }
        let rel = relative_to(dir, csv).ok_or_else(|| CliError::BadPath {
            path: csv.clone(),
            message: format!("not reachable by a relative path from {}", dir.display()),
        })?;
        sources.push(rel);
    }
    let stem = script
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "plot".to_string());

    let mut text = String::from(
        "#!/usr/bin/env python3\n\
         import csv\n\
         from pathlib import Path\n\
         \n\
         import matplotlib\n\
         matplotlib.use(\"Agg\")\n\
         import matplotlib.pyplot as plt\n\
         \n\
         HERE = Path(__file__).resolve().parent\n\
         \n\
         \n\
         def load(*parts):\n\
         \x20   with open(HERE.joinpath(*parts), newline=\"\") as f:\n\
         \x20       rows = list(csv.DictReader(f))\n\
         \x20   return {k: [float(r[k]) for r in rows] for k in rows[0]}\n\
         \n\
         \n",
    );
    text.push_str("SOURCES = [\n");
    for s in &sources {
        let _ = writeln!(text, "    ({},),", py_string(s));
    }
    text.push_str("]\n\n");

    match kind {
        PlotKind::Trace => text.push_str(
            "fig, axes = plt.subplots(len(SOURCES), 1, figsize=(10, 4 * len(SOURCES)), squeeze=False)\n\
             for ax, parts in zip(axes[:, 0], SOURCES):\n\
             \x20   d = load(*parts)\n\
             \x20   ax.plot(d[\"n\"], d[\"m_old\"], label=\"M old\", linewidth=0.8)\n\
             \x20   ax.plot(d[\"n\"], d[\"m_new\"], label=\"M new\", linewidth=0.8)\n\
             \x20   ax.set_xlabel(\"n\")\n\
             \x20   ax.set_ylabel(\"timing metric\")\n\
             \x20   ax.set_title(\"/\".join(parts))\n\
             \x20   ax.grid(True, alpha=0.3)\n\
             \x20   ax.legend()\n",
        ),
        PlotKind::Histogram => text.push_str(
            "fig, axes = plt.subplots(len(SOURCES), 2, figsize=(10, 4 * len(SOURCES)), squeeze=False, sharey=\"row\")\n\
             for row, parts in zip(axes, SOURCES):\n\
             \x20   d = load(*parts)\n\
             \x20   width = [r - l for l, r in zip(d[\"bin_left\"], d[\"bin_right\"])]\n\
             \x20   for ax, key, title in ((row[0], \"count_old_norm\", \"M old\"), (row[1], \"count_new_norm\", \"M new\")):\n\
             \x20       ax.bar(d[\"bin_left\"], d[key], width=width, align=\"edge\")\n\
             \x20       ax.set_title(\"Normalized histogram, \" + title)\n\
             \x20       ax.set_xlabel(\"statistic at expected peak\")\n\
             \x20       ax.grid(True, alpha=0.3)\n\
             \x20   row[0].set_ylabel(\"fraction of trials\")\n",
        ),
    }
    let _ = write!(
        text,
        "fig.tight_layout()\nfig.savefig(HERE / \"{stem}.png\", dpi=150)\n"
    );
    write_file(script, &text)
}
