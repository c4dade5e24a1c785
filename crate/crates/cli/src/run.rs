//! Subcommand execution.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use ofdm_sync::rng::derive_seed;
use ofdm_sync::{
    run_histogram, run_trace, selftest, summarize_histogram, summarize_trace, ExperimentSummary,
    Flag, PeakSettings,
};

use crate::config::{RunConfig, Subcommand};
use crate::error::{CliError, Result};
use crate::output::{
    emit_plot_script, format_sig, write_histogram_csv, write_trace_csv, PlotKind,
    SIGNIFICANT_DIGITS,
};

pub const TRACE_CSV: &str = "trace.csv";
pub const TRACE_SCRIPT: &str = "plot_trace.py";
pub const HISTOGRAM_CSV: &str = "histogram.csv";
pub const HISTOGRAM_SCRIPT: &str = "plot_histogram.py";

/// Stream indices for seeds derived from the configured base seed.
const TRACE_NOISE_STREAM: u64 = 0;
const HISTOGRAM_TRIAL_STREAM: u64 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub passed: bool,
    pub flags: Vec<Flag>,
    pub files: Vec<PathBuf>,
}

fn io_err(e: std::io::Error) -> CliError {
    CliError::io("<stdout>", e)
}

fn print_flags(out: &mut dyn Write, flags: &[Flag]) -> Result<()> {
    for f in flags {
        let verdict = if f.passed { "PASS" } else { "FAIL" };
        writeln!(out, "  {verdict} {}: {}", f.name, f.detail).map_err(io_err)?;
    }
    Ok(())
}

fn print_summary(out: &mut dyn Write, summary: &ExperimentSummary) -> Result<()> {
    writeln!(out, "scenario: {}", summary.scenario).map_err(io_err)?;
    print_flags(out, &summary.flags)?;
    for (k, v) in &summary.statistics {
        writeln!(out, "  {k} = {}", format_sig(*v, SIGNIFICANT_DIGITS)).map_err(io_err)?;
    }
    Ok(())
}

fn summary_entries(summary: &ExperimentSummary) -> Vec<(String, String)> {
    let mut entries = vec![("scenario".to_string(), summary.scenario.clone())];
    for f in &summary.flags {
        let verdict = if f.passed { "pass" } else { "fail" };
        entries.push((
            format!("flag.{}", f.name),
            format!("{verdict} ({})", f.detail),
        ));
    }
    for (k, v) in &summary.statistics {
        entries.push((format!("stat.{k}"), format_sig(*v, SIGNIFICANT_DIGITS)));
    }
    entries
}

fn prepare_dir(cfg: &RunConfig) -> Result<()> {
    fs::create_dir_all(&cfg.output_dir).map_err(|e| CliError::io(&cfg.output_dir, e))
}

fn trace(cfg: &RunConfig, out: &mut dyn Write) -> Result<Outcome> {
    let noise_seed = derive_seed(cfg.ofdm.base_seed, TRACE_NOISE_STREAM);
    let settings = PeakSettings {
        threshold: cfg.threshold,
        window: None,
    };
    let result = run_trace(
        &cfg.ofdm,
        cfg.channel.as_ref(),
        &cfg.ofdm.noise_spec(),
        noise_seed,
        &settings,
    )?;
    let scenario = if cfg.channel.is_some() {
        "multipath"
    } else {
        "awgn"
    };
    let summary = summarize_trace(scenario, &cfg.ofdm, &result);

    let mut entries = cfg.echo();
    entries.push(("noise_seed".into(), noise_seed.to_string()));
    entries.push((
        "expected_peak_index".into(),
        result.expected_peak_index.to_string(),
    ));
    entries.push(("burst_end_index".into(), result.burst_end_index.to_string()));
    entries.push((
        "accepted_peak_index".into(),
        result
            .detection
            .accepted
            .map_or_else(|| "none".to_string(), |(n, _)| n.to_string()),
    ));
    entries.extend(summary_entries(&summary));

    prepare_dir(cfg)?;
    let csv = cfg.output_dir.join(TRACE_CSV);
    write_trace_csv(&result, &csv, &entries)?;
    let mut files = vec![csv.clone(), csv.with_file_name(crate::output::META_FILE)];
    if cfg.emit_plot_script {
        let script = cfg.output_dir.join(TRACE_SCRIPT);
        emit_plot_script(PlotKind::Trace, &[csv], &script)?;
        files.push(script);
    }

    print_summary(out, &summary)?;
    Ok(Outcome {
        passed: summary.passed(),
        flags: summary.flags,
        files,
    })
}

fn histogram(cfg: &RunConfig, out: &mut dyn Write) -> Result<Outcome> {
    if cfg.channel.is_some() {
        return Err(CliError::BadValue {
            line: None,
            key: "taps".into(),
            message: "the histogram study is defined for AWGN only; use `taps = none`".into(),
        });
    }
    let trial_seed = derive_seed(cfg.ofdm.base_seed, HISTOGRAM_TRIAL_STREAM);
    let result = run_histogram(&cfg.ofdm, &cfg.ofdm.noise_spec(), cfg.trials, trial_seed)?;
    let summary = summarize_histogram("histogram", &cfg.ofdm, &result);

    let mut entries = cfg.echo();
    entries.push(("trial_seed_base".into(), trial_seed.to_string()));
    entries.extend(summary_entries(&summary));

    prepare_dir(cfg)?;
    let csv = cfg.output_dir.join(HISTOGRAM_CSV);
    write_histogram_csv(&result, &csv, &entries)?;
    let mut files = vec![csv.clone(), csv.with_file_name(crate::output::META_FILE)];
    if cfg.emit_plot_script {
        let script = cfg.output_dir.join(HISTOGRAM_SCRIPT);
        emit_plot_script(PlotKind::Histogram, &[csv], &script)?;
        files.push(script);
    }

    print_summary(out, &summary)?;
    Ok(Outcome {
        passed: summary.passed(),
        flags: summary.flags,
        files,
    })
}

fn run_selftest(out: &mut dyn Write) -> Result<Outcome> {
    let flags = selftest::run_all()?;
    writeln!(out, "selftest").map_err(io_err)?;
    print_flags(out, &flags)?;
    Ok(Outcome {
        passed: flags.iter().all(|f| f.passed),
        flags,
        files: Vec::new(),
    })
}

/// Runs the configured subcommand, printing a summary to `out`.
pub fn execute(cfg: &RunConfig, out: &mut dyn Write) -> Result<Outcome> {
    let outcome = match cfg.subcommand {
        Subcommand::Trace => trace(cfg, out)?,
        Subcommand::Histogram => histogram(cfg, out)?,
        Subcommand::Selftest => run_selftest(out)?,
    };
    for f in &outcome.files {
        writeln!(out, "wrote {}", f.display()).map_err(io_err)?;
    }
    let verdict = if outcome.passed { "PASS" } else { "FAIL" };
    writeln!(out, "result: {verdict}").map_err(io_err)?;
    Ok(outcome)
}
