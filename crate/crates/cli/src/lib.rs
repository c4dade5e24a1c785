//! Command-line front end for the `ofdm-sync` experiments.
//!
//! Configuration comes from an optional `key = value` file overridden by
//! flags. Results are written as CSV with a `meta.txt` sidecar and an
//! optional matplotlib script.

pub mod args;
pub mod config;
pub mod error;
pub mod output;
pub mod run;

use std::io::Write;

pub use args::Cli;
pub use config::{load_config, parse_config, parse_file, RunConfig, Settings, Subcommand};
pub use error::{CliError, Result};
pub use output::{emit_plot_script, format_sig, write_histogram_csv, write_trace_csv, PlotKind};
pub use run::{execute, Outcome};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FLAGS_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Resolves the configuration, runs it and maps the result to an exit code.
pub fn run_cli(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let result = cli
        .settings()
        .and_then(|s| load_config(cli.subcommand, cli.config.as_deref(), &s))
        .and_then(|cfg| execute(&cfg, out));
    match result {
        Ok(o) if o.passed => EXIT_OK,
        Ok(_) => EXIT_FLAGS_FAILED,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
