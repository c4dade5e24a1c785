//! Command-line flags.

use std::path::PathBuf;

use clap::Parser;
use ofdm_sync::Snr;

use crate::config::{parse_taps, Settings, Subcommand};
use crate::error::{CliError, Result};

#[derive(Debug, Clone, Parser)]
#[command(name = "ofdm-sync", version, about = "OFDM timing-metric experiments")]
pub struct Cli {
    #[arg(value_enum)]
    pub subcommand: Subcommand,

    /// `key = value` configuration file; flags override it.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,

    #[arg(long, value_name = "PATH")]
    pub output_dir: Option<PathBuf>,

    #[arg(long, value_name = "U64")]
    pub seed: Option<u64>,

    /// FFT size N.
    #[arg(long = "n", value_name = "N")]
    pub fft_size: Option<usize>,

    /// Cyclic-prefix length.
    #[arg(long = "cp", value_name = "N")]
    pub cp_len: Option<usize>,

    #[arg(long, value_name = "K")]
    pub data_symbols: Option<usize>,

    #[arg(long, value_name = "N")]
    pub lead_noise_len: Option<usize>,

    #[arg(long, value_name = "N")]
    pub tail_noise_len: Option<usize>,

    /// Give the first preamble symbol a cyclic prefix.
    #[arg(long, value_name = "BOOL")]
    pub preamble_cp: Option<bool>,

    #[arg(
        long,
        value_name = "X",
        allow_negative_numbers = true,
        conflicts_with = "es_n0_db"
    )]
    pub eb_n0_db: Option<f64>,

    #[arg(long, value_name = "X", allow_negative_numbers = true)]
    pub es_n0_db: Option<f64>,

    /// Multipath taps `d1:re,im;d2:re,im`, or `none`.
    #[arg(long, value_name = "TAPS")]
    pub taps: Option<String>,

    #[arg(long, value_name = "T")]
    pub trials: Option<usize>,

    /// Peak-acceptance threshold on the modified metric.
    #[arg(long, value_name = "X")]
    pub threshold: Option<f64>,

    #[arg(long)]
    pub no_plot_script: bool,
}

impl Cli {
    pub fn settings(&self) -> Result<Settings> {
        let snr = match (self.eb_n0_db, self.es_n0_db) {
            (Some(db), _) => Some(Snr::eb_n0_db(db)),
            (None, Some(db)) => Some(Snr::es_n0_db(db)),
            (None, None) => None,
        };
        let taps = match &self.taps {
            Some(text) => Some(parse_taps(text).map_err(|message| CliError::BadValue {
                line: None,
                key: "taps".into(),
                message,
            })?),
            None => None,
        };
        Ok(Settings {
            fft_size: self.fft_size,
            cp_len: self.cp_len,
            num_data_symbols: self.data_symbols,
            lead_noise_len: self.lead_noise_len,
            tail_noise_len: self.tail_noise_len,
            preamble_has_cp: self.preamble_cp,
            snr,
            seed: self.seed,
            taps,
            trials: self.trials,
            threshold: self.threshold,
            output_dir: self.output_dir.clone(),
            emit_plot_script: self.no_plot_script.then_some(false),
        })
    }
}
