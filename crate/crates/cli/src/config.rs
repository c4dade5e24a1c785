//! Run configuration: `key = value` files merged with command-line flags.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_complex::Complex64;
use ofdm_sync::experiment::DEFAULT_THRESHOLD;
use ofdm_sync::{ChannelModel, OfdmConfig, Snr, SnrConvention, Tap};

use crate::error::{CliError, Result};

pub const DEFAULT_TRIALS: usize = 2000;
pub const DEFAULT_OUTPUT_DIR: &str = "out";

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Subcommand {
    Trace,
    Histogram,
    Selftest,
}

impl fmt::Display for Subcommand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Subcommand::Trace => "trace",
            Subcommand::Histogram => "histogram",
            Subcommand::Selftest => "selftest",
        })
    }
}

/// One layer of settings. Every field is optional; later layers win.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Settings {
    pub fft_size: Option<usize>,
    pub cp_len: Option<usize>,
    pub num_data_symbols: Option<usize>,
    pub lead_noise_len: Option<usize>,
    pub tail_noise_len: Option<usize>,
    pub preamble_has_cp: Option<bool>,
    pub snr: Option<Snr>,
    pub seed: Option<u64>,
    /// `Some(None)` explicitly selects the AWGN-only channel.
    pub taps: Option<Option<Vec<Tap>>>,
    pub trials: Option<usize>,
    pub threshold: Option<f64>,
    pub output_dir: Option<PathBuf>,
    pub emit_plot_script: Option<bool>,
}

impl Settings {
    /// Fields set in `other` replace those in `self`.
    pub fn merge(mut self, other: &Settings) -> Settings {
        macro_rules! take {
            ($($f:ident),*) => {$(
                if other.$f.is_some() {
                    self.$f = other.$f.clone();
                }
            )*};
        }
        take!(
            fft_size,
            cp_len,
            num_data_symbols,
            lead_noise_len,
            tail_noise_len,
            preamble_has_cp,
            snr,
            seed,
            taps,
            trials,
            threshold,
            output_dir,
            emit_plot_script
        );
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub subcommand: Subcommand,
    pub config_path: Option<PathBuf>,
    pub ofdm: OfdmConfig,
    pub channel: Option<ChannelModel>,
    pub trials: usize,
    pub threshold: f64,
    pub output_dir: PathBuf,
    pub emit_plot_script: bool,
}

fn bad(line: Option<usize>, key: &str, message: impl Into<String>) -> CliError {
    CliError::BadValue {
        line,
        key: key.to_string(),
        message: message.into(),
    }
}

fn parse_num<T: FromStr>(line: Option<usize>, key: &str, value: &str) -> Result<T>
where
    T::Err: fmt::Display,
{
    value
        .parse()
        .map_err(|e: T::Err| bad(line, key, format!("cannot parse `{value}`: {e}")))
}

fn parse_bool(line: Option<usize>, key: &str, value: &str) -> Result<bool> {
    match value {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(bad(
            line,
            key,
            format!("expected `true` or `false`, got `{value}`"),
        )),
    }
}

/// Parses `d1:re,im;d2:re,im`. `none` or an empty string means no
/// multipath.
pub fn parse_taps(text: &str) -> std::result::Result<Option<Vec<Tap>>, String> {
    let text = text.trim();
    if text.is_empty() || text == "none" {
        return Ok(None);
    }
    let mut taps = Vec::new();
    for item in text.split(';') {
        let item = item.trim();
        let (delay, gain) = item
            .split_once(':')
            .ok_or_else(|| format!("tap `{item}` is not of the form delay:re,im"))?;
        let (re, im) = gain
            .split_once(',')
            .ok_or_else(|| format!("gain `{gain}` is not of the form re,im"))?;
        let delay: usize = delay
            .trim()
            .parse()
            .map_err(|e| format!("delay `{}`: {e}", delay.trim()))?;
        let re: f64 = re
            .trim()
            .parse()
            .map_err(|e| format!("`{}`: {e}", re.trim()))?;
        let im: f64 = im
            .trim()
            .parse()
            .map_err(|e| format!("`{}`: {e}", im.trim()))?;
        taps.push(Tap::new(delay, Complex64::new(re, im)));
    }
    Ok(Some(taps))
}

/// Inverse of [`parse_taps`], exact for every finite gain.
pub fn format_taps(channel: Option<&ChannelModel>) -> String {
    match channel {
        None => "none".to_string(),
        Some(ch) => ch
            .taps()
            .iter()
            .map(|t| format!("{}:{},{}", t.delay, t.gain.re, t.gain.im))
            .collect::<Vec<_>>()
            .join(";"),
    }
}

/// Parses `key = value` lines. Blank lines are skipped and `#` starts a
/// comment anywhere on a line.
pub fn parse_file(contents: &str) -> Result<Settings> {
    let mut s = Settings::default();
    for (i, raw) in contents.lines().enumerate() {
        let line = i + 1;
        let text = raw.split('#').next().unwrap_or("").trim();
        if text.is_empty() {
            continue;
        }
        let (key, value) = text.split_once('=').ok_or_else(|| CliError::Syntax {
            line,
            message: format!("expected `key = value`, got `{text}`"),
        })?;
        let (key, value) = (key.trim(), value.trim());
        let at = Some(line);
        match key {
            "fft_size" => s.fft_size = Some(parse_num(at, key, value)?),
            "cp_len" => s.cp_len = Some(parse_num(at, key, value)?),
            "num_data_symbols" => s.num_data_symbols = Some(parse_num(at, key, value)?),
            "lead_noise_len" => s.lead_noise_len = Some(parse_num(at, key, value)?),
            "tail_noise_len" => s.tail_noise_len = Some(parse_num(at, key, value)?),
            "preamble_has_cp" => s.preamble_has_cp = Some(parse_bool(at, key, value)?),
            "eb_n0_db" | "es_n0_db" => {
                if s.snr.is_some() {
                    return Err(bad(at, key, "only one of eb_n0_db and es_n0_db may be set"));
                }
                let db = parse_num(at, key, value)?;
                s.snr = Some(if key == "eb_n0_db" {
                    Snr::eb_n0_db(db)
                } else {
                    Snr::es_n0_db(db)
                });
            }
            "seed" => s.seed = Some(parse_num(at, key, value)?),
            "taps" => s.taps = Some(parse_taps(value).map_err(|m| bad(at, key, m))?),
            "trials" => s.trials = Some(parse_num(at, key, value)?),
            "threshold" => s.threshold = Some(parse_num(at, key, value)?),
            "output_dir" => s.output_dir = Some(PathBuf::from(value)),
            "emit_plot_script" => s.emit_plot_script = Some(parse_bool(at, key, value)?),
            _ => {
                return Err(CliError::UnknownKey {
                    line,
                    key: key.to_string(),
                })
            }
        }
    }
    Ok(s)
}

/// Resolves defaults, then the file, then `flags`, and validates the result.
pub fn parse_config(
    subcommand: Subcommand,
    contents: Option<&str>,
    flags: &Settings,
) -> Result<RunConfig> {
    let file = match contents {
        Some(text) => parse_file(text)?,
        None => Settings::default(),
    };
    let s = file.merge(flags);

    let d = OfdmConfig::default();
    let ofdm = OfdmConfig {
        fft_size: s.fft_size.unwrap_or(d.fft_size),
        cp_len: s.cp_len.unwrap_or(d.cp_len),
        num_data_symbols: s.num_data_symbols.unwrap_or(d.num_data_symbols),
        lead_noise_len: s.lead_noise_len.unwrap_or(d.lead_noise_len),
        tail_noise_len: s.tail_noise_len.unwrap_or(d.tail_noise_len),
        preamble_has_cp: s.preamble_has_cp.unwrap_or(d.preamble_has_cp),
        snr: s.snr.unwrap_or(d.snr),
        base_seed: s.seed.unwrap_or(d.base_seed),
    };
    ofdm.validate()?;

    let channel = match s.taps.flatten() {
        Some(taps) => Some(ChannelModel::new(taps).map_err(|e| bad(None, "taps", e.to_string()))?),
        None => None,
    };

    let trials = s.trials.unwrap_or(DEFAULT_TRIALS);
    if trials == 0 {
        return Err(bad(None, "trials", "must be at least 1"));
    }
    let threshold = s.threshold.unwrap_or(DEFAULT_THRESHOLD);
    if !(threshold.is_finite() && threshold >= 0.0) {
        return Err(bad(
            None,
            "threshold",
            format!("{threshold} must be finite and non-negative"),
        ));
    }

    Ok(RunConfig {
        subcommand,
        config_path: None,
        ofdm,
        channel,
        trials,
        threshold,
        output_dir: s
            .output_dir
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR)),
        emit_plot_script: s.emit_plot_script.unwrap_or(true),
    })
}

/// Reads `path` (if any) and resolves it against `flags`.
pub fn load_config(
    subcommand: Subcommand,
    path: Option<&Path>,
    flags: &Settings,
) -> Result<RunConfig> {
    let contents = match path {
        Some(p) => Some(std::fs::read_to_string(p).map_err(|e| CliError::io(p, e))?),
        None => None,
    };
    let mut cfg = parse_config(subcommand, contents.as_deref(), flags)?;
    cfg.config_path = path.map(Path::to_path_buf);
    Ok(cfg)
}

impl RunConfig {
    /// Resolved settings as `key = value` pairs, in a fixed order.
    pub fn echo(&self) -> Vec<(String, String)> {
        let c = &self.ofdm;
        let snr_key = match c.snr.convention {
            SnrConvention::EbN0Qpsk => "eb_n0_db",
            SnrConvention::EsN0 => "es_n0_db",
        };
        vec![
            ("subcommand".into(), self.subcommand.to_string()),
            ("fft_size".into(), c.fft_size.to_string()),
            ("cp_len".into(), c.cp_len.to_string()),
            ("num_data_symbols".into(), c.num_data_symbols.to_string()),
            ("lead_noise_len".into(), c.lead_noise_len.to_string()),
            ("tail_noise_len".into(), c.tail_noise_len.to_string()),
            ("preamble_has_cp".into(), c.preamble_has_cp.to_string()),
            (snr_key.into(), c.snr.level_db.to_string()),
            ("noise_variance".into(), c.noise_spec().sigma_sq.to_string()),
            ("seed".into(), c.base_seed.to_string()),
            ("taps".into(), format_taps(self.channel.as_ref())),
            ("trials".into(), self.trials.to_string()),
            ("threshold".into(), self.threshold.to_string()),
        ]
    }
}
