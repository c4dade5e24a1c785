//! Trace comparison and peak-statistic histogram experiments.

use rayon::prelude::*;

use crate::channel::{add_awgn, synthesize_scenario, ChannelModel, NoiseSpec};
use crate::error::{Error, Result};
use crate::frame::{assemble_burst, OfdmConfig};
use crate::metric::{guarded_ratio, window_sums_at, MetricTrace};
use crate::peak::{find_peak, PeakReport};
use crate::rng::derive_seed;

pub const DEFAULT_THRESHOLD: f64 = 0.6;
/// Spurious-peak level for the modified metric.
pub const SPURIOUS_LEVEL_NEW: f64 = 0.6;
/// Spurious-peak level for the classic metric, as a fraction of its maximum.
pub const SPURIOUS_FRACTION_OLD: f64 = 0.6;
/// Rounding slack on the upper bound of the modified metric.
pub const BOUND_SLACK: f64 = 1e-9;
pub const HISTOGRAM_BINS: usize = 64;
pub const MEAN_TOLERANCE: f64 = 0.01;
pub const VARIANCE_RATIO_LIMIT: f64 = 0.9;

/// Peak-finder settings for the detection path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeakSettings {
    pub threshold: f64,
    /// Search half-width; `None` means `2L`.
    pub window: Option<usize>,
}

impl Default for PeakSettings {
    fn default() -> Self {
        PeakSettings {
            threshold: DEFAULT_THRESHOLD,
            window: None,
        }
    }
}

impl PeakSettings {
    pub fn window_for(&self, half_len: usize) -> usize {
        self.window.unwrap_or(2 * half_len)
    }
}

/// One scenario's metric traces in causal indexing.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceResult {
    pub indices: Vec<usize>,
    pub m_old: Vec<f64>,
    pub m_new: Vec<f64>,
    pub m_delayed_r: Vec<f64>,
    pub expected_peak_index: usize,
    pub burst_end_index: usize,
    /// Channel duration `D`, zero without multipath.
    pub channel_duration: usize,
    /// Half-width `N_CP + D` of the window treated as the true peak.
    pub exclusion_radius: usize,
    pub spurious_peaks_old: Vec<(usize, f64)>,
    pub spurious_peaks_new: Vec<(usize, f64)>,
    /// Peak search over `m_new`.
    pub detection: PeakReport,
    pub seed: u64,
}

impl TraceResult {
    fn position(&self, index: usize) -> Option<usize> {
        let first = *self.indices.first()?;
        index.checked_sub(first).filter(|&i| i < self.indices.len())
    }

    pub fn m_old_at(&self, index: usize) -> Option<f64> {
        self.position(index).map(|i| self.m_old[i])
    }

    pub fn m_new_at(&self, index: usize) -> Option<f64> {
        self.position(index).map(|i| self.m_new[i])
    }

    pub fn in_true_peak_window(&self, index: usize) -> bool {
        index.abs_diff(self.expected_peak_index) <= self.exclusion_radius
    }

    /// Largest classic-metric value after the burst has started leaving the
    /// window (causal index past the burst end).
    pub fn post_burst_max_old(&self) -> f64 {
        self.indices
            .iter()
            .zip(&self.m_old)
            .filter(|(&n, _)| n > self.burst_end_index)
            .map(|(_, &v)| v)
            .fold(0.0, f64::max)
    }

    /// Global maximum of `m_new` as `(index, value)`, earliest on ties.
    pub fn m_new_argmax(&self) -> Option<(usize, f64)> {
        self.indices
            .iter()
            .copied()
            .zip(self.m_new.iter().copied())
            .fold(None, |best, (n, v)| match best {
                Some((_, bv)) if bv >= v => best,
                _ => Some((n, v)),
            })
    }
}

/// Peak-finder candidates at or above `level` that fall outside the true-peak
/// window `expected ± radius`.
fn spurious_peaks(
    indices: &[usize],
    metric: &[f64],
    level: f64,
    window: usize,
    expected: usize,
    radius: usize,
) -> Result<Vec<(usize, f64)>> {
    let report = find_peak(metric, level, window)?.offset(indices[0]);
    Ok(report
        .candidates
        .into_iter()
        .filter(|&(n, _)| n.abs_diff(expected) > radius)
        .collect())
}

/// Synthesizes one scenario and computes all three metrics in causal
/// alignment. `seed` drives the noise.
pub fn run_trace(
    cfg: &OfdmConfig,
    ch: Option<&ChannelModel>,
    noise: &NoiseSpec,
    seed: u64,
    settings: &PeakSettings,
) -> Result<TraceResult> {
    let burst = synthesize_scenario(cfg, ch, noise, seed)?;
    let half_len = cfg.half_len();
    let trace = MetricTrace::causal(burst.stream.as_slice(), half_len)?;
    let indices: Vec<usize> = trace.indices().collect();

    let channel_duration = ch.map_or(0, ChannelModel::duration);
    let exclusion_radius = cfg.cp_len + channel_duration;
    let window = settings.window_for(half_len);
    let expected = burst.expected_peak_index;

    let spurious_peaks_new = spurious_peaks(
        &indices,
        &trace.m_new,
        SPURIOUS_LEVEL_NEW,
        window,
        expected,
        exclusion_radius,
    )?;
    let old_max = trace.m_old.iter().copied().fold(0.0, f64::max);
    let spurious_peaks_old = spurious_peaks(
        &indices,
        &trace.m_old,
        SPURIOUS_FRACTION_OLD * old_max,
        window,
        expected,
        exclusion_radius,
    )?;
    let detection =
        find_peak(&trace.m_new, settings.threshold, window)?.offset(trace.first_index());

    Ok(TraceResult {
        indices,
        m_old: trace.m_old,
        m_new: trace.m_new,
        m_delayed_r: trace.m_delayed_r,
        expected_peak_index: expected,
        burst_end_index: burst.burst_end_index,
        channel_duration,
        exclusion_radius,
        spurious_peaks_old,
        spurious_peaks_new,
        detection,
        seed,
    })
}

/// Peak-statistic distributions over independent AWGN trials.
#[derive(Debug, Clone, PartialEq)]
pub struct HistogramResult {
    pub trials: usize,
    pub peak_values_old: Vec<f64>,
    pub peak_values_new: Vec<f64>,
    pub mean_old: f64,
    pub mean_new: f64,
    /// Unbiased sample variance; zero for a single trial.
    pub var_old: f64,
    pub var_new: f64,
    /// Set when there are too few trials for a variance.
    pub degenerate: bool,
    /// `HISTOGRAM_BINS + 1` shared edges over `[0, max observed]`.
    pub bin_edges: Vec<f64>,
    pub counts_old: Vec<u64>,
    pub counts_new: Vec<u64>,
}

impl HistogramResult {
    pub fn from_values(peak_values_old: Vec<f64>, peak_values_new: Vec<f64>) -> Result<Self> {
        let trials = peak_values_old.len();
        if trials == 0 {
            return Err(Error::NoTrials);
        }
        if peak_values_new.len() != trials {
            return Err(Error::LengthMismatch {
                expected: trials,
                actual: peak_values_new.len(),
            });
        }
        let (mean_old, var_old) = mean_var(&peak_values_old);
        let (mean_new, var_new) = mean_var(&peak_values_new);

        let max = peak_values_old
            .iter()
            .chain(&peak_values_new)
            .copied()
            .fold(0.0, f64::max);
        let upper = if max > 0.0 { max } else { 1.0 };
        let width = upper / HISTOGRAM_BINS as f64;
        let bin_edges: Vec<f64> = (0..=HISTOGRAM_BINS)
            .map(|i| {
                if i == HISTOGRAM_BINS {
                    upper
                } else {
                    i as f64 * width
                }
            })
            .collect();
        let counts_old = bin_counts(&peak_values_old, width);
        let counts_new = bin_counts(&peak_values_new, width);

        Ok(HistogramResult {
            trials,
            peak_values_old,
            peak_values_new,
            mean_old,
            mean_new,
            var_old,
            var_new,
            degenerate: trials < 2,
            bin_edges,
            counts_old,
            counts_new,
        })
    }

    pub fn normalized_old(&self) -> Vec<f64> {
        normalize(&self.counts_old, self.trials)
    }

    pub fn normalized_new(&self) -> Vec<f64> {
        normalize(&self.counts_new, self.trials)
    }

    /// `var_new / var_old`, NaN when the classic variance is zero.
    pub fn variance_ratio(&self) -> f64 {
        if self.var_old > 0.0 {
            self.var_new / self.var_old
        } else {
            f64::NAN
        }
    }
}

fn mean_var(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    (mean, ss / (n - 1.0))
}

fn bin_counts(values: &[f64], width: f64) -> Vec<u64> {
    let mut counts = vec![0u64; HISTOGRAM_BINS];
    for &v in values {
        let bin = ((v / width).floor().max(0.0) as usize).min(HISTOGRAM_BINS - 1);
        counts[bin] += 1;
    }
    counts
}

fn normalize(counts: &[u64], trials: usize) -> Vec<f64> {
    counts.iter().map(|&c| c as f64 / trials as f64).collect()
}

/// Records the classic and modified metric at the expected peak index for
/// `trials` independent noise realizations of the same burst.
pub fn run_histogram(
    cfg: &OfdmConfig,
    noise: &NoiseSpec,
    trials: usize,
    base_seed: u64,
) -> Result<HistogramResult> {
    if trials == 0 {
        return Err(Error::NoTrials);
    }
    let burst = assemble_burst(cfg)?;
    let half_len = cfg.half_len();
    let start = burst.expected_peak_index - 2 * half_len;

    let values: Vec<(f64, f64)> = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let rx = add_awgn(&burst.stream, noise, derive_seed(base_seed, t))?;
            let (p, r, r_lagged) = window_sums_at(rx.as_slice(), half_len, start)?;
            let num = p.norm_sqr();
            Ok((guarded_ratio(num, r * r), guarded_ratio(num, r * r_lagged)))
        })
        .collect::<Result<_>>()?;

    let (old, new) = values.into_iter().unzip();
    HistogramResult::from_values(old, new)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Flag {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Flag {
    fn new(name: &str, passed: bool, detail: String) -> Self {
        Flag {
            name: name.to_string(),
            passed,
            detail,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSummary {
    pub scenario: String,
    pub config: Vec<(String, String)>,
    pub flags: Vec<Flag>,
    pub statistics: Vec<(String, f64)>,
}

impl ExperimentSummary {
    pub fn passed(&self) -> bool {
        self.flags.iter().all(|f| f.passed)
    }
}

pub fn config_echo(cfg: &OfdmConfig) -> Vec<(String, String)> {
    let mut out = vec![
        ("fft_size".to_string(), cfg.fft_size.to_string()),
        ("half_len".to_string(), cfg.half_len().to_string()),
        ("cp_len".to_string(), cfg.cp_len.to_string()),
        (
            "num_data_symbols".to_string(),
            cfg.num_data_symbols.to_string(),
        ),
        ("lead_noise_len".to_string(), cfg.lead_noise_len.to_string()),
        ("tail_noise_len".to_string(), cfg.tail_noise_len.to_string()),
        (
            "preamble_has_cp".to_string(),
            cfg.preamble_has_cp.to_string(),
        ),
    ];
    out.push(("es_n0_db".to_string(), cfg.es_over_n0_db().to_string()));
    out.push(("eb_n0_db".to_string(), cfg.eb_over_n0_db().to_string()));
    out.push(("base_seed".to_string(), cfg.base_seed.to_string()));
    out
}

/// Flags: the modified metric stays bounded, it has no spurious peaks, and
/// its accepted peak falls in `[expected - N_CP, expected + D]`. Landing
/// inside the cyclic prefix still yields an interference-free symbol window.
pub fn summarize_trace(
    scenario: &str,
    cfg: &OfdmConfig,
    result: &TraceResult,
) -> ExperimentSummary {
    let bounded = result
        .m_new
        .iter()
        .all(|&v| (0.0..=1.0 + BOUND_SLACK).contains(&v));
    let max_new = result.m_new.iter().copied().fold(0.0, f64::max);

    let lo = result.expected_peak_index.saturating_sub(cfg.cp_len);
    let hi = result.expected_peak_index + result.channel_duration;
    let located = matches!(result.detection.accepted, Some((n, _)) if (lo..=hi).contains(&n));
    let accepted_detail = match result.detection.accepted {
        Some((n, v)) => format!("accepted index {n} (value {v:.6}), expected [{lo}, {hi}]"),
        None => format!("no peak at or above {}", result.detection.threshold),
    };

    let peak_old = result.m_old_at(result.expected_peak_index).unwrap_or(0.0);
    let peak_new = result.m_new_at(result.expected_peak_index).unwrap_or(0.0);
    let post_old = result.post_burst_max_old();

    ExperimentSummary {
        scenario: scenario.to_string(),
        config: config_echo(cfg),
        flags: vec![
            Flag::new(
                "modified_bounded",
                bounded,
                format!("max m_new = {max_new:.12}"),
            ),
            Flag::new(
                "modified_no_spurious",
                result.spurious_peaks_new.is_empty(),
                format!("{} spurious peaks", result.spurious_peaks_new.len()),
            ),
            Flag::new("peak_located", located, accepted_detail),
        ],
        statistics: vec![
            ("m_old_at_expected_peak".into(), peak_old),
            ("m_new_at_expected_peak".into(), peak_new),
            ("m_new_max".into(), max_new),
            ("m_old_post_burst_max".into(), post_old),
            (
                "m_old_post_burst_ratio".into(),
                guarded_ratio(post_old, peak_old),
            ),
            (
                "spurious_peaks_old".into(),
                result.spurious_peaks_old.len() as f64,
            ),
            (
                "spurious_peaks_new".into(),
                result.spurious_peaks_new.len() as f64,
            ),
        ],
    }
}

/// Flags: the means agree within `MEAN_TOLERANCE`, the modified variance is
/// at most `VARIANCE_RATIO_LIMIT` of the classic one, and there are at least
/// two trials.
pub fn summarize_histogram(
    scenario: &str,
    cfg: &OfdmConfig,
    result: &HistogramResult,
) -> ExperimentSummary {
    let mean_gap = (result.mean_new - result.mean_old).abs();
    let ratio = result.variance_ratio();
    ExperimentSummary {
        scenario: scenario.to_string(),
        config: config_echo(cfg),
        flags: vec![
            Flag::new(
                "means_agree",
                mean_gap <= MEAN_TOLERANCE,
                format!("|mean_new - mean_old| = {mean_gap:.6} (limit {MEAN_TOLERANCE})"),
            ),
            Flag::new(
                "variance_reduced",
                ratio <= VARIANCE_RATIO_LIMIT,
                format!("var_new / var_old = {ratio:.6} (limit {VARIANCE_RATIO_LIMIT})"),
            ),
            Flag::new(
                "sample_size",
                !result.degenerate,
                format!("{} trials", result.trials),
            ),
        ],
        statistics: vec![
            ("trials".into(), result.trials as f64),
            ("mean_old".into(), result.mean_old),
            ("mean_new".into(), result.mean_new),
            ("var_old".into(), result.var_old),
            ("var_new".into(), result.var_new),
            ("variance_ratio".into(), ratio),
        ],
    }
}
