//! Property checks run by the `selftest` command.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::channel::NoiseSpec;
use crate::detector::DetectorState;
use crate::error::Result;
use crate::experiment::{Flag, BOUND_SLACK};
use crate::frame::{assemble_burst, OfdmConfig};
use crate::metric::{
    lagged_energy, metric_classic, metric_delayed_r, metric_modified, sliding_correlation,
    sliding_energy, MetricTrace,
};
use crate::rng::{derive_seed, generator};
use crate::{run_trace, PeakSettings};

pub const BOUNDEDNESS_STREAMS: usize = 100_000;
pub const EQUIVALENCE_LEN: usize = 100_000;
pub const EQUIVALENCE_TOLERANCE: f64 = 1e-9;

/// `|a - b| <= tol · max(|a|, |b|)`.
pub fn relative_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StreamKind {
    NoiseOnly,
    SignalOnly,
    Onset,
    Offset,
}

impl StreamKind {
    pub const ALL: [StreamKind; 4] = [
        StreamKind::NoiseOnly,
        StreamKind::SignalOnly,
        StreamKind::Onset,
        StreamKind::Offset,
    ];
}

fn gaussian<R: Rng>(rng: &mut R, scale: f64) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re, im) * scale
}

/// Random test stream of `4L` samples.
///
/// Signal spans repeat with period `L` (a preamble-like pattern) plus a
/// little noise. Onset and offset streams switch between silence (or a weak
/// noise floor) and signal at a random point.
pub fn random_stream(kind: StreamKind, half_len: usize, seed: u64) -> Vec<Complex64> {
    let mut rng = generator(seed);
    let len = 4 * half_len;
    let amplitude = 10f64.powf(rng.random_range(-3.0..3.0));
    let floor = if rng.random_bool(0.5) {
        0.0
    } else {
        amplitude * 1e-3
    };
    let pattern: Vec<Complex64> = (0..half_len)
        .map(|_| gaussian(&mut rng, amplitude))
        .collect();
    let signal = |rng: &mut rand_chacha::ChaCha8Rng, n: usize| {
        pattern[n % half_len] + gaussian(rng, amplitude * 0.1)
    };
    let switch = rng.random_range(0..=len);
    (0..len)
        .map(|n| match kind {
            StreamKind::NoiseOnly => gaussian(&mut rng, amplitude),
            StreamKind::SignalOnly => signal(&mut rng, n),
            StreamKind::Onset if n < switch => gaussian(&mut rng, floor),
            StreamKind::Onset => signal(&mut rng, n),
            StreamKind::Offset if n < switch => signal(&mut rng, n),
            StreamKind::Offset => gaussian(&mut rng, floor),
        })
        .collect()
}

/// Every batch and streaming value of the modified metric lies in
/// `[0, 1 + BOUND_SLACK]` over `streams` random streams.
pub fn check_boundedness(streams: usize, base_seed: u64) -> Result<Flag> {
    let mut worst = 0.0f64;
    let mut violations = 0usize;
    for i in 0..streams {
        let seed = derive_seed(base_seed, i as u64);
        let kind = StreamKind::ALL[i % 4];
        let half_len = 1 + (seed % 8) as usize;
        let x = random_stream(kind, half_len, seed);

        let p = sliding_correlation(&x, half_len)?;
        let r = sliding_energy(&x, half_len)?;
        let rl = lagged_energy(&x, half_len)?;
        let batch = metric_modified(&p, &r, &rl)?;
        let mut det = DetectorState::new(half_len)?;
        let streamed = det.process(&x);

        for v in batch
            .into_iter()
            .chain(streamed.into_iter().map(|(_, v)| v))
        {
            worst = worst.max(v);
            if !(0.0..=1.0 + BOUND_SLACK).contains(&v) {
                violations += 1;
            }
        }
    }
    Ok(Flag {
        name: "boundedness".into(),
        passed: violations == 0,
        detail: format!("{streams} streams, max value {worst:.15}, {violations} violations"),
    })
}

/// Streaming output equals the batch metric shifted by `2L`.
pub fn check_equivalence(len: usize, half_len: usize, seed: u64) -> Result<Flag> {
    let mut rng = generator(seed);
    let x: Vec<Complex64> = (0..len).map(|_| gaussian(&mut rng, 1.0)).collect();
    let batch = MetricTrace::causal(&x, half_len)?;
    let mut det = DetectorState::new(half_len)?;
    let streamed = det.process(&x);

    let mut mismatches = 0usize;
    let mut worst = 0.0f64;
    for ((n, v), (idx, &expected)) in streamed.iter().zip(batch.indices().zip(&batch.m_new)) {
        let rel = (v - expected).abs() / v.abs().max(expected.abs()).max(f64::MIN_POSITIVE);
        worst = worst.max(rel);
        if *n != idx || !relative_close(*v, expected, EQUIVALENCE_TOLERANCE) {
            mismatches += 1;
        }
    }
    let passed = mismatches == 0 && streamed.len() == batch.len();
    Ok(Flag {
        name: "batch_stream_equivalence".into(),
        passed,
        detail: format!(
            "{len} samples, L = {half_len}, {} refreshes, worst relative error {worst:.3e}",
            det.refreshes()
        ),
    })
}

/// Noiseless burst: the modified metric peaks at exactly one, at the
/// expected index.
pub fn check_noiseless_attainment(cfg: &OfdmConfig) -> Result<Flag> {
    let r = run_trace(
        cfg,
        None,
        &NoiseSpec::noiseless(),
        0,
        &PeakSettings::default(),
    )?;
    let (idx, max) = r.m_new_argmax().unwrap_or((0, 0.0));
    Ok(Flag {
        name: "noiseless_attainment".into(),
        passed: idx == r.expected_peak_index && (max - 1.0).abs() <= 1e-12,
        detail: format!("max {max:.15} at {idx}, expected {}", r.expected_peak_index),
    })
}

/// `[2, 2, 1, 1]` with `L = 2` drives the classic metric to 4.
pub fn check_classic_unbounded() -> Result<Flag> {
    let x = [2.0, 2.0, 1.0, 1.0].map(|v| Complex64::new(v, 0.0));
    let p = sliding_correlation(&x, 2)?;
    let r = sliding_energy(&x, 2)?;
    let m = metric_classic(&p, &r)?;
    Ok(Flag {
        name: "classic_unbounded".into(),
        passed: m == [4.0],
        detail: format!("M = {:?}", m),
    })
}

/// On a signal onset out of a weak noise floor, the delayed-energy metric
/// exceeds one while the modified metric does not.
pub fn check_delayed_r_onset(cfg: &OfdmConfig) -> Result<Flag> {
    let burst = assemble_burst(cfg)?;
    let floor = NoiseSpec::from_variance(1e-4);
    let rx = crate::channel::add_awgn(&burst.stream, &floor, 5)?;
    let l = cfg.half_len();
    let p = sliding_correlation(rx.as_slice(), l)?;
    let rl = lagged_energy(rx.as_slice(), l)?;
    let r = sliding_energy(rx.as_slice(), l)?;
    let delayed = metric_delayed_r(&p, &rl)?;
    let modified = metric_modified(&p, &r, &rl)?;

    let onset = burst.true_sof_index;
    let near_onset = onset.saturating_sub(2 * l)..onset + 1;
    let spike = delayed[near_onset].iter().copied().fold(0.0, f64::max);
    let max_mod = modified.iter().copied().fold(0.0, f64::max);
    Ok(Flag {
        name: "delayed_r_onset".into(),
        passed: spike > 1.0 && max_mod <= 1.0 + BOUND_SLACK,
        detail: format!("delayed-R max near onset {spike:.3}, modified max {max_mod:.12}"),
    })
}

pub fn run_all() -> Result<Vec<Flag>> {
    let cfg = OfdmConfig::default();
    Ok(vec![
        check_boundedness(BOUNDEDNESS_STREAMS, 0x5e1f)?,
        check_equivalence(EQUIVALENCE_LEN, cfg.half_len(), 0xe9)?,
        check_noiseless_attainment(&cfg)?,
        check_classic_unbounded()?,
        check_delayed_r_onset(&cfg)?,
    ])
}
