//! Causal streaming form of the normalized metric.
//!
//! Three running sums over the last `2L` samples are updated per input: the
//! lag-`L` correlation and the energies of the older and newer halves. Each
//! push adds the entering term and subtracts the leaving one, so the cost per
//! sample is constant.
//!
//! Recursive sums accumulate rounding error. The state re-sums all three from
//! the ring buffer every `refresh_interval` samples, and also whenever a half
//! energy falls below `DECAY_RATIO` of the largest value that half has reached since
//! the last re-sum. The second rule covers signal-to-silence transitions,
//! where cancellation would otherwise leave residue in place of an exact zero.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::metric::guarded_ratio;

pub const DEFAULT_REFRESH_INTERVAL: u64 = 1 << 16;
const DECAY_RATIO: f64 = 1e-3;

#[derive(Debug, Clone)]
pub struct DetectorState {
    half_len: usize,
    /// Last `2L` samples; `head` is the oldest.
    buffer: Vec<Complex64>,
    head: usize,
    p_acc: Complex64,
    r_old_acc: f64,
    r_new_acc: f64,
    samples_seen: u64,
    since_refresh: u64,
    refresh_interval: u64,
    /// Largest value of each half energy since the last re-sum.
    peak_old: f64,
    peak_new: f64,
    refreshes: u64,
}

impl DetectorState {
    pub fn new(half_len: usize) -> Result<Self> {
        Self::with_refresh_interval(half_len, DEFAULT_REFRESH_INTERVAL)
    }

    pub fn with_refresh_interval(half_len: usize, refresh_interval: u64) -> Result<Self> {
        if half_len == 0 {
            return Err(Error::ZeroHalfLength);
        }
        Ok(DetectorState {
            half_len,
            buffer: vec![Complex64::default(); 2 * half_len],
            head: 0,
            p_acc: Complex64::default(),
            r_old_acc: 0.0,
            r_new_acc: 0.0,
            samples_seen: 0,
            since_refresh: 0,
            refresh_interval: refresh_interval.max(1),
            peak_old: 0.0,
            peak_new: 0.0,
            refreshes: 0,
        })
    }

    pub fn half_len(&self) -> usize {
        self.half_len
    }

    pub fn samples_seen(&self) -> u64 {
        self.samples_seen
    }

    /// Number of exact re-summations performed so far.
    pub fn refreshes(&self) -> u64 {
        self.refreshes
    }

    /// `(P, R_old, R_new)` as currently accumulated.
    pub fn accumulators(&self) -> (Complex64, f64, f64) {
        (self.p_acc, self.r_old_acc, self.r_new_acc)
    }

    /// Buffered window, oldest first. Zero-filled before `2L` pushes.
    pub fn window(&self) -> impl Iterator<Item = Complex64> + '_ {
        let len = self.buffer.len();
        (0..len).map(move |i| self.buffer[(self.head + i) % len])
    }

    /// Direct sums over the buffered window.
    pub fn exact_sums(&self) -> (Complex64, f64, f64) {
        let w: Vec<Complex64> = self.window().collect();
        let (old, new) = w.split_at(self.half_len);
        let p = old.iter().zip(new).map(|(a, b)| a.conj() * b).sum();
        let r_old = old.iter().map(|x| x.norm_sqr()).sum();
        let r_new = new.iter().map(|x| x.norm_sqr()).sum();
        (p, r_old, r_new)
    }

    fn refresh(&mut self) {
        let (p, r_old, r_new) = self.exact_sums();
        self.p_acc = p;
        self.r_old_acc = r_old;
        self.r_new_acc = r_new;
        self.peak_old = r_old;
        self.peak_new = r_new;
        self.since_refresh = 0;
        self.refreshes += 1;
    }

    /// Consumes one sample. Returns the metric for causal index
    /// `samples_seen()` once `2L` samples have been consumed.
    pub fn push(&mut self, sample: Complex64) -> Option<f64> {
        let len = self.buffer.len();
        let leaving = self.buffer[self.head];
        let crossing = self.buffer[(self.head + self.half_len) % len];

        self.p_acc += crossing.conj() * sample - leaving.conj() * crossing;
        self.r_old_acc += crossing.norm_sqr() - leaving.norm_sqr();
        self.r_new_acc += sample.norm_sqr() - crossing.norm_sqr();

        self.buffer[self.head] = sample;
        self.head = (self.head + 1) % len;
        self.samples_seen += 1;
        self.since_refresh += 1;

        self.peak_old = self.peak_old.max(self.r_old_acc);
        self.peak_new = self.peak_new.max(self.r_new_acc);
        if self.since_refresh >= self.refresh_interval
            || self.r_old_acc < DECAY_RATIO * self.peak_old
            || self.r_new_acc < DECAY_RATIO * self.peak_new
        {
            self.refresh();
        }

        if self.samples_seen < len as u64 {
            return None;
        }
        Some(guarded_ratio(
            self.p_acc.norm_sqr(),
            self.r_old_acc * self.r_new_acc,
        ))
    }

    /// Feeds a whole block, returning `(causal index, value)` pairs.
    pub fn process(&mut self, samples: &[Complex64]) -> Vec<(usize, f64)> {
        samples
            .iter()
            .filter_map(|&x| self.push(x).map(|v| (self.samples_seen as usize, v)))
            .collect()
    }
}
