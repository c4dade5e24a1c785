//! Transmit-side burst construction.
//!
//! A burst is laid out as
//!
//! ```text
//! [lead zeros] [preamble 1] [CP | preamble 2] [CP | data 1] ... [CP | data K] [tail zeros]
//! ```
//!
//! Preamble 1 carries pseudo-random QPSK on even subcarriers only, so its
//! time-domain halves are identical. Preamble 2 is a full-band QPSK symbol and
//! only fills out the two-symbol preamble layout.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use rand::{Rng, RngCore};

use crate::channel::{NoiseSpec, SampleStream, SnrConvention};
use crate::error::{Error, Result};
use crate::fft;
use crate::rng::generator;

/// Scenario parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct OfdmConfig {
    /// FFT size `N`, a power of two.
    pub fft_size: usize,
    pub cp_len: usize,
    pub num_data_symbols: usize,
    pub lead_noise_len: usize,
    pub tail_noise_len: usize,
    /// Prepend a cyclic prefix to the first preamble symbol. Off by default,
    /// which removes the plateau from the timing metric.
    pub preamble_has_cp: bool,
    pub snr: Snr,
    /// Seeds the preamble and data content.
    pub base_seed: u64,
}

/// Noise level together with the convention it is quoted in.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Snr {
    pub convention: SnrConvention,
    pub level_db: f64,
}

impl Snr {
    pub fn eb_n0_db(level_db: f64) -> Self {
        Snr {
            convention: SnrConvention::EbN0Qpsk,
            level_db,
        }
    }

    pub fn es_n0_db(level_db: f64) -> Self {
        Snr {
            convention: SnrConvention::EsN0,
            level_db,
        }
    }
}

impl Default for OfdmConfig {
    fn default() -> Self {
        OfdmConfig {
            fft_size: 128,
            cp_len: 32,
            num_data_symbols: 16,
            lead_noise_len: 512,
            tail_noise_len: 512,
            preamble_has_cp: false,
            snr: Snr::eb_n0_db(10.0),
            base_seed: 1,
        }
    }
}

impl OfdmConfig {
    /// `L = N/2`.
    pub fn half_len(&self) -> usize {
        self.fft_size / 2
    }

    pub fn validate(&self) -> Result<()> {
        if self.fft_size < 2 || !self.fft_size.is_power_of_two() {
            return Err(Error::InvalidConfig(format!(
                "fft_size {} must be a power of two and at least 2",
                self.fft_size
            )));
        }
        if self.cp_len >= self.fft_size {
            return Err(Error::InvalidConfig(format!(
                "cp_len {} must be smaller than fft_size {}",
                self.cp_len, self.fft_size
            )));
        }
        if !self.snr.level_db.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "SNR {} dB is not finite",
                self.snr.level_db
            )));
        }
        Ok(())
    }

    pub fn noise_spec(&self) -> NoiseSpec {
        NoiseSpec::new(self.snr.convention, self.snr.level_db)
    }

    /// Es/N0 in dB regardless of the configured convention.
    pub fn es_over_n0_db(&self) -> f64 {
        match self.snr.convention {
            SnrConvention::EsN0 => self.snr.level_db,
            SnrConvention::EbN0Qpsk => self.snr.level_db + 10.0 * 2f64.log10(),
        }
    }

    /// Eb/N0 in dB assuming two bits per QPSK symbol.
    pub fn eb_over_n0_db(&self) -> f64 {
        match self.snr.convention {
            SnrConvention::EbN0Qpsk => self.snr.level_db,
            SnrConvention::EsN0 => self.snr.level_db - 10.0 * 2f64.log10(),
        }
    }

    fn preamble_len(&self) -> usize {
        self.fft_size + if self.preamble_has_cp { self.cp_len } else { 0 }
    }

    /// Total stream length for this layout.
    pub fn stream_len(&self) -> usize {
        let symbol = self.fft_size + self.cp_len;
        self.lead_noise_len
            + self.preamble_len()
            + symbol * (1 + self.num_data_symbols)
            + self.tail_noise_len
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyDomainSymbol {
    pub bins: Vec<Complex64>,
}

impl FrequencyDomainSymbol {
    pub fn new(bins: Vec<Complex64>) -> Self {
        FrequencyDomainSymbol { bins }
    }

    pub fn len(&self) -> usize {
        self.bins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bins.is_empty()
    }

    pub fn energy(&self) -> f64 {
        self.bins.iter().map(|b| b.norm_sqr()).sum()
    }
}

/// Time-domain symbol, optionally carrying a cyclic prefix in front of the
/// `N`-sample body.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeDomainSymbol {
    samples: Vec<Complex64>,
    cp_len: usize,
}

impl TimeDomainSymbol {
    fn without_cp(body: Vec<Complex64>) -> Self {
        TimeDomainSymbol {
            samples: body,
            cp_len: 0,
        }
    }

    fn with_cp(body: Vec<Complex64>, cp_len: usize) -> Self {
        debug_assert!(cp_len < body.len());
        let mut samples = Vec::with_capacity(body.len() + cp_len);
        samples.extend_from_slice(&body[body.len() - cp_len..]);
        samples.extend_from_slice(&body);
        TimeDomainSymbol { samples, cp_len }
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<Complex64> {
        self.samples
    }

    pub fn has_cp(&self) -> bool {
        self.cp_len > 0
    }

    pub fn cp_len(&self) -> usize {
        self.cp_len
    }

    /// The `N`-sample body after the prefix.
    pub fn body(&self) -> &[Complex64] {
        &self.samples[self.cp_len..]
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

/// A transmitted burst together with its ground truth.
#[derive(Debug, Clone, PartialEq)]
pub struct BurstDescriptor {
    pub stream: SampleStream,
    /// First sample of the first preamble symbol.
    pub true_sof_index: usize,
    /// Causal index at which the modified metric peaks.
    pub expected_peak_index: usize,
    /// One past the last sample of the last data symbol.
    pub burst_end_index: usize,
    pub half_len: usize,
}

/// Gray-coded QPSK: bit pair `(b0, b1)` maps to `((1-2b0) + j(1-2b1)) / √2`.
pub fn qpsk_map(bits: &[u8]) -> Result<Vec<Complex64>> {
    if !bits.len().is_multiple_of(2) {
        return Err(Error::OddBitCount(bits.len()));
    }
    if let Some(&bad) = bits.iter().find(|&&b| b > 1) {
        return Err(Error::InvalidBit(bad));
    }
    Ok(bits
        .chunks_exact(2)
        .map(|pair| qpsk_point(pair[0] == 1, pair[1] == 1))
        .collect())
}

fn qpsk_point(b0: bool, b1: bool) -> Complex64 {
    let re = if b0 { -FRAC_1_SQRT_2 } else { FRAC_1_SQRT_2 };
    let im = if b1 { -FRAC_1_SQRT_2 } else { FRAC_1_SQRT_2 };
    Complex64::new(re, im)
}

fn random_qpsk<R: Rng>(rng: &mut R, count: usize) -> Vec<Complex64> {
    (0..count)
        .map(|_| qpsk_point(rng.random(), rng.random()))
        .collect()
}

/// Unitary inverse DFT of a frequency-domain symbol; no prefix is added.
pub fn inverse_transform(symbol: &FrequencyDomainSymbol) -> Result<TimeDomainSymbol> {
    Ok(TimeDomainSymbol::without_cp(fft::inverse(&symbol.bins)?))
}

/// Frequency-domain content of the repeating preamble symbol: QPSK scaled by
/// √2 on even bins, zero on odd bins.
pub fn preamble_bins(cfg: &OfdmConfig, seed: u64) -> FrequencyDomainSymbol {
    let mut rng = generator(seed);
    let active = random_qpsk(&mut rng, cfg.half_len());
    let mut bins = vec![Complex64::default(); cfg.fft_size];
    for (k, x) in active.into_iter().enumerate() {
        bins[2 * k] = x * std::f64::consts::SQRT_2;
    }
    FrequencyDomainSymbol::new(bins)
}

/// Repeating-half preamble symbol.
///
/// With only even bins active, the `N`-point inverse transform equals the
/// `L`-point inverse transform of the even bins, scaled by `1/√2` and tiled
/// twice. Building it that way makes the repetition exact in floating point.
pub fn build_preamble_symbol(cfg: &OfdmConfig, seed: u64) -> Result<TimeDomainSymbol> {
    cfg.validate()?;
    let bins = preamble_bins(cfg, seed);
    let even: Vec<Complex64> = bins.bins.iter().step_by(2).copied().collect();
    let half: Vec<Complex64> = fft::inverse(&even)?
        .into_iter()
        .map(|x| x * FRAC_1_SQRT_2)
        .collect();
    let mut body = Vec::with_capacity(cfg.fft_size);
    body.extend_from_slice(&half);
    body.extend_from_slice(&half);
    Ok(if cfg.preamble_has_cp {
        TimeDomainSymbol::with_cp(body, cfg.cp_len)
    } else {
        TimeDomainSymbol::without_cp(body)
    })
}

/// Inverse transform of `payload` with an `N_CP`-sample cyclic prefix.
pub fn build_data_symbol(cfg: &OfdmConfig, payload: &[Complex64]) -> Result<TimeDomainSymbol> {
    cfg.validate()?;
    if payload.len() != cfg.fft_size {
        return Err(Error::LengthMismatch {
            expected: cfg.fft_size,
            actual: payload.len(),
        });
    }
    let body = fft::inverse(payload)?;
    Ok(TimeDomainSymbol::with_cp(body, cfg.cp_len))
}

/// Noise-free burst laid out per `cfg`. Preamble and data content are drawn
/// from `cfg.base_seed`.
pub fn assemble_burst(cfg: &OfdmConfig) -> Result<BurstDescriptor> {
    cfg.validate()?;
    let mut rng = generator(cfg.base_seed);
    let mut samples = Vec::with_capacity(cfg.stream_len());

    samples.resize(cfg.lead_noise_len, Complex64::default());
    let true_sof_index = samples.len();

    let preamble = build_preamble_symbol(cfg, rng.next_u64())?;
    samples.extend_from_slice(preamble.samples());

    // second preamble symbol plus the data symbols, all full-band QPSK
    for _ in 0..=cfg.num_data_symbols {
        let payload = random_qpsk(&mut rng, cfg.fft_size);
        samples.extend(build_data_symbol(cfg, &payload)?.into_samples());
    }
    let burst_end_index = samples.len();
    samples.resize(burst_end_index + cfg.tail_noise_len, Complex64::default());
    debug_assert_eq!(samples.len(), cfg.stream_len());

    let cp_offset = if cfg.preamble_has_cp { cfg.cp_len } else { 0 };
    Ok(BurstDescriptor {
        stream: SampleStream::new(samples),
        true_sof_index,
        expected_peak_index: true_sof_index + cfg.fft_size + cp_offset,
        burst_end_index,
        half_len: cfg.half_len(),
    })
}
