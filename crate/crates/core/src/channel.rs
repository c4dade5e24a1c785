//! Multipath FIR channel and complex AWGN.

use num_complex::Complex64;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::frame::{assemble_burst, BurstDescriptor, OfdmConfig};
use crate::rng::generator;

/// Complex baseband samples, indexed from zero.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SampleStream {
    samples: Vec<Complex64>,
}

impl SampleStream {
    pub fn new(samples: Vec<Complex64>) -> Self {
        SampleStream { samples }
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn into_inner(self) -> Vec<Complex64> {
        self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn energy(&self) -> f64 {
        self.samples.iter().map(|x| x.norm_sqr()).sum()
    }
}

impl From<Vec<Complex64>> for SampleStream {
    fn from(samples: Vec<Complex64>) -> Self {
        SampleStream::new(samples)
    }
}

impl AsRef<[Complex64]> for SampleStream {
    fn as_ref(&self) -> &[Complex64] {
        &self.samples
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tap {
    /// Delay in samples, at least 1.
    pub delay: usize,
    pub gain: Complex64,
}

impl Tap {
    pub fn new(delay: usize, gain: Complex64) -> Self {
        Tap { delay, gain }
    }
}

/// FIR multipath channel `out[n] = Σ h_m · s[n - d_m]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelModel {
    taps: Vec<Tap>,
}

impl ChannelModel {
    /// Delays must be positive and strictly increasing.
    pub fn new(taps: Vec<Tap>) -> Result<Self> {
        if taps.is_empty() {
            return Err(Error::EmptyChannel);
        }
        let mut prev = 0;
        for tap in &taps {
            if tap.delay <= prev {
                return Err(Error::InvalidTap(format!(
                    "delay {} must be positive and greater than the previous delay {}",
                    tap.delay, prev
                )));
            }
            if !(tap.gain.re.is_finite() && tap.gain.im.is_finite()) {
                return Err(Error::InvalidTap(format!(
                    "gain {} is not finite",
                    tap.gain
                )));
            }
            prev = tap.delay;
        }
        Ok(ChannelModel { taps })
    }

    /// Single unit tap at delay 1.
    pub fn identity() -> Self {
        ChannelModel {
            taps: vec![Tap::new(1, Complex64::new(1.0, 0.0))],
        }
    }

    /// Two-tap test channel: `0.8` at delay 1 and `0.5·e^{jπ/4}` at delay
    /// `N/4`.
    pub fn two_tap_quarter_symbol(fft_size: usize) -> Result<Self> {
        ChannelModel::new(vec![
            Tap::new(1, Complex64::new(0.8, 0.0)),
            Tap::new(
                fft_size / 4,
                Complex64::from_polar(0.5, std::f64::consts::FRAC_PI_4),
            ),
        ])
    }

    pub fn taps(&self) -> &[Tap] {
        &self.taps
    }

    /// Channel duration `D`, the largest delay.
    pub fn duration(&self) -> usize {
        self.taps.last().map_or(0, |t| t.delay)
    }

    pub fn fits_cyclic_prefix(&self, cp_len: usize) -> bool {
        self.duration() < cp_len
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SnrConvention {
    /// Eb/N0 for QPSK, `Eb = Es / 2`.
    EbN0Qpsk,
    /// Energy per subcarrier over N0.
    EsN0,
}

/// Per-sample complex noise variance (total over both quadratures), derived
/// from an SNR under a stated convention with `Es = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    pub sigma_sq: f64,
    pub convention: SnrConvention,
    pub level_db: f64,
}

impl NoiseSpec {
    pub fn new(convention: SnrConvention, level_db: f64) -> Self {
        let es = 1.0;
        let scale = match convention {
            SnrConvention::EsN0 => es,
            SnrConvention::EbN0Qpsk => es / 2.0,
        };
        NoiseSpec {
            sigma_sq: 10f64.powf(-level_db / 10.0) * scale,
            convention,
            level_db,
        }
    }

    /// Noise with an explicit variance, quoted as Es/N0.
    pub fn from_variance(sigma_sq: f64) -> Self {
        NoiseSpec {
            sigma_sq,
            convention: SnrConvention::EsN0,
            level_db: -10.0 * sigma_sq.log10(),
        }
    }

    pub fn noiseless() -> Self {
        NoiseSpec::from_variance(0.0)
    }
}

/// FIR convolution truncated to the input length; samples before the stream
/// start are taken as zero.
pub fn apply_multipath(stream: &SampleStream, ch: &ChannelModel) -> SampleStream {
    let input = stream.as_slice();
    let mut out = vec![Complex64::default(); input.len()];
    for tap in ch.taps() {
        if tap.delay >= input.len() {
            continue;
        }
        for (o, s) in out[tap.delay..].iter_mut().zip(input) {
            *o += tap.gain * s;
        }
    }
    SampleStream::new(out)
}

/// Adds circularly-symmetric Gaussian noise of total variance `sigma_sq`.
pub fn add_awgn(stream: &SampleStream, noise: &NoiseSpec, seed: u64) -> Result<SampleStream> {
    if !(noise.sigma_sq.is_finite() && noise.sigma_sq >= 0.0) {
        return Err(Error::InvalidNoise(noise.sigma_sq));
    }
    if noise.sigma_sq == 0.0 {
        return Ok(stream.clone());
    }
    let sd = (noise.sigma_sq / 2.0).sqrt();
    let mut rng = generator(seed);
    let out = stream
        .as_slice()
        .iter()
        .map(|&x| {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            x + Complex64::new(re * sd, im * sd)
        })
        .collect();
    Ok(SampleStream::new(out))
}

/// Burst → optional multipath → AWGN over the whole timeline. Ground-truth
/// indices are passed through unchanged.
pub fn synthesize_scenario(
    cfg: &OfdmConfig,
    ch: Option<&ChannelModel>,
    noise: &NoiseSpec,
    trial_seed: u64,
) -> Result<BurstDescriptor> {
    let mut burst = assemble_burst(cfg)?;
    if let Some(ch) = ch {
        burst.stream = apply_multipath(&burst.stream, ch);
    }
    burst.stream = add_awgn(&burst.stream, noise, trial_seed)?;
    Ok(burst)
}
