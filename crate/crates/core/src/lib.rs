//! OFDM start-of-frame timing detection.
//!
//! This crate builds Schmidl-Cox style bursts (a preamble symbol whose two
//! halves repeat, followed by cyclic-prefixed QPSK data symbols), passes them
//! through a multipath + AWGN channel, and computes three timing metrics over
//! the received samples:
//!
//! * the classic ratio `|P(n)|² / R(n)²`,
//! * the normalized ratio `|P(n)|² / (R(n) R(n-L))`, which is bounded by one
//!   for every input,
//! * the classic ratio with the energy term delayed by `L` samples.
//!
//! The normalized metric is also available as an O(1)-per-sample causal
//! detector ([`DetectorState`]) built from recursive accumulators.

pub mod channel;
pub mod detector;
pub mod error;
pub mod experiment;
pub mod fft;
pub mod frame;
pub mod metric;
pub mod peak;
pub mod rng;
pub mod selftest;

pub use channel::{
    add_awgn, apply_multipath, synthesize_scenario, ChannelModel, NoiseSpec, SampleStream,
    SnrConvention, Tap,
};
pub use detector::DetectorState;
pub use error::{Error, Result};
pub use experiment::{
    run_histogram, run_trace, summarize_histogram, summarize_trace, ExperimentSummary, Flag,
    HistogramResult, PeakSettings, TraceResult,
};
pub use frame::{
    assemble_burst, build_data_symbol, build_preamble_symbol, inverse_transform, qpsk_map,
    BurstDescriptor, FrequencyDomainSymbol, OfdmConfig, Snr, TimeDomainSymbol,
};
pub use metric::{
    lagged_energy, metric_classic, metric_delayed_r, metric_modified, sliding_correlation,
    sliding_energy, IndexConvention, MetricTrace,
};
pub use peak::{find_peak, PeakReport};

pub use num_complex::Complex64;
