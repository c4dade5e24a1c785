//! Sliding peak search with a threshold test.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct PeakReport {
    /// Local maxima at or above the threshold, in stream order. Indices are
    /// positions in the searched slice.
    pub candidates: Vec<(usize, f64)>,
    /// First candidate, if any.
    pub accepted: Option<(usize, f64)>,
    pub threshold: f64,
    pub search_window: usize,
}

impl PeakReport {
    /// Same report with every index shifted by `offset`.
    pub fn offset(mut self, offset: usize) -> Self {
        for c in &mut self.candidates {
            c.0 += offset;
        }
        if let Some(a) = &mut self.accepted {
            a.0 += offset;
        }
        self
    }
}

/// Index `i` is a candidate when `metric[i] >= threshold` and it dominates
/// every sample within `±window`: strictly greater than those before it and
/// no smaller than those after it, so ties resolve to the earliest index.
pub fn find_peak(metric: &[f64], threshold: f64, window: usize) -> Result<PeakReport> {
    if metric.is_empty() {
        return Err(Error::EmptyMetric);
    }
    if window == 0 {
        return Err(Error::InvalidPeakSearch("window must be at least 1".into()));
    }
    if !(threshold.is_finite() && threshold >= 0.0) {
        return Err(Error::InvalidPeakSearch(format!(
            "threshold {threshold} must be finite and non-negative"
        )));
    }

    let candidates: Vec<(usize, f64)> = metric
        .iter()
        .enumerate()
        .filter(|&(i, &v)| {
            if v < threshold {
                return false;
            }
            let lo = i.saturating_sub(window);
            let hi = (i + window).min(metric.len() - 1);
            metric[lo..i].iter().all(|&u| u < v) && metric[i + 1..=hi].iter().all(|&u| u <= v)
        })
        .map(|(i, &v)| (i, v))
        .collect();

    Ok(PeakReport {
        accepted: candidates.first().copied(),
        candidates,
        threshold,
        search_window: window,
    })
}
