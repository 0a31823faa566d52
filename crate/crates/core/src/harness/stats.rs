use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// A point estimate with a one-σ interval around it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub mean: f64,
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn exact(value: f64) -> Self {
        Self {
            mean: value,
            lo: value,
            hi: value,
        }
    }

    pub fn symmetric(mean: f64, sigma: f64) -> Self {
        Self {
            mean,
            lo: mean - sigma,
            hi: mean + sigma,
        }
    }

    pub fn half_width(&self) -> f64 {
        0.5 * (self.hi - self.lo)
    }
}

/// Percentile bootstrap of the win rate: 16th and 84th percentiles of the
/// resampled means, widened if needed so the interval holds the sample mean.
pub fn bootstrap_ci<R: Rng + ?Sized>(records: &[bool], n_resamples: usize, rng: &mut R) -> Result<Interval> {
    if records.is_empty() {
        return Err(Error::Domain("bootstrap of an empty record".into()));
    }
    if n_resamples < 100 {
        return Err(Error::Domain(format!("need at least 100 resamples, got {n_resamples}")));
    }
    let n = records.len();
    let wins = records.iter().filter(|&&w| w).count();
    let mean = wins as f64 / n as f64;
    if wins == 0 || wins == n {
        return Ok(Interval::exact(mean));
    }
    let mut means: Vec<f64> = (0..n_resamples)
        .map(|_| {
            let k = (0..n).filter(|_| records[rng.gen_range(0..n)]).count();
            k as f64 / n as f64
        })
        .collect();
    means.sort_by(f64::total_cmp);
    let pick = |q: f64| means[((q * (n_resamples - 1) as f64).round() as usize).min(n_resamples - 1)];
    Ok(Interval {
        mean,
        lo: pick(0.16).min(mean),
        hi: pick(0.84).max(mean),
    })
}
