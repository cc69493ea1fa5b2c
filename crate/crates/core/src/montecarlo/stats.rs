use std::collections::BTreeMap;

use serde::Serialize;

/// Streaming mean and variance (Welford).
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Moments {
    count: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Unbiased sample variance; zero with fewer than two samples.
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            self.m2 / (self.count - 1) as f64
        }
    }

    pub fn standard_error(&self) -> f64 {
        if self.count == 0 {
            0.0
        } else {
            (self.variance() / self.count as f64).sqrt()
        }
    }

    /// `(mean - expected) / standard_error`; infinite if the estimate is
    /// exactly degenerate but off target.
    pub fn z_score(&self, expected: f64) -> f64 {
        let se = self.standard_error();
        let diff = self.mean - expected;
        if se == 0.0 {
            if diff == 0.0 {
                0.0
            } else {
                f64::INFINITY.copysign(diff)
            }
        } else {
            diff / se
        }
    }
}

impl FromIterator<f64> for Moments {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut m = Moments::default();
        for x in iter {
            m.push(x);
        }
        m
    }
}

/// Per-bin averages for one protocol.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BinnedResult {
    /// Localization count (or period) the samples were grouped by.
    pub key: f64,
    pub mean_sq_error: f64,
    pub mean_abs_error: f64,
    pub sample_count: u64,
    /// Standard error of `mean_sq_error`.
    pub standard_error: f64,
    /// Standard error of `mean_abs_error`.
    pub abs_standard_error: f64,
}

/// Groups `(key, sq_error, abs_error)` samples by key. Only keys that occur
/// produce a bin.
pub fn bin_by_key<I>(samples: I) -> Vec<BinnedResult>
where
    I: IntoIterator<Item = (u64, f64, f64)>,
{
    let mut bins: BTreeMap<u64, (Moments, Moments)> = BTreeMap::new();
    for (key, sq, abs) in samples {
        let entry = bins.entry(key).or_default();
        entry.0.push(sq);
        entry.1.push(abs);
    }
    bins.into_iter()
        .map(|(key, (sq, abs))| BinnedResult {
            key: key as f64,
            mean_sq_error: sq.mean(),
            mean_abs_error: abs.mean(),
            sample_count: sq.count(),
            standard_error: sq.standard_error(),
            abs_standard_error: abs.standard_error(),
        })
        .collect()
}
