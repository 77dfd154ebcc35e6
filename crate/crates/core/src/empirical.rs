//! Empirical characteristic functions of observed severities and empirical
//! PGFs of observed per-period claim counts.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cf::{CharFn, Moments};
use crate::error::{Error, Result};
use crate::parametric::{complex_powu, FrequencyModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SampleKind {
    Severity,
    Frequency,
}

/// Validated, immutable vector of observations.
#[derive(Debug, Clone, PartialEq)]
pub struct ClaimSample {
    values: Arc<[f64]>,
    kind: SampleKind,
}

impl ClaimSample {
    pub fn new(values: Vec<f64>, kind: SampleKind) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Validation("sample is empty".into()));
        }
        for (i, &v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::Validation(format!("value {i} is not finite ({v})")));
            }
            if v < 0.0 {
                return Err(Error::Validation(format!("value {i} is negative ({v})")));
            }
            if kind == SampleKind::Frequency && v.fract() != 0.0 {
                return Err(Error::Validation(format!(
                    "count {i} is not an integer ({v})"
                )));
            }
        }
        Ok(ClaimSample {
            values: values.into(),
            kind,
        })
    }

    pub fn severities(values: Vec<f64>) -> Result<Self> {
        Self::new(values, SampleKind::Severity)
    }

    pub fn counts(values: Vec<f64>) -> Result<Self> {
        Self::new(values, SampleKind::Frequency)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn kind(&self) -> SampleKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn summary(&self) -> SampleSummary {
        SampleSummary::of(&self.values)
    }
}

/// Descriptive statistics. Variance, skewness and kurtosis are the plain
/// moment ratios of the empirical distribution (divisor `n`), except `sd`
/// which uses the `n - 1` divisor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleSummary {
    pub count: usize,
    pub mean: f64,
    pub sd: f64,
    pub skewness: f64,
    pub kurtosis: f64,
    pub min: f64,
    pub max: f64,
}

impl SampleSummary {
    pub fn of(values: &[f64]) -> Self {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
        for &v in values {
            let d = v - mean;
            let d2 = d * d;
            m2 += d2;
            m3 += d2 * d;
            m4 += d2 * d2;
        }
        m2 /= n;
        m3 /= n;
        m4 /= n;
        let sd = if values.len() > 1 {
            (m2 * n / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        SampleSummary {
            count: values.len(),
            mean,
            sd,
            skewness: m3 / m2.powf(1.5),
            kurtosis: m4 / (m2 * m2),
            min: values.iter().copied().fold(f64::INFINITY, f64::min),
            max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        }
    }
}

/// Moments of the empirical distribution (variance with divisor `n`).
pub(crate) fn empirical_moments(values: &[f64]) -> Moments {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    Moments::new(mean, var)
}

/// `t -> (1/K) Σ e^{i t x_k}` over the severity sample.
pub fn empirical_cf(sample: &ClaimSample) -> Result<CharFn> {
    empirical_cf_with(sample, false)
}

/// As [`empirical_cf`]; with `collapse_duplicates` equal values are summed
/// once with their multiplicity.
pub fn empirical_cf_with(sample: &ClaimSample, collapse_duplicates: bool) -> Result<CharFn> {
    if sample.kind() != SampleKind::Severity {
        return Err(Error::invalid("empirical_cf expects a severity sample"));
    }
    let m = empirical_moments(sample.values());
    let k = sample.len() as f64;
    let cf = if collapse_duplicates {
        let mut groups: BTreeMap<u64, usize> = BTreeMap::new();
        for &v in sample.values() {
            *groups.entry((v + 0.0).to_bits()).or_default() += 1;
        }
        let points: Vec<(f64, f64)> = groups
            .into_iter()
            .map(|(bits, n)| (f64::from_bits(bits), n as f64))
            .collect();
        CharFn::new(move |t| {
            let s: Complex64 = points.iter().map(|&(x, w)| Complex64::cis(t * x) * w).sum();
            s / k
        })
    } else {
        let values = sample.values.clone();
        CharFn::new(move |t| {
            let s: Complex64 = values.iter().map(|&x| Complex64::cis(t * x)).sum();
            s / k
        })
    };
    Ok(cf.with_moments(m.mean, m.variance))
}

/// Observed claim counts per period, grouped by distinct value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalCounts {
    periods: usize,
    /// (count, multiplicity), ascending by count.
    groups: Vec<(u64, usize)>,
}

impl EmpiricalCounts {
    pub fn from_sample(sample: &ClaimSample) -> Result<Self> {
        if sample.kind() != SampleKind::Frequency {
            return Err(Error::invalid("empirical_pgf expects a frequency sample"));
        }
        let mut groups: BTreeMap<u64, usize> = BTreeMap::new();
        for &v in sample.values() {
            if v < 0.0 || v.fract() != 0.0 || v > u64::MAX as f64 {
                return Err(Error::invalid(format!(
                    "claim count {v} is not a nonnegative integer"
                )));
            }
            *groups.entry(v as u64).or_default() += 1;
        }
        Ok(EmpiricalCounts {
            periods: sample.len(),
            groups: groups.into_iter().collect(),
        })
    }

    pub fn periods(&self) -> usize {
        self.periods
    }

    pub(crate) fn groups(&self) -> &[(u64, usize)] {
        &self.groups
    }

    /// `(1/J) Σ z^{n_j}`.
    pub fn pgf(&self, z: Complex64) -> Complex64 {
        let s: Complex64 = self
            .groups
            .iter()
            .map(|&(n, m)| complex_powu(z, n) * m as f64)
            .sum();
        s / self.periods as f64
    }

    pub fn moments(&self) -> Moments {
        let j = self.periods as f64;
        let mean = self
            .groups
            .iter()
            .map(|&(n, m)| n as f64 * m as f64)
            .sum::<f64>()
            / j;
        let var = self
            .groups
            .iter()
            .map(|&(n, m)| (n as f64 - mean).powi(2) * m as f64)
            .sum::<f64>()
            / j;
        Moments::new(mean, var)
    }
}

/// Frequency model whose PGF is the empirical average of `z^{n_j}`.
pub fn empirical_pgf(sample: &ClaimSample) -> Result<FrequencyModel> {
    Ok(FrequencyModel::empirical(EmpiricalCounts::from_sample(
        sample,
    )?))
}
