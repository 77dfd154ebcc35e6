//! Composition of characteristic functions: independent weighted sums,
//! compounding a frequency with a severity, portfolios of independent
//! compound cells, mixtures, GPD tail splicing and Gaussian smoothing.

use num_complex::Complex64;

use crate::cf::{gaussian, CharFn, Moments};
use crate::empirical::{empirical_cf, ClaimSample, SampleKind};
use crate::error::{Error, Result};
use crate::gpd::GpdFit;
use crate::parametric::{make_severity_cf, FrequencyModel, SeverityParams};

/// Tolerance on the sum of mixture weights.
pub const WEIGHT_SUM_TOL: f64 = 1e-12;

/// CF of `S = X_1 + ... + X_N`: `t -> pgf_N(cf_X(t))`.
///
/// The result records `Pr(S = 0) = Pr(N = 0)` so inversion can treat the
/// atom at zero.
pub fn compound_cf(freq: &FrequencyModel, sev: &CharFn) -> CharFn {
    let moments = sev.moments().map(|x| {
        let n = freq.moments();
        Moments::new(
            n.mean * x.mean,
            n.mean * x.variance + n.variance * x.mean * x.mean,
        )
    });
    let atom = freq.prob_zero();
    let freq = freq.clone();
    let sev = sev.clone();
    CharFn::new(move |t| freq.pgf(sev.value(t)))
        .with_moment_hint(moments)
        .with_zero_atom(atom)
}

/// CF of `Σ c_j X_j` for independent `X_j`: `t -> Π cf_j(c_j t)`.
pub fn weighted_sum_cf(cfs: &[CharFn], coeffs: &[f64]) -> Result<CharFn> {
    if cfs.len() != coeffs.len() {
        return Err(Error::invalid(format!(
            "{} CFs but {} coefficients",
            cfs.len(),
            coeffs.len()
        )));
    }
    if cfs.is_empty() {
        return Err(Error::invalid("weighted sum needs at least one term"));
    }
    if let Some((i, c)) = coeffs
        .iter()
        .enumerate()
        .find(|(_, c)| !(c.is_finite() && **c > 0.0))
    {
        return Err(Error::invalid(format!(
            "coefficient {i} must be positive, got {c}"
        )));
    }
    let moments = cfs
        .iter()
        .zip(coeffs)
        .map(|(cf, &c)| cf.moments().map(|m| (c * m.mean, c * c * m.variance)))
        .collect::<Option<Vec<_>>>()
        .map(|v| {
            let (mean, var) = v.iter().fold((0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
            Moments::new(mean, var)
        });
    let terms: Vec<(CharFn, f64)> = cfs.iter().cloned().zip(coeffs.iter().copied()).collect();
    Ok(CharFn::new(move |t| {
        terms.iter().fold(Complex64::new(1.0, 0.0), |acc, (cf, c)| {
            acc * cf.value(c * t)
        })
    })
    .with_moment_hint(moments))
}

/// One independent cell of a portfolio.
#[derive(Debug, Clone)]
pub struct PortfolioCell {
    pub frequency: FrequencyModel,
    pub severity: CharFn,
}

#[derive(Debug, Clone)]
pub struct PortfolioSpec {
    cells: Vec<PortfolioCell>,
}

impl PortfolioSpec {
    pub fn new(cells: Vec<PortfolioCell>) -> Result<Self> {
        if cells.is_empty() {
            return Err(Error::invalid("portfolio needs at least one cell"));
        }
        Ok(PortfolioSpec { cells })
    }

    pub fn cells(&self) -> &[PortfolioCell] {
        &self.cells
    }
}

/// CF of the portfolio total: the product of the cell compound CFs.
pub fn portfolio_cf(spec: &PortfolioSpec) -> CharFn {
    let compounds: Vec<CharFn> = spec
        .cells
        .iter()
        .map(|c| compound_cf(&c.frequency, &c.severity))
        .collect();
    product_cf(compounds)
}

fn product_cf(parts: Vec<CharFn>) -> CharFn {
    let moments = parts
        .iter()
        .map(CharFn::moments)
        .collect::<Option<Vec<_>>>()
        .map(|ms| {
            Moments::new(
                ms.iter().map(|m| m.mean).sum(),
                ms.iter().map(|m| m.variance).sum(),
            )
        });
    let atom = parts
        .iter()
        .map(CharFn::zero_atom)
        .collect::<Option<Vec<_>>>()
        .map(|a| a.iter().product::<f64>());
    let cf = CharFn::new(move |t| {
        parts
            .iter()
            .fold(Complex64::new(1.0, 0.0), |acc, cf| acc * cf.value(t))
    })
    .with_moment_hint(moments);
    match atom {
        Some(a) => cf.with_zero_atom(a),
        None => cf,
    }
}

/// CF of the mixture `Σ w_j F_j`: `t -> Σ w_j cf_j(t)`.
pub fn mixture_cf(cfs: &[CharFn], weights: &[f64]) -> Result<CharFn> {
    if cfs.len() != weights.len() {
        return Err(Error::invalid(format!(
            "{} CFs but {} weights",
            cfs.len(),
            weights.len()
        )));
    }
    if cfs.is_empty() {
        return Err(Error::invalid("mixture needs at least one component"));
    }
    if let Some((i, w)) = weights
        .iter()
        .enumerate()
        .find(|(_, w)| !(w.is_finite() && **w >= 0.0))
    {
        return Err(Error::invalid(format!(
            "weight {i} must be nonnegative, got {w}"
        )));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > WEIGHT_SUM_TOL {
        return Err(Error::invalid(format!(
            "mixture weights sum to {total}, not 1"
        )));
    }
    let moments = cfs
        .iter()
        .zip(weights)
        .map(|(cf, &w)| cf.moments().map(|m| (w * m.mean, w * m.second_raw())))
        .collect::<Option<Vec<_>>>()
        .map(|v| {
            let (m1, m2) = v.iter().fold((0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
            Moments::from_raw(m1, m2)
        });
    let parts: Vec<(CharFn, f64)> = cfs
        .iter()
        .cloned()
        .zip(weights.iter().copied())
        .filter(|(_, w)| *w > 0.0)
        .collect();
    Ok(CharFn::new(move |t| {
        parts
            .iter()
            .map(|(cf, w)| cf.value(t) * *w)
            .sum::<Complex64>()
    })
    .with_moment_hint(moments))
}

/// Severity CF spliced from the empirical body and a fitted GPD tail:
/// `p · cf_emp(x ≤ θ) + (1 - p) · cf_GPD(ξ, σ, θ)`.
///
/// Observations equal to the threshold belong to the body.
pub fn tail_mixture_cf(sample: &ClaimSample, p: f64, fit: &GpdFit) -> Result<CharFn> {
    if sample.kind() != SampleKind::Severity {
        return Err(Error::invalid("tail mixture expects a severity sample"));
    }
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::invalid(format!(
            "tail split p must lie in (0, 1), got {p}"
        )));
    }
    let lower: Vec<f64> = sample
        .values()
        .iter()
        .copied()
        .filter(|&x| x <= fit.theta)
        .collect();
    if lower.is_empty() {
        return Err(Error::invalid(format!(
            "no observations at or below the threshold {}",
            fit.theta
        )));
    }
    let body = empirical_cf(&ClaimSample::severities(lower)?)?;
    let tail = make_severity_cf(SeverityParams::gpd(fit.xi, fit.sigma, fit.theta)?)?;
    mixture_cf(&[body, tail], &[p, 1.0 - p])
}

/// Convolution with a centred Gaussian of standard deviation `sigma`.
pub fn smooth_cf(cf: &CharFn, sigma: f64) -> Result<CharFn> {
    if !(sigma.is_finite() && sigma >= 0.0) {
        return Err(Error::invalid(format!(
            "smoothing sigma must be nonnegative, got {sigma}"
        )));
    }
    if sigma == 0.0 {
        return Ok(cf.clone());
    }
    let kernel = gaussian(0.0, sigma)?;
    let moments = cf
        .moments()
        .map(|m| Moments::new(m.mean, m.variance + sigma * sigma));
    let inner = cf.clone();
    Ok(CharFn::new(move |t| inner.value(t) * kernel.value(t)).with_moment_hint(moments))
}
