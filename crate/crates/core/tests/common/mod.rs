#![allow(dead_code)]

use cfloss::{
    compound_cf, dirac, empirical_cf, gaussian, make_frequency_model, make_severity_cf, mixture_cf,
    portfolio_cf, select_threshold, smooth_cf, tail_mixture_cf, weighted_sum_cf, CharFn,
    ClaimSample, FrequencyFamily, GpdFit, PortfolioCell, PortfolioSpec, SeverityParams,
};
use num_complex::Complex64;
use proptest::prelude::*;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn frequency_family() -> impl Strategy<Value = FrequencyFamily> {
    prop_oneof![
        (0u32..25).prop_map(|mu| FrequencyFamily::Dirac { mu: f64::from(mu) }),
        (1u32..60, 0.01..0.99f64).prop_map(|(n, p)| FrequencyFamily::Binomial { n, p }),
        (0.2..20.0f64, 0.05..0.95f64).prop_map(|(r, p)| FrequencyFamily::NegativeBinomial { r, p }),
        (0.05..60.0f64).prop_map(|lambda| FrequencyFamily::Poisson { lambda }),
    ]
}

pub fn severity_params() -> impl Strategy<Value = SeverityParams> {
    prop_oneof![
        (0.05..20.0f64).prop_map(|rate| SeverityParams::Exponential { rate }),
        (0.2..8.0f64, 0.1..5.0f64).prop_map(|(shape, rate)| SeverityParams::Gamma { shape, rate }),
        (-2.0..3.0f64, 0.1..2.0f64).prop_map(|(mu, sigma)| SeverityParams::LogNormal { mu, sigma }),
        (0.1..10.0f64, 0.5..6.0f64)
            .prop_map(|(scale, shape)| SeverityParams::LogLogistic { scale, shape }),
        (0.5..6.0f64, 0.1..10.0f64)
            .prop_map(|(shape, scale)| SeverityParams::ParetoI { shape, scale }),
        (0.5..6.0f64, 0.1..10.0f64)
            .prop_map(|(shape, scale)| SeverityParams::ParetoII { shape, scale }),
        (0.0..1.0f64, 0.1..10.0f64, 0.0..20.0f64)
            .prop_map(|(xi, sigma, theta)| SeverityParams::Gpd { xi, sigma, theta }),
    ]
}

pub fn sample_values() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0..200.0f64, 1..40)
}

/// Every way the library can build a CF, with parameters.
#[derive(Debug, Clone)]
pub enum Case {
    Gaussian(f64, f64),
    Dirac(f64),
    Frequency(FrequencyFamily),
    Severity(SeverityParams),
    Empirical(Vec<f64>),
    Compound(FrequencyFamily, SeverityParams),
    CompoundEmpirical(Vec<f64>, Vec<f64>),
    WeightedSum(Vec<(SeverityParams, f64)>),
    Portfolio(Vec<(FrequencyFamily, SeverityParams)>),
    Mixture(Vec<(SeverityParams, f64)>),
    TailMixture(Vec<f64>, f64, f64, f64),
    Smooth(SeverityParams, f64),
}

impl Case {
    pub fn build(&self) -> CharFn {
        match self {
            Case::Gaussian(m, s) => gaussian(*m, *s).unwrap(),
            Case::Dirac(x) => dirac(*x).unwrap(),
            Case::Frequency(f) => make_frequency_model(f.clone()).unwrap().cf(),
            Case::Severity(p) => make_severity_cf(*p).unwrap(),
            Case::Empirical(v) => {
                empirical_cf(&ClaimSample::severities(v.clone()).unwrap()).unwrap()
            }
            Case::Compound(f, p) => compound_cf(
                &make_frequency_model(f.clone()).unwrap(),
                &make_severity_cf(*p).unwrap(),
            ),
            Case::CompoundEmpirical(n, x) => {
                let freq = cfloss::empirical_pgf(&ClaimSample::counts(n.clone()).unwrap()).unwrap();
                let sev = empirical_cf(&ClaimSample::severities(x.clone()).unwrap()).unwrap();
                compound_cf(&freq, &sev)
            }
            Case::WeightedSum(parts) => {
                let cfs: Vec<CharFn> = parts
                    .iter()
                    .map(|(p, _)| make_severity_cf(*p).unwrap())
                    .collect();
                let coeffs: Vec<f64> = parts.iter().map(|(_, a)| *a).collect();
                weighted_sum_cf(&cfs, &coeffs).unwrap()
            }
            Case::Portfolio(cells) => portfolio_cf(
                &PortfolioSpec::new(
                    cells
                        .iter()
                        .map(|(f, p)| PortfolioCell {
                            frequency: make_frequency_model(f.clone()).unwrap(),
                            severity: make_severity_cf(*p).unwrap(),
                        })
                        .collect(),
                )
                .unwrap(),
            ),
            Case::Mixture(parts) => {
                let total: f64 = parts.iter().map(|(_, w)| w).sum();
                let cfs: Vec<CharFn> = parts
                    .iter()
                    .map(|(p, _)| make_severity_cf(*p).unwrap())
                    .collect();
                let mut weights: Vec<f64> = parts.iter().map(|(_, w)| w / total).collect();
                // make the weights sum to one exactly
                let head: f64 = weights[..weights.len() - 1].iter().sum();
                *weights.last_mut().unwrap() = 1.0 - head;
                mixture_cf(&cfs, &weights).unwrap()
            }
            Case::TailMixture(v, p, xi, sigma) => {
                let sample = ClaimSample::severities(v.clone()).unwrap();
                let theta = select_threshold(&sample, *p).unwrap();
                let fit = GpdFit {
                    xi: *xi,
                    sigma: *sigma,
                    theta,
                    p: *p,
                    n_excesses: 0,
                    log_lik: 0.0,
                };
                tail_mixture_cf(&sample, *p, &fit).unwrap()
            }
            Case::Smooth(p, s) => smooth_cf(&make_severity_cf(*p).unwrap(), *s).unwrap(),
        }
    }
}

pub fn any_case() -> impl Strategy<Value = Case> {
    prop_oneof![
        (-50.0..50.0f64, 0.01..20.0f64).prop_map(|(m, s)| Case::Gaussian(m, s)),
        (-100.0..100.0f64).prop_map(Case::Dirac),
        frequency_family().prop_map(Case::Frequency),
        severity_params().prop_map(Case::Severity),
        sample_values().prop_map(Case::Empirical),
        (frequency_family(), severity_params()).prop_map(|(f, p)| Case::Compound(f, p)),
        (
            prop::collection::vec((0u32..30).prop_map(f64::from), 1..12),
            sample_values()
        )
            .prop_map(|(n, x)| Case::CompoundEmpirical(n, x)),
        prop::collection::vec((severity_params(), 0.05..3.0f64), 1..4).prop_map(Case::WeightedSum),
        prop::collection::vec((frequency_family(), severity_params()), 1..4)
            .prop_map(Case::Portfolio),
        prop::collection::vec((severity_params(), 0.01..1.0f64), 1..4).prop_map(Case::Mixture),
        (
            prop::collection::vec(0.0..200.0f64, 2..40),
            0.5..0.99f64,
            0.0..0.9f64,
            0.1..10.0f64
        )
            .prop_map(|(v, p, xi, s)| Case::TailMixture(v, p, xi, s)),
        (severity_params(), 0.0..5.0f64).prop_map(|(p, s)| Case::Smooth(p, s)),
    ]
}

/// Normalization, Hermitian symmetry and the modulus bound at the given
/// arguments.
pub fn check_cf_invariants(cf: &CharFn, ts: &[f64]) -> Result<(), String> {
    let one = cf.eval(0.0).map_err(|e| e.to_string())?;
    if one != c(1.0, 0.0) {
        return Err(format!("cf(0) = {one}"));
    }
    for &t in ts {
        let a = cf.eval(t).map_err(|e| format!("t = {t}: {e}"))?;
        let b = cf.eval(-t).map_err(|e| format!("t = {}: {e}", -t))?;
        if (b - a.conj()).norm() > 1e-12 {
            return Err(format!("cf(-t) != conj cf(t) at t = {t}: {a} vs {b}"));
        }
        if a.norm() > 1.0 + 1e-10 {
            return Err(format!("|cf({t})| = {} exceeds 1", a.norm()));
        }
    }
    Ok(())
}

pub fn std_normal_cdf(x: f64) -> f64 {
    use statrs::distribution::{ContinuousCDF, Normal};
    Normal::new(0.0, 1.0).unwrap().cdf(x)
}

pub fn std_normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Standard normal CF with no moment hints, so every moment must be
/// recovered numerically.
pub fn bare_std_normal() -> CharFn {
    CharFn::new(|t| c((-0.5 * t * t).exp(), 0.0))
}

/// Distribution of a compound Poisson(lambda) sum of exponential(rate)
/// claims, by conditioning on the number of claims.
pub struct CompoundPoissonExp {
    pub lambda: f64,
    pub rate: f64,
}

impl CompoundPoissonExp {
    fn terms(&self) -> usize {
        (self.lambda + 40.0 * self.lambda.sqrt() + 40.0) as usize
    }

    pub fn cdf(&self, x: f64) -> f64 {
        use statrs::distribution::{ContinuousCDF, Discrete, Gamma, Poisson};
        if x < 0.0 {
            return 0.0;
        }
        let pois = Poisson::new(self.lambda).unwrap();
        let mut total = pois.pmf(0);
        for n in 1..self.terms() {
            total += pois.pmf(n as u64) * Gamma::new(n as f64, self.rate).unwrap().cdf(x);
        }
        total
    }

    /// Density of the continuous part, summed in log space so that large
    /// claim counts do not overflow.
    pub fn pdf(&self, x: f64) -> f64 {
        use statrs::function::gamma::ln_gamma;
        if x <= 0.0 {
            return 0.0;
        }
        let (ll, lr, lx) = (self.lambda.ln(), self.rate.ln(), x.ln());
        (1..self.terms())
            .map(|n| {
                let n = n as f64;
                (-self.lambda + n * ll - ln_gamma(n + 1.0) + n * lr + (n - 1.0) * lx
                    - self.rate * x
                    - ln_gamma(n))
                .exp()
            })
            .sum()
    }
}
