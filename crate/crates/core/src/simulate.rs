//! Seeded Monte Carlo simulation of aggregate losses, used as an
//! independent check on the inversion results.
//!
//! Draw `i` uses its own ChaCha8 stream `(seed, i)`, so results do not depend
//! on how draws are scheduled across threads.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, Gamma, Poisson, StandardNormal};
use rayon::prelude::*;

use crate::empirical::{ClaimSample, SampleKind};
use crate::error::{Error, Result};
use crate::parametric::{FrequencyFamily, FrequencyModel, SeverityParams};

#[derive(Debug, Clone)]
pub enum FrequencySource {
    Model(FrequencyModel),
    /// Observed counts, resampled uniformly with replacement.
    Sample(ClaimSample),
}

#[derive(Debug, Clone)]
pub enum SeveritySource {
    Params(SeverityParams),
    /// Observed severities, resampled uniformly with replacement.
    Sample(ClaimSample),
}

#[derive(Debug, Clone)]
pub struct SimulationSpec {
    pub frequency: FrequencySource,
    pub severity: SeveritySource,
    pub n_sims: usize,
    pub seed: u64,
}

impl SimulationSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_sims == 0 {
            return Err(Error::invalid("number of simulations must be at least 1"));
        }
        match &self.frequency {
            FrequencySource::Sample(s) if s.kind() != SampleKind::Frequency => {
                return Err(Error::invalid("frequency sample must hold claim counts"));
            }
            FrequencySource::Model(m) => {
                if let FrequencyFamily::Dirac { mu } = m.family() {
                    if mu.fract() != 0.0 {
                        return Err(Error::invalid(format!(
                            "cannot simulate a fractional Dirac claim count {mu}"
                        )));
                    }
                }
            }
            _ => {}
        }
        match &self.severity {
            SeveritySource::Sample(s) if s.kind() != SampleKind::Severity => {
                Err(Error::invalid("severity sample must hold claim amounts"))
            }
            SeveritySource::Params(p) => p.validate(),
            _ => Ok(()),
        }
    }
}

/// `n_sims` draws of `S = X_1 + ... + X_N`, ordered by draw index.
pub fn simulate_aggregate(spec: &SimulationSpec) -> Result<Vec<f64>> {
    spec.validate()?;
    let out = (0..spec.n_sims)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
            rng.set_stream(i as u64);
            let n = draw_count(&spec.frequency, &mut rng);
            let mut s = 0.0;
            for _ in 0..n {
                s += draw_severity(&spec.severity, &mut rng);
            }
            s
        })
        .collect();
    Ok(out)
}

fn draw_count<R: Rng>(freq: &FrequencySource, rng: &mut R) -> u64 {
    match freq {
        FrequencySource::Sample(s) => pick(s.values(), rng) as u64,
        FrequencySource::Model(m) => match m.family() {
            FrequencyFamily::Dirac { mu } => *mu as u64,
            FrequencyFamily::Binomial { n, p } => Binomial::new(u64::from(*n), *p)
                .expect("validated binomial")
                .sample(rng),
            FrequencyFamily::Poisson { lambda } => poisson(*lambda, rng),
            FrequencyFamily::NegativeBinomial { r, p } => {
                // Poisson with a gamma-distributed mean
                let lambda = Gamma::new(*r, (1.0 - p) / p)
                    .expect("validated negative binomial")
                    .sample(rng);
                poisson(lambda, rng)
            }
            FrequencyFamily::EmpiricalCounts(c) => {
                let mut k = rng.random_range(0..c.periods());
                for &(n, m) in c.groups() {
                    if k < m {
                        return n;
                    }
                    k -= m;
                }
                unreachable!("group multiplicities sum to the number of periods")
            }
        },
    }
}

fn poisson<R: Rng>(lambda: f64, rng: &mut R) -> u64 {
    if lambda <= 0.0 {
        return 0;
    }
    let v: f64 = Poisson::new(lambda).expect("positive mean").sample(rng);
    v as u64
}

fn pick<R: Rng>(values: &[f64], rng: &mut R) -> f64 {
    values[rng.random_range(0..values.len())]
}

/// Uniform on `(0, 1]`, safe for `ln` and negative powers.
fn open_uniform<R: Rng>(rng: &mut R) -> f64 {
    1.0 - rng.random::<f64>()
}

fn draw_severity<R: Rng>(sev: &SeveritySource, rng: &mut R) -> f64 {
    let params = match sev {
        SeveritySource::Sample(s) => return pick(s.values(), rng),
        SeveritySource::Params(p) => *p,
    };
    match params {
        SeverityParams::Exponential { rate } => -open_uniform(rng).ln() / rate,
        SeverityParams::Gamma { shape, rate } => Gamma::new(shape, 1.0 / rate)
            .expect("validated gamma")
            .sample(rng),
        SeverityParams::LogNormal { mu, sigma } => {
            let z: f64 = StandardNormal.sample(rng);
            (mu + sigma * z).exp()
        }
        SeverityParams::LogLogistic { scale, shape } => {
            let u = open_uniform(rng);
            scale * ((1.0 - u) / u).powf(1.0 / shape)
        }
        SeverityParams::ParetoI { shape, scale } => {
            scale + scale * (open_uniform(rng).powf(-1.0 / shape) - 1.0)
        }
        SeverityParams::ParetoII { shape, scale } => {
            scale * (open_uniform(rng).powf(-1.0 / shape) - 1.0)
        }
        SeverityParams::Gpd { xi, sigma, theta } => {
            let u = open_uniform(rng);
            let y = if xi == 0.0 {
                -sigma * u.ln()
            } else {
                sigma * (-xi * u.ln()).exp_m1() / xi
            };
            theta + y
        }
    }
}

/// Largest gap between the empirical CDF of `sample` and `cdf` over the
/// sample points.
pub fn ks_distance<F>(sample: &[f64], cdf: F) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if sample.is_empty() {
        return Err(Error::invalid("KS distance needs a nonempty sample"));
    }
    if let Some(x) = sample.iter().find(|x| x.is_nan()) {
        return Err(Error::invalid(format!("sample contains {x}")));
    }
    let mut sorted = sample.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mut d: f64 = 0.0;
    let mut i = 0;
    while i < sorted.len() {
        let x = sorted[i];
        let mut j = i;
        while j < sorted.len() && sorted[j] == x {
            j += 1;
        }
        d = d.max((j as f64 / n - cdf(x)).abs());
        i = j;
    }
    Ok(d)
}
