//! Parametric frequency and severity families.
//!
//! Discrete frequencies are carried as probability generating functions so
//! they can be composed with a severity CF; their own CF is `pgf(e^{it})`.
//! Exponential and gamma severities have closed-form CFs. Log-normal,
//! log-logistic, Pareto and GPD severities are evaluated by integrating the
//! analytically continued density along a ray in the upper half plane.

use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::{Arc, LazyLock};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cf::{CharFn, Moments};
use crate::empirical::EmpiricalCounts;
use crate::error::{Error, Result};
use crate::quadrature::{cf_on_ray, ContourHint, HalfLineRule, DEFAULT_HALFLINE_NODES};

static DEFAULT_RULE: LazyLock<Arc<HalfLineRule>> =
    LazyLock::new(|| Arc::new(HalfLineRule::default()));

/// Discrete frequency family and its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum FrequencyFamily {
    /// Degenerate count `N = mu`.
    Dirac {
        mu: f64,
    },
    Binomial {
        n: u32,
        p: f64,
    },
    /// `p` is the success probability: `pgf(z) = p^r (1 - (1-p) z)^{-r}`.
    NegativeBinomial {
        r: f64,
        p: f64,
    },
    Poisson {
        lambda: f64,
    },
    EmpiricalCounts(EmpiricalCounts),
}

/// A validated frequency distribution exposing its PGF.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyModel {
    family: FrequencyFamily,
}

pub fn make_frequency_model(family: FrequencyFamily) -> Result<FrequencyModel> {
    match &family {
        FrequencyFamily::Dirac { mu } => {
            if !(mu.is_finite() && *mu >= 0.0) {
                return Err(Error::param("mu", *mu, "mu >= 0 for a claim count"));
            }
        }
        FrequencyFamily::Binomial { p, .. } => check_open_unit("p", *p)?,
        FrequencyFamily::NegativeBinomial { r, p } => {
            check_positive("r", *r)?;
            check_open_unit("p", *p)?;
        }
        FrequencyFamily::Poisson { lambda } => check_positive("lambda", *lambda)?,
        FrequencyFamily::EmpiricalCounts(_) => {}
    }
    Ok(FrequencyModel { family })
}

impl FrequencyModel {
    pub fn dirac(mu: f64) -> Result<Self> {
        make_frequency_model(FrequencyFamily::Dirac { mu })
    }

    pub fn binomial(n: u32, p: f64) -> Result<Self> {
        make_frequency_model(FrequencyFamily::Binomial { n, p })
    }

    pub fn negative_binomial(r: f64, p: f64) -> Result<Self> {
        make_frequency_model(FrequencyFamily::NegativeBinomial { r, p })
    }

    pub fn poisson(lambda: f64) -> Result<Self> {
        make_frequency_model(FrequencyFamily::Poisson { lambda })
    }

    pub(crate) fn empirical(counts: EmpiricalCounts) -> Self {
        FrequencyModel {
            family: FrequencyFamily::EmpiricalCounts(counts),
        }
    }

    pub fn family(&self) -> &FrequencyFamily {
        &self.family
    }

    /// `E[z^N]`, valid on the closed unit disk.
    pub fn pgf(&self, z: Complex64) -> Complex64 {
        match &self.family {
            FrequencyFamily::Dirac { mu } => {
                if mu.fract() == 0.0 && *mu <= u32::MAX as f64 {
                    complex_powu(z, *mu as u64)
                } else if z == Complex64::new(0.0, 0.0) {
                    Complex64::new(0.0, 0.0)
                } else {
                    (z.ln() * mu).exp()
                }
            }
            FrequencyFamily::Binomial { n, p } => {
                complex_powu(Complex64::new(1.0 - p, 0.0) + z * p, *n as u64)
            }
            FrequencyFamily::NegativeBinomial { r, p } => {
                let base = Complex64::new(1.0, 0.0) - z * (1.0 - p);
                (base.ln() * (-r)).exp() * p.powf(*r)
            }
            FrequencyFamily::Poisson { lambda } => ((z - 1.0) * lambda).exp(),
            FrequencyFamily::EmpiricalCounts(c) => c.pgf(z),
        }
    }

    /// `Pr(N = 0) = pgf(0)`.
    pub fn prob_zero(&self) -> f64 {
        match &self.family {
            FrequencyFamily::Dirac { mu } => {
                if *mu == 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            _ => self.pgf(Complex64::new(0.0, 0.0)).re,
        }
    }

    pub fn moments(&self) -> Moments {
        match &self.family {
            FrequencyFamily::Dirac { mu } => Moments::new(*mu, 0.0),
            FrequencyFamily::Binomial { n, p } => {
                let n = *n as f64;
                Moments::new(n * p, n * p * (1.0 - p))
            }
            FrequencyFamily::NegativeBinomial { r, p } => {
                Moments::new(r * (1.0 - p) / p, r * (1.0 - p) / (p * p))
            }
            FrequencyFamily::Poisson { lambda } => Moments::new(*lambda, *lambda),
            FrequencyFamily::EmpiricalCounts(c) => c.moments(),
        }
    }

    /// The induced characteristic function `t -> pgf(e^{it})`.
    pub fn cf(&self) -> CharFn {
        let model = self.clone();
        let m = self.moments();
        CharFn::new(move |t| model.pgf(Complex64::cis(t))).with_moments(m.mean, m.variance)
    }
}

/// `z^n` by repeated squaring.
pub(crate) fn complex_powu(mut z: Complex64, mut n: u64) -> Complex64 {
    let mut acc = Complex64::new(1.0, 0.0);
    while n > 0 {
        if n & 1 == 1 {
            acc *= z;
        }
        n >>= 1;
        if n > 0 {
            z *= z;
        }
    }
    acc
}

/// Continuous severity family and its parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum SeverityParams {
    Exponential {
        rate: f64,
    },
    /// Shape `alpha`, rate `beta`.
    Gamma {
        shape: f64,
        rate: f64,
    },
    LogNormal {
        mu: f64,
        sigma: f64,
    },
    /// Scale `alpha`, shape `beta`.
    LogLogistic {
        scale: f64,
        shape: f64,
    },
    /// European Pareto: `scale + Y` with `Y` Lomax(shape, scale).
    ParetoI {
        shape: f64,
        scale: f64,
    },
    /// American Pareto (Lomax).
    ParetoII {
        shape: f64,
        scale: f64,
    },
    /// Generalized Pareto with shape `xi >= 0`, scale `sigma`, threshold `theta`.
    Gpd {
        xi: f64,
        sigma: f64,
        theta: f64,
    },
}

impl SeverityParams {
    pub fn exponential(rate: f64) -> Result<Self> {
        Self::validated(SeverityParams::Exponential { rate })
    }

    pub fn gamma(shape: f64, rate: f64) -> Result<Self> {
        Self::validated(SeverityParams::Gamma { shape, rate })
    }

    pub fn lognormal(mu: f64, sigma: f64) -> Result<Self> {
        Self::validated(SeverityParams::LogNormal { mu, sigma })
    }

    pub fn loglogistic(scale: f64, shape: f64) -> Result<Self> {
        Self::validated(SeverityParams::LogLogistic { scale, shape })
    }

    pub fn pareto_i(shape: f64, scale: f64) -> Result<Self> {
        Self::validated(SeverityParams::ParetoI { shape, scale })
    }

    pub fn pareto_ii(shape: f64, scale: f64) -> Result<Self> {
        Self::validated(SeverityParams::ParetoII { shape, scale })
    }

    pub fn gpd(xi: f64, sigma: f64, theta: f64) -> Result<Self> {
        Self::validated(SeverityParams::Gpd { xi, sigma, theta })
    }

    fn validated(self) -> Result<Self> {
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            SeverityParams::Exponential { rate } => check_positive("lambda", rate),
            SeverityParams::Gamma { shape, rate } => {
                check_positive("alpha", shape)?;
                check_positive("beta", rate)
            }
            SeverityParams::LogNormal { mu, sigma } => {
                if !mu.is_finite() {
                    return Err(Error::param("mu", mu, "finite"));
                }
                check_positive("sigma", sigma)
            }
            SeverityParams::LogLogistic { scale, shape } => {
                check_positive("alpha", scale)?;
                check_positive("beta", shape)
            }
            SeverityParams::ParetoI { shape, scale }
            | SeverityParams::ParetoII { shape, scale } => {
                check_positive("alpha", shape)?;
                check_positive("sigma", scale)
            }
            SeverityParams::Gpd { xi, sigma, theta } => {
                if !(xi.is_finite() && xi >= 0.0) {
                    return Err(Error::param("xi", xi, "xi >= 0"));
                }
                check_positive("sigma", sigma)?;
                if !(theta.is_finite() && theta >= 0.0) {
                    return Err(Error::param("theta", theta, "theta >= 0"));
                }
                Ok(())
            }
        }
    }

    /// Location shift applied as `e^{it·shift}` on top of the density CF.
    fn shift(&self) -> f64 {
        match *self {
            SeverityParams::ParetoI { scale, .. } => scale,
            SeverityParams::Gpd { theta, .. } => theta,
            _ => 0.0,
        }
    }

    /// Density of the unshifted variable at a complex argument, principal
    /// branches throughout.
    pub fn density(&self, z: Complex64) -> Complex64 {
        match *self {
            SeverityParams::Exponential { rate } => (-z * rate).exp() * rate,
            SeverityParams::Gamma { shape, rate } => {
                let log = z.ln() * (shape - 1.0) - z * rate + (shape * rate.ln() - ln_gamma(shape));
                log.exp()
            }
            SeverityParams::LogNormal { mu, sigma } => {
                let l = z.ln() - mu;
                (-(l * l) / (2.0 * sigma * sigma)).exp() / (z * sigma * (2.0 * PI).sqrt())
            }
            SeverityParams::LogLogistic { scale, shape } => {
                let r = z / scale;
                let rb = (r.ln() * shape).exp();
                let one_plus = rb + 1.0;
                (rb / r) * (shape / scale) / (one_plus * one_plus)
            }
            SeverityParams::ParetoI { shape, scale }
            | SeverityParams::ParetoII { shape, scale } => {
                let base = z / scale + 1.0;
                (base.ln() * (-(shape + 1.0))).exp() * (shape / scale)
            }
            SeverityParams::Gpd { xi, sigma, .. } => {
                if xi == 0.0 {
                    (-z / sigma).exp() / sigma
                } else {
                    (ln_1p(z * (xi / sigma)) * (-(1.0 / xi + 1.0))).exp() / sigma
                }
            }
        }
    }

    /// Real density of the (shifted) variable.
    pub fn pdf(&self, x: f64) -> f64 {
        let y = x - self.shift();
        if y < 0.0 {
            return 0.0;
        }
        if y == 0.0 {
            return match *self {
                SeverityParams::Gamma { shape: 1.0, rate } => rate,
                SeverityParams::Gamma { shape, .. } if shape < 1.0 => f64::INFINITY,
                SeverityParams::Gamma { .. } | SeverityParams::LogNormal { .. } => 0.0,
                SeverityParams::LogLogistic { scale, shape } => {
                    if shape == 1.0 {
                        1.0 / scale
                    } else if shape < 1.0 {
                        f64::INFINITY
                    } else {
                        0.0
                    }
                }
                _ => self.density(Complex64::new(0.0, 0.0)).re,
            };
        }
        self.density(Complex64::new(y, 0.0)).re
    }

    /// Closed-form moments for the families whose CF is itself closed form.
    pub fn closed_form_moments(&self) -> Option<Moments> {
        match *self {
            SeverityParams::Exponential { rate } => {
                Some(Moments::new(1.0 / rate, 1.0 / (rate * rate)))
            }
            SeverityParams::Gamma { shape, rate } => {
                Some(Moments::new(shape / rate, shape / (rate * rate)))
            }
            _ => None,
        }
    }

    fn contour(&self) -> ContourHint {
        match *self {
            SeverityParams::Exponential { rate } => ContourHint {
                length: 1.0 / rate,
                max_angle: FRAC_PI_2,
            },
            SeverityParams::Gamma { rate, .. } => ContourHint {
                length: 1.0 / rate,
                max_angle: FRAC_PI_2,
            },
            SeverityParams::LogNormal { mu, sigma } => ContourHint {
                length: mu.exp(),
                max_angle: sigma.min(FRAC_PI_2),
            },
            SeverityParams::LogLogistic { scale, shape } => ContourHint {
                length: scale,
                // poles of the density sit at angle π/shape
                max_angle: (FRAC_PI_2 / shape).min(FRAC_PI_2),
            },
            SeverityParams::ParetoI { scale, .. } | SeverityParams::ParetoII { scale, .. } => {
                ContourHint {
                    length: scale,
                    max_angle: FRAC_PI_2,
                }
            }
            SeverityParams::Gpd { sigma, .. } => ContourHint {
                length: sigma,
                max_angle: FRAC_PI_2,
            },
        }
    }
}

/// Severity CF using the default 128-node half-line rule for the numeric
/// families.
pub fn make_severity_cf(params: SeverityParams) -> Result<CharFn> {
    make_severity_cf_with_rule(params, DEFAULT_RULE.clone())
}

/// Severity CF with an explicit node count for the numeric families.
pub fn make_severity_cf_with_nodes(params: SeverityParams, nodes: usize) -> Result<CharFn> {
    if nodes == DEFAULT_HALFLINE_NODES {
        return make_severity_cf(params);
    }
    make_severity_cf_with_rule(params, Arc::new(HalfLineRule::new(nodes)?))
}

fn make_severity_cf_with_rule(params: SeverityParams, rule: Arc<HalfLineRule>) -> Result<CharFn> {
    params.validate()?;
    let cf = match params {
        SeverityParams::Exponential { rate } => {
            CharFn::new(move |t| Complex64::new(rate, 0.0) / Complex64::new(rate, -t))
        }
        SeverityParams::Gamma { shape, rate } => CharFn::new(move |t| {
            let base = Complex64::new(1.0, -t / rate);
            (base.ln() * (-shape)).exp()
        }),
        _ => {
            let shift = params.shift();
            let hint = params.contour();
            CharFn::new(move |t| {
                let base = cf_on_ray(|z| params.density(z), t, hint, &rule)
                    .unwrap_or(Complex64::new(f64::NAN, f64::NAN));
                if shift != 0.0 {
                    base * Complex64::cis(t * shift)
                } else {
                    base
                }
            })
        }
    };
    Ok(cf.with_moment_hint(params.closed_form_moments()))
}

/// `ln(1 + w)` accurate for small `|w|`.
fn ln_1p(w: Complex64) -> Complex64 {
    if w.norm() < 1e-4 {
        // w - w²/2 + w³/3 - w⁴/4
        w * (Complex64::new(1.0, 0.0)
            - w * (Complex64::new(0.5, 0.0) - w * (Complex64::new(1.0 / 3.0, 0.0) - w * 0.25)))
    } else {
        (w + 1.0).ln()
    }
}

/// Lanczos approximation (g = 7, n = 9), accurate to ~1e-15 for x > 0.
pub(crate) fn ln_gamma(x: f64) -> f64 {
    const COEF: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        return (PI / (PI * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut a = COEF[0];
    let t = x + 7.5;
    for (i, c) in COEF.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    0.5 * (2.0 * PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

fn check_positive(name: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::param(name, v, "> 0"))
    }
}

fn check_open_unit(name: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(Error::param(name, v, "in (0, 1)"))
    }
}
