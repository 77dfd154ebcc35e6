//! The characteristic-function abstraction shared by every other module.
//!
//! A [`CharFn`] is an immutable, cheaply clonable handle to a rule
//! `t -> E[exp(i t X)]`, optionally annotated with analytically known
//! moments and, for compound distributions, the probability mass at zero.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Grids shorter than this are evaluated on the calling thread.
const PAR_GRID_MIN: usize = 512;

type Rule = dyn Fn(f64) -> Complex64 + Send + Sync;

/// Mean and variance of the underlying random variable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    pub mean: f64,
    pub variance: f64,
}

impl Moments {
    pub fn new(mean: f64, variance: f64) -> Self {
        Moments { mean, variance }
    }

    /// E[X^2].
    pub fn second_raw(&self) -> f64 {
        self.variance + self.mean * self.mean
    }

    pub(crate) fn from_raw(mean: f64, second: f64) -> Self {
        Moments {
            mean,
            variance: (second - mean * mean).max(0.0),
        }
    }
}

#[derive(Clone)]
pub struct CharFn {
    rule: Arc<Rule>,
    moments: Option<Moments>,
    zero_atom: Option<f64>,
}

impl fmt::Debug for CharFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CharFn")
            .field("moments", &self.moments)
            .field("zero_atom", &self.zero_atom)
            .finish_non_exhaustive()
    }
}

impl CharFn {
    /// Wraps an arbitrary rule. The rule is never called at `t = 0`; the
    /// value there is fixed to exactly one.
    pub fn new<F>(rule: F) -> Self
    where
        F: Fn(f64) -> Complex64 + Send + Sync + 'static,
    {
        CharFn {
            rule: Arc::new(rule),
            moments: None,
            zero_atom: None,
        }
    }

    /// Attaches closed-form moments. These take precedence over numerical
    /// differentiation during inversion.
    pub fn with_moments(mut self, mean: f64, variance: f64) -> Self {
        self.moments = Some(Moments { mean, variance });
        self
    }

    pub(crate) fn with_moment_hint(mut self, moments: Option<Moments>) -> Self {
        self.moments = moments;
        self
    }

    /// Marks the CF as belonging to a compound distribution with
    /// `Pr(S = 0) = atom`.
    pub fn with_zero_atom(mut self, atom: f64) -> Self {
        self.zero_atom = Some(atom);
        self
    }

    pub fn moments(&self) -> Option<Moments> {
        self.moments
    }

    /// Probability mass at zero recorded by compounding, if any.
    pub fn zero_atom(&self) -> Option<f64> {
        self.zero_atom
    }

    pub fn is_compound(&self) -> bool {
        self.zero_atom.is_some()
    }

    /// Evaluates the CF at `t`.
    pub fn eval(&self, t: f64) -> Result<Complex64> {
        if !t.is_finite() {
            return Err(Error::invalid(format!(
                "CF argument must be finite, got {t}"
            )));
        }
        let v = self.value(t);
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::NumericFailure(format!(
                "CF evaluated to {v} at t = {t}"
            )));
        }
        Ok(v)
    }

    /// Evaluates at every node. Element `k` is bit-identical to
    /// `eval(ts[k])` whatever the thread scheduling.
    pub fn eval_grid(&self, ts: &[f64]) -> Result<Vec<Complex64>> {
        if let Some(k) = ts.iter().position(|t| !t.is_finite()) {
            return Err(Error::invalid(format!(
                "grid node {k} is not finite ({})",
                ts[k]
            )));
        }
        let values: Vec<Complex64> = if ts.len() >= PAR_GRID_MIN {
            ts.par_iter().map(|&t| self.value(t)).collect()
        } else {
            ts.iter().map(|&t| self.value(t)).collect()
        };
        if let Some(k) = values
            .iter()
            .position(|v| !(v.re.is_finite() && v.im.is_finite()))
        {
            return Err(Error::NumericFailure(format!(
                "CF evaluated to {} at grid node {k} (t = {})",
                values[k], ts[k]
            )));
        }
        Ok(values)
    }

    /// Unchecked evaluation used on hot paths where `t` is known finite.
    #[inline]
    pub(crate) fn value(&self, t: f64) -> Complex64 {
        if t == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            (self.rule)(t)
        }
    }
}

/// Characteristic function of a Gaussian with the given mean and standard
/// deviation. Used as the smoothing kernel and as a test distribution.
pub fn gaussian(mean: f64, sd: f64) -> Result<CharFn> {
    if !mean.is_finite() {
        return Err(Error::param("mean", mean, "finite"));
    }
    if !(sd >= 0.0 && sd.is_finite()) {
        return Err(Error::param("sd", sd, "sd >= 0"));
    }
    let half_var = 0.5 * sd * sd;
    Ok(
        CharFn::new(move |t| Complex64::from_polar((-half_var * t * t).exp(), mean * t))
            .with_moments(mean, sd * sd),
    )
}

/// Point mass at `location`.
pub fn dirac(location: f64) -> Result<CharFn> {
    if !location.is_finite() {
        return Err(Error::param("mu", location, "finite"));
    }
    Ok(CharFn::new(move |t| Complex64::cis(location * t)).with_moments(location, 0.0))
}
