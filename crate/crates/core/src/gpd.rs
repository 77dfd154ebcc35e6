//! Peaks-over-threshold: threshold selection and maximum likelihood fitting
//! of the generalized Pareto distribution to the excesses.

use serde::{Deserialize, Serialize};

use crate::empirical::{ClaimSample, SampleKind};
use crate::error::{Error, Result};

/// Evaluation budget of the simplex search.
pub const MAX_EVALUATIONS: usize = 10_000;

/// A GPD tail fitted above the threshold `theta`, which is the `p`-quantile
/// of the severity sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GpdFit {
    pub xi: f64,
    pub sigma: f64,
    pub theta: f64,
    pub p: f64,
    pub n_excesses: usize,
    pub log_lik: f64,
}

/// Maximum likelihood estimate returned by [`fit_gpd`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GpdEstimate {
    pub xi: f64,
    pub sigma: f64,
    pub log_lik: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitOptions {
    /// Restrict the shape to `xi >= 0`. Turning this off is meant for
    /// diagnostics only; the resulting fit cannot feed a tail CF.
    pub constrain_xi: bool,
    pub max_evaluations: usize,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            constrain_xi: true,
            max_evaluations: MAX_EVALUATIONS,
        }
    }
}

/// `p`-quantile by linear interpolation between order statistics placed at
/// plotting positions `(k - 0.5) / n`.
pub fn select_threshold(sample: &ClaimSample, p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::invalid(format!("p must lie in (0, 1), got {p}")));
    }
    if sample.len() < 2 {
        return Err(Error::invalid(format!(
            "threshold selection needs at least 2 observations, got {}",
            sample.len()
        )));
    }
    let mut sorted = sample.values().to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(midpoint_quantile(&sorted, p))
}

pub(crate) fn midpoint_quantile(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    // 1-based position h such that (h - 0.5) / n = p
    let h = n as f64 * p + 0.5;
    if h <= 1.0 {
        return sorted[0];
    }
    if h >= n as f64 {
        return sorted[n - 1];
    }
    let k = h.floor() as usize;
    let frac = h - k as f64;
    let lo = sorted[k - 1];
    if frac == 0.0 {
        lo
    } else {
        lo + frac * (sorted[k] - lo)
    }
}

/// GPD log-likelihood of the excesses. Returns `-inf` when an excess lies
/// outside the support.
pub fn gpd_loglik(xi: f64, sigma: f64, excesses: &[f64]) -> Result<f64> {
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(Error::param("sigma", sigma, "> 0"));
    }
    if !(xi.is_finite() && xi >= 0.0) {
        return Err(Error::param("xi", xi, "xi >= 0"));
    }
    Ok(loglik(xi, sigma, excesses))
}

fn loglik(xi: f64, sigma: f64, excesses: &[f64]) -> f64 {
    let n = excesses.len() as f64;
    let mut acc = -n * sigma.ln();
    if xi == 0.0 {
        for &x in excesses {
            if x < 0.0 {
                return f64::NEG_INFINITY;
            }
            acc -= x / sigma;
        }
        return acc;
    }
    let power = 1.0 / xi + 1.0;
    for &x in excesses {
        let w = xi * x / sigma;
        if x < 0.0 || w <= -1.0 {
            return f64::NEG_INFINITY;
        }
        acc -= power * w.ln_1p();
    }
    acc
}

/// Maximum likelihood fit with `xi >= 0`.
pub fn fit_gpd(excesses: &[f64]) -> Result<GpdEstimate> {
    fit_gpd_with(excesses, FitOptions::default())
}

pub fn fit_gpd_with(excesses: &[f64], opts: FitOptions) -> Result<GpdEstimate> {
    if excesses.len() < 2 {
        return Err(Error::invalid(format!(
            "GPD fit needs at least 2 excesses, got {}",
            excesses.len()
        )));
    }
    if let Some(x) = excesses.iter().find(|x| !(x.is_finite() && **x >= 0.0)) {
        return Err(Error::invalid(format!(
            "excess {x} is not a nonnegative number"
        )));
    }
    let first = excesses[0];
    if excesses.iter().all(|&x| x == first) {
        return Err(Error::DegenerateData(format!(
            "all {} excesses equal {first}",
            excesses.len()
        )));
    }

    let (xi0, sigma0) = pwm_start(excesses);
    // Search over (xi, ln sigma).
    let objective = |v: [f64; 2]| {
        let ll = loglik(v[0], v[1].exp(), excesses);
        if ll.is_finite() {
            -ll
        } else {
            f64::INFINITY
        }
    };
    let start = [xi0, sigma0.ln()];
    let best = nelder_mead(objective, start, [0.1, 0.1], opts.max_evaluations)?;
    let (mut xi, mut sigma) = (best.point[0], best.point[1].exp());
    let mut evaluations = best.evaluations;
    if opts.constrain_xi && xi < 0.0 {
        // Boundary optimum: exponential MLE.
        xi = 0.0;
        sigma = excesses.iter().sum::<f64>() / excesses.len() as f64;
        evaluations += 1;
    }
    let log_lik = loglik(xi, sigma, excesses);
    log::debug!("GPD fit xi={xi} sigma={sigma} loglik={log_lik} after {evaluations} evaluations");
    Ok(GpdEstimate {
        xi,
        sigma,
        log_lik,
        evaluations,
    })
}

/// Threshold at the `p`-quantile, then MLE on the excesses strictly above it.
pub fn fit_tail(sample: &ClaimSample, p: f64) -> Result<GpdFit> {
    if sample.kind() != SampleKind::Severity {
        return Err(Error::invalid("tail fit expects a severity sample"));
    }
    let theta = select_threshold(sample, p)?;
    let excesses: Vec<f64> = sample
        .values()
        .iter()
        .filter(|&&x| x > theta)
        .map(|&x| x - theta)
        .collect();
    let est = fit_gpd(&excesses)?;
    Ok(GpdFit {
        xi: est.xi,
        sigma: est.sigma,
        theta,
        p,
        n_excesses: excesses.len(),
        log_lik: est.log_lik,
    })
}

/// Probability-weighted-moments estimate, kept inside the region where the
/// likelihood is finite.
fn pwm_start(excesses: &[f64]) -> (f64, f64) {
    let mut sorted = excesses.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let a0 = sorted.iter().sum::<f64>() / n;
    let a1 = sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| (1.0 - (i as f64 + 0.65) / n) * x)
        .sum::<f64>()
        / n;
    let denom = a0 - 2.0 * a1;
    if denom > 0.0 {
        let xi = (2.0 - a0 / denom).clamp(0.0, 0.9);
        let sigma = 2.0 * a0 * a1 / denom;
        if sigma.is_finite() && sigma > 0.0 {
            return (xi, sigma);
        }
    }
    (0.0, a0.max(f64::MIN_POSITIVE))
}

struct Simplex {
    point: [f64; 2],
    evaluations: usize,
}

/// Nelder-Mead on two variables with standard coefficients.
fn nelder_mead<F>(f: F, start: [f64; 2], step: [f64; 2], max_evals: usize) -> Result<Simplex>
where
    F: Fn([f64; 2]) -> f64,
{
    const X_TOL: f64 = 1e-11;
    const F_TOL: f64 = 1e-13;

    let evals = std::cell::Cell::new(0usize);
    let eval = |x: [f64; 2]| {
        evals.set(evals.get() + 1);
        f(x)
    };
    let mut pts = [
        start,
        [start[0] + step[0], start[1]],
        [start[0], start[1] + step[1]],
    ];
    let mut vals = [eval(pts[0]), eval(pts[1]), eval(pts[2])];
    if !vals[0].is_finite() {
        return Err(Error::Convergence(format!(
            "likelihood is not finite at the starting point {start:?}"
        )));
    }

    loop {
        // order best..worst
        let mut idx = [0usize, 1, 2];
        idx.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
        pts = [pts[idx[0]], pts[idx[1]], pts[idx[2]]];
        vals = [vals[idx[0]], vals[idx[1]], vals[idx[2]]];

        let size = (1..3)
            .map(|i| {
                (pts[i][0] - pts[0][0])
                    .abs()
                    .max((pts[i][1] - pts[0][1]).abs())
            })
            .fold(0.0, f64::max);
        let spread = (vals[2] - vals[0]).abs();
        if size < X_TOL || (spread <= F_TOL * (1.0 + vals[0].abs()) && size < 1e-7) {
            return Ok(Simplex {
                point: pts[0],
                evaluations: evals.get(),
            });
        }
        if evals.get() >= max_evals {
            return Err(Error::Convergence(format!(
                "simplex search stopped after {} evaluations; best {:?} (-loglik {}), \
                 worst {:?} (-loglik {}), size {size:e}",
                evals.get(),
                pts[0],
                vals[0],
                pts[2],
                vals[2]
            )));
        }

        let centroid = [(pts[0][0] + pts[1][0]) / 2.0, (pts[0][1] + pts[1][1]) / 2.0];
        let toward = |c: f64| {
            [
                centroid[0] + c * (pts[2][0] - centroid[0]),
                centroid[1] + c * (pts[2][1] - centroid[1]),
            ]
        };

        let reflected = toward(-1.0);
        let fr = eval(reflected);
        if fr < vals[0] {
            let expanded = toward(-2.0);
            let fe = eval(expanded);
            if fe < fr {
                pts[2] = expanded;
                vals[2] = fe;
            } else {
                pts[2] = reflected;
                vals[2] = fr;
            }
            continue;
        }
        if fr < vals[1] {
            pts[2] = reflected;
            vals[2] = fr;
            continue;
        }
        let (contracted, fc) = if fr < vals[2] {
            let p = toward(-0.5);
            (p, eval(p))
        } else {
            let p = toward(0.5);
            (p, eval(p))
        };
        if fc < vals[2].min(fr) {
            pts[2] = contracted;
            vals[2] = fc;
            continue;
        }
        // shrink toward the best vertex
        for i in 1..3 {
            pts[i] = [
                pts[0][0] + 0.5 * (pts[i][0] - pts[0][0]),
                pts[0][1] + 0.5 * (pts[i][1] - pts[0][1]),
            ];
            vals[i] = eval(pts[i]);
        }
    }
}
