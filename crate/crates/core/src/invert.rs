//! Gil-Pelaez inversion of a characteristic function by the trapezoidal rule.
//!
//! With nodes `t_j = jδ`, `j = 0..=N`, and trapezoidal weights,
//!
//! ```text
//! pdf(x) ≈ (δ/π) Σ w_j Re(e^{-i t_j x} cf(t_j))
//! cdf(x) ≈ 1/2 - (δ/π) Σ w_j Im(e^{-i t_j x} cf(t_j)) / t_j
//! ```
//!
//! where the `j = 0` term of the CDF sum is its limit `E[X] - x`. The step
//! is tied to the support estimate `(A, B) = mean ∓ k·sd` by
//! `δ = 2π / (B - A)` and `N` is doubled until `|cf(T)| / T` falls below the
//! tail tolerance at `T = Nδ`. The CF is evaluated once on the grid; PDF,
//! CDF and quantile passes all reuse those values.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cf::{CharFn, Moments};
use crate::error::{Error, Result};

/// Hard cap on the number of quadrature intervals.
pub const MAX_NODES: usize = 1 << 22;

/// Below this density the Newton step is abandoned for bisection.
const MIN_NEWTON_PDF: f64 = 1e-14;

/// An atom this close to one is treated as a point mass at zero.
const DEGENERATE_ATOM: f64 = 1.0 - 1e-14;

/// Number of loss points used when the caller gives none.
pub const DEFAULT_GRID_POINTS: usize = 201;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NewtonOptions {
    pub max_iter: usize,
    /// Absolute step tolerance; `None` means `1e-8 · (B - A)`.
    pub x_tol: Option<f64>,
    pub p_tol: f64,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        NewtonOptions {
            max_iter: 100,
            x_tol: None,
            p_tol: 1e-10,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct InversionOptions {
    /// Starting number of quadrature intervals.
    pub quadrature_n: usize,
    /// Multiplier `k` of the standard deviation in `mean ∓ k·sd`.
    pub six_sigma: f64,
    pub tail_epsilon: f64,
    /// Step of the finite-difference moment estimates.
    pub diff_step: f64,
    pub is_compound: bool,
    /// Explicit support `(A, B)` replacing the six-sigma rule.
    pub support: Option<(f64, f64)>,
    /// Explicit upper integration limit; disables the doubling search.
    pub t_max: Option<f64>,
    pub newton: NewtonOptions,
}

impl Default for InversionOptions {
    fn default() -> Self {
        InversionOptions {
            quadrature_n: 1 << 10,
            six_sigma: 6.0,
            tail_epsilon: 1e-12,
            diff_step: 1e-4,
            is_compound: false,
            support: None,
            t_max: None,
            newton: NewtonOptions::default(),
        }
    }
}

impl InversionOptions {
    pub fn validate(&self) -> Result<()> {
        if self.quadrature_n < 2 {
            return Err(Error::invalid(format!(
                "quadrature N must be at least 2, got {}",
                self.quadrature_n
            )));
        }
        if self.quadrature_n > MAX_NODES {
            return Err(Error::invalid(format!(
                "quadrature N must not exceed {MAX_NODES}, got {}",
                self.quadrature_n
            )));
        }
        if !(self.six_sigma.is_finite() && self.six_sigma > 0.0) {
            return Err(Error::invalid(format!(
                "six-sigma coefficient must be positive, got {}",
                self.six_sigma
            )));
        }
        if !(self.tail_epsilon > 0.0) {
            return Err(Error::invalid(format!(
                "tail epsilon must be positive, got {}",
                self.tail_epsilon
            )));
        }
        if !(self.diff_step.is_finite() && self.diff_step > 0.0) {
            return Err(Error::invalid(format!(
                "differentiation step must be positive, got {}",
                self.diff_step
            )));
        }
        if let Some((a, b)) = self.support {
            if !(a.is_finite() && b.is_finite() && a < b) {
                return Err(Error::invalid(format!(
                    "support requires A < B, got ({a}, {b})"
                )));
            }
        }
        if let Some(t) = self.t_max {
            if !(t.is_finite() && t > 0.0) {
                return Err(Error::invalid(format!("T must be positive, got {t}")));
            }
        }
        if self.newton.max_iter == 0 || !(self.newton.p_tol > 0.0) {
            return Err(Error::invalid(
                "Newton options need max_iter >= 1 and p_tol > 0",
            ));
        }
        if let Some(x) = self.newton.x_tol {
            if !(x > 0.0) {
                return Err(Error::invalid(format!(
                    "Newton x_tol must be positive, got {x}"
                )));
            }
        }
        Ok(())
    }
}

/// Quadrature grid chosen for one CF.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub delta: f64,
    /// Number of intervals; the grid has `n + 1` nodes.
    pub n: usize,
    pub t_max: f64,
    pub a: f64,
    pub b: f64,
    pub moments: Moments,
    pub moments_from_hint: bool,
    /// `|cf(T)| / T` at the final `T`.
    pub tail_magnitude: f64,
    /// The doubling search stopped at [`MAX_NODES`] without meeting the tail
    /// tolerance.
    pub capped: bool,
    /// Probability of a zero loss, for compound distributions.
    pub atom: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub grid: Grid,
    pub zero_atom: Option<f64>,
    /// CF evaluations spent on quadrature nodes.
    pub node_evaluations: usize,
    pub clamped_cdf: usize,
    /// Largest decrease of the raw CDF between consecutive sorted loss
    /// points.
    pub max_cdf_violation: f64,
    pub negative_pdf: usize,
    pub newton_iterations: Vec<usize>,
    pub bisection_fallbacks: usize,
}

/// PDF, CDF and quantiles from one inversion run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionResult {
    pub x_grid: Vec<f64>,
    pub pdf: Vec<f64>,
    pub cdf: Vec<f64>,
    pub probs: Vec<f64>,
    pub quantiles: Vec<f64>,
    pub mean_estimate: f64,
    pub var_estimate: f64,
    pub diagnostics: Diagnostics,
}

/// Mean and variance, from the CF's closed-form hints when present and from
/// finite differences otherwise.
pub fn estimate_moments(cf: &CharFn, h: f64) -> Result<Moments> {
    match cf.moments() {
        Some(m) => Ok(m),
        None => estimate_moments_numeric(cf, h),
    }
}

/// Finite-difference moments from `cf(h), ..., cf(4h)`:
///
/// ```text
/// E[X]   ≈ (8/5 Im c1 - 2/5 Im c2 + 8/105 Im c3 - 2/280 Im c4) / h
/// E[X^2] ≈ (205/72 - 16/5 Re c1 + 2/5 Re c2 - 16/315 Re c3 + 2/560 Re c4) / h^2
/// ```
pub fn estimate_moments_numeric(cf: &CharFn, h: f64) -> Result<Moments> {
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::invalid(format!(
            "differentiation step must be positive, got {h}"
        )));
    }
    let mut c = [Complex64::new(0.0, 0.0); 4];
    for (k, slot) in c.iter_mut().enumerate() {
        let t = h * (k + 1) as f64;
        *slot = cf.eval(t).map_err(|e| match e {
            Error::NumericFailure(m) => Error::NumericFailure(format!("moment stencil: {m}")),
            other => other,
        })?;
    }
    let mean = (8.0 / 5.0 * c[0].im - 2.0 / 5.0 * c[1].im + 8.0 / 105.0 * c[2].im
        - 2.0 / 280.0 * c[3].im)
        / h;
    let second = (205.0 / 72.0 - 16.0 / 5.0 * c[0].re + 2.0 / 5.0 * c[1].re
        - 16.0 / 315.0 * c[2].re
        + 2.0 / 560.0 * c[3].re)
        / (h * h);
    if !(mean.is_finite() && second.is_finite()) {
        return Err(Error::NumericFailure(format!(
            "moment estimates are not finite (mean {mean}, E[X^2] {second})"
        )));
    }
    Ok(Moments::new(mean, second - mean * mean))
}

/// Six-sigma support, step and node count for `cf`.
pub fn choose_grid(cf: &CharFn, opts: &InversionOptions) -> Result<Grid> {
    opts.validate()?;
    let moments_from_hint = cf.moments().is_some();
    let moments = estimate_moments(cf, opts.diff_step)?;
    let (mut a, b) = match opts.support {
        Some(ab) => ab,
        None => {
            if !(moments.variance > 0.0 && moments.variance.is_finite()) {
                return Err(Error::DegenerateSupport(format!(
                    "variance estimate is {} (mean {})",
                    moments.variance, moments.mean
                )));
            }
            let sd = moments.variance.sqrt();
            (
                moments.mean - opts.six_sigma * sd,
                moments.mean + opts.six_sigma * sd,
            )
        }
    };
    if opts.is_compound {
        a = a.max(0.0);
        if b <= a {
            return Err(Error::DegenerateSupport(format!(
                "compound support collapses to ({a}, {b})"
            )));
        }
    }
    if a.abs() > 1e12 || b.abs() > 1e12 {
        log::warn!("support ({a:e}, {b:e}) is extremely wide; moment estimates may be unreliable");
    }
    let delta = 2.0 * PI / (b - a);
    // A compound CF tends to its atom at zero, so the tail test looks at the
    // continuous part only.
    let atom = if opts.is_compound {
        Some(match cf.zero_atom() {
            Some(p0) => p0,
            None => {
                let far = 1e10 * delta;
                let est = cf.eval(far)?.re.clamp(0.0, 1.0);
                log::debug!("estimated atom at zero {est:e} from cf({far:e})");
                est
            }
        })
    } else {
        None
    };
    let tail = |n: usize| -> Result<f64> {
        let t = n as f64 * delta;
        let v = cf.eval(t)?;
        let v = match atom {
            Some(p0) if p0 < 1.0 => (v - p0) / (1.0 - p0),
            _ => v,
        };
        Ok(v.norm() / t)
    };

    let (n, capped, tail_magnitude) = match opts.t_max {
        Some(t) => {
            let n = ((t / delta).ceil() as usize).clamp(2, MAX_NODES);
            (n, false, tail(n)?)
        }
        None => {
            let mut n = opts.quadrature_n;
            loop {
                let mag = tail(n)?;
                if mag < opts.tail_epsilon {
                    break (n, false, mag);
                }
                if n >= MAX_NODES {
                    log::warn!(
                        "tail |cf(T)/T| = {mag:e} still above {:e} at the node cap",
                        opts.tail_epsilon
                    );
                    break (n, true, mag);
                }
                n = (n * 2).min(MAX_NODES);
            }
        }
    };
    Ok(Grid {
        delta,
        n,
        t_max: n as f64 * delta,
        a,
        b,
        moments,
        moments_from_hint,
        tail_magnitude,
        capped,
        atom,
    })
}

/// Raw inverted PDF at each `x`. Negative values are returned as computed.
pub fn invert_pdf(cf: &CharFn, xs: &[f64], opts: &InversionOptions) -> Result<Vec<f64>> {
    check_finite(xs)?;
    let inv = Inverter::new(cf, opts)?;
    Ok(xs.par_iter().map(|&x| inv.pdf(x)).collect())
}

/// Inverted CDF at each `x`, clamped to `[0, 1]` and made nondecreasing
/// along increasing `x`.
pub fn invert_cdf(cf: &CharFn, xs: &[f64], opts: &InversionOptions) -> Result<Vec<f64>> {
    check_finite(xs)?;
    let inv = Inverter::new(cf, opts)?;
    let raw: Vec<f64> = xs.par_iter().map(|&x| inv.cdf(x)).collect();
    Ok(report_cdf(xs, &raw).values)
}

/// Quantiles by Newton iteration on the raw inverted CDF, started at the mean.
pub fn quantiles(cf: &CharFn, probs: &[f64], opts: &InversionOptions) -> Result<Vec<f64>> {
    check_probs(probs)?;
    let inv = Inverter::new(cf, opts)?;
    let solved = probs
        .iter()
        .map(|&p| inv.quantile(p))
        .collect::<Result<Vec<_>>>()?;
    Ok(monotone_quantiles(
        probs,
        solved.into_iter().map(|q| q.value).collect(),
    ))
}

/// Full inversion sharing one grid selection and one CF grid evaluation.
/// When `xs` is `None`, 201 points spanning the support are used.
pub fn invert_distribution(
    cf: &CharFn,
    xs: Option<&[f64]>,
    probs: &[f64],
    opts: &InversionOptions,
) -> Result<DistributionResult> {
    if let Some(xs) = xs {
        check_finite(xs)?;
    }
    check_probs(probs)?;
    let inv = Inverter::new(cf, opts)?;
    let grid = inv.grid;
    let x_grid = match xs {
        Some(xs) => xs.to_vec(),
        None => linspace(grid.a, grid.b, DEFAULT_GRID_POINTS),
    };

    let pairs: Vec<(f64, f64)> = x_grid.par_iter().map(|&x| inv.pdf_cdf(x)).collect();
    let pdf: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let raw_cdf: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    let reported = report_cdf(&x_grid, &raw_cdf);

    let solved = probs
        .iter()
        .map(|&p| inv.quantile(p))
        .collect::<Result<Vec<_>>>()?;
    let newton_iterations = solved.iter().map(|q| q.iterations).collect();
    let bisection_fallbacks = solved.iter().filter(|q| q.bisected).count();
    let quantiles = monotone_quantiles(probs, solved.iter().map(|q| q.value).collect());

    let diagnostics = Diagnostics {
        grid,
        zero_atom: inv.atom,
        node_evaluations: inv.node_evaluations,
        clamped_cdf: reported.clamped,
        max_cdf_violation: reported.max_violation,
        negative_pdf: pdf.iter().filter(|&&v| v < 0.0).count(),
        newton_iterations,
        bisection_fallbacks,
    };
    Ok(DistributionResult {
        x_grid,
        pdf,
        cdf: reported.values,
        probs: probs.to_vec(),
        quantiles,
        mean_estimate: grid.moments.mean,
        var_estimate: grid.moments.variance,
        diagnostics,
    })
}

pub fn linspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let step = (hi - lo) / (count - 1) as f64;
            (0..count)
                .map(|k| {
                    if k == count - 1 {
                        hi
                    } else {
                        lo + step * k as f64
                    }
                })
                .collect()
        }
    }
}

fn check_finite(xs: &[f64]) -> Result<()> {
    match xs.iter().position(|x| !x.is_finite()) {
        Some(k) => Err(Error::invalid(format!(
            "loss point {k} is not finite ({})",
            xs[k]
        ))),
        None => Ok(()),
    }
}

fn check_probs(probs: &[f64]) -> Result<()> {
    match probs.iter().find(|p| !(**p > 0.0 && **p < 1.0)) {
        Some(p) => Err(Error::invalid(format!("probability {p} is outside (0, 1)"))),
        None => Ok(()),
    }
}

struct Reported {
    values: Vec<f64>,
    clamped: usize,
    max_violation: f64,
}

/// Clamp to `[0, 1]` and isotonize (pool adjacent violators) along sorted `x`.
fn report_cdf(xs: &[f64], raw: &[f64]) -> Reported {
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&i, &j| xs[i].total_cmp(&xs[j]));

    let mut max_violation: f64 = 0.0;
    for w in order.windows(2) {
        max_violation = max_violation.max(raw[w[0]] - raw[w[1]]);
    }
    let clamped = raw.iter().filter(|&&v| !(0.0..=1.0).contains(&v)).count();

    // blocks of (sum, count)
    let mut blocks: Vec<(f64, usize)> = Vec::with_capacity(order.len());
    for &i in &order {
        blocks.push((raw[i].clamp(0.0, 1.0), 1));
        while blocks.len() > 1 {
            let (s2, n2) = blocks[blocks.len() - 1];
            let (s1, n1) = blocks[blocks.len() - 2];
            if s1 / n1 as f64 > s2 / n2 as f64 {
                blocks.pop();
                let last = blocks.len() - 1;
                blocks[last] = (s1 + s2, n1 + n2);
            } else {
                break;
            }
        }
    }
    let mut values = vec![0.0; xs.len()];
    let mut pos = 0;
    for (s, n) in blocks {
        let v = (s / n as f64).clamp(0.0, 1.0);
        for &i in &order[pos..pos + n] {
            values[i] = v;
        }
        pos += n;
    }
    Reported {
        values,
        clamped,
        max_violation,
    }
}

fn monotone_quantiles(probs: &[f64], mut qs: Vec<f64>) -> Vec<f64> {
    let mut order: Vec<usize> = (0..probs.len()).collect();
    order.sort_by(|&i, &j| probs[i].total_cmp(&probs[j]));
    let mut running = f64::NEG_INFINITY;
    for &i in &order {
        running = running.max(qs[i]);
        qs[i] = running;
    }
    qs
}

struct Solved {
    value: f64,
    iterations: usize,
    bisected: bool,
}

/// Grid, CF values and compound bookkeeping shared by all passes.
struct Inverter {
    grid: Grid,
    opts: InversionOptions,
    nodes: Vec<f64>,
    values: Vec<Complex64>,
    /// Mean of the continuous part, the `t -> 0` limit of the CDF integrand
    /// plus `x`.
    mean: f64,
    atom: Option<f64>,
    node_evaluations: usize,
}

impl Inverter {
    fn new(cf: &CharFn, opts: &InversionOptions) -> Result<Self> {
        opts.validate()?;
        if opts.is_compound {
            if let Some(atom) = cf.zero_atom() {
                if atom >= DEGENERATE_ATOM {
                    return Ok(Self::point_mass_at_zero(opts));
                }
            }
        }
        let grid = choose_grid(cf, opts)?;
        let nodes: Vec<f64> = (0..=grid.n).map(|j| j as f64 * grid.delta).collect();
        let mut values = cf.eval_grid(&nodes)?;
        let node_evaluations = nodes.len();

        let mut mean = grid.moments.mean;
        let atom = grid.atom;
        if let Some(p0) = atom {
            if p0 >= DEGENERATE_ATOM {
                return Ok(Self::point_mass_at_zero(opts));
            }
            if p0 > 0.0 {
                let scale = 1.0 - p0;
                for v in values.iter_mut() {
                    *v = (*v - p0) / scale;
                }
                mean /= scale;
            }
        }
        Ok(Inverter {
            grid,
            opts: *opts,
            nodes,
            values,
            mean,
            atom,
            node_evaluations,
        })
    }

    fn point_mass_at_zero(opts: &InversionOptions) -> Self {
        let (a, b) = opts.support.unwrap_or((0.0, 1.0));
        let grid = Grid {
            delta: 2.0 * PI / (b - a),
            n: 0,
            t_max: 0.0,
            a,
            b,
            moments: Moments::new(0.0, 0.0),
            moments_from_hint: true,
            tail_magnitude: 0.0,
            capped: false,
            atom: Some(1.0),
        };
        Inverter {
            grid,
            opts: *opts,
            nodes: Vec::new(),
            values: Vec::new(),
            mean: 0.0,
            atom: Some(1.0),
            node_evaluations: 0,
        }
    }

    /// Raw (pdf, cdf) of the continuous part at `x`.
    fn continuous_pdf_cdf(&self, x: f64) -> (f64, f64) {
        // e^{-i t_j x} by rotation, re-anchored every block to bound drift
        const BLOCK: usize = 64;
        let n = self.grid.n;
        let rot = Complex64::cis(-self.grid.delta * x);
        let mut pdf_sum = 0.5; // j = 0: w_0 Re(cf(0))
        let mut cdf_sum = 0.5 * (self.mean - x);
        let mut phase = Complex64::new(1.0, 0.0);
        for j in 1..=n {
            let t = self.nodes[j];
            phase = if j % BLOCK == 0 {
                Complex64::cis(-t * x)
            } else {
                phase * rot
            };
            let z = phase * self.values[j];
            let w = if j == n { 0.5 } else { 1.0 };
            pdf_sum += w * z.re;
            cdf_sum += w * z.im / t;
        }
        let d = self.grid.delta / PI;
        (d * pdf_sum, 0.5 - d * cdf_sum)
    }

    fn pdf_cdf(&self, x: f64) -> (f64, f64) {
        match self.atom {
            Some(p0) => {
                if x < 0.0 {
                    (0.0, 0.0)
                } else if p0 >= DEGENERATE_ATOM {
                    (0.0, 1.0)
                } else {
                    let (f, c) = self.continuous_pdf_cdf(x);
                    ((1.0 - p0) * f, p0 + (1.0 - p0) * c)
                }
            }
            None => self.continuous_pdf_cdf(x),
        }
    }

    fn pdf(&self, x: f64) -> f64 {
        self.pdf_cdf(x).0
    }

    fn cdf(&self, x: f64) -> f64 {
        self.pdf_cdf(x).1
    }

    fn quantile(&self, p: f64) -> Result<Solved> {
        // Work on the continuous part; the atom is handled here.
        let target = match self.atom {
            Some(p0) if p <= p0 => {
                return Ok(Solved {
                    value: 0.0,
                    iterations: 0,
                    bisected: false,
                })
            }
            Some(p0) => (p - p0) / (1.0 - p0),
            None => p,
        };
        let (a, b) = (self.grid.a, self.grid.b);
        let x_tol = self.opts.newton.x_tol.unwrap_or(1e-8 * (b - a));
        let p_tol = self.opts.newton.p_tol;

        let mut q = self.mean;
        let mut iterations = 0;
        let mut fallback = !(q > a && q < b);
        while !fallback && iterations < self.opts.newton.max_iter {
            let (f, c) = self.continuous_pdf_cdf(q);
            iterations += 1;
            let resid = c - target;
            if resid.abs() < p_tol {
                return Ok(Solved {
                    value: q,
                    iterations,
                    bisected: false,
                });
            }
            if !(f > MIN_NEWTON_PDF) {
                fallback = true;
                break;
            }
            let step = resid / f;
            q -= step;
            if !(q > a && q < b) {
                fallback = true;
                break;
            }
            if step.abs() < x_tol {
                return Ok(Solved {
                    value: q,
                    iterations,
                    bisected: false,
                });
            }
        }
        let _ = fallback;
        let value = self.bisect(target, a, b, x_tol, p_tol)?;
        Ok(Solved {
            value,
            iterations,
            bisected: true,
        })
    }

    fn bisect(&self, target: f64, a: f64, b: f64, x_tol: f64, p_tol: f64) -> Result<f64> {
        let (mut lo, mut hi) = (a, b);
        let c_lo = self.continuous_pdf_cdf(lo).1;
        let c_hi = self.continuous_pdf_cdf(hi).1;
        if !(c_lo <= target && target <= c_hi) {
            return Err(Error::Convergence(format!(
                "quantile {target} is not bracketed by the support: cdf({lo}) = {c_lo}, \
                 cdf({hi}) = {c_hi}"
            )));
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            let c = self.continuous_pdf_cdf(mid).1;
            if (c - target).abs() < p_tol || hi - lo < x_tol {
                return Ok(mid);
            }
            if c < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }
}
