//! Gauss-Legendre rules and the half-line Fourier integral used for
//! severities whose CF has no convenient closed form.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default number of Gauss-Legendre nodes for half-line CF integrals.
pub const DEFAULT_HALFLINE_NODES: usize = 128;

/// Gauss-Legendre nodes and weights on `(0, 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid(
                "Gauss-Legendre rule needs at least one node",
            ));
        }
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        let nf = n as f64;
        for i in 0..m {
            // Tricomi's initial guess, refined by Newton on P_n.
            let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            // Map [-1, 1] onto (0, 1), ascending.
            nodes[i] = 0.5 * (1.0 - x);
            nodes[n - 1 - i] = 0.5 * (1.0 + x);
            weights[i] = 0.5 * w;
            weights[n - 1 - i] = 0.5 * w;
        }
        Ok(GaussLegendre { nodes, weights })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Integral of `f` over `(a, b)`.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let h = b - a;
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(a + h * x))
            .sum::<f64>()
            * h
    }
}

/// Legendre polynomial P_n and its derivative at `x`.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Precomputed nodes for `∫_0^∞ g(s) ds` after the substitution
/// `s = (x / (1 - x))^2`, `x ∈ (0, 1)`.
///
/// Node `j` carries `u_j^2` and the Jacobian-weighted factor
/// `w_j · 2 x_j / (1 - x_j)^3`.
#[derive(Debug, Clone)]
pub struct HalfLineRule {
    squares: Vec<f64>,
    jacobian: Vec<f64>,
}

impl HalfLineRule {
    pub fn new(nodes: usize) -> Result<Self> {
        let gl = GaussLegendre::new(nodes)?;
        let mut squares = Vec::with_capacity(nodes);
        let mut jacobian = Vec::with_capacity(nodes);
        for (&x, &w) in gl.nodes.iter().zip(&gl.weights) {
            let u = x / (1.0 - x);
            squares.push(u * u);
            jacobian.push(w * 2.0 * x / (1.0 - x).powi(3));
        }
        Ok(HalfLineRule { squares, jacobian })
    }

    pub fn len(&self) -> usize {
        self.squares.len()
    }

    pub fn is_empty(&self) -> bool {
        self.squares.is_empty()
    }
}

impl Default for HalfLineRule {
    fn default() -> Self {
        HalfLineRule::new(DEFAULT_HALFLINE_NODES).expect("default rule is valid")
    }
}

/// CF of a nonnegative variable from its density continued into the upper
/// half plane, integrated along the positive imaginary axis:
///
/// `cf(t) = ∫_0^1 (i/t) pdf((i/t) u^2) e^{-u^2} 2x/(1-x)^3 dx`, `u = x/(1-x)`.
///
/// For `|t| < 1` the substitution would stretch the density over too few
/// nodes, so the ray of [`cf_on_ray`] with a unit length scale is used
/// there instead. Negative `t` is evaluated as the conjugate of `cf(|t|)`;
/// `t = 0` returns one without touching the density.
pub fn cf_from_halfline_pdf<F>(pdf: F, t: f64, rule: &HalfLineRule) -> Result<Complex64>
where
    F: Fn(Complex64) -> Complex64,
{
    cf_on_ray(pdf, t, ContourHint::default(), rule)
}

/// Contour choice for a density continued off the real axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContourHint {
    /// Natural length scale of the density.
    pub length: f64,
    /// Largest ray angle in `(0, π/2]` on which the density stays analytic
    /// and moderate in size.
    pub max_angle: f64,
}

impl Default for ContourHint {
    fn default() -> Self {
        ContourHint {
            length: 1.0,
            max_angle: FRAC_PI_2,
        }
    }
}

/// Evaluates the CF along a ray from the origin chosen per `t`.
///
/// The imaginary-axis integral of [`cf_from_halfline_pdf`] is used whenever
/// the density tolerates it and `|t| · length >= 1`. Otherwise the contour is
/// tilted to `min(max_angle, π/4)` and the substitution is rescaled to the
/// smaller of the density length and the decay length of `e^{itz}`, which
/// keeps exponentially decaying densities from oscillating along the path.
pub fn cf_on_ray<F>(pdf: F, t: f64, hint: ContourHint, rule: &HalfLineRule) -> Result<Complex64>
where
    F: Fn(Complex64) -> Complex64,
{
    if !t.is_finite() {
        return Err(Error::invalid(format!(
            "CF argument must be finite, got {t}"
        )));
    }
    if t.abs() < 1e-300 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let s = t.abs();
    let v = if hint.max_angle >= FRAC_PI_2 && s * hint.length >= 1.0 {
        ray_integral(&pdf, s, FRAC_PI_2, 1.0 / s, rule)?
    } else {
        let angle = hint.max_angle.min(FRAC_PI_4);
        let scale = (1.0 / (s * angle.sin())).min(hint.length);
        ray_integral(&pdf, s, angle, scale, rule)?
    };
    Ok(if t < 0.0 { v.conj() } else { v })
}

/// `e^{iφ} ∫_0^∞ e^{i t ρ e^{iφ}} pdf(ρ e^{iφ}) dρ` with `ρ = scale · u^2`, `t > 0`.
fn ray_integral<F>(
    pdf: &F,
    t: f64,
    angle: f64,
    scale: f64,
    rule: &HalfLineRule,
) -> Result<Complex64>
where
    F: Fn(Complex64) -> Complex64,
{
    let dir = if angle == FRAC_PI_2 {
        Complex64::new(0.0, 1.0)
    } else {
        Complex64::cis(angle)
    };
    let mut acc = Complex64::new(0.0, 0.0);
    for (&u2, &jac) in rule.squares.iter().zip(&rule.jacobian) {
        let rho = scale * u2;
        let z = dir * rho;
        // e^{itz} = e^{-tρ sinφ} e^{itρ cosφ}
        let damp = (-t * rho * dir.im).exp();
        let weight = jac * damp;
        if weight == 0.0 || !weight.is_finite() {
            continue;
        }
        let f = pdf(z);
        if !(f.re.is_finite() && f.im.is_finite()) {
            return Err(Error::NumericFailure(format!(
                "density is {f} at quadrature node z = {z}"
            )));
        }
        acc += f * Complex64::cis(t * rho * dir.re) * weight;
    }
    Ok(acc * dir * scale)
}
