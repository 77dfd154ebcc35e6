use cfloss::{fit_gpd, gpd_loglik, select_threshold, ClaimSample};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn excesses() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0..50.0f64, 5..60)
        .prop_filter("not all equal", |v| v.iter().any(|&x| x != v[0]))
}

/// GPD draws by inversion of the distribution function.
fn gpd_draws(xi: f64, sigma: f64, n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let u: f64 = 1.0 - rng.random::<f64>();
            if xi == 0.0 {
                -sigma * u.ln()
            } else {
                sigma * (u.powf(-xi) - 1.0) / xi
            }
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn loglik_is_continuous_at_zero_shape(
        scaled in prop::collection::vec(0.0..5.0f64, 1..60),
        sigma in 0.5..20.0f64,
    ) {
        // the slope in xi at zero grows like (x / sigma)^2, so keep x within 5 sigma
        let xs: Vec<f64> = scaled.iter().map(|u| u * sigma).collect();
        let at_zero = gpd_loglik(0.0, sigma, &xs).unwrap();
        let near = gpd_loglik(1e-8, sigma, &xs).unwrap();
        prop_assert!((at_zero - near).abs() < 1e-5, "{} vs {}", at_zero, near);
    }

    #[test]
    fn fit_is_stationary(xs in excesses()) {
        let est = fit_gpd(&xs).unwrap();
        for (dxi, dsigma) in [(1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0)] {
            let xi = est.xi * (1.0 + 1e-3 * dxi);
            let sigma = est.sigma * (1.0 + 1e-3 * dsigma);
            let ll = gpd_loglik(xi, sigma, &xs).unwrap();
            prop_assert!(ll - est.log_lik <= 1e-6, "({}, {}) improves by {}", xi, sigma, ll - est.log_lik);
        }
    }

    #[test]
    fn threshold_is_monotone_in_p(v in prop::collection::vec(0.0..100.0f64, 2..50), p in 0.01..0.98f64, dp in 0.0..0.01f64) {
        let s = ClaimSample::severities(v).unwrap();
        prop_assert!(select_threshold(&s, p).unwrap() <= select_threshold(&s, p + dp).unwrap());
    }

    #[test]
    fn threshold_is_affine_equivariant(
        v in prop::collection::vec(0.0..100.0f64, 2..50),
        p in 0.01..0.99f64,
        a in 0.1..10.0f64,
        b in 0.0..10.0f64,
    ) {
        let base = select_threshold(&ClaimSample::severities(v.clone()).unwrap(), p).unwrap();
        let moved: Vec<f64> = v.iter().map(|x| a * x + b).collect();
        let got = select_threshold(&ClaimSample::severities(moved).unwrap(), p).unwrap();
        prop_assert!((got - (a * base + b)).abs() <= 1e-12 * (1.0 + got.abs()), "{} vs {}", got, a * base + b);
    }
}

#[test]
fn recovers_exponential_excesses() {
    let est = fit_gpd(&gpd_draws(0.0, 1.0, 100_000, 1)).unwrap();
    assert!((0.0..=0.02).contains(&est.xi), "{est:?}");
    assert!((0.97..=1.03).contains(&est.sigma), "{est:?}");
}

#[test]
fn recovers_heavy_tail_within_three_standard_errors() {
    let (xi, sigma, n) = (0.5, 2.0, 100_000);
    let est = fit_gpd(&gpd_draws(xi, sigma, n, 2)).unwrap();
    // asymptotic standard errors of the maximum likelihood estimator
    let se_xi = (1.0 + xi) / (n as f64).sqrt();
    let se_sigma = sigma * (2.0 * (1.0 + xi)).sqrt() / (n as f64).sqrt();
    assert!((est.xi - xi).abs() < 3.0 * se_xi, "{est:?}");
    assert!((est.sigma - sigma).abs() < 3.0 * se_sigma, "{est:?}");
}
