mod common;

use cfloss::{
    compound_cf, empirical_cf, empirical_pgf, make_frequency_model, make_severity_cf, mixture_cf,
    portfolio_cf, smooth_cf, weighted_sum_cf, ClaimSample, PortfolioCell, PortfolioSpec,
};
use common::*;
use num_complex::Complex64;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn compound_empirical_is_the_double_average(
        counts in prop::collection::vec(0u32..30, 1..12),
        xs in sample_values(),
        t in -5.0..5.0f64,
    ) {
        let freq = empirical_pgf(&ClaimSample::counts(counts.iter().map(|&n| f64::from(n)).collect()).unwrap()).unwrap();
        let sev = empirical_cf(&ClaimSample::severities(xs.clone()).unwrap()).unwrap();
        let got = compound_cf(&freq, &sev).eval(t).unwrap();

        let inner: Complex64 = xs.iter().map(|&x| Complex64::cis(t * x)).sum::<Complex64>() / xs.len() as f64;
        let want: Complex64 = counts.iter().map(|&n| inner.powu(n)).sum::<Complex64>() / counts.len() as f64;
        prop_assert!((got - want).norm() < 1e-12, "{} vs {}", got, want);
    }

    #[test]
    fn nested_mixtures_flatten(
        a in severity_params(),
        b in severity_params(),
        d in severity_params(),
        u in 0.01..0.99f64,
        v in 0.01..0.99f64,
        t in -30.0..30.0f64,
    ) {
        let (ca, cb, cd) = (
            make_severity_cf(a).unwrap(),
            make_severity_cf(b).unwrap(),
            make_severity_cf(d).unwrap(),
        );
        let inner = mixture_cf(&[ca.clone(), cb.clone()], &[v, 1.0 - v]).unwrap();
        let nested = mixture_cf(&[inner, cd.clone()], &[u, 1.0 - u]).unwrap();
        let wa = u * v;
        let wb = u * (1.0 - v);
        let flat = mixture_cf(&[ca, cb, cd], &[wa, wb, 1.0 - wa - wb]).unwrap();
        let (x, y) = (nested.eval(t).unwrap(), flat.eval(t).unwrap());
        prop_assert!((x - y).norm() < 1e-14, "{} vs {}", x, y);
    }

    #[test]
    fn portfolio_ignores_cell_order(
        cells in prop::collection::vec((frequency_family(), severity_params()), 2..5),
        seed in any::<u64>(),
        t in -10.0..10.0f64,
    ) {
        let build = |order: &[usize]| {
            portfolio_cf(&PortfolioSpec::new(order.iter().map(|&i| PortfolioCell {
                frequency: make_frequency_model(cells[i].0.clone()).unwrap(),
                severity: make_severity_cf(cells[i].1).unwrap(),
            }).collect()).unwrap())
        };
        let forward: Vec<usize> = (0..cells.len()).collect();
        let mut shuffled = forward.clone();
        shuffled.rotate_left((seed % cells.len() as u64) as usize);
        shuffled.swap(0, cells.len() - 1);
        let (x, y) = (build(&forward).eval(t).unwrap(), build(&shuffled).eval(t).unwrap());
        prop_assert!((x - y).norm() < 1e-14, "{} vs {}", x, y);
    }

    #[test]
    fn portfolio_is_product_of_compounds(
        cells in prop::collection::vec((frequency_family(), severity_params()), 1..4),
        t in -10.0..10.0f64,
    ) {
        let models: Vec<_> = cells.iter().map(|(f, p)| (make_frequency_model(f.clone()).unwrap(), make_severity_cf(*p).unwrap())).collect();
        let spec = PortfolioSpec::new(models.iter().map(|(f, s)| PortfolioCell { frequency: f.clone(), severity: s.clone() }).collect()).unwrap();
        let got = portfolio_cf(&spec).eval(t).unwrap();
        let want = models.iter().fold(c(1.0, 0.0), |acc, (f, s)| acc * compound_cf(f, s).eval(t).unwrap());
        prop_assert!((got - want).norm() < 1e-14, "{} vs {}", got, want);
    }

    #[test]
    fn weighted_sum_scales_arguments(
        a in severity_params(),
        b in severity_params(),
        ka in 0.05..3.0f64,
        kb in 0.05..3.0f64,
        t in -10.0..10.0f64,
    ) {
        let (ca, cb) = (make_severity_cf(a).unwrap(), make_severity_cf(b).unwrap());
        let got = weighted_sum_cf(&[ca.clone(), cb.clone()], &[ka, kb]).unwrap().eval(t).unwrap();
        let want = ca.eval(ka * t).unwrap() * cb.eval(kb * t).unwrap();
        prop_assert!((got - want).norm() < 1e-14);
    }

    #[test]
    fn smoothing_multiplies_by_a_gaussian(p in severity_params(), s in 0.0..5.0f64, t in -10.0..10.0f64) {
        let cf = make_severity_cf(p).unwrap();
        let got = smooth_cf(&cf, s).unwrap().eval(t).unwrap();
        let want = cf.eval(t).unwrap() * (-0.5 * s * s * t * t).exp();
        prop_assert!((got - want).norm() < 1e-14);
    }
}

#[test]
fn compound_of_dirac_counts_is_a_power() {
    let freq = make_frequency_model(cfloss::FrequencyFamily::Dirac { mu: 4.0 }).unwrap();
    let sev = make_severity_cf(cfloss::SeverityParams::gamma(0.5, 2.0).unwrap()).unwrap();
    let four = make_severity_cf(cfloss::SeverityParams::gamma(2.0, 2.0).unwrap()).unwrap();
    for t in [-3.0, -0.1, 0.7, 12.0] {
        let d = compound_cf(&freq, &sev).eval(t).unwrap() - four.eval(t).unwrap();
        assert!(d.norm() < 1e-13, "{t}: {d}");
    }
}
