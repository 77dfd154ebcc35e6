//! Aggregate loss distributions from compound characteristic functions.
//!
//! Frequencies are carried as probability generating functions and
//! severities as characteristic functions; compounding is composition
//! `pgf_N(cf_X(t))`. The resulting CF is inverted on a trapezoidal grid
//! to obtain the PDF, CDF and quantiles of the aggregate loss.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` also rejects NaN

pub mod cf;
pub mod compose;
pub mod empirical;
pub mod error;
pub mod gpd;
pub mod invert;
pub mod io;
pub mod parametric;
pub mod quadrature;
pub mod simulate;

pub use cf::{dirac, gaussian, CharFn, Moments};
pub use compose::{
    compound_cf, mixture_cf, portfolio_cf, smooth_cf, tail_mixture_cf, weighted_sum_cf,
    PortfolioCell, PortfolioSpec,
};
pub use empirical::{
    empirical_cf, empirical_cf_with, empirical_pgf, ClaimSample, EmpiricalCounts, SampleKind,
    SampleSummary,
};
pub use error::{Error, ErrorClass, Result, StageExt};
pub use gpd::{
    fit_gpd, fit_gpd_with, fit_tail, gpd_loglik, select_threshold, FitOptions, GpdEstimate, GpdFit,
};
pub use invert::{
    choose_grid, estimate_moments, estimate_moments_numeric, invert_cdf, invert_distribution,
    invert_pdf, linspace, quantiles, Diagnostics, DistributionResult, Grid, InversionOptions,
    NewtonOptions,
};
pub use parametric::{
    make_frequency_model, make_severity_cf, make_severity_cf_with_nodes, FrequencyFamily,
    FrequencyModel, SeverityParams,
};
pub use quadrature::{cf_from_halfline_pdf, cf_on_ray, ContourHint, GaussLegendre, HalfLineRule};
pub use simulate::{
    ks_distance, simulate_aggregate, FrequencySource, SeveritySource, SimulationSpec,
};
