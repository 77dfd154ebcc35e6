//! Claim file ingestion, run configuration, the end-to-end pipeline and
//! report output.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::compose::{compound_cf, smooth_cf, tail_mixture_cf};
use crate::empirical::{empirical_cf, empirical_pgf, ClaimSample, SampleKind, SampleSummary};
use crate::error::{Error, Result, StageExt};
use crate::gpd::{fit_tail, GpdFit};
use crate::invert::{invert_distribution, linspace, DistributionResult, InversionOptions};
use crate::parametric::{
    make_frequency_model, make_severity_cf, FrequencyFamily, FrequencyModel, SeverityParams,
};

pub const DANISH_SEVERITY_FILE: &str =
    concat!(env!("CARGO_MANIFEST_DIR"), "/data/danish_severity.txt");
pub const DANISH_FREQUENCY_FILE: &str =
    concat!(env!("CARGO_MANIFEST_DIR"), "/data/danish_frequency.txt");

/// Reads one number per line. A first line that does not parse is taken as
/// a header; blank lines are ignored; CRLF endings are accepted.
pub fn load_claims(path: impl AsRef<Path>, kind: SampleKind) -> Result<ClaimSample> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut values = Vec::new();
    let mut seen_line = false;
    for (k, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let first = !seen_line;
        seen_line = true;
        match line.parse::<f64>() {
            Ok(v) if v.is_finite() => values.push(v),
            Ok(v) => {
                return Err(Error::Ingestion {
                    path: path.to_path_buf(),
                    line: k + 1,
                    message: format!("value {v} is not finite"),
                })
            }
            Err(_) if first => log::debug!("{}: header {line:?}", path.display()),
            Err(_) => {
                return Err(Error::Ingestion {
                    path: path.to_path_buf(),
                    line: k + 1,
                    message: format!("cannot parse {line:?} as a number"),
                })
            }
        }
    }
    let sample = ClaimSample::new(values, kind).map_err(|e| match e {
        Error::InvalidArgument(m) => Error::Validation(format!("{}: {m}", path.display())),
        other => other,
    })?;
    let s = sample.summary();
    log::info!(
        "{}: {} values, mean {:.4}, sd {:.4}, min {}, max {}",
        path.display(),
        s.count,
        s.mean,
        s.sd,
        s.min,
        s.max
    );
    Ok(sample)
}

/// Where the claim counts come from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FrequencySource {
    File { file: PathBuf },
    Counts { counts: Vec<f64> },
    Family(FrequencyFamily),
}

/// Where the claim amounts come from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SeveritySource {
    File { file: PathBuf },
    Family(SeverityParams),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl GridSpec {
    pub fn points(&self) -> Vec<f64> {
        linspace(self.min, self.max, self.count)
    }
}

/// `min:max:count`.
impl FromStr for GridSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let bad = || Error::invalid(format!("grid {s:?} is not min:max:count"));
        if parts.len() != 3 {
            return Err(bad());
        }
        Ok(GridSpec {
            min: parts[0].trim().parse().map_err(|_| bad())?,
            max: parts[1].trim().parse().map_err(|_| bad())?,
            count: parts[2].trim().parse().map_err(|_| bad())?,
        })
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    #[default]
    Text,
    Json,
    Csv,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "text" => Ok(ReportFormat::Text),
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            _ => Err(Error::invalid(format!(
                "unknown format {s:?}; expected text, json or csv"
            ))),
        }
    }
}

/// Complete description of one aggregate loss computation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub frequency: FrequencySource,
    pub severity: SeveritySource,
    /// Body probability of the GPD tail split; enables the semi-parametric
    /// severity.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gpd_tail: Option<f64>,
    #[serde(default)]
    pub probs: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSpec>,
    #[serde(default)]
    pub options: InversionOptions,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub smooth: Option<f64>,
    #[serde(default)]
    pub format: ReportFormat,
    /// Unit label for losses, carried into reports only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unit: Option<String>,
}

impl RunConfig {
    pub fn new(frequency: FrequencySource, severity: SeveritySource) -> Self {
        RunConfig {
            frequency,
            severity,
            gpd_tail: None,
            probs: Vec::new(),
            grid: None,
            options: InversionOptions::default(),
            smooth: None,
            format: ReportFormat::Text,
            unit: None,
        }
    }

    /// Parses a TOML file. Relative data paths are resolved against the
    /// directory of the file.
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut cfg: RunConfig = toml::from_str(&text)
            .map_err(|e| Error::Validation(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        if let FrequencySource::File { file } = &mut cfg.frequency {
            if file.is_relative() {
                *file = base.join(&*file);
            }
        }
        if let SeveritySource::File { file } = &mut cfg.severity {
            if file.is_relative() {
                *file = base.join(&*file);
            }
        }
        Ok(cfg)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Validation(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(p) = self.probs.iter().find(|p| !(**p > 0.0 && **p < 1.0)) {
            return Err(Error::Validation(format!(
                "probability {p} is outside (0, 1)"
            )));
        }
        if let Some(g) = &self.grid {
            if g.count < 2 || !(g.min.is_finite() && g.max.is_finite() && g.min < g.max) {
                return Err(Error::Validation(format!(
                    "loss grid needs min < max and at least 2 points, got {}:{}:{}",
                    g.min, g.max, g.count
                )));
            }
        }
        if let Some(p) = self.gpd_tail {
            if !(p > 0.0 && p < 1.0) {
                return Err(Error::Validation(format!(
                    "tail split p = {p} is outside (0, 1)"
                )));
            }
            if !matches!(self.severity, SeveritySource::File { .. }) {
                return Err(Error::Validation(
                    "a GPD tail split needs an observed severity sample".into(),
                ));
            }
        }
        if let Some(s) = self.smooth {
            if !(s.is_finite() && s >= 0.0) {
                return Err(Error::Validation(format!(
                    "smoothing sigma {s} must be >= 0"
                )));
            }
        }
        self.options
            .validate()
            .map_err(|e| Error::Validation(e.to_string()))
    }
}

/// Output of [`run_compute`] and content of every report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub result: DistributionResult,
    pub options: InversionOptions,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gpd_fit: Option<GpdFit>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub smoothing: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unit: Option<String>,
}

pub fn frequency_model(source: &FrequencySource) -> Result<FrequencyModel> {
    match source {
        FrequencySource::File { file } => empirical_pgf(&load_claims(file, SampleKind::Frequency)?),
        FrequencySource::Counts { counts } => empirical_pgf(
            &ClaimSample::counts(counts.clone()).map_err(|e| Error::Validation(e.to_string()))?,
        ),
        FrequencySource::Family(f) => make_frequency_model(f.clone()),
    }
}

/// Builds the aggregate CF, inverts it and collects the report.
pub fn run_compute(cfg: &RunConfig) -> Result<Report> {
    cfg.validate()?;
    let freq = frequency_model(&cfg.frequency).stage("frequency")?;

    let mut gpd_fit = None;
    let severity = match &cfg.severity {
        SeveritySource::File { file } => {
            let sample = load_claims(file, SampleKind::Severity).stage("severity")?;
            match cfg.gpd_tail {
                Some(p) => {
                    let fit = fit_tail(&sample, p).stage("gpd tail")?;
                    log::info!(
                        "GPD tail above {:.6}: xi {:.6}, sigma {:.6} ({} excesses)",
                        fit.theta,
                        fit.xi,
                        fit.sigma,
                        fit.n_excesses
                    );
                    gpd_fit = Some(fit);
                    tail_mixture_cf(&sample, p, &fit).stage("gpd tail")?
                }
                None => empirical_cf(&sample).stage("severity")?,
            }
        }
        SeveritySource::Family(p) => make_severity_cf(*p).stage("severity")?,
    };

    let mut cf = compound_cf(&freq, &severity);
    if let Some(s) = cfg.smooth {
        cf = smooth_cf(&cf, s).stage("smoothing")?;
    }
    let options = InversionOptions {
        is_compound: true,
        ..cfg.options
    };
    let xs = cfg.grid.map(|g| g.points());
    let result =
        invert_distribution(&cf, xs.as_deref(), &cfg.probs, &options).stage("inversion")?;
    Ok(Report {
        result,
        options,
        gpd_fit,
        smoothing: cfg.smooth,
        unit: cfg.unit.clone(),
    })
}

pub fn render_report(report: &Report, format: ReportFormat) -> Result<String> {
    match format {
        ReportFormat::Json => serde_json::to_string_pretty(report)
            .map_err(|e| Error::NumericFailure(format!("cannot serialize report: {e}"))),
        ReportFormat::Csv => {
            let r = &report.result;
            let mut out = String::from("x,pdf,cdf\n");
            for ((x, p), c) in r.x_grid.iter().zip(&r.pdf).zip(&r.cdf) {
                let _ = writeln!(out, "{x},{p},{c}");
            }
            Ok(out)
        }
        ReportFormat::Text => Ok(render_text(report)),
    }
}

fn render_text(report: &Report) -> String {
    let r = &report.result;
    let d = &r.diagnostics;
    let unit = report
        .unit
        .as_deref()
        .map(|u| format!(" [{u}]"))
        .unwrap_or_default();
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:>16} {:>16} {:>12}",
        format!("loss{unit}"),
        "pdf",
        "cdf"
    );
    for ((x, p), c) in r.x_grid.iter().zip(&r.pdf).zip(&r.cdf) {
        let _ = writeln!(out, "{x:>16.6} {p:>16.9e} {c:>12.9}");
    }
    if !r.probs.is_empty() {
        let _ = writeln!(out, "\nvalue at risk{unit}");
        for (p, q) in r.probs.iter().zip(&r.quantiles) {
            let _ = writeln!(out, "  p = {p:<8} VaR = {q:.6}");
        }
    }
    let _ = writeln!(
        out,
        "\nmean {:.6}  variance {:.6}",
        r.mean_estimate, r.var_estimate
    );
    if let Some(f) = &report.gpd_fit {
        let _ = writeln!(
            out,
            "gpd tail: p {} theta {:.6} xi {:.6} sigma {:.6} ({} excesses)",
            f.p, f.theta, f.xi, f.sigma, f.n_excesses
        );
    }
    let g = &d.grid;
    let _ = writeln!(
        out,
        "grid: A {:.6} B {:.6} delta {:.6e} N {} T {:.6}{}",
        g.a,
        g.b,
        g.delta,
        g.n,
        g.t_max,
        if g.capped { " (node cap reached)" } else { "" }
    );
    let _ = writeln!(
        out,
        "tail |cf(T)/T| {:.3e}; clamped cdf values {}; max raw cdf decrease {:.3e}; \
         negative pdf values {}",
        g.tail_magnitude, d.clamped_cdf, d.max_cdf_violation, d.negative_pdf
    );
    if let Some(p0) = d.zero_atom {
        let _ = writeln!(out, "atom at zero {p0:.6e}");
    }
    if !d.newton_iterations.is_empty() {
        let _ = writeln!(
            out,
            "newton iterations {:?}; bisection fallbacks {}",
            d.newton_iterations, d.bisection_fallbacks
        );
    }
    out
}

/// Writes the report to `dest`, or to standard output when `None`.
pub fn write_report(report: &Report, format: ReportFormat, dest: Option<&Path>) -> Result<()> {
    let text = render_report(report, format)?;
    match dest {
        Some(path) => fs::write(path, text).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        }),
        None => {
            use std::io::Write;
            std::io::stdout()
                .write_all(text.as_bytes())
                .map_err(|source| Error::Io {
                    path: PathBuf::from("<stdout>"),
                    source,
                })
        }
    }
}

/// Parses `family:p1,p2,...`, e.g. `poisson:10` or `gpd:0.5,2,0`.
pub fn parse_frequency(spec: &str) -> Result<FrequencyModel> {
    let (name, args) = split_family(spec)?;
    let need = |n: usize| check_arity(spec, &args, n);
    let family = match name.as_str() {
        "dirac" => {
            need(1)?;
            FrequencyFamily::Dirac { mu: args[0] }
        }
        "binomial" => {
            need(2)?;
            if args[0] < 0.0 || args[0].fract() != 0.0 || args[0] > u32::MAX as f64 {
                return Err(Error::param("n", args[0], "n a nonnegative integer"));
            }
            FrequencyFamily::Binomial {
                n: args[0] as u32,
                p: args[1],
            }
        }
        "negative-binomial" | "negbin" => {
            need(2)?;
            FrequencyFamily::NegativeBinomial {
                r: args[0],
                p: args[1],
            }
        }
        "poisson" => {
            need(1)?;
            FrequencyFamily::Poisson { lambda: args[0] }
        }
        _ => {
            return Err(Error::invalid(format!(
                "unknown frequency family {name:?}; expected dirac, binomial, \
                 negative-binomial or poisson"
            )))
        }
    };
    make_frequency_model(family)
}

pub fn parse_severity(spec: &str) -> Result<SeverityParams> {
    let (name, args) = split_family(spec)?;
    let need = |n: usize| check_arity(spec, &args, n);
    match name.as_str() {
        "exponential" | "exp" => {
            need(1)?;
            SeverityParams::exponential(args[0])
        }
        "gamma" => {
            need(2)?;
            SeverityParams::gamma(args[0], args[1])
        }
        "lognormal" => {
            need(2)?;
            SeverityParams::lognormal(args[0], args[1])
        }
        "loglogistic" => {
            need(2)?;
            SeverityParams::loglogistic(args[0], args[1])
        }
        "pareto-i" | "pareto1" => {
            need(2)?;
            SeverityParams::pareto_i(args[0], args[1])
        }
        "pareto-ii" | "pareto2" | "lomax" => {
            need(2)?;
            SeverityParams::pareto_ii(args[0], args[1])
        }
        "gpd" => {
            if args.len() == 2 {
                SeverityParams::gpd(args[0], args[1], 0.0)
            } else {
                need(3)?;
                SeverityParams::gpd(args[0], args[1], args[2])
            }
        }
        _ => Err(Error::invalid(format!(
            "unknown severity family {name:?}; expected exponential, gamma, lognormal, \
             loglogistic, pareto-i, pareto-ii or gpd"
        ))),
    }
}

fn split_family(spec: &str) -> Result<(String, Vec<f64>)> {
    let (name, rest) = spec
        .split_once(':')
        .ok_or_else(|| Error::invalid(format!("{spec:?} is not family:params")))?;
    let args = rest
        .split(',')
        .map(|a| {
            a.trim()
                .parse::<f64>()
                .map_err(|_| Error::invalid(format!("parameter {a:?} in {spec:?} is not a number")))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((name.trim().to_ascii_lowercase(), args))
}

fn check_arity(spec: &str, args: &[f64], n: usize) -> Result<()> {
    if args.len() == n {
        Ok(())
    } else {
        Err(Error::invalid(format!(
            "{spec:?} needs {n} parameter(s), got {}",
            args.len()
        )))
    }
}

/// Probabilities of the Danish value-at-risk table.
pub const DANISH_PROBS: [f64; 3] = [0.9, 0.99, 0.999];

/// The Danish fire loss pipelines: the nonparametric compound empirical
/// model, or with `tail = Some(p)` the semi-parametric model whose severity
/// has a GPD tail above the `p`-quantile.
pub fn danish_config(tail: Option<f64>) -> RunConfig {
    let mut cfg = RunConfig::new(
        FrequencySource::File {
            file: DANISH_FREQUENCY_FILE.into(),
        },
        SeveritySource::File {
            file: DANISH_SEVERITY_FILE.into(),
        },
    );
    cfg.probs = DANISH_PROBS.to_vec();
    cfg.unit = Some("million DKK".into());
    match tail {
        None => {
            cfg.grid = Some(GridSpec {
                min: 0.0,
                max: 2000.0,
                count: 201,
            });
        }
        Some(p) => {
            cfg.gpd_tail = Some(p);
            cfg.grid = Some(GridSpec {
                min: 0.0,
                max: 2500.0,
                count: 201,
            });
            cfg.options.quadrature_n = 1 << 16;
            cfg.options.six_sigma = 15.0;
        }
    }
    cfg
}

/// Summary statistics of a sample file, with no further processing.
pub fn describe(path: impl AsRef<Path>, kind: SampleKind) -> Result<SampleSummary> {
    Ok(load_claims(path, kind)?.summary())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn temp_file(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    #[test]
    fn single_count() {
        let f = temp_file("5\n");
        let s = load_claims(f.path(), SampleKind::Frequency).unwrap();
        assert_eq!(s.values(), &[5.0]);
    }

    #[test]
    fn header_and_crlf() {
        let f = temp_file("loss\r\n1.5\r\n\r\n2.5\r\n");
        let s = load_claims(f.path(), SampleKind::Severity).unwrap();
        assert_eq!(s.values(), &[1.5, 2.5]);
    }

    #[test]
    fn bad_line_reports_line_number() {
        let f = temp_file("loss\n1.0\nabc\n");
        let err = load_claims(f.path(), SampleKind::Severity).unwrap_err();
        assert!(matches!(err, Error::Ingestion { line: 3, .. }), "{err}");
    }

    #[test]
    fn constraint_violations_are_validation_errors() {
        let f = temp_file("-1.0\n");
        let err = load_claims(f.path(), SampleKind::Severity).unwrap_err();
        assert!(matches!(err, Error::Validation(_)), "{err}");
        let f = temp_file("2.5\n");
        let err = load_claims(f.path(), SampleKind::Frequency).unwrap_err();
        assert!(matches!(err, Error::Validation(_)), "{err}");
    }

    #[test]
    fn missing_file_is_io() {
        let err = load_claims("/nonexistent/claims.txt", SampleKind::Severity).unwrap_err();
        assert!(matches!(err, Error::Io { .. }), "{err}");
    }

    #[test]
    fn bundled_danish_files() {
        let s = load_claims(DANISH_SEVERITY_FILE, SampleKind::Severity).unwrap();
        let sum = s.summary();
        assert_eq!(sum.count, 2167);
        assert!(
            (sum.mean - 3.39).abs() < 0.01 && (sum.sd - 8.51).abs() < 0.01,
            "{sum:?}"
        );
        let f = load_claims(DANISH_FREQUENCY_FILE, SampleKind::Frequency).unwrap();
        assert_eq!(f.len(), 11);
        assert_eq!(f.summary().mean, 197.0);
    }

    #[test]
    fn family_strings() {
        assert_eq!(
            parse_frequency("poisson:10").unwrap(),
            FrequencyModel::poisson(10.0).unwrap()
        );
        assert_eq!(
            parse_severity("gpd:0.5,2").unwrap(),
            SeverityParams::gpd(0.5, 2.0, 0.0).unwrap()
        );
        assert!(parse_severity("gamma:1").is_err());
        assert!(parse_severity("weibull:1,2").is_err());
        assert!(parse_frequency("poisson").is_err());
        assert!(parse_frequency("binomial:2.5,0.3").is_err());
        assert_eq!(
            "0:2000:201".parse::<GridSpec>().unwrap(),
            GridSpec {
                min: 0.0,
                max: 2000.0,
                count: 201
            }
        );
        assert!("0:1".parse::<GridSpec>().is_err());
    }

    #[test]
    fn degenerate_pipeline_is_exponential() {
        let mut cfg = RunConfig::new(
            FrequencySource::Family(FrequencyFamily::Dirac { mu: 1.0 }),
            SeveritySource::Family(SeverityParams::exponential(1.0).unwrap()),
        );
        cfg.probs = vec![1.0 - (-1f64).exp()];
        let r = run_compute(&cfg).unwrap();
        assert!(r.options.is_compound);
        // The compound window (0, 7) wraps the e^{-7} tail mass around.
        assert!(
            (r.result.quantiles[0] - 1.0).abs() < 2e-3,
            "{:?}",
            r.result.quantiles
        );

        cfg.options.six_sigma = 10.0;
        let r = run_compute(&cfg).unwrap();
        assert!(
            (r.result.quantiles[0] - 1.0).abs() < 1e-4,
            "{:?}",
            r.result.quantiles
        );
    }

    #[test]
    fn reports() {
        let mut cfg = RunConfig::new(
            FrequencySource::Family(FrequencyFamily::Poisson { lambda: 3.0 }),
            SeveritySource::Family(SeverityParams::gamma(2.0, 1.0).unwrap()),
        );
        cfg.grid = Some(GridSpec {
            min: 0.0,
            max: 20.0,
            count: 11,
        });
        let r = run_compute(&cfg).unwrap();

        let text = render_report(&r, ReportFormat::Text).unwrap();
        assert!(!text.contains("value at risk"));
        let csv = render_report(&r, ReportFormat::Csv).unwrap();
        assert_eq!(csv.lines().count(), 12);
        assert_eq!(csv.lines().next(), Some("x,pdf,cdf"));

        cfg.probs = vec![0.5, 0.99];
        let r = run_compute(&cfg).unwrap();
        let json = render_report(&r, ReportFormat::Json).unwrap();
        let back: Report = serde_json::from_str(&json).unwrap();
        assert_eq!(back, r);
        assert!(render_report(&r, ReportFormat::Text)
            .unwrap()
            .contains("value at risk"));
    }

    #[test]
    fn config_round_trip_and_relative_paths() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("n.txt"), "3\n4\n").unwrap();
        fs::write(
            dir.path().join("run.toml"),
            r#"
probs = [0.9]
smooth = 0.5
format = "json"

[frequency]
file = "n.txt"

[severity]
family = "gamma"
shape = 2.0
rate = 1.0

[grid]
min = 0.0
max = 10.0
count = 5

[options]
six_sigma = 8.0
"#,
        )
        .unwrap();
        let cfg = RunConfig::from_file(dir.path().join("run.toml")).unwrap();
        assert_eq!(
            cfg.frequency,
            FrequencySource::File {
                file: dir.path().join("n.txt")
            }
        );
        assert_eq!(cfg.options.six_sigma, 8.0);
        assert_eq!(cfg.options.quadrature_n, 1024);
        assert_eq!(cfg.format, ReportFormat::Json);
        let back: RunConfig = toml::from_str(&cfg.to_toml().unwrap()).unwrap();
        assert_eq!(back, cfg);
        run_compute(&cfg).unwrap();

        let counts: RunConfig = toml::from_str(
            "[frequency]\ncounts = [1, 2]\n[severity]\nfamily = \"exponential\"\nrate = 1.0\n",
        )
        .unwrap();
        assert_eq!(
            counts.frequency,
            FrequencySource::Counts {
                counts: vec![1.0, 2.0]
            }
        );
    }

    #[test]
    fn config_validation() {
        let mut cfg = RunConfig::new(
            FrequencySource::Family(FrequencyFamily::Poisson { lambda: 3.0 }),
            SeveritySource::Family(SeverityParams::exponential(1.0).unwrap()),
        );
        cfg.gpd_tail = Some(0.9);
        assert!(matches!(run_compute(&cfg), Err(Error::Validation(_))));
        cfg.gpd_tail = None;
        cfg.probs = vec![1.5];
        assert!(matches!(run_compute(&cfg), Err(Error::Validation(_))));
    }
}
