use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use cfloss::io::{
    danish_config, frequency_model, load_claims, parse_frequency, parse_severity, run_compute,
    write_report, FrequencySource, GridSpec, ReportFormat, RunConfig, SeveritySource,
};
use cfloss::simulate::{self, SimulationSpec};
use cfloss::{
    compound_cf, empirical_cf, estimate_moments_numeric, fit_tail, make_severity_cf, ClaimSample,
    Error, ErrorClass, SampleKind,
};

/// Aggregate loss distributions by inversion of compound characteristic
/// functions.
#[derive(Debug, Parser)]
#[command(name = "cfloss", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build the compound CF from a frequency and a severity and invert it.
    Compute(ComputeArgs),
    /// Select a threshold and fit a generalized Pareto tail to severities.
    FitGpd(FitArgs),
    /// Mean and variance of the compound loss from its CF by finite differences.
    Moments(ModelArgs),
    /// Reproduce the Danish fire loss study, nonparametric and with a GPD tail.
    DemoDanish(DemoArgs),
    /// Monte Carlo quantiles of the compound loss, for cross-checking.
    Simulate(SimulateArgs),
}

#[derive(Debug, Args)]
struct ModelArgs {
    /// Claim counts per period, one per line.
    #[arg(long)]
    frequency_file: Option<PathBuf>,
    /// Individual claim amounts, one per line.
    #[arg(long)]
    severity_file: Option<PathBuf>,
    /// Parametric frequency, e.g. `poisson:10`.
    #[arg(long)]
    freq: Option<String>,
    /// Parametric severity, e.g. `gpd:0.5,2,0`.
    #[arg(long)]
    sev: Option<String>,
    /// Finite-difference step.
    #[arg(long, default_value_t = 1e-4)]
    step: f64,
}

#[derive(Debug, Args)]
struct ComputeArgs {
    /// TOML run configuration; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    frequency_file: Option<PathBuf>,
    #[arg(long)]
    severity_file: Option<PathBuf>,
    #[arg(long)]
    freq: Option<String>,
    #[arg(long)]
    sev: Option<String>,
    /// Comma separated probabilities for the value at risk.
    #[arg(long, value_delimiter = ',')]
    prob: Option<Vec<f64>>,
    /// Loss grid as `min:max:count`.
    #[arg(long)]
    grid: Option<GridSpec>,
    /// Body probability of a GPD tail split of the severity sample.
    #[arg(long)]
    gpd_tail: Option<f64>,
    /// Standard deviation of a Gaussian kernel convolved with the loss.
    #[arg(long)]
    smooth: Option<f64>,
    /// Starting number of quadrature intervals.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    six_sigma: Option<f64>,
    /// Tail tolerance on |cf(T)/T|.
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    format: Option<ReportFormat>,
}

#[derive(Debug, Args)]
struct FitArgs {
    #[arg(long)]
    severity_file: PathBuf,
    /// Probability level of the threshold.
    #[arg(long, default_value_t = 0.95)]
    gpd_tail: f64,
    #[arg(long, default_value = "text")]
    format: ReportFormat,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct DemoArgs {
    #[arg(long, default_value = "text")]
    format: ReportFormat,
    /// Directory for the two reports; standard output when absent.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long, value_delimiter = ',', default_value = "0.9,0.99,0.999")]
    prob: Vec<f64>,
    #[arg(long = "n-sims", default_value_t = 100_000)]
    n_sims: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e.class() {
        ErrorClass::Validation => 2,
        ErrorClass::Numeric => 3,
        ErrorClass::Io => 4,
    }
}

fn run(command: Command) -> cfloss::Result<()> {
    match command {
        Command::Compute(args) => compute(args),
        Command::FitGpd(args) => fit(args),
        Command::Moments(args) => moments(args),
        Command::DemoDanish(args) => demo(args),
        Command::Simulate(args) => simulate(args),
    }
}

fn frequency_source(
    file: Option<PathBuf>,
    freq: Option<&str>,
) -> cfloss::Result<Option<FrequencySource>> {
    match (file, freq) {
        (Some(_), Some(_)) => Err(Error::Validation(
            "give either --frequency-file or --freq, not both".into(),
        )),
        (Some(file), None) => Ok(Some(FrequencySource::File { file })),
        (None, Some(s)) => Ok(Some(FrequencySource::Family(
            parse_frequency(s)?.family().clone(),
        ))),
        (None, None) => Ok(None),
    }
}

fn severity_source(
    file: Option<PathBuf>,
    sev: Option<&str>,
) -> cfloss::Result<Option<SeveritySource>> {
    match (file, sev) {
        (Some(_), Some(_)) => Err(Error::Validation(
            "give either --severity-file or --sev, not both".into(),
        )),
        (Some(file), None) => Ok(Some(SeveritySource::File { file })),
        (None, Some(s)) => Ok(Some(SeveritySource::Family(parse_severity(s)?))),
        (None, None) => Ok(None),
    }
}

fn compute(args: ComputeArgs) -> cfloss::Result<()> {
    let freq = frequency_source(args.frequency_file, args.freq.as_deref())?;
    let sev = severity_source(args.severity_file, args.sev.as_deref())?;
    let mut cfg = match args.config {
        Some(path) => {
            let mut cfg = RunConfig::from_file(path)?;
            if let Some(f) = freq {
                cfg.frequency = f;
            }
            if let Some(s) = sev {
                cfg.severity = s;
            }
            cfg
        }
        None => match (freq, sev) {
            (Some(f), Some(s)) => RunConfig::new(f, s),
            _ => {
                return Err(Error::Validation(
                    "compute needs a frequency and a severity (flags or --config)".into(),
                ))
            }
        },
    };
    if let Some(p) = args.prob {
        cfg.probs = p;
    }
    if args.grid.is_some() {
        cfg.grid = args.grid;
    }
    if args.gpd_tail.is_some() {
        cfg.gpd_tail = args.gpd_tail;
    }
    if args.smooth.is_some() {
        cfg.smooth = args.smooth;
    }
    if let Some(n) = args.n {
        cfg.options.quadrature_n = n;
    }
    if let Some(k) = args.six_sigma {
        cfg.options.six_sigma = k;
    }
    if let Some(e) = args.epsilon {
        cfg.options.tail_epsilon = e;
    }
    if let Some(f) = args.format {
        cfg.format = f;
    }
    let report = run_compute(&cfg)?;
    write_report(&report, cfg.format, args.output.as_deref())
}

fn fit(args: FitArgs) -> cfloss::Result<()> {
    let sample = load_claims(&args.severity_file, SampleKind::Severity)?;
    let fit = fit_tail(&sample, args.gpd_tail)?;
    let text = match args.format {
        ReportFormat::Json => serde_json::to_string_pretty(&fit).expect("fit serializes") + "\n",
        ReportFormat::Csv => format!(
            "p,theta,xi,sigma,n_excesses,log_lik\n{},{},{},{},{},{}\n",
            fit.p, fit.theta, fit.xi, fit.sigma, fit.n_excesses, fit.log_lik
        ),
        ReportFormat::Text => format!(
            "threshold theta  {:.6} (p = {})\nexcesses         {}\nshape xi         {:.6}\n\
             scale sigma      {:.6}\nlog-likelihood   {:.6}\n",
            fit.theta, fit.p, fit.n_excesses, fit.xi, fit.sigma, fit.log_lik
        ),
    };
    emit(&text, args.output.as_deref())
}

fn model_cf(args: &ModelArgs) -> cfloss::Result<cfloss::CharFn> {
    let freq = frequency_source(args.frequency_file.clone(), args.freq.as_deref())?
        .ok_or_else(|| Error::Validation("a frequency is required".into()))?;
    let sev = match severity_source(args.severity_file.clone(), args.sev.as_deref())? {
        Some(SeveritySource::File { file }) => {
            empirical_cf(&load_claims(file, SampleKind::Severity)?)?
        }
        Some(SeveritySource::Family(p)) => make_severity_cf(p)?,
        None => return Err(Error::Validation("a severity is required".into())),
    };
    Ok(compound_cf(&frequency_model(&freq)?, &sev))
}

fn moments(args: ModelArgs) -> cfloss::Result<()> {
    let cf = model_cf(&args)?;
    let m = estimate_moments_numeric(&cf, args.step)?;
    let mut text = format!(
        "finite differences (h = {}): mean {:.9}  variance {:.9}  sd {:.9}\n",
        args.step,
        m.mean,
        m.variance,
        m.variance.max(0.0).sqrt()
    );
    if let Some(h) = cf.moments() {
        text += &format!(
            "closed form:                  mean {:.9}  variance {:.9}  sd {:.9}\n",
            h.mean,
            h.variance,
            h.variance.sqrt()
        );
    }
    emit(&text, None)
}

fn demo(args: DemoArgs) -> cfloss::Result<()> {
    if let Some(dir) = &args.output {
        std::fs::create_dir_all(dir).map_err(|source| Error::Io {
            path: dir.clone(),
            source,
        })?;
    }
    let ext = match args.format {
        ReportFormat::Text => "txt",
        ReportFormat::Json => "json",
        ReportFormat::Csv => "csv",
    };
    for (name, tail) in [("nonparametric", None), ("semiparametric", Some(0.95))] {
        let report = run_compute(&danish_config(tail))?;
        match &args.output {
            Some(dir) => write_report(
                &report,
                args.format,
                Some(&dir.join(format!("danish_{name}.{ext}"))),
            )?,
            None => {
                println!("== Danish fire losses, {name} ==");
                write_report(&report, args.format, None)?;
                println!();
            }
        }
    }
    Ok(())
}

fn simulate(args: SimulateArgs) -> cfloss::Result<()> {
    let m = &args.model;
    let frequency = match frequency_source(m.frequency_file.clone(), m.freq.as_deref())? {
        Some(FrequencySource::File { file }) => {
            simulate::FrequencySource::Sample(load_claims(file, SampleKind::Frequency)?)
        }
        Some(FrequencySource::Counts { counts }) => {
            simulate::FrequencySource::Sample(ClaimSample::counts(counts)?)
        }
        Some(FrequencySource::Family(f)) => {
            simulate::FrequencySource::Model(cfloss::make_frequency_model(f)?)
        }
        None => return Err(Error::Validation("a frequency is required".into())),
    };
    let severity = match severity_source(m.severity_file.clone(), m.sev.as_deref())? {
        Some(SeveritySource::File { file }) => {
            simulate::SeveritySource::Sample(load_claims(file, SampleKind::Severity)?)
        }
        Some(SeveritySource::Family(p)) => simulate::SeveritySource::Params(p),
        None => return Err(Error::Validation("a severity is required".into())),
    };
    if let Some(p) = args.prob.iter().find(|p| !(**p > 0.0 && **p < 1.0)) {
        return Err(Error::Validation(format!(
            "probability {p} is outside (0, 1)"
        )));
    }
    let mut draws = simulate::simulate_aggregate(&SimulationSpec {
        frequency,
        severity,
        n_sims: args.n_sims,
        seed: args.seed,
    })?;
    draws.sort_by(f64::total_cmp);
    let n = draws.len() as f64;
    let mean = draws.iter().sum::<f64>() / n;
    let var = draws.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    let mut text = format!(
        "{} draws (seed {}): mean {:.6}  variance {:.6}\n",
        draws.len(),
        args.seed,
        mean,
        var
    );
    for p in &args.prob {
        // smallest order statistic with empirical CDF >= p
        let k = ((p * n).ceil() as usize).clamp(1, draws.len()) - 1;
        text += &format!("  p = {p:<8} VaR = {:.6}\n", draws[k]);
    }
    emit(&text, None)
}

fn emit(text: &str, dest: Option<&std::path::Path>) -> cfloss::Result<()> {
    match dest {
        Some(path) => std::fs::write(path, text).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
