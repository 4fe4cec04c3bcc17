//! Command-line surface: dataset fitting, synthetic studies, prior
//! correlation histograms, prior density tables, and standalone shape
//! fitting, all emitting plain CSV.
//!
//! Exit codes: 0 success, 2 usage error, 3 data error, 4 numerical
//! failure.  Every failure prints one machine-parsable line to stderr of
//! the form `error[class]: message`.
//!
//! All metric outputs are deterministic for a given input and seed; wall
//! clock measurements are isolated in `timings.csv` so the rest of a
//! study report can be compared byte for byte across runs.

use std::collections::HashMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use nalgebra::{DMatrix, DVector};

use crate::data::{DesignData, GroupLayout};
use crate::error::{Error, Result};
use crate::gibbs::{run_chain, DeltaShapeMode, HyperConfig, LocalShapeMode, PosteriorDraws};
use crate::prior::{
    corr_distribution, log_density_log_scale, log_density_scale, HyperpriorScenario, PriorFamily,
    ShrinkagePriorKind,
};
use crate::randdist::RngStream;
use crate::shape::{gibbs_pair, ShapePairConfig};
use crate::sim::{run_study, Estimator, SimScenario, StudyConfig};

#[derive(Parser)]
#[command(
    name = "grasp",
    version,
    about = "Grouped adaptive shrinkage regression: sampler, priors, and study harness"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit the shrinkage regression to a CSV dataset.
    Fit(FitArgs),
    /// Run a synthetic comparison study and write its report.
    Simulate(SimulateArgs),
    /// Sample the induced within-group prior correlation into a histogram.
    PriorCorr(PriorCorrArgs),
    /// Tabulate a shrinkage prior density over a grid.
    PriorDensity(PriorDensityArgs),
    /// Fit Beta shape parameters to a single column of values in (0, 1).
    ShapeFit(ShapeFitArgs),
}

#[derive(Args)]
struct FitArgs {
    /// CSV dataset with a header row; all cells numeric.
    #[arg(long)]
    data: PathBuf,
    /// Name of the response column; every other column is a predictor.
    #[arg(long)]
    response: String,
    /// Two-column CSV (column_name, group_id) mapping every predictor to a
    /// group id in 1..G; omit for the ungrouped sampler.
    #[arg(long)]
    groups: Option<PathBuf>,
    #[arg(long, default_value_t = 2000)]
    burnin: usize,
    #[arg(long, default_value_t = 2000)]
    samples: usize,
    #[arg(long, default_value_t = 1)]
    thin: usize,
    #[arg(long, default_value_t = 1)]
    chains: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Pin the group-level left-tail shape: the literal "1/n" or a
    /// positive number.  Requires --groups.
    #[arg(long, value_name = "A")]
    fix_a_delta: Option<String>,
    /// "learn" or "fixed:a,b" for the shape pairs.
    #[arg(long, default_value = "learn")]
    shapes: String,
    /// Output directory for summary.csv and diagnostics.csv.
    #[arg(long)]
    out: PathBuf,
    /// Also write every kept draw to chains.csv.
    #[arg(long)]
    dump_chains: bool,
}

#[derive(Args)]
struct SimulateArgs {
    /// concentrated | distributed | dense | half
    #[arg(long)]
    scenario: String,
    /// Signal-to-noise ratio, > 0.
    #[arg(long)]
    snr: f64,
    #[arg(long)]
    replicates: usize,
    /// Comma-separated list drawn from ols, rasp, grasp_fixed_a_learn_b,
    /// grasp_learn_ab.
    #[arg(long)]
    estimators: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 2000)]
    burnin: usize,
    #[arg(long, default_value_t = 2000)]
    samples: usize,
    #[arg(long, default_value_t = 1)]
    thin: usize,
    /// Output directory for report.csv and timings.csv.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct PriorCorrArgs {
    /// grasp | gigg
    #[arg(long)]
    family: String,
    /// a | b | c | d, or the names adaptive | non_adaptive | uniformish |
    /// mixed.
    #[arg(long)]
    scenario: String,
    #[arg(long, default_value_t = 200_000)]
    draws: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output CSV of histogram bins.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct PriorDensityArgs {
    /// lasso | horseshoe | student-t | beta-prime
    #[arg(long)]
    kind: String,
    /// Comma-separated parameters: none for lasso/horseshoe, dof for
    /// student-t, "a,b" for beta-prime.
    #[arg(long, default_value = "")]
    params: String,
    /// Evaluation grid lo:hi:step.
    #[arg(long, allow_hyphen_values = true)]
    grid: String,
    /// lambda (the scale itself) or xi (its logarithm).
    #[arg(long, default_value = "xi")]
    space: String,
    /// Output CSV of grid point, log density, density.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ShapeFitArgs {
    /// Single-column CSV (header row) of values strictly inside (0, 1).
    #[arg(long)]
    data: PathBuf,
    #[arg(long, default_value_t = 2000)]
    sweeps: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

/// A dispatch failure with its exit-code class.
#[derive(Debug)]
enum CommandError {
    Usage(String),
    Lib(Error),
}

impl From<Error> for CommandError {
    fn from(err: Error) -> Self {
        CommandError::Lib(err)
    }
}

fn usage(message: impl Into<String>) -> CommandError {
    CommandError::Usage(message.into())
}

/// Entry point over the process arguments.
pub fn run() -> i32 {
    run_from(std::env::args_os())
}

/// Testable entry point over explicit arguments (the first is the program
/// name).
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    init_thread_pool();
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { 2 } else { 0 };
            let _ = err.print();
            return code;
        }
    };
    let outcome = match &cli.command {
        Command::Fit(args) => run_fit(args),
        Command::Simulate(args) => run_simulate(args),
        Command::PriorCorr(args) => run_prior_corr(args),
        Command::PriorDensity(args) => run_prior_density(args),
        Command::ShapeFit(args) => run_shape_fit(args),
    };
    match outcome {
        Ok(()) => 0,
        Err(CommandError::Usage(message)) => {
            eprintln!("error[usage]: {message}");
            2
        }
        Err(CommandError::Lib(err)) => {
            if err.is_numerical() {
                eprintln!("error[numerical]: {err}");
                4
            } else {
                eprintln!("error[data]: {err}");
                3
            }
        }
    }
}

/// Cap the worker pool from GRASP_THREADS; silently keeps the existing
/// pool if one was already built.
fn init_thread_pool() {
    if let Ok(value) = std::env::var("GRASP_THREADS") {
        if let Ok(threads) = value.parse::<usize>() {
            if threads >= 1 {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(threads)
                    .build_global();
            }
        }
    }
}

/// Read a CSV with a header row where every cell is numeric.
fn read_numeric_table(path: &Path) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::Data(format!("{}: {e}", path.display())))?;
    let headers: Vec<String> = reader.headers()?.iter().map(|h| h.to_string()).collect();
    if headers.is_empty() {
        return Err(Error::Data(format!("{}: no columns", path.display())));
    }
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        if record.len() != headers.len() {
            return Err(Error::Data(format!(
                "{}: data row {}: expected {} fields, found {}",
                path.display(),
                i + 1,
                headers.len(),
                record.len()
            )));
        }
        let mut row = Vec::with_capacity(headers.len());
        for (j, field) in record.iter().enumerate() {
            let value: f64 = field.parse().map_err(|_| {
                Error::Data(format!(
                    "{}: data row {}, column {}: not a number: {:?}",
                    path.display(),
                    i + 1,
                    headers[j],
                    field
                ))
            })?;
            row.push(value);
        }
        rows.push(row);
    }
    Ok((headers, rows))
}

/// Read the (column_name, group_id) sidecar and produce the layout for
/// `predictors`, validating that ids are 1..G and cover every predictor.
fn read_group_layout(path: &Path, predictors: &[String]) -> Result<GroupLayout> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::Data(format!("{}: {e}", path.display())))?;
    let headers: Vec<String> = reader.headers()?.iter().map(|h| h.to_string()).collect();
    if headers != ["column_name", "group_id"] {
        return Err(Error::Data(format!(
            "{}: expected header \"column_name,group_id\", found {:?}",
            path.display(),
            headers.join(",")
        )));
    }
    let mut mapping: HashMap<String, usize> = HashMap::new();
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        if record.len() != 2 {
            return Err(Error::Data(format!(
                "{}: data row {}: expected 2 fields, found {}",
                path.display(),
                i + 1,
                record.len()
            )));
        }
        let name = record[0].to_string();
        let id: usize = record[1].parse().map_err(|_| {
            Error::Data(format!(
                "{}: data row {}: group id is not a positive integer: {:?}",
                path.display(),
                i + 1,
                &record[1]
            ))
        })?;
        if id == 0 {
            return Err(Error::Data(format!(
                "{}: data row {}: group ids start at 1",
                path.display(),
                i + 1
            )));
        }
        if mapping.insert(name.clone(), id).is_some() {
            return Err(Error::Data(format!(
                "{}: column {name:?} is mapped twice",
                path.display()
            )));
        }
    }
    for name in mapping.keys() {
        if !predictors.iter().any(|p| p == name) {
            return Err(Error::Data(format!(
                "{}: {name:?} is not a predictor column",
                path.display()
            )));
        }
    }
    let mut ids = Vec::with_capacity(predictors.len());
    for predictor in predictors {
        match mapping.get(predictor) {
            Some(&id) => ids.push(id - 1),
            None => {
                return Err(Error::Data(format!(
                    "{}: predictor column {predictor:?} is not mapped to a group",
                    path.display()
                )));
            }
        }
    }
    let seen = ids.iter().copied().collect::<std::collections::BTreeSet<_>>();
    let greatest = *seen.iter().next_back().unwrap();
    if seen.len() != greatest + 1 {
        return Err(Error::Data(format!(
            "{}: group ids must form a contiguous 1..G range",
            path.display()
        )));
    }
    GroupLayout::new(ids)
}

/// Mean, sample SD, and central 95% interval of a draw sequence.
fn summarize(values: &[f64]) -> (f64, f64, f64, f64) {
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n as f64;
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    let sd = if n > 1 {
        (ss / (n - 1) as f64).sqrt()
    } else {
        0.0
    };
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    (
        mean,
        sd,
        quantile_sorted(&sorted, 0.025),
        quantile_sorted(&sorted, 0.975),
    )
}

fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let h = (n - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(n - 1);
    let w = h - lo as f64;
    sorted[lo] * (1.0 - w) + sorted[hi] * w
}

fn write_file(path: &Path, content: &str) -> Result<()> {
    std::fs::write(path, content).map_err(|e| Error::Data(format!("{}: {e}", path.display())))
}

fn ensure_dir(path: &Path) -> Result<()> {
    std::fs::create_dir_all(path).map_err(|e| Error::Data(format!("{}: {e}", path.display())))
}

fn run_fit(args: &FitArgs) -> std::result::Result<(), CommandError> {
    if args.samples == 0 || args.thin == 0 || args.chains == 0 {
        return Err(usage("--samples, --thin, and --chains must be at least 1"));
    }
    let (headers, rows) = read_numeric_table(&args.data)?;
    let response_idx = headers
        .iter()
        .position(|h| *h == args.response)
        .ok_or_else(|| {
            CommandError::Lib(Error::Data(format!(
                "{}: no column named {:?}",
                args.data.display(),
                args.response
            )))
        })?;
    let predictor_idx: Vec<usize> = (0..headers.len()).filter(|&j| j != response_idx).collect();
    if predictor_idx.is_empty() {
        return Err(CommandError::Lib(Error::data(
            "the dataset has no predictor columns",
        )));
    }
    let predictors: Vec<String> = predictor_idx.iter().map(|&j| headers[j].clone()).collect();
    let n = rows.len();
    let p = predictors.len();
    if n < 2 {
        return Err(CommandError::Lib(Error::data(
            "the dataset needs at least two rows",
        )));
    }
    let x = DMatrix::from_fn(n, p, |i, j| rows[i][predictor_idx[j]]);
    let y = DVector::from_fn(n, |i, _| rows[i][response_idx]);

    let grouped = args.groups.is_some();
    let layout = match &args.groups {
        Some(path) => read_group_layout(path, &predictors)?,
        None => GroupLayout::single_group(p)?,
    };
    if args.fix_a_delta.is_some() && !grouped {
        return Err(usage("--fix-a-delta requires --groups"));
    }

    let fixed_shapes = parse_shapes(&args.shapes)?;
    let local_shapes = match fixed_shapes {
        Some((a, b)) => LocalShapeMode::Fixed { a, b },
        None => LocalShapeMode::Learned,
    };
    let delta_shapes = match (&args.fix_a_delta, fixed_shapes) {
        (Some(spec), _) => DeltaShapeMode::FixedALearnB {
            a: parse_fix_a(spec, n)?,
        },
        (None, Some((a, b))) => DeltaShapeMode::Fixed { a, b },
        (None, None) => DeltaShapeMode::Learned,
    };
    let config = HyperConfig {
        grouped,
        local_shapes,
        delta_shapes,
        burnin: args.burnin,
        samples: args.samples,
        thin: args.thin,
        seed: args.seed,
        chains: args.chains,
        ..HyperConfig::default()
    };

    // Name offending columns before the generic standardization check,
    // which only knows indices.
    for j in 0..p {
        let column: Vec<f64> = (0..n).map(|i| x[(i, j)]).collect();
        let mean = column.iter().sum::<f64>() / n as f64;
        let ss: f64 = column.iter().map(|v| (v - mean) * (v - mean)).sum();
        let sd = (ss / (n - 1) as f64).sqrt();
        if !(sd > 1e-12 * mean.abs().max(1.0)) {
            return Err(CommandError::Lib(Error::Data(format!(
                "column {:?} has (numerically) zero variance and cannot be standardized",
                predictors[j]
            ))));
        }
    }

    let data = DesignData::standardize(&x, &y, layout)?;
    let draws = run_chain(&data, &config)?;

    ensure_dir(&args.out)?;
    let kept = draws.beta.nrows();
    let std = &data.standardization;
    // Original-scale coefficient draws plus the implied intercept draws.
    let mut original = vec![vec![0.0f64; kept]; p];
    let mut intercepts = vec![0.0f64; kept];
    for d in 0..kept {
        let mut coefs = Vec::with_capacity(p);
        for j in 0..p {
            let c = std.coef_to_original(j, draws.beta[(d, j)]);
            original[j][d] = c;
            coefs.push(c);
        }
        intercepts[d] = std.intercept(&coefs);
    }

    let mut summary = String::from("coefficient,mean,sd,q2.5,q97.5\n");
    let (mean, sd, lo, hi) = summarize(&intercepts);
    let _ = writeln!(summary, "(intercept),{mean},{sd},{lo},{hi}");
    for j in 0..p {
        let (mean, sd, lo, hi) = summarize(&original[j]);
        let _ = writeln!(summary, "{},{mean},{sd},{lo},{hi}", predictors[j]);
    }
    write_file(&args.out.join("summary.csv"), &summary)?;

    write_file(
        &args.out.join("diagnostics.csv"),
        &render_diagnostics(&draws),
    )?;

    if args.dump_chains {
        let mut chains = String::from("draw,sigma2,tau2");
        for name in &predictors {
            let _ = write!(chains, ",{name}");
        }
        chains.push('\n');
        for d in 0..kept {
            let _ = write!(chains, "{},{},{}", d + 1, draws.sigma2[d], draws.tau2[d]);
            for coef in original.iter() {
                let _ = write!(chains, ",{}", coef[d]);
            }
            chains.push('\n');
        }
        write_file(&args.out.join("chains.csv"), &chains)?;
    }
    Ok(())
}

fn render_diagnostics(draws: &PosteriorDraws) -> String {
    let d = &draws.diagnostics;
    let mut out = String::from("metric,value\n");
    let _ = writeln!(out, "sweeps,{}", d.sweeps);
    let _ = writeln!(out, "kept_draws,{}", d.kept);
    let _ = writeln!(out, "chains,{}", d.chains);
    let _ = writeln!(out, "factorization_failures,{}", d.factorization_failures);
    let _ = writeln!(out, "sigma2_rate_guards,{}", d.sigma2_rate_guards);
    for (name, tally) in [
        ("local_a", d.shape_steps.local_a),
        ("local_b", d.shape_steps.local_b),
        ("delta_a", d.shape_steps.delta_a),
        ("delta_b", d.shape_steps.delta_b),
    ] {
        let _ = writeln!(out, "{name}_attempted,{}", tally.attempted());
        let _ = writeln!(out, "{name}_skipped,{}", tally.skipped);
        let _ = writeln!(out, "{name}_acceptance,{}", tally.acceptance());
    }
    out
}

fn parse_shapes(text: &str) -> std::result::Result<Option<(f64, f64)>, CommandError> {
    if text == "learn" {
        return Ok(None);
    }
    if let Some(rest) = text.strip_prefix("fixed:") {
        let parts: Vec<&str> = rest.split(',').collect();
        if parts.len() == 2 {
            let a: f64 = parts[0]
                .parse()
                .map_err(|_| usage(format!("--shapes: not a number: {:?}", parts[0])))?;
            let b: f64 = parts[1]
                .parse()
                .map_err(|_| usage(format!("--shapes: not a number: {:?}", parts[1])))?;
            if a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite() {
                return Ok(Some((a, b)));
            }
            return Err(usage("--shapes: fixed shapes must be positive"));
        }
    }
    Err(usage(format!(
        "--shapes must be \"learn\" or \"fixed:a,b\", got {text:?}"
    )))
}

fn parse_fix_a(text: &str, n: usize) -> std::result::Result<f64, CommandError> {
    if text == "1/n" {
        return Ok(1.0 / n.max(1) as f64);
    }
    match text.parse::<f64>() {
        Ok(v) if v.is_finite() && v > 0.0 => Ok(v),
        _ => Err(usage(format!(
            "--fix-a-delta must be \"1/n\" or a positive number, got {text:?}"
        ))),
    }
}

fn run_simulate(args: &SimulateArgs) -> std::result::Result<(), CommandError> {
    if args.samples == 0 || args.thin == 0 {
        return Err(usage("--samples and --thin must be at least 1"));
    }
    if args.replicates == 0 {
        return Err(usage("--replicates must be at least 1"));
    }
    if !(args.snr.is_finite() && args.snr > 0.0) {
        return Err(usage("--snr must be a positive number"));
    }
    let scenario = SimScenario::by_name(&args.scenario, args.snr, args.replicates)
        .ok_or_else(|| {
            usage(format!(
                "unknown scenario {:?}; expected concentrated, distributed, dense, or half",
                args.scenario
            ))
        })?;
    let mut estimators = Vec::new();
    for name in args.estimators.split(',').map(str::trim) {
        if name.is_empty() {
            continue;
        }
        let estimator = Estimator::by_name(name).ok_or_else(|| {
            usage(format!(
                "unknown estimator {name:?}; expected ols, rasp, grasp_fixed_a_learn_b, or grasp_learn_ab"
            ))
        })?;
        if estimators.contains(&estimator) {
            return Err(usage(format!("estimator {name:?} is listed twice")));
        }
        estimators.push(estimator);
    }
    if estimators.is_empty() {
        return Err(usage("--estimators lists no estimator"));
    }
    let config = StudyConfig {
        scenarios: vec![scenario],
        estimators,
        master_seed: args.seed,
        burnin: args.burnin,
        samples: args.samples,
        thin: args.thin,
    };
    let rows = run_study(&config)?;
    ensure_dir(&args.out)?;
    let mut report = String::from("scenario,snr,estimator,z0,nz0,oa\n");
    let mut timings = String::from("scenario,snr,estimator,time_s,replicates_used\n");
    for row in &rows {
        let _ = writeln!(
            report,
            "{},{},{},{},{},{}",
            row.scenario, row.snr, row.estimator, row.z0, row.nz0, row.oa
        );
        let _ = writeln!(
            timings,
            "{},{},{},{},{}",
            row.scenario, row.snr, row.estimator, row.time_s, row.replicates_used
        );
    }
    write_file(&args.out.join("report.csv"), &report)?;
    write_file(&args.out.join("timings.csv"), &timings)?;
    Ok(())
}

fn run_prior_corr(args: &PriorCorrArgs) -> std::result::Result<(), CommandError> {
    let family = match args.family.as_str() {
        "grasp" => PriorFamily::Grasp,
        "gigg" => PriorFamily::Gigg,
        other => return Err(usage(format!("unknown family {other:?}; expected grasp or gigg"))),
    };
    let scenario = match args.scenario.as_str() {
        "a" => HyperpriorScenario::adaptive(),
        "b" => HyperpriorScenario::non_adaptive(),
        "c" => HyperpriorScenario::uniformish(),
        "d" => HyperpriorScenario::mixed(),
        label => HyperpriorScenario::by_label(label).ok_or_else(|| {
            usage(format!(
                "unknown scenario {label:?}; expected a, b, c, d, or a scenario name"
            ))
        })?,
    };
    if args.draws == 0 {
        return Err(usage("--draws must be at least 1"));
    }
    let mut rng = RngStream::new(args.seed);
    let histogram = corr_distribution(&mut rng, family, &scenario, args.draws)?;
    let mut out = String::from("bin_low,bin_high,count,fraction\n");
    for i in 0..histogram.counts.len() {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            histogram.edges[i],
            histogram.edges[i + 1],
            histogram.counts[i],
            histogram.mass(i)
        );
    }
    if let Some(parent) = args.out.parent() {
        if !parent.as_os_str().is_empty() {
            ensure_dir(parent)?;
        }
    }
    write_file(&args.out, &out)?;
    Ok(())
}

fn parse_params(text: &str) -> std::result::Result<Vec<f64>, CommandError> {
    let mut params = Vec::new();
    for part in text.split(',').map(str::trim) {
        if part.is_empty() {
            continue;
        }
        let value: f64 = part
            .parse()
            .map_err(|_| usage(format!("--params: not a number: {part:?}")))?;
        params.push(value);
    }
    Ok(params)
}

fn run_prior_density(args: &PriorDensityArgs) -> std::result::Result<(), CommandError> {
    let params = parse_params(&args.params)?;
    let kind = match (args.kind.as_str(), params.as_slice()) {
        ("lasso", []) => ShrinkagePriorKind::Lasso,
        ("horseshoe", []) => ShrinkagePriorKind::Horseshoe,
        ("student-t", [dof]) => ShrinkagePriorKind::StudentT { dof: *dof },
        ("beta-prime", [a, b]) => ShrinkagePriorKind::BetaPrime { a: *a, b: *b },
        ("lasso" | "horseshoe", _) => {
            return Err(usage(format!("{} takes no parameters", args.kind)))
        }
        ("student-t", _) => return Err(usage("student-t takes exactly one parameter (dof)")),
        ("beta-prime", _) => return Err(usage("beta-prime takes exactly two parameters (a,b)")),
        (other, _) => {
            return Err(usage(format!(
                "unknown kind {other:?}; expected lasso, horseshoe, student-t, or beta-prime"
            )))
        }
    };
    let parts: Vec<&str> = args.grid.split(':').collect();
    if parts.len() != 3 {
        return Err(usage(format!("--grid must be lo:hi:step, got {:?}", args.grid)));
    }
    let lo: f64 = parts[0]
        .parse()
        .map_err(|_| usage(format!("--grid: not a number: {:?}", parts[0])))?;
    let hi: f64 = parts[1]
        .parse()
        .map_err(|_| usage(format!("--grid: not a number: {:?}", parts[1])))?;
    let step: f64 = parts[2]
        .parse()
        .map_err(|_| usage(format!("--grid: not a number: {:?}", parts[2])))?;
    if !(lo.is_finite() && hi.is_finite() && step.is_finite() && step > 0.0 && hi >= lo) {
        return Err(usage("--grid needs finite lo <= hi and step > 0"));
    }
    let log_scale = match args.space.as_str() {
        "lambda" => false,
        "xi" => true,
        other => return Err(usage(format!("--space must be lambda or xi, got {other:?}"))),
    };
    if !log_scale && lo <= 0.0 {
        return Err(usage("--grid: lambda grid points must be positive"));
    }
    let mut out = String::new();
    let _ = writeln!(out, "{},log_density,density", args.space);
    let count = ((hi - lo) / step).floor() as usize;
    for k in 0..=count {
        let point = lo + k as f64 * step;
        if point > hi + step * 1e-9 {
            break;
        }
        let log_density = if log_scale {
            log_density_log_scale(kind, point)?
        } else {
            log_density_scale(kind, point)?
        };
        let _ = writeln!(out, "{point},{log_density},{}", log_density.exp());
    }
    if let Some(parent) = args.out.parent() {
        if !parent.as_os_str().is_empty() {
            ensure_dir(parent)?;
        }
    }
    write_file(&args.out, &out)?;
    Ok(())
}

fn run_shape_fit(args: &ShapeFitArgs) -> std::result::Result<(), CommandError> {
    if args.sweeps == 0 {
        return Err(usage("--sweeps must be at least 1"));
    }
    let (headers, rows) = read_numeric_table(&args.data)?;
    if headers.len() != 1 {
        return Err(CommandError::Lib(Error::Data(format!(
            "{}: expected a single column, found {}",
            args.data.display(),
            headers.len()
        ))));
    }
    let xs: Vec<f64> = rows.iter().map(|r| r[0]).collect();
    if xs.is_empty() {
        return Err(CommandError::Lib(Error::Data(format!(
            "{}: no data rows",
            args.data.display()
        ))));
    }
    let config = ShapePairConfig {
        sweeps: args.sweeps,
        ..ShapePairConfig::default()
    };
    let mut rng = RngStream::new(args.seed);
    let chain = gibbs_pair(&mut rng, &xs, &config)?;
    let (mean_a, mean_b) = chain.means();
    println!("parameter,mean,acceptance");
    println!("a,{mean_a},{}", chain.acceptance_a());
    println!("b,{mean_b},{}", chain.acceptance_b());
    Ok(())
}
