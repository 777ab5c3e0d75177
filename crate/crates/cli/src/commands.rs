//! Command-line surface and the command implementations behind it.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use ucpd_core::detector::{
    check_alpha, remainder_diagnostic, run_test_with_path, size_power_experiment, ExperimentReport,
    RemainderPoint, ScenarioSpec, TestResult,
};
use ucpd_core::kernels::{builtin_kernel, Kernel};
use ucpd_core::limitsim::{build_limit_law, LimitLaw, DEFAULT_GRID};
use ucpd_core::uprocess::{LimitProcess, ProcessPath};
use ucpd_core::weights::{
    classify, critical_c, root_ratio_check, ClassSummary, ClassifyOptions, WeightFunction,
    DEFAULT_C_GRID,
};

use crate::cache;
use crate::error::{CliError, CliResult};
use crate::ingest::{self, Format};
use crate::record::Record;
use crate::scenario::{LawSource, ScenarioFile, DEFAULT_ALPHA, DEFAULT_LAW_REPS};
use crate::verify::{self, Suite};

#[derive(Debug, Parser)]
#[command(
    name = "ucpd",
    version,
    about = "Changepoint tests built on weighted U-statistic processes"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Test a data file for a single change in distribution.
    Detect(DetectArgs),
    /// Simulate a limit law and write it to a cache file.
    Simulate(SimulateArgs),
    /// Classify a weight function by the finiteness of I(q, c).
    CheckWeight(CheckWeightArgs),
    /// Run a size/power experiment described by a TOML scenario file.
    Calibrate(CalibrateArgs),
    /// Run the built-in verification suite.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Args)]
pub struct LawArgs {
    /// Read the limit law from this cache instead of simulating it.
    #[arg(long, conflicts_with_all = ["grid", "reps", "seed"])]
    pub cache: Option<PathBuf>,
    /// Grid size of the simulated limit law (a power of two).
    #[arg(long, default_value_t = DEFAULT_GRID)]
    pub grid: usize,
    /// Replicates of the simulated limit law.
    #[arg(long, default_value_t = DEFAULT_LAW_REPS)]
    pub reps: usize,
    /// Master seed of the simulated limit law.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

impl LawArgs {
    pub fn source(&self) -> LawSource {
        match &self.cache {
            Some(path) => LawSource::Cache(path.clone()),
            None => LawSource::Simulate {
                grid: self.grid,
                reps: self.reps,
                seed: self.seed,
            },
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct DetectArgs {
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Numeric field read from each JSON line.
    #[arg(long, default_value = "x")]
    pub field: String,
    #[arg(long, default_value = "sign_diff")]
    pub kernel: String,
    #[arg(long, default_value = "one")]
    pub weight: String,
    #[arg(long, default_value_t = DEFAULT_ALPHA)]
    pub alpha: f64,
    #[command(flatten)]
    pub law: LawArgs,
    /// Write (t_k, u_k, q(t_k)) as CSV.
    #[arg(long)]
    pub dump_path: Option<PathBuf>,
    /// Also write the result record to this file.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProcessArg {
    Gamma,
    Bridge,
}

impl From<ProcessArg> for LimitProcess {
    fn from(p: ProcessArg) -> Self {
        match p {
            ProcessArg::Gamma => LimitProcess::GammaProcess,
            ProcessArg::Bridge => LimitProcess::Bridge,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[arg(long, value_enum)]
    pub process: ProcessArg,
    #[arg(long, default_value = "one")]
    pub weight: String,
    #[arg(long, default_value_t = DEFAULT_GRID)]
    pub grid: usize,
    #[arg(long, default_value_t = DEFAULT_LAW_REPS)]
    pub reps: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    /// Store only the header and quantile table (no p-values from this cache).
    #[arg(long)]
    pub no_sups: bool,
}

#[derive(Debug, Clone, Args)]
pub struct CheckWeightArgs {
    /// Weight spec: `one`, `pow:NU` or `loglog:LAMBDA`.
    pub weight: String,
    /// Comma-separated values of c.
    #[arg(long, value_delimiter = ',')]
    pub c: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Args)]
pub struct CalibrateArgs {
    #[arg(long)]
    pub scenario: PathBuf,
    /// Also write the report record to this file.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[arg(value_enum)]
    pub suite: Suite,
}

fn write_file(path: &Path, text: &str) -> CliResult<()> {
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

pub fn obtain_law(
    process: LimitProcess,
    q: &WeightFunction,
    source: &LawSource,
) -> CliResult<LimitLaw> {
    match source {
        LawSource::Cache(path) => cache::read(path),
        LawSource::Simulate { grid, reps, seed } => {
            Ok(build_limit_law(process, q, *grid, *reps, *seed)?)
        }
    }
}

fn push_law(r: &mut Record, law: &LimitLaw, source: &LawSource) {
    r.push("law.process", law.process.id())
        .push("law.weight", &law.weight)
        .push("law.grid_size", law.grid_size)
        .push("law.reps", law.reps)
        .push("law.master_seed", law.master_seed)
        .push("law.low_reps_warning", law.low_reps_warning());
    match source {
        LawSource::Cache(path) => r.push("law.source", format!("cache:{}", path.display())),
        LawSource::Simulate { .. } => r.push("law.source", "simulated"),
    };
}

pub fn result_record(result: &TestResult, law: &LimitLaw, source: &LawSource) -> Record {
    let mut r = Record::new("detect");
    r.push("statistic", result.statistic)
        .push("p_value", result.p_value)
        .push("critical_value", result.critical_value)
        .push("alpha", result.alpha)
        .push("reject", result.reject)
        .push("k_hat", result.k_hat)
        .push("t_hat", result.t_hat)
        .push("n", result.n)
        .push("kernel", &result.kernel_id)
        .push("weight", &result.weight);
    push_law(&mut r, law, source);
    r
}

pub fn path_csv(path: &ProcessPath, q: &WeightFunction) -> String {
    let mut out = String::from("t,u,q\n");
    for (t, u) in path.t.iter().zip(&path.u) {
        out.push_str(&format!("{t},{u},{}\n", q.value(*t)));
    }
    out
}

pub fn detect(args: &DetectArgs) -> CliResult<Record> {
    let sample = ingest::ingest(&args.data, args.format, &args.field)?;
    let kernel = builtin_kernel(&args.kernel)?;
    let q = WeightFunction::parse(&args.weight)?;
    check_alpha(args.alpha)?;
    let source = args.law.source();
    let law = obtain_law(LimitProcess::for_symmetry(kernel.symmetry()), &q, &source)?;
    let (result, path) = run_test_with_path(sample.values(), &kernel, &q, args.alpha, &law)?;
    let record = result_record(&result, &law, &source);
    if let Some(out) = &args.out {
        write_file(out, &record.render())?;
    }
    if let Some(dump) = &args.dump_path {
        write_file(dump, &path_csv(&path, &q))?;
    }
    Ok(record)
}

/// The exact bytes `simulate` writes for these parameters.
pub fn simulate_cache_text(args: &SimulateArgs) -> CliResult<(LimitLaw, String)> {
    let q = WeightFunction::parse(&args.weight)?;
    let law = build_limit_law(args.process.into(), &q, args.grid, args.reps, args.seed)?;
    let text = cache::render(&law, !args.no_sups);
    Ok((law, text))
}

pub fn simulate(args: &SimulateArgs) -> CliResult<Record> {
    let (law, text) = simulate_cache_text(args)?;
    write_file(&args.out, &text)?;
    let mut r = Record::new("simulate");
    r.push("out", args.out.display())
        .push("process", law.process.id())
        .push("weight", &law.weight)
        .push("grid_size", law.grid_size)
        .push("reps", law.reps)
        .push("master_seed", law.master_seed)
        .push("low_reps_warning", law.low_reps_warning());
    for (p, v) in &law.quantiles {
        r.push(format!("quantile_{p}"), v);
    }
    Ok(r)
}

pub fn check_weight(args: &CheckWeightArgs) -> CliResult<Record> {
    let q = WeightFunction::parse(&args.weight)?;
    let grid = args.c.clone().unwrap_or_else(|| DEFAULT_C_GRID.to_vec());
    let cls = classify(&q, &grid)?;
    let mut r = Record::new("check_weight");
    r.push("weight", &cls.weight)
        .push("summary", cls.summary.id());
    for v in &cls.verdicts {
        let c = v.c;
        r.push(format!("verdict@{c}"), v.verdict.id())
            .push(format!("partial_integral@{c}"), v.partial_integral)
            .push(format!("tail_estimate@{c}"), v.tail_estimate)
            .push(format!("decay_exponent@{c}"), v.decay_exponent);
    }
    if cls.summary == ClassSummary::FiniteForSomeNotAll {
        let lo = grid[0];
        let hi = grid[grid.len() - 1];
        match critical_c(&q, lo, hi, &ClassifyOptions::default()) {
            Some(c) => r.push("critical_c", c),
            None => r.push("critical_c", "unresolved"),
        };
    }
    let l3 = root_ratio_check(&q);
    r.push("root_ratio_vanishes_at_0", l3.limit_zero_at_0)
        .push("root_ratio_vanishes_at_1", l3.limit_zero_at_1);
    Ok(r)
}

pub fn experiment_record(spec: &ScenarioSpec, alpha: f64, report: &ExperimentReport) -> Record {
    let mut r = Record::new("calibrate");
    r.push("n", spec.n)
        .push("kernel", &spec.kernel_id)
        .push("weight", &spec.weight)
        .push("alpha", alpha)
        .push("reps", report.reps)
        .push("master_seed", spec.master_seed)
        .push("before", spec.before);
    if let Some(c) = spec.change {
        r.push("after", c.after).push("change_fraction", c.fraction);
    }
    r.push("reject_rate", report.reject_rate);
    if let Some(v) = report.mean_abs_error_of_t_hat {
        r.push("mean_abs_error_of_t_hat", v);
    }
    if let Some(v) = report.median_abs_error_of_t_hat {
        r.push("median_abs_error_of_t_hat", v);
    }
    if let Some(v) = report.ks_distance_of_statistic_to_law {
        r.push("ks_distance_of_statistic_to_law", v);
    }
    r.push(
        "moment_condition_certified",
        report.moment_condition_certified,
    );
    r
}

fn push_remainder(r: &mut Record, points: &[RemainderPoint]) {
    for p in points {
        r.push(format!("median_m3@{}", p.n), p.median_m3);
    }
}

pub fn calibrate(args: &CalibrateArgs) -> CliResult<Record> {
    let file = ScenarioFile::read(&args.scenario)?;
    let spec = file.spec()?;
    let kernel: Kernel = spec.kernel()?;
    let q = spec.weight_function()?;
    check_alpha(file.alpha)?;
    let base = args.scenario.parent().unwrap_or_else(|| Path::new("."));
    let source = file.law_source(base)?;
    let law = obtain_law(LimitProcess::for_symmetry(kernel.symmetry()), &q, &source)?;
    let report = size_power_experiment(&spec, file.alpha, &law)?;
    let mut record = experiment_record(&spec, file.alpha, &report);
    push_law(&mut record, &law, &source);
    if !file.remainder_n.is_empty() {
        let null = ScenarioSpec {
            change: None,
            ..spec.clone()
        };
        push_remainder(
            &mut record,
            &remainder_diagnostic(&null, &file.remainder_n)?,
        );
    }
    if let Some(out) = &args.out {
        write_file(out, &record.render())?;
    }
    Ok(record)
}

/// Runs a parsed command line and returns the process exit status.
pub fn run(cli: Cli) -> i32 {
    let outcome = match &cli.command {
        Command::Detect(a) => detect(a),
        Command::Simulate(a) => simulate(a),
        Command::CheckWeight(a) => check_weight(a),
        Command::Calibrate(a) => calibrate(a),
        Command::Verify(a) => return verify::run_and_print(a.suite),
    };
    match outcome {
        Ok(record) => {
            record.print();
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
