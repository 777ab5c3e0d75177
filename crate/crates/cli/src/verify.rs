//! The built-in verification suite: eleven end-to-end checks of the
//! numerical core, run at full scale or at reduced replicate counts with
//! tolerances widened in proportion to the Monte Carlo error.

use std::collections::HashMap;
use std::sync::Arc;
use std::time::Instant;

use rand::Rng;
use ucpd_core::detector::{
    remainder_diagnostic, size_power_experiment, ExperimentReport, ScenarioSpec,
};
use ucpd_core::dist::Distribution;
use ucpd_core::kernels::{builtin_kernel, BuiltinKernel, Symmetry};
use ucpd_core::limitsim::{
    bridge_path, build_limit_law, gamma_path, simulate_wiener, LimitLaw, DEFAULT_GRID,
};
use ucpd_core::parallel::with_threads;
use ucpd_core::rng::{stream, Domain};
use ucpd_core::uprocess::{estimate, z_path, LimitProcess, Sample};
use ucpd_core::weights::{
    classify, critical_c, root_ratio_check, ClassSummary, ClassifyOptions, WeightFunction,
    DEFAULT_C_GRID,
};

use crate::commands::{experiment_record, simulate_cache_text, ProcessArg, SimulateArgs};
use crate::error::CliResult;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    Quick,
    Full,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl Outcome {
    pub fn line(&self) -> String {
        format!(
            "{} criterion {:>2} {:<28} {} [{:.1}s]",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.detail,
            self.seconds
        )
    }
}

pub const CRITERIA: [(usize, &str); 11] = [
    (1, "sweep-vs-brute-force"),
    (2, "bridge-kolmogorov-quantile"),
    (3, "gamma-vs-bridge-covariance"),
    (4, "size-sign-diff"),
    (5, "size-half-sq-diff"),
    (6, "size-heavy-tails"),
    (7, "size-weighted"),
    (8, "weight-classifier"),
    (9, "hoeffding-remainder"),
    (10, "power-mean-shift"),
    (11, "determinism"),
];

const LAW_SEED: u64 = 20_240_917;

/// Replicate counts of a suite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Plan {
    pub suite: Suite,
    pub law_reps: usize,
    pub covariance_reps: usize,
    pub size_reps: usize,
    pub heavy_reps: usize,
    pub remainder_reps: usize,
    pub power_reps: usize,
    pub determinism_law_reps: usize,
    pub determinism_experiment_reps: usize,
}

impl Plan {
    pub fn full() -> Self {
        Plan {
            suite: Suite::Full,
            law_reps: 100_000,
            covariance_reps: 100_000,
            size_reps: 2_000,
            heavy_reps: 1_000,
            remainder_reps: 200,
            power_reps: 500,
            determinism_law_reps: 20_000,
            determinism_experiment_reps: 400,
        }
    }

    pub fn quick() -> Self {
        Plan {
            suite: Suite::Quick,
            law_reps: 40_000,
            covariance_reps: 20_000,
            size_reps: 400,
            heavy_reps: 400,
            remainder_reps: 200,
            power_reps: 200,
            determinism_law_reps: 2_000,
            determinism_experiment_reps: 200,
        }
    }

    pub fn for_suite(suite: Suite) -> Self {
        match suite {
            Suite::Quick => Plan::quick(),
            Suite::Full => Plan::full(),
        }
    }

    /// Monte Carlo error ratio between reduced and full replicate counts.
    fn widen(&self, full_reps: usize, reps: usize) -> f64 {
        (full_reps as f64 / reps as f64).sqrt().max(1.0)
    }

    /// `band` extended on both sides by the extra binomial error (99% level,
    /// nominal rate 5%) of running `reps` instead of `full_reps` replicates.
    fn rate_band(&self, band: Band, full_reps: usize, reps: usize) -> Band {
        let se = |r: usize| (0.05 * 0.95 / r as f64).sqrt();
        let extra = (2.576 * (se(reps) - se(full_reps))).max(0.0);
        Band::new(band.lo - extra, band.hi + extra)
    }

    /// KS bound extended by the growth of the two-sample 1% critical value.
    fn ks_limit(&self, limit: f64, full_reps: usize, reps: usize) -> f64 {
        let crit = |r: usize| 1.628 * (1.0 / r as f64 + 1.0 / self.law_reps as f64).sqrt();
        let full = 1.628 * (1.0 / full_reps as f64 + 1.0 / 100_000.0).sqrt();
        limit + (crit(reps) - full).max(0.0)
    }
}

/// A closed acceptance interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Band {
    pub lo: f64,
    pub hi: f64,
}

impl Band {
    pub const fn new(lo: f64, hi: f64) -> Self {
        Band { lo, hi }
    }

    pub fn contains(self, v: f64) -> bool {
        v >= self.lo && v <= self.hi
    }
}

impl std::fmt::Display for Band {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{:.4}, {:.4}]", self.lo, self.hi)
    }
}

type LawKey = (LimitProcess, String, usize, usize, u64);

/// Shared state of one suite run: limit laws are simulated once.
pub struct Context {
    pub plan: Plan,
    laws: HashMap<LawKey, Arc<LimitLaw>>,
}

impl Context {
    pub fn new(plan: Plan) -> Self {
        Context {
            plan,
            laws: HashMap::new(),
        }
    }

    pub fn law(
        &mut self,
        process: LimitProcess,
        weight: &str,
        reps: usize,
    ) -> CliResult<Arc<LimitLaw>> {
        let key = (process, weight.to_string(), DEFAULT_GRID, reps, LAW_SEED);
        if let Some(l) = self.laws.get(&key) {
            return Ok(l.clone());
        }
        let q = WeightFunction::parse(weight)?;
        let law = Arc::new(build_limit_law(process, &q, DEFAULT_GRID, reps, LAW_SEED)?);
        self.laws.insert(key, law.clone());
        Ok(law)
    }
}

struct Check {
    passed: bool,
    detail: String,
}

impl Check {
    fn new() -> Self {
        Check {
            passed: true,
            detail: String::new(),
        }
    }

    fn require(&mut self, ok: bool, what: impl AsRef<str>) {
        if !self.detail.is_empty() {
            self.detail.push_str("; ");
        }
        self.detail.push_str(what.as_ref());
        if !ok {
            self.passed = false;
            self.detail.push_str(" (!)");
        }
    }
}

fn rel_close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1.0)
}

// ---- independent oracles ----

fn brute_z(x: &[f64], kind: BuiltinKernel) -> Vec<f64> {
    let n = x.len();
    (1..n)
        .map(|k| {
            (0..k)
                .map(|i| (k..n).map(|j| kind.eval(x[i], x[j])).sum::<f64>())
                .sum()
        })
        .collect()
}

/// `(θ̂, σ̂², row means)` straight from the definitions.
fn brute_jackknife(x: &[f64], kind: BuiltinKernel) -> (f64, f64, Vec<f64>) {
    let n = x.len();
    let nf = n as f64;
    let rows: Vec<f64> = (0..n)
        .map(|j| {
            (0..n)
                .filter(|&i| i != j)
                .map(|i| kind.eval(x[i], x[j]))
                .sum::<f64>()
                / (nf - 1.0)
        })
        .collect();
    let theta = match kind.symmetry() {
        Symmetry::Symmetric => rows.iter().sum::<f64>() / nf,
        Symmetry::Antisymmetric => 0.0,
    };
    let sigma2 = rows.iter().map(|r| (r - theta).powi(2)).sum::<f64>() / nf;
    (theta, sigma2, rows)
}

/// `P(sup |B| ≤ x) = 1 − 2 Σ_{k≥1} (−1)^{k−1} e^{−2k²x²}`.
pub fn kolmogorov_cdf(x: f64) -> f64 {
    let mut s = 0.0;
    for k in 1..=200 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * x * x).exp();
        s += if k % 2 == 1 { term } else { -term };
        if term < 1e-20 {
            break;
        }
    }
    1.0 - 2.0 * s
}

pub fn kolmogorov_quantile(p: f64) -> f64 {
    let (mut lo, mut hi) = (0.2, 4.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if kolmogorov_cdf(mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn sample_cov(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - ma) * (y - mb))
        .sum::<f64>()
        / (n - 1.0)
}

// ---- criteria ----

fn oracle_equivalence(_: &mut Context) -> CliResult<Check> {
    let mut c = Check::new();
    let mut rng = stream(LAW_SEED, Domain::Probe, 1, 0);
    let mut worst = 0.0f64;
    let mut failures = 0;
    for instance in 0..200 {
        let n = rng.random_range(4..=50);
        let integer_valued = instance % 5 == 4;
        let x: Vec<f64> = (0..n)
            .map(|_| {
                if integer_valued {
                    rng.random_range(-3i32..=3) as f64
                } else {
                    rng.random_range(-10.0..10.0)
                }
            })
            .collect();
        let kind = BuiltinKernel::ALL[instance % BuiltinKernel::ALL.len()];
        let kernel = builtin_kernel(kind.id())?;
        let sample = Sample::new(x.clone())?;
        let got = z_path(&sample, &kernel).z;
        let want = brute_z(&x, kind);
        let mut ok = got.iter().zip(&want).all(|(a, b)| rel_close(*a, *b, 1e-9));
        for (a, b) in got.iter().zip(&want) {
            worst = worst.max((a - b).abs() / a.abs().max(b.abs()).max(1.0));
        }
        let (theta, sigma2, rows) = brute_jackknife(&x, kind);
        match estimate(&sample, &kernel) {
            Ok(e) => {
                ok &= rel_close(e.theta_hat, theta, 1e-9) && rel_close(e.sigma2_hat, sigma2, 1e-9);
                ok &= e
                    .row_means
                    .iter()
                    .zip(&rows)
                    .all(|(a, b)| rel_close(*a, *b, 1e-9));
            }
            Err(_) => ok &= sigma2 <= 1e-12,
        }
        if !ok {
            failures += 1;
        }
    }
    c.require(
        failures == 0,
        format!("200 instances, {failures} mismatches, worst rel err {worst:.1e}"),
    );
    Ok(c)
}

fn kolmogorov_quantile_check(ctx: &mut Context) -> CliResult<Check> {
    let mut c = Check::new();
    let law = ctx.law(LimitProcess::Bridge, "one", ctx.plan.law_reps)?;
    let oracle = kolmogorov_quantile(0.95);
    let q95 = law.quantile(0.95)?;
    c.require(
        (oracle - 1.3581).abs() < 1e-4,
        format!("oracle {oracle:.5}"),
    );
    c.require(
        (q95 - oracle).abs() <= 0.03,
        format!("q95 {q95:.4} (reps {})", law.reps),
    );
    Ok(c)
}

fn covariance_check(ctx: &mut Context) -> CliResult<Check> {
    let mut c = Check::new();
    let reps = ctx.plan.covariance_reps;
    let widen = ctx.plan.widen(100_000, reps);
    let tol = 0.005 * widen;
    // the grid of 4 holds t = 1/4, 1/2, 3/4 with their exact joint law
    let paths: Vec<(Vec<f64>, Vec<f64>)> = (0..reps as u64)
        .map(|r| {
            let w =
                simulate_wiener(4, &mut stream(LAW_SEED, Domain::Probe, 2, r)).expect("grid of 4");
            (gamma_path(&w), bridge_path(&w))
        })
        .collect();
    let col = |j: usize, gamma: bool| -> Vec<f64> {
        paths
            .iter()
            .map(|(g, b)| if gamma { g[j] } else { b[j] })
            .collect()
    };
    let cg = sample_cov(&col(1, true), &col(3, true));
    let cb = sample_cov(&col(1, false), &col(3, false));
    c.require((cg - 0.125).abs() <= tol, format!("Cov Γ {cg:.4}"));
    c.require((cb - 0.0625).abs() <= tol, format!("Cov B {cb:.4}"));
    let mut worst = 0.0f64;
    for (j, t) in [(1, 0.25), (2, 0.5), (3, 0.75)] {
        for gamma in [true, false] {
            let v = col(j, gamma);
            worst = worst.max((sample_cov(&v, &v) - t * (1.0 - t)).abs());
        }
    }
    c.require(
        worst <= tol,
        format!("max |Var − t(1−t)| {worst:.4} (tol {tol:.4})"),
    );
    Ok(c)
}

fn size_check(
    ctx: &mut Context,
    c: &mut Check,
    label: &str,
    spec: &ScenarioSpec,
    band: Band,
    ks_limit: Option<f64>,
) -> CliResult<ExperimentReport> {
    let kernel = spec.kernel()?;
    let law = ctx.law(
        LimitProcess::for_symmetry(kernel.symmetry()),
        &spec.weight,
        ctx.plan.law_reps,
    )?;
    let report = size_power_experiment(spec, 0.05, &law)?;
    let full = if spec.n >= 2000 { 1_000 } else { 2_000 };
    let band = ctx.plan.rate_band(band, full, spec.reps);
    c.require(
        band.contains(report.reject_rate),
        format!("{label} rate {:.4} in {band}", report.reject_rate),
    );
    if let Some(limit) = ks_limit {
        let limit = ctx.plan.ks_limit(limit, full, spec.reps);
        let ks = report.ks_distance_of_statistic_to_law.unwrap_or(f64::NAN);
        c.require(ks <= limit, format!("KS {ks:.4} ≤ {limit:.3}"));
    }
    Ok(report)
}

fn std_normal() -> Distribution {
    Distribution::standard_normal()
}

fn size_sign_diff(ctx: &mut Context) -> CliResult<Check> {
    let mut c = Check::new();
    let spec = ScenarioSpec::null(500, std_normal(), "sign_diff", "one", ctx.plan.size_reps, 4);
    size_check(
        ctx,
        &mut c,
        "sign_diff",
        &spec,
        Band::new(0.035, 0.065),
        Some(0.06),
    )?;
    Ok(c)
}

fn size_half_sq_diff(ctx: &mut Context) -> CliResult<Check> {
    let mut c = Check::new();
    let spec = ScenarioSpec::null(
        500,
        std_normal(),
        "half_sq_diff",
        "one",
        ctx.plan.size_reps,
        5,
    );
    size_check(
        ctx,
        &mut c,
        "half_sq_diff",
        &spec,
        Band::new(0.03, 0.07),
        None,
    )?;
    Ok(c)
}

fn size_heavy_tails(ctx: &mut Context) -> CliResult<Check> {
    let mut c = Check::new();
    let t2 = Distribution::student_t(2.0)?;
    let spec = ScenarioSpec::null(2000, t2, "diff", "one", ctx.plan.heavy_reps, 6);
    let report = size_check(ctx, &mut c, "t(2) diff", &spec, Band::new(0.03, 0.08), None)?;
    c.require(
        report.moment_condition_certified,
        "moment condition certified",
    );
    Ok(c)
}

fn size_weighted(ctx: &mut Context) -> CliResult<Check> {
    let mut c = Check::new();
    for (weight, class, seed) in [
        ("pow:0.25", ClassSummary::FiniteForAllTested, 71),
        ("loglog:1", ClassSummary::FiniteForSomeNotAll, 72),
    ] {
        let got = classify(&WeightFunction::parse(weight)?, &DEFAULT_C_GRID)?.summary;
        c.require(got == class, format!("{weight} {}", got.id()));
        let spec = ScenarioSpec::null(
            500,
            std_normal(),
            "sign_diff",
            weight,
            ctx.plan.size_reps,
            seed,
        );
        size_check(ctx, &mut c, weight, &spec, Band::new(0.03, 0.08), None)?;
    }
    Ok(c)
}

fn weight_classifier(_: &mut Context) -> CliResult<Check> {
    let mut c = Check::new();
    let expected = [
        ("pow:0.1", ClassSummary::FiniteForAllTested),
        ("pow:0.25", ClassSummary::FiniteForAllTested),
        ("pow:0.4", ClassSummary::FiniteForAllTested),
        ("pow:0.5", ClassSummary::DivergentForAllTested),
        ("pow:0.6", ClassSummary::DivergentForAllTested),
        ("loglog:1", ClassSummary::FiniteForSomeNotAll),
    ];
    let mut wrong = Vec::new();
    let mut root_ratio_violations = Vec::new();
    for (spec, class) in expected {
        let q = WeightFunction::parse(spec)?;
        let cls = classify(&q, &DEFAULT_C_GRID)?;
        if cls.summary != class {
            wrong.push(format!("{spec}={}", cls.summary.id()));
        }
        if cls.any_finite() {
            let l3 = root_ratio_check(&q);
            if !(l3.limit_zero_at_0 && l3.limit_zero_at_1) {
                root_ratio_violations.push(spec);
            }
        }
    }
    c.require(
        wrong.is_empty(),
        format!("6 classifications, wrong: {wrong:?}"),
    );
    c.require(
        root_ratio_violations.is_empty(),
        format!("root-ratio violations: {root_ratio_violations:?}"),
    );
    // near the endpoints the loglog:1 integrand is (e + s)^{−c} in s = −ln u: c* = 1
    let q = WeightFunction::parse("loglog:1")?;
    match critical_c(&q, 0.05, 20.0, &ClassifyOptions::default()) {
        Some(cs) => c.require(
            (0.7..=1.5).contains(&cs),
            format!("c* {cs:.4} (closed form 1)"),
        ),
        None => c.require(false, "c* not bracketed"),
    }
    Ok(c)
}

fn hoeffding_remainder(ctx: &mut Context) -> CliResult<Check> {
    let mut c = Check::new();
    let reps = ctx.plan.remainder_reps;
    for (kernel, dist) in [
        ("product", Distribution::normal(1.0, 1.0)?),
        ("half_sq_diff", std_normal()),
    ] {
        let spec = ScenarioSpec::null(0, dist, kernel, "one", reps, 9);
        let pts = remainder_diagnostic(&spec, &[200, 800])?;
        c.require(
            pts[1].median_m3 < pts[0].median_m3,
            format!(
                "{kernel} M3 {:.4} -> {:.4}",
                pts[0].median_m3, pts[1].median_m3
            ),
        );
    }
    let spec = ScenarioSpec::null(0, std_normal(), "diff", "one", reps, 9);
    let pts = remainder_diagnostic(&spec, &[200, 800])?;
    c.require(pts.iter().all(|p| p.median_m3 == 0.0), "diff M3 ≡ 0");
    Ok(c)
}

fn power_check(ctx: &mut Context) -> CliResult<Check> {
    let mut c = Check::new();
    let spec = ScenarioSpec::null(200, std_normal(), "diff", "one", ctx.plan.power_reps, 10)
        .with_change(0.5, Distribution::normal(1.0, 1.0)?);
    let law = ctx.law(LimitProcess::Bridge, "one", ctx.plan.law_reps)?;
    let report = size_power_experiment(&spec, 0.05, &law)?;
    c.require(
        report.reject_rate >= 0.9,
        format!("power {}", report.reject_rate),
    );
    let med = report.median_abs_error_of_t_hat.unwrap_or(f64::NAN);
    c.require(med <= 0.05, format!("median |t̂ − 0.5| {med:.4}"));
    Ok(c)
}

fn determinism(ctx: &mut Context) -> CliResult<Check> {
    let mut c = Check::new();
    let args = SimulateArgs {
        process: ProcessArg::Gamma,
        weight: "pow:0.25".into(),
        grid: DEFAULT_GRID,
        reps: ctx.plan.determinism_law_reps,
        seed: 11,
        out: "unused".into(),
        no_sups: false,
    };
    let caches: Vec<String> = [1, 4, 8]
        .into_iter()
        .map(|t| with_threads(Some(t), || simulate_cache_text(&args).map(|(_, text)| text)))
        .collect::<CliResult<_>>()?;
    c.require(
        caches.windows(2).all(|w| w[0] == w[1]),
        format!(
            "simulate bytes ({} B) equal at 1/4/8 workers",
            caches[0].len()
        ),
    );

    let q = WeightFunction::parse("one")?;
    let law = build_limit_law(
        LimitProcess::Bridge,
        &q,
        1024,
        ctx.plan.determinism_law_reps,
        12,
    )?;
    let spec = ScenarioSpec::null(
        200,
        std_normal(),
        "sign_diff",
        "one",
        ctx.plan.determinism_experiment_reps,
        13,
    );
    let records: Vec<String> = [1, 4, 8]
        .into_iter()
        .map(|t| {
            with_threads(Some(t), || {
                size_power_experiment(&spec, 0.05, &law)
                    .map(|r| experiment_record(&spec, 0.05, &r).render())
            })
        })
        .collect::<Result<_, _>>()?;
    c.require(
        records.windows(2).all(|w| w[0] == w[1]),
        "experiment records equal at 1/4/8 workers",
    );
    Ok(c)
}

type Criterion = fn(&mut Context) -> CliResult<Check>;

fn criterion_fn(id: usize) -> Criterion {
    match id {
        1 => oracle_equivalence,
        2 => kolmogorov_quantile_check,
        3 => covariance_check,
        4 => size_sign_diff,
        5 => size_half_sq_diff,
        6 => size_heavy_tails,
        7 => size_weighted,
        8 => weight_classifier,
        9 => hoeffding_remainder,
        10 => power_check,
        11 => determinism,
        _ => panic!("no criterion {id}"),
    }
}

/// Wall-clock budget of a criterion in the full suite, when it has one.
fn time_budget(id: usize) -> Option<f64> {
    match id {
        1 => Some(10.0),
        2 => Some(120.0),
        4 => Some(300.0),
        6 => Some(900.0),
        _ => None,
    }
}

pub fn run_criterion(ctx: &mut Context, id: usize) -> Outcome {
    let name = CRITERIA[id - 1].1;
    let start = Instant::now();
    let check = criterion_fn(id)(ctx);
    let seconds = start.elapsed().as_secs_f64();
    let (mut passed, mut detail) = match check {
        Ok(c) => (c.passed, c.detail),
        Err(e) => (false, format!("error: {e}")),
    };
    if ctx.plan.suite == Suite::Full {
        if let Some(budget) = time_budget(id) {
            if seconds > budget {
                passed = false;
                detail.push_str(&format!("; over the {budget:.0}s budget (!)"));
            }
        }
    }
    Outcome {
        id,
        name,
        passed,
        detail,
        seconds,
    }
}

/// Runs every criterion in order, calling `report` after each.
pub fn run_suite(suite: Suite, mut report: impl FnMut(&Outcome)) -> Vec<Outcome> {
    let mut ctx = Context::new(Plan::for_suite(suite));
    CRITERIA
        .iter()
        .map(|&(id, _)| {
            let o = run_criterion(&mut ctx, id);
            report(&o);
            o
        })
        .collect()
}

/// Runs a suite, printing one line per criterion; exit status 0 iff all pass.
pub fn run_and_print(suite: Suite) -> i32 {
    let outcomes = run_suite(suite, |o| println!("{}", o.line()));
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    println!(
        "{} of {} criteria passed",
        outcomes.len() - failed,
        outcomes.len()
    );
    i32::from(failed > 0)
}
