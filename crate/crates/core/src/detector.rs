//! The weighted sup test, its changepoint estimate, and Monte Carlo
//! experiments (size, power, Hoeffding-remainder decay) on simulated data.

use rayon::prelude::*;

use crate::dist::Distribution;
use crate::error::{Error, Result};
use crate::kernels::{builtin_kernel, Kernel};
use crate::limitsim::{ks_distance, LimitLaw};
use crate::rng::{self, Domain};
use crate::uprocess::{
    grid_point, remainder_sums, studentized_values, LimitProcess, ProcessPath, Sample,
};
use crate::weights::WeightFunction;

#[derive(Debug, Clone, PartialEq)]
pub struct LawProvenance {
    pub process: LimitProcess,
    pub weight: String,
    pub grid_size: usize,
    pub reps: usize,
    pub master_seed: u64,
}

impl From<&LimitLaw> for LawProvenance {
    fn from(law: &LimitLaw) -> Self {
        LawProvenance {
            process: law.process,
            weight: law.weight.clone(),
            grid_size: law.grid_size,
            reps: law.reps,
            master_seed: law.master_seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TestResult {
    /// `max_k |Û_n(t_k)| / q(t_k)`
    pub statistic: f64,
    pub p_value: f64,
    pub critical_value: f64,
    pub alpha: f64,
    pub reject: bool,
    pub k_hat: usize,
    pub t_hat: f64,
    pub n: usize,
    pub kernel_id: String,
    pub weight: String,
    pub law: LawProvenance,
}

pub fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha <= 0.5 {
        Ok(())
    } else {
        Err(Error::BadParams(format!(
            "alpha must lie in (0, 0.5], got {alpha}"
        )))
    }
}

/// `(k, |u_k| / q(t_k))` at the first maximizing index (1-based).
pub fn weighted_argmax(path: &ProcessPath, q: &WeightFunction) -> (usize, f64) {
    let mut best = (1, f64::NEG_INFINITY);
    for (i, (&u, &t)) in path.u.iter().zip(&path.t).enumerate() {
        let v = u.abs() / q.value(t);
        if v > best.1 {
            best = (i + 1, v);
        }
    }
    best
}

fn check_law(kernel: &Kernel, q: &WeightFunction, law: &LimitLaw) -> Result<()> {
    let expected = LimitProcess::for_symmetry(kernel.symmetry());
    if law.process != expected {
        return Err(Error::LawMismatch(format!(
            "kernel `{}` needs a {} law, got {}",
            kernel.id(),
            expected.id(),
            law.process.id()
        )));
    }
    if law.weight != q.label() {
        return Err(Error::LawMismatch(format!(
            "weight `{}` but law built for `{}`",
            q.label(),
            law.weight
        )));
    }
    Ok(())
}

/// Runs the test and also returns the studentized path it was computed from.
pub fn run_test_with_path(
    values: &[f64],
    kernel: &Kernel,
    q: &WeightFunction,
    alpha: f64,
    law: &LimitLaw,
) -> Result<(TestResult, ProcessPath)> {
    check_alpha(alpha)?;
    check_law(kernel, q, law)?;
    let (path, _) = studentized_values(values, kernel)?;
    let (k_hat, statistic) = weighted_argmax(&path, q);
    let critical_value = law.critical_value(alpha)?;
    let p_value = law.p_value(statistic)?;
    let n = values.len();
    let result = TestResult {
        statistic,
        p_value,
        critical_value,
        alpha,
        reject: statistic > critical_value,
        k_hat,
        t_hat: grid_point(k_hat, n),
        n,
        kernel_id: kernel.id().to_string(),
        weight: q.label(),
        law: law.into(),
    };
    Ok((result, path))
}

pub fn run_test(
    sample: &Sample,
    kernel: &Kernel,
    q: &WeightFunction,
    alpha: f64,
    law: &LimitLaw,
) -> Result<TestResult> {
    run_test_with_path(sample.values(), kernel, q, alpha, law).map(|(r, _)| r)
}

/// Argmax changepoint estimate `(k̂, k̂/(n+1))`.
pub fn estimate_changepoint(result: &TestResult) -> (usize, f64) {
    (result.k_hat, result.t_hat)
}

/// A single change: the first `round(fraction · n)` observations follow the
/// scenario's `before` law and the rest follow `after`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Change {
    pub fraction: f64,
    pub after: Distribution,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSpec {
    pub n: usize,
    pub before: Distribution,
    pub change: Option<Change>,
    pub kernel_id: String,
    pub weight: String,
    pub reps: usize,
    pub master_seed: u64,
}

impl ScenarioSpec {
    pub fn null(
        n: usize,
        dist: Distribution,
        kernel_id: &str,
        weight: &str,
        reps: usize,
        master_seed: u64,
    ) -> Self {
        ScenarioSpec {
            n,
            before: dist,
            change: None,
            kernel_id: kernel_id.to_string(),
            weight: weight.to_string(),
            reps,
            master_seed,
        }
    }

    pub fn with_change(mut self, fraction: f64, after: Distribution) -> Self {
        self.change = Some(Change { fraction, after });
        self
    }

    /// Number of pre-change observations.
    pub fn change_index(&self) -> usize {
        match self.change {
            Some(c) => (c.fraction * self.n as f64).round() as usize,
            None => self.n,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < crate::uprocess::MIN_SAMPLE {
            return Err(Error::BadScenario(format!("n = {} is below 4", self.n)));
        }
        if let Some(c) = self.change {
            if !(c.fraction > 0.0 && c.fraction < 1.0) {
                return Err(Error::BadScenario(format!(
                    "change fraction {} is outside (0, 1)",
                    c.fraction
                )));
            }
            let nf = self.n as f64;
            if c.fraction * nf < 2.0 || (1.0 - c.fraction) * nf < 2.0 {
                return Err(Error::BadScenario(
                    "each segment needs at least 2 observations".into(),
                ));
            }
        }
        Ok(())
    }

    pub fn kernel(&self) -> Result<Kernel> {
        builtin_kernel(&self.kernel_id)
    }

    pub fn weight_function(&self) -> Result<WeightFunction> {
        WeightFunction::parse(&self.weight)
    }

    /// The data of replicate `rep`; each segment has its own stream.
    pub fn generate(&self, rep: u64) -> Vec<f64> {
        let k = self.change_index();
        let mut x = vec![0.0; self.n];
        let mut before = rng::stream(self.master_seed, Domain::SegmentBefore, 0, rep);
        self.before.fill(&mut before, &mut x[..k]);
        if let Some(c) = self.change {
            let mut after = rng::stream(self.master_seed, Domain::SegmentAfter, 0, rep);
            c.after.fill(&mut after, &mut x[k..]);
        }
        x
    }

    /// Whether `E|h(X₁, X₂)|^{5/3} < ∞` is guaranteed for every segment.
    pub fn moment_condition_certified(&self) -> bool {
        let Ok(kernel) = self.kernel() else {
            return false;
        };
        let Some(kind) = kernel.builtin_kind() else {
            return false;
        };
        let order = kind.growth_order();
        if order == 0.0 {
            return true;
        }
        let needed = 5.0 / 3.0 * order;
        let tail = self.change.map_or(self.before.tail_index(), |c| {
            self.before.tail_index().min(c.after.tail_index())
        });
        tail > needed
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub reps: usize,
    pub reject_rate: f64,
    /// Alternatives only: mean and median of `|t̂ − τ|`.
    pub mean_abs_error_of_t_hat: Option<f64>,
    pub median_abs_error_of_t_hat: Option<f64>,
    /// Null only: two-sample KS distance between the statistics and the law's sups.
    pub ks_distance_of_statistic_to_law: Option<f64>,
    pub moment_condition_certified: bool,
    /// Per-replicate statistics in replicate order.
    pub statistics: Vec<f64>,
}

pub const MIN_EXPERIMENT_REPS: usize = 200;

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

pub fn size_power_experiment(
    spec: &ScenarioSpec,
    alpha: f64,
    law: &LimitLaw,
) -> Result<ExperimentReport> {
    spec.validate()?;
    if spec.reps < MIN_EXPERIMENT_REPS {
        return Err(Error::BadScenario(format!(
            "reps = {} is below {MIN_EXPERIMENT_REPS}",
            spec.reps
        )));
    }
    check_alpha(alpha)?;
    let kernel = spec.kernel()?;
    let q = spec.weight_function()?;
    check_law(&kernel, &q, law)?;
    let results: Vec<TestResult> = (0..spec.reps as u64)
        .into_par_iter()
        .map(|rep| run_test_with_path(&spec.generate(rep), &kernel, &q, alpha, law).map(|(r, _)| r))
        .collect::<Result<_>>()?;
    let reps = results.len();
    let reject_rate = results.iter().filter(|r| r.reject).count() as f64 / reps as f64;
    let statistics: Vec<f64> = results.iter().map(|r| r.statistic).collect();
    let (mean_err, median_err, ks) = match spec.change {
        Some(c) => {
            let errs: Vec<f64> = results
                .iter()
                .map(|r| (r.t_hat - c.fraction).abs())
                .collect();
            let mean = errs.iter().sum::<f64>() / reps as f64;
            (Some(mean), Some(median(errs)), None)
        }
        None => {
            let mut sorted = statistics.clone();
            sorted.sort_by(f64::total_cmp);
            let ks = law
                .has_samples()
                .then(|| ks_distance(&sorted, &law.sorted_sups));
            (None, None, ks)
        }
    };
    Ok(ExperimentReport {
        reps,
        reject_rate,
        mean_abs_error_of_t_hat: mean_err,
        median_abs_error_of_t_hat: median_err,
        ks_distance_of_statistic_to_law: ks,
        moment_condition_certified: spec.moment_condition_certified(),
        statistics,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RemainderPoint {
    pub n: usize,
    /// Median over replicates of `n^{−3/2} max_k |Σ_{i≤k<j} ψ(X_i, X_j)|`.
    pub median_m3: f64,
}

/// Decay of the degenerate Hoeffding remainder under the null scenario.
pub fn remainder_diagnostic(spec: &ScenarioSpec, n_list: &[usize]) -> Result<Vec<RemainderPoint>> {
    if spec.change.is_some() {
        return Err(Error::BadScenario(
            "the remainder diagnostic runs under the null".into(),
        ));
    }
    let kernel = spec.kernel()?;
    let projection = kernel
        .projection_under(spec.before)
        .ok_or_else(|| Error::MissingAnalyticProjection(kernel.id().to_string()))?;
    n_list
        .iter()
        .map(|&n| {
            if n < crate::uprocess::MIN_SAMPLE {
                return Err(Error::BadScenario(format!("n = {n} is below 4")));
            }
            let scale = (n as f64).powf(-1.5);
            let m3: Vec<f64> = (0..spec.reps as u64)
                .into_par_iter()
                .map(|rep| {
                    let mut r = rng::stream(spec.master_seed, Domain::Remainder, n as u64, rep);
                    let x = spec.before.sample_vec(&mut r, n);
                    let sums = remainder_sums(&x, &kernel, &projection)?;
                    Ok(scale * sums.iter().fold(0.0f64, |m, s| m.max(s.abs())))
                })
                .collect::<Result<_>>()?;
            Ok(RemainderPoint {
                n,
                median_m3: median(m3),
            })
        })
        .collect()
}
