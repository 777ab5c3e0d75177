//! Two-sample comparison sums `Z_k`, the jackknife estimates `θ̂`, `σ̂²`, and
//! the standardized / studentized process paths on the jump grid
//! `t_k = k / (n + 1)`, `k = 1, …, n − 1`.

use crate::error::{Error, Result};
use crate::kernels::{AnalyticProjection, Kernel, PairVisitor, Symmetry};

pub const MIN_SAMPLE: usize = 4;

/// Observations in time order.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample(Vec<f64>);

impl Sample {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < MIN_SAMPLE {
            return Err(Error::SampleTooSmall {
                n: values.len(),
                min: MIN_SAMPLE,
            });
        }
        check_finite(&values)?;
        Ok(Sample(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl AsRef<[f64]> for Sample {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

fn check_finite(values: &[f64]) -> Result<()> {
    match values.iter().position(|x| !x.is_finite()) {
        Some(index) => Err(Error::NonFiniteObservation { index }),
        None => Ok(()),
    }
}

fn require_len(values: &[f64], min: usize) -> Result<()> {
    if values.len() < min {
        Err(Error::SampleTooSmall {
            n: values.len(),
            min,
        })
    } else {
        check_finite(values)
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Kahan {
    sum: f64,
    comp: f64,
}

impl Kahan {
    #[inline(always)]
    fn add(&mut self, x: f64) {
        let y = x - self.comp;
        let t = self.sum + y;
        self.comp = (t - self.sum) - y;
        self.sum = t;
    }

    #[inline(always)]
    fn value(&self) -> f64 {
        self.sum
    }
}

/// Output of one O(n²) sweep over ordered pairs.
struct PairSums {
    /// `Z_1, …, Z_{n−1}`.
    z: Vec<f64>,
    /// `Σ_{i≠j} h(X_i, X_j)` for each `j`; empty unless requested.
    cols: Vec<f64>,
}

/// One sweep over `i < j`. Row `i` accumulates `A_i = Σ_{j>i} h(X_i, X_j)`,
/// column `j` accumulates `B_j = Σ_{i<j} h(X_i, X_j)`, and
/// `Z_k = Z_{k−1} + A_k − B_k`. With `COLS`, `h(X_j, X_i)` is also summed so
/// that the full column sums of the jackknife are available.
fn sweep<P: Copy, F: Fn(P, P) -> f64, const COLS: bool>(pts: &[P], h: F) -> PairSums {
    let n = pts.len();
    let mut upper = vec![Kahan::default(); n];
    let mut lower = if COLS { vec![0.0; n] } else { Vec::new() };
    let mut z = Vec::with_capacity(n.saturating_sub(1));
    let mut zacc = Kahan::default();
    for i in 0..n {
        let xi = pts[i];
        let mut row = Kahan::default();
        let mut back = Kahan::default();
        for (j, &xj) in pts.iter().enumerate().skip(i + 1) {
            let v = h(xi, xj);
            row.add(v);
            upper[j].add(v);
            if COLS {
                back.add(h(xj, xi));
            }
        }
        if COLS {
            lower[i] = back.value();
        }
        if i + 1 < n {
            zacc.add(row.value() - upper[i].value());
            z.push(zacc.value());
        }
    }
    let cols = if COLS {
        upper
            .iter()
            .zip(&lower)
            .map(|(u, l)| u.value() + l)
            .collect()
    } else {
        Vec::new()
    };
    PairSums { z, cols }
}

struct SweepKernel<'a, const COLS: bool>(&'a [f64]);

impl<const COLS: bool> PairVisitor for SweepKernel<'_, COLS> {
    type Output = PairSums;
    fn visit<F: Fn(f64, f64) -> f64>(self, h: F) -> PairSums {
        sweep::<f64, F, COLS>(self.0, h)
    }
}

/// `Z_1 … Z_{n−1}` for a kernel on a sample.
#[derive(Debug, Clone, PartialEq)]
pub struct ZPath {
    pub z: Vec<f64>,
    pub kernel_id: String,
    pub n: usize,
}

/// Jackknife quantities of a sample.
#[derive(Debug, Clone, PartialEq)]
pub struct Estimates {
    pub theta_hat: f64,
    pub sigma2_hat: f64,
    /// `(1/(n−1)) Σ_{i≠j} h(X_i, X_j)` for each `j`.
    pub row_means: Vec<f64>,
    /// `Σ_{i≠j} h(X_i, X_j)` as computed, before any antisymmetric override.
    pub raw_pair_total: f64,
}

impl Estimates {
    pub fn sigma_hat(&self) -> f64 {
        self.sigma2_hat.sqrt()
    }
}

const DEGENERATE_VARIANCE: f64 = 1e-300;

fn estimates_from_cols(cols: &[f64], symmetry: Symmetry) -> Result<Estimates> {
    let n = cols.len();
    let nf = n as f64;
    let mut total = Kahan::default();
    cols.iter().for_each(|&c| total.add(c));
    let raw_pair_total = total.value();
    let theta_hat = match symmetry {
        Symmetry::Symmetric => raw_pair_total / (nf * (nf - 1.0)),
        Symmetry::Antisymmetric => 0.0,
    };
    let row_means: Vec<f64> = cols.iter().map(|c| c / (nf - 1.0)).collect();
    let mut ss = Kahan::default();
    row_means
        .iter()
        .for_each(|r| ss.add((r - theta_hat) * (r - theta_hat)));
    let sigma2_hat = ss.value() / nf;
    if sigma2_hat.is_nan() || sigma2_hat <= DEGENERATE_VARIANCE {
        return Err(Error::DegenerateVariance(sigma2_hat));
    }
    Ok(Estimates {
        theta_hat,
        sigma2_hat,
        row_means,
        raw_pair_total,
    })
}

/// `Z_k` on raw values; needs only `n ≥ 2`.
pub fn z_sums(values: &[f64], kernel: &Kernel) -> Result<Vec<f64>> {
    require_len(values, 2)?;
    Ok(kernel.visit(SweepKernel::<false>(values)).z)
}

/// Jackknife estimates on raw values; needs only `n ≥ 3`.
pub fn estimate_values(values: &[f64], kernel: &Kernel) -> Result<Estimates> {
    require_len(values, 3)?;
    let sums = kernel.visit(SweepKernel::<true>(values));
    estimates_from_cols(&sums.cols, kernel.symmetry())
}

pub fn z_path(sample: &Sample, kernel: &Kernel) -> ZPath {
    ZPath {
        z: kernel.visit(SweepKernel::<false>(sample.values())).z,
        kernel_id: kernel.id().to_string(),
        n: sample.len(),
    }
}

pub fn estimate(sample: &Sample, kernel: &Kernel) -> Result<Estimates> {
    estimate_values(sample.values(), kernel)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Standardized,
    Studentized,
}

/// Which Gaussian process the path converges to under the null.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LimitProcess {
    /// `Γ(t) = (1−t) W(t) + t (W(1) − W(t))`, symmetric kernels.
    GammaProcess,
    /// `B(t) = W(t) − t W(1)`, antisymmetric kernels.
    Bridge,
}

impl LimitProcess {
    pub fn for_symmetry(symmetry: Symmetry) -> Self {
        match symmetry {
            Symmetry::Symmetric => LimitProcess::GammaProcess,
            Symmetry::Antisymmetric => LimitProcess::Bridge,
        }
    }

    pub fn id(self) -> &'static str {
        match self {
            LimitProcess::GammaProcess => "gamma",
            LimitProcess::Bridge => "bridge",
        }
    }

    pub fn from_id(s: &str) -> Result<Self> {
        match s {
            "gamma" => Ok(LimitProcess::GammaProcess),
            "bridge" => Ok(LimitProcess::Bridge),
            other => Err(Error::BadParams(format!(
                "unknown process `{other}` (gamma|bridge)"
            ))),
        }
    }
}

/// Process values `u_k` at `t_k = k/(n+1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProcessPath {
    pub t: Vec<f64>,
    pub u: Vec<f64>,
    pub mode: Mode,
    pub limit: LimitProcess,
}

impl ProcessPath {
    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }
}

pub fn grid_point(k: usize, n: usize) -> f64 {
    k as f64 / (n as f64 + 1.0)
}

/// `n^{−3/2} σ^{−1} (Z_k − n² t_k (1 − t_k) θ)`.
fn centered_scaled(z: &[f64], n: usize, theta: f64, sigma: f64) -> (Vec<f64>, Vec<f64>) {
    let nf = n as f64;
    let scale = 1.0 / (nf * nf.sqrt() * sigma);
    let t: Vec<f64> = (1..n).map(|k| grid_point(k, n)).collect();
    let u = z
        .iter()
        .zip(&t)
        .map(|(&zk, &tk)| {
            let centre = if theta == 0.0 {
                0.0
            } else {
                nf * nf * tk * (1.0 - tk) * theta
            };
            scale * (zk - centre)
        })
        .collect();
    (t, u)
}

/// Studentized path from raw values (`n ≥ 3`), reusing one pair sweep for
/// both `Z_k` and the jackknife.
pub fn studentized_values(values: &[f64], kernel: &Kernel) -> Result<(ProcessPath, Estimates)> {
    require_len(values, 3)?;
    let sums = kernel.visit(SweepKernel::<true>(values));
    let est = estimates_from_cols(&sums.cols, kernel.symmetry())?;
    let (t, u) = centered_scaled(&sums.z, values.len(), est.theta_hat, est.sigma_hat());
    let path = ProcessPath {
        t,
        u,
        mode: Mode::Studentized,
        limit: LimitProcess::for_symmetry(kernel.symmetry()),
    };
    Ok((path, est))
}

pub fn studentized_path(sample: &Sample, kernel: &Kernel) -> Result<ProcessPath> {
    studentized_values(sample.values(), kernel).map(|(p, _)| p)
}

/// Path standardized by known `θ` and `σ` (oracle scenarios).
pub fn standardized_path(
    sample: &Sample,
    kernel: &Kernel,
    theta: f64,
    sigma: f64,
) -> Result<ProcessPath> {
    standardized_values(sample.values(), kernel, theta, sigma)
}

pub fn standardized_values(
    values: &[f64],
    kernel: &Kernel,
    theta: f64,
    sigma: f64,
) -> Result<ProcessPath> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::NonpositiveSigma(sigma));
    }
    let z = z_sums(values, kernel)?;
    let (t, u) = centered_scaled(&z, values.len(), theta, sigma);
    Ok(ProcessPath {
        t,
        u,
        mode: Mode::Standardized,
        limit: LimitProcess::for_symmetry(kernel.symmetry()),
    })
}

/// `W_k` built from the kernel's analytic `g`: `(n−k) Σ_{j≤k} g(X_j) + k Σ_{j>k} g(X_j)`
/// for symmetric kernels, with the first term negated for antisymmetric ones
/// (there `E h(x, X) = −g(x)`).
pub fn projection_sums(
    values: &[f64],
    symmetry: Symmetry,
    projection: &AnalyticProjection,
) -> Vec<f64> {
    let n = values.len();
    let mut prefix = Vec::with_capacity(n);
    let mut acc = Kahan::default();
    for &x in values {
        acc.add(projection.g(x));
        prefix.push(acc.value());
    }
    let total = prefix.last().copied().unwrap_or(0.0);
    let left_sign = symmetry.sign();
    (1..n)
        .map(|k| {
            let gk = prefix[k - 1];
            left_sign * (n - k) as f64 * gk + k as f64 * (total - gk)
        })
        .collect()
}

/// `n^{−3/2} σ^{−1} W_k` on the jump grid.
pub fn projection_path(sample: &Sample, kernel: &Kernel, sigma: f64) -> Result<ProcessPath> {
    let projection = kernel
        .analytic()
        .ok_or_else(|| Error::MissingAnalyticProjection(kernel.id().to_string()))?;
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::NonpositiveSigma(sigma));
    }
    let w = projection_sums(sample.values(), kernel.symmetry(), projection);
    let (t, u) = centered_scaled(&w, sample.len(), 0.0, sigma);
    Ok(ProcessPath {
        t,
        u,
        mode: Mode::Standardized,
        limit: LimitProcess::for_symmetry(kernel.symmetry()),
    })
}

/// `Σ_{i≤k<j} ψ(X_i, X_j)` for the Hoeffding remainder
/// `ψ = h − θ − g(x) − g(y)` (symmetric) or `ψ = h + g(x) − g(y)` (antisymmetric),
/// or the projection's closed-form remainder when it carries one.
pub fn remainder_sums(
    values: &[f64],
    kernel: &Kernel,
    projection: &AnalyticProjection,
) -> Result<Vec<f64>> {
    require_len(values, 2)?;
    if let Some(psi) = projection.remainder() {
        return Ok(sweep::<f64, _, false>(values, |x, y| psi(x, y)).z);
    }
    let pts: Vec<(f64, f64)> = values.iter().map(|&x| (x, projection.g(x))).collect();
    let theta = projection.theta;
    let sums = match kernel.symmetry() {
        Symmetry::Symmetric => sweep::<_, _, false>(&pts, |(x, gx), (y, gy)| {
            kernel.evaluate(x, y) - theta - gx - gy
        }),
        Symmetry::Antisymmetric => {
            sweep::<_, _, false>(&pts, |(x, gx), (y, gy)| kernel.evaluate(x, y) + gx - gy)
        }
    };
    Ok(sums.z)
}
