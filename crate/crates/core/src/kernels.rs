//! Bivariate kernels `h(x, y)` and their Hoeffding projections.

use std::fmt;
use std::sync::Arc;

use rand::Rng;

use crate::dist::Distribution;
use crate::error::{Error, Result};
use crate::rng::{self, Domain};

pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
pub type PairFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Symmetry {
    /// `h(x, y) = h(y, x)`
    Symmetric,
    /// `h(x, y) = -h(y, x)`
    Antisymmetric,
}

impl Symmetry {
    /// `s` in `h(x, y) = s * h(y, x)`.
    pub fn sign(self) -> f64 {
        match self {
            Symmetry::Symmetric => 1.0,
            Symmetry::Antisymmetric => -1.0,
        }
    }
}

/// `sign(0) = 0`, which keeps antisymmetric kernels exact on ties.
#[inline]
pub fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BuiltinKernel {
    Product,
    HalfSqDiff,
    AbsDiff,
    SignSum,
    Diff,
    SignDiff,
}

impl BuiltinKernel {
    pub const ALL: [BuiltinKernel; 6] = [
        BuiltinKernel::Product,
        BuiltinKernel::HalfSqDiff,
        BuiltinKernel::AbsDiff,
        BuiltinKernel::SignSum,
        BuiltinKernel::Diff,
        BuiltinKernel::SignDiff,
    ];

    pub fn id(self) -> &'static str {
        match self {
            BuiltinKernel::Product => "product",
            BuiltinKernel::HalfSqDiff => "half_sq_diff",
            BuiltinKernel::AbsDiff => "abs_diff",
            BuiltinKernel::SignSum => "sign_sum",
            BuiltinKernel::Diff => "diff",
            BuiltinKernel::SignDiff => "sign_diff",
        }
    }

    pub fn from_id(id: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.id() == id)
            .ok_or_else(|| Error::UnknownKernel(id.to_string()))
    }

    pub fn symmetry(self) -> Symmetry {
        match self {
            BuiltinKernel::Diff | BuiltinKernel::SignDiff => Symmetry::Antisymmetric,
            _ => Symmetry::Symmetric,
        }
    }

    #[inline]
    pub fn eval(self, x: f64, y: f64) -> f64 {
        match self {
            BuiltinKernel::Product => x * y,
            BuiltinKernel::HalfSqDiff => 0.5 * (x - y) * (x - y),
            BuiltinKernel::AbsDiff => (x - y).abs(),
            BuiltinKernel::SignSum => sign(x + y),
            BuiltinKernel::Diff => x - y,
            BuiltinKernel::SignDiff => sign(x - y),
        }
    }

    /// Growth order `d` with `|h(x, y)| = O((|x| + |y|)^d)`; 0 for bounded kernels.
    pub fn growth_order(self) -> f64 {
        match self {
            BuiltinKernel::SignSum | BuiltinKernel::SignDiff => 0.0,
            BuiltinKernel::Product | BuiltinKernel::AbsDiff | BuiltinKernel::Diff => 1.0,
            BuiltinKernel::HalfSqDiff => 2.0,
        }
    }

    /// Scenario used for the projection attached by [`builtin_kernel`].
    fn default_scenario(self) -> Option<Distribution> {
        match self {
            BuiltinKernel::Product => Some(Distribution::Normal { mean: 1.0, sd: 1.0 }),
            BuiltinKernel::HalfSqDiff | BuiltinKernel::Diff | BuiltinKernel::SignDiff => {
                Some(Distribution::standard_normal())
            }
            BuiltinKernel::AbsDiff | BuiltinKernel::SignSum => None,
        }
    }

    /// Closed-form projection `(θ, g, σ²)` of this kernel under `dist`, when known.
    pub fn projection(self, dist: Distribution) -> Option<AnalyticProjection> {
        match self {
            BuiltinKernel::Product => {
                let mu = dist.mean()?;
                let var = dist.variance()?;
                let sigma2 = if mu == 0.0 {
                    Sigma2::Finite(0.0)
                } else {
                    Sigma2::from_value(mu * mu * var)
                };
                Some(
                    AnalyticProjection::new(
                        dist,
                        mu * mu,
                        Arc::new(move |t| mu * (t - mu)),
                        sigma2,
                    )
                    .with_remainder(Arc::new(move |x, y| (x - mu) * (y - mu))),
                )
            }
            BuiltinKernel::HalfSqDiff => {
                let mu = dist.mean()?;
                let var = dist.variance().filter(|v| v.is_finite())?;
                let sigma2 = match dist {
                    Distribution::Normal { .. } => Sigma2::Finite(0.5 * var * var),
                    Distribution::Uniform { lo, hi } => Sigma2::Finite((hi - lo).powi(4) / 720.0),
                    Distribution::StudentT { df } if df > 4.0 => {
                        let m4 = 3.0 * df * df / ((df - 2.0) * (df - 4.0));
                        Sigma2::Finite(0.25 * (m4 - var * var))
                    }
                    Distribution::ParetoSymmetric { index } if index > 4.0 => {
                        let m4 = index / (index - 4.0);
                        Sigma2::Finite(0.25 * (m4 - var * var))
                    }
                    _ => Sigma2::Infinite,
                };
                Some(
                    AnalyticProjection::new(
                        dist,
                        var,
                        Arc::new(move |t| 0.5 * ((t - mu) * (t - mu) - var)),
                        sigma2,
                    )
                    .with_remainder(Arc::new(move |x, y| -(x - mu) * (y - mu))),
                )
            }
            BuiltinKernel::Diff => {
                let mu = dist.mean()?;
                let sigma2 = Sigma2::from_value(dist.variance()?);
                Some(
                    AnalyticProjection::new(dist, 0.0, Arc::new(move |t| mu - t), sigma2)
                        .with_remainder(Arc::new(|_, _| 0.0)),
                )
            }
            BuiltinKernel::SignDiff => Some(AnalyticProjection::new(
                dist,
                0.0,
                Arc::new(move |t| 1.0 - 2.0 * dist.cdf(t)),
                Sigma2::Finite(1.0 / 3.0),
            )),
            BuiltinKernel::AbsDiff | BuiltinKernel::SignSum => None,
        }
    }
}

/// `σ² = E g²(X₁)`, which may diverge for heavy-tailed data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Sigma2 {
    Finite(f64),
    Infinite,
}

impl Sigma2 {
    fn from_value(v: f64) -> Self {
        if v.is_finite() {
            Sigma2::Finite(v)
        } else {
            Sigma2::Infinite
        }
    }

    pub fn sigma(self) -> Option<f64> {
        match self {
            Sigma2::Finite(v) => Some(v.sqrt()),
            Sigma2::Infinite => None,
        }
    }
}

/// Hoeffding projection of a kernel under a named data distribution:
/// `θ = E h(X₁, X₂)`, `g(t) = E h(X, t) − θ`, `σ² = E g²(X₁)`.
#[derive(Clone)]
pub struct AnalyticProjection {
    pub distribution: Distribution,
    pub theta: f64,
    pub sigma2: Sigma2,
    g: ScalarFn,
    remainder: Option<PairFn>,
}

impl fmt::Debug for AnalyticProjection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AnalyticProjection")
            .field("distribution", &self.distribution)
            .field("theta", &self.theta)
            .field("sigma2", &self.sigma2)
            .field("closed_form_remainder", &self.remainder.is_some())
            .finish()
    }
}

impl AnalyticProjection {
    pub fn new(distribution: Distribution, theta: f64, g: ScalarFn, sigma2: Sigma2) -> Self {
        AnalyticProjection {
            distribution,
            theta,
            sigma2,
            g,
            remainder: None,
        }
    }

    /// Supplies the degenerate remainder `ψ` in closed form instead of
    /// evaluating it from `h`, `θ` and `g`.
    pub fn with_remainder(mut self, psi: PairFn) -> Self {
        self.remainder = Some(psi);
        self
    }

    #[inline]
    pub fn g(&self, t: f64) -> f64 {
        (self.g)(t)
    }

    pub(crate) fn remainder(&self) -> Option<&PairFn> {
        self.remainder.as_ref()
    }
}

#[derive(Clone)]
enum Eval {
    Builtin(BuiltinKernel),
    Custom(PairFn),
}

/// A kernel with its declared symmetry class.
#[derive(Clone)]
pub struct Kernel {
    id: String,
    symmetry: Symmetry,
    eval: Eval,
    analytic: Option<AnalyticProjection>,
}

impl fmt::Debug for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Kernel")
            .field("id", &self.id)
            .field("symmetry", &self.symmetry)
            .field("analytic", &self.analytic)
            .finish()
    }
}

/// Looks up a built-in kernel by its CLI id.
pub fn builtin_kernel(id: &str) -> Result<Kernel> {
    BuiltinKernel::from_id(id).map(Kernel::builtin)
}

impl Kernel {
    pub fn builtin(kind: BuiltinKernel) -> Self {
        Kernel {
            id: kind.id().to_string(),
            symmetry: kind.symmetry(),
            eval: Eval::Builtin(kind),
            analytic: kind.default_scenario().and_then(|d| kind.projection(d)),
        }
    }

    /// A user kernel. The declared `symmetry` is trusted by every computation;
    /// [`check_symmetry`] can probe it.
    pub fn custom<F>(id: impl Into<String>, symmetry: Symmetry, f: F) -> Self
    where
        F: Fn(f64, f64) -> f64 + Send + Sync + 'static,
    {
        Kernel {
            id: id.into(),
            symmetry,
            eval: Eval::Custom(Arc::new(f)),
            analytic: None,
        }
    }

    pub fn with_projection(mut self, projection: AnalyticProjection) -> Self {
        self.analytic = Some(projection);
        self
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn symmetry(&self) -> Symmetry {
        self.symmetry
    }

    pub fn builtin_kind(&self) -> Option<BuiltinKernel> {
        match self.eval {
            Eval::Builtin(b) => Some(b),
            Eval::Custom(_) => None,
        }
    }

    pub fn analytic(&self) -> Option<&AnalyticProjection> {
        self.analytic.as_ref()
    }

    /// The projection under `dist`: the attached one if it was built for
    /// `dist`, otherwise the closed form of a built-in kernel.
    pub fn projection_under(&self, dist: Distribution) -> Option<AnalyticProjection> {
        if let Some(p) = self.analytic.as_ref().filter(|p| p.distribution == dist) {
            return Some(p.clone());
        }
        self.builtin_kind().and_then(|b| b.projection(dist))
    }

    #[inline]
    pub fn evaluate(&self, x: f64, y: f64) -> f64 {
        match &self.eval {
            Eval::Builtin(b) => b.eval(x, y),
            Eval::Custom(f) => f(x, y),
        }
    }

    /// Hands a monomorphic evaluation closure to `visitor`, so hot loops avoid
    /// per-pair dispatch on the built-ins.
    pub(crate) fn visit<V: PairVisitor>(&self, visitor: V) -> V::Output {
        match &self.eval {
            Eval::Builtin(b) => match b {
                BuiltinKernel::Product => visitor.visit(|x, y| BuiltinKernel::Product.eval(x, y)),
                BuiltinKernel::HalfSqDiff => {
                    visitor.visit(|x, y| BuiltinKernel::HalfSqDiff.eval(x, y))
                }
                BuiltinKernel::AbsDiff => visitor.visit(|x, y| BuiltinKernel::AbsDiff.eval(x, y)),
                BuiltinKernel::SignSum => visitor.visit(|x, y| BuiltinKernel::SignSum.eval(x, y)),
                BuiltinKernel::Diff => visitor.visit(|x, y| BuiltinKernel::Diff.eval(x, y)),
                BuiltinKernel::SignDiff => visitor.visit(|x, y| BuiltinKernel::SignDiff.eval(x, y)),
            },
            Eval::Custom(f) => visitor.visit(|x, y| f(x, y)),
        }
    }
}

pub(crate) trait PairVisitor {
    type Output;
    fn visit<F: Fn(f64, f64) -> f64>(self, h: F) -> Self::Output;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymmetryReport {
    pub consistent: bool,
    pub worst_violation: f64,
}

/// Probes `h(x, y) = s * h(y, x)` on `probes` random pairs from `[-10, 10]²`,
/// plus the diagonal point `(x, x)` of each pair.
pub fn check_symmetry(kernel: &Kernel, probes: usize, rng_seed: u64) -> SymmetryReport {
    let s = kernel.symmetry().sign();
    let mut rng = rng::stream(rng_seed, Domain::Probe, 0, 0);
    let mut worst = 0.0f64;
    let mut scale = 1.0f64;
    for _ in 0..probes.max(1) {
        let x: f64 = rng.random_range(-10.0..10.0);
        let y: f64 = rng.random_range(-10.0..10.0);
        for (a, b) in [(x, y), (x, x)] {
            let hab = kernel.evaluate(a, b);
            let hba = kernel.evaluate(b, a);
            scale = scale.max(hab.abs()).max(hba.abs());
            let v = (hab - s * hba).abs();
            worst = if v.is_nan() {
                f64::INFINITY
            } else {
                worst.max(v)
            };
        }
    }
    SymmetryReport {
        consistent: worst <= 1e-12 * scale,
        worst_violation: worst,
    }
}
