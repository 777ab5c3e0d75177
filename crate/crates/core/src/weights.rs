//! Weight functions `q` on (0, 1) and a numerical test for finiteness of
//!
//! ```text
//! I(q, c) = ∫_{0+}^{1−} 1/(t(1−t)) · exp(−c q²(t) / (t(1−t))) dt.
//! ```
//!
//! The classifier integrates over dyadic shells `[2^{−(m+1)}, 2^{−m}]` (and
//! their mirror images near 1) in the log coordinate `s = −log₂ u`, where
//! `u` is the distance to the endpoint. In that coordinate the shell
//! integrand is `ln 2 · exp(−c q²/(t(1−t))) / (1 − u)`, which is bounded, so
//! the endpoint behaviour shows up as the decay of the shell increments.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::kernels::ScalarFn;
use crate::quad;

const LN2: f64 = std::f64::consts::LN_2;
const E: f64 = std::f64::consts::E;

/// Parameterized built-in weights. String form: `one`, `pow:NU`, `loglog:LAMBDA`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WeightSpec {
    /// `q ≡ 1`
    One,
    /// `q(t) = (t(1−t))^ν`
    Power(f64),
    /// `q(t) = sqrt(λ t(1−t) log log(e^e / (t(1−t))))`
    LogLog(f64),
}

impl WeightSpec {
    fn validate(self) -> Result<Self> {
        match self {
            WeightSpec::Power(v) | WeightSpec::LogLog(v) if !(v.is_finite() && v > 0.0) => Err(
                Error::BadParams(format!("weight parameter must be positive, got {v}")),
            ),
            other => Ok(other),
        }
    }
}

impl fmt::Display for WeightSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightSpec::One => write!(f, "one"),
            WeightSpec::Power(nu) => write!(f, "pow:{nu}"),
            WeightSpec::LogLog(lambda) => write!(f, "loglog:{lambda}"),
        }
    }
}

impl FromStr for WeightSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let param = |v: &str| {
            v.trim()
                .parse::<f64>()
                .map_err(|_| Error::BadParams(format!("cannot parse weight `{s}`")))
        };
        let spec = match s.split_once(':') {
            None if s == "one" => WeightSpec::One,
            Some(("pow", v)) => WeightSpec::Power(param(v)?),
            Some(("loglog", v)) => WeightSpec::LogLog(param(v)?),
            _ => {
                return Err(Error::BadParams(format!(
                    "unknown weight `{s}` (one|pow:NU|loglog:LAMBDA)"
                )))
            }
        };
        spec.validate()
    }
}

/// Which endpoint a distance `u` is measured from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// `t = u`
    Zero,
    /// `t = 1 − u`
    One,
}

#[derive(Clone)]
enum Kind {
    Builtin(WeightSpec),
    Custom { name: String, f: ScalarFn },
}

/// A member of the weight class: positive on (0, 1), nondecreasing on
/// `(0, δ]` and nonincreasing on `[1 − δ, 1)` for `δ = monotone_zone`.
#[derive(Clone)]
pub struct WeightFunction {
    kind: Kind,
    monotone_zone: f64,
}

impl fmt::Debug for WeightFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "WeightFunction({}, δ={})",
            self.label(),
            self.monotone_zone
        )
    }
}

pub fn builtin_weight(spec: WeightSpec) -> Result<WeightFunction> {
    Ok(WeightFunction {
        kind: Kind::Builtin(spec.validate()?),
        monotone_zone: 0.1,
    })
}

/// `ln(u(1−u))` without cancellation for tiny `u`.
#[inline]
fn ln_spread(u: f64) -> f64 {
    u.ln() + (-u).ln_1p()
}

impl WeightFunction {
    pub fn parse(s: &str) -> Result<Self> {
        builtin_weight(s.parse()?)
    }

    /// A user weight. Near `t = 1` it can only be probed down to `1 − t ≈ 2^{−50}`.
    pub fn custom<F>(name: impl Into<String>, monotone_zone: f64, f: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        WeightFunction {
            kind: Kind::Custom {
                name: name.into(),
                f: std::sync::Arc::new(f),
            },
            monotone_zone,
        }
    }

    pub fn spec(&self) -> Option<WeightSpec> {
        match self.kind {
            Kind::Builtin(s) => Some(s),
            Kind::Custom { .. } => None,
        }
    }

    pub fn label(&self) -> String {
        match &self.kind {
            Kind::Builtin(s) => s.to_string(),
            Kind::Custom { name, .. } => format!("custom:{name}"),
        }
    }

    pub fn monotone_zone(&self) -> f64 {
        self.monotone_zone
    }

    pub fn value(&self, t: f64) -> f64 {
        match &self.kind {
            Kind::Builtin(WeightSpec::One) => 1.0,
            Kind::Builtin(WeightSpec::Power(nu)) => (t * (1.0 - t)).powf(*nu),
            Kind::Builtin(WeightSpec::LogLog(lambda)) => {
                let x = t * (1.0 - t);
                (lambda * x * (E - x.ln()).ln()).sqrt()
            }
            Kind::Custom { f, .. } => f(t),
        }
    }

    /// `ln q(t)` at distance `u` from the given endpoint.
    pub fn ln_value_near(&self, u: f64, side: Side) -> f64 {
        match &self.kind {
            Kind::Builtin(WeightSpec::One) => 0.0,
            Kind::Builtin(WeightSpec::Power(nu)) => nu * ln_spread(u),
            Kind::Builtin(WeightSpec::LogLog(lambda)) => {
                let lx = ln_spread(u);
                0.5 * (lambda.ln() + lx + (E - lx).ln().ln())
            }
            Kind::Custom { f, .. } => match side {
                Side::Zero => f(u).ln(),
                Side::One => f(1.0 - u).ln(),
            },
        }
    }

    /// `q²(t) / (t(1−t))` at distance `u` from the given endpoint.
    pub fn scaled_square_near(&self, u: f64, side: Side) -> f64 {
        match &self.kind {
            Kind::Builtin(WeightSpec::One) => (-ln_spread(u)).exp(),
            Kind::Builtin(WeightSpec::Power(nu)) => ((2.0 * nu - 1.0) * ln_spread(u)).exp(),
            Kind::Builtin(WeightSpec::LogLog(lambda)) => lambda * (E - ln_spread(u)).ln(),
            Kind::Custom { .. } => (2.0 * self.ln_value_near(u, side) - ln_spread(u)).exp(),
        }
    }

    /// Deepest dyadic level `m` (with `u = 2^{−m}`) at which this weight can be
    /// evaluated near `side`.
    fn max_level(&self, side: Side, wanted: usize) -> usize {
        match (&self.kind, side) {
            (Kind::Custom { .. }, Side::One) => wanted.min(50),
            _ => wanted,
        }
    }
}

/// Grid probe of the class requirements.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassProbe {
    /// Smallest value of `q` over `[δ, 1−δ]` for `δ = 2^{−20}`.
    pub interior_min: f64,
    pub positive: bool,
    pub monotone_near_zero: bool,
    pub monotone_near_one: bool,
}

pub fn probe_class(q: &WeightFunction) -> ClassProbe {
    const POINTS: usize = 4096;
    let delta = 2f64.powi(-20);
    let interior_min = (0..=POINTS)
        .map(|i| q.value(delta + (1.0 - 2.0 * delta) * i as f64 / POINTS as f64))
        .fold(f64::INFINITY, f64::min);
    let zone = q.monotone_zone();
    let left: Vec<f64> = (1..=POINTS)
        .map(|i| q.value(zone * i as f64 / POINTS as f64))
        .collect();
    let right: Vec<f64> = (1..=POINTS)
        .map(|i| q.value(1.0 - zone * i as f64 / POINTS as f64))
        .collect();
    let nondecreasing = |v: &[f64]| v.windows(2).all(|w| w[1] >= w[0] * (1.0 - 1e-12));
    ClassProbe {
        interior_min,
        positive: interior_min > 0.0,
        monotone_near_zero: nondecreasing(&left),
        monotone_near_one: nondecreasing(&right),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Finite,
    Divergent,
    Inconclusive,
}

impl Verdict {
    pub fn id(self) -> &'static str {
        match self {
            Verdict::Finite => "finite",
            Verdict::Divergent => "divergent",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CVerdict {
    pub c: f64,
    pub verdict: Verdict,
    /// Integral over `[2^{−m_max}, 1 − 2^{−m_max}]`.
    pub partial_integral: f64,
    /// Extrapolated mass beyond the last window; infinite when divergent,
    /// NaN when inconclusive.
    pub tail_estimate: f64,
    /// Power-law decay exponent `p` of the shell increments (`d_m ~ m^{−p}`),
    /// the smaller of the two endpoints. Infinite for faster-than-power decay.
    pub decay_exponent: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassSummary {
    FiniteForAllTested,
    FiniteForSomeNotAll,
    DivergentForAllTested,
    Inconclusive,
}

impl ClassSummary {
    pub fn id(self) -> &'static str {
        match self {
            ClassSummary::FiniteForAllTested => "FiniteForAllTested",
            ClassSummary::FiniteForSomeNotAll => "FiniteForSomeNotAll",
            ClassSummary::DivergentForAllTested => "DivergentForAllTested",
            ClassSummary::Inconclusive => "Inconclusive",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightClassification {
    pub weight: String,
    pub verdicts: Vec<CVerdict>,
    pub summary: ClassSummary,
}

impl WeightClassification {
    pub fn any_finite(&self) -> bool {
        self.verdicts.iter().any(|v| v.verdict == Verdict::Finite)
    }
}

pub const DEFAULT_C_GRID: [f64; 4] = [0.01, 0.1, 1.0, 10.0];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassifyOptions {
    /// Deepest dyadic window `[2^{−m}, 1 − 2^{−m}]`.
    pub m_max: usize,
    /// Absolute quadrature tolerance per window.
    pub abs_tol: f64,
    /// Partial integrals above this are divergent.
    pub overflow_cap: f64,
    /// Increments shrinking by at least this ratio over the last levels are geometric.
    pub geometric_ratio: f64,
    pub geometric_levels: usize,
    /// Half-width of the band around `p = 1` left inconclusive.
    pub exponent_margin: f64,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions {
            m_max: 1000,
            abs_tol: 1e-10,
            overflow_cap: 1e12,
            geometric_ratio: 0.95,
            geometric_levels: 5,
            exponent_margin: 0.05,
        }
    }
}

/// Shell integrals `∫_{2^{−(m+1)}}^{2^{−m}}` of the `I(q, c)` integrand in
/// distance-to-`side`, for `m = 2, …, max_level − 1`.
fn shell_increments(q: &WeightFunction, c: f64, side: Side, opts: &ClassifyOptions) -> Vec<f64> {
    let top = q.max_level(side, opts.m_max);
    let integrand = |s: f64| {
        let u = (-s * LN2).exp();
        let e = (-c * q.scaled_square_near(u, side)).exp();
        if e == 0.0 {
            0.0
        } else {
            LN2 * e / (1.0 - u)
        }
    };
    (2..top)
        .map(|m| quad::integrate(integrand, m as f64, (m + 1) as f64, opts.abs_tol).value)
        .collect()
}

struct SideVerdict {
    verdict: Verdict,
    sum: f64,
    tail: f64,
    exponent: f64,
}

fn judge_side(d: &[f64], opts: &ClassifyOptions) -> SideVerdict {
    let sum: f64 = d.iter().sum();
    let len = d.len();
    let level = |i: usize| (i + 2) as f64 + 0.5;
    let exponent = if len < 4 {
        f64::NAN
    } else {
        let (a, b) = (len / 2, len - 1);
        if d[b] == 0.0 {
            f64::INFINITY
        } else if d[a] == 0.0 {
            f64::NEG_INFINITY
        } else {
            -(d[b] / d[a]).ln() / (level(b) / level(a)).ln()
        }
    };
    let verdict = |verdict, tail| SideVerdict {
        verdict,
        sum,
        tail,
        exponent,
    };
    if !sum.is_finite() || sum > opts.overflow_cap {
        return verdict(Verdict::Divergent, f64::INFINITY);
    }
    let k = opts.geometric_levels.min(len.saturating_sub(1));
    if k == 0 {
        return verdict(Verdict::Inconclusive, f64::NAN);
    }
    let recent = &d[len - 1 - k..];
    let last = recent[k];
    if last == 0.0 {
        return verdict(Verdict::Finite, 0.0);
    }
    let ratios: Vec<f64> = recent.windows(2).map(|w| w[1] / w[0]).collect();
    let worst = ratios.iter().copied().fold(0.0f64, f64::max);
    if worst < opts.geometric_ratio {
        return verdict(Verdict::Finite, last * worst / (1.0 - worst));
    }
    if ratios.iter().all(|&r| r >= 1.0) {
        return verdict(Verdict::Divergent, f64::INFINITY);
    }
    if exponent > 1.0 + opts.exponent_margin {
        verdict(Verdict::Finite, last * level(len - 1) / (exponent - 1.0))
    } else if exponent < 1.0 - opts.exponent_margin {
        verdict(Verdict::Divergent, f64::INFINITY)
    } else {
        verdict(Verdict::Inconclusive, f64::NAN)
    }
}

fn classify_one(q: &WeightFunction, c: f64, opts: &ClassifyOptions) -> CVerdict {
    let core = quad::integrate(
        |t| (-c * q.scaled_square_near(t, Side::Zero)).exp() / (t * (1.0 - t)),
        0.25,
        0.75,
        opts.abs_tol,
    )
    .value;
    let left = judge_side(&shell_increments(q, c, Side::Zero, opts), opts);
    let right = judge_side(&shell_increments(q, c, Side::One, opts), opts);
    let verdict = match (left.verdict, right.verdict) {
        (Verdict::Divergent, _) | (_, Verdict::Divergent) => Verdict::Divergent,
        (Verdict::Finite, Verdict::Finite) => Verdict::Finite,
        _ => Verdict::Inconclusive,
    };
    let tail_estimate = match verdict {
        Verdict::Finite => left.tail + right.tail,
        Verdict::Divergent => f64::INFINITY,
        Verdict::Inconclusive => f64::NAN,
    };
    CVerdict {
        c,
        verdict,
        partial_integral: core + left.sum + right.sum,
        tail_estimate,
        decay_exponent: left.exponent.min(right.exponent),
    }
}

pub fn classify(q: &WeightFunction, c_grid: &[f64]) -> Result<WeightClassification> {
    classify_with(q, c_grid, &ClassifyOptions::default())
}

pub fn classify_with(
    q: &WeightFunction,
    c_grid: &[f64],
    opts: &ClassifyOptions,
) -> Result<WeightClassification> {
    if c_grid.is_empty() {
        return Err(Error::BadParams("c grid is empty".into()));
    }
    if c_grid.iter().any(|c| !(c.is_finite() && *c > 0.0))
        || c_grid.windows(2).any(|w| w[1] <= w[0])
    {
        return Err(Error::BadParams(
            "c grid must be positive and strictly ascending".into(),
        ));
    }
    let verdicts: Vec<CVerdict> = c_grid.iter().map(|&c| classify_one(q, c, opts)).collect();
    let count = |v| verdicts.iter().filter(|r| r.verdict == v).count();
    let (finite, divergent) = (count(Verdict::Finite), count(Verdict::Divergent));
    let summary = if finite == verdicts.len() {
        ClassSummary::FiniteForAllTested
    } else if divergent == verdicts.len() {
        ClassSummary::DivergentForAllTested
    } else if finite > 0 && divergent > 0 {
        ClassSummary::FiniteForSomeNotAll
    } else {
        ClassSummary::Inconclusive
    };
    Ok(WeightClassification {
        weight: q.label(),
        verdicts,
        summary,
    })
}

/// Locates the `c` at which the shell decay exponent crosses 1, i.e. the
/// boundary between divergent and finite `I(q, c)`, by bisection on
/// `[lo, hi]`. `None` if the exponent does not cross 1 inside the bracket.
pub fn critical_c(q: &WeightFunction, lo: f64, hi: f64, opts: &ClassifyOptions) -> Option<f64> {
    let excess = |c: f64| classify_one(q, c, opts).decay_exponent - 1.0;
    let (mut a, mut b) = (lo, hi);
    let (fa, fb) = (excess(a), excess(b));
    if !(fa < 0.0 && fb > 0.0) {
        return None;
    }
    for _ in 0..40 {
        let mid = 0.5 * (a + b);
        if excess(mid) > 0.0 {
            b = mid;
        } else {
            a = mid;
        }
        if b - a < 1e-4 * b {
            break;
        }
    }
    Some(0.5 * (a + b))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootRatioReport {
    pub limit_zero_at_0: bool,
    pub limit_zero_at_1: bool,
    /// `u^{1/2} / q` at the deepest level probed, per endpoint.
    pub final_ratio_at_0: f64,
    pub final_ratio_at_1: f64,
}

pub const ROOT_RATIO_LEVELS: std::ops::RangeInclusive<usize> = 4..=1000;

fn ratio_tends_to_zero(q: &WeightFunction, side: Side) -> (bool, f64) {
    let top = q.max_level(side, *ROOT_RATIO_LEVELS.end());
    let ln_ratio: Vec<f64> = (*ROOT_RATIO_LEVELS.start()..=top)
        .map(|m| {
            let u = 2f64.powi(-(m as i32));
            0.5 * u.ln() - q.ln_value_near(u, side)
        })
        .collect();
    let half = &ln_ratio[ln_ratio.len() / 2..];
    let eventually_decreasing = half
        .windows(2)
        .all(|w| w[1] <= w[0] + 1e-12 * w[0].abs().max(1.0));
    let still_falling = half[0] - half[half.len() - 1] >= 0.01;
    let last = ln_ratio[ln_ratio.len() - 1].exp();
    (eventually_decreasing && still_falling, last)
}

/// Numerical check that `t^{1/2}/q(t) → 0` as `t ↓ 0` and `(1−t)^{1/2}/q(t) → 0`
/// as `t ↑ 1`. The ratio is sampled at `u = 2^{−m}`, `m = 4, …, 1000`, in log
/// space; a side passes when the ratio is nonincreasing over the deeper half
/// of the levels and still falls there by at least 1% (a ratio levelling off
/// at a positive limit has stopped moving by then).
pub fn root_ratio_check(q: &WeightFunction) -> RootRatioReport {
    let (z0, r0) = ratio_tends_to_zero(q, Side::Zero);
    let (z1, r1) = ratio_tends_to_zero(q, Side::One);
    RootRatioReport {
        limit_zero_at_0: z0,
        limit_zero_at_1: z1,
        final_ratio_at_0: r0,
        final_ratio_at_1: r1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> WeightFunction {
        WeightFunction::parse(s).unwrap()
    }

    #[test]
    fn parse_and_display() {
        assert_eq!("one".parse::<WeightSpec>().unwrap(), WeightSpec::One);
        assert_eq!(
            "pow:0.25".parse::<WeightSpec>().unwrap(),
            WeightSpec::Power(0.25)
        );
        assert_eq!(
            "loglog:1.0".parse::<WeightSpec>().unwrap(),
            WeightSpec::LogLog(1.0)
        );
        assert_eq!(WeightSpec::LogLog(1.0).to_string(), "loglog:1");
        assert!(matches!(
            "pow:0".parse::<WeightSpec>(),
            Err(Error::BadParams(_))
        ));
        assert!(matches!(
            "loglog:-1".parse::<WeightSpec>(),
            Err(Error::BadParams(_))
        ));
        assert!("pow".parse::<WeightSpec>().is_err());
        assert!("sqrt".parse::<WeightSpec>().is_err());
    }

    #[test]
    fn values() {
        assert_eq!(w("one").value(0.5), 1.0);
        assert!((w("pow:0.25").value(0.5) - 0.25f64.powf(0.25)).abs() < 1e-15);
        assert!((w("pow:0.25").value(0.5) - 0.5f64.sqrt()).abs() < 1e-12);
        let ll = w("loglog:1");
        let x: f64 = 0.25;
        assert!((ll.value(0.5) - (x * (E - x.ln()).ln()).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn log_forms_agree_with_values() {
        for s in ["one", "pow:0.1", "pow:0.6", "loglog:0.5", "loglog:2"] {
            let q = w(s);
            for &t in &[1e-9, 1e-3, 0.1, 0.37] {
                let direct = q.value(t).ln();
                assert!(
                    (q.ln_value_near(t, Side::Zero) - direct).abs() < 1e-12,
                    "{s} {t}"
                );
                assert!(
                    (q.ln_value_near(t, Side::One) - q.value(1.0 - t).ln()).abs() < 1e-6,
                    "{s} {t}"
                );
                let ss = q.value(t).powi(2) / (t * (1.0 - t));
                assert!(
                    (q.scaled_square_near(t, Side::Zero) / ss - 1.0).abs() < 1e-10,
                    "{s} {t}"
                );
            }
        }
    }

    #[test]
    fn builtins_belong_to_class() {
        for s in [
            "one",
            "pow:0.1",
            "pow:0.25",
            "pow:0.5",
            "pow:0.6",
            "loglog:1",
            "loglog:0.3",
        ] {
            let p = probe_class(&w(s));
            assert!(
                p.positive && p.monotone_near_zero && p.monotone_near_one,
                "{s}: {p:?}"
            );
        }
    }

    #[test]
    fn constant_weight_is_finite() {
        let r = classify(&w("one"), &DEFAULT_C_GRID).unwrap();
        assert_eq!(r.summary, ClassSummary::FiniteForAllTested);
    }

    #[test]
    fn square_root_weight_diverges() {
        let r = classify(&w("pow:0.5"), &DEFAULT_C_GRID).unwrap();
        assert_eq!(r.summary, ClassSummary::DivergentForAllTested);
        assert!(r.verdicts.iter().all(|v| v.tail_estimate.is_infinite()));
    }

    #[test]
    fn loglog_has_a_threshold() {
        let r = classify(&w("loglog:1.0"), &[0.5, 2.0]).unwrap();
        assert_eq!(r.verdicts[0].verdict, Verdict::Divergent);
        assert_eq!(r.verdicts[1].verdict, Verdict::Finite);
        assert_eq!(r.summary, ClassSummary::FiniteForSomeNotAll);
    }

    #[test]
    fn finite_integral_matches_direct_quadrature() {
        // For q ≡ 1 and c = 1 the integrand is smooth and negligible near the
        // endpoints, so a plain quadrature over (0, 1) is an independent check.
        let r = classify(&w("one"), &[1.0]).unwrap();
        let direct = quad::integrate(
            |t: f64| {
                if t <= 0.0 || t >= 1.0 {
                    0.0
                } else {
                    (-1.0 / (t * (1.0 - t))).exp() / (t * (1.0 - t))
                }
            },
            0.0,
            1.0,
            1e-13,
        );
        assert!((r.verdicts[0].partial_integral - direct.value).abs() < 1e-9);
    }

    #[test]
    fn root_ratio_examples() {
        let r = root_ratio_check(&w("pow:0.25"));
        assert!(r.limit_zero_at_0 && r.limit_zero_at_1);
        let r = root_ratio_check(&w("pow:0.5"));
        assert!(!r.limit_zero_at_0 && !r.limit_zero_at_1);
        let r = root_ratio_check(&w("one"));
        assert!(r.limit_zero_at_0 && r.limit_zero_at_1);
        let r = root_ratio_check(&w("pow:0.7"));
        assert!(!r.limit_zero_at_0 && !r.limit_zero_at_1);
        let r = root_ratio_check(&w("loglog:1"));
        assert!(r.limit_zero_at_0 && r.limit_zero_at_1);
    }

    #[test]
    fn bad_grid() {
        assert!(classify(&w("one"), &[]).is_err());
        assert!(classify(&w("one"), &[1.0, 0.5]).is_err());
        assert!(classify(&w("one"), &[-1.0]).is_err());
    }

    #[test]
    fn custom_weight_is_probed() {
        let q = WeightFunction::custom("quarter", 0.1, |t: f64| (t * (1.0 - t)).powf(0.25));
        let r = classify(&q, &[0.01, 1.0]).unwrap();
        assert_eq!(r.summary, ClassSummary::FiniteForAllTested);
        assert_eq!(r.weight, "custom:quarter");
        let l = root_ratio_check(&q);
        assert!(l.limit_zero_at_0 && l.limit_zero_at_1);
    }
}
