//! Data-generating distributions for simulation scenarios.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Distribution as _, Normal, Pareto, StudentT, Uniform};
use statrs::distribution::{ContinuousCDF, Normal as NormalCdf, StudentsT};

use crate::error::{Error, Result};

/// A continuous distribution for i.i.d. segments of a simulated sequence.
///
/// String form: `normal:MEAN,SD`, `uniform:LO,HI`, `student_t:DF`,
/// `pareto_symmetric:INDEX`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Distribution {
    Normal {
        mean: f64,
        sd: f64,
    },
    Uniform {
        lo: f64,
        hi: f64,
    },
    StudentT {
        df: f64,
    },
    /// Random sign times a Pareto(scale 1, `index`) magnitude.
    ParetoSymmetric {
        index: f64,
    },
}

impl Distribution {
    pub fn standard_normal() -> Self {
        Distribution::Normal { mean: 0.0, sd: 1.0 }
    }

    fn validate(self) -> Result<Self> {
        let ok = match self {
            Distribution::Normal { mean, sd } => mean.is_finite() && sd.is_finite() && sd > 0.0,
            Distribution::Uniform { lo, hi } => lo.is_finite() && hi.is_finite() && lo < hi,
            Distribution::StudentT { df } => df.is_finite() && df > 0.0,
            Distribution::ParetoSymmetric { index } => index.is_finite() && index > 0.0,
        };
        if ok {
            Ok(self)
        } else {
            Err(Error::BadParams(format!(
                "invalid distribution parameters: {self}"
            )))
        }
    }

    pub fn normal(mean: f64, sd: f64) -> Result<Self> {
        Distribution::Normal { mean, sd }.validate()
    }

    pub fn uniform(lo: f64, hi: f64) -> Result<Self> {
        Distribution::Uniform { lo, hi }.validate()
    }

    pub fn student_t(df: f64) -> Result<Self> {
        Distribution::StudentT { df }.validate()
    }

    pub fn pareto_symmetric(index: f64) -> Result<Self> {
        Distribution::ParetoSymmetric { index }.validate()
    }

    /// Fills `out` with i.i.d. draws.
    pub fn fill<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        match *self {
            Distribution::Normal { mean, sd } => {
                let d = Normal::new(mean, sd).expect("validated");
                out.iter_mut().for_each(|x| *x = d.sample(rng));
            }
            Distribution::Uniform { lo, hi } => {
                let d = Uniform::new(lo, hi).expect("validated");
                out.iter_mut().for_each(|x| *x = d.sample(rng));
            }
            Distribution::StudentT { df } => {
                let d = StudentT::new(df).expect("validated");
                out.iter_mut().for_each(|x| *x = d.sample(rng));
            }
            Distribution::ParetoSymmetric { index } => {
                let d = Pareto::new(1.0, index).expect("validated");
                out.iter_mut().for_each(|x| {
                    let m = d.sample(rng);
                    *x = if rng.random::<bool>() { m } else { -m };
                });
            }
        }
    }

    pub fn sample_vec<R: Rng + ?Sized>(&self, rng: &mut R, n: usize) -> Vec<f64> {
        let mut v = vec![0.0; n];
        self.fill(rng, &mut v);
        v
    }

    pub fn cdf(&self, x: f64) -> f64 {
        match *self {
            Distribution::Normal { mean, sd } => {
                NormalCdf::new(mean, sd).expect("validated").cdf(x)
            }
            Distribution::Uniform { lo, hi } => ((x - lo) / (hi - lo)).clamp(0.0, 1.0),
            Distribution::StudentT { df } => {
                StudentsT::new(0.0, 1.0, df).expect("validated").cdf(x)
            }
            Distribution::ParetoSymmetric { index } => {
                if x >= 1.0 {
                    1.0 - 0.5 * x.powf(-index)
                } else if x <= -1.0 {
                    0.5 * (-x).powf(-index)
                } else {
                    0.5
                }
            }
        }
    }

    /// `None` when the first moment does not exist.
    pub fn mean(&self) -> Option<f64> {
        match *self {
            Distribution::Normal { mean, .. } => Some(mean),
            Distribution::Uniform { lo, hi } => Some(0.5 * (lo + hi)),
            Distribution::StudentT { df } => (df > 1.0).then_some(0.0),
            Distribution::ParetoSymmetric { index } => (index > 1.0).then_some(0.0),
        }
    }

    /// `f64::INFINITY` when the variance diverges, `None` when even the mean is undefined.
    pub fn variance(&self) -> Option<f64> {
        match *self {
            Distribution::Normal { sd, .. } => Some(sd * sd),
            Distribution::Uniform { lo, hi } => Some((hi - lo).powi(2) / 12.0),
            Distribution::StudentT { df } => match df {
                d if d > 2.0 => Some(d / (d - 2.0)),
                d if d > 1.0 => Some(f64::INFINITY),
                _ => None,
            },
            Distribution::ParetoSymmetric { index } => match index {
                a if a > 2.0 => Some(a / (a - 2.0)),
                a if a > 1.0 => Some(f64::INFINITY),
                _ => None,
            },
        }
    }

    /// Supremum of the moment orders `p` with `E|X|^p < ∞`.
    pub fn tail_index(&self) -> f64 {
        match *self {
            Distribution::Normal { .. } | Distribution::Uniform { .. } => f64::INFINITY,
            Distribution::StudentT { df } => df,
            Distribution::ParetoSymmetric { index } => index,
        }
    }
}

impl fmt::Display for Distribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Distribution::Normal { mean, sd } => write!(f, "normal:{mean},{sd}"),
            Distribution::Uniform { lo, hi } => write!(f, "uniform:{lo},{hi}"),
            Distribution::StudentT { df } => write!(f, "student_t:{df}"),
            Distribution::ParetoSymmetric { index } => write!(f, "pareto_symmetric:{index}"),
        }
    }
}

impl FromStr for Distribution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::BadParams(format!("cannot parse distribution `{s}`"));
        let (id, rest) = s.trim().split_once(':').ok_or_else(bad)?;
        let params = rest
            .split(',')
            .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
            .collect::<Result<Vec<_>>>()?;
        match (id.trim(), params.as_slice()) {
            ("normal", [m, sd]) => Distribution::normal(*m, *sd),
            ("uniform", [lo, hi]) => Distribution::uniform(*lo, *hi),
            ("student_t", [df]) => Distribution::student_t(*df),
            ("pareto_symmetric", [a]) => Distribution::pareto_symmetric(*a),
            _ => Err(bad()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn parse_round_trip() {
        for s in [
            "normal:0,1",
            "uniform:-1,2.5",
            "student_t:2",
            "pareto_symmetric:1.5",
        ] {
            let d: Distribution = s.parse().unwrap();
            assert_eq!(d.to_string(), s);
        }
        assert!("normal:0".parse::<Distribution>().is_err());
        assert!("normal:0,-1".parse::<Distribution>().is_err());
        assert!("cauchy:1".parse::<Distribution>().is_err());
    }

    #[test]
    fn pareto_symmetric_cdf_matches_draws() {
        let d = Distribution::pareto_symmetric(3.0).unwrap();
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(3);
        let v = d.sample_vec(&mut rng, 40_000);
        for x in [-2.0, -1.0, 0.0, 1.5, 3.0] {
            let emp = v.iter().filter(|&&y| y <= x).count() as f64 / v.len() as f64;
            assert!(
                (emp - d.cdf(x)).abs() < 0.01,
                "x={x} emp={emp} cdf={}",
                d.cdf(x)
            );
        }
        assert!(v.iter().all(|x| x.abs() >= 1.0));
    }

    #[test]
    fn moments() {
        assert_eq!(
            Distribution::student_t(2.0).unwrap().variance(),
            Some(f64::INFINITY)
        );
        assert_eq!(Distribution::student_t(3.0).unwrap().variance(), Some(3.0));
        assert_eq!(Distribution::uniform(0.0, 1.0).unwrap().mean(), Some(0.5));
        assert_eq!(Distribution::pareto_symmetric(0.8).unwrap().mean(), None);
    }
}
