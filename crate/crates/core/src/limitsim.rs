//! Monte Carlo laws of `sup |Γ(t)|/q(t)` and `sup |B(t)|/q(t)`.
//!
//! Wiener paths are built on a dyadic grid by midpoint refinement (Lévy's
//! construction): `W(1)` first, then each level's midpoints left to right.
//! A replicate's coarse-grid values are therefore bit-identical to the
//! corresponding points of its finer-grid path, and weighted sups can only
//! grow when the grid is refined.

use rand::RngCore;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::rng::{self, Domain, InverseNormal};
use crate::uprocess::LimitProcess;
use crate::weights::WeightFunction;

pub const QUANTILE_LEVELS: [f64; 5] = [0.80, 0.90, 0.95, 0.975, 0.99];
pub const DEFAULT_GRID: usize = 2048;
/// Below this many replicates a law is flagged as too coarse for quantiles.
pub const MIN_QUANTILE_REPS: usize = 1000;

fn check_grid(grid_size: usize) -> Result<u32> {
    if grid_size >= 2 && grid_size.is_power_of_two() {
        Ok(grid_size.trailing_zeros())
    } else {
        Err(Error::BadGrid(grid_size))
    }
}

/// Validates the shape parameters of a law stored without its samples.
pub fn check_law_header(grid_size: usize, reps: usize) -> Result<()> {
    check_grid(grid_size)?;
    if reps == 0 {
        return Err(Error::BadParams("reps must be positive".into()));
    }
    Ok(())
}

/// Fills `w[0..=G]` with a standard Wiener path at `j/G`.
fn fill_wiener<R: RngCore + ?Sized>(
    w: &mut [f64],
    levels: u32,
    rng: &mut R,
    normals: &InverseNormal,
) {
    let g = w.len() - 1;
    w[0] = 0.0;
    w[g] = normals.draw(rng);
    for level in 1..=levels {
        let step = g >> level;
        let sd = 0.5f64.powi(level as i32 + 1).sqrt();
        let mut i = step;
        while i < g {
            w[i] = 0.5 * (w[i - step] + w[i + step]) + sd * normals.draw(rng);
            i += 2 * step;
        }
    }
}

/// A standard Wiener path on `{j / grid_size : j = 0, …, grid_size}`.
pub fn simulate_wiener<R: RngCore + ?Sized>(grid_size: usize, rng: &mut R) -> Result<Vec<f64>> {
    let levels = check_grid(grid_size)?;
    let mut w = vec![0.0; grid_size + 1];
    fill_wiener(&mut w, levels, rng, &InverseNormal::default());
    Ok(w)
}

#[inline]
fn grid_t(j: usize, g: usize) -> f64 {
    j as f64 / g as f64
}

/// `Γ(t) = (1−t) W(t) + t (W(1) − W(t))` at the grid points of `w`.
pub fn gamma_path(w: &[f64]) -> Vec<f64> {
    let g = w.len() - 1;
    let w1 = w[g];
    w.iter()
        .enumerate()
        .map(|(j, &wt)| {
            let t = grid_t(j, g);
            (1.0 - t) * wt + t * (w1 - wt)
        })
        .collect()
}

/// `B(t) = W(t) − t W(1)` at the grid points of `w`.
pub fn bridge_path(w: &[f64]) -> Vec<f64> {
    let g = w.len() - 1;
    let w1 = w[g];
    w.iter()
        .enumerate()
        .map(|(j, &wt)| wt - grid_t(j, g) * w1)
        .collect()
}

pub fn limit_path(process: LimitProcess, w: &[f64]) -> Vec<f64> {
    match process {
        LimitProcess::GammaProcess => gamma_path(w),
        LimitProcess::Bridge => bridge_path(w),
    }
}

/// `max_{0<j<G} |path(j/G)| / q(j/G)` for a path given at all `G + 1` grid points.
pub fn weighted_sup(path: &[f64], q: &WeightFunction) -> f64 {
    let g = path.len() - 1;
    (1..g)
        .map(|j| path[j].abs() / q.value(grid_t(j, g)))
        .fold(0.0, f64::max)
}

/// Type-7 empirical quantile (linear interpolation between order statistics).
pub fn quantile_type7(sorted: &[f64], p: f64) -> f64 {
    assert!(!sorted.is_empty());
    let h = (sorted.len() - 1) as f64 * p.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Two-sample Kolmogorov–Smirnov distance between sorted samples.
pub fn ks_distance(a: &[f64], b: &[f64]) -> f64 {
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d = 0.0f64;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// Empirical law of a weighted sup functional of a limit process.
#[derive(Debug, Clone, PartialEq)]
pub struct LimitLaw {
    pub process: LimitProcess,
    /// Label of the weight (`one`, `pow:0.25`, …).
    pub weight: String,
    pub grid_size: usize,
    pub reps: usize,
    pub master_seed: u64,
    /// Ascending; empty when the law was loaded without its samples.
    pub sorted_sups: Vec<f64>,
    /// `(level, quantile)` at [`QUANTILE_LEVELS`].
    pub quantiles: Vec<(f64, f64)>,
}

impl LimitLaw {
    pub fn from_sorted(
        process: LimitProcess,
        weight: String,
        grid_size: usize,
        master_seed: u64,
        sorted_sups: Vec<f64>,
    ) -> Result<Self> {
        check_grid(grid_size)?;
        if sorted_sups.is_empty() {
            return Err(Error::BadParams(
                "a limit law needs at least one replicate".into(),
            ));
        }
        if sorted_sups.windows(2).any(|w| w[1] < w[0])
            || sorted_sups.iter().any(|s| !(s.is_finite() && *s >= 0.0))
        {
            return Err(Error::BadParams(
                "sups must be finite, nonnegative and sorted".into(),
            ));
        }
        let quantiles = QUANTILE_LEVELS
            .iter()
            .map(|&p| (p, quantile_type7(&sorted_sups, p)))
            .collect();
        Ok(LimitLaw {
            process,
            weight,
            grid_size,
            reps: sorted_sups.len(),
            master_seed,
            sorted_sups,
            quantiles,
        })
    }

    pub fn low_reps_warning(&self) -> bool {
        self.reps < MIN_QUANTILE_REPS
    }

    pub fn has_samples(&self) -> bool {
        !self.sorted_sups.is_empty()
    }

    /// Type-7 quantile from the samples, or an exact level of the stored table.
    pub fn quantile(&self, level: f64) -> Result<f64> {
        if self.has_samples() {
            return Ok(quantile_type7(&self.sorted_sups, level));
        }
        self.quantiles
            .iter()
            .find(|(p, _)| (p - level).abs() < 1e-12)
            .map(|&(_, q)| q)
            .ok_or(Error::LawWithoutSamples(
                "a quantile outside the stored table",
            ))
    }

    pub fn critical_value(&self, alpha: f64) -> Result<f64> {
        self.quantile(1.0 - alpha)
    }

    /// Add-one Monte Carlo p-value `(1 + #{sups ≥ observed}) / (reps + 1)`.
    pub fn p_value(&self, observed: f64) -> Result<f64> {
        if !self.has_samples() {
            return Err(Error::LawWithoutSamples("a p-value"));
        }
        let below = self.sorted_sups.partition_point(|&s| s < observed);
        let at_or_above = self.sorted_sups.len() - below;
        Ok((1 + at_or_above) as f64 / (self.reps + 1) as f64)
    }
}

pub fn p_value(law: &LimitLaw, observed: f64) -> Result<f64> {
    law.p_value(observed)
}

/// Weighted sup of replicate `rep`, using caller-provided scratch space.
fn replicate_sup(
    process: LimitProcess,
    inv_q: &[f64],
    levels: u32,
    master_seed: u64,
    rep: u64,
    w: &mut [f64],
    normals: &InverseNormal,
) -> f64 {
    let mut rng = rng::stream(master_seed, Domain::LimitLaw, 0, rep);
    fill_wiener(w, levels, &mut rng, normals);
    let g = w.len() - 1;
    let w1 = w[g];
    let mut sup = 0.0f64;
    for j in 1..g {
        let t = grid_t(j, g);
        let v = match process {
            LimitProcess::GammaProcess => (1.0 - t) * w[j] + t * (w1 - w[j]),
            LimitProcess::Bridge => w[j] - t * w1,
        };
        sup = sup.max(v.abs() * inv_q[j]);
    }
    sup
}

/// Weighted sups of `reps` independent replicates, in replicate order.
/// Replicate `r` always uses the stream `(master_seed, r)`.
pub fn simulate_sups(
    process: LimitProcess,
    q: &WeightFunction,
    grid_size: usize,
    reps: usize,
    master_seed: u64,
) -> Result<Vec<f64>> {
    let levels = check_grid(grid_size)?;
    let inv_q: Vec<f64> = (0..=grid_size)
        .map(|j| {
            if j == 0 || j == grid_size {
                0.0
            } else {
                1.0 / q.value(grid_t(j, grid_size))
            }
        })
        .collect();
    let normals = InverseNormal::default();
    Ok((0..reps as u64)
        .into_par_iter()
        .map_init(
            || vec![0.0; grid_size + 1],
            |w, rep| replicate_sup(process, &inv_q, levels, master_seed, rep, w, &normals),
        )
        .collect())
}

pub fn build_limit_law(
    process: LimitProcess,
    q: &WeightFunction,
    grid_size: usize,
    reps: usize,
    master_seed: u64,
) -> Result<LimitLaw> {
    if reps == 0 {
        return Err(Error::BadParams("reps must be positive".into()));
    }
    let mut sups = simulate_sups(process, q, grid_size, reps, master_seed)?;
    sups.sort_by(f64::total_cmp);
    LimitLaw::from_sorted(process, q.label(), grid_size, master_seed, sups)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::WeightFunction;

    #[test]
    fn bad_grid() {
        let mut r = rng::stream(1, Domain::Probe, 0, 0);
        assert_eq!(
            simulate_wiener(1000, &mut r).unwrap_err(),
            Error::BadGrid(1000)
        );
        assert_eq!(simulate_wiener(1, &mut r).unwrap_err(), Error::BadGrid(1));
        assert!(simulate_wiener(2, &mut r).is_ok());
        let one = WeightFunction::parse("one").unwrap();
        assert!(build_limit_law(LimitProcess::Bridge, &one, 100, 10, 1).is_err());
    }

    #[test]
    fn endpoints_are_pinned() {
        for rep in 0..50 {
            let mut r = rng::stream(3, Domain::Probe, 0, rep);
            let w = simulate_wiener(64, &mut r).unwrap();
            assert_eq!(w[0], 0.0);
            for p in [gamma_path(&w), bridge_path(&w)] {
                assert_eq!(p[0], 0.0);
                assert_eq!(p[64], 0.0);
            }
        }
    }

    #[test]
    fn refinement_nests() {
        let mut a = rng::stream(5, Domain::Probe, 0, 0);
        let mut b = rng::stream(5, Domain::Probe, 0, 0);
        let coarse = simulate_wiener(256, &mut a).unwrap();
        let fine = simulate_wiener(512, &mut b).unwrap();
        for (j, c) in coarse.iter().enumerate() {
            assert_eq!(*c, fine[2 * j]);
        }
    }

    #[test]
    fn weighted_sup_examples() {
        let one = WeightFunction::parse("one").unwrap();
        assert_eq!(weighted_sup(&[0.0; 9], &one), 0.0);
        let mut spike = vec![0.0; 9];
        spike[4] = 2.0;
        assert_eq!(weighted_sup(&spike, &one), 2.0);
        let q = WeightFunction::parse("pow:0.25").unwrap();
        let g = 1024;
        let path: Vec<f64> = (0..=g)
            .map(|j| {
                let t = j as f64 / g as f64;
                t * (1.0 - t)
            })
            .collect();
        let s = weighted_sup(&path, &q);
        assert!((s - 0.25f64.powf(0.75)).abs() < 1e-12);
        assert!((s - 0.3536).abs() < 1e-4);
        // endpoints are excluded even when nonzero
        let mut ends = vec![0.0; 9];
        ends[0] = 5.0;
        ends[8] = 5.0;
        assert_eq!(weighted_sup(&ends, &one), 0.0);
    }

    #[test]
    fn quantile_rule() {
        let x = [1.0, 2.0, 3.0, 4.0, 5.0];
        assert_eq!(quantile_type7(&x, 0.0), 1.0);
        assert_eq!(quantile_type7(&x, 1.0), 5.0);
        assert_eq!(quantile_type7(&x, 0.5), 3.0);
        assert!((quantile_type7(&x, 0.9) - 4.6).abs() < 1e-15);
    }

    #[test]
    fn p_value_examples() {
        let law = LimitLaw::from_sorted(
            LimitProcess::Bridge,
            "one".into(),
            2,
            0,
            vec![0.5, 1.0, 1.5, 2.0],
        )
        .unwrap();
        assert_eq!(law.p_value(0.0).unwrap(), 1.0);
        assert_eq!(law.p_value(3.0).unwrap(), 0.2);
        assert_eq!(law.p_value(1.5).unwrap(), 0.6);
        assert!(law.low_reps_warning());
    }

    #[test]
    fn law_validation() {
        assert!(
            LimitLaw::from_sorted(LimitProcess::Bridge, "one".into(), 4, 0, vec![2.0, 1.0])
                .is_err()
        );
        assert!(
            LimitLaw::from_sorted(LimitProcess::Bridge, "one".into(), 4, 0, vec![f64::NAN])
                .is_err()
        );
        assert!(LimitLaw::from_sorted(LimitProcess::Bridge, "one".into(), 4, 0, vec![]).is_err());
    }

    #[test]
    fn ks_distance_basics() {
        assert_eq!(ks_distance(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]), 0.0);
        assert_eq!(ks_distance(&[1.0, 2.0], &[3.0, 4.0]), 1.0);
        assert!((ks_distance(&[1.0, 2.0, 3.0, 4.0], &[2.5]) - 0.5).abs() < 1e-15);
    }
}
