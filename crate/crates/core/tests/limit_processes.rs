//! Distributional checks on the simulated Wiener, Γ and bridge paths and on
//! the Monte Carlo sup laws.

use ucpd_core::limitsim::{
    bridge_path, build_limit_law, gamma_path, ks_distance, quantile_type7, simulate_sups,
    simulate_wiener,
};
use ucpd_core::parallel::with_threads;
use ucpd_core::rng::{stream, Domain};
use ucpd_core::uprocess::LimitProcess;
use ucpd_core::weights::WeightFunction;

/// Values at `t = 1/4, 1/2, 3/4, 1` only need a grid of 4; the midpoint
/// construction gives them their exact joint law at any grid size.
fn wiener_draws(reps: u64, grid: usize, seed: u64) -> Vec<Vec<f64>> {
    (0..reps)
        .map(|r| simulate_wiener(grid, &mut stream(seed, Domain::Probe, 0, r)).unwrap())
        .collect()
}

fn cov(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - ma) * (y - mb))
        .sum::<f64>()
        / (n - 1.0)
}

fn column(paths: &[Vec<f64>], j: usize) -> Vec<f64> {
    paths.iter().map(|p| p[j]).collect()
}

#[test]
fn wiener_moments() {
    let w = wiener_draws(10_000, 8, 1);
    let w1 = column(&w, 8);
    let wh = column(&w, 4);
    assert!((cov(&w1, &w1) - 1.0).abs() < 0.05);
    assert!((cov(&wh, &wh) - 0.5).abs() < 0.03);
    let inc: Vec<f64> = w1.iter().zip(&wh).map(|(a, b)| a - b).collect();
    assert!(cov(&wh, &inc).abs() < 0.03);
}

#[test]
fn wiener_increments_are_iid_with_variance_one_over_g() {
    let g = 32;
    let w = wiener_draws(5_000, g, 2);
    for j in [1, 7, 16, 31] {
        let inc: Vec<f64> = w.iter().map(|p| p[j + 1] - p[j]).collect();
        let v = cov(&inc, &inc) * g as f64;
        assert!((v - 1.0).abs() < 0.06, "increment {j}: {v}");
        let prev: Vec<f64> = w.iter().map(|p| p[j] - p[j - 1]).collect();
        assert!(cov(&prev, &inc).abs() * (g as f64) < 0.06);
    }
}

#[test]
fn gamma_and_bridge_share_marginals_but_not_covariances() {
    let w = wiener_draws(100_000, 4, 3);
    let gam: Vec<Vec<f64>> = w.iter().map(|p| gamma_path(p)).collect();
    let bri: Vec<Vec<f64>> = w.iter().map(|p| bridge_path(p)).collect();
    for (j, t) in [(1, 0.25), (2, 0.5), (3, 0.75)] {
        let want = t * (1.0 - t);
        let g = column(&gam, j);
        let b = column(&bri, j);
        assert!((cov(&g, &g) - want).abs() < 0.005, "Var Γ({t})");
        assert!((cov(&b, &b) - want).abs() < 0.005, "Var B({t})");
    }
    let c_gamma = cov(&column(&gam, 1), &column(&gam, 3));
    let c_bridge = cov(&column(&bri, 1), &column(&bri, 3));
    assert!((c_gamma - 0.125).abs() < 0.005, "{c_gamma}");
    assert!((c_bridge - 0.0625).abs() < 0.005, "{c_bridge}");
}

#[test]
fn marginals_at_a_fixed_time_agree() {
    // t = 0.3 sits between grid points only on coarse grids; 0.3 ≈ 307/1024
    let g = 1024;
    let j = 307;
    let mut gam = Vec::new();
    let mut bri = Vec::new();
    for r in 0..10_000u64 {
        let w = simulate_wiener(g, &mut stream(4, Domain::Probe, 0, r)).unwrap();
        gam.push(gamma_path(&w)[j]);
        let w2 = simulate_wiener(g, &mut stream(5, Domain::Probe, 0, r)).unwrap();
        bri.push(bridge_path(&w2)[j]);
    }
    gam.sort_by(f64::total_cmp);
    bri.sort_by(f64::total_cmp);
    assert!(ks_distance(&gam, &bri) < 0.03);
}

/// `P(sup |B| ≤ x) = 1 − 2 Σ_{k≥1} (−1)^{k−1} e^{−2k²x²}`.
fn kolmogorov_cdf(x: f64) -> f64 {
    let mut s = 0.0;
    for k in 1..=100 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * x * x).exp();
        s += if k % 2 == 1 { term } else { -term };
        if term < 1e-18 {
            break;
        }
    }
    1.0 - 2.0 * s
}

fn kolmogorov_quantile(p: f64) -> f64 {
    let (mut lo, mut hi) = (0.3, 3.0);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if kolmogorov_cdf(mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn kolmogorov_oracle_reproduces_the_tabulated_constant() {
    assert!((kolmogorov_quantile(0.95) - 1.3581).abs() < 1e-4);
}

#[test]
fn bridge_sup_quantiles_sit_just_below_kolmogorov() {
    let one = WeightFunction::parse("one").unwrap();
    let law = build_limit_law(LimitProcess::Bridge, &one, 2048, 20_000, 42).unwrap();
    for level in [0.8, 0.9, 0.95] {
        let want = kolmogorov_quantile(level);
        let got = law.quantile(level).unwrap();
        assert!(
            got < want + 0.02 && got > want - 0.05,
            "{level}: {got} vs {want}"
        );
    }
}

#[test]
fn seed_self_consistency() {
    let one = WeightFunction::parse("one").unwrap();
    let a = build_limit_law(LimitProcess::GammaProcess, &one, 512, 20_000, 1).unwrap();
    let b = build_limit_law(LimitProcess::GammaProcess, &one, 512, 20_000, 2).unwrap();
    assert_ne!(a.sorted_sups, b.sorted_sups);
    assert!((a.quantile(0.95).unwrap() - b.quantile(0.95).unwrap()).abs() < 0.04);
}

#[test]
fn gamma_and_bridge_sup_laws_differ() {
    let one = WeightFunction::parse("one").unwrap();
    let g = build_limit_law(LimitProcess::GammaProcess, &one, 512, 20_000, 1).unwrap();
    let b = build_limit_law(LimitProcess::Bridge, &one, 512, 20_000, 2).unwrap();
    let d = ks_distance(&g.sorted_sups, &b.sorted_sups);
    // two-sample KS critical value at 1% for m = n = 20000
    let crit = 1.628 * (2.0f64 / 20_000.0).sqrt();
    assert!(d > crit, "{d} vs {crit}");
}

#[test]
fn doubling_the_grid_raises_each_quantile_slightly() {
    let one = WeightFunction::parse("one").unwrap();
    for process in [LimitProcess::Bridge, LimitProcess::GammaProcess] {
        let coarse = build_limit_law(process, &one, 1024, 10_000, 9).unwrap();
        let fine = build_limit_law(process, &one, 2048, 10_000, 9).unwrap();
        for ((_, c), (_, f)) in coarse.quantiles.iter().zip(&fine.quantiles) {
            assert!(f - c >= 0.0 && f - c <= 0.03, "{process:?}: {c} -> {f}");
        }
    }
}

#[test]
fn per_path_refinement_is_monotone() {
    let q = WeightFunction::parse("pow:0.25").unwrap();
    let coarse = simulate_sups(LimitProcess::GammaProcess, &q, 256, 500, 4).unwrap();
    let fine = simulate_sups(LimitProcess::GammaProcess, &q, 1024, 500, 4).unwrap();
    assert!(coarse.iter().zip(&fine).all(|(c, f)| f >= c));
}

#[test]
fn divergent_weight_sups_keep_growing() {
    // for q(t) = (t(1−t))^{1/2} the grid sup grows like (2 log log G)^{1/2}
    let q = WeightFunction::parse("pow:0.5").unwrap();
    let median = |g| {
        let mut s = simulate_sups(LimitProcess::GammaProcess, &q, g, 2_000, 1).unwrap();
        s.sort_by(f64::total_cmp);
        quantile_type7(&s, 0.5)
    };
    let m: Vec<f64> = [256, 1024, 4096, 16384].into_iter().map(median).collect();
    for w in m.windows(2) {
        assert!(w[1] > w[0] + 0.05, "{m:?}");
    }
}

#[test]
fn laws_are_identical_across_thread_counts() {
    let q = WeightFunction::parse("loglog:1").unwrap();
    let build = |t| {
        with_threads(Some(t), || {
            build_limit_law(LimitProcess::Bridge, &q, 256, 3_000, 77).unwrap()
        })
    };
    let a = build(1);
    assert_eq!(a, build(4));
    assert_eq!(a, build(8));
    assert_eq!(
        a,
        build_limit_law(LimitProcess::Bridge, &q, 256, 3_000, 77).unwrap()
    );
}

#[test]
fn p_values_follow_the_add_one_rule() {
    let one = WeightFunction::parse("one").unwrap();
    let law = build_limit_law(LimitProcess::Bridge, &one, 256, 4_000, 5).unwrap();
    assert_eq!(law.p_value(0.0).unwrap(), 1.0);
    assert_eq!(law.p_value(1e9).unwrap(), 1.0 / 4001.0);
    let q95 = law.quantile(0.95).unwrap();
    assert!((law.p_value(q95).unwrap() - 0.05).abs() <= 1.0 / 4000.0 + 1e-12);
    assert_eq!(q95, quantile_type7(&law.sorted_sups, 0.95));
}
