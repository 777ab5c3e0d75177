//! The O(n²) sweep against plain double loops.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ucpd_core::kernels::{builtin_kernel, BuiltinKernel, Symmetry};
use ucpd_core::uprocess::{estimate, studentized_path, z_path, Sample};

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1.0)
}

fn oracle_z(x: &[f64], h: impl Fn(f64, f64) -> f64) -> Vec<f64> {
    let n = x.len();
    (1..n)
        .map(|k| {
            let mut s = 0.0;
            for i in 0..k {
                for j in k..n {
                    s += h(x[i], x[j]);
                }
            }
            s
        })
        .collect()
}

struct OracleEstimates {
    theta: f64,
    sigma2: f64,
    row_means: Vec<f64>,
}

fn oracle_estimates(x: &[f64], h: impl Fn(f64, f64) -> f64, symmetric: bool) -> OracleEstimates {
    let n = x.len();
    let nf = n as f64;
    let row_means: Vec<f64> = (0..n)
        .map(|j| {
            (0..n)
                .filter(|&i| i != j)
                .map(|i| h(x[i], x[j]))
                .sum::<f64>()
                / (nf - 1.0)
        })
        .collect();
    let theta = if symmetric {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += h(x[i], x[j]);
                }
            }
        }
        s / (nf * (nf - 1.0))
    } else {
        0.0
    };
    let sigma2 = row_means.iter().map(|r| (r - theta).powi(2)).sum::<f64>() / nf;
    OracleEstimates {
        theta,
        sigma2,
        row_means,
    }
}

fn random_instance(rng: &mut ChaCha8Rng) -> Vec<f64> {
    let n = rng.random_range(4..=50);
    let style = rng.random_range(0..3);
    (0..n)
        .map(|_| match style {
            0 => rng.random_range(-5.0..5.0),
            1 => (rng.random_range(-3i32..=3)) as f64,
            _ => rng.random_range(0.0..1.0f64).powi(3) * 100.0 - 10.0,
        })
        .collect()
}

#[test]
fn sweep_matches_double_loops_on_random_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(20240611);
    let started = std::time::Instant::now();
    let mut checked = 0;
    for instance in 0..200 {
        let x = random_instance(&mut rng);
        let kind = BuiltinKernel::ALL[instance % BuiltinKernel::ALL.len()];
        let kernel = builtin_kernel(kind.id()).unwrap();
        let sample = Sample::new(x.clone()).unwrap();
        let h = |a, b| kind.eval(a, b);

        let z = z_path(&sample, &kernel).z;
        let want = oracle_z(&x, h);
        assert_eq!(z.len(), want.len());
        for (k, (a, b)) in z.iter().zip(&want).enumerate() {
            assert!(
                close(*a, *b, 1e-9),
                "{} instance {instance} k={}: {a} vs {b}",
                kind.id(),
                k + 1
            );
        }

        let oracle = oracle_estimates(&x, h, kind.symmetry() == Symmetry::Symmetric);
        match estimate(&sample, &kernel) {
            Ok(est) => {
                assert!(close(est.theta_hat, oracle.theta, 1e-9), "{} θ̂", kind.id());
                assert!(
                    close(est.sigma2_hat, oracle.sigma2, 1e-9),
                    "{} σ̂²",
                    kind.id()
                );
                for (a, b) in est.row_means.iter().zip(&oracle.row_means) {
                    assert!(close(*a, *b, 1e-9));
                }
            }
            // integer-valued data can make every row mean coincide
            Err(_) => assert!(oracle.sigma2 <= 1e-12, "{} instance {instance}", kind.id()),
        }
        checked += 1;
    }
    assert_eq!(checked, 200);
    assert!(started.elapsed().as_secs_f64() < 10.0);
}

#[test]
fn studentized_path_matches_its_definition() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for kind in BuiltinKernel::ALL {
        let x: Vec<f64> = (0..37).map(|_| rng.random_range(-2.0..3.0)).collect();
        let kernel = builtin_kernel(kind.id()).unwrap();
        let path = studentized_path(&Sample::new(x.clone()).unwrap(), &kernel).unwrap();
        let z = oracle_z(&x, |a, b| kind.eval(a, b));
        let est = oracle_estimates(
            &x,
            |a, b| kind.eval(a, b),
            kind.symmetry() == Symmetry::Symmetric,
        );
        let n = x.len() as f64;
        for (k, u) in path.u.iter().enumerate() {
            let t = (k + 1) as f64 / (n + 1.0);
            assert!((t - path.t[k]).abs() < 1e-15);
            let want =
                (z[k] - n * n * t * (1.0 - t) * est.theta) / (n.powf(1.5) * est.sigma2.sqrt());
            assert!(close(*u, want, 1e-9), "{} k={}", kind.id(), k + 1);
        }
    }
}
