use harmonic_id::beta::beta_derivative;
use harmonic_id::oracle::{cube_monte_carlo, log_moment_quadrature};
use harmonic_id::series::multi_integral_exact;
use harmonic_id::{Rational, Scalar};

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

#[test]
fn quadrature_sign_and_agreement_near_boundary() {
    let x = q(-49, 100);
    for n in [0u64, 1, 7, 20] {
        for m in 0..=4u32 {
            let exact = beta_derivative(n, &x, m as usize).unwrap().approx_f64();
            let r = log_moment_quadrature(n, m, &x).unwrap();
            assert_eq!(r.value < 0.0, m % 2 == 1);
            assert!(((r.value - exact) / exact).abs() <= 1e-9, "n={n} m={m}");
            assert!(r.evaluations > 0);
        }
    }
}

#[test]
fn monte_carlo_examples() {
    for (n, r, seed) in [(1u64, 2u32, 42u64), (5, 3, 7)] {
        let exact = multi_integral_exact(n, r).unwrap().approx_f64();
        let mc = cube_monte_carlo(n, r, 1_000_000, seed).unwrap();
        assert!((mc.estimate - exact).abs() <= 4.0 * mc.stderr, "n={n} r={r}");
        assert_eq!(mc.samples, 1_000_000);
    }
    assert_eq!(cube_monte_carlo(0, 3, 10, 99).unwrap().estimate, 1.0);
}

#[test]
fn monte_carlo_is_reproducible_across_thread_counts() {
    let serial = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let a = serial.install(|| cube_monte_carlo(2, 3, 300_000, 5).unwrap());
    let wide = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
    let b = wide.install(|| cube_monte_carlo(2, 3, 300_000, 5).unwrap());
    assert_eq!(a.estimate.to_bits(), b.estimate.to_bits());
    assert_eq!(a.stderr.to_bits(), b.stderr.to_bits());
}
