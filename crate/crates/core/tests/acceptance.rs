//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use harmonic_id::beta::{bell_expansion, beta_derivative, HarmonicPolynomial};
use harmonic_id::harmonic::{bernoulli_table, zeta_even_coefficient};
use harmonic_id::identity::{
    binomial_inverse, check_first_order, check_fourth_order, check_leibniz_finite,
    check_second_third_order, derivative_as_power_sum, generic_check, GridPoint, Summary,
};
use harmonic_id::oracle::{cube_monte_carlo, log_moment_quadrature};
use harmonic_id::series::{
    evaluate_series, hurwitz_partial, multi_integral_exact, ExpandedOrder, Partial,
    SeriesTarget,
};
use harmonic_id::{Rational, Scalar};
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

type Outcome = Result<String, String>;

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

fn sweep_x() -> Vec<Rational> {
    vec![q(0, 1), q(1, 2), q(1, 1), q(7, 3)]
}

fn within(limit: Duration, start: Instant, what: String) -> Outcome {
    let took = start.elapsed();
    if took <= limit {
        Ok(format!("{what} in {took:.2?}"))
    } else {
        Err(format!("{what} but took {took:.2?} (limit {limit:?})"))
    }
}

fn bell_coefficients() -> Outcome {
    let start = Instant::now();
    let expected: [(usize, &[(i64, &[u32])]); 3] = [
        (2, &[(1, &[2]), (1, &[0, 1])]),
        (3, &[(2, &[0, 0, 1]), (3, &[1, 1]), (1, &[3])]),
        (4, &[(6, &[0, 0, 0, 1]), (8, &[1, 0, 1]), (3, &[0, 2]), (6, &[2, 1]), (1, &[4])]),
    ];
    for (r, terms) in expected {
        let got = bell_expansion(r);
        if got.polynomial() != &HarmonicPolynomial::from_terms(terms) {
            return Err(format!("order {r} expanded to {got}"));
        }
    }
    within(Duration::from_millis(1), start, "orders 2, 3, 4 match".into())
}

fn derivative_closure() -> Outcome {
    let start = Instant::now();
    let mut grid = Vec::new();
    for x in sweep_x() {
        for r in 0..=8 {
            for n in 0..=40 {
                grid.push(GridPoint::with_order(n, x.clone(), r));
            }
        }
    }
    let reports = generic_check(
        "lemma-a",
        |p| beta_derivative(p.n, &p.x, p.r.unwrap() as usize),
        |p| derivative_as_power_sum(p.n, &p.x, p.r.unwrap()),
        &grid,
    );
    summarize(&reports, start, Duration::from_secs(10))
}

fn summarize(reports: &[harmonic_id::identity::IdentityReport], start: Instant, limit: Duration) -> Outcome {
    let s = Summary::of(reports);
    if !s.all_pass() {
        let first = reports.iter().find(|r| !r.is_pass()).unwrap();
        return Err(format!("{s:?}; first: {} at {:?}", first.identity_id, first.params));
    }
    within(limit, start, format!("{} grid points pass", s.pass))
}

fn low_order_sweeps() -> Outcome {
    let start = Instant::now();
    let xs = sweep_x();
    let mut reports = check_first_order(50, &xs);
    reports.extend(check_second_third_order(50, &xs));
    reports.extend(check_fourth_order(50, &xs));
    summarize(&reports, start, Duration::from_secs(30))
}

fn leibniz_finite() -> Outcome {
    let start = Instant::now();
    let reports = check_leibniz_finite(6, 30, &[q(0, 1), q(1, 2)]);
    summarize(&reports, start, Duration::from_secs(30))
}

fn involution() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_501);
    for case in 0..1000 {
        let len = rng.random_range(0..=64);
        let a: Vec<Rational> = (0..len)
            .map(|_| q(rng.random_range(-1000..=1000), rng.random_range(1..=1000)))
            .collect();
        if binomial_inverse(&binomial_inverse(&a)) != a {
            return Err(format!("sequence {case} of length {len} not restored"));
        }
    }
    Ok("1000 random sequences restored exactly".into())
}

fn series_limits() -> Outcome {
    let mut targets: Vec<SeriesTarget> = (2..=6).map(|r| SeriesTarget::PowerSum { r }).collect();
    targets.extend(
        [ExpandedOrder::R3, ExpandedOrder::R4, ExpandedOrder::R5].map(SeriesTarget::ExpandedNumerator),
    );
    targets.extend((0..=4).map(|r| SeriesTarget::LeibnizSeries { r }));
    let start = Instant::now();
    let results: Vec<Result<(), String>> = targets
        .par_iter()
        .map(|t| {
            let label = format!("{t:?}");
            let e = evaluate_series(t, 10_000, false).map_err(|e| format!("{label}: {e}"))?;
            let Partial::Exact(p) = &e.partial else {
                return Err(format!("{label}: partial not exact"));
            };
            let harmonic_id::series::ClaimedLimit::Rational(limit) = &e.claimed_limit else {
                return Err(format!("{label}: no rational limit"));
            };
            if p.abs() >= limit.abs() || p.is_negative() != limit.is_negative() {
                return Err(format!("{label}: partial {} not short of {limit}", p.approx_f64()));
            }
            if e.contains_limit() != Some(true) {
                return Err(format!("{label}: bracket misses {limit}"));
            }
            let width = e.width();
            if width > limit.abs() * q(1, 20) {
                return Err(format!("{label}: width {} too wide", width.approx_f64()));
            }
            Ok(())
        })
        .collect();
    if let Some(Err(e)) = results.into_iter().find(|r| r.is_err()) {
        return Err(e);
    }
    Ok(format!("{} series bracketed at N = 10^4 in {:.2?}", targets.len(), start.elapsed()))
}

fn zeta_brackets() -> Outcome {
    for s in [2u32, 4, 6, 8] {
        let e = hurwitz_partial(&Rational::zero(), s, 1000).map_err(|e| e.to_string())?;
        let coeff = zeta_even_coefficient(s / 2).map_err(|e| e.to_string())?;
        let limit = coeff.approx_f64() * std::f64::consts::PI.powi(s as i32);
        let p = e.partial.to_f64();
        let lo = p + e.tail_low.approx_f64();
        let hi = p + e.tail_high.approx_f64();
        if !(lo - 1e-12 <= limit && limit <= hi + 1e-12) {
            return Err(format!("s = {s}: [{lo}, {hi}] misses {limit}"));
        }
    }
    Ok("s = 2, 4, 6, 8 contained at N = 1000".into())
}

fn quadrature_agreement() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for x in [q(0, 1), q(1, 2)] {
        for n in 0..=20 {
            for m in 0..=4u32 {
                let exact = beta_derivative(n, &x, m as usize).unwrap().approx_f64();
                let quad = log_moment_quadrature(n, m, &x).map_err(|e| e.to_string())?;
                let rel = ((quad.value - exact) / exact).abs();
                if rel > 1e-9 {
                    return Err(format!("n={n} m={m} x={x}: relative error {rel:e}"));
                }
                worst = worst.max(rel);
            }
        }
    }
    within(Duration::from_secs(60), start, format!("worst relative error {worst:.1e}"))
}

fn monte_carlo() -> Outcome {
    let mut parts = Vec::new();
    for (n, r, seed) in [(1u64, 2u32, 42u64), (3, 2, 3), (5, 3, 7)] {
        let exact = multi_integral_exact(n, r).unwrap().approx_f64();
        let mc = cube_monte_carlo(n, r, 1_000_000, seed).map_err(|e| e.to_string())?;
        let z = (mc.estimate - exact) / mc.stderr;
        if z.abs() > 4.0 {
            return Err(format!("(n={n}, r={r}): {z:.2} standard errors off"));
        }
        parts.push(format!("{z:+.2}"));
    }
    Ok(format!("z-scores {}", parts.join(", ")))
}

fn bernoulli_and_zeta() -> Outcome {
    let table = bernoulli_table(20);
    for (k, v) in [(2, q(1, 6)), (4, q(-1, 30)), (6, q(1, 42)), (8, q(-1, 30))] {
        if table.get(k) != &v {
            return Err(format!("B_{k} = {}", table.get(k)));
        }
    }
    for (n, v) in [(1, q(1, 6)), (2, q(1, 90)), (3, q(1, 945)), (4, q(1, 9450))] {
        let got = zeta_even_coefficient(n).map_err(|e| e.to_string())?;
        if got != v {
            return Err(format!("zeta({}) coefficient {got}", 2 * n));
        }
    }
    Ok("B_2..B_8 and zeta(2..8) coefficients exact".into())
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("bell coefficients", bell_coefficients),
        ("derivative closure", derivative_closure),
        ("low-order identity sweeps", low_order_sweeps),
        ("finite leibniz identity", leibniz_finite),
        ("inversion involution", involution),
        ("series limits", series_limits),
        ("zeta brackets", zeta_brackets),
        ("quadrature agreement", quadrature_agreement),
        ("monte carlo", monte_carlo),
        ("bernoulli and zeta(2n)", bernoulli_and_zeta),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
