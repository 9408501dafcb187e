//! Floating-point cross-checks that share no code path with the exact
//! engine: adaptive quadrature of the log-moment integrals and Monte Carlo
//! estimates of the cube integral.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::rational::serde_g17;
use crate::scalar::{check_domain, Scalar};
use crate::{Error, Rational, Result};

/// Integrand evaluations allowed before quadrature gives up.
pub const EVALUATION_CAP: u64 = 1_000_000;

/// Relative size the analytic tail beyond the cut-off must fall under.
const TAIL_TOLERANCE: f64 = 1e-14;

/// Relative accuracy requested from the adaptive scheme on `[0, U]`.
const QUAD_TOLERANCE: f64 = 1e-13;

/// Samples drawn per independently seeded batch.
const BATCH: u64 = 1 << 16;

pub const GENERATOR: &str = "chacha8";

/// Oracle output embedded in identity reports.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum OracleRecord {
    Quadrature {
        #[serde(with = "serde_g17")]
        value: f64,
        #[serde(with = "serde_g17")]
        err: f64,
        evals: u64,
    },
    MonteCarlo {
        #[serde(with = "serde_g17")]
        estimate: f64,
        #[serde(with = "serde_g17")]
        stderr: f64,
        samples: u64,
        seed: u64,
        generator: &'static str,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    /// The scheme's own error estimate plus the analytic tail bound. Not a
    /// rigorous bound.
    pub abs_error_estimate: f64,
    pub evaluations: u64,
}

impl From<QuadratureResult> for OracleRecord {
    fn from(q: QuadratureResult) -> Self {
        OracleRecord::Quadrature {
            value: q.value,
            err: q.abs_error_estimate,
            evals: q.evaluations,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonteCarloResult {
    pub estimate: f64,
    pub stderr: f64,
    pub samples: u64,
    pub seed: u64,
    pub generator: &'static str,
}

impl From<MonteCarloResult> for OracleRecord {
    fn from(m: MonteCarloResult) -> Self {
        OracleRecord::MonteCarlo {
            estimate: m.estimate,
            stderr: m.stderr,
            samples: m.samples,
            seed: m.seed,
            generator: m.generator,
        }
    }
}

// Gauss-Kronrod 7-15 nodes on [-1, 1]; the Gauss nodes are the odd entries.
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl Eq for Segment {}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Segment {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for i in 0..7 {
        let d = h * XGK[i];
        let pair = f(c - d) + f(c + d);
        k += WGK[i] * pair;
        if i % 2 == 1 {
            g += WG[i / 2] * pair;
        }
    }
    Segment {
        a,
        b,
        value: k * h,
        error: ((k - g) * h).abs(),
    }
}

/// `int_0^1 (1-t)^n (log t)^m t^x dt`.
///
/// With `t = e^-u` this is `(-1)^m int_0^inf (1-e^-u)^n u^m e^-(x+1)u du`.
/// The range is cut at `U`, doubled until `int_U^inf u^m e^-(x+1)u du` (an
/// upper bound on the discarded piece) is below `1e-14 |value|`, and `[0, U]`
/// is integrated by globally adaptive Gauss-Kronrod 7-15.
pub fn log_moment_quadrature(n: u64, m: u32, x: &Rational) -> Result<QuadratureResult> {
    check_domain(x)?;
    let decay = x.approx_f64() + 1.0;
    let n = i32::try_from(n).map_err(|_| Error::InvalidArgument(format!("n = {n} is too large")))?;
    let m_i = m as i32;
    let f = move |u: f64| (-(-u).exp_m1()).powi(n) * u.powi(m_i) * (-decay * u).exp();

    let mut cut = (m as f64 + 1.0) / decay;
    let mut heap = BinaryHeap::new();
    heap.push(kronrod(&f, 0.0, cut));
    let mut evaluations = 15u64;
    loop {
        let value: f64 = heap.iter().map(|s| s.value).sum();
        let error: f64 = heap.iter().map(|s| s.error).sum();
        let tail = envelope_tail(m, decay, cut);
        if tail > TAIL_TOLERANCE * value.abs() && tail > f64::MIN_POSITIVE {
            heap.push(kronrod(&f, cut, 2.0 * cut));
            evaluations += 15;
            cut *= 2.0;
            continue;
        }
        if error <= QUAD_TOLERANCE * value.abs() || error == 0.0 {
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            return Ok(QuadratureResult {
                value: sign * value,
                abs_error_estimate: error + tail,
                evaluations,
            });
        }
        if evaluations + 30 > EVALUATION_CAP {
            return Err(Error::NoConvergence { evaluations, error });
        }
        let worst = heap.pop().expect("at least one segment");
        let mid = 0.5 * (worst.a + worst.b);
        heap.push(kronrod(&f, worst.a, mid));
        heap.push(kronrod(&f, mid, worst.b));
        evaluations += 30;
    }
}

/// `int_U^inf u^m e^-au du = e^-aU sum_{j=0}^{m} m!/j! U^j / a^(m+1-j)`,
/// the upper incomplete gamma function by its finite recurrence.
fn envelope_tail(m: u32, a: f64, cut: f64) -> f64 {
    let mut term = 1.0 / a; // j = m
    let mut total = 0.0;
    for j in (0..=m).rev() {
        total += term * cut.powi(j as i32);
        term *= j as f64 / a;
    }
    total * (-a * cut).exp()
}

/// Monte Carlo estimate of `int_{[0,1]^r} (1 - x_1 ... x_r)^n dx`.
///
/// Samples are drawn in batches of 65536; batch `b` uses a ChaCha8 stream
/// seeded with `seed` on stream `b`. Batches run in parallel and are merged
/// in index order, so the result is bit-identical for a fixed input.
pub fn cube_monte_carlo(n: u64, r: u32, samples: u64, seed: u64) -> Result<MonteCarloResult> {
    if samples < 2 {
        return Err(Error::InvalidArgument("at least two samples are required".into()));
    }
    if r == 0 {
        return Err(Error::InvalidArgument("r must be at least 1".into()));
    }
    let n = i32::try_from(n).map_err(|_| Error::InvalidArgument(format!("n = {n} is too large")))?;
    let batches = samples.div_ceil(BATCH);
    let parts: Vec<Moments> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b);
            let count = BATCH.min(samples - b * BATCH);
            let mut acc = Moments::default();
            for _ in 0..count {
                let prod: f64 = (0..r).map(|_| rng.random::<f64>()).product();
                acc.push((1.0 - prod).powi(n));
            }
            acc
        })
        .collect();
    let total = parts.into_iter().fold(Moments::default(), Moments::merge);
    let variance = total.m2 / (total.count - 1) as f64;
    Ok(MonteCarloResult {
        estimate: total.mean,
        stderr: (variance / total.count as f64).sqrt(),
        samples,
        seed,
        generator: GENERATOR,
    })
}

/// Running mean and sum of squared deviations.
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    count: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, v: f64) {
        self.count += 1;
        let d = v - self.mean;
        self.mean += d / self.count as f64;
        self.m2 += d * (v - self.mean);
    }

    fn merge(self, other: Self) -> Self {
        if self.count == 0 {
            return other;
        }
        if other.count == 0 {
            return self;
        }
        let count = self.count + other.count;
        let d = other.mean - self.mean;
        let mean = self.mean + d * other.count as f64 / count as f64;
        let m2 = self.m2 + other.m2 + d * d * (self.count as f64 * other.count as f64 / count as f64);
        Self { count, mean, m2 }
    }
}
