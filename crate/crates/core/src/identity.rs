//! Binomial inversion and exact verification of the finite identities over
//! parameter sweeps.
//!
//! Each check produces one [`IdentityReport`] per grid point. Failures are
//! recorded, never raised, so a sweep always runs to completion.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::beta::{
    alt_power_sum, bell_expansion, beta_derivative, beta_integral, beta_integral_sum,
    transcribed_expansion,
};
use crate::harmonic::{
    binomial_row, generalized_binomial, harmonic_function, harmonic_number, HarmonicVector,
};
use crate::oracle::OracleRecord;
use crate::rational::serde_str;
use crate::{Error, Rational, Result, Scalar};

/// `b_n = sum_{k=0}^{n} C(n,k) (-1)^k a_k`. The transform is its own inverse.
pub fn binomial_inverse<T: Scalar>(a: &[T]) -> Vec<T> {
    T::binomial_transform(a)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Skipped => "skipped",
        })
    }
}

/// One point of a sweep. `r` is present only for identities indexed by an
/// order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct GridPoint {
    pub n: u64,
    #[serde(with = "serde_str")]
    pub x: Rational,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<u32>,
}

impl GridPoint {
    pub fn new(n: u64, x: Rational) -> Self {
        Self { n, x, r: None }
    }

    pub fn with_order(n: u64, x: Rational, r: u32) -> Self {
        Self { n, x, r: Some(r) }
    }

    fn order(&self) -> u32 {
        self.r.expect("grid point carries an order")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    #[serde(with = "serde_str")]
    pub lhs: Rational,
    #[serde(with = "serde_str")]
    pub rhs: Rational,
}

/// Verdict for one identity at one parameter tuple.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityReport {
    pub identity_id: String,
    pub params: GridPoint,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    pub elapsed_ms: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleRecord>,
}

impl IdentityReport {
    pub fn is_pass(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn is_fail(&self) -> bool {
        self.status == Status::Fail
    }
}

/// Pass / fail / skipped counts over a batch of reports.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub skipped: usize,
}

impl Summary {
    pub fn of(reports: &[IdentityReport]) -> Self {
        let mut s = Self::default();
        for r in reports {
            match r.status {
                Status::Pass => s.pass += 1,
                Status::Fail => s.fail += 1,
                Status::Skipped => s.skipped += 1,
            }
        }
        s
    }

    pub fn all_pass(&self) -> bool {
        self.fail == 0 && self.skipped == 0
    }
}

/// Compares `lhs` and `rhs` exactly at every grid point.
///
/// Evaluator errors become `skipped` entries carrying the error text. Grid
/// points run in parallel on the current rayon pool; the output is sorted by
/// parameter tuple.
pub fn generic_check<L, R>(id: &str, lhs: L, rhs: R, grid: &[GridPoint]) -> Vec<IdentityReport>
where
    L: Fn(&GridPoint) -> Result<Rational> + Sync,
    R: Fn(&GridPoint) -> Result<Rational> + Sync,
{
    let mut out: Vec<IdentityReport> = grid
        .par_iter()
        .map(|p| {
            let start = Instant::now();
            let sides = lhs(p).and_then(|l| rhs(p).map(|r| (l, r)));
            let elapsed_ms = start.elapsed().as_millis() as u64;
            let (status, witness, reason) = match sides {
                Ok((l, r)) if l == r => (Status::Pass, None, None),
                Ok((lhs, rhs)) => (Status::Fail, Some(Witness { lhs, rhs }), None),
                Err(e) => (Status::Skipped, None, Some(e.to_string())),
            };
            IdentityReport {
                identity_id: id.to_string(),
                params: p.clone(),
                status,
                witness,
                elapsed_ms,
                reason,
                oracle: None,
            }
        })
        .collect();
    out.sort_by(|a, b| a.params.cmp(&b.params));
    out
}

/// Sweep bounds shared by all checks.
#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub n_max: u64,
    pub r_max: u32,
    pub x_samples: Vec<Rational>,
}

impl Sweep {
    /// `x = -1/2 + 1/100` sits close to the domain boundary.
    pub fn default_x_samples() -> Vec<Rational> {
        [(0, 1), (1, 2), (1, 1), (7, 3), (-49, 100)]
            .iter()
            .map(|&(p, q)| Rational::new(p.into(), q.into()))
            .collect()
    }
}

impl Default for Sweep {
    fn default() -> Self {
        Self {
            n_max: 50,
            r_max: 6,
            x_samples: Self::default_x_samples(),
        }
    }
}

/// Which family of identities to verify.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerifyTarget {
    /// Second-power sums against `H(x,1) F` and their inversions.
    FirstOrder,
    /// Third- and fourth-power sums and their inversions.
    SecondThirdOrder,
    /// Fifth-power sums and their inversions.
    FourthOrder,
    /// The general-order Leibniz expansion.
    LeibnizFinite,
    /// Derivatives against the alternating power sums.
    DerivativeClosure,
    /// Product and sum forms of the beta family.
    BetaForms,
    /// Binomial inversion applied to whole sequences.
    InversionDuality,
    All,
}

impl VerifyTarget {
    pub const NAMES: [&'static str; 8] = [
        "thm2.2", "thm2.3", "thm2.5", "thm2.6", "lemma-a", "beta-eq", "inversion", "all",
    ];

    pub fn name(&self) -> &'static str {
        match self {
            VerifyTarget::FirstOrder => "thm2.2",
            VerifyTarget::SecondThirdOrder => "thm2.3",
            VerifyTarget::FourthOrder => "thm2.5",
            VerifyTarget::LeibnizFinite => "thm2.6",
            VerifyTarget::DerivativeClosure => "lemma-a",
            VerifyTarget::BetaForms => "beta-eq",
            VerifyTarget::InversionDuality => "inversion",
            VerifyTarget::All => "all",
        }
    }
}

impl FromStr for VerifyTarget {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "thm2.2" => VerifyTarget::FirstOrder,
            "thm2.3" => VerifyTarget::SecondThirdOrder,
            "thm2.5" => VerifyTarget::FourthOrder,
            "thm2.6" => VerifyTarget::LeibnizFinite,
            "lemma-a" => VerifyTarget::DerivativeClosure,
            "beta-eq" => VerifyTarget::BetaForms,
            "inversion" => VerifyTarget::InversionDuality,
            "all" => VerifyTarget::All,
            other => {
                return Err(Error::InvalidArgument(format!(
                    "unknown verify target {other:?}; expected one of {}",
                    Self::NAMES.join(", ")
                )))
            }
        })
    }
}

/// Runs one family (or all of them) over the sweep.
pub fn verify(target: VerifyTarget, sweep: &Sweep) -> Result<Vec<IdentityReport>> {
    validate(sweep)?;
    let xs = &sweep.x_samples;
    let n = sweep.n_max;
    Ok(match target {
        VerifyTarget::FirstOrder => check_first_order(n, xs),
        VerifyTarget::SecondThirdOrder => check_second_third_order(n, xs),
        VerifyTarget::FourthOrder => check_fourth_order(n, xs),
        VerifyTarget::LeibnizFinite => check_leibniz_finite(sweep.r_max, n, xs),
        VerifyTarget::DerivativeClosure => check_derivative_closure(sweep.r_max, n, xs),
        VerifyTarget::BetaForms => check_beta_forms(n, xs),
        VerifyTarget::InversionDuality => check_inversion_duality(sweep.r_max, n, xs),
        VerifyTarget::All => {
            let mut out = Vec::new();
            for t in [
                VerifyTarget::BetaForms,
                VerifyTarget::DerivativeClosure,
                VerifyTarget::FirstOrder,
                VerifyTarget::SecondThirdOrder,
                VerifyTarget::FourthOrder,
                VerifyTarget::LeibnizFinite,
                VerifyTarget::InversionDuality,
            ] {
                out.extend(verify(t, sweep)?);
            }
            out
        }
    })
}

fn validate(sweep: &Sweep) -> Result<()> {
    if let Some(x) = sweep.x_samples.iter().find(|x| !crate::scalar::in_domain(*x)) {
        return Err(Error::OutOfDomain(x.to_string()));
    }
    Ok(())
}

fn q(v: u64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

fn factorial(r: u64) -> Rational {
    (1..=r).fold(Rational::one(), |acc, k| acc * q(k))
}

fn sign(k: u64) -> Rational {
    if k % 2 == 0 {
        Rational::one()
    } else {
        -Rational::one()
    }
}

fn grid(n_max: u64, xs: &[Rational]) -> Vec<GridPoint> {
    let mut g = Vec::new();
    for x in xs {
        for n in 0..=n_max {
            g.push(GridPoint::new(n, x.clone()));
        }
    }
    g
}

fn grid_at_zero(n_max: u64) -> Vec<GridPoint> {
    grid(n_max, &[Rational::zero()])
}

fn grid_with_orders(n_max: u64, xs: &[Rational], orders: impl Iterator<Item = u32> + Clone) -> Vec<GridPoint> {
    let mut g = Vec::new();
    for x in xs {
        for r in orders.clone() {
            for n in 0..=n_max {
                g.push(GridPoint::with_order(n, x.clone(), r));
            }
        }
    }
    g
}

/// `sum_{k=0}^{n} C(n,k) (-1)^k v_k`, written out with an explicit
/// binomial row so it stays independent of [`binomial_inverse`].
fn alternating_binomial_sum(values: &[Rational], n: u64) -> Rational {
    let row = binomial_row(n);
    row.iter()
        .zip(values)
        .enumerate()
        .fold(Rational::zero(), |acc, (k, (c, v))| {
            let t = Rational::from_integer(c.clone()) * v;
            if k % 2 == 0 {
                acc + t
            } else {
                acc - t
            }
        })
}

/// `C(x+k+1, k) (x+1)`, the reciprocal of `F_k(x)` in binomial form.
fn binomial_denominator(k: u64, x: &Rational) -> Rational {
    generalized_binomial(&(x + q(k + 1)), k) * (x + Rational::one())
}

/// `1 / (n + x + 1)^p`.
fn reciprocal_power(n: u64, x: &Rational, p: u32) -> Rational {
    num_traits::pow(x + q(n + 1), p as usize).recip()
}

/// The hand-expanded numerator of the given order evaluated at
/// `H_k(x, 1..)`.
fn transcribed_numerator(order: usize, k: u64, x: &Rational) -> Result<Rational> {
    let p = transcribed_expansion(order).expect("orders 0..=4 are transcribed");
    let h = HarmonicVector::new(k, x.clone(), order.max(1))?;
    Ok(p.evaluate(h.values()))
}

/// Same numerator at `x = 0`, built from harmonic numbers `H_{k+1}^(a)`.
fn transcribed_numerator_at_zero(order: usize, k: u64) -> Result<Rational> {
    let p = transcribed_expansion(order).expect("orders 0..=4 are transcribed");
    let h = (1..=order.max(1) as u32)
        .map(|a| harmonic_number::<Rational>(k + 1, a))
        .collect::<Result<Vec<_>>>()?;
    Ok(p.evaluate(&h))
}

/// Per-`x` table of `v_k` for `k = 0..=n_max`, shared by every grid point.
struct Tables(Vec<(Rational, Vec<Rational>)>);

impl Tables {
    fn build<F>(xs: &[Rational], n_max: u64, f: F) -> Result<Self>
    where
        F: Fn(u64, &Rational) -> Result<Rational> + Sync,
    {
        let rows = xs
            .par_iter()
            .map(|x| {
                let row = (0..=n_max).map(|k| f(k, x)).collect::<Result<Vec<_>>>()?;
                Ok((x.clone(), row))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self(rows))
    }

    fn row(&self, x: &Rational) -> Result<&[Rational]> {
        self.0
            .iter()
            .find(|(v, _)| v == x)
            .map(|(_, row)| row.as_slice())
            .ok_or_else(|| Error::InvalidArgument(format!("no table for x = {x}")))
    }
}

/// Evaluates `(1/scale) sum_k C(n,k)(-1)^k table[k]`, or reports why the
/// table could not be built.
fn inverted_sum(tables: &Result<Tables>, p: &GridPoint, scale: u64) -> Result<Rational> {
    let tables = tables.as_ref().map_err(Clone::clone)?;
    let row = tables.row(&p.x)?;
    Ok(alternating_binomial_sum(row, p.n) / factorial(scale))
}

/// Second-power sums: the forward forms, their `x = 0` specialization, and
/// both inverted displays.
pub fn check_first_order(n_max: u64, xs: &[Rational]) -> Vec<IdentityReport> {
    let g = grid(n_max, xs);
    let g0 = grid_at_zero(n_max);
    let mut out = generic_check(
        "eq15",
        |p| alt_power_sum(p.n, &p.x, 2),
        |p| Ok(harmonic_function(p.n, &p.x, 1)? / binomial_denominator(p.n, &p.x)),
        &g,
    );
    out.extend(generic_check(
        "eq16",
        |p| alt_power_sum(p.n, &p.x, 2),
        |p| Ok(harmonic_number::<Rational>(p.n + 1, 1)? / q(p.n + 1)),
        &g0,
    ));
    let forward = Tables::build(xs, n_max, |k, x| {
        Ok(harmonic_function(k, x, 1)? / binomial_denominator(k, x))
    });
    out.extend(generic_check(
        "thm2.2a",
        |p| inverted_sum(&forward, p, 0),
        |p| Ok(reciprocal_power(p.n, &p.x, 2)),
        &g,
    ));
    let forward0 = Tables::build(&[Rational::zero()], n_max, |k, _| {
        Ok(harmonic_number::<Rational>(k + 1, 1)? / q(k + 1))
    });
    out.extend(generic_check(
        "thm2.2b",
        |p| inverted_sum(&forward0, p, 0),
        |p| Ok(q(p.n + 1).pow(2).recip()),
        &g0,
    ));
    out
}

/// Third- and fourth-power sums in closed form, at general `x` and at
/// `x = 0`, plus their inversions.
pub fn check_second_third_order(n_max: u64, xs: &[Rational]) -> Vec<IdentityReport> {
    let g = grid(n_max, xs);
    let g0 = grid_at_zero(n_max);
    let mut out = Vec::new();
    for (order, id, inv_id, zero_id) in [
        (2usize, "thm2.3a", "eq20", "thm2.3c"),
        (3usize, "thm2.3b", "eq21", "thm2.3d"),
    ] {
        let power = order as u32 + 1;
        out.extend(generic_check(
            id,
            |p| Ok(transcribed_numerator(order, p.n, &p.x)? / binomial_denominator(p.n, &p.x)),
            |p| Ok(factorial(order as u64) * alt_power_sum(p.n, &p.x, power)?),
            &g,
        ));
        out.extend(generic_check(
            zero_id,
            |p| Ok(factorial(order as u64) * alt_power_sum(p.n, &p.x, power)?),
            |p| Ok(transcribed_numerator_at_zero(order, p.n)? / q(p.n + 1)),
            &g0,
        ));
        let forward = Tables::build(xs, n_max, |k, x| {
            Ok(transcribed_numerator(order, k, x)? / binomial_denominator(k, x))
        });
        out.extend(generic_check(
            inv_id,
            |p| inverted_sum(&forward, p, order as u64),
            |p| Ok(reciprocal_power(p.n, &p.x, power)),
            &g,
        ));
    }
    out
}

/// Fifth-power sums against the fourth-order expansion, the fourth
/// derivative, and the inverted displays.
pub fn check_fourth_order(n_max: u64, xs: &[Rational]) -> Vec<IdentityReport> {
    let g = grid(n_max, xs);
    let g0 = grid_at_zero(n_max);
    let fact4 = factorial(4);
    let mut out = generic_check(
        "eq28",
        |p| alt_power_sum(p.n, &p.x, 5),
        |p| {
            Ok(transcribed_numerator(4, p.n, &p.x)?
                / (fact4.clone() * binomial_denominator(p.n, &p.x)))
        },
        &g,
    );
    out.extend(generic_check(
        "eq28-int",
        |p| alt_power_sum(p.n, &p.x, 5),
        |p| Ok(beta_derivative(p.n, &p.x, 4)? / fact4.clone()),
        &g,
    ));
    out.extend(generic_check(
        "eq29",
        |p| alt_power_sum(p.n, &p.x, 5),
        |p| Ok(transcribed_numerator_at_zero(4, p.n)? / (fact4.clone() * q(p.n + 1))),
        &g0,
    ));
    out.extend(generic_check(
        "eq29-int",
        |p| alt_power_sum(p.n, &p.x, 5),
        |p| Ok(beta_derivative(p.n, &p.x, 4)? / fact4.clone()),
        &g0,
    ));
    let forward = Tables::build(xs, n_max, |k, x| {
        Ok(transcribed_numerator(4, k, x)? / binomial_denominator(k, x))
    });
    out.extend(generic_check(
        "thm2.5a",
        |p| inverted_sum(&forward, p, 4),
        |p| Ok(reciprocal_power(p.n, &p.x, 5)),
        &g,
    ));
    let forward0 = Tables::build(&[Rational::zero()], n_max, |k, _| {
        Ok(transcribed_numerator_at_zero(4, k)? / q(k + 1))
    });
    out.extend(generic_check(
        "thm2.5b",
        |p| inverted_sum(&forward0, p, 4),
        |p| Ok(q(p.n + 1).pow(5).recip()),
        &g0,
    ));
    out
}

/// Right-hand side of the general-order Leibniz identity, with each
/// log-moment integral replaced by the exact derivative it equals.
pub fn leibniz_rhs(n: u64, x: &Rational, r: u32) -> Result<Rational> {
    let row = binomial_row(r as u64);
    let mut acc = Rational::zero();
    for (l, c) in row.iter().enumerate() {
        let l = l as u64;
        let term = Rational::from_integer(c.clone())
            * factorial(l)
            * sign(l)
            * harmonic_function(n, x, l as u32 + 1)?
            * beta_derivative(n, x, (r as u64 - l) as usize)?;
        acc += term;
    }
    Ok(sign(r as u64) * acc / factorial(r as u64 + 1))
}

/// `sum_k C(n,k)(-1)^k / (x+k+1)^(r+2)` against its Leibniz expansion for
/// every `r <= r_max`.
pub fn check_leibniz_finite(r_max: u32, n_max: u64, xs: &[Rational]) -> Vec<IdentityReport> {
    let g = grid_with_orders(n_max, xs, 0..=r_max);
    generic_check(
        "thm2.6-finite",
        |p| alt_power_sum(p.n, &p.x, p.order() + 2),
        |p| leibniz_rhs(p.n, &p.x, p.order()),
        &g,
    )
}

/// `r! sum_k C(n,k) (-1)^(k-r) / (x+k+1)^(r+1)`, spelled out term by term.
pub fn derivative_as_power_sum(n: u64, x: &Rational, r: u32) -> Result<Rational> {
    crate::scalar::check_domain(x)?;
    let row = binomial_row(n);
    let mut acc = Rational::zero();
    for (k, c) in row.iter().enumerate() {
        let k = k as u64;
        acc += sign(k + r as u64) * Rational::from_integer(c.clone()) * reciprocal_power(k, x, r + 1);
    }
    Ok(factorial(r as u64) * acc)
}

/// The Bell-expansion derivative against the alternating power sum, and the
/// first derivative against `-H(x,1) F`.
pub fn check_derivative_closure(r_max: u32, n_max: u64, xs: &[Rational]) -> Vec<IdentityReport> {
    let g = grid_with_orders(n_max, xs, 1..=r_max.max(1));
    let mut out = generic_check(
        "lemma-a",
        |p| beta_derivative(p.n, &p.x, p.order() as usize),
        |p| derivative_as_power_sum(p.n, &p.x, p.order()),
        &g,
    );
    out.extend(generic_check(
        "lemma-b",
        |p| beta_derivative(p.n, &p.x, 1),
        |p| Ok(-harmonic_function(p.n, &p.x, 1)? * beta_integral(p.n, &p.x)?),
        &grid(n_max, xs),
    ));
    out
}

/// Product form against the alternating sum and against the binomial form.
pub fn check_beta_forms(n_max: u64, xs: &[Rational]) -> Vec<IdentityReport> {
    let g = grid(n_max, xs);
    let mut out = generic_check(
        "beta-eq",
        |p| beta_integral(p.n, &p.x),
        |p| beta_integral_sum(p.n, &p.x),
        &g,
    );
    out.extend(generic_check(
        "beta-binomial",
        |p| beta_integral(p.n, &p.x),
        |p| Ok(binomial_denominator(p.n, &p.x).recip()),
        &g,
    ));
    out
}

/// For each order `r`, inverting the closed-form sequence
/// `G_{r-1}(H_k) F_k / (r-1)!` must give `1/(x+n+1)^r`, and inverting the
/// power sequence must give the closed form back.
pub fn check_inversion_duality(r_max: u32, n_max: u64, xs: &[Rational]) -> Vec<IdentityReport> {
    let orders = 1..=r_max.max(1);
    let g = grid_with_orders(n_max, xs, orders.clone());
    let mut pairs: Vec<((Rational, u32), Result<(Vec<Rational>, Vec<Rational>)>)> = Vec::new();
    for x in xs {
        for r in orders.clone() {
            pairs.push(((x.clone(), r), inversion_sequences(n_max, x, r)));
        }
    }
    let lookup = |p: &GridPoint| -> Result<&(Vec<Rational>, Vec<Rational>)> {
        let (_, seqs) = pairs
            .iter()
            .find(|((x, r), _)| *x == p.x && *r == p.order())
            .expect("sequence built for every grid point");
        seqs.as_ref().map_err(Clone::clone)
    };
    let mut out = generic_check(
        "inversion",
        |p| Ok(binomial_inverse(&lookup(p)?.0)[p.n as usize].clone()),
        |p| Ok(reciprocal_power(p.n, &p.x, p.order())),
        &g,
    );
    out.extend(generic_check(
        "inversion-forward",
        |p| Ok(binomial_inverse(&lookup(p)?.1)[p.n as usize].clone()),
        |p| Ok(lookup(p)?.0[p.n as usize].clone()),
        &g,
    ));
    out
}

/// `(closed forms, powers)` for `k = 0..=n_max`.
fn inversion_sequences(n_max: u64, x: &Rational, r: u32) -> Result<(Vec<Rational>, Vec<Rational>)> {
    let g = bell_expansion(r as usize - 1);
    let norm = factorial(r as u64 - 1);
    let mut closed = Vec::with_capacity(n_max as usize + 1);
    let mut powers = Vec::with_capacity(n_max as usize + 1);
    for k in 0..=n_max {
        let h = HarmonicVector::new(k, x.clone(), r as usize)?;
        closed.push(g.evaluate(h.values()) * beta_integral(k, x)? / norm.clone());
        powers.push(reciprocal_power(k, x, r));
    }
    Ok((closed, powers))
}
