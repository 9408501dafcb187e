//! Partial sums of the infinite series, each with a rigorous bracket on the
//! remainder.
//!
//! Exact partial sums avoid per-term rational reduction: terms are scaled
//! to a power of `L = lcm(1..=n+1)` (fixed per block of `n`), accumulated as
//! integers, and reduced once at the end.

use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::ser::{SerializeMap, Serializer};
use serde::Serialize;

use crate::beta::{
    alt_power_sum, bell_expansion, leibniz_expansion, transcribed_expansion, BetaWalk,
    HarmonicPolynomial,
};
use crate::harmonic::{binomial_row, zeta_even_coefficient};
use crate::identity::binomial_inverse;
use crate::rational::{serde_g17, serde_str};
use crate::scalar::{check_domain, CompensatedSum, Scalar};
use crate::{Error, Rational, Result};

/// Largest `N` summed exactly; larger `N` needs floating mode.
pub const EXACT_MAX_N: u64 = 10_000;

/// Exact limit for numerators with no harmonic factor (the `r = 1` lemma
/// series), whose walk is a single division per term.
pub const EXACT_MAX_N_CONSTANT: u64 = 100_000;

/// The double-sum target inverts a full sequence of length `N`, which is
/// quadratic in `N`.
pub const DOUBLE_SUM_MAX_N: u64 = 2_000;

/// Relative and absolute slack added to floating tail bounds so that
/// rounding in the bound itself cannot make it too small.
const BOUND_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Partial {
    Exact(#[serde(with = "serde_str")] Rational),
    Float(#[serde(with = "serde_g17")] f64),
}

impl Partial {
    pub fn to_f64(&self) -> f64 {
        match self {
            Partial::Exact(q) => q.approx_f64(),
            Partial::Float(v) => *v,
        }
    }
}

/// The value a series is claimed to converge to.
#[derive(Debug, Clone, PartialEq)]
pub enum ClaimedLimit {
    Rational(Rational),
    /// `coeff * pi^pi_power`.
    PiPower { coeff: Rational, pi_power: u32 },
    /// No closed form is claimed (odd zeta values, Hurwitz zeta at `x != 0`).
    Unknown,
}

impl ClaimedLimit {
    pub fn to_f64(&self) -> Option<f64> {
        match self {
            ClaimedLimit::Rational(q) => Some(q.approx_f64()),
            ClaimedLimit::PiPower { coeff, pi_power } => {
                Some(coeff.approx_f64() * std::f64::consts::PI.powi(*pi_power as i32))
            }
            ClaimedLimit::Unknown => None,
        }
    }
}

impl Serialize for ClaimedLimit {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ClaimedLimit::Rational(q) => s.collect_str(q),
            ClaimedLimit::PiPower { coeff, pi_power } => {
                let mut m = s.serialize_map(Some(2))?;
                m.serialize_entry("coeff", &coeff.to_string())?;
                m.serialize_entry("pi_power", pi_power)?;
                m.end()
            }
            ClaimedLimit::Unknown => s.serialize_none(),
        }
    }
}

/// A partial sum with `limit ∈ [partial + tail_low, partial + tail_high]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeriesEstimate {
    pub target_id: String,
    #[serde(rename = "N")]
    pub n_terms: u64,
    pub partial: Partial,
    pub exact: bool,
    #[serde(with = "serde_str")]
    pub tail_low: Rational,
    #[serde(with = "serde_str")]
    pub tail_high: Rational,
    pub claimed_limit: ClaimedLimit,
}

impl SeriesEstimate {
    pub fn width(&self) -> Rational {
        &self.tail_high - &self.tail_low
    }

    /// Whether the bracket contains the claimed limit; `None` when no limit
    /// is claimed. Rational limits against exact partials compare exactly;
    /// anything involving floats allows `1e-12` relative slack at the edges.
    pub fn contains_limit(&self) -> Option<bool> {
        if let (Partial::Exact(p), ClaimedLimit::Rational(l)) = (&self.partial, &self.claimed_limit) {
            return Some(&(p + &self.tail_low) <= l && l <= &(p + &self.tail_high));
        }
        let limit = self.claimed_limit.to_f64()?;
        let p = self.partial.to_f64();
        let tol = 1e-12 * limit.abs().max(1.0);
        let lo = p + self.tail_low.approx_f64();
        let hi = p + self.tail_high.approx_f64();
        Some(lo - tol <= limit && limit <= hi + tol)
    }
}

/// Order of a hand-expanded numerator to sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExpandedOrder {
    R3,
    R4,
    R5,
}

impl ExpandedOrder {
    pub fn order(&self) -> u32 {
        match self {
            ExpandedOrder::R3 => 3,
            ExpandedOrder::R4 => 4,
            ExpandedOrder::R5 => 5,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ExpandedOrder::R3 => "cor2.4-r3",
            ExpandedOrder::R4 => "cor2.4-r4",
            ExpandedOrder::R5 => "cor2.4-r5",
        }
    }
}

/// Every series the crate can bracket.
#[derive(Debug, Clone, PartialEq)]
pub enum SeriesTarget {
    /// `sum_{n>=0} (n+x+1)^(-s)`.
    Zeta { x: Rational, s: u32 },
    /// `sum_{n>=1} (1/n) sum_k C(n,k)(-1)^k/(k+1)^r`, claimed to be `r`.
    PowerSum { r: u32 },
    /// Harmonic-number numerators over `n(n+1)`, claimed to be `(r-1)!`
    /// times the corresponding `PowerSum` limit.
    ExpandedNumerator(ExpandedOrder),
    /// The binomial inverse of the Leibniz right-hand side, summed over `n`;
    /// claimed to be `zeta(x+1, r+2)`.
    DoubleSum { r: u32, x: Rational },
    /// The Leibniz combination summed with weight `1/n` at `x = 0`, claimed
    /// to be `(-1)^r (r+2)!`.
    LeibnizSeries { r: u32 },
}

impl SeriesTarget {
    pub fn name(&self) -> &'static str {
        match self {
            SeriesTarget::Zeta { .. } => "zeta",
            SeriesTarget::PowerSum { .. } => "lemma-c",
            SeriesTarget::ExpandedNumerator(v) => v.name(),
            SeriesTarget::DoubleSum { .. } => "eq31",
            SeriesTarget::LeibnizSeries { .. } => "eq32",
        }
    }
}

/// Sums `n_terms` terms of `target`. With `float = false` the sum is exact
/// and `n_terms` may not exceed [`EXACT_MAX_N`] ([`EXACT_MAX_N_CONSTANT`]
/// for the `r = 1` lemma series); with `float = true` larger `N` switch to compensated `f64` accumulation.
pub fn evaluate_series(target: &SeriesTarget, n_terms: u64, float: bool) -> Result<SeriesEstimate> {
    match target {
        SeriesTarget::Zeta { x, s } => hurwitz_estimate(x, *s, n_terms, float),
        SeriesTarget::PowerSum { r } => power_sum_series_mode(*r, n_terms, float),
        SeriesTarget::ExpandedNumerator(v) => expanded_numerator_mode(*v, n_terms, float),
        SeriesTarget::DoubleSum { r, x } => double_sum_partial(*r, x, n_terms),
        SeriesTarget::LeibnizSeries { r } => leibniz_series_partial_mode(*r, n_terms, float),
    }
}

fn use_exact(n_terms: u64, float: bool) -> Result<bool> {
    use_exact_upto(n_terms, float, EXACT_MAX_N)
}

fn use_exact_upto(n_terms: u64, float: bool, limit: u64) -> Result<bool> {
    if n_terms == 0 {
        return Err(Error::InvalidArgument("N must be at least 1".into()));
    }
    if n_terms <= limit {
        Ok(true)
    } else if float {
        Ok(false)
    } else {
        Err(Error::InvalidArgument(format!(
            "N = {n_terms} exceeds the exact limit {limit}; enable floating mode"
        )))
    }
}

fn int(v: u64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

fn factorial(r: u64) -> BigInt {
    (1..=r).fold(BigInt::one(), |acc, k| acc * k)
}

/// `lcm(1, 2, ..., m)` as the product of maximal prime powers `<= m`.
pub fn lcm_upto(m: u64) -> BigInt {
    let mut sieve = vec![true; m as usize + 1];
    let mut l = BigInt::one();
    for p in 2..=m {
        if !sieve[p as usize] {
            continue;
        }
        let mut k = p * p;
        while k <= m {
            sieve[k as usize] = false;
            k += p;
        }
        let mut pk = p;
        while pk <= m / p {
            pk *= p;
        }
        l *= pk;
    }
    l
}

// ---------------------------------------------------------------------------
// Hurwitz zeta

/// `sum_{n=0}^{N-1} (n+x+1)^(-s)` with the integral-comparison bracket
/// `1/((s-1)(N+x+1)^(s-1)) <= tail <= 1/((s-1)(N+x)^(s-1))`.
pub fn hurwitz_partial(x: &Rational, s: u32, n_terms: u64) -> Result<SeriesEstimate> {
    hurwitz_estimate(x, s, n_terms, false)
}

fn hurwitz_estimate(x: &Rational, s: u32, n_terms: u64, float: bool) -> Result<SeriesEstimate> {
    check_domain(x)?;
    if s <= 1 {
        return Err(Error::Divergent(s));
    }
    let exact = use_exact(n_terms, float)?;
    let partial = if exact {
        Partial::Exact(hurwitz_exact_sum(x, s, n_terms)?)
    } else {
        let xf = x.approx_f64();
        let mut sum = CompensatedSum::<f64>::new();
        for n in 0..n_terms {
            sum.add((n as f64 + xf + 1.0).powi(-(s as i32)));
        }
        Partial::Float(sum.value())
    };
    let (tail_low, tail_high) = hurwitz_tail(x, s, n_terms);
    Ok(SeriesEstimate {
        target_id: "zeta".into(),
        n_terms,
        partial,
        exact,
        tail_low,
        tail_high,
        claimed_limit: hurwitz_claim(x, s)?,
    })
}

fn hurwitz_tail(x: &Rational, s: u32, n_terms: u64) -> (Rational, Rational) {
    let k = int(s as u64 - 1);
    let edge = |base: Rational| (k.clone() * num_traits::pow(base, s as usize - 1)).recip();
    (edge(int(n_terms) + x + Rational::one()), edge(int(n_terms) + x))
}

fn hurwitz_claim(x: &Rational, s: u32) -> Result<ClaimedLimit> {
    Ok(if x.is_zero() && s % 2 == 0 {
        ClaimedLimit::PiPower {
            coeff: zeta_even_coefficient(s / 2)?,
            pi_power: s,
        }
    } else {
        ClaimedLimit::Unknown
    })
}

/// Writes `x = p/q` so that the `n`-th base is `m_n / q` with
/// `m_n = q(n+1) + p`, sums `(D/m_n)^s` over `D = lcm(m_n)`, and scales once.
fn hurwitz_exact_sum(x: &Rational, s: u32, n_terms: u64) -> Result<Rational> {
    let too_big = || Error::InvalidArgument(format!("x = {x} is too large for exact summation"));
    let p = x.numer().to_i128().ok_or_else(too_big)?;
    let q = x.denom().to_i128().ok_or_else(too_big)?;
    let bases: Vec<u64> = (0..n_terms)
        .map(|n| {
            q.checked_mul(n as i128 + 1)
                .and_then(|v| v.checked_add(p))
                .and_then(|v| u64::try_from(v).ok())
                .ok_or_else(too_big)
        })
        .collect::<Result<_>>()?;
    let mut d = BigInt::one();
    for &m in &bases {
        let rem = (&d % m).to_u64().expect("remainder below a u64 modulus");
        d *= m / m.gcd(&rem);
    }
    let mut acc = BigInt::zero();
    for &m in &bases {
        acc += num_traits::pow(&d / m, s as usize);
    }
    let scale = num_traits::pow(BigInt::from(q), s as usize);
    Ok(Rational::new(acc * scale, num_traits::pow(d, s as usize)))
}

// ---------------------------------------------------------------------------
// Harmonic-polynomial series: sum_{n>=1} P(H_{n+1}, H_{n+1}^(2), ...) / (n(n+1))

/// Sum of `P(H_{n+1}^(1..))/(n(n+1))` for `n = 1..=N` together with an upper
/// bound on the remainder. `P` must be homogeneous with non-negative
/// coefficients.
struct HarmonicSeries {
    partial: Partial,
    tail: f64,
}

fn harmonic_series(
    target: &str,
    poly: &HarmonicPolynomial,
    reference: Option<&HarmonicPolynomial>,
    n_terms: u64,
    exact: bool,
) -> Result<HarmonicSeries> {
    debug_assert!(poly.has_nonnegative_coefficients());
    if let Some(reference) = reference {
        check_against_reference(target, poly, reference, n_terms)?;
    }
    let (float_sum, tail) = float_walk(poly, n_terms);
    let partial = if exact {
        Partial::Exact(cached_exact_walk(poly, n_terms)?)
    } else {
        Partial::Float(float_sum)
    };
    Ok(HarmonicSeries { partial, tail })
}

/// Terms compared one by one against the reference. Past this prefix the
/// two polynomials are compared coefficient by coefficient, which settles
/// every remaining term at once.
const CHECKED_PREFIX: u64 = 200;

/// Fails with the first `n` at which the two numerators disagree.
fn check_against_reference(
    target: &str,
    poly: &HarmonicPolynomial,
    reference: &HarmonicPolynomial,
    n_terms: u64,
) -> Result<()> {
    let check = Some((target, reference));
    exact_walk(poly, n_terms.min(CHECKED_PREFIX), check)?;
    if poly != reference && n_terms > CHECKED_PREFIX {
        exact_walk(poly, n_terms, check)?;
    }
    Ok(())
}

/// Exact walks already computed in this process, keyed by numerator and
/// `N`. Several targets share a numerator (the Leibniz combination of order
/// `r` is the Bell polynomial of order `r + 1`), so each sum is built once.
fn cached_exact_walk(poly: &HarmonicPolynomial, n_terms: u64) -> Result<Rational> {
    type Cache = Mutex<Vec<(HarmonicPolynomial, u64, Rational)>>;
    static CACHE: OnceLock<Cache> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    let hit = cache
        .lock()
        .expect("walk cache poisoned")
        .iter()
        .find(|(p, n, _)| p == poly && *n == n_terms)
        .map(|(_, _, v)| v.clone());
    if let Some(v) = hit {
        return Ok(v);
    }
    let v = exact_walk(poly, n_terms, None)?;
    cache
        .lock()
        .expect("walk cache poisoned")
        .push((poly.clone(), n_terms, v.clone()));
    Ok(v)
}

/// Terms per block of the exact walk. Each block works at the scale
/// `lcm(1..=end+1)` of its last term, so early terms use short integers.
const BLOCK: u64 = 500;

fn exact_walk(
    poly: &HarmonicPolynomial,
    n_terms: u64,
    check: Option<(&str, &HarmonicPolynomial)>,
) -> Result<Rational> {
    let w = poly
        .homogeneous_weight()
        .expect("series numerators are homogeneous") as usize;
    let k = poly.max_generator().max(check.map_or(0, |(_, r)| r.max_generator()));
    let l_final = lcm_upto(n_terms + 1);
    // a[i] = L^(i+1) H_{n+1}^(i+1), an integer because every j <= n+1 divides L.
    let mut scale = BigInt::one();
    let mut a: Vec<BigInt> = vec![BigInt::one(); k];
    let mut total = BigInt::zero();
    let mut start = 1;
    while start <= n_terms {
        let end = (start + BLOCK - 1).min(n_terms);
        let l = lcm_upto(end + 1);
        let ratio = &l / &scale;
        let mut rp = ratio.clone();
        for slot in a.iter_mut() {
            *slot *= &rp;
            rp *= &ratio;
        }
        scale = l;
        let mut acc = BigInt::zero();
        for n in start..=end {
            let d = &scale / (n + 1);
            let mut pw = d.clone();
            for slot in a.iter_mut() {
                *slot += &pw;
                pw *= &d;
            }
            let v = poly.evaluate(&a);
            if let Some((target, reference)) = check {
                if reference.evaluate(&a) != v {
                    return Err(Error::TermMismatch {
                        target: target.to_string(),
                        n,
                    });
                }
            }
            acc += v * (&scale / (n * (n + 1)));
        }
        total += acc * num_traits::pow(&l_final / &scale, w + 1);
        start = end + 1;
    }
    Ok(Rational::new(total, num_traits::pow(l_final, w + 1)))
}

/// Floating pass over `n = 1..=N`. Returns the sum and a rigorous bound on
/// the remainder after `N` terms.
///
/// For `n > N` and `M = N + 1`: `H_{n+1} <= H_M + ln((n+1)/M)` and
/// `H_{n+1}^(a) <= H_M^(a) + 1/((a-1) M^(a-1))` for `a >= 2`, so each term is
/// at most `Q(ln((n+1)/M))/(n(n+1))` with `Q(u) = sum_j q_j u^j`, `q_j >= 0`.
/// Comparing with `int_M^inf ln(t/M)^j / t^2 dt = j!/M` (the summand is
/// unimodal, so the sum exceeds the integral by at most its maximum
/// `(j/2e)^j / M^2`) gives
/// `tail <= (M+1)/M * sum_j q_j (j!/M + 2 (j/2e)^j / M^2)`.
///
/// The bound at `N` is the smallest of `B(n') - (S_N - S_{n'})` over all
/// `n' <= N`, which makes it non-increasing in `N`.
fn float_walk(poly: &HarmonicPolynomial, n_terms: u64) -> (f64, f64) {
    let k = poly.max_generator();
    let monomials: Vec<(f64, Vec<u32>)> = poly
        .terms()
        .map(|(m, c)| (c.to_f64().expect("finite coefficient"), m.exponents().to_vec()))
        .collect();
    let mut h: Vec<CompensatedSum<f64>> = (0..k)
        .map(|_| {
            let mut s = CompensatedSum::new();
            s.add(1.0);
            s
        })
        .collect();
    let mut hv = vec![1.0; k];
    let mut sum = CompensatedSum::<f64>::new();
    let mut best = f64::INFINITY;
    for n in 1..=n_terms {
        let j = (n + 1) as f64;
        let mut pw = 1.0 / j;
        for (slot, v) in h.iter_mut().zip(hv.iter_mut()) {
            slot.add(pw);
            *v = slot.value();
            pw /= j;
        }
        sum.add(poly.evaluate(&hv) / (n as f64 * j));
        let s = sum.value();
        best = best.min(remainder_bound(&monomials, &hv, n) + s);
    }
    let s = sum.value();
    let tail = (best - s) * (1.0 + BOUND_SLACK) + BOUND_SLACK * (1.0 + s.abs());
    (s, tail)
}

fn remainder_bound(monomials: &[(f64, Vec<u32>)], h: &[f64], n: u64) -> f64 {
    let m = (n + 1) as f64;
    let a = h.first().copied().unwrap_or(0.0);
    let caps: Vec<f64> = h
        .iter()
        .enumerate()
        .map(|(i, v)| if i == 0 { *v } else { v + 1.0 / (i as f64 * m.powi(i as i32)) })
        .collect();
    let top = monomials.iter().map(|(_, e)| e.first().copied().unwrap_or(0)).max().unwrap_or(0) as usize;
    let mut q = vec![0.0; top + 1];
    for (c, exps) in monomials {
        let mut base = *c;
        for (i, &e) in exps.iter().enumerate().skip(1) {
            base *= caps[i].powi(e as i32);
        }
        let e1 = exps.first().copied().unwrap_or(0) as usize;
        let mut binom = 1.0;
        for (j, slot) in q.iter_mut().enumerate().take(e1 + 1) {
            *slot += base * binom * a.powi((e1 - j) as i32);
            binom = binom * (e1 - j) as f64 / (j + 1) as f64;
        }
    }
    let mut fact = 1.0;
    let mut total = 0.0;
    for (j, qj) in q.iter().enumerate() {
        if j > 0 {
            fact *= j as f64;
        }
        let peak = if j == 0 { 1.0 } else { (j as f64 / (2.0 * std::f64::consts::E)).powi(j as i32) };
        total += qj * (fact / m + 2.0 * peak / (m * m));
    }
    total * (m + 1.0) / m
}

/// Assembles an estimate from an unscaled positive-term series and a scale
/// factor. A negative scale flips the bracket below the partial sum.
fn scaled_estimate(
    target: &str,
    n_terms: u64,
    series: HarmonicSeries,
    scale: &Rational,
    claimed: Rational,
) -> SeriesEstimate {
    let exact = matches!(series.partial, Partial::Exact(_));
    let partial = match series.partial {
        Partial::Exact(p) => Partial::Exact(p * scale),
        Partial::Float(v) => Partial::Float(v * scale.approx_f64()),
    };
    let bound = Rational::from_float(series.tail).expect("finite tail bound") * scale.abs();
    let (tail_low, tail_high) = if scale.is_negative() {
        (-bound, Rational::zero())
    } else {
        (Rational::zero(), bound)
    };
    SeriesEstimate {
        target_id: target.to_string(),
        n_terms,
        partial,
        exact,
        tail_low,
        tail_high,
        claimed_limit: ClaimedLimit::Rational(claimed),
    }
}

/// `sum_{n=1}^{N} (1/n) sum_k C(n,k)(-1)^k/(k+1)^r`, evaluated through
/// `term_n = G_{r-1}(H_{n+1}, ...)/((r-1)! n(n+1))`; the claimed limit is `r`.
pub fn power_sum_series_partial(r: u32, n_terms: u64) -> Result<SeriesEstimate> {
    power_sum_series_mode(r, n_terms, false)
}

fn power_sum_series_mode(r: u32, n_terms: u64, float: bool) -> Result<SeriesEstimate> {
    if r == 0 {
        return Err(Error::InvalidArgument("r must be at least 1".into()));
    }
    let limit = if r == 1 { EXACT_MAX_N_CONSTANT } else { EXACT_MAX_N };
    let exact = use_exact_upto(n_terms, float, limit)?;
    let g = bell_expansion(r as usize - 1);
    let series = harmonic_series("lemma-c", g.polynomial(), None, n_terms, exact)?;
    let scale = Rational::from_integer(factorial(r as u64 - 1)).recip();
    Ok(scaled_estimate("lemma-c", n_terms, series, &scale, int(r as u64)))
}

/// Exact partial sum of the hand-expanded numerator over `n(n+1)`. Each term
/// is checked against the `power_sum_series_partial` term times `(r-1)!`; a mismatch
/// is an error.
pub fn expanded_numerator_partial(variant: ExpandedOrder, n_terms: u64) -> Result<SeriesEstimate> {
    expanded_numerator_mode(variant, n_terms, false)
}

fn expanded_numerator_mode(variant: ExpandedOrder, n_terms: u64, float: bool) -> Result<SeriesEstimate> {
    let exact = use_exact(n_terms, float)?;
    let r = variant.order();
    let numerator = transcribed_expansion(r as usize - 1).expect("orders up to 4 are transcribed");
    let g = bell_expansion(r as usize - 1);
    let series = harmonic_series(variant.name(), &numerator, Some(g.polynomial()), n_terms, exact)?;
    let claimed = Rational::from_integer(factorial(r as u64));
    Ok(scaled_estimate(variant.name(), n_terms, series, &Rational::one(), claimed))
}

/// `sum_l C(r,l) l! (-1)^l sum_{n=1}^{N} (1/n) H_{n+1}^(l+1) F_n^(r-l)(0)`,
/// claimed to be `(-1)^r (r+2)!`.
///
/// With `F_n^(j)(0) = (-1)^j G_j(H_{n+1}, ...)/(n+1)` each term is
/// `(-1)^r L_r(H_{n+1}, ...)/(n(n+1))` where `L_r` is the Leibniz
/// combination of lower Bell polynomials; `L_r` is cross-checked against
/// `G_{r+1}` term by term.
pub fn leibniz_series_partial(r: u32, n_terms: u64) -> Result<SeriesEstimate> {
    leibniz_series_partial_mode(r, n_terms, false)
}

fn leibniz_series_partial_mode(r: u32, n_terms: u64, float: bool) -> Result<SeriesEstimate> {
    let exact = use_exact(n_terms, float)?;
    let combo = leibniz_expansion(r as usize);
    let g = bell_expansion(r as usize + 1);
    let series = harmonic_series("eq32", &combo, Some(g.polynomial()), n_terms, exact)?;
    let sign = if r % 2 == 0 { Rational::one() } else { -Rational::one() };
    let claimed = &sign * Rational::from_integer(factorial(r as u64 + 2));
    Ok(scaled_estimate("eq32", n_terms, series, &sign, claimed))
}

/// Outer partial sum (`n < N`) of the binomial inverse of the Leibniz
/// right-hand side, with every derivative taken exactly. Each inverted
/// term must equal `1/(n+x+1)^(r+2)`; the bracket is then the Hurwitz one.
pub fn double_sum_partial(r: u32, x: &Rational, n_terms: u64) -> Result<SeriesEstimate> {
    check_domain(x)?;
    use_exact(n_terms, false)?;
    if n_terms > DOUBLE_SUM_MAX_N {
        return Err(Error::InvalidArgument(format!(
            "N = {n_terms} exceeds {DOUBLE_SUM_MAX_N} for the double sum"
        )));
    }
    let forward = leibniz_sequence(r, x, n_terms)?;
    let inverted = binomial_inverse(&forward);
    let mut partial = Rational::zero();
    for (n, b) in inverted.iter().enumerate() {
        let expected = num_traits::pow(x + int(n as u64 + 1), r as usize + 2).recip();
        if *b != expected {
            return Err(Error::TermMismatch {
                target: "eq31".into(),
                n: n as u64,
            });
        }
        partial += b;
    }
    let mut est = hurwitz_estimate(x, r + 2, n_terms, false)?;
    debug_assert_eq!(est.partial, Partial::Exact(partial.clone()));
    est.target_id = "eq31".into();
    est.partial = Partial::Exact(partial);
    Ok(est)
}

/// `(-1)^r/(r+1)! sum_l C(r,l) l! (-1)^l H_k(x,l+1) F_k^(r-l)(x)` for
/// `k = 0..N-1`.
fn leibniz_sequence(r: u32, x: &Rational, n_terms: u64) -> Result<Vec<Rational>> {
    let row = binomial_row(r as u64);
    let norm = Rational::from_integer(factorial(r as u64 + 1));
    let sign = if r % 2 == 0 { Rational::one() } else { -Rational::one() };
    let mut walk = BetaWalk::new(x.clone(), r as usize + 1)?;
    let mut out = Vec::with_capacity(n_terms as usize);
    for _ in 0..n_terms {
        let mut acc = Rational::zero();
        for (l, c) in row.iter().enumerate() {
            let t = Rational::from_integer(c * factorial(l as u64))
                * walk.harmonics().get(l + 1)
                * walk.derivative(r as usize - l);
            if l % 2 == 0 {
                acc += t;
            } else {
                acc -= t;
            }
        }
        out.push(&sign * acc / &norm);
        walk.advance();
    }
    Ok(out)
}

/// `int_{[0,1]^r} (1 - x_1 ... x_r)^n dx = sum_k C(n,k)(-1)^k/(k+1)^r`.
pub fn multi_integral_exact(n: u64, r: u32) -> Result<Rational> {
    if r == 0 {
        return Err(Error::InvalidArgument("r must be at least 1".into()));
    }
    alt_power_sum(n, &Rational::zero(), r)
}
