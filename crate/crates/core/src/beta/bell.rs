//! Polynomials in the formal harmonic generators `h_1, h_2, ...` and the
//! expansion `G_r` with `F^(r) = (-1)^r G_r(H(x,1), ..., H(x,r)) F`.
//!
//! `G_r` is generated by `G_0 = 1`,
//! `G_{r+1} = h_1 G_r + sum_a a h_{a+1} dG_r/dh_a`, which is the product rule
//! applied to `F' = -H(x,1) F` together with `d/dx H(x,a) = -a H(x,a+1)`.
//! It coincides with the complete Bell polynomial
//! `B_r(0! h_1, 1! h_2, ..., (r-1)! h_r)`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::harmonic::binomial_row;
use crate::scalar::Ring;

/// Exponent vector `(e_1, ..., e_k)` of `h_1^e_1 ... h_k^e_k`, stored without
/// trailing zeros so equal monomials compare equal.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(mut exps: Vec<u32>) -> Self {
        while exps.last() == Some(&0) {
            exps.pop();
        }
        Self(exps)
    }

    pub fn one() -> Self {
        Self(Vec::new())
    }

    /// The single generator `h_alpha`.
    pub fn generator(alpha: usize) -> Self {
        let mut e = vec![0; alpha];
        e[alpha - 1] = 1;
        Self(e)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    /// Exponent of `h_alpha` (1-based).
    pub fn exponent(&self, alpha: usize) -> u32 {
        self.0.get(alpha - 1).copied().unwrap_or(0)
    }

    /// `sum_a a * e_a`.
    pub fn weight(&self) -> u64 {
        self.0
            .iter()
            .enumerate()
            .map(|(i, &e)| (i as u64 + 1) * e as u64)
            .sum()
    }

    pub fn degree(&self) -> u64 {
        self.0.iter().map(|&e| e as u64).sum()
    }

    fn with_exponent_shift(&self, alpha: usize, delta: i64) -> Self {
        let mut e = self.0.clone();
        if e.len() < alpha {
            e.resize(alpha, 0);
        }
        e[alpha - 1] = (e[alpha - 1] as i64 + delta) as u32;
        Self::new(e)
    }
}

/// Graded-lex order: lower weight first, then fewer factors, then larger
/// exponents on lower-indexed generators first. For `G_3` this yields
/// `h3, h1*h2, h1^3`.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.weight()
            .cmp(&other.weight())
            .then(self.degree().cmp(&other.degree()))
            .then_with(|| {
                let len = self.0.len().max(other.0.len());
                for i in 0..len {
                    let a = self.0.get(i).copied().unwrap_or(0);
                    let b = other.0.get(i).copied().unwrap_or(0);
                    match b.cmp(&a) {
                        Ordering::Equal => continue,
                        ord => return ord,
                    }
                }
                Ordering::Equal
            })
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, &e) in self.0.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if !first {
                f.write_str("*")?;
            }
            first = false;
            write!(f, "h{}", i + 1)?;
            if e > 1 {
                write!(f, "^{e}")?;
            }
        }
        if first {
            f.write_str("1")?;
        }
        Ok(())
    }
}

/// Integer-coefficient polynomial in `h_1, h_2, ...` with deterministic
/// (graded-lex) term order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct HarmonicPolynomial {
    terms: BTreeMap<Monomial, BigInt>,
}

impl HarmonicPolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        let mut p = Self::zero();
        p.add_term(Monomial::one(), BigInt::one());
        p
    }

    /// Builds a polynomial from `(coefficient, exponent vector)` pairs.
    pub fn from_terms(terms: &[(i64, &[u32])]) -> Self {
        let mut p = Self::zero();
        for (c, e) in terms {
            p.add_term(Monomial::new(e.to_vec()), BigInt::from(*c));
        }
        p
    }

    pub fn add_term(&mut self, m: Monomial, c: BigInt) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(m).or_insert_with(BigInt::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigInt)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, m: &Monomial) -> BigInt {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    /// Largest generator index appearing with a nonzero exponent.
    pub fn max_generator(&self) -> usize {
        self.terms.keys().map(|m| m.0.len()).max().unwrap_or(0)
    }

    /// Sum of all coefficients, i.e. the value at `h_a = 1`.
    pub fn coefficient_sum(&self) -> BigInt {
        self.terms.values().sum()
    }

    /// `Some(w)` when every monomial has weight `w`.
    pub fn homogeneous_weight(&self) -> Option<u64> {
        let mut weights = self.terms.keys().map(Monomial::weight);
        let w = weights.next().unwrap_or(0);
        weights.all(|v| v == w).then_some(w)
    }

    pub fn has_nonnegative_coefficients(&self) -> bool {
        self.terms.values().all(|c| !c.is_negative())
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        let mut p = Self::zero();
        for (m, v) in &self.terms {
            p.add_term(m.clone(), v * c);
        }
        p
    }

    pub fn plus(&self, other: &Self) -> Self {
        let mut p = self.clone();
        for (m, v) in &other.terms {
            p.add_term(m.clone(), v.clone());
        }
        p
    }

    /// Product with the generator `h_alpha`.
    pub fn times_generator(&self, alpha: usize) -> Self {
        let mut p = Self::zero();
        for (m, v) in &self.terms {
            p.add_term(m.with_exponent_shift(alpha, 1), v.clone());
        }
        p
    }

    /// Partial derivative with respect to `h_alpha`.
    pub fn partial(&self, alpha: usize) -> Self {
        let mut p = Self::zero();
        for (m, v) in &self.terms {
            let e = m.exponent(alpha);
            if e > 0 {
                p.add_term(m.with_exponent_shift(alpha, -1), v * BigInt::from(e));
            }
        }
        p
    }

    /// Evaluates at `h_a = h[a - 1]`. Powers of each generator are built once
    /// and shared across monomials.
    pub fn evaluate<T: Ring>(&self, h: &[T]) -> T {
        let k = self.max_generator();
        assert!(
            h.len() >= k,
            "polynomial uses h{k} but only {} values supplied",
            h.len()
        );
        let mut powers: Vec<Vec<T>> = Vec::with_capacity(k);
        for (i, hv) in h.iter().take(k).enumerate() {
            let top = self.terms.keys().map(|m| m.exponent(i + 1)).max().unwrap_or(0);
            let mut col = Vec::with_capacity(top as usize + 1);
            col.push(T::one());
            for e in 1..=top as usize {
                let next = col[e - 1].clone() * hv.clone();
                col.push(next);
            }
            powers.push(col);
        }
        let mut acc = T::zero();
        for (m, c) in &self.terms {
            let mut term = T::from_bigint(c);
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    term = term * powers[i][e as usize].clone();
                }
            }
            acc = acc + term;
        }
        acc
    }
}

impl fmt::Display for HarmonicPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let mag = c.abs();
            match (i, c.is_negative()) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            if m.0.is_empty() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{mag}*{m}")?;
            }
        }
        Ok(())
    }
}

/// `G_r`: the weight-`r` polynomial expressing the `r`-th derivative of the
/// beta family through harmonic functions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BellExpansion {
    order: usize,
    poly: HarmonicPolynomial,
}

impl BellExpansion {
    fn base() -> Self {
        Self {
            order: 0,
            poly: HarmonicPolynomial::one(),
        }
    }

    /// One step of the recursion, `G_r -> G_{r+1}`.
    fn next(&self) -> Self {
        let mut poly = self.poly.times_generator(1);
        for alpha in 1..=self.order {
            let d = self.poly.partial(alpha);
            if d.is_zero() {
                continue;
            }
            poly = poly.plus(&d.times_generator(alpha + 1).scale(&BigInt::from(alpha)));
        }
        Self {
            order: self.order + 1,
            poly,
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn polynomial(&self) -> &HarmonicPolynomial {
        &self.poly
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigInt)> {
        self.poly.terms()
    }

    pub fn coefficient(&self, exps: &[u32]) -> BigInt {
        self.poly.coefficient(&Monomial::new(exps.to_vec()))
    }

    /// Evaluates at `h = (H(x,1), ..., H(x,r))`; `h` must hold at least
    /// `order` values.
    pub fn evaluate<T: Ring>(&self, h: &[T]) -> T {
        self.poly.evaluate(h)
    }
}

impl fmt::Display for BellExpansion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.poly.fmt(f)
    }
}

static CACHE: OnceLock<RwLock<Vec<Arc<BellExpansion>>>> = OnceLock::new();

/// `G_r`, computed once per order and shared afterwards.
///
/// The cache only ever grows by appending the next order, so concurrent
/// callers either see a complete prefix or extend it themselves.
pub fn bell_expansion(r: usize) -> Arc<BellExpansion> {
    let cache = CACHE.get_or_init(|| RwLock::new(vec![Arc::new(BellExpansion::base())]));
    if let Some(g) = cache.read().expect("bell cache poisoned").get(r) {
        return g.clone();
    }
    let mut table = cache.write().expect("bell cache poisoned");
    while table.len() <= r {
        let next = table.last().expect("base order present").next();
        table.push(Arc::new(next));
    }
    table[r].clone()
}

/// `sum_l C(r,l) l! h_{l+1} G_{r-l}`: the general Leibniz expansion of
/// the `r`-th derivative of `H(x,1) F`, normalized by `(-1)^r / F`.
pub fn leibniz_expansion(r: usize) -> HarmonicPolynomial {
    let row = binomial_row(r as u64);
    let mut fact = BigInt::one();
    let mut acc = HarmonicPolynomial::zero();
    for (l, c) in row.iter().enumerate() {
        if l > 0 {
            fact *= l;
        }
        let g = bell_expansion(r - l);
        acc = acc.plus(&g.polynomial().times_generator(l + 1).scale(&(c * &fact)));
    }
    acc
}

/// The expansions for orders 0 through 4 exactly as expanded by hand,
/// kept independent of the recursion so the two can be compared.
pub fn transcribed_expansion(order: usize) -> Option<HarmonicPolynomial> {
    let p = match order {
        0 => HarmonicPolynomial::one(),
        1 => HarmonicPolynomial::from_terms(&[(1, &[1])]),
        // H(x,2) + H(x,1)^2
        2 => HarmonicPolynomial::from_terms(&[(1, &[0, 1]), (1, &[2])]),
        // 2H(x,3) + 3H(x,1)H(x,2) + H(x,1)^3
        3 => HarmonicPolynomial::from_terms(&[(2, &[0, 0, 1]), (3, &[1, 1]), (1, &[3])]),
        // 6H(x,4) + 8H(x,3)H(x,1) + 3H(x,2)^2 + 6H(x,1)^2 H(x,2) + H(x,1)^4
        4 => HarmonicPolynomial::from_terms(&[
            (6, &[0, 0, 0, 1]),
            (8, &[1, 0, 1]),
            (3, &[0, 2]),
            (6, &[2, 1]),
            (1, &[4]),
        ]),
        _ => return None,
    };
    Some(p)
}
