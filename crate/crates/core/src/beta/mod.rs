//! The beta family `F_n(x) = B(x+1, n+1) = int_0^1 (1-t)^n t^x dt` and its
//! derivatives in `x`.

mod bell;

pub use bell::{
    bell_expansion, leibniz_expansion, transcribed_expansion, BellExpansion, HarmonicPolynomial,
    Monomial,
};

use crate::harmonic::{binomial_row, HarmonicVector};
use crate::scalar::{check_domain, Scalar};
use crate::Result;

/// A value of the beta family together with its arguments.
#[derive(Debug, Clone, PartialEq)]
pub struct BetaValue<T> {
    pub n: u64,
    pub x: T,
    pub value: T,
}

/// `F_n(x) = n! / ((x+1)(x+2)...(x+n+1))`.
pub fn beta_integral<T: Scalar>(n: u64, x: &T) -> Result<T> {
    check_domain(x)?;
    let mut num = T::one();
    let mut den = x.clone() + T::one();
    for k in 1..=n {
        num = num * T::from_int(k);
        den = den * (x.clone() + T::from_int(k + 1));
    }
    Ok(num / den)
}

pub fn beta_value<T: Scalar>(n: u64, x: &T) -> Result<BetaValue<T>> {
    Ok(BetaValue {
        n,
        x: x.clone(),
        value: beta_integral(n, x)?,
    })
}

/// `sum_k C(n,k) (-1)^k / (x+k+1)`, the termwise-integrated binomial
/// expansion of `F_n(x)`.
pub fn beta_integral_sum<T: Scalar>(n: u64, x: &T) -> Result<T> {
    alt_power_sum(n, x, 1)
}

/// `sum_{k=0}^{n} C(n,k) (-1)^k (x+k+1)^(-r)`.
pub fn alt_power_sum<T: Scalar>(n: u64, x: &T, r: u32) -> Result<T> {
    check_domain(x)?;
    let row = binomial_row(n);
    let mut acc = T::zero();
    for (k, c) in row.iter().enumerate() {
        let base = x.clone() + T::from_int(k as u64 + 1);
        let term = T::from_bigint(c) / num_traits::pow(base, r as usize);
        acc = if k % 2 == 0 { acc + term } else { acc - term };
    }
    Ok(acc)
}

/// `F_n^(r)(x) = int_0^1 (1-t)^n (log t)^r t^x dt`, evaluated as
/// `(-1)^r G_r(H_n(x,1), ..., H_n(x,r)) F_n(x)`.
pub fn beta_derivative<T: Scalar>(n: u64, x: &T, r: usize) -> Result<T> {
    let h = HarmonicVector::new(n, x.clone(), r)?;
    let f = beta_integral(n, x)?;
    Ok(derivative_from_parts(&h, &f, r))
}

/// `(-1)^r G_r(h) f` for an already computed harmonic vector of order `>= r`.
pub fn derivative_from_parts<T: Scalar>(h: &HarmonicVector<T>, f: &T, r: usize) -> T {
    let g = bell_expansion(r).evaluate(h.values());
    let v = g * f.clone();
    if r % 2 == 0 {
        v
    } else {
        -v
    }
}

/// Walks `n = 0, 1, 2, ...` for a fixed `x`, keeping the harmonic vector and
/// `F_n(x)` up to date in `O(order)` work per step.
#[derive(Debug, Clone)]
pub struct BetaWalk<T> {
    harmonics: HarmonicVector<T>,
    value: T,
}

impl<T: Scalar> BetaWalk<T> {
    pub fn new(x: T, order: usize) -> Result<Self> {
        let value = beta_integral(0, &x)?;
        Ok(Self {
            harmonics: HarmonicVector::new(0, x, order)?,
            value,
        })
    }

    pub fn n(&self) -> u64 {
        self.harmonics.n()
    }

    pub fn harmonics(&self) -> &HarmonicVector<T> {
        &self.harmonics
    }

    /// `F_n(x)` at the current `n`.
    pub fn value(&self) -> &T {
        &self.value
    }

    /// `F_n^(r)(x)` at the current `n`; `r` must not exceed the walk's order.
    pub fn derivative(&self, r: usize) -> T {
        derivative_from_parts(&self.harmonics, &self.value, r)
    }

    /// `F_{n+1} = F_n (n+1) / (x+n+2)`.
    pub fn advance(&mut self) {
        let next = self.harmonics.n() + 1;
        let factor = T::from_int(next) / (self.harmonics.x().clone() + T::from_int(next + 1));
        self.value = self.value.clone() * factor;
        self.harmonics.advance();
    }
}
