//! Scalar abstraction shared by the exact and floating-point code paths.
//!
//! Every formula in the crate is written once against [`Scalar`]; the exact
//! instantiation uses [`BigRational`](num_rational::BigRational), the
//! floating one `f64` (or `f32`).

use std::fmt::{Debug, Display};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Num, One, Signed, ToPrimitive};

/// A commutative ring that integer coefficients can be embedded into.
///
/// `BigInt` is a `Ring` but not a [`Scalar`]; polynomial evaluation only
/// needs the ring operations, which lets the exact series accumulate over
/// integers.
pub trait Ring: Clone + Debug + Num + Send + Sync + 'static {
    fn from_bigint(v: &BigInt) -> Self;

    fn from_int(v: u64) -> Self {
        Self::from_bigint(&BigInt::from(v))
    }
}

/// A field with an ordering, used for every harmonic and beta quantity.
pub trait Scalar: Ring + Signed + PartialOrd + Display {
    /// `true` when arithmetic is exact and equality is meaningful.
    const EXACT: bool;

    fn from_rational(v: &BigRational) -> Self;

    fn approx_f64(&self) -> f64;

    /// `b_n = sum_k C(n,k) (-1)^k a_k` for every prefix of `seq`.
    fn binomial_transform(seq: &[Self]) -> Vec<Self> {
        difference_table(seq)
    }
}

/// Forward differences `(I - E)^n a` read off at index 0.
///
/// Uses only subtractions, `O(len^2)` of them.
pub fn difference_table<T: Clone + Num>(seq: &[T]) -> Vec<T> {
    let mut row = seq.to_vec();
    let mut out = Vec::with_capacity(seq.len());
    for j in 0..seq.len() {
        out.push(row[0].clone());
        for k in 0..seq.len() - j - 1 {
            row[k] = row[k].clone() - row[k + 1].clone();
        }
    }
    out
}

impl Ring for BigInt {
    fn from_bigint(v: &BigInt) -> Self {
        v.clone()
    }
}

impl Ring for BigRational {
    fn from_bigint(v: &BigInt) -> Self {
        BigRational::from_integer(v.clone())
    }
}

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn from_rational(v: &BigRational) -> Self {
        v.clone()
    }

    fn approx_f64(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Lifts the sequence to a common denominator so the difference table
    /// runs over integers; no gcd is taken until the final division.
    fn binomial_transform(seq: &[Self]) -> Vec<Self> {
        let denom = seq
            .iter()
            .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
        let lifted: Vec<BigInt> = seq
            .iter()
            .map(|v| v.numer() * (&denom / v.denom()))
            .collect();
        difference_table(&lifted)
            .into_iter()
            .map(|v| BigRational::new(v, denom.clone()))
            .collect()
    }
}

macro_rules! float_scalar {
    ($t:ty) => {
        impl Ring for $t {
            fn from_bigint(v: &BigInt) -> Self {
                v.to_f64().unwrap_or(f64::INFINITY) as $t
            }

            fn from_int(v: u64) -> Self {
                v as $t
            }
        }

        impl Scalar for $t {
            const EXACT: bool = false;

            fn from_rational(v: &BigRational) -> Self {
                v.to_f64().unwrap_or(f64::NAN) as $t
            }

            fn approx_f64(&self) -> f64 {
                *self as f64
            }
        }
    };
}

float_scalar!(f64);
float_scalar!(f32);

/// `true` when `x > -1`, the domain on which every base `k + x + 1` is positive.
pub fn in_domain<T: Scalar>(x: &T) -> bool {
    *x > -T::one()
}

pub(crate) fn check_domain<T: Scalar>(x: &T) -> crate::Result<()> {
    if in_domain(x) {
        Ok(())
    } else {
        Err(crate::Error::OutOfDomain(x.to_string()))
    }
}

/// Neumaier-compensated running sum. Exact scalars pass straight through
/// since the compensation term is always zero for them.
#[derive(Debug, Clone)]
pub struct CompensatedSum<T> {
    sum: T,
    carry: T,
}

impl<T: Scalar> Default for CompensatedSum<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T: Scalar> CompensatedSum<T> {
    pub fn new() -> Self {
        Self {
            sum: T::zero(),
            carry: T::zero(),
        }
    }

    pub fn add(&mut self, v: T) {
        if T::EXACT {
            self.sum = self.sum.clone() + v;
            return;
        }
        let t = self.sum.clone() + v.clone();
        if self.sum.abs() >= v.abs() {
            self.carry = self.carry.clone() + ((self.sum.clone() - t.clone()) + v);
        } else {
            self.carry = self.carry.clone() + ((v - t.clone()) + self.sum.clone());
        }
        self.sum = t;
    }

    pub fn value(&self) -> T {
        self.sum.clone() + self.carry.clone()
    }
}
