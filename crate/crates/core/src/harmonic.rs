//! Harmonic numbers, generalized harmonic functions, binomials and the
//! Bernoulli / even-zeta rationals.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::scalar::{check_domain, Scalar};
use crate::{Error, Result};

/// `C(n, k)`, zero when `k` lies outside `0..=n`.
pub fn binomial(n: u64, k: i64) -> BigUint {
    if k < 0 || k as u64 > n {
        return BigUint::zero();
    }
    let k = (k as u64).min(n - k as u64);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// All of row `n` of Pascal's triangle.
pub fn binomial_row(n: u64) -> Vec<BigInt> {
    let mut row = Vec::with_capacity(n as usize + 1);
    let mut c = BigInt::one();
    row.push(c.clone());
    for k in 0..n {
        c = c * (n - k) / (k + 1);
        row.push(c.clone());
    }
    row
}

/// Falling-factorial binomial `y (y-1) ... (y-k+1) / k!` for any scalar `y`.
pub fn generalized_binomial<T: Scalar>(y: &T, k: u64) -> T {
    let mut num = T::one();
    let mut den = T::one();
    for i in 0..k {
        num = num * (y.clone() - T::from_int(i));
        den = den * T::from_int(i + 1);
    }
    num / den
}

/// `H_n^(alpha) = sum_{k=1}^{n} 1/k^alpha`; zero for `n = 0`.
pub fn harmonic_number<T: Scalar>(n: u64, alpha: u32) -> Result<T> {
    if alpha == 0 {
        return Err(Error::ZeroOrder);
    }
    let mut acc = T::zero();
    for k in 1..=n {
        acc = acc + T::one() / num_traits::pow(T::from_int(k), alpha as usize);
    }
    Ok(acc)
}

/// `H_n(x, alpha) = sum_{k=0}^{n} 1/(k + x + 1)^alpha` for `x > -1`.
pub fn harmonic_function<T: Scalar>(n: u64, x: &T, alpha: u32) -> Result<T> {
    if alpha == 0 {
        return Err(Error::ZeroOrder);
    }
    Ok(HarmonicVector::new(n, x.clone(), alpha as usize)?
        .get(alpha as usize)
        .clone())
}

/// The tuple `(H_n(x,1), ..., H_n(x,r))` for a fixed `n` and `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicVector<T> {
    n: u64,
    x: T,
    values: Vec<T>,
}

impl<T: Scalar> HarmonicVector<T> {
    /// Computes all `r` orders in one pass over `k = 0..=n`, sharing each
    /// reciprocal base `1/(k + x + 1)` across orders.
    pub fn new(n: u64, x: T, r: usize) -> Result<Self> {
        check_domain(&x)?;
        let mut v = Self {
            n: 0,
            values: vec![T::zero(); r],
            x,
        };
        v.add_term(0);
        for k in 1..=n {
            v.add_term(k);
        }
        v.n = n;
        Ok(v)
    }

    fn add_term(&mut self, k: u64) {
        let inv = T::one() / (T::from_int(k + 1) + self.x.clone());
        let mut p = inv.clone();
        for slot in self.values.iter_mut() {
            *slot = slot.clone() + p.clone();
            p = p * inv.clone();
        }
    }

    /// Moves from `n` to `n + 1` by adding the single term `1/(n+x+2)^alpha`.
    pub fn advance(&mut self) {
        self.n += 1;
        self.add_term(self.n);
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn x(&self) -> &T {
        &self.x
    }

    /// Highest order held.
    pub fn order(&self) -> usize {
        self.values.len()
    }

    /// `H_n(x, alpha)`, with `alpha` counted from 1.
    pub fn get(&self, alpha: usize) -> &T {
        &self.values[alpha - 1]
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }
}

/// Exact Bernoulli numbers `B_0 ..= B_N`, with `B_1 = -1/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct BernoulliTable {
    values: Vec<BigRational>,
}

impl BernoulliTable {
    /// Builds the table from `sum_{k=0}^{n} C(n+1, k) B_k = 0`.
    pub fn new(max: usize) -> Self {
        let mut values: Vec<BigRational> = Vec::with_capacity(max + 1);
        values.push(BigRational::one());
        for n in 1..=max {
            if n > 1 && n % 2 == 1 {
                values.push(BigRational::zero());
                continue;
            }
            let row = binomial_row(n as u64 + 1);
            let s = values
                .iter()
                .zip(&row)
                .fold(BigRational::zero(), |acc, (b, c)| {
                    acc + b * BigRational::from_integer(c.clone())
                });
            values.push(-s / BigRational::from_integer(BigInt::from(n + 1)));
        }
        Self { values }
    }

    pub fn get(&self, n: usize) -> &BigRational {
        &self.values[n]
    }

    pub fn values(&self) -> &[BigRational] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

pub fn bernoulli_table(max: usize) -> BernoulliTable {
    BernoulliTable::new(max)
}

/// The rational `c` with `zeta(2n) = c * pi^(2n)`.
pub fn zeta_even_coefficient(n: u32) -> Result<BigRational> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "even zeta coefficient needs n >= 1".into(),
        ));
    }
    let m = 2 * n as usize;
    let b = BernoulliTable::new(m).get(m).clone();
    let fact: BigInt = (1..=m as u64).map(BigInt::from).product();
    let pow2 = BigInt::one() << m;
    let c = b * BigRational::new(pow2, fact * 2);
    Ok(if n % 2 == 1 { c } else { -c })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Signed;
    use proptest::prelude::*;

    type Q = BigRational;

    fn q(n: i64, d: i64) -> Q {
        Q::new(n.into(), d.into())
    }

    #[test]
    fn binomial_examples() {
        assert_eq!(binomial(5, 2), BigUint::from(10u32));
        assert_eq!(binomial(7, 0), BigUint::from(1u32));
        assert_eq!(binomial(4, 6), BigUint::zero());
        assert_eq!(binomial(4, -1), BigUint::zero());
        assert_eq!(binomial(60, 30).to_string(), "118264581564861424");
    }

    #[test]
    fn binomial_row_matches_pointwise() {
        let row = binomial_row(23);
        for (k, c) in row.iter().enumerate() {
            assert_eq!(c.to_biguint().unwrap(), binomial(23, k as i64));
        }
    }

    #[test]
    fn harmonic_number_examples() {
        assert_eq!(harmonic_number::<Q>(0, 3).unwrap(), q(0, 1));
        assert_eq!(harmonic_number::<Q>(3, 1).unwrap(), q(11, 6));
        assert_eq!(harmonic_number::<Q>(2, 2).unwrap(), q(5, 4));
        assert_eq!(harmonic_number::<Q>(3, 0), Err(Error::ZeroOrder));
    }

    #[test]
    fn harmonic_function_examples() {
        assert_eq!(harmonic_function(0, &q(1, 2), 2).unwrap(), q(4, 9));
        assert_eq!(harmonic_function(2, &q(1, 1), 1).unwrap(), q(13, 12));
        assert!(matches!(
            harmonic_function(2, &q(-1, 1), 1),
            Err(Error::OutOfDomain(_))
        ));
        assert_eq!(harmonic_function(2, &q(1, 1), 0), Err(Error::ZeroOrder));
    }

    #[test]
    fn harmonic_vector_examples() {
        let v = HarmonicVector::new(1, q(0, 1), 2).unwrap();
        assert_eq!(v.values(), &[q(3, 2), q(5, 4)]);
        let v = HarmonicVector::new(0, q(0, 1), 3).unwrap();
        assert_eq!(v.values(), &[q(1, 1), q(1, 1), q(1, 1)]);
        // 2/3 + 2/5 + 2/7 summed by hand over the common denominator 105
        let v = HarmonicVector::new(2, q(1, 2), 1).unwrap();
        assert_eq!(v.get(1), &q(70 + 42 + 30, 105));
        assert_eq!(v.get(1), &q(142, 105));
    }

    #[test]
    fn harmonic_vector_advance_matches_fresh() {
        let x = q(7, 3);
        let mut v = HarmonicVector::new(0, x.clone(), 4).unwrap();
        for n in 1..20 {
            v.advance();
            assert_eq!(v, HarmonicVector::new(n, x.clone(), 4).unwrap());
        }
    }

    #[test]
    fn shift_identity_at_zero() {
        for n in 0..=100u64 {
            let v = HarmonicVector::new(n, q(0, 1), 6).unwrap();
            for alpha in 1..=6u32 {
                assert_eq!(
                    v.get(alpha as usize),
                    &harmonic_number::<Q>(n + 1, alpha).unwrap(),
                    "n={n} alpha={alpha}"
                );
            }
        }
    }

    #[test]
    fn entries_positive_near_boundary() {
        let v = HarmonicVector::new(10, q(-99, 100), 5).unwrap();
        assert!(v.values().iter().all(|h| h.is_positive()));
    }

    #[test]
    fn float_instantiation_tracks_exact() {
        let exact = harmonic_function(30, &q(1, 2), 3).unwrap();
        let approx = harmonic_function(30, &0.5f64, 3).unwrap();
        assert!((exact.approx_f64() - approx).abs() < 1e-14);
    }

    #[test]
    fn bernoulli_values() {
        let t = bernoulli_table(20);
        assert_eq!(t.len(), 21);
        assert_eq!(t.get(0), &q(1, 1));
        assert_eq!(t.get(1), &q(-1, 2));
        assert_eq!(t.get(2), &q(1, 6));
        assert_eq!(t.get(4), &q(-1, 30));
        assert_eq!(t.get(6), &q(1, 42));
        assert_eq!(t.get(8), &q(-1, 30));
        assert_eq!(t.get(20), &q(-174611, 330));
    }

    #[test]
    fn bernoulli_recurrence_and_vanishing() {
        let t = bernoulli_table(41);
        for k in 1..=20 {
            assert!(t.get(2 * k + 1).is_zero());
        }
        for n in 1..=40u64 {
            let row = binomial_row(n + 1);
            let s: Q = (0..=n as usize)
                .map(|k| t.get(k) * Q::from_integer(row[k].clone()))
                .sum();
            assert!(s.is_zero(), "n = {n}");
        }
    }

    #[test]
    fn zeta_even_examples() {
        assert_eq!(zeta_even_coefficient(1).unwrap(), q(1, 6));
        assert_eq!(zeta_even_coefficient(2).unwrap(), q(1, 90));
        assert_eq!(zeta_even_coefficient(3).unwrap(), q(1, 945));
        assert_eq!(zeta_even_coefficient(4).unwrap(), q(1, 9450));
        assert!(zeta_even_coefficient(0).is_err());
    }

    #[test]
    fn zeta_even_sign_is_forced_by_bernoulli_alternation() {
        let t = bernoulli_table(40);
        for n in 1..=20u32 {
            let c = zeta_even_coefficient(n).unwrap();
            assert!(c.is_positive());
            let b = t.get(2 * n as usize);
            let expected_sign = if n % 2 == 1 { 1 } else { -1 };
            assert_eq!(b.signum(), q(expected_sign, 1), "B_{}", 2 * n);
        }
    }

    proptest! {
        #[test]
        fn telescoping(n in 1u64..40, p in -9i64..40, d in 1i64..12, alpha in 1u32..6) {
            let x = q(p, d);
            prop_assume!(in_domain_q(&x));
            let hi = harmonic_function(n, &x, alpha).unwrap();
            let lo = harmonic_function(n - 1, &x, alpha).unwrap();
            let base = Q::from_integer((n + 1).into()) + &x;
            prop_assert_eq!(hi - lo, num_traits::pow(base, alpha as usize).recip());
        }

        #[test]
        fn harmonic_vector_matches_direct_sum(n in 0u64..25, p in -9i64..30, d in 1i64..9) {
            let x = q(p, d);
            prop_assume!(in_domain_q(&x));
            let v = HarmonicVector::new(n, x.clone(), 4).unwrap();
            for alpha in 1..=4usize {
                let direct: Q = (0..=n)
                    .map(|k| num_traits::pow(Q::from_integer((k + 1).into()) + &x, alpha).recip())
                    .sum();
                prop_assert_eq!(v.get(alpha), &direct);
            }
        }
    }

    fn in_domain_q(x: &Q) -> bool {
        crate::scalar::in_domain(x)
    }
}
