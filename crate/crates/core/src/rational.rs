//! Text form of exact rationals: `p/q`, with `q` omitted when it is 1.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::{Error, Result};

/// Parses `"p/q"`, `"-p/q"` or `"p"`. Decimal points, signs on the
/// denominator, whitespace and zero denominators are rejected.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let err = || Error::ParseRational(s.to_string());
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (s, None),
    };
    let digits = num.strip_prefix('-').unwrap_or(num);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(err());
    }
    let numer: BigInt = num.parse().map_err(|_| err())?;
    let denom: BigInt = match den {
        None => BigInt::from(1),
        Some(d) => {
            if d.is_empty() || !d.bytes().all(|b| b.is_ascii_digit()) {
                return Err(err());
            }
            d.parse().map_err(|_| err())?
        }
    };
    if denom.is_zero() {
        return Err(err());
    }
    Ok(BigRational::new(numer, denom))
}

/// Canonical string form; identical to `Display` for `BigRational`.
pub fn format_rational(v: &BigRational) -> String {
    v.to_string()
}

/// Formats a float like C's `%.17g`: 17 significant digits, trailing zeros
/// removed, scientific notation outside `1e-5 <= |v| < 1e17`.
pub fn format_float(v: f64) -> String {
    if !v.is_finite() {
        return "null".to_string();
    }
    if v == 0.0 {
        return if v.is_sign_negative() { "-0" } else { "0" }.to_string();
    }
    let sci = format!("{:.16e}", v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..17).contains(&exp) {
        let decimals = (16 - exp) as usize;
        let fixed = format!("{:.*}", decimals, v);
        trim_fraction(&fixed).to_string()
    } else {
        let m = trim_fraction(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{}{:02}", m, sign, exp.abs())
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Serde adapters writing rationals as canonical strings.
pub mod serde_str {
    use num_rational::BigRational;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(v)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        let s = String::deserialize(d)?;
        super::parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

/// Serde adapter printing floats through [`format_float`](super::format_float)
/// as raw JSON numbers.
pub mod serde_g17 {
    use serde::Serializer;

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        use serde::Serialize;
        let raw = serde_json::value::RawValue::from_string(super::format_float(*v))
            .map_err(serde::ser::Error::custom)?;
        raw.serialize(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn parses_canonical_forms() {
        assert_eq!(parse_rational("11/6").unwrap(), q(11, 6));
        assert_eq!(parse_rational("-1/30").unwrap(), q(-1, 30));
        assert_eq!(parse_rational("5").unwrap(), q(5, 1));
        assert_eq!(parse_rational("4/6").unwrap(), q(2, 3));
        assert_eq!(parse_rational("0").unwrap(), q(0, 1));
    }

    #[test]
    fn rejects_non_rational_text() {
        for bad in ["", "0.5", "1/0", "1/-2", "+1/2", " 1/2", "1/", "/2", "a/b", "1/2/3", "-"] {
            assert!(parse_rational(bad).is_err(), "{bad:?} accepted");
        }
    }

    #[test]
    fn formats_canonically() {
        assert_eq!(format_rational(&q(11, 6)), "11/6");
        assert_eq!(format_rational(&q(-2, 60)), "-1/30");
        assert_eq!(format_rational(&q(10, 2)), "5");
    }

    #[test]
    fn float_format_has_seventeen_digits() {
        assert_eq!(format_float(1.0), "1");
        assert_eq!(format_float(0.1), "0.10000000000000001");
        assert_eq!(format_float(-1.0 / 3.0), "-0.33333333333333331");
        assert_eq!(format_float(1e-7), "9.9999999999999995e-08");
        assert_eq!(format_float(1.5e20), "1.5e+20");
        assert_eq!(format_float(f64::NAN), "null");
    }
}
