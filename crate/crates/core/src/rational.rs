//! Exact rational helpers and the string form used in JSON (`"3/4"`, `"5"`).

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

pub fn frac(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn from_biguint(value: &BigUint) -> Rational {
    Rational::from_integer(BigInt::from(value.clone()))
}

/// Parses `"a/b"`, `"a"` or a finite decimal such as `"0.25"`.
pub fn parse(text: &str) -> Result<Rational> {
    let text = text.trim();
    let bad = || Error::input(format!("`{text}` is not an exact rational"));
    if let Some((numer, denom)) = text.split_once('/') {
        let numer: BigInt = numer.trim().parse().map_err(|_| bad())?;
        let denom: BigInt = denom.trim().parse().map_err(|_| bad())?;
        if denom.is_zero() {
            return Err(Error::input(format!("`{text}` has a zero denominator")));
        }
        return Ok(Rational::new(numer, denom));
    }
    if let Some((whole, fraction)) = text.split_once('.') {
        if fraction.is_empty() || !fraction.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = whole.starts_with('-');
        let whole: BigInt = if whole.is_empty() || whole == "-" {
            BigInt::zero()
        } else {
            whole.parse().map_err(|_| bad())?
        };
        let scale = BigInt::from(10u32).pow(fraction.len() as u32);
        let fraction: BigInt = fraction.parse().map_err(|_| bad())?;
        let magnitude = Rational::from_integer(whole.abs()) + Rational::new(fraction, scale);
        return Ok(if negative { -magnitude } else { magnitude });
    }
    let value: BigInt = text.parse().map_err(|_| bad())?;
    Ok(Rational::from_integer(value))
}

pub fn parse_biguint(text: &str) -> Result<BigUint> {
    text.trim()
        .parse()
        .map_err(|_| Error::input(format!("`{text}` is not a nonnegative integer")))
}

/// `"3/4"` or `"3"`.
pub fn format(value: &Rational) -> String {
    value.to_string()
}

/// `ceil(value)` for a nonnegative rational.
pub fn ceil_nonneg(value: &Rational) -> BigInt {
    value.ceil().to_integer()
}

pub fn to_f64(value: &Rational) -> f64 {
    value.to_f64().unwrap_or(f64::NAN)
}

/// `ceil(gamma * n)` as a machine integer.
pub fn ceil_times(gamma: &Rational, n: usize) -> usize {
    let scaled = gamma * Rational::from_integer(BigInt::from(n));
    ceil_nonneg(&scaled).to_usize().unwrap_or(usize::MAX)
}

/// Smallest `k >= 1` with `k^q >= n^p`, i.e. `ceil(n^(p/q))` computed exactly.
pub fn ceil_root_power(n: u64, exponent: &Rational) -> Result<u64> {
    if exponent.is_negative() {
        return Err(Error::input("exponent must be nonnegative"));
    }
    let p = exponent
        .numer()
        .to_u32()
        .ok_or_else(|| Error::input("exponent numerator too large"))?;
    let q = exponent
        .denom()
        .to_u32()
        .ok_or_else(|| Error::input("exponent denominator too large"))?;
    let target = BigUint::from(n).pow(p);
    let mut k: u64 = 1;
    while BigUint::from(k).pow(q) < target {
        k += 1;
    }
    Ok(k)
}

pub fn is_one(value: &Rational) -> bool {
    value.is_one()
}

/// `#[serde(with = "rational::string")]` for a single rational.
pub mod string {
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    use super::Rational;

    pub fn serialize<S: Serializer>(value: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&super::format(value))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let text = String::deserialize(d)?;
        super::parse(&text).map_err(D::Error::custom)
    }
}

/// `#[serde(with = "rational::biguint_string")]` for big integers.
pub mod biguint_string {
    use num_bigint::BigUint;
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(value: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&value.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
        let text = String::deserialize(d)?;
        super::parse_biguint(&text).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        assert_eq!(parse("3/4").unwrap(), frac(3, 4));
        assert_eq!(parse("6/8").unwrap(), frac(3, 4));
        assert_eq!(parse("5").unwrap(), int(5));
        assert_eq!(parse("0.25").unwrap(), frac(1, 4));
        assert_eq!(parse("-1.5").unwrap(), frac(-3, 2));
        assert!(parse("1/0").is_err());
        assert!(parse("abc").is_err());
        assert!(parse("1.").is_err());
    }

    #[test]
    fn format_round_trip() {
        for text in ["3/4", "5", "0", "125/8"] {
            assert_eq!(format(&parse(text).unwrap()), text);
        }
    }

    #[test]
    fn ceil_root_power_exact() {
        assert_eq!(ceil_root_power(4, &frac(1, 2)).unwrap(), 2);
        assert_eq!(ceil_root_power(5, &frac(1, 2)).unwrap(), 3);
        assert_eq!(ceil_root_power(6, &int(1)).unwrap(), 6);
        assert_eq!(ceil_root_power(6, &int(0)).unwrap(), 1);
        assert_eq!(ceil_root_power(27, &frac(1, 3)).unwrap(), 3);
    }

    #[test]
    fn ceil_times_rounds_up() {
        assert_eq!(ceil_times(&frac(1, 4), 8), 2);
        assert_eq!(ceil_times(&frac(1, 4), 10), 3);
        assert_eq!(ceil_times(&frac(3, 8), 16), 6);
    }
}
