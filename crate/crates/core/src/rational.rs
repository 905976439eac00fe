//! Exact rational scalars and the helpers shared by the identity checks,
//! the hypothesis validator and the config layer.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;

use crate::error::{Error, Result};

/// Arbitrary-precision rational, always stored in lowest terms with a
/// positive denominator.
pub type Rational = BigRational;

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn frac(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Parses `"a/b"`, `"a"`, or a finite decimal such as `"-0.125"` exactly.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let t = s.trim();
    let bad = || Error::ParseRational(s.to_string());
    if t.is_empty() {
        return Err(bad());
    }
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((whole, fracpart)) = t.split_once('.') {
        let negative = whole.trim_start().starts_with('-');
        let digits_ok = fracpart.chars().all(|c| c.is_ascii_digit());
        if !digits_ok || fracpart.is_empty() {
            return Err(bad());
        }
        let w: BigInt = match whole {
            "" | "-" | "+" => BigInt::zero(),
            w => w.parse().map_err(|_| bad())?,
        };
        let f: BigInt = fracpart.parse().map_err(|_| bad())?;
        let scale = num_traits::pow(BigInt::from(10), fracpart.len());
        let mag = w.abs() * &scale + f;
        let num = if negative { -mag } else { mag };
        return Ok(Rational::new(num, scale));
    }
    let n: BigInt = t.parse().map_err(|_| bad())?;
    Ok(Rational::from_integer(n))
}

/// Formats as `"num/den"`, or `"num"` for integers.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Draws a rational with numerator in [-9, 9] and denominator in [1, 9].
pub fn random_small<R: Rng + ?Sized>(rng: &mut R) -> Rational {
    let n: i64 = rng.gen_range(-9..=9);
    let d: i64 = rng.gen_range(1..=9);
    frac(n, d)
}

pub fn factorial(k: u32) -> BigInt {
    (1..=k as u64).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

/// Falling factorial a (a-1) ... (a-i+1) for an integer base of any sign.
pub fn falling_factorial(a: i64, i: u32) -> BigInt {
    (0..i as i64).fold(BigInt::one(), |acc, t| acc * BigInt::from(a - t))
}

pub fn binomial(n: u32, k: u32) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Serde adapter writing a [`Rational`] as `"num/den"`; integers are also
/// accepted on input.
pub mod serde_rational {
    use serde::{Deserialize, Deserializer, Serializer};

    use super::{format_rational, parse_rational, Rational};

    #[derive(Deserialize)]
    #[serde(untagged)]
    pub(super) enum Raw {
        Text(String),
        Int(i64),
    }

    pub(super) fn from_raw<E: serde::de::Error>(raw: Raw) -> Result<Rational, E> {
        match raw {
            Raw::Text(t) => parse_rational(&t).map_err(E::custom),
            Raw::Int(i) => Ok(super::int(i)),
        }
    }

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        from_raw(Raw::deserialize(d)?)
    }

    /// Same, for optional fields.
    pub mod option {
        use serde::{Deserialize, Deserializer, Serializer};

        use super::super::{format_rational, Rational};
        use super::{from_raw, Raw};

        pub fn serialize<S: Serializer>(r: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
            match r {
                Some(v) => s.serialize_some(&format_rational(v)),
                None => s.serialize_none(),
            }
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Rational>, D::Error> {
            match Option::<Raw>::deserialize(d)? {
                Some(raw) => from_raw(raw).map(Some),
                None => Ok(None),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_the_three_spellings() {
        assert_eq!(parse_rational("3/6").unwrap(), frac(1, 2));
        assert_eq!(parse_rational("-4").unwrap(), int(-4));
        assert_eq!(parse_rational("-0.125").unwrap(), frac(-1, 8));
        assert_eq!(parse_rational("2.5").unwrap(), frac(5, 2));
        assert_eq!(parse_rational(" 7 / -14 ").unwrap(), frac(-1, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
        assert!(parse_rational("1.").is_err());
    }

    #[test]
    fn lowest_terms_and_positive_denominator() {
        let r = frac(6, -4);
        assert_eq!(r.numer(), &BigInt::from(-3));
        assert_eq!(r.denom(), &BigInt::from(2));
        assert_eq!(format_rational(&r), "-3/2");
        assert_eq!(format_rational(&int(5)), "5");
    }

    #[test]
    fn falling_factorial_handles_negative_bases() {
        assert_eq!(falling_factorial(5, 3), BigInt::from(60));
        assert_eq!(falling_factorial(-2, 2), BigInt::from(6));
        assert_eq!(falling_factorial(2, 3), BigInt::zero());
        assert_eq!(falling_factorial(7, 0), BigInt::one());
        assert_eq!(binomial(6, 2), BigInt::from(15));
        assert_eq!(factorial(8), BigInt::from(40320));
    }
}
