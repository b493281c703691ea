//! Exact rationals and their `"p/q"` text form.

use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn q(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn one() -> Rational {
    Rational::one()
}

/// Parses `"p/q"`, `"p"` or a finite decimal such as `"3.19"` or `"-0.5"`.
pub fn parse(text: &str) -> Result<Rational> {
    let s = text.trim();
    let bad = |m: &str| Error::parse(format!("rational `{text}`"), m.to_string());
    if s.is_empty() {
        return Err(bad("empty"));
    }
    if let Some((num, den)) = s.split_once('/') {
        let n = BigInt::from_str(num.trim()).map_err(|_| bad("bad numerator"))?;
        let d = BigInt::from_str(den.trim()).map_err(|_| bad("bad denominator"))?;
        if d.is_zero() {
            return Err(bad("zero denominator"));
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad("bad decimal fraction"));
        }
        let negative = whole.starts_with('-');
        let whole_digits = whole.trim_start_matches(['-', '+']);
        let w = if whole_digits.is_empty() {
            BigInt::zero()
        } else {
            BigInt::from_str(whole_digits).map_err(|_| bad("bad integer part"))?
        };
        let f = BigInt::from_str(frac).map_err(|_| bad("bad decimal fraction"))?;
        let scale = num_traits::pow(BigInt::from(10), frac.len());
        let value = Rational::new(w * &scale + f, scale);
        return Ok(if negative { -value } else { value });
    }
    let n = BigInt::from_str(s).map_err(|_| bad("not a rational"))?;
    Ok(Rational::from_integer(n))
}

/// `"p/q"` in lowest terms, `"p"` for integers.
pub fn format(r: &Rational) -> String {
    r.to_string()
}

/// Lossy conversion for display and floating cross-checks only.
pub fn to_f64(r: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or_else(|| {
        // numerator/denominator too large for a direct conversion
        let n = r.numer().bits() as i64;
        let d = r.denom().bits() as i64;
        let shift = (n.max(d) - 900).max(0) as u32;
        let num = (r.numer() >> shift).to_f64().unwrap_or(f64::NAN);
        let den = (r.denom() >> shift).to_f64().unwrap_or(f64::NAN);
        num / den
    })
}

pub fn min(a: &Rational, b: &Rational) -> Rational {
    if a <= b {
        a.clone()
    } else {
        b.clone()
    }
}

pub fn abs(r: &Rational) -> Rational {
    r.abs()
}

pub fn pow(r: &Rational, e: u32) -> Rational {
    num_traits::pow(r.clone(), e as usize)
}

/// Serde adapters writing rationals as `"p/q"` strings.
pub mod serde_q {
    use super::*;
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse(&s).map_err(de::Error::custom)
    }

    pub mod vec {
        use super::*;
        use serde::ser::SerializeSeq;

        pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(v.len()))?;
            for r in v {
                seq.serialize_element(&format(r))?;
            }
            seq.end()
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(
            d: D,
        ) -> std::result::Result<Vec<Rational>, D::Error> {
            let v = Vec::<String>::deserialize(d)?;
            v.iter().map(|s| parse(s).map_err(de::Error::custom)).collect()
        }
    }

    pub mod option {
        use super::*;

        pub fn serialize<S: Serializer>(
            r: &Option<Rational>,
            s: S,
        ) -> std::result::Result<S::Ok, S::Error> {
            match r {
                Some(r) => s.serialize_some(&format(r)),
                None => s.serialize_none(),
            }
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(
            d: D,
        ) -> std::result::Result<Option<Rational>, D::Error> {
            let v = Option::<String>::deserialize(d)?;
            v.map(|s| parse(&s).map_err(de::Error::custom)).transpose()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_forms() {
        assert_eq!(parse("2/4").unwrap(), q(1, 2));
        assert_eq!(parse("-3").unwrap(), int(-3));
        assert_eq!(parse("3.19").unwrap(), q(319, 100));
        assert_eq!(parse("-0.25").unwrap(), q(-1, 4));
        assert_eq!(parse(".5").unwrap(), q(1, 2));
        assert!(parse("1/0").is_err());
        assert!(parse("abc").is_err());
        assert!(parse("1.").is_err());
    }

    #[test]
    fn formats_lowest_terms() {
        assert_eq!(format(&q(6, 8)), "3/4");
        assert_eq!(format(&int(5)), "5");
        assert_eq!(format(&q(2, 243)), "2/243");
    }

    #[test]
    fn float_view_of_huge_rationals() {
        let den = num_traits::pow(BigInt::from(3), 900);
        let big = Rational::new(BigInt::from(2) * &den + BigInt::one(), den);
        assert!((to_f64(&big) - 2.0).abs() < 1e-12);
    }
}
