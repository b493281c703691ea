//! Closed rational intervals with outward dyadic rounding, and a certified
//! natural logarithm.
//!
//! `ln x = k ln 2 + 2 artanh((y - 1) / (y + 1))` with `y = x / 2^k` in `[1, 2)`;
//! the series for `artanh z` has positive terms for `z >= 0` and the tail after
//! `m` terms is at most `z^{2m+1} / ((2m + 1)(1 - z^2))`.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

/// Default working precision in bits.
pub const DEFAULT_BITS: u32 = 96;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Interval {
    #[serde(with = "rational::serde_q")]
    pub lo: Rational,
    #[serde(with = "rational::serde_q")]
    pub hi: Rational,
}

fn pow2(bits: u32) -> BigInt {
    BigInt::one() << bits as usize
}

fn round_down(r: &Rational, bits: u32) -> Rational {
    let scale = pow2(bits);
    let n = (r.numer() * &scale).div_floor(r.denom());
    Rational::new(n, scale)
}

fn round_up(r: &Rational, bits: u32) -> Rational {
    let scale = pow2(bits);
    let n = (r.numer() * &scale).div_ceil(r.denom());
    Rational::new(n, scale)
}

impl Interval {
    pub fn new(lo: Rational, hi: Rational) -> Self {
        assert!(lo <= hi, "empty interval");
        Interval { lo, hi }
    }

    pub fn point(r: Rational) -> Self {
        Interval { lo: r.clone(), hi: r }
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn contains(&self, r: &Rational) -> bool {
        self.lo <= *r && *r <= self.hi
    }

    pub fn is_within(&self, outer: &Interval) -> bool {
        outer.lo <= self.lo && self.hi <= outer.hi
    }

    pub fn round_outward(&self, bits: u32) -> Interval {
        Interval {
            lo: round_down(&self.lo, bits),
            hi: round_up(&self.hi, bits),
        }
    }

    pub fn add(&self, other: &Interval) -> Interval {
        Interval {
            lo: &self.lo + &other.lo,
            hi: &self.hi + &other.hi,
        }
    }

    pub fn scale(&self, c: &Rational) -> Interval {
        let (a, b) = (&self.lo * c, &self.hi * c);
        if c.is_negative() {
            Interval { lo: b, hi: a }
        } else {
            Interval { lo: a, hi: b }
        }
    }

    pub fn mul(&self, other: &Interval) -> Interval {
        let products = [
            &self.lo * &other.lo,
            &self.lo * &other.hi,
            &self.hi * &other.lo,
            &self.hi * &other.hi,
        ];
        Interval {
            lo: products.iter().min().expect("four products").clone(),
            hi: products.iter().max().expect("four products").clone(),
        }
    }

    pub fn div(&self, other: &Interval) -> Result<Interval> {
        if other.contains(&Rational::zero()) {
            return Err(Error::Domain("interval division by an interval containing 0".into()));
        }
        Ok(self.mul(&Interval {
            lo: other.hi.recip(),
            hi: other.lo.recip(),
        }))
    }

    /// `Less` / `Greater` when the intervals are disjoint, `None` otherwise.
    pub fn compare(&self, other: &Interval) -> Option<Ordering> {
        if self.hi < other.lo {
            Some(Ordering::Less)
        } else if self.lo > other.hi {
            Some(Ordering::Greater)
        } else {
            None
        }
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        (rational::to_f64(&self.lo), rational::to_f64(&self.hi))
    }
}

/// Enclosure of `artanh z` for rational `0 <= z < 1`, width below `2^-bits`
/// before rounding.
fn artanh(z: &Rational, bits: u32) -> Interval {
    assert!(!z.is_negative() && *z < Rational::one());
    if z.is_zero() {
        return Interval::point(Rational::zero());
    }
    let z2 = z * z;
    let tol = Rational::new(BigInt::one(), pow2(bits + 2));
    let one_minus = Rational::one() - &z2;
    let mut power = z.clone();
    let mut sum = Rational::zero();
    let mut j: u64 = 0;
    loop {
        sum += &power / Rational::from_integer((2 * j + 1).into());
        power *= &z2;
        j += 1;
        let tail = &power / (Rational::from_integer((2 * j + 1).into()) * &one_minus);
        if tail < tol {
            return Interval::new(sum.clone(), sum + tail).round_outward(bits + 2);
        }
    }
}

/// Enclosure of `ln 2 = 2 artanh(1/3)`.
pub fn ln2(bits: u32) -> Interval {
    artanh(&Rational::new(1.into(), 3.into()), bits + 1).scale(&Rational::from_integer(2.into()))
}

/// Certified enclosure of `ln x` for rational `x > 0`.
pub fn ln(x: &Rational, bits: u32) -> Result<Interval> {
    if !x.is_positive() {
        return Err(Error::Domain(format!("logarithm of nonpositive {x}")));
    }
    // k with 1 <= x / 2^k < 2
    let mut k = x.numer().bits() as i64 - x.denom().bits() as i64;
    let y = loop {
        let y = if k >= 0 {
            x / Rational::from_integer(pow2(k as u32))
        } else {
            x * Rational::from_integer(pow2((-k) as u32))
        };
        if y < Rational::one() {
            k -= 1;
        } else if y >= Rational::from_integer(2.into()) {
            k += 1;
        } else {
            break y;
        }
    };
    let z = (&y - Rational::one()) / (&y + Rational::one());
    let guard = bits + 8 + (64 - k.unsigned_abs().leading_zeros());
    let series = artanh(&z, guard).scale(&Rational::from_integer(2.into()));
    let scaled = ln2(guard).scale(&Rational::from_integer(k.into()));
    Ok(series.add(&scaled).round_outward(bits + 4))
}

/// Decides `a < b^e` for `0 < a, b` and rational `e` by comparing `ln a` with
/// `e ln b`. Returns the two enclosures with the verdict.
pub fn compare_with_power(a: &Rational, b: &Rational, e: &Rational, bits: u32) -> Result<(bool, Interval, Interval)> {
    let la = ln(a, bits)?;
    let rhs = ln(b, bits)?.scale(e);
    match la.compare(&rhs) {
        Some(Ordering::Less) => Ok((true, la, rhs)),
        Some(_) => Ok((false, la, rhs)),
        None => Err(Error::Precision {
            enclosures: Box::new([la.lo, la.hi, rhs.lo, rhs.hi]),
        }),
    }
}
