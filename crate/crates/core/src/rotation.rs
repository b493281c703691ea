//! Finite unions of arcs on the circle `R/Z` with rational endpoints, and the
//! triple-recurrence limit for an irrational rotation.
//!
//! For `A` the complement of `B` and an irrational rotation by `alpha`,
//! `mu(A ∩ T^n A ∩ T^{2n} A) = 1 - m(n alpha)` with `m(x) = mu((B - x) ∪ B ∪ (B + x))`;
//! by equidistribution of `n alpha` the Cesàro limit is `1 - ∫_0^1 m`.

use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

/// `x mod 1` in `[0, 1)`.
pub fn frac(x: &Rational) -> Rational {
    x - Rational::from_integer(x.numer().div_floor(x.denom()))
}

/// Disjoint half-open arcs `[a, b)`, sorted, with `0 <= a < b <= 1`; an arc
/// through `0` is stored as two pieces.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IntervalUnion {
    #[serde(serialize_with = "serialize_arcs")]
    arcs: Vec<(Rational, Rational)>,
}

fn serialize_arcs<S: serde::Serializer>(arcs: &[(Rational, Rational)], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(arcs.len()))?;
    for (a, b) in arcs {
        seq.serialize_element(&[rational::format(a), rational::format(b)])?;
    }
    seq.end()
}

impl IntervalUnion {
    pub fn empty() -> Self {
        IntervalUnion { arcs: Vec::new() }
    }

    /// The arc `[start, start + length)` mod 1, `0 <= length <= 1`.
    pub fn arc(start: &Rational, length: &Rational) -> Result<Self> {
        if length.is_negative() || *length > Rational::one() {
            return Err(Error::Domain(format!("arc length {length} outside [0, 1]")));
        }
        if length.is_zero() {
            return Ok(Self::empty());
        }
        if length.is_one() {
            return Ok(IntervalUnion {
                arcs: vec![(Rational::zero(), Rational::one())],
            });
        }
        let a = frac(start);
        let b = &a + length;
        let arcs = if b <= Rational::one() {
            vec![(a, b)]
        } else {
            vec![(Rational::zero(), b - Rational::one()), (a, Rational::one())]
        };
        Ok(IntervalUnion::normalize(arcs))
    }

    fn normalize(mut arcs: Vec<(Rational, Rational)>) -> Self {
        arcs.retain(|(a, b)| a < b);
        arcs.sort();
        let mut out: Vec<(Rational, Rational)> = Vec::with_capacity(arcs.len());
        for (a, b) in arcs {
            match out.last_mut() {
                Some(last) if a <= last.1 => {
                    if b > last.1 {
                        last.1 = b;
                    }
                }
                _ => out.push((a, b)),
            }
        }
        IntervalUnion { arcs: out }
    }

    pub fn arcs(&self) -> &[(Rational, Rational)] {
        &self.arcs
    }

    pub fn measure(&self) -> Rational {
        self.arcs.iter().map(|(a, b)| b - a).sum()
    }

    pub fn translate(&self, x: &Rational) -> Self {
        let mut pieces = Vec::new();
        for (a, b) in &self.arcs {
            let len = b - a;
            pieces.extend(IntervalUnion::arc(&(a + x), &len).expect("valid arc").arcs);
        }
        IntervalUnion::normalize(pieces)
    }

    pub fn union(&self, other: &Self) -> Self {
        IntervalUnion::normalize(self.arcs.iter().chain(&other.arcs).cloned().collect())
    }

    pub fn contains(&self, x: &Rational) -> bool {
        let x = frac(x);
        self.arcs.iter().any(|(a, b)| *a <= x && x < *b)
    }

    /// Endpoints of the arcs, with the seam at 0 removed when an arc wraps.
    fn endpoints(&self) -> Vec<Rational> {
        let mut e: Vec<Rational> = self.arcs.iter().flat_map(|(a, b)| [a.clone(), frac(b)]).collect();
        e.sort();
        e.dedup();
        e
    }
}

/// A continuous piecewise-linear function on `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PiecewiseLinear {
    #[serde(with = "rational::serde_q::vec")]
    pub breakpoints: Vec<Rational>,
    #[serde(with = "rational::serde_q::vec")]
    pub values: Vec<Rational>,
}

impl PiecewiseLinear {
    pub fn eval(&self, x: &Rational) -> Result<Rational> {
        if x.is_negative() || *x > Rational::one() {
            return Err(Error::Domain(format!("{x} outside [0, 1]")));
        }
        let i = self.breakpoints.partition_point(|b| b < x);
        if i < self.breakpoints.len() && self.breakpoints[i] == *x {
            return Ok(self.values[i].clone());
        }
        let (x0, x1) = (&self.breakpoints[i - 1], &self.breakpoints[i]);
        let (y0, y1) = (&self.values[i - 1], &self.values[i]);
        Ok(y0 + (y1 - y0) * (x - x0) / (x1 - x0))
    }

    /// Exact trapezoid sum, exact for piecewise-linear functions.
    pub fn integral(&self) -> Rational {
        let half = Rational::new(1.into(), 2.into());
        self.breakpoints
            .windows(2)
            .zip(self.values.windows(2))
            .map(|(x, y)| (&x[1] - &x[0]) * (&y[0] + &y[1]) * &half)
            .sum()
    }

    fn drop_collinear(mut self) -> Self {
        let mut i = 1;
        while i + 1 < self.breakpoints.len() {
            let (x0, x1, x2) = (&self.breakpoints[i - 1], &self.breakpoints[i], &self.breakpoints[i + 1]);
            let (y0, y1, y2) = (&self.values[i - 1], &self.values[i], &self.values[i + 1]);
            if (y1 - y0) * (x2 - x1) == (y2 - y1) * (x1 - x0) {
                self.breakpoints.remove(i);
                self.values.remove(i);
            } else {
                i += 1;
            }
        }
        self
    }
}

/// `mu((B - x) ∪ B ∪ (B + x))`.
pub fn m_at(b: &IntervalUnion, x: &Rational) -> Rational {
    b.translate(&-x).union(b).union(&b.translate(x)).measure()
}

/// Exact representation of `m`. Between two consecutive values of `x` at which
/// endpoints of the three translates coincide (`x ≡ d`, `2x ≡ d` for endpoint
/// differences `d`), no endpoints cross and the measure of the union is linear.
pub fn m_function(b: &IntervalUnion) -> PiecewiseLinear {
    let ends = b.endpoints();
    let half = Rational::new(1.into(), 2.into());
    let mut xs = vec![Rational::zero(), Rational::one(), half.clone()];
    for p in &ends {
        for q in &ends {
            let d = frac(&(p - q));
            xs.push(d.clone());
            xs.push(&d * &half);
            xs.push((&d + Rational::one()) * &half);
        }
    }
    xs.sort();
    xs.dedup();
    let values = xs.iter().map(|x| m_at(b, x)).collect();
    PiecewiseLinear { breakpoints: xs, values }.drop_collinear()
}

#[derive(Debug, Clone, Serialize)]
pub struct RotationReport {
    #[serde(with = "rational::serde_q")]
    pub delta: Rational,
    pub m: PiecewiseLinear,
    #[serde(with = "rational::serde_q")]
    pub integral_of_m: Rational,
    /// `1 - ∫ m`.
    #[serde(with = "rational::serde_q")]
    pub limit: Rational,
    /// `1 - 3 delta + (5/2) delta^2`.
    #[serde(with = "rational::serde_q")]
    pub closed_form: Rational,
    pub matches_closed_form: bool,
    /// `mu(A)^3 = (1 - delta)^3`.
    #[serde(with = "rational::serde_q")]
    pub cube_bound: Rational,
    pub strictly_less: bool,
    /// `m(0), m(delta), m(1/2)`.
    #[serde(with = "rational::serde_q::vec")]
    pub anchors: Vec<Rational>,
    /// `delta > 1/3`: the closed form no longer applies.
    pub beyond_formula_range: bool,
}

pub fn closed_form(delta: &Rational) -> Rational {
    Rational::one() - Rational::from_integer(3.into()) * delta + Rational::new(5.into(), 2.into()) * delta * delta
}

/// `1 - ∫ m`, the Cesàro limit of `mu(A ∩ T^n A ∩ T^{2n} A)` for `A` the complement of `B`.
pub fn rotation_cesaro_limit(b: &IntervalUnion) -> Rational {
    Rational::one() - m_function(b).integral()
}

/// The full computation for `B = [0, delta)`.
pub fn rotation_check(delta: &Rational) -> Result<RotationReport> {
    if !delta.is_positive() || *delta >= Rational::one() {
        return Err(Error::Domain(format!("delta = {delta} outside (0, 1)")));
    }
    let b = IntervalUnion::arc(&Rational::zero(), delta)?;
    let m = m_function(&b);
    let integral_of_m = m.integral();
    let limit = Rational::one() - &integral_of_m;
    let closed = closed_form(delta);
    let cube_bound = rational::pow(&(Rational::one() - delta), 3);
    let anchors = vec![
        m.eval(&Rational::zero())?,
        m.eval(delta)?,
        m.eval(&Rational::new(1.into(), 2.into()))?,
    ];
    Ok(RotationReport {
        delta: delta.clone(),
        matches_closed_form: limit == closed,
        strictly_less: limit < cube_bound,
        beyond_formula_range: *delta > Rational::new(1.into(), 3.into()),
        m,
        integral_of_m,
        limit,
        closed_form: closed,
        cube_bound,
        anchors,
    })
}

/// `F_k / F_{k+1}`, rational approximants of `(sqrt 5 - 1) / 2`.
pub fn golden_approximant(k: u32) -> Rational {
    let (mut a, mut b) = (num_bigint::BigInt::one(), num_bigint::BigInt::one());
    for _ in 0..k {
        let next = &a + &b;
        a = b;
        b = next;
    }
    Rational::new(a, b)
}

/// `(1/N) sum_{n=1}^N (1 - m(n alpha))`: a finite-orbit demonstration only. For
/// a rational `alpha` the orbit is periodic, so this approximates the
/// irrational limit only while `N` is small against the period.
pub fn empirical_average(b: &IntervalUnion, alpha: &Rational, n: u64) -> Rational {
    let m = m_function(b);
    let total: Rational = (1..=n)
        .map(|k| {
            let x = frac(&(alpha * Rational::from_integer(k.into())));
            Rational::one() - m.eval(&x).expect("x in [0, 1)")
        })
        .sum();
    total / Rational::from_integer(n.into())
}
