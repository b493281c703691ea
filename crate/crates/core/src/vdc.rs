//! The van der Corput inequality on a finite group, in the form
//! `||avg_g u_g||^2 <= avg_{h,l ~ H} avg_g <u_{hg}, u_{lg}>`, and the
//! two-sided variant with `H = F_N` rewritten through `F_N * F_N^*`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{dot, norm_sq};
use crate::measure::{check_vector_function, same_group, GroupMeasure, ReiterSequence};
use crate::rational::{self, Rational};

#[derive(Debug, Clone, Serialize)]
pub struct VdcTerm {
    /// `avg_g ∫ <u_g, u_{kg}> d(F_N * F_N^*)(k)`.
    #[serde(with = "rational::serde_q")]
    pub rhs: Rational,
    /// The same quantity as the double average with `H = F_N`.
    pub equals_double_average: bool,
    pub holds: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct VdcReport {
    #[serde(with = "rational::serde_q")]
    pub lhs: Rational,
    #[serde(with = "rational::serde_q")]
    pub rhs: Rational,
    pub holds: bool,
    /// One entry per stored term of the Reiter sequence.
    pub two_sided: Vec<VdcTerm>,
}

impl VdcReport {
    pub fn all_hold(&self) -> bool {
        self.holds && self.two_sided.iter().all(|t| t.holds && t.equals_double_average)
    }
}

/// `sum_{h,l} H(h) H(l) avg_g <u_{hg}, u_{lg}>`.
fn double_average(u: &[Vec<Rational>], h: &GroupMeasure) -> Rational {
    let group = h.group();
    let order = Rational::from_integer(group.order().into());
    let support = h.support();
    let mut total = Rational::from_integer(0.into());
    for &a in &support {
        for &b in &support {
            let s: Rational = group
                .elements()
                .map(|g| dot(&u[group.mul(a, g)], &u[group.mul(b, g)]))
                .sum();
            total += h.weight(a) * h.weight(b) * s;
        }
    }
    total / order
}

/// `avg_g sum_k K(k) <u_g, u_{kg}>`.
fn shifted_average(u: &[Vec<Rational>], k: &GroupMeasure) -> Rational {
    let group = k.group();
    let order = Rational::from_integer(group.order().into());
    let mut total = Rational::from_integer(0.into());
    for s in k.support() {
        let inner: Rational = group.elements().map(|g| dot(&u[g], &u[group.mul(s, g)])).sum();
        total += k.weight(s) * inner;
    }
    total / order
}

pub fn vdc_verify(u: &[Vec<Rational>], f: &ReiterSequence, h: &GroupMeasure) -> Result<VdcReport> {
    let group = h.group();
    if !same_group(f.group(), group) {
        return Err(Error::Domain("F and H live on different groups".into()));
    }
    check_vector_function(group, u)?;
    let mean = GroupMeasure::uniform(group.clone()).integrate(u)?;
    let lhs = norm_sq(&mean);
    let rhs = double_average(u, h);
    let two_sided = f
        .terms()
        .iter()
        .map(|fnn| {
            let k = fnn.convolve(&fnn.involute())?;
            let rhs_n = shifted_average(u, &k);
            Ok(VdcTerm {
                equals_double_average: rhs_n == double_average(u, fnn),
                holds: lhs <= rhs_n,
                rhs: rhs_n,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(VdcReport {
        holds: lhs <= rhs,
        lhs,
        rhs,
        two_sided,
    })
}
