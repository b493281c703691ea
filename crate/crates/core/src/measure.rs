//! Probability measures on finite groups, Reiter sequences and Cesàro limits.
//!
//! On a finite group the only measure with `||h * F - F|| = 0` for every `h`
//! is the uniform one, so every Reiter sequence converges to it and the
//! uniform Cesàro limit is the plain average over the group. The sequences
//! themselves are kept to check that limits do not depend on them: along a
//! perturbed-uniform sequence the averages are polynomials in `1/N`, and
//! [`limit_along`] recovers their value at `1/N = 0` by exact interpolation.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::FiniteGroup;
use crate::rational::{self, Rational};

#[derive(Debug, Clone)]
pub struct GroupMeasure {
    group: Arc<FiniteGroup>,
    weights: Vec<Rational>,
}

impl PartialEq for GroupMeasure {
    fn eq(&self, other: &Self) -> bool {
        same_group(&self.group, &other.group) && self.weights == other.weights
    }
}

pub(crate) fn same_group(a: &Arc<FiniteGroup>, b: &Arc<FiniteGroup>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl GroupMeasure {
    /// Nonnegative weights summing to exactly one.
    pub fn new(group: Arc<FiniteGroup>, weights: Vec<Rational>) -> Result<Self> {
        if weights.len() != group.order() {
            return Err(Error::Domain(format!(
                "{} weights for a group of order {}",
                weights.len(),
                group.order()
            )));
        }
        if let Some(g) = weights.iter().position(Signed::is_negative) {
            return Err(Error::Domain(format!("negative weight at element {g}")));
        }
        let total: Rational = weights.iter().sum();
        if !total.is_one() {
            return Err(Error::Domain(format!("total mass {total} != 1")));
        }
        Ok(GroupMeasure { group, weights })
    }

    pub fn uniform(group: Arc<FiniteGroup>) -> Self {
        let w = Rational::new(1.into(), group.order().into());
        let weights = vec![w; group.order()];
        GroupMeasure { group, weights }
    }

    pub fn delta(group: Arc<FiniteGroup>, g: usize) -> Self {
        let mut weights = vec![Rational::zero(); group.order()];
        weights[g] = Rational::one();
        GroupMeasure { group, weights }
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn weight(&self, g: usize) -> &Rational {
        &self.weights[g]
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.weights.len()).filter(|&g| !self.weights[g].is_zero()).collect()
    }

    /// `(self * other)(g) = sum over xy = g of self(x) other(y)`.
    pub fn convolve(&self, other: &GroupMeasure) -> Result<GroupMeasure> {
        if !same_group(&self.group, &other.group) {
            return Err(Error::Domain("convolution of measures on different groups".into()));
        }
        let g = &self.group;
        let mut weights = vec![Rational::zero(); g.order()];
        for x in self.support() {
            for y in other.support() {
                weights[g.mul(x, y)] += &self.weights[x] * &other.weights[y];
            }
        }
        Ok(GroupMeasure {
            group: self.group.clone(),
            weights,
        })
    }

    /// `a*(g) = a(g^-1)`.
    pub fn involute(&self) -> GroupMeasure {
        let g = &self.group;
        let weights = g.elements().map(|x| self.weights[g.inv(x)].clone()).collect();
        GroupMeasure {
            group: self.group.clone(),
            weights,
        }
    }

    /// `(1 - s) * self + s * other`.
    pub fn mix(&self, other: &GroupMeasure, s: &Rational) -> Result<GroupMeasure> {
        if !same_group(&self.group, &other.group) {
            return Err(Error::Domain("mixture of measures on different groups".into()));
        }
        let keep = Rational::one() - s;
        let weights = self
            .weights
            .iter()
            .zip(&other.weights)
            .map(|(a, b)| &keep * a + s * b)
            .collect();
        GroupMeasure::new(self.group.clone(), weights)
    }

    /// Total variation distance `sum_g |a(g) - b(g)|`.
    pub fn distance(&self, other: &GroupMeasure) -> Rational {
        self.weights
            .iter()
            .zip(&other.weights)
            .map(|(a, b)| (a - b).abs())
            .sum()
    }

    /// `max_h || delta_h * self - self ||_1`.
    pub fn left_defect(&self) -> Rational {
        let g = &self.group;
        g.elements()
            .map(|h| {
                g.elements()
                    .map(|x| (&self.weights[g.mul(g.inv(h), x)] - &self.weights[x]).abs())
                    .sum::<Rational>()
            })
            .max()
            .unwrap_or_else(Rational::zero)
    }

    /// `integral of u dF` for vector-valued `u` indexed by group element.
    pub fn integrate(&self, u: &[Vec<Rational>]) -> Result<Vec<Rational>> {
        let dim = check_vector_function(&self.group, u)?;
        let mut acc = vec![Rational::zero(); dim];
        for g in self.support() {
            for (a, v) in acc.iter_mut().zip(&u[g]) {
                *a += &self.weights[g] * v;
            }
        }
        Ok(acc)
    }
}

pub(crate) fn check_vector_function(group: &FiniteGroup, u: &[Vec<Rational>]) -> Result<usize> {
    if u.len() != group.order() {
        return Err(Error::Domain(format!(
            "function defined on {} elements, group has {}",
            u.len(),
            group.order()
        )));
    }
    let dim = u.first().map_or(0, Vec::len);
    if let Some(g) = u.iter().position(|v| v.len() != dim) {
        return Err(Error::Domain(format!(
            "value at element {g} has dimension {} != {dim}",
            u[g].len()
        )));
    }
    Ok(dim)
}

/// How the terms of a [`ReiterSequence`] were produced.
#[derive(Debug, Clone, PartialEq)]
pub enum ReiterDescriptor {
    /// `F_N = m` for all `N`.
    Uniform,
    /// `F_N = (1 - N^-power) m + N^-power nu`, `N = 1, 2, ..`.
    PerturbedUniform {
        perturbation: GroupMeasure,
        power: u32,
    },
    /// Caller-supplied terms.
    Explicit,
}

#[derive(Debug, Clone)]
pub struct ReiterSequence {
    group: Arc<FiniteGroup>,
    descriptor: ReiterDescriptor,
    terms: Vec<GroupMeasure>,
}

#[derive(Debug, Clone, Serialize)]
pub struct DefectReport {
    /// `max_h ||delta_h * F_N - F_N||_1` per stored term.
    #[serde(with = "rational::serde_q::vec")]
    pub defects: Vec<Rational>,
    pub nonincreasing: bool,
    pub tends_to_zero: bool,
}

impl DefectReport {
    pub fn is_reiter(&self) -> bool {
        self.nonincreasing && self.tends_to_zero
    }
}

impl ReiterSequence {
    pub fn uniform(group: Arc<FiniteGroup>, len: usize) -> Self {
        let u = GroupMeasure::uniform(group.clone());
        ReiterSequence {
            group,
            descriptor: ReiterDescriptor::Uniform,
            terms: vec![u; len.max(1)],
        }
    }

    pub fn perturbed_uniform(perturbation: GroupMeasure, power: u32, len: usize) -> Self {
        assert!(power > 0, "perturbation must decay");
        let group = perturbation.group.clone();
        let u = GroupMeasure::uniform(group.clone());
        let terms = (1..=len.max(1))
            .map(|n| {
                let s = Rational::new(1.into(), num_traits::pow(num_bigint::BigInt::from(n), power as usize));
                u.mix(&perturbation, &s).expect("same group")
            })
            .collect();
        ReiterSequence {
            group,
            descriptor: ReiterDescriptor::PerturbedUniform {
                perturbation,
                power,
            },
            terms,
        }
    }

    pub fn explicit(terms: Vec<GroupMeasure>) -> Result<Self> {
        let first = terms
            .first()
            .ok_or_else(|| Error::Domain("empty Reiter sequence".into()))?;
        let group = first.group.clone();
        if terms.iter().any(|t| !same_group(&t.group, &group)) {
            return Err(Error::Domain("terms on different groups".into()));
        }
        Ok(ReiterSequence {
            group,
            descriptor: ReiterDescriptor::Explicit,
            terms,
        })
    }

    /// `F'_N = F_N * F_N^*`, a two-sided sequence built from a left one.
    pub fn two_sided(&self) -> ReiterSequence {
        let terms = self
            .terms
            .iter()
            .map(|f| f.convolve(&f.involute()).expect("same group"))
            .collect();
        let descriptor = match &self.descriptor {
            ReiterDescriptor::Uniform => ReiterDescriptor::Uniform,
            // ((1-s)m + s nu) * ((1-s)m + s nu*) = (1 - s^2) m + s^2 (nu * nu*)
            ReiterDescriptor::PerturbedUniform {
                perturbation,
                power,
            } => ReiterDescriptor::PerturbedUniform {
                perturbation: perturbation
                    .convolve(&perturbation.involute())
                    .expect("same group"),
                power: 2 * power,
            },
            ReiterDescriptor::Explicit => ReiterDescriptor::Explicit,
        };
        ReiterSequence {
            group: self.group.clone(),
            descriptor,
            terms,
        }
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn descriptor(&self) -> &ReiterDescriptor {
        &self.descriptor
    }

    pub fn terms(&self) -> &[GroupMeasure] {
        &self.terms
    }

    /// Checks the left Reiter property on the stored terms.
    ///
    /// Perturbed-uniform sequences decay by construction, so only
    /// monotonicity is checked there; explicit sequences must reach defect
    /// zero by their last term.
    pub fn defect_report(&self) -> DefectReport {
        let defects: Vec<Rational> = self.terms.iter().map(GroupMeasure::left_defect).collect();
        let nonincreasing = defects.windows(2).all(|w| w[1] <= w[0]);
        let tends_to_zero = match self.descriptor {
            ReiterDescriptor::Uniform | ReiterDescriptor::PerturbedUniform { .. } => true,
            ReiterDescriptor::Explicit => defects.last().is_some_and(Zero::is_zero),
        };
        DefectReport {
            defects,
            nonincreasing,
            tends_to_zero,
        }
    }

    pub fn ensure_reiter(&self) -> Result<()> {
        let report = self.defect_report();
        if report.is_reiter() {
            return Ok(());
        }
        let reason = if !report.nonincreasing {
            "defect sequence increases"
        } else {
            "defect does not reach zero on the stored terms"
        };
        Err(Error::Convergence {
            reason: reason.into(),
            defects: report.defects.iter().map(rational::format).collect(),
        })
    }

    /// Degree of the term sequence as a polynomial in `1/N`, `None` if not polynomial.
    fn degree(&self) -> Option<u32> {
        match self.descriptor {
            ReiterDescriptor::Uniform => Some(0),
            ReiterDescriptor::PerturbedUniform { power, .. } => Some(power),
            ReiterDescriptor::Explicit => None,
        }
    }
}

/// `lim_N integral of u dF_N`; on a finite group the uniform average of `u`.
pub fn cesaro_limit(u: &[Vec<Rational>], seq: &ReiterSequence) -> Result<Vec<Rational>> {
    seq.ensure_reiter()?;
    GroupMeasure::uniform(seq.group.clone()).integrate(u)
}

/// Uniform average of a scalar function on a finite group.
pub fn uniform_average(values: &[Rational]) -> Rational {
    let n = values.len();
    assert!(n > 0, "average over an empty group");
    values.iter().sum::<Rational>() / Rational::from_integer(n.into())
}

/// Limit of `eval(F^1_N, .., F^k_N)` as `N -> oo`, for a functional that is
/// multilinear in the measures, computed from the stored terms alone.
///
/// Perturbed-uniform terms make the value a polynomial in `1/N` of degree at
/// most the sum of the powers; it is interpolated exactly and evaluated at 0.
/// Explicit sequences contribute their last term, which for a Reiter
/// sequence on a finite group is the uniform measure.
pub fn limit_along<F>(seqs: &[&ReiterSequence], eval: F) -> Result<Vec<Rational>>
where
    F: Fn(&[&GroupMeasure]) -> Vec<Rational>,
{
    for s in seqs {
        s.ensure_reiter()?;
    }
    let degree: u32 = seqs.iter().filter_map(|s| s.degree()).sum();
    let samples = degree as usize + 1;
    for s in seqs {
        if s.degree().is_some_and(|d| d > 0) && s.terms.len() < samples {
            return Err(Error::Domain(format!(
                "extrapolation needs {samples} terms, sequence has {}",
                s.terms.len()
            )));
        }
    }
    let mut xs = Vec::with_capacity(samples);
    let mut ys = Vec::with_capacity(samples);
    for n in 0..samples {
        let terms: Vec<&GroupMeasure> = seqs
            .iter()
            .map(|s| match s.degree() {
                Some(0) => &s.terms[0],
                Some(_) => &s.terms[n],
                None => s.terms.last().expect("nonempty"),
            })
            .collect();
        xs.push(Rational::new(1.into(), (n + 1).into()));
        ys.push(eval(&terms));
    }
    Ok(interpolate_at_zero(&xs, &ys))
}

/// Lagrange interpolation of vector samples `(x_i, y_i)`, evaluated at 0.
pub fn interpolate_at_zero(xs: &[Rational], ys: &[Vec<Rational>]) -> Vec<Rational> {
    let dim = ys.first().map_or(0, Vec::len);
    let mut out = vec![Rational::zero(); dim];
    for (i, xi) in xs.iter().enumerate() {
        let mut basis = Rational::one();
        for (j, xj) in xs.iter().enumerate() {
            if i != j {
                basis *= -xj / (xi - xj);
            }
        }
        for (o, y) in out.iter_mut().zip(&ys[i]) {
            *o += &basis * y;
        }
    }
    out
}

/// A function on `Z^d` equal to a constant vector off finitely many points.
#[derive(Debug, Clone)]
pub struct EventuallyConstant {
    pub dim: usize,
    pub constant: Vec<Rational>,
    pub exceptions: BTreeMap<Vec<i64>, Vec<Rational>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct BoxAverages {
    pub radii: Vec<u64>,
    /// Averages over `[-N, N]^d`, one vector per radius.
    pub averages: Vec<Vec<String>>,
    /// Certified bound on `|average - limit|` (max over coordinates) per radius.
    pub error_bounds: Vec<String>,
    pub limit: Vec<String>,
}

impl EventuallyConstant {
    pub fn new(dim: usize, constant: Vec<Rational>) -> Self {
        EventuallyConstant {
            dim,
            constant,
            exceptions: BTreeMap::new(),
        }
    }

    pub fn with_exception(mut self, at: Vec<i64>, value: Vec<Rational>) -> Result<Self> {
        if at.len() != self.dim {
            return Err(Error::Domain(format!("point {at:?} is not in Z^{}", self.dim)));
        }
        if value.len() != self.constant.len() {
            return Err(Error::Domain("value dimension mismatch".into()));
        }
        self.exceptions.insert(at, value);
        Ok(self)
    }

    fn box_size(&self, radius: u64) -> Rational {
        Rational::from_integer(num_traits::pow(num_bigint::BigInt::from(2 * radius + 1), self.dim))
    }

    /// Exact average over the box `[-radius, radius]^d`.
    pub fn box_average(&self, radius: u64) -> Vec<Rational> {
        let size = self.box_size(radius);
        let r = radius as i64;
        let mut out = self.constant.clone();
        for (p, v) in &self.exceptions {
            if p.iter().all(|c| c.abs() <= r) {
                for ((o, x), c) in out.iter_mut().zip(v).zip(&self.constant) {
                    *o += (x - c) / &size;
                }
            }
        }
        out
    }

    /// The box-Følner limit (the constant), with the averages along `radii`
    /// and the deviation bound `sum |u - c| / |box|` for each.
    pub fn box_cesaro_limit(&self, radii: &[u64]) -> BoxAverages {
        let deviation: Rational = self
            .exceptions
            .values()
            .map(|v| {
                v.iter()
                    .zip(&self.constant)
                    .map(|(x, c)| (x - c).abs())
                    .max()
                    .unwrap_or_else(Rational::zero)
            })
            .sum();
        BoxAverages {
            radii: radii.to_vec(),
            averages: radii
                .iter()
                .map(|&r| self.box_average(r).iter().map(rational::format).collect())
                .collect(),
            error_bounds: radii
                .iter()
                .map(|&r| rational::format(&(&deviation / self.box_size(r))))
                .collect(),
            limit: self.constant.iter().map(rational::format).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn z(n: usize) -> Arc<FiniteGroup> {
        Arc::new(FiniteGroup::cyclic(n))
    }

    #[test]
    fn delta_identity_is_neutral() {
        let g = z(5);
        let b = GroupMeasure::new(g.clone(), vec![q(1, 2), q(1, 4), q(1, 8), q(1, 16), q(1, 16)]).unwrap();
        let e = GroupMeasure::delta(g.clone(), 0);
        assert_eq!(e.convolve(&b).unwrap(), b);
        assert_eq!(b.convolve(&e).unwrap(), b);
    }

    #[test]
    fn uniform_is_idempotent() {
        let g = Arc::new(FiniteGroup::dihedral(3));
        let u = GroupMeasure::uniform(g);
        assert_eq!(u.convolve(&u).unwrap(), u);
    }

    #[test]
    fn z2_delta_one_squared() {
        // brute force over the 2x2 table: only 1 + 1 = 0 carries mass
        let g = z(2);
        let d1 = GroupMeasure::delta(g.clone(), 1);
        let mut expected = vec![Rational::zero(); 2];
        for x in 0..2 {
            for y in 0..2 {
                expected[(x + y) % 2] += d1.weight(x) * d1.weight(y);
            }
        }
        assert_eq!(d1.convolve(&d1).unwrap().weights(), &expected[..]);
        assert_eq!(d1.convolve(&d1).unwrap(), GroupMeasure::delta(g, 0));
    }

    #[test]
    fn involution_on_z3() {
        let g = z(3);
        let a = GroupMeasure::new(g.clone(), vec![q(1, 2), q(1, 3), q(1, 6)]).unwrap();
        // index inversion 0 -> 0, 1 -> 2, 2 -> 1
        let expected = GroupMeasure::new(g.clone(), vec![q(1, 2), q(1, 6), q(1, 3)]).unwrap();
        assert_eq!(a.involute(), expected);
        assert_eq!(a.involute().involute(), a);
        assert_eq!(GroupMeasure::delta(g.clone(), 1).involute(), GroupMeasure::delta(g, 2));
    }

    #[test]
    fn mismatched_groups_are_rejected() {
        let a = GroupMeasure::uniform(z(2));
        let b = GroupMeasure::uniform(z(3));
        assert!(matches!(a.convolve(&b), Err(Error::Domain(_))));
        // structurally equal groups behind different pointers are the same group
        let c = GroupMeasure::uniform(z(2));
        assert!(a.convolve(&c).is_ok());
    }

    #[test]
    fn invalid_measures() {
        assert!(GroupMeasure::new(z(2), vec![q(1, 2), q(1, 3)]).is_err());
        assert!(GroupMeasure::new(z(2), vec![q(3, 2), q(-1, 2)]).is_err());
        assert!(GroupMeasure::new(z(2), vec![q(1, 1)]).is_err());
    }

    #[test]
    fn cesaro_limit_of_constant() {
        let g = z(4);
        let u = vec![vec![q(3, 7), q(-1, 2)]; 4];
        let f = ReiterSequence::perturbed_uniform(GroupMeasure::delta(g.clone(), 1), 1, 4);
        assert_eq!(cesaro_limit(&u, &f).unwrap(), vec![q(3, 7), q(-1, 2)]);
    }

    #[test]
    fn character_sums_vanish() {
        // real character of Z/2k: g -> (-1)^g; geometric sum over the group is 0
        for n in [2usize, 4, 6] {
            let u: Vec<Vec<Rational>> = (0..n)
                .map(|g| vec![if g % 2 == 0 { q(1, 1) } else { q(-1, 1) }])
                .collect();
            let f = ReiterSequence::uniform(z(n), 1);
            assert_eq!(cesaro_limit(&u, &f).unwrap(), vec![Rational::zero()]);
        }
    }

    #[test]
    fn identity_indicator_on_z4() {
        let g = z(4);
        let u: Vec<Vec<Rational>> = (0..4).map(|x| vec![if x == 0 { q(1, 1) } else { q(0, 1) }]).collect();
        let nu = GroupMeasure::new(g.clone(), vec![q(1, 2), q(1, 2), q(0, 1), q(0, 1)]).unwrap();
        let f = ReiterSequence::perturbed_uniform(nu, 1, 3);
        // brute force: 1/4 * sum of u
        let brute: Rational = u.iter().map(|v| v[0].clone()).sum::<Rational>() / q(4, 1);
        assert_eq!(cesaro_limit(&u, &f).unwrap(), vec![brute.clone()]);
        assert_eq!(brute, q(1, 4));
    }

    #[test]
    fn non_reiter_sequence_is_reported() {
        let g = z(3);
        let bad = ReiterSequence::explicit(vec![GroupMeasure::delta(g.clone(), 0); 3]).unwrap();
        let u = vec![vec![q(1, 1)]; 3];
        match cesaro_limit(&u, &bad) {
            Err(Error::Convergence { defects, .. }) => assert_eq!(defects, vec!["2", "2", "2"]),
            other => panic!("expected convergence error, got {other:?}"),
        }
        let increasing = ReiterSequence::explicit(vec![
            GroupMeasure::uniform(g.clone()),
            GroupMeasure::delta(g.clone(), 0),
            GroupMeasure::uniform(g),
        ])
        .unwrap();
        assert!(!increasing.defect_report().nonincreasing);
    }

    #[test]
    fn perturbed_defects_decrease() {
        let g = Arc::new(FiniteGroup::dihedral(3));
        let f = ReiterSequence::perturbed_uniform(GroupMeasure::delta(g, 2), 1, 6);
        let r = f.defect_report();
        assert!(r.is_reiter());
        // defect of F_N is s_N times the defect of delta, which is 2
        assert_eq!(r.defects[0], q(2, 1));
        assert_eq!(r.defects[3], q(2, 4));
    }

    #[test]
    fn extrapolation_recovers_uniform_limit() {
        let g = z(5);
        let nu = GroupMeasure::new(g.clone(), vec![q(1, 3), q(2, 3), q(0, 1), q(0, 1), q(0, 1)]).unwrap();
        let phi = ReiterSequence::perturbed_uniform(nu.clone(), 1, 3);
        let psi = ReiterSequence::perturbed_uniform(nu.involute(), 1, 3);
        let u: Vec<Rational> = (0..5).map(|x| q(x as i64 * x as i64, 1)).collect();
        // bilinear functional: sum_{a,b} Phi(a) Psi(b) u(a + b)
        let lim = limit_along(&[&phi, &psi], |t| {
            let mut acc = Rational::zero();
            for a in 0..5 {
                for b in 0..5 {
                    acc += t[0].weight(a) * t[1].weight(b) * &u[(a + b) % 5];
                }
            }
            vec![acc]
        })
        .unwrap();
        assert_eq!(lim, vec![uniform_average(&u)]);
    }

    #[test]
    fn two_sided_descriptor_matches_terms() {
        let g = Arc::new(FiniteGroup::quaternion());
        let f = ReiterSequence::perturbed_uniform(GroupMeasure::delta(g.clone(), 3), 1, 4);
        let t = f.two_sided();
        let ReiterDescriptor::PerturbedUniform { perturbation, power } = t.descriptor() else {
            panic!("descriptor lost");
        };
        assert_eq!(*power, 2);
        let rebuilt = ReiterSequence::perturbed_uniform(perturbation.clone(), *power, 4);
        assert_eq!(rebuilt.terms(), t.terms());
    }

    #[test]
    fn box_surrogate_limits() {
        let u = EventuallyConstant::new(1, vec![q(1, 2)])
            .with_exception(vec![0], vec![q(5, 1)])
            .unwrap()
            .with_exception(vec![3], vec![q(-1, 1)])
            .unwrap();
        assert_eq!(u.box_average(0), vec![q(5, 1)]);
        // radius 3: 7 points, deviations 9/2 and -3/2
        assert_eq!(u.box_average(3), vec![q(1, 2) + q(9, 2) / q(7, 1) - q(3, 2) / q(7, 1)]);
        let report = u.box_cesaro_limit(&[1, 10, 100]);
        assert_eq!(report.limit, vec!["1/2"]);
        assert_eq!(report.error_bounds[2], "2/67");
        assert!(EventuallyConstant::new(2, vec![q(0, 1)]).with_exception(vec![1], vec![q(1, 1)]).is_err());
    }
}
