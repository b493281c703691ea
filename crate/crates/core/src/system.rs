//! Finite probability spaces with commuting measure-preserving group actions.
//!
//! An action is stored as one permutation per group element, `perm[x] = T^g x`,
//! and must satisfy `T^{gh} = T^g T^h`. Functions are acted on by composition,
//! `(T^g f)(x) = f(T^g x)`, which is an anti-action: `T^g T^h f = T^{hg} f`.

use std::collections::{BTreeMap, HashSet, VecDeque};
use std::ops::Deref;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{is_permutation, FiniteGroup};
use crate::partition::{Partition, Provenance};
use crate::rational::{self, Rational};

/// A rational function on the points of a finite system.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct Observable(#[serde(with = "rational::serde_q::vec")] Vec<Rational>);

impl Deref for Observable {
    type Target = [Rational];
    fn deref(&self) -> &[Rational] {
        &self.0
    }
}

impl From<Vec<Rational>> for Observable {
    fn from(v: Vec<Rational>) -> Self {
        Observable(v)
    }
}

impl Observable {
    pub fn new(values: Vec<Rational>) -> Self {
        Observable(values)
    }

    pub fn constant(n: usize, c: Rational) -> Self {
        Observable(vec![c; n])
    }

    pub fn indicator(n: usize, set: &[usize]) -> Self {
        let mut v = vec![Rational::zero(); n];
        for &x in set {
            v[x] = Rational::one();
        }
        Observable(v)
    }

    pub fn into_inner(self) -> Vec<Rational> {
        self.0
    }

    pub fn values(&self) -> &[Rational] {
        &self.0
    }

    pub fn mul(&self, other: &Observable) -> Observable {
        Observable(self.0.iter().zip(&other.0).map(|(a, b)| a * b).collect())
    }

    pub fn add(&self, other: &Observable) -> Observable {
        Observable(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Observable) -> Observable {
        Observable(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, c: &Rational) -> Observable {
        Observable(self.0.iter().map(|a| a * c).collect())
    }

    /// `x -> f(perm[x])`.
    pub fn compose(&self, perm: &[usize]) -> Observable {
        Observable(perm.iter().map(|&y| self.0[y].clone()).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn in_unit_interval(&self) -> bool {
        self.0.iter().all(|v| !v.is_negative() && *v <= Rational::one())
    }
}

/// A measure-preserving action: one permutation of the points per group element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Action {
    perms: Vec<Vec<usize>>,
}

impl Action {
    pub fn trivial(group: &FiniteGroup, n: usize) -> Self {
        Action {
            perms: vec![(0..n).collect(); group.order()],
        }
    }

    /// From a full table, one permutation per element (validated by [`FiniteMPS::new`]).
    pub fn from_table(perms: Vec<Vec<usize>>) -> Self {
        Action { perms }
    }

    /// Extends permutations given on some elements (typically generators) to
    /// the whole group by `T^{gh} = T^g T^h`, rejecting inconsistent data.
    pub fn generated(group: &FiniteGroup, n: usize, given: &BTreeMap<usize, Vec<usize>>) -> Result<Self> {
        for (&g, p) in given {
            group.check_element(g)?;
            if p.len() != n || !is_permutation(p) {
                return Err(Error::Structural(format!(
                    "image of element {g} is not a permutation of {n} points"
                )));
            }
        }
        let mut perms: Vec<Option<Vec<usize>>> = vec![None; group.order()];
        perms[group.id()] = Some((0..n).collect());
        let mut queue = VecDeque::from([group.id()]);
        while let Some(a) = queue.pop_front() {
            for (&g, pg) in given {
                let pa = perms[a].as_ref().expect("queued elements are assigned");
                // T^{a g} = T^a T^g
                let composed: Vec<usize> = pg.iter().map(|&y| pa[y]).collect();
                let ag = group.mul(a, g);
                match &perms[ag] {
                    Some(existing) if *existing != composed => {
                        return Err(Error::Structural(format!(
                            "given permutations do not define a homomorphism (conflict at element {ag})"
                        )));
                    }
                    Some(_) => {}
                    None => {
                        perms[ag] = Some(composed);
                        queue.push_back(ag);
                    }
                }
            }
        }
        let missing: Vec<usize> = (0..group.order()).filter(|&g| perms[g].is_none()).collect();
        if !missing.is_empty() {
            return Err(Error::Structural(format!(
                "given elements do not generate the group; no image for {missing:?}"
            )));
        }
        let action = Action {
            perms: perms.into_iter().map(Option::unwrap).collect(),
        };
        action.check_homomorphism(group)?;
        Ok(action)
    }

    pub fn perm(&self, g: usize) -> &[usize] {
        &self.perms[g]
    }

    pub fn perms(&self) -> &[Vec<usize>] {
        &self.perms
    }

    fn check_homomorphism(&self, group: &FiniteGroup) -> Result<()> {
        for g in group.elements() {
            for h in group.elements() {
                let gh = &self.perms[group.mul(g, h)];
                let (pg, ph) = (&self.perms[g], &self.perms[h]);
                if ph.iter().zip(gh).any(|(&y, &z)| pg[y] != z) {
                    return Err(Error::Structural(format!(
                        "T^({g}*{h}) != T^{g} T^{h}"
                    )));
                }
            }
        }
        Ok(())
    }
}

impl FiniteGroup {
    pub(crate) fn check_element(&self, g: usize) -> Result<()> {
        if g < self.order() {
            Ok(())
        } else {
            Err(Error::Domain(format!("element {g} outside group of order {}", self.order())))
        }
    }
}

#[derive(Debug, Clone)]
pub struct FiniteMPS {
    group: Arc<FiniteGroup>,
    labels: Vec<String>,
    masses: Vec<Rational>,
    actions: Vec<Action>,
}

impl FiniteMPS {
    /// Validates masses (positive, total 1), the homomorphism property, mass
    /// preservation and pairwise commutation of the actions.
    pub fn new(
        group: Arc<FiniteGroup>,
        labels: Vec<String>,
        masses: Vec<Rational>,
        actions: Vec<Action>,
    ) -> Result<Self> {
        let n = masses.len();
        if n == 0 {
            return Err(Error::Structural("system without points".into()));
        }
        if labels.len() != n {
            return Err(Error::Structural(format!("{} labels for {n} points", labels.len())));
        }
        let mut seen = HashSet::new();
        if let Some(l) = labels.iter().find(|l| !seen.insert(l.as_str())) {
            return Err(Error::Structural(format!("duplicate label `{l}`")));
        }
        if let Some(x) = masses.iter().position(|m| !m.is_positive()) {
            return Err(Error::Structural(format!("point `{}` has nonpositive mass", labels[x])));
        }
        let total: Rational = masses.iter().sum();
        if !total.is_one() {
            return Err(Error::Structural(format!("total mass {total} != 1")));
        }
        for (i, a) in actions.iter().enumerate() {
            if a.perms.len() != group.order() {
                return Err(Error::Structural(format!(
                    "action T{} has {} permutations, group has order {}",
                    i + 1,
                    a.perms.len(),
                    group.order()
                )));
            }
            for (g, p) in a.perms.iter().enumerate() {
                if p.len() != n || !is_permutation(p) {
                    return Err(Error::Structural(format!(
                        "T{}^{g} is not a permutation of the {n} points",
                        i + 1
                    )));
                }
                if let Some(x) = (0..n).find(|&x| masses[p[x]] != masses[x]) {
                    return Err(Error::Structural(format!(
                        "T{}^{g} moves `{}` to a point of different mass",
                        i + 1,
                        labels[x]
                    )));
                }
            }
            if a.perms[group.id()].iter().enumerate().any(|(x, &y)| x != y) {
                return Err(Error::Structural(format!("T{} of the identity is not the identity", i + 1)));
            }
            a.check_homomorphism(&group)
                .map_err(|e| Error::Structural(format!("T{}: {e}", i + 1)))?;
        }
        for i in 0..actions.len() {
            for j in i + 1..actions.len() {
                for g in group.elements() {
                    for h in group.elements() {
                        let (a, b) = (actions[i].perm(g), actions[j].perm(h));
                        if (0..n).any(|x| a[b[x]] != b[a[x]]) {
                            return Err(Error::Structural(format!(
                                "T{}^{g} and T{}^{h} do not commute",
                                i + 1,
                                j + 1
                            )));
                        }
                    }
                }
            }
        }
        Ok(FiniteMPS {
            group,
            labels,
            masses,
            actions,
        })
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn len(&self) -> usize {
        self.masses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masses.is_empty()
    }

    pub fn num_actions(&self) -> usize {
        self.actions.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label_index(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn masses(&self) -> &[Rational] {
        &self.masses
    }

    pub fn action(&self, i: usize) -> &Action {
        &self.actions[i]
    }

    /// `T_i^g x`.
    #[inline]
    pub fn apply(&self, i: usize, g: usize, x: usize) -> usize {
        self.actions[i].perms[g][x]
    }

    /// The permutation `prod_{i in which} T_i^g` (the order is irrelevant).
    pub fn diagonal_perm(&self, which: &[usize], g: usize) -> Vec<usize> {
        (0..self.len())
            .map(|x| which.iter().fold(x, |y, &i| self.apply(i, g, y)))
            .collect()
    }

    pub fn ensure_actions(&self, k: usize) -> Result<()> {
        if self.num_actions() == k {
            Ok(())
        } else {
            Err(Error::precondition(
                format!("system has {k} actions"),
                format!("it has {}", self.num_actions()),
            ))
        }
    }

    pub fn mass_of(&self, set: &[usize]) -> Rational {
        set.iter().map(|&x| &self.masses[x]).sum()
    }

    pub fn integrate(&self, f: &[Rational]) -> Rational {
        self.masses
            .iter()
            .zip(f)
            .filter(|(_, v)| !v.is_zero())
            .map(|(m, v)| m * v)
            .sum()
    }

    /// `<f, h>` in `L^2(mu)`.
    pub fn inner(&self, f: &[Rational], h: &[Rational]) -> Rational {
        self.masses
            .iter()
            .zip(f.iter().zip(h))
            .map(|(m, (a, b))| m * a * b)
            .sum()
    }

    pub fn norm_sq(&self, f: &[Rational]) -> Rational {
        self.inner(f, f)
    }

    /// Orbits of the group generated by the selected actions (0-based).
    ///
    /// With no action selected every set is invariant; the singleton partition
    /// is returned with provenance [`Provenance::NoActionsSelected`].
    pub fn invariant_partition(&self, which: &[usize]) -> Result<Partition> {
        self.check_indices(which)?;
        if which.is_empty() {
            return Ok(Partition::singletons(self.len()).with_provenance(Provenance::NoActionsSelected));
        }
        let perms = which
            .iter()
            .flat_map(|&i| self.actions[i].perms.iter().map(Vec::as_slice));
        Ok(Partition::orbits(self.len(), perms, Provenance::Orbits(which.to_vec())))
    }

    /// Orbits of the diagonal action `g -> prod_{i in which} T_i^g`; for a
    /// single index this is the `T_i`-invariant partition.
    pub fn diagonal_partition(&self, which: &[usize]) -> Result<Partition> {
        self.check_indices(which)?;
        if which.is_empty() {
            return Ok(Partition::singletons(self.len()).with_provenance(Provenance::NoActionsSelected));
        }
        let perms: Vec<Vec<usize>> = self.group.elements().map(|g| self.diagonal_perm(which, g)).collect();
        Ok(Partition::orbits(
            self.len(),
            perms.iter().map(Vec::as_slice),
            Provenance::DiagonalOrbits(which.to_vec()),
        ))
    }

    fn check_indices(&self, which: &[usize]) -> Result<()> {
        match which.iter().find(|&&i| i >= self.num_actions()) {
            Some(i) => Err(Error::Domain(format!(
                "action index {} out of range (system has {} actions)",
                i + 1,
                self.num_actions()
            ))),
            None => Ok(()),
        }
    }

    /// `E(f | P)`: mass-weighted block averages; zero on null blocks.
    pub fn cond_exp(&self, f: &[Rational], p: &Partition) -> Observable {
        assert_eq!(p.len_points(), self.len(), "partition of a different point set");
        let mut out = vec![Rational::zero(); self.len()];
        for block in p.blocks() {
            let mass: Rational = block.iter().map(|&x| &self.masses[x]).sum();
            if mass.is_zero() {
                continue;
            }
            let avg = block.iter().map(|&x| &self.masses[x] * &f[x]).sum::<Rational>() / mass;
            for &x in block {
                out[x] = avg.clone();
            }
        }
        Observable(out)
    }

    /// `(1/|G|) sum_g f o T_which^g`, the ergodic average along the diagonal action.
    pub fn time_average(&self, f: &[Rational], which: &[usize]) -> Observable {
        let order = Rational::from_integer(self.group.order().into());
        let mut out = vec![Rational::zero(); self.len()];
        for g in self.group.elements() {
            let p = self.diagonal_perm(which, g);
            for (o, &y) in out.iter_mut().zip(&p) {
                *o += &f[y];
            }
        }
        Observable(out.into_iter().map(|v| v / &order).collect())
    }

    /// `integral f0 * (f1 o T1^g) * (f2 o T1^g T2^g) dmu`.
    pub fn correlation(&self, f0: &[Rational], f1: &[Rational], f2: &[Rational], g: usize) -> Rational {
        (0..self.len())
            .filter(|&x| !f0[x].is_zero())
            .map(|x| {
                let y = self.apply(0, g, x);
                let z = self.apply(1, g, y);
                &self.masses[x] * &f0[x] * &f1[y] * &f2[z]
            })
            .sum()
    }

    /// Ergodic iff the joint orbit partition has a single block; the meet
    /// `I_1 ∧ .. ∧ I_k` is returned as witness.
    pub fn is_ergodic(&self) -> ErgodicityReport {
        let all: Vec<usize> = (0..self.num_actions()).collect();
        let meet = self.invariant_partition(&all).expect("indices in range");
        ErgodicityReport {
            ergodic: meet.is_trivial_mod_null(&self.masses),
            meet,
        }
    }

    pub fn ensure_ergodic(&self) -> Result<()> {
        let report = self.is_ergodic();
        if report.ergodic {
            Ok(())
        } else {
            Err(Error::precondition(
                "ergodic: I_1 ∧ .. ∧ I_k is trivial",
                format!("invariant meet has blocks {}", report.meet),
            ))
        }
    }

    /// Relative independence of `I_1, I_2` (and of `I_1, I_12` and `I_2, I_12`)
    /// over `I_1 ∧ I_2`, checked on block-indicator bases, plus commutation
    /// of the two conditional expectation operators.
    pub fn relative_independence_check(&self) -> Result<RelativeIndependenceReport> {
        self.ensure_actions(2)?;
        let i1 = self.diagonal_partition(&[0])?;
        let i2 = self.diagonal_partition(&[1])?;
        let i12 = self.diagonal_partition(&[0, 1])?;
        let base = i1.meet(&i2);
        let mut checked = 0;
        let mut violation = None;

        // E(a b | I1∧I2) = E(a | J) E(b | K) for a in A-basis, b in B-basis
        let families: [(&str, &Partition, &Partition, &Partition, &Partition); 3] = [
            ("I1,I2", &i1, &i2, &i2, &i1),
            ("I1,I12", &i1, &i12, &i2, &i1),
            ("I2,I12", &i2, &i12, &i1, &i2),
        ];
        'outer: for (name, pa, pb, ea, eb) in families {
            for a in 0..pa.num_blocks() {
                let fa = pa.block_indicator(a);
                let ca = self.cond_exp(&fa, ea);
                for b in 0..pb.num_blocks() {
                    let fb = pb.block_indicator(b);
                    let lhs = self.cond_exp(&Observable(fa.clone()).mul(&Observable(fb.clone())), &base);
                    let rhs = ca.mul(&self.cond_exp(&fb, eb));
                    checked += 1;
                    if lhs != rhs {
                        violation = Some(IndependenceViolation {
                            pair: name.to_string(),
                            first_block: pa.blocks()[a].clone(),
                            second_block: pb.blocks()[b].clone(),
                        });
                        break 'outer;
                    }
                }
            }
        }

        let operators_commute = (0..self.len()).all(|x| {
            let e = Observable::indicator(self.len(), &[x]);
            let a = self.cond_exp(&self.cond_exp(&e, &i1), &i2);
            let b = self.cond_exp(&self.cond_exp(&e, &i2), &i1);
            a == b && a == self.cond_exp(&e, &base)
        });
        Ok(RelativeIndependenceReport {
            holds: violation.is_none() && operators_commute,
            identities_checked: checked,
            operators_commute,
            violation,
        })
    }

    /// Compares `integral f0 f1 f2` with `integral f0 E(f1|I1∧K2) E(f2|I2∧K1)`
    /// for `I1`-measurable `f1` and `I2`-measurable `f2` on an ergodic system.
    /// The Kronecker factors of a finite system are full.
    pub fn trilinear_form_check(&self, f0: &[Rational], f1: &[Rational], f2: &[Rational]) -> Result<TrilinearReport> {
        self.ensure_actions(2)?;
        self.ensure_ergodic()?;
        let i1 = self.diagonal_partition(&[0])?;
        let i2 = self.diagonal_partition(&[1])?;
        if let Some((x, y)) = i1.measurability_witness(f1) {
            return Err(Error::precondition(
                "f1 is I1-measurable",
                format!("f1 differs at `{}` and `{}` in one T1-orbit", self.labels[x], self.labels[y]),
            ));
        }
        if let Some((x, y)) = i2.measurability_witness(f2) {
            return Err(Error::precondition(
                "f2 is I2-measurable",
                format!("f2 differs at `{}` and `{}` in one T2-orbit", self.labels[x], self.labels[y]),
            ));
        }
        let k = Partition::kronecker_full(self.len());
        let e1 = self.cond_exp(f1, &i1.meet(&k));
        let e2 = self.cond_exp(f2, &i2.meet(&k));
        let lhs = self.integrate(&Observable(f0.to_vec()).mul(&Observable(f1.to_vec())).mul(&Observable(f2.to_vec())));
        let rhs = self.integrate(&Observable(f0.to_vec()).mul(&e1).mul(&e2));
        Ok(TrilinearReport {
            equal: lhs == rhs,
            lhs,
            rhs,
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ErgodicityReport {
    pub ergodic: bool,
    pub meet: Partition,
}

#[derive(Debug, Clone, Serialize)]
pub struct IndependenceViolation {
    pub pair: String,
    pub first_block: Vec<usize>,
    pub second_block: Vec<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RelativeIndependenceReport {
    pub holds: bool,
    pub identities_checked: usize,
    pub operators_commute: bool,
    pub violation: Option<IndependenceViolation>,
}

#[derive(Debug, Clone, Serialize)]
pub struct TrilinearReport {
    pub equal: bool,
    #[serde(with = "rational::serde_q")]
    pub lhs: Rational,
    #[serde(with = "rational::serde_q")]
    pub rhs: Rational,
}
