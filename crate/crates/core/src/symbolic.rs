//! Exact integration on Bernoulli shifts over a discrete group.
//!
//! A point of the system is a tuple of configurations `y^{(i)} : G -> alphabet`,
//! one per factor, with i.i.d. letters. Every transformation used here moves
//! coordinates by `(S y)_h = y_{u h v}`, recorded as the pair `(u, v)`; an
//! integral of a product of transformed cylinder functions then depends only
//! on which coordinates coincide, and factorizes over connected clusters.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{DiscreteGroup, FiniteGroup, IntegerLattice};
use crate::interval::{self, Interval};
use crate::partition::UnionFind;
use crate::rational::{self, Rational};

/// Upper bound on letters enumerated in one cluster (`alphabet^k` assignments).
pub const MAX_CLUSTER: usize = 12;

/// `(S y)_h = y_{u h v}` on one factor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoordMap<E> {
    pub u: E,
    pub v: E,
}

impl<E: Clone> CoordMap<E> {
    pub fn identity<G: DiscreteGroup<Elem = E>>(group: &G) -> Self {
        CoordMap {
            u: group.identity(),
            v: group.identity(),
        }
    }

    /// `self ∘ other`: `(S1 S2 y)_h = (S2 y)_{u1 h v1} = y_{u2 u1 h v1 v2}`.
    pub fn compose<G: DiscreteGroup<Elem = E>>(&self, other: &Self, group: &G) -> Self {
        CoordMap {
            u: group.mul(&other.u, &self.u),
            v: group.mul(&self.v, &other.v),
        }
    }

    pub fn apply<G: DiscreteGroup<Elem = E>>(&self, h: &E, group: &G) -> E {
        group.mul(&group.mul(&self.u, h), &self.v)
    }
}

/// How a transformation acts on one factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Shift {
    /// `(R^g y)_h = y_{h g}`.
    Right,
    /// `(L^g y)_h = y_{g^-1 h}`.
    Left,
    Id,
}

impl Shift {
    pub fn power<G: DiscreteGroup>(self, g: &G::Elem, group: &G) -> CoordMap<G::Elem> {
        match self {
            Shift::Right => CoordMap {
                u: group.identity(),
                v: g.clone(),
            },
            Shift::Left => CoordMap {
                u: group.inv(g),
                v: group.identity(),
            },
            Shift::Id => CoordMap::identity(group),
        }
    }
}

/// A transformation of the product: one coordinate map per factor.
pub type ProductMap<E> = Vec<CoordMap<E>>;

/// `F o S` as a factor of an integrand.
pub type Term<'a, E> = (ProductMap<E>, &'a CylinderFunction<E>);

pub fn compose_maps<G: DiscreteGroup>(a: &ProductMap<G::Elem>, b: &ProductMap<G::Elem>, group: &G) -> ProductMap<G::Elem> {
    a.iter().zip(b).map(|(x, y)| x.compose(y, group)).collect()
}

/// A function of finitely many coordinates `(factor, element)`, tabulated on
/// every assignment of letters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "E: Serialize", deserialize = "E: Deserialize<'de>"))]
pub struct CylinderFunction<E> {
    pub support: Vec<(usize, E)>,
    alphabet: usize,
    #[serde(with = "rational::serde_q::vec")]
    values: Vec<Rational>,
}

const LETTERS: &[u8] = b"0123456789abcdefghijklmnopqrstuvwxyz";

fn letter_index(c: char) -> Option<usize> {
    LETTERS.iter().position(|&l| l as char == c)
}

impl<E: Clone + Eq + std::fmt::Debug> CylinderFunction<E> {
    /// `values` indexed by the assignment read as a base-`alphabet` numeral,
    /// first support coordinate most significant.
    pub fn new(support: Vec<(usize, E)>, alphabet: usize, values: Vec<Rational>) -> Result<Self> {
        if alphabet == 0 {
            return Err(Error::Domain("empty alphabet".into()));
        }
        for (i, c) in support.iter().enumerate() {
            if support[..i].contains(c) {
                return Err(Error::Domain(format!("coordinate {c:?} repeated in support")));
            }
        }
        let size = alphabet
            .checked_pow(support.len() as u32)
            .ok_or_else(|| Error::TooLarge {
                what: "cylinder table".into(),
                needed: usize::MAX,
                cap: 1 << 20,
            })?;
        if values.len() != size {
            return Err(Error::Domain(format!(
                "table has {} entries, alphabet^support has {size}",
                values.len()
            )));
        }
        Ok(CylinderFunction {
            support,
            alphabet,
            values,
        })
    }

    pub fn from_fn(support: Vec<(usize, E)>, alphabet: usize, f: impl Fn(&[usize]) -> Rational) -> Result<Self> {
        let k = support.len();
        let size = alphabet.pow(k as u32);
        let values = (0..size).map(|idx| f(&digits(idx, alphabet, k))).collect();
        Self::new(support, alphabet, values)
    }

    /// From a table keyed by letter strings such as `"012"`; every assignment
    /// must be present.
    pub fn from_letter_table(support: Vec<(usize, E)>, alphabet: usize, table: &BTreeMap<String, Rational>) -> Result<Self> {
        if alphabet > LETTERS.len() {
            return Err(Error::Domain(format!("alphabets above {} letters have no string form", LETTERS.len())));
        }
        let k = support.len();
        let mut values = vec![None; alphabet.pow(k as u32)];
        for (key, v) in table {
            let letters: Option<Vec<usize>> = key.chars().map(letter_index).collect();
            match letters {
                Some(l) if l.len() == k && l.iter().all(|&x| x < alphabet) => {
                    values[index_of(&l, alphabet)] = Some(v.clone());
                }
                _ => return Err(Error::parse(format!("table key \"{key}\""), "not an assignment of the support")),
            }
        }
        let values = values
            .into_iter()
            .enumerate()
            .map(|(i, v)| {
                v.ok_or_else(|| {
                    let key: String = digits(i, alphabet, k).iter().map(|&d| LETTERS[d] as char).collect();
                    Error::parse("table", format!("missing assignment \"{key}\""))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(support, alphabet, values)
    }

    pub fn letter_table(&self) -> BTreeMap<String, String> {
        let k = self.support.len();
        (0..self.values.len())
            .map(|i| {
                let key = digits(i, self.alphabet, k).iter().map(|&d| LETTERS[d] as char).collect();
                (key, rational::format(&self.values[i]))
            })
            .collect()
    }

    pub fn alphabet(&self) -> usize {
        self.alphabet
    }

    pub fn value(&self, letters: &[usize]) -> &Rational {
        &self.values[index_of(letters, self.alphabet)]
    }
}

fn digits(mut idx: usize, base: usize, k: usize) -> Vec<usize> {
    let mut out = vec![0; k];
    for slot in out.iter_mut().rev() {
        *slot = idx % base;
        idx /= base;
    }
    out
}

fn index_of(letters: &[usize], base: usize) -> usize {
    letters.iter().fold(0, |acc, &d| acc * base + d)
}

#[derive(Debug, Clone)]
pub struct BernoulliSystem<G: DiscreteGroup> {
    pub group: G,
    weights: Vec<Rational>,
    pub factors: usize,
}

impl<G: DiscreteGroup> BernoulliSystem<G> {
    pub fn new(group: G, weights: Vec<Rational>, factors: usize) -> Result<Self> {
        if weights.is_empty() || weights.iter().any(Signed::is_negative) {
            return Err(Error::Domain("letter weights must be nonnegative and nonempty".into()));
        }
        if !weights.iter().sum::<Rational>().is_one() {
            return Err(Error::Domain("letter weights do not sum to 1".into()));
        }
        Ok(BernoulliSystem { group, weights, factors })
    }

    pub fn uniform(group: G, alphabet: usize, factors: usize) -> Self {
        let w = Rational::new(1.into(), alphabet.into());
        BernoulliSystem {
            group,
            weights: vec![w; alphabet],
            factors,
        }
    }

    pub fn alphabet(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    /// `T^g` for a transformation given by one shift kind per factor.
    pub fn power(&self, shifts: &[Shift], g: &G::Elem) -> ProductMap<G::Elem> {
        shifts.iter().map(|s| s.power(g, &self.group)).collect()
    }

    pub fn identity_map(&self) -> ProductMap<G::Elem> {
        vec![CoordMap::identity(&self.group); self.factors]
    }

    /// Coordinates read by `F o S`.
    fn pulled_back(&self, map: &ProductMap<G::Elem>, f: &CylinderFunction<G::Elem>) -> Result<Vec<(usize, G::Elem)>> {
        if map.len() != self.factors {
            return Err(Error::Domain(format!("map has {} factors, system has {}", map.len(), self.factors)));
        }
        if f.alphabet != self.alphabet() {
            return Err(Error::Domain("cylinder function over a different alphabet".into()));
        }
        f.support
            .iter()
            .map(|(i, h)| {
                if *i >= self.factors {
                    return Err(Error::Domain(format!("factor {i} out of range")));
                }
                self.group.check(h)?;
                Ok((*i, map[*i].apply(h, &self.group)))
            })
            .collect()
    }

    /// `∫ prod_t (F_t o S_t) d nu`, merging coinciding coordinates and
    /// factorizing over clusters of terms that share coordinates.
    pub fn integrate_product(&self, terms: &[Term<G::Elem>]) -> Result<Rational> {
        for (map, _) in terms {
            for m in map {
                self.group.check(&m.u)?;
                self.group.check(&m.v)?;
            }
        }
        let mut coords: BTreeMap<(usize, G::Elem), usize> = BTreeMap::new();
        let mut term_vars = Vec::with_capacity(terms.len());
        for (map, f) in terms {
            let vars: Vec<usize> = self
                .pulled_back(map, f)?
                .into_iter()
                .map(|c| {
                    let next = coords.len();
                    *coords.entry(c).or_insert(next)
                })
                .collect();
            term_vars.push(vars);
        }
        let nvars = coords.len();
        let mut uf = UnionFind::new(nvars);
        for vars in &term_vars {
            for w in vars.windows(2) {
                uf.union(w[0], w[1]);
            }
        }
        let mut clusters: BTreeMap<usize, (Vec<usize>, Vec<usize>)> = BTreeMap::new();
        for v in 0..nvars {
            clusters.entry(uf.find(v)).or_default().0.push(v);
        }
        let mut result = Rational::one();
        for (t, vars) in term_vars.iter().enumerate() {
            match vars.first() {
                Some(&v) => clusters.get_mut(&uf.find(v)).expect("cluster").1.push(t),
                // a constant cylinder function
                None => result *= terms[t].1.value(&[]),
            }
        }
        for (vars, ts) in clusters.values() {
            if vars.len() > MAX_CLUSTER {
                return Err(Error::TooLarge {
                    what: "coordinate cluster".into(),
                    needed: vars.len(),
                    cap: MAX_CLUSTER,
                });
            }
            let local: BTreeMap<usize, usize> = vars.iter().enumerate().map(|(i, &v)| (v, i)).collect();
            let a = self.alphabet();
            let mut sum = Rational::zero();
            let mut letters = vec![0usize; vars.len()];
            for idx in 0..a.pow(vars.len() as u32) {
                let mut rem = idx;
                for slot in letters.iter_mut().rev() {
                    *slot = rem % a;
                    rem /= a;
                }
                let mut prod: Rational = letters.iter().map(|&l| &self.weights[l]).product();
                for &t in ts {
                    if prod.is_zero() {
                        break;
                    }
                    let read: Vec<usize> = term_vars[t].iter().map(|v| letters[local[v]]).collect();
                    prod *= terms[t].1.value(&read);
                }
                sum += prod;
            }
            result *= sum;
            if result.is_zero() {
                break;
            }
        }
        Ok(result)
    }
}

/// The three-factor system with `T1 = R x Id x R`, `T2 = L x R x Id` and the
/// indicator `F(y, z, w) = 1` iff `y_id, z_id, w_id` are pairwise distinct.
#[derive(Debug, Clone)]
pub struct CounterexampleSystem<G: DiscreteGroup> {
    pub system: BernoulliSystem<G>,
    pub indicator: CylinderFunction<G::Elem>,
}

pub const T1_SHIFTS: [Shift; 3] = [Shift::Right, Shift::Id, Shift::Right];
pub const T2_SHIFTS: [Shift; 3] = [Shift::Left, Shift::Right, Shift::Id];

impl<G: DiscreteGroup> CounterexampleSystem<G> {
    pub fn new(group: G) -> Self {
        let e = group.identity();
        let indicator = CylinderFunction::from_fn(vec![(0, e.clone()), (1, e.clone()), (2, e)], 3, |l| {
            if l[0] != l[1] && l[1] != l[2] && l[0] != l[2] {
                Rational::one()
            } else {
                Rational::zero()
            }
        })
        .expect("27-entry table");
        CounterexampleSystem {
            system: BernoulliSystem::uniform(group, 3, 3),
            indicator,
        }
    }

    pub fn t1(&self, g: &G::Elem) -> ProductMap<G::Elem> {
        self.system.power(&T1_SHIFTS, g)
    }

    pub fn t12(&self, g: &G::Elem) -> ProductMap<G::Elem> {
        compose_maps(&self.t1(g), &self.system.power(&T2_SHIFTS, g), &self.system.group)
    }

    /// `nu(A ∩ T1^g A ∩ T1^g T2^g A) = ∫ F (F o T1^{g^-1}) (F o T12^{g^-1})`.
    pub fn correlation(&self, g: &G::Elem) -> Result<Rational> {
        self.system.group.check(g)?;
        let h = self.system.group.inv(g);
        self.system.integrate_product(&[
            (self.system.identity_map(), &self.indicator),
            (self.t1(&h), &self.indicator),
            (self.t12(&h), &self.indicator),
        ])
    }

    pub fn measure_of_a(&self) -> Result<Rational> {
        self.system
            .integrate_product(&[(self.system.identity_map(), &self.indicator)])
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ExponentReport {
    #[serde(with = "rational::serde_q")]
    pub exponent: Rational,
    /// `c < mu(A)^exponent`.
    pub holds: bool,
    /// Enclosure of `ln c`.
    pub lhs_log: Interval,
    /// Enclosure of `exponent * ln mu(A)`.
    pub rhs_log: Interval,
    /// Enclosure of `ln c / ln mu(A)`.
    pub critical_exponent: Interval,
    pub critical_exponent_f64: (f64, f64),
}

/// Certified comparison of `c` with `mu_a^exponent`, plus the critical exponent.
pub fn exponent_check(c: &Rational, mu_a: &Rational, exponent: &Rational, bits: u32) -> Result<ExponentReport> {
    if !exponent.is_positive() {
        return Err(Error::Domain("exponent must be positive".into()));
    }
    let (holds, lhs_log, rhs_log) = interval::compare_with_power(c, mu_a, exponent, bits)?;
    let critical_exponent = interval::ln(c, bits)?.div(&interval::ln(mu_a, bits)?)?;
    Ok(ExponentReport {
        exponent: exponent.clone(),
        holds,
        critical_exponent_f64: critical_exponent.to_f64_pair(),
        lhs_log,
        rhs_log,
        critical_exponent,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct CounterexampleReport {
    #[serde(with = "rational::serde_q")]
    pub mu_a: Rational,
    /// The common value of `c_g` over the tested nonidentity elements.
    #[serde(with = "rational::serde_q::option")]
    pub correlation: Option<Rational>,
    pub elements_tested: usize,
    pub constant_off_identity: bool,
    pub exponent: ExponentReport,
}

/// Evaluates `c_g` on the given nonidentity elements and certifies
/// `c < mu(A)^exponent` for their common value.
pub fn counterexample_check<G: DiscreteGroup>(group: G, elements: &[G::Elem], exponent: &Rational) -> Result<CounterexampleReport> {
    let sys = CounterexampleSystem::new(group);
    let e = sys.system.group.identity();
    if elements.contains(&e) {
        return Err(Error::Domain("the identity is not a test element".into()));
    }
    let mu_a = sys.measure_of_a()?;
    let values = elements.iter().map(|g| sys.correlation(g)).collect::<Result<Vec<_>>>()?;
    let constant_off_identity = values.windows(2).all(|w| w[0] == w[1]);
    let correlation = values.first().cloned();
    let c = correlation
        .clone()
        .ok_or_else(|| Error::Domain("no test elements".into()))?;
    let exponent = exponent_check(&c, &mu_a, exponent, interval::DEFAULT_BITS)?;
    Ok(CounterexampleReport {
        mu_a,
        correlation,
        elements_tested: values.len(),
        constant_off_identity,
        exponent,
    })
}

/// The nonzero elements of `[-r, r]^2`.
pub fn lattice_box(r: i64) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    for a in -r..=r {
        for b in -r..=r {
            if (a, b) != (0, 0) {
                out.push(vec![a, b]);
            }
        }
    }
    out
}

/// Groups on which a Cesàro limit of a function that is constant off a finite
/// set can be evaluated exactly.
pub trait CesaroGroup: DiscreteGroup {
    /// `lim avg_g value(g)` given that `value` is constant off `exceptions`.
    fn limit_off(&self, exceptions: &[Self::Elem], value: &dyn Fn(&Self::Elem) -> Result<Rational>) -> Result<Rational>;
}

impl CesaroGroup for IntegerLattice {
    fn limit_off(&self, exceptions: &[Vec<i64>], value: &dyn Fn(&Vec<i64>) -> Result<Rational>) -> Result<Rational> {
        // box averages converge to the value off the exceptional set
        let far = exceptions
            .iter()
            .flat_map(|e| e.iter().map(|c| c.abs()))
            .max()
            .unwrap_or(0)
            + 1;
        let mut g = vec![0; self.dim];
        if let Some(first) = g.first_mut() {
            *first = far;
        }
        value(&g)
    }
}

impl CesaroGroup for FiniteGroup {
    fn limit_off(&self, _: &[usize], value: &dyn Fn(&usize) -> Result<Rational>) -> Result<Rational> {
        let values = self.elements().map(|g| value(&g)).collect::<Result<Vec<_>>>()?;
        Ok(crate::measure::uniform_average(&values))
    }
}

/// `C-lim_g ||E(h T^g f | trivial)||^2 = C-lim_g (∫ h (f o T^g) d nu)^2`.
///
/// The integrand depends only on which coordinates of `f o T^g` meet those of
/// `h`, so it is constant off the finite set of `g` producing a collision.
pub fn weak_mixing_seminorm<G: CesaroGroup>(
    sys: &BernoulliSystem<G>,
    shifts: &[Shift],
    f: &CylinderFunction<G::Elem>,
    h: &CylinderFunction<G::Elem>,
) -> Result<Rational> {
    if shifts.len() != sys.factors {
        return Err(Error::Domain("one shift per factor required".into()));
    }
    let group = &sys.group;
    let mut exceptions = Vec::new();
    for (i, k) in &f.support {
        for (j, l) in &h.support {
            if i != j {
                continue;
            }
            match shifts[*i] {
                // k g = l
                Shift::Right => exceptions.push(group.mul(&group.inv(k), l)),
                // g^-1 k = l
                Shift::Left => exceptions.push(group.mul(k, &group.inv(l))),
                Shift::Id => {}
            }
        }
    }
    let value = |g: &G::Elem| -> Result<Rational> {
        let v = sys.integrate_product(&[(sys.identity_map(), h), (sys.power(shifts, g), f)])?;
        Ok(&v * &v)
    };
    group.limit_off(&exceptions, &value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    #[test]
    fn single_letter_indicator() {
        let sys = BernoulliSystem::uniform(IntegerLattice::new(1), 3, 1);
        let f = CylinderFunction::from_fn(vec![(0, vec![5])], 3, |l| if l[0] == 1 { q(1, 1) } else { q(0, 1) }).unwrap();
        assert_eq!(sys.integrate_product(&[(sys.identity_map(), &f)]).unwrap(), q(1, 3));
    }

    #[test]
    fn counterexample_values() {
        let sys = CounterexampleSystem::new(IntegerLattice::new(2));
        assert_eq!(sys.measure_of_a().unwrap(), q(2, 9));
        assert_eq!(sys.correlation(&vec![0, 0]).unwrap(), q(2, 9));
        assert_eq!(sys.correlation(&vec![1, 0]).unwrap(), q(2, 243));
        assert_eq!(sys.correlation(&vec![-3, 7]).unwrap(), q(2, 243));
    }

    #[test]
    fn letter_table_roundtrip() {
        let f = CylinderFunction::from_fn(vec![(0, 0usize), (1, 2)], 2, |l| q(l[0] as i64 + 2 * l[1] as i64, 3)).unwrap();
        let table: BTreeMap<String, Rational> = f
            .letter_table()
            .into_iter()
            .map(|(k, v)| (k, rational::parse(&v).unwrap()))
            .collect();
        assert_eq!(table["01"], q(2, 3));
        let back = CylinderFunction::from_letter_table(f.support.clone(), 2, &table).unwrap();
        assert_eq!(back, f);
        let mut partial = table.clone();
        partial.remove("11");
        assert!(CylinderFunction::from_letter_table(f.support.clone(), 2, &partial).is_err());
    }

    #[test]
    fn malformed_elements_rejected() {
        let sys = CounterexampleSystem::new(IntegerLattice::new(2));
        assert!(sys.correlation(&vec![1]).is_err());
        let fin = CounterexampleSystem::new(FiniteGroup::cyclic(5));
        assert!(fin.correlation(&7).is_err());
    }
}
