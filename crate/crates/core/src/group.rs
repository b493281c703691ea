//! Finite groups as multiplication tables, and the integer lattices `Z^d`.
//!
//! Elements of a [`FiniteGroup`] are indices `0..order`. Products of groups
//! are indexed row-major: for factors of orders `(n_0, .., n_{k-1})` the tuple
//! `(a_0, .., a_{k-1})` has index `((a_0 * n_1 + a_1) * n_2 + a_2) ...`.

use std::collections::{BTreeSet, VecDeque};
use std::fmt::Debug;
use std::hash::Hash;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default cap on the order up to which associativity is checked exhaustively.
pub const DEFAULT_EXHAUSTIVE_CAP: usize = 64;

const SAMPLED_TRIPLES: usize = 100_000;

#[derive(Debug, Clone)]
pub struct FiniteGroup {
    order: usize,
    mul: Vec<usize>,
    id: usize,
    inv: Vec<usize>,
}

impl PartialEq for FiniteGroup {
    fn eq(&self, other: &Self) -> bool {
        self.order == other.order && self.mul == other.mul
    }
}

impl Eq for FiniteGroup {}

impl FiniteGroup {
    pub fn trivial() -> Self {
        Self::cyclic(1)
    }

    pub fn cyclic(n: usize) -> Self {
        assert!(n > 0, "cyclic group of order 0");
        let mul = (0..n * n).map(|k| (k / n + k % n) % n).collect();
        let inv = (0..n).map(|a| (n - a) % n).collect();
        FiniteGroup {
            order: n,
            mul,
            id: 0,
            inv,
        }
    }

    /// Direct product, row-major indexing (first factor most significant).
    pub fn product(factors: &[FiniteGroup]) -> Self {
        let mut acc = Self::trivial();
        for f in factors {
            acc = acc.times(f);
        }
        acc
    }

    fn times(&self, other: &FiniteGroup) -> Self {
        let (n, m) = (self.order, other.order);
        let order = n * m;
        let mut mul = vec![0; order * order];
        for a in 0..order {
            let (a1, a2) = (a / m, a % m);
            for b in 0..order {
                let (b1, b2) = (b / m, b % m);
                mul[a * order + b] = self.mul(a1, b1) * m + other.mul(a2, b2);
            }
        }
        let inv = (0..order)
            .map(|a| self.inv(a / m) * m + other.inv(a % m))
            .collect();
        FiniteGroup {
            order,
            mul,
            id: self.id * m + other.id,
            inv,
        }
    }

    /// Dihedral group of order `2n`: element `r^k s^e` has index `2k + e`.
    pub fn dihedral(n: usize) -> Self {
        assert!(n > 0);
        let order = 2 * n;
        let mut mul = vec![0; order * order];
        for a in 0..order {
            let (k1, e1) = (a / 2, a % 2);
            for b in 0..order {
                let (k2, e2) = (b / 2, b % 2);
                // r^k1 s^e1 r^k2 s^e2 = r^(k1 ± k2) s^(e1 + e2)
                let k = if e1 == 0 { (k1 + k2) % n } else { (k1 + n - k2) % n };
                mul[a * order + b] = 2 * k + (e1 ^ e2);
            }
        }
        Self::from_flat(order, mul).expect("dihedral table is a group")
    }

    /// Quaternion group `{±1, ±i, ±j, ±k}`; index `2u + s` for unit `u` in
    /// `(1, i, j, k)` and sign bit `s`.
    pub fn quaternion() -> Self {
        // unit products: (unit, sign flip)
        const T: [[(usize, usize); 4]; 4] = [
            [(0, 0), (1, 0), (2, 0), (3, 0)],
            [(1, 0), (0, 1), (3, 0), (2, 1)],
            [(2, 0), (3, 1), (0, 1), (1, 0)],
            [(3, 0), (2, 0), (1, 1), (0, 1)],
        ];
        let mut mul = vec![0; 64];
        for a in 0..8 {
            for b in 0..8 {
                let (u, s) = T[a / 2][b / 2];
                mul[a * 8 + b] = 2 * u + ((a % 2) ^ (b % 2) ^ s);
            }
        }
        Self::from_flat(8, mul).expect("quaternion table is a group")
    }

    /// The permutation group generated by `gens`, all of the same degree.
    /// The product is composition `(p * q)(x) = p(q(x))`; index 0 is the identity.
    pub fn from_permutations(gens: &[Vec<usize>]) -> Result<Self> {
        let degree = gens.first().map_or(1, Vec::len);
        for g in gens {
            if g.len() != degree || !is_permutation(g) {
                return Err(Error::Structural(format!("{g:?} is not a permutation of 0..{degree}")));
            }
        }
        let identity: Vec<usize> = (0..degree).collect();
        let mut elements = vec![identity.clone()];
        let mut seen: BTreeSet<Vec<usize>> = BTreeSet::from([identity]);
        let mut queue: VecDeque<usize> = VecDeque::from([0]);
        while let Some(i) = queue.pop_front() {
            for g in gens {
                let p: Vec<usize> = elements[i].iter().map(|&x| g[x]).collect();
                if seen.insert(p.clone()) {
                    elements.push(p);
                    queue.push_back(elements.len() - 1);
                }
            }
        }
        let index: std::collections::HashMap<&Vec<usize>, usize> =
            elements.iter().enumerate().map(|(i, p)| (p, i)).collect();
        let n = elements.len();
        let mut mul = vec![0; n * n];
        for a in 0..n {
            for b in 0..n {
                let p: Vec<usize> = elements[b].iter().map(|&x| elements[a][x]).collect();
                mul[a * n + b] = index[&p];
            }
        }
        Self::from_flat(n, mul)
    }

    /// Validates a table with exhaustive associativity up to `DEFAULT_EXHAUSTIVE_CAP`.
    pub fn from_table(table: &[Vec<usize>]) -> Result<Self> {
        Self::from_table_capped(table, DEFAULT_EXHAUSTIVE_CAP)
    }

    /// Above `cap` associativity is checked on a deterministic sample of triples.
    pub fn from_table_capped(table: &[Vec<usize>], cap: usize) -> Result<Self> {
        let n = table.len();
        if n == 0 {
            return Err(Error::Structural("empty multiplication table".into()));
        }
        if let Some(r) = table.iter().position(|row| row.len() != n) {
            return Err(Error::Structural(format!("row {r} has length {} != {n}", table[r].len())));
        }
        let flat: Vec<usize> = table.iter().flatten().copied().collect();
        let g = Self::from_flat_unchecked_assoc(n, flat)?;
        g.check_associative(cap)?;
        Ok(g)
    }

    fn from_flat(n: usize, mul: Vec<usize>) -> Result<Self> {
        let g = Self::from_flat_unchecked_assoc(n, mul)?;
        g.check_associative(DEFAULT_EXHAUSTIVE_CAP)?;
        Ok(g)
    }

    fn from_flat_unchecked_assoc(n: usize, mul: Vec<usize>) -> Result<Self> {
        if let Some(k) = mul.iter().position(|&v| v >= n) {
            return Err(Error::Structural(format!(
                "entry ({}, {}) = {} is outside 0..{n}",
                k / n,
                k % n,
                mul[k]
            )));
        }
        let id = (0..n)
            .find(|&e| (0..n).all(|x| mul[e * n + x] == x && mul[x * n + e] == x))
            .ok_or_else(|| Error::Structural("no two-sided identity".into()))?;
        let mut inv = vec![0; n];
        for a in 0..n {
            inv[a] = (0..n)
                .find(|&b| mul[a * n + b] == id && mul[b * n + a] == id)
                .ok_or_else(|| Error::Structural(format!("element {a} has no two-sided inverse")))?;
        }
        Ok(FiniteGroup {
            order: n,
            mul,
            id,
            inv,
        })
    }

    fn check_associative(&self, cap: usize) -> Result<()> {
        let n = self.order;
        let fail = |a, b, c| Error::Structural(format!("not associative at ({a}, {b}, {c})"));
        if n <= cap {
            for a in 0..n {
                for b in 0..n {
                    let ab = self.mul(a, b);
                    for c in 0..n {
                        if self.mul(ab, c) != self.mul(a, self.mul(b, c)) {
                            return Err(fail(a, b, c));
                        }
                    }
                }
            }
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(0x9E37_79B9_7F4A_7C15);
            let mut next = || rng.gen_range(0..n);
            for _ in 0..SAMPLED_TRIPLES {
                let (a, b, c) = (next(), next(), next());
                if self.mul(self.mul(a, b), c) != self.mul(a, self.mul(b, c)) {
                    return Err(fail(a, b, c));
                }
            }
        }
        Ok(())
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn id(&self) -> usize {
        self.id
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a * self.order + b]
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inv[a]
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.order
    }

    pub fn table(&self) -> Vec<Vec<usize>> {
        self.mul.chunks(self.order).map(<[usize]>::to_vec).collect()
    }

    pub fn is_abelian(&self) -> bool {
        self.elements()
            .all(|a| self.elements().all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    /// Sorted elements of the subgroup generated by `gens`.
    pub fn subgroup(&self, gens: &[usize]) -> Vec<usize> {
        let mut members = BTreeSet::from([self.id]);
        let mut queue = VecDeque::from([self.id]);
        while let Some(x) = queue.pop_front() {
            for &g in gens {
                let y = self.mul(x, g);
                if members.insert(y) {
                    queue.push_back(y);
                }
            }
        }
        members.into_iter().collect()
    }

    /// Left cosets `xH`, each sorted, ordered by smallest element.
    pub fn left_cosets(&self, subgroup: &[usize]) -> Vec<Vec<usize>> {
        let mut assigned = vec![false; self.order];
        let mut cosets = Vec::new();
        for x in self.elements() {
            if assigned[x] {
                continue;
            }
            let mut c: Vec<usize> = subgroup.iter().map(|&h| self.mul(x, h)).collect();
            c.sort_unstable();
            for &y in &c {
                assigned[y] = true;
            }
            cosets.push(c);
        }
        cosets
    }

    /// Left regular action `x -> g x` as a permutation.
    pub fn left_translation(&self, g: usize) -> Vec<usize> {
        self.elements().map(|x| self.mul(g, x)).collect()
    }
}

pub(crate) fn is_permutation(p: &[usize]) -> bool {
    let mut seen = vec![false; p.len()];
    p.iter().all(|&x| x < p.len() && !std::mem::replace(&mut seen[x], true))
}

/// JSON group descriptor, e.g. `{"kind":"cyclic","n":4}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum GroupDescriptor {
    Cyclic { n: usize },
    Product { factors: Vec<GroupDescriptor> },
    Table { mul: Vec<Vec<usize>> },
    Dihedral { n: usize },
    Quaternion,
}

impl GroupDescriptor {
    pub fn build(&self) -> Result<FiniteGroup> {
        self.build_capped(DEFAULT_EXHAUSTIVE_CAP)
    }

    pub fn build_capped(&self, cap: usize) -> Result<FiniteGroup> {
        match self {
            GroupDescriptor::Cyclic { n } if *n == 0 => {
                Err(Error::Structural("cyclic group of order 0".into()))
            }
            GroupDescriptor::Cyclic { n } => Ok(FiniteGroup::cyclic(*n)),
            GroupDescriptor::Product { factors } => {
                let built = factors
                    .iter()
                    .map(|f| f.build_capped(cap))
                    .collect::<Result<Vec<_>>>()?;
                Ok(FiniteGroup::product(&built))
            }
            GroupDescriptor::Table { mul } => FiniteGroup::from_table_capped(mul, cap),
            GroupDescriptor::Dihedral { n } if *n == 0 => {
                Err(Error::Structural("dihedral group of order 0".into()))
            }
            GroupDescriptor::Dihedral { n } => Ok(FiniteGroup::dihedral(*n)),
            GroupDescriptor::Quaternion => Ok(FiniteGroup::quaternion()),
        }
    }
}

/// A countable group with exact equality and multiplication.
pub trait DiscreteGroup {
    type Elem: Clone + Eq + Ord + Hash + Debug;

    fn identity(&self) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Self::Elem;
    /// Rejects malformed elements (wrong dimension, out of range).
    fn check(&self, a: &Self::Elem) -> Result<()>;
}

impl DiscreteGroup for FiniteGroup {
    type Elem = usize;

    fn identity(&self) -> usize {
        self.id
    }

    fn mul(&self, a: &usize, b: &usize) -> usize {
        FiniteGroup::mul(self, *a, *b)
    }

    fn inv(&self, a: &usize) -> usize {
        FiniteGroup::inv(self, *a)
    }

    fn check(&self, a: &usize) -> Result<()> {
        if *a < self.order {
            Ok(())
        } else {
            Err(Error::Domain(format!("element {a} outside group of order {}", self.order)))
        }
    }
}

/// The additive group `Z^d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IntegerLattice {
    pub dim: usize,
}

impl IntegerLattice {
    pub fn new(dim: usize) -> Self {
        IntegerLattice { dim }
    }
}

impl DiscreteGroup for IntegerLattice {
    type Elem = Vec<i64>;

    fn identity(&self) -> Vec<i64> {
        vec![0; self.dim]
    }

    fn mul(&self, a: &Vec<i64>, b: &Vec<i64>) -> Vec<i64> {
        a.iter().zip(b).map(|(x, y)| x + y).collect()
    }

    fn inv(&self, a: &Vec<i64>) -> Vec<i64> {
        a.iter().map(|x| -x).collect()
    }

    fn check(&self, a: &Vec<i64>) -> Result<()> {
        if a.len() == self.dim {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "lattice element {a:?} has dimension {} but the group is Z^{}",
                a.len(),
                self.dim
            )))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_group_axioms(g: &FiniteGroup) {
        for a in g.elements() {
            assert_eq!(g.mul(g.id(), a), a);
            assert_eq!(g.mul(a, g.id()), a);
            assert_eq!(g.mul(a, g.inv(a)), g.id());
            assert_eq!(g.mul(g.inv(a), a), g.id());
        }
    }

    #[test]
    fn catalog_groups_satisfy_axioms() {
        for g in [
            FiniteGroup::cyclic(7),
            FiniteGroup::dihedral(4),
            FiniteGroup::quaternion(),
            FiniteGroup::product(&[FiniteGroup::cyclic(2), FiniteGroup::cyclic(3)]),
        ] {
            assert_group_axioms(&g);
            FiniteGroup::from_table(&g.table()).unwrap();
        }
    }

    #[test]
    fn dihedral_and_quaternion_are_nonabelian() {
        assert!(!FiniteGroup::dihedral(3).is_abelian());
        assert!(!FiniteGroup::quaternion().is_abelian());
        assert!(FiniteGroup::dihedral(1).is_abelian());
        // Q8 has a unique involution, D4 has five
        let involutions = |g: &FiniteGroup| {
            g.elements().filter(|&a| a != g.id() && g.mul(a, a) == g.id()).count()
        };
        assert_eq!(involutions(&FiniteGroup::quaternion()), 1);
        assert_eq!(involutions(&FiniteGroup::dihedral(4)), 5);
    }

    #[test]
    fn product_indexing_is_row_major() {
        let g = FiniteGroup::product(&[FiniteGroup::cyclic(2), FiniteGroup::cyclic(3)]);
        // (1,2) * (1,2) = (0,1)
        assert_eq!(g.mul(5, 5), 1);
        assert_eq!(g.order(), 6);
    }

    #[test]
    fn permutation_closure_gives_s3() {
        let g = FiniteGroup::from_permutations(&[vec![1, 0, 2], vec![1, 2, 0]]).unwrap();
        assert_eq!(g.order(), 6);
        assert_eq!(g.id(), 0);
        assert!(!g.is_abelian());
    }

    #[test]
    fn rejects_bad_tables() {
        assert!(FiniteGroup::from_table(&[vec![0, 1], vec![1, 1]]).is_err());
        assert!(FiniteGroup::from_table(&[vec![0, 2], vec![1, 0]]).is_err());
        assert!(FiniteGroup::from_table(&[vec![0, 1]]).is_err());
        // a quasigroup with identity that is not associative (order 5 loop)
        let loop5 = vec![
            vec![0, 1, 2, 3, 4],
            vec![1, 0, 3, 4, 2],
            vec![2, 4, 0, 1, 3],
            vec![3, 2, 4, 0, 1],
            vec![4, 3, 1, 2, 0],
        ];
        assert!(matches!(FiniteGroup::from_table(&loop5), Err(Error::Structural(_))));
    }

    #[test]
    fn sampled_associativity_above_cap() {
        let g = FiniteGroup::cyclic(10);
        assert!(FiniteGroup::from_table_capped(&g.table(), 4).is_ok());
    }

    #[test]
    fn cosets_partition_the_group() {
        let g = FiniteGroup::dihedral(3);
        let h = g.subgroup(&[1]);
        assert_eq!(h.len(), 2);
        let cosets = g.left_cosets(&h);
        assert_eq!(cosets.len(), 3);
        let mut all: Vec<usize> = cosets.concat();
        all.sort_unstable();
        assert_eq!(all, (0..6).collect::<Vec<_>>());
    }

    #[test]
    fn descriptor_json() {
        let d: GroupDescriptor = serde_json::from_str(
            r#"{"kind":"product","factors":[{"kind":"cyclic","n":2},{"kind":"table","mul":[[0,1],[1,0]]}]}"#,
        )
        .unwrap();
        let g = d.build().unwrap();
        assert_eq!(g.order(), 4);
        assert!(GroupDescriptor::Cyclic { n: 0 }.build().is_err());
    }

    #[test]
    fn lattice_checks_dimension() {
        let z2 = IntegerLattice::new(2);
        assert_eq!(z2.mul(&vec![1, 2], &vec![3, -5]), vec![4, -3]);
        assert!(z2.check(&vec![1]).is_err());
    }
}
