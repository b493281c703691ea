//! Partitions of a finite point set, standing in for sub-σ-algebras.

use std::fmt;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::Rational;

/// Where a partition came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Provenance {
    /// Orbits of the group generated by the listed actions (0-based).
    Orbits(Vec<usize>),
    /// Orbits of the diagonal action `g -> prod_i T_i^g` over the listed actions.
    DiagonalOrbits(Vec<usize>),
    /// No action selected: every set is invariant.
    NoActionsSelected,
    /// Kronecker factor of a finite system: every `L^2` subspace is
    /// finite-dimensional, so the factor is everything.
    KroneckerFull,
    Join,
    Meet,
    Explicit,
}

#[derive(Debug, Clone, Serialize)]
pub struct Partition {
    #[serde(skip)]
    block_of: Vec<usize>,
    blocks: Vec<Vec<usize>>,
    provenance: Provenance,
}

impl PartialEq for Partition {
    fn eq(&self, other: &Self) -> bool {
        self.blocks == other.blocks
    }
}

impl Eq for Partition {}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .blocks
            .iter()
            .map(|b| format!("{{{}}}", b.iter().map(usize::to_string).collect::<Vec<_>>().join(",")))
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

impl Partition {
    /// Partition whose blocks are the classes of `labels` (any values).
    pub fn from_labels(labels: &[usize], provenance: Provenance) -> Self {
        let mut relabel = std::collections::HashMap::new();
        let mut block_of = Vec::with_capacity(labels.len());
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        for (x, l) in labels.iter().enumerate() {
            let b = *relabel.entry(l).or_insert_with(|| {
                blocks.push(Vec::new());
                blocks.len() - 1
            });
            blocks[b].push(x);
            block_of.push(b);
        }
        // first-seen order already sorts blocks by smallest element
        Partition {
            block_of,
            blocks,
            provenance,
        }
    }

    pub fn from_blocks(n: usize, blocks: &[Vec<usize>]) -> Result<Self> {
        let mut labels = vec![usize::MAX; n];
        for (b, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return Err(Error::Structural("empty block".into()));
            }
            for &x in block {
                if x >= n {
                    return Err(Error::Structural(format!("point {x} outside 0..{n}")));
                }
                if labels[x] != usize::MAX {
                    return Err(Error::Structural(format!("point {x} in two blocks")));
                }
                labels[x] = b;
            }
        }
        if let Some(x) = labels.iter().position(|&l| l == usize::MAX) {
            return Err(Error::Structural(format!("point {x} not covered")));
        }
        Ok(Self::from_labels(&labels, Provenance::Explicit))
    }

    /// The partition into singletons (everything is measurable).
    pub fn singletons(n: usize) -> Self {
        Self::from_labels(&(0..n).collect::<Vec<_>>(), Provenance::Explicit)
    }

    /// One block (only constants are measurable).
    pub fn one_block(n: usize) -> Self {
        Self::from_labels(&vec![0; n], Provenance::Explicit)
    }

    pub fn kronecker_full(n: usize) -> Self {
        Self::singletons(n).with_provenance(Provenance::KroneckerFull)
    }

    /// Orbits of the group generated by `perms`.
    pub fn orbits<'a>(n: usize, perms: impl IntoIterator<Item = &'a [usize]>, provenance: Provenance) -> Self {
        let mut uf = UnionFind::new(n);
        for p in perms {
            for (x, &y) in p.iter().enumerate() {
                uf.union(x, y);
            }
        }
        let labels: Vec<usize> = (0..n).map(|x| uf.find(x)).collect();
        Self::from_labels(&labels, provenance)
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = provenance;
        self
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn len_points(&self) -> usize {
        self.block_of.len()
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn block_of(&self, x: usize) -> usize {
        self.block_of[x]
    }

    /// Coarsest common refinement: blocks are the nonempty intersections.
    pub fn join(&self, other: &Partition) -> Partition {
        assert_eq!(self.len_points(), other.len_points(), "partitions of different sets");
        let n = self.len_points();
        let labels: Vec<usize> = (0..n)
            .map(|x| self.block_of[x] * other.num_blocks() + other.block_of[x])
            .collect();
        Self::from_labels(&labels, Provenance::Join)
    }

    /// Finest common coarsening: connected components of the block-overlap graph.
    pub fn meet(&self, other: &Partition) -> Partition {
        assert_eq!(self.len_points(), other.len_points(), "partitions of different sets");
        let n = self.len_points();
        let mut uf = UnionFind::new(n);
        for block in self.blocks.iter().chain(&other.blocks) {
            for w in block.windows(2) {
                uf.union(w[0], w[1]);
            }
        }
        let labels: Vec<usize> = (0..n).map(|x| uf.find(x)).collect();
        Self::from_labels(&labels, Provenance::Meet)
    }

    /// Every block of `self` lies inside a block of `coarser`.
    pub fn refines(&self, coarser: &Partition) -> bool {
        self.blocks
            .iter()
            .all(|b| b.iter().all(|&x| coarser.block_of[x] == coarser.block_of[b[0]]))
    }

    pub fn is_measurable(&self, f: &[Rational]) -> bool {
        self.blocks.iter().all(|b| b.iter().all(|&x| f[x] == f[b[0]]))
    }

    /// First block on which `f` is not constant, with two disagreeing points.
    pub fn measurability_witness(&self, f: &[Rational]) -> Option<(usize, usize)> {
        self.blocks.iter().find_map(|b| {
            b.iter()
                .find(|&&x| f[x] != f[b[0]])
                .map(|&x| (b[0], x))
        })
    }

    pub fn block_indicator(&self, b: usize) -> Vec<Rational> {
        let mut v = vec![Rational::zero(); self.len_points()];
        for &x in &self.blocks[b] {
            v[x] = Rational::one();
        }
        v
    }

    /// Restriction to the points of positive mass.
    fn restricted(&self, masses: &[Rational]) -> Vec<Vec<usize>> {
        self.blocks
            .iter()
            .map(|b| b.iter().copied().filter(|&x| !masses[x].is_zero()).collect::<Vec<_>>())
            .filter(|b| !b.is_empty())
            .collect()
    }

    /// Equality of the generated σ-algebras modulo null sets.
    pub fn equivalent_mod_null(&self, other: &Partition, masses: &[Rational]) -> bool {
        let mut a = self.restricted(masses);
        let mut b = other.restricted(masses);
        a.sort();
        b.sort();
        a == b
    }

    /// At most one block carries positive mass.
    pub fn is_trivial_mod_null(&self, masses: &[Rational]) -> bool {
        self.restricted(masses).len() <= 1
    }

    pub fn is_full_mod_null(&self, masses: &[Rational]) -> bool {
        self.restricted(masses).iter().all(|b| b.len() == 1)
    }
}

pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub(crate) fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // smaller root wins, keeping labels deterministic
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}
