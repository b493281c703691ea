//! Random finite groups, systems, observables and measures for property
//! suites.
//!
//! Commuting systems are coset spaces: `G^k` acts on `G^k / K` by left
//! multiplication, and the `i`-th action is the restriction to the `i`-th
//! coordinate copy of `G`. Coordinate copies commute, so any union of such
//! orbits (with any orbit weights) is a valid system with `k` commuting actions.

use std::sync::Arc;

use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::group::FiniteGroup;
use crate::measure::GroupMeasure;
use crate::rational::Rational;
use crate::system::{Action, FiniteMPS, Observable};

/// A named catalog of small groups.
pub fn catalog(max_order: usize) -> Vec<(String, FiniteGroup)> {
    let c = FiniteGroup::cyclic;
    let mut out: Vec<(String, FiniteGroup)> = (1..=12).map(|n| (format!("Z{n}"), c(n))).collect();
    out.push(("Z2xZ2".into(), FiniteGroup::product(&[c(2), c(2)])));
    out.push(("Z2xZ4".into(), FiniteGroup::product(&[c(2), c(4)])));
    out.push(("Z2xZ2xZ2".into(), FiniteGroup::product(&[c(2), c(2), c(2)])));
    out.push(("Z3xZ3".into(), FiniteGroup::product(&[c(3), c(3)])));
    out.push(("Z2xZ6".into(), FiniteGroup::product(&[c(2), c(6)])));
    for n in 3..=6 {
        out.push((format!("D{n}"), FiniteGroup::dihedral(n)));
    }
    out.push(("Q8".into(), FiniteGroup::quaternion()));
    let a4 = FiniteGroup::from_permutations(&[vec![1, 2, 0, 3], vec![1, 0, 3, 2]]).expect("A4 generators");
    out.push(("A4".into(), a4));
    out.retain(|(_, g)| g.order() <= max_order);
    out
}

pub fn random_group<R: Rng>(rng: &mut R, min_order: usize, max_order: usize) -> (String, Arc<FiniteGroup>) {
    let mut options = catalog(max_order);
    options.retain(|(_, g)| g.order() >= min_order);
    let (name, g) = options.choose(rng).expect("catalog covers the range").clone();
    (name, Arc::new(g))
}

/// Embedding of `G` into the `i`-th coordinate of `G^k` (row-major indexing,
/// first coordinate most significant).
fn embed(n: usize, k: usize, i: usize, g: usize) -> usize {
    g * n.pow((k - 1 - i) as u32)
}

/// One orbit type: the coset space `G^k / K` for a subgroup `K ≤ G^k`.
#[derive(Debug, Clone)]
pub struct CosetSpace {
    /// Cosets of `K`, each as sorted elements of `G^k`.
    pub cosets: Vec<Vec<usize>>,
    /// `perms[i][g]` is the permutation of cosets induced by `T_i^g`.
    pub perms: Vec<Vec<Vec<usize>>>,
}

pub fn coset_space(group: &FiniteGroup, k: usize, subgroup_gens: &[usize]) -> CosetSpace {
    let n = group.order();
    let power = FiniteGroup::product(&vec![group.clone(); k]);
    let sub = power.subgroup(subgroup_gens);
    let cosets = power.left_cosets(&sub);
    let mut owner = vec![0; power.order()];
    for (c, members) in cosets.iter().enumerate() {
        for &x in members {
            owner[x] = c;
        }
    }
    let perms = (0..k)
        .map(|i| {
            group
                .elements()
                .map(|g| {
                    let e = embed(n, k, i, g);
                    cosets.iter().map(|c| owner[power.mul(e, c[0])]).collect()
                })
                .collect()
        })
        .collect();
    CosetSpace { cosets, perms }
}

/// A random subgroup of `G^k` whose index lies in `[min_points, max_points]`,
/// found by rejection over subgroups generated by up to three random elements.
fn random_coset_space<R: Rng>(
    rng: &mut R,
    group: &FiniteGroup,
    k: usize,
    min_points: usize,
    max_points: usize,
) -> Result<CosetSpace> {
    let total = group.order().pow(k as u32);
    for _ in 0..400 {
        let count = rng.gen_range(0..=3);
        let gens: Vec<usize> = (0..count).map(|_| rng.gen_range(0..total)).collect();
        let space = coset_space(group, k, &gens);
        let len = space.cosets.len();
        if (min_points..=max_points).contains(&len) {
            return Ok(space);
        }
    }
    Err(Error::Construction(format!(
        "no subgroup of G^{k} (|G| = {}) with index in [{min_points}, {max_points}]",
        group.order()
    )))
}

/// Assemble a system from orbits with the given orbit weights.
pub fn system_from_orbits(group: Arc<FiniteGroup>, k: usize, orbits: &[CosetSpace], weights: &[Rational]) -> Result<FiniteMPS> {
    let n_points: usize = orbits.iter().map(|o| o.cosets.len()).sum();
    let mut labels = Vec::with_capacity(n_points);
    let mut masses = Vec::with_capacity(n_points);
    for (o, (orbit, w)) in orbits.iter().zip(weights).enumerate() {
        let size = Rational::from_integer(orbit.cosets.len().into());
        for c in 0..orbit.cosets.len() {
            labels.push(format!("o{o}c{c}"));
            masses.push(w / &size);
        }
    }
    let actions = (0..k)
        .map(|i| {
            Action::from_table(
                group
                    .elements()
                    .map(|g| {
                        let mut perm = Vec::with_capacity(n_points);
                        let mut offset = 0;
                        for orbit in orbits {
                            perm.extend(orbit.perms[i][g].iter().map(|&c| c + offset));
                            offset += orbit.cosets.len();
                        }
                        perm
                    })
                    .collect(),
            )
        })
        .collect();
    FiniteMPS::new(group, labels, masses, actions)
}

/// Positive weights with small denominators summing to 1.
pub fn random_probability<R: Rng>(rng: &mut R, len: usize) -> Vec<Rational> {
    let raw: Vec<u32> = (0..len).map(|_| rng.gen_range(1..=6)).collect();
    let total: u32 = raw.iter().sum();
    raw.into_iter()
        .map(|r| Rational::new(r.into(), total.into()))
        .collect()
}

/// A random system with `k` commuting actions of `group`, made of one or two
/// orbits and `|X| <= max_points`.
pub fn random_system<R: Rng>(rng: &mut R, group: Arc<FiniteGroup>, k: usize, max_points: usize, ergodic: bool) -> Result<FiniteMPS> {
    let orbit_count = if ergodic || max_points < 2 { 1 } else { rng.gen_range(1..=2) };
    let mut orbits = Vec::new();
    let mut room = max_points;
    for o in 0..orbit_count {
        let reserve = orbit_count - o - 1;
        let orbit = random_coset_space(rng, &group, k, 1, room - reserve)?;
        room -= orbit.cosets.len();
        orbits.push(orbit);
    }
    let weights = random_probability(rng, orbits.len());
    system_from_orbits(group, k, &orbits, &weights)
}

/// A random group (order in range) with a random system on it, retrying over groups.
pub fn random_group_and_system<R: Rng>(
    rng: &mut R,
    orders: (usize, usize),
    k: usize,
    max_points: usize,
    ergodic: bool,
) -> (String, FiniteMPS) {
    loop {
        let (name, group) = random_group(rng, orders.0, orders.1);
        if let Ok(x) = random_system(rng, group, k, max_points, ergodic) {
            return (name, x);
        }
    }
}

/// `Y1 x Y2` with `Y_i = G / H_i` transitive, `T1` acting on `Y1` and `T2` on
/// `Y2`: ergodic, with `I1 ∨ I2` full, hence magic.
pub fn random_magic_product<R: Rng>(rng: &mut R, group: Arc<FiniteGroup>, max_points: usize) -> Result<FiniteMPS> {
    let n = group.order();
    for _ in 0..200 {
        let h1 = group.subgroup(&[rng.gen_range(0..n)]);
        let h2 = group.subgroup(&[rng.gen_range(0..n)]);
        let points = (n / h1.len()) * (n / h2.len());
        if points > max_points {
            continue;
        }
        // H1 x H2 inside G^2
        let gens: Vec<usize> = h1
            .iter()
            .map(|&a| embed(n, 2, 0, a))
            .chain(h2.iter().map(|&b| embed(n, 2, 1, b)))
            .collect();
        let space = coset_space(&group, 2, &gens);
        return system_from_orbits(group, 2, &[space], &[Rational::from_integer(1.into())]);
    }
    Err(Error::Construction("no product of coset spaces fits".into()))
}

/// Values `j / d` with `d <= 4`, in `[0, 1]` when `unit` is set, else in `[-2, 2]`.
pub fn random_observable<R: Rng>(rng: &mut R, n: usize, unit: bool) -> Observable {
    Observable::new(
        (0..n)
            .map(|_| {
                let d: i64 = rng.gen_range(1..=4);
                let j: i64 = if unit { rng.gen_range(0..=d) } else { rng.gen_range(-2 * d..=2 * d) };
                Rational::new(j.into(), d.into())
            })
            .collect(),
    )
}

pub fn random_subset<R: Rng>(rng: &mut R, n: usize) -> Vec<usize> {
    loop {
        let s: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.5)).collect();
        if !s.is_empty() {
            return s;
        }
    }
}

pub fn random_group_measure<R: Rng>(rng: &mut R, group: Arc<FiniteGroup>) -> GroupMeasure {
    let n = group.order();
    let mut weights = vec![Rational::zero(); n];
    let support = rng.gen_range(1..=n);
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(rng);
    for (slot, w) in idx[..support].iter().zip(random_probability(rng, support)) {
        weights[*slot] = w;
    }
    GroupMeasure::new(group, weights).expect("probability vector")
}

/// A vector-valued function on the group with small rational entries.
pub fn random_vector_function<R: Rng>(rng: &mut R, order: usize, dim: usize) -> Vec<Vec<Rational>> {
    (0..order)
        .map(|_| {
            (0..dim)
                .map(|_| Rational::new(rng.gen_range(-6i64..=6).into(), rng.gen_range(1i64..=3).into()))
                .collect()
        })
        .collect()
}
