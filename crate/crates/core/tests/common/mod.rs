#![allow(dead_code)]

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use recurlab::rational::q;
use recurlab::system::Action;
use recurlab::{FiniteGroup, FiniteMPS, Rational};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn labels(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("p{i}")).collect()
}

/// `{a, b}` uniform, `G = Z/2`, `T1` = swap, `T2` = identity.
pub fn two_point_swap() -> FiniteMPS {
    let g = Arc::new(FiniteGroup::cyclic(2));
    let t1 = Action::from_table(vec![vec![0, 1], vec![1, 0]]);
    let t2 = Action::trivial(&g, 2);
    FiniteMPS::new(g, vec!["a".into(), "b".into()], vec![q(1, 2), q(1, 2)], vec![t1, t2]).unwrap()
}

/// `G1 x G2` with `G = G1 x G2` acting by `T1^{(a,b)}(x, y) = (a x, y)` and
/// `T2^{(a,b)}(x, y) = (x, b y)`.
pub fn product_translation(g1: &FiniteGroup, g2: &FiniteGroup) -> FiniteMPS {
    let (n1, n2) = (g1.order(), g2.order());
    let g = Arc::new(FiniteGroup::product(&[g1.clone(), g2.clone()]));
    let n = n1 * n2;
    let t1 = Action::from_table(
        g.elements()
            .map(|e| (0..n).map(|p| g1.mul(e / n2, p / n2) * n2 + p % n2).collect())
            .collect(),
    );
    let t2 = Action::from_table(
        g.elements()
            .map(|e| (0..n).map(|p| (p / n2) * n2 + g2.mul(e % n2, p % n2)).collect())
            .collect(),
    );
    FiniteMPS::new(g, labels(n), vec![q(1, n as i64); n], vec![t1, t2]).unwrap()
}

/// `mu(T^g A)` style helper: the image of a set under a permutation.
pub fn image(perm: &[usize], set: &[usize]) -> Vec<usize> {
    let mut out: Vec<usize> = set.iter().map(|&x| perm[x]).collect();
    out.sort_unstable();
    out
}

pub fn intersect(a: &[usize], b: &[usize]) -> Vec<usize> {
    a.iter().copied().filter(|x| b.contains(x)).collect()
}

pub fn mass(x: &FiniteMPS, set: &[usize]) -> Rational {
    set.iter().map(|&p| x.masses()[p].clone()).sum()
}
