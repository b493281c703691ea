mod common;

use std::collections::BTreeSet;
use std::sync::Arc;

use common::rng;
use proptest::prelude::*;
use rand::Rng;
use recurlab::density::*;
use recurlab::generate;
use recurlab::rational::q;
use recurlab::recurrence::roth_verify;
use recurlab::{FiniteGroup, Rational};

fn pairs(n: usize, members: &[usize]) -> Vec<(usize, usize)> {
    members.iter().map(|&p| (p / n, p % n)).collect()
}

#[test]
fn finite_density_examples() {
    let g = Arc::new(FiniteGroup::dihedral(4));
    let all: Vec<usize> = g.elements().collect();
    let r = upper_density(&DensitySpec::Finite { group: g.clone(), members: all }).unwrap();
    assert_eq!(r.exact, Some(q(1, 1)));
    let r = upper_density(&DensitySpec::Finite { group: g.clone(), members: vec![] }).unwrap();
    assert_eq!(r.exact, Some(q(0, 1)));
    assert!(finite_density(&g, &[99]).is_err());
}

#[test]
fn even_integers() {
    let spec = DensitySpec::Lattice {
        dim: 1,
        set: LatticeSet::Predicate(Predicate::Even),
        radii: vec![1, 2, 5, 10, 50],
        scan: 3,
    };
    let r = upper_density(&spec).unwrap();
    for w in &r.windows {
        let n = w.radius;
        assert_eq!(w.value, q(n + 1, 2 * n + 1));
        assert!(w.value.clone() - q(1, 2) <= q(1, 2 * (2 * n + 1)));
    }
    assert_eq!(r.monotone, Some(true));
    let empty = DensitySpec::Lattice { dim: 1, set: LatticeSet::Predicate(Predicate::Even), radii: vec![], scan: 0 };
    assert!(upper_density(&empty).is_err());
}

#[test]
fn predicates_parse_and_are_deterministic() {
    assert_eq!(Predicate::parse("even").unwrap(), Predicate::Even);
    assert_eq!(Predicate::parse("even-diagonal").unwrap(), Predicate::EvenDiagonal);
    assert!(Predicate::parse("odd").is_err());
    assert!(Predicate::parse("random:3/2,1").is_err());
    let p = Predicate::parse("random:1/3,7").unwrap();
    let again = Predicate::parse("random:1/3,7").unwrap();
    let mut hits = 0;
    for x in -30..30 {
        for y in -30..30 {
            assert_eq!(p.contains(&[x, y]), again.contains(&[x, y]));
            hits += p.contains(&[x, y]) as usize;
        }
    }
    let frac = hits as f64 / 3600.0;
    assert!((frac - 1.0 / 3.0).abs() < 0.05, "{frac}");
    assert!(Predicate::EvenDiagonal.contains(&[3, 5]) && !Predicate::EvenDiagonal.contains(&[3, 4]));
}

#[test]
fn corners_whole_square_and_diagonal() {
    for n in 2..6 {
        let g = Arc::new(FiniteGroup::cyclic(n));
        let all: Vec<(usize, usize)> = (0..n).flat_map(|x| (0..n).map(move |y| (x, y))).collect();
        let r = corners_check(g.clone(), &all, &q(1, 10)).unwrap();
        assert_eq!(r.good.len(), n);
        assert!(r.matches_recurrence && r.sets_agree);
        // the diagonal: (x, x), (g^-1 x, x) and (g^-1 x, g^-1 x) all in E only for g = id
        let diag: Vec<(usize, usize)> = (0..n).map(|x| (x, x)).collect();
        let r = corners_check(g.clone(), &diag, &q(1, 100)).unwrap();
        for h in g.elements() {
            let expected = if h == g.id() { q(1, n as i64) } else { q(0, 1) };
            assert_eq!(r.corner_density[h], expected);
        }
        assert!(r.matches_recurrence && r.sets_agree);
    }
}

#[test]
fn corners_on_random_sets_contain_identity() {
    let mut rng = rng(31);
    let g = Arc::new(FiniteGroup::cyclic(5));
    for _ in 0..20 {
        let e = generate::random_subset(&mut rng, 25);
        let r = corners_check(g.clone(), &pairs(5, &e), &q(1, 10)).unwrap();
        assert!(r.good.contains(&g.id()));
        assert!(r.cover.verified);
        assert!(r.matches_recurrence && r.sets_agree);
    }
}

#[test]
fn boundary_points_are_good_but_not_recurrent() {
    // density 1/2 on Z/2 x Z/2, eps = 1/16 - c: choose eps so a corner density hits the threshold
    let g = Arc::new(FiniteGroup::cyclic(2));
    let e = vec![(0, 0), (1, 1)];
    // density 1/2, corner density 1/2 at id and 0 at g; threshold 1/16 - eps = 0 for eps = 1/16
    let r = corners_check(g, &e, &q(1, 16)).unwrap();
    assert_eq!(r.threshold, q(0, 1));
    assert_eq!(r.boundary, vec![1]);
    assert_eq!(r.good, vec![0, 1]);
    assert!(r.sets_agree);
}

#[test]
fn window_corners_on_even_diagonal() {
    let set = LatticeSet::Predicate(Predicate::EvenDiagonal);
    let r = corners_window(&set, 4, 4, &q(1, 10)).unwrap();
    assert!(r.good.contains(&0));
    // (x, y), (x - g, y), (x - g, y - g) with x - y even forces g even
    for (g, v) in &r.values {
        if g % 2 != 0 {
            assert_eq!(v, "0");
        }
    }
    let covered: BTreeSet<i64> = r.inner_cover.iter().flat_map(|k| r.good.iter().map(move |g| k + g)).collect();
    assert!((-2..=2).all(|x| covered.contains(&x)));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn density_translation_invariant_and_monotone(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let (_, g) = generate::random_group(&mut rng, 1, 12);
        let e = generate::random_subset(&mut rng, g.order());
        let t = rng.gen_range(0..g.order());
        let moved: Vec<usize> = e.iter().map(|&x| g.mul(t, x)).collect();
        let d = finite_density(&g, &e).unwrap();
        prop_assert_eq!(&d, &finite_density(&g, &moved).unwrap());
        let mut bigger = e.clone();
        bigger.push(rng.gen_range(0..g.order()));
        prop_assert!(finite_density(&g, &bigger).unwrap() >= d);
    }

    #[test]
    fn corners_agree_with_roth(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let (_, g) = generate::random_group(&mut rng, 1, 6);
        let n = g.order();
        let e = generate::random_subset(&mut rng, n * n);
        prop_assume!(!e.is_empty());
        let eps = q(1, rng.gen_range(2..50));
        let r = corners_check(g.clone(), &pairs(n, &e), &eps).unwrap();
        let x = translation_system(g.clone()).unwrap();
        let roth = roth_verify(&x, &e, &eps).unwrap();
        prop_assert_eq!(&roth.correlations.c, &r.corner_density);
        let strict: Vec<usize> = r.good.iter().copied().filter(|g| !r.boundary.contains(g)).collect();
        prop_assert_eq!(strict, roth.return_set);
        prop_assert_eq!(r.density, roth.correlations.mu_a);
        let _: &Rational = &r.threshold;
    }
}
