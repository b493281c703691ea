mod common;

use std::sync::Arc;

use common::*;
use proptest::prelude::*;
use recurlab::cube::*;
use recurlab::generate;
use recurlab::measure::ReiterSequence;
use recurlab::rational::q;
use recurlab::recurrence::Weight;
use recurlab::system::{Action, Observable};
use recurlab::{FiniteGroup, FiniteMPS, Rational};

fn indicator(n: usize, set: &[usize]) -> Vec<Rational> {
    Observable::indicator(n, set).into_inner()
}

/// `avg_{g1,g2} mu(A0 ∩ T1^{g1} A1 ∩ T2^{g2} A2 ∩ T1^{g1} T2^{g2} A12)` with literal set images.
fn cube_oracle(x: &FiniteMPS, sets: [&[usize]; 4]) -> Rational {
    let g = x.group();
    let mut total = Rational::from_integer(0.into());
    for g1 in g.elements() {
        for g2 in g.elements() {
            let t1 = x.action(0).perm(g1);
            let t2 = x.action(1).perm(g2);
            let t12: Vec<usize> = t2.iter().map(|&y| t1[y]).collect();
            let s = intersect(
                &intersect(sets[0], &image(t1, sets[1])),
                &intersect(&image(t2, sets[2]), &image(&t12, sets[3])),
            );
            total += mass(x, &s);
        }
    }
    total / Rational::from_integer((g.order() * g.order()).into())
}

#[test]
fn cube_measure_examples() {
    let x = two_point_swap();
    let cube = cube_measure(&x).unwrap();
    let all = indicator(2, &[0, 1]);
    let a = indicator(2, &[0]);
    assert_eq!(cube_integral(&cube, [&all, &all, &all, &all]), q(1, 1));
    assert_eq!(cube_integral(&cube, [&a, &a, &a, &a]), q(1, 4));
    assert_eq!(cube_integral(&cube, [&all, &a, &a, &a]), q(1, 4));
    assert!(cube.invariance_report().all_hold());
}

#[test]
fn cube_measure_matches_set_oracle_on_point_boxes() {
    let mut rng = rng(11);
    for _ in 0..10 {
        let (_, x) = generate::random_group_and_system(&mut rng, (2, 6), 2, 8, false);
        let cube = cube_measure(&x).unwrap();
        let n = x.len();
        for p in 0..n {
            for s in 0..n {
                let (qq, r) = ((p + 1) % n, (s + 2) % n);
                let expected = cube_oracle(&x, [&[p], &[qq], &[r], &[s]]);
                assert_eq!(cube.measure().mass(&[p, qq, r, s]), expected);
            }
        }
    }
}

#[test]
fn cube_measure_is_independent_of_the_reiter_sequences() {
    let mut rng = rng(12);
    for _ in 0..8 {
        let (_, x) = generate::random_group_and_system(&mut rng, (2, 6), 2, 10, false);
        let g = x.group().clone();
        let nu1 = generate::random_group_measure(&mut rng, g.clone());
        let nu2 = generate::random_group_measure(&mut rng, g.clone());
        let a = ReiterSequence::perturbed_uniform(nu1, 1, 4);
        let b = ReiterSequence::perturbed_uniform(nu2, 2, 4);
        let along = cube_measure_along(&x, &a, &b).unwrap();
        assert_eq!(along.measure(), cube_measure(&x).unwrap().measure());
        let u = ReiterSequence::uniform(g, 1);
        assert_eq!(cube_measure_along(&x, &u, &u).unwrap().measure(), cube_measure(&x).unwrap().measure());
    }
}

#[test]
fn cube_measure_rejects_oversized_systems() {
    let g = Arc::new(FiniteGroup::cyclic(1));
    let n = 40;
    let x = FiniteMPS::new(
        g.clone(),
        labels(n),
        vec![q(1, n as i64); n],
        vec![Action::trivial(&g, n), Action::trivial(&g, n)],
    )
    .unwrap();
    assert!(matches!(cube_measure(&x), Err(recurlab::Error::TooLarge { .. })));
    assert!(cube_measure_capped(&x, 3_000_000).is_ok());
}

#[test]
fn cubic_average_two_ways() {
    let mut rng = rng(13);
    for _ in 0..10 {
        let (_, x) = generate::random_group_and_system(&mut rng, (2, 8), 2, 12, false);
        let fs: Vec<Vec<Rational>> = (0..4)
            .map(|_| generate::random_observable(&mut rng, x.len(), false).into_inner())
            .collect();
        let cube = cube_measure(&x).unwrap();
        assert_eq!(
            cube_integral(&cube, [&fs[0], &fs[1], &fs[2], &fs[3]]),
            cubic_average(&x, [&fs[0], &fs[1], &fs[2], &fs[3]])
        );
    }
}

#[test]
fn magic_examples() {
    let x = product_translation(&FiniteGroup::cyclic(2), &FiniteGroup::cyclic(3));
    let r = magic_check(&x).unwrap();
    assert!(r.magic && r.seminorm_agrees);

    let g = Arc::new(FiniteGroup::cyclic(3));
    let two = FiniteMPS::new(
        g.clone(),
        labels(2),
        vec![q(1, 3), q(2, 3)],
        vec![Action::trivial(&g, 2), Action::trivial(&g, 2)],
    )
    .unwrap();
    assert!(magic_check(&two).unwrap().magic);

    let z2 = Arc::new(FiniteGroup::cyclic(2));
    let swap = Action::from_table(vec![vec![0, 1, 2, 3], vec![1, 0, 3, 2]]);
    let x = FiniteMPS::new(z2, labels(4), vec![q(1, 4); 4], vec![swap.clone(), swap]).unwrap();
    let r = magic_check(&x).unwrap();
    assert!(!r.magic && r.seminorm_agrees);
    let w = r.witness.unwrap();
    assert!(w.seminorm > q(0, 1));
    assert!(matches!(ensure_magic(&x), Err(recurlab::Error::Precondition { .. })));
}

#[test]
fn magic_criteria_agree_on_random_systems() {
    let mut rng = rng(14);
    for _ in 0..20 {
        let (_, x) = generate::random_group_and_system(&mut rng, (1, 8), 2, 12, false);
        assert!(magic_check(&x).unwrap().seminorm_agrees);
    }
}

#[test]
fn satedness_examples() {
    let x = product_translation(&FiniteGroup::cyclic(2), &FiniteGroup::cyclic(2));
    let cube = cube_measure(&x).unwrap();
    assert!(satedness_check(&x, &cube).unwrap().sated);

    let g = Arc::new(FiniteGroup::cyclic(2));
    let one = FiniteMPS::new(
        g.clone(),
        labels(1),
        vec![q(1, 1)],
        vec![Action::trivial(&g, 1), Action::trivial(&g, 1)],
    )
    .unwrap();
    assert!(satedness_check(&one, &cube_measure(&one).unwrap()).unwrap().sated);

    // a different base system is a structural error
    let other = two_point_swap();
    assert!(matches!(satedness_check(&other, &cube), Err(recurlab::Error::Structural(_))));
}

#[test]
fn satedness_reports_on_random_systems() {
    let mut rng = rng(15);
    for _ in 0..10 {
        let (_, x) = generate::random_group_and_system(&mut rng, (2, 6), 2, 8, false);
        let r = satedness_check(&x, &cube_measure(&x).unwrap()).unwrap();
        assert!(r.pairs_checked > 0 || r.sated);
        let (_, y) = generate::random_group_and_system(&mut rng, (2, 4), 3, 8, false);
        satedness_check(&y, &furstenberg_coupling(&y).unwrap()).unwrap();
    }
}

#[test]
fn furstenberg_coupling_examples() {
    let mut rng = rng(16);
    for _ in 0..10 {
        let (_, x) = generate::random_group_and_system(&mut rng, (2, 4), 3, 12, false);
        let c = furstenberg_coupling(&x).unwrap();
        assert_eq!(c.measure().total(), q(1, 1));
        assert!(c.invariance_report().all_hold(), "{:?}", c.invariance_report());
    }
    // T2, T3 trivial: mu_F(A0 x A1 x A2) = mu(A0 ∩ A1 ∩ A2)
    let g = Arc::new(FiniteGroup::cyclic(3));
    let rot = Action::from_table((0..3).map(|a| (0..3).map(|p| (p + a) % 3).collect()).collect());
    let x = FiniteMPS::new(
        g.clone(),
        labels(3),
        vec![q(1, 3); 3],
        vec![rot, Action::trivial(&g, 3), Action::trivial(&g, 3)],
    )
    .unwrap();
    let c = furstenberg_coupling(&x).unwrap();
    let sets: [&[usize]; 3] = [&[0, 1], &[1, 2], &[1]];
    let fs: Vec<Vec<Rational>> = sets.iter().map(|s| indicator(3, s)).collect();
    assert_eq!(c.measure().integrate(&[&fs[0], &fs[1], &fs[2]]), q(1, 3));
}

#[test]
fn k3_examples() {
    let mut rng = rng(17);
    let (_, x) = generate::random_group_and_system(&mut rng, (2, 4), 3, 10, false);
    let one = vec![q(1, 1); x.len()];
    assert_eq!(k3_average(&x, &one, &one, &one).unwrap().values(), &one[..]);

    let g = Arc::new(FiniteGroup::cyclic(2));
    let triv = Action::trivial(&g, 3);
    let x = FiniteMPS::new(g, labels(3), vec![q(1, 3); 3], vec![triv.clone(), triv.clone(), triv]).unwrap();
    let f1 = vec![q(1, 2), q(2, 1), q(-1, 1)];
    let f2 = vec![q(3, 1), q(0, 1), q(1, 5)];
    let f3 = vec![q(1, 1), q(1, 1), q(7, 1)];
    let expected: Vec<Rational> = (0..3).map(|i| &f1[i] * &f2[i] * &f3[i]).collect();
    assert_eq!(k3_average(&x, &f1, &f2, &f3).unwrap().values(), &expected[..]);
}

/// `||avg||^2` as the literal double sum over `G x G`.
fn k3_norm_oracle(x: &FiniteMPS, fs: &[Vec<Rational>; 3]) -> Rational {
    let g = x.group();
    let term = |e: usize, p: usize| {
        let a = x.apply(0, e, p);
        let b = x.apply(1, e, a);
        let c = x.apply(2, e, b);
        &fs[0][a] * &fs[1][b] * &fs[2][c]
    };
    let mut total = Rational::from_integer(0.into());
    for e in g.elements() {
        for h in g.elements() {
            for p in 0..x.len() {
                total += &x.masses()[p] * term(e, p) * term(h, p);
            }
        }
    }
    total / Rational::from_integer((g.order() * g.order()).into())
}

#[test]
fn k3_routes_agree_and_lift_instances() {
    let mut rng = rng(18);
    let mut lift_instances = 0;
    for _ in 0..15 {
        let (_, x) = generate::random_group_and_system(&mut rng, (2, 6), 3, 12, false);
        let fs: [Vec<Rational>; 3] =
            std::array::from_fn(|_| generate::random_observable(&mut rng, x.len(), false).into_inner());
        let r = k3_check(&x, &fs[0], &fs[1], &fs[2]).unwrap();
        assert!(r.routes_agree, "{r:?}");
        assert_eq!(r.norm_sq_direct, k3_norm_oracle(&x, &fs));
        assert!(r.lift_implication_holds);
        if let Some(f2) = lift_instance(&x, &fs[0], &fs[2]).unwrap() {
            let r = k3_check(&x, &fs[0], &f2, &fs[2]).unwrap();
            assert!(r.lift_hypothesis && r.average.is_zero());
            lift_instances += 1;
        }
    }
    assert!(lift_instances > 0);
}

#[test]
fn char_factor_examples() {
    let x = product_translation(&FiniteGroup::cyclic(3), &FiniteGroup::cyclic(2));
    let chi = Weight::constant_one(x.group().order());
    let mut rng = rng(19);
    for _ in 0..10 {
        let fs: Vec<Vec<Rational>> = (0..3)
            .map(|_| generate::random_observable(&mut rng, x.len(), false).into_inner())
            .collect();
        let r = char_factor_check(&x, &chi, &fs[0], &fs[1], &fs[2]).unwrap();
        assert!(r.equal);
    }
    let zero = vec![q(0, 1); x.len()];
    let f = generate::random_observable(&mut rng, x.len(), false).into_inner();
    let r = char_factor_check(&x, &chi, &f, &zero, &f).unwrap();
    assert_eq!((r.original, r.projected), (q(0, 1), q(0, 1)));

    let z2 = Arc::new(FiniteGroup::cyclic(2));
    let swap = Action::from_table(vec![vec![0, 1, 2, 3], vec![1, 0, 3, 2]]);
    let not_magic = FiniteMPS::new(z2, labels(4), vec![q(1, 4); 4], vec![swap.clone(), swap]).unwrap();
    let chi = Weight::constant_one(2);
    assert!(char_factor_check(&not_magic, &chi, &zero[..4], &zero[..4], &zero[..4]).is_err());
}

#[test]
fn as_mps_round_trip() {
    let x = product_translation(&FiniteGroup::cyclic(2), &FiniteGroup::cyclic(2));
    let cube = cube_measure(&x).unwrap();
    let mps = cube.as_mps().unwrap();
    assert_eq!(mps.len(), cube.measure().support_len());
    assert_eq!(mps.masses().iter().sum::<Rational>(), q(1, 1));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn cube_invariants_hold(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let (_, x) = generate::random_group_and_system(&mut rng, (1, 8), 2, 12, false);
        let cube = cube_measure(&x).unwrap();
        let report = cube.invariance_report();
        prop_assert!(report.all_hold(), "{:?}", report);
    }

    #[test]
    fn coupling_invariants_hold(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let (_, x) = generate::random_group_and_system(&mut rng, (1, 6), 3, 12, false);
        let report = furstenberg_coupling(&x).unwrap().invariance_report();
        prop_assert!(report.all_hold(), "{:?}", report);
    }
}
