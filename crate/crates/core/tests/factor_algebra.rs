mod common;

use std::collections::VecDeque;
use std::sync::Arc;

use common::*;
use proptest::prelude::*;
use rand::Rng;
use recurlab::generate;
use recurlab::partition::{Partition, Provenance};
use recurlab::rational::q;
use recurlab::system::{Action, Observable};
use recurlab::{FiniteGroup, FiniteMPS, Rational};

/// Block averages from scratch, with labels per point.
fn cond_exp_oracle(x: &FiniteMPS, f: &[Rational], labels: &[usize]) -> Vec<Rational> {
    (0..x.len())
        .map(|p| {
            let block: Vec<usize> = (0..x.len()).filter(|&y| labels[y] == labels[p]).collect();
            let m: Rational = block.iter().map(|&y| x.masses()[y].clone()).sum();
            block.iter().map(|&y| &x.masses()[y] * &f[y]).sum::<Rational>() / m
        })
        .collect()
}

/// Orbit labels of the group generated by the given permutations (BFS).
fn orbit_labels(n: usize, perms: &[Vec<usize>]) -> Vec<usize> {
    let mut label = vec![usize::MAX; n];
    let mut next = 0;
    for s in 0..n {
        if label[s] != usize::MAX {
            continue;
        }
        label[s] = next;
        let mut queue = VecDeque::from([s]);
        while let Some(p) = queue.pop_front() {
            for perm in perms {
                if label[perm[p]] == usize::MAX {
                    label[perm[p]] = next;
                    queue.push_back(perm[p]);
                }
            }
        }
        next += 1;
    }
    label
}

fn labels_of(p: &Partition) -> Vec<usize> {
    (0..p.len_points()).map(|x| p.block_of(x)).collect()
}

fn random_partition<R: Rng>(rng: &mut R, n: usize) -> Partition {
    let k = rng.gen_range(1..=n);
    let labels: Vec<usize> = (0..n).map(|_| rng.gen_range(0..k)).collect();
    Partition::from_labels(&labels, Provenance::Explicit)
}

fn measurable<R: Rng>(rng: &mut R, p: &Partition) -> Vec<Rational> {
    let vals: Vec<Rational> = (0..p.num_blocks()).map(|_| q(rng.gen_range(-4..=4), rng.gen_range(1..=3))).collect();
    (0..p.len_points()).map(|x| vals[p.block_of(x)].clone()).collect()
}

#[test]
fn invariant_partition_examples() {
    let x = product_translation(&FiniteGroup::cyclic(3), &FiniteGroup::cyclic(2));
    let i1 = x.invariant_partition(&[0]).unwrap();
    // T1 moves the first coordinate: blocks G1 x {y}
    assert_eq!(i1.blocks(), &[vec![0, 2, 4], vec![1, 3, 5]]);
    let g = Arc::new(FiniteGroup::cyclic(4));
    let rot = Action::from_table((0..4).map(|a| (0..4).map(|p| (p + a) % 4).collect()).collect());
    let y = FiniteMPS::new(g, labels(4), vec![q(1, 4); 4], vec![rot]).unwrap();
    assert_eq!(y.invariant_partition(&[0]).unwrap().num_blocks(), 1);
}

#[test]
fn conditional_expectation_block_example() {
    let g = Arc::new(FiniteGroup::trivial());
    let x = FiniteMPS::new(g, labels(4), vec![q(1, 4); 4], vec![]).unwrap();
    let p = Partition::from_blocks(4, &[vec![0, 1], vec![2, 3]]).unwrap();
    let f = [q(1, 1), q(0, 1), q(1, 1), q(0, 1)];
    assert_eq!(x.cond_exp(&f, &p).values(), &[q(1, 2), q(1, 2), q(1, 2), q(1, 2)]);
}

#[test]
fn correlation_examples() {
    let x = two_point_swap();
    let a = Observable::indicator(2, &[0]);
    assert_eq!(x.correlation(&a, &a, &a, 0), q(1, 2));
    assert_eq!(x.correlation(&a, &a, &a, 1), q(0, 1));
    let one = Observable::constant(2, q(1, 1));
    assert_eq!(x.correlation(&one, &one, &one, 1), q(1, 1));
}

#[test]
fn ergodicity_examples() {
    assert!(product_translation(&FiniteGroup::cyclic(2), &FiniteGroup::dihedral(3)).is_ergodic().ergodic);
    let g = Arc::new(FiniteGroup::cyclic(2));
    let x = FiniteMPS::new(
        g.clone(),
        labels(3),
        vec![q(1, 3); 3],
        vec![Action::trivial(&g, 3), Action::trivial(&g, 3)],
    )
    .unwrap();
    let r = x.is_ergodic();
    assert!(!r.ergodic);
    assert_eq!(r.meet, Partition::singletons(3));
}

#[test]
fn relative_independence_module_property_case() {
    // T2 trivial: E(f1 f2 | I1) = f1 E(f2 | I1)
    let g = Arc::new(FiniteGroup::cyclic(2));
    let t1 = Action::from_table(vec![vec![0, 1, 2, 3], vec![1, 0, 2, 3]]);
    let x = FiniteMPS::new(g.clone(), labels(4), vec![q(1, 8), q(1, 8), q(1, 4), q(1, 2)], vec![t1, Action::trivial(&g, 4)]).unwrap();
    assert!(x.relative_independence_check().unwrap().holds);
}

#[test]
fn trilinear_on_product_systems() {
    let x = product_translation(&FiniteGroup::cyclic(3), &FiniteGroup::cyclic(4));
    let mut rng = rng(5);
    let i1 = x.diagonal_partition(&[0]).unwrap();
    let i2 = x.diagonal_partition(&[1]).unwrap();
    for _ in 0..20 {
        let f0 = generate::random_observable(&mut rng, x.len(), false);
        let f1 = measurable(&mut rng, &i1);
        let f2 = measurable(&mut rng, &i2);
        let r = x.trilinear_form_check(&f0, &f1, &f2).unwrap();
        assert!(r.equal);
        // f1 depends on the second coordinate, f2 on the first: brute force
        let direct: Rational = (0..x.len()).map(|p| &x.masses()[p] * &f0[p] * &f1[p] * &f2[p]).sum();
        assert_eq!(r.lhs, direct);
    }
}

#[test]
fn randomized_relative_independence_large() {
    let mut rng = rng(6);
    for _ in 0..25 {
        let (_, x) = generate::random_group_and_system(&mut rng, (1, 8), 2, 32, false);
        let r = x.relative_independence_check().unwrap();
        assert!(r.holds, "{r:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn cond_exp_laws(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let (_, x) = generate::random_group_and_system(&mut rng, (1, 8), 2, 16, false);
        let n = x.len();
        let p = if rng.gen_bool(0.5) { random_partition(&mut rng, n) } else { x.diagonal_partition(&[rng.gen_range(0..2)]).unwrap() };
        let f = generate::random_observable(&mut rng, n, false);
        let h = generate::random_observable(&mut rng, n, false);
        let e = x.cond_exp(&f, &p);
        prop_assert_eq!(e.values(), &cond_exp_oracle(&x, &f, &labels_of(&p))[..]);
        prop_assert_eq!(x.cond_exp(&e, &p), e.clone());
        prop_assert_eq!(x.integrate(&e), x.integrate(&f));
        prop_assert_eq!(x.inner(&e, &h), x.inner(&f, &x.cond_exp(&h, &p)));
        prop_assert!(x.norm_sq(&e) <= x.norm_sq(&f));
        let m = Observable::new(measurable(&mut rng, &p));
        prop_assert_eq!(x.cond_exp(&m.mul(&f), &p), m.mul(&e));
    }

    #[test]
    fn mean_ergodic_theorem(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let k = rng.gen_range(1..=3);
        let (_, x) = generate::random_group_and_system(&mut rng, (1, 8), k, 16, false);
        let f = generate::random_observable(&mut rng, x.len(), false);
        for which in [vec![0], vec![k - 1], (0..k).collect::<Vec<_>>()] {
            let avg = x.time_average(&f, &which);
            prop_assert_eq!(avg, x.cond_exp(&f, &x.diagonal_partition(&which).unwrap()));
        }
    }

    #[test]
    fn invariant_partitions_are_orbits(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let (_, x) = generate::random_group_and_system(&mut rng, (1, 8), 2, 16, false);
        for which in [vec![0], vec![1], vec![0, 1]] {
            let perms: Vec<Vec<usize>> = which.iter().flat_map(|&i| x.action(i).perms().to_vec()).collect();
            let oracle = Partition::from_labels(&orbit_labels(x.len(), &perms), Provenance::Explicit);
            prop_assert_eq!(x.invariant_partition(&which).unwrap(), oracle);
        }
        // a union of blocks is invariant
        let i1 = x.invariant_partition(&[0]).unwrap();
        let set: Vec<usize> = i1.blocks()[0].clone();
        for g in x.group().elements() {
            prop_assert_eq!(image(x.action(0).perm(g), &set), set.clone());
        }
    }

    #[test]
    fn conditional_expectations_commute(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let (_, x) = generate::random_group_and_system(&mut rng, (1, 8), 2, 24, false);
        let i1 = x.diagonal_partition(&[0]).unwrap();
        let i2 = x.diagonal_partition(&[1]).unwrap();
        let f = generate::random_observable(&mut rng, x.len(), false);
        let a = x.cond_exp(&x.cond_exp(&f, &i1), &i2);
        prop_assert_eq!(&a, &x.cond_exp(&x.cond_exp(&f, &i2), &i1));
        prop_assert_eq!(&a, &x.cond_exp(&f, &i1.meet(&i2)));
        // relative independence over I1 ∧ I2, by the oracle
        let meet = labels_of(&i1.meet(&i2));
        let f1 = measurable(&mut rng, &i1);
        let f2 = measurable(&mut rng, &i2);
        let prod: Vec<Rational> = f1.iter().zip(&f2).map(|(a, b)| a * b).collect();
        let lhs = cond_exp_oracle(&x, &prod, &meet);
        let r1 = cond_exp_oracle(&x, &f1, &labels_of(&i2));
        let r2 = cond_exp_oracle(&x, &f2, &labels_of(&i1));
        let rhs: Vec<Rational> = r1.iter().zip(&r2).map(|(a, b)| a * b).collect();
        prop_assert_eq!(lhs, rhs);
        prop_assert!(x.relative_independence_check().unwrap().holds);
    }

    #[test]
    fn join_and_meet_are_lattice_operations(seed in any::<u64>(), n in 1usize..12) {
        let mut rng = rng(seed);
        let p = random_partition(&mut rng, n);
        let r = random_partition(&mut rng, n);
        let join = p.join(&r);
        let meet = p.meet(&r);
        prop_assert!(join.refines(&p) && join.refines(&r));
        prop_assert!(p.refines(&meet) && r.refines(&meet));
        // coarsest common refinement: points share a join block iff they share both blocks
        for a in 0..n {
            for b in 0..n {
                let same = p.block_of(a) == p.block_of(b) && r.block_of(a) == r.block_of(b);
                prop_assert_eq!(join.block_of(a) == join.block_of(b), same);
            }
        }
        // any common coarsening is coarser than the meet
        let c = p.meet(&random_partition(&mut rng, n)).meet(&r);
        prop_assert!(meet.refines(&c));
        let f: Vec<Rational> = (0..n).map(|x| q(join.block_of(x) as i64, 1)).collect();
        prop_assert!(join.is_measurable(&f));
    }

    #[test]
    fn correlation_at_identity(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let (_, x) = generate::random_group_and_system(&mut rng, (1, 8), 2, 16, false);
        let fs: Vec<Observable> = (0..3).map(|_| generate::random_observable(&mut rng, x.len(), false)).collect();
        let prod = fs[0].mul(&fs[1]).mul(&fs[2]);
        prop_assert_eq!(x.correlation(&fs[0], &fs[1], &fs[2], x.group().id()), x.integrate(&prod));
    }

    #[test]
    fn trilinear_randomized(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let (_, x) = generate::random_group_and_system(&mut rng, (1, 8), 2, 16, true);
        let f0 = generate::random_observable(&mut rng, x.len(), false);
        let f1 = measurable(&mut rng, &x.diagonal_partition(&[0]).unwrap());
        let f2 = measurable(&mut rng, &x.diagonal_partition(&[1]).unwrap());
        let r = x.trilinear_form_check(&f0, &f1, &f2).unwrap();
        prop_assert!(r.equal);
    }
}
