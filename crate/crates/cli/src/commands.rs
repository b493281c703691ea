use std::fs;
use std::path::Path;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use recurlab::cube::{self, Extension};
use recurlab::density::{self, LatticeSet, Predicate};
use recurlab::rational::{format, Rational};
use recurlab::recurrence;
use recurlab::rotation;
use recurlab::symbolic;
use recurlab::{generate, io, vdc, Error, FiniteGroup, FiniteMPS, IntegerLattice, Observable, ReiterSequence, Result};
use serde::Serialize;
use serde_json::json;

use crate::report::Report;
use crate::{Command, Counterexample};

const DEFAULT_MAX_CARD: usize = 1_000_000;

/// `RECURLAB_MAX_CARD`: the largest tuple space enumerated for a self-joining;
/// group tables are checked exhaustively while `|G|^3` stays below it.
fn max_card() -> Result<usize> {
    match std::env::var("RECURLAB_MAX_CARD") {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Error::parse("RECURLAB_MAX_CARD", format!("`{v}` is not a positive integer"))),
        Err(_) => Ok(DEFAULT_MAX_CARD),
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::parse(path.display().to_string(), e.to_string()))
}

fn load_system(path: &Path) -> Result<FiniteMPS> {
    let card = max_card()?;
    let group_cap = (card as f64).cbrt().floor() as usize;
    io::parse_system(&read(path)?, group_cap)
}

pub fn name(c: &Command) -> String {
    match c {
        Command::RothVerify { .. } => "roth-verify",
        Command::CubeCheck { .. } => "cube-check",
        Command::K3Check { .. } => "k3-check",
        Command::VdcCheck { .. } => "vdc-check",
        Command::WeightsCheck { .. } => "weights-check",
        Command::Counterexample { which: Counterexample::Bernoulli { .. } } => "counterexample bernoulli",
        Command::Counterexample { which: Counterexample::Rotation { .. } } => "counterexample rotation",
        Command::DensityCorners { .. } => "density-corners",
    }
    .to_string()
}

pub fn run(c: &Command) -> Result<Report> {
    let name = name(c);
    match c {
        Command::RothVerify { system, set, epsilon } => roth(&name, system, set, epsilon),
        Command::CubeCheck { system, seed, trials } => cube_check(&name, system.as_deref(), *seed, *trials),
        Command::K3Check { system, seed, trials } => k3(&name, system.as_deref(), *seed, *trials),
        Command::VdcCheck { seed, trials, n } => vdc_check(&name, *seed, *trials, *n),
        Command::WeightsCheck { system, set, epsilon } => weights(&name, system, set, epsilon),
        Command::Counterexample { which } => match which {
            Counterexample::Bernoulli { exponent, n } => bernoulli(&name, exponent, *n),
            Counterexample::Rotation { delta } => rotation_cmd(&name, delta),
        },
        Command::DensityCorners { n, set, seed, epsilon, predicate, radius, shift } => match predicate {
            Some(p) => corners_window(&name, p, *radius, *shift, epsilon),
            None => corners(&name, *n, set.as_deref(), *seed, epsilon),
        },
    }
}

fn roth(name: &str, system: &Path, set: &Path, eps: &Rational) -> Result<Report> {
    positive(eps)?;
    let x = load_system(system)?;
    let a = io::parse_set(&read(set)?, &x)?;
    let r = recurrence::roth_verify(&x, &a, eps)?;
    let holds = r.inverse_identity_holds && r.left_cover.verified && r.right_cover.verified;
    let rows = r
        .correlations
        .rows()
        .into_iter()
        .map(|(g, c, inside)| vec![g.to_string(), c, inside.to_string()])
        .collect();
    let params = json!({ "system": system, "set": set, "epsilon": format(eps) });
    Ok(Report::new(
        name,
        "on an ergodic system with commuting T1, T2 the set R_eps = {g : mu(A ∩ T1^g A ∩ T1^g T2^g A) > mu(A)^4 - eps} \
         is left and right syndetic, and R_eps^-1 = {g : mu(T1^g T2^g A ∩ T2^g A ∩ A) > mu(A)^4 - eps}",
        params,
        &r,
        holds,
    )
    .with_table(vec!["g", "c_g", "in_R_epsilon"], rows))
}

fn positive(eps: &Rational) -> Result<()> {
    if *eps > Rational::from_integer(0.into()) {
        Ok(())
    } else {
        Err(Error::Domain(format!("epsilon = {eps} must be positive")))
    }
}

#[derive(Serialize)]
struct CubeCase {
    group: String,
    points: usize,
    support: usize,
    invariance: cube::InvarianceReport,
    magic: Option<bool>,
    sated_for_cube: Option<bool>,
    reiter_independent: bool,
}

fn cube_case(group: String, x: &FiniteMPS, rng: &mut ChaCha8Rng, card: usize) -> Result<CubeCase> {
    let c = cube::cube_measure_capped(x, card)?;
    let g = x.group().clone();
    let a = ReiterSequence::perturbed_uniform(generate::random_group_measure(rng, g.clone()), 1, 4);
    let b = ReiterSequence::perturbed_uniform(generate::random_group_measure(rng, g), 2, 4);
    let reiter_independent = cube::cube_measure_along(x, &a, &b)?.measure() == c.measure();
    let ergodic = x.is_ergodic().ergodic;
    let magic = ergodic.then(|| cube::magic_check(x).map(|m| m.magic)).transpose()?;
    Ok(CubeCase {
        group,
        points: x.len(),
        support: c.measure().support_len(),
        invariance: c.invariance_report(),
        magic,
        sated_for_cube: Some(cube::satedness_check(x, &c)?.sated),
        reiter_independent,
    })
}

fn cube_check(name: &str, system: Option<&Path>, seed: u64, trials: usize) -> Result<Report> {
    let card = max_card()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cases = match system {
        Some(p) => {
            let x = load_system(p)?;
            vec![cube_case(format!("order {}", x.group().order()), &x, &mut rng, card)?]
        }
        None => (0..trials)
            .map(|_| {
                let (g, x) = generate::random_group_and_system(&mut rng, (1, 8), 2, 16, false);
                cube_case(g, &x, &mut rng, card)
            })
            .collect::<Result<Vec<_>>>()?,
    };
    let holds = cases.iter().all(|c| c.invariance.all_hold() && c.reiter_independent);
    let rows = cases
        .iter()
        .enumerate()
        .map(|(i, c)| {
            vec![
                i.to_string(),
                c.group.clone(),
                c.points.to_string(),
                c.support.to_string(),
                c.invariance.all_hold().to_string(),
                c.reiter_independent.to_string(),
                c.magic.map_or("n/a".into(), |m| m.to_string()),
            ]
        })
        .collect();
    Ok(Report::new(
        name,
        "the cube measure is a probability measure with all four marginals mu, invariant under the commuting \
         side actions, and independent of the Reiter sequences used to define it",
        json!({ "system": system, "seed": seed, "trials": if system.is_some() { 1 } else { trials } }),
        &cases,
        holds,
    )
    .with_table(vec!["case", "group", "points", "support", "invariant", "reiter_independent", "magic"], rows))
}

#[derive(Serialize)]
struct K3Case {
    group: String,
    coupling: cube::InvarianceReport,
    #[serde(serialize_with = "ser_q")]
    norm_sq_direct: Rational,
    #[serde(serialize_with = "ser_q")]
    norm_sq_coupling: Rational,
    routes_agree: bool,
    lift_implication_holds: bool,
    /// A nonzero `f2` killing the coupling projection, checked to give a zero average.
    lift_instance_verified: Option<bool>,
}

fn ser_q<S: serde::Serializer>(q: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format(q))
}

fn k3_case(group: String, x: &FiniteMPS, rng: &mut ChaCha8Rng) -> Result<K3Case> {
    let coupling = cube::furstenberg_coupling(x)?.invariance_report();
    let fs: [Observable; 3] = std::array::from_fn(|_| generate::random_observable(rng, x.len(), false));
    let r = cube::k3_check(x, &fs[0], &fs[1], &fs[2])?;
    let lift = match cube::lift_instance(x, &fs[0], &fs[2])? {
        Some(f2) => {
            let l = cube::k3_check(x, &fs[0], &f2, &fs[2])?;
            Some(l.lift_hypothesis && l.average.is_zero())
        }
        None => None,
    };
    Ok(K3Case {
        group,
        coupling,
        norm_sq_direct: r.norm_sq_direct,
        norm_sq_coupling: r.norm_sq_coupling,
        routes_agree: r.routes_agree,
        lift_implication_holds: r.lift_implication_holds,
        lift_instance_verified: lift,
    })
}

fn k3(name: &str, system: Option<&Path>, seed: u64, trials: usize) -> Result<Report> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cases = match system {
        Some(p) => {
            let x = load_system(p)?;
            let label = format!("order {}", x.group().order());
            (0..trials).map(|_| k3_case(label.clone(), &x, &mut rng)).collect::<Result<Vec<_>>>()?
        }
        None => (0..trials)
            .map(|_| {
                let (g, x) = generate::random_group_and_system(&mut rng, (2, 6), 3, 12, false);
                k3_case(g, &x, &mut rng)
            })
            .collect::<Result<Vec<_>>>()?,
    };
    let holds = cases
        .iter()
        .all(|c| c.coupling.all_hold() && c.routes_agree && c.lift_implication_holds && c.lift_instance_verified != Some(false));
    Ok(Report::new(
        name,
        "||avg_g f1(T1^g x) f2(T1^g T2^g x) f3(T1^g T2^g T3^g x)||^2 equals the squared norm of \
         E(f1 ⊗ f2 ⊗ f3 | invariant factor of T_F1 T_F2) on the Furstenberg coupling; when that \
         conditional expectation vanishes the average is zero",
        json!({ "system": system, "seed": seed, "trials": trials }),
        &cases,
        holds,
    ))
}

fn vdc_check(name: &str, seed: u64, trials: usize, n: usize) -> Result<Report> {
    if n == 0 {
        return Err(Error::Domain("--n must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::new();
    let mut reports = Vec::new();
    for t in 0..trials {
        let (g, group) = generate::random_group(&mut rng, 1, n);
        let u = generate::random_vector_function(&mut rng, group.order(), 2);
        let h = generate::random_group_measure(&mut rng, group.clone());
        let nu = generate::random_group_measure(&mut rng, group.clone());
        let f = ReiterSequence::perturbed_uniform(nu, 1, 3).two_sided();
        let r = vdc::vdc_verify(&u, &f, &h)?;
        rows.push(vec![t.to_string(), g, format(&r.lhs), format(&r.rhs), r.all_hold().to_string()]);
        reports.push(r);
    }
    let holds = reports.iter().all(|r| r.all_hold());
    Ok(Report::new(
        name,
        "||avg_g u_g||^2 <= avg_{h,l ~ H} avg_g <u_{hg}, u_{lg}> for every probability measure H, and with \
         H replaced by F_N * F_N^* for each term F_N of a two-sided Reiter sequence",
        json!({ "seed": seed, "trials": trials, "n": n }),
        &reports,
        holds,
    )
    .with_table(vec!["case", "group", "lhs", "rhs", "holds"], rows))
}

#[derive(Serialize)]
struct WeightsResult {
    kappa: Option<recurrence::KappaReport>,
    weighted: recurrence::WeightedBoundReport,
    advisory: bool,
}

fn weights(name: &str, system: &Path, set: &Path, eps: &Rational) -> Result<Report> {
    positive(eps)?;
    let x = load_system(system)?;
    let a = io::parse_set(&read(set)?, &x)?;
    let f = Observable::indicator(x.len(), &a);
    let weighted = recurrence::weighted_lower_bound_check(&x, &f, eps)?;
    let kappa = if weighted.certified { Some(recurrence::kappa(&x, &f)?) } else { None };
    let holds = weighted.holds
        && weighted.pointwise
        && kappa
            .as_ref()
            .is_none_or(|k| k.lower_bound_at_identity && k.matrix_coefficient_agrees);
    let rows = x
        .group()
        .elements()
        .map(|g| {
            vec![
                g.to_string(),
                kappa.as_ref().map_or(String::new(), |k| format(&k.values[g])),
                format(&weighted.weight.values()[g]),
            ]
        })
        .collect();
    let advisory = !weighted.certified;
    Ok(Report::new(
        name,
        "with kappa(g) = ∫ f T1^g E(f | I1 ∨ I2) T1^g T2^g f and chi = phi(kappa) / avg phi(kappa), \
         avg_g chi(g) ∫ f T1^g f T1^g T2^g f >= (∫ f)^4 - eps on an ergodic magic system",
        json!({ "system": system, "set": set, "epsilon": format(eps) }),
        WeightsResult { kappa, weighted, advisory },
        holds,
    )
    .with_table(vec!["g", "kappa", "chi"], rows))
}

fn bernoulli(name: &str, exponent: &Rational, n: i64) -> Result<Report> {
    if n < 1 {
        return Err(Error::Domain("--n must be at least 1".into()));
    }
    let elements = symbolic::lattice_box(n);
    let r = symbolic::counterexample_check(IntegerLattice::new(2), &elements, exponent)?;
    let holds = r.exponent.holds && r.constant_off_identity;
    let ce = &r.exponent.critical_exponent;
    let rows = vec![vec![
        format(&r.mu_a),
        r.correlation.as_ref().map(format).unwrap_or_default(),
        format(exponent),
        r.exponent.holds.to_string(),
        r.exponent.critical_exponent_f64.0.to_string(),
        r.exponent.critical_exponent_f64.1.to_string(),
    ]];
    let result = json!({
        "holds": holds,
        "mu_a": format(&r.mu_a),
        "correlation": r.correlation.as_ref().map(format),
        "elements_tested": r.elements_tested,
        "constant_off_identity": r.constant_off_identity,
        "critical_exponent": [r.exponent.critical_exponent_f64.0, r.exponent.critical_exponent_f64.1],
        "critical_exponent_exact": [format(&ce.lo), format(&ce.hi)],
        "exponent": r.exponent,
    });
    Ok(Report::new(
        name,
        "for the ternary Bernoulli system on Z^2 with T1 = R x Id x R, T2 = L x R x Id and A = {y_0, z_0, w_0 pairwise \
         distinct}, mu(A ∩ T1^g A ∩ T1^g T2^g A) = 2/243 < mu(A)^exponent for every g != 0, with mu(A) = 2/9",
        json!({ "exponent": format(exponent), "n": n }),
        result,
        holds,
    )
    .with_table(vec!["mu_a", "c_g", "exponent", "holds", "critical_lo", "critical_hi"], rows))
}

fn rotation_cmd(name: &str, delta: &Rational) -> Result<Report> {
    let r = rotation::rotation_check(delta)?;
    let holds = r.strictly_less && (r.beyond_formula_range || r.matches_closed_form);
    let rows = r
        .m
        .breakpoints
        .iter()
        .zip(&r.m.values)
        .map(|(x, v)| vec![format(x), format(v)])
        .collect();
    Ok(Report::new(
        name,
        "for an irrational rotation and A the complement of an arc of length delta <= 1/3, \
         lim (1/N) sum mu(A ∩ T^n A ∩ T^{2n} A) = 1 - 3 delta + (5/2) delta^2 < mu(A)^3",
        json!({ "delta": format(delta) }),
        &r,
        holds,
    )
    .with_table(vec!["x", "m"], rows))
}

fn corners(name: &str, n: usize, set: Option<&Path>, seed: u64, eps: &Rational) -> Result<Report> {
    positive(eps)?;
    if n == 0 {
        return Err(Error::Domain("--n must be at least 1".into()));
    }
    let pairs: Vec<(usize, usize)> = match set {
        Some(p) => serde_json::from_str(&read(p)?).map_err(|e| Error::parse(format!("set:{}:{}", e.line(), e.column()), e.to_string()))?,
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            generate::random_subset(&mut rng, n * n).into_iter().map(|p| (p / n, p % n)).collect()
        }
    };
    let r = density::corners_check(Arc::new(FiniteGroup::cyclic(n)), &pairs, eps)?;
    let holds = r.matches_recurrence && r.sets_agree && r.cover.verified && r.good.contains(&0);
    let rows = r
        .corner_density
        .iter()
        .enumerate()
        .map(|(g, d)| vec![g.to_string(), format(d), r.good.contains(&g).to_string()])
        .collect();
    Ok(Report::new(
        name,
        "for E ⊆ G x G, the set of g with d(E ∩ (g, id)E ∩ (g, g)E) >= d(E)^4 - eps is syndetic; on a finite G \
         it is the return set of the translation system on G x G together with its boundary",
        json!({ "n": n, "set": set, "seed": if set.is_none() { Some(seed) } else { None }, "epsilon": format(eps) }),
        &r,
        holds,
    )
    .with_table(vec!["g", "corner_density", "good"], rows))
}

fn corners_window(name: &str, predicate: &str, radius: i64, shift: i64, eps: &Rational) -> Result<Report> {
    positive(eps)?;
    let p = Predicate::parse(predicate)?;
    let r = density::corners_window(&LatticeSet::Predicate(p), radius, shift, eps)?;
    let holds = r.good.contains(&0);
    let rows = r.values.iter().map(|(g, v)| vec![g.to_string(), v.clone(), r.good.contains(g).to_string()]).collect();
    Ok(Report::new(
        name,
        "window estimate on Z^2: the shifts g with d(E ∩ (g, 0)E ∩ (g, g)E) >= d(E)^4 - eps, measured on a box, \
         and a heuristic covering witness for an inner window",
        json!({ "predicate": predicate, "radius": radius, "shift": shift, "epsilon": format(eps) }),
        &r,
        holds,
    )
    .with_table(vec!["g", "corner_density", "good"], rows))
}
