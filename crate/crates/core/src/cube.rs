//! Self-joinings of finite systems: the two-dimensional cube measure, the
//! three-fold Furstenberg coupling, and the checks built on them (magic,
//! satedness, the `k = 3` average and the characteristic-factor reduction).
//!
//! Joinings are stored sparsely over their support; the cap below bounds
//! `|X|^arity` as a guard on the size of the product space.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::measure::{limit_along, uniform_average, GroupMeasure, ReiterSequence};
use crate::partition::Partition;
use crate::rational::{self, Rational};
use crate::recurrence::Weight;
use crate::system::{Action, FiniteMPS, Observable};

pub const DEFAULT_TUPLE_CAP: usize = 1_000_000;

fn check_cap(n: usize, arity: u32, cap: usize) -> Result<()> {
    let needed = n.checked_pow(arity).unwrap_or(usize::MAX);
    if needed > cap {
        return Err(Error::TooLarge {
            what: format!("{arity}-fold product of {n} points"),
            needed,
            cap,
        });
    }
    Ok(())
}

/// A probability measure on `X^arity` with finitely many atoms.
#[derive(Debug, Clone, PartialEq)]
pub struct Joining {
    arity: usize,
    atoms: BTreeMap<Vec<usize>, Rational>,
}

impl Joining {
    fn from_vector(support: &[Vec<usize>], values: Vec<Rational>, arity: usize) -> Self {
        let atoms = support
            .iter()
            .cloned()
            .zip(values)
            .filter(|(_, m)| !m.is_zero())
            .collect();
        Joining { arity, atoms }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn mass(&self, t: &[usize]) -> Rational {
        self.atoms.get(t).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn atoms(&self) -> impl Iterator<Item = (&Vec<usize>, &Rational)> {
        self.atoms.iter()
    }

    pub fn support_len(&self) -> usize {
        self.atoms.len()
    }

    pub fn total(&self) -> Rational {
        self.atoms.values().sum()
    }

    pub fn marginal(&self, coord: usize, n: usize) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); n];
        for (t, m) in &self.atoms {
            out[t[coord]] += m;
        }
        out
    }

    /// `integral f_0(t_0) .. f_{k-1}(t_{k-1})`.
    pub fn integrate(&self, fs: &[&[Rational]]) -> Rational {
        assert_eq!(fs.len(), self.arity);
        self.atoms
            .iter()
            .map(|(t, m)| fs.iter().zip(t).fold(m.clone(), |acc, (f, &x)| acc * &f[x]))
            .sum()
    }

    /// First atom whose mass is not preserved by `map`, if any. Checking the
    /// support suffices: `map` is a bijection of a finite set.
    fn invariance_witness(&self, map: impl Fn(&[usize]) -> Vec<usize>) -> Option<Vec<usize>> {
        self.atoms
            .iter()
            .find(|(t, m)| self.mass(&map(t)) != **m)
            .map(|(t, _)| t.clone())
    }
}

/// Tuple actions: per factor, which base actions are applied (in any order,
/// they commute).
type Scheme = Vec<Vec<usize>>;

fn apply_scheme(x: &FiniteMPS, scheme: &Scheme, g: usize, t: &[usize]) -> Vec<usize> {
    t.iter()
        .zip(scheme)
        .map(|(&p, which)| which.iter().fold(p, |y, &i| x.apply(i, g, y)))
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct InvarianceReport {
    pub mass_one: bool,
    pub marginals_match: bool,
    pub invariant: bool,
    pub actions_commute: bool,
    pub projection_intertwines: bool,
    /// First failure, e.g. `"T_box2 at g=3 moves (0,1,1,2)"`.
    pub witness: Option<String>,
}

impl InvarianceReport {
    pub fn all_hold(&self) -> bool {
        self.mass_one && self.marginals_match && self.invariant && self.actions_commute && self.projection_intertwines
    }
}

/// Common machinery for the two self-joinings.
pub trait Extension {
    fn base(&self) -> &FiniteMPS;
    fn joining(&self) -> &Joining;
    fn schemes(&self) -> &[Scheme];
    fn action_names(&self) -> &[&'static str];
    /// Coordinate that maps the extension onto the base system.
    fn projection_coord(&self) -> usize;
    /// Coordinates whose marginal must equal the base measure.
    fn checked_marginals(&self) -> Vec<usize>;

    fn apply(&self, i: usize, g: usize, t: &[usize]) -> Vec<usize> {
        apply_scheme(self.base(), &self.schemes()[i], g, t)
    }

    /// The extension as a finite system on its support.
    fn as_mps(&self) -> Result<FiniteMPS> {
        let base = self.base();
        let joining = self.joining();
        let points: Vec<&Vec<usize>> = joining.atoms.keys().collect();
        let index: BTreeMap<&Vec<usize>, usize> = points.iter().enumerate().map(|(i, t)| (*t, i)).collect();
        let group = base.group().clone();
        let mut actions = Vec::new();
        for i in 0..self.schemes().len() {
            let mut perms = Vec::with_capacity(group.order());
            for g in group.elements() {
                let perm = points
                    .iter()
                    .map(|t| {
                        let image = self.apply(i, g, t);
                        index.get(&image).copied().ok_or_else(|| {
                            Error::Structural(format!(
                                "{} at g={g} leaves the support at {t:?}",
                                self.action_names()[i]
                            ))
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                perms.push(perm);
            }
            actions.push(Action::from_table(perms));
        }
        let labels = points
            .iter()
            .map(|t| {
                let parts: Vec<&str> = t.iter().map(|&p| base.labels()[p].as_str()).collect();
                format!("({})", parts.join(","))
            })
            .collect();
        let masses = joining.atoms.values().cloned().collect();
        FiniteMPS::new(group, labels, masses, actions)
    }

    fn invariance_report(&self) -> InvarianceReport {
        let base = self.base();
        let joining = self.joining();
        let n = base.len();
        let group = base.group();
        let mut witness = None;
        let mass_one = joining.total().is_one();
        if !mass_one {
            witness.get_or_insert_with(|| format!("total mass {}", joining.total()));
        }
        let marginals_match = self.checked_marginals().iter().all(|&c| {
            let ok = joining.marginal(c, n) == base.masses();
            if !ok {
                witness.get_or_insert_with(|| format!("marginal {c} differs from the base measure"));
            }
            ok
        });
        let mut invariant = true;
        'inv: for i in 0..self.schemes().len() {
            for g in group.elements() {
                if let Some(t) = joining.invariance_witness(|t| self.apply(i, g, t)) {
                    invariant = false;
                    witness.get_or_insert_with(|| format!("{} at g={g} moves mass at {t:?}", self.action_names()[i]));
                    break 'inv;
                }
            }
        }
        let mut actions_commute = true;
        'comm: for i in 0..self.schemes().len() {
            for j in i + 1..self.schemes().len() {
                for g in group.elements() {
                    for h in group.elements() {
                        if let Some(t) = joining
                            .atoms
                            .keys()
                            .find(|t| self.apply(i, g, &self.apply(j, h, t)) != self.apply(j, h, &self.apply(i, g, t)))
                        {
                            actions_commute = false;
                            witness.get_or_insert_with(|| {
                                format!(
                                    "{}^{g} and {}^{h} disagree at {t:?}",
                                    self.action_names()[i],
                                    self.action_names()[j]
                                )
                            });
                            break 'comm;
                        }
                    }
                }
            }
        }
        let p = self.projection_coord();
        let projection_intertwines = joining.marginal(p, n) == base.masses()
            && (0..self.schemes().len()).all(|i| {
                group.elements().all(|g| {
                    joining
                        .atoms
                        .keys()
                        .all(|t| self.apply(i, g, t)[p] == base.apply(i, g, t[p]))
                })
            });
        if !projection_intertwines {
            witness.get_or_insert_with(|| "projection does not intertwine the actions".into());
        }
        InvarianceReport {
            mass_one,
            marginals_match,
            invariant,
            actions_commute,
            projection_intertwines,
            witness,
        }
    }
}

/// `(X^4, mu_box, T_box1, T_box2)` with coordinates ordered `(∅, 1, 2, 12)`,
/// `T_box1 = Id x T1 x Id x T1` and `T_box2 = Id x Id x T2 x T2`.
#[derive(Debug, Clone)]
pub struct CubeSystem {
    base: FiniteMPS,
    measure: Joining,
    schemes: Vec<Scheme>,
}

fn cube_schemes() -> Vec<Scheme> {
    vec![
        vec![vec![], vec![0], vec![], vec![0]],
        vec![vec![], vec![], vec![1], vec![1]],
    ]
}

impl CubeSystem {
    pub fn measure(&self) -> &Joining {
        &self.measure
    }
}

impl Extension for CubeSystem {
    fn base(&self) -> &FiniteMPS {
        &self.base
    }
    fn joining(&self) -> &Joining {
        &self.measure
    }
    fn schemes(&self) -> &[Scheme] {
        &self.schemes
    }
    fn action_names(&self) -> &[&'static str] {
        &["T_box1", "T_box2"]
    }
    fn projection_coord(&self) -> usize {
        3
    }
    fn checked_marginals(&self) -> Vec<usize> {
        vec![0, 1, 2, 3]
    }
}

/// The tuples `(x, T1^{g1^-1} x, T2^{g2^-1} x, T1^{g1^-1} T2^{g2^-1} x)` carrying
/// the mass of `x` for the pair `(g1, g2)`: the point `x` lies in
/// `A_∅ ∩ T1^{g1} A_1 ∩ T2^{g2} A_2 ∩ T1^{g1} T2^{g2} A_12` exactly when the tuple
/// lies in `A_∅ x A_1 x A_2 x A_12`.
fn cube_tuple(x: &FiniteMPS, g1: usize, g2: usize, p: usize) -> Vec<usize> {
    let group = x.group();
    let (h1, h2) = (group.inv(g1), group.inv(g2));
    let a = x.apply(0, h1, p);
    let b = x.apply(1, h2, p);
    vec![p, a, b, x.apply(0, h1, b)]
}

fn cube_support(x: &FiniteMPS) -> Vec<Vec<usize>> {
    let group = x.group();
    let mut set = BTreeSet::new();
    for g1 in group.elements() {
        for g2 in group.elements() {
            for p in 0..x.len() {
                set.insert(cube_tuple(x, g1, g2, p));
            }
        }
    }
    set.into_iter().collect()
}

/// `sum_{g1,g2} Phi(g1) Psi(g2) sum_x mu(x) delta_{tuple}` on the candidate support.
fn cube_vector(x: &FiniteMPS, support: &[Vec<usize>], phi: &GroupMeasure, psi: &GroupMeasure) -> Vec<Rational> {
    let index: BTreeMap<&Vec<usize>, usize> = support.iter().enumerate().map(|(i, t)| (t, i)).collect();
    let mut out = vec![Rational::zero(); support.len()];
    for g1 in phi.support() {
        for g2 in psi.support() {
            let w = phi.weight(g1) * psi.weight(g2);
            for p in 0..x.len() {
                out[index[&cube_tuple(x, g1, g2, p)]] += &w * &x.masses()[p];
            }
        }
    }
    out
}

pub fn cube_measure(x: &FiniteMPS) -> Result<CubeSystem> {
    cube_measure_capped(x, DEFAULT_TUPLE_CAP)
}

/// The cube measure as the uniform double average (the Cesàro limit along any
/// Reiter sequences on a finite group).
pub fn cube_measure_capped(x: &FiniteMPS, cap: usize) -> Result<CubeSystem> {
    x.ensure_actions(2)?;
    check_cap(x.len(), 4, cap)?;
    let support = cube_support(x);
    let u = GroupMeasure::uniform(x.group().clone());
    let values = cube_vector(x, &support, &u, &u);
    Ok(CubeSystem {
        base: x.clone(),
        measure: Joining::from_vector(&support, values, 4),
        schemes: cube_schemes(),
    })
}

/// The cube measure as `lim_N` of the double averages along `Phi_N` and
/// `Psi_N`, extrapolated exactly from the stored terms.
pub fn cube_measure_along(x: &FiniteMPS, phi: &ReiterSequence, psi: &ReiterSequence) -> Result<CubeSystem> {
    x.ensure_actions(2)?;
    check_cap(x.len(), 4, DEFAULT_TUPLE_CAP)?;
    for s in [phi, psi] {
        if !crate::measure::same_group(s.group(), x.group()) {
            return Err(Error::Domain("Reiter sequence on a different group".into()));
        }
    }
    let support = cube_support(x);
    let values = limit_along(&[phi, psi], |m| cube_vector(x, &support, m[0], m[1]))?;
    Ok(CubeSystem {
        base: x.clone(),
        measure: Joining::from_vector(&support, values, 4),
        schemes: cube_schemes(),
    })
}

/// `integral f_∅ ⊗ f_1 ⊗ f_2 ⊗ f_12 d mu_box`.
pub fn cube_integral(cube: &CubeSystem, fs: [&[Rational]; 4]) -> Rational {
    cube.measure.integrate(&fs)
}

/// The cubic average `avg_{g1,g2} integral f_∅ T1^{g1} f_1 T2^{g2} f_2 T1^{g1} T2^{g2} f_12`
/// summed directly over `G x G`.
pub fn cubic_average(x: &FiniteMPS, fs: [&[Rational]; 4]) -> Rational {
    let group = x.group();
    let mut values = Vec::with_capacity(group.order() * group.order());
    for g1 in group.elements() {
        for g2 in group.elements() {
            values.push(
                (0..x.len())
                    .map(|p| {
                        let a = x.apply(0, g1, p);
                        let b = x.apply(1, g2, p);
                        let c = x.apply(0, g1, b);
                        &x.masses()[p] * &fs[0][p] * &fs[1][a] * &fs[2][b] * &fs[3][c]
                    })
                    .sum(),
            );
        }
    }
    uniform_average(&values)
}

/// `(X^3, mu_F)` with `T_F1 = T1 x T1 x T1`, `T_F2 = Id x T2 x T23`,
/// `T_F3 = T23 x T3 x Id`, extending `X` through the second coordinate.
#[derive(Debug, Clone)]
pub struct CoupledSystem {
    base: FiniteMPS,
    measure: Joining,
    schemes: Vec<Scheme>,
}

impl CoupledSystem {
    pub fn measure(&self) -> &Joining {
        &self.measure
    }
}

impl Extension for CoupledSystem {
    fn base(&self) -> &FiniteMPS {
        &self.base
    }
    fn joining(&self) -> &Joining {
        &self.measure
    }
    fn schemes(&self) -> &[Scheme] {
        &self.schemes
    }
    fn action_names(&self) -> &[&'static str] {
        &["T_F1", "T_F2", "T_F3"]
    }
    fn projection_coord(&self) -> usize {
        1
    }
    fn checked_marginals(&self) -> Vec<usize> {
        vec![1]
    }
}

/// `integral f_0 ⊗ f_1 ⊗ f_2 d mu_F = avg_g integral f_0 (f_1 o T2^g) (f_2 o T2^g T3^g) d mu`.
pub fn furstenberg_coupling(x: &FiniteMPS) -> Result<CoupledSystem> {
    x.ensure_actions(3)?;
    check_cap(x.len(), 3, DEFAULT_TUPLE_CAP)?;
    let group = x.group();
    let order = Rational::from_integer(group.order().into());
    let mut atoms: BTreeMap<Vec<usize>, Rational> = BTreeMap::new();
    for g in group.elements() {
        for p in 0..x.len() {
            let a = x.apply(1, g, p);
            let b = x.apply(2, g, a);
            *atoms.entry(vec![p, a, b]).or_insert_with(Rational::zero) += &x.masses()[p] / &order;
        }
    }
    Ok(CoupledSystem {
        base: x.clone(),
        measure: Joining { arity: 3, atoms },
        schemes: vec![
            vec![vec![0], vec![0], vec![0]],
            vec![vec![], vec![1], vec![1, 2]],
            vec![vec![1, 2], vec![2], vec![]],
        ],
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct MagicReport {
    pub magic: bool,
    /// `I1 ∨ I2`.
    pub join: Partition,
    /// Whether the seminorm test agrees with the partition criterion.
    pub seminorm_agrees: bool,
    pub witness: Option<MagicWitness>,
}

#[derive(Debug, Clone, Serialize)]
pub struct MagicWitness {
    /// An observable orthogonal to `I1 ∨ I2`.
    #[serde(with = "rational::serde_q::vec")]
    pub f: Vec<Rational>,
    /// Label of the point whose indicator is `h`.
    pub h: String,
    /// `avg_g ||E(h (f o T1^g) | I2)||^2`.
    #[serde(with = "rational::serde_q")]
    pub seminorm: Rational,
}

/// `avg_g ||E(h (f o T1^g) | I2)||^2`.
pub fn relative_seminorm(x: &FiniteMPS, f: &[Rational], h: &[Rational], i2: &Partition) -> Rational {
    let values: Vec<Rational> = x
        .group()
        .elements()
        .map(|g| {
            let shifted = Observable::from(f.to_vec()).compose(x.action(0).perm(g));
            x.norm_sq(&x.cond_exp(&shifted.mul(&Observable::from(h.to_vec())), i2))
        })
        .collect();
    uniform_average(&values)
}

/// A basis of the observables orthogonal to every `P`-measurable function:
/// `1_x / mu(x) - 1_y / mu(y)` for consecutive points of each block.
pub fn orthogonal_complement_basis(x: &FiniteMPS, p: &Partition) -> Vec<Vec<Rational>> {
    let mut basis = Vec::new();
    for block in p.blocks() {
        for w in block.windows(2) {
            let mut f = vec![Rational::zero(); x.len()];
            f[w[0]] = x.masses()[w[0]].recip();
            f[w[1]] = -x.masses()[w[1]].recip();
            basis.push(f);
        }
    }
    basis
}

/// `X` is magic when `A(X | I2, T1) = I1 ∨ I2`. On a finite system the
/// left side is everything, so this says `I1 ∨ I2` is full mod null sets; the
/// vanishing of the relative seminorm on the orthogonal complement of
/// `I1 ∨ I2` is computed as an independent cross-check.
pub fn magic_check(x: &FiniteMPS) -> Result<MagicReport> {
    x.ensure_actions(2)?;
    let i1 = x.diagonal_partition(&[0])?;
    let i2 = x.diagonal_partition(&[1])?;
    let join = i1.join(&i2);
    let magic = join.is_full_mod_null(x.masses());
    let mut witness = None;
    let mut all_zero = true;
    for f in orthogonal_complement_basis(x, &join) {
        for h in 0..x.len() {
            let hv = Observable::indicator(x.len(), &[h]);
            let s = relative_seminorm(x, &f, &hv, &i2);
            if !s.is_zero() {
                all_zero = false;
                witness = Some(MagicWitness {
                    f: f.clone(),
                    h: x.labels()[h].clone(),
                    seminorm: s,
                });
                break;
            }
        }
        if !all_zero {
            break;
        }
    }
    Ok(MagicReport {
        magic,
        join,
        seminorm_agrees: magic == all_zero,
        witness,
    })
}

pub fn ensure_magic(x: &FiniteMPS) -> Result<()> {
    let report = magic_check(x)?;
    if report.magic {
        return Ok(());
    }
    let witness = match &report.witness {
        Some(w) => format!(
            "I1 ∨ I2 = {} is not full; f = [{}] has relative seminorm {} against h = 1_{}",
            report.join,
            w.f.iter().map(rational::format).collect::<Vec<_>>().join(", "),
            rational::format(&w.seminorm),
            w.h
        ),
        None => format!("I1 ∨ I2 = {} is not full", report.join),
    };
    Err(Error::precondition("X is magic", witness))
}

#[derive(Debug, Clone, Serialize)]
pub struct SatednessReport {
    pub sated: bool,
    pub pairs_checked: usize,
    /// `(point label of X, block index in Inv(ext))` where the two bilinear
    /// forms differ.
    pub witness: Option<(String, usize)>,
    /// Only the given extension is tested; satedness quantifies over all
    /// extensions in the class.
    pub scope: &'static str,
}

/// Relative independence of `pi^{-1}(X)` and `Inv(ext)` over `pi^{-1}(Inv X)`, where
/// `Inv = I_1 ∨ .. ∨ I_k`: for every point indicator `f` on `X` and every block
/// `b` of `Inv(ext)`, `integral (f o pi) b = integral (E(f | Inv X) o pi) b`.
pub fn satedness_check(x: &FiniteMPS, ext: &dyn Extension) -> Result<SatednessReport> {
    let base = ext.base();
    if base.len() != x.len()
        || base.masses() != x.masses()
        || !Arc::ptr_eq(base.group(), x.group()) && base.group().table() != x.group().table()
        || base.num_actions() != x.num_actions()
        || (0..x.num_actions()).any(|i| base.action(i) != x.action(i))
    {
        return Err(Error::Structural("extension is not built over the given system".into()));
    }
    let inv = ext.invariance_report();
    if !inv.projection_intertwines {
        return Err(Error::Structural("projection does not intertwine the actions".into()));
    }
    let ext_mps = ext.as_mps()?;
    let k = x.num_actions();
    let inv_x = (0..k)
        .map(|i| x.diagonal_partition(&[i]))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .reduce(|a, b| a.join(&b))
        .unwrap_or_else(|| Partition::singletons(x.len()));
    let inv_ext = (0..k)
        .map(|i| ext_mps.diagonal_partition(&[i]))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .reduce(|a, b| a.join(&b))
        .unwrap_or_else(|| Partition::singletons(ext_mps.len()));
    let coord = ext.projection_coord();
    let pi: Vec<usize> = ext.joining().atoms.keys().map(|t| t[coord]).collect();
    let mut checked = 0;
    for p in 0..x.len() {
        let f = Observable::indicator(x.len(), &[p]);
        let ef = x.cond_exp(&f, &inv_x);
        let lifted: Vec<Rational> = pi.iter().map(|&y| f[y].clone()).collect();
        let lifted_e: Vec<Rational> = pi.iter().map(|&y| ef[y].clone()).collect();
        for b in 0..inv_ext.num_blocks() {
            let ind = inv_ext.block_indicator(b);
            checked += 1;
            if ext_mps.inner(&lifted, &ind) != ext_mps.inner(&lifted_e, &ind) {
                return Ok(SatednessReport {
                    sated: false,
                    pairs_checked: checked,
                    witness: Some((x.labels()[p].clone(), b)),
                    scope: "checked against the supplied extension only",
                });
            }
        }
    }
    Ok(SatednessReport {
        sated: true,
        pairs_checked: checked,
        witness: None,
        scope: "checked against the supplied extension only",
    })
}

/// `x -> avg_g f1(T1^g x) f2(T1^g T2^g x) f3(T1^g T2^g T3^g x)`.
pub fn k3_average(x: &FiniteMPS, f1: &[Rational], f2: &[Rational], f3: &[Rational]) -> Result<Observable> {
    x.ensure_actions(3)?;
    let u = GroupMeasure::uniform(x.group().clone());
    Ok(k3_weighted(x, &u, f1, f2, f3))
}

fn k3_weighted(x: &FiniteMPS, m: &GroupMeasure, f1: &[Rational], f2: &[Rational], f3: &[Rational]) -> Observable {
    let mut out = vec![Rational::zero(); x.len()];
    for g in m.support() {
        let w = m.weight(g);
        for (p, o) in out.iter_mut().enumerate() {
            let a = x.apply(0, g, p);
            let b = x.apply(1, g, a);
            let c = x.apply(2, g, b);
            *o += w * &f1[a] * &f2[b] * &f3[c];
        }
    }
    Observable::from(out)
}

/// `T_F1 T_F2 = T1 x T12 x T123` on the coupling, as a system on its support.
fn coupling_f1f2_partition(coupling: &CoupledSystem) -> Result<(FiniteMPS, Partition)> {
    let mps = coupling.as_mps()?;
    let p = mps.diagonal_partition(&[0, 1])?;
    Ok((mps, p))
}

fn tensor_on_support(coupling: &CoupledSystem, fs: [&[Rational]; 3]) -> Vec<Rational> {
    coupling
        .measure
        .atoms
        .keys()
        .map(|t| &fs[0][t[0]] * &fs[1][t[1]] * &fs[2][t[2]])
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct K3Report {
    pub average: Observable,
    /// `||average||^2` from the direct sweep.
    #[serde(with = "rational::serde_q")]
    pub norm_sq_direct: Rational,
    /// `||E_{mu_F}(f1 ⊗ f2 ⊗ f3 | I_{F1,F2})||^2`.
    #[serde(with = "rational::serde_q")]
    pub norm_sq_coupling: Rational,
    /// The average recomputed as a limit along a perturbed Reiter sequence.
    pub reiter_route_agrees: bool,
    pub routes_agree: bool,
    /// Whether `E_{mu_F}(f1 ⊗ f2 ⊗ f3 | I_{F1,F2}) = 0`.
    pub lift_hypothesis: bool,
    /// Hypothesis implies a vanishing average.
    pub lift_implication_holds: bool,
}

/// The `k = 3` average, evaluated directly, through the Furstenberg coupling
/// and along a second Reiter sequence.
pub fn k3_check(x: &FiniteMPS, f1: &[Rational], f2: &[Rational], f3: &[Rational]) -> Result<K3Report> {
    let average = k3_average(x, f1, f2, f3)?;
    let norm_sq_direct = x.norm_sq(&average);
    let coupling = furstenberg_coupling(x)?;
    let (mps, inv) = coupling_f1f2_partition(&coupling)?;
    let tensor = tensor_on_support(&coupling, [f1, f2, f3]);
    let projected = mps.cond_exp(&tensor, &inv);
    let norm_sq_coupling = mps.norm_sq(&projected);

    let group = x.group().clone();
    let nu = GroupMeasure::delta(group.clone(), group.id());
    let seq = ReiterSequence::perturbed_uniform(nu, 1, 2);
    let along = limit_along(&[&seq], |m| k3_weighted(x, m[0], f1, f2, f3).into_inner())?;
    let reiter_route_agrees = along[..] == average[..];

    let lift_hypothesis = projected.is_zero();
    Ok(K3Report {
        lift_implication_holds: !lift_hypothesis || average.is_zero(),
        routes_agree: norm_sq_direct == norm_sq_coupling && reiter_route_agrees,
        average,
        norm_sq_direct,
        norm_sq_coupling,
        reiter_route_agrees,
        lift_hypothesis,
    })
}

/// A nonzero `f2` with `E_{mu_F}(f1 ⊗ f2 ⊗ f3 | I_{F1,F2}) = 0`, if one exists:
/// the map `f2 -> E(f1 ⊗ f2 ⊗ f3 | I)` is linear, so this is a nullspace vector.
pub fn lift_instance(x: &FiniteMPS, f1: &[Rational], f3: &[Rational]) -> Result<Option<Observable>> {
    let coupling = furstenberg_coupling(x)?;
    let (mps, inv) = coupling_f1f2_partition(&coupling)?;
    let points: Vec<&Vec<usize>> = coupling.measure.atoms.keys().collect();
    let mut rows = vec![vec![Rational::zero(); x.len()]; points.len()];
    for block in inv.blocks() {
        let mass: Rational = block.iter().map(|&s| &mps.masses()[s]).sum();
        // E(F | I) at any point of the block, as a linear form in f2
        let mut form = vec![Rational::zero(); x.len()];
        for &s in block {
            let t = points[s];
            form[t[1]] += &mps.masses()[s] * &f1[t[0]] * &f3[t[2]] / &mass;
        }
        for &s in block {
            rows[s] = form.clone();
        }
    }
    let null = Matrix::from_rows(rows).nullspace();
    Ok(null.into_iter().next().map(Observable::from))
}

#[derive(Debug, Clone, Serialize)]
pub struct CharFactorReport {
    pub equal: bool,
    #[serde(with = "rational::serde_q")]
    pub original: Rational,
    #[serde(with = "rational::serde_q")]
    pub projected: Rational,
}

/// Compares `avg_g chi(g) integral f0 T1^g f1 T12^g f2` with the same average
/// after `f0 -> E(f0 | I1 ∨ K12)`, `f1 -> E(f1 | I1 ∨ I2)`, `f2 -> E(f2 | I2 ∨ K12)`;
/// the `K`-joins are full on a finite system.
pub fn char_factor_check(
    x: &FiniteMPS,
    chi: &Weight,
    f0: &[Rational],
    f1: &[Rational],
    f2: &[Rational],
) -> Result<CharFactorReport> {
    ensure_magic(x)?;
    if chi.values().len() != x.group().order() {
        return Err(Error::Domain("weight defined on a different group".into()));
    }
    let join = x.diagonal_partition(&[0])?.join(&x.diagonal_partition(&[1])?);
    let full = Partition::kronecker_full(x.len());
    let i1k = x.diagonal_partition(&[0])?.join(&full);
    let i2k = x.diagonal_partition(&[1])?.join(&full);
    let weighted = |a: &[Rational], b: &[Rational], c: &[Rational]| {
        let values: Vec<Rational> = x
            .group()
            .elements()
            .map(|g| &chi.values()[g] * x.correlation(a, b, c, g))
            .collect();
        uniform_average(&values)
    };
    let original = weighted(f0, f1, f2);
    let projected = weighted(&x.cond_exp(f0, &i1k), &x.cond_exp(f1, &join), &x.cond_exp(f2, &i2k));
    Ok(CharFactorReport {
        equal: original == projected,
        original,
        projected,
    })
}
