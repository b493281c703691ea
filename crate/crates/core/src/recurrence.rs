//! Correlation sequences `c_g = mu(A ∩ T1^g A ∩ T1^g T2^g A)`, the return set
//! `R_eps`, its covering numbers, and the weighted lower bound
//! `avg_g chi(g) c_g >= mu(A)^4 - eps` through the weight `chi = phi(kappa) / mean`.

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::cube::ensure_magic;
use crate::error::{Error, Result};
use crate::group::FiniteGroup;
use crate::measure::uniform_average;
use crate::partition::Partition;
use crate::rational::{self, Rational};
use crate::system::{FiniteMPS, Observable};

/// `(∫ f)^4`.
pub fn fourth_power_bound(x: &FiniteMPS, f: &[Rational]) -> Rational {
    rational::pow(&x.integrate(f), 4)
}

/// `mu(A ∩ T1^g A ∩ T1^g T2^g A)` for every `g`, with `T^g A` the image set.
pub fn correlation_sequence(x: &FiniteMPS, a: &[usize]) -> Vec<Rational> {
    let ind = Observable::indicator(x.len(), a);
    let group = x.group();
    group
        .elements()
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&g| x.correlation(&ind, &ind, &ind, group.inv(g)))
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct CorrelationReport {
    #[serde(with = "rational::serde_q::vec")]
    pub c: Vec<Rational>,
    #[serde(with = "rational::serde_q")]
    pub mu_a: Rational,
    /// `mu(A)^4 - eps`.
    #[serde(with = "rational::serde_q")]
    pub threshold: Rational,
    /// `c_g > threshold`.
    pub in_r: Vec<bool>,
}

impl CorrelationReport {
    pub fn return_set(&self) -> Vec<usize> {
        (0..self.c.len()).filter(|&g| self.in_r[g]).collect()
    }

    /// `(g, c_g, in_R_epsilon)` rows.
    pub fn rows(&self) -> Vec<(usize, String, bool)> {
        self.c
            .iter()
            .enumerate()
            .map(|(g, c)| (g, rational::format(c), self.in_r[g]))
            .collect()
    }
}

pub fn correlation_report(x: &FiniteMPS, a: &[usize], eps: &Rational) -> Result<CorrelationReport> {
    x.ensure_actions(2)?;
    check_set(x, a)?;
    if !eps.is_positive() {
        return Err(Error::Domain("epsilon must be positive".into()));
    }
    let c = correlation_sequence(x, a);
    let mu_a = x.mass_of(a);
    let threshold = rational::pow(&mu_a, 4) - eps;
    let in_r = c.iter().map(|v| *v > threshold).collect();
    Ok(CorrelationReport {
        c,
        mu_a,
        threshold,
        in_r,
    })
}

fn check_set(x: &FiniteMPS, a: &[usize]) -> Result<()> {
    let mut seen = vec![false; x.len()];
    for &p in a {
        if p >= x.len() || seen[p] {
            return Err(Error::Domain(format!("invalid or repeated point index {p} in set")));
        }
        seen[p] = true;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Side {
    /// `K R = G`.
    Left,
    /// `R K = G`.
    Right,
}

#[derive(Debug, Clone, Serialize)]
pub struct Cover {
    pub side: Side,
    pub elements: Vec<usize>,
    /// Proven minimal by exhaustive search.
    pub minimal: bool,
    /// Checked by recomputing the product set.
    pub verified: bool,
}

/// Groups up to this order get an exact minimum cover.
pub const EXACT_COVER_MAX: usize = 24;

fn translate_masks(group: &FiniteGroup, r: &[usize], side: &Side) -> Vec<u128> {
    group
        .elements()
        .map(|k| {
            r.iter().fold(0u128, |m, &x| {
                let y = match side {
                    Side::Left => group.mul(k, x),
                    Side::Right => group.mul(x, k),
                };
                m | (1u128 << y)
            })
        })
        .collect()
}

fn greedy_cover(masks: &[u128], full: u128) -> Vec<usize> {
    let mut covered = 0u128;
    let mut chosen = Vec::new();
    while covered != full {
        let best = (0..masks.len())
            .max_by_key(|&k| ((masks[k] & !covered).count_ones(), std::cmp::Reverse(k)))
            .expect("nonempty group");
        chosen.push(best);
        covered |= masks[best];
    }
    chosen.sort_unstable();
    chosen
}

fn exact_cover(masks: &[u128], full: u128, n: usize, size: usize, covered: u128, chosen: &mut Vec<usize>) -> bool {
    if covered == full {
        return true;
    }
    if chosen.len() == size {
        return false;
    }
    let uncovered = (!covered & full).count_ones() as usize;
    let widest = masks.iter().map(|m| (m & !covered).count_ones() as usize).max().unwrap_or(0);
    if widest == 0 || uncovered.div_ceil(widest) > size - chosen.len() {
        return false;
    }
    // some chosen translate must contain the first uncovered element
    let target = (0..n).find(|&y| covered & (1u128 << y) == 0).expect("not full");
    for k in 0..masks.len() {
        if masks[k] & (1u128 << target) != 0 && !chosen.contains(&k) {
            chosen.push(k);
            if exact_cover(masks, full, n, size, covered | masks[k], chosen) {
                return true;
            }
            chosen.pop();
        }
    }
    false
}

/// A smallest set `K` with `K R = G` (left) or `R K = G` (right); greedy with
/// exact verification above [`EXACT_COVER_MAX`].
pub fn covering_set(group: &FiniteGroup, r: &[usize], side: Side) -> Result<Cover> {
    let n = group.order();
    if r.is_empty() {
        return Err(Error::Domain("the empty set covers nothing".into()));
    }
    if n > 128 {
        return Err(Error::TooLarge {
            what: "covering search".into(),
            needed: n,
            cap: 128,
        });
    }
    let masks = translate_masks(group, r, &side);
    let full = if n == 128 { u128::MAX } else { (1u128 << n) - 1 };
    let greedy = greedy_cover(&masks, full);
    let (elements, minimal) = if n <= EXACT_COVER_MAX {
        let lower = n.div_ceil(r.len());
        let mut found = greedy.clone();
        for size in lower..greedy.len() {
            let mut chosen = Vec::new();
            if exact_cover(&masks, full, n, size, 0, &mut chosen) {
                chosen.sort_unstable();
                found = chosen;
                break;
            }
        }
        (found, true)
    } else {
        (greedy, false)
    };
    let verified = {
        let mut hit = vec![false; n];
        for &k in &elements {
            for &x in r {
                hit[match side {
                    Side::Left => group.mul(k, x),
                    Side::Right => group.mul(x, k),
                }] = true;
            }
        }
        hit.iter().all(|&h| h)
    };
    Ok(Cover {
        side,
        elements,
        minimal,
        verified,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct RothReport {
    pub correlations: CorrelationReport,
    pub return_set: Vec<usize>,
    pub left_cover: Cover,
    pub right_cover: Cover,
    /// `R_eps^{-1} = {g : mu(T12^g A ∩ T2^g A ∩ A) > mu(A)^4 - eps}`.
    pub inverse_identity_holds: bool,
}

/// Full `c_g` sweep, `R_eps` and its left and right covering witnesses on an
/// ergodic system with two actions.
pub fn roth_verify(x: &FiniteMPS, a: &[usize], eps: &Rational) -> Result<RothReport> {
    x.ensure_actions(2)?;
    x.ensure_ergodic()?;
    let correlations = correlation_report(x, a, eps)?;
    let group = x.group();
    let r = correlations.return_set();
    if r.is_empty() {
        return Err(Error::Construction("R_eps is empty although c_id = mu(A)".into()));
    }
    let left_cover = covering_set(group, &r, Side::Left)?;
    let right_cover = covering_set(group, &r, Side::Right)?;

    // mu(T12^g A ∩ T2^g A ∩ A): x in T^g A iff T^{g^-1} x in A
    let ind = Observable::indicator(x.len(), a);
    let mut inverse: Vec<usize> = group
        .elements()
        .filter(|&g| {
            let h = group.inv(g);
            let v: Rational = (0..x.len())
                .filter(|&p| ind[p].is_one())
                .map(|p| {
                    let q2 = x.apply(1, h, p);
                    let q12 = x.apply(0, h, q2);
                    &x.masses()[p] * &ind[q2] * &ind[q12]
                })
                .sum();
            v > correlations.threshold
        })
        .collect();
    inverse.sort_unstable();
    let mut r_inv: Vec<usize> = r.iter().map(|&g| group.inv(g)).collect();
    r_inv.sort_unstable();

    Ok(RothReport {
        inverse_identity_holds: inverse == r_inv,
        return_set: r,
        correlations,
        left_cover,
        right_cover,
    })
}

/// A nonnegative function of unit mean on a finite group.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Weight {
    #[serde(with = "rational::serde_q::vec")]
    values: Vec<Rational>,
}

impl Weight {
    pub fn new(values: Vec<Rational>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Domain("weight on an empty group".into()));
        }
        if let Some(g) = values.iter().position(Signed::is_negative) {
            return Err(Error::Domain(format!("weight is negative at {g}")));
        }
        if !uniform_average(&values).is_one() {
            return Err(Error::Domain("weight does not have mean 1".into()));
        }
        Ok(Weight { values })
    }

    pub fn constant_one(order: usize) -> Self {
        Weight {
            values: vec![Rational::one(); order],
        }
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn mean(&self) -> Rational {
        uniform_average(&self.values)
    }

    /// `chi(g) = <delta_id, pi(g) chi>` for the regular anti-representation
    /// `(pi(g) u)(x) = u(g x)`.
    pub fn matrix_coefficient(&self, group: &FiniteGroup) -> MatrixCoefficient {
        let mut w = vec![Rational::zero(); group.order()];
        w[group.id()] = Rational::one();
        MatrixCoefficient {
            dim: group.order(),
            perms: group.elements().map(|g| group.left_translation(g)).collect(),
            v: self.values.clone(),
            w,
        }
    }
}

/// `phi(t) = 0` for `t <= B - eps`, `1` for `t >= B`, linear in between.
pub fn phi(t: &Rational, b: &Rational, eps: &Rational) -> Rational {
    let lo = b - eps;
    if *t <= lo {
        Rational::zero()
    } else if t >= b {
        Rational::one()
    } else {
        (t - lo) / eps
    }
}

/// `chi = phi o kappa / avg(phi o kappa)`.
pub fn build_weight(kappa: &[Rational], b: &Rational, eps: &Rational) -> Result<Weight> {
    if !eps.is_positive() {
        return Err(Error::Domain("epsilon must be positive".into()));
    }
    let raw: Vec<Rational> = kappa.iter().map(|k| phi(k, b, eps)).collect();
    let mean = uniform_average(&raw);
    if mean.is_zero() {
        return Err(Error::Construction(format!(
            "phi(kappa) vanishes identically: every kappa(g) <= B - eps = {}",
            b - eps
        )));
    }
    Weight::new(raw.into_iter().map(|v| v / &mean).collect())
}

/// A matrix coefficient `g -> <w, pi(g) v>` of a permutation representation,
/// `(pi(g) u)_i = u_{perm_g(i)}`; such `pi` is an anti-homomorphism when the
/// permutations come from a left action, and orthogonal (unitary) exactly.
#[derive(Debug, Clone, Serialize)]
pub struct MatrixCoefficient {
    pub dim: usize,
    pub perms: Vec<Vec<usize>>,
    #[serde(with = "rational::serde_q::vec")]
    pub v: Vec<Rational>,
    #[serde(with = "rational::serde_q::vec")]
    pub w: Vec<Rational>,
}

impl MatrixCoefficient {
    pub fn evaluate(&self, g: usize) -> Rational {
        self.perms[g]
            .iter()
            .zip(&self.w)
            .filter(|(_, w)| !w.is_zero())
            .map(|(&j, w)| w * &self.v[j])
            .sum()
    }

    pub fn matrix(&self, g: usize) -> crate::linalg::Matrix {
        let mut m = crate::linalg::Matrix::zeros(self.dim, self.dim);
        for (i, &j) in self.perms[g].iter().enumerate() {
            m[(i, j)] = Rational::one();
        }
        m
    }

    /// `pi(gh) = pi(h) pi(g)`.
    pub fn is_antihomomorphism(&self, group: &FiniteGroup) -> bool {
        group.elements().all(|g| {
            group.elements().all(|h| {
                let gh = &self.perms[group.mul(g, h)];
                // (pi(h) pi(g) u)_i = (pi(g) u)_{perm_h(i)} = u_{perm_g(perm_h(i))}
                (0..self.dim).all(|i| gh[i] == self.perms[g][self.perms[h][i]])
            })
        })
    }

    /// `pi(g)^T pi(g) = I` for every `g`.
    pub fn is_unitary(&self) -> bool {
        self.perms.iter().all(|p| crate::group::is_permutation(p))
    }
}

/// `kappa(g) = ∫ f (T1^g E(f | I1 ∨ I2)) (T1^g T2^g f)`, i.e. the general formula
/// with `E(f | I_i ∨ K12) = f` since the Kronecker factor of a finite system is full.
pub fn kappa_values(x: &FiniteMPS, f: &[Rational]) -> Result<Vec<Rational>> {
    x.ensure_actions(2)?;
    let full = Partition::kronecker_full(x.len());
    let f0 = x.cond_exp(f, &x.diagonal_partition(&[0])?.join(&full));
    let f1 = x.cond_exp(f, &x.diagonal_partition(&[0])?.join(&x.diagonal_partition(&[1])?));
    let f2 = x.cond_exp(f, &x.diagonal_partition(&[1])?.join(&full));
    Ok(x.group()
        .elements()
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&g| x.correlation(&f0, &f1, &f2, g))
        .collect())
}

#[derive(Debug, Clone, Serialize)]
pub struct KappaReport {
    #[serde(with = "rational::serde_q::vec")]
    pub values: Vec<Rational>,
    /// `(∫ f)^4`.
    #[serde(with = "rational::serde_q")]
    pub b: Rational,
    /// `kappa(id) >= B`.
    pub lower_bound_at_identity: bool,
    /// `kappa` reproduced by a permutation-representation matrix coefficient.
    pub matrix_coefficient_agrees: bool,
}

fn check_unit_range(f: &[Rational]) -> Result<()> {
    if Observable::from(f.to_vec()).in_unit_interval() {
        Ok(())
    } else {
        Err(Error::precondition("f takes values in [0, 1]", "f has a value outside [0, 1]"))
    }
}

/// `kappa(g) = <w, pi(g) v>` with `pi(g) u(a, b) = u(T1^g a, T1^g T2^g b)` on
/// `C^X ⊗ C^X`, `v = f1 ⊗ f2` and `w` supported on the diagonal with `w(l, l) = mu(l) f0(l)`.
pub fn kappa_matrix_coefficient(x: &FiniteMPS, f0: &[Rational], f1: &[Rational], f2: &[Rational]) -> MatrixCoefficient {
    let n = x.len();
    let perms = x
        .group()
        .elements()
        .map(|g| {
            (0..n * n)
                .map(|ab| {
                    let (a, b) = (ab / n, ab % n);
                    x.apply(0, g, a) * n + x.diagonal_perm(&[0, 1], g)[b]
                })
                .collect()
        })
        .collect();
    let mut v = vec![Rational::zero(); n * n];
    let mut w = vec![Rational::zero(); n * n];
    for a in 0..n {
        for b in 0..n {
            v[a * n + b] = &f1[a] * &f2[b];
        }
        w[a * n + a] = &x.masses()[a] * &f0[a];
    }
    MatrixCoefficient { dim: n * n, perms, v, w }
}

/// `kappa` on an ergodic magic system with `f` valued in `[0, 1]`.
pub fn kappa(x: &FiniteMPS, f: &[Rational]) -> Result<KappaReport> {
    x.ensure_actions(2)?;
    check_unit_range(f)?;
    x.ensure_ergodic()?;
    ensure_magic(x)?;
    let values = kappa_values(x, f)?;
    let b = fourth_power_bound(x, f);
    let id = x.group().id();
    let join = x.diagonal_partition(&[0])?.join(&x.diagonal_partition(&[1])?);
    let mc = kappa_matrix_coefficient(x, f, &x.cond_exp(f, &join), f);
    let matrix_coefficient_agrees = x.group().elements().all(|g| mc.evaluate(g) == values[g]);
    Ok(KappaReport {
        lower_bound_at_identity: values[id] >= b,
        values,
        b,
        matrix_coefficient_agrees,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct WeightedBoundReport {
    /// False when `X` is not magic: the bound is then not a consequence of
    /// the finite argument and is reported for information only.
    pub certified: bool,
    #[serde(with = "rational::serde_q")]
    pub b: Rational,
    #[serde(with = "rational::serde_q")]
    pub epsilon: Rational,
    #[serde(with = "rational::serde_q")]
    pub kappa_at_identity: Rational,
    pub weight: Weight,
    /// `avg_g chi(g) ∫ f T1^g f T12^g f`.
    #[serde(with = "rational::serde_q")]
    pub weighted_limit: Rational,
    /// `avg_g chi(g) kappa(g)`.
    #[serde(with = "rational::serde_q")]
    pub weighted_kappa: Rational,
    /// `chi(g) kappa(g) >= chi(g) (B - eps)` for all `g`.
    pub pointwise: bool,
    /// `weighted_limit >= B - eps`.
    pub holds: bool,
}

pub fn weighted_lower_bound_check(x: &FiniteMPS, f: &[Rational], eps: &Rational) -> Result<WeightedBoundReport> {
    x.ensure_actions(2)?;
    check_unit_range(f)?;
    x.ensure_ergodic()?;
    let certified = crate::cube::magic_check(x)?.magic;
    let kappa = kappa_values(x, f)?;
    let b = fourth_power_bound(x, f);
    let weight = build_weight(&kappa, &b, eps)?;
    let group = x.group();
    let c: Vec<Rational> = group.elements().map(|g| x.correlation(f, f, f, g)).collect();
    let chi = weight.values();
    let weighted_limit = uniform_average(&chi.iter().zip(&c).map(|(w, v)| w * v).collect::<Vec<_>>());
    let weighted_kappa = uniform_average(&chi.iter().zip(&kappa).map(|(w, v)| w * v).collect::<Vec<_>>());
    let lower = &b - eps;
    let pointwise = chi.iter().zip(&kappa).all(|(w, k)| w * k >= w * &lower);
    Ok(WeightedBoundReport {
        certified,
        holds: weighted_limit >= lower,
        kappa_at_identity: kappa[group.id()].clone(),
        b,
        epsilon: eps.clone(),
        weight,
        weighted_limit,
        weighted_kappa,
        pointwise,
    })
}
