//! Densities of subsets of finite groups and of `Z^d`, and the corners
//! statement `d(E ∩ (g, id)E ∩ (g, g)E) >= d(E)^4 - eps` on `G x G`.
//!
//! On a finite group the translation system `X = G x G` with uniform measure,
//! `T1^g (x, y) = (g x, y)` and `T2^g (x, y) = (x, g y)` turns densities into
//! measures exactly, so the corners statement is the recurrence statement for
//! `A = E`. On `Z^d` only window estimates over translated boxes are reported.

use std::collections::BTreeSet;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::FiniteGroup;
use crate::rational::{self, Rational};
use crate::recurrence::{covering_set, roth_verify, Cover, Side};
use crate::system::{Action, FiniteMPS};

/// Decidable subsets of `Z^d`.
#[derive(Debug, Clone, PartialEq)]
pub enum Predicate {
    /// First coordinate even.
    Even,
    /// `x - y` even (dimension 2).
    EvenDiagonal,
    /// Each point independently with probability `p`, from a seeded stream.
    Random { p: Rational, seed: u64 },
}

impl Predicate {
    /// `"even"`, `"even-diagonal"` or `"random:p,seed"`.
    pub fn parse(text: &str) -> Result<Self> {
        match text {
            "even" => Ok(Predicate::Even),
            "even-diagonal" => Ok(Predicate::EvenDiagonal),
            _ => {
                let body = text
                    .strip_prefix("random:")
                    .ok_or_else(|| Error::parse(format!("predicate \"{text}\""), "unknown predicate"))?;
                let (p, seed) = body
                    .split_once(',')
                    .ok_or_else(|| Error::parse(format!("predicate \"{text}\""), "expected random:p,seed"))?;
                let p = rational::parse(p.trim())?;
                if p < Rational::zero() || p > Rational::one() {
                    return Err(Error::parse(format!("predicate \"{text}\""), "probability outside [0, 1]"));
                }
                let seed = seed
                    .trim()
                    .parse()
                    .map_err(|_| Error::parse(format!("predicate \"{text}\""), "seed is not an unsigned integer"))?;
                Ok(Predicate::Random { p, seed })
            }
        }
    }

    pub fn contains(&self, x: &[i64]) -> bool {
        match self {
            Predicate::Even => x.first().is_some_and(|v| v % 2 == 0),
            Predicate::EvenDiagonal => x.len() >= 2 && (x[0] - x[1]) % 2 == 0,
            Predicate::Random { p, seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                let stream = x.iter().fold(0u64, |acc, &c| acc.rotate_left(32) ^ (c as u32 as u64));
                rng.set_stream(stream);
                rng.set_word_pos(2 * x.len() as u128);
                // u / 2^64 < p
                Rational::new(BigInt::from(rng.next_u64()), BigInt::one() << 64) < *p
            }
        }
    }
}

#[derive(Debug, Clone)]
pub enum LatticeSet {
    Predicate(Predicate),
    Elements(BTreeSet<Vec<i64>>),
}

impl LatticeSet {
    pub fn contains(&self, x: &[i64]) -> bool {
        match self {
            LatticeSet::Predicate(p) => p.contains(x),
            LatticeSet::Elements(s) => s.contains(x),
        }
    }
}

/// `|E| / |G|`.
pub fn finite_density(group: &FiniteGroup, members: &[usize]) -> Result<Rational> {
    let set: BTreeSet<usize> = members.iter().copied().collect();
    if let Some(&g) = set.iter().find(|&&g| g >= group.order()) {
        return Err(Error::Domain(format!("element {g} outside the group")));
    }
    Ok(Rational::new(set.len().into(), group.order().into()))
}

fn box_points(center: &[i64], radius: i64) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::with_capacity(center.len())];
    for &c in center {
        out = out
            .into_iter()
            .flat_map(|p| {
                (c - radius..=c + radius).map(move |v| {
                    let mut q = p.clone();
                    q.push(v);
                    q
                })
            })
            .collect();
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct WindowDensity {
    pub radius: i64,
    /// `max_t |E ∩ (t + [-N, N]^d)| / (2N + 1)^d` over the scanned translates.
    #[serde(with = "rational::serde_q")]
    pub value: Rational,
    pub argmax: Vec<i64>,
}

/// Window estimate: the largest relative count in a box of radius `radius`
/// centred at any `t` in `[-scan, scan]^d`.
pub fn window_density(set: &(dyn Fn(&[i64]) -> bool + Sync), dim: usize, radius: i64, scan: i64) -> Result<WindowDensity> {
    if radius < 0 || scan < 0 || dim == 0 {
        return Err(Error::Domain("empty window".into()));
    }
    let size = (2 * radius + 1).pow(dim as u32);
    let centers = box_points(&vec![0; dim], scan);
    let counts: Vec<usize> = centers
        .par_iter()
        .map(|t| box_points(t, radius).iter().filter(|p| set(p)).count())
        .collect();
    let (best, count) = counts
        .iter()
        .enumerate()
        .max_by_key(|(i, c)| (**c, std::cmp::Reverse(*i)))
        .expect("nonempty scan");
    Ok(WindowDensity {
        radius,
        value: Rational::new((*count).into(), size.into()),
        argmax: centers[best].clone(),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct DensityReport {
    /// Exact on a finite group.
    #[serde(with = "rational::serde_q::option")]
    pub exact: Option<Rational>,
    /// Window estimates on `Z^d`, one per radius.
    pub windows: Vec<WindowDensity>,
    /// Whether the window values are nonincreasing in the radius.
    pub monotone: Option<bool>,
}

pub enum DensitySpec {
    Finite { group: Arc<FiniteGroup>, members: Vec<usize> },
    Lattice { dim: usize, set: LatticeSet, radii: Vec<i64>, scan: i64 },
}

pub fn upper_density(spec: &DensitySpec) -> Result<DensityReport> {
    match spec {
        DensitySpec::Finite { group, members } => Ok(DensityReport {
            exact: Some(finite_density(group, members)?),
            windows: Vec::new(),
            monotone: None,
        }),
        DensitySpec::Lattice { dim, set, radii, scan } => {
            if radii.is_empty() {
                return Err(Error::Domain("empty window".into()));
            }
            let windows = radii
                .iter()
                .map(|&r| window_density(&|x| set.contains(x), *dim, r, *scan))
                .collect::<Result<Vec<_>>>()?;
            let monotone = windows.windows(2).all(|w| w[1].value <= w[0].value);
            Ok(DensityReport {
                exact: None,
                windows,
                monotone: Some(monotone),
            })
        }
    }
}

/// `G x G` as a finite system with the two coordinate translations.
pub fn translation_system(group: Arc<FiniteGroup>) -> Result<FiniteMPS> {
    let n = group.order();
    let t1 = Action::from_table(
        group
            .elements()
            .map(|g| (0..n * n).map(|p| group.mul(g, p / n) * n + p % n).collect())
            .collect(),
    );
    let t2 = Action::from_table(
        group
            .elements()
            .map(|g| (0..n * n).map(|p| (p / n) * n + group.mul(g, p % n)).collect())
            .collect(),
    );
    let labels = (0..n * n).map(|p| format!("({},{})", p / n, p % n)).collect();
    let mass = Rational::new(BigInt::one(), BigInt::from(n * n));
    FiniteMPS::new(group, labels, vec![mass; n * n], vec![t1, t2])
}

#[derive(Debug, Clone, Serialize)]
pub struct CornersReport {
    #[serde(with = "rational::serde_q")]
    pub density: Rational,
    /// `d(E)^4 - eps`.
    #[serde(with = "rational::serde_q")]
    pub threshold: Rational,
    /// `d(E ∩ (g, id)E ∩ (g, g)E)` per `g`.
    #[serde(with = "rational::serde_q::vec")]
    pub corner_density: Vec<Rational>,
    /// `{g : corner density >= threshold}`.
    pub good: Vec<usize>,
    pub cover: Cover,
    /// `c_g` from the recurrence sweep on the translation system equals the
    /// corner density for every `g`.
    pub matches_recurrence: bool,
    /// Elements where the corner density equals the threshold: these are good
    /// (`>=`) but outside `R_eps` (`>`).
    pub boundary: Vec<usize>,
    /// `good` minus `boundary` equals `R_eps` exactly.
    pub sets_agree: bool,
    pub note: &'static str,
}

/// Exact corners check on a finite `G x G`; `members` are pairs `(x, y)`.
pub fn corners_check(group: Arc<FiniteGroup>, members: &[(usize, usize)], eps: &Rational) -> Result<CornersReport> {
    let n = group.order();
    let mut inside = vec![false; n * n];
    for &(x, y) in members {
        if x >= n || y >= n {
            return Err(Error::Domain(format!("({x}, {y}) outside G x G")));
        }
        inside[x * n + y] = true;
    }
    let size = Rational::from_integer((n * n).into());
    let count = inside.iter().filter(|&&b| b).count();
    let density = Rational::from_integer(count.into()) / &size;
    let threshold = rational::pow(&density, 4) - eps;
    // (x, y) in (g, h)E iff (g^-1 x, h^-1 y) in E
    let corner_density: Vec<Rational> = group
        .elements()
        .map(|g| {
            let gi = group.inv(g);
            let c = (0..n * n)
                .filter(|&p| {
                    let (x, y) = (p / n, p % n);
                    let (a, b) = (group.mul(gi, x), group.mul(gi, y));
                    inside[p] && inside[a * n + y] && inside[a * n + b]
                })
                .count();
            Rational::from_integer(c.into()) / &size
        })
        .collect();
    let good: Vec<usize> = group.elements().filter(|&g| corner_density[g] >= threshold).collect();
    let cover = covering_set(&group, &good, Side::Left)?;

    let system = translation_system(group.clone())?;
    let set: Vec<usize> = (0..n * n).filter(|&p| inside[p]).collect();
    let (matches_recurrence, boundary, sets_agree) = if set.is_empty() {
        // mu(A) = 0: c_g = 0 > -eps everywhere
        (true, Vec::new(), true)
    } else {
        let roth = roth_verify(&system, &set, eps)?;
        let matches = roth.correlations.c == corner_density;
        let boundary: Vec<usize> = group.elements().filter(|&g| corner_density[g] == threshold).collect();
        let strict: Vec<usize> = good.iter().copied().filter(|g| !boundary.contains(g)).collect();
        (matches, boundary, strict == roth.return_set)
    };
    Ok(CornersReport {
        density,
        threshold,
        corner_density,
        good,
        cover,
        matches_recurrence,
        boundary,
        sets_agree,
        note: "densities on G x G are measures in the translation system X = G x G, which plays the role of the correspondence system",
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct CornersWindowReport {
    /// Window estimate of `d(E)` at the given radius.
    #[serde(with = "rational::serde_q")]
    pub density: Rational,
    #[serde(with = "rational::serde_q")]
    pub threshold: Rational,
    /// Tested shifts `g` in `[-shift, shift]` and their window estimates.
    pub values: Vec<(i64, String)>,
    pub good: Vec<i64>,
    /// A set `K` with `K + good ⊇ [-shift/2, shift/2]`, a heuristic witness.
    pub inner_cover: Vec<i64>,
    pub note: &'static str,
}

/// Window estimate of the corners statement on `Z^2`, with `g` ranging over
/// the diagonal-free shifts `(g, 0)` and `(g, g)` for integers `g`.
pub fn corners_window(set: &LatticeSet, radius: i64, shift: i64, eps: &Rational) -> Result<CornersWindowReport> {
    let scan = radius;
    let density = window_density(&|x| set.contains(x), 2, radius, scan)?.value;
    let threshold = rational::pow(&density, 4) - eps;
    let values: Vec<(i64, Rational)> = (-shift..=shift)
        .map(|g| {
            let v = window_density(
                &|x| set.contains(x) && set.contains(&[x[0] - g, x[1]]) && set.contains(&[x[0] - g, x[1] - g]),
                2,
                radius,
                scan,
            )?
            .value;
            Ok((g, v))
        })
        .collect::<Result<_>>()?;
    let good: Vec<i64> = values.iter().filter(|(_, v)| *v >= threshold).map(|(g, _)| *g).collect();
    let inner: BTreeSet<i64> = (-shift / 2..=shift / 2).collect();
    let mut uncovered = inner.clone();
    let mut inner_cover = Vec::new();
    while !uncovered.is_empty() && !good.is_empty() {
        let best = (-shift..=shift)
            .max_by_key(|k| (good.iter().filter(|g| uncovered.contains(&(k + *g))).count(), -k.abs()))
            .expect("nonempty range");
        let hit: Vec<i64> = good.iter().map(|g| best + g).filter(|x| uncovered.contains(x)).collect();
        if hit.is_empty() {
            break;
        }
        for x in hit {
            uncovered.remove(&x);
        }
        inner_cover.push(best);
    }
    Ok(CornersWindowReport {
        density,
        threshold,
        values: values.into_iter().map(|(g, v)| (g, rational::format(&v))).collect(),
        good,
        inner_cover,
        note: "window estimates only: the supremum over all Følner sequences is not computed",
    })
}
