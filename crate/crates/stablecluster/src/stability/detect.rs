//! Direct detectors: cluster-capturing centers, (β,γ)-hits and the
//! uniform-approximation condition for a candidate center set.

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::metric::{approx_le, Instance};
use crate::objectives::{binomial, for_each_combination, nearest_position, Clustering};

/// Subset count above which the exhaustive uniform-approximation check refuses to run.
pub const UNIFORM_EXHAUSTIVE_LIMIT: u128 = 1_000_000;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CccReport {
    /// (i, j): c_i captures C_j.
    pub pairs: Vec<(usize, usize)>,
    /// (i, j, l): c_i captures C_j with c_l discounted.
    pub triples: Vec<(usize, usize, usize)>,
}

fn kcenter_radius_of(inst: &Instance, opt: &Clustering) -> f64 {
    (0..inst.n())
        .map(|v| inst.d(opt.centers()[opt.assign()[v]], v))
        .fold(0.0, f64::max)
}

fn captures(inst: &Instance, opt: &Clustering, r_star: f64, eps: f64, i: usize, j: usize, skip: Option<usize>) -> bool {
    let budget = eps * inst.n() as f64;
    let ci = opt.centers()[i];
    let members = opt.cluster(j);
    let far = members.iter().filter(|&&v| inst.d(ci, v) > r_star).count();
    if far as f64 > budget {
        return false;
    }
    (0..opt.k()).filter(|&x| x != i && x != j && Some(x) != skip).all(|x| {
        let cx = opt.centers()[x];
        let bad = members
            .iter()
            .filter(|&&v| !(inst.d(ci, v) <= r_star && inst.d(ci, v) < inst.d(cx, v)))
            .count();
        bad as f64 <= budget
    })
}

/// CCC pairs and CCC2 triples of an optimal k-center clustering. Each
/// quantified condition may fail on at most εn points of C_j; r* is the
/// k-center cost of `opt`.
pub fn detect_ccc(inst: &Instance, opt: &Clustering, eps: f64) -> CccReport {
    let r_star = kcenter_radius_of(inst, opt);
    let k = opt.k();
    let mut report = CccReport::default();
    for i in 0..k {
        for j in (0..k).filter(|&j| j != i) {
            if captures(inst, opt, r_star, eps, i, j, None) {
                report.pairs.push((i, j));
            }
            for l in (0..k).filter(|&l| l != i && l != j) {
                if captures(inst, opt, r_star, eps, i, j, Some(l)) {
                    report.triples.push((i, j, l));
                }
            }
        }
    }
    report
}

/// Every point s has at least `beta` members c of `c_set` with d(c,s) ≤ γ r*.
pub fn check_hits(inst: &Instance, c_set: &[usize], beta: usize, gamma: f64, r_star: f64) -> bool {
    let bound = gamma * r_star;
    (0..inst.n()).all(|s| c_set.iter().filter(|&&c| approx_le(inst.d(c, s), bound)).count() >= beta)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UniformMode {
    Exhaustive,
    Sampled { m: usize, seed: u64 },
}

/// Both sides of the inequality for one alternative center set Y. Points are
/// split by whether their X-center and their Y-center lie in X ∩ Y:
/// A2 keeps an X-center in X ∩ Y only, A3 a Y-center in X ∩ Y only, A4 neither.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UniformTerms {
    pub lhs: f64,
    pub rhs: f64,
}

impl UniformTerms {
    pub fn holds(&self) -> bool {
        approx_le(self.lhs, self.rhs)
    }
}

pub fn uniform_approx_terms(inst: &Instance, x: &[usize], y: &[usize], alpha: f64) -> UniformTerms {
    let (mut lhs, mut rhs) = (0.0, 0.0);
    for v in 0..inst.n() {
        let cx = x[nearest_position(inst, x, v)];
        let cy = y[nearest_position(inst, y, v)];
        let x_shared = y.contains(&cx);
        let y_shared = x.contains(&cy);
        let (dx, dy) = (inst.d(cx, v), inst.d(cy, v));
        match (x_shared, y_shared) {
            (true, true) => {}
            (true, false) => {
                lhs += dx;
                rhs += dx.min(alpha * dy);
            }
            _ => {
                lhs += dx;
                rhs += alpha * dy;
            }
        }
    }
    UniformTerms { lhs, rhs }
}

/// Whether the inequality holds for every tested Y of size k.
pub fn check_uniform_approx_condition(inst: &Instance, x: &[usize], alpha: f64, mode: UniformMode) -> Result<bool> {
    let (n, k) = (inst.n(), x.len());
    if k == 0 || k > n {
        return Err(Error::BadK { k, n });
    }
    match mode {
        UniformMode::Exhaustive => {
            let count = binomial(n, k);
            if count > UNIFORM_EXHAUSTIVE_LIMIT {
                return Err(Error::TooLarge {
                    n,
                    k,
                    count,
                    limit: UNIFORM_EXHAUSTIVE_LIMIT,
                });
            }
            let mut ok = true;
            for_each_combination(n, k, |y| {
                if ok && !uniform_approx_terms(inst, x, y, alpha).holds() {
                    ok = false;
                }
            });
            Ok(ok)
        }
        UniformMode::Sampled { m, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..m {
                let mut y = sample(&mut rng, n, k).into_vec();
                y.sort_unstable();
                if !uniform_approx_terms(inst, x, &y, alpha).holds() {
                    return Ok(false);
                }
            }
            Ok(true)
        }
    }
}
