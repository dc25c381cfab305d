//! Swap-based local search for k-median and k-means.
//!
//! A move replaces up to `t` centers at once and is accepted only when it
//! lowers the cost to at most `(1 - eps/n)` times the current cost.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::metric::{Instance, Objective};
use crate::objectives::{binomial, voronoi, voronoi_cost, voronoi_cost_bounded, Clustering};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Init {
    FirstK,
    Random,
    FarthestFirst,
}

impl std::str::FromStr for Init {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "first-k" => Ok(Init::FirstK),
            "random" => Ok(Init::Random),
            "farthest-first" => Ok(Init::FarthestFirst),
            _ => Err(Error::Param(format!("unknown init mode '{s}'"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct LocalSearchConfig {
    pub epsilon: f64,
    /// Swap size; `ceil(1/epsilon)` when `None`.
    pub t: Option<usize>,
    pub max_iterations: usize,
    pub seed: u64,
    pub init: Init,
}

impl LocalSearchConfig {
    pub fn new(epsilon: f64) -> Self {
        LocalSearchConfig {
            epsilon,
            t: None,
            max_iterations: 100_000,
            seed: 0,
            init: Init::FarthestFirst,
        }
    }

    pub fn swap_size(&self) -> usize {
        self.t
            .unwrap_or_else(|| (1.0 / self.epsilon - 1e-12).ceil().max(1.0) as usize)
    }

    fn check(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon <= 1.0) {
            return Err(Error::Param(format!("epsilon {} not in (0,1]", self.epsilon)));
        }
        if self.swap_size() == 0 {
            return Err(Error::Param("swap size must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SwapRecord {
    pub iteration: usize,
    pub old_cost: f64,
    pub new_cost: f64,
    pub removed: Vec<usize>,
    pub added: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct LocalSearchOutcome {
    pub clustering: Clustering,
    pub initial_cost: f64,
    pub trace: Vec<SwapRecord>,
    /// False when `max_iterations` ran out before a local optimum was reached.
    pub converged: bool,
}

/// Farthest-first traversal from `first`: each next center maximises the
/// distance to the chosen set, ties to the lowest index.
pub fn farthest_first(inst: &Instance, k: usize, first: usize) -> Vec<usize> {
    let n = inst.n();
    let mut chosen = vec![first];
    let mut near: Vec<f64> = (0..n).map(|v| inst.d(first, v)).collect();
    let mut is_center = vec![false; n];
    is_center[first] = true;
    while chosen.len() < k.min(n) {
        let mut best = None;
        let mut best_d = f64::NEG_INFINITY;
        for v in 0..n {
            if !is_center[v] && near[v] > best_d {
                best = Some(v);
                best_d = near[v];
            }
        }
        let c = best.expect("fewer centers than points");
        chosen.push(c);
        is_center[c] = true;
        for v in 0..n {
            near[v] = near[v].min(inst.d(c, v));
        }
    }
    chosen
}

pub fn initial_centers(inst: &Instance, cfg: &LocalSearchConfig) -> Vec<usize> {
    let (n, k) = (inst.n(), inst.k());
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut c = match cfg.init {
        Init::FirstK => (0..k).collect(),
        Init::Random => sample(&mut rng, n, k).into_vec(),
        Init::FarthestFirst => farthest_first(inst, k, rng.random_range(0..n)),
    };
    c.sort_unstable();
    c
}

/// One candidate of the swap neighbourhood.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Swap {
    pub removed: Vec<usize>,
    pub added: Vec<usize>,
    /// Resulting center list, sorted ascending.
    pub centers: Vec<usize>,
}

/// Advances `idx` to the next combination of `0..m`; false after the last.
fn next_combination(idx: &mut [usize], m: usize) -> bool {
    let s = idx.len();
    let mut i = s;
    while i > 0 && idx[i - 1] == i - 1 + m - s {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    idx[i - 1] += 1;
    for j in i..s {
        idx[j] = idx[j - 1] + 1;
    }
    true
}

/// All center sets reachable by swapping out s ≤ t centers for s non-centers,
/// ordered by s, then removed set, then added set (both lexicographic).
pub struct SwapNeighborhood {
    current: Vec<usize>,
    outside: Vec<usize>,
    max_s: usize,
    s: usize,
    out_idx: Vec<usize>,
    in_idx: Vec<usize>,
    fresh: bool,
}

pub fn swap_neighborhood(centers: &[usize], t: usize, n: usize) -> SwapNeighborhood {
    let mut current = centers.to_vec();
    current.sort_unstable();
    let outside: Vec<usize> = (0..n).filter(|v| current.binary_search(v).is_err()).collect();
    let max_s = t.min(current.len()).min(outside.len());
    SwapNeighborhood {
        current,
        outside,
        max_s,
        s: 1,
        out_idx: vec![0],
        in_idx: vec![0],
        fresh: true,
    }
}

impl SwapNeighborhood {
    pub fn len_hint(&self) -> u128 {
        let (k, m) = (self.current.len(), self.outside.len());
        (1..=self.max_s).map(|s| binomial(k, s) * binomial(m, s)).sum()
    }

    fn advance(&mut self) -> bool {
        if next_combination(&mut self.in_idx, self.outside.len()) {
            return true;
        }
        if next_combination(&mut self.out_idx, self.current.len()) {
            self.in_idx = (0..self.s).collect();
            return true;
        }
        self.s += 1;
        if self.s > self.max_s {
            return false;
        }
        self.out_idx = (0..self.s).collect();
        self.in_idx = (0..self.s).collect();
        true
    }
}

impl Iterator for SwapNeighborhood {
    type Item = Swap;

    fn next(&mut self) -> Option<Swap> {
        if self.max_s == 0 {
            return None;
        }
        if self.fresh {
            self.fresh = false;
        } else if !self.advance() {
            self.max_s = 0;
            return None;
        }
        let removed: Vec<usize> = self.out_idx.iter().map(|&i| self.current[i]).collect();
        let added: Vec<usize> = self.in_idx.iter().map(|&i| self.outside[i]).collect();
        let mut centers: Vec<usize> = self
            .current
            .iter()
            .copied()
            .filter(|c| removed.binary_search(c).is_err())
            .chain(added.iter().copied())
            .collect();
        centers.sort_unstable();
        Some(Swap {
            removed,
            added,
            centers,
        })
    }
}

fn check_objective(inst: &Instance) -> Result<()> {
    match inst.objective() {
        Objective::KMedian | Objective::KMeans => Ok(()),
        other => Err(Error::ObjectiveMismatch {
            expected: "k-median or k-means",
            got: other.name(),
        }),
    }
}

pub fn local_search(inst: &Instance, cfg: &LocalSearchConfig) -> Result<LocalSearchOutcome> {
    check_objective(inst)?;
    cfg.check()?;
    let n = inst.n();
    let t = cfg.swap_size();
    let factor = 1.0 - cfg.epsilon / n as f64;
    let mut centers = initial_centers(inst, cfg);
    let mut cost = voronoi_cost(inst, &centers);
    let initial_cost = cost;
    let mut trace = Vec::new();
    let mut converged = false;
    for iteration in 0..cfg.max_iterations {
        if cost == 0.0 {
            converged = true;
            break;
        }
        let gate = factor * cost;
        let found = swap_neighborhood(&centers, t, n)
            .find(|s| voronoi_cost_bounded(inst, inst.objective(), &s.centers, gate).is_some());
        let Some(swap) = found else {
            converged = true;
            break;
        };
        let new_cost = voronoi(inst, &swap.centers)?.cost();
        debug_assert!(new_cost <= gate);
        trace.push(SwapRecord {
            iteration,
            old_cost: cost,
            new_cost,
            removed: swap.removed,
            added: swap.added,
        });
        centers = swap.centers;
        cost = new_cost;
    }
    if !converged && cost == 0.0 {
        converged = true;
    }
    if !converged {
        log::warn!("local search stopped after {} iterations", cfg.max_iterations);
    }
    Ok(LocalSearchOutcome {
        clustering: voronoi(inst, &centers)?,
        initial_cost,
        trace,
        converged,
    })
}

/// Full rescan of the neighbourhood: true iff no candidate meets the improvement gate.
pub fn is_local_optimum(inst: &Instance, centers: &[usize], t: usize, epsilon: f64) -> bool {
    let cost = voronoi_cost(inst, centers);
    if cost == 0.0 {
        return true;
    }
    let gate = (1.0 - epsilon / inst.n() as f64) * cost;
    swap_neighborhood(centers, t, inst.n()).all(|s| voronoi_cost(inst, &s.centers) > gate)
}

/// Upper bound on accepted swaps between the two costs; `None` if `final_cost` is 0.
pub fn swap_bound(initial_cost: f64, final_cost: f64, epsilon: f64, n: usize) -> Option<usize> {
    if final_cost <= 0.0 {
        return None;
    }
    let per_step = -(1.0 - epsilon / n as f64).ln();
    Some(((initial_cost / final_cost).ln() / per_step).ceil().max(0.0) as usize)
}

/// For each cluster of `opt`, whether it appears verbatim in `found`.
pub fn lpr_membership_report(inst: &Instance, found: &Clustering, opt: &Clustering) -> Result<Vec<bool>> {
    if found.n() != inst.n() || opt.n() != inst.n() {
        return Err(Error::SizeMismatch(format!(
            "clusterings over {} and {} points for an instance of {}",
            found.n(),
            opt.n(),
            inst.n()
        )));
    }
    Ok(opt.clusters().iter().map(|c| found.contains_cluster(c)).collect())
}
