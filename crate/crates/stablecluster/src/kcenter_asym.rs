//! Asymmetric k-center on the threshold digraph: the CCV / recursive set cover
//! algorithm and its robust variant that prefers CCV-proximity points and
//! protects the Voronoi tiles of the first phase.
//!
//! Inside the robust solver, "closer" means the key (hop count, length of the
//! lexicographically first hop-shortest path, center index), compared in that
//! order.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use fixedbitset::FixedBitSet;

use crate::error::Result;
use crate::graph::{Direction, ThresholdDigraph};
use crate::kcenter_sym::KCenterResult;
use crate::metric::Instance;
use crate::objectives::{opt_radius_candidates, voronoi_assign, Clustering};

/// Hop radius of the Phase II cover sets.
pub const COVER_HOPS: usize = 5;
/// Radius searches over at most this many candidates scan linearly; longer
/// candidate lists are bisected.
pub const LINEAR_SCAN_MAX: usize = 4096;

pub fn is_ccv(g: &ThresholdDigraph, v: usize) -> bool {
    g.inn(v).is_subset(g.out(v))
}

pub fn ccv_set(g: &ThresholdDigraph) -> FixedBitSet {
    let mut s = FixedBitSet::with_capacity(g.n());
    for v in 0..g.n() {
        if is_ccv(g, v) {
            s.insert(v);
        }
    }
    s
}

/// Tie-broken distance from a center to a point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HopKey {
    pub hops: u32,
    pub len: f64,
    pub center: usize,
}

impl HopKey {
    pub fn cmp(&self, other: &HopKey) -> Ordering {
        self.hops
            .cmp(&other.hops)
            .then(self.len.total_cmp(&other.len))
            .then(self.center.cmp(&other.center))
    }
}

/// Hop counts from a source and the metric length of the lexicographically
/// smallest (by vertex sequence) hop-shortest path to each point.
#[derive(Clone, Debug)]
pub struct LexPaths {
    pub source: usize,
    pub hops: Vec<Option<u32>>,
    pub len: Vec<f64>,
}

impl LexPaths {
    pub fn key(&self, v: usize) -> Option<HopKey> {
        self.hops[v].map(|hops| HopKey {
            hops,
            len: self.len[v],
            center: self.source,
        })
    }
}

/// Layered BFS. Within a layer, nodes are ranked by their lexicographic path;
/// each new node takes the lowest-ranked parent, and the next layer is ranked
/// by (parent rank, index).
pub fn lex_paths(g: &ThresholdDigraph, inst: &Instance, src: usize) -> LexPaths {
    let n = g.n();
    let mut hops = vec![None; n];
    let mut len = vec![f64::INFINITY; n];
    hops[src] = Some(0);
    len[src] = 0.0;
    let mut layer = vec![src];
    let mut depth = 0u32;
    while !layer.is_empty() {
        depth += 1;
        let mut next: Vec<(usize, usize)> = Vec::new();
        for (rank, &u) in layer.iter().enumerate() {
            for v in g.out(u).ones() {
                if hops[v].is_none() {
                    hops[v] = Some(depth);
                    len[v] = len[u] + inst.d(u, v);
                    next.push((rank, v));
                }
            }
        }
        next.sort_unstable();
        layer = next.into_iter().map(|(_, v)| v).collect();
    }
    LexPaths { source: src, hops, len }
}

/// c is a CCV and every point of Γ−(c) is strictly closer (tie-broken) to c
/// than to any CCV outside Γ+(c).
///
/// Points of Γ−(c) lie in Γ+(c), so c reaches them in one hop along the arc
/// itself; a rival c' ∉ Γ+(c) can only match that with a direct arc, which
/// reduces the key comparison to (d(c',v), c') versus (d(c,v), c).
pub fn satisfies_ccv_proximity(g: &ThresholdDigraph, inst: &Instance, c: usize) -> bool {
    let ccvs = ccv_set(g);
    proximity_with(g, inst, &ccvs, c)
}

fn proximity_with(g: &ThresholdDigraph, inst: &Instance, ccvs: &FixedBitSet, c: usize) -> bool {
    if !ccvs.contains(c) {
        return false;
    }
    for v in g.inn(c).ones() {
        if v == c {
            continue;
        }
        let mine = (inst.d(c, v), c);
        for cp in g.inn(v).ones() {
            if !ccvs.contains(cp) || g.out(c).contains(cp) {
                continue;
            }
            let theirs = (inst.d(cp, v), cp);
            if theirs.0 < mine.0 || (theirs.0 == mine.0 && theirs.1 < mine.1) {
                return false;
            }
        }
    }
    true
}

pub fn proximity_set(g: &ThresholdDigraph, inst: &Instance) -> FixedBitSet {
    let ccvs = ccv_set(g);
    let mut s = FixedBitSet::with_capacity(g.n());
    for c in ccvs.ones() {
        if proximity_with(g, inst, &ccvs, c) {
            s.insert(c);
        }
    }
    s
}

/// No point outside cluster i lies within r of its center (point-to-center distance).
pub fn satisfies_center_separation(inst: &Instance, opt: &Clustering, i: usize, r: f64) -> bool {
    let c = opt.centers()[i];
    (0..inst.n()).all(|v| opt.assign()[v] == i || inst.d(v, c) > r)
}

#[derive(Clone, Debug)]
pub struct AsymSolverState {
    pub r: f64,
    pub graph: ThresholdDigraph,
    pub chosen: Vec<usize>,
    pub marked: FixedBitSet,
    /// Protected Voronoi tiles of the Phase I centers (robust solver only).
    pub tiles: BTreeMap<usize, Vec<usize>>,
    pub phase2_rounds: usize,
    /// A_0, then A'_1, A_1, A'_2, A_2, ...
    pub a_sets: Vec<Vec<usize>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Selection {
    pub center: usize,
    pub proximity: bool,
    /// Whether some unmarked CCV-proximity point existed at this step.
    pub proximity_available: bool,
}

#[derive(Clone, Debug)]
pub struct AsymRun {
    /// Phase I centers followed by the Phase II centers not already chosen.
    pub centers: Vec<usize>,
    pub phase2: Vec<usize>,
    pub feasible: bool,
    pub rounds: usize,
    pub selections: Vec<Selection>,
    pub state: AsymSolverState,
}

fn collect(s: &FixedBitSet) -> Vec<usize> {
    s.ones().collect()
}

/// Recursive greedy cover of S \ Γ+_5(C) by Γ+_5 balls, repeated while the
/// working set exceeds the remaining budget and keeps shrinking.
fn phase2(g: &ThresholdDigraph, k: usize, chosen: &[usize], state: &mut AsymSolverState) -> Vec<usize> {
    let n = g.n();
    let mut a = g.gamma_hop_set(chosen.iter().copied(), COVER_HOPS, Direction::Out);
    a.toggle_range(..);
    state.a_sets.push(collect(&a));
    if a.is_clear() || chosen.len() > k {
        return collect(&a);
    }
    let budget = k - chosen.len();
    let balls: Vec<FixedBitSet> = (0..n).map(|v| g.gamma_hop(v, COVER_HOPS, Direction::Out)).collect();
    while a.count_ones(..) > budget {
        let mut uncovered = a.clone();
        let mut picked = FixedBitSet::with_capacity(n);
        while !uncovered.is_clear() {
            let mut best = 0;
            let mut best_gain = 0;
            for (v, ball) in balls.iter().enumerate() {
                let gain = ball.intersection_count(&uncovered);
                if gain > best_gain {
                    best = v;
                    best_gain = gain;
                }
            }
            picked.insert(best);
            uncovered.difference_with(&balls[best]);
        }
        state.phase2_rounds += 1;
        state.a_sets.push(collect(&picked));
        let progress = picked.count_ones(..) < a.count_ones(..);
        a = picked;
        state.a_sets.push(collect(&a));
        if !progress {
            break;
        }
    }
    collect(&a)
}

fn merge_centers(chosen: &[usize], extra: &[usize]) -> Vec<usize> {
    let mut centers = chosen.to_vec();
    for &v in extra {
        if !centers.contains(&v) {
            centers.push(v);
        }
    }
    centers
}

fn new_state(inst: &Instance, r: f64) -> AsymSolverState {
    AsymSolverState {
        r,
        graph: ThresholdDigraph::new(inst, r),
        chosen: Vec::new(),
        marked: FixedBitSet::with_capacity(inst.n()),
        tiles: BTreeMap::new(),
        phase2_rounds: 0,
        a_sets: Vec::new(),
    }
}

/// Phase I: lowest unmarked CCV, mark Γ+_2(c). Phase II: recursive cover.
pub fn vishwanathan_solve(inst: &Instance, r: f64) -> AsymRun {
    let mut state = new_state(inst, r);
    let g = state.graph.clone();
    let ccvs = ccv_set(&g);
    let mut selections = Vec::new();
    while let Some(c) = ccvs.ones().find(|&v| !state.marked.contains(v)) {
        state.chosen.push(c);
        state.marked.union_with(&g.gamma_hop(c, 2, Direction::Out));
        selections.push(Selection {
            center: c,
            proximity: false,
            proximity_available: false,
        });
    }
    let chosen = state.chosen.clone();
    let phase2 = phase2(&g, inst.k(), &chosen, &mut state);
    let centers = merge_centers(&chosen, &phase2);
    AsymRun {
        feasible: centers.len() <= inst.k(),
        rounds: state.phase2_rounds,
        centers,
        phase2,
        selections,
        state,
    }
}

/// Voronoi in the input metric over the run's centers.
pub fn plain_result(inst: &Instance, run: &AsymRun) -> Result<KCenterResult> {
    let assign = voronoi_assign(inst, &run.centers);
    let mut res = KCenterResult::from_assignment(inst, run.centers.clone(), assign)?;
    res.r_used = Some(run.state.r);
    Ok(res)
}

/// Marking set of the robust Phase I: ∪_{c' ∈ Γ−(c)} Γ+(c').
pub fn robust_marking(g: &ThresholdDigraph, c: usize) -> FixedBitSet {
    let mut m = FixedBitSet::with_capacity(g.n());
    for cp in g.gamma_hop(c, 1, Direction::In).ones() {
        m.union_with(&g.gamma_hop(cp, 1, Direction::Out));
    }
    m
}

fn nearest_by_key(paths: &[LexPaths], v: usize) -> Option<usize> {
    let mut best: Option<(usize, HopKey)> = None;
    for (pos, p) in paths.iter().enumerate() {
        if let Some(key) = p.key(v) {
            if best.as_ref().is_none_or(|(_, b)| key.cmp(b) == Ordering::Less) {
                best = Some((pos, key));
            }
        }
    }
    best.map(|(pos, _)| pos)
}

#[derive(Clone, Debug)]
pub struct RobustAsymOutput {
    pub result: KCenterResult,
    pub tiles: BTreeMap<usize, Vec<usize>>,
    pub run: AsymRun,
}

pub fn robust_asym_solve(inst: &Instance, r: f64) -> Result<RobustAsymOutput> {
    let mut state = new_state(inst, r);
    let g = state.graph.clone();
    let ccvs = ccv_set(&g);
    let prox = proximity_set(&g, inst);
    let mut selections = Vec::new();
    while ccvs.ones().any(|v| !state.marked.contains(v)) {
        let special = prox.ones().find(|&v| !state.marked.contains(v));
        let c = special.unwrap_or_else(|| ccvs.ones().find(|&v| !state.marked.contains(v)).unwrap());
        state.chosen.push(c);
        state.marked.union_with(&robust_marking(&g, c));
        selections.push(Selection {
            center: c,
            proximity: special.is_some(),
            proximity_available: special.is_some(),
        });
    }
    let chosen = state.chosen.clone();
    let mut paths: Vec<LexPaths> = chosen.iter().map(|&c| lex_paths(&g, inst, c)).collect();
    let mut owner = vec![None; inst.n()];
    for v in state.marked.ones() {
        let pos = nearest_by_key(&paths, v).expect("marked points are reachable from a center");
        owner[v] = Some(pos);
        state.tiles.entry(chosen[pos]).or_default().push(v);
    }

    let phase2 = phase2(&g, inst.k(), &chosen, &mut state);
    let centers = merge_centers(&chosen, &phase2);
    for &c in &centers[chosen.len()..] {
        paths.push(lex_paths(&g, inst, c));
    }
    let fallback = voronoi_assign(inst, &centers);
    let mut assign: Vec<usize> = (0..inst.n())
        .map(|v| owner[v].or_else(|| nearest_by_key(&paths, v)).unwrap_or(fallback[v]))
        .collect();
    for (pos, &c) in centers.iter().enumerate() {
        assign[c] = pos;
    }
    let mut result = KCenterResult::from_assignment(inst, centers.clone(), assign)?;
    result.r_used = Some(r);
    let run = AsymRun {
        feasible: centers.len() <= inst.k(),
        rounds: state.phase2_rounds,
        centers,
        phase2,
        selections,
        state,
    };
    Ok(RobustAsymOutput {
        result,
        tiles: run.state.tiles.clone(),
        run,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AsymSolver {
    Plain,
    Robust,
}

#[derive(Clone, Debug)]
pub struct AsymSearch {
    pub result: KCenterResult,
    pub run: AsymRun,
}

fn run_solver(inst: &Instance, r: f64, solver: AsymSolver) -> Result<(KCenterResult, AsymRun)> {
    match solver {
        AsymSolver::Plain => {
            let run = vishwanathan_solve(inst, r);
            let res = plain_result(inst, &run)?;
            Ok((res, run))
        }
        AsymSolver::Robust => {
            let out = robust_asym_solve(inst, r)?;
            Ok((out.result, out.run))
        }
    }
}

/// Radius below which both solvers are infeasible: with fewer than n − k
/// points having an in-arc from another point, each of the rest is a CCV
/// that only its own selection can mark.
pub fn radius_lower_bound(inst: &Instance) -> f64 {
    let n = inst.n();
    let need = n - inst.k();
    if need == 0 {
        return 0.0;
    }
    let mut nearest: Vec<f64> = (0..n)
        .map(|v| {
            (0..n)
                .filter(|&u| u != v)
                .map(|u| inst.d(u, v))
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    nearest.sort_by(f64::total_cmp);
    nearest[need - 1]
}

/// Least feasible candidate radius for the chosen solver.
pub fn radius_search(inst: &Instance, solver: AsymSolver) -> Result<AsymSearch> {
    let cand = opt_radius_candidates(inst);
    let lb = radius_lower_bound(inst);
    let start = cand.partition_point(|&r| r < lb);
    let cand = &cand[start..];
    if cand.len() <= LINEAR_SCAN_MAX {
        for &r in cand {
            let (result, run) = run_solver(inst, r, solver)?;
            if run.feasible {
                return Ok(AsymSearch { result, run });
            }
        }
        unreachable!("the largest candidate radius is always feasible");
    }
    let (mut lo, mut hi) = (0usize, cand.len() - 1);
    let (mut result, mut run) = run_solver(inst, cand[hi], solver)?;
    assert!(run.feasible, "the largest candidate radius is always feasible");
    while lo < hi {
        let mid = (lo + hi) / 2;
        let (res, rn) = run_solver(inst, cand[mid], solver)?;
        if rn.feasible {
            result = res;
            run = rn;
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Ok(AsymSearch { result, run })
}

/// Iterated base-2 logarithm: applications of log2 until the value is ≤ 1.
pub fn log_star(n: usize) -> usize {
    let mut x = n as f64;
    let mut count = 0;
    while x > 1.0 {
        x = x.log2();
        count += 1;
    }
    count
}
