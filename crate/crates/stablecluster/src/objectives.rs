//! Objective evaluation, Voronoi assignment and the exact brute-force oracle.
//!
//! Distances are always read center-to-point, `d(center, point)`. For symmetric
//! instances the direction does not matter.

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};
use crate::metric::{Instance, Objective, REL_TOL};

/// Default limit on the number of center subsets the exact oracle will enumerate.
pub const EXACT_LIMIT: u128 = 10_000_000;

/// A center list plus a per-point assignment to center positions.
#[derive(Clone, Debug, PartialEq)]
pub struct Clustering {
    centers: Vec<usize>,
    assign: Vec<usize>,
    cost: f64,
}

impl Clustering {
    /// Validates the parts against `inst` and computes the cost under its objective.
    pub fn new(inst: &Instance, centers: Vec<usize>, assign: Vec<usize>) -> Result<Self> {
        check_centers(inst.n(), &centers)?;
        if assign.len() != inst.n() {
            return Err(Error::SizeMismatch(format!(
                "assignment has {} entries for {} points",
                assign.len(),
                inst.n()
            )));
        }
        if let Some(&bad) = assign.iter().find(|&&a| a >= centers.len()) {
            return Err(Error::BadCenters(format!("assignment to position {bad}")));
        }
        for (pos, &c) in centers.iter().enumerate() {
            if assign[c] != pos {
                return Err(Error::BadCenters(format!("center {c} is not assigned to itself")));
            }
        }
        let cost = assignment_cost(inst, inst.objective(), &centers, &assign);
        Ok(Clustering { centers, assign, cost })
    }

    /// Like [`Clustering::new`] but with the cost taken under `objective`
    /// rather than the instance's own.
    pub fn with_objective(
        inst: &Instance,
        objective: Objective,
        centers: Vec<usize>,
        assign: Vec<usize>,
    ) -> Result<Self> {
        let mut c = Self::new(inst, centers, assign)?;
        c.cost = assignment_cost(inst, objective, &c.centers, &c.assign);
        Ok(c)
    }

    /// Builds a clustering from stored parts without touching an instance.
    pub fn from_parts(centers: Vec<usize>, assign: Vec<usize>, cost: f64) -> Self {
        Clustering { centers, assign, cost }
    }

    pub fn centers(&self) -> &[usize] {
        &self.centers
    }

    pub fn assign(&self) -> &[usize] {
        &self.assign
    }

    pub fn cost(&self) -> f64 {
        self.cost
    }

    pub fn k(&self) -> usize {
        self.centers.len()
    }

    pub fn n(&self) -> usize {
        self.assign.len()
    }

    pub fn recompute_cost(&self, inst: &Instance) -> f64 {
        assignment_cost(inst, inst.objective(), &self.centers, &self.assign)
    }

    /// Members of each cluster, indexed by center position, in ascending point order.
    pub fn clusters(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.centers.len()];
        for (v, &a) in self.assign.iter().enumerate() {
            out[a].push(v);
        }
        out
    }

    pub fn cluster(&self, i: usize) -> Vec<usize> {
        (0..self.n()).filter(|&v| self.assign[v] == i).collect()
    }

    /// Whether some cluster equals `members` exactly (members sorted ascending).
    pub fn contains_cluster(&self, members: &[usize]) -> bool {
        let Some(&first) = members.first() else {
            return false;
        };
        let pos = self.assign[first];
        let mut count = 0;
        for (v, &a) in self.assign.iter().enumerate() {
            if a == pos {
                count += 1;
                if members.binary_search(&v).is_err() {
                    return false;
                }
            }
        }
        count == members.len()
    }

    /// Assignment relabelled by order of first appearance; equal iff same partition.
    pub fn canonical_labels(&self) -> Vec<usize> {
        canonical_labels(&self.assign, self.centers.len())
    }
}

pub fn canonical_labels(assign: &[usize], k: usize) -> Vec<usize> {
    let mut map = vec![usize::MAX; k];
    let mut next = 0;
    assign
        .iter()
        .map(|&a| {
            if map[a] == usize::MAX {
                map[a] = next;
                next += 1;
            }
            map[a]
        })
        .collect()
}

fn check_centers(n: usize, centers: &[usize]) -> Result<()> {
    if centers.is_empty() {
        return Err(Error::BadCenters("empty center list".into()));
    }
    let mut seen = vec![false; n];
    for &c in centers {
        if c >= n {
            return Err(Error::BadCenters(format!("center {c} out of range")));
        }
        if seen[c] {
            return Err(Error::BadCenters(format!("duplicate center {c}")));
        }
        seen[c] = true;
    }
    Ok(())
}

/// Objective value of an explicit assignment, summed in point order.
pub fn assignment_cost(inst: &Instance, objective: Objective, centers: &[usize], assign: &[usize]) -> f64 {
    let mut acc = 0.0f64;
    for (v, &a) in assign.iter().enumerate() {
        let d = inst.d(centers[a], v);
        match objective {
            Objective::KMedian => acc += d,
            Objective::KMeans => acc += d * d,
            Objective::KCenter | Objective::AsymKCenter => acc = acc.max(d),
        }
    }
    acc
}

/// Position of the nearest center to `v`, ties to the lowest position.
#[inline]
pub fn nearest_position(inst: &Instance, centers: &[usize], v: usize) -> usize {
    let mut best = 0;
    let mut best_d = inst.d(centers[0], v);
    for (pos, &c) in centers.iter().enumerate().skip(1) {
        let d = inst.d(c, v);
        if d < best_d {
            best = pos;
            best_d = d;
        }
    }
    best
}

/// Voronoi assignment without validation. Centers always keep themselves,
/// even when a duplicate point sits at an earlier position.
pub fn voronoi_assign(inst: &Instance, centers: &[usize]) -> Vec<usize> {
    let mut assign: Vec<usize> = (0..inst.n()).map(|v| nearest_position(inst, centers, v)).collect();
    for (pos, &c) in centers.iter().enumerate() {
        assign[c] = pos;
    }
    assign
}

pub fn voronoi(inst: &Instance, centers: &[usize]) -> Result<Clustering> {
    check_centers(inst.n(), centers)?;
    let assign = voronoi_assign(inst, centers);
    Clustering::new(inst, centers.to_vec(), assign)
}

/// Cost of the Voronoi assignment to `centers`, or `None` once a partial value exceeds `bound`.
pub fn voronoi_cost_bounded(inst: &Instance, objective: Objective, centers: &[usize], bound: f64) -> Option<f64> {
    let mut acc = 0.0f64;
    for v in 0..inst.n() {
        let mut best = f64::INFINITY;
        for &c in centers {
            let d = inst.d(c, v);
            if d < best {
                best = d;
            }
        }
        match objective {
            Objective::KMedian => acc += best,
            Objective::KMeans => acc += best * best,
            Objective::KCenter | Objective::AsymKCenter => acc = acc.max(best),
        }
        if acc > bound {
            return None;
        }
    }
    Some(acc)
}

pub fn voronoi_cost(inst: &Instance, centers: &[usize]) -> f64 {
    voronoi_cost_bounded(inst, inst.objective(), centers, f64::INFINITY).unwrap()
}

pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i as u128 + 1);
    }
    acc
}

/// Calls `f` on every k-subset of 0..n in lexicographic order.
pub fn for_each_combination(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        let mut i = k;
        while i > 0 && idx[i - 1] == i - 1 + n - k {
            i -= 1;
        }
        if i == 0 {
            return;
        }
        idx[i - 1] += 1;
        for j in i..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

fn guard(n: usize, k: usize, limit: u128) -> Result<()> {
    let count = binomial(n, k);
    if count > limit {
        return Err(Error::TooLarge { n, k, count, limit });
    }
    Ok(())
}

#[derive(Clone, Debug)]
pub struct ExactSolution {
    /// Minimum-cost Voronoi clustering; ties go to the lexicographically smallest center list.
    pub clustering: Clustering,
    /// True when every optimal center set (within relative tolerance) induces the same partition.
    pub unique: bool,
    /// Number of optimal center sets.
    pub optimal_sets: usize,
}

pub fn exact_solve(inst: &Instance) -> Result<ExactSolution> {
    exact_solve_limit(inst, EXACT_LIMIT)
}

pub fn exact_solve_limit(inst: &Instance, limit: u128) -> Result<ExactSolution> {
    let (n, k) = (inst.n(), inst.k());
    guard(n, k, limit)?;
    let objective = inst.objective();
    let mut best = f64::INFINITY;
    let mut best_set: Vec<usize> = Vec::new();
    for_each_combination(n, k, |c| {
        if let Some(cost) = voronoi_cost_bounded(inst, objective, c, best) {
            if cost < best {
                best = cost;
                best_set = c.to_vec();
            }
        }
    });
    let clustering = voronoi(inst, &best_set)?;
    let reference = clustering.canonical_labels();
    let threshold = best + REL_TOL * best;
    let mut unique = true;
    let mut optimal_sets = 0;
    for_each_combination(n, k, |c| {
        if voronoi_cost_bounded(inst, objective, c, threshold).is_some() {
            optimal_sets += 1;
            if unique && canonical_labels(&voronoi_assign(inst, c), k) != reference {
                unique = false;
            }
        }
    });
    Ok(ExactSolution {
        clustering,
        unique,
        optimal_sets,
    })
}

/// Every center set whose cost is within relative tolerance of the optimum, in lexicographic order.
pub fn optimal_center_sets(inst: &Instance) -> Result<(f64, Vec<Vec<usize>>)> {
    let (n, k) = (inst.n(), inst.k());
    guard(n, k, EXACT_LIMIT)?;
    let objective = inst.objective();
    let mut best = f64::INFINITY;
    for_each_combination(n, k, |c| {
        if let Some(cost) = voronoi_cost_bounded(inst, objective, c, best) {
            best = best.min(cost);
        }
    });
    let threshold = best + REL_TOL * best;
    let mut sets = Vec::new();
    for_each_combination(n, k, |c| {
        if voronoi_cost_bounded(inst, objective, c, threshold).is_some() {
            sets.push(c.to_vec());
        }
    });
    Ok((best, sets))
}

/// Sorted, deduplicated finite distances (including 0).
pub fn opt_radius_candidates(inst: &Instance) -> Vec<f64> {
    let mut vals: Vec<f64> = inst.dist().values().iter().copied().filter(|x| x.is_finite()).collect();
    vals.push(0.0);
    vals.sort_by(f64::total_cmp);
    vals.dedup();
    vals
}

/// Coverage sets at radius `r`: `cover[u]` = points within r of u (center-to-point).
pub fn coverage_sets(inst: &Instance, r: f64) -> Vec<FixedBitSet> {
    let n = inst.n();
    (0..n)
        .map(|u| {
            let mut s = FixedBitSet::with_capacity(n);
            let row = inst.dist().row(u);
            for v in 0..n {
                if row[v] <= r {
                    s.insert(v);
                }
            }
            s
        })
        .collect()
}

/// Some set of at most `k` centers covering every point within `r`, if one exists.
/// Bounded search tree: branch on the coverers of the hardest uncovered point,
/// pruned by a greedy packing of uncovered points with disjoint coverers.
pub fn kcenter_decide(inst: &Instance, k: usize, r: f64) -> Option<Vec<usize>> {
    let n = inst.n();
    let cover = coverage_sets(inst, r);
    let mut coverers = vec![FixedBitSet::with_capacity(n); n];
    for (u, s) in cover.iter().enumerate() {
        for v in s.ones() {
            coverers[v].insert(u);
        }
    }
    let counts: Vec<usize> = coverers.iter().map(|c| c.count_ones(..)).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| counts[v]);
    let search = Search {
        cover: &cover,
        coverers: &coverers,
        order: &order,
    };
    let mut uncovered = FixedBitSet::with_capacity(n);
    uncovered.insert_range(..);
    let mut chosen = Vec::with_capacity(k);
    if search.run(&uncovered, k, &mut chosen) {
        chosen.sort_unstable();
        Some(chosen)
    } else {
        None
    }
}

struct Search<'a> {
    cover: &'a [FixedBitSet],
    coverers: &'a [FixedBitSet],
    /// Points by ascending coverer count.
    order: &'a [usize],
}

impl Search<'_> {
    /// More than `budget` uncovered points whose coverer sets are pairwise disjoint?
    fn packing_exceeds(&self, uncovered: &FixedBitSet, budget: usize) -> bool {
        let mut used = FixedBitSet::with_capacity(self.cover.len());
        let mut count = 0;
        for &v in self.order {
            if uncovered.contains(v) && self.coverers[v].is_disjoint(&used) {
                count += 1;
                if count > budget {
                    return true;
                }
                used.union_with(&self.coverers[v]);
            }
        }
        false
    }

    fn run(&self, uncovered: &FixedBitSet, budget: usize, chosen: &mut Vec<usize>) -> bool {
        let Some(v) = self.order.iter().copied().find(|&v| uncovered.contains(v)) else {
            return true;
        };
        if budget == 0 || self.packing_exceeds(uncovered, budget) {
            return false;
        }
        for u in self.coverers[v].ones() {
            let mut rest = uncovered.clone();
            rest.difference_with(&self.cover[u]);
            chosen.push(u);
            if self.run(&rest, budget - 1, chosen) {
                return true;
            }
            chosen.pop();
        }
        false
    }
}

/// Exact optimal k-center radius (center-to-point), by binary search over candidates.
pub fn kcenter_radius(inst: &Instance) -> f64 {
    let cand = opt_radius_candidates(inst);
    let (mut lo, mut hi) = (0usize, cand.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if kcenter_decide(inst, inst.k(), cand[mid]).is_some() {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    cand[lo]
}

/// Every k-subset (lexicographic) whose k-center cost is at most `r`.
pub fn kcenter_covering_sets(inst: &Instance, r: f64, limit: u128) -> Result<Vec<Vec<usize>>> {
    let (n, k) = (inst.n(), inst.k());
    guard(n, k, limit)?;
    let cover = coverage_sets(inst, r);
    let mut out = Vec::new();
    let mut stack: Vec<usize> = Vec::with_capacity(k);
    let empty = FixedBitSet::with_capacity(n);
    covering_rec(&cover, n, k, 0, &empty, &mut stack, &mut out);
    Ok(out)
}

fn covering_rec(
    cover: &[FixedBitSet],
    n: usize,
    k: usize,
    start: usize,
    acc: &FixedBitSet,
    stack: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if stack.len() == k {
        if acc.count_ones(..) == n {
            out.push(stack.clone());
        }
        return;
    }
    let remaining = k - stack.len();
    for u in start..=n - remaining {
        let mut next = acc.clone();
        next.union_with(&cover[u]);
        stack.push(u);
        covering_rec(cover, n, k, u + 1, &next, stack, out);
        stack.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::DistMatrix;

    fn line(xs: &[f64], k: usize, obj: Objective) -> Instance {
        let d = DistMatrix::from_fn(xs.len(), |u, v| (xs[u] - xs[v]).abs());
        Instance::new(d, k, true, obj).unwrap()
    }

    #[test]
    fn all_points_as_centers_cost_zero() {
        for obj in [Objective::KMedian, Objective::KMeans, Objective::KCenter] {
            let inst = line(&[0.0, 1.0, 3.0], 3, obj);
            let c = voronoi(&inst, &[0, 1, 2]).unwrap();
            assert_eq!(c.cost(), 0.0);
            assert_eq!(c.assign(), &[0, 1, 2]);
            assert_eq!(exact_solve(&inst).unwrap().clustering.cost(), 0.0);
        }
    }

    #[test]
    fn single_center_kmedian_sum() {
        let inst = line(&[0.0, 1.0, 3.0], 1, Objective::KMedian);
        assert_eq!(voronoi(&inst, &[1]).unwrap().cost(), 3.0);
    }

    #[test]
    fn ties_go_to_lowest_position() {
        let inst = line(&[0.0, 1.0, 2.0], 2, Objective::KMedian);
        let c = voronoi(&inst, &[2, 0]).unwrap();
        assert_eq!(c.assign()[1], 0);
        let c = voronoi(&inst, &[0, 2]).unwrap();
        assert_eq!(c.assign()[1], 0);
    }

    #[test]
    fn duplicate_centers_rejected() {
        let inst = line(&[0.0, 1.0, 2.0], 2, Objective::KMedian);
        assert!(voronoi(&inst, &[1, 1]).is_err());
        assert!(voronoi(&inst, &[]).is_err());
    }

    #[test]
    fn duplicate_points_keep_their_own_center() {
        let inst = line(&[0.0, 0.0, 5.0], 2, Objective::KMedian);
        let c = voronoi(&inst, &[0, 1]).unwrap();
        assert_eq!(c.assign()[1], 1);
    }

    #[test]
    fn four_points_two_pairs() {
        let inst = line(&[0.0, 1.0, 10.0, 11.0], 2, Objective::KCenter);
        let sol = exact_solve(&inst).unwrap();
        assert_eq!(sol.clustering.cost(), 1.0);
        assert_eq!(sol.clustering.centers(), &[0, 2]);
        assert!(sol.unique);
        assert_eq!(sol.optimal_sets, 4);
    }

    #[test]
    fn candidates() {
        let inst = line(&[0.0, 5.0], 1, Objective::KCenter);
        assert_eq!(opt_radius_candidates(&inst), vec![0.0, 5.0]);
        let inst = line(&[2.0, 2.0, 2.0], 1, Objective::KCenter);
        assert_eq!(opt_radius_candidates(&inst), vec![0.0]);
    }

    #[test]
    fn combinations_are_lexicographic() {
        let mut seen = Vec::new();
        for_each_combination(4, 2, |c| seen.push(c.to_vec()));
        assert_eq!(
            seen,
            vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]
        );
        let mut count = 0;
        for_each_combination(3, 3, |_| count += 1);
        assert_eq!(count, 1);
        assert_eq!(binomial(40, 3), 9880);
    }

    #[test]
    fn size_guard() {
        let inst = line(&(0..60).map(|x| x as f64).collect::<Vec<_>>(), 10, Objective::KMedian);
        assert!(matches!(exact_solve(&inst), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn non_unique_optimum_detected() {
        // 0,1,2 on a line with k=2: {0,1},{1,2},{0,2} ... several partitions at cost 1.
        let inst = line(&[0.0, 1.0, 2.0], 2, Objective::KCenter);
        let sol = exact_solve(&inst).unwrap();
        assert_eq!(sol.clustering.cost(), 1.0);
        assert!(!sol.unique);
    }

    #[test]
    fn contains_cluster_verbatim() {
        let c = Clustering::from_parts(vec![0, 3], vec![0, 0, 0, 1, 1], 0.0);
        assert!(c.contains_cluster(&[0, 1, 2]));
        assert!(c.contains_cluster(&[3, 4]));
        assert!(!c.contains_cluster(&[0, 1]));
        assert!(!c.contains_cluster(&[2, 3, 4]));
    }
}
