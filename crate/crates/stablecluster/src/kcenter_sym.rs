//! Symmetric k-center: farthest-first 2-approximation, the edge-dropping
//! preprocessing (condition 1) and the ball-merging postprocessing (condition 2).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::local_search::farthest_first;
use crate::metric::{approx_le, metric_completion, DistMatrix, Instance, Objective};
use crate::objectives::{opt_radius_candidates, voronoi_assign, Clustering};

#[derive(Clone, Debug, PartialEq)]
pub struct KCenterResult {
    pub clustering: Clustering,
    /// Max distance from a point to its assigned center, in the input metric.
    pub radius: f64,
    pub r_star: Option<f64>,
    /// Radius guess the solver settled on, when it searched for one.
    pub r_used: Option<f64>,
    pub condition1: bool,
    pub condition2: bool,
}

impl KCenterResult {
    /// Wraps an explicit assignment; cost and radius are the k-center value in `inst`.
    pub fn from_assignment(inst: &Instance, centers: Vec<usize>, assign: Vec<usize>) -> Result<Self> {
        let clustering = Clustering::with_objective(inst, Objective::KCenter, centers, assign)?;
        Ok(KCenterResult {
            radius: clustering.cost(),
            clustering,
            r_star: None,
            r_used: None,
            condition1: false,
            condition2: false,
        })
    }
}

fn require_symmetric(inst: &Instance) -> Result<()> {
    if inst.symmetric() {
        Ok(())
    } else {
        Err(Error::ObjectiveNeedsSymmetric("symmetric k-center"))
    }
}

/// Farthest-first traversal with a seeded first center.
pub fn greedy_2approx(inst: &Instance, seed: u64) -> Result<KCenterResult> {
    require_symmetric(inst)?;
    let first = ChaCha8Rng::seed_from_u64(seed).random_range(0..inst.n());
    let centers = farthest_first(inst, inst.k(), first);
    let assign = voronoi_assign(inst, &centers);
    KCenterResult::from_assignment(inst, centers, assign)
}

#[derive(Clone, Debug)]
pub struct Preprocessed {
    /// Completion of the graph with edges ≤ r; missing paths are +∞.
    pub instance: Instance,
    /// Points with no other point within r.
    pub isolated: Vec<usize>,
    /// Ordered pairs left at infinite distance.
    pub disconnected_pairs: usize,
}

/// Drops every edge longer than `r` and takes the metric completion of what is left.
pub fn condition1_preprocess(inst: &Instance, r: f64) -> Result<Preprocessed> {
    require_symmetric(inst)?;
    if !(r >= 0.0) {
        return Err(Error::Param(format!("radius {r} must be non-negative")));
    }
    let n = inst.n();
    let raw = DistMatrix::from_fn(n, |u, v| {
        let d = inst.d(u, v);
        if d <= r {
            d
        } else {
            f64::INFINITY
        }
    });
    let isolated: Vec<usize> = (0..n)
        .filter(|&u| (0..n).all(|v| v == u || raw.get(u, v).is_infinite()))
        .collect();
    let done = metric_completion(&raw);
    let disconnected_pairs = done.values().iter().filter(|x| x.is_infinite()).count();
    if !isolated.is_empty() {
        log::debug!("r = {r}: {} isolated points", isolated.len());
    }
    Ok(Preprocessed {
        instance: inst.with_dist(done),
        isolated,
        disconnected_pairs,
    })
}

/// First pair (u, v) with d(u,v) ≤ 2r that has no w with d(u,w) ≤ r and d(w,v) ≤ r.
pub fn midpoint_violation(inst: &Instance, r: f64) -> Option<(usize, usize)> {
    let n = inst.n();
    for u in 0..n {
        for v in 0..n {
            if inst.d(u, v) <= 2.0 * r && !(0..n).any(|w| inst.d(u, w) <= r && inst.d(w, v) <= r) {
                return Some((u, v));
            }
        }
    }
    None
}

/// While some point v has its own cluster and at least one other cluster
/// entirely within the current radius, merge the two (lowest other index
/// first) under center v. Points scanned in index order, run to a fixpoint.
pub fn condition2_merge(inst: &Instance, result: &KCenterResult) -> KCenterResult {
    let r_hat = result.radius;
    let n = inst.n();
    let mut centers = result.clustering.centers().to_vec();
    let mut assign = result.clustering.assign().to_vec();
    let within = |v: usize, j: usize, assign: &[usize]| (0..n).all(|p| assign[p] != j || inst.d(v, p) <= r_hat);
    'scan: loop {
        for v in 0..n {
            let own = assign[v];
            if !within(v, own, &assign) {
                continue;
            }
            let Some(other) = (0..centers.len()).find(|&j| j != own && within(v, j, &assign)) else {
                continue;
            };
            let (keep, drop) = (own.min(other), own.max(other));
            centers[keep] = v;
            centers.remove(drop);
            for a in assign.iter_mut() {
                if *a == drop {
                    *a = keep;
                }
                if *a > drop {
                    *a -= 1;
                }
            }
            continue 'scan;
        }
        break;
    }
    let clustering =
        Clustering::with_objective(inst, Objective::KCenter, centers, assign).expect("merge keeps a valid clustering");
    KCenterResult {
        radius: clustering.cost(),
        clustering,
        r_star: result.r_star,
        r_used: result.r_used,
        condition1: result.condition1,
        condition2: true,
    }
}

/// Greedy on the condition-1 instance at radius `r`, reported in the input metric.
/// `None` when the greedy radius exceeds 2r in the preprocessed metric.
pub fn greedy_at(inst: &Instance, r: f64, seed: u64) -> Result<Option<KCenterResult>> {
    let pre = condition1_preprocess(inst, r)?;
    let g = greedy_2approx(&pre.instance, seed)?;
    if !approx_le(g.radius, 2.0 * r) {
        return Ok(None);
    }
    let centers = g.clustering.centers().to_vec();
    let assign = g.clustering.assign().to_vec();
    let mut res = KCenterResult::from_assignment(inst, centers, assign)?;
    res.r_used = Some(r);
    res.condition1 = true;
    Ok(Some(res))
}

/// Least candidate radius where greedy on the preprocessed instance is within
/// 2r, followed by the merge step.
pub fn solve_robust_kcenter(inst: &Instance) -> Result<KCenterResult> {
    solve_robust_kcenter_seeded(inst, 0)
}

pub fn solve_robust_kcenter_seeded(inst: &Instance, seed: u64) -> Result<KCenterResult> {
    require_symmetric(inst)?;
    let cand = opt_radius_candidates(inst);
    let (mut lo, mut hi) = (0usize, cand.len() - 1);
    let mut best = greedy_at(inst, cand[hi], seed)?.expect("largest candidate radius is feasible");
    while lo < hi {
        let mid = (lo + hi) / 2;
        match greedy_at(inst, cand[mid], seed)? {
            Some(res) => {
                best = res;
                hi = mid;
            }
            None => lo = mid + 1,
        }
    }
    Ok(condition2_merge(inst, &best))
}

/// The same pipeline at a caller-supplied radius.
pub fn solve_robust_kcenter_at(inst: &Instance, r: f64, seed: u64) -> Result<Option<KCenterResult>> {
    require_symmetric(inst)?;
    Ok(greedy_at(inst, r, seed)?.map(|res| condition2_merge(inst, &res)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objectives::exact_solve;

    fn line(xs: &[f64], k: usize) -> Instance {
        let d = DistMatrix::from_fn(xs.len(), |u, v| (xs[u] - xs[v]).abs());
        Instance::new(d, k, true, Objective::KCenter).unwrap()
    }

    #[test]
    fn k_equals_n_radius_zero() {
        let inst = line(&[0.0, 1.0, 4.0], 3);
        assert_eq!(greedy_2approx(&inst, 7).unwrap().radius, 0.0);
        assert_eq!(solve_robust_kcenter(&inst).unwrap().radius, 0.0);
    }

    #[test]
    fn two_clumps() {
        let inst = line(&[0.0, 0.5, 1.0, 100.0, 100.5, 101.0], 2);
        for seed in 0..6 {
            let g = greedy_2approx(&inst, seed).unwrap();
            assert!(g.radius <= 2.0);
            let c = g.clustering.centers();
            assert!((c[0] < 3) != (c[1] < 3));
        }
        let r_star = exact_solve(&inst).unwrap().clustering.cost();
        assert!(r_star <= 1.0);
    }

    #[test]
    fn rejects_asymmetric() {
        let d = DistMatrix::from_rows(&[vec![0.0, 1.0], vec![2.0, 0.0]]).unwrap();
        let inst = Instance::new(d, 1, false, Objective::AsymKCenter).unwrap();
        assert!(greedy_2approx(&inst, 0).is_err());
    }

    #[test]
    fn preprocess_drops_long_edge() {
        let d = DistMatrix::from_rows(&[vec![0.0, 1.0, 1.5], vec![1.0, 0.0, 1.0], vec![1.5, 1.0, 0.0]]).unwrap();
        let inst = Instance::new(d, 1, true, Objective::KCenter).unwrap();
        let p = condition1_preprocess(&inst, 1.0).unwrap();
        assert_eq!(p.instance.d(0, 2), 2.0);
        assert_eq!(p.disconnected_pairs, 0);
        let p = condition1_preprocess(&inst, 1.5).unwrap();
        assert_eq!(p.instance.dist(), inst.dist());
    }

    #[test]
    fn preprocess_reports_isolation() {
        let inst = line(&[0.0, 1.0, 5.0], 2);
        let p = condition1_preprocess(&inst, 1.0).unwrap();
        assert_eq!(p.isolated, vec![2]);
        assert_eq!(p.disconnected_pairs, 4);
        p.instance.validate().unwrap();
    }

    #[test]
    fn midpoint_property_fails_in_general() {
        // Line 0, 0.1, 1.1, 1.5 with r = 1: completed d(0,3) = 1.5 ≤ 2 but no midpoint.
        let inst = line(&[0.0, 0.1, 1.1, 1.5], 1);
        let p = condition1_preprocess(&inst, 1.0).unwrap();
        assert_eq!(midpoint_violation(&p.instance, 1.0), Some((0, 3)));
    }

    #[test]
    fn merge_leaves_far_clusters() {
        let inst = line(&[0.0, 1.0, 10.0, 11.0], 2);
        let res = KCenterResult::from_assignment(&inst, vec![0, 2], vec![0, 0, 1, 1]).unwrap();
        let merged = condition2_merge(&inst, &res);
        assert_eq!(merged.clustering.centers(), &[0, 2]);
        assert!(merged.condition2);
    }

    #[test]
    fn merge_joins_split_cluster() {
        // Cluster {0,1,2} split as {0} and {1,2}; far cluster {3,4}. Radius 2.
        let inst = line(&[0.0, 1.0, 2.0, 50.0, 52.0], 3);
        let res = KCenterResult::from_assignment(&inst, vec![0, 2, 3], vec![0, 1, 1, 2, 2]).unwrap();
        assert_eq!(res.radius, 2.0);
        let merged = condition2_merge(&inst, &res);
        assert_eq!(merged.clustering.k(), 2);
        assert!(merged.clustering.contains_cluster(&[0, 1, 2]));
        assert!(merged.clustering.contains_cluster(&[3, 4]));
        assert!(merged.radius <= res.radius);
        assert_eq!(condition2_merge(&inst, &merged), merged);
    }

    #[test]
    fn single_cluster() {
        let inst = line(&[0.0, 1.0, 2.0, 3.5], 1);
        let res = solve_robust_kcenter(&inst).unwrap();
        assert_eq!(res.clustering.k(), 1);
        let exact = exact_solve(&inst).unwrap().clustering.cost();
        assert!(res.radius <= 2.0 * exact);
        assert!(res.condition1 && res.condition2);
    }
}
