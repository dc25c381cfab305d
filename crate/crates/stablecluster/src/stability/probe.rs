//! One-sided stability probes. A probe tries every perturbation of a fixed
//! structured family and reports a refutation when some optimum of the
//! perturbed instance loses the cluster. Finding nothing certifies nothing.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::metric::{approx_eq, approx_le, metric_completion, Instance};
use crate::objectives::{kcenter_covering_sets, kcenter_radius, optimal_center_sets, voronoi_assign, Clustering};
use crate::stability::perturb::{build_perturbation, raw_perturbation, Baseline, CapRule, Exception, PerturbationSpec};

/// Largest C(n,k) a probe will enumerate per perturbed instance.
pub const PROBE_LIMIT: u128 = 2_000_000;

#[derive(Clone, Debug)]
pub struct Witness {
    /// Index of the refuted cluster in the reference optimum.
    pub cluster: usize,
    pub spec: PerturbationSpec,
    /// An optimal center set of the perturbed instance.
    pub centers: Vec<usize>,
    /// Its Voronoi clustering under the perturbed distances (k-center cost).
    pub clustering: Clustering,
}

#[derive(Clone, Debug)]
pub enum Verdict {
    Refuted(Box<Witness>),
    NotRefuted,
    /// The unperturbed optimum already disagrees about this cluster.
    Degenerate,
}

impl Verdict {
    pub fn is_refuted(&self) -> bool {
        matches!(self, Verdict::Refuted(_))
    }

    pub fn is_not_refuted(&self) -> bool {
        matches!(self, Verdict::NotRefuted)
    }

    pub fn witness(&self) -> Option<&Witness> {
        match self {
            Verdict::Refuted(w) => Some(w),
            _ => None,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Refuted(_) => "refuted",
            Verdict::NotRefuted => "not-refuted",
            Verdict::Degenerate => "degenerate",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ProbeMode {
    /// Refuted when some perturbed optimum does not contain the cluster.
    Exact,
    /// Refuted when no perturbed optimum has a cluster ε-close to it.
    Eps(f64),
}

/// Whether some cluster of `assign` equals `members` (sorted).
pub fn assignment_contains(assign: &[usize], k: usize, members: &[usize]) -> bool {
    let Some(&first) = members.first() else {
        return false;
    };
    let label = assign[first];
    if members.iter().any(|&v| assign[v] != label) {
        return false;
    }
    let _ = k;
    assign.iter().filter(|&&a| a == label).count() == members.len()
}

/// Whether some cluster B of `assign` has |A \ B| + |B \ A| ≤ eps·n.
pub fn assignment_has_close(assign: &[usize], k: usize, members: &[usize], eps: f64) -> bool {
    let n = assign.len();
    let mut size = vec![0usize; k];
    let mut overlap = vec![0usize; k];
    for &a in assign {
        size[a] += 1;
    }
    for &v in members {
        overlap[assign[v]] += 1;
    }
    (0..k).any(|b| {
        let diff = (members.len() - overlap[b]) + (size[b] - overlap[b]);
        diff as f64 <= eps * n as f64
    })
}

fn keeps(mode: ProbeMode, assign: &[usize], k: usize, members: &[usize]) -> bool {
    match mode {
        ProbeMode::Exact => assignment_contains(assign, k, members),
        ProbeMode::Eps(eps) => assignment_has_close(assign, k, members, eps),
    }
}

/// A candidate perturbation of the structured family.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Candidate {
    pub baseline: Baseline,
    pub exception: Exception,
}

/// Precomputed reference optimum of a k-center instance.
pub struct Prober<'a> {
    inst: &'a Instance,
    r_star: f64,
    opt: Clustering,
    clusters: Vec<Vec<usize>>,
    original: Vec<Vec<usize>>,
}

impl<'a> Prober<'a> {
    pub fn new(inst: &'a Instance) -> Result<Self> {
        if !inst.objective().is_kcenter() {
            return Err(Error::ObjectiveMismatch {
                expected: "k-center or asymmetric-k-center",
                got: inst.objective().name(),
            });
        }
        let r_star = kcenter_radius(inst);
        let sets = kcenter_covering_sets(inst, r_star, PROBE_LIMIT)?;
        let opt = Clustering::new(inst, sets[0].clone(), voronoi_assign(inst, &sets[0]))?;
        let clusters = opt.clusters();
        let original = sets.iter().map(|s| voronoi_assign(inst, s)).collect();
        Ok(Prober {
            inst,
            r_star,
            opt,
            clusters,
            original,
        })
    }

    pub fn r_star(&self) -> f64 {
        self.r_star
    }

    /// Reference optimum: the lexicographically smallest optimal center set.
    pub fn opt(&self) -> &Clustering {
        &self.opt
    }

    pub fn clusters(&self) -> &[Vec<usize>] {
        &self.clusters
    }

    /// True when every optimal center set induces the same partition.
    pub fn unique(&self) -> bool {
        let k = self.inst.k();
        self.clusters
            .iter()
            .all(|c| self.original.iter().all(|a| assignment_contains(a, k, c)))
    }

    pub fn cluster_index(&self, members: &[usize]) -> Option<usize> {
        self.clusters.iter().position(|c| c == members)
    }

    pub fn degenerate(&self, i: usize, mode: ProbeMode) -> bool {
        let k = self.inst.k();
        self.original.iter().any(|a| !keeps(mode, a, k, &self.clusters[i]))
    }

    /// The structured family in enumeration order: for each target cluster j
    /// and candidate center v, a min-cap exception from v to C_j, to C_j ∪ C_l,
    /// and to C_j plus one point; each reduced to the targets whose distance
    /// actually changes and deduplicated. With `boundary`, single-center
    /// scalings that push boundary points of C_x towards another center follow.
    pub fn family(&self, alpha: f64, boundary: bool) -> Vec<Candidate> {
        let inst = self.inst;
        let (n, k) = (inst.n(), inst.k());
        let cap = alpha * self.r_star;
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        let in_opt = |j: usize, v: usize| self.opt.assign()[v] == j;
        for j in 0..k {
            for v in 0..n {
                let effective = |t: usize| {
                    let d = inst.d(v, t);
                    t != v && d > self.r_star && approx_le(d, cap)
                };
                let base: Vec<usize> = self.clusters[j].iter().copied().filter(|&t| effective(t)).collect();
                let mut targets = vec![base.clone()];
                for l in (0..k).filter(|&l| l != j) {
                    let mut t = base.clone();
                    t.extend(self.clusters[l].iter().copied().filter(|&t| effective(t)));
                    t.sort_unstable();
                    targets.push(t);
                }
                for u in (0..n).filter(|&u| !in_opt(j, u) && effective(u)) {
                    let mut t = base.clone();
                    t.push(u);
                    t.sort_unstable();
                    targets.push(t);
                }
                for t in targets {
                    if t.is_empty() {
                        continue;
                    }
                    let c = Candidate {
                        baseline: Baseline::Scaled,
                        exception: Exception {
                            source: v,
                            targets: t,
                            rule: CapRule::MinCap,
                        },
                    };
                    if seen.insert(c.clone()) {
                        out.push(c);
                    }
                }
            }
        }
        if boundary {
            let centers = self.opt.centers();
            for x in 0..k {
                let cx = centers[x];
                for i in (0..k).filter(|&i| i != x) {
                    let ci = centers[i];
                    let moved: Vec<usize> = self.clusters[x]
                        .iter()
                        .copied()
                        .filter(|&s| s != cx && inst.d(ci, s) <= self.r_star && inst.d(ci, s) <= alpha * inst.d(cx, s))
                        .collect();
                    if moved.is_empty() {
                        continue;
                    }
                    let c = Candidate {
                        baseline: Baseline::Identity,
                        exception: Exception {
                            source: cx,
                            targets: moved,
                            rule: CapRule::Scale,
                        },
                    };
                    if seen.insert(c.clone()) {
                        out.push(c);
                    }
                }
            }
        }
        out
    }

    /// Builds the perturbation and lists every optimal center set of the
    /// perturbed instance with its Voronoi assignment.
    pub fn optimal_assignments(
        &self,
        alpha: f64,
        cand: &Candidate,
    ) -> Result<(PerturbationSpec, Vec<(Vec<usize>, Vec<usize>)>)> {
        let spec = build_perturbation(
            self.inst,
            alpha,
            self.r_star,
            cand.baseline,
            vec![cand.exception.clone()],
            false,
        )?;
        let pinst = spec.instance(self.inst);
        let r = kcenter_radius(&pinst);
        if cand.baseline == Baseline::Scaled && !approx_eq(r, alpha * self.r_star) {
            return Err(Error::Invariant(format!(
                "perturbed radius {r} differs from alpha r* = {}",
                alpha * self.r_star
            )));
        }
        let sets = kcenter_covering_sets(&pinst, r, PROBE_LIMIT)?;
        let out = sets
            .into_iter()
            .map(|s| {
                let a = voronoi_assign(&pinst, &s);
                (s, a)
            })
            .collect();
        Ok((spec, out))
    }

    fn witness(&self, i: usize, spec: &PerturbationSpec, centers: &[usize], assign: &[usize]) -> Result<Witness> {
        let pinst = spec.instance(self.inst);
        Ok(Witness {
            cluster: i,
            spec: spec.clone(),
            centers: centers.to_vec(),
            clustering: Clustering::new(&pinst, centers.to_vec(), assign.to_vec())?,
        })
    }

    /// Verdicts for the selected clusters; the first refuting candidate in
    /// enumeration order is reported for each.
    pub fn probe_clusters(&self, alpha: f64, mode: ProbeMode, which: &[usize]) -> Result<Vec<Verdict>> {
        let k = self.inst.k();
        if !(alpha >= 1.0) {
            return Err(Error::Param(format!("alpha {alpha} must be at least 1")));
        }
        let mut verdicts: Vec<Option<Verdict>> = vec![None; k];
        for &i in which {
            if self.degenerate(i, mode) {
                verdicts[i] = Some(Verdict::Degenerate);
            }
        }
        let never = matches!(mode, ProbeMode::Eps(e) if e >= 1.0) || k == 1;
        if !never {
            let boundary = matches!(mode, ProbeMode::Eps(_));
            for cand in self.family(alpha, boundary) {
                let open: Vec<usize> = which.iter().copied().filter(|&i| verdicts[i].is_none()).collect();
                if open.is_empty() {
                    break;
                }
                let (spec, optima) = self.optimal_assignments(alpha, &cand)?;
                for i in open {
                    let members = &self.clusters[i];
                    let hit = match mode {
                        ProbeMode::Exact => optima.iter().find(|(_, a)| !keeps(mode, a, k, members)),
                        ProbeMode::Eps(_) => {
                            if optima.iter().all(|(_, a)| !keeps(mode, a, k, members)) {
                                optima.first()
                            } else {
                                None
                            }
                        }
                    };
                    if let Some((s, a)) = hit {
                        verdicts[i] = Some(Verdict::Refuted(Box::new(self.witness(i, &spec, s, a)?)));
                    }
                }
            }
        }
        Ok(which
            .iter()
            .map(|&i| verdicts[i].take().unwrap_or(Verdict::NotRefuted))
            .collect())
    }

    pub fn probe_lpr(&self, alpha: f64, i: usize) -> Result<Verdict> {
        self.check_index(i)?;
        Ok(self.probe_clusters(alpha, ProbeMode::Exact, &[i])?.remove(0))
    }

    pub fn probe_lpr_eps(&self, alpha: f64, eps: f64, i: usize) -> Result<Verdict> {
        self.check_index(i)?;
        Ok(self.probe_clusters(alpha, ProbeMode::Eps(eps), &[i])?.remove(0))
    }

    pub fn probe_all(&self, alpha: f64, mode: ProbeMode) -> Result<Vec<Verdict>> {
        let all: Vec<usize> = (0..self.inst.k()).collect();
        self.probe_clusters(alpha, mode, &all)
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i >= self.inst.k() {
            return Err(Error::Param(format!("cluster index {i} out of range")));
        }
        Ok(())
    }
}

pub fn probe_lpr(inst: &Instance, alpha: f64, i: usize) -> Result<Verdict> {
    Prober::new(inst)?.probe_lpr(alpha, i)
}

pub fn probe_lpr_eps(inst: &Instance, alpha: f64, eps: f64, i: usize) -> Result<Verdict> {
    Prober::new(inst)?.probe_lpr_eps(alpha, eps, i)
}

/// Re-checks a witness from scratch: rebuilds and completes the perturbation,
/// enumerates the optimum with the general oracle, and confirms the witness
/// centers are optimal and lose the cluster (`mode`).
pub fn verify_refutation(inst: &Instance, members: &[usize], witness: &Witness, mode: ProbeMode) -> Result<bool> {
    let spec = &witness.spec;
    let raw = raw_perturbation(inst, spec.alpha, spec.r_star, spec.baseline, &spec.exceptions)?;
    let completed = metric_completion(&raw);
    if completed != spec.completed {
        return Ok(false);
    }
    let pinst = inst.with_dist(completed);
    let (_, sets) = optimal_center_sets(&pinst)?;
    let mut centers = witness.centers.clone();
    centers.sort_unstable();
    if !sets.contains(&centers) {
        return Ok(false);
    }
    let k = inst.k();
    Ok(match mode {
        ProbeMode::Exact => !assignment_contains(&voronoi_assign(&pinst, &centers), k, members),
        ProbeMode::Eps(_) => sets
            .iter()
            .all(|s| !keeps(mode, &voronoi_assign(&pinst, s), k, members)),
    })
}
