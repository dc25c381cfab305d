//! Seeded instance generators: planted clusters, planted clusters next to an
//! ambiguous noise ring, random corpora, and the approximation-stability
//! embedding. Coordinates live on a grid of 2^-10 in the L1 plane, so every
//! distance is exactly representable and survives a file round trip.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::threshold_digraph;
use crate::kcenter_asym::{satisfies_ccv_proximity, satisfies_center_separation};
use crate::metric::{approx_eq, metric_completion, DistMatrix, Instance, Objective};
use crate::objectives::{binomial, exact_solve_limit, Clustering};
use crate::stability::{ProbeMode, Prober, Verdict};

pub const GRID: f64 = 1.0 / 1024.0;
/// Largest C(n,k) for which the planted optimum is checked with the exact oracle.
pub const VERIFY_LIMIT: u128 = 1_000_000;
pub const ESCALATION_FACTOR: f64 = 1.5;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Asymmetry {
    None,
    /// Distances towards the planted center are inflated by λ inside a cluster.
    Skew(f64),
}

#[derive(Clone, Debug)]
pub struct GenSpec {
    pub seed: u64,
    pub k: usize,
    pub sizes: Vec<usize>,
    pub intra_radius: f64,
    pub separation: f64,
    pub asymmetry: Asymmetry,
    pub noise: usize,
    /// Defaults to k-center, or asymmetric k-center under skew.
    pub objective: Option<Objective>,
    /// Stability level the probes must fail to refute.
    pub alpha: f64,
    /// Switches certification to the (α,ε) probe and enforces sizes > 2εn.
    pub eps: Option<f64>,
    pub max_escalations: usize,
}

impl GenSpec {
    pub fn new(seed: u64, sizes: Vec<usize>) -> Self {
        GenSpec {
            seed,
            k: sizes.len(),
            sizes,
            intra_radius: 1.0,
            separation: 10.0,
            asymmetry: Asymmetry::None,
            noise: 0,
            objective: None,
            alpha: 2.0,
            eps: None,
            max_escalations: 8,
        }
    }

    pub fn n(&self) -> usize {
        self.sizes.iter().sum::<usize>() + self.noise
    }

    pub fn objective(&self) -> Objective {
        self.objective.unwrap_or(match self.asymmetry {
            Asymmetry::None => Objective::KCenter,
            Asymmetry::Skew(_) => Objective::AsymKCenter,
        })
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Param(m));
        if self.k == 0 || self.sizes.len() != self.k {
            return bad(format!("k = {} but {} sizes given", self.k, self.sizes.len()));
        }
        if self.sizes.contains(&0) {
            return bad("cluster sizes must be at least 1".into());
        }
        if !(self.intra_radius >= GRID && self.intra_radius.is_finite()) {
            return bad(format!("intra radius {} must be at least {GRID}", self.intra_radius));
        }
        if !(self.separation > 2.0 && self.separation.is_finite()) {
            return bad(format!("separation {} must exceed 2", self.separation));
        }
        if !(self.alpha >= 1.0) {
            return bad(format!("alpha {} must be at least 1", self.alpha));
        }
        if let Asymmetry::Skew(l) = self.asymmetry {
            if !(l >= 1.0 && l.is_finite()) {
                return bad(format!("skew {l} must be at least 1"));
            }
            if self.objective() != Objective::AsymKCenter {
                return bad("skewed instances use the asymmetric k-center objective".into());
            }
        } else if self.objective() == Objective::AsymKCenter {
            return bad("asymmetric k-center needs a skew".into());
        }
        if let Some(eps) = self.eps {
            if !(eps > 0.0 && eps < 1.0) {
                return bad(format!("eps {eps} must lie in (0,1)"));
            }
            let floor = 2.0 * eps * self.n() as f64;
            if let Some(&s) = self.sizes.iter().find(|&&s| s as f64 <= floor) {
                return bad(format!("cluster size {s} is not above 2 eps n = {floor}"));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct Planted {
    pub instance: Instance,
    /// Planted clusters first, then the noise clusters.
    pub planted: Clustering,
    pub r_star: f64,
    /// Separation factor actually used after escalation.
    pub separation: f64,
    /// Per planted cluster: passed every certification check.
    pub flags: Vec<bool>,
    pub escalations: usize,
    /// Number of leading clusters in `planted` that come from `sizes`.
    pub stable_clusters: usize,
}

impl Planted {
    pub fn all_certified(&self) -> bool {
        self.flags[..self.stable_clusters].iter().all(|&f| f)
    }
}

type Coord = (i64, i64);

fn l1(a: Coord, b: Coord) -> f64 {
    ((a.0 - b.0).abs() + (a.1 - b.1).abs()) as f64 * GRID
}

fn grid_ceil(x: f64) -> f64 {
    (x / GRID).ceil() * GRID
}

struct Layout {
    coords: Vec<Coord>,
    /// Cluster of each point; noise points carry cluster k + ring slot / 3.
    truth: Vec<usize>,
    /// Position on the ring for noise points.
    ring: Vec<Option<usize>>,
    /// Distance from the point to its cluster anchor.
    rho: Vec<i64>,
}

fn layout(spec: &GenSpec, sep: f64, rng: &mut ChaCha8Rng) -> Layout {
    let reach = (spec.intra_radius / GRID).floor() as i64;
    let step = ((sep + 2.0) * spec.intra_radius / GRID).ceil() as i64 + 1;
    let mut coords = Vec::new();
    let mut truth = Vec::new();
    let mut ring = Vec::new();
    let mut rho = Vec::new();
    for (j, &size) in spec.sizes.iter().enumerate() {
        let anchor = (j as i64 * step, 0);
        let mut seen = std::collections::HashSet::new();
        seen.insert((0, 0));
        let mut offsets = vec![(0i64, 0i64)];
        while offsets.len() < size {
            let a = rng.random_range(-reach..=reach);
            let rest = reach - a.abs();
            let b = rng.random_range(-rest..=rest);
            if seen.insert((a, b)) {
                offsets.push((a, b));
            }
        }
        for (a, b) in offsets {
            coords.push((anchor.0 + a, anchor.1 + b));
            truth.push(j);
            ring.push(None);
            rho.push(a.abs() + b.abs());
        }
    }
    for i in 0..spec.noise {
        coords.push((0, 0));
        truth.push(spec.k + i / 3);
        ring.push(Some(i));
        rho.push(0);
    }
    let mut perm: Vec<usize> = (0..coords.len()).collect();
    perm.shuffle(rng);
    Layout {
        coords: perm.iter().map(|&p| coords[p]).collect(),
        truth: perm.iter().map(|&p| truth[p]).collect(),
        ring: perm.iter().map(|&p| ring[p]).collect(),
        rho: perm.iter().map(|&p| rho[p]).collect(),
    }
}

fn distances(spec: &GenSpec, sep: f64, lay: &Layout) -> DistMatrix {
    let n = lay.coords.len();
    let m = spec.noise;
    let h = grid_ceil(spec.intra_radius);
    let far = grid_ceil((sep * spec.intra_radius).max(m as f64 * h / 2.0)) + GRID;
    let raw = DistMatrix::from_fn(n, |u, v| match (lay.ring[u], lay.ring[v]) {
        (Some(a), Some(b)) => {
            let gap = a.abs_diff(b);
            gap.min(m - gap) as f64 * h
        }
        (Some(_), None) => far + l1((0, 0), lay.coords[v]),
        (None, Some(_)) => far + l1((0, 0), lay.coords[u]),
        (None, None) => {
            let d = l1(lay.coords[u], lay.coords[v]);
            match spec.asymmetry {
                Asymmetry::Skew(lambda) if lay.truth[u] == lay.truth[v] && lay.rho[v] < lay.rho[u] => d * lambda,
                _ => d,
            }
        }
    });
    match spec.asymmetry {
        Asymmetry::None => raw,
        Asymmetry::Skew(_) => metric_completion(&raw),
    }
}

/// Cheapest single center of `members` under the objective, ties to the lowest index.
fn one_center(inst: &Instance, members: &[usize]) -> usize {
    let score = |c: usize| -> f64 {
        let ds = members.iter().map(|&v| inst.d(c, v));
        match inst.objective() {
            Objective::KMedian => ds.sum(),
            Objective::KMeans => ds.map(|d| d * d).sum(),
            Objective::KCenter | Objective::AsymKCenter => ds.fold(0.0, f64::max),
        }
    };
    let mut best = members[0];
    let mut best_score = score(best);
    for &c in &members[1..] {
        let s = score(c);
        if s < best_score {
            best = c;
            best_score = s;
        }
    }
    best
}

fn ring_center(members: &[usize], lay: &Layout) -> usize {
    // middle slot of the triple covers both neighbours at one step
    let mut by_slot: Vec<(usize, usize)> = members.iter().map(|&p| (lay.ring[p].unwrap(), p)).collect();
    by_slot.sort_unstable();
    by_slot[by_slot.len() / 2].1
}

fn build(spec: &GenSpec, sep: f64) -> Result<(Instance, Clustering, Layout)> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let lay = layout(spec, sep, &mut rng);
    let dist = distances(spec, sep, &lay);
    let k_total = spec.k + spec.noise.div_ceil(3);
    let symmetric = spec.asymmetry == Asymmetry::None;
    let inst = Instance::new(dist, k_total, symmetric, spec.objective())?;
    let mut members = vec![Vec::new(); k_total];
    for (p, &c) in lay.truth.iter().enumerate() {
        members[c].push(p);
    }
    let centers: Vec<usize> = members
        .iter()
        .enumerate()
        .map(|(j, m)| {
            if j < spec.k {
                one_center(&inst, m)
            } else {
                ring_center(m, &lay)
            }
        })
        .collect();
    let planted = Clustering::new(&inst, centers, lay.truth.clone())?;
    Ok((inst, planted, lay))
}

/// Per planted cluster certification. k-center objectives: the planted cost is
/// the exact radius, the oracle's reference optimum contains the cluster, the
/// probe does not refute it at α (the ε probe when ε is set) and, for
/// asymmetric instances, its center has CCV-proximity and center-separation.
/// Other objectives: the exact optimum is unique and equals the planted
/// partition (all or nothing); unchecked when the oracle is out of reach.
pub fn certify(inst: &Instance, planted: &Clustering, alpha: f64, eps: Option<f64>) -> Result<Vec<bool>> {
    let k = inst.k();
    let count = binomial(inst.n(), k);
    if !inst.objective().is_kcenter() {
        if count > VERIFY_LIMIT {
            log::warn!("C({}, {k}) = {count}: planted optimum left unverified", inst.n());
            return Ok(vec![false; k]);
        }
        let ex = exact_solve_limit(inst, VERIFY_LIMIT)?;
        let same = (0..k).all(|i| ex.clustering.contains_cluster(&planted.cluster(i)));
        return Ok(vec![ex.unique && same; k]);
    }
    if count <= VERIFY_LIMIT {
        let ex = exact_solve_limit(inst, VERIFY_LIMIT)?;
        if !approx_eq(ex.clustering.cost(), planted.cost()) {
            return Ok(vec![false; k]);
        }
    }
    let prober = Prober::new(inst)?;
    let r_star = prober.r_star();
    if !approx_eq(r_star, planted.cost()) {
        return Ok(vec![false; k]);
    }
    let index: Vec<Option<usize>> = (0..k).map(|i| prober.cluster_index(&planted.cluster(i))).collect();
    let wanted: Vec<usize> = index.iter().flatten().copied().collect();
    let mode = eps.map_or(ProbeMode::Exact, ProbeMode::Eps);
    let verdicts = prober.probe_clusters(alpha, mode, &wanted)?;
    let g = (!inst.symmetric()).then(|| threshold_digraph(inst, r_star));
    Ok((0..k)
        .map(|i| {
            let Some(pos) = index[i].and_then(|j| wanted.iter().position(|&w| w == j)) else {
                return false;
            };
            if !matches!(verdicts[pos], Verdict::NotRefuted) {
                return false;
            }
            match &g {
                Some(g) => {
                    satisfies_ccv_proximity(g, inst, planted.centers()[i])
                        && satisfies_center_separation(inst, planted, i, r_star)
                }
                None => true,
            }
        })
        .collect())
}

fn generate(spec: &GenSpec) -> Result<Planted> {
    spec.validate()?;
    let mut sep = spec.separation;
    let mut last = Vec::new();
    for attempt in 0..=spec.max_escalations {
        let (inst, planted, _) = build(spec, sep)?;
        let flags = certify(&inst, &planted, spec.alpha, spec.eps)?;
        if flags[..spec.k].iter().all(|&f| f) {
            let r_star = planted.cost();
            return Ok(Planted {
                instance: inst,
                planted,
                r_star,
                separation: sep,
                flags,
                escalations: attempt,
                stable_clusters: spec.k,
            });
        }
        last = (0..spec.k).filter(|&i| !flags[i]).collect();
        if attempt < spec.max_escalations {
            log::info!(
                "seed {}: clusters {last:?} not certified at alpha {} with separation {sep}; escalating to {}",
                spec.seed,
                spec.alpha,
                sep * ESCALATION_FACTOR
            );
        }
        sep *= ESCALATION_FACTOR;
    }
    Err(Error::Generator(format!(
        "seed {}: clusters {last:?} still not certified at alpha {} after {} escalations (separation {})",
        spec.seed,
        spec.alpha,
        spec.max_escalations,
        sep / ESCALATION_FACTOR
    )))
}

/// The planted layout at the given separation without any verification; the
/// planted clustering is not necessarily optimal.
pub fn gen_uncertified(spec: &GenSpec) -> Result<(Instance, Clustering)> {
    spec.validate()?;
    let (inst, planted, _) = build(spec, spec.separation)?;
    Ok((inst, planted))
}

/// Planted clusters whose optimality and stability are certified before return.
pub fn gen_planted(spec: &GenSpec) -> Result<Planted> {
    if spec.noise != 0 {
        return Err(Error::Param("planted instances take no noise; use gen_mixed".into()));
    }
    generate(spec)
}

/// Planted clusters plus `noise` points on a ring with step r placed far from
/// them, covered by ceil(noise/3) extra clusters. The ring admits several
/// optimal center choices whenever noise ≥ 3.
pub fn gen_mixed(spec: &GenSpec) -> Result<Planted> {
    generate(spec)
}

/// Adds ceil(n/ε) points at distance 2αn·max d from everything (and from each
/// other) and raises k by the same amount.
pub fn embed_approx_stable(inst: &Instance, alpha: f64, eps: f64) -> Result<(Instance, usize)> {
    if !inst.symmetric() {
        return Err(Error::ObjectiveNeedsSymmetric("approximation-stability embedding"));
    }
    if !(eps > 0.0) || !(alpha >= 1.0) {
        return Err(Error::Param(format!("need eps > 0 and alpha >= 1, got {eps}, {alpha}")));
    }
    let n = inst.n();
    let extra = (n as f64 / eps).ceil() as usize;
    let far = 2.0 * alpha * n as f64 * inst.dist().max_finite();
    let total = n + extra;
    let dist = DistMatrix::from_fn(total, |u, v| {
        if u == v {
            0.0
        } else if u < n && v < n {
            inst.d(u, v)
        } else {
            far
        }
    });
    let k = inst.k() + extra;
    Ok((Instance::new(dist, k, true, inst.objective())?, k))
}

/// Uniform grid points in [0, side]² under L1.
pub fn random_l1(seed: u64, n: usize, k: usize, objective: Objective, side: f64) -> Result<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let units = (side / GRID).round() as i64;
    let pts: Vec<Coord> = (0..n)
        .map(|_| (rng.random_range(0..=units), rng.random_range(0..=units)))
        .collect();
    let dist = DistMatrix::from_fn(n, |u, v| l1(pts[u], pts[v]));
    Instance::new(dist, k, true, objective)
}

/// Points around `blobs` random blob centers in [0,100]², each directed
/// distance the L1 distance times a factor in [1, skew] on a 1/8 grid, then
/// completed.
pub fn random_asymmetric(seed: u64, n: usize, k: usize, blobs: usize, skew: f64) -> Result<Instance> {
    if blobs == 0 || !(skew >= 1.0) {
        return Err(Error::Param(format!(
            "need blobs >= 1 and skew >= 1, got {blobs}, {skew}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let side = (100.0 / GRID) as i64;
    let spread = (5.0 / GRID) as i64;
    let hubs: Vec<Coord> = (0..blobs)
        .map(|_| (rng.random_range(0..=side), rng.random_range(0..=side)))
        .collect();
    let pts: Vec<Coord> = (0..n)
        .map(|_| {
            let h = hubs[rng.random_range(0..blobs)];
            (
                h.0 + rng.random_range(-spread..=spread),
                h.1 + rng.random_range(-spread..=spread),
            )
        })
        .collect();
    let steps = ((skew - 1.0) * 8.0).floor() as u32;
    let factors: Vec<f64> = (0..n * n)
        .map(|_| 1.0 + rng.random_range(0..=steps) as f64 / 8.0)
        .collect();
    let raw = DistMatrix::from_fn(n, |u, v| l1(pts[u], pts[v]) * factors[u * n + v]);
    Instance::new(metric_completion(&raw), k, false, Objective::AsymKCenter)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objectives::{exact_solve, kcenter_radius};

    #[test]
    fn planted_small_symmetric() {
        let mut spec = GenSpec::new(11, vec![4, 4, 4]);
        spec.separation = 10.0;
        let p = gen_planted(&spec).unwrap();
        assert_eq!(p.instance.n(), 12);
        assert!(p.r_star <= 1.0);
        assert!(p.all_certified());
        let ex = exact_solve(&p.instance).unwrap();
        assert_eq!(ex.clustering.cost(), p.r_star);
        for i in 0..3 {
            assert!(ex.clustering.contains_cluster(&p.planted.cluster(i)));
        }
    }

    #[test]
    fn reproducible() {
        let spec = GenSpec::new(5, vec![3, 5]);
        let a = gen_planted(&spec).unwrap();
        let b = gen_planted(&spec).unwrap();
        assert_eq!(a.instance, b.instance);
        assert_eq!(a.planted, b.planted);
    }

    #[test]
    fn cross_distances_exceed_separation() {
        let spec = GenSpec::new(2, vec![5, 5, 5]);
        let p = gen_planted(&spec).unwrap();
        let inst = &p.instance;
        let a = p.planted.assign();
        for u in 0..inst.n() {
            for v in 0..inst.n() {
                if a[u] != a[v] {
                    assert!(inst.d(u, v) > p.separation * spec.intra_radius);
                } else {
                    assert!(inst.d(u, v) <= 2.0 * spec.intra_radius);
                }
            }
        }
    }

    #[test]
    fn skewed_instance_is_directed_metric() {
        let mut spec = GenSpec::new(3, vec![4, 4]);
        spec.asymmetry = Asymmetry::Skew(3.0);
        let p = gen_planted(&spec).unwrap();
        assert!(!p.instance.symmetric());
        p.instance.validate().unwrap();
        assert!(!p.instance.dist().is_symmetric());
        assert_eq!(kcenter_radius(&p.instance), p.r_star);
    }

    #[test]
    fn rejects_small_clusters_for_eps() {
        let mut spec = GenSpec::new(0, vec![2, 6, 6]);
        spec.eps = Some(0.1);
        assert!(matches!(gen_planted(&spec), Err(Error::Param(_))));
    }

    #[test]
    fn rejects_low_separation() {
        let mut spec = GenSpec::new(0, vec![2, 2]);
        spec.separation = 2.0;
        assert!(gen_planted(&spec).is_err());
    }

    #[test]
    fn escalates_until_certified() {
        // Cross distances start inside α r*, so the first attempt is refuted.
        let mut spec = GenSpec::new(0, vec![4, 4, 4]);
        spec.separation = 2.5;
        spec.alpha = 5.0;
        let p = gen_planted(&spec).unwrap();
        assert!(p.escalations >= 1);
        assert_eq!(p.separation, 2.5 * ESCALATION_FACTOR.powi(p.escalations as i32));
        assert!(p.all_certified());
        spec.max_escalations = 0;
        assert!(matches!(gen_planted(&spec), Err(Error::Generator(_))));
    }

    #[test]
    fn mixed_ring_is_degenerate() {
        let mut spec = GenSpec::new(4, vec![4, 4]);
        spec.noise = 6;
        let p = gen_mixed(&spec).unwrap();
        assert_eq!(p.instance.k(), 4);
        assert_eq!(p.flags.len(), 4);
        assert!(p.flags[0] && p.flags[1]);
        assert!(!p.flags[2] && !p.flags[3]);
        let prober = Prober::new(&p.instance).unwrap();
        assert!(!prober.unique());
    }

    #[test]
    fn mixed_without_noise_matches_planted() {
        let spec = GenSpec::new(9, vec![3, 4]);
        let a = gen_mixed(&spec).unwrap();
        let b = gen_planted(&spec).unwrap();
        assert_eq!(a.instance, b.instance);
        assert_eq!(a.flags, b.flags);
    }

    #[test]
    fn embedding_arithmetic() {
        let inst = random_l1(1, 4, 2, Objective::KMedian, 4.0).unwrap();
        let (big, k) = embed_approx_stable(&inst, 1.0, 0.5).unwrap();
        assert_eq!(big.n(), 12);
        assert_eq!(k, 10);
        big.validate().unwrap();
    }

    #[test]
    fn random_asymmetric_valid() {
        let inst = random_asymmetric(7, 30, 3, 4, 3.0).unwrap();
        inst.validate().unwrap();
        assert!(!inst.dist().is_symmetric());
    }
}
