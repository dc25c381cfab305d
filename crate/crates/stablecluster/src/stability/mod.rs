//! Perturbation constructors, detectors and refute-only stability probes.

pub mod detect;
pub mod perturb;
pub mod probe;

pub use detect::{
    check_hits, check_uniform_approx_condition, detect_ccc, uniform_approx_terms, CccReport, UniformMode, UniformTerms,
};
pub use perturb::{
    build_capped_perturbation, build_perturbation, check_perturbation, far_pairs_stay_far, raw_perturbation, Baseline,
    CapRule, Exception, PerturbationSpec,
};
pub use probe::{probe_lpr, probe_lpr_eps, verify_refutation, Candidate, ProbeMode, Prober, Verdict, Witness};

use crate::error::Result;
use crate::graph::threshold_digraph;
use crate::kcenter_asym::{is_ccv, satisfies_ccv_proximity, satisfies_center_separation};
use crate::metric::Instance;

#[derive(Clone, Debug)]
pub struct ClusterReport {
    pub members: Vec<usize>,
    pub center: usize,
    pub ccv_center: bool,
    pub ccv_proximity: bool,
    pub center_separation: bool,
    /// Indices i whose center captures this cluster.
    pub ccc_witnesses: Vec<usize>,
    /// Pairs (i, l): c_i captures this cluster once c_l is discounted.
    pub ccc2_witnesses: Vec<(usize, usize)>,
    pub lpr: Verdict,
    /// The (α,ε) probe, when an ε was requested.
    pub lpr_eps: Option<Verdict>,
    /// Some neighbouring cluster (a point within r* either way), or this one, is refuted.
    pub slpr_refuted: Option<usize>,
    /// Clusters with a point within r* of this one, in either direction.
    pub neighbours: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct StabilityReport {
    pub r_star: f64,
    pub alpha: f64,
    pub eps: f64,
    pub clusters: Vec<ClusterReport>,
    /// The exact optimum is not unique.
    pub degenerate: bool,
}

/// Runs every detector and the probes on the reference optimum of a k-center
/// instance. `eps` feeds the CCC detectors and, when positive, the (α,ε) probe.
pub fn stability_report(inst: &Instance, alpha: f64, eps: f64) -> Result<StabilityReport> {
    stability_report_with(inst, alpha, eps, eps > 0.0)
}

/// As [`stability_report`], with the (α,ε) probe run only when `probe_eps` is set.
pub fn stability_report_with(inst: &Instance, alpha: f64, eps: f64, probe_eps: bool) -> Result<StabilityReport> {
    let prober = Prober::new(inst)?;
    let r_star = prober.r_star();
    let opt = prober.opt();
    let k = inst.k();
    let g = threshold_digraph(inst, r_star);
    let ccc = detect_ccc(inst, opt, eps);
    let lpr = prober.probe_all(alpha, ProbeMode::Exact)?;
    let lpr_eps = if probe_eps {
        Some(prober.probe_all(alpha, ProbeMode::Eps(eps))?)
    } else {
        None
    };
    let clusters = prober.clusters();
    let neighbours: Vec<Vec<usize>> = (0..k)
        .map(|i| {
            (0..k)
                .filter(|&j| {
                    j != i
                        && clusters[i].iter().any(|&u| {
                            clusters[j]
                                .iter()
                                .any(|&v| inst.d(u, v) <= r_star || inst.d(v, u) <= r_star)
                        })
                })
                .collect()
        })
        .collect();
    let mut out = Vec::with_capacity(k);
    for i in 0..k {
        let c = opt.centers()[i];
        let slpr_refuted = std::iter::once(i)
            .chain(neighbours[i].iter().copied())
            .find(|&j| lpr[j].is_refuted());
        out.push(ClusterReport {
            members: clusters[i].clone(),
            center: c,
            ccv_center: is_ccv(&g, c),
            ccv_proximity: satisfies_ccv_proximity(&g, inst, c),
            center_separation: satisfies_center_separation(inst, opt, i, r_star),
            ccc_witnesses: ccc.pairs.iter().filter(|p| p.1 == i).map(|p| p.0).collect(),
            ccc2_witnesses: ccc.triples.iter().filter(|t| t.1 == i).map(|t| (t.0, t.2)).collect(),
            lpr: lpr[i].clone(),
            lpr_eps: lpr_eps.as_ref().map(|v| v[i].clone()),
            slpr_refuted,
            neighbours: neighbours[i].clone(),
        });
    }
    Ok(StabilityReport {
        r_star,
        alpha,
        eps,
        clusters: out,
        degenerate: !prober.unique(),
    })
}
