//! Structured α-perturbations: a baseline (all distances scaled by α, or left
//! alone) with per-source exceptions, followed by metric completion.

use crate::error::{Error, Result};
use crate::metric::{approx_eq, approx_le, metric_completion, DistMatrix, Instance};
use crate::objectives::kcenter_radius;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CapRule {
    /// d''(s,t) = min(α r*, α d(s,t)); only allowed where d(s,t) ≤ α r*.
    MinCap,
    /// d''(s,t) = α d(s,t)
    Scale,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Baseline {
    /// Pairs without an exception become α d.
    Scaled,
    /// Pairs without an exception keep d.
    Identity,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Exception {
    pub source: usize,
    pub targets: Vec<usize>,
    pub rule: CapRule,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PerturbationSpec {
    pub alpha: f64,
    pub r_star: f64,
    pub baseline: Baseline,
    pub exceptions: Vec<Exception>,
    pub completed: DistMatrix,
}

impl PerturbationSpec {
    /// The input instance with its distances replaced by the completion.
    pub fn instance(&self, inst: &Instance) -> Instance {
        inst.with_dist(self.completed.clone())
    }
}

/// d'' before completion. For symmetric instances each exception is applied
/// in both directions.
pub fn raw_perturbation(
    inst: &Instance,
    alpha: f64,
    r_star: f64,
    baseline: Baseline,
    exceptions: &[Exception],
) -> Result<DistMatrix> {
    if !(alpha >= 1.0) {
        return Err(Error::Param(format!("alpha {alpha} must be at least 1")));
    }
    let n = inst.n();
    let mut raw = match baseline {
        Baseline::Scaled => inst.dist().scaled(alpha),
        Baseline::Identity => inst.dist().clone(),
    };
    let cap = alpha * r_star;
    for e in exceptions {
        let s = e.source;
        if s >= n {
            return Err(Error::Param(format!("exception source {s} out of range")));
        }
        for &t in &e.targets {
            if t >= n {
                return Err(Error::Param(format!("exception target {t} out of range")));
            }
            if t == s {
                continue;
            }
            let d = inst.d(s, t);
            let value = match e.rule {
                CapRule::MinCap => {
                    if !approx_le(d, cap) {
                        return Err(Error::Perturbation {
                            u: s,
                            v: t,
                            msg: format!("min-cap exception with d = {d} > alpha r* = {cap}"),
                        });
                    }
                    cap.min(alpha * d).max(d)
                }
                CapRule::Scale => alpha * d,
            };
            raw.set(s, t, value);
            if inst.symmetric() {
                raw.set(t, s, value);
            }
        }
    }
    Ok(raw)
}

/// d ≤ d' ≤ α d pointwise and d' satisfies the triangle inequality.
pub fn check_perturbation(inst: &Instance, alpha: f64, completed: &DistMatrix) -> Result<()> {
    let n = inst.n();
    for u in 0..n {
        for v in 0..n {
            let (d, p) = (inst.d(u, v), completed.get(u, v));
            if !approx_le(d, p) || !approx_le(p, alpha * d) {
                return Err(Error::Perturbation {
                    u,
                    v,
                    msg: format!("d = {d}, d' = {p}, alpha = {alpha}"),
                });
            }
        }
    }
    completed.check_triangle()
}

/// Builds, completes and checks a perturbation. With `verify_cost`, the exact
/// k-center radius of the completion must equal α r*.
pub fn build_perturbation(
    inst: &Instance,
    alpha: f64,
    r_star: f64,
    baseline: Baseline,
    exceptions: Vec<Exception>,
    verify_cost: bool,
) -> Result<PerturbationSpec> {
    let raw = raw_perturbation(inst, alpha, r_star, baseline, &exceptions)?;
    let completed = metric_completion(&raw);
    check_perturbation(inst, alpha, &completed)?;
    let spec = PerturbationSpec {
        alpha,
        r_star,
        baseline,
        exceptions,
        completed,
    };
    if verify_cost {
        let cost = kcenter_radius(&spec.instance(inst));
        if !approx_eq(cost, alpha * r_star) {
            return Err(Error::Invariant(format!(
                "perturbed k-center cost {cost} differs from alpha r* = {}",
                alpha * r_star
            )));
        }
    }
    Ok(spec)
}

/// Scaled baseline with the given exceptions; r* is computed exactly and the
/// cost identity is verified.
pub fn build_capped_perturbation(inst: &Instance, alpha: f64, exceptions: Vec<Exception>) -> Result<PerturbationSpec> {
    let r_star = kcenter_radius(inst);
    build_perturbation(inst, alpha, r_star, Baseline::Scaled, exceptions, true)
}

/// Every pair with d ≥ r* ends at least α r* apart after completion.
pub fn far_pairs_stay_far(inst: &Instance, spec: &PerturbationSpec) -> bool {
    let n = inst.n();
    let bound = spec.alpha * spec.r_star;
    (0..n).all(|u| (0..n).all(|v| inst.d(u, v) < spec.r_star || approx_le(bound, spec.completed.get(u, v))))
}
