//! Named solvers and their `key=value` parameter strings.

use std::fmt;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};

use stablecluster::kcenter_asym::{plain_result, radius_search, robust_asym_solve, vishwanathan_solve, AsymSolver};
use stablecluster::kcenter_sym::{greedy_2approx, solve_robust_kcenter_at, solve_robust_kcenter_seeded, KCenterResult};
use stablecluster::local_search::{local_search, Init, LocalSearchConfig, SwapRecord};
use stablecluster::metric::Instance;
use stablecluster::objectives::{exact_solve, kcenter_radius, Clustering};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Algo {
    Exact,
    LocalSearch,
    KCenterGreedy,
    KCenterRobust,
    AsymKCenter,
    AsymKCenterRobust,
}

impl Algo {
    pub fn name(self) -> &'static str {
        match self {
            Algo::Exact => "exact",
            Algo::LocalSearch => "local-search",
            Algo::KCenterGreedy => "kcenter-greedy",
            Algo::KCenterRobust => "kcenter-robust",
            Algo::AsymKCenter => "asym-kcenter",
            Algo::AsymKCenterRobust => "asym-kcenter-robust",
        }
    }

    fn keys(self) -> &'static [&'static str] {
        match self {
            Algo::Exact => &[],
            Algo::LocalSearch => &["epsilon", "t", "init", "seed", "max-iterations"],
            Algo::KCenterGreedy => &["seed"],
            Algo::KCenterRobust => &["r", "seed"],
            Algo::AsymKCenter | Algo::AsymKCenterRobust => &["r"],
        }
    }
}

impl fmt::Display for Algo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algo {
    type Err = anyhow::Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "exact" => Algo::Exact,
            "local-search" => Algo::LocalSearch,
            "kcenter-greedy" => Algo::KCenterGreedy,
            "kcenter-robust" => Algo::KCenterRobust,
            "asym-kcenter" => Algo::AsymKCenter,
            "asym-kcenter-robust" => Algo::AsymKCenterRobust,
            _ => bail!("unknown algorithm '{s}'"),
        })
    }
}

/// Radius handed to a k-center solver instead of searching for one.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Radius {
    Value(f64),
    /// The exact optimal radius.
    Optimal,
}

impl FromStr for Radius {
    type Err = anyhow::Error;
    fn from_str(s: &str) -> Result<Self> {
        if s == "opt" {
            return Ok(Radius::Optimal);
        }
        let r: f64 = s.parse().with_context(|| format!("bad radius '{s}'"))?;
        if !(r >= 0.0 && r.is_finite()) {
            bail!("radius {r} must be finite and non-negative");
        }
        Ok(Radius::Value(r))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveParams {
    pub epsilon: f64,
    pub t: Option<usize>,
    pub init: Init,
    pub seed: u64,
    pub max_iterations: Option<usize>,
    pub radius: Option<Radius>,
}

impl SolveParams {
    pub fn new(seed: u64) -> Self {
        SolveParams {
            epsilon: 0.2,
            t: None,
            init: Init::FarthestFirst,
            seed,
            max_iterations: None,
            radius: None,
        }
    }

    /// Parses whitespace-separated `key=value` pairs over the defaults.
    pub fn parse(algo: Algo, text: &str, seed: u64) -> Result<Self> {
        let mut p = SolveParams::new(seed);
        for (key, value) in split_pairs(text)? {
            if !algo.keys().contains(&key) {
                bail!("{algo} takes no parameter '{key}'");
            }
            let bad = || format!("bad value '{value}' for {key}");
            match key {
                "epsilon" => p.epsilon = value.parse().with_context(bad)?,
                "t" => p.t = Some(value.parse().with_context(bad)?),
                "init" => p.init = value.parse().map_err(|e| anyhow!("{e}"))?,
                "seed" => p.seed = value.parse().with_context(bad)?,
                "max-iterations" => p.max_iterations = Some(value.parse().with_context(bad)?),
                "r" => p.radius = Some(value.parse()?),
                _ => unreachable!(),
            }
        }
        Ok(p)
    }
}

pub fn split_pairs(text: &str) -> Result<Vec<(&str, &str)>> {
    text.split_whitespace()
        .map(|kv| kv.split_once('=').ok_or_else(|| anyhow!("'{kv}' is not key=value")))
        .collect()
}

pub struct SolveOutput {
    /// Cost is taken under the instance's own objective.
    pub clustering: Clustering,
    pub meta: Vec<(String, String)>,
    pub trace: Option<Vec<SwapRecord>>,
}

fn kv(key: &str, value: impl ToString) -> (String, String) {
    (key.to_owned(), value.to_string())
}

fn resolve(inst: &Instance, r: Radius) -> f64 {
    match r {
        Radius::Value(r) => r,
        Radius::Optimal => kcenter_radius(inst),
    }
}

fn from_kcenter(inst: &Instance, res: &KCenterResult, mut meta: Vec<(String, String)>) -> Result<SolveOutput> {
    let c = &res.clustering;
    let clustering = Clustering::new(inst, c.centers().to_vec(), c.assign().to_vec())?;
    meta.insert(0, kv("radius", res.radius));
    if let Some(r) = res.r_used {
        meta.insert(1, kv("r_used", r));
    }
    Ok(SolveOutput {
        clustering,
        meta,
        trace: None,
    })
}

pub fn run_algo(inst: &Instance, algo: Algo, p: &SolveParams) -> Result<SolveOutput> {
    match algo {
        Algo::Exact => {
            let sol = exact_solve(inst)?;
            Ok(SolveOutput {
                clustering: sol.clustering,
                meta: vec![kv("unique", sol.unique), kv("optimal_sets", sol.optimal_sets)],
                trace: None,
            })
        }
        Algo::LocalSearch => {
            let mut cfg = LocalSearchConfig::new(p.epsilon);
            cfg.t = p.t;
            cfg.init = p.init;
            cfg.seed = p.seed;
            if let Some(m) = p.max_iterations {
                cfg.max_iterations = m;
            }
            let out = local_search(inst, &cfg)?;
            let meta = vec![
                kv("epsilon", p.epsilon),
                kv("t", cfg.swap_size()),
                kv("initial_cost", out.initial_cost),
                kv("swaps", out.trace.len()),
                kv("converged", out.converged),
            ];
            Ok(SolveOutput {
                clustering: out.clustering,
                meta,
                trace: Some(out.trace),
            })
        }
        Algo::KCenterGreedy => {
            let res = greedy_2approx(inst, p.seed)?;
            from_kcenter(inst, &res, Vec::new())
        }
        Algo::KCenterRobust => {
            let res = match p.radius {
                None => solve_robust_kcenter_seeded(inst, p.seed)?,
                Some(r) => {
                    let r = resolve(inst, r);
                    solve_robust_kcenter_at(inst, r, p.seed)?
                        .ok_or_else(|| anyhow!("greedy exceeds radius 2r at r = {r}"))?
                }
            };
            let flags = vec![kv("condition1", res.condition1), kv("condition2", res.condition2)];
            from_kcenter(inst, &res, flags)
        }
        Algo::AsymKCenter | Algo::AsymKCenterRobust => {
            let solver = if algo == Algo::AsymKCenter {
                AsymSolver::Plain
            } else {
                AsymSolver::Robust
            };
            let (res, run) = match p.radius {
                None => {
                    let s = radius_search(inst, solver)?;
                    (s.result, s.run)
                }
                Some(r) => {
                    let r = resolve(inst, r);
                    match solver {
                        AsymSolver::Plain => {
                            let run = vishwanathan_solve(inst, r);
                            (plain_result(inst, &run)?, run)
                        }
                        AsymSolver::Robust => {
                            let out = robust_asym_solve(inst, r)?;
                            (out.result, out.run)
                        }
                    }
                }
            };
            let tiles: Vec<String> = run.state.tiles.values().map(|t| t.len().to_string()).collect();
            let mut meta = vec![kv("rounds", run.rounds), kv("feasible", run.feasible)];
            if !tiles.is_empty() {
                meta.push(kv("tiles", tiles.join(",")));
            }
            from_kcenter(inst, &res, meta)
        }
    }
}
