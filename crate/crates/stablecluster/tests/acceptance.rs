//! Acceptance suite: one PASS/FAIL line per criterion. Tolerances are pinned
//! below; the process exits non-zero when any criterion fails.

use std::time::{Duration, Instant};

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use stablecluster::closeness::closeness;
use stablecluster::gen::{
    embed_approx_stable, gen_mixed, gen_planted, gen_uncertified, random_asymmetric, random_l1, Asymmetry, GenSpec,
};
use stablecluster::kcenter_asym::{log_star, radius_search, robust_asym_solve, AsymSolver};
use stablecluster::kcenter_sym::solve_robust_kcenter;
use stablecluster::local_search::{local_search, Init, LocalSearchConfig};
use stablecluster::metric::{approx_eq, approx_le, DistMatrix, Instance, Objective, REL_TOL};
use stablecluster::objectives::{exact_solve, for_each_combination, kcenter_radius, voronoi_cost, Clustering};
use stablecluster::stability::{
    build_capped_perturbation, build_perturbation, check_hits, check_perturbation, check_uniform_approx_condition,
    far_pairs_stay_far, verify_refutation, Baseline, CapRule, Exception, ProbeMode, Prober, UniformMode, Witness,
};

const EPS_LS: f64 = 0.2;
const KMEDIAN_RATIO: f64 = 3.0 + 2.0 * EPS_LS;
const KMEANS_RATIO: f64 = 9.0 + EPS_LS;
const C1_INSTANCES: u64 = 500;
const C1_BUDGET: Duration = Duration::from_secs(60);
const C4_INSTANCES: u64 = 100;
const C5_SPECS: u64 = 200;
const C6_INSTANCES: u64 = 40;
const C6_EPS: f64 = 0.1;
const C7_CONFIGS: usize = 50;
const C8_INSTANCES: u64 = 100;
const C8_MIXED: u64 = 30;
const C9_RATIO: f64 = 27.0;
const C9_EXTRA_ROUNDS: usize = 3;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(failures: &[String], summary: String) -> Outcome {
    Outcome {
        pass: failures.is_empty(),
        detail: if failures.is_empty() {
            summary
        } else {
            format!("{summary}; {} failure(s), first: {}", failures.len(), failures[0])
        },
    }
}

/// Every refutation witness seen by any suite, re-verified by criterion 11.
#[derive(Default)]
struct Witnesses {
    items: Vec<(Instance, Vec<usize>, Witness, ProbeMode)>,
}

impl Witnesses {
    fn collect(
        &mut self,
        inst: &Instance,
        prober: &Prober,
        verdicts: &[stablecluster::stability::Verdict],
        mode: ProbeMode,
    ) {
        for v in verdicts {
            if let Some(w) = v.witness() {
                let members = prober.clusters()[w.cluster].clone();
                self.items.push((inst.clone(), members, w.clone(), mode));
            }
        }
    }
}

fn ls_corpus(seed: u64, objective: Objective) -> Instance {
    let n = 6 + (seed % 7) as usize;
    let k = 2 + (seed % 2) as usize;
    random_l1(seed, n, k, objective, 10.0).unwrap()
}

fn ls_config(seed: u64) -> LocalSearchConfig {
    let mut cfg = LocalSearchConfig::new(EPS_LS);
    cfg.seed = seed;
    cfg.init = Init::Random;
    cfg
}

fn c1_kmedian_ratio() -> Outcome {
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut worst: f64 = 0.0;
    for seed in 0..C1_INSTANCES {
        let inst = ls_corpus(seed, Objective::KMedian);
        let opt = exact_solve(&inst).unwrap().clustering.cost();
        let found = local_search(&inst, &ls_config(seed)).unwrap().clustering.cost();
        if opt > 0.0 {
            worst = worst.max(found / opt);
        }
        if !approx_le(found, KMEDIAN_RATIO * opt) {
            failures.push(format!("seed {seed}: {found} > {KMEDIAN_RATIO} * {opt}"));
        }
    }
    let elapsed = start.elapsed();
    if elapsed >= C1_BUDGET {
        failures.push(format!("runtime {elapsed:?} exceeds {C1_BUDGET:?}"));
    }
    outcome(
        &failures,
        format!("{C1_INSTANCES} instances, worst ratio {worst:.4} (bound {KMEDIAN_RATIO}), {elapsed:.2?}"),
    )
}

fn c2_kmeans_ratio() -> Outcome {
    let mut failures = Vec::new();
    let mut worst: f64 = 0.0;
    for seed in 0..C1_INSTANCES {
        let inst = ls_corpus(seed, Objective::KMeans);
        let opt = exact_solve(&inst).unwrap().clustering.cost();
        let found = local_search(&inst, &ls_config(seed)).unwrap().clustering.cost();
        if opt > 0.0 {
            worst = worst.max(found / opt);
        }
        if !approx_le(found, KMEANS_RATIO * opt) {
            failures.push(format!("seed {seed}: {found} > {KMEANS_RATIO} * {opt}"));
        }
    }
    outcome(
        &failures,
        format!("{C1_INSTANCES} instances, worst ratio {worst:.4} (bound {KMEANS_RATIO}, rel tol {REL_TOL})"),
    )
}

fn c3_uniform_approx() -> Outcome {
    let mut failures = Vec::new();
    let mut checked = 0;
    for seed in 0..C1_INSTANCES {
        let inst = ls_corpus(seed, Objective::KMedian);
        if inst.n() > 10 || inst.k() != 2 {
            continue;
        }
        let x = local_search(&inst, &ls_config(seed))
            .unwrap()
            .clustering
            .centers()
            .to_vec();
        checked += 1;
        if !check_uniform_approx_condition(&inst, &x, KMEDIAN_RATIO, UniformMode::Exhaustive).unwrap() {
            failures.push(format!("seed {seed}: centers {x:?}"));
        }
    }
    outcome(
        &failures,
        format!("{checked} local-search outputs checked exhaustively at alpha {KMEDIAN_RATIO}"),
    )
}

fn random_sizes(rng: &mut ChaCha8Rng, k: usize, lo: usize, hi: usize, cap: usize) -> Vec<usize> {
    loop {
        let sizes: Vec<usize> = (0..k).map(|_| rng.random_range(lo..=hi)).collect();
        if sizes.iter().sum::<usize>() <= cap {
            return sizes;
        }
    }
}

fn c4_lpr_containment(wit: &mut Witnesses) -> Outcome {
    let mut failures = Vec::new();
    let mut escalations = 0;
    let mut sizes_n = 0;
    for seed in 0..C4_INSTANCES {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
        let k = 2 + (seed % 3) as usize;
        let mut spec = GenSpec::new(seed, random_sizes(&mut rng, k, 3, 10, 40));
        spec.separation = 2.05 + (seed % 5) as f64 * 0.5;
        spec.alpha = 2.0;
        let p = match gen_planted(&spec) {
            Ok(p) => p,
            Err(e) => {
                failures.push(format!("seed {seed}: generator {e}"));
                continue;
            }
        };
        escalations += p.escalations;
        sizes_n = sizes_n.max(p.instance.n());
        let inst = &p.instance;
        let ex = exact_solve(inst).unwrap();
        if !approx_eq(ex.clustering.cost(), p.r_star)
            || !(0..k).all(|i| ex.clustering.contains_cluster(&p.planted.cluster(i)))
        {
            failures.push(format!("seed {seed}: planted clustering is not the oracle optimum"));
            continue;
        }
        let prober = Prober::new(inst).unwrap();
        let verdicts = prober.probe_all(2.0, ProbeMode::Exact).unwrap();
        wit.collect(inst, &prober, &verdicts, ProbeMode::Exact);
        let out = solve_robust_kcenter(inst).unwrap();
        for i in (0..k).filter(|&i| p.flags[i]) {
            if !out.clustering.contains_cluster(&p.planted.cluster(i)) {
                failures.push(format!("seed {seed}: certified cluster {i} not recovered"));
            }
        }
        if p.all_certified() {
            match closeness(&out.clustering, &p.planted, inst.n()) {
                Ok(c) if c.mismatch == 0 => {}
                Ok(c) => failures.push(format!("seed {seed}: mismatch {}", c.mismatch)),
                Err(e) => failures.push(format!("seed {seed}: {e}")),
            }
        }
    }
    outcome(
        &failures,
        format!("{C4_INSTANCES} planted instances (n <= {sizes_n}), {escalations} separation escalations"),
    )
}

fn c5_perturbation_cost() -> Outcome {
    let mut failures = Vec::new();
    let alphas = [1.0, 1.5, 2.0, 2.5, 3.0];
    for seed in 0..C5_SPECS {
        let mut rng = ChaCha8Rng::seed_from_u64(5000 + seed);
        let n = 4 + (seed % 7) as usize;
        let k = 1 + (seed % 3) as usize;
        let inst = random_l1(seed, n, k, Objective::KCenter, 10.0).unwrap();
        let r_star = exact_solve(&inst).unwrap().clustering.cost();
        let alpha = alphas[(seed % 5) as usize];
        let sources = rng.random_range(1..=3);
        let mut exceptions = Vec::new();
        for _ in 0..sources {
            let v = rng.random_range(0..n);
            let targets: Vec<usize> = (0..n)
                .filter(|&t| t != v && inst.d(v, t) <= alpha * r_star && rng.random_bool(0.6))
                .collect();
            exceptions.push(Exception {
                source: v,
                targets,
                rule: CapRule::MinCap,
            });
        }
        let spec = match build_perturbation(&inst, alpha, r_star, Baseline::Scaled, exceptions, false) {
            Ok(s) => s,
            Err(e) => {
                failures.push(format!("seed {seed}: {e}"));
                continue;
            }
        };
        if let Err(e) = check_perturbation(&inst, alpha, &spec.completed) {
            failures.push(format!("seed {seed}: {e}"));
        }
        if let Err(e) = spec.completed.check_triangle() {
            failures.push(format!("seed {seed}: {e}"));
        }
        if !far_pairs_stay_far(&inst, &spec) {
            failures.push(format!("seed {seed}: a far pair came closer than alpha r*"));
        }
        let cost = exact_solve(&spec.instance(&inst)).unwrap().clustering.cost();
        if !approx_eq(cost, alpha * r_star) {
            failures.push(format!("seed {seed}: exact cost {cost} != {alpha} * {r_star}"));
        }
    }
    outcome(&failures, format!("{C5_SPECS} perturbations, rel tol {REL_TOL}"))
}

fn c6_separation(wit: &mut Witnesses) -> Outcome {
    let mut failures = Vec::new();
    let mut qualifying = 0;
    let mut escalations = 0;
    let mut min_gap = f64::INFINITY;
    for seed in 0..C6_INSTANCES {
        let k = 3 + (seed % 2) as usize;
        let (lo, cap) = if k == 3 { (7, 30) } else { (9, 40) };
        let mut rng = ChaCha8Rng::seed_from_u64(6000 + seed);
        let mut spec = GenSpec::new(6000 + seed, random_sizes(&mut rng, k, lo, 10, cap));
        spec.separation = 2.1 + (seed % 4) as f64 * 0.3;
        spec.alpha = 3.0;
        spec.eps = Some(C6_EPS);
        let p = match gen_planted(&spec) {
            Ok(p) => p,
            Err(e) => {
                failures.push(format!("seed {seed}: generator {e}"));
                continue;
            }
        };
        escalations += p.escalations;
        let inst = &p.instance;
        let prober = Prober::new(inst).unwrap();
        let verdicts = prober.probe_all(3.0, ProbeMode::Eps(C6_EPS)).unwrap();
        wit.collect(inst, &prober, &verdicts, ProbeMode::Eps(C6_EPS));
        let certified: Vec<usize> = (0..k).filter(|&i| p.flags[i]).collect();
        let n = inst.n() as f64;
        if certified.len() < 3 || (0..k).any(|i| p.planted.cluster(i).len() as f64 <= 2.0 * C6_EPS * n) {
            continue;
        }
        qualifying += 1;
        let a = p.planted.assign();
        for u in 0..inst.n() {
            for v in 0..inst.n() {
                if a[u] != a[v] && p.flags[a[u]] && p.flags[a[v]] {
                    let d = inst.d(u, v);
                    min_gap = min_gap.min(d / p.r_star);
                    if !(d > p.r_star) {
                        failures.push(format!("seed {seed}: d({u},{v}) = {d} <= r* = {}", p.r_star));
                    }
                }
            }
        }
    }
    if qualifying == 0 {
        failures.push("no qualifying instance".into());
    }
    outcome(
        &failures,
        format!(
            "{qualifying} instances with >= 3 certified (3,{C6_EPS}) clusters, {escalations} escalations, min cross distance {min_gap:.3} r*"
        ),
    )
}

fn c7_hit_lemma() -> Outcome {
    let mut failures = Vec::new();
    let mut found = 0;
    let mut seed = 0u64;
    while found < C7_CONFIGS && seed < 200_000 {
        seed += 1;
        let mut rng = ChaCha8Rng::seed_from_u64(7000 + seed);
        let k = 1 + (seed % 3) as usize;
        let n = rng.random_range(k + 2..=10);
        let inst = random_l1(7000 + seed, n, k, Objective::KCenter, 3.0).unwrap();
        let r_star = exact_solve(&inst).unwrap().clustering.cost();
        if r_star == 0.0 {
            continue;
        }
        let mut c = sample(&mut rng, n, k + 2).into_vec();
        c.sort_unstable();
        if !check_hits(&inst, &c, 3, 3.0, r_star) {
            continue;
        }
        found += 1;
        let exceptions: Vec<Exception> = c
            .iter()
            .map(|&s| Exception {
                source: s,
                targets: (0..n).filter(|&t| approx_le(inst.d(s, t), 3.0 * r_star)).collect(),
                rule: CapRule::MinCap,
            })
            .collect();
        let spec = match build_capped_perturbation(&inst, 3.0, exceptions) {
            Ok(s) => s,
            Err(e) => {
                failures.push(format!("seed {seed}: {e}"));
                continue;
            }
        };
        let pinst = spec.instance(&inst);
        let opt = exact_solve(&pinst).unwrap().clustering.cost();
        if !approx_eq(opt, 3.0 * r_star) {
            failures.push(format!("seed {seed}: perturbed optimum {opt} != 3 r*"));
        }
        let mut bad = 0;
        for_each_combination(k + 2, k, |pos| {
            let subset: Vec<usize> = pos.iter().map(|&p| c[p]).collect();
            if !approx_eq(voronoi_cost(&pinst, &subset), 3.0 * r_star) {
                bad += 1;
            }
        });
        if bad > 0 {
            failures.push(format!("seed {seed}: {bad} size-k subsets of C are not optimal"));
        }
    }
    if found < C7_CONFIGS {
        failures.push(format!("only {found} hitting configurations found"));
    }
    outcome(
        &failures,
        format!("{found} (3,3)-hitting configurations, all C(k+2,k) subsets enumerated"),
    )
}

/// Output clusters meeting each certified cluster: exactly one, holding all of
/// it and no other certified point.
fn isolated_recovery(out: &Clustering, truth: &Clustering, flags: &[bool]) -> Result<(), String> {
    let a = out.assign();
    for i in (0..truth.k()).filter(|&i| flags[i]) {
        let members = truth.cluster(i);
        let host = a[members[0]];
        if members.iter().any(|&v| a[v] != host) {
            return Err(format!("certified cluster {i} split across output clusters"));
        }
        let intruder = (0..a.len()).find(|&v| a[v] == host && truth.assign()[v] != i && flags[truth.assign()[v]]);
        if let Some(v) = intruder {
            return Err(format!("output cluster of {i} also holds certified point {v}"));
        }
    }
    Ok(())
}

fn c8_asym_recovery(wit: &mut Witnesses) -> Outcome {
    let mut failures = Vec::new();
    let mut escalations = 0;
    for seed in 0..C8_INSTANCES {
        let mut rng = ChaCha8Rng::seed_from_u64(8000 + seed);
        let k = 2 + (seed % 3) as usize;
        let mut spec = GenSpec::new(8000 + seed, random_sizes(&mut rng, k, 3, 8, 30));
        spec.asymmetry = Asymmetry::Skew(3.0);
        spec.separation = 2.05 + (seed % 4) as f64;
        let p = match gen_planted(&spec) {
            Ok(p) => p,
            Err(e) => {
                failures.push(format!("seed {seed}: generator {e}"));
                continue;
            }
        };
        escalations += p.escalations;
        let inst = &p.instance;
        let prober = Prober::new(inst).unwrap();
        let verdicts = prober.probe_all(2.0, ProbeMode::Exact).unwrap();
        wit.collect(inst, &prober, &verdicts, ProbeMode::Exact);
        let out = robust_asym_solve(inst, p.r_star).unwrap().result.clustering;
        let exact = out.k() == k && (0..k).all(|i| out.contains_cluster(&p.planted.cluster(i)));
        if !exact {
            failures.push(format!(
                "seed {seed}: output {:?} differs from planted",
                out.canonical_labels()
            ));
        }
    }
    let mut certified_mixed = 0;
    for seed in 0..C8_MIXED {
        let mut rng = ChaCha8Rng::seed_from_u64(8500 + seed);
        let k = 2 + (seed % 2) as usize;
        let mut spec = GenSpec::new(8500 + seed, random_sizes(&mut rng, k, 3, 7, 24));
        spec.asymmetry = Asymmetry::Skew(3.0);
        // ring sizes off a multiple of 3 leave a spare center under capped perturbations
        spec.noise = 3 * (1 + (seed % 2) as usize);
        spec.separation = 3.0;
        let p = match gen_mixed(&spec) {
            Ok(p) => p,
            Err(e) => {
                failures.push(format!("mixed seed {seed}: generator {e}"));
                continue;
            }
        };
        certified_mixed += p.flags.iter().filter(|&&f| f).count();
        let out = robust_asym_solve(&p.instance, p.r_star).unwrap().result.clustering;
        if let Err(e) = isolated_recovery(&out, &p.planted, &p.flags) {
            failures.push(format!("mixed seed {seed}: {e}"));
        }
    }
    outcome(
        &failures,
        format!(
            "{C8_INSTANCES} planted asymmetric ({escalations} escalations), {C8_MIXED} mixed with {certified_mixed} certified clusters"
        ),
    )
}

fn c9_asym_sanity() -> Outcome {
    let mut failures = Vec::new();
    let mut worst: f64 = 0.0;
    let mut max_rounds = 0;
    let mut count = 0;
    for (idx, &n) in [40usize, 80, 150, 300, 500].iter().enumerate() {
        for k in 2..=4usize {
            for rep in 0..2u64 {
                let seed = 9000 + (idx as u64) * 100 + (k as u64) * 10 + rep;
                let inst = random_asymmetric(seed, n, k, k + 1 + rep as usize, 3.0).unwrap();
                let r_star = kcenter_radius(&inst);
                count += 1;
                for solver in [AsymSolver::Plain, AsymSolver::Robust] {
                    let s = radius_search(&inst, solver).unwrap();
                    let res = &s.result;
                    let ratio = if r_star > 0.0 { res.radius / r_star } else { 0.0 };
                    worst = worst.max(ratio);
                    max_rounds = max_rounds.max(s.run.rounds);
                    let tag = format!("n {n} k {k} rep {rep} {solver:?}");
                    if res.clustering.k() > k {
                        failures.push(format!("{tag}: {} centers", res.clustering.k()));
                    }
                    if !approx_le(res.radius, C9_RATIO * r_star) {
                        failures.push(format!("{tag}: radius {} > {C9_RATIO} r* = {}", res.radius, r_star));
                    }
                    if s.run.rounds > log_star(n) + C9_EXTRA_ROUNDS {
                        failures.push(format!("{tag}: {} phase-II rounds", s.run.rounds));
                    }
                }
            }
        }
    }
    outcome(
        &failures,
        format!(
            "{count} instances up to n = 500, worst ratio {worst:.3} (empirical audit bound {C9_RATIO}, not a theorem), max rounds {max_rounds}"
        ),
    )
}

fn c10_embedding() -> Outcome {
    let mut failures = Vec::new();
    let mut count = 0;
    for n in 3..=6usize {
        for k in 1..n {
            for (ai, &alpha) in [1.5, 2.0, 3.0].iter().enumerate() {
                for &eps in &[0.5, 1.0] {
                    let seed = (n * 100 + k * 10 + ai) as u64;
                    let inst = random_l1(seed, n, k, Objective::KMedian, 8.0).unwrap();
                    let opt = exact_solve(&inst).unwrap().clustering.cost();
                    let (big, kp) = embed_approx_stable(&inst, alpha, eps).unwrap();
                    count += 1;
                    let tag = format!("n {n} k {k} alpha {alpha} eps {eps}");
                    let big_opt = exact_solve(&big).unwrap().clustering.cost();
                    if !approx_eq(big_opt, opt) {
                        failures.push(format!("{tag}: optimum {big_opt} != {opt}"));
                    }
                    let mut bad = 0;
                    for_each_combination(big.n(), kp, |centers| {
                        if approx_le(voronoi_cost(&big, centers), alpha * opt)
                            && !(n..big.n()).all(|p| centers.contains(&p))
                        {
                            bad += 1;
                        }
                    });
                    if bad > 0 {
                        failures.push(format!("{tag}: {bad} approximate solutions miss an added point"));
                    }
                }
            }
        }
    }
    outcome(
        &failures,
        format!("{count} embeddings, approximate solutions enumerated"),
    )
}

fn c11_soundness(wit: &mut Witnesses) -> Outcome {
    for seed in 0..60u64 {
        let n = 5 + (seed % 6) as usize;
        let k = 2 + (seed % 2) as usize;
        let inst = random_l1(11_000 + seed, n, k, Objective::KCenter, 10.0).unwrap();
        let prober = Prober::new(&inst).unwrap();
        for alpha in [1.5, 2.0, 3.0] {
            let v = prober.probe_all(alpha, ProbeMode::Exact).unwrap();
            wit.collect(&inst, &prober, &v, ProbeMode::Exact);
        }
        let v = prober.probe_all(3.0, ProbeMode::Eps(0.15)).unwrap();
        wit.collect(&inst, &prober, &v, ProbeMode::Eps(0.15));
    }
    for seed in 0..20u64 {
        let mut spec = GenSpec::new(11_500 + seed, vec![3, 4, 3]);
        spec.separation = 2.01;
        if seed % 2 == 1 {
            spec.asymmetry = Asymmetry::Skew(3.0);
        }
        let (inst, _) = gen_uncertified(&spec).unwrap();
        let prober = Prober::new(&inst).unwrap();
        let v = prober.probe_all(2.0, ProbeMode::Exact).unwrap();
        wit.collect(&inst, &prober, &v, ProbeMode::Exact);
    }
    for seed in 0..20u64 {
        let d = random_asymmetric(11_800 + seed, 8, 2, 2, 3.0).unwrap();
        let inst = Instance::new(DistMatrix::clone(d.dist()), 2, false, Objective::AsymKCenter).unwrap();
        let prober = Prober::new(&inst).unwrap();
        let v = prober.probe_all(2.0, ProbeMode::Exact).unwrap();
        wit.collect(&inst, &prober, &v, ProbeMode::Exact);
    }
    let mut failures = Vec::new();
    for (idx, (inst, members, w, mode)) in wit.items.iter().enumerate() {
        match verify_refutation(inst, members, w, *mode) {
            Ok(true) => {}
            Ok(false) => failures.push(format!("witness {idx} for cluster {} does not re-verify", w.cluster)),
            Err(e) => failures.push(format!("witness {idx}: {e}")),
        }
    }
    if wit.items.is_empty() {
        failures.push("no witnesses were produced".into());
    }
    outcome(
        &failures,
        format!("{} witnesses re-verified with the general oracle", wit.items.len()),
    )
}

fn main() {
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let wanted = |name: &str| filter.is_empty() || filter.iter().any(|f| name.contains(f.as_str()));
    let mut wit = Witnesses::default();
    let mut any_fail = false;
    let mut run = |name: &str, f: &mut dyn FnMut(&mut Witnesses) -> Outcome| {
        if !wanted(name) {
            return;
        }
        let start = Instant::now();
        let o = f(&mut wit);
        any_fail |= !o.pass;
        println!(
            "{} {name}: {} [{:.2?}]",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail,
            start.elapsed()
        );
    };
    run("c01_local_search_kmedian_ratio", &mut |_| c1_kmedian_ratio());
    run("c02_local_search_kmeans_ratio", &mut |_| c2_kmeans_ratio());
    run("c03_uniform_approximation", &mut |_| c3_uniform_approx());
    run("c04_lpr_containment", &mut |w| c4_lpr_containment(w));
    run("c05_capped_perturbation_cost", &mut |_| c5_perturbation_cost());
    run("c06_certified_cluster_separation", &mut |w| c6_separation(w));
    run("c07_hitting_set_subsets", &mut |_| c7_hit_lemma());
    run("c08_asymmetric_recovery", &mut |w| c8_asym_recovery(w));
    run("c09_asymmetric_sanity", &mut |_| c9_asym_sanity());
    run("c10_approx_stability_embedding", &mut |_| c10_embedding());
    run("c11_probe_soundness", &mut |w| c11_soundness(w));
    if any_fail {
        std::process::exit(1);
    }
}
