//! Handlers for the single-instance subcommands.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, ValueEnum};

use stablecluster::gen::{
    embed_approx_stable, gen_mixed, gen_planted, random_asymmetric, random_l1, Asymmetry, GenSpec,
};
use stablecluster::io::{format_clustering, format_instance, load_instance, save_clustering, ClusteringFile};
use stablecluster::metric::{Instance, Objective};
use stablecluster::objectives::{exact_solve, kcenter_radius};
use stablecluster::stability::{
    check_hits, check_uniform_approx_condition, stability_report_with, UniformMode, Verdict,
};

use crate::bench::parse_list;
use crate::solvers::{run_algo, Algo, SolveParams};

/// Writes to `out`, or stdout when absent.
pub fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

pub fn truth_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".truth");
    PathBuf::from(s)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum GenKind {
    Planted,
    Mixed,
    Embed,
    Random,
    RandomAsym,
}

#[derive(Args, Debug)]
pub struct GenArgs {
    #[arg(long, value_enum)]
    pub kind: GenKind,
    /// Cluster count; defaults to the number of sizes.
    #[arg(long)]
    pub k: Option<usize>,
    /// Cluster sizes, comma separated.
    #[arg(long)]
    pub sizes: Option<String>,
    /// Intra-cluster radius.
    #[arg(long, default_value_t = 1.0)]
    pub r: f64,
    /// Initial separation factor.
    #[arg(long, default_value_t = 10.0)]
    pub sep: f64,
    /// Skew factor for asymmetric clusters.
    #[arg(long)]
    pub asym: Option<f64>,
    /// Points on the noise ring (mixed only).
    #[arg(long, default_value_t = 0)]
    pub noise: usize,
    #[arg(long, default_value_t = 2.0)]
    pub alpha: f64,
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub objective: Option<String>,
    #[arg(long, default_value_t = 8)]
    pub max_escalations: usize,
    /// Base instance for --kind embed.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Point count for the random kinds.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, default_value_t = 10.0)]
    pub side: f64,
    #[arg(long, default_value_t = 3)]
    pub blobs: usize,
    #[arg(long, default_value_t = 3.0)]
    pub skew: f64,
}

fn parse_objective(s: &Option<String>) -> Result<Option<Objective>> {
    s.as_deref().map(|o| o.parse().map_err(anyhow::Error::from)).transpose()
}

pub fn gen(args: &GenArgs, seed: u64, out: Option<&Path>, validate: bool) -> Result<()> {
    let random_k = || -> Result<(usize, usize)> {
        let n = args
            .n
            .ok_or_else(|| anyhow!("--n is required for --kind {:?}", args.kind))?;
        let k = args
            .k
            .ok_or_else(|| anyhow!("--k is required for --kind {:?}", args.kind))?;
        Ok((n, k))
    };
    match args.kind {
        GenKind::Planted | GenKind::Mixed => {
            let sizes = parse_list(args.sizes.as_deref().ok_or_else(|| anyhow!("--sizes is required"))?)?;
            let mut spec = GenSpec::new(seed, sizes);
            if let Some(k) = args.k {
                spec.k = k;
            }
            spec.intra_radius = args.r;
            spec.separation = args.sep;
            spec.asymmetry = args.asym.map_or(Asymmetry::None, Asymmetry::Skew);
            spec.noise = args.noise;
            spec.alpha = args.alpha;
            spec.eps = args.eps;
            spec.objective = parse_objective(&args.objective)?;
            spec.max_escalations = args.max_escalations;
            let p = if args.kind == GenKind::Planted {
                gen_planted(&spec)?
            } else {
                gen_mixed(&spec)?
            };
            let mut truth = ClusteringFile::new(p.planted.clone());
            truth.meta = vec![
                ("seed".into(), seed.to_string()),
                ("r_star".into(), p.r_star.to_string()),
                ("separation".into(), p.separation.to_string()),
                ("escalations".into(), p.escalations.to_string()),
                ("stable_clusters".into(), p.stable_clusters.to_string()),
            ];
            truth.flags = Some(p.flags.clone());
            emit(out, &format_instance(&p.instance))?;
            match out {
                Some(o) => save_clustering(truth_path(o), &truth)?,
                None => log::warn!("no --out given, ground truth not written"),
            }
        }
        GenKind::Embed => {
            let input = args
                .input
                .as_ref()
                .ok_or_else(|| anyhow!("--input is required for --kind embed"))?;
            let eps = args.eps.ok_or_else(|| anyhow!("--eps is required for --kind embed"))?;
            let base = load_instance(input, validate)?;
            let (inst, k) = embed_approx_stable(&base, args.alpha, eps)?;
            log::info!("embedded {} points, k = {k}", inst.n() - base.n());
            emit(out, &format_instance(&inst))?;
        }
        GenKind::Random => {
            let (n, k) = random_k()?;
            let objective = parse_objective(&args.objective)?.unwrap_or(Objective::KMedian);
            emit(out, &format_instance(&random_l1(seed, n, k, objective, args.side)?))?;
        }
        GenKind::RandomAsym => {
            let (n, k) = random_k()?;
            emit(
                out,
                &format_instance(&random_asymmetric(seed, n, k, args.blobs, args.skew)?),
            )?;
        }
    }
    Ok(())
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    #[arg(long)]
    pub algo: Algo,
    #[arg(short, long)]
    pub input: PathBuf,
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Swap size for local search.
    #[arg(long)]
    pub t: Option<usize>,
    /// first-k, random or farthest-first.
    #[arg(long)]
    pub init: Option<String>,
    /// Fixed radius for the k-center solvers, or `opt` for the exact optimum.
    #[arg(long)]
    pub r: Option<String>,
    #[arg(long)]
    pub max_iterations: Option<usize>,
    /// CSV of accepted swaps (local search).
    #[arg(long)]
    pub trace: Option<PathBuf>,
}

impl SolveArgs {
    fn params_text(&self) -> String {
        let mut kv = Vec::new();
        if let Some(e) = self.epsilon {
            kv.push(format!("epsilon={e}"));
        }
        if let Some(t) = self.t {
            kv.push(format!("t={t}"));
        }
        if let Some(i) = &self.init {
            kv.push(format!("init={i}"));
        }
        if let Some(r) = &self.r {
            kv.push(format!("r={r}"));
        }
        if let Some(m) = self.max_iterations {
            kv.push(format!("max-iterations={m}"));
        }
        kv.join(" ")
    }
}

pub fn solve(args: &SolveArgs, seed: u64, out: Option<&Path>, validate: bool) -> Result<()> {
    let params = SolveParams::parse(args.algo, &args.params_text(), seed)?;
    let inst = load_instance(&args.input, validate)?;
    let result = run_algo(&inst, args.algo, &params)?;
    if let Some(path) = &args.trace {
        let trace = result
            .trace
            .as_deref()
            .ok_or_else(|| anyhow!("{} records no trace", args.algo))?;
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["iteration", "cost", "swap"])?;
        for s in trace {
            let ids = |sign: char, xs: &[usize]| xs.iter().map(|x| format!("{sign}{x}")).collect::<Vec<_>>();
            let mut swap = ids('-', &s.removed);
            swap.extend(ids('+', &s.added));
            w.write_record([s.iteration.to_string(), s.new_cost.to_string(), swap.join(" ")])?;
        }
        w.flush()?;
    }
    let mut file = ClusteringFile::new(result.clustering);
    file.meta = result.meta;
    file.meta.insert(0, ("algo".into(), args.algo.to_string()));
    emit(out, &format_clustering(&file))
}

pub fn exact(input: &Path, out: Option<&Path>, validate: bool) -> Result<()> {
    let inst = load_instance(input, validate)?;
    let result = run_algo(&inst, Algo::Exact, &SolveParams::new(0))?;
    let mut file = ClusteringFile::new(result.clustering);
    file.meta = result.meta;
    emit(out, &format_clustering(&file))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Check {
    Ccv,
    CcvProximity,
    CenterSeparation,
    Ccc,
    Lpr,
    LprEps,
    Hits,
    UniformApprox,
}

#[derive(Args, Debug)]
pub struct ProbeArgs {
    #[arg(short, long)]
    pub input: PathBuf,
    #[arg(long, value_enum, value_delimiter = ',', required = true)]
    pub check: Vec<Check>,
    #[arg(long, default_value_t = 2.0)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0.0)]
    pub eps: f64,
    #[arg(long)]
    pub beta: Option<usize>,
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Candidate center set for hits and uniform-approx, comma separated.
    #[arg(long)]
    pub centers: Option<String>,
    /// Sample this many sets Y instead of enumerating all of them.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Directory for perturbed instances that refute a cluster.
    #[arg(long)]
    pub witness_dir: Option<PathBuf>,
}

fn set_checks(args: &ProbeArgs, inst: &Instance, seed: u64) -> Result<String> {
    let centers = match &args.centers {
        Some(c) => parse_list(c)?,
        None if args.check.contains(&Check::Hits) => bail!("hits needs --centers"),
        None => exact_solve(inst)?.clustering.centers().to_vec(),
    };
    if let Some(&bad) = centers.iter().find(|&&c| c >= inst.n()) {
        bail!("center {bad} out of range for n = {}", inst.n());
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["check", "centers", "result"])?;
    let list = centers.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" ");
    for check in &args.check {
        let (name, ok) = match check {
            Check::Hits => {
                let beta = args.beta.ok_or_else(|| anyhow!("hits needs --beta"))?;
                let gamma = args.gamma.ok_or_else(|| anyhow!("hits needs --gamma"))?;
                ("hits", check_hits(inst, &centers, beta, gamma, kcenter_radius(inst)))
            }
            Check::UniformApprox => {
                let mode = match args.samples {
                    Some(m) => UniformMode::Sampled { m, seed },
                    None => UniformMode::Exhaustive,
                };
                (
                    "uniform-approx",
                    check_uniform_approx_condition(inst, &centers, args.alpha, mode)?,
                )
            }
            _ => unreachable!(),
        };
        w.write_record([name, &list, &ok.to_string()])?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

fn save_witness(dir: &Path, inst: &Instance, tag: &str, cluster: usize, v: &Verdict) -> Result<()> {
    let Some(w) = v.witness() else {
        return Ok(());
    };
    let base = dir.join(format!("{tag}_cluster{cluster}"));
    fs::write(base.with_extension("instance"), format_instance(&w.spec.instance(inst)))?;
    let mut file = ClusteringFile::new(w.clustering.clone());
    file.meta = vec![
        ("alpha".into(), w.spec.alpha.to_string()),
        ("r_star".into(), w.spec.r_star.to_string()),
        ("cluster".into(), cluster.to_string()),
    ];
    save_clustering(base.with_extension("clustering"), &file)?;
    Ok(())
}

pub fn probe(args: &ProbeArgs, seed: u64, out: Option<&Path>, validate: bool) -> Result<()> {
    let inst = load_instance(&args.input, validate)?;
    let is_set_check = |c: &Check| matches!(c, Check::Hits | Check::UniformApprox);
    if args.check.iter().any(is_set_check) {
        if !args.check.iter().all(is_set_check) {
            bail!("hits and uniform-approx cannot be combined with per-cluster checks");
        }
        return emit(out, &set_checks(args, &inst, seed)?);
    }
    let has = |c: Check| args.check.contains(&c);
    if has(Check::LprEps) && !(args.eps > 0.0) {
        bail!("lpr-eps needs --eps > 0");
    }
    let report = stability_report_with(&inst, args.alpha, args.eps, has(Check::LprEps))?;
    if let Some(dir) = &args.witness_dir {
        fs::create_dir_all(dir)?;
    }

    let mut header = vec!["cluster", "size", "center"];
    let columns: [(Check, &[&str]); 6] = [
        (Check::Ccv, &["ccv_center"]),
        (Check::CcvProximity, &["ccv_proximity"]),
        (Check::CenterSeparation, &["center_separation"]),
        (Check::Ccc, &["ccc", "ccc2"]),
        (Check::Lpr, &["lpr", "slpr_refuted_by"]),
        (Check::LprEps, &["lpr_eps"]),
    ];
    for (c, names) in &columns {
        if has(*c) {
            header.extend(names.iter());
        }
    }
    header.push("degenerate");
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&header)?;
    for (i, c) in report.clusters.iter().enumerate() {
        let mut row = vec![i.to_string(), c.members.len().to_string(), c.center.to_string()];
        if has(Check::Ccv) {
            row.push(c.ccv_center.to_string());
        }
        if has(Check::CcvProximity) {
            row.push(c.ccv_proximity.to_string());
        }
        if has(Check::CenterSeparation) {
            row.push(c.center_separation.to_string());
        }
        if has(Check::Ccc) {
            row.push(
                c.ccc_witnesses
                    .iter()
                    .map(|x| x.to_string())
                    .collect::<Vec<_>>()
                    .join(" "),
            );
            row.push(
                c.ccc2_witnesses
                    .iter()
                    .map(|(a, b)| format!("{a}/{b}"))
                    .collect::<Vec<_>>()
                    .join(" "),
            );
        }
        if has(Check::Lpr) {
            row.push(c.lpr.label().to_owned());
            row.push(c.slpr_refuted.map(|j| j.to_string()).unwrap_or_default());
            if let Some(dir) = &args.witness_dir {
                save_witness(dir, &inst, "lpr", i, &c.lpr)?;
            }
        }
        if has(Check::LprEps) {
            let v = c.lpr_eps.as_ref().expect("requested above");
            row.push(v.label().to_owned());
            if let Some(dir) = &args.witness_dir {
                save_witness(dir, &inst, "lpr_eps", i, v)?;
            }
        }
        row.push(report.degenerate.to_string());
        w.write_record(&row)?;
    }
    emit(out, &String::from_utf8(w.into_inner()?)?)
}
