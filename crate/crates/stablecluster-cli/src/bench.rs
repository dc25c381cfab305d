//! Solver comparison records and manifest-driven suites.

use std::fmt;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use rayon::prelude::*;

use stablecluster::closeness::closeness_assignments;
use stablecluster::gen::{gen_mixed, gen_planted, random_asymmetric, random_l1, Asymmetry, GenSpec};
use stablecluster::io::{load_clustering, load_instance};
use stablecluster::metric::{Instance, Objective};
use stablecluster::objectives::{binomial, exact_solve, kcenter_radius, Clustering, EXACT_LIMIT};

use crate::solvers::{run_algo, split_pairs, Algo, SolveParams};

pub const RECORD_HEADER: [&str; 11] = [
    "instance",
    "algorithm",
    "k",
    "cost",
    "oracle_cost",
    "ratio",
    "recovered",
    "mismatch",
    "wall_time_s",
    "seed",
    "params",
];

pub const MANIFEST_HEADER: [&str; 5] = ["kind", "input", "algo", "params", "assert"];

#[derive(Clone, Debug, PartialEq)]
pub struct BenchRecord {
    pub instance: String,
    pub algorithm: String,
    pub k: usize,
    pub cost: f64,
    pub oracle_cost: Option<f64>,
    pub ratio: Option<f64>,
    /// Ground-truth clusters found verbatim in the output.
    pub recovered: Option<usize>,
    /// Closeness mismatch against the ground truth.
    pub mismatch: Option<usize>,
    pub wall_time_s: f64,
    pub seed: u64,
    pub params: String,
}

fn opt<T: ToString>(x: Option<T>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

impl BenchRecord {
    pub fn fields(&self) -> Vec<String> {
        vec![
            self.instance.clone(),
            self.algorithm.clone(),
            self.k.to_string(),
            self.cost.to_string(),
            opt(self.oracle_cost),
            opt(self.ratio),
            opt(self.recovered),
            opt(self.mismatch),
            format!("{:.6}", self.wall_time_s),
            self.seed.to_string(),
            self.params.clone(),
        ]
    }

    fn field(&self, f: Field) -> Option<f64> {
        match f {
            Field::Cost => Some(self.cost),
            Field::OracleCost => self.oracle_cost,
            Field::Ratio => self.ratio,
            Field::Recovered => self.recovered.map(|x| x as f64),
            Field::Mismatch => self.mismatch.map(|x| x as f64),
            Field::K => Some(self.k as f64),
        }
    }
}

/// Optimal cost under the instance's objective, when affordable.
pub fn oracle_cost(inst: &Instance) -> Option<f64> {
    if inst.objective().is_kcenter() {
        return Some(kcenter_radius(inst));
    }
    if binomial(inst.n(), inst.k()) > EXACT_LIMIT {
        return None;
    }
    exact_solve(inst).ok().map(|s| s.clustering.cost())
}

/// Reference partition when no ground truth is given: the exact optimum, if it is unique.
fn oracle_truth(inst: &Instance) -> Option<Clustering> {
    if binomial(inst.n(), inst.k()) > EXACT_LIMIT {
        return None;
    }
    exact_solve(inst).ok().filter(|s| s.unique).map(|s| s.clustering)
}

pub struct Case {
    pub id: String,
    pub instance: Instance,
    pub truth: Option<Clustering>,
}

pub fn evaluate(case: &Case, algo: Algo, params: &SolveParams, params_text: &str) -> Result<BenchRecord> {
    let inst = &case.instance;
    let start = Instant::now();
    let out = run_algo(inst, algo, params).with_context(|| format!("{algo} on {}", case.id))?;
    let wall_time_s = start.elapsed().as_secs_f64();
    let cost = out.clustering.cost();
    let oracle = oracle_cost(inst);
    let ratio = oracle.map(|o| {
        if o > 0.0 {
            cost / o
        } else if cost > 0.0 {
            f64::INFINITY
        } else {
            1.0
        }
    });
    let truth = case.truth.clone().or_else(|| oracle_truth(inst));
    let (recovered, mismatch) = match &truth {
        Some(t) if t.n() == inst.n() => {
            let found = t
                .clusters()
                .iter()
                .filter(|c| out.clustering.contains_cluster(c))
                .count();
            let m = closeness_assignments(t.assign(), t.k(), out.clustering.assign(), out.clustering.k())?;
            (Some(found.min(inst.k())), Some(m.mismatch))
        }
        Some(t) => bail!("ground truth covers {} points, instance has {}", t.n(), inst.n()),
        None => (None, None),
    };
    Ok(BenchRecord {
        instance: case.id.clone(),
        algorithm: algo.name().to_owned(),
        k: inst.k(),
        cost,
        oracle_cost: oracle,
        ratio,
        recovered,
        mismatch,
        wall_time_s,
        seed: params.seed,
        params: params_text.to_owned(),
    })
}

pub fn load_case(path: &Path, truth: Option<&Path>, validate: bool) -> Result<Case> {
    let instance = load_instance(path, validate).with_context(|| format!("reading {}", path.display()))?;
    let truth = match truth {
        Some(t) => Some(
            load_clustering(t)
                .with_context(|| format!("reading {}", t.display()))?
                .clustering,
        ),
        None => None,
    };
    Ok(Case {
        id: path.display().to_string(),
        instance,
        truth,
    })
}

/// Runs each solver on one instance, in order.
pub fn run_compare(
    instance: &Path,
    truth: Option<&Path>,
    solvers: &[(Algo, String)],
    seed: u64,
    validate: bool,
) -> Result<Vec<BenchRecord>> {
    if solvers.is_empty() {
        return Ok(Vec::new());
    }
    let case = load_case(instance, truth, validate)?;
    solvers
        .iter()
        .map(|(algo, text)| {
            let params = SolveParams::parse(*algo, text, seed)?;
            evaluate(&case, *algo, &params, text)
        })
        .collect()
}

pub fn write_records<W: std::io::Write>(w: W, records: &[BenchRecord]) -> Result<()> {
    let mut csv = csv::Writer::from_writer(w);
    csv.write_record(RECORD_HEADER)?;
    for r in records {
        csv.write_record(r.fields())?;
    }
    csv.flush()?;
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Field {
    Cost,
    OracleCost,
    Ratio,
    Recovered,
    Mismatch,
    K,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Op {
    Le,
    Lt,
    Ge,
    Gt,
    Eq,
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Rhs {
    Num(f64),
    K,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Assertion {
    text: String,
    field: Field,
    op: Op,
    rhs: Rhs,
}

impl fmt::Display for Assertion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

impl Assertion {
    pub fn parse(text: &str) -> Result<Self> {
        let (pos, op, len) = [
            ("<=", Op::Le),
            (">=", Op::Ge),
            ("==", Op::Eq),
            ("<", Op::Lt),
            (">", Op::Gt),
        ]
        .iter()
        .find_map(|&(sym, op)| text.find(sym).map(|p| (p, op, sym.len())))
        .ok_or_else(|| anyhow!("assertion '{text}' has no comparison"))?;
        let field = match &text[..pos] {
            "cost" => Field::Cost,
            "oracle_cost" => Field::OracleCost,
            "ratio" => Field::Ratio,
            "recovered" => Field::Recovered,
            "mismatch" => Field::Mismatch,
            "k" => Field::K,
            other => bail!("unknown field '{other}' in '{text}'"),
        };
        let rhs = match &text[pos + len..] {
            "k" => Rhs::K,
            v => Rhs::Num(v.parse().with_context(|| format!("bad number in '{text}'"))?),
        };
        Ok(Assertion {
            text: text.to_owned(),
            field,
            op,
            rhs,
        })
    }

    pub fn holds(&self, r: &BenchRecord) -> bool {
        let Some(x) = r.field(self.field) else {
            return false;
        };
        let y = match self.rhs {
            Rhs::Num(v) => v,
            Rhs::K => r.k as f64,
        };
        match self.op {
            Op::Le => x <= y,
            Op::Lt => x < y,
            Op::Ge => x >= y,
            Op::Gt => x > y,
            Op::Eq => x == y,
        }
    }
}

#[derive(Clone, Debug)]
pub enum Source {
    File(PathBuf),
    Planted(GenSpec),
    Mixed(GenSpec),
    Random {
        seed: u64,
        n: usize,
        k: usize,
        objective: Objective,
        side: f64,
    },
    RandomAsym {
        seed: u64,
        n: usize,
        k: usize,
        blobs: usize,
        skew: f64,
    },
}

#[derive(Clone, Debug)]
pub struct Row {
    /// 1-based line in the manifest.
    pub line: usize,
    pub kind: String,
    pub input: String,
    pub source: Source,
    pub algo: Algo,
    pub params_text: String,
    pub params: SolveParams,
    pub asserts: Vec<Assertion>,
}

fn parse_gen_spec(input: &str, seed: u64) -> Result<GenSpec> {
    let mut spec = GenSpec::new(seed, Vec::new());
    let mut k = None;
    for (key, value) in split_pairs(input)? {
        let bad = || format!("bad value '{value}' for {key}");
        match key {
            "seed" => spec.seed = value.parse().with_context(bad)?,
            "k" => k = Some(value.parse().with_context(bad)?),
            "sizes" => spec.sizes = parse_list(value).with_context(bad)?,
            "r" => spec.intra_radius = value.parse().with_context(bad)?,
            "sep" => spec.separation = value.parse().with_context(bad)?,
            "asym" => spec.asymmetry = Asymmetry::Skew(value.parse().with_context(bad)?),
            "noise" => spec.noise = value.parse().with_context(bad)?,
            "alpha" => spec.alpha = value.parse().with_context(bad)?,
            "eps" => spec.eps = Some(value.parse().with_context(bad)?),
            "objective" => spec.objective = Some(value.parse()?),
            "escalations" => spec.max_escalations = value.parse().with_context(bad)?,
            _ => bail!("unknown generator key '{key}'"),
        }
    }
    spec.k = k.unwrap_or(spec.sizes.len());
    spec.validate()?;
    Ok(spec)
}

/// Sizes separated by '/', ',' or ':'.
pub fn parse_list(s: &str) -> Result<Vec<usize>> {
    s.split(['/', ',', ':'])
        .map(|t| t.trim().parse::<usize>().with_context(|| format!("bad size '{t}'")))
        .collect()
}

fn parse_random(input: &str, seed: u64, asym: bool) -> Result<Source> {
    let (mut seed, mut n, mut k) = (seed, None, None);
    let (mut objective, mut side, mut blobs, mut skew) = (Objective::KMedian, 10.0, 3, 3.0);
    for (key, value) in split_pairs(input)? {
        let bad = || format!("bad value '{value}' for {key}");
        match (key, asym) {
            ("seed", _) => seed = value.parse().with_context(bad)?,
            ("n", _) => n = Some(value.parse().with_context(bad)?),
            ("k", _) => k = Some(value.parse().with_context(bad)?),
            ("objective", false) => objective = value.parse()?,
            ("side", false) => side = value.parse().with_context(bad)?,
            ("blobs", true) => blobs = value.parse().with_context(bad)?,
            ("skew", true) => skew = value.parse().with_context(bad)?,
            _ => bail!("unknown key '{key}'"),
        }
    }
    let n = n.ok_or_else(|| anyhow!("missing n"))?;
    let k = k.ok_or_else(|| anyhow!("missing k"))?;
    if k == 0 || k > n {
        bail!("need 1 <= k <= n, got k = {k}, n = {n}");
    }
    Ok(if asym {
        Source::RandomAsym {
            seed,
            n,
            k,
            blobs,
            skew,
        }
    } else {
        Source::Random {
            seed,
            n,
            k,
            objective,
            side,
        }
    })
}

/// Parses and checks every row before anything runs; errors name the line.
pub fn parse_manifest(path: &Path, seed: u64) -> Result<Vec<Row>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let base = path.parent().unwrap_or(Path::new("."));
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    let mut header_seen = false;
    for rec in rdr.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            anyhow!("manifest line {line}: {e}")
        })?;
        let line = rec.position().map_or(0, |p| p.line()) as usize;
        if rec.iter().all(|f| f.trim().is_empty()) || rec.get(0).is_some_and(|f| f.starts_with('#')) {
            continue;
        }
        if !header_seen {
            let got: Vec<&str> = rec.iter().map(str::trim).collect();
            if got != MANIFEST_HEADER {
                bail!("manifest line {line}: header must be {}", MANIFEST_HEADER.join(","));
            }
            header_seen = true;
            continue;
        }
        rows.push(parse_row(&rec, line, base, seed).with_context(|| format!("manifest line {line}"))?);
    }
    if !header_seen {
        bail!("manifest line 1: missing header {}", MANIFEST_HEADER.join(","));
    }
    Ok(rows)
}

fn parse_row(rec: &csv::StringRecord, line: usize, base: &Path, seed: u64) -> Result<Row> {
    if rec.len() != MANIFEST_HEADER.len() {
        bail!("expected {} fields, found {}", MANIFEST_HEADER.len(), rec.len());
    }
    let kind = rec[0].trim();
    let input = rec[1].trim();
    let source = match kind {
        "file" => Source::File(base.join(input)),
        "planted" => Source::Planted(parse_gen_spec(input, seed)?),
        "mixed" => Source::Mixed(parse_gen_spec(input, seed)?),
        "random" => parse_random(input, seed, false)?,
        "random-asym" => parse_random(input, seed, true)?,
        other => bail!("unknown kind '{other}'"),
    };
    let algo: Algo = rec[2].trim().parse()?;
    let params_text = rec[3].trim().to_owned();
    let params = SolveParams::parse(algo, &params_text, seed)?;
    let asserts = rec[4]
        .split_whitespace()
        .map(Assertion::parse)
        .collect::<Result<Vec<_>>>()?;
    Ok(Row {
        line,
        kind: kind.to_owned(),
        input: input.to_owned(),
        source,
        algo,
        params_text,
        params,
        asserts,
    })
}

fn truth_beside(path: &Path) -> Option<PathBuf> {
    let mut s = path.as_os_str().to_owned();
    s.push(".truth");
    let p = PathBuf::from(s);
    p.exists().then_some(p)
}

pub fn build_case(row: &Row, validate: bool) -> Result<Case> {
    let id = format!("{}:{}", row.kind, row.input);
    let (instance, truth) = match &row.source {
        Source::File(path) => {
            let case = load_case(path, truth_beside(path).as_deref(), validate)?;
            (case.instance, case.truth)
        }
        Source::Planted(spec) => {
            let p = gen_planted(spec)?;
            (p.instance, Some(p.planted))
        }
        Source::Mixed(spec) => {
            let p = gen_mixed(spec)?;
            (p.instance, Some(p.planted))
        }
        Source::Random {
            seed,
            n,
            k,
            objective,
            side,
        } => (random_l1(*seed, *n, *k, *objective, *side)?, None),
        Source::RandomAsym {
            seed,
            n,
            k,
            blobs,
            skew,
        } => (random_asymmetric(*seed, *n, *k, *blobs, *skew)?, None),
    };
    Ok(Case { id, instance, truth })
}

pub struct SuiteRow {
    pub row: Row,
    pub record: BenchRecord,
    pub failed: Vec<String>,
}

pub struct SuiteReport {
    pub path: PathBuf,
    pub rows: usize,
    pub failed_rows: usize,
}

/// `<manifest stem>.report.csv` next to the manifest.
pub fn default_report_path(manifest: &Path) -> PathBuf {
    let stem = manifest
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    manifest.with_file_name(format!("{stem}.report.csv"))
}

/// Runs every manifest row (in parallel) and writes one CSV in manifest order.
pub fn run_suite(manifest: &Path, out: Option<&Path>, seed: u64, validate: bool) -> Result<SuiteReport> {
    let rows = parse_manifest(manifest, seed)?;
    let results: Vec<Result<SuiteRow>> = rows
        .into_par_iter()
        .map(|row| {
            let case = build_case(&row, validate).with_context(|| format!("manifest line {}", row.line))?;
            let record = evaluate(&case, row.algo, &row.params, &row.params_text)
                .with_context(|| format!("manifest line {}", row.line))?;
            let failed = row
                .asserts
                .iter()
                .filter(|a| !a.holds(&record))
                .map(|a| a.to_string())
                .collect();
            Ok(SuiteRow { row, record, failed })
        })
        .collect();
    let results: Vec<SuiteRow> = results.into_iter().collect::<Result<_>>()?;

    let path = out
        .map(Path::to_path_buf)
        .unwrap_or_else(|| default_report_path(manifest));
    let file = std::fs::File::create(&path).with_context(|| format!("creating {}", path.display()))?;
    let mut csv = csv::Writer::from_writer(file);
    let mut header = vec!["line"];
    header.extend(RECORD_HEADER);
    header.extend(["assert", "status"]);
    csv.write_record(&header)?;
    let mut failed_rows = 0;
    for r in &results {
        let mut fields = vec![r.row.line.to_string()];
        fields.extend(r.record.fields());
        let asserts: Vec<String> = r.row.asserts.iter().map(|a| a.to_string()).collect();
        fields.push(asserts.join(" "));
        if r.failed.is_empty() {
            fields.push("pass".into());
        } else {
            failed_rows += 1;
            log::warn!("manifest line {}: failed {}", r.row.line, r.failed.join(" "));
            fields.push(format!("fail: {}", r.failed.join(" ")));
        }
        csv.write_record(&fields)?;
    }
    csv.flush()?;
    Ok(SuiteReport {
        path,
        rows: results.len(),
        failed_rows,
    })
}
