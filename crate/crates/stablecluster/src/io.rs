//! Text formats for instances and clusterings.
//!
//! Instance file:
//!
//! ```text
//! STABLECLUSTER v1
//! mode: matrix            (or euclidean)
//! symmetric: true
//! n: 3
//! k: 1
//! dim: 2                  (euclidean only)
//! objective: k-median     (optional)
//! labels: a b c           (optional)
//! data:
//! <n rows>
//! ```
//!
//! Matrix rows hold n distances; euclidean rows hold `dim` coordinates.
//! Without an `objective:` line, symmetric files default to k-median and
//! asymmetric ones to asymmetric k-center.
//!
//! Clustering file: `cost:`, `centers:`, `assign:` lines, then optional
//! `meta: key=value ...` and `flags: 0|1 ...` lines.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::metric::{DistMatrix, Instance, Objective};
use crate::objectives::Clustering;

pub const HEADER: &str = "STABLECLUSTER v1";

fn perr(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Lines {
            inner: text.lines().enumerate(),
            last: 0,
        }
    }

    /// Next non-blank line, trimmed, with its 1-based number.
    fn next(&mut self) -> Option<(usize, &'a str)> {
        for (i, l) in self.inner.by_ref() {
            self.last = i + 1;
            let t = l.trim();
            if !t.is_empty() {
                return Some((i + 1, t));
            }
        }
        None
    }

    fn expect(&mut self, what: &str) -> Result<(usize, &'a str)> {
        self.next()
            .ok_or_else(|| perr(self.last + 1, format!("unexpected end of file, expected {what}")))
    }

    fn key(&mut self, key: &str) -> Result<(usize, &'a str)> {
        let (ln, l) = self.expect(key)?;
        let value = l
            .strip_prefix(key)
            .and_then(|r| r.strip_prefix(':'))
            .ok_or_else(|| perr(ln, format!("expected '{key}:'")))?;
        Ok((ln, value.trim()))
    }
}

fn parse_num<T: std::str::FromStr>(ln: usize, s: &str, what: &str) -> Result<T> {
    s.parse().map_err(|_| perr(ln, format!("invalid {what} '{s}'")))
}

fn parse_bool(ln: usize, s: &str) -> Result<bool> {
    match s {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(perr(ln, format!("expected true or false, got '{s}'"))),
    }
}

/// Parses an instance. With `validate`, the metric invariants are checked.
pub fn parse_instance(text: &str, validate: bool) -> Result<Instance> {
    let mut lines = Lines::new(text);
    let (ln, head) = lines.expect("header")?;
    if head != HEADER {
        return Err(perr(ln, format!("expected '{HEADER}'")));
    }
    let (ln, mode) = lines.key("mode")?;
    let euclidean = match mode {
        "matrix" => false,
        "euclidean" => true,
        _ => return Err(perr(ln, format!("unknown mode '{mode}'"))),
    };
    let (ln, sym) = lines.key("symmetric")?;
    let symmetric = parse_bool(ln, sym)?;
    if euclidean && !symmetric {
        return Err(perr(ln, "euclidean mode requires symmetric: true"));
    }
    let (ln, n) = lines.key("n")?;
    let n: usize = parse_num(ln, n, "n")?;
    let (ln, k) = lines.key("k")?;
    let k: usize = parse_num(ln, k, "k")?;
    let dim = if euclidean {
        let (ln, d) = lines.key("dim")?;
        Some(parse_num::<usize>(ln, d, "dim")?)
    } else {
        None
    };

    let mut objective = None;
    let mut labels = None;
    loop {
        let (ln, l) = lines.expect("data:")?;
        if l == "data:" {
            break;
        }
        let (key, value) = l
            .split_once(':')
            .ok_or_else(|| perr(ln, format!("unexpected line '{l}'")))?;
        match key.trim() {
            "objective" => objective = Some(value.trim().parse::<Objective>().map_err(|e| perr(ln, e.to_string()))?),
            "labels" => {
                let ls: Vec<String> = value.split_whitespace().map(str::to_owned).collect();
                if ls.len() != n {
                    return Err(perr(ln, format!("{} labels for {n} points", ls.len())));
                }
                labels = Some(ls);
            }
            other => return Err(perr(ln, format!("unknown key '{other}'"))),
        }
    }

    let width = dim.unwrap_or(n);
    let mut rows = Vec::with_capacity(n);
    for r in 0..n {
        let (ln, l) = lines.expect(&format!("data row {r}"))?;
        let row: Vec<f64> = l
            .split_whitespace()
            .map(|t| parse_num(ln, t, "number"))
            .collect::<Result<_>>()?;
        if row.len() != width {
            return Err(perr(ln, format!("row has {} values, expected {width}", row.len())));
        }
        rows.push(row);
    }
    if let Some((ln, _)) = lines.next() {
        return Err(perr(ln, format!("more than {n} data rows")));
    }

    let dist = if euclidean {
        DistMatrix::from_fn(n, |u, v| {
            rows[u]
                .iter()
                .zip(&rows[v])
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt()
        })
    } else {
        DistMatrix::from_rows(&rows)?
    };
    let objective = objective.unwrap_or(if symmetric {
        Objective::KMedian
    } else {
        Objective::AsymKCenter
    });
    let inst = if validate {
        Instance::new(dist, k, symmetric, objective)?
    } else {
        Instance::new_unchecked(dist, k, symmetric, objective)?
    };
    match labels {
        Some(l) => inst.with_labels(l),
        None => Ok(inst),
    }
}

pub fn load_instance(path: impl AsRef<Path>, validate: bool) -> Result<Instance> {
    parse_instance(&std::fs::read_to_string(path)?, validate)
}

/// Matrix-mode serialization. Floats use the shortest round-trip representation.
pub fn format_instance(inst: &Instance) -> String {
    let n = inst.n();
    let mut s = String::new();
    let _ = writeln!(s, "{HEADER}");
    let _ = writeln!(s, "mode: matrix");
    let _ = writeln!(s, "symmetric: {}", inst.symmetric());
    let _ = writeln!(s, "n: {n}");
    let _ = writeln!(s, "k: {}", inst.k());
    let _ = writeln!(s, "objective: {}", inst.objective());
    if let Some(labels) = inst.labels() {
        let _ = writeln!(s, "labels: {}", labels.join(" "));
    }
    let _ = writeln!(s, "data:");
    for u in 0..n {
        let row: Vec<String> = inst.dist().row(u).iter().map(|x| format!("{x}")).collect();
        let _ = writeln!(s, "{}", row.join(" "));
    }
    s
}

pub fn save_instance(path: impl AsRef<Path>, inst: &Instance) -> Result<()> {
    std::fs::write(path, format_instance(inst))?;
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClusteringFile {
    pub clustering: Clustering,
    pub meta: Vec<(String, String)>,
    pub flags: Option<Vec<bool>>,
}

impl ClusteringFile {
    pub fn new(clustering: Clustering) -> Self {
        ClusteringFile {
            clustering,
            meta: Vec::new(),
            flags: None,
        }
    }

    pub fn meta_value(&self, key: &str) -> Option<&str> {
        self.meta.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }
}

pub fn format_clustering(file: &ClusteringFile) -> String {
    let c = &file.clustering;
    let join = |xs: &[usize]| xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
    let mut s = String::new();
    let _ = writeln!(s, "cost: {}", c.cost());
    let _ = writeln!(s, "centers: {}", join(c.centers()));
    let _ = writeln!(s, "assign: {}", join(c.assign()));
    if !file.meta.is_empty() {
        let kv: Vec<String> = file.meta.iter().map(|(k, v)| format!("{k}={v}")).collect();
        let _ = writeln!(s, "meta: {}", kv.join(" "));
    }
    if let Some(flags) = &file.flags {
        let f: Vec<&str> = flags.iter().map(|&b| if b { "1" } else { "0" }).collect();
        let _ = writeln!(s, "flags: {}", f.join(" "));
    }
    s
}

pub fn parse_clustering(text: &str) -> Result<ClusteringFile> {
    let mut lines = Lines::new(text);
    let (ln, cost) = lines.key("cost")?;
    let cost: f64 = parse_num(ln, cost, "cost")?;
    let (ln, centers) = lines.key("centers")?;
    let centers: Vec<usize> = centers
        .split_whitespace()
        .map(|t| parse_num(ln, t, "center index"))
        .collect::<Result<_>>()?;
    let (ln, assign) = lines.key("assign")?;
    let assign: Vec<usize> = assign
        .split_whitespace()
        .map(|t| parse_num(ln, t, "assignment"))
        .collect::<Result<_>>()?;
    if let Some(&bad) = assign.iter().find(|&&a| a >= centers.len()) {
        return Err(perr(ln, format!("assignment {bad} out of range")));
    }
    let mut meta = Vec::new();
    let mut flags = None;
    while let Some((ln, l)) = lines.next() {
        if let Some(rest) = l.strip_prefix("meta:") {
            for kv in rest.split_whitespace() {
                let (k, v) = kv
                    .split_once('=')
                    .ok_or_else(|| perr(ln, format!("meta entry '{kv}' lacks '='")))?;
                meta.push((k.to_owned(), v.to_owned()));
            }
        } else if let Some(rest) = l.strip_prefix("flags:") {
            let f: Vec<bool> = rest
                .split_whitespace()
                .map(|t| match t {
                    "1" | "true" => Ok(true),
                    "0" | "false" => Ok(false),
                    _ => Err(perr(ln, format!("bad flag '{t}'"))),
                })
                .collect::<Result<_>>()?;
            flags = Some(f);
        } else {
            return Err(perr(ln, format!("unexpected line '{l}'")));
        }
    }
    Ok(ClusteringFile {
        clustering: Clustering::from_parts(centers, assign, cost),
        meta,
        flags,
    })
}

pub fn load_clustering(path: impl AsRef<Path>) -> Result<ClusteringFile> {
    parse_clustering(&std::fs::read_to_string(path)?)
}

pub fn save_clustering(path: impl AsRef<Path>, file: &ClusteringFile) -> Result<()> {
    std::fs::write(path, format_clustering(file))?;
    Ok(())
}
