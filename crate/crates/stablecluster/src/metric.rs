//! Distance matrices, instances and metric completion.

use std::fmt;
use std::ops::Index;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Relative tolerance used for every approximate float comparison in the crate.
pub const REL_TOL: f64 = 1e-9;

/// `a <= b` up to [`REL_TOL`] relative slack. Infinite values compare exactly.
pub fn approx_le(a: f64, b: f64) -> bool {
    if a.is_infinite() || b.is_infinite() {
        return a <= b;
    }
    a <= b + REL_TOL * a.abs().max(b.abs())
}

pub fn approx_eq(a: f64, b: f64) -> bool {
    approx_le(a, b) && approx_le(b, a)
}

/// Dense row-major n×n matrix of distances.
#[derive(Clone, Debug, PartialEq)]
pub struct DistMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DistMatrix {
    pub fn zeros(n: usize) -> Self {
        DistMatrix {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for u in 0..n {
            for v in 0..n {
                data.push(f(u, v));
            }
        }
        DistMatrix { n, data }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::SizeMismatch(format!(
                    "row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            data.extend_from_slice(row);
        }
        Ok(DistMatrix { n, data })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, u: usize, v: usize) -> f64 {
        self.data[u * self.n + v]
    }

    #[inline]
    pub fn set(&mut self, u: usize, v: usize, value: f64) {
        self.data[u * self.n + v] = value;
    }

    #[inline]
    pub fn row(&self, u: usize) -> &[f64] {
        &self.data[u * self.n..(u + 1) * self.n]
    }

    pub fn values(&self) -> &[f64] {
        &self.data
    }

    pub fn scaled(&self, factor: f64) -> Self {
        DistMatrix {
            n: self.n,
            data: self.data.iter().map(|&x| x * factor).collect(),
        }
    }

    /// Largest finite entry (0 for an empty or all-infinite matrix).
    pub fn max_finite(&self) -> f64 {
        self.data.iter().copied().filter(|x| x.is_finite()).fold(0.0, f64::max)
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|u| (u + 1..self.n).all(|v| self.get(u, v) == self.get(v, u)))
    }

    /// Diagonal zero, entries non-negative and not NaN.
    pub fn check_entries(&self) -> Result<()> {
        for u in 0..self.n {
            for v in 0..self.n {
                let x = self.get(u, v);
                if x.is_nan() || x < 0.0 || (u == v && x != 0.0) {
                    return Err(Error::BadDistance { u, v, value: x });
                }
            }
        }
        Ok(())
    }

    /// First triple (u, v, w) in lexicographic order with d(u,w) > d(u,v) + d(v,w)
    /// beyond [`REL_TOL`].
    pub fn check_triangle(&self) -> Result<()> {
        let n = self.n;
        for u in 0..n {
            let ru = self.row(u);
            for v in 0..n {
                let uv = ru[v];
                if uv.is_infinite() {
                    continue;
                }
                let rv = self.row(v);
                for w in 0..n {
                    let via = uv + rv[w];
                    if !approx_le(ru[w], via) {
                        return Err(Error::Triangle {
                            u,
                            v,
                            w,
                            uw: ru[w],
                            via,
                        });
                    }
                }
            }
        }
        Ok(())
    }
}

impl Index<(usize, usize)> for DistMatrix {
    type Output = f64;
    fn index(&self, (u, v): (usize, usize)) -> &f64 {
        &self.data[u * self.n + v]
    }
}

/// Shortest directed path lengths using `raw` as arc lengths (Floyd-Warshall).
/// Infinite entries stand for missing arcs.
pub fn metric_completion(raw: &DistMatrix) -> DistMatrix {
    let n = raw.n;
    let mut d = raw.clone();
    for m in 0..n {
        for u in 0..n {
            let um = d.data[u * n + m];
            if um.is_infinite() {
                continue;
            }
            for v in 0..n {
                let via = um + d.data[m * n + v];
                if via < d.data[u * n + v] {
                    d.data[u * n + v] = via;
                }
            }
        }
    }
    d
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Objective {
    KMedian,
    KMeans,
    KCenter,
    AsymKCenter,
}

impl Objective {
    pub fn name(self) -> &'static str {
        match self {
            Objective::KMedian => "k-median",
            Objective::KMeans => "k-means",
            Objective::KCenter => "k-center",
            Objective::AsymKCenter => "asymmetric-k-center",
        }
    }

    pub fn is_kcenter(self) -> bool {
        matches!(self, Objective::KCenter | Objective::AsymKCenter)
    }
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Objective {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "k-median" | "kmedian" => Ok(Objective::KMedian),
            "k-means" | "kmeans" => Ok(Objective::KMeans),
            "k-center" | "kcenter" => Ok(Objective::KCenter),
            "asymmetric-k-center" | "asym-k-center" | "asym-kcenter" => Ok(Objective::AsymKCenter),
            other => Err(Error::Param(format!("unknown objective '{other}'"))),
        }
    }
}

/// A point set given by its full distance matrix, plus k and the objective.
#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    dist: DistMatrix,
    k: usize,
    symmetric: bool,
    objective: Objective,
    labels: Option<Vec<String>>,
}

impl Instance {
    /// Builds and fully validates an instance (entries, symmetry, triangle inequality).
    pub fn new(dist: DistMatrix, k: usize, symmetric: bool, objective: Objective) -> Result<Self> {
        let inst = Self::new_unchecked(dist, k, symmetric, objective)?;
        inst.validate()?;
        Ok(inst)
    }

    /// Checks only k and the objective/symmetry combination; distances are trusted.
    pub fn new_unchecked(dist: DistMatrix, k: usize, symmetric: bool, objective: Objective) -> Result<Self> {
        let n = dist.n();
        if k == 0 || k > n {
            return Err(Error::BadK { k, n });
        }
        if !symmetric && objective != Objective::AsymKCenter {
            return Err(Error::ObjectiveNeedsSymmetric(objective.name()));
        }
        Ok(Instance {
            dist,
            k,
            symmetric,
            objective,
            labels: None,
        })
    }

    pub fn validate(&self) -> Result<()> {
        self.dist.check_entries()?;
        if self.symmetric {
            let n = self.n();
            for u in 0..n {
                for v in u + 1..n {
                    if self.dist.get(u, v) != self.dist.get(v, u) {
                        return Err(Error::NotSymmetric { u, v });
                    }
                }
            }
        }
        self.dist.check_triangle()
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.dist.n()
    }

    #[inline]
    pub fn k(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn d(&self, u: usize, v: usize) -> f64 {
        self.dist.get(u, v)
    }

    pub fn dist(&self) -> &DistMatrix {
        &self.dist
    }

    pub fn symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn objective(&self) -> Objective {
        self.objective
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn with_k(mut self, k: usize) -> Result<Self> {
        if k == 0 || k > self.n() {
            return Err(Error::BadK { k, n: self.n() });
        }
        self.k = k;
        Ok(self)
    }

    pub fn with_objective(mut self, objective: Objective) -> Result<Self> {
        if !self.symmetric && objective != Objective::AsymKCenter {
            return Err(Error::ObjectiveNeedsSymmetric(objective.name()));
        }
        self.objective = objective;
        Ok(self)
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.n() {
            return Err(Error::SizeMismatch(format!(
                "{} labels for {} points",
                labels.len(),
                self.n()
            )));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    /// Same points and parameters with a replacement matrix (unchecked).
    pub fn with_dist(&self, dist: DistMatrix) -> Instance {
        assert_eq!(dist.n(), self.n());
        Instance {
            dist,
            k: self.k,
            symmetric: self.symmetric,
            objective: self.objective,
            labels: self.labels.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_hop_completion() {
        let raw = DistMatrix::from_rows(&[vec![0.0, 1.0, 5.0], vec![1.0, 0.0, 1.0], vec![5.0, 1.0, 0.0]]).unwrap();
        let d = metric_completion(&raw);
        assert_eq!(d.get(0, 2), 2.0);
        assert_eq!(d.get(2, 0), 2.0);
        assert_eq!(metric_completion(&d), d);
    }

    #[test]
    fn triangle_witness_is_first_triple() {
        let raw = DistMatrix::from_rows(&[vec![0.0, 1.0, 5.0], vec![1.0, 0.0, 1.0], vec![5.0, 1.0, 0.0]]).unwrap();
        match raw.check_triangle() {
            Err(Error::Triangle { u, v, w, .. }) => assert_eq!((u, v, w), (0, 1, 2)),
            other => panic!("expected triangle error, got {other:?}"),
        }
    }

    #[test]
    fn objective_symmetry_rule() {
        let m = DistMatrix::from_rows(&[vec![0.0, 1.0], vec![3.0, 0.0]]).unwrap();
        assert!(Instance::new(m.clone(), 1, false, Objective::KMedian).is_err());
        assert!(Instance::new(m.clone(), 1, false, Objective::AsymKCenter).is_ok());
        assert!(Instance::new(m, 1, true, Objective::KCenter).is_err());
    }

    #[test]
    fn rejects_negative_and_bad_k() {
        let m = DistMatrix::from_rows(&[vec![0.0, -1.0], vec![-1.0, 0.0]]).unwrap();
        assert!(matches!(
            Instance::new(m, 1, true, Objective::KMedian),
            Err(Error::BadDistance { .. })
        ));
        let m = DistMatrix::zeros(2);
        assert!(Instance::new(m.clone(), 0, true, Objective::KMedian).is_err());
        assert!(Instance::new(m, 3, true, Objective::KMedian).is_err());
    }

    #[test]
    fn approx_comparisons() {
        assert!(approx_le(1.0 + 1e-12, 1.0));
        assert!(!approx_le(1.0 + 1e-6, 1.0));
        assert!(!approx_le(f64::INFINITY, 5.0));
        assert!(approx_le(5.0, f64::INFINITY));
        assert!(approx_eq(3.0, 3.0 * (1.0 + 1e-12)));
    }
}
