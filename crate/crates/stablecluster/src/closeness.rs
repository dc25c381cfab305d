//! Closeness of two clusterings: the minimum, over cluster matchings, of the
//! number of points that change cluster.

use itertools::Itertools;
use pathfinding::prelude::{kuhn_munkres, Matrix};

use crate::error::{Error, Result};
use crate::objectives::Clustering;

/// Above this k the matching is solved by the Hungarian method instead of
/// trying every permutation.
pub const EXHAUSTIVE_MAX_K: usize = 8;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Closeness {
    /// `sigma[i]` is the cluster of the second clustering matched to cluster `i` of the first.
    pub sigma: Vec<usize>,
    /// Σ |C_i \ C'_σ(i)|
    pub mismatch: usize,
}

impl Closeness {
    pub fn is_eps_close(&self, eps: f64, n: usize) -> bool {
        self.mismatch as f64 <= eps * n as f64
    }
}

/// overlap[i][j] = |A_i ∩ B_j|
pub fn overlap_matrix(a: &[usize], b: &[usize], ka: usize, kb: usize) -> Vec<Vec<usize>> {
    let mut m = vec![vec![0usize; kb]; ka];
    for (&x, &y) in a.iter().zip(b) {
        m[x][y] += 1;
    }
    m
}

pub fn closeness(a: &Clustering, b: &Clustering, n: usize) -> Result<Closeness> {
    if a.n() != n || b.n() != n {
        return Err(Error::SizeMismatch(format!(
            "clusterings cover {} and {} points, expected {n}",
            a.n(),
            b.n()
        )));
    }
    if a.k() != b.k() {
        return Err(Error::SizeMismatch(format!(
            "clusterings have {} and {} clusters",
            a.k(),
            b.k()
        )));
    }
    let k = a.k();
    let overlap = overlap_matrix(a.assign(), b.assign(), k, k);
    let sigma = if k <= EXHAUSTIVE_MAX_K {
        best_permutation_exhaustive(&overlap)
    } else {
        best_permutation_hungarian(&overlap)
    };
    Ok(from_sigma(&overlap, sigma, n))
}

/// Closeness of two assignments with possibly different cluster counts; the
/// smaller side is padded with empty clusters.
pub fn closeness_assignments(a: &[usize], ka: usize, b: &[usize], kb: usize) -> Result<Closeness> {
    if a.len() != b.len() {
        return Err(Error::SizeMismatch(format!(
            "assignments over {} and {} points",
            a.len(),
            b.len()
        )));
    }
    let k = ka.max(kb);
    let overlap = overlap_matrix(a, b, k, k);
    let sigma = if k <= EXHAUSTIVE_MAX_K {
        best_permutation_exhaustive(&overlap)
    } else {
        best_permutation_hungarian(&overlap)
    };
    Ok(from_sigma(&overlap, sigma, a.len()))
}

fn from_sigma(overlap: &[Vec<usize>], sigma: Vec<usize>, n: usize) -> Closeness {
    let kept: usize = sigma.iter().enumerate().map(|(i, &j)| overlap[i][j]).sum();
    Closeness {
        sigma,
        mismatch: n - kept,
    }
}

/// Maximum-overlap permutation by enumeration; the first maximum in
/// lexicographic permutation order wins.
pub fn best_permutation_exhaustive(overlap: &[Vec<usize>]) -> Vec<usize> {
    let k = overlap.len();
    let mut best: Option<(usize, Vec<usize>)> = None;
    for perm in (0..k).permutations(k) {
        let score: usize = perm.iter().enumerate().map(|(i, &j)| overlap[i][j]).sum();
        if best.as_ref().is_none_or(|(s, _)| score > *s) {
            best = Some((score, perm));
        }
    }
    best.map(|(_, p)| p).unwrap_or_default()
}

pub fn best_permutation_hungarian(overlap: &[Vec<usize>]) -> Vec<usize> {
    let k = overlap.len();
    if k == 0 {
        return Vec::new();
    }
    let weights = Matrix::from_rows(
        overlap
            .iter()
            .map(|row| row.iter().map(|&x| x as i64).collect::<Vec<_>>()),
    )
    .expect("square overlap matrix");
    kuhn_munkres(&weights).1
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cl(assign: &[usize], k: usize) -> Clustering {
        let mut centers = vec![usize::MAX; k];
        for (v, &a) in assign.iter().enumerate() {
            if centers[a] == usize::MAX {
                centers[a] = v;
            }
        }
        Clustering::from_parts(centers, assign.to_vec(), 0.0)
    }

    #[test]
    fn identical_and_relabelled() {
        let a = cl(&[0, 0, 1, 1, 2, 2], 3);
        assert_eq!(closeness(&a, &a, 6).unwrap().mismatch, 0);
        let b = cl(&[1, 1, 2, 2, 0, 0], 3);
        let c = closeness(&a, &b, 6).unwrap();
        assert_eq!(c.mismatch, 0);
        assert_eq!(c.sigma, vec![1, 2, 0]);
    }

    #[test]
    fn hand_example() {
        // {0,1,2 | 3,4,5} vs {0,1,5 | 2,3,4}
        let a = cl(&[0, 0, 0, 1, 1, 1], 2);
        let b = cl(&[0, 0, 1, 1, 1, 0], 2);
        let c = closeness(&a, &b, 6).unwrap();
        assert_eq!(c.mismatch, 2);
        assert!(c.is_eps_close(1.0 / 3.0, 6));
        assert!(!c.is_eps_close(0.3, 6));
    }

    #[test]
    fn mismatched_sizes() {
        let a = cl(&[0, 0, 1], 2);
        let b = cl(&[0, 0, 0], 1);
        assert!(closeness(&a, &b, 3).is_err());
        assert!(closeness(&a, &a, 4).is_err());
        assert_eq!(closeness_assignments(&[0, 0, 1], 2, &[0, 0, 0], 1).unwrap().mismatch, 1);
    }
}
