//! Threshold digraph at a guessed radius and its hop neighbourhoods.

use fixedbitset::FixedBitSet;

use crate::metric::Instance;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Out,
    In,
}

/// Arc u→v iff d(u,v) ≤ r. Self-loops are always present.
#[derive(Clone, Debug)]
pub struct ThresholdDigraph {
    r: f64,
    out: Vec<FixedBitSet>,
    inn: Vec<FixedBitSet>,
}

impl ThresholdDigraph {
    pub fn new(inst: &Instance, r: f64) -> Self {
        let n = inst.n();
        let mut out = vec![FixedBitSet::with_capacity(n); n];
        let mut inn = vec![FixedBitSet::with_capacity(n); n];
        for u in 0..n {
            let row = inst.dist().row(u);
            for v in 0..n {
                if row[v] <= r || u == v {
                    out[u].insert(v);
                    inn[v].insert(u);
                }
            }
        }
        ThresholdDigraph { r, out, inn }
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn n(&self) -> usize {
        self.out.len()
    }

    /// Γ+(v)
    pub fn out(&self, v: usize) -> &FixedBitSet {
        &self.out[v]
    }

    /// Γ−(v)
    pub fn inn(&self, v: usize) -> &FixedBitSet {
        &self.inn[v]
    }

    pub fn neighbours(&self, v: usize, dir: Direction) -> &FixedBitSet {
        match dir {
            Direction::Out => &self.out[v],
            Direction::In => &self.inn[v],
        }
    }

    /// Points reachable from `v` by a path of at most `x` arcs in direction `dir`.
    pub fn gamma_hop(&self, v: usize, x: usize, dir: Direction) -> FixedBitSet {
        let mut start = FixedBitSet::with_capacity(self.n());
        start.insert(v);
        self.expand(start, x, dir)
    }

    /// Union of `gamma_hop(s, x, dir)` over the given sources.
    pub fn gamma_hop_set(&self, sources: impl IntoIterator<Item = usize>, x: usize, dir: Direction) -> FixedBitSet {
        let mut start = FixedBitSet::with_capacity(self.n());
        for s in sources {
            start.insert(s);
        }
        self.expand(start, x, dir)
    }

    fn expand(&self, start: FixedBitSet, x: usize, dir: Direction) -> FixedBitSet {
        let mut reach = start.clone();
        let mut frontier = start;
        for _ in 0..x {
            let mut next = FixedBitSet::with_capacity(self.n());
            for u in frontier.ones() {
                next.union_with(self.neighbours(u, dir));
            }
            next.difference_with(&reach);
            if next.is_clear() {
                break;
            }
            reach.union_with(&next);
            frontier = next;
        }
        reach
    }

    /// Hop distances from `src` along out-arcs; `None` when unreachable.
    pub fn hop_distances(&self, src: usize) -> Vec<Option<u32>> {
        let n = self.n();
        let mut dist = vec![None; n];
        dist[src] = Some(0);
        let mut queue = std::collections::VecDeque::from([src]);
        while let Some(u) = queue.pop_front() {
            let du = dist[u].unwrap();
            for v in self.out[u].ones() {
                if dist[v].is_none() {
                    dist[v] = Some(du + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }
}

pub fn threshold_digraph(inst: &Instance, r: f64) -> ThresholdDigraph {
    ThresholdDigraph::new(inst, r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{DistMatrix, Objective};

    fn asym(rows: &[Vec<f64>]) -> Instance {
        Instance::new(DistMatrix::from_rows(rows).unwrap(), 1, false, Objective::AsymKCenter).unwrap()
    }

    fn set(v: &[usize], n: usize) -> FixedBitSet {
        let mut s = FixedBitSet::with_capacity(n);
        for &x in v {
            s.insert(x);
        }
        s
    }

    #[test]
    fn two_point_asymmetric() {
        let inst = asym(&[vec![0.0, 1.0], vec![3.0, 0.0]]);
        let g = ThresholdDigraph::new(&inst, 1.0);
        assert_eq!(g.out(0), &set(&[0, 1], 2));
        assert_eq!(g.out(1), &set(&[1], 2));
        assert_eq!(g.inn(1), &set(&[0, 1], 2));
    }

    #[test]
    fn radius_extremes() {
        let inst = asym(&[vec![0.0, 1.0, 2.0], vec![3.0, 0.0, 1.0], vec![4.0, 1.0, 0.0]]);
        let g0 = ThresholdDigraph::new(&inst, 0.0);
        let gmax = ThresholdDigraph::new(&inst, 4.0);
        for v in 0..3 {
            assert_eq!(g0.out(v), &set(&[v], 3));
            assert_eq!(gmax.out(v).count_ones(..), 3);
        }
    }

    #[test]
    fn directed_path_hops() {
        let inst = asym(&[vec![0.0, 1.0, 2.0], vec![5.0, 0.0, 1.0], vec![5.0, 5.0, 0.0]]);
        let g = ThresholdDigraph::new(&inst, 1.0);
        assert_eq!(g.gamma_hop(0, 0, Direction::Out), set(&[0], 3));
        assert_eq!(g.gamma_hop(0, 1, Direction::Out), set(&[0, 1], 3));
        assert_eq!(g.gamma_hop(0, 2, Direction::Out), set(&[0, 1, 2], 3));
        assert_eq!(g.gamma_hop(2, 2, Direction::In), set(&[0, 1, 2], 3));
        assert_eq!(g.hop_distances(0), vec![Some(0), Some(1), Some(2)]);
        assert_eq!(g.hop_distances(2), vec![None, None, Some(0)]);
    }
}
