use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::LongEdgeGraph;
use crate::growth::{GrowthEntry, GrowthProfile, ProfileMode};

/// Rooted tree in which every junction at depth `ℓ` has `branching[ℓ]`
/// children, each joined by an edge of length `lengths[ℓ]`.
///
/// Such trees are symmetric under their automorphism group, so a ball's
/// size depends only on the depth of its center (or, for interior points,
/// the depth of the edge and the offset along it). That makes exact growth
/// computable at depths far beyond anything that could be materialized.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelTree {
    branching: Vec<u64>,
    lengths: Vec<u64>,
}

impl LevelTree {
    pub fn new(branching: Vec<u64>, lengths: Vec<u64>) -> Result<Self> {
        if branching.len() != lengths.len() {
            return Err(Error::Precondition("branching and lengths differ in depth".into()));
        }
        if branching.contains(&0) || lengths.contains(&0) {
            return Err(Error::Precondition("branching and lengths must be >= 1".into()));
        }
        Ok(Self { branching, lengths })
    }

    /// Binary tree with lengths `2^⌊ℓ/k⌋`.
    pub fn ptree(k: u32, depth: u32) -> Result<Self> {
        if k == 0 {
            return Err(Error::Precondition("ptree needs k >= 1".into()));
        }
        if depth / k >= 48 {
            return Err(Error::Precondition(format!("depth {depth} too large for k = {k}")));
        }
        Self::new(vec![2; depth as usize], (0..depth).map(|l| 1u64 << (l / k)).collect())
    }

    pub fn depth(&self) -> usize {
        self.lengths.len()
    }

    pub fn junction_count(&self) -> u128 {
        let mut level = 1u128;
        let mut total = 1u128;
        for &c in &self.branching {
            level = level.saturating_mul(c as u128);
            total = total.saturating_add(level);
        }
        total
    }

    pub fn vertex_count(&self) -> u128 {
        let mut level = 1u128;
        let mut total = 1u128;
        for (&c, &len) in self.branching.iter().zip(&self.lengths) {
            level = level.saturating_mul(c as u128);
            total = total.saturating_add(level.saturating_mul(len as u128));
        }
        total
    }

    /// Junctions numbered level by level (heap order for binary trees).
    pub fn to_long_edge_graph(&self, cap: usize) -> Result<LongEdgeGraph> {
        let count = self.junction_count();
        if count > cap as u128 {
            return Err(Error::CapExceeded { what: "tree junction count", size: count, cap: cap as u128 });
        }
        let mut edges = Vec::with_capacity(count as usize);
        let mut level_start = 0usize;
        let mut level_size = 1usize;
        for (&c, &len) in self.branching.iter().zip(&self.lengths) {
            let next_start = level_start + level_size;
            for i in 0..level_size {
                for j in 0..c as usize {
                    edges.push((level_start + i, next_start + i * c as usize + j, len));
                }
            }
            level_start = next_start;
            level_size *= c as usize;
        }
        LongEdgeGraph::new(count as usize, &edges)
    }

    /// Vertices within `rho` of a depth-`l` junction inside its own subtree.
    fn down(&self, l: usize, rho: u64) -> u64 {
        if l == self.depth() {
            return 1;
        }
        1u64.saturating_add(self.branching[l].saturating_mul(self.branch(l, rho)))
    }

    /// Vertices within `rho` of a depth-`l` junction along one child edge
    /// and below it.
    fn branch(&self, l: usize, rho: u64) -> u64 {
        let len = self.lengths[l];
        let mut count = (len - 1).min(rho);
        if rho >= len {
            count = count.saturating_add(self.down(l + 1, rho - len));
        }
        count
    }

    /// Vertices within `rho` of a depth-`l` junction reached through its
    /// parent edge.
    fn up(&self, l: usize, rho: u64) -> u64 {
        if l == 0 {
            return 0;
        }
        let len = self.lengths[l - 1];
        let mut count = (len - 1).min(rho);
        if rho >= len {
            let rest = rho - len;
            let siblings = (self.branching[l - 1] - 1).saturating_mul(self.branch(l - 1, rest));
            count = count
                .saturating_add(1)
                .saturating_add(siblings)
                .saturating_add(self.up(l - 1, rest));
        }
        count
    }

    /// `|B(r)|` around a depth-`l` junction.
    pub fn junction_ball(&self, l: usize, r: u64) -> u64 {
        self.down(l, r).saturating_add(self.up(l, r))
    }

    /// `|B(r)|` around the interior point at distance `i` below a depth-`l`
    /// junction on one of its child edges, `0 < i < lengths[l]`.
    pub fn edge_ball(&self, l: usize, i: u64, r: u64) -> u64 {
        let len = self.lengths[l];
        debug_assert!(0 < i && i < len);
        let mut count = 1 + (i - 1).min(r) + (len - i - 1).min(r);
        if r >= len - i {
            count = count.saturating_add(self.down(l + 1, r - (len - i)));
        }
        if r >= i {
            let rest = r - i;
            let siblings = (self.branching[l] - 1).saturating_mul(self.branch(l, rest));
            count = count
                .saturating_add(1)
                .saturating_add(siblings)
                .saturating_add(self.up(l, rest));
        }
        count
    }

    /// `max_v |B_v(r)|` over every vertex of the subdivided tree.
    pub fn gamma(&self, r: u64) -> u64 {
        (0..=self.depth())
            .into_par_iter()
            .map(|l| {
                let mut best = self.junction_ball(l, r);
                if l < self.depth() {
                    let len = self.lengths[l];
                    // Offsets farther than r from both ends see a bare path.
                    if len > 2 * r + 1 {
                        best = best.max(2 * r + 1);
                    }
                    let near_top = 1..=(r + 1).min(len - 1);
                    let near_bottom = (len - 1).saturating_sub(r).max(1)..=len - 1;
                    for i in near_top.chain(near_bottom) {
                        if i < len {
                            best = best.max(self.edge_ball(l, i, r));
                        }
                    }
                }
                best
            })
            .max()
            .unwrap_or(1)
    }

    /// Exact growth profile of the subdivided tree.
    pub fn growth(&self, radii: &[u64]) -> GrowthProfile {
        GrowthProfile {
            entries: radii.iter().map(|&r| GrowthEntry { radius: r, gamma: self.gamma(r) }).collect(),
            mode: ProfileMode::Exact,
            subset: "all".into(),
            saturates_at: None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::VertexSet;
    use crate::growth::{growth_function, Centers};

    fn explicit_profile(t: &LevelTree, radii: &[u64]) -> Vec<u64> {
        let g = t.to_long_edge_graph(1 << 20).unwrap().subdivide(1 << 20).unwrap();
        let all = VertexSet::all(g.vertex_count());
        growth_function(&g, &all, radii, &Centers::All)
            .unwrap()
            .entries
            .iter()
            .map(|e| e.gamma)
            .collect()
    }

    #[test]
    fn matches_explicit_ptree() {
        let t = LevelTree::ptree(2, 8).unwrap();
        let radii: Vec<u64> = (0..40).collect();
        let implicit: Vec<u64> = radii.iter().map(|&r| t.gamma(r)).collect();
        assert_eq!(implicit, explicit_profile(&t, &radii));
        assert_eq!(t.vertex_count(), 1 + 2 + 4 + 16 + 32 + 128 + 256 + 1024 + 2048);
    }

    #[test]
    fn matches_explicit_irregular_tree() {
        let t = LevelTree::new(vec![3, 1, 2, 4], vec![2, 5, 1, 3]).unwrap();
        let radii: Vec<u64> = (0..25).collect();
        let implicit: Vec<u64> = radii.iter().map(|&r| t.gamma(r)).collect();
        assert_eq!(implicit, explicit_profile(&t, &radii));
    }

    #[test]
    fn junction_balls_match_long_edge_counts() {
        let t = LevelTree::ptree(3, 7).unwrap();
        let g = t.to_long_edge_graph(1000).unwrap();
        for (l, v) in [(0usize, 0usize), (2, 3), (5, 40), (7, 200)] {
            for r in [0, 1, 3, 9, 20] {
                assert_eq!(t.junction_ball(l, r), g.ball_size(v, r), "l={l} r={r}");
            }
        }
    }
}
