//! Example and counterexample families.
//!
//! Families with long edges come back as [`LongEdgeGraph`]s; callers
//! materialize them with [`LongEdgeGraph::subdivide`] under a vertex cap.
//! Every constructor is deterministic in its parameters.

mod level_tree;
mod x_family;

use std::collections::HashMap;

pub use level_tree::LevelTree;
pub use x_family::{x_family, x_union, y_family, XFamily};

use crate::error::{Error, Result};
use crate::graph::{Graph, LongEdgeGraph};

/// Default vertex cap for explicit constructions.
pub const DEFAULT_CAP: usize = 5_000_000;

/// `k`-dimensional grid of the given side, vertex `Σ x_i · side^i`.
///
/// The torus wraps every coordinate and needs `side >= 3`.
pub fn grid(k: u32, side: usize, torus: bool, cap: usize) -> Result<Graph> {
    if k == 0 || side == 0 {
        return Err(Error::Precondition("grid needs k >= 1 and side >= 1".into()));
    }
    if torus && side < 3 {
        return Err(Error::Precondition("torus needs side >= 3".into()));
    }
    let n = (side as u128).checked_pow(k).unwrap_or(u128::MAX);
    if n > cap as u128 {
        return Err(Error::CapExceeded { what: "grid vertex count", size: n, cap: cap as u128 });
    }
    let n = n as usize;
    let mut edges = Vec::with_capacity(n * k as usize);
    for v in 0..n {
        let mut stride = 1;
        for _ in 0..k {
            let c = (v / stride) % side;
            if c + 1 < side {
                edges.push((v, v + stride));
            } else if torus {
                edges.push((v, v - c * stride));
            }
            stride *= side;
        }
    }
    Graph::from_edges(n, &edges)
}

/// Complete binary tree of the given depth in heap order; an edge whose
/// upper endpoint sits at depth `d` has length `2^⌊d/k⌋`.
pub fn ptree(k: u32, depth: u32, cap: usize) -> Result<LongEdgeGraph> {
    LevelTree::ptree(k, depth)?.to_long_edge_graph(cap)
}

/// Path `0..=n_max` with `n` pendant vertices hung on spine vertex `n`.
///
/// Pendants follow the spine in index order, grouped by their spine vertex.
pub fn star_line(n_max: usize) -> Result<Graph> {
    let pendants = n_max * (n_max + 1) / 2;
    let total = n_max + 1 + pendants;
    let mut edges: Vec<(usize, usize)> = (1..=n_max).map(|i| (i - 1, i)).collect();
    let mut next = n_max + 1;
    for v in 1..=n_max {
        for _ in 0..v {
            edges.push((v, next));
            next += 1;
        }
    }
    Graph::from_edges(total, &edges)
}

/// Points of `ℤ^n` with `|p|_1 <= radius`, in lexicographic order.
pub fn lattice_ball(n: u32, radius: u64) -> Vec<Vec<i64>> {
    fn fill(n: usize, budget: i64, prefix: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        for c in -budget..=budget {
            prefix.push(c);
            fill(n, budget - c.abs(), prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    fill(n as usize, radius as i64, &mut Vec::new(), &mut out);
    out
}

/// Lattice-ball edges `(p, p + e_i)` as index pairs plus the axis `i`.
pub(crate) fn lattice_edges(points: &[Vec<i64>]) -> Vec<(usize, usize, usize)> {
    let index: HashMap<&[i64], usize> = points.iter().enumerate().map(|(i, p)| (p.as_slice(), i)).collect();
    let mut out = Vec::new();
    let mut probe = Vec::new();
    for (i, p) in points.iter().enumerate() {
        for axis in 0..p.len() {
            probe.clone_from(p);
            probe[axis] += 1;
            if let Some(&j) = index.get(probe.as_slice()) {
                out.push((i, j, axis));
            }
        }
    }
    out
}

/// Ball of radius `radius` in `ℤ^n` with every edge of length `len`.
pub fn grid_ball(n: u32, radius: u64, len: u64, cap: usize) -> Result<LongEdgeGraph> {
    if n == 0 || len == 0 {
        return Err(Error::Precondition("grid ball needs n >= 1 and len >= 1".into()));
    }
    let points = lattice_ball(n, radius);
    let g = LongEdgeGraph::new(
        points.len(),
        &lattice_edges(&points).into_iter().map(|(a, b, _)| (a, b, len)).collect::<Vec<_>>(),
    )?;
    check_cap(&g, cap)?;
    Ok(g)
}

/// `G(n, k)`: the radius-`k` ball of `ℤ^n` with edges of length `2^k`.
pub fn rescaled_grid_ball(n: u32, k: u32, cap: usize) -> Result<LongEdgeGraph> {
    if n > 3 {
        return Err(Error::Precondition(format!("rescaled grid ball needs n <= 3, got {n}")));
    }
    if k >= 40 {
        return Err(Error::Precondition(format!("edge length 2^{k} is out of range")));
    }
    grid_ball(n, k as u64, 1 << k, cap)
}

/// Metric-space family: for `n = 1..=n_max`, the radius-`n` ball of `ℤ^n`
/// with edges of length `2^{n²}`, its center glued to position `10^{n²}` of
/// a spine starting at 0. Implicit only.
pub fn first_construction(n_max: u32) -> Result<LongEdgeGraph> {
    if !(1..=4).contains(&n_max) {
        return Err(Error::Precondition(format!("first construction needs 1 <= n_max <= 4, got {n_max}")));
    }
    let mut edges = Vec::new();
    let mut positions = vec![0u64];
    for n in 1..=n_max {
        positions.push(10u64.pow(n * n));
    }
    for j in 1..positions.len() {
        edges.push((j - 1, j, positions[j] - positions[j - 1]));
    }
    let mut next = positions.len();
    for n in 1..=n_max {
        let points = lattice_ball(n, n as u64);
        let mut ids = Vec::with_capacity(points.len());
        for p in &points {
            if p.iter().all(|&c| c == 0) {
                ids.push(n as usize);
            } else {
                ids.push(next);
                next += 1;
            }
        }
        let len = 1u64 << (n * n);
        edges.extend(lattice_edges(&points).into_iter().map(|(a, b, _)| (ids[a], ids[b], len)));
    }
    LongEdgeGraph::new(next, &edges)
}

/// Binary tree with `2n` leaves, all at distance `levels · ℓ` from the root,
/// where `levels = ⌈log₂ 2n⌉` and `ℓ = ⌈2^{n-1} / levels⌉`.
///
/// Leaves split as evenly as possible; a leaf reached after fewer than
/// `levels` branchings gets a proportionally longer final edge. Junctions
/// are numbered in preorder with the root at 0; leaves are exactly the
/// degree-one junctions.
pub fn t_tree(n: u32) -> Result<LongEdgeGraph> {
    if !(2..=40).contains(&n) {
        return Err(Error::Precondition(format!("t_tree needs 2 <= n <= 40, got {n}")));
    }
    let leaves = 2 * n as u64;
    let levels = 64 - (leaves - 1).leading_zeros() as u64;
    let unit = (1u64 << (n - 1)).div_ceil(levels);
    let mut edges = Vec::new();
    let mut next = 1usize;
    fn build(
        node: usize,
        leaves: u64,
        depth: u64,
        levels: u64,
        unit: u64,
        next: &mut usize,
        edges: &mut Vec<(usize, usize, u64)>,
    ) {
        for part in [leaves.div_ceil(2), leaves / 2] {
            let child = *next;
            *next += 1;
            if part == 1 {
                edges.push((node, child, (levels - depth) * unit));
            } else {
                edges.push((node, child, unit));
                build(child, part, depth + 1, levels, unit, next, edges);
            }
        }
    }
    build(0, leaves, 0, levels, unit, &mut next, &mut edges);
    LongEdgeGraph::new(next, &edges)
}

/// Leaves of a tree in index order.
pub fn tree_leaves(g: &LongEdgeGraph) -> Vec<usize> {
    (0..g.junction_count()).filter(|&v| g.degree(v) == 1).collect()
}

/// Graph with every edge replaced by a path of `len` unit edges.
pub fn subdivide_graph(g: &Graph, len: u64, cap: usize) -> Result<Graph> {
    let edges: Vec<_> = g.edges().map(|(u, v)| (u, v, len)).collect();
    LongEdgeGraph::new(g.vertex_count(), &edges)?.subdivide(cap)
}

fn check_cap(g: &LongEdgeGraph, cap: usize) -> Result<()> {
    if g.junction_count() > cap {
        return Err(Error::CapExceeded {
            what: "junction count",
            size: g.junction_count() as u128,
            cap: cap as u128,
        });
    }
    Ok(())
}

/// Largest junction-to-junction distance (the diameter, for trees).
pub fn junction_diameter(g: &LongEdgeGraph) -> Option<u64> {
    (0..g.junction_count())
        .map(|v| g.junction_distances(v).into_iter().try_fold(0u64, |m, d| d.map(|d| m.max(d))))
        .try_fold(0u64, |m, d| d.map(|d| m.max(d)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{ball, distances_from, BallSearch};

    #[test]
    fn grid_examples() {
        let p = grid(1, 5, false, 100).unwrap();
        assert_eq!((p.vertex_count(), p.edge_count()), (5, 4));
        let t = grid(2, 3, true, 100).unwrap();
        assert_eq!(t.vertex_count(), 9);
        assert!((0..9).all(|v| t.degree(v) == 4));
        assert!(grid(2, 2, true, 100).is_err());
        assert!(matches!(grid(3, 100, false, 1000), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn torus_balls_follow_diamond_counts() {
        let g = grid(2, 64, true, 10_000).unwrap();
        let mut bs = BallSearch::for_graph(&g);
        for r in 0..32u64 {
            let n = bs.explore(&g, 0, r).len() as u64;
            assert_eq!(n, 2 * r * r + 2 * r + 1, "r={r}");
        }
    }

    #[test]
    fn ptree_edge_lengths() {
        let t = ptree(3, 1, 100).unwrap();
        assert_eq!(t.edges(), &[(0, 1, 1), (0, 2, 1)]);
        let t = ptree(2, 4, 100).unwrap();
        // Depth-3 junctions are 7..=14 in heap order.
        for &(u, _, len) in t.edges() {
            let d = 63 - (u as u64 + 1).leading_zeros();
            assert_eq!(len, 1 << (d / 2), "edge from {u}");
        }
        assert!(t.edges().iter().any(|&(u, _, l)| (7..=14).contains(&u) && l == 2));
    }

    #[test]
    fn star_line_shape() {
        let g = star_line(2).unwrap();
        assert_eq!(g.vertex_count(), 6);
        assert_eq!(g.neighbors(1), &[0, 2, 3]);
        assert_eq!(g.neighbors(2), &[1, 4, 5]);
        let g = star_line(6).unwrap();
        for v in 1..6 {
            assert_eq!(g.degree(v), v + 2);
        }
        for v in 0..g.vertex_count() {
            let spine = ball(&g, v, 1).iter().filter(|&w| w <= 6).count();
            assert!(spine <= 3);
        }
    }

    #[test]
    fn grid_ball_examples() {
        let g = rescaled_grid_ball(1, 2, 100).unwrap();
        assert_eq!(g.junction_count(), 5);
        assert!(g.edges().iter().all(|e| e.2 == 4));
        let g = rescaled_grid_ball(2, 2, 100).unwrap();
        assert_eq!(g.junction_count(), 13);
        let unit = grid_ball(2, 2, 1, 100).unwrap();
        for v in 0..13 {
            let a = g.junction_distances(v);
            let b = unit.junction_distances(v);
            for w in 0..13 {
                assert_eq!(a[w], b[w].map(|d| 4 * d));
            }
        }
        for r in 0..6u64 {
            assert_eq!(lattice_ball(2, r).len() as u64, 2 * r * r + 2 * r + 1);
        }
        assert!(rescaled_grid_ball(4, 1, 100).is_err());
    }

    #[test]
    fn t_tree_shape() {
        let t = t_tree(2).unwrap();
        assert_eq!(tree_leaves(&t).len(), 4);
        assert_eq!(t.max_degree(), 3);
        assert_eq!(t.degree(0), 2);
        for n in 2..=10 {
            let t = t_tree(n).unwrap();
            assert_eq!(tree_leaves(&t).len(), 2 * n as usize);
            assert!(t.max_degree() <= 3);
            let root = t.junction_distances(0);
            let depths: Vec<_> = tree_leaves(&t).iter().map(|&l| root[l].unwrap()).collect();
            assert!(depths.windows(2).all(|w| w[0] == w[1]));
            let d = junction_diameter(&t).unwrap() as f64;
            let target = (1u64 << n) as f64;
            assert!((0.5..=2.0).contains(&(d / target)), "n={n} diameter {d}");
        }
    }

    #[test]
    fn first_construction_is_implicit() {
        let g = first_construction(3).unwrap();
        assert_eq!(g.junction_distances(0)[1], Some(10));
        assert!(g.subdivided_vertex_count() > 1_000_000_000);
        assert!(g.subdivide(DEFAULT_CAP).is_err());
        // Center of G_2 at position 10^4 carries the spine and four lattice edges.
        assert_eq!(g.degree(2), 6);
    }

    #[test]
    fn subdivided_grid_distances_scale() {
        let base = grid(2, 4, false, 100).unwrap();
        let sub = subdivide_graph(&base, 3, 1000).unwrap();
        let d0 = distances_from(&base, 0);
        let d1 = distances_from(&sub, 0);
        for v in 0..16 {
            assert_eq!(d1[v], 3 * d0[v]);
        }
    }
}
