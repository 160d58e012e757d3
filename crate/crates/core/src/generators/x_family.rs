use super::{lattice_ball, lattice_edges, t_tree, tree_leaves};
use crate::error::{Error, Result};
use crate::graph::LongEdgeGraph;

/// `Y_n` and `X_n` for one `n`, with the maps between their junctions.
///
/// `Y_n` is a spine with junctions at positions `0`, `10^k` for
/// `k = 1..=k_max`, and `2·10^{k_max}`; the center of `G(n, k)` is glued to
/// the junction at `10^k`. `X_n` replaces every junction of lattice degree
/// `2n > 2` (including the glued centers) by a copy of `t_tree(n)`: incident
/// lattice edges, sorted as `+e_1, -e_1, +e_2, ..`, attach to the leaves in
/// index order, and spine edges attach to the tree root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct XFamily {
    pub n: u32,
    pub k_max: u32,
    pub y: LongEdgeGraph,
    pub x: LongEdgeGraph,
    /// Spine junction of `Y_n` glued to the center of `G(n, k)`, for
    /// `k = 1..=k_max`.
    pub attachments: Vec<usize>,
    /// Lattice ball and point per `Y_n` junction (`None` for pure spine).
    pub lattice: Vec<Option<(u32, Vec<i64>)>>,
    /// `X_n` junction of each `Y_n` junction (tree roots for replaced ones).
    pub y_to_x: Vec<usize>,
    /// `Y_n` junction each `X_n` junction collapses to.
    pub collapse: Vec<usize>,
    /// Diameter of the replacement tree (0 when nothing is replaced).
    pub tree_diameter: u64,
}

#[derive(Clone, Copy)]
enum Side {
    /// Lattice edge leaving the junction along `axis` in direction `sign`.
    Lattice { axis: usize, positive: bool },
    Spine,
}

impl XFamily {
    pub fn build(n: u32, k_max: u32) -> Result<Self> {
        if !(1..=3).contains(&n) || !(1..=6).contains(&k_max) {
            return Err(Error::Precondition(format!(
                "x_family needs 1 <= n <= 3 and 1 <= k_max <= 6, got n = {n}, k_max = {k_max}"
            )));
        }
        // Y_n: spine junctions 0..=k_max+1, then lattice points.
        let mut positions = vec![0u64];
        positions.extend((1..=k_max).map(|k| 10u64.pow(k)));
        positions.push(2 * 10u64.pow(k_max));
        let mut lattice: Vec<Option<(u32, Vec<i64>)>> = vec![None; positions.len()];
        let mut edges: Vec<(usize, usize, u64, Side, Side)> = Vec::new();
        for j in 1..positions.len() {
            edges.push((j - 1, j, positions[j] - positions[j - 1], Side::Spine, Side::Spine));
        }
        for k in 1..=k_max {
            let points = lattice_ball(n, k as u64);
            let mut ids = Vec::with_capacity(points.len());
            for p in &points {
                if p.iter().all(|&c| c == 0) {
                    ids.push(k as usize);
                    lattice[k as usize] = Some((k, p.clone()));
                } else {
                    ids.push(lattice.len());
                    lattice.push(Some((k, p.clone())));
                }
            }
            for (a, b, axis) in lattice_edges(&points) {
                edges.push((
                    ids[a],
                    ids[b],
                    1u64 << k,
                    Side::Lattice { axis, positive: true },
                    Side::Lattice { axis, positive: false },
                ));
            }
        }
        let y_count = lattice.len();
        let y = LongEdgeGraph::new(y_count, &edges.iter().map(|e| (e.0, e.1, e.2)).collect::<Vec<_>>())?;

        let replaced: Vec<bool> = lattice
            .iter()
            .map(|l| n > 1 && l.as_ref().is_some_and(|(k, p)| p.iter().map(|c| c.unsigned_abs()).sum::<u64>() < *k as u64))
            .collect();
        let tree = if n > 1 { Some(t_tree(n)?) } else { None };
        let leaves = tree.as_ref().map(tree_leaves).unwrap_or_default();
        let tree_size = tree.as_ref().map_or(0, |t| t.junction_count());

        let mut y_to_x = vec![0usize; y_count];
        let mut collapse = Vec::new();
        for v in (0..y_count).filter(|&v| !replaced[v]) {
            y_to_x[v] = collapse.len();
            collapse.push(v);
        }
        let mut tree_base = vec![usize::MAX; y_count];
        for v in (0..y_count).filter(|&v| replaced[v]) {
            tree_base[v] = collapse.len();
            y_to_x[v] = collapse.len();
            collapse.extend(std::iter::repeat_n(v, tree_size));
        }
        let endpoint = |v: usize, side: Side| -> usize {
            if !replaced[v] {
                return y_to_x[v];
            }
            match side {
                Side::Spine => tree_base[v],
                Side::Lattice { axis, positive } => tree_base[v] + leaves[2 * axis + usize::from(!positive)],
            }
        };
        let mut x_edges: Vec<(usize, usize, u64)> =
            edges.iter().map(|&(a, b, len, sa, sb)| (endpoint(a, sa), endpoint(b, sb), len)).collect();
        if let Some(t) = &tree {
            for v in (0..y_count).filter(|&v| replaced[v]) {
                x_edges.extend(t.edges().iter().map(|&(a, b, len)| (tree_base[v] + a, tree_base[v] + b, len)));
            }
        }
        let x = LongEdgeGraph::new(collapse.len(), &x_edges)?;
        let tree_diameter = tree.as_ref().and_then(super::junction_diameter).unwrap_or(0);
        Ok(Self {
            n,
            k_max,
            y,
            x,
            attachments: (1..=k_max as usize).collect(),
            lattice,
            y_to_x,
            collapse,
            tree_diameter,
        })
    }
}

/// `X_n`: bounded-degree version of [`y_family`].
pub fn x_family(n: u32, k_max: u32) -> Result<LongEdgeGraph> {
    Ok(XFamily::build(n, k_max)?.x)
}

/// `Y_n`: rescaled lattice balls `G(n, k)` glued to a spine.
pub fn y_family(n: u32, k_max: u32) -> Result<LongEdgeGraph> {
    Ok(XFamily::build(n, k_max)?.y)
}

/// Spine with junctions at `0` and `2^{2^n}`, `n = 1..=n_max`; the spine
/// start of `X_n` is glued to position `2^{2^n}`.
pub fn x_union(n_max: u32, k_max: u32) -> Result<LongEdgeGraph> {
    if !(1..=3).contains(&n_max) {
        return Err(Error::Precondition(format!("x_union needs 1 <= n_max <= 3, got {n_max}")));
    }
    let mut positions = vec![0u64];
    positions.extend((1..=n_max).map(|n| 1u64 << (1u64 << n)));
    let mut edges: Vec<(usize, usize, u64)> =
        (1..positions.len()).map(|j| (j - 1, j, positions[j] - positions[j - 1])).collect();
    let mut next = positions.len();
    for n in 1..=n_max {
        let xn = x_family(n, k_max)?;
        let map = |v: usize| if v == 0 { n as usize } else { next + v - 1 };
        edges.extend(xn.edges().iter().map(|&(a, b, len)| (map(a), map(b), len)));
        next += xn.junction_count() - 1;
    }
    LongEdgeGraph::new(next, &edges)
}
