use std::cmp::Reverse;
use std::collections::BinaryHeap;

use super::{Graph, VertexTag};
use crate::error::{Error, Result};

/// Graph whose edges stand for paths of unit edges.
///
/// Only the endpoints ("junctions") are stored; an edge of length `L` hides
/// `L - 1` interior vertices that [`LongEdgeGraph::subdivide`] materializes
/// and [`LongEdgeGraph::ball_size`] counts analytically.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LongEdgeGraph {
    edges: Vec<(usize, usize, u64)>,
    offsets: Vec<usize>,
    adjacency: Vec<(usize, u64)>,
}

impl LongEdgeGraph {
    pub fn new(junctions: usize, edges: &[(usize, usize, u64)]) -> Result<Self> {
        let mut norm = Vec::with_capacity(edges.len());
        for &(u, v, len) in edges {
            for w in [u, v] {
                if w >= junctions {
                    return Err(Error::VertexOutOfRange {
                        vertex: w,
                        count: junctions,
                    });
                }
            }
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            if len == 0 {
                return Err(Error::ZeroLength(u, v));
            }
            norm.push((u.min(v), u.max(v), len));
        }
        norm.sort_unstable();
        if let Some(w) = norm.windows(2).find(|w| w[0].0 == w[1].0 && w[0].1 == w[1].1) {
            return Err(Error::DuplicateEdge(w[0].0, w[0].1));
        }
        let mut offsets = vec![0usize; junctions + 1];
        for &(u, v, _) in &norm {
            offsets[u + 1] += 1;
            offsets[v + 1] += 1;
        }
        for i in 0..junctions {
            offsets[i + 1] += offsets[i];
        }
        let mut fill = offsets.clone();
        let mut adjacency = vec![(0, 0); norm.len() * 2];
        for &(u, v, len) in &norm {
            adjacency[fill[u]] = (v, len);
            fill[u] += 1;
            adjacency[fill[v]] = (u, len);
            fill[v] += 1;
        }
        for v in 0..junctions {
            adjacency[offsets[v]..offsets[v + 1]].sort_unstable();
        }
        Ok(Self {
            edges: norm,
            offsets,
            adjacency,
        })
    }

    pub fn junction_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges `(u, v, length)` with `u < v`, sorted.
    pub fn edges(&self) -> &[(usize, usize, u64)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[(usize, u64)] {
        &self.adjacency[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn max_degree(&self) -> usize {
        (0..self.junction_count())
            .map(|v| self.degree(v))
            .max()
            .unwrap_or(0)
    }

    /// Vertex count after subdivision.
    pub fn subdivided_vertex_count(&self) -> u128 {
        self.junction_count() as u128
            + self
                .edges
                .iter()
                .map(|&(_, _, l)| l as u128 - 1)
                .sum::<u128>()
    }

    /// Replaces every edge of length `L` by a path of `L` unit edges.
    ///
    /// Junction `i` keeps index `i`; interior vertices follow in edge order,
    /// walking from the smaller endpoint.
    pub fn subdivide(&self, cap: usize) -> Result<Graph> {
        let total = self.subdivided_vertex_count();
        if total > cap as u128 {
            return Err(Error::CapExceeded {
                what: "subdivided vertex count",
                size: total,
                cap: cap as u128,
            });
        }
        let total = total as usize;
        let n = self.junction_count();
        let mut tags = vec![VertexTag::Interior; total];
        for (i, t) in tags.iter_mut().take(n).enumerate() {
            *t = VertexTag::Junction(i);
        }
        let mut unit = Vec::with_capacity(total);
        let mut next = n;
        for &(u, v, len) in &self.edges {
            let mut prev = u;
            for _ in 1..len {
                unit.push((prev, next));
                prev = next;
                next += 1;
            }
            unit.push((prev, v));
        }
        Graph::from_edges(total, &unit)?.with_tags(tags)
    }

    /// Weighted single-source distances between junctions.
    pub fn junction_distances(&self, source: usize) -> Vec<Option<u64>> {
        let mut dist: Vec<Option<u64>> = vec![None; self.junction_count()];
        let mut heap = BinaryHeap::new();
        dist[source] = Some(0);
        heap.push(Reverse((0u64, source)));
        while let Some(Reverse((d, u))) = heap.pop() {
            if dist[u].is_some_and(|best| best < d) {
                continue;
            }
            for &(w, len) in self.neighbors(u) {
                let nd = d + len;
                if dist[w].is_none_or(|best| nd < best) {
                    dist[w] = Some(nd);
                    heap.push(Reverse((nd, w)));
                }
            }
        }
        dist
    }

    /// `|B_v(r)|` in the subdivision, computed from junction distances only.
    ///
    /// An interior point at offset `i` from endpoint `a` of an edge `(a, b)`
    /// of length `L` is at distance `min(d(a) + i, d(b) + L - i)` from a
    /// junction center.
    pub fn ball_size(&self, v: usize, r: u64) -> u64 {
        let dist = self.junction_distances(v);
        self.ball_size_from(&dist, r)
    }

    pub(crate) fn ball_size_from(&self, dist: &[Option<u64>], r: u64) -> u64 {
        let mut count = dist.iter().filter(|d| d.is_some_and(|d| d <= r)).count() as u64;
        for &(a, b, len) in &self.edges {
            count += interior_within(dist[a], dist[b], len, r);
        }
        count
    }
}

/// Interior offsets `i in 1..len` with `min(da + i, db + len - i) <= r`.
fn interior_within(da: Option<u64>, db: Option<u64>, len: u64, r: u64) -> u64 {
    if len < 2 {
        return 0;
    }
    // Offsets reachable through `a`: 1..=hi_a.
    let hi_a = match da {
        Some(d) if d < r => (r - d).min(len - 1),
        _ => 0,
    };
    // Offsets reachable through `b`: lo_b..=len-1.
    let lo_b = match db {
        Some(d) if d < r => len.saturating_sub(r - d).max(1),
        _ => len,
    };
    let from_a = hi_a;
    let from_b = len - lo_b;
    let overlap = if lo_b <= hi_a { hi_a - lo_b + 1 } else { 0 };
    from_a + from_b - overlap
}
