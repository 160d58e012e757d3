//! Unit-edge graphs and the geometric primitives built on them: balls,
//! annuli, scale-connected components and set diameters.
//!
//! All distances are exact integers. A vertex that cannot be reached from a
//! center is at infinite distance and never lies in any of its balls.

mod long_edge;
mod union_find;
mod vertex_set;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use long_edge::LongEdgeGraph;
pub(crate) use union_find::UnionFind;
pub use vertex_set::VertexSet;

use crate::error::{Error, Result};

/// Marker for unreachable vertices in distance arrays.
pub const UNREACHABLE: u32 = u32::MAX;

/// Tags carried by subdivided graphs so that junctions can be mapped back.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VertexTag {
    /// Image of junction `i` of the graph that was subdivided.
    Junction(usize),
    /// Fresh vertex placed inside a subdivided edge.
    Interior,
}

/// Finite simple undirected graph in compressed adjacency form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    offsets: Vec<usize>,
    targets: Vec<usize>,
    tags: Option<Vec<VertexTag>>,
}

impl Graph {
    /// Builds a graph on `n` vertices. Repeated edges (in either orientation)
    /// collapse to one; self-loops are rejected.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut pairs = Vec::with_capacity(edges.len() * 2);
        for &(u, v) in edges {
            for w in [u, v] {
                if w >= n {
                    return Err(Error::VertexOutOfRange { vertex: w, count: n });
                }
            }
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            pairs.push((u, v));
            pairs.push((v, u));
        }
        pairs.sort_unstable();
        pairs.dedup();
        let mut offsets = vec![0usize; n + 1];
        for &(u, _) in &pairs {
            offsets[u + 1] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        let targets = pairs.into_iter().map(|(_, v)| v).collect();
        Ok(Self {
            offsets,
            targets,
            tags: None,
        })
    }

    pub fn with_tags(mut self, tags: Vec<VertexTag>) -> Result<Self> {
        if tags.len() != self.vertex_count() {
            return Err(Error::Malformed(format!(
                "{} tags for {} vertices",
                tags.len(),
                self.vertex_count()
            )));
        }
        self.tags = Some(tags);
        Ok(self)
    }

    pub fn tags(&self) -> Option<&[VertexTag]> {
        self.tags.as_deref()
    }

    pub fn vertex_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }

    #[inline]
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn max_degree(&self) -> usize {
        (0..self.vertex_count()).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    /// Edges `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.vertex_count()).flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .copied()
                .filter(move |&v| u < v)
                .map(move |v| (u, v))
        })
    }

    pub fn check_vertex(&self, v: usize) -> Result<()> {
        if v < self.vertex_count() {
            Ok(())
        } else {
            Err(Error::VertexOutOfRange {
                vertex: v,
                count: self.vertex_count(),
            })
        }
    }

    /// Connected components of the whole graph.
    pub fn components(&self) -> Vec<VertexSet> {
        let mut uf = UnionFind::new(self.vertex_count());
        for (u, v) in self.edges() {
            uf.union(u, v);
        }
        uf.groups().into_iter().map(VertexSet::from_sorted).collect()
    }
}

/// Reusable truncated breadth-first search.
///
/// `explore` returns the reached vertices in non-decreasing distance order;
/// distances stay queryable until the next call.
#[derive(Debug, Clone)]
pub struct BallSearch {
    dist: Vec<u32>,
    order: Vec<usize>,
}

impl BallSearch {
    pub fn new(n: usize) -> Self {
        Self {
            dist: vec![UNREACHABLE; n],
            order: Vec::new(),
        }
    }

    pub fn for_graph(g: &Graph) -> Self {
        Self::new(g.vertex_count())
    }

    /// Explores `B_source(radius)`. Radii beyond the vertex count behave as
    /// an unbounded search.
    pub fn explore(&mut self, g: &Graph, source: usize, radius: u64) -> &[usize] {
        for &v in &self.order {
            self.dist[v] = UNREACHABLE;
        }
        self.order.clear();
        let limit = radius.min(g.vertex_count() as u64) as u32;
        self.dist[source] = 0;
        self.order.push(source);
        let mut head = 0;
        while head < self.order.len() {
            let u = self.order[head];
            head += 1;
            let du = self.dist[u];
            if du >= limit {
                continue;
            }
            for &w in g.neighbors(u) {
                if self.dist[w] == UNREACHABLE {
                    self.dist[w] = du + 1;
                    self.order.push(w);
                }
            }
        }
        &self.order
    }

    /// Distance from the last source, if reached by the last exploration.
    #[inline]
    pub fn distance(&self, v: usize) -> Option<u32> {
        match self.dist[v] {
            UNREACHABLE => None,
            d => Some(d),
        }
    }

    pub fn reached(&self) -> &[usize] {
        &self.order
    }
}

/// Single-source distances over the whole graph.
pub fn distances_from(g: &Graph, source: usize) -> Vec<u32> {
    let mut bs = BallSearch::for_graph(g);
    bs.explore(g, source, u64::MAX);
    bs.dist
}

/// `B_v(r)`: vertices at distance at most `r` from `v`.
pub fn ball(g: &Graph, v: usize, r: u64) -> VertexSet {
    let mut bs = BallSearch::for_graph(g);
    bs.explore(g, v, r).iter().copied().collect()
}

/// Annulus `A(v, m, n) = {x : m <= d(v, x) <= n}`.
///
/// Separation code uses integer shells: thickness `s` means the `s`
/// consecutive shells `{m, .., m + s - 1}`, which is exactly what blocks
/// every chain with steps of length at most `s`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnulusSpec {
    pub center: usize,
    pub inner: u64,
    pub outer: u64,
}

impl AnnulusSpec {
    pub fn new(center: usize, inner: u64, outer: u64) -> Result<Self> {
        if inner > outer {
            return Err(Error::Precondition(format!(
                "annulus inner radius {inner} exceeds outer radius {outer}"
            )));
        }
        Ok(Self { center, inner, outer })
    }

    /// Shell band `{m, .., m + s - 1}`.
    pub fn shells(center: usize, m: u64, s: u32) -> Result<Self> {
        if s == 0 {
            return Err(Error::Precondition("annulus thickness must be >= 1".into()));
        }
        Self::new(center, m, m + s as u64 - 1)
    }

    pub fn thickness(&self) -> u64 {
        self.outer - self.inner
    }
}

/// Members of `x` inside the annulus.
pub fn annulus(g: &Graph, spec: &AnnulusSpec, x: &VertexSet) -> VertexSet {
    let mut bs = BallSearch::for_graph(g);
    annulus_with(g, &mut bs, spec, x)
}

pub(crate) fn annulus_with(
    g: &Graph,
    bs: &mut BallSearch,
    spec: &AnnulusSpec,
    x: &VertexSet,
) -> VertexSet {
    let reached: Vec<usize> = bs.explore(g, spec.center, spec.outer).to_vec();
    reached
        .into_iter()
        .filter(|&w| {
            let d = bs.distance(w).unwrap() as u64;
            d >= spec.inner && x.contains(w)
        })
        .collect()
}

/// Partition of `x` into `s`-connected components.
///
/// Chains are measured with distances of `g` itself, not of the subgraph
/// induced by `x`. Cells are sorted and ordered by smallest member. Scale 0
/// stands for every sub-unit scale and yields singletons.
pub fn scale_components(g: &Graph, x: &VertexSet, s: u32) -> Vec<VertexSet> {
    if s == 0 {
        return x.iter().map(|v| VertexSet::from_sorted(vec![v])).collect();
    }
    let n = g.vertex_count();
    let members = x.as_slice();
    let mut position = vec![usize::MAX; n];
    for (i, &v) in members.iter().enumerate() {
        position[v] = i;
    }
    let mut uf = UnionFind::new(members.len());
    const CHUNK: usize = 512;
    for chunk in members.chunks(CHUNK) {
        let links: Vec<(usize, usize)> = chunk
            .par_iter()
            .map_init(
                || BallSearch::new(n),
                |bs, &v| {
                    bs.explore(g, v, s as u64)
                        .iter()
                        .filter(|&&w| w > v && position[w] != usize::MAX)
                        .map(|&w| (position[v], position[w]))
                        .collect::<Vec<_>>()
                },
            )
            .flatten()
            .collect();
        for (a, b) in links {
            uf.union(a, b);
        }
    }
    uf.groups()
        .into_iter()
        .map(|grp| VertexSet::from_sorted(grp.into_iter().map(|i| members[i]).collect()))
        .collect()
}

/// Maximum pairwise distance within `set`, measured in `g`. `None` when two
/// members lie in different components of `g`.
pub fn set_diameter(g: &Graph, set: &VertexSet) -> Option<u64> {
    if set.len() <= 1 {
        return Some(0);
    }
    let n = g.vertex_count();
    set.as_slice()
        .par_iter()
        .map_init(
            || BallSearch::new(n),
            |bs, &v| {
                bs.explore(g, v, u64::MAX);
                let mut ecc = 0u64;
                for w in set.iter() {
                    match bs.distance(w) {
                        Some(d) => ecc = ecc.max(d as u64),
                        None => return None,
                    }
                }
                Some(ecc)
            },
        )
        .try_reduce(|| 0, |a, b| Some(a.max(b)))
}

/// Whether every pair in `set` is within distance `bound`; cheaper than the
/// exact diameter because searches stop at `bound`.
pub fn set_diameter_at_most(g: &Graph, set: &VertexSet, bound: u64) -> bool {
    if set.len() <= 1 {
        return true;
    }
    let n = g.vertex_count();
    set.as_slice()
        .par_iter()
        .map_init(
            || BallSearch::new(n),
            |bs, &v| {
                bs.explore(g, v, bound);
                set.iter().all(|w| bs.distance(w).is_some())
            },
        )
        .all(|ok| ok)
}
