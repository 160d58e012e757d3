//! Finite metric spaces: nets, `t`-growth estimates, scale graphs and the
//! pullback of graph covers to point clouds.
//!
//! Thresholds are closed (`d <= 2m`, `d <= eps`) and compared without
//! tolerance.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cover::{construct_cover, verify_cover, Cover, CoverReport};
use crate::error::{Error, Result};
use crate::graph::{distances_from, Graph, VertexSet, UNREACHABLE};

/// Relative tolerance for validating distance matrices on load.
pub const MATRIX_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
enum Geometry {
    Coords { dim: usize, data: Vec<f64> },
    Matrix { n: usize, data: Vec<f64> },
}

/// Points with a distance oracle: Euclidean coordinates or a validated
/// distance matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    geometry: Geometry,
}

impl PointCloud {
    pub fn from_coords(points: &[Vec<f64>]) -> Result<Self> {
        let dim = points.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(points.len() * dim);
        for (i, p) in points.iter().enumerate() {
            if p.len() != dim {
                return Err(Error::Malformed(format!("point {i} has {} coordinates, expected {dim}", p.len())));
            }
            if p.iter().any(|x| !x.is_finite()) {
                return Err(Error::Malformed(format!("point {i} has a non-finite coordinate")));
            }
            data.extend_from_slice(p);
        }
        Ok(Self { geometry: Geometry::Coords { dim, data } })
    }

    /// Square matrix checked for symmetry, zero diagonal and the triangle
    /// inequality, each up to [`MATRIX_TOLERANCE`] relative.
    pub fn from_matrix(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Malformed("distance matrix is not square".into()));
        }
        let data: Vec<f64> = rows.concat();
        let close = |a: f64, b: f64| (a - b).abs() <= MATRIX_TOLERANCE * a.abs().max(b.abs()).max(1.0);
        for i in 0..n {
            if data[i * n + i] != 0.0 {
                return Err(Error::InvalidMetric(format!("nonzero diagonal at {i}")));
            }
            for j in 0..n {
                let d = data[i * n + j];
                if !d.is_finite() || d < 0.0 {
                    return Err(Error::InvalidMetric(format!("entry ({i}, {j}) = {d}")));
                }
                if !close(d, data[j * n + i]) {
                    return Err(Error::InvalidMetric(format!("asymmetric at ({i}, {j})")));
                }
                if i != j && d == 0.0 {
                    return Err(Error::InvalidMetric(format!("distinct points {i} and {j} at distance 0")));
                }
            }
        }
        let bad = (0..n).into_par_iter().find_map_any(|i| {
            for j in 0..n {
                for k in 0..n {
                    let direct = data[i * n + k];
                    let via = data[i * n + j] + data[j * n + k];
                    if direct > via && !close(direct, via) {
                        return Some((i, j, k));
                    }
                }
            }
            None
        });
        if let Some((i, j, k)) = bad {
            return Err(Error::InvalidMetric(format!("triangle inequality fails for ({i}, {j}, {k})")));
        }
        Ok(Self { geometry: Geometry::Matrix { n, data } })
    }

    /// Shortest-path metric of a connected graph.
    pub fn from_graph(g: &Graph) -> Result<Self> {
        let n = g.vertex_count();
        let rows: Vec<Vec<u32>> = (0..n).into_par_iter().map(|v| distances_from(g, v)).collect();
        if rows.iter().flatten().any(|&d| d == UNREACHABLE) {
            return Err(Error::InvalidMetric("graph is disconnected".into()));
        }
        let data = rows.into_iter().flatten().map(f64::from).collect();
        Ok(Self { geometry: Geometry::Matrix { n, data } })
    }

    /// `n` points uniform in the disc of the given radius around the origin.
    pub fn disc(n: usize, radius: f64, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut data = Vec::with_capacity(2 * n);
        for _ in 0..n {
            let r = radius * rng.gen::<f64>().sqrt();
            let theta = std::f64::consts::TAU * rng.gen::<f64>();
            data.push(r * theta.cos());
            data.push(r * theta.sin());
        }
        Self { geometry: Geometry::Coords { dim: 2, data } }
    }

    /// Unit grid `{0..side}^2`, row-major.
    pub fn grid(side: usize) -> Self {
        let data = (0..side * side).flat_map(|i| [(i / side) as f64, (i % side) as f64]).collect();
        Self { geometry: Geometry::Coords { dim: 2, data } }
    }

    /// Parses CSV: one point per row, or a square distance matrix when the
    /// first data line is `matrix`. Blank lines and `#` comments are skipped;
    /// a non-numeric first row is taken as a header.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .comment(Some(b'#'))
            .flexible(true)
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let mut records = Vec::new();
        for rec in reader.records() {
            let rec = rec.map_err(|e| Error::Malformed(format!("cloud CSV: {e}")))?;
            if rec.iter().any(|f| !f.is_empty()) {
                records.push(rec);
            }
        }
        let matrix = records.first().is_some_and(|r| r.len() == 1 && r[0].eq_ignore_ascii_case("matrix"));
        let mut rows = Vec::new();
        for (i, rec) in records.iter().enumerate().skip(usize::from(matrix)) {
            let parsed: std::result::Result<Vec<f64>, _> = rec.iter().map(str::parse::<f64>).collect();
            match parsed {
                Ok(row) => rows.push(row),
                Err(_) if i == usize::from(matrix) => continue,
                Err(e) => return Err(Error::Malformed(format!("cloud CSV row {}: {e}", i + 1))),
            }
        }
        if matrix {
            Self::from_matrix(&rows)
        } else {
            Self::from_coords(&rows)
        }
    }

    /// Coordinates as CSV rows; matrices as `matrix` plus rows.
    pub fn to_csv(&self) -> String {
        let (width, data, header) = match &self.geometry {
            Geometry::Coords { dim, data } => (*dim, data, None),
            Geometry::Matrix { n, data } => (*n, data, Some("matrix\n")),
        };
        let mut out = header.unwrap_or_default().to_string();
        for row in data.chunks(width.max(1)) {
            let cells: Vec<String> = row.iter().map(|x| format!("{x}")).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn len(&self) -> usize {
        match &self.geometry {
            Geometry::Coords { dim, data } => {
                if *dim == 0 {
                    0
                } else {
                    data.len() / dim
                }
            }
            Geometry::Matrix { n, .. } => *n,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dist(&self, i: usize, j: usize) -> f64 {
        match &self.geometry {
            Geometry::Coords { dim, data } => {
                let a = &data[i * dim..(i + 1) * dim];
                let b = &data[j * dim..(j + 1) * dim];
                a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
            }
            Geometry::Matrix { n, data } => data[i * n + j],
        }
    }
}

/// An `(eps, delta)`-net with each point's nearest member.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Net {
    pub members: Vec<usize>,
    pub eps: f64,
    pub delta: f64,
    /// Nearest member (a point index) for every point; ties go to the
    /// smallest point index.
    pub assignment: Vec<usize>,
}

impl Net {
    /// Net with the given members; validity is checked separately.
    pub fn from_members(c: &PointCloud, members: Vec<usize>, eps: f64, delta: f64) -> Result<Self> {
        if c.is_empty() {
            return Err(Error::EmptyCloud);
        }
        if members.is_empty() {
            return Err(Error::Precondition("net has no members".into()));
        }
        if let Some(&v) = members.iter().find(|&&v| v >= c.len()) {
            return Err(Error::VertexOutOfRange { vertex: v, count: c.len() });
        }
        let mut by_index = members.clone();
        by_index.sort_unstable();
        let assignment = (0..c.len())
            .into_par_iter()
            .map(|p| {
                let mut best = (f64::INFINITY, usize::MAX);
                for &m in &by_index {
                    let d = c.dist(p, m);
                    if d < best.0 {
                        best = (d, m);
                    }
                }
                best.1
            })
            .collect();
        Ok(Self { members, eps, delta, assignment })
    }

    /// Position of each point's member within `members`, which is its vertex
    /// in the scale graph.
    pub fn member_slots(&self) -> Vec<usize> {
        let mut slot = std::collections::HashMap::with_capacity(self.members.len());
        for (i, &m) in self.members.iter().enumerate() {
            slot.insert(m, i);
        }
        self.assignment.iter().map(|a| slot[a]).collect()
    }
}

fn check_net_params(c: &PointCloud, eps: f64, delta: f64) -> Result<()> {
    if c.is_empty() {
        return Err(Error::EmptyCloud);
    }
    if !(delta > 0.0 && eps >= delta) {
        return Err(Error::Precondition(format!("net needs eps >= delta > 0, got eps = {eps}, delta = {delta}")));
    }
    Ok(())
}

/// Greedy net in index order: a point joins iff it is at least `delta` from
/// every current member.
pub fn greedy_net(c: &PointCloud, eps: f64, delta: f64) -> Result<Net> {
    greedy_net_in_order(c, eps, delta, &(0..c.len()).collect::<Vec<_>>())
}

/// Greedy net scanning points in the given order.
pub fn greedy_net_in_order(c: &PointCloud, eps: f64, delta: f64, order: &[usize]) -> Result<Net> {
    check_net_params(c, eps, delta)?;
    let members = grow_greedily(c, Vec::new(), delta, order);
    Net::from_members(c, members, eps, delta)
}

fn grow_greedily(c: &PointCloud, mut members: Vec<usize>, delta: f64, order: &[usize]) -> Vec<usize> {
    for &p in order {
        if members.iter().all(|&m| c.dist(p, m) >= delta) {
            members.push(p);
        }
    }
    members
}

/// Extends a net greedily (index order) to an `(s, s)`-net, `s` at most
/// the original separation.
pub fn extend_net(c: &PointCloud, net: &Net, s: f64) -> Result<Net> {
    check_net_params(c, s, s)?;
    if s > net.delta {
        return Err(Error::Precondition(format!("extension scale {s} exceeds separation {}", net.delta)));
    }
    let order: Vec<usize> = (0..c.len()).collect();
    let members = grow_greedily(c, net.members.clone(), s, &order);
    Net::from_members(c, members, s, s)
}

/// Outcome of the two exhaustive net checks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetReport {
    /// `max_x min_n d(x, n)`.
    pub covering_radius: f64,
    /// `min d(n1, n2)` over distinct members (infinite for one member).
    pub separation: f64,
    pub dense: bool,
    pub separated: bool,
}

impl NetReport {
    pub fn passed(&self) -> bool {
        self.dense && self.separated
    }
}

pub fn validate_net(c: &PointCloud, net: &Net) -> NetReport {
    let covering_radius = (0..c.len())
        .into_par_iter()
        .map(|p| net.members.iter().map(|&m| c.dist(p, m)).fold(f64::INFINITY, f64::min))
        .reduce(|| 0.0, f64::max);
    let separation = net
        .members
        .par_iter()
        .enumerate()
        .map(|(i, &a)| net.members[i + 1..].iter().map(|&b| c.dist(a, b)).fold(f64::INFINITY, f64::min))
        .reduce(|| f64::INFINITY, f64::min);
    NetReport {
        covering_radius,
        separation,
        dense: covering_radius <= net.eps,
        separated: separation >= net.delta,
    }
}

/// `|B_v(r) ∩ members|` for every point `v` and radius.
pub fn ball_counts(c: &PointCloud, members: &[usize], radii: &[f64]) -> Vec<Vec<u64>> {
    (0..c.len())
        .into_par_iter()
        .map(|v| {
            let mut counts = vec![0u64; radii.len()];
            for &m in members {
                let d = c.dist(v, m);
                for (slot, &r) in counts.iter_mut().zip(radii) {
                    if d <= r {
                        *slot += 1;
                    }
                }
            }
            counts
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricGrowthEntry {
    pub radius: f64,
    pub gamma: u64,
}

/// Lower-bound estimate of the `t`-growth function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TGrowth {
    pub t: f64,
    pub restarts: usize,
    pub seed: u64,
    pub entries: Vec<MetricGrowthEntry>,
    /// Net size of each restart, in order.
    pub net_sizes: Vec<usize>,
}

impl TGrowth {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("r,gamma,mode\n");
        for e in &self.entries {
            out.push_str(&format!("{},{},estimate\n", e.radius, e.gamma));
        }
        out
    }
}

/// Max over `restarts` greedy `(t, t)`-nets and over every cloud point of
/// `|B_v(r) ∩ N|`. Restart 0 scans in index order; later restarts scan
/// orders shuffled by a ChaCha8 stream seeded with `seed`.
pub fn t_growth(c: &PointCloud, t: f64, radii: &[f64], restarts: usize, seed: u64) -> Result<TGrowth> {
    check_net_params(c, t, t)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..c.len()).collect();
    let mut best = vec![0u64; radii.len()];
    let mut net_sizes = Vec::new();
    for restart in 0..restarts.max(1) {
        if restart > 0 {
            order.shuffle(&mut rng);
        }
        let members = grow_greedily(c, Vec::new(), t, &order);
        net_sizes.push(members.len());
        for counts in ball_counts(c, &members, radii) {
            for (b, x) in best.iter_mut().zip(counts) {
                *b = (*b).max(x);
            }
        }
    }
    Ok(TGrowth {
        t,
        restarts: restarts.max(1),
        seed,
        entries: radii.iter().zip(best).map(|(&radius, gamma)| MetricGrowthEntry { radius, gamma }).collect(),
        net_sizes,
    })
}

/// Graph on net members (vertex `i` is `members[i]`) with an edge exactly
/// when the distance is at most `2m`.
pub fn scale_graph(c: &PointCloud, net: &Net, m: u32) -> Result<Graph> {
    if m == 0 {
        return Err(Error::Precondition("scale graph needs m >= 1".into()));
    }
    let limit = 2.0 * m as f64;
    let members = &net.members;
    let edges: Vec<(usize, usize)> = (0..members.len())
        .into_par_iter()
        .flat_map_iter(|i| {
            (i + 1..members.len())
                .filter(move |&j| c.dist(members[i], members[j]) <= limit)
                .map(move |j| (i, j))
        })
        .collect();
    Graph::from_edges(members.len(), &edges)
}

/// Each point joins every cell holding its assigned member.
pub fn pullback_cover(c: &PointCloud, net: &Net, graph_cells: &[VertexSet]) -> Result<Vec<VertexSet>> {
    let slots = net.member_slots();
    let mut membership: Vec<Vec<usize>> = vec![Vec::new(); net.members.len()];
    for (i, cell) in graph_cells.iter().enumerate() {
        for v in cell.iter() {
            if v >= net.members.len() {
                return Err(Error::VertexOutOfRange { vertex: v, count: net.members.len() });
            }
            membership[v].push(i);
        }
    }
    let mut cells: Vec<Vec<usize>> = vec![Vec::new(); graph_cells.len()];
    for p in 0..c.len() {
        let owners = &membership[slots[p]];
        if owners.is_empty() {
            return Err(Error::Verification(format!("point {p} is assigned to an uncovered net member")));
        }
        for &i in owners {
            cells[i].push(p);
        }
    }
    Ok(cells.into_iter().map(VertexSet::from).collect())
}

/// Max number of cells with a point within `r` of some cloud point, and the
/// smallest such center.
pub fn metric_multiplicity(c: &PointCloud, cells: &[VertexSet], r: f64) -> (usize, Option<usize>) {
    let mut owner: Vec<Vec<u32>> = vec![Vec::new(); c.len()];
    for (i, cell) in cells.iter().enumerate() {
        for p in cell.iter() {
            owner[p].push(i as u32);
        }
    }
    let best = (0..c.len())
        .into_par_iter()
        .map_init(
            || vec![usize::MAX; cells.len()],
            |seen, v| {
                let mut count = 0;
                for (w, cells_of_w) in owner.iter().enumerate() {
                    if c.dist(v, w) <= r {
                        for &i in cells_of_w {
                            if seen[i as usize] != v {
                                seen[i as usize] = v;
                                count += 1;
                            }
                        }
                    }
                }
                (count, v)
            },
        )
        .reduce(|| (0, usize::MAX), |a, b| if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a });
    (best.0, (best.1 != usize::MAX).then_some(best.1))
}

/// Largest pairwise distance inside a cell.
pub fn metric_diameter(c: &PointCloud, cell: &VertexSet) -> f64 {
    let pts = cell.as_slice();
    pts.par_iter()
        .enumerate()
        .map(|(i, &a)| pts[i + 1..].iter().map(|&b| c.dist(a, b)).fold(0.0, f64::max))
        .reduce(|| 0.0, f64::max)
}

/// Re-check of a pulled-back cover on the cloud itself.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CloudCoverReport {
    pub points: usize,
    pub cells: usize,
    pub uncovered: Vec<usize>,
    /// Points lying in more than one cell.
    pub shared: usize,
    pub radius: f64,
    pub multiplicity: usize,
    pub multiplicity_witness: Option<usize>,
    pub claimed_multiplicity: usize,
    pub max_diameter: f64,
    /// `2m · D + 2 eps`, the metric image of the graph diameter bound.
    pub diameter_bound: f64,
    pub passed: bool,
}

pub fn verify_cloud_cover(
    c: &PointCloud,
    cells: &[VertexSet],
    radius: f64,
    claimed_multiplicity: usize,
    diameter_bound: f64,
) -> CloudCoverReport {
    let mut hits = vec![0u32; c.len()];
    for cell in cells {
        for p in cell.iter() {
            hits[p] += 1;
        }
    }
    let uncovered: Vec<usize> = (0..c.len()).filter(|&p| hits[p] == 0).collect();
    let shared = hits.iter().filter(|&&h| h > 1).count();
    let (multiplicity, multiplicity_witness) = metric_multiplicity(c, cells, radius);
    let max_diameter = cells.iter().map(|cell| metric_diameter(c, cell)).fold(0.0, f64::max);
    let passed = uncovered.is_empty() && multiplicity <= claimed_multiplicity && max_diameter <= diameter_bound;
    CloudCoverReport {
        points: c.len(),
        cells: cells.len(),
        uncovered,
        shared,
        radius,
        multiplicity,
        multiplicity_witness,
        claimed_multiplicity,
        max_diameter,
        diameter_bound,
        passed,
    }
}

/// Net, scale graph, graph cover and pulled-back cloud cover.
#[derive(Debug, Clone)]
pub struct Pipeline {
    pub net: Net,
    pub net_report: NetReport,
    pub graph: Graph,
    pub graph_cover: Cover,
    pub graph_report: CoverReport,
    pub cells: Vec<VertexSet>,
    pub report: CloudCoverReport,
}

/// Runs the cloud pipeline at metric scale `m` with a `(t, t)`-net,
/// growth exponent `k` and graph scale `s`.
///
/// A metric `m`-ball around `v` only reaches points whose members lie
/// within `m + 2t` of `v`'s member; with `2t <= m` those members are
/// scale-graph neighbours, so graph multiplicity at radius `s / 2 >= 1`
/// bounds the cloud multiplicity at radius `m`.
pub fn cloud_pipeline(c: &PointCloud, t: f64, m: u32, k: u32, s: u32) -> Result<Pipeline> {
    if 2.0 * t > m as f64 {
        return Err(Error::Precondition(format!("pipeline needs 2t <= m, got t = {t}, m = {m}")));
    }
    if s < 2 {
        return Err(Error::Precondition("pipeline needs graph scale s >= 2".into()));
    }
    let net = greedy_net(c, t, t)?;
    let net_report = validate_net(c, &net);
    if !net_report.passed() {
        return Err(Error::Verification(format!("net failed validation: {net_report:?}")));
    }
    let graph = scale_graph(c, &net, m)?;
    let graph_cover = construct_cover(&graph, &VertexSet::all(graph.vertex_count()), k, s)?;
    let graph_report = verify_cover(&graph, &graph_cover);
    let cells = pullback_cover(c, &net, &graph_cover.cells)?;
    let bound = 2.0 * m as f64 * graph_cover.diameter_bound as f64 + 2.0 * t;
    let report = verify_cloud_cover(c, &cells, m as f64, graph_cover.q, bound);
    Ok(Pipeline { net, net_report, graph, graph_cover, graph_report, cells, report })
}
