//! Bounded-multiplicity covers and their verification.
//!
//! [`construct_cover`] recurses on the growth exponent: at level `k` the
//! ambient set is sparsified into a separating set `Y`, `Y` is covered at
//! level `k - 1`, and the `s`-components of `X ∖ Y` are added as cells. The
//! base level takes the `s`-components of a set whose growth is sublinear
//! enough that they are bounded.
//!
//! Multiplicity is certified at radius `s / 2`: two cells of `X ∖ Y` that
//! meet one such ball contain points within distance `s` of each other,
//! hence lie in the same `s`-component. Certificates are finite-scale
//! evidence, never asymptotic statements.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{scale_components, set_diameter, BallSearch, Graph, VertexSet, VertexTag};
use crate::growth::{growth_function, scan_witness, witness_radii, Centers, GrowthProfile};
use crate::separator::{sparsify_checked, SafetyChecks, SeparatorParams, SwapRecord};

/// Header line carried by every certificate and report.
pub const EVIDENCE_NOTE: &str =
    "finite-scale evidence only: verified multiplicity and diameters at the listed scales, not an asymptotic proof";

/// Summary of one recursion level, kept in serialized covers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelSummary {
    pub level: u32,
    /// `n0` of a sparsify level, or the witnessing radius of the base level.
    pub n0: u64,
    pub diameter_bound: u64,
    pub ambient_size: usize,
    pub separator_size: usize,
    pub swaps: usize,
    pub cells_added: usize,
}

/// A cover of a vertex set together with the bounds it claims.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cover {
    /// Internal chain scale `s`.
    pub scale: u32,
    /// Radius at which the multiplicity bound is claimed.
    pub radius: u64,
    /// Claimed multiplicity bound.
    pub q: usize,
    /// Claimed cell diameter bound.
    #[serde(rename = "D")]
    pub diameter_bound: u64,
    pub cells: Vec<VertexSet>,
    /// Covered set; absent means every vertex of the graph.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ground: Option<VertexSet>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub provenance: Vec<LevelSummary>,
}

impl Cover {
    pub fn ground_set(&self, vertex_count: usize) -> VertexSet {
        self.ground.clone().unwrap_or_else(|| VertexSet::all(vertex_count))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Malformed(format!("cover JSON: {e}")))
    }
}

/// Everything a recursion level did, for auditing the separator contract.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelRun {
    pub level: u32,
    pub ambient: VertexSet,
    /// Present on sparsify levels, absent on the base level.
    pub params: Option<SeparatorParams>,
    /// `n0` of a sparsify level, or the witnessing radius of the base level.
    pub witness_radius: u64,
    pub separator: VertexSet,
    pub trace: Vec<SwapRecord>,
    pub cells_added: usize,
    pub profile: GrowthProfile,
}

impl LevelRun {
    fn summary(&self) -> LevelSummary {
        LevelSummary {
            level: self.level,
            n0: self.witness_radius,
            diameter_bound: self.params.as_ref().map_or(self.witness_radius, |p| p.diameter_bound),
            ambient_size: self.ambient.len(),
            separator_size: self.separator.len(),
            swaps: self.trace.len(),
            cells_added: self.cells_added,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverBuild {
    pub cover: Cover,
    pub runs: Vec<LevelRun>,
}

/// Cells are the `s`-components of `x`, which must satisfy
/// `γ_X(n) <= b_1 · n` at some radius `n = 4^m · s`, `m >= 0`; every cell
/// then has diameter at most that `n`.
pub fn base_cover(g: &Graph, x: &VertexSet, s: u32) -> Result<Cover> {
    check_args(g, x, 1, s)?;
    let mut runs = Vec::new();
    let (cells, bound) = base_level(g, x, s, &mut runs)?;
    Ok(Cover {
        scale: s,
        radius: (s / 2) as u64,
        q: 1,
        diameter_bound: bound,
        cells,
        ground: ground_of(g, x),
        provenance: runs.iter().map(LevelRun::summary).collect(),
    })
}

fn base_level(g: &Graph, x: &VertexSet, s: u32, runs: &mut Vec<LevelRun>) -> Result<(Vec<VertexSet>, u64)> {
    let profile = growth_function(g, x, &witness_radii(s, g.vertex_count()), &Centers::All)?;
    let Some(w) = scan_witness(&profile, 1, s, 0, false)? else {
        return Err(Error::Hypothesis {
            level: 1,
            detail: format!("no n = 4^m·{s} with γ_X(n) <= n/{}; profile {:?}", 4 * s as u64, profile.entries),
        });
    };
    let cells = scale_components(g, x, s);
    runs.push(LevelRun {
        level: 1,
        ambient: x.clone(),
        params: None,
        witness_radius: w.n0,
        separator: VertexSet::new(),
        trace: Vec::new(),
        cells_added: cells.len(),
        profile,
    });
    Ok((cells, w.n0))
}

/// Cover of `x` with multiplicity at most `k` at radius `s / 2`, assuming
/// growth below `b_k · n^k` (checked at every level).
pub fn construct_cover(g: &Graph, x: &VertexSet, k: u32, s: u32) -> Result<Cover> {
    Ok(build_cover(g, x, k, s)?.cover)
}

/// [`construct_cover`] keeping every level's separator run.
pub fn build_cover(g: &Graph, x: &VertexSet, k: u32, s: u32) -> Result<CoverBuild> {
    check_args(g, x, k, s)?;
    let mut runs = Vec::new();
    let (mut cells, bound) = recurse(g, x, k, s, &mut runs)?;
    cells.sort_by_key(|c| c.first());
    let cover = Cover {
        scale: s,
        radius: (s / 2) as u64,
        q: k as usize,
        diameter_bound: bound,
        cells,
        ground: ground_of(g, x),
        provenance: runs.iter().map(LevelRun::summary).collect(),
    };
    Ok(CoverBuild { cover, runs })
}

fn check_args(g: &Graph, x: &VertexSet, k: u32, s: u32) -> Result<()> {
    if k == 0 {
        return Err(Error::Precondition("growth exponent must be >= 1".into()));
    }
    if s == 0 {
        return Err(Error::Precondition("scale must be >= 1".into()));
    }
    x.check_range(g.vertex_count())
}

fn recurse(g: &Graph, x: &VertexSet, k: u32, s: u32, runs: &mut Vec<LevelRun>) -> Result<(Vec<VertexSet>, u64)> {
    if k == 1 {
        return base_level(g, x, s, runs);
    }
    let profile = growth_function(g, x, &witness_radii(s, g.vertex_count()), &Centers::All)?;
    let Some(w) = scan_witness(&profile, k, s, 1, false)? else {
        return Err(Error::Hypothesis {
            level: k,
            detail: format!("no n0 = 4^m·{s} with γ_X(n0) <= b_{k}·n0^{k}; profile {:?}", profile.entries),
        });
    };
    let params = SeparatorParams::new(k, s, w.m)?;
    let sp = sparsify_checked(g, x, &params, w.gamma, SafetyChecks::default_for(x.len()))?;
    let rest = scale_components(g, &x.difference(&sp.y), s);
    let level_bound = params.diameter_bound;
    runs.push(LevelRun {
        level: k,
        ambient: x.clone(),
        params: Some(params),
        witness_radius: w.n0,
        separator: sp.y.clone(),
        trace: sp.trace,
        cells_added: rest.len(),
        profile,
    });
    let (mut cells, inner_bound) = recurse(g, &sp.y, k - 1, s, runs)?;
    cells.extend(rest);
    Ok((cells, inner_bound.max(level_bound)))
}

fn ground_of(g: &Graph, x: &VertexSet) -> Option<VertexSet> {
    (x.len() != g.vertex_count()).then(|| x.clone())
}

/// Maximum number of cells met by a radius-`r` ball, over every center of
/// `g`, with the smallest center attaining it.
pub fn multiplicity(g: &Graph, cells: &[VertexSet], r: u64) -> (usize, Option<usize>) {
    let n = g.vertex_count();
    if n == 0 || cells.is_empty() {
        return (0, None);
    }
    let mut membership: Vec<Vec<u32>> = vec![Vec::new(); n];
    for (i, c) in cells.iter().enumerate() {
        for v in c.iter().filter(|&v| v < n) {
            membership[v].push(i as u32);
        }
    }
    let best = (0..n)
        .into_par_iter()
        .map_init(
            || (BallSearch::new(n), vec![usize::MAX; cells.len()]),
            |(bs, seen), v| {
                let mut count = 0usize;
                for &w in bs.explore(g, v, r) {
                    for &c in &membership[w] {
                        if seen[c as usize] != v {
                            seen[c as usize] = v;
                            count += 1;
                        }
                    }
                }
                (count, v)
            },
        )
        .reduce(|| (0, usize::MAX), |a, b| if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a });
    (best.0, (best.1 != usize::MAX).then_some(best.1))
}

/// Independent re-check of every claim a cover makes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverReport {
    pub note: String,
    pub vertex_count: usize,
    pub cell_count: usize,
    pub uncovered: Vec<usize>,
    /// Cell members outside the covered set (or outside the graph).
    pub stray: Vec<usize>,
    pub empty_cells: Vec<usize>,
    /// Whether cells are pairwise disjoint (informational).
    pub disjoint: bool,
    /// `(cell index, diameter)` for cells above the bound; `None` diameter
    /// means the cell is not connected in the graph.
    pub diameter_violations: Vec<(usize, Option<u64>)>,
    pub max_diameter: Option<u64>,
    pub diameter_bound: u64,
    pub radius: u64,
    pub multiplicity: usize,
    pub multiplicity_witness: Option<usize>,
    pub claimed_multiplicity: usize,
    /// Multiplicity at radius `scale`, reported for transparency only.
    pub multiplicity_at_scale: usize,
    pub passed: bool,
}

impl CoverReport {
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !self.uncovered.is_empty() {
            out.push(format!("{} vertices uncovered, first {:?}", self.uncovered.len(), &self.uncovered[..self.uncovered.len().min(5)]));
        }
        if !self.stray.is_empty() {
            out.push(format!("{} cell members outside the covered set", self.stray.len()));
        }
        if !self.empty_cells.is_empty() {
            out.push(format!("empty cells {:?}", self.empty_cells));
        }
        for (cell, d) in &self.diameter_violations {
            out.push(format!("cell {cell} diameter {d:?} exceeds {}", self.diameter_bound));
        }
        if self.multiplicity > self.claimed_multiplicity {
            out.push(format!(
                "multiplicity {} at radius {} (center {:?}) exceeds {}",
                self.multiplicity, self.radius, self.multiplicity_witness, self.claimed_multiplicity
            ));
        }
        out
    }
}

pub fn verify_cover(g: &Graph, c: &Cover) -> CoverReport {
    let n = g.vertex_count();
    let ground = c.ground_set(n);
    let ground_mask = {
        let mut m = vec![false; n];
        for v in ground.iter().filter(|&v| v < n) {
            m[v] = true;
        }
        m
    };
    let mut hits = vec![0u32; n];
    let mut stray = Vec::new();
    let mut empty_cells = Vec::new();
    for (i, cell) in c.cells.iter().enumerate() {
        if cell.is_empty() {
            empty_cells.push(i);
        }
        for v in cell.iter() {
            if v >= n || !ground_mask[v] {
                stray.push(v);
            } else {
                hits[v] += 1;
            }
        }
    }
    stray.sort_unstable();
    stray.dedup();
    let uncovered: Vec<usize> = ground.iter().filter(|&v| v >= n || hits[v] == 0).collect();
    let disjoint = hits.iter().all(|&h| h <= 1);

    let in_range: Vec<VertexSet> = c
        .cells
        .iter()
        .map(|cell| cell.iter().filter(|&v| v < n).collect())
        .collect();
    let diameters: Vec<Option<u64>> = in_range.iter().map(|cell| set_diameter(g, cell)).collect();
    let diameter_violations: Vec<(usize, Option<u64>)> = diameters
        .iter()
        .enumerate()
        .filter(|(_, d)| d.is_none_or(|d| d > c.diameter_bound))
        .map(|(i, &d)| (i, d))
        .collect();
    let max_diameter = diameters.iter().try_fold(0u64, |acc, d| d.map(|d| acc.max(d)));

    let (mult, witness) = multiplicity(g, &in_range, c.radius);
    let (mult_scale, _) = multiplicity(g, &in_range, c.scale as u64);
    let passed = uncovered.is_empty()
        && stray.is_empty()
        && empty_cells.is_empty()
        && diameter_violations.is_empty()
        && mult <= c.q;
    CoverReport {
        note: EVIDENCE_NOTE.to_string(),
        vertex_count: n,
        cell_count: c.cells.len(),
        uncovered,
        stray,
        empty_cells,
        disjoint,
        diameter_violations,
        max_diameter,
        diameter_bound: c.diameter_bound,
        radius: c.radius,
        multiplicity: mult,
        multiplicity_witness: witness,
        claimed_multiplicity: c.q,
        multiplicity_at_scale: mult_scale,
        passed,
    }
}

/// Verified outcome at one scale.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScaleResult {
    pub scale: u32,
    pub radius: u64,
    pub multiplicity: usize,
    pub multiplicity_witness: Option<usize>,
    pub max_diameter: u64,
    pub diameter_bound: u64,
    pub cells: usize,
    pub levels: Vec<LevelSummary>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimensionCertificate {
    pub note: String,
    pub graph: String,
    /// Dimension bound `k`; multiplicities must stay at or below `k + 1`.
    pub k: u32,
    pub results: Vec<ScaleResult>,
}

impl DimensionCertificate {
    pub fn holds(&self) -> bool {
        self.results.iter().all(|r| r.multiplicity <= self.k as usize + 1)
    }
}

/// Builds and verifies a cover at exponent `k + 1` for each scale.
pub fn asdim_certificate(g: &Graph, graph_id: &str, k: u32, scales: &[u32]) -> Result<DimensionCertificate> {
    let all = VertexSet::all(g.vertex_count());
    let mut results = Vec::with_capacity(scales.len());
    for &s in scales {
        let cover = construct_cover(g, &all, k + 1, s)?;
        let report = verify_cover(g, &cover);
        if !report.passed {
            return Err(Error::Verification(format!(
                "scale {s}: {}",
                report.violations().join("; ")
            )));
        }
        results.push(ScaleResult {
            scale: s,
            radius: cover.radius,
            multiplicity: report.multiplicity,
            multiplicity_witness: report.multiplicity_witness,
            max_diameter: report.max_diameter.unwrap_or(0),
            diameter_bound: cover.diameter_bound,
            cells: cover.cells.len(),
            levels: cover.provenance,
        });
    }
    Ok(DimensionCertificate {
        note: EVIDENCE_NOTE.to_string(),
        graph: graph_id.to_string(),
        k,
        results,
    })
}

/// Transfers a cover of an `L`-subdivision back to the base graph.
///
/// Each base vertex joins the cells that contain its junction image.
/// Diameters shrink by `L` (rounded up); a base ball of radius `r` maps into
/// a subdivision ball of radius `L·r`, so the claimed radius becomes
/// `⌊radius / L⌋` with the same multiplicity bound.
pub fn rescale_transfer(subdivided: &Graph, c: &Cover, factor: u64) -> Result<Cover> {
    if factor == 0 {
        return Err(Error::Precondition("rescale factor must be >= 1".into()));
    }
    let tags = subdivided.tags().ok_or(Error::NotSubdivision)?;
    let mut image = Vec::new();
    for (v, tag) in tags.iter().enumerate() {
        if let VertexTag::Junction(i) = *tag {
            if i >= image.len() {
                image.resize(i + 1, usize::MAX);
            }
            image[i] = v;
        }
    }
    if image.is_empty() || image.contains(&usize::MAX) {
        return Err(Error::NotSubdivision);
    }
    let base_of: std::collections::HashMap<usize, usize> =
        image.iter().enumerate().map(|(b, &v)| (v, b)).collect();
    let cells: Vec<VertexSet> = c
        .cells
        .iter()
        .map(|cell| cell.iter().filter_map(|v| base_of.get(&v).copied()).collect::<VertexSet>())
        .filter(|cell| !cell.is_empty())
        .collect();
    let ground = c
        .ground
        .as_ref()
        .map(|gr| gr.iter().filter_map(|v| base_of.get(&v).copied()).collect::<VertexSet>());
    Ok(Cover {
        scale: (c.scale as u64 / factor) as u32,
        radius: c.radius / factor,
        q: c.q,
        diameter_bound: c.diameter_bound.div_ceil(factor),
        cells,
        ground,
        provenance: c.provenance.clone(),
    })
}

/// Every cell of a parallel map over cells; used by callers that want
/// per-cell diameters.
pub fn cell_diameters(g: &Graph, cells: &[VertexSet]) -> Vec<Option<u64>> {
    cells.par_iter().map(|c| set_diameter(g, c)).collect()
}
