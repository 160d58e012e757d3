//! Growth profiles `γ_X(r) = max_v |B_v(r) ∩ X|`, the level coefficients
//! `b_k` that drive the cover recursion, and log-log slope fits.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{BallSearch, Graph, LongEdgeGraph, VertexSet};

/// Which centers a profile maximized over.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileMode {
    /// Every vertex of the ambient graph.
    Exact,
    /// A declared list of centers; values are lower bounds.
    Sampled { centers: Vec<usize> },
}

impl ProfileMode {
    pub fn label(&self) -> &'static str {
        match self {
            ProfileMode::Exact => "exact",
            ProfileMode::Sampled { .. } => "sampled",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GrowthEntry {
    pub radius: u64,
    pub gamma: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GrowthProfile {
    pub entries: Vec<GrowthEntry>,
    pub mode: ProfileMode,
    pub subset: String,
    /// Radius from which the profile is known to be constant (every finite
    /// distance of the ambient graph is below it).
    pub saturates_at: Option<u64>,
}

impl GrowthProfile {
    pub fn is_exact(&self) -> bool {
        self.mode == ProfileMode::Exact
    }

    /// Profile value at `r`: a stored entry, or the saturated value past
    /// the saturation radius.
    pub fn gamma_at(&self, r: u64) -> Option<u64> {
        if let Ok(i) = self.entries.binary_search_by_key(&r, |e| e.radius) {
            return Some(self.entries[i].gamma);
        }
        match (self.saturates_at, self.entries.last()) {
            (Some(sat), Some(last)) if r >= sat && last.radius >= sat => Some(last.gamma),
            _ => None,
        }
    }

    pub fn max_radius(&self) -> Option<u64> {
        self.entries.last().map(|e| e.radius)
    }

    /// `r,gamma,mode` lines with a header row.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("r,gamma,mode\n");
        for e in &self.entries {
            out.push_str(&format!("{},{},{}\n", e.radius, e.gamma, self.mode.label()));
        }
        out
    }

    pub fn with_subset_id(mut self, id: impl Into<String>) -> Self {
        self.subset = id.into();
        self
    }
}

/// Centers to maximize over.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Centers {
    All,
    Sample(Vec<usize>),
}

fn check_radii(radii: &[u64]) -> Result<()> {
    if radii.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::Precondition("radii must be sorted ascending".into()));
    }
    Ok(())
}

/// Growth profile of `x` inside `g` at the given radii.
pub fn growth_function(
    g: &Graph,
    x: &VertexSet,
    radii: &[u64],
    centers: &Centers,
) -> Result<GrowthProfile> {
    check_radii(radii)?;
    x.check_range(g.vertex_count())?;
    let n = g.vertex_count();
    let (center_list, mode): (Vec<usize>, ProfileMode) = match centers {
        Centers::All => ((0..n).collect(), ProfileMode::Exact),
        Centers::Sample(c) if c.is_empty() => return Err(Error::EmptySample),
        Centers::Sample(c) => {
            for &v in c {
                g.check_vertex(v)?;
            }
            (c.clone(), ProfileMode::Sampled { centers: c.clone() })
        }
    };
    let mask = x.mask(n);
    let max_r = radii.last().copied().unwrap_or(0);
    let gammas = center_list
        .par_iter()
        .map_init(
            || BallSearch::new(n),
            |bs, &v| counts_by_radius(g, bs, &mask, v, radii, max_r),
        )
        .reduce(
            || vec![0u64; radii.len()],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x = (*x).max(y);
                }
                a
            },
        );
    let subset = if x.len() == n {
        "all".to_string()
    } else {
        format!("subset[{}]", x.len())
    };
    let saturates_at = (n > 0 && max_r >= (n - 1) as u64).then(|| (n - 1) as u64);
    Ok(GrowthProfile {
        entries: radii
            .iter()
            .zip(gammas)
            .map(|(&radius, gamma)| GrowthEntry { radius, gamma })
            .collect(),
        mode,
        subset,
        saturates_at,
    })
}

/// `|B_v(r) ∩ X|` for each radius.
pub(crate) fn counts_by_radius(
    g: &Graph,
    bs: &mut BallSearch,
    mask: &[bool],
    v: usize,
    radii: &[u64],
    max_r: u64,
) -> Vec<u64> {
    bs.explore(g, v, max_r);
    let mut out = vec![0u64; radii.len()];
    let mut idx = 0;
    let mut count = 0u64;
    for &w in bs.reached() {
        let d = bs.distance(w).unwrap() as u64;
        while idx < radii.len() && radii[idx] < d {
            out[idx] = count;
            idx += 1;
        }
        if mask[w] {
            count += 1;
        }
    }
    for slot in out.iter_mut().skip(idx) {
        *slot = count;
    }
    out
}

/// Sampled growth of a long-edge graph around junction centers, counting
/// the hidden interior vertices.
pub fn long_edge_growth(g: &LongEdgeGraph, centers: &[usize], radii: &[u64]) -> Result<GrowthProfile> {
    check_radii(radii)?;
    if centers.is_empty() {
        return Err(Error::EmptySample);
    }
    for &c in centers {
        if c >= g.junction_count() {
            return Err(Error::VertexOutOfRange {
                vertex: c,
                count: g.junction_count(),
            });
        }
    }
    let gammas = centers
        .par_iter()
        .map(|&c| {
            let dist = g.junction_distances(c);
            radii.iter().map(|&r| g.ball_size_from(&dist, r)).collect::<Vec<_>>()
        })
        .reduce(
            || vec![0u64; radii.len()],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x = (*x).max(y);
                }
                a
            },
        );
    Ok(GrowthProfile {
        entries: radii
            .iter()
            .zip(gammas)
            .map(|(&radius, gamma)| GrowthEntry { radius, gamma })
            .collect(),
        mode: ProfileMode::Sampled {
            centers: centers.to_vec(),
        },
        subset: "all".into(),
        saturates_at: None,
    })
}

/// Least-squares fit of `log γ` against `log r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual of the fit in natural-log units.
    pub residual: f64,
    pub points: usize,
}

pub fn loglog_slope(p: &GrowthProfile, lo: u64, hi: u64) -> Result<SlopeFit> {
    if lo < 2 {
        return Err(Error::DegenerateWindow(format!("window starts at {lo} < 2")));
    }
    let pts: Vec<(f64, f64)> = p
        .entries
        .iter()
        .filter(|e| e.radius >= lo && e.radius <= hi)
        .map(|e| ((e.radius as f64).ln(), (e.gamma.max(1) as f64).ln()))
        .collect();
    if pts.len() < 3 {
        return Err(Error::DegenerateWindow(format!(
            "{} profile points in [{lo}, {hi}], need 3",
            pts.len()
        )));
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::DegenerateWindow("all radii coincide".into()));
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = (pts
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum::<f64>()
        / k)
        .sqrt();
    Ok(SlopeFit {
        slope,
        intercept,
        residual,
        points: pts.len(),
    })
}

/// Level coefficient `b_k = (4s)^-k · 4^-(k(k-1)/2)`.
///
/// These satisfy `b_{k-1} = 4s · 4^(k-1) · b_k`, which is twice what the
/// annulus averaging step consumes, so a violation can always be repaired by
/// a swap. `b_0 = 1`.
pub fn level_coefficient(k: u32, s: u32) -> BigRational {
    let den = BigInt::from(4u64 * s as u64).pow(k) * BigInt::from(4u32).pow(k * k.saturating_sub(1) / 2);
    BigRational::new(BigInt::one(), den)
}

/// `b_k · n^k`.
pub fn level_threshold(k: u32, s: u32, n: u64) -> BigRational {
    level_coefficient(k, s) * BigRational::from_integer(BigInt::from(n).pow(k))
}

/// Whether `count <= bound`, exactly.
pub fn within(count: u64, bound: &BigRational) -> bool {
    BigRational::from_integer(BigInt::from(count)) <= *bound
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub m: u32,
    pub n0: u64,
    pub gamma: u64,
}

/// Smallest `m >= 1` such that `n0 = 4^m · s` is covered by the profile and
/// `γ(n0) <= b_k · n0^k`.
pub fn degree_witness(p: &GrowthProfile, k: u32, s: u32, allow_sampled: bool) -> Result<Option<Witness>> {
    scan_witness(p, k, s, 1, allow_sampled)
}

/// Witness search starting at `m = m_min`.
pub(crate) fn scan_witness(
    p: &GrowthProfile,
    k: u32,
    s: u32,
    m_min: u32,
    allow_sampled: bool,
) -> Result<Option<Witness>> {
    if !p.is_exact() && !allow_sampled {
        return Err(Error::SampledProfile);
    }
    if s == 0 {
        return Err(Error::Precondition("scale must be >= 1".into()));
    }
    for m in m_min..40 {
        let Some(n0) = 4u64.checked_pow(m).and_then(|f| f.checked_mul(s as u64)) else {
            break;
        };
        let Some(gamma) = p.gamma_at(n0) else {
            if p.max_radius().is_some_and(|r| n0 > r) && p.saturates_at.is_none() {
                break;
            }
            continue;
        };
        if within(gamma, &level_threshold(k, s, n0)) {
            return Ok(Some(Witness { m, n0, gamma }));
        }
        if k == 0 && p.saturates_at.is_some_and(|sat| n0 >= sat) {
            break;
        }
    }
    Ok(None)
}

/// Radii `4^m · s` for `m = 0, 1, ..` up to the first one that reaches
/// `vertex_count - 1`, past which every profile is constant.
pub fn witness_radii(s: u32, vertex_count: usize) -> Vec<u64> {
    let top = vertex_count.saturating_sub(1).max(1) as u64;
    let mut out = Vec::new();
    let mut r = s.max(1) as u64;
    loop {
        out.push(r);
        if r >= top {
            break;
        }
        r *= 4;
    }
    out
}

/// Rational to `f64`, for reporting only.
pub fn approx(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}
