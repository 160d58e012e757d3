//! Sparsified separating sets.
//!
//! A set `Y ⊆ X` is `(D, s)`-separating when every `s`-component of `X ∖ Y`
//! has diameter at most `D`. Starting from `Y = X`, [`sparsify`] repeatedly
//! finds a center whose `n1`-ball holds more than `τ` points of `Y` and swaps
//! that ball's share of `Y` for the sparsest thickness-`s` annulus between
//! radii `n1` and `n0 = 4·n1`. Every swap shrinks `Y` and keeps it
//! separating; at the fixed point `γ_Y(n1) <= τ`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{scale_components, set_diameter, set_diameter_at_most, AnnulusSpec, BallSearch, Graph, VertexSet};
use crate::growth::{counts_by_radius, growth_function, level_threshold, within, Centers};

/// Parameters of one recursion level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeparatorParams {
    /// Level `k >= 1`: the ambient set has growth below `b_k · n^k`.
    pub level: u32,
    pub scale: u32,
    pub m: u32,
    /// `4^m · s`.
    pub n0: u64,
    /// `n0 / 4`.
    pub n1: u64,
    /// `D = 2 · n0`.
    pub diameter_bound: u64,
    /// `τ = b_{k-1} · n1^(k-1)`.
    pub threshold: BigRational,
}

impl SeparatorParams {
    pub fn new(level: u32, scale: u32, m: u32) -> Result<Self> {
        if level == 0 || scale == 0 || m == 0 {
            return Err(Error::Precondition(format!(
                "separator needs level, scale and m all >= 1 (got {level}, {scale}, {m})"
            )));
        }
        let n0 = 4u64
            .checked_pow(m)
            .and_then(|f| f.checked_mul(scale as u64))
            .filter(|&n| n <= u32::MAX as u64)
            .ok_or_else(|| Error::Precondition(format!("4^{m} · {scale} overflows")))?;
        let n1 = n0 / 4;
        Ok(Self {
            level,
            scale,
            m,
            n0,
            n1,
            diameter_bound: 2 * n0,
            threshold: level_threshold(level - 1, scale, n1),
        })
    }

    /// `b_k · n0^k`, the growth hypothesis at this level.
    pub fn hypothesis_bound(&self) -> BigRational {
        level_threshold(self.level, self.scale, self.n0)
    }

    /// `(2s / n0) · b_k · n0^k`, the averaging bound on the sparsest annulus.
    pub fn averaging_bound(&self) -> BigRational {
        BigRational::new(BigInt::from(2 * self.scale as u64), BigInt::from(self.n0))
            * self.hypothesis_bound()
    }

    /// Checks `(2s/n0)·b_k·n0^k <= b_{k-1}·n1^(k-1)` for these parameters.
    pub fn chain_closes(&self) -> bool {
        self.averaging_bound() <= self.threshold
    }

    /// `τ` rendered as `num/den`.
    pub fn threshold_string(&self) -> String {
        if self.threshold.is_zero() {
            "0".into()
        } else {
            format!("{}/{}", self.threshold.numer(), self.threshold.denom())
        }
    }

    fn threshold_floor(&self) -> u64 {
        floor_u64(&self.threshold)
    }
}

fn floor_u64(q: &BigRational) -> u64 {
    if q.is_negative() {
        return 0;
    }
    q.floor().to_integer().to_u64().unwrap_or(u64::MAX)
}

/// One annulus swap.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SwapRecord {
    pub center: usize,
    /// `|B_v(n1) ∩ Y|` before the swap.
    pub removed: u64,
    pub annulus: AnnulusSpec,
    /// `|A ∩ X|`.
    pub annulus_size: u64,
    /// Points of `A ∩ X` that were not already in `Y` after removal.
    pub added: u64,
    pub previous_size: u64,
    pub resulting_size: u64,
}

/// Outcome of a separation check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SeparationCheck {
    Separating,
    /// A component of `X ∖ Y` too wide for the bound; `diameter` is `None`
    /// when the component is not even connected in the ambient graph.
    Violated {
        component: VertexSet,
        diameter: Option<u64>,
    },
}

impl SeparationCheck {
    pub fn holds(&self) -> bool {
        matches!(self, SeparationCheck::Separating)
    }
}

/// Whether every `s`-component of `X ∖ Y` has diameter at most `d`.
pub fn is_separating(g: &Graph, x: &VertexSet, y: &VertexSet, d: u64, s: u32) -> Result<SeparationCheck> {
    if !y.is_subset(x) {
        return Err(Error::Precondition("separating set must lie inside the ambient set".into()));
    }
    x.check_range(g.vertex_count())?;
    for comp in scale_components(g, &x.difference(y), s) {
        if !set_diameter_at_most(g, &comp, d) {
            let diameter = set_diameter(g, &comp);
            return Ok(SeparationCheck::Violated {
                component: comp,
                diameter,
            });
        }
    }
    Ok(SeparationCheck::Separating)
}

/// Smallest vertex `v` with `|B_v(n1) ∩ Y| > τ`.
pub fn find_violation(g: &Graph, y: &VertexSet, n1: u64, tau: &BigRational) -> Option<usize> {
    if y.is_empty() {
        return None;
    }
    let n = g.vertex_count();
    let mask = y.mask(n);
    let cutoff = floor_u64(tau);
    (0..n)
        .into_par_iter()
        .map_init(
            || BallSearch::new(n),
            |bs, v| (v, counts_by_radius(g, bs, &mask, v, &[n1], n1)[0]),
        )
        .find_first(|&(_, c)| c > cutoff)
        .map(|(v, _)| v)
}

/// Thickness-`s` shell bands partitioning radii `n1+1 ..= n0` around `v`,
/// and the one with fewest points of `x` (innermost on ties).
pub fn sparsest_annulus(
    g: &Graph,
    x: &VertexSet,
    v: usize,
    n1: u64,
    n0: u64,
    s: u32,
) -> Result<(AnnulusSpec, VertexSet)> {
    g.check_vertex(v)?;
    let mut bs = BallSearch::for_graph(g);
    let mask = x.mask(g.vertex_count());
    sparsest_annulus_with(g, &mut bs, &mask, v, n1, n0, s)
}

fn sparsest_annulus_with(
    g: &Graph,
    bs: &mut BallSearch,
    x_mask: &[bool],
    v: usize,
    n1: u64,
    n0: u64,
    s: u32,
) -> Result<(AnnulusSpec, VertexSet)> {
    if s == 0 || n1 + (s as u64) > n0 {
        return Err(Error::NoAnnulus {
            inner: n1,
            outer: n0,
            scale: s,
        });
    }
    let bands = ((n0 - n1) / s as u64) as usize;
    let mut counts = vec![0u64; bands];
    bs.explore(g, v, n0);
    for &w in bs.reached() {
        let d = bs.distance(w).unwrap() as u64;
        if d > n1 && x_mask[w] {
            let band = ((d - n1 - 1) / s as u64) as usize;
            if band < bands {
                counts[band] += 1;
            }
        }
    }
    let best = (0..bands).min_by_key(|&i| (counts[i], i)).unwrap();
    let inner = n1 + 1 + best as u64 * s as u64;
    let spec = AnnulusSpec::shells(v, inner, s)?;
    let points: VertexSet = bs
        .reached()
        .iter()
        .copied()
        .filter(|&w| {
            let d = bs.distance(w).unwrap() as u64;
            d >= spec.inner && d <= spec.outer && x_mask[w]
        })
        .collect();
    Ok((spec, points))
}

/// `Y' = (Y ∖ B_v(n1)) ∪ (A ∩ X)`.
pub fn swap(
    g: &Graph,
    x: &VertexSet,
    y: &VertexSet,
    v: usize,
    annulus_points: &VertexSet,
    n1: u64,
) -> Result<VertexSet> {
    g.check_vertex(v)?;
    let ball = crate::graph::ball(g, v, n1);
    let added = annulus_points.intersection(x);
    let removed = ball.intersection(y);
    if added.len() >= removed.len() {
        return Err(Error::Precondition(format!(
            "annulus holds {} points, ball holds {}; swap would not shrink the set",
            added.len(),
            removed.len()
        )));
    }
    if added.iter().any(|w| ball.contains(w)) {
        return Err(Error::Precondition("annulus meets the removed ball".into()));
    }
    Ok(y.difference(&ball).union(&added))
}

/// When to re-verify separation during a sparsify run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SafetyChecks {
    EverySwap,
    /// Every `n`-th swap, plus the final set.
    Periodic(usize),
    FinalOnly,
}

impl SafetyChecks {
    /// Every swap for small debug runs; periodic otherwise.
    pub fn default_for(x_len: usize) -> Self {
        if cfg!(debug_assertions) && x_len <= 2048 {
            SafetyChecks::EverySwap
        } else {
            SafetyChecks::Periodic(64)
        }
    }

    fn due(&self, swap_index: usize) -> bool {
        match *self {
            SafetyChecks::EverySwap => true,
            SafetyChecks::Periodic(p) => p > 0 && swap_index % p == p - 1,
            SafetyChecks::FinalOnly => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sparsified {
    pub y: VertexSet,
    pub trace: Vec<SwapRecord>,
}

/// Runs the annulus-swap local search from `Y = X` to its fixed point.
pub fn sparsify(g: &Graph, x: &VertexSet, params: &SeparatorParams) -> Result<Sparsified> {
    x.check_range(g.vertex_count())?;
    let gamma = growth_function(g, x, &[params.n0], &Centers::All)?.entries[0].gamma;
    sparsify_checked(g, x, params, gamma, SafetyChecks::default_for(x.len()))
}

/// [`sparsify`] with `γ_X(n0)` supplied by a caller that already holds an
/// exact profile.
pub(crate) fn sparsify_checked(
    g: &Graph,
    x: &VertexSet,
    params: &SeparatorParams,
    gamma_n0: u64,
    checks: SafetyChecks,
) -> Result<Sparsified> {
    if !within(gamma_n0, &params.hypothesis_bound()) {
        return Err(Error::Hypothesis {
            level: params.level,
            detail: format!(
                "γ_X({}) = {} exceeds b_{}·n0^{} ≈ {:.4}",
                params.n0,
                gamma_n0,
                params.level,
                params.level,
                crate::growth::approx(&params.hypothesis_bound())
            ),
        });
    }
    let n = g.vertex_count();
    let s = params.scale;
    let (n0, n1) = (params.n0, params.n1);
    let cutoff = params.threshold_floor();
    let averaging = params.averaging_bound();
    let x_mask = x.mask(n);
    let mut y_mask = x_mask.clone();
    let mut y_size = x.len() as u64;

    let mut counts: Vec<i64> = (0..n)
        .into_par_iter()
        .map_init(
            || BallSearch::new(n),
            |bs, v| counts_by_radius(g, bs, &y_mask, v, &[n1], n1)[0] as i64,
        )
        .collect();

    let mut bs = BallSearch::new(n);
    let mut trace = Vec::new();
    // Ascending scan, restarted after every swap.
    while let Some(v) = (0..n).find(|&v| counts[v] as u64 > cutoff) {

        let removed: Vec<usize> = bs
            .explore(g, v, n1)
            .iter()
            .copied()
            .filter(|&w| y_mask[w])
            .collect();
        let (spec, annulus_points) = sparsest_annulus_with(g, &mut bs, &x_mask, v, n1, n0, s)?;
        let removed_count = removed.len() as u64;
        let annulus_size = annulus_points.len() as u64;

        let a = BigRational::from_integer(BigInt::from(annulus_size));
        let r = BigRational::from_integer(BigInt::from(removed_count));
        if !(a <= averaging && averaging <= params.threshold && params.threshold < r) {
            return Err(Error::AveragingChain {
                center: v,
                detail: format!(
                    "|A| = {annulus_size}, averaging bound ≈ {:.4}, τ ≈ {:.4}, |B ∩ Y| = {removed_count}",
                    crate::growth::approx(&averaging),
                    crate::growth::approx(&params.threshold)
                ),
            });
        }

        for &w in &removed {
            y_mask[w] = false;
        }
        let added: Vec<usize> = annulus_points.iter().filter(|&w| !y_mask[w]).collect();
        for &w in &added {
            y_mask[w] = true;
        }
        apply_ball_deltas(g, &removed, n1, -1, &mut counts);
        apply_ball_deltas(g, &added, n1, 1, &mut counts);

        let previous = y_size;
        y_size = y_size - removed_count + added.len() as u64;
        debug_assert!(y_size < previous);
        trace.push(SwapRecord {
            center: v,
            removed: removed_count,
            annulus: spec,
            annulus_size,
            added: added.len() as u64,
            previous_size: previous,
            resulting_size: y_size,
        });

        if checks.due(trace.len() - 1) {
            let y = VertexSet::from_mask(&y_mask);
            if let SeparationCheck::Violated { diameter, .. } =
                is_separating(g, x, &y, params.diameter_bound, s)?
            {
                return Err(Error::Verification(format!(
                    "swap {} at center {v} broke separation (component diameter {diameter:?})",
                    trace.len()
                )));
            }
        }
    }

    let y = VertexSet::from_mask(&y_mask);
    if let SeparationCheck::Violated { diameter, .. } = is_separating(g, x, &y, params.diameter_bound, s)? {
        return Err(Error::Verification(format!(
            "sparsified set is not ({}, {s})-separating: component diameter {diameter:?}",
            params.diameter_bound
        )));
    }
    Ok(Sparsified { y, trace })
}

/// Adds `sign` to `counts[u]` for every `u` within `radius` of each point.
fn apply_ball_deltas(g: &Graph, points: &[usize], radius: u64, sign: i64, counts: &mut [i64]) {
    if points.is_empty() {
        return;
    }
    let n = g.vertex_count();
    let delta = points
        .par_iter()
        .fold(
            || (BallSearch::new(n), vec![0i64; n]),
            |(mut bs, mut acc), &p| {
                for &u in bs.explore(g, p, radius) {
                    acc[u] += sign;
                }
                (bs, acc)
            },
        )
        .map(|(_, acc)| acc)
        .reduce(
            || vec![0i64; n],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                a
            },
        );
    for (c, d) in counts.iter_mut().zip(delta) {
        *c += d;
    }
}

/// Serializes a trace as JSON lines.
pub fn trace_to_json_lines(trace: &[SwapRecord]) -> Result<String> {
    let mut out = String::new();
    for rec in trace {
        out.push_str(&serde_json::to_string(rec)?);
        out.push('\n');
    }
    Ok(out)
}
