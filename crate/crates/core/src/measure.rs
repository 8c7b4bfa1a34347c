//! Hausdorff-type contents with witnessed coverings, covering numbers, box
//! counting, and log-log dimension fits.
//!
//! On finite sets countable and finite coverings coincide, so one estimator
//! serves both the `H` and `HF` families. Every estimate carries the covering
//! that realizes it; only the exact mode certifies the infimum itself.

use std::collections::{BinaryHeap, HashSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::{diameter_unchecked, FiniteMetricSpace, SetFamily, SubsetRef};

/// Default cap on the number of points for exact minimization.
pub const DEFAULT_EXACT_LIMIT: usize = 18;

/// Hard cap; the subset tables grow as `2^n`.
pub const MAX_EXACT_LIMIT: usize = 24;

/// Grid coordinates within this fraction of a cell side below a cell boundary
/// are assigned to the upper cell, so points constructed to lie on a boundary
/// land there deterministically despite rounding.
pub const GRID_BOUNDARY_SNAP: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CoverMode {
    Exact,
    Greedy,
    Grid,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoverConfig {
    pub mode: CoverMode,
    pub exact_limit: usize,
}

impl CoverConfig {
    pub fn exact() -> Self {
        CoverConfig {
            mode: CoverMode::Exact,
            exact_limit: DEFAULT_EXACT_LIMIT,
        }
    }

    pub fn greedy() -> Self {
        CoverConfig {
            mode: CoverMode::Greedy,
            ..Self::exact()
        }
    }

    pub fn grid() -> Self {
        CoverConfig {
            mode: CoverMode::Grid,
            ..Self::exact()
        }
    }

    pub fn with_exact_limit(mut self, limit: usize) -> Self {
        self.exact_limit = limit;
        self
    }
}

impl Default for CoverConfig {
    fn default() -> Self {
        Self::exact()
    }
}

/// A covering of a target set together with `sum (diam A_i)^alpha`.
///
/// `delta` is the strict diameter cap (`f64::INFINITY` for contents).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoveringEstimate {
    pub alpha: f64,
    #[serde(with = "infinite_as_null")]
    pub delta: f64,
    pub value: f64,
    pub mode: CoverMode,
    pub cover: SetFamily,
}

impl CoveringEstimate {
    /// Number of nonempty members.
    pub fn count(&self) -> usize {
        self.cover.members.iter().filter(|m| !m.is_empty()).count()
    }

    /// Only exact-mode values are the infimum; the rest are upper bounds.
    pub fn is_certified_minimum(&self) -> bool {
        self.mode == CoverMode::Exact
    }
}

mod infinite_as_null {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
    }
}

/// `(diam A)^alpha` with the zero-exponent convention: 1 for any nonempty set.
#[inline]
pub fn diameter_term(diam: f64, alpha: f64) -> f64 {
    if alpha == 0.0 {
        1.0
    } else {
        diam.powf(alpha)
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha >= 0.0 && alpha.is_finite() {
        Ok(())
    } else {
        Err(Error::param("alpha", format!("{alpha} must be finite and nonnegative")))
    }
}

fn check_delta(delta: f64) -> Result<()> {
    if delta > 0.0 {
        Ok(())
    } else {
        Err(Error::param("delta", format!("{delta} must be positive")))
    }
}

/// `sum_i (diam A_i)^alpha`; empty members contribute 0, an empty family sums to 0.
pub fn hausdorff_sum(space: &FiniteMetricSpace, cover: &SetFamily, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    let mut total = 0.0;
    for m in &cover.members {
        space.check_subset(m)?;
        if !m.is_empty() {
            total += diameter_term(diameter_unchecked(space, m.indices()), alpha);
        }
    }
    Ok(total)
}

/// Minimum number of sets of diameter `< delta` covering `set` (exact mode),
/// or the size of a greedy / grid covering (an upper bound).
pub fn covering_number(space: &FiniteMetricSpace, set: &SubsetRef, delta: f64, config: CoverConfig) -> Result<usize> {
    if set.is_empty() {
        check_delta(delta)?;
        return Ok(0);
    }
    Ok(content_upper_bound(space, set, 0.0, delta, config)?.count())
}

/// A witnessed covering of `set` by pieces of diameter `< delta`, minimizing
/// `sum (diam)^alpha` in exact mode.
pub fn content_upper_bound(
    space: &FiniteMetricSpace,
    set: &SubsetRef,
    alpha: f64,
    delta: f64,
    config: CoverConfig,
) -> Result<CoveringEstimate> {
    check_alpha(alpha)?;
    check_delta(delta)?;
    space.check_subset(set)?;
    if set.is_empty() {
        return Err(Error::EmptySet("content of the empty set"));
    }
    let members = match config.mode {
        CoverMode::Exact => {
            let limit = config.exact_limit.min(MAX_EXACT_LIMIT);
            if set.len() > limit {
                return Err(Error::ExactLimitExceeded { size: set.len(), limit });
            }
            exact_partition(space, set.indices(), alpha, delta)
        }
        CoverMode::Greedy => greedy_balls(space, set.indices(), delta),
        CoverMode::Grid => grid_cells(space, set.indices(), delta)?,
    };
    let cover = SetFamily::new(members);
    let value = hausdorff_sum(space, &cover, alpha)?;
    Ok(CoveringEstimate {
        alpha,
        delta,
        value,
        mode: config.mode,
        cover,
    })
}

/// Optimal partition into blocks of diameter `< delta` by dynamic programming
/// over subsets. Any covering can be shrunk to a partition without raising the
/// sum, so partitions suffice. Blocks are listed by their lowest point.
fn exact_partition(space: &FiniteMetricSpace, idx: &[usize], alpha: f64, delta: f64) -> Vec<SubsetRef> {
    let m = idx.len();
    let full = (1usize << m) - 1;
    let size = 1usize << m;

    // cost[mask] = (diam mask)^alpha, or infinity when the block is too wide
    let mut wide = vec![0.0f64; size];
    let mut cost = vec![f64::INFINITY; size];
    let mut pair = vec![0.0f64; m * m];
    for a in 0..m {
        for b in 0..m {
            pair[a * m + b] = space.base_distance(idx[a], idx[b]);
        }
    }
    for mask in 1..size {
        let low = mask.trailing_zeros() as usize;
        let rest = mask & (mask - 1);
        let mut w = wide[rest];
        let mut r = rest;
        while r != 0 {
            let j = r.trailing_zeros() as usize;
            w = w.max(pair[low * m + j]);
            r &= r - 1;
        }
        wide[mask] = w;
        let diam = space.apply_exponent(w);
        if diam < delta {
            cost[mask] = diameter_term(diam, alpha);
        }
    }
    drop(wide);

    let mut best = vec![f64::INFINITY; size];
    let mut choice = vec![0u32; size];
    best[0] = 0.0;
    for s in 1..size {
        let lowbit = s & s.wrapping_neg();
        let rest = s ^ lowbit;
        let mut sub = rest;
        loop {
            let block = sub | lowbit;
            let c = cost[block];
            if c.is_finite() {
                let cand = c + best[s ^ block];
                if cand < best[s] {
                    best[s] = cand;
                    choice[s] = block as u32;
                }
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & rest;
        }
    }

    let mut blocks = Vec::new();
    let mut s = full;
    while s != 0 {
        let block = choice[s] as usize;
        blocks.push(SubsetRef::new((0..m).filter(|&k| block >> k & 1 == 1).map(|k| idx[k])));
        s ^= block;
    }
    blocks
}

/// Greedy ball cover: repeatedly take the uncovered center whose ball of
/// radius just under `delta / 2` holds the most uncovered points, lowest
/// center index first on ties.
fn greedy_balls(space: &FiniteMetricSpace, idx: &[usize], delta: f64) -> Vec<SubsetRef> {
    let m = idx.len();
    let radius = delta / 2.0;
    let mut covered = vec![false; m];
    let in_ball = |c: usize, x: usize| space.distance(idx[c], idx[x]) < radius;
    let count = |c: usize, covered: &[bool]| (0..m).filter(|&x| !covered[x] && in_ball(c, x)).count();

    // counts only shrink as points get covered, so stale heap keys are upper bounds
    let mut heap: BinaryHeap<(usize, std::cmp::Reverse<usize>)> =
        (0..m).map(|c| (count(c, &covered), std::cmp::Reverse(c))).collect();
    let mut members = Vec::new();
    let mut remaining = m;
    while remaining > 0 {
        let (stale, std::cmp::Reverse(c)) = heap.pop().expect("uncovered points have centers");
        if covered[c] {
            continue;
        }
        let fresh = count(c, &covered);
        if fresh < stale {
            heap.push((fresh, std::cmp::Reverse(c)));
            continue;
        }
        let mut ball: Vec<usize> = (0..m).filter(|&x| !covered[x] && in_ball(c, x)).collect();
        let mut block: Vec<usize> = ball.iter().map(|&k| idx[k]).collect();
        if diameter_unchecked(space, &block) >= delta {
            // rounding broke the triangle inequality; fall back to the center
            ball = vec![c];
            block = vec![idx[c]];
        }
        for &k in &ball {
            covered[k] = true;
        }
        remaining -= ball.len();
        members.push(SubsetRef::new(block));
    }
    members
}

fn grid_cell_index(coords: &[f64], side: f64) -> Vec<i64> {
    coords
        .iter()
        .map(|&c| (c / side + GRID_BOUNDARY_SNAP).floor() as i64)
        .collect()
}

/// Occupied cells of an origin-anchored grid whose cells have diameter
/// `< delta`, as a covering.
fn grid_cells(space: &FiniteMetricSpace, idx: &[usize], delta: f64) -> Result<Vec<SubsetRef>> {
    let dim = space.dim().ok_or(Error::NotEuclidean)?;
    let side = if delta.is_finite() {
        // cell diameter side * sqrt(dim) must stay below delta after the exponent
        delta.powf(1.0 / space.exponent()) / (dim as f64).sqrt() * (1.0 - 1e-9)
    } else {
        return Ok(vec![SubsetRef::new(idx.iter().copied())]);
    };
    let mut cells: std::collections::BTreeMap<Vec<i64>, Vec<usize>> = Default::default();
    for &i in idx {
        let p = space.point(i).expect("euclidean point");
        cells.entry(grid_cell_index(p, side)).or_default().push(i);
    }
    let mut members = Vec::with_capacity(cells.len());
    for (_, pts) in cells {
        if diameter_unchecked(space, &pts) < delta {
            members.push(SubsetRef::new(pts));
        } else {
            members.extend(pts.into_iter().map(|p| SubsetRef::new([p])));
        }
    }
    Ok(members)
}

/// Estimates for each `delta` in a strictly decreasing schedule. In exact mode
/// the values are nondecreasing along the schedule; the last one is the proxy
/// for the measure itself.
pub fn measure_profile(
    space: &FiniteMetricSpace,
    set: &SubsetRef,
    alpha: f64,
    schedule: &[f64],
    config: CoverConfig,
) -> Result<Vec<CoveringEstimate>> {
    if schedule.is_empty() {
        return Err(Error::param("delta_schedule", "empty schedule"));
    }
    if schedule.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::param("delta_schedule", "must be strictly decreasing"));
    }
    schedule
        .par_iter()
        .map(|&delta| content_upper_bound(space, set, alpha, delta, config))
        .collect()
}

/// Geometric schedule with ratio 1/2 from `diam(set)` down to twice the
/// smallest positive gap.
pub fn default_schedule(space: &FiniteMetricSpace, set: &SubsetRef) -> Result<Vec<f64>> {
    space.check_subset(set)?;
    let idx = set.indices();
    let mut top = 0.0f64;
    let mut gap = f64::INFINITY;
    for (k, &i) in idx.iter().enumerate() {
        for &j in &idx[k + 1..] {
            let d = space.distance(i, j);
            top = top.max(d);
            if d > 0.0 {
                gap = gap.min(d);
            }
        }
    }
    if top == 0.0 {
        return Ok(vec![1.0]);
    }
    let floor = 2.0 * gap;
    let mut out = vec![top];
    let mut d = top / 2.0;
    while d >= floor {
        out.push(d);
        d /= 2.0;
    }
    Ok(out)
}

/// Number of occupied cells `[k s, (k+1) s)` per axis, anchored at the origin.
pub fn grid_box_count(space: &FiniteMetricSpace, side: f64) -> Result<usize> {
    if !(side > 0.0) {
        return Err(Error::param("s", format!("cell side {side} must be positive")));
    }
    if !space.is_euclidean() {
        return Err(Error::NotEuclidean);
    }
    let cells: HashSet<Vec<i64>> = (0..space.len())
        .map(|i| grid_cell_index(space.point(i).expect("euclidean point"), side))
        .collect();
    Ok(cells.len())
}

/// Covering numbers of the whole space at each scale, for box-counting in
/// spaces without coordinates.
pub fn covering_counts(space: &FiniteMetricSpace, scales: &[f64], config: CoverConfig) -> Result<Vec<usize>> {
    let all = space.all();
    scales
        .par_iter()
        .map(|&s| covering_number(space, &all, s, config))
        .collect()
}

/// Least-squares fit of `log(count)` against `log(1/scale)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DimensionFit {
    pub scales: Vec<f64>,
    pub counts: Vec<usize>,
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// False when some count drops as the scale shrinks (possible for greedy counts).
    pub counts_monotone: bool,
}

/// Fits below this r-squared are flagged as unreliable.
pub const RELIABLE_R_SQUARED: f64 = 0.99;

impl DimensionFit {
    pub fn is_reliable(&self) -> bool {
        self.r_squared >= RELIABLE_R_SQUARED && self.counts_monotone
    }

    /// Rows `(scale, count, log_inv_scale, log_count)`.
    pub fn table(&self) -> Vec<(f64, usize, f64, f64)> {
        self.scales
            .iter()
            .zip(&self.counts)
            .map(|(&s, &c)| (s, c, (1.0 / s).ln(), (c as f64).ln()))
            .collect()
    }
}

pub fn dimension_fit(scales: &[f64], counts: &[usize]) -> Result<DimensionFit> {
    if scales.len() != counts.len() {
        return Err(Error::param("counts", "length differs from scales"));
    }
    if scales.len() < 3 {
        return Err(Error::param("scales", "need at least 3 scale points"));
    }
    if scales.iter().any(|s| !(*s > 0.0 && s.is_finite())) {
        return Err(Error::param("scales", "scales must be positive and finite"));
    }
    if scales.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::param("scales", "scales must be strictly decreasing"));
    }
    if counts.contains(&0) {
        return Err(Error::param("counts", "counts must be positive"));
    }
    let xs: Vec<f64> = scales.iter().map(|s| (1.0 / s).ln()).collect();
    let ys: Vec<f64> = counts.iter().map(|&c| (c as f64).ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| {
            let r = y - (intercept + slope * x);
            r * r
        })
        .sum();
    // a constant series is fit perfectly by a flat line
    let r_squared = if syy == 0.0 {
        1.0
    } else {
        (1.0 - sse / syy).clamp(0.0, 1.0)
    };
    Ok(DimensionFit {
        scales: scales.to_vec(),
        counts: counts.to_vec(),
        slope,
        intercept,
        r_squared,
        counts_monotone: counts.windows(2).all(|w| w[1] >= w[0]),
    })
}
