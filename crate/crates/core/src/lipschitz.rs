//! Lipschitz functions on finite samples.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::diameter_term;
use crate::metric::{diameter_unchecked, FiniteMetricSpace, SetFamily, SubsetRef};
use crate::realline::{step_chebyshev, IntervalSpec, StepFunction};

/// Relative slack allowed when checking a Lipschitz bound.
pub const LIPSCHITZ_TOLERANCE: f64 = 1e-12;

/// Real values on a subset of a finite metric space, aligned with the sorted
/// indices of `domain`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledFunction {
    domain: SubsetRef,
    values: Vec<f64>,
}

impl SampledFunction {
    pub fn new(domain: SubsetRef, values: Vec<f64>) -> Result<Self> {
        if domain.len() != values.len() {
            return Err(Error::param(
                "values",
                format!("{} values for a domain of {} points", values.len(), domain.len()),
            ));
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidFunction(format!("value {k} is not finite")));
        }
        Ok(SampledFunction { domain, values })
    }

    /// From `(index, value)` pairs in any order. Repeated indices are rejected.
    pub fn from_pairs(mut pairs: Vec<(usize, f64)>) -> Result<Self> {
        pairs.sort_by_key(|p| p.0);
        if let Some(w) = pairs.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(Error::param("domain", format!("index {} appears twice", w[0].0)));
        }
        let domain = SubsetRef::try_from_sorted(pairs.iter().map(|p| p.0).collect())?;
        Self::new(domain, pairs.into_iter().map(|p| p.1).collect())
    }

    /// Evaluates `f` at every point of `space`.
    pub fn on_space(space: &FiniteMetricSpace, f: impl Fn(usize) -> f64) -> Result<Self> {
        Self::new(space.all(), (0..space.len()).map(f).collect())
    }

    pub fn domain(&self) -> &SubsetRef {
        &self.domain
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Value at a point index, if it lies in the domain.
    pub fn get(&self, index: usize) -> Option<f64> {
        self.domain.indices().binary_search(&index).ok().map(|k| self.values[k])
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.domain.iter().zip(self.values.iter().copied())
    }
}

fn within(value: f64, bound: f64) -> bool {
    value <= bound + LIPSCHITZ_TOLERANCE * bound.abs().max(1.0)
}

/// `max |f(x) - f(y)| / d(x, y)` over pairs of distinct domain points: the
/// least `C` for which `f` is `C`-Lipschitz on its domain.
pub fn lipschitz_constant(space: &FiniteMetricSpace, f: &SampledFunction) -> Result<f64> {
    space.check_subset(f.domain())?;
    if f.len() < 2 {
        return Err(Error::param("f", "domain needs at least two points"));
    }
    let idx = f.domain.indices();
    let best = (0..idx.len())
        .into_par_iter()
        .map(|a| {
            let mut best: f64 = 0.0;
            for b in a + 1..idx.len() {
                let dv = (f.values[a] - f.values[b]).abs();
                let d = space.distance(idx[a], idx[b]);
                if d == 0.0 {
                    if dv > 0.0 {
                        return Err(Error::NotLipschitz(format!(
                            "points {} and {} coincide but carry values {} and {}",
                            idx[a], idx[b], f.values[a], f.values[b]
                        )));
                    }
                    continue;
                }
                best = best.max(dv / d);
            }
            Ok(best)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(best.into_iter().fold(0.0, f64::max))
}

fn require_lipschitz(space: &FiniteMetricSpace, f: &SampledFunction, c: f64) -> Result<()> {
    if !(c >= 0.0 && c.is_finite()) {
        return Err(Error::param("C", format!("{c} must be finite and nonnegative")));
    }
    if f.len() < 2 {
        space.check_subset(f.domain())?;
        return Ok(());
    }
    let l = lipschitz_constant(space, f)?;
    if within(l, c) {
        Ok(())
    } else {
        Err(Error::NotLipschitz(format!("Lipschitz constant {l} exceeds C = {c}")))
    }
}

/// `h_hat(x) = min_{y in E} h(y) + C d(x, y)` for a `C`-Lipschitz `h` on `E`.
/// The bound is checked once at construction.
#[derive(Debug, Clone)]
pub struct McShaneExtension<'a> {
    space: &'a FiniteMetricSpace,
    h: &'a SampledFunction,
    c: f64,
}

impl<'a> McShaneExtension<'a> {
    pub fn new(space: &'a FiniteMetricSpace, h: &'a SampledFunction, c: f64) -> Result<Self> {
        if h.is_empty() {
            return Err(Error::EmptySet("extension needs a nonempty domain"));
        }
        require_lipschitz(space, h, c)?;
        Ok(McShaneExtension { space, h, c })
    }

    pub fn eval(&self, query: usize) -> Result<f64> {
        self.space.check_index(query)?;
        if let Some(v) = self.h.get(query) {
            return Ok(v);
        }
        Ok(self
            .h
            .pairs()
            .map(|(y, v)| v + self.c * self.space.distance(query, y))
            .fold(f64::INFINITY, f64::min))
    }

    pub fn eval_many(&self, queries: &[usize]) -> Result<Vec<f64>> {
        queries.par_iter().map(|&q| self.eval(q)).collect()
    }
}

pub fn mcshane_extend(space: &FiniteMetricSpace, h: &SampledFunction, c: f64, query: usize) -> Result<f64> {
    McShaneExtension::new(space, h, c)?.eval(query)
}

/// `f_j(x) = min_y f(y) + j d(x, y)` over the whole space; `f` must be defined
/// everywhere.
pub fn inf_conv_approx(space: &FiniteMetricSpace, f: &SampledFunction, j: f64, query: usize) -> Result<f64> {
    Ok(inf_conv_approx_many(space, f, j, &[query])?[0])
}

pub fn inf_conv_approx_many(
    space: &FiniteMetricSpace,
    f: &SampledFunction,
    j: f64,
    queries: &[usize],
) -> Result<Vec<f64>> {
    if *f.domain() != space.all() {
        return Err(Error::param("f", "must be defined on every point of the space"));
    }
    if !(j > 0.0 && j.is_finite()) {
        return Err(Error::param("j", format!("{j} must be positive and finite")));
    }
    for &q in queries {
        space.check_index(q)?;
    }
    Ok(queries
        .par_iter()
        .map(|&x| {
            f.values
                .iter()
                .enumerate()
                .map(|(y, v)| v + j * space.distance(x, y))
                .fold(f64::INFINITY, f64::min)
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PushforwardCover {
    pub alpha: f64,
    pub c: f64,
    pub image: SetFamily,
    pub source_sum: f64,
    pub image_sum: f64,
    /// `C^alpha * source_sum`
    pub bound: f64,
}

/// Images `f(A_i)` of a cover under a point map `map[i]` from `src` into
/// `dst`, with the Hausdorff sums on both sides. The map must be
/// `C`-Lipschitz on the union of the cover.
pub fn pushforward_cover(
    src: &FiniteMetricSpace,
    dst: &FiniteMetricSpace,
    map: &[usize],
    cover: &SetFamily,
    alpha: f64,
    c: f64,
) -> Result<PushforwardCover> {
    if map.len() != src.len() {
        return Err(Error::param(
            "map",
            format!("{} images for {} source points", map.len(), src.len()),
        ));
    }
    if !(alpha >= 0.0 && alpha.is_finite()) {
        return Err(Error::param("alpha", format!("{alpha} must be finite and nonnegative")));
    }
    if !(c >= 0.0 && c.is_finite()) {
        return Err(Error::param("C", format!("{c} must be finite and nonnegative")));
    }
    for m in &cover.members {
        src.check_subset(m)?;
    }
    for &y in map {
        dst.check_index(y)?;
    }
    let union = cover.union();
    let idx = union.indices();
    for (a, &x) in idx.iter().enumerate() {
        for &y in &idx[a + 1..] {
            let (dx, dy) = (src.distance(x, y), dst.distance(map[x], map[y]));
            if !within(dy, c * dx) {
                return Err(Error::NotLipschitz(format!(
                    "d(f({x}), f({y})) = {dy} exceeds C d({x}, {y}) = {}",
                    c * dx
                )));
            }
        }
    }
    let image = SetFamily::new(
        cover
            .members
            .iter()
            .map(|m| m.iter().map(|x| map[x]).collect())
            .collect(),
    );
    let sum = |space: &FiniteMetricSpace, fam: &SetFamily| -> f64 {
        fam.members
            .iter()
            .filter(|m| !m.is_empty())
            .map(|m| diameter_term(diameter_unchecked(space, m.indices()), alpha))
            .sum()
    };
    let source_sum = sum(src, cover);
    let image_sum = sum(dst, &image);
    Ok(PushforwardCover {
        alpha,
        c,
        image,
        source_sum,
        image_sum,
        bound: diameter_term(c, alpha) * source_sum,
    })
}

/// Level-set estimate for a cover of `E = dom f`: the step function
/// `phi = sum_i (diam V_i)^(alpha - 1) 1_{J_i}` with `J_i` a slightly padded
/// open interval around `f(V_i)`, and its superlevel set `{phi > t}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelProfile {
    pub alpha: f64,
    pub t: f64,
    pub phi: StepFunction,
    pub phi_breakpoints: Vec<f64>,
    pub superlevel_intervals: Vec<IntervalSpec>,
    pub superlevel_length: f64,
    /// `t^-1 sum_i (diam V_i)^(alpha - 1) |J_i|`
    pub bound: f64,
    /// `C t^-1 sum_i (diam V_i)^alpha`, which `bound` exceeds only by padding.
    pub cover_bound: f64,
    pub padding: f64,
}

/// Relative padding of the intervals `J_i`, scaled by `diam f(E)`.
pub const LEVEL_PADDING: f64 = 1e-12;

pub fn level_profile(
    space: &FiniteMetricSpace,
    cover: &SetFamily,
    f: &SampledFunction,
    alpha: f64,
    c: f64,
    t: f64,
) -> Result<LevelProfile> {
    if !(alpha >= 1.0 && alpha.is_finite()) {
        return Err(Error::param("alpha", format!("{alpha} must be at least 1")));
    }
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::param("t", format!("{t} must be positive and finite")));
    }
    if cover.is_empty() {
        return Err(Error::EmptySet("cover has no members"));
    }
    if f.is_empty() {
        return Err(Error::EmptySet("f has an empty domain"));
    }
    for m in &cover.members {
        space.check_subset(m)?;
    }
    if !cover.covers(f.domain()) {
        return Err(Error::Precondition("cover does not contain the domain of f".into()));
    }
    require_lipschitz(space, f, c)?;

    let (lo_all, hi_all) = f
        .values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| (l.min(v), h.max(v)));
    let spread = hi_all - lo_all;
    let padding = LEVEL_PADDING * if spread > 0.0 { spread } else { 1.0 };

    let mut terms = Vec::new();
    let mut cover_sum = 0.0;
    for m in &cover.members {
        let diam = diameter_unchecked(space, m.indices());
        cover_sum += diameter_term(diam, alpha);
        let weight = diameter_term(diam, alpha - 1.0);
        let image: Vec<f64> = m.iter().filter_map(|x| f.get(x)).collect();
        if image.is_empty() || weight == 0.0 {
            continue;
        }
        let lo = image.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = image.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let j = IntervalSpec::open(lo - padding / 2.0, hi + padding / 2.0)?;
        terms.push((j, weight));
    }
    let phi = StepFunction::new(terms)?;
    let report = if phi.terms().is_empty() {
        None
    } else {
        Some(step_chebyshev(&phi, t)?)
    };
    Ok(LevelProfile {
        alpha,
        t,
        phi_breakpoints: phi.breakpoints(),
        superlevel_intervals: report.as_ref().map(|r| r.superlevel.clone()).unwrap_or_default(),
        superlevel_length: report.as_ref().map_or(0.0, |r| r.length),
        bound: report.as_ref().map_or(0.0, |r| r.bound),
        cover_bound: c * cover_sum / t,
        padding,
        phi,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(xs: &[f64]) -> FiniteMetricSpace {
        FiniteMetricSpace::line(xs).unwrap()
    }

    #[test]
    fn constants() {
        let s = line(&[0.0, 0.3, 1.0]);
        let flat = SampledFunction::on_space(&s, |_| 4.0).unwrap();
        assert_eq!(lipschitz_constant(&s, &flat).unwrap(), 0.0);
        let double = SampledFunction::on_space(&s, |i| 2.0 * [0.0, 0.3, 1.0][i]).unwrap();
        assert!((lipschitz_constant(&s, &double).unwrap() - 2.0).abs() < 1e-14);
        let one = SampledFunction::from_pairs(vec![(0, 1.0)]).unwrap();
        assert!(lipschitz_constant(&s, &one).is_err());
    }

    #[test]
    fn coincident_points() {
        let s = FiniteMetricSpace::euclidean(vec![vec![0.0], vec![0.0], vec![1.0]]).unwrap();
        let f = SampledFunction::on_space(&s, |i| i as f64).unwrap();
        assert!(matches!(lipschitz_constant(&s, &f), Err(Error::NotLipschitz(_))));
    }

    #[test]
    fn mcshane() {
        let s = line(&[0.0, 1.0, 0.5, 0.2]);
        let h = SampledFunction::from_pairs(vec![(0, 0.0), (1, 1.0)]).unwrap();
        assert!((mcshane_extend(&s, &h, 1.0, 2).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(mcshane_extend(&s, &h, 1.0, 1).unwrap(), 1.0);
        assert!(matches!(mcshane_extend(&s, &h, 0.5, 2), Err(Error::NotLipschitz(_))));
        let lo = mcshane_extend(&s, &h, 1.0, 3).unwrap();
        let hi = mcshane_extend(&s, &h, 3.0, 3).unwrap();
        assert!(lo <= hi);
    }

    #[test]
    fn inf_convolution() {
        let xs: Vec<f64> = (0..=10).map(|i| i as f64 / 10.0).collect();
        let s = line(&xs);
        let f = SampledFunction::on_space(&s, |i| if i == 10 { 1.0 } else { 0.0 }).unwrap();
        let fj = inf_conv_approx(&s, &f, 2.0, 10).unwrap();
        assert!((fj - 0.2).abs() < 1e-12);
        let lip = SampledFunction::on_space(&s, |i| xs[i] * 0.5).unwrap();
        for q in 0..s.len() {
            assert_eq!(inf_conv_approx(&s, &lip, 1.0, q).unwrap(), lip.values()[q]);
        }
        let partial = SampledFunction::from_pairs(vec![(0, 1.0)]).unwrap();
        assert!(inf_conv_approx(&s, &partial, 1.0, 0).is_err());
    }

    #[test]
    fn pushforward() {
        let xs = [0.0, 0.25, 0.5, 1.0];
        let src = line(&xs);
        let dst = line(&xs.map(|x| 2.0 * x));
        let cover = SetFamily::new(vec![SubsetRef::new([0, 1]), SubsetRef::new([1, 2, 3])]);
        let map = [0, 1, 2, 3];
        let r = pushforward_cover(&src, &dst, &map, &cover, 1.0, 2.0).unwrap();
        assert!((r.image_sum - 2.0 * r.source_sum).abs() < 1e-15);
        assert!(pushforward_cover(&src, &dst, &map, &cover, 1.0, 1.5).is_err());
        let iso = pushforward_cover(&src, &src, &map, &cover, 0.7, 1.0).unwrap();
        assert_eq!(iso.image_sum, iso.source_sum);
        let point = line(&[3.0]);
        let r = pushforward_cover(&src, &point, &[0; 4], &cover, 0.5, 0.0).unwrap();
        assert_eq!(r.image_sum, 0.0);
    }

    #[test]
    fn level_profiles() {
        let xs: Vec<f64> = (0..=100).map(|i| i as f64 / 100.0).collect();
        let s = line(&xs);
        let f = SampledFunction::on_space(&s, |i| xs[i]).unwrap();
        let cover = SetFamily::new((0..10).map(|k| SubsetRef::new(10 * k..=10 * k + 10)).collect());
        let p = level_profile(&s, &cover, &f, 1.0, 1.0, 0.5).unwrap();
        // phi = 2 near the shared endpoints, 1 elsewhere
        assert!((p.superlevel_length - 1.0).abs() < 1e-9);
        assert!(p.superlevel_length <= p.bound);
        let total_j: f64 = p.phi.terms().iter().map(|(j, _)| j.len()).sum();
        assert!(p.bound <= 2.0 * total_j + 1e-12);

        let single = SetFamily::new(vec![s.all()]);
        let p = level_profile(&s, &single, &f, 2.0, 1.0, 0.5).unwrap();
        assert_eq!(p.superlevel_intervals.len(), 1);
        let p = level_profile(&s, &single, &f, 2.0, 1.0, 1.0).unwrap();
        assert!(p.superlevel_intervals.is_empty());
        assert!(level_profile(&s, &single, &f, 0.5, 1.0, 1.0).is_err());
        assert!(level_profile(&s, &SetFamily::new(vec![]), &f, 1.0, 1.0, 1.0).is_err());
    }
}
