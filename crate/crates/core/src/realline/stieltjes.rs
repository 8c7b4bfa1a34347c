use serde::{Deserialize, Serialize};

use super::monotone::MonotoneFn;
use crate::error::{Error, Result};

/// `a = t_0 < t_1 < ... < t_n = b`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Partition {
    points: Vec<f64>,
}

impl Partition {
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::param("partition", "needs at least two points"));
        }
        if points.iter().any(|t| !t.is_finite()) {
            return Err(Error::param("partition", "points must be finite"));
        }
        if points.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::param("partition", "points must increase strictly"));
        }
        Ok(Partition { points })
    }

    /// `{a, b}` together with the interior `extra` points, each base gap then
    /// cut into `2^level` equal pieces.
    pub fn refined(a: f64, b: f64, extra: &[f64], level: u32) -> Result<Self> {
        if !(a < b) {
            return Err(Error::param("interval", format!("need a < b, got [{a}, {b}]")));
        }
        let mut base = vec![a];
        base.extend(extra.iter().copied().filter(|&t| t > a && t < b));
        base.push(b);
        base.sort_by(f64::total_cmp);
        base.dedup();
        let pieces = 1usize << level;
        let mut points = Vec::with_capacity((base.len() - 1) * pieces + 1);
        for w in base.windows(2) {
            let (p, q) = (w[0], w[1]);
            for i in 0..pieces {
                points.push(p + (q - p) * (i as f64 / pieces as f64));
            }
        }
        points.push(b);
        // extremely fine levels may round adjacent points together
        points.dedup();
        Partition::new(points)
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn mesh(&self) -> f64 {
        self.points.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
    }

    /// `V_P(h) = sum |h(t_j) - h(t_{j-1})|`.
    pub fn variation(&self, h: impl Fn(f64) -> f64) -> f64 {
        let values: Vec<f64> = self.points.iter().map(|&t| h(t)).collect();
        sample_variation(&values)
    }
}

/// Variation of a sequence of samples taken in increasing order.
pub fn sample_variation(values: &[f64]) -> f64 {
    values.windows(2).map(|w| (w[1] - w[0]).abs()).sum()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StieltjesOptions {
    pub tol: f64,
    pub min_depth: u32,
    pub max_depth: u32,
}

impl Default for StieltjesOptions {
    fn default() -> Self {
        StieltjesOptions {
            tol: 1e-9,
            min_depth: 2,
            max_depth: 30,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StieltjesOutcome {
    pub value: f64,
    /// Refinement level at which successive sums agreed.
    pub depth: u32,
    pub last_change: f64,
    pub partition_size: usize,
}

/// Riemann-Stieltjes sum over the partition `Partition::refined(a, b, base,
/// level)`, streamed rather than materialized. The integrator uses the
/// right-continuous representative, so a jump at `a` is excluded and a jump
/// at `b` is counted. Tags are midpoints, except that a subinterval ending at
/// a jump is tagged at its right end.
fn stieltjes_sum(f: &impl Fn(f64) -> f64, mu: &MonotoneFn, base: &[f64], level: u32) -> Result<f64> {
    let jumps: Vec<f64> = mu.nodes().iter().filter(|n| n.plus > n.minus).map(|n| n.x).collect();
    let pieces = 1u64 << level;
    let mut sum = 0.0;
    let mut prev_t = base[0];
    let mut prev = mu.eval(prev_t);
    for w in base.windows(2) {
        let (p, q) = (w[0], w[1]);
        for i in 1..=pieces {
            let t = if i == pieces {
                q
            } else {
                p + (q - p) * (i as f64 / pieces as f64)
            };
            let s = prev_t;
            let cur = mu.eval(t);
            let dm = cur - prev;
            prev = cur;
            prev_t = t;
            if dm == 0.0 {
                continue;
            }
            let tag = if i == pieces && jumps.binary_search_by(|x| x.total_cmp(&t)).is_ok() {
                t
            } else {
                s + (t - s) / 2.0
            };
            let fv = f(tag);
            if !fv.is_finite() {
                return Err(Error::InvalidFunction(format!("f({tag}) = {fv}")));
            }
            sum += fv * dm;
        }
    }
    Ok(sum)
}

/// `int_(a, b] f dmu` by refining partitions that always contain the nodes of
/// `mu` until two successive sums differ by less than `tol`.
pub fn stieltjes_integral(f: impl Fn(f64) -> f64, mu: &MonotoneFn, a: f64, b: f64, tol: f64) -> Result<f64> {
    stieltjes_integral_with(
        f,
        mu,
        a,
        b,
        StieltjesOptions {
            tol,
            ..StieltjesOptions::default()
        },
    )
    .map(|o| o.value)
}

pub fn stieltjes_integral_with(
    f: impl Fn(f64) -> f64,
    mu: &MonotoneFn,
    a: f64,
    b: f64,
    opts: StieltjesOptions,
) -> Result<StieltjesOutcome> {
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(Error::param("interval", format!("need finite a < b, got [{a}, {b}]")));
    }
    if !(opts.tol > 0.0) {
        return Err(Error::param("tol", format!("{} must be positive", opts.tol)));
    }
    if opts.min_depth > opts.max_depth {
        return Err(Error::param("min_depth", "exceeds max_depth"));
    }
    let mut base = vec![a];
    base.extend(mu.nodes().iter().map(|n| n.x).filter(|&x| x > a && x < b));
    base.push(b);
    let mut prev: Option<f64> = None;
    let mut last_change = f64::INFINITY;
    for depth in 0..=opts.max_depth {
        let sum = stieltjes_sum(&f, mu, &base, depth)?;
        if let Some(p) = prev {
            last_change = (sum - p).abs();
            if depth >= opts.min_depth && last_change < opts.tol {
                return Ok(StieltjesOutcome {
                    value: sum,
                    depth,
                    last_change,
                    partition_size: (base.len() - 1) * (1usize << depth) + 1,
                });
            }
        }
        prev = Some(sum);
    }
    Err(Error::NonConvergence(format!(
        "Stieltjes sums still changed by {last_change:e} at depth {}; f may be discontinuous at a jump of mu",
        opts.max_depth
    )))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariationEstimate {
    /// `(refinement level, partition size, V_P)` per level.
    pub estimates: Vec<(u32, usize, f64)>,
    pub value: f64,
    /// True when turning points were declared, so the partitions contain every
    /// point where `h` changes direction and `value` is the total variation.
    /// Otherwise `value` is only a lower bound.
    pub exact: bool,
}

/// Total variation of `h` on `[a, b]` over partitions refining the declared
/// turning points at each level of `schedule`.
pub fn total_variation(
    h: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    turning_points: Option<&[f64]>,
    schedule: &[u32],
) -> Result<VariationEstimate> {
    if schedule.is_empty() {
        return Err(Error::param("schedule", "refinement schedule is empty"));
    }
    if !(a < b) {
        return Err(Error::param("interval", format!("need a < b, got [{a}, {b}]")));
    }
    let extra = turning_points.unwrap_or(&[]);
    let mut estimates = Vec::with_capacity(schedule.len());
    for &level in schedule {
        let part = Partition::refined(a, b, extra, level)?;
        let v = part.variation(&h);
        if !v.is_finite() {
            return Err(Error::InvalidFunction(format!("variation at level {level} is {v}")));
        }
        estimates.push((level, part.len(), v));
    }
    let value = estimates.iter().map(|e| e.2).fold(0.0, f64::max);
    Ok(VariationEstimate {
        estimates,
        value,
        exact: turning_points.is_some(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::realline::monotone::Node;

    #[test]
    fn partitions() {
        let p = Partition::refined(0.0, 1.0, &[0.25], 1).unwrap();
        assert_eq!(p.points(), &[0.0, 0.125, 0.25, 0.625, 1.0]);
        assert_eq!(p.mesh(), 0.375);
        assert!(Partition::new(vec![0.0, 0.0]).is_err());
    }

    #[test]
    fn dirac_mass_reads_f_at_the_jump() {
        let mu = MonotoneFn::unit_step(0.3).unwrap();
        let v = stieltjes_integral(|x| x.cos() + x * x, &mu, 0.0, 1.0, 1e-9).unwrap();
        assert!((v - (0.3f64.cos() + 0.09)).abs() < 1e-9);
    }

    #[test]
    fn constant_integrand_telescopes() {
        let mu = MonotoneFn::new(vec![
            Node::new(0.1, 0.0, 0.2),
            Node::continuous(0.5, 0.6),
            Node::new(0.9, 0.7, 1.0),
        ])
        .unwrap();
        let v = stieltjes_integral(|_| 1.0, &mu, 0.0, 1.0, 1e-12).unwrap();
        assert!((v - (mu.eval(1.0) - mu.eval(0.0))).abs() < 1e-15);
    }

    #[test]
    fn square_against_lebesgue() {
        let mu = MonotoneFn::clamp_unit();
        let v = stieltjes_integral(|x| x * x, &mu, 0.0, 1.0, 1e-9).unwrap();
        assert!((v - 1.0 / 3.0).abs() < 1e-8);
    }

    #[test]
    fn discontinuous_integrand_fails_to_converge() {
        let mu = MonotoneFn::unit_step(0.5).unwrap();
        let f = |x: f64| if x < 0.5 { 0.0 } else { 1.0 };
        assert_eq!(stieltjes_integral(f, &mu, 0.0, 1.0, 1e-9).unwrap(), 1.0);
        let osc = |x: f64| if x == 0.5 { 1.0 } else { (1.0 / (x - 0.5)).sin() };
        let mu2 = MonotoneFn::clamp_unit()
            .sum(&MonotoneFn::unit_step(0.5).unwrap())
            .unwrap();
        let opts = StieltjesOptions {
            max_depth: 12,
            ..Default::default()
        };
        let err = stieltjes_integral_with(osc, &mu2, 0.0, 1.0, opts).unwrap_err();
        assert!(err.is_numerical());
    }

    #[test]
    fn variation_examples() {
        let mono = total_variation(|x| x * x * x, 0.0, 2.0, Some(&[]), &[0, 3, 6]).unwrap();
        for e in &mono.estimates {
            assert!((e.2 - 8.0).abs() < 1e-12);
        }
        assert!(mono.exact);

        let abs = total_variation(f64::abs, -1.0, 1.0, Some(&[0.0]), &[0, 2]).unwrap();
        assert_eq!(abs.value, 2.0);

        let blind = total_variation(f64::abs, -1.0, 1.0, None, &[0, 1, 4]).unwrap();
        assert!(!blind.exact);
        assert_eq!(blind.estimates[0].2, 0.0);
        assert_eq!(blind.value, 2.0);
        let vals: Vec<f64> = blind.estimates.iter().map(|e| e.2).collect();
        assert!(vals.windows(2).all(|w| w[0] <= w[1]));

        assert!(total_variation(f64::abs, -1.0, 1.0, None, &[]).is_err());
    }

    #[test]
    fn sampled_variation() {
        assert_eq!(sample_variation(&[0.0, 2.0, 1.0, 3.0]), 5.0);
        assert_eq!(sample_variation(&[4.0]), 0.0);
    }
}
