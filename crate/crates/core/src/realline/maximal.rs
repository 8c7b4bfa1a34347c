use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::interval::{union_components, IntervalSpec};
use super::monotone::MonotoneFn;
use crate::error::{Error, Result};

/// `mu*_alpha(x) = sup mu(J) / |J|^alpha` over bounded open intervals `J`
/// containing `x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaximalValue {
    pub x: f64,
    pub value: f64,
    /// Endpoints `(u, v)` of the extremal interval. The supremum is a limit of
    /// open intervals slightly larger than `[u, v]`; `u == v == x` marks a
    /// jump of `mu` at `x`, where the value is infinite.
    pub witness: Option<(f64, f64)>,
    /// `mu(u-) .. mu(v+)` mass of the limiting interval.
    pub mass: f64,
}

/// Candidate endpoints: nodes plus `2^depth` equal steps between adjacent
/// nodes.
fn candidate_grid(mu: &MonotoneFn, depth: u32) -> Vec<f64> {
    let xs: Vec<f64> = mu.nodes().iter().map(|n| n.x).collect();
    let steps = 1usize << depth;
    let mut grid = Vec::with_capacity(xs.len() * steps);
    for (k, &x) in xs.iter().enumerate() {
        grid.push(x);
        if let Some(&next) = xs.get(k + 1) {
            for i in 1..steps {
                grid.push(x + (next - x) * (i as f64 / steps as f64));
            }
        }
    }
    grid
}

/// Evaluates `mu*_alpha(x)`.
///
/// On each linear piece of `mu`, the ratio `mu(J)/|J|^alpha` has no interior
/// maximum in either endpoint of `J`, so the supremum is approached by
/// intervals whose ends tend to nodes of `mu` or to `x` itself. Checking those
/// limits makes the result exact for every `depth`; `depth > 0` only adds
/// further candidates between nodes.
pub fn maximal_function(mu: &MonotoneFn, alpha: f64, x: f64, depth: u32) -> Result<MaximalValue> {
    if !x.is_finite() {
        return Err(Error::param("x", format!("{x} is not finite")));
    }
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::param("alpha", format!("{alpha} must lie in (0, 1]")));
    }
    if depth > 20 {
        return Err(Error::param("depth", format!("{depth} exceeds 20")));
    }
    let (below, above) = (mu.left_limit(x), mu.right_limit(x));
    if above > below {
        return Ok(MaximalValue {
            x,
            value: f64::INFINITY,
            witness: Some((x, x)),
            mass: above - below,
        });
    }
    let grid = candidate_grid(mu, depth);
    let mut lefts: Vec<(f64, f64)> = grid
        .iter()
        .filter(|&&c| c < x)
        .map(|&c| (c, mu.left_limit(c)))
        .collect();
    lefts.push((x, below));
    let mut rights: Vec<(f64, f64)> = grid
        .iter()
        .filter(|&&c| c > x)
        .map(|&c| (c, mu.right_limit(c)))
        .collect();
    rights.push((x, above));

    let mut best = MaximalValue {
        x,
        value: 0.0,
        witness: None,
        mass: 0.0,
    };
    for &(u, mu_u) in &lefts {
        for &(v, mu_v) in &rights {
            let width = v - u;
            if width <= 0.0 {
                continue;
            }
            let mass = mu_v - mu_u;
            let ratio = mass / width.powf(alpha);
            if ratio > best.value {
                best = MaximalValue {
                    x,
                    value: ratio,
                    witness: Some((u, v)),
                    mass,
                };
            }
        }
    }
    Ok(best)
}

/// `mu*_alpha` at each point of `xs`, in parallel.
pub fn maximal_scan(mu: &MonotoneFn, alpha: f64, xs: &[f64], depth: u32) -> Result<Vec<MaximalValue>> {
    xs.par_iter().map(|&x| maximal_function(mu, alpha, x, depth)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Superlevel {
    pub t: f64,
    /// Disjoint components of `{ mu*_1 > t }`, increasing.
    pub intervals: Vec<IntervalSpec>,
    pub length: f64,
    /// `2 (B - A) / t`
    pub bound: f64,
}

/// The exact set `{ x : mu*_1(x) > t }`.
///
/// Inside a linear piece `mu(x) = c + s x`, the ratio for an interval with one
/// end at `x` and the other at a node is linear in `x`, so each node
/// contributes a half-line condition; node-to-node intervals spanning the
/// piece and the slope `s` contribute conditions independent of `x`. Nodes
/// themselves are tested directly.
pub fn maximal_superlevel(mu: &MonotoneFn, t: f64) -> Result<Superlevel> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::param("t", format!("{t} must be positive and finite")));
    }
    let nodes = mu.nodes();
    let n = nodes.len();
    let mut pieces: Vec<IntervalSpec> = Vec::new();

    for node in nodes {
        if maximal_function(mu, 1.0, node.x, 0)?.value > t {
            pieces.push(IntervalSpec::point(node.x)?);
        }
    }

    // segment k lies between nodes k - 1 and k; 0 and n are the tails
    for k in 0..=n {
        let p = if k == 0 { f64::NEG_INFINITY } else { nodes[k - 1].x };
        let q = if k == n { f64::INFINITY } else { nodes[k].x };
        let (c, s) = if k == 0 {
            (mu.left(), 0.0)
        } else if k == n {
            (mu.right(), 0.0)
        } else {
            let s = mu.segment_slope(k - 1);
            (nodes[k - 1].plus - s * p, s)
        };
        let left_nodes = &nodes[..k];
        let right_nodes = &nodes[k..];

        let spanning = left_nodes
            .iter()
            .any(|u| right_nodes.iter().any(|v| (v.plus - u.minus) / (v.x - u.x) > t));
        if s > t || spanning {
            pieces.push(IntervalSpec::open(p, q)?);
            continue;
        }
        // x is in the set when x < upto or x > from
        let mut upto = f64::NEG_INFINITY;
        let mut from = f64::INFINITY;
        let k_rate = t - s;
        for v in right_nodes {
            let r = t * v.x - v.plus + c;
            if k_rate > 0.0 {
                from = from.min(r / k_rate);
            } else if r < 0.0 {
                from = f64::NEG_INFINITY;
            }
        }
        for u in left_nodes {
            let r = u.minus - c - t * u.x;
            if k_rate > 0.0 {
                upto = upto.max(r / (s - t));
            } else if r < 0.0 {
                upto = f64::INFINITY;
            }
        }
        let hi = upto.min(q);
        if p < hi {
            pieces.push(IntervalSpec::open(p, hi)?);
        }
        let lo = from.max(p);
        if lo < q {
            pieces.push(IntervalSpec::open(lo, q)?);
        }
    }

    let intervals = union_components(&pieces);
    let length = intervals.iter().map(IntervalSpec::len).sum();
    Ok(Superlevel {
        t,
        intervals,
        length,
        bound: 2.0 * mu.total_mass() / t,
    })
}
