//! The Hausdorff distance between nonempty finite subsets.
//!
//! For finite sets the infimum of `t` with both sets `t`-close (strictly) is
//! attained by the max-min expression, which is what we compute.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::{dist_to_set_unchecked, epsilon_components_of, FiniteMetricSpace, SubsetRef};

/// Highest dimension for which the grid search is used.
pub const GRID_MAX_DIM: usize = 3;

/// Below this many point pairs the brute-force scan is used.
const GRID_MIN_PAIRS: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HausdorffDistance {
    pub distance: f64,
    /// `(x, y)` with `x` in the first set, `y` in the second and
    /// `d(x, y) = distance`. Ties go to the lowest indices.
    pub argmax_pair: (usize, usize),
}

/// Largest nearest-neighbour distance from `from` into `to`, on base
/// distances: `(value, x, nearest y)`.
type Directed = (f64, usize, usize);

fn directed_brute(space: &FiniteMetricSpace, from: &[usize], to: &[usize]) -> Directed {
    let mut best: Directed = (f64::NEG_INFINITY, from[0], to[0]);
    for &x in from {
        let mut near = (f64::INFINITY, to[0]);
        for &y in to {
            let d = space.base_distance(x, y);
            if d < near.0 {
                near = (d, y);
                if d <= best.0 {
                    // x cannot beat the current maximum
                    break;
                }
            }
        }
        if near.0 > best.0 {
            best = (near.0, x, near.1);
        }
    }
    best
}

/// Uniform grid over the points of `to`.
struct CellIndex<'a> {
    space: &'a FiniteMetricSpace,
    dim: usize,
    side: f64,
    origin: Vec<f64>,
    cells: HashMap<Vec<i64>, Vec<usize>>,
    lo_cell: Vec<i64>,
    hi_cell: Vec<i64>,
}

impl<'a> CellIndex<'a> {
    fn new(space: &'a FiniteMetricSpace, dim: usize, to: &[usize]) -> Self {
        let mut lo = vec![f64::INFINITY; dim];
        let mut hi = vec![f64::NEG_INFINITY; dim];
        for &y in to {
            let p = space.point(y).expect("Euclidean backend");
            for k in 0..dim {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        let extent = lo.iter().zip(&hi).map(|(l, h)| h - l).fold(0.0, f64::max);
        let per_axis = (to.len() as f64).powf(1.0 / dim as f64).ceil().max(1.0);
        let side = if extent > 0.0 { extent / per_axis } else { 1.0 };
        let mut index = CellIndex {
            space,
            dim,
            side,
            origin: lo,
            cells: HashMap::new(),
            lo_cell: vec![i64::MAX; dim],
            hi_cell: vec![i64::MIN; dim],
        };
        for &y in to {
            let c = index.cell_of(y);
            for (k, &ck) in c.iter().enumerate() {
                index.lo_cell[k] = index.lo_cell[k].min(ck);
                index.hi_cell[k] = index.hi_cell[k].max(ck);
            }
            index.cells.entry(c).or_default().push(y);
        }
        index
    }

    fn cell_of(&self, i: usize) -> Vec<i64> {
        let p = self.space.point(i).expect("Euclidean backend");
        (0..self.dim)
            .map(|k| ((p[k] - self.origin[k]) / self.side).floor() as i64)
            .collect()
    }

    /// Nearest point of the indexed set to `x` with ties to the lowest index.
    /// Stops early once the distance is known to be `<= floor`.
    fn nearest(&self, x: usize, floor: f64) -> (f64, usize) {
        let home = self.cell_of(x);
        // rings needed before every indexed cell has been visited
        let last_ring = (0..self.dim)
            .map(|k| (home[k] - self.lo_cell[k]).abs().max((self.hi_cell[k] - home[k]).abs()))
            .max()
            .unwrap_or(0);
        let mut near = (f64::INFINITY, usize::MAX);
        let mut offset = vec![0i64; self.dim];
        for ring in 0..=last_ring {
            self.visit_ring(&home, ring, 0, &mut offset, &mut |members| {
                for &y in members {
                    let d = self.space.base_distance(x, y);
                    if d < near.0 || (d == near.0 && y < near.1) {
                        near = (d, y);
                    }
                }
            });
            // everything beyond this ring is at least `ring * side` away; one
            // ring of slack absorbs rounding in the cell assignment
            let reach = (ring - 1) as f64 * self.side;
            if near.0 < reach || near.0 <= floor {
                break;
            }
        }
        near
    }

    fn visit_ring(&self, home: &[i64], ring: i64, axis: usize, offset: &mut Vec<i64>, visit: &mut dyn FnMut(&[usize])) {
        if axis == self.dim {
            if offset.iter().any(|o| o.abs() == ring) {
                let key: Vec<i64> = home.iter().zip(offset.iter()).map(|(h, o)| h + o).collect();
                if let Some(members) = self.cells.get(&key) {
                    visit(members);
                }
            }
            return;
        }
        for o in -ring..=ring {
            offset[axis] = o;
            self.visit_ring(home, ring, axis + 1, offset, visit);
        }
    }
}

fn directed_grid(space: &FiniteMetricSpace, dim: usize, from: &[usize], to: &[usize]) -> Directed {
    let index = CellIndex::new(space, dim, to);
    let mut best: Directed = (f64::NEG_INFINITY, from[0], to[0]);
    for &x in from {
        let near = index.nearest(x, best.0);
        if near.0 > best.0 {
            best = (near.0, x, near.1);
        }
    }
    best
}

fn check_pair(space: &FiniteMetricSpace, e1: &SubsetRef, e2: &SubsetRef) -> Result<()> {
    space.check_subset(e1)?;
    space.check_subset(e2)?;
    if e1.is_empty() || e2.is_empty() {
        return Err(Error::EmptySet("Hausdorff distance needs nonempty sets"));
    }
    Ok(())
}

fn combine(space: &FiniteMetricSpace, forward: Directed, backward: Directed) -> HausdorffDistance {
    let (value, argmax_pair) = if forward.0 >= backward.0 {
        (forward.0, (forward.1, forward.2))
    } else {
        (backward.0, (backward.2, backward.1))
    };
    HausdorffDistance {
        distance: space.apply_exponent(value),
        argmax_pair,
    }
}

/// Reference `O(|E1| |E2|)` computation.
pub fn hausdorff_distance_brute(
    space: &FiniteMetricSpace,
    e1: &SubsetRef,
    e2: &SubsetRef,
) -> Result<HausdorffDistance> {
    check_pair(space, e1, e2)?;
    let (a, b) = (e1.indices(), e2.indices());
    let (forward, backward) = rayon::join(|| directed_brute(space, a, b), || directed_brute(space, b, a));
    Ok(combine(space, forward, backward))
}

/// Uses a uniform cell grid on Euclidean spaces of dimension at most
/// [`GRID_MAX_DIM`], and the brute-force scan otherwise. Both evaluate the
/// same distances, so the results agree exactly.
pub fn hausdorff_distance_detail(
    space: &FiniteMetricSpace,
    e1: &SubsetRef,
    e2: &SubsetRef,
) -> Result<HausdorffDistance> {
    check_pair(space, e1, e2)?;
    match space.dim() {
        Some(dim) if dim <= GRID_MAX_DIM && e1.len() * e2.len() >= GRID_MIN_PAIRS => {
            hausdorff_distance_grid(space, e1, e2)
        }
        _ => hausdorff_distance_brute(space, e1, e2),
    }
}

/// Grid-accelerated computation; errors on non-Euclidean spaces.
pub fn hausdorff_distance_grid(space: &FiniteMetricSpace, e1: &SubsetRef, e2: &SubsetRef) -> Result<HausdorffDistance> {
    check_pair(space, e1, e2)?;
    let dim = space.dim().ok_or(Error::NotEuclidean)?;
    let (a, b) = (e1.indices(), e2.indices());
    let (forward, backward) = rayon::join(|| directed_grid(space, dim, a, b), || directed_grid(space, dim, b, a));
    Ok(combine(space, forward, backward))
}

pub fn hausdorff_distance(space: &FiniteMetricSpace, e1: &SubsetRef, e2: &SubsetRef) -> Result<f64> {
    hausdorff_distance_detail(space, e1, e2).map(|h| h.distance)
}

/// Hausdorff distance between two point clouds in the same Euclidean space.
/// The argmax pair indexes into `a` and `b` respectively.
pub fn hausdorff_clouds(a: &[Vec<f64>], b: &[Vec<f64>]) -> Result<HausdorffDistance> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySet("Hausdorff distance needs nonempty clouds"));
    }
    let points: Vec<Vec<f64>> = a.iter().chain(b).cloned().collect();
    let space = FiniteMetricSpace::euclidean(points)?;
    let e1 = SubsetRef::new(0..a.len());
    let e2 = SubsetRef::new(a.len()..a.len() + b.len());
    let mut h = hausdorff_distance_detail(&space, &e1, &e2)?;
    h.argmax_pair.1 -= a.len();
    Ok(h)
}

/// Every point of each set lies at distance `< t` from the other set.
pub fn is_t_close(space: &FiniteMetricSpace, e1: &SubsetRef, e2: &SubsetRef, t: f64) -> Result<bool> {
    if !(t > 0.0) {
        return Err(Error::param("t", format!("{t} must be positive")));
    }
    Ok(hausdorff_distance(space, e1, e2)? < t)
}

/// `D(E1, E2)` and `max_x |dist(x, E1) - dist(x, E2)|` over the whole space.
pub fn embedding_identity_check(space: &FiniteMetricSpace, e1: &SubsetRef, e2: &SubsetRef) -> Result<(f64, f64)> {
    let lhs = hausdorff_distance(space, e1, e2)?;
    let rhs = (0..space.len())
        .map(|x| (dist_to_set_unchecked(space, x, e1.indices()) - dist_to_set_unchecked(space, x, e2.indices())).abs())
        .fold(0.0, f64::max);
    Ok((lhs, rhs))
}

/// A sequence of subsets of one space, optionally known to be decreasing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SetSequence {
    pub sets: Vec<SubsetRef>,
    pub decreasing: bool,
}

impl SetSequence {
    /// A decreasing sequence; nesting is validated.
    pub fn decreasing(sets: Vec<SubsetRef>) -> Result<Self> {
        if let Some(j) = sets.windows(2).position(|w| !w[1].is_subset_of(&w[0])) {
            return Err(Error::Precondition(format!(
                "set {} is not contained in set {j}",
                j + 1
            )));
        }
        Ok(SetSequence { sets, decreasing: true })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecreasingLimit {
    pub limit: SubsetRef,
    /// `D(K_j, limit)` for each set of the sequence.
    pub distances: Vec<f64>,
}

pub fn decreasing_limit(space: &FiniteMetricSpace, seq: &SetSequence) -> Result<DecreasingLimit> {
    if !seq.decreasing {
        return Err(Error::Precondition("sequence is not flagged decreasing".into()));
    }
    if seq.sets.is_empty() {
        return Err(Error::EmptySet("sequence has no sets"));
    }
    let seq = SetSequence::decreasing(seq.sets.clone())?;
    for s in &seq.sets {
        space.check_subset(s)?;
    }
    let limit = seq.sets.last().expect("nonempty").clone();
    if limit.is_empty() {
        return Err(Error::EmptySet("the sets have empty intersection"));
    }
    let distances = seq
        .sets
        .iter()
        .map(|k| hausdorff_distance(space, k, &limit))
        .collect::<Result<Vec<f64>>>()?;
    Ok(DecreasingLimit { limit, distances })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConnectednessTransfer {
    /// `eps + 2t`
    pub claimed: f64,
    /// `F` is a single `(eps + 2t)`-chain component.
    pub verified: bool,
    pub components: usize,
}

/// If `E` is `eps`-connected and `E`, `F` are `t`-close, checks that `F` is
/// `(eps + 2t)`-connected.
pub fn connectedness_transfer(
    space: &FiniteMetricSpace,
    e: &SubsetRef,
    f: &SubsetRef,
    eps: f64,
    t: f64,
) -> Result<ConnectednessTransfer> {
    let parts = epsilon_components_of(space, e, eps)?.len();
    if parts != 1 {
        return Err(Error::Precondition(format!(
            "E is not {eps}-connected: it has {parts} components"
        )));
    }
    if !is_t_close(space, e, f, t)? {
        return Err(Error::Precondition(format!("E and F are not {t}-close")));
    }
    let claimed = eps + 2.0 * t;
    let components = epsilon_components_of(space, f, claimed)?.len();
    Ok(ConnectednessTransfer {
        claimed,
        verified: components == 1,
        components,
    })
}
