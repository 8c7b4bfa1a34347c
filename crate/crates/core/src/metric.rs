//! Finite metric spaces and the primitive geometry the other modules build on.
//!
//! All suprema and infima over sets become maxima and minima here since every
//! set is finite. Comparisons use plain floating-point order so set-level
//! results are reproducible.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Explicit matrices larger than this may skip the O(n^3) triangle check.
pub const UNCHECKED_TRIANGLE_THRESHOLD: usize = 2000;

/// Relative slack allowed in the triangle check of explicit matrices, so that
/// matrices derived from floating-point coordinates are not rejected.
const TRIANGLE_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
enum Backend {
    Euclidean { dim: usize, coords: Vec<f64> },
    Explicit { n: usize, dist: Vec<f64> },
}

/// A finite set of points with a metric, optionally snowflaked (`d^a`).
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteMetricSpace {
    backend: Backend,
    exponent: f64,
}

impl FiniteMetricSpace {
    /// Euclidean space from coordinate vectors; all must share one dimension.
    pub fn euclidean(points: Vec<Vec<f64>>) -> Result<Self> {
        let dim = points.first().map_or(1, |p| p.len());
        if dim == 0 {
            return Err(Error::param("points", "zero-dimensional points"));
        }
        let mut coords = Vec::with_capacity(points.len() * dim);
        for (index, p) in points.iter().enumerate() {
            if p.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: p.len(),
                    index,
                });
            }
            if let Some(c) = p.iter().find(|c| !c.is_finite()) {
                return Err(Error::param(
                    "points",
                    format!("non-finite coordinate {c} at point {index}"),
                ));
            }
            coords.extend_from_slice(p);
        }
        Ok(FiniteMetricSpace {
            backend: Backend::Euclidean { dim, coords },
            exponent: 1.0,
        })
    }

    /// Points on the real line.
    pub fn line(xs: &[f64]) -> Result<Self> {
        Self::euclidean(xs.iter().map(|&x| vec![x]).collect())
    }

    /// Space given by an explicit distance matrix, fully validated.
    pub fn explicit(matrix: Vec<Vec<f64>>) -> Result<Self> {
        Self::explicit_with(matrix, false)
    }

    /// Like [`explicit`](Self::explicit), but `skip_triangle_check` disables
    /// the cubic triangle check when the matrix has more than
    /// [`UNCHECKED_TRIANGLE_THRESHOLD`] rows. Such spaces are unchecked.
    pub fn explicit_with(matrix: Vec<Vec<f64>>, skip_triangle_check: bool) -> Result<Self> {
        let n = matrix.len();
        let mut dist = Vec::with_capacity(n * n);
        for (i, row) in matrix.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidMetric(format!(
                    "row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            dist.extend_from_slice(row);
        }
        for i in 0..n {
            for j in 0..n {
                let d = dist[i * n + j];
                if !d.is_finite() || d < 0.0 {
                    return Err(Error::InvalidMetric(format!(
                        "entry ({i}, {j}) = {d} is not a finite nonnegative number"
                    )));
                }
                if i == j && d != 0.0 {
                    return Err(Error::InvalidMetric(format!("nonzero diagonal at {i}")));
                }
                if i != j && d == 0.0 {
                    return Err(Error::InvalidMetric(format!(
                        "distinct points {i} and {j} at distance 0"
                    )));
                }
                if d != dist[j * n + i] {
                    return Err(Error::InvalidMetric(format!("asymmetric entries at ({i}, {j})")));
                }
            }
        }
        if !(skip_triangle_check && n > UNCHECKED_TRIANGLE_THRESHOLD) {
            for x in 0..n {
                for y in 0..n {
                    let dxy = dist[x * n + y];
                    for z in 0..n {
                        let lhs = dist[x * n + z];
                        let rhs = dxy + dist[y * n + z];
                        if lhs > rhs * (1.0 + TRIANGLE_SLACK) {
                            return Err(Error::InvalidMetric(format!(
                                "triangle inequality fails for triple ({x}, {y}, {z}): \
                                 d({x},{z}) = {lhs} > {rhs}"
                            )));
                        }
                    }
                }
            }
        }
        Ok(FiniteMetricSpace {
            backend: Backend::Explicit { n, dist },
            exponent: 1.0,
        })
    }

    pub fn len(&self) -> usize {
        match &self.backend {
            Backend::Euclidean { dim, coords } => coords.len() / dim,
            Backend::Explicit { n, .. } => *n,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Ambient dimension for Euclidean spaces.
    pub fn dim(&self) -> Option<usize> {
        match &self.backend {
            Backend::Euclidean { dim, .. } => Some(*dim),
            Backend::Explicit { .. } => None,
        }
    }

    pub fn is_euclidean(&self) -> bool {
        matches!(self.backend, Backend::Euclidean { .. })
    }

    /// Coordinates of point `i` (Euclidean backend only).
    pub fn point(&self, i: usize) -> Option<&[f64]> {
        match &self.backend {
            Backend::Euclidean { dim, coords } => coords.get(i * dim..(i + 1) * dim),
            Backend::Explicit { .. } => None,
        }
    }

    /// Snowflake exponent `a`; reported distances are `d^a`.
    pub fn exponent(&self) -> f64 {
        self.exponent
    }

    /// Underlying distance before the snowflake exponent is applied.
    #[inline]
    pub fn base_distance(&self, i: usize, j: usize) -> f64 {
        match &self.backend {
            Backend::Euclidean { dim, coords } => {
                let a = &coords[i * dim..(i + 1) * dim];
                let b = &coords[j * dim..(j + 1) * dim];
                if *dim == 1 {
                    (a[0] - b[0]).abs()
                } else {
                    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
                }
            }
            Backend::Explicit { n, dist } => dist[i * n + j],
        }
    }

    /// Distance between points `i` and `j`. Panics on out-of-range indices.
    #[inline]
    pub fn distance(&self, i: usize, j: usize) -> f64 {
        self.apply_exponent(self.base_distance(i, j))
    }

    #[inline]
    pub(crate) fn apply_exponent(&self, d: f64) -> f64 {
        if self.exponent == 1.0 {
            d
        } else {
            d.powf(self.exponent)
        }
    }

    /// The same points under `d^a`. Exponents compose multiplicatively.
    pub fn with_snowflake(&self, a: f64) -> Result<Self> {
        if !(a > 0.0 && a <= 1.0) {
            return Err(Error::param("a", format!("snowflake exponent {a} not in (0, 1]")));
        }
        Ok(FiniteMetricSpace {
            backend: self.backend.clone(),
            exponent: self.exponent * a,
        })
    }

    /// Every point of the space.
    pub fn all(&self) -> SubsetRef {
        SubsetRef((0..self.len()).collect())
    }

    pub(crate) fn check_index(&self, index: usize) -> Result<()> {
        if index < self.len() {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange { index, len: self.len() })
        }
    }

    pub(crate) fn check_subset(&self, set: &SubsetRef) -> Result<()> {
        match set.0.last() {
            Some(&last) => self.check_index(last),
            None => Ok(()),
        }
    }
}

/// A finite subset of a space: sorted, duplicate-free point indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct SubsetRef(Vec<usize>);

impl SubsetRef {
    /// Builds a subset from arbitrary indices, sorting and dropping repeats.
    pub fn new(indices: impl IntoIterator<Item = usize>) -> Self {
        let mut v: Vec<usize> = indices.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        SubsetRef(v)
    }

    /// Accepts only an already sorted, duplicate-free list.
    pub fn try_from_sorted(indices: Vec<usize>) -> Result<Self> {
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::param("indices", "subset indices must be strictly increasing"));
        }
        Ok(SubsetRef(indices))
    }

    pub fn empty() -> Self {
        SubsetRef(Vec::new())
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, index: usize) -> bool {
        self.0.binary_search(&index).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn intersects(&self, other: &SubsetRef) -> bool {
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].cmp(&other.0[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => return true,
            }
        }
        false
    }

    pub fn is_subset_of(&self, other: &SubsetRef) -> bool {
        self.0.iter().all(|&i| other.contains(i))
    }

    pub fn union(&self, other: &SubsetRef) -> SubsetRef {
        SubsetRef::new(self.0.iter().chain(&other.0).copied())
    }
}

impl TryFrom<Vec<usize>> for SubsetRef {
    type Error = Error;

    fn try_from(v: Vec<usize>) -> Result<Self> {
        SubsetRef::try_from_sorted(v)
    }
}

impl From<SubsetRef> for Vec<usize> {
    fn from(s: SubsetRef) -> Self {
        s.0
    }
}

impl FromIterator<usize> for SubsetRef {
    fn from_iter<T: IntoIterator<Item = usize>>(iter: T) -> Self {
        SubsetRef::new(iter)
    }
}

/// A family `{A_i}` of subsets of one space. Members may be empty; operations
/// that need nonempty members say so.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SetFamily {
    pub members: Vec<SubsetRef>,
}

impl SetFamily {
    pub fn new(members: Vec<SubsetRef>) -> Self {
        SetFamily { members }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Union of all members.
    pub fn union(&self) -> SubsetRef {
        SubsetRef::new(self.members.iter().flat_map(|m| m.iter()))
    }

    /// True when every point of `target` lies in some member.
    pub fn covers(&self, target: &SubsetRef) -> bool {
        let u = self.union();
        target.is_subset_of(&u)
    }
}

/// Largest pairwise distance in `set`; zero for empty sets and singletons.
pub fn diameter(space: &FiniteMetricSpace, set: &SubsetRef) -> Result<f64> {
    space.check_subset(set)?;
    Ok(diameter_unchecked(space, set.indices()))
}

pub(crate) fn diameter_unchecked(space: &FiniteMetricSpace, idx: &[usize]) -> f64 {
    let mut best = 0.0f64;
    for (k, &i) in idx.iter().enumerate() {
        for &j in &idx[k + 1..] {
            let d = space.base_distance(i, j);
            if d > best {
                best = d;
            }
        }
    }
    space.apply_exponent(best)
}

/// `min { d(x, z) : z in set }`.
pub fn dist_to_set(space: &FiniteMetricSpace, x: usize, set: &SubsetRef) -> Result<f64> {
    space.check_index(x)?;
    space.check_subset(set)?;
    if set.is_empty() {
        return Err(Error::EmptySet("distance to the empty set"));
    }
    Ok(dist_to_set_unchecked(space, x, set.indices()))
}

pub(crate) fn dist_to_set_unchecked(space: &FiniteMetricSpace, x: usize, idx: &[usize]) -> f64 {
    let mut best = f64::INFINITY;
    for &z in idx {
        let d = space.base_distance(x, z);
        if d < best {
            best = d;
        }
    }
    space.apply_exponent(best)
}

/// The open neighborhood `{ x : dist(x, set) < r }`.
pub fn neighborhood(space: &FiniteMetricSpace, set: &SubsetRef, r: f64) -> Result<SubsetRef> {
    if !(r > 0.0) {
        return Err(Error::param("r", format!("radius {r} must be positive")));
    }
    space.check_subset(set)?;
    if set.is_empty() {
        return Err(Error::EmptySet("neighborhood of the empty set"));
    }
    Ok(SubsetRef(
        (0..space.len())
            .filter(|&x| dist_to_set_unchecked(space, x, set.indices()) < r)
            .collect(),
    ))
}

/// Equivalence classes of the chain relation with steps `d < eps`, over the
/// whole space. Classes are ordered by their smallest index.
pub fn epsilon_components(space: &FiniteMetricSpace, eps: f64) -> Result<Vec<SubsetRef>> {
    epsilon_components_of(space, &space.all(), eps)
}

/// Chain components of the subspace `set`.
pub fn epsilon_components_of(space: &FiniteMetricSpace, set: &SubsetRef, eps: f64) -> Result<Vec<SubsetRef>> {
    if !(eps > 0.0) {
        return Err(Error::param("eps", format!("{eps} must be positive")));
    }
    space.check_subset(set)?;
    let idx = set.indices();
    let mut label = vec![usize::MAX; idx.len()];
    let mut classes = Vec::new();
    let mut queue = VecDeque::new();
    for start in 0..idx.len() {
        if label[start] != usize::MAX {
            continue;
        }
        let class = classes.len();
        label[start] = class;
        queue.push_back(start);
        let mut members = vec![idx[start]];
        while let Some(k) = queue.pop_front() {
            for m in 0..idx.len() {
                if label[m] == usize::MAX && space.distance(idx[k], idx[m]) < eps {
                    label[m] = class;
                    members.push(idx[m]);
                    queue.push_back(m);
                }
            }
        }
        classes.push(SubsetRef::new(members));
    }
    Ok(classes)
}

/// For each `delta`, the largest diameter of a `delta`-chain component.
pub fn disconnectedness_profile(space: &FiniteMetricSpace, deltas: &[f64]) -> Result<Vec<(f64, f64)>> {
    if deltas.is_empty() {
        return Err(Error::param("deltas", "empty list"));
    }
    deltas
        .iter()
        .map(|&delta| {
            let comps = epsilon_components(space, delta)?;
            let widest = comps
                .iter()
                .map(|c| diameter_unchecked(space, c.indices()))
                .fold(0.0, f64::max);
            Ok((delta, widest))
        })
        .collect()
}

/// `{ x : dist(x, set) <= diam(set) }`, whose diameter is at most three times
/// that of `set`.
pub fn enlargement(space: &FiniteMetricSpace, set: &SubsetRef) -> Result<SubsetRef> {
    space.check_subset(set)?;
    if set.is_empty() {
        return Err(Error::EmptySet("enlargement of the empty set"));
    }
    let r = diameter_unchecked(space, set.indices());
    Ok(SubsetRef(
        (0..space.len())
            .filter(|&x| dist_to_set_unchecked(space, x, set.indices()) <= r)
            .collect(),
    ))
}

/// Greedy selection of pairwise disjoint members, each time taking a member of
/// largest diameter among those disjoint from everything chosen so far. Ties go
/// to the lowest family index. Returns family indices in selection order.
pub fn greedy_disjoint_selection(space: &FiniteMetricSpace, family: &SetFamily) -> Result<Vec<usize>> {
    if family.is_empty() {
        return Err(Error::EmptySet("greedy selection over an empty family"));
    }
    for m in &family.members {
        space.check_subset(m)?;
        if m.is_empty() {
            return Err(Error::EmptySet("family member"));
        }
    }
    let diams: Vec<f64> = family
        .members
        .iter()
        .map(|m| diameter_unchecked(space, m.indices()))
        .collect();
    let mut order: Vec<usize> = (0..family.len()).collect();
    // Stable sort keeps the lowest index first among equal diameters.
    order.sort_by(|&a, &b| diams[b].total_cmp(&diams[a]));

    let mut taken = vec![false; space.len()];
    let mut selected = Vec::new();
    for a in order {
        let member = &family.members[a];
        if member.iter().all(|i| !taken[i]) {
            for i in member.iter() {
                taken[i] = true;
            }
            selected.push(a);
        }
    }
    Ok(selected)
}
