//! Nonnegative linear functionals given by finitely many weighted point masses.

use std::cmp::Ordering;
use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::{
    diameter_unchecked, enlargement, greedy_disjoint_selection, FiniteMetricSpace, SetFamily, SubsetRef,
};
use crate::realline::{MonotoneFn, Node};

/// Atoms on the torus closer than this (per coordinate, mod 1) are merged.
pub const TORUS_MERGE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    /// `R^n`
    Real(usize),
    /// `T^n = R^n / Z^n`, coordinates stored in `[0, 1)`.
    Torus(usize),
    /// `Z^n`
    Lattice(usize),
    /// Tuples of point indices of finite metric spaces.
    Abstract(usize),
}

impl Domain {
    pub fn dim(&self) -> usize {
        match *self {
            Domain::Real(n) | Domain::Torus(n) | Domain::Lattice(n) | Domain::Abstract(n) => n,
        }
    }

    fn tag(&self) -> &'static str {
        match self {
            Domain::Real(_) => "R^n",
            Domain::Torus(_) => "T^n",
            Domain::Lattice(_) => "Z^n",
            Domain::Abstract(_) => "abstract",
        }
    }

    fn with_dim(&self, n: usize) -> Domain {
        match self {
            Domain::Real(_) => Domain::Real(n),
            Domain::Torus(_) => Domain::Torus(n),
            Domain::Lattice(_) => Domain::Lattice(n),
            Domain::Abstract(_) => Domain::Abstract(n),
        }
    }

    fn same_kind(&self, other: &Domain) -> bool {
        std::mem::discriminant(self) == std::mem::discriminant(other)
    }

    fn parse(tag: &str, n: usize) -> Result<Domain> {
        match tag {
            "R^n" => Ok(Domain::Real(n)),
            "T^n" => Ok(Domain::Torus(n)),
            "Z^n" => Ok(Domain::Lattice(n)),
            "abstract" => Ok(Domain::Abstract(n)),
            other => Err(Error::param("domain", format!("unknown domain `{other}`"))),
        }
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Domain::Real(n) => write!(f, "R^{n}"),
            Domain::Torus(n) => write!(f, "T^{n}"),
            Domain::Lattice(n) => write!(f, "Z^{n}"),
            Domain::Abstract(n) => write!(f, "abstract({n})"),
        }
    }
}

fn wrap(x: f64) -> f64 {
    let r = x.rem_euclid(1.0);
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

/// `lambda(f) = sum_i w_i f(p_i)` with weights `w_i >= 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawFunctional", into = "RawFunctional")]
pub struct DiscreteFunctional {
    domain: Domain,
    atoms: Vec<(Vec<f64>, f64)>,
}

#[derive(Serialize, Deserialize)]
struct RawFunctional {
    domain: String,
    n: usize,
    atoms: Vec<(Vec<f64>, f64)>,
}

impl TryFrom<RawFunctional> for DiscreteFunctional {
    type Error = Error;

    fn try_from(raw: RawFunctional) -> Result<Self> {
        DiscreteFunctional::new(Domain::parse(&raw.domain, raw.n)?, raw.atoms)
    }
}

impl From<DiscreteFunctional> for RawFunctional {
    fn from(l: DiscreteFunctional) -> Self {
        RawFunctional {
            domain: l.domain.tag().to_string(),
            n: l.domain.dim(),
            atoms: l.atoms,
        }
    }
}

impl DiscreteFunctional {
    pub fn new(domain: Domain, atoms: Vec<(Vec<f64>, f64)>) -> Result<Self> {
        let n = domain.dim();
        let mut checked = Vec::with_capacity(atoms.len());
        for (k, (mut p, w)) in atoms.into_iter().enumerate() {
            if !(w >= 0.0 && w.is_finite()) {
                return Err(Error::param("atoms", format!("atom {k} has weight {w}")));
            }
            if p.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: p.len(),
                    index: k,
                });
            }
            if p.iter().any(|x| !x.is_finite()) {
                return Err(Error::param("atoms", format!("atom {k} has a non-finite coordinate")));
            }
            match domain {
                Domain::Torus(_) => p.iter_mut().for_each(|x| *x = wrap(*x)),
                Domain::Lattice(_) if p.iter().any(|x| x.fract() != 0.0) => {
                    return Err(Error::param("atoms", format!("atom {k} is not a lattice point")));
                }
                Domain::Abstract(_) if p.iter().any(|x| x.fract() != 0.0 || *x < 0.0) => {
                    return Err(Error::param("atoms", format!("atom {k} is not a point index")));
                }
                _ => {}
            }
            checked.push((p, w));
        }
        Ok(DiscreteFunctional { domain, atoms: checked })
    }

    /// Unit mass at `p`.
    pub fn dirac(domain: Domain, p: Vec<f64>) -> Result<Self> {
        Self::new(domain, vec![(p, 1.0)])
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn atoms(&self) -> &[(Vec<f64>, f64)] {
        &self.atoms
    }

    /// `C = sum_i w_i`, so that `|lambda(f)| <= C sup |f|`.
    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.1).sum()
    }

    fn same_point(&self, p: &[f64], q: &[f64]) -> bool {
        match self.domain {
            Domain::Torus(_) => p.iter().zip(q).all(|(a, b)| {
                let d = (a - b).abs();
                d.min(1.0 - d) <= TORUS_MERGE_TOLERANCE
            }),
            _ => p == q,
        }
    }

    /// Positive-weight atoms with coincident points merged, in lexicographic
    /// order of points.
    pub fn merged(&self) -> DiscreteFunctional {
        let torus = matches!(self.domain, Domain::Torus(_));
        let mut atoms: Vec<(Vec<f64>, f64)> = self
            .atoms
            .iter()
            .filter(|a| a.1 > 0.0)
            .map(|(p, w)| {
                let mut p = p.clone();
                if torus {
                    // points just below 1 coincide with 0
                    p.iter_mut()
                        .filter(|x| 1.0 - **x <= TORUS_MERGE_TOLERANCE)
                        .for_each(|x| *x = 0.0);
                }
                (p, *w)
            })
            .collect();
        atoms.sort_by(|a, b| lex(&a.0, &b.0));
        let mut out: Vec<(Vec<f64>, f64)> = Vec::with_capacity(atoms.len());
        for (p, w) in atoms {
            // sorted order keeps coincident points within a run of nearly
            // equal first coordinates
            let slot = out
                .iter_mut()
                .rev()
                .take_while(|(q, _)| {
                    q.first()
                        .zip(p.first())
                        .is_none_or(|(a, b)| (b - a).abs() <= TORUS_MERGE_TOLERANCE)
                })
                .find(|(q, _)| self.same_point(q, &p));
            match slot {
                Some(slot) => slot.1 += w,
                None => out.push((p, w)),
            }
        }
        DiscreteFunctional {
            domain: self.domain,
            atoms: out,
        }
    }

    /// Kernel of `lambda(f) = sum_i w_i f(p_i)`.
    fn sum_over_atoms(&self, mut f: impl FnMut(&[f64]) -> f64) -> Result<f64> {
        let mut total = 0.0;
        for (p, w) in &self.atoms {
            let v = f(p);
            if !v.is_finite() {
                return Err(Error::InvalidFunction(format!("f({p:?}) = {v}")));
            }
            total += w * v;
        }
        Ok(total)
    }

    fn require_group(&self) -> Result<()> {
        if let Domain::Abstract(_) = self.domain {
            return Err(Error::IncompatibleDomains(
                "an abstract metric space has no group structure".into(),
            ));
        }
        Ok(())
    }

    fn require_same(&self, other: &DiscreteFunctional) -> Result<()> {
        if self.domain != other.domain {
            return Err(Error::IncompatibleDomains(format!(
                "{} and {}",
                self.domain, other.domain
            )));
        }
        Ok(())
    }

    /// `x - y` in the domain group.
    fn sub(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        let d = x.iter().zip(y).map(|(a, b)| a - b);
        match self.domain {
            Domain::Torus(_) => d.map(wrap).collect(),
            _ => d.collect(),
        }
    }
}

fn lex(a: &[f64], b: &[f64]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}

pub fn evaluate(lam: &DiscreteFunctional, f: impl Fn(&[f64]) -> f64) -> Result<f64> {
    lam.sum_over_atoms(f)
}

/// Points carrying positive weight.
pub fn support(lam: &DiscreteFunctional) -> Vec<Vec<f64>> {
    lam.merged().atoms.into_iter().map(|a| a.0).collect()
}

/// `lambda1 x lambda2`, with atoms `((p, q), w_p w_q)`.
pub fn product(l1: &DiscreteFunctional, l2: &DiscreteFunctional) -> Result<DiscreteFunctional> {
    if !l1.domain.same_kind(&l2.domain) {
        return Err(Error::IncompatibleDomains(format!(
            "cannot form the product of {} and {}",
            l1.domain, l2.domain
        )));
    }
    let domain = l1.domain.with_dim(l1.domain.dim() + l2.domain.dim());
    let mut atoms = Vec::with_capacity(l1.atoms.len() * l2.atoms.len());
    for (p, wp) in &l1.atoms {
        for (q, wq) in &l2.atoms {
            let mut pq = p.clone();
            pq.extend_from_slice(q);
            atoms.push((pq, wp * wq));
        }
    }
    DiscreteFunctional::new(domain, atoms)
}

/// `lambda1(x -> lambda2(y -> phi(x, y)))`.
pub fn iterated_evaluate(
    l1: &DiscreteFunctional,
    l2: &DiscreteFunctional,
    phi: impl Fn(&[f64], &[f64]) -> f64,
) -> Result<f64> {
    let mut err = None;
    let v = l1.sum_over_atoms(|x| match l2.sum_over_atoms(|y| phi(x, y)) {
        Ok(v) => v,
        Err(e) => {
            err = Some(e);
            0.0
        }
    })?;
    match err {
        Some(e) => Err(e),
        None => Ok(v),
    }
}

/// `(lambda * f)(y) = sum_i w_i f(y - p_i)`.
pub fn convolve_fn(lam: &DiscreteFunctional, f: impl Fn(&[f64]) -> f64, y: &[f64]) -> Result<f64> {
    lam.require_group()?;
    if y.len() != lam.domain.dim() {
        return Err(Error::DimensionMismatch {
            expected: lam.domain.dim(),
            got: y.len(),
            index: 0,
        });
    }
    lam.sum_over_atoms(|p| f(&lam.sub(y, p)))
}

/// `lambda1 * lambda2`, with atoms `(p + q, w_p w_q)` merged on coincidence.
pub fn convolve(l1: &DiscreteFunctional, l2: &DiscreteFunctional) -> Result<DiscreteFunctional> {
    l1.require_group()?;
    l1.require_same(l2)?;
    let mut atoms = Vec::with_capacity(l1.atoms.len() * l2.atoms.len());
    for (p, wp) in &l1.atoms {
        for (q, wq) in &l2.atoms {
            let s: Vec<f64> = p.iter().zip(q).map(|(a, b)| a + b).collect();
            atoms.push((s, wp * wq));
        }
    }
    Ok(DiscreteFunctional::new(l1.domain, atoms)?.merged())
}

#[derive(Debug, Clone, PartialEq)]
pub struct FourierValue {
    pub w: Vec<f64>,
    pub value: Complex64,
}

impl Serialize for FourierValue {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("FourierValue", 4)?;
        st.serialize_field("w", &self.w)?;
        st.serialize_field("re", &self.value.re)?;
        st.serialize_field("im", &self.value.im)?;
        st.serialize_field("abs", &self.value.norm())?;
        st.end()
    }
}

/// `E^w(x) = exp(2 pi i x.w)`.
pub fn character(w: &[f64], x: &[f64]) -> Complex64 {
    let phase: f64 = w.iter().zip(x).map(|(a, b)| a * b).sum();
    Complex64::from_polar(1.0, 2.0 * PI * phase)
}

/// `lambda_hat(w) = lambda(E^-w) = sum_i w_i exp(-2 pi i p_i.w)`. Frequencies
/// live in the dual group: integer vectors for the torus, any real vector
/// otherwise (for the lattice only `w mod 1` matters).
pub fn fourier(lam: &DiscreteFunctional, w: &[f64]) -> Result<FourierValue> {
    lam.require_group()?;
    let n = lam.domain.dim();
    if w.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: w.len(),
            index: 0,
        });
    }
    if w.iter().any(|x| !x.is_finite()) {
        return Err(Error::param("w", "frequency must be finite"));
    }
    if let Domain::Torus(_) = lam.domain {
        if w.iter().any(|x| x.fract() != 0.0) {
            return Err(Error::param("w", "torus frequencies must be integers"));
        }
    }
    let neg: Vec<f64> = w.iter().map(|x| -x).collect();
    let value = lam.atoms.iter().map(|(p, wt)| character(&neg, p) * wt).sum();
    Ok(FourierValue { w: w.to_vec(), value })
}

/// A test function on the domain of a functional.
pub type TestFn<'a> = &'a dyn Fn(&[f64]) -> f64;

/// `max_f |lambda_j(f) - lambda(f)|` over the test functions, for each `j`.
pub fn weak_convergence_check(
    seq: &[DiscreteFunctional],
    lam: &DiscreteFunctional,
    tests: &[TestFn<'_>],
) -> Result<Vec<f64>> {
    let reference = tests.iter().map(|f| evaluate(lam, f)).collect::<Result<Vec<f64>>>()?;
    seq.iter()
        .map(|lj| {
            lj.require_same(lam)?;
            tests
                .iter()
                .zip(&reference)
                .try_fold(0.0f64, |acc, (f, r)| Ok(acc.max((evaluate(lj, f)? - r).abs())))
        })
        .collect()
}

/// The right-continuous distribution function `mu(x) = lambda((-inf, x])`,
/// whose Stieltjes integrals reproduce `lambda` on continuous functions.
pub fn to_stieltjes(lam: &DiscreteFunctional) -> Result<MonotoneFn> {
    if lam.domain != Domain::Real(1) {
        return Err(Error::IncompatibleDomains(format!(
            "distribution functions need R^1, got {}",
            lam.domain
        )));
    }
    let merged = lam.merged();
    if merged.atoms.is_empty() {
        return MonotoneFn::constant(0.0);
    }
    let mut acc = 0.0;
    let nodes = merged
        .atoms
        .iter()
        .map(|(p, w)| {
            let before = acc;
            acc += w;
            Node::new(p[0], before, acc)
        })
        .collect();
    MonotoneFn::new(nodes)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionalMaximalBound {
    pub alpha: f64,
    pub t: f64,
    /// Estimated `lambda*_alpha` at every point of the space.
    pub maximal: Vec<f64>,
    /// Points with `lambda*_alpha > t`.
    pub superlevel: SubsetRef,
    /// One ball per point of `superlevel` with ratio above `t`.
    pub witnesses: SetFamily,
    /// Indices into `witnesses` of the greedily selected disjoint balls.
    pub selected: Vec<usize>,
    pub enlargements: SetFamily,
    /// `sum (diam U_hat)^alpha` over the enlarged selected balls.
    pub content: f64,
    /// `3^alpha t^-1 C`
    pub bound: f64,
    pub enlargements_cover: bool,
}

/// Maximal-function estimate for a functional on one finite metric space.
///
/// The test functions are indicators of closed balls of positive diameter, so
/// `lambda*_alpha(x)` is the largest `lambda(B) / (diam B)^alpha` over balls
/// `B` containing `x`. The witnessing balls for `{lambda*_alpha > t}` are
/// thinned to a disjoint family whose enlargements cover the set.
pub fn functional_maximal_bound(
    space: &FiniteMetricSpace,
    lam: &DiscreteFunctional,
    alpha: f64,
    t: f64,
) -> Result<FunctionalMaximalBound> {
    if lam.domain != Domain::Abstract(1) {
        return Err(Error::IncompatibleDomains(format!(
            "needs a functional on one abstract space, got {}",
            lam.domain
        )));
    }
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::param("alpha", format!("{alpha} must be positive")));
    }
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::param("t", format!("{t} must be positive")));
    }
    let n = space.len();
    let mut mass = vec![0.0; n];
    for (p, w) in &lam.atoms {
        let i = p[0] as usize;
        space.check_index(i)?;
        mass[i] += w;
    }

    // closed balls {z : d(c, z) <= d(c, y)}, deduplicated
    let mut balls: Vec<SubsetRef> = Vec::new();
    for c in 0..n {
        let mut order: Vec<(f64, usize)> = (0..n).map(|z| (space.distance(c, z), z)).collect();
        order.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut k = 0;
        while k < n {
            let r = order[k].0;
            while k < n && order[k].0 <= r {
                k += 1;
            }
            if r > 0.0 {
                balls.push(order[..k].iter().map(|e| e.1).collect());
            }
        }
    }
    balls.sort_by(|a, b| a.indices().cmp(b.indices()));
    balls.dedup();
    let candidates: Vec<(SubsetRef, f64)> = balls
        .into_iter()
        .filter_map(|b| {
            let diam = diameter_unchecked(space, b.indices());
            (diam > 0.0).then(|| {
                let m: f64 = b.iter().map(|z| mass[z]).sum();
                let ratio = m / diam.powf(alpha);
                (b, ratio)
            })
        })
        .collect();
    if candidates.is_empty() {
        return Err(Error::Precondition("no ball of positive diameter".into()));
    }

    let mut maximal = vec![0.0f64; n];
    let mut best_ball = vec![usize::MAX; n];
    for (k, (b, ratio)) in candidates.iter().enumerate() {
        for z in b.iter() {
            if *ratio > maximal[z] {
                maximal[z] = *ratio;
                best_ball[z] = k;
            }
        }
    }
    let superlevel: SubsetRef = (0..n).filter(|&z| maximal[z] > t).collect();
    let mut chosen: Vec<usize> = superlevel.iter().map(|z| best_ball[z]).collect();
    chosen.sort_unstable();
    chosen.dedup();
    let witnesses = SetFamily::new(chosen.iter().map(|&k| candidates[k].0.clone()).collect());
    let selected = if witnesses.is_empty() {
        Vec::new()
    } else {
        greedy_disjoint_selection(space, &witnesses)?
    };
    let enlargements = SetFamily::new(
        selected
            .iter()
            .map(|&k| enlargement(space, &witnesses.members[k]))
            .collect::<Result<Vec<_>>>()?,
    );
    let content = enlargements
        .members
        .iter()
        .map(|e| diameter_unchecked(space, e.indices()).powf(alpha))
        .sum();
    let enlargements_cover = enlargements.covers(&superlevel);
    Ok(FunctionalMaximalBound {
        alpha,
        t,
        maximal,
        superlevel,
        witnesses,
        selected,
        enlargements,
        content,
        bound: 3f64.powf(alpha) * lam.total_mass() / t,
        enlargements_cover,
    })
}
