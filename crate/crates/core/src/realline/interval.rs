use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An interval of the real line with explicit endpoint closedness. Infinite
/// endpoints are always open.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawInterval")]
pub struct IntervalSpec {
    pub lo: f64,
    pub hi: f64,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

#[derive(Deserialize)]
struct RawInterval {
    lo: Option<f64>,
    hi: Option<f64>,
    lo_closed: bool,
    hi_closed: bool,
}

impl TryFrom<RawInterval> for IntervalSpec {
    type Error = Error;

    fn try_from(r: RawInterval) -> Result<Self> {
        IntervalSpec::new(
            r.lo.unwrap_or(f64::NEG_INFINITY),
            r.hi.unwrap_or(f64::INFINITY),
            r.lo_closed,
            r.hi_closed,
        )
    }
}

impl IntervalSpec {
    pub fn new(lo: f64, hi: f64, lo_closed: bool, hi_closed: bool) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() {
            return Err(Error::param("interval", "NaN endpoint"));
        }
        if lo > hi {
            return Err(Error::param("interval", format!("lo {lo} exceeds hi {hi}")));
        }
        if (lo_closed && lo.is_infinite()) || (hi_closed && hi.is_infinite()) {
            return Err(Error::param("interval", "infinite endpoints must be open"));
        }
        if lo == f64::INFINITY || hi == f64::NEG_INFINITY {
            return Err(Error::param("interval", "interval lies at infinity"));
        }
        if lo == hi && !(lo_closed && hi_closed) {
            return Err(Error::param(
                "interval",
                format!("degenerate interval at {lo} must be closed on both ends"),
            ));
        }
        Ok(IntervalSpec {
            lo,
            hi,
            lo_closed,
            hi_closed,
        })
    }

    pub fn open(lo: f64, hi: f64) -> Result<Self> {
        Self::new(lo, hi, false, false)
    }

    pub fn closed(lo: f64, hi: f64) -> Result<Self> {
        Self::new(lo, hi, true, true)
    }

    pub fn point(u: f64) -> Result<Self> {
        Self::closed(u, u)
    }

    pub fn whole_line() -> Self {
        IntervalSpec {
            lo: f64::NEG_INFINITY,
            hi: f64::INFINITY,
            lo_closed: false,
            hi_closed: false,
        }
    }

    pub fn is_bounded(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    /// Ordinary length `hi - lo`.
    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        let above = if self.lo_closed { x >= self.lo } else { x > self.lo };
        let below = if self.hi_closed { x <= self.hi } else { x < self.hi };
        above && below
    }

    /// `self` lies inside `other`.
    pub fn is_within(&self, other: &IntervalSpec) -> bool {
        let lo_ok = other.lo < self.lo || (other.lo == self.lo && (other.lo_closed || !self.lo_closed));
        let hi_ok = self.hi < other.hi || (other.hi == self.hi && (other.hi_closed || !self.hi_closed));
        lo_ok && hi_ok
    }

    /// Compares left ends: `Less` when `self` reaches further left.
    fn cmp_left(&self, other: &IntervalSpec) -> std::cmp::Ordering {
        self.lo
            .total_cmp(&other.lo)
            .then_with(|| other.lo_closed.cmp(&self.lo_closed))
    }

    /// Compares right ends: `Greater` when `self` reaches further right.
    fn cmp_right(&self, other: &IntervalSpec) -> std::cmp::Ordering {
        self.hi
            .total_cmp(&other.hi)
            .then_with(|| self.hi_closed.cmp(&other.hi_closed))
    }
}

/// Union of intervals as disjoint components in increasing order.
pub fn union_components(intervals: &[IntervalSpec]) -> Vec<IntervalSpec> {
    let mut sorted: Vec<IntervalSpec> = intervals.to_vec();
    sorted.sort_by(|a, b| a.cmp_left(b));
    let mut out: Vec<IntervalSpec> = Vec::new();
    for iv in sorted {
        if let Some(cur) = out.last_mut() {
            let joins = iv.lo < cur.hi || (iv.lo == cur.hi && (cur.hi_closed || iv.lo_closed));
            if joins {
                if iv.cmp_right(cur).is_gt() {
                    cur.hi = iv.hi;
                    cur.hi_closed = iv.hi_closed;
                }
                continue;
            }
        }
        out.push(iv);
    }
    out
}

/// Total length of a union of intervals.
pub fn union_length(intervals: &[IntervalSpec]) -> f64 {
    union_components(intervals).iter().map(IntervalSpec::len).sum()
}

/// Points at which the number of intervals containing a point can change:
/// every finite endpoint, midpoints between consecutive ones, and one point
/// beyond each end.
pub(crate) fn probe_points(intervals: &[IntervalSpec]) -> Vec<f64> {
    let mut ends: Vec<f64> = intervals
        .iter()
        .flat_map(|i| [i.lo, i.hi])
        .filter(|e| e.is_finite())
        .collect();
    ends.sort_by(f64::total_cmp);
    ends.dedup();
    let mut probes = Vec::with_capacity(2 * ends.len() + 2);
    if let (Some(&first), Some(&last)) = (ends.first(), ends.last()) {
        probes.push(first - 1.0);
        for w in ends.windows(2) {
            probes.push(w[0]);
            probes.push(w[0] + (w[1] - w[0]) / 2.0);
        }
        probes.push(last);
        probes.push(last + 1.0);
    } else if !intervals.is_empty() {
        probes.push(0.0);
    }
    probes
}

/// Drops intervals until no point lies in more than two of them, keeping the
/// union unchanged. Whenever three intervals share a point, the one reaching
/// neither furthest left nor furthest right lies in the union of the other two
/// and is removed. Returns the indices of the kept intervals, increasing.
pub fn interval_overlap_reduce(intervals: &[IntervalSpec]) -> Vec<usize> {
    let mut alive: Vec<usize> = (0..intervals.len()).collect();
    loop {
        let live: Vec<IntervalSpec> = alive.iter().map(|&i| intervals[i]).collect();
        let crowded = probe_points(&live).into_iter().find_map(|p| {
            let holders: Vec<usize> = alive.iter().copied().filter(|&i| intervals[i].contains(p)).collect();
            (holders.len() >= 3).then_some(holders)
        });
        let Some(holders) = crowded else {
            return alive;
        };
        let leftmost = *holders
            .iter()
            .min_by(|&&a, &&b| intervals[a].cmp_left(&intervals[b]).then(a.cmp(&b)))
            .unwrap();
        let rightmost = *holders
            .iter()
            .filter(|&&i| i != leftmost)
            .max_by(|&&a, &&b| intervals[a].cmp_right(&intervals[b]).then(b.cmp(&a)))
            .unwrap();
        let drop = holders
            .iter()
            .copied()
            .find(|&i| i != leftmost && i != rightmost)
            .expect("three holders");
        alive.retain(|&i| i != drop);
    }
}

/// `phi(x) = sum_p a_p 1_{J_p}(x)` over bounded intervals with positive weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<RawTerm>", into = "Vec<RawTerm>")]
pub struct StepFunction {
    terms: Vec<(IntervalSpec, f64)>,
}

#[derive(Serialize, Deserialize)]
struct RawTerm {
    lo: f64,
    hi: f64,
    lo_closed: bool,
    hi_closed: bool,
    weight: f64,
}

impl TryFrom<Vec<RawTerm>> for StepFunction {
    type Error = Error;

    fn try_from(raw: Vec<RawTerm>) -> Result<Self> {
        let terms = raw
            .into_iter()
            .map(|r| Ok((IntervalSpec::new(r.lo, r.hi, r.lo_closed, r.hi_closed)?, r.weight)))
            .collect::<Result<Vec<_>>>()?;
        StepFunction::new(terms)
    }
}

impl From<StepFunction> for Vec<RawTerm> {
    fn from(s: StepFunction) -> Self {
        s.terms
            .into_iter()
            .map(|(j, weight)| RawTerm {
                lo: j.lo,
                hi: j.hi,
                lo_closed: j.lo_closed,
                hi_closed: j.hi_closed,
                weight,
            })
            .collect()
    }
}

impl StepFunction {
    pub fn new(terms: Vec<(IntervalSpec, f64)>) -> Result<Self> {
        for (k, (j, a)) in terms.iter().enumerate() {
            if !j.is_bounded() {
                return Err(Error::param("phi", format!("term {k} is unbounded")));
            }
            if !(*a > 0.0 && a.is_finite()) {
                return Err(Error::param(
                    "phi",
                    format!("term {k} has weight {a}, must be positive"),
                ));
            }
        }
        Ok(StepFunction { terms })
    }

    pub fn terms(&self) -> &[(IntervalSpec, f64)] {
        &self.terms
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.terms.iter().filter(|(j, _)| j.contains(x)).map(|(_, a)| a).sum()
    }

    /// `sum_p a_p |J_p|`, the integral of the step function.
    pub fn integral(&self) -> f64 {
        self.terms.iter().map(|(j, a)| a * j.len()).sum()
    }

    /// Sorted distinct endpoints.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut e: Vec<f64> = self.terms.iter().flat_map(|(j, _)| [j.lo, j.hi]).collect();
        e.sort_by(f64::total_cmp);
        e.dedup();
        e
    }

    /// The exact set `{ phi > t }` as disjoint components, by evaluating `phi`
    /// at every breakpoint and inside every gap between breakpoints.
    pub fn superlevel(&self, t: f64) -> Vec<IntervalSpec> {
        let e = self.breakpoints();
        let mut pieces = Vec::new();
        for (k, &b) in e.iter().enumerate() {
            if self.eval(b) > t {
                pieces.push(IntervalSpec::point(b).expect("finite point"));
            }
            if let Some(&next) = e.get(k + 1) {
                let mid = b + (next - b) / 2.0;
                if self.eval(mid) > t {
                    pieces.push(IntervalSpec::open(b, next).expect("ordered breakpoints"));
                }
            }
        }
        union_components(&pieces)
    }
}

/// Superlevel set of a step function with its Chebyshev bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChebyshevReport {
    pub t: f64,
    pub superlevel: Vec<IntervalSpec>,
    pub length: f64,
    /// `t^-1 sum_p a_p |J_p|`
    pub bound: f64,
}

pub fn step_chebyshev(phi: &StepFunction, t: f64) -> Result<ChebyshevReport> {
    if !(t > 0.0) {
        return Err(Error::param("t", format!("{t} must be positive")));
    }
    let superlevel = phi.superlevel(t);
    let length = superlevel.iter().map(IntervalSpec::len).sum();
    Ok(ChebyshevReport {
        t,
        superlevel,
        length,
        bound: phi.integral() / t,
    })
}
