use serde::{Deserialize, Serialize};

use super::interval::IntervalSpec;
use crate::error::{Error, Result};

/// A bounded nondecreasing function on the line, given by nodes
/// `(x_k, mu(x_k-), mu(x_k+))`. Between consecutive nodes it is linear from
/// `mu(x_k+)` to `mu(x_{k+1}-)`; the tails are constant.
///
/// Point values use the right-continuous representative, `mu(x_k) = mu(x_k+)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMonotone", into = "RawMonotone")]
pub struct MonotoneFn {
    nodes: Vec<Node>,
    left: f64,
    right: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Node {
    pub x: f64,
    pub minus: f64,
    pub plus: f64,
}

impl Node {
    pub fn new(x: f64, minus: f64, plus: f64) -> Self {
        Node { x, minus, plus }
    }

    pub fn continuous(x: f64, y: f64) -> Self {
        Node { x, minus: y, plus: y }
    }

    pub fn jump(&self) -> f64 {
        self.plus - self.minus
    }
}

#[derive(Serialize, Deserialize)]
struct RawMonotone {
    nodes: Vec<(f64, f64, f64)>,
    #[serde(default)]
    left: Option<f64>,
    #[serde(default)]
    right: Option<f64>,
}

impl TryFrom<RawMonotone> for MonotoneFn {
    type Error = Error;

    fn try_from(raw: RawMonotone) -> Result<Self> {
        let nodes = raw.nodes.into_iter().map(|(x, m, p)| Node::new(x, m, p)).collect();
        let mu = MonotoneFn::new(nodes)?;
        if let Some(a) = raw.left {
            if a != mu.left {
                return Err(Error::param(
                    "left",
                    format!("{a} differs from the first node's left value {}", mu.left),
                ));
            }
        }
        if let Some(b) = raw.right {
            if b != mu.right {
                return Err(Error::param(
                    "right",
                    format!("{b} differs from the last node's right value {}", mu.right),
                ));
            }
        }
        Ok(mu)
    }
}

impl From<MonotoneFn> for RawMonotone {
    fn from(mu: MonotoneFn) -> Self {
        RawMonotone {
            nodes: mu.nodes.iter().map(|n| (n.x, n.minus, n.plus)).collect(),
            left: Some(mu.left),
            right: Some(mu.right),
        }
    }
}

impl MonotoneFn {
    pub fn new(nodes: Vec<Node>) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::EmptySet("monotone function needs at least one node"));
        }
        for (k, n) in nodes.iter().enumerate() {
            if !(n.x.is_finite() && n.minus.is_finite() && n.plus.is_finite()) {
                return Err(Error::param("nodes", format!("node {k} is not finite")));
            }
            if n.minus > n.plus {
                return Err(Error::param("nodes", format!("node {k} has a negative jump")));
            }
        }
        for (k, w) in nodes.windows(2).enumerate() {
            if w[0].x >= w[1].x {
                return Err(Error::param(
                    "nodes",
                    format!("positions must increase strictly (nodes {k} and {})", k + 1),
                ));
            }
            if w[0].plus > w[1].minus {
                return Err(Error::param(
                    "nodes",
                    format!("function decreases between nodes {k} and {}", k + 1),
                ));
            }
        }
        let left = nodes[0].minus;
        let right = nodes[nodes.len() - 1].plus;
        Ok(MonotoneFn { nodes, left, right })
    }

    pub fn constant(c: f64) -> Result<Self> {
        Self::new(vec![Node::continuous(0.0, c)])
    }

    /// The unit-height step at `p`: 0 to the left, 1 from `p` on.
    pub fn unit_step(p: f64) -> Result<Self> {
        Self::new(vec![Node::new(p, 0.0, 1.0)])
    }

    /// Continuous and linear through the given points, constant outside.
    pub fn linear_through(points: &[(f64, f64)]) -> Result<Self> {
        Self::new(points.iter().map(|&(x, y)| Node::continuous(x, y)).collect())
    }

    /// `clamp(x, 0, 1)`.
    pub fn clamp_unit() -> Self {
        Self::linear_through(&[(0.0, 0.0), (1.0, 1.0)]).expect("valid nodes")
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    /// `A`, the limit at minus infinity.
    pub fn left(&self) -> f64 {
        self.left
    }

    /// `B`, the limit at plus infinity.
    pub fn right(&self) -> f64 {
        self.right
    }

    /// `B - A`.
    pub fn total_mass(&self) -> f64 {
        self.right - self.left
    }

    pub fn is_constant(&self) -> bool {
        self.left == self.right
    }

    /// Index of the first node with position `>= x`.
    fn locate(&self, x: f64) -> usize {
        self.nodes.partition_point(|n| n.x < x)
    }

    /// Value strictly between nodes `k` and `k + 1`.
    fn interpolate(&self, k: usize, x: f64) -> f64 {
        let (a, b) = (self.nodes[k], self.nodes[k + 1]);
        let t = (x - a.x) / (b.x - a.x);
        (a.plus + (b.minus - a.plus) * t).clamp(a.plus, b.minus)
    }

    /// Slope of the linear piece between nodes `k` and `k + 1`.
    pub(crate) fn segment_slope(&self, k: usize) -> f64 {
        let (a, b) = (self.nodes[k], self.nodes[k + 1]);
        (b.minus - a.plus) / (b.x - a.x)
    }

    fn read(&self, x: f64, at_node: impl Fn(&Node) -> f64) -> f64 {
        let k = self.locate(x);
        if k == self.nodes.len() {
            return self.right;
        }
        if self.nodes[k].x == x {
            return at_node(&self.nodes[k]);
        }
        if k == 0 {
            self.left
        } else {
            self.interpolate(k - 1, x)
        }
    }

    /// Right-continuous point value.
    pub fn eval(&self, x: f64) -> f64 {
        self.read(x, |n| n.plus)
    }

    pub fn left_limit(&self, x: f64) -> f64 {
        self.read(x, |n| n.minus)
    }

    pub fn right_limit(&self, x: f64) -> f64 {
        self.read(x, |n| n.plus)
    }

    /// `mu(x) = c * mu(x)` for `c >= 0`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        if !(c >= 0.0 && c.is_finite()) {
            return Err(Error::param("c", format!("{c} must be finite and nonnegative")));
        }
        Self::new(
            self.nodes
                .iter()
                .map(|n| Node::new(n.x, c * n.minus, c * n.plus))
                .collect(),
        )
    }

    /// Pointwise sum, exact on the merged node set.
    pub fn sum(&self, other: &MonotoneFn) -> Result<Self> {
        let mut xs: Vec<f64> = self.nodes.iter().chain(&other.nodes).map(|n| n.x).collect();
        xs.sort_by(f64::total_cmp);
        xs.dedup();
        Self::new(
            xs.into_iter()
                .map(|x| {
                    Node::new(
                        x,
                        self.left_limit(x) + other.left_limit(x),
                        self.right_limit(x) + other.right_limit(x),
                    )
                })
                .collect(),
        )
    }
}

pub fn one_sided_limits(mu: &MonotoneFn, x: f64) -> (f64, f64) {
    (mu.left_limit(x), mu.right_limit(x))
}

/// `mu(J)` with the endpoint conventions: a closed end takes the limit from
/// outside the interval, an open end the limit from inside. Infinite ends read
/// `A` or `B`.
pub fn mu_length(mu: &MonotoneFn, j: &IntervalSpec) -> f64 {
    let lower = if j.lo == f64::NEG_INFINITY {
        mu.left
    } else if j.lo_closed {
        mu.left_limit(j.lo)
    } else {
        mu.right_limit(j.lo)
    };
    let upper = if j.hi == f64::INFINITY {
        mu.right
    } else if j.hi_closed {
        mu.right_limit(j.hi)
    } else {
        mu.left_limit(j.hi)
    };
    (upper - lower).max(0.0)
}

/// Nodes with a positive jump, as `(x, mu(x+) - mu(x-))`.
pub fn discontinuities(mu: &MonotoneFn) -> Vec<(f64, f64)> {
    mu.nodes
        .iter()
        .filter(|n| n.plus > n.minus)
        .map(|n| (n.x, n.jump()))
        .collect()
}

/// Continuous piecewise-linear function through `(x, y)` breakpoints with
/// strictly increasing `x`, extended constantly outside.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<(f64, f64)>", into = "Vec<(f64, f64)>")]
pub struct PiecewiseLinear {
    points: Vec<(f64, f64)>,
}

impl TryFrom<Vec<(f64, f64)>> for PiecewiseLinear {
    type Error = Error;

    fn try_from(points: Vec<(f64, f64)>) -> Result<Self> {
        PiecewiseLinear::new(points)
    }
}

impl From<PiecewiseLinear> for Vec<(f64, f64)> {
    fn from(p: PiecewiseLinear) -> Self {
        p.points
    }
}

impl PiecewiseLinear {
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptySet("piecewise-linear function needs a breakpoint"));
        }
        if points.iter().any(|(x, y)| !(x.is_finite() && y.is_finite())) {
            return Err(Error::param("points", "breakpoints must be finite"));
        }
        if points.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(Error::param("points", "breakpoint positions must increase strictly"));
        }
        Ok(PiecewiseLinear { points })
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn breakpoints(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.0)
    }

    pub fn eval(&self, x: f64) -> f64 {
        let k = self.points.partition_point(|p| p.0 < x);
        if k == self.points.len() {
            return self.points[k - 1].1;
        }
        let (x1, y1) = self.points[k];
        if x1 == x || k == 0 {
            return y1;
        }
        let (x0, y0) = self.points[k - 1];
        y0 + (y1 - y0) * ((x - x0) / (x1 - x0))
    }
}

/// `h = g1 - g2` on `[a, b]` with `g1(x) = V_a^x(h)` and `g2 = g1 - h`, both
/// nondecreasing. Outside `[a, b]` both are extended constantly.
pub fn jordan_decomposition(h: &PiecewiseLinear, a: f64, b: f64) -> Result<(MonotoneFn, MonotoneFn)> {
    if !(a < b) {
        return Err(Error::param("interval", format!("need a < b, got [{a}, {b}]")));
    }
    let mut xs = vec![a];
    xs.extend(h.breakpoints().filter(|&x| x > a && x < b));
    xs.push(b);
    let mut g1 = Vec::with_capacity(xs.len());
    let mut g2 = Vec::with_capacity(xs.len());
    let (mut var, mut neg) = (0.0, -h.eval(a));
    let mut prev = h.eval(a);
    for (k, &x) in xs.iter().enumerate() {
        let y = h.eval(x);
        if k > 0 {
            let dy = y - prev;
            var += dy.abs();
            neg += dy.abs() - dy;
        }
        prev = y;
        g1.push(Node::continuous(x, var));
        g2.push(Node::continuous(x, neg));
    }
    Ok((MonotoneFn::new(g1)?, MonotoneFn::new(g2)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_steps() -> MonotoneFn {
        MonotoneFn::new(vec![Node::new(0.0, 0.0, 0.3), Node::new(1.0, 0.3, 0.8)]).unwrap()
    }

    #[test]
    fn limits() {
        let mu = MonotoneFn::unit_step(0.0).unwrap();
        assert_eq!(one_sided_limits(&mu, 0.0), (0.0, 1.0));
        assert_eq!(one_sided_limits(&mu, -5.0), (0.0, 0.0));
        assert_eq!(one_sided_limits(&mu, 5.0), (1.0, 1.0));
        let c = MonotoneFn::clamp_unit();
        assert_eq!(one_sided_limits(&c, 0.25), (0.25, 0.25));
        assert_eq!(c.eval(2.0), 1.0);
    }

    #[test]
    fn validation() {
        assert!(MonotoneFn::new(vec![Node::new(0.0, 1.0, 0.0)]).is_err());
        assert!(MonotoneFn::new(vec![Node::continuous(0.0, 1.0), Node::continuous(1.0, 0.5)]).is_err());
        assert!(MonotoneFn::new(vec![Node::continuous(1.0, 0.0), Node::continuous(1.0, 0.5)]).is_err());
        assert!(serde_json::from_str::<MonotoneFn>(r#"{"nodes": [[0, 0, 1]], "left": 0, "right": 2}"#).is_err());
        let mu: MonotoneFn = serde_json::from_str(r#"{"nodes": [[0, 0, 1]], "left": 0, "right": 1}"#).unwrap();
        assert_eq!(mu, MonotoneFn::unit_step(0.0).unwrap());
        let back: MonotoneFn = serde_json::from_str(&serde_json::to_string(&mu).unwrap()).unwrap();
        assert_eq!(back, mu);
    }

    #[test]
    fn lengths() {
        let c = MonotoneFn::clamp_unit();
        let j = IntervalSpec::closed(0.2, 0.7).unwrap();
        assert!((mu_length(&c, &j) - 0.5).abs() < 1e-15);
        assert_eq!(mu_length(&c, &IntervalSpec::whole_line()), 1.0);

        let step = MonotoneFn::unit_step(0.0).unwrap();
        assert_eq!(mu_length(&step, &IntervalSpec::point(0.0).unwrap()), 1.0);
        assert_eq!(
            mu_length(&step, &IntervalSpec::new(0.0, 1.0, false, true).unwrap()),
            0.0
        );
        assert_eq!(
            mu_length(&step, &IntervalSpec::new(-1.0, 0.0, true, false).unwrap()),
            0.0
        );
        assert_eq!(mu_length(&c, &IntervalSpec::point(0.5).unwrap()), 0.0);
    }

    #[test]
    fn additivity_over_abutting_intervals() {
        let mu = two_steps();
        let (u, v, w) = (-0.5, 0.0, 1.0);
        let a = mu_length(&mu, &IntervalSpec::new(u, v, true, false).unwrap());
        let b = mu_length(&mu, &IntervalSpec::new(v, w, true, false).unwrap());
        let ab = mu_length(&mu, &IntervalSpec::new(u, w, true, false).unwrap());
        assert!((a + b - ab).abs() < 1e-15);
    }

    #[test]
    fn jumps() {
        assert!(discontinuities(&MonotoneFn::clamp_unit()).is_empty());
        let d = discontinuities(&two_steps());
        assert_eq!(d.len(), 2);
        let total: f64 = d.iter().map(|p| p.1).sum();
        assert!((total - 0.8).abs() < 1e-15);
        assert!(total <= two_steps().total_mass() + 1e-15);
    }

    #[test]
    fn sums_and_scaling() {
        let s = MonotoneFn::clamp_unit()
            .sum(&MonotoneFn::unit_step(0.5).unwrap())
            .unwrap();
        assert_eq!(one_sided_limits(&s, 0.5), (0.5, 1.5));
        assert_eq!(s.right(), 2.0);
        assert_eq!(s.scaled(2.0).unwrap().eval(0.25), 0.5);
    }

    #[test]
    fn jordan_of_monotone_and_abs() {
        let h = PiecewiseLinear::new(vec![(0.0, 1.0), (2.0, 5.0)]).unwrap();
        let (g1, g2) = jordan_decomposition(&h, 0.0, 2.0).unwrap();
        for x in [0.0, 0.5, 1.3, 2.0] {
            assert!((g1.eval(x) - (h.eval(x) - 1.0)).abs() < 1e-14);
            assert!((g2.eval(x) + 1.0).abs() < 1e-14);
        }
        let abs = PiecewiseLinear::new(vec![(-1.0, 1.0), (0.0, 0.0), (1.0, 1.0)]).unwrap();
        let (g1, g2) = jordan_decomposition(&abs, -1.0, 1.0).unwrap();
        assert_eq!(g1.eval(0.0), 1.0);
        assert_eq!(g1.eval(1.0), 2.0);
        for k in 0..=1000 {
            let x = -1.0 + 2.0 * k as f64 / 1000.0;
            assert!((g1.eval(x) - g2.eval(x) - abs.eval(x)).abs() < 1e-12);
        }
        assert!(jordan_decomposition(&abs, 1.0, 1.0).is_err());
    }
}
