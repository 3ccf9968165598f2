//! Piecewise initial states θ₀ on [0,1] with fractional-power endpoint
//! expansions.
//!
//! Segment `n` covers `(c_n, c_{n+1}]` (the first one also contains 0). Near
//! a breakpoint each segment is described by an [`EndpointExpansion`]
//! `Σ p_m d^{q_m}` where `d ≥ 0` is the distance to the breakpoint measured
//! into the segment and `q_m` is the actual power (`-0.25` for a
//! `(x-c)^{-1/4}` singularity).

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::{self, EndpointBehavior, Node, QuadConfig};

const POWER_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    /// Expansion in `s = y - c`, valid just right of `c`.
    Left,
    /// Expansion in `r = c - y`, valid just left of `c`.
    Right,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EndpointExpansion {
    pub point: f64,
    pub side: Side,
    /// `(p_m, q_m)` with strictly increasing powers.
    pub terms: Vec<(Complex64, f64)>,
}

impl EndpointExpansion {
    pub fn new(point: f64, side: Side, mut terms: Vec<(Complex64, f64)>) -> Result<Self> {
        terms.sort_by(|a, b| a.1.total_cmp(&b.1));
        let mut merged: Vec<(Complex64, f64)> = Vec::with_capacity(terms.len());
        for (p, q) in terms {
            if !q.is_finite() || !p.re.is_finite() || !p.im.is_finite() {
                return Err(Error::Validation("non-finite expansion term".into()));
            }
            match merged.last_mut() {
                Some(last) if (last.1 - q).abs() <= POWER_TOL => last.0 += p,
                _ => merged.push((p, q)),
            }
        }
        merged.retain(|(p, _)| *p != Complex64::new(0.0, 0.0));
        Ok(Self {
            point,
            side,
            terms: merged,
        })
    }

    pub fn eval(&self, d: f64) -> Complex64 {
        self.terms.iter().map(|(p, q)| p * d.powf(*q)).sum()
    }

    pub fn leading_power(&self) -> Option<f64> {
        self.terms.first().map(|t| t.1)
    }

    pub fn is_singular(&self) -> bool {
        self.terms.iter().any(|(_, q)| *q < 0.0 || (q - q.round()).abs() > POWER_TOL)
    }

    pub fn negated(&self) -> Self {
        Self {
            point: self.point,
            side: self.side,
            terms: self.terms.iter().map(|(p, q)| (-p, *q)).collect(),
        }
    }

    pub fn truncated(&self, cap: f64) -> Self {
        Self {
            point: self.point,
            side: self.side,
            terms: self.terms.iter().copied().filter(|t| t.1 <= cap + POWER_TOL).collect(),
        }
    }
}

/// Closed-form building blocks for segment bodies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum Term {
    /// `Σ a_m x^m`.
    Poly { coeffs: Vec<Complex64> },
    /// `amp · e^{rate (x - shift)}`.
    Exp { amp: Complex64, rate: Complex64, shift: f64 },
    /// `amp · (x - center)^power`.
    Power { amp: Complex64, center: f64, power: f64 },
}

fn is_integer(p: f64) -> bool {
    (p - p.round()).abs() <= POWER_TOL
}

impl Term {
    fn eval(&self, node: Node) -> Complex64 {
        match self {
            Term::Poly { coeffs } => {
                let y = node.y();
                coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, a| acc * y + a)
            }
            Term::Exp { amp, rate, shift } => amp * (rate * node.distance_from(*shift)).exp(),
            Term::Power { amp, center, power } => {
                let d = node.distance_from(*center);
                if is_integer(*power) {
                    amp * d.powi(power.round() as i32)
                } else {
                    amp * d.powf(*power)
                }
            }
        }
    }

    fn validate(&self, left: f64, right: f64) -> Result<()> {
        match self {
            Term::Poly { coeffs } => {
                if coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
                    return Err(Error::Validation("non-finite polynomial coefficient".into()));
                }
            }
            Term::Exp { amp, rate, shift } => {
                if !(amp.re.is_finite() && amp.im.is_finite() && rate.re.is_finite() && rate.im.is_finite() && shift.is_finite()) {
                    return Err(Error::Validation("non-finite exponential term".into()));
                }
            }
            Term::Power { amp, center, power } => {
                if !(amp.re.is_finite() && amp.im.is_finite() && center.is_finite() && power.is_finite()) {
                    return Err(Error::Validation("non-finite power term".into()));
                }
                let inside = *center > left && *center < right;
                if is_integer(*power) && *power >= 0.0 {
                    return Ok(());
                }
                if inside || *center > left && !is_integer(*power) {
                    return Err(Error::Validation(format!(
                        "power term (x-{center})^{power} must have its center at or left of the segment start {left}"
                    )));
                }
                if *center == left || *center == right {
                    if *power <= -0.5 {
                        return Err(Error::Validation(format!(
                            "power {power} at {center} is not square integrable"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Expansion at `c` in the distance `d` into the segment, powers up to `cap`.
    fn expansion_terms(&self, c: f64, side: Side, cap: f64) -> Vec<(Complex64, f64)> {
        // y = c + sign·d
        let sign: f64 = match side {
            Side::Left => 1.0,
            Side::Right => -1.0,
        };
        let max_m = if cap < 0.0 { 0 } else { cap.floor() as usize };
        let mut out = Vec::new();
        match self {
            Term::Poly { coeffs } => {
                // Taylor shift to c by repeated synthetic division.
                let mut work: Vec<Complex64> = coeffs.clone();
                let n = work.len();
                for k in 0..n {
                    for i in (k..n - 1).rev() {
                        let carry = work[i + 1] * c;
                        work[i] += carry;
                    }
                }
                for (m, a) in work.into_iter().enumerate().take(max_m + 1) {
                    out.push((a * sign.powi(m as i32), m as f64));
                }
            }
            Term::Exp { amp, rate, shift } => {
                let mut coeff = amp * (rate * (c - shift)).exp();
                let step = rate * sign;
                for m in 0..=max_m {
                    if m > 0 {
                        coeff = coeff * step / m as f64;
                    }
                    out.push((coeff, m as f64));
                }
            }
            Term::Power { amp, center, power } => {
                let d0 = c - center;
                if d0 == 0.0 {
                    // Exact: sign^p d^p, integer powers only on the right side.
                    let s = if side == Side::Right { sign.powi(power.round() as i32) } else { 1.0 };
                    if *power <= cap + POWER_TOL {
                        out.push((amp * s, *power));
                    }
                } else {
                    let base = if is_integer(*power) {
                        d0.powi(power.round() as i32)
                    } else {
                        d0.powf(*power)
                    };
                    let mut binom = 1.0;
                    for m in 0..=max_m {
                        if m > 0 {
                            binom *= (power - (m as f64 - 1.0)) / m as f64;
                            if binom == 0.0 {
                                break;
                            }
                        }
                        out.push((amp * base * binom * (sign / d0).powi(m as i32), m as f64));
                    }
                }
            }
        }
        out
    }
}

type Evaluator = Arc<dyn Fn(f64) -> Complex64 + Send + Sync>;

/// A user-supplied smooth evaluator with its endpoint expansions.
#[derive(Clone)]
pub struct CustomBody {
    pub eval: Evaluator,
    pub left: EndpointExpansion,
    pub right: EndpointExpansion,
}

impl fmt::Debug for CustomBody {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomBody")
            .field("left", &self.left)
            .field("right", &self.right)
            .finish_non_exhaustive()
    }
}

#[derive(Debug, Clone)]
pub enum SegmentBody {
    Terms(Vec<Term>),
    Custom(CustomBody),
}

#[derive(Debug, Clone)]
pub struct Segment {
    pub left: f64,
    pub right: f64,
    pub body: SegmentBody,
}

impl Segment {
    fn eval(&self, node: Node) -> Complex64 {
        match &self.body {
            SegmentBody::Terms(terms) => terms.iter().map(|t| t.eval(node)).sum(),
            SegmentBody::Custom(c) => (c.eval)(node.y()),
        }
    }

    pub fn expansion(&self, side: Side, cap: f64) -> Result<EndpointExpansion> {
        let c = match side {
            Side::Left => self.left,
            Side::Right => self.right,
        };
        match &self.body {
            SegmentBody::Terms(terms) => {
                let all = terms.iter().flat_map(|t| t.expansion_terms(c, side, cap)).collect();
                EndpointExpansion::new(c, side, all)
            }
            SegmentBody::Custom(body) => {
                let e = match side {
                    Side::Left => &body.left,
                    Side::Right => &body.right,
                };
                Ok(e.truncated(cap))
            }
        }
    }

    fn endpoint_singular(&self, side: Side) -> bool {
        match &self.body {
            SegmentBody::Terms(terms) => {
                let c = match side {
                    Side::Left => self.left,
                    Side::Right => self.right,
                };
                terms.iter().any(|t| match t {
                    Term::Power { center, power, .. } => *center == c && (*power < 0.0 || !is_integer(*power)),
                    _ => false,
                })
            }
            SegmentBody::Custom(body) => match side {
                Side::Left => body.left.is_singular(),
                Side::Right => body.right.is_singular(),
            },
        }
    }
}

/// Serializable description of one segment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SegmentSpec {
    pub left: f64,
    pub right: f64,
    pub terms: Vec<Term>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialConditionSpec {
    pub segments: Vec<SegmentSpec>,
}

#[derive(Debug, Clone)]
pub struct PiecewiseInitialCondition {
    segments: Vec<Segment>,
}

impl PiecewiseInitialCondition {
    pub fn new(segments: Vec<Segment>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::Validation("initial condition needs at least one segment".into()));
        }
        if segments[0].left != 0.0 || segments.last().map(|s| s.right) != Some(1.0) {
            return Err(Error::Validation("segments must cover [0,1]".into()));
        }
        for w in segments.windows(2) {
            if w[0].right != w[1].left {
                return Err(Error::Validation(format!(
                    "segments are not contiguous at {} / {}",
                    w[0].right, w[1].left
                )));
            }
        }
        for s in &segments {
            if !(s.right > s.left) {
                return Err(Error::Validation(format!("empty segment [{}, {}]", s.left, s.right)));
            }
            match &s.body {
                SegmentBody::Terms(terms) => {
                    for t in terms {
                        t.validate(s.left, s.right)?;
                    }
                }
                SegmentBody::Custom(body) => {
                    for e in [&body.left, &body.right] {
                        if e.leading_power().is_some_and(|q| q <= -0.5) {
                            return Err(Error::Validation("custom expansion is not square integrable".into()));
                        }
                    }
                }
            }
        }
        Ok(Self { segments })
    }

    pub fn from_spec(spec: &InitialConditionSpec) -> Result<Self> {
        Self::new(
            spec.segments
                .iter()
                .map(|s| Segment {
                    left: s.left,
                    right: s.right,
                    body: SegmentBody::Terms(s.terms.clone()),
                })
                .collect(),
        )
    }

    /// Single closed-form segment on [0,1].
    pub fn from_terms(terms: Vec<Term>) -> Result<Self> {
        Self::new(vec![Segment {
            left: 0.0,
            right: 1.0,
            body: SegmentBody::Terms(terms),
        }])
    }

    pub fn zero() -> Self {
        Self::from_terms(vec![]).expect("zero state is valid")
    }

    /// `amp · sin(nπx)`.
    pub fn sine_mode(n: u32, amp: f64) -> Self {
        let k = std::f64::consts::PI * n as f64;
        let half = Complex64::new(0.0, -0.5 * amp);
        Self::from_terms(vec![
            Term::Exp {
                amp: half,
                rate: Complex64::new(0.0, k),
                shift: 0.0,
            },
            Term::Exp {
                amp: -half,
                rate: Complex64::new(0.0, -k),
                shift: 0.0,
            },
        ])
        .expect("sine mode is valid")
    }

    /// Three-piece state with a jump at 0.3, an integrable `(x-0.3)^{-1/4}`
    /// singularity and a kink-free change of formula at 0.6.
    pub fn benchmark_spec() -> InitialConditionSpec {
        let c = |re: f64, im: f64| Complex64::new(re, im);
        let singular = Term::Power {
            amp: c(0.0, 1.0),
            center: 0.3,
            power: -0.25,
        };
        InitialConditionSpec {
            segments: vec![
                SegmentSpec {
                    left: 0.0,
                    right: 0.3,
                    terms: vec![Term::Poly {
                        coeffs: vec![c(1.0, -1.0), c(1.0, 0.0)],
                    }],
                },
                SegmentSpec {
                    left: 0.3,
                    right: 0.6,
                    terms: vec![
                        Term::Poly {
                            coeffs: vec![c(1.0, 0.0), c(1.0, 0.0)],
                        },
                        singular.clone(),
                    ],
                },
                SegmentSpec {
                    left: 0.6,
                    right: 1.0,
                    terms: vec![
                        Term::Exp {
                            amp: c(1.0, 0.0),
                            rate: c(2.0, 0.0),
                            shift: 0.6,
                        },
                        singular,
                    ],
                },
            ],
        }
    }

    pub fn benchmark() -> Self {
        Self::from_spec(&Self::benchmark_spec()).expect("benchmark state is valid")
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    /// `c_0 = 0 < c_1 < … < c_N = 1`.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut b: Vec<f64> = self.segments.iter().map(|s| s.left).collect();
        b.push(1.0);
        b
    }

    /// Splits segment `index` at `at` without changing the function.
    pub fn with_extra_breakpoint(&self, at: f64) -> Result<Self> {
        let idx = self
            .segments
            .iter()
            .position(|s| s.left < at && at < s.right)
            .ok_or_else(|| Error::Validation(format!("{at} is not strictly inside a segment")))?;
        if matches!(self.segments[idx].body, SegmentBody::Custom(_)) {
            return Err(Error::Unsupported("cannot split a custom segment".into()));
        }
        let mut segments = self.segments.clone();
        let mut right = segments[idx].clone();
        segments[idx].right = at;
        right.left = at;
        segments.insert(idx + 1, right);
        Self::new(segments)
    }

    fn segment_index(&self, y: f64) -> Option<usize> {
        if !(0.0..=1.0).contains(&y) {
            return None;
        }
        Some(self.segments.partition_point(|s| s.right < y).min(self.segments.len() - 1))
    }

    /// θ₀ at a quadrature node. Nodes anchored at a breakpoint are evaluated
    /// on the segment they fall into.
    pub fn eval_node(&self, node: Node) -> Complex64 {
        let idx = if node.offset > 0.0 {
            self.segments.iter().position(|s| s.left == node.anchor)
        } else if node.offset < 0.0 {
            self.segments.iter().position(|s| s.right == node.anchor)
        } else {
            None
        };
        match idx.or_else(|| self.segment_index(node.y())) {
            Some(i) => self.segments[i].eval(node),
            None => Complex64::new(0.0, 0.0),
        }
    }

    /// θ₀(y); zero outside [0,1].
    pub fn eval(&self, y: f64) -> Complex64 {
        self.eval_node(Node::at(y))
    }

    /// Odd extension to [-1,1], zero outside.
    pub fn eval_odd_node(&self, node: Node) -> Complex64 {
        if node.y() < 0.0 || (node.anchor < 0.0 || (node.anchor == 0.0 && node.offset < 0.0)) && node.y() <= 0.0 {
            -self.eval_node(Node {
                anchor: -node.anchor,
                offset: -node.offset,
            })
        } else {
            self.eval_node(node)
        }
    }

    /// Nodal value for grid sampling: at a breakpoint the mean of the finite
    /// one-sided limits, elsewhere the value.
    pub fn sample(&self, y: f64) -> Complex64 {
        let Some(i) = self.segments.iter().position(|s| s.left == y || s.right == y) else {
            return self.eval(y);
        };
        let mut limits = Vec::with_capacity(2);
        let seg = &self.segments[i];
        if seg.right == y {
            limits.push(seg.eval(Node { anchor: y, offset: 0.0 }));
            if let Some(next) = self.segments.get(i + 1) {
                limits.push(next.eval(Node { anchor: y, offset: 0.0 }));
            }
        } else {
            limits.push(seg.eval(Node { anchor: y, offset: 0.0 }));
        }
        let finite: Vec<Complex64> = limits.into_iter().filter(|z| z.re.is_finite() && z.im.is_finite()).collect();
        if finite.is_empty() {
            Complex64::new(0.0, 0.0)
        } else {
            finite.iter().sum::<Complex64>() / finite.len() as f64
        }
    }

    pub fn quad_segments(&self) -> Vec<quad::Segment> {
        self.segments
            .iter()
            .map(|s| quad::Segment {
                a: s.left,
                b: s.right,
                left: behavior(s.endpoint_singular(Side::Left)),
                right: behavior(s.endpoint_singular(Side::Right)),
            })
            .collect()
    }

    /// Quadrature segments of the odd extension on [-1,1].
    pub fn odd_quad_segments(&self) -> Vec<quad::Segment> {
        let pos = self.quad_segments();
        let mut out: Vec<quad::Segment> = pos
            .iter()
            .rev()
            .map(|s| quad::Segment {
                a: -s.b,
                b: -s.a,
                left: s.right,
                right: s.left,
            })
            .collect();
        out.extend(pos);
        out
    }

    pub fn is_zero(&self) -> bool {
        self.segments.iter().all(|s| match &s.body {
            SegmentBody::Terms(t) => t.iter().all(|t| match t {
                Term::Poly { coeffs } => coeffs.iter().all(|c| *c == Complex64::new(0.0, 0.0)),
                Term::Exp { amp, .. } | Term::Power { amp, .. } => *amp == Complex64::new(0.0, 0.0),
            }),
            SegmentBody::Custom(_) => false,
        })
    }

    /// ‖θ₀‖²_{L²(0,1)}.
    pub fn norm_sq(&self) -> Result<f64> {
        let cfg = QuadConfig {
            rel_tol: 1e-13,
            abs_tol: 1e-300,
            ..QuadConfig::default()
        };
        let out = quad::integrate(
            |n| Complex64::new(self.eval_node(n).norm_sqr(), 0.0),
            &self.quad_segments(),
            &cfg,
        )?;
        Ok(out.value.re)
    }
}

fn behavior(singular: bool) -> EndpointBehavior {
    if singular {
        EndpointBehavior::Singular
    } else {
        EndpointBehavior::Regular
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn benchmark_values() {
        let th = PiecewiseInitialCondition::benchmark();
        assert_eq!(th.breakpoints(), vec![0.0, 0.3, 0.6, 1.0]);
        assert!((th.eval(0.1) - c(1.1, -1.0)).norm() < 1e-15);
        assert!((th.eval(0.3) - c(1.3, -1.0)).norm() < 1e-15);
        let y = 0.4;
        assert!((th.eval(y) - (c(1.4, 0.0) + c(0.0, 1.0) * 0.1f64.powf(-0.25))).norm() < 1e-14);
        let y = 0.8;
        assert!((th.eval(y) - (c((0.4f64).exp(), 0.0) + c(0.0, 1.0) * 0.5f64.powf(-0.25))).norm() < 1e-14);
        assert_eq!(th.eval(1.5), c(0.0, 0.0));
    }

    #[test]
    fn odd_extension() {
        let th = PiecewiseInitialCondition::benchmark();
        for y in [0.05, 0.3, 0.45, 0.99] {
            assert_eq!(th.eval_odd_node(Node::at(-y)), -th.eval(y));
        }
        let near = Node { anchor: -0.3, offset: -1e-30 };
        let z = th.eval_odd_node(near);
        assert!(z.im < -1e7, "{z}");
    }

    #[test]
    fn anchored_nodes_are_exact() {
        let th = PiecewiseInitialCondition::benchmark();
        let z = th.eval_node(Node { anchor: 0.3, offset: 1e-40 });
        assert!((z.im - 1e10).abs() < 1e-3);
        let z = th.eval_node(Node { anchor: 0.3, offset: -1e-40 });
        assert!((z - c(1.3, -1.0)).norm() < 1e-15);
    }

    #[test]
    fn expansions_match_evaluator() {
        let th = PiecewiseInitialCondition::benchmark();
        for seg in th.segments() {
            for side in [Side::Left, Side::Right] {
                let e = seg.expansion(side, 2.0).unwrap();
                let top = e.terms.last().unwrap().1;
                let mut ratios = Vec::new();
                for d in [1e-2, 1e-3, 1e-4] {
                    let node = match side {
                        Side::Left => Node { anchor: seg.left, offset: d },
                        Side::Right => Node { anchor: seg.right, offset: -d },
                    };
                    let err = (seg.eval(node) - e.eval(d)).norm();
                    ratios.push(err / d.powf(top));
                }
                assert!(ratios[2] <= ratios[0] + 1e-9, "{side:?} at {}: {ratios:?}", e.point);
                assert!(ratios[2] < 1e-3);
            }
        }
    }

    #[test]
    fn singular_flags() {
        let th = PiecewiseInitialCondition::benchmark();
        let segs = th.quad_segments();
        assert_eq!(segs[0].right, EndpointBehavior::Regular);
        assert_eq!(segs[1].left, EndpointBehavior::Singular);
        assert_eq!(segs[2].left, EndpointBehavior::Regular);
        let odd = th.odd_quad_segments();
        assert_eq!(odd.len(), 6);
        assert_eq!(odd[1].right, EndpointBehavior::Singular);
        assert_eq!((odd[1].a, odd[1].b), (-0.6, -0.3));
    }

    #[test]
    fn norm_of_benchmark() {
        // |x+1-i|^2 on (0,0.3]; |x+1+i s^{-1/4}|^2 = (x+1)^2 + s^{-1/2};
        // |e^{2(x-.6)} + i s^{-1/4}|^2 = e^{4(x-.6)} + s^{-1/2}.
        let a = (1.3f64.powi(3) - 1.0) / 3.0 + 0.3;
        let b = (1.6f64.powi(3) - 1.3f64.powi(3)) / 3.0 + 2.0 * 0.3f64.sqrt();
        let cc = ((1.6f64).exp() - 1.0) / 4.0 + 2.0 * (0.7f64.sqrt() - 0.3f64.sqrt());
        let th = PiecewiseInitialCondition::benchmark();
        let n = th.norm_sq().unwrap();
        assert!((n - (a + b + cc)).abs() < 1e-12 * n, "{n} vs {}", a + b + cc);
    }

    #[test]
    fn sine_mode_and_zero() {
        let th = PiecewiseInitialCondition::sine_mode(3, 2f64.sqrt());
        let y = 0.23;
        assert!((th.eval(y) - c(2f64.sqrt() * (3.0 * std::f64::consts::PI * y).sin(), 0.0)).norm() < 1e-15);
        assert!((th.norm_sq().unwrap() - 1.0).abs() < 1e-13);
        assert!(PiecewiseInitialCondition::zero().is_zero());
        assert_eq!(PiecewiseInitialCondition::zero().norm_sq().unwrap(), 0.0);
    }

    #[test]
    fn breakpoint_sampling_uses_finite_limits() {
        let th = PiecewiseInitialCondition::benchmark();
        assert_eq!(th.sample(0.3), c(1.3, -1.0));
        let at = th.sample(0.6);
        let expect = 0.5 * (c(1.6, 0.0) + c(0.0, 1.0) * 0.3f64.powf(-0.25) + c(1.0, 0.0) + c(0.0, 1.0) * 0.3f64.powf(-0.25));
        assert!((at - expect).norm() < 1e-15);
    }

    #[test]
    fn extra_breakpoint_preserves_values() {
        let th = PiecewiseInitialCondition::benchmark();
        let split = th.with_extra_breakpoint(0.8).unwrap();
        assert_eq!(split.breakpoints().len(), 5);
        for y in [0.1, 0.5, 0.79, 0.8, 0.81] {
            assert_eq!(split.eval(y), th.eval(y));
        }
    }

    #[test]
    fn validation() {
        let bad = InitialConditionSpec {
            segments: vec![SegmentSpec {
                left: 0.0,
                right: 1.0,
                terms: vec![Term::Power {
                    amp: c(1.0, 0.0),
                    center: 0.5,
                    power: 0.5,
                }],
            }],
        };
        assert!(PiecewiseInitialCondition::from_spec(&bad).unwrap_err().is_validation());
        let gap = InitialConditionSpec {
            segments: vec![SegmentSpec {
                left: 0.0,
                right: 0.5,
                terms: vec![],
            }],
        };
        assert!(PiecewiseInitialCondition::from_spec(&gap).is_err());
    }

    #[test]
    fn spec_json_shape() {
        let json = serde_json::to_string(&PiecewiseInitialCondition::benchmark_spec()).unwrap();
        let back: InitialConditionSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(back, PiecewiseInitialCondition::benchmark_spec());
        assert!(json.contains("\"kind\":\"power\""));
    }
}
