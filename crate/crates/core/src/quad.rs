//! Globally adaptive 7/15-point Gauss–Kronrod quadrature for complex and
//! vector-of-complex integrands.
//!
//! Integration runs over a list of [`Segment`]s, so subdivision is always
//! forced at the caller's breakpoints. An endpoint flagged
//! [`EndpointBehavior::Singular`] gets the substitution `y = c ± h w⁴` on the
//! half of the segment touching it, which turns the integrable power
//! singularities met here (`(y-c)^p`, `p > -1`) into `w^(4p+3)`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// A sample point `anchor + offset`. Inside a singular-endpoint substitution
/// `anchor` is the singular endpoint and `offset` is exact, so integrands can
/// evaluate `(y - anchor)^p` without cancellation. Elsewhere `offset` is 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Node {
    pub anchor: f64,
    pub offset: f64,
}

impl Node {
    #[inline]
    pub fn at(y: f64) -> Self {
        Self { anchor: y, offset: 0.0 }
    }

    #[inline]
    pub fn y(self) -> f64 {
        self.anchor + self.offset
    }

    /// `y - c`, exact when `c` is the anchor.
    #[inline]
    pub fn distance_from(self, c: f64) -> f64 {
        if c == self.anchor {
            self.offset
        } else {
            (self.anchor - c) + self.offset
        }
    }
}

const ROUNDOFF: f64 = 50.0 * f64::EPSILON;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EndpointBehavior {
    Regular,
    Singular,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub a: f64,
    pub b: f64,
    pub left: EndpointBehavior,
    pub right: EndpointBehavior,
}

impl Segment {
    pub fn regular(a: f64, b: f64) -> Self {
        Self {
            a,
            b,
            left: EndpointBehavior::Regular,
            right: EndpointBehavior::Regular,
        }
    }
}

#[derive(Debug, Clone)]
pub struct QuadConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Bisection depth limit for any single interval.
    pub max_depth: u32,
    /// Total interval budget.
    pub max_intervals: usize,
    /// Uniform pre-subdivision per unit length of `y`, for integrands known
    /// to oscillate.
    pub panels_per_unit: f64,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-14,
            max_depth: 40,
            max_intervals: 50_000,
            panels_per_unit: 0.0,
        }
    }
}

impl QuadConfig {
    pub fn with_rel_tol(rel_tol: f64) -> Self {
        Self {
            rel_tol,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone)]
pub struct QuadOutcome<T> {
    pub value: T,
    pub error: f64,
    pub evaluations: usize,
    pub intervals: usize,
}

#[derive(Debug, Clone, Copy)]
enum Map {
    Linear,
    /// `y = origin + h w⁴`.
    PowFromLeft { origin: f64, h: f64 },
    /// `y = origin - h w⁴`.
    PowFromRight { origin: f64, h: f64 },
}

impl Map {
    #[inline]
    fn apply(self, w: f64) -> (Node, f64) {
        match self {
            Map::Linear => (Node::at(w), 1.0),
            Map::PowFromLeft { origin, h } => {
                let w3 = w * w * w;
                (Node { anchor: origin, offset: h * w3 * w }, 4.0 * h * w3)
            }
            Map::PowFromRight { origin, h } => {
                let w3 = w * w * w;
                (Node { anchor: origin, offset: -h * w3 * w }, 4.0 * h * w3)
            }
        }
    }
}

struct Interval {
    map: Map,
    lo: f64,
    hi: f64,
    depth: u32,
    value: Vec<Complex64>,
    error: f64,
    abs: f64,
}

struct Ranked(f64, usize);

impl PartialEq for Ranked {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Ranked {}
impl PartialOrd for Ranked {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Ranked {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0).then(other.1.cmp(&self.1))
    }
}

fn pieces(segments: &[Segment]) -> Vec<(Map, f64, f64)> {
    let mut out = Vec::new();
    for s in segments {
        if !(s.b > s.a) {
            continue;
        }
        let sing_l = s.left == EndpointBehavior::Singular;
        let sing_r = s.right == EndpointBehavior::Singular;
        let mid = 0.5 * (s.a + s.b);
        match (sing_l, sing_r) {
            (false, false) => out.push((Map::Linear, s.a, s.b)),
            (true, false) => {
                out.push((Map::PowFromLeft { origin: s.a, h: mid - s.a }, 0.0, 1.0));
                out.push((Map::Linear, mid, s.b));
            }
            (false, true) => {
                out.push((Map::Linear, s.a, mid));
                out.push((Map::PowFromRight { origin: s.b, h: s.b - mid }, 0.0, 1.0));
            }
            (true, true) => {
                out.push((Map::PowFromLeft { origin: s.a, h: mid - s.a }, 0.0, 1.0));
                out.push((Map::PowFromRight { origin: s.b, h: s.b - mid }, 0.0, 1.0));
            }
        }
    }
    out
}

/// Error counted against the tolerance: intervals already at their own
/// rounding level cannot improve and are settled.
#[inline]
fn effective(error: f64, abs: f64) -> f64 {
    if error <= ROUNDOFF * abs {
        0.0
    } else {
        error
    }
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Returns the Kronrod value, the Kronrod–Gauss difference and the Kronrod
/// estimate of `∫|f|`.
fn gk15<F>(f: &F, dim: usize, map: Map, lo: f64, hi: f64, buf: &mut [Complex64]) -> (Vec<Complex64>, f64, f64)
where
    F: Fn(Node, &mut [Complex64]),
{
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let mut kron = vec![Complex64::new(0.0, 0.0); dim];
    let mut gauss = vec![Complex64::new(0.0, 0.0); dim];
    let mut abs = 0.0;
    let mut eval = |w: f64, wk: f64, wg: f64, kron: &mut [Complex64], gauss: &mut [Complex64]| {
        let (node, jac) = map.apply(w);
        if jac == 0.0 {
            return;
        }
        f(node, buf);
        abs += wk * jac * norm(buf);
        for i in 0..dim {
            let v = buf[i] * jac;
            kron[i] += v * wk;
            if wg != 0.0 {
                gauss[i] += v * wg;
            }
        }
    };
    eval(center, WGK[7], WG[3], &mut kron, &mut gauss);
    for j in 0..7 {
        let dx = half * XGK[j];
        let wg = if j % 2 == 1 { WG[j / 2] } else { 0.0 };
        eval(center - dx, WGK[j], wg, &mut kron, &mut gauss);
        eval(center + dx, WGK[j], wg, &mut kron, &mut gauss);
    }
    let mut err = 0.0;
    for i in 0..dim {
        kron[i] *= half;
        gauss[i] *= half;
        err += (kron[i] - gauss[i]).norm_sqr();
    }
    (kron, err.sqrt(), abs * half)
}

/// Integrates a vector-valued integrand `f(y, out)` over the segments; the
/// error criterion uses the Euclidean norm across components.
pub fn integrate_vec<F>(f: F, dim: usize, segments: &[Segment], cfg: &QuadConfig) -> Result<QuadOutcome<Vec<Complex64>>>
where
    F: Fn(Node, &mut [Complex64]),
{
    let mut buf = vec![Complex64::new(0.0, 0.0); dim];
    let mut intervals: Vec<Interval> = Vec::new();
    let mut heap = BinaryHeap::new();
    let mut total = vec![Complex64::new(0.0, 0.0); dim];
    let mut total_err = 0.0;
    let mut evaluations = 0usize;

    for (map, lo, hi) in pieces(segments) {
        let panels = if cfg.panels_per_unit > 0.0 {
            let len = match map {
                Map::Linear => hi - lo,
                Map::PowFromLeft { h, .. } | Map::PowFromRight { h, .. } => h,
            };
            ((len * cfg.panels_per_unit).ceil() as usize).clamp(1, cfg.max_intervals / 4)
        } else {
            1
        };
        let width = (hi - lo) / panels as f64;
        for p in 0..panels {
            let a = lo + p as f64 * width;
            let b = if p + 1 == panels { hi } else { a + width };
            let (value, error, abs) = gk15(&f, dim, map, a, b, &mut buf);
            evaluations += 15;
            for i in 0..dim {
                total[i] += value[i];
            }
            let eff = effective(error, abs);
            total_err += eff;
            if eff > 0.0 {
                heap.push(Ranked(eff, intervals.len()));
            }
            intervals.push(Interval {
                map,
                lo: a,
                hi: b,
                depth: 0,
                value,
                error,
                abs,
            });
        }
    }

    let mut frozen_err = 0.0;
    loop {
        let target = cfg.abs_tol.max(cfg.rel_tol * norm(&total));
        if total_err <= target {
            break;
        }
        let Some(Ranked(_, idx)) = heap.pop() else {
            return Err(Error::Convergence {
                estimate: total_err,
                target,
                intervals: intervals.len(),
            });
        };
        if intervals[idx].depth >= cfg.max_depth {
            frozen_err += effective(intervals[idx].error, intervals[idx].abs);
            if frozen_err > target {
                return Err(Error::Convergence {
                    estimate: total_err,
                    target,
                    intervals: intervals.len(),
                });
            }
            continue;
        }
        if intervals.len() + 2 > cfg.max_intervals {
            return Err(Error::Convergence {
                estimate: total_err,
                target,
                intervals: intervals.len(),
            });
        }
        let (map, lo, hi, depth) = {
            let iv = &intervals[idx];
            (iv.map, iv.lo, iv.hi, iv.depth)
        };
        let mid = 0.5 * (lo + hi);
        let (v1, e1, a1) = gk15(&f, dim, map, lo, mid, &mut buf);
        let (v2, e2, a2) = gk15(&f, dim, map, mid, hi, &mut buf);
        evaluations += 30;
        for i in 0..dim {
            total[i] += v1[i] + v2[i] - intervals[idx].value[i];
        }
        let (f1, f2) = (effective(e1, a1), effective(e2, a2));
        total_err += f1 + f2 - effective(intervals[idx].error, intervals[idx].abs);
        intervals[idx] = Interval {
            map,
            lo,
            hi: mid,
            depth: depth + 1,
            value: v1,
            error: e1,
            abs: a1,
        };
        if f1 > 0.0 {
            heap.push(Ranked(f1, idx));
        }
        if f2 > 0.0 {
            heap.push(Ranked(f2, intervals.len()));
        }
        intervals.push(Interval {
            map,
            lo: mid,
            hi,
            depth: depth + 1,
            value: v2,
            error: e2,
            abs: a2,
        });
    }

    // Re-sum from scratch to drop the drift of the running totals.
    let mut value = vec![Complex64::new(0.0, 0.0); dim];
    let mut error = 0.0;
    for iv in &intervals {
        for i in 0..dim {
            value[i] += iv.value[i];
        }
        error += iv.error;
    }
    if value.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Domain("integrand produced a non-finite value".into()));
    }
    Ok(QuadOutcome {
        value,
        error,
        evaluations,
        intervals: intervals.len(),
    })
}

/// Scalar version of [`integrate_vec`].
pub fn integrate<F>(f: F, segments: &[Segment], cfg: &QuadConfig) -> Result<QuadOutcome<Complex64>>
where
    F: Fn(Node) -> Complex64,
{
    let out = integrate_vec(|y, buf: &mut [Complex64]| buf[0] = f(y), 1, segments, cfg)?;
    Ok(QuadOutcome {
        value: out.value[0],
        error: out.error,
        evaluations: out.evaluations,
        intervals: out.intervals,
    })
}

/// Real-valued convenience wrapper over a single regular interval.
pub fn integrate_real<F>(f: F, a: f64, b: f64, cfg: &QuadConfig) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    integrate(|n| Complex64::new(f(n.y()), 0.0), &[Segment::regular(a, b)], cfg).map(|o| o.value.re)
}
