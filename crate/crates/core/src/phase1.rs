//! First-phase control `u(t) = θ⁻(t,1)` and the free field θ⁻(t,x).
//!
//! θ⁻(t,x) = ∫_{-1}^{1} E(t,x-y) θ₀^odd(y) dy is computed by adaptive
//! quadrature for moderate `t`. For small `t` the integral at `x = 1` is
//! replaced by its endpoint asymptotic expansion in `λ = 1/(4t)`: every
//! breakpoint `c` of the odd extension contributes
//! `e^{iλ(1-c)²} Σ c_m Γ(1+a_m) λ^{-1-a_m} e^{±iπ(1+a_m)/2}` where
//! `Σ c_m u^{a_m}` is the local expansion of the integrand after the change of
//! variables that makes the phase linear.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::initial::{EndpointExpansion, PiecewiseInitialCondition, Side};
use crate::kernel::{log_gamma_real, sqrt_4it};
use crate::quad::{self, QuadConfig, QuadOutcome};
use crate::sim::FieldSnapshot;

/// Default order of the neglected terms, in powers of `t`.
pub const DEFAULT_ORDER: f64 = 5.5;

const EXP_TOL: f64 = 1e-12;

/// `Σ c_m u^{a_m}` near `u = 0`, standing for the oscillatory integral
/// `e^{iλ·phase} ∫_0 F(u) e^{ε iλu} du`.
#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticSeries {
    pub phase: f64,
    /// `+1` or `-1`.
    pub epsilon: f64,
    pub terms: Vec<(Complex64, f64)>,
}

impl AsymptoticSeries {
    /// Leading-order contributions `Σ c Γ(1+a) e^{εiπ(1+a)/2} λ^{-1-a}`
    /// times `e^{iλ·phase}`.
    pub fn eval(&self, lambda: f64) -> Result<Complex64> {
        if !(lambda > 0.0) {
            return Err(Error::Domain(format!("lambda must be positive, got {lambda}")));
        }
        let mut sum = Complex64::new(0.0, 0.0);
        let ln_lambda = lambda.ln();
        for &(c, a) in &self.terms {
            if a <= -1.0 {
                return Err(Error::Unsupported(format!("exponent {a} is not integrable at 0")));
            }
            let mag = (log_gamma_real(1.0 + a)? - (1.0 + a) * ln_lambda).exp();
            sum += c * mag * Complex64::cis(self.epsilon * PI * (1.0 + a) / 2.0);
        }
        Ok(sum * Complex64::cis(lambda * self.phase))
    }

    pub fn leading_exponent(&self) -> Option<f64> {
        self.terms.first().map(|t| t.1)
    }
}

/// Coefficients of `A(w)^q` for a series with `A_0 = 1`.
fn series_pow(a: &[f64], q: f64, n: usize) -> Vec<f64> {
    let mut p = vec![0.0; n];
    if n == 0 {
        return p;
    }
    p[0] = 1.0;
    for k in 1..n {
        let mut acc = 0.0;
        for j in 1..=k.min(a.len() - 1) {
            acc += ((q + 1.0) * j as f64 - k as f64) * a[j] * p[k - j];
        }
        p[k] = acc / k as f64;
    }
    p
}

fn series_mul(a: &[f64], b: &[f64], n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n];
    for i in 0..n.min(a.len()) {
        for j in 0..(n - i).min(b.len()) {
            out[i + j] += a[i] * b[j];
        }
    }
    out
}

fn binomial_series(p: f64, n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n);
    let mut b = 1.0;
    for m in 0..n {
        if m > 0 {
            b *= (p - (m as f64 - 1.0)) / m as f64;
        }
        out.push(b);
    }
    out
}

/// Composes an endpoint expansion of the integrand through the change of
/// variables `u = ±[(ybar-y)² - (ybar-c)²]` and returns the series in `u`,
/// keeping exponents `a` with `a + ½ < order`.
///
/// `Side::Right` expansions describe a segment ending at `c` (`ε = +1`),
/// `Side::Left` a segment starting at `c` (`ε = -1`). `c = ybar` is only
/// valid on the right and yields half-integer steps in `u`.
pub fn oscillatory_endpoint_expansion(expansion: &EndpointExpansion, ybar: f64, order: f64) -> Result<AsymptoticSeries> {
    let c = expansion.point;
    if c > ybar {
        return Err(Error::Domain(format!("breakpoint {c} lies beyond the observation point {ybar}")));
    }
    let d = ybar - c;
    let keep = |a: f64| a + 0.5 < order - EXP_TOL;
    let mut terms: Vec<(Complex64, f64)> = Vec::new();
    if d == 0.0 {
        if expansion.side == Side::Left {
            return Err(Error::Domain("no segment starts at the observation point".into()));
        }
        // u = r², dr/du = u^{-1/2}/2.
        for &(p, q) in &expansion.terms {
            let a = 0.5 * (q - 1.0);
            if keep(a) {
                terms.push((p * 0.5, a));
            }
        }
        return finish(d, 1.0, terms);
    }
    let (epsilon, flip): (f64, f64) = match expansion.side {
        Side::Right => (1.0, 1.0),
        Side::Left => (-1.0, -1.0),
    };
    // r = (d w/2) h(±w), Jacobian (1/(2d)) (1±w)^{-1/2}, w = u/d².
    for &(p, q) in &expansion.terms {
        if q <= -1.0 {
            return Err(Error::Unsupported(format!("endpoint power {q} is not integrable")));
        }
        if !keep(q) {
            continue;
        }
        let n = ((order - 0.5 - q) - EXP_TOL).ceil().max(1.0) as usize;
        let h: Vec<f64> = binomial_series(0.5, n + 1)
            .into_iter()
            .skip(1)
            .enumerate()
            .map(|(k, b)| 2.0 * b * flip.powi(k as i32))
            .collect();
        let jac: Vec<f64> = binomial_series(-0.5, n)
            .into_iter()
            .enumerate()
            .map(|(k, b)| b * flip.powi(k as i32))
            .collect();
        let g = series_mul(&series_pow(&h, q, n), &jac, n);
        let base = p * (0.5 * d).powf(q) / (2.0 * d);
        for (k, gk) in g.into_iter().enumerate() {
            let a = q + k as f64;
            if keep(a) && gk != 0.0 {
                terms.push((base * gk * d.powf(-2.0 * a), a));
            }
        }
    }
    finish(d, epsilon, terms)
}

fn finish(d: f64, epsilon: f64, mut terms: Vec<(Complex64, f64)>) -> Result<AsymptoticSeries> {
    terms.sort_by(|a, b| a.1.total_cmp(&b.1));
    let mut merged: Vec<(Complex64, f64)> = Vec::with_capacity(terms.len());
    for (c, a) in terms {
        match merged.last_mut() {
            Some(last) if (last.1 - a).abs() <= EXP_TOL => last.0 += c,
            _ => merged.push((c, a)),
        }
    }
    if let Some(&(_, a)) = merged.first() {
        if a <= -1.0 {
            return Err(Error::Unsupported(format!("exponent {a} is not integrable at 0")));
        }
    }
    Ok(AsymptoticSeries {
        phase: d * d,
        epsilon,
        terms: merged,
    })
}

/// Endpoint expansions of the odd extension, one per segment end on [-1,1].
pub fn odd_extension_expansions(theta0: &PiecewiseInitialCondition, order: f64) -> Result<Vec<EndpointExpansion>> {
    let regular_cap = order - 0.5;
    let mut out = Vec::new();
    for seg in theta0.segments() {
        let left = seg.expansion(Side::Left, regular_cap)?;
        let right_cap = if seg.right == 1.0 { 2.0 * order } else { regular_cap };
        let right = seg.expansion(Side::Right, right_cap)?;
        // Mirror [-b,-a]: starts where the original ends and vice versa.
        out.push(EndpointExpansion {
            point: -seg.right,
            side: Side::Left,
            terms: seg.expansion(Side::Right, regular_cap)?.negated().terms,
        });
        out.push(EndpointExpansion {
            point: -seg.left,
            side: Side::Right,
            terms: left.negated().terms,
        });
        out.push(left);
        out.push(right);
    }
    Ok(out)
}

/// Precomputed endpoint series for repeated small-`t` evaluation of `u(t)`.
#[derive(Debug, Clone)]
pub struct Phase1Asymptotics {
    series: Vec<AsymptoticSeries>,
    order: f64,
    order_achieved: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticValue {
    pub value: Complex64,
    /// Power of `t` of the first neglected term.
    pub order_achieved: f64,
}

impl Phase1Asymptotics {
    pub fn new(theta0: &PiecewiseInitialCondition, order: f64) -> Result<Self> {
        if !(order > 0.5) {
            return Err(Error::Validation(format!("expansion order must exceed 1/2, got {order}")));
        }
        let expansions = odd_extension_expansions(theta0, order)?;
        let mut order_achieved = order;
        for seg in theta0.segments() {
            if let crate::initial::SegmentBody::Custom(body) = &seg.body {
                for e in [&body.left, &body.right] {
                    let degenerate = e.side == Side::Right && e.point == 1.0;
                    let cap = if degenerate { 2.0 * order } else { order - 0.5 };
                    let top = e.terms.last().map_or(f64::NEG_INFINITY, |t| t.1);
                    if top < cap {
                        let reached = if degenerate { 0.5 * top } else { top + 0.5 };
                        order_achieved = order_achieved.min(reached.max(0.0));
                    }
                }
            }
        }
        let series = expansions
            .iter()
            .map(|e| oscillatory_endpoint_expansion(e, 1.0, order))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            series,
            order,
            order_achieved,
        })
    }

    pub fn order(&self) -> f64 {
        self.order
    }

    pub fn series(&self) -> &[AsymptoticSeries] {
        &self.series
    }

    pub fn term_count(&self) -> usize {
        self.series.iter().map(|s| s.terms.len()).sum()
    }

    pub fn eval(&self, t: f64) -> Result<AsymptoticValue> {
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::Domain(format!("asymptotic evaluation needs t > 0, got {t}")));
        }
        let lambda = 0.25 / t;
        let mut sum = Complex64::new(0.0, 0.0);
        for s in &self.series {
            sum += s.eval(lambda)?;
        }
        let prefactor = 1.0 / (sqrt_4it(t) * PI.sqrt());
        Ok(AsymptoticValue {
            value: sum * prefactor,
            order_achieved: self.order_achieved,
        })
    }
}

/// `u(t)` from the endpoint expansion, absolute error `O(t^order)`.
pub fn u_phase1_asymptotic(theta0: &PiecewiseInitialCondition, t: f64, order: f64) -> Result<AsymptoticValue> {
    Phase1Asymptotics::new(theta0, order)?.eval(t)
}

/// `lim_{t→0⁺} u(t) = θ₀(1⁻)/2`.
pub fn u_phase1_at_zero(theta0: &PiecewiseInitialCondition) -> Complex64 {
    theta0.sample(1.0) * 0.5
}

fn quad_config(t: f64, x: f64, rel_tol: f64) -> QuadConfig {
    QuadConfig {
        rel_tol,
        abs_tol: 1e-15,
        panels_per_unit: (x.abs() + 1.0) / (4.0 * PI * t),
        ..QuadConfig::default()
    }
}

/// θ⁻(t,x) with quadrature statistics.
pub fn theta_minus_point(theta0: &PiecewiseInitialCondition, t: f64, x: f64, rel_tol: f64) -> Result<QuadOutcome<Complex64>> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::Domain(format!("θ⁻ needs t > 0, got {t}")));
    }
    if x == 0.0 || theta0.is_zero() {
        return Ok(QuadOutcome {
            value: Complex64::new(0.0, 0.0),
            error: 0.0,
            evaluations: 0,
            intervals: 0,
        });
    }
    let inv = 0.25 / t;
    let cfg = quad_config(t, x, rel_tol);
    let out = quad::integrate(
        |n| {
            let dx = (x - n.anchor) - n.offset;
            Complex64::cis(dx * dx * inv) * theta0.eval_odd_node(n)
        },
        &theta0.odd_quad_segments(),
        &cfg,
    )?;
    let scale = 1.0 / (sqrt_4it(t) * PI.sqrt());
    Ok(QuadOutcome {
        value: out.value * scale,
        error: out.error * scale.norm(),
        evaluations: out.evaluations,
        intervals: out.intervals,
    })
}

/// `u(t) = θ⁻(t,1)` by adaptive quadrature.
pub fn u_phase1_quadrature(theta0: &PiecewiseInitialCondition, t: f64, rel_tol: f64) -> Result<Complex64> {
    theta_minus_point(theta0, t, 1.0, rel_tol).map(|o| o.value)
}

/// θ⁻(t,·) on a grid; points are evaluated in parallel.
pub fn theta_minus_field(theta0: &PiecewiseInitialCondition, t: f64, xs: &[f64], rel_tol: f64) -> Result<FieldSnapshot> {
    let values = xs
        .par_iter()
        .map(|&x| theta_minus_point(theta0, t, x, rel_tol).map(|o| o.value))
        .collect::<Result<Vec<_>>>()?;
    Ok(FieldSnapshot {
        t,
        xs: xs.to_vec(),
        values,
    })
}
