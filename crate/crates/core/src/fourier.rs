//! Spectral route for the free field: sine coefficients of θ₀, closed-form
//! propagated modes and the truncated sum with its tail certificate.
//!
//! With `θ₀ = Σ c_n √2 sin(nπx)` and
//! `θ⁻_n(t,x) = ∫_{-1}^{1} E(t,x-y) sin(nπy) dy`, the field is
//! `θ⁻ = √2 Σ c_n θ⁻_n`.
//!
//! Closed form: `θ⁻_n = (K_{nπ} - K_{-nπ})/(2i)` with
//! `K_k = e^{ikx - ik²t} (erf ζ₊ - erf ζ₋)/2`, `ζ± = (x ± 1 - 2tk)/√(4it)`.
//! Each erf is rewritten through the Faddeeva function `w` so that only
//! bounded quantities and the moderate phases `(x±1)²/(4t)` appear.

use std::f64::consts::{PI, SQRT_2};

use errorfunctions::ComplexErrorFunctions;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::initial::PiecewiseInitialCondition;
use crate::kernel::sqrt_4it;
use crate::quad::{self, QuadConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SineCoefficients {
    /// `c[n-1] = c_n`.
    pub c: Vec<Complex64>,
    pub theta0_norm_sq: f64,
}

impl SineCoefficients {
    pub fn n_bar(&self) -> usize {
        self.c.len()
    }

    /// `‖θ₀‖² - Σ_{n≤n̄} |c_n|²` relative to `‖θ₀‖²`.
    pub fn parseval_defect(&self, n_bar: usize) -> f64 {
        if self.theta0_norm_sq == 0.0 {
            return 0.0;
        }
        let partial: f64 = self.c.iter().take(n_bar).map(|c| c.norm_sqr()).sum();
        (self.theta0_norm_sq - partial) / self.theta0_norm_sq
    }
}

/// `c_n = √2 ∫_0^1 θ₀(x) sin(nπx) dx`, `n = 1..=n_bar`.
pub fn sine_coefficients(theta0: &PiecewiseInitialCondition, n_bar: usize) -> Result<SineCoefficients> {
    if n_bar == 0 {
        return Err(Error::Validation("n_bar must be at least 1".into()));
    }
    let segments = theta0.quad_segments();
    let norm_sq = theta0.norm_sq()?;
    let c = (1..=n_bar)
        .into_par_iter()
        .map(|n| {
            let k = PI * n as f64;
            // sin(kx) carries ~kε relative rounding in its argument.
            let noise = 4.0 * k * f64::EPSILON * norm_sq.sqrt();
            let cfg = QuadConfig {
                rel_tol: 1e-12,
                abs_tol: noise.max(1e-15),
                panels_per_unit: n as f64 / 2.0,
                ..QuadConfig::default()
            };
            quad::integrate(|node| theta0.eval_node(node) * (k * node.y()).sin(), &segments, &cfg)
                .map(|o| o.value * SQRT_2)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SineCoefficients {
        c,
        theta0_norm_sq: norm_sq,
    })
}

/// `K_k` for `t > 0`, `k = ±nπ`, using `e^{∓ik} = (-1)^n`.
fn k_term(k: f64, parity: f64, t: f64, x: f64) -> Complex64 {
    let s = sqrt_4it(t);
    let zp = x + 1.0 - 2.0 * t * k;
    let zm = x - 1.0 - 2.0 * t * k;
    let zeta_p = zp / s;
    let zeta_m = zm / s;
    let i = Complex64::new(0.0, 1.0);
    // e^{ikx-ik²t} e^{-ζ±²} = e^{i(x±1)²/(4t)} e^{∓ik}
    let ph_p = Complex64::cis((x + 1.0) * (x + 1.0) / (4.0 * t)) * parity;
    let ph_m = Complex64::cis((x - 1.0) * (x - 1.0) / (4.0 * t)) * parity;
    if zm >= 0.0 {
        0.5 * (ph_m * (i * zeta_m).w() - ph_p * (i * zeta_p).w())
    } else if zp < 0.0 {
        0.5 * (ph_p * (-i * zeta_p).w() - ph_m * (-i * zeta_m).w())
    } else {
        let base = Complex64::cis(k * x - k * k * t);
        base - 0.5 * (ph_p * (i * zeta_p).w() + ph_m * (-i * zeta_m).w())
    }
}

/// Closed-form `θ⁻_n(t,x)`.
pub fn theta_minus_mode(n: u32, t: f64, x: f64) -> Result<Complex64> {
    if t == 0.0 || !t.is_finite() {
        return Err(Error::Domain(format!("mode evaluation needs t != 0, got {t}")));
    }
    if n == 0 {
        return Err(Error::Validation("mode index starts at 1".into()));
    }
    if t < 0.0 {
        // E(-t,x) = conj E(t,x) and sin is real.
        return theta_minus_mode(n, -t, x).map(|z| z.conj());
    }
    if x == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let k = PI * n as f64;
    let parity = if n % 2 == 0 { 1.0 } else { -1.0 };
    let v = (k_term(k, parity, t, x) - k_term(-k, parity, t, x)) / Complex64::new(0.0, 2.0);
    if !(v.re.is_finite() && v.im.is_finite()) {
        return Err(Error::Domain(format!("non-finite mode value at n = {n}, t = {t}, x = {x}")));
    }
    Ok(v)
}

/// `T_n̄(t,x) = √2 Σ_{n≤n̄} c_n θ⁻_n(t,x)`.
pub fn truncated_control(coeffs: &SineCoefficients, t: f64, x: f64) -> Result<Complex64> {
    truncated_control_upto(coeffs, coeffs.n_bar(), t, x)
}

pub fn truncated_control_upto(coeffs: &SineCoefficients, n_bar: usize, t: f64, x: f64) -> Result<Complex64> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!("truncated control needs t > 0, got {t}")));
    }
    let n_bar = n_bar.min(coeffs.n_bar());
    let mut sum = Complex64::new(0.0, 0.0);
    for (i, c) in coeffs.c.iter().take(n_bar).enumerate() {
        if *c != Complex64::new(0.0, 0.0) {
            sum += c * theta_minus_mode(i as u32 + 1, t, x)?;
        }
    }
    Ok(sum * SQRT_2)
}

/// `|c_n| ≤ amplitude · n^{-exponent}` beyond the horizon.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLawTail {
    pub amplitude: f64,
    pub exponent: f64,
}

impl PowerLawTail {
    /// Envelope fitted on `n ∈ [from, to]`: least-squares slope in log–log,
    /// amplitude raised so that every sample lies below the envelope.
    pub fn fit(coeffs: &SineCoefficients, from: usize, to: usize) -> Result<Self> {
        let to = to.min(coeffs.n_bar());
        if from < 1 || to <= from {
            return Err(Error::Validation(format!("bad fit window [{from}, {to}]")));
        }
        let pts: Vec<(f64, f64)> = (from..=to)
            .filter_map(|n| {
                let a = coeffs.c[n - 1].norm();
                (a > 0.0).then(|| ((n as f64).ln(), a.ln()))
            })
            .collect();
        if pts.len() < 2 {
            return Err(Error::Validation("not enough nonzero coefficients to fit a tail".into()));
        }
        let m = pts.len() as f64;
        let (sx, sy) = pts.iter().fold((0.0, 0.0), |acc, p| (acc.0 + p.0, acc.1 + p.1));
        let (mx, my) = (sx / m, sy / m);
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let exponent = -sxy / sxx;
        let ln_amp = pts.iter().map(|p| p.1 + exponent * p.0).fold(f64::NEG_INFINITY, f64::max);
        Ok(Self {
            amplitude: ln_amp.exp(),
            exponent,
        })
    }

    /// `Σ_{n>n_max} amplitude n^{-exponent-1} ≤ amplitude n_max^{-exponent}/exponent`.
    fn remainder(&self, n_max: usize) -> f64 {
        if self.exponent <= 0.0 {
            return f64::INFINITY;
        }
        self.amplitude * (n_max as f64).powf(-self.exponent) / self.exponent
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailBound {
    /// `M (Σ_{horizon} |c_n|/n + remainder)`.
    pub bound: f64,
    pub horizon_sum: f64,
    pub remainder: f64,
    /// False when the horizon cut is not negligible and no tail model was
    /// supplied.
    pub converged: bool,
}

/// `M Σ_{n>n̄} |c_n|/n` from `tail_abs[i] = |c_{n̄+1+i}|`.
pub fn tail_error_bound(tail_abs: &[f64], n_bar: usize, m_const: f64, model: Option<PowerLawTail>) -> Result<TailBound> {
    if !(m_const > 0.0) || !m_const.is_finite() {
        return Err(Error::Validation(format!("M must be positive, got {m_const}")));
    }
    let horizon_sum: f64 = tail_abs.iter().enumerate().map(|(i, a)| a / (n_bar + 1 + i) as f64).sum();
    let n_max = n_bar + tail_abs.len();
    let (remainder, converged) = match model {
        Some(m) => (m.remainder(n_max.max(1)), true),
        None => {
            let last = tail_abs.last().copied().unwrap_or(0.0);
            (0.0, horizon_sum == 0.0 || last <= 1e-3 * horizon_sum)
        }
    };
    Ok(TailBound {
        bound: m_const * (horizon_sum + remainder),
        horizon_sum,
        remainder,
        converged,
    })
}

/// `√2 · max_{n≤n_max} n ‖θ⁻_n(τ,·)‖_∞` on a uniform grid of `[0,1]`.
pub fn fit_m_const(tau: f64, n_max: u32, grid_points: usize) -> Result<f64> {
    if grid_points < 2 {
        return Err(Error::Validation("grid needs at least two points".into()));
    }
    let xs: Vec<f64> = (0..grid_points).map(|i| i as f64 / (grid_points - 1) as f64).collect();
    let per_mode = (1..=n_max)
        .into_par_iter()
        .map(|n| {
            let mut sup: f64 = 0.0;
            for &x in &xs {
                sup = sup.max(theta_minus_mode(n, tau, x)?.norm());
            }
            Ok(sup * n as f64)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(SQRT_2 * per_mode.into_iter().fold(0.0, f64::max))
}
