//! Second-phase flatness control.
//!
//! The flat output `Y(t) = φ_s((t-τ)/(T-τ)) θ⁻_x(t,0)` is differentiated
//! through the scaled quantities
//! `ỹ_k = τ^k/k! ∂_t^k θ⁻_x(t,0) = -i ∫_0^1 F̃_k(t,y) y θ₀(y) dy` and
//! `φ̃_m = (d/dt)^m[φ_s((t-τ)/(T-τ))]/(2m)!`, assembled as
//! `W[j] = Y^{(j)}/(2j)! = Σ_k assembly_d(j,k) ỹ_k φ̃_{j-k}`.
//! The control is `u = Σ_{j≤j̄} (-i)^j W[j]/(2j+1)` and the field
//! `θ(t,x) = Σ_{j≤j̄} (-i)^j x^{2j+1} W[j]/(2j+1)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gevrey::{phi_scaled_derivatives_with, phi_step, GevreyStepParams, LeibnizTables, MAX_ORDER};
use crate::initial::PiecewiseInitialCondition;
use crate::kernel::eval_e;
use crate::quad::{self, QuadConfig, QuadOutcome};
use crate::sim::FieldSnapshot;

/// Number of terms past `j̄` summed for the tail diagnostic.
pub const TAIL_TERMS: usize = 30;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlatnessConfig {
    #[serde(rename = "T")]
    pub t_final: f64,
    pub tau: f64,
    pub s: f64,
    #[serde(rename = "M")]
    pub m: f64,
    pub j_bar: usize,
    pub quad_tol: f64,
}

impl Default for FlatnessConfig {
    fn default() -> Self {
        Self {
            t_final: 0.4,
            tau: 0.05,
            s: 1.7,
            m: 0.8,
            j_bar: 50,
            quad_tol: 1e-10,
        }
    }
}

impl FlatnessConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tau > 0.0 && self.tau < self.t_final && self.t_final.is_finite()) {
            return Err(Error::Validation(format!(
                "need 0 < tau < T, got tau = {}, T = {}",
                self.tau, self.t_final
            )));
        }
        if self.j_bar + TAIL_TERMS > MAX_ORDER {
            return Err(Error::Validation(format!(
                "j_bar + {TAIL_TERMS} must not exceed {MAX_ORDER}, got j_bar = {}",
                self.j_bar
            )));
        }
        if !(self.quad_tol > 0.0 && self.quad_tol < 1.0) {
            return Err(Error::Validation(format!("quad_tol must be in (0,1), got {}", self.quad_tol)));
        }
        GevreyStepParams::new(self.s, self.m).map(|_| ())
    }

    fn step(&self) -> Result<GevreyStepParams> {
        GevreyStepParams::new(self.s, self.m)
    }

    fn check_time(&self, t: f64) -> Result<()> {
        if !(t > self.tau && t <= self.t_final) {
            return Err(Error::Domain(format!(
                "phase-2 time must lie in (tau, T] = ({}, {}], got {t}",
                self.tau, self.t_final
            )));
        }
        Ok(())
    }
}

/// `F̃_k(t,x) = τ^k/k! ∂_t^k (E(t,x)/t)` for `k = 0..=k_max`; `F̃_{-1} = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct FTildeStack {
    pub t: f64,
    pub x: f64,
    pub values: Vec<Complex64>,
}

impl FTildeStack {
    /// `F̃_k` with the `k = -1` convention.
    pub fn get(&self, k: i64) -> Complex64 {
        if k < 0 {
            Complex64::new(0.0, 0.0)
        } else {
            self.values[k as usize]
        }
    }
}

#[inline]
fn ftilde_fill(t: f64, x: f64, tau: f64, e: Complex64, out: &mut [Complex64]) {
    if out.is_empty() {
        return;
    }
    out[0] = e / t;
    let ix2 = Complex64::new(0.0, x * x);
    let mut prev = Complex64::new(0.0, 0.0);
    for k in 0..out.len() - 1 {
        let kf = k as f64;
        let scale = -tau / (4.0 * (kf + 1.0) * t * t);
        let next = scale * ((ix2 + 2.0 * t * (4.0 * kf + 3.0)) * out[k] + 2.0 * (2.0 * kf + 1.0) * tau * prev);
        prev = out[k];
        out[k + 1] = next;
    }
}

pub fn ftilde_stack(t: f64, x: f64, tau: f64, k_max: usize) -> Result<FTildeStack> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::Domain(format!("F̃ needs t > 0, got {t}")));
    }
    let mut values = vec![Complex64::new(0.0, 0.0); k_max + 1];
    ftilde_fill(t, x, tau, eval_e(t, x)?, &mut values);
    Ok(FTildeStack { t, x, values })
}

/// `ỹ_0..=ỹ_{k_max}` in one vector-valued quadrature pass.
pub fn ytilde_all(
    theta0: &PiecewiseInitialCondition,
    t: f64,
    tau: f64,
    k_max: usize,
    rel_tol: f64,
) -> Result<QuadOutcome<Vec<Complex64>>> {
    if !(t > tau && tau > 0.0) {
        return Err(Error::Domain(format!("ỹ needs t > tau > 0, got t = {t}, tau = {tau}")));
    }
    let dim = k_max + 1;
    if theta0.is_zero() {
        return Ok(QuadOutcome {
            value: vec![Complex64::new(0.0, 0.0); dim],
            error: 0.0,
            evaluations: 0,
            intervals: 0,
        });
    }
    let cfg = QuadConfig {
        rel_tol,
        abs_tol: 1e-15,
        ..QuadConfig::default()
    };
    let mut out = quad::integrate_vec(
        |n, buf| {
            let y = n.y();
            let e = crate::kernel::eval_e_unchecked(t, y);
            ftilde_fill(t, y, tau, e, buf);
            let w = theta0.eval_node(n) * y * Complex64::new(0.0, -1.0);
            for v in buf.iter_mut() {
                *v *= w;
            }
        },
        dim,
        &theta0.quad_segments(),
        &cfg,
    )?;
    for v in &mut out.value {
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::Domain("non-finite ỹ".into()));
        }
    }
    Ok(out)
}

pub fn ytilde(theta0: &PiecewiseInitialCondition, t: f64, tau: f64, k: usize, rel_tol: f64) -> Result<Complex64> {
    Ok(ytilde_all(theta0, t, tau, k, rel_tol)?.value[k])
}

/// Assembly coefficient `j!(2j-2k)!/((j-k)! τ^k (2j)!)`, by
/// `d_0 = 1`, `d_k = d_{k-1}/(2τ(2j-2k+1))`. Not the Leibniz `d` of the
/// step-function recursion.
pub fn assembly_d(j: usize, k: usize, tau: f64) -> f64 {
    assert!(k <= j, "assembly_d needs k <= j");
    let mut d = 1.0;
    for m in 1..=k {
        d /= 2.0 * tau * (2 * j - 2 * m + 1) as f64;
    }
    d
}

/// Triangular table of [`assembly_d`] for fixed τ.
#[derive(Debug, Clone)]
pub struct AssemblyTable {
    rows: Vec<Vec<f64>>,
}

impl AssemblyTable {
    pub fn new(j_max: usize, tau: f64) -> Self {
        let rows = (0..=j_max)
            .map(|j| {
                let mut row = Vec::with_capacity(j + 1);
                let mut d = 1.0;
                row.push(d);
                for k in 1..=j {
                    d /= 2.0 * tau * (2 * j - 2 * k + 1) as f64;
                    row.push(d);
                }
                row
            })
            .collect();
        Self { rows }
    }

    pub fn get(&self, j: usize, k: usize) -> f64 {
        self.rows[j][k]
    }
}

/// Step-function factor `φ̃_m(t)`, `m = 0..=j_max`.
pub fn step_scaled_derivatives(cfg: &FlatnessConfig, tables: &LeibnizTables, t: f64, j_max: usize) -> Result<Vec<f64>> {
    let step = cfg.step()?;
    let width = cfg.t_final - cfg.tau;
    let rho = (t - cfg.tau) / width;
    if rho >= 1.0 {
        return Ok(vec![0.0; j_max + 1]);
    }
    if rho <= 0.0 {
        let mut v = vec![0.0; j_max + 1];
        v[0] = phi_step(&step, rho);
        return Ok(v);
    }
    Ok(phi_scaled_derivatives_with(tables, &step, rho, 1.0 / width, j_max)?.phi_tilde)
}

fn assemble(ytilde: &[Complex64], phi: &[f64], table: &AssemblyTable, j_max: usize) -> Vec<Complex64> {
    (0..=j_max)
        .map(|j| {
            (0..=j)
                .filter(|&k| phi[j - k] != 0.0)
                .map(|k| ytilde[k] * (table.get(j, k) * phi[j - k]))
                .sum()
        })
        .collect()
}

/// Reusable phase-2 evaluator: coefficient tables built once per config.
#[derive(Debug, Clone)]
pub struct Phase2 {
    cfg: FlatnessConfig,
    leibniz: LeibnizTables,
    assembly: AssemblyTable,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Phase2Value {
    pub u: Complex64,
    /// Sum of the [`TAIL_TERMS`] terms following the truncation.
    pub tail: Complex64,
    /// `W[0..=j̄+TAIL_TERMS]`.
    pub w: Vec<Complex64>,
    pub quad_evaluations: usize,
    pub quad_intervals: usize,
}

impl Phase2 {
    pub fn new(cfg: &FlatnessConfig) -> Result<Self> {
        cfg.validate()?;
        let j_max = cfg.j_bar + TAIL_TERMS;
        Ok(Self {
            cfg: cfg.clone(),
            leibniz: LeibnizTables::new(j_max)?,
            assembly: AssemblyTable::new(j_max, cfg.tau),
        })
    }

    pub fn config(&self) -> &FlatnessConfig {
        &self.cfg
    }

    /// `W[j] = Y^{(j)}(t)/(2j)!` for `j = 0..=j_max`.
    pub fn scaled_derivatives(&self, theta0: &PiecewiseInitialCondition, t: f64, j_max: usize) -> Result<(Vec<Complex64>, usize, usize)> {
        self.cfg.check_time(t)?;
        if j_max > self.leibniz.j_max() {
            return Err(Error::Validation(format!("order {j_max} exceeds {}", self.leibniz.j_max())));
        }
        let phi = step_scaled_derivatives(&self.cfg, &self.leibniz, t, j_max)?;
        if phi.iter().all(|&p| p == 0.0) {
            return Ok((vec![Complex64::new(0.0, 0.0); j_max + 1], 0, 0));
        }
        let y = ytilde_all(theta0, t, self.cfg.tau, j_max, self.cfg.quad_tol).map_err(|e| e.at(t))?;
        Ok((assemble(&y.value, &phi, &self.assembly, j_max), y.evaluations, y.intervals))
    }

    pub fn eval(&self, theta0: &PiecewiseInitialCondition, t: f64) -> Result<Phase2Value> {
        let j_bar = self.cfg.j_bar;
        let (w, evals, intervals) = self.scaled_derivatives(theta0, t, j_bar + TAIL_TERMS)?;
        let term = |j: usize| w[j] * minus_i_pow(j) / (2 * j + 1) as f64;
        let u = (0..=j_bar).map(term).sum();
        let tail = (j_bar + 1..=j_bar + TAIL_TERMS).map(term).sum();
        Ok(Phase2Value {
            u,
            tail,
            w,
            quad_evaluations: evals,
            quad_intervals: intervals,
        })
    }

    pub fn field(&self, theta0: &PiecewiseInitialCondition, t: f64, xs: &[f64]) -> Result<FieldSnapshot> {
        let j_bar = self.cfg.j_bar;
        let (w, _, _) = self.scaled_derivatives(theta0, t, j_bar)?;
        let values = xs.iter().map(|&x| series_at(&w[..=j_bar], x)).collect();
        Ok(FieldSnapshot {
            t,
            xs: xs.to_vec(),
            values,
        })
    }
}

fn minus_i_pow(j: usize) -> Complex64 {
    match j % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, -1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, 1.0),
    }
}

/// `Σ_j (-i)^j x^{2j+1} W[j]/(2j+1)`.
fn series_at(w: &[Complex64], x: f64) -> Complex64 {
    let x2 = x * x;
    let mut pow = x;
    let mut sum = Complex64::new(0.0, 0.0);
    for (j, wj) in w.iter().enumerate() {
        sum += wj * minus_i_pow(j) * (pow / (2 * j + 1) as f64);
        pow *= x2;
    }
    sum
}

pub fn flat_output_scaled_derivatives(
    theta0: &PiecewiseInitialCondition,
    cfg: &FlatnessConfig,
    t: f64,
    j_max: usize,
) -> Result<Vec<Complex64>> {
    let p = Phase2 {
        cfg: cfg.clone(),
        leibniz: LeibnizTables::new(j_max)?,
        assembly: AssemblyTable::new(j_max, cfg.tau),
    };
    cfg.validate()?;
    Ok(p.scaled_derivatives(theta0, t, j_max)?.0)
}

pub fn u_phase2(theta0: &PiecewiseInitialCondition, cfg: &FlatnessConfig, t: f64) -> Result<Phase2Value> {
    Phase2::new(cfg)?.eval(theta0, t)
}

pub fn theta_phase2_field(theta0: &PiecewiseInitialCondition, cfg: &FlatnessConfig, t: f64, xs: &[f64]) -> Result<FieldSnapshot> {
    Phase2::new(cfg)?.field(theta0, t, xs)
}
