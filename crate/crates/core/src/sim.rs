//! Crank–Nicolson simulator for `θ_t = (i + ε) θ_xx` on (0,1) with
//! `θ(t,0) = 0`, `θ(t,1) = u(t)`.
//!
//! Second-order central differences in space, ε = dx^p artificial diffusion,
//! and a Rannacher start: the first full steps are replaced by backward-Euler
//! half-steps. Both step kinds share the left-hand matrix
//! `tridiag(-r, 1+2r, -r)` with `r = (i+ε) dt/(2dx²)`, so it is factored once.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::initial::PiecewiseInitialCondition;

/// Complex field samples `values[i] = θ(t, xs[i])`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldSnapshot {
    pub t: f64,
    pub xs: Vec<f64>,
    pub values: Vec<Complex64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    /// Interior points; `dx = 1/(nx+1)`.
    pub nx: usize,
    /// Full time steps over `[0,T]`.
    pub nt: usize,
    pub diffusion_exponent: f64,
    pub rannacher_halfsteps: usize,
    /// Overrides `dx^diffusion_exponent` when set.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            nx: 1023,
            nt: 32768,
            diffusion_exponent: 0.75,
            rannacher_halfsteps: 4,
            epsilon: None,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.nx < 16 || self.nt < 16 {
            return Err(Error::Validation(format!("need nx, nt >= 16, got nx = {}, nt = {}", self.nx, self.nt)));
        }
        if self.rannacher_halfsteps % 2 != 0 || self.rannacher_halfsteps / 2 > self.nt {
            return Err(Error::Validation(format!(
                "rannacher_halfsteps must be even and cover at most nt steps, got {}",
                self.rannacher_halfsteps
            )));
        }
        if !self.diffusion_exponent.is_finite() {
            return Err(Error::Validation("diffusion_exponent must be finite".into()));
        }
        if let Some(e) = self.epsilon {
            if !(e >= 0.0) || !e.is_finite() {
                return Err(Error::Validation(format!("epsilon must be >= 0, got {e}")));
            }
        }
        Ok(())
    }

    pub fn dx(&self) -> f64 {
        1.0 / (self.nx + 1) as f64
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon.unwrap_or_else(|| self.dx().powf(self.diffusion_exponent))
    }

    fn step_time(&self, step: usize, t_final: f64) -> f64 {
        if step == self.nt {
            t_final
        } else {
            step as f64 * (t_final / self.nt as f64)
        }
    }

    fn half_step_time(&self, half: usize, t_final: f64) -> f64 {
        half as f64 * 0.5 * (t_final / self.nt as f64)
    }

    /// Every time at which [`simulate`] injects a boundary value, ascending.
    pub fn node_times(&self, t_final: f64) -> Vec<f64> {
        let mut ts = vec![0.0];
        ts.extend((1..=self.rannacher_halfsteps).map(|h| self.half_step_time(h, t_final)));
        ts.extend((self.rannacher_halfsteps / 2 + 1..=self.nt).map(|k| self.step_time(k, t_final)));
        ts
    }

    pub fn grid(&self) -> Vec<f64> {
        let dx = self.dx();
        (0..=self.nx + 1).map(|i| if i == self.nx + 1 { 1.0 } else { i as f64 * dx }).collect()
    }
}

/// Sampled control with linear interpolation between samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ControlSchedule {
    pub times: Vec<f64>,
    pub values: Vec<Complex64>,
    /// 1 or 2 per sample.
    pub phases: Vec<u8>,
}

impl ControlSchedule {
    pub fn new(times: Vec<f64>, values: Vec<Complex64>, phases: Vec<u8>) -> Result<Self> {
        if times.len() < 2 || times.len() != values.len() || times.len() != phases.len() {
            return Err(Error::Validation("schedule needs >= 2 samples with matching lengths".into()));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) || !times.iter().all(|t| t.is_finite()) {
            return Err(Error::Validation("schedule times must be strictly increasing".into()));
        }
        if values.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::Validation("schedule values must be finite".into()));
        }
        Ok(Self { times, values, phases })
    }

    pub fn zero(t_final: f64) -> Self {
        Self {
            times: vec![0.0, t_final],
            values: vec![Complex64::new(0.0, 0.0); 2],
            phases: vec![1, 2],
        }
    }

    pub fn start(&self) -> f64 {
        self.times[0]
    }

    pub fn end(&self) -> f64 {
        *self.times.last().expect("non-empty")
    }

    pub fn at(&self, t: f64) -> Result<Complex64> {
        let tol = 1e-12 * self.end().abs().max(1.0);
        if t < self.start() - tol || t > self.end() + tol {
            return Err(Error::Domain(format!(
                "t = {t} outside the schedule [{}, {}]",
                self.start(),
                self.end()
            )));
        }
        let i = self.times.partition_point(|&s| s <= t);
        if i == 0 {
            return Ok(self.values[0]);
        }
        if i >= self.times.len() {
            return Ok(*self.values.last().expect("non-empty"));
        }
        let (t0, t1) = (self.times[i - 1], self.times[i]);
        if t == t0 {
            return Ok(self.values[i - 1]);
        }
        let w = (t - t0) / (t1 - t0);
        Ok(self.values[i - 1] * (1.0 - w) + self.values[i] * w)
    }
}

#[derive(Debug, Clone)]
pub struct SimulationOutput {
    pub snapshots: Vec<FieldSnapshot>,
    pub final_state: FieldSnapshot,
    pub final_l2_error: f64,
    pub dt: f64,
    pub dx: f64,
    pub epsilon: f64,
}

/// Constant-coefficient tridiagonal solver for `tridiag(a, b, a)`.
struct Thomas {
    a: Complex64,
    /// Modified super-diagonal `c'_i`.
    cp: Vec<Complex64>,
    /// `1/(b - a c'_{i-1})`.
    inv: Vec<Complex64>,
}

impl Thomas {
    fn new(a: Complex64, b: Complex64, n: usize) -> Self {
        let mut cp = Vec::with_capacity(n);
        let mut inv = Vec::with_capacity(n);
        let mut prev = Complex64::new(0.0, 0.0);
        for _ in 0..n {
            let m = 1.0 / (b - a * prev);
            inv.push(m);
            prev = a * m;
            cp.push(prev);
        }
        Self { a, cp, inv }
    }

    /// Solves in place.
    fn solve(&self, d: &mut [Complex64]) {
        let n = d.len();
        d[0] *= self.inv[0];
        for i in 1..n {
            d[i] = (d[i] - self.a * d[i - 1]) * self.inv[i];
        }
        for i in (0..n - 1).rev() {
            let next = d[i + 1];
            d[i] -= self.cp[i] * next;
        }
    }
}

/// Trapezoid-rule `L²(0,1)` norm of a snapshot.
pub fn l2_norm(snapshot: &FieldSnapshot) -> f64 {
    let v = &snapshot.values;
    let x = &snapshot.xs;
    let mut acc = 0.0;
    for i in 1..v.len().min(x.len()) {
        acc += 0.5 * (v[i - 1].norm_sqr() + v[i].norm_sqr()) * (x[i] - x[i - 1]);
    }
    acc.sqrt()
}

pub fn simulate(
    theta0: &PiecewiseInitialCondition,
    control: &ControlSchedule,
    cfg: &SolverConfig,
    snapshot_times: &[f64],
) -> Result<SimulationOutput> {
    cfg.validate()?;
    let t_final = control.end();
    if control.start() > 0.0 || !(t_final > 0.0) {
        return Err(Error::Validation(format!(
            "control schedule must cover [0, T], got [{}, {t_final}]",
            control.start()
        )));
    }
    let xs = cfg.grid();
    let nx = cfg.nx;
    let dx = cfg.dx();
    let dt = t_final / cfg.nt as f64;
    let eps = cfg.epsilon();
    let coef = Complex64::new(eps, 1.0);
    let r = coef * (dt / (2.0 * dx * dx));

    let mut theta: Vec<Complex64> = xs.iter().map(|&x| theta0.sample(x)).collect();
    let sup0 = theta.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let sup_u = control.values.iter().filter(|z| z.is_finite()).map(|z| z.norm()).fold(0.0, f64::max);
    let limit = 1e6 * sup0.max(sup_u).max(f64::MIN_POSITIVE);

    let mut snap_steps: Vec<(usize, usize)> = snapshot_times
        .iter()
        .enumerate()
        .map(|(i, &t)| {
            if !(t >= 0.0 && t <= t_final * (1.0 + 1e-12)) {
                return Err(Error::Validation(format!("snapshot time {t} outside [0, {t_final}]")));
            }
            Ok((((t / dt).round() as usize).min(cfg.nt), i))
        })
        .collect::<Result<Vec<_>>>()?;
    snap_steps.sort();
    let mut snapshots: Vec<Option<FieldSnapshot>> = vec![None; snapshot_times.len()];
    let mut next_snap = 0;
    let take = |step: usize, theta: &[Complex64], next_snap: &mut usize, snapshots: &mut Vec<Option<FieldSnapshot>>| {
        while *next_snap < snap_steps.len() && snap_steps[*next_snap].0 == step {
            let (s, idx) = snap_steps[*next_snap];
            snapshots[idx] = Some(FieldSnapshot {
                t: cfg.step_time(s, t_final),
                xs: xs.clone(),
                values: theta.to_vec(),
            });
            *next_snap += 1;
        }
    };
    take(0, &theta, &mut next_snap, &mut snapshots);

    let solver = Thomas::new(-r, 1.0 + 2.0 * r, nx);
    let mut rhs = vec![Complex64::new(0.0, 0.0); nx];
    let check = |theta: &[Complex64], t: f64| -> Result<()> {
        let worst = theta
            .iter()
            .map(|z| if z.is_finite() { z.norm() } else { f64::INFINITY })
            .fold(0.0, f64::max);
        if worst > limit || !worst.is_finite() {
            return Err(Error::Instability { t, modulus: worst });
        }
        Ok(())
    };

    // Rannacher half-steps.
    let halfsteps = cfg.rannacher_halfsteps;
    for h in 1..=halfsteps {
        let t = cfg.half_step_time(h, t_final);
        let g = control.at(t)?;
        rhs.copy_from_slice(&theta[1..=nx]);
        rhs[nx - 1] += r * g;
        solver.solve(&mut rhs);
        theta[0] = Complex64::new(0.0, 0.0);
        theta[1..=nx].copy_from_slice(&rhs);
        theta[nx + 1] = g;
        check(&theta, t)?;
        if h % 2 == 0 {
            take(h / 2, &theta, &mut next_snap, &mut snapshots);
        }
    }

    let one_minus = 1.0 - 2.0 * r;
    for step in halfsteps / 2 + 1..=cfg.nt {
        let t = cfg.step_time(step, t_final);
        let g = control.at(t)?;
        for i in 1..=nx {
            rhs[i - 1] = r * (theta[i - 1] + theta[i + 1]) + one_minus * theta[i];
        }
        rhs[nx - 1] += r * g;
        solver.solve(&mut rhs);
        theta[0] = Complex64::new(0.0, 0.0);
        theta[1..=nx].copy_from_slice(&rhs);
        theta[nx + 1] = g;
        check(&theta, t)?;
        take(step, &theta, &mut next_snap, &mut snapshots);
    }

    let final_state = FieldSnapshot {
        t: t_final,
        xs,
        values: theta,
    };
    Ok(SimulationOutput {
        snapshots: snapshots.into_iter().map(|s| s.expect("every snapshot step is visited")).collect(),
        final_l2_error: l2_norm(&final_state),
        final_state,
        dt,
        dx,
        epsilon: eps,
    })
}
