//! End-to-end scenario: configuration, control synthesis, simulation and
//! artifact I/O.

use std::fs::{self, File};
use std::path::{Path, PathBuf};
use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::{self, PowerLawTail, SineCoefficients, TailBound};
use crate::initial::{InitialConditionSpec, PiecewiseInitialCondition};
use crate::phase1::{self, Phase1Asymptotics, DEFAULT_ORDER};
use crate::phase2::{FlatnessConfig, Phase2};
use crate::sim::{self, ControlSchedule, FieldSnapshot, SolverConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ControlMode {
    /// Phase 1 on `[t_switch, τ]` by direct quadrature.
    #[default]
    Integral,
    /// Phase 1 on `[t_switch, τ]` by the truncated sine series.
    Spectral,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SamplingConfig {
    /// Log-spaced samples on `[t_min, τ]`.
    pub phase1: usize,
    /// Uniform samples on `(τ, T]`.
    pub phase2: usize,
    pub t_min: f64,
    /// Also sample at every boundary-injection time of the solver, so that
    /// simulating from the schedule never interpolates.
    pub align_to_solver: bool,
}

impl Default for SamplingConfig {
    fn default() -> Self {
        Self {
            phase1: 400,
            phase2: 400,
            t_min: 1e-6,
            align_to_solver: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(rename = "T")]
    pub t_final: f64,
    pub tau: f64,
    pub s: f64,
    #[serde(rename = "M")]
    pub m: f64,
    pub j_bar: usize,
    pub t_switch: f64,
    pub mode: ControlMode,
    /// Sine modes kept in spectral mode.
    pub n_bar: Option<usize>,
    pub asymptotic_order: f64,
    pub quad_tol: f64,
    pub sampling: SamplingConfig,
    /// Snapshots uniformly spaced over `[0, T]`.
    pub snapshots: usize,
    pub solver: SolverConfig,
    pub theta0: InitialConditionSpec,
    pub output_dir: Option<PathBuf>,
}

pub const DEFAULT_N_BAR: usize = 2048;

impl Default for ScenarioConfig {
    fn default() -> Self {
        let f = FlatnessConfig::default();
        Self {
            t_final: f.t_final,
            tau: f.tau,
            s: f.s,
            m: f.m,
            j_bar: f.j_bar,
            t_switch: 1e-3,
            mode: ControlMode::Integral,
            n_bar: None,
            asymptotic_order: DEFAULT_ORDER,
            quad_tol: f.quad_tol,
            sampling: SamplingConfig::default(),
            snapshots: 9,
            solver: SolverConfig::default(),
            theta0: PiecewiseInitialCondition::benchmark_spec(),
            output_dir: None,
        }
    }
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Validation(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    pub fn flatness(&self) -> FlatnessConfig {
        FlatnessConfig {
            t_final: self.t_final,
            tau: self.tau,
            s: self.s,
            m: self.m,
            j_bar: self.j_bar,
            quad_tol: self.quad_tol,
        }
    }

    pub fn n_bar(&self) -> usize {
        self.n_bar.unwrap_or(DEFAULT_N_BAR)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_switch > 0.0 && self.t_switch < self.tau && self.tau < self.t_final && self.t_final.is_finite()) {
            return Err(Error::Validation(format!(
                "need 0 < t_switch < tau < T, got t_switch = {}, tau = {}, T = {}",
                self.t_switch, self.tau, self.t_final
            )));
        }
        self.flatness().validate()?;
        self.solver.validate()?;
        if !(self.asymptotic_order > 0.5) {
            return Err(Error::Validation(format!("asymptotic_order must exceed 1/2, got {}", self.asymptotic_order)));
        }
        let sm = &self.sampling;
        if sm.phase1 < 2 || sm.phase2 < 1 {
            return Err(Error::Validation("need at least 2 phase-1 and 1 phase-2 samples".into()));
        }
        if !(sm.t_min > 0.0 && sm.t_min < self.t_switch) {
            return Err(Error::Validation(format!("sampling.t_min must lie in (0, t_switch), got {}", sm.t_min)));
        }
        if self.n_bar == Some(0) {
            return Err(Error::Validation("n_bar must be at least 1".into()));
        }
        if self.snapshots < 2 {
            return Err(Error::Validation("need at least 2 snapshots".into()));
        }
        Ok(())
    }

    /// Sample times, ascending and duplicate-free.
    pub fn sample_times(&self) -> Vec<f64> {
        let sm = &self.sampling;
        let mut ts = vec![0.0];
        let (a, b) = (sm.t_min.ln(), self.tau.ln());
        let n1 = sm.phase1 - 1;
        ts.extend((0..=n1).map(|k| if k == n1 { self.tau } else { (a + (b - a) * k as f64 / n1 as f64).exp() }));
        let width = self.t_final - self.tau;
        ts.extend((1..=sm.phase2).map(|k| if k == sm.phase2 { self.t_final } else { self.tau + width * k as f64 / sm.phase2 as f64 }));
        if sm.align_to_solver {
            ts.extend(self.solver.node_times(self.t_final));
        }
        ts.sort_by(f64::total_cmp);
        ts.dedup();
        ts
    }

    pub fn snapshot_times(&self) -> Vec<f64> {
        let n = self.snapshots - 1;
        (0..=n).map(|k| if k == n { self.t_final } else { self.t_final * k as f64 / n as f64 }).collect()
    }
}

/// A validated scenario with its initial state.
#[derive(Clone)]
pub struct Scenario {
    pub config: ScenarioConfig,
    pub theta0: PiecewiseInitialCondition,
}

impl Scenario {
    pub fn new(config: ScenarioConfig) -> Result<Self> {
        let theta0 = PiecewiseInitialCondition::from_spec(&config.theta0)?;
        Self::with_theta0(config, theta0)
    }

    /// Uses `theta0` instead of `config.theta0`, e.g. for custom segment bodies.
    pub fn with_theta0(config: ScenarioConfig, theta0: PiecewiseInitialCondition) -> Result<Self> {
        config.validate()?;
        Ok(Self { config, theta0 })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralReport {
    pub n_bar: usize,
    pub horizon: usize,
    pub parseval_defect: f64,
    pub m_const: f64,
    pub tail: TailBound,
    pub tail_model: Option<PowerLawTail>,
    /// Whether `Σ|c_n|` has numerically settled by `n̄`.
    pub abs_sum_converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthesisReport {
    pub samples: usize,
    pub asymptotic_samples: usize,
    pub quadrature_samples: usize,
    pub spectral_samples: usize,
    pub phase2_samples: usize,
    pub asymptotic_terms: usize,
    pub expansion_order_requested: f64,
    pub expansion_order_achieved: f64,
    /// Largest `|tail|` over phase 2.
    pub tail_diagnostic: f64,
    pub max_abs_u_phase2: f64,
    /// `|u(τ) - u(τ + 1e-9 (T-τ))|`.
    pub seam_jump: f64,
    pub max_abs_u: f64,
    pub u_final: Complex64,
    pub quad_evaluations: usize,
    pub quad_intervals: usize,
    pub spectral: Option<SpectralReport>,
    pub seconds: f64,
}

pub struct Synthesis {
    pub schedule: ControlSchedule,
    pub report: SynthesisReport,
    /// Present in spectral mode.
    pub coefficients: Option<SineCoefficients>,
}

enum Kind {
    Zero,
    Asymptotic,
    Quadrature,
    Spectral,
    Phase2,
}

struct Sample {
    u: Complex64,
    tail: Complex64,
    order: f64,
    evaluations: usize,
    intervals: usize,
}

impl Sample {
    fn plain(u: Complex64) -> Self {
        Self {
            u,
            tail: Complex64::new(0.0, 0.0),
            order: f64::INFINITY,
            evaluations: 0,
            intervals: 0,
        }
    }
}

/// Sine coefficients up to `2 n̄` with the tail certificate for `T_n̄`.
pub fn fourier_analysis(sc: &Scenario) -> Result<(SineCoefficients, SpectralReport)> {
    let cfg = &sc.config;
    let n_bar = cfg.n_bar();
    let horizon = 2 * n_bar;
    let coeffs = fourier::sine_coefficients(&sc.theta0, horizon)?;
    let tail_abs: Vec<f64> = coeffs.c[n_bar..].iter().map(|c| c.norm()).collect();
    let model = PowerLawTail::fit(&coeffs, n_bar, horizon).ok();
    // Mode amplitudes grow as t decreases, so fit M at the start of the window.
    let m_const = fourier::fit_m_const(cfg.t_switch, n_bar as u32, 257)?;
    let tail = fourier::tail_error_bound(&tail_abs, n_bar, m_const, model)?;
    let abs = |n: usize| coeffs.c.iter().take(n).map(|c| c.norm()).sum::<f64>();
    let (half, full) = (abs(n_bar / 2), abs(n_bar));
    let report = SpectralReport {
        n_bar,
        horizon,
        parseval_defect: coeffs.parseval_defect(n_bar),
        m_const,
        tail,
        tail_model: model,
        abs_sum_converged: full == 0.0 || full - half <= 1e-3 * full,
    };
    Ok((coeffs, report))
}

pub fn synthesize(sc: &Scenario) -> Result<Synthesis> {
    let start = Instant::now();
    let cfg = &sc.config;
    let theta0 = &sc.theta0;
    let asym = Phase1Asymptotics::new(theta0, cfg.asymptotic_order)?;
    let phase2 = Phase2::new(&cfg.flatness())?;
    let (coefficients, spectral) = match cfg.mode {
        ControlMode::Integral => (None, None),
        ControlMode::Spectral => {
            let (c, r) = fourier_analysis(sc)?;
            (Some(c), Some(r))
        }
    };
    let n_bar = cfg.n_bar();
    let times = cfg.sample_times();
    let kind = |t: f64| {
        if t == 0.0 {
            Kind::Zero
        } else if t < cfg.t_switch {
            Kind::Asymptotic
        } else if t <= cfg.tau {
            match cfg.mode {
                ControlMode::Integral => Kind::Quadrature,
                ControlMode::Spectral => Kind::Spectral,
            }
        } else {
            Kind::Phase2
        }
    };
    let samples = times
        .par_iter()
        .map(|&t| {
            let s = match kind(t) {
                Kind::Zero => Sample::plain(phase1::u_phase1_at_zero(theta0)),
                Kind::Asymptotic => {
                    let v = asym.eval(t)?;
                    Sample {
                        order: v.order_achieved,
                        ..Sample::plain(v.value)
                    }
                }
                Kind::Quadrature => {
                    let q = phase1::theta_minus_point(theta0, t, 1.0, cfg.quad_tol)?;
                    Sample {
                        evaluations: q.evaluations,
                        intervals: q.intervals,
                        ..Sample::plain(q.value)
                    }
                }
                Kind::Spectral => {
                    let c = coefficients.as_ref().expect("spectral mode has coefficients");
                    Sample::plain(fourier::truncated_control_upto(c, n_bar, t, 1.0)?)
                }
                Kind::Phase2 => {
                    let v = phase2.eval(theta0, t)?;
                    Sample {
                        u: v.u,
                        tail: v.tail,
                        order: f64::INFINITY,
                        evaluations: v.quad_evaluations,
                        intervals: v.quad_intervals,
                    }
                }
            };
            Ok(s)
        })
        .enumerate()
        .map(|(i, r): (usize, Result<Sample>)| r.map_err(|e| match e {
            Error::AtTime { .. } => e,
            e => e.at(times[i]),
        }))
        .collect::<Result<Vec<Sample>>>()?;

    let mut report = SynthesisReport {
        samples: times.len(),
        asymptotic_samples: 0,
        quadrature_samples: 0,
        spectral_samples: 0,
        phase2_samples: 0,
        asymptotic_terms: asym.term_count(),
        expansion_order_requested: cfg.asymptotic_order,
        expansion_order_achieved: cfg.asymptotic_order,
        tail_diagnostic: 0.0,
        max_abs_u_phase2: 0.0,
        seam_jump: 0.0,
        max_abs_u: 0.0,
        u_final: samples.last().expect("T is sampled").u,
        quad_evaluations: 0,
        quad_intervals: 0,
        spectral,
        seconds: 0.0,
    };
    let mut phases = Vec::with_capacity(times.len());
    let mut at_tau = None;
    for (&t, s) in times.iter().zip(&samples) {
        match kind(t) {
            Kind::Zero => {}
            Kind::Asymptotic => report.asymptotic_samples += 1,
            Kind::Quadrature => report.quadrature_samples += 1,
            Kind::Spectral => report.spectral_samples += 1,
            Kind::Phase2 => {
                report.phase2_samples += 1;
                report.tail_diagnostic = report.tail_diagnostic.max(s.tail.norm());
                report.max_abs_u_phase2 = report.max_abs_u_phase2.max(s.u.norm());
            }
        }
        if t == cfg.tau {
            at_tau = Some(s.u);
        }
        phases.push(if t <= cfg.tau { 1 } else { 2 });
        report.expansion_order_achieved = report.expansion_order_achieved.min(s.order);
        report.max_abs_u = report.max_abs_u.max(s.u.norm());
        report.quad_evaluations += s.evaluations;
        report.quad_intervals += s.intervals;
    }
    if let Some(a) = at_tau {
        let t = cfg.tau + 1e-9 * (cfg.t_final - cfg.tau);
        report.seam_jump = (a - phase2.eval(theta0, t).map_err(|e| e.at(t))?.u).norm();
    }
    let schedule = ControlSchedule::new(times, samples.iter().map(|s| s.u).collect(), phases)?;
    report.seconds = start.elapsed().as_secs_f64();
    Ok(Synthesis {
        schedule,
        report,
        coefficients,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverlapRow {
    pub t: f64,
    pub asymptotic: Complex64,
    pub quadrature: Complex64,
    pub abs_diff: f64,
}

/// Asymptotic vs quadrature control on log-spaced points of
/// `[t_switch, min(10 t_switch, τ)]`.
pub fn overlap_table(sc: &Scenario, points: usize) -> Result<Vec<OverlapRow>> {
    let cfg = &sc.config;
    let asym = Phase1Asymptotics::new(&sc.theta0, cfg.asymptotic_order)?;
    let (a, b) = (cfg.t_switch.ln(), (10.0 * cfg.t_switch).min(cfg.tau).ln());
    let n = points.max(2) - 1;
    (0..=n)
        .into_par_iter()
        .map(|k| {
            let t = (a + (b - a) * k as f64 / n as f64).exp();
            let asymptotic = asym.eval(t)?.value;
            let quadrature = phase1::u_phase1_quadrature(&sc.theta0, t, cfg.quad_tol).map_err(|e| e.at(t))?;
            Ok(OverlapRow {
                t,
                asymptotic,
                quadrature,
                abs_diff: (asymptotic - quadrature).norm(),
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralCheck {
    pub points: usize,
    /// `max |u_spectral - u_integral|` over the compared points of `[t_switch, τ]`.
    pub max_diff: f64,
    pub certificate: f64,
}

/// Compares spectral against integral phase-1 control on log-spaced points.
pub fn spectral_check(sc: &Scenario, coeffs: &SineCoefficients, certificate: f64, points: usize) -> Result<SpectralCheck> {
    let cfg = &sc.config;
    let (a, b) = (cfg.t_switch.ln(), cfg.tau.ln());
    let n = points.max(2) - 1;
    let diffs = (0..=n)
        .into_par_iter()
        .map(|k| {
            let t = if k == n { cfg.tau } else { (a + (b - a) * k as f64 / n as f64).exp() };
            let q = phase1::u_phase1_quadrature(&sc.theta0, t, cfg.quad_tol).map_err(|e| e.at(t))?;
            let f = fourier::truncated_control_upto(coeffs, cfg.n_bar(), t, 1.0)?;
            Ok((q - f).norm())
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(SpectralCheck {
        points: n + 1,
        max_diff: diffs.into_iter().fold(0.0, f64::max),
        certificate,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub synthesis_s: f64,
    pub simulation_s: f64,
    pub diagnostics_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    pub final_l2_error: f64,
    pub expansion_order_achieved: f64,
    pub tail_diagnostic: f64,
    pub parseval_defect: Option<f64>,
    pub initial_l2_norm: f64,
    /// `(t, ‖θ(t)‖)` per snapshot.
    pub snapshot_norms: Vec<(f64, f64)>,
    pub overlap: Vec<OverlapRow>,
    pub spectral_check: Option<SpectralCheck>,
    pub synthesis: SynthesisReport,
    pub epsilon: f64,
    pub timings: Timings,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub final_l2_error: f64,
    pub snapshot_norms: Vec<(f64, f64)>,
    pub epsilon: f64,
    pub seconds: f64,
}

impl SimulationReport {
    pub fn new(output: &sim::SimulationOutput, seconds: f64) -> Self {
        Self {
            final_l2_error: output.final_l2_error,
            snapshot_norms: output.snapshots.iter().map(|f| (f.t, sim::l2_norm(f))).collect(),
            epsilon: output.epsilon,
            seconds,
        }
    }
}

pub struct Experiment {
    pub synthesis: Synthesis,
    pub output: sim::SimulationOutput,
    pub report: ErrorReport,
}

pub fn simulate_schedule(sc: &Scenario, schedule: &ControlSchedule) -> Result<sim::SimulationOutput> {
    if (schedule.end() - sc.config.t_final).abs() > 1e-12 * sc.config.t_final {
        return Err(Error::Validation(format!(
            "schedule ends at {} but T = {}",
            schedule.end(),
            sc.config.t_final
        )));
    }
    sim::simulate(&sc.theta0, schedule, &sc.config.solver, &sc.config.snapshot_times())
}

pub fn run_experiment(sc: &Scenario) -> Result<Experiment> {
    let synthesis = synthesize(sc)?;
    let t0 = Instant::now();
    let output = simulate_schedule(sc, &synthesis.schedule)?;
    let simulation_s = t0.elapsed().as_secs_f64();
    let t1 = Instant::now();
    let overlap = overlap_table(sc, 8)?;
    let spectral_check = match (&synthesis.coefficients, &synthesis.report.spectral) {
        (Some(c), Some(r)) => Some(spectral_check(sc, c, r.tail.bound, 32)?),
        _ => None,
    };
    let diagnostics_s = t1.elapsed().as_secs_f64();
    let s = &synthesis.report;
    let report = ErrorReport {
        final_l2_error: output.final_l2_error,
        expansion_order_achieved: s.expansion_order_achieved,
        tail_diagnostic: s.tail_diagnostic,
        parseval_defect: s.spectral.as_ref().map(|r| r.parseval_defect),
        initial_l2_norm: sc.theta0.norm_sq()?.sqrt(),
        snapshot_norms: output.snapshots.iter().map(|f| (f.t, sim::l2_norm(f))).collect(),
        overlap,
        spectral_check,
        synthesis: s.clone(),
        epsilon: output.epsilon,
        timings: Timings {
            synthesis_s: s.seconds,
            simulation_s,
            diagnostics_s,
        },
    };
    Ok(Experiment {
        synthesis,
        output,
        report,
    })
}

/// 17 significant digits; round-trips every finite `f64`.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub const CONTROL_CSV: &str = "control.csv";
pub const SNAPSHOTS_CSV: &str = "snapshots.csv";
pub const REPORT_JSON: &str = "report.json";

pub fn write_control_csv(path: &Path, schedule: &ControlSchedule) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["t", "phase", "re", "im"])?;
    for ((t, p), u) in schedule.times.iter().zip(&schedule.phases).zip(&schedule.values) {
        w.write_record([fmt_f64(*t), p.to_string(), fmt_f64(u.re), fmt_f64(u.im)])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_control_csv(path: &Path) -> Result<ControlSchedule> {
    #[derive(Deserialize)]
    struct Row {
        t: f64,
        phase: u8,
        re: f64,
        im: f64,
    }
    let mut r = csv::Reader::from_path(path)?;
    let (mut times, mut values, mut phases) = (Vec::new(), Vec::new(), Vec::new());
    for row in r.deserialize() {
        let row: Row = row?;
        times.push(row.t);
        values.push(Complex64::new(row.re, row.im));
        phases.push(row.phase);
    }
    ControlSchedule::new(times, values, phases)
}

pub fn write_snapshots_csv(path: &Path, snapshots: &[FieldSnapshot]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["t", "x", "re", "im"])?;
    for s in snapshots {
        for (x, v) in s.xs.iter().zip(&s.values) {
            w.write_record([fmt_f64(s.t), fmt_f64(*x), fmt_f64(v.re), fmt_f64(v.im)])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let f = File::create(path)?;
    serde_json::to_writer_pretty(f, value).map_err(|e| Error::Io(e.to_string()))
}

pub fn ensure_dir(dir: &Path) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    Ok(dir.to_path_buf())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::SQRT_2;

    fn small() -> ScenarioConfig {
        ScenarioConfig {
            sampling: SamplingConfig {
                phase1: 40,
                phase2: 40,
                align_to_solver: false,
                ..SamplingConfig::default()
            },
            solver: SolverConfig {
                nx: 63,
                nt: 256,
                ..SolverConfig::default()
            },
            ..ScenarioConfig::default()
        }
    }

    #[test]
    fn config_defaults_and_rejection() {
        let c = ScenarioConfig::from_json("{}").unwrap();
        assert_eq!(c, ScenarioConfig::default());
        c.validate().unwrap();
        let c = ScenarioConfig::from_json(r#"{"T": 1.0, "tau": 0.1, "solver": {"nx": 31}}"#).unwrap();
        assert_eq!((c.t_final, c.solver.nx, c.solver.nt), (1.0, 31, 32768));
        assert!(ScenarioConfig::from_json(r#"{"tua": 0.1}"#).is_err());
        assert!(ScenarioConfig::from_json(r#"{"solver": {"nz": 3}}"#).is_err());
        let bad = ScenarioConfig {
            t_switch: 0.06,
            ..ScenarioConfig::default()
        };
        assert!(bad.validate().unwrap_err().is_validation());
    }

    #[test]
    fn sample_grid_shape() {
        let mut c = small();
        let ts = c.sample_times();
        assert_eq!(ts[0], 0.0);
        assert_eq!(*ts.last().unwrap(), c.t_final);
        assert!(ts.contains(&c.tau));
        assert!(ts.windows(2).all(|w| w[1] > w[0]));
        c.sampling.align_to_solver = true;
        let aligned = c.sample_times();
        for t in c.solver.node_times(c.t_final) {
            assert!(aligned.binary_search_by(|p| p.total_cmp(&t)).is_ok());
        }
    }

    #[test]
    fn zero_state_gives_zero_schedule() {
        let sc = Scenario::with_theta0(small(), PiecewiseInitialCondition::zero()).unwrap();
        let syn = synthesize(&sc).unwrap();
        assert!(syn.schedule.values.iter().all(|u| *u == Complex64::new(0.0, 0.0)));
    }

    #[test]
    fn benchmark_schedule_ends_at_zero_and_is_continuous() {
        let sc = Scenario::new(small()).unwrap();
        let syn = synthesize(&sc).unwrap();
        let r = &syn.report;
        assert_eq!(r.u_final, Complex64::new(0.0, 0.0));
        assert!(r.seam_jump <= 1e-4 * r.max_abs_u, "{} vs {}", r.seam_jump, r.max_abs_u);
        assert!(r.tail_diagnostic <= 1e-4 * r.max_abs_u_phase2);
        assert_eq!(r.expansion_order_achieved, DEFAULT_ORDER);
        assert_eq!(syn.schedule.phases[0], 1);
        assert_eq!(*syn.schedule.phases.last().unwrap(), 2);
    }

    #[test]
    fn artifacts_round_trip_and_resimulate() {
        let dir = tempfile::tempdir().unwrap();
        let sc = Scenario::with_theta0(small(), PiecewiseInitialCondition::sine_mode(1, SQRT_2)).unwrap();
        let exp = run_experiment(&sc).unwrap();
        let path = dir.path().join(CONTROL_CSV);
        write_control_csv(&path, &exp.synthesis.schedule).unwrap();
        let back = read_control_csv(&path).unwrap();
        assert_eq!(back, exp.synthesis.schedule);
        let again = simulate_schedule(&sc, &back).unwrap();
        assert!((again.final_l2_error - exp.output.final_l2_error).abs() <= 1e-12);
        write_snapshots_csv(&dir.path().join(SNAPSHOTS_CSV), &exp.output.snapshots).unwrap();
        write_json(&dir.path().join(REPORT_JSON), &exp.report).unwrap();
        let text = fs::read_to_string(dir.path().join(REPORT_JSON)).unwrap();
        let parsed: ErrorReport = serde_json::from_str(&text).unwrap();
        assert_eq!(parsed.final_l2_error, exp.report.final_l2_error);
    }

    #[test]
    fn eigenmode_end_to_end() {
        let cfg = ScenarioConfig {
            solver: SolverConfig {
                nx: 255,
                nt: 4096,
                epsilon: Some(0.0),
                ..SolverConfig::default()
            },
            ..ScenarioConfig::default()
        };
        let sc = Scenario::with_theta0(cfg, PiecewiseInitialCondition::sine_mode(1, SQRT_2)).unwrap();
        let exp = run_experiment(&sc).unwrap();
        assert!(exp.report.final_l2_error <= 5e-3, "{}", exp.report.final_l2_error);
    }

    #[test]
    fn reruns_are_bitwise_identical() {
        let dir = tempfile::tempdir().unwrap();
        let sc = Scenario::new(small()).unwrap();
        let mut outputs = Vec::new();
        for k in 0..2 {
            let exp = run_experiment(&sc).unwrap();
            let c = dir.path().join(format!("c{k}.csv"));
            let f = dir.path().join(format!("s{k}.csv"));
            write_control_csv(&c, &exp.synthesis.schedule).unwrap();
            write_snapshots_csv(&f, &exp.output.snapshots).unwrap();
            outputs.push((fs::read(c).unwrap(), fs::read(f).unwrap()));
        }
        assert_eq!(outputs[0], outputs[1]);
    }

    #[test]
    fn float_format_has_seventeen_digits() {
        assert_eq!(fmt_f64(0.1), "1.0000000000000001e-1");
        for v in [1.0 / 3.0, -2.5e-300, 123456.789] {
            assert_eq!(fmt_f64(v).parse::<f64>().unwrap(), v);
        }
    }
}
