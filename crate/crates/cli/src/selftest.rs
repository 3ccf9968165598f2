use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;
use schroflat::initial::PiecewiseInitialCondition;
use schroflat::phase2::{FlatnessConfig, Phase2};
use schroflat::sim::{simulate, ControlSchedule, SolverConfig};
use schroflat::{fourier, kernel, phase1, Result};

fn check(name: &str, ok: bool, detail: String, failures: &mut usize) {
    println!("{} {name}: {detail}", if ok { "PASS" } else { "FAIL" });
    if !ok {
        *failures += 1;
    }
}

/// Number of failed checks.
pub fn run() -> Result<usize> {
    let mut failures = 0;

    let (t, x) = (0.07, 0.4);
    let e = kernel::eval_e(t, x)?;
    let m = 1.0 / (4.0 * PI * t).sqrt();
    check("kernel modulus", (e.norm() - m).abs() < 1e-14, format!("{:.2e}", (e.norm() - m).abs()), &mut failures);

    let th = PiecewiseInitialCondition::benchmark();
    let t = 1e-3;
    let a = phase1::u_phase1_asymptotic(&th, t, phase1::DEFAULT_ORDER)?.value;
    let q = phase1::u_phase1_quadrature(&th, t, 1e-10)?;
    let d = (a - q).norm();
    check("asymptotics vs quadrature", d < 1e-7, format!("{d:.2e} at t = {t}"), &mut failures);

    let mode = fourier::theta_minus_mode(2, 0.05, 0.7)?;
    let quad = phase1::theta_minus_point(&PiecewiseInitialCondition::sine_mode(2, 1.0), 0.05, 0.7, 1e-12)?.value;
    let d = (mode - quad).norm();
    check("closed-form mode", d < 1e-9, format!("{d:.2e}"), &mut failures);

    let cfg = FlatnessConfig::default();
    let end = Phase2::new(&cfg)?.eval(&th, cfg.t_final)?;
    let worst = end.w.iter().map(|w| w.norm()).fold(end.u.norm(), f64::max);
    check("zero endpoint", worst == 0.0, format!("{worst:.2e}"), &mut failures);

    let solver = SolverConfig {
        nx: 127,
        nt: 512,
        epsilon: Some(0.0),
        ..SolverConfig::default()
    };
    let t_final = 0.1;
    let out = simulate(&PiecewiseInitialCondition::sine_mode(1, SQRT_2), &ControlSchedule::zero(t_final), &solver, &[])?;
    let phase = Complex64::cis(-PI * PI * t_final);
    let err = out
        .final_state
        .xs
        .iter()
        .zip(&out.final_state.values)
        .map(|(&x, v)| (v - phase * SQRT_2 * (PI * x).sin()).norm())
        .fold(0.0, f64::max);
    check("simulator eigenmode", err < 1e-2, format!("{err:.2e}"), &mut failures);

    Ok(failures)
}
