use schroflat::fourier::{sine_coefficients, tail_error_bound, fit_m_const, truncated_control_upto, PowerLawTail};
use schroflat::initial::PiecewiseInitialCondition;
use schroflat::phase1::{theta_minus_field, u_phase1_quadrature};
use schroflat::scenario::{fourier_analysis, spectral_check, ControlMode, Scenario, ScenarioConfig};

#[test]
fn spectral_control_within_certificate() {
    let cfg = ScenarioConfig {
        mode: ControlMode::Spectral,
        ..ScenarioConfig::default()
    };
    let sc = Scenario::new(cfg).unwrap();
    let (coeffs, report) = fourier_analysis(&sc).unwrap();
    let check = spectral_check(&sc, &coeffs, report.tail.bound, 24).unwrap();
    assert!(check.max_diff <= check.certificate + 1e-6, "{check:?}");
}

#[test]
fn truncation_agrees_with_quadrature_at_small_time() {
    let th = PiecewiseInitialCondition::benchmark();
    let (n_bar, horizon) = (2048, 4096);
    let sc = sine_coefficients(&th, horizon).unwrap();
    let t = 0.01;
    let tail: Vec<f64> = sc.c[n_bar..].iter().map(|c| c.norm()).collect();
    let model = PowerLawTail::fit(&sc, n_bar, horizon).ok();
    let m = fit_m_const(t, n_bar as u32, 257).unwrap();
    let bound = tail_error_bound(&tail, n_bar, m, model).unwrap().bound;
    let q = u_phase1_quadrature(&th, t, 1e-10).unwrap();
    let f = truncated_control_upto(&sc, n_bar, t, 1.0).unwrap();
    assert!((q - f).norm() <= bound + 1e-8, "{:e} vs {bound:e}", (q - f).norm());
}

#[test]
fn certificate_dominates_gap_at_tau() {
    let th = PiecewiseInitialCondition::benchmark();
    let (n_bar, horizon, tau) = (2048, 4096, 0.05);
    let sc = sine_coefficients(&th, horizon).unwrap();
    let tail: Vec<f64> = sc.c[n_bar..].iter().map(|c| c.norm()).collect();
    let model = PowerLawTail::fit(&sc, n_bar, horizon).ok();
    let bound = tail_error_bound(&tail, n_bar, fit_m_const(tau, n_bar as u32, 257).unwrap(), model).unwrap().bound;
    let xs: Vec<f64> = (0..512).map(|k| k as f64 / 511.0).collect();
    let free = theta_minus_field(&th, tau, &xs, 1e-10).unwrap();
    let gap = xs
        .iter()
        .zip(&free.values)
        .map(|(&x, v)| (truncated_control_upto(&sc, n_bar, tau, x).unwrap() - v).norm())
        .fold(0.0, f64::max);
    assert!(gap <= bound, "gap {gap:e}, bound {bound:e}");
}

#[test]
fn truncation_converges_in_l2() {
    let th = PiecewiseInitialCondition::benchmark();
    let sc = sine_coefficients(&th, 2048).unwrap();
    let t = 0.05;
    let xs: Vec<f64> = (0..=256).map(|k| k as f64 / 256.0).collect();
    let free = theta_minus_field(&th, t, &xs, 1e-10).unwrap();
    let dist = |n: usize| {
        let d: Vec<f64> = xs
            .iter()
            .zip(&free.values)
            .map(|(&x, v)| (truncated_control_upto(&sc, n, t, x).unwrap() - v).norm_sqr())
            .collect();
        (d.windows(2).map(|w| 0.5 * (w[0] + w[1])).sum::<f64>() / 256.0).sqrt()
    };
    let ds: Vec<f64> = [64, 128, 256, 512, 1024, 2048].iter().map(|&n| dist(n)).collect();
    assert!(ds.windows(2).all(|w| w[1] < w[0]), "{ds:?}");
}
