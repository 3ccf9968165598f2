//! Gevrey step function and the recursive computation of its scaled
//! derivatives `r^j φ_s^(j)(ρ) / (2j)!`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::ln_factorial;

/// Largest derivative order the coefficient tables support.
pub const MAX_ORDER: usize = 128;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GevreyStepParams {
    s: f64,
    m: f64,
    sigma: f64,
}

impl GevreyStepParams {
    pub fn new(s: f64, m: f64) -> Result<Self> {
        if !(s > 1.0 && s < 2.0) {
            return Err(Error::Validation(format!("Gevrey order must lie in (1, 2), got {s}")));
        }
        if !(m > 0.0) || !m.is_finite() {
            return Err(Error::Validation(format!("step sharpness M must be positive, got {m}")));
        }
        Ok(Self {
            s,
            m,
            sigma: 1.0 / (s - 1.0),
        })
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }
}

/// `φ_s(ρ)`: 1 for `ρ <= 0`, 0 for `ρ >= 1`, smooth and flat in between.
pub fn phi_step(params: &GevreyStepParams, rho: f64) -> f64 {
    if rho <= 0.0 {
        return 1.0;
    }
    if rho >= 1.0 {
        return 0.0;
    }
    let u = -params.m / rho.powf(params.sigma);
    let v = -params.m / (1.0 - rho).powf(params.sigma);
    1.0 / (1.0 + (u - v).exp())
}

/// Triangular coefficient tables for the scaled Leibniz recursions.
///
/// Both families are filled by their ratio recurrences: every factor is a
/// small rational, so there is no overflow and the rounding error grows only
/// linearly in `k`. [`leibniz_c_closed`] is kept as an independent check.
///
/// `c(j, k) = k (2j-2k)! (j-1)! / ((2j)! (j-k)!)` for `1 <= k <= j`, and
/// `d(j, k) = (2k)! (2j-2k)! j! / (k! (j-k)! (2j)!)` for `0 <= k <= j`.
#[derive(Debug, Clone)]
pub struct LeibnizTables {
    j_max: usize,
    c: Vec<Vec<f64>>,
    d: Vec<Vec<f64>>,
}

impl LeibnizTables {
    pub fn new(j_max: usize) -> Result<Self> {
        if j_max > MAX_ORDER {
            return Err(Error::Validation(format!(
                "derivative order {j_max} exceeds the supported maximum {MAX_ORDER}"
            )));
        }
        let c = (0..=j_max)
            .map(|j| (0..=j).map(|k| leibniz_c_recurrence(j, k)).collect())
            .collect();
        let d = (0..=j_max)
            .map(|j| {
                let mut row = Vec::with_capacity(j + 1);
                row.push(1.0);
                for k in 1..=j {
                    let prev = row[k - 1];
                    row.push(prev * (2 * k - 1) as f64 / (2 * j - 2 * k + 1) as f64);
                }
                row
            })
            .collect();
        Ok(Self { j_max, c, d })
    }

    pub fn j_max(&self) -> usize {
        self.j_max
    }

    pub fn c(&self, j: usize, k: usize) -> f64 {
        self.c[j][k]
    }

    pub fn d(&self, j: usize, k: usize) -> f64 {
        self.d[j][k]
    }
}

/// Closed form of `c(j, k)` evaluated through log-factorials. Zero when
/// `k == 0` or `k > j`.
pub fn leibniz_c_closed(j: usize, k: usize) -> f64 {
    if k == 0 || k > j {
        return 0.0;
    }
    let log = (k as f64).ln() + ln_factorial(2 * j - 2 * k) + ln_factorial(j - 1)
        - ln_factorial(2 * j)
        - ln_factorial(j - k);
    log.exp()
}

/// `c(j, k)` by the ratio recurrence `c(j, k+1) = (k+1) / (2k (2j-2k-1)) c(j, k)`
/// seeded with `c(j, 1) = 1 / (2j (2j-1))`.
pub fn leibniz_c_recurrence(j: usize, k: usize) -> f64 {
    if k == 0 || k > j {
        return 0.0;
    }
    let jf = j as f64;
    let mut c = 1.0 / (2.0 * jf * (2.0 * jf - 1.0));
    for i in 1..k {
        c *= (i + 1) as f64 / (2.0 * i as f64 * (2 * j - 2 * i - 1) as f64);
    }
    c
}

/// Scaled derivatives of `u = -M/ρ^σ`, `v = -M/(1-ρ)^σ`, `f = e^u`, `g = e^v`
/// and `φ_s = g/(f+g)` at one point.
///
/// `u_tilde[j] = r^j u^(j)/j!`, likewise `v_tilde`; `f_tilde[j] = r^j f^(j)/(2j)!`,
/// likewise `g_tilde` and `phi_tilde`. Very close to an endpoint the auxiliary
/// arrays can saturate to infinity; `phi_tilde` stays finite.
#[derive(Debug, Clone)]
pub struct ScaledDerivativeStack {
    pub rho: f64,
    pub r: f64,
    pub j_max: usize,
    pub u_tilde: Vec<f64>,
    pub v_tilde: Vec<f64>,
    pub f_tilde: Vec<f64>,
    pub g_tilde: Vec<f64>,
    pub phi_tilde: Vec<f64>,
}

pub fn phi_scaled_derivatives(
    params: &GevreyStepParams,
    rho: f64,
    r: f64,
    j_max: usize,
) -> Result<ScaledDerivativeStack> {
    let tables = LeibnizTables::new(j_max)?;
    phi_scaled_derivatives_with(&tables, params, rho, r, j_max)
}

/// Same as [`phi_scaled_derivatives`] with precomputed tables.
pub fn phi_scaled_derivatives_with(
    tables: &LeibnizTables,
    params: &GevreyStepParams,
    rho: f64,
    r: f64,
    j_max: usize,
) -> Result<ScaledDerivativeStack> {
    if !(rho > 0.0 && rho < 1.0) {
        return Err(Error::Domain(format!("scaled derivatives need rho in (0, 1), got {rho}")));
    }
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::Domain(format!("scaling radius must be positive, got {r}")));
    }
    if j_max > tables.j_max() {
        return Err(Error::Validation(format!(
            "tables built for order {} but {j_max} requested",
            tables.j_max()
        )));
    }

    // Run the recursion at a radius no larger than the distance to the
    // nearest pole of u or v, so the intermediate values stay O(1), then
    // rescale to the requested radius.
    let r_int = r.min(rho).min(1.0 - rho);
    let sigma = params.sigma;
    let n = j_max + 1;

    let mut u_t = vec![0.0; n];
    let mut v_t = vec![0.0; n];
    u_t[0] = -params.m / rho.powf(sigma);
    v_t[0] = -params.m / (1.0 - rho).powf(sigma);
    for j in 1..n {
        let grow = 1.0 + (sigma - 1.0) / j as f64;
        u_t[j] = -(r_int / rho) * grow * u_t[j - 1];
        v_t[j] = (r_int / (1.0 - rho)) * grow * v_t[j - 1];
    }

    let f_t = exp_series(tables, &u_t);
    let g_t = exp_series(tables, &v_t);

    // Quotient recursion for whichever of φ = g/(f+g) and 1 - φ = f/(f+g) is
    // the smaller one; on the other side the leading terms cancel.
    let phi0 = phi_step(params, rho);
    let complement = phi0 > 0.5;
    let num = if complement { &f_t } else { &g_t };
    let mut phi_t = vec![0.0; n];
    // 1 - φ = 1/(1 + e^{v-u}), formed directly rather than by subtraction.
    phi_t[0] = if complement { 1.0 / (1.0 + (v_t[0] - u_t[0]).exp()) } else { phi0 };
    let denom = f_t[0] + g_t[0];
    for j in 1..n {
        let mut acc = num[j];
        for k in 1..=j {
            acc -= tables.d(j, k) * (f_t[k] + g_t[k]) * phi_t[j - k];
        }
        phi_t[j] = acc / denom;
    }
    if complement {
        phi_t[0] = phi0;
        phi_t.iter_mut().skip(1).for_each(|v| *v = -*v);
    }

    let ln_ratio = (r / r_int).ln();
    Ok(ScaledDerivativeStack {
        rho,
        r,
        j_max,
        u_tilde: rescale(u_t, ln_ratio),
        v_tilde: rescale(v_t, ln_ratio),
        f_tilde: rescale(f_t, ln_ratio),
        g_tilde: rescale(g_t, ln_ratio),
        phi_tilde: rescale(phi_t, ln_ratio),
    })
}

fn exp_series(tables: &LeibnizTables, w: &[f64]) -> Vec<f64> {
    let n = w.len();
    let mut out = vec![0.0; n];
    out[0] = w[0].exp();
    if out[0] == 0.0 {
        return out;
    }
    for j in 1..n {
        out[j] = (1..=j).map(|k| tables.c(j, k) * w[k] * out[j - k]).sum();
    }
    out
}

fn rescale(mut values: Vec<f64>, ln_ratio: f64) -> Vec<f64> {
    if ln_ratio == 0.0 {
        return values;
    }
    for (j, v) in values.iter_mut().enumerate().skip(1) {
        if *v != 0.0 {
            *v = v.signum() * (v.abs().ln() + j as f64 * ln_ratio).exp();
        }
    }
    values
}
