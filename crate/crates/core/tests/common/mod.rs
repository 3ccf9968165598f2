//! Independent oracles shared by the integration tests. Nothing here calls
//! into the code paths it is used to check.
#![allow(dead_code)]

use num_complex::Complex64;

/// Truncated Taylor series `Σ a_k h^k` with f64 coefficients.
#[derive(Clone, Debug)]
pub struct Taylor(pub Vec<f64>);

impl Taylor {
    /// `(x0 + sign*h)^p` around `x0 > 0`.
    pub fn power(x0: f64, sign: f64, p: f64, n: usize) -> Self {
        let mut out = vec![0.0; n];
        let mut binom = 1.0;
        for (k, slot) in out.iter_mut().enumerate() {
            if k > 0 {
                binom *= (p - (k - 1) as f64) / k as f64;
            }
            *slot = x0.powf(p) * binom * (sign / x0).powi(k as i32);
        }
        Taylor(out)
    }

    pub fn scale(mut self, a: f64) -> Self {
        self.0.iter_mut().for_each(|v| *v *= a);
        self
    }

    pub fn exp(&self) -> Self {
        let n = self.0.len();
        let a = &self.0;
        let mut b = vec![0.0; n];
        b[0] = a[0].exp();
        for k in 1..n {
            let s: f64 = (1..=k).map(|m| m as f64 * a[m] * b[k - m]).sum();
            b[k] = s / k as f64;
        }
        Taylor(b)
    }

    pub fn add(&self, other: &Self) -> Self {
        Taylor(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn div(&self, den: &Self) -> Self {
        let n = self.0.len();
        let mut q = vec![0.0; n];
        for k in 0..n {
            let s: f64 = (1..=k).map(|m| den.0[m] * q[k - m]).sum();
            q[k] = (self.0[k] - s) / den.0[0];
        }
        Taylor(q)
    }

    /// `j`-th derivative at the expansion point.
    pub fn derivative(&self, j: usize) -> f64 {
        self.0[j] * (1..=j).map(|i| i as f64).product::<f64>()
    }
}

/// Derivatives `φ_s^(j)(ρ)`, `j = 0..=n-1`, by Taylor-mode automatic
/// differentiation of `e^v / (e^u + e^v)` with `u = -M ρ^-σ`, `v = -M (1-ρ)^-σ`.
pub fn gevrey_step_derivatives(s: f64, m: f64, rho: f64, n: usize) -> Vec<f64> {
    let sigma = 1.0 / (s - 1.0);
    let u = Taylor::power(rho, 1.0, -sigma, n).scale(-m);
    let v = Taylor::power(1.0 - rho, -1.0, -sigma, n).scale(-m);
    let f = u.exp();
    let g = v.exp();
    let phi = g.div(&f.add(&g));
    (0..n).map(|j| phi.derivative(j)).collect()
}

pub const RHOS: [f64; 5] = [0.1, 0.3, 0.5, 0.7, 0.9];

// 60-digit numerical differentiation of the closed form. Entries that vanish
// by the odd symmetry of φ_s - 1/2 about ρ = 1/2 are stored as exact zeros.
#[rustfmt::skip]
pub const MP_DERIVATIVES: [[f64; 13]; 5] = [
    [9.9999999878875872e-1, -3.7314699291374285e-7, -1.0594146453694612e-4, -2.7392788823883744e-2, -6.3457884913514603, -1.2856835823368597e+3, -2.1901213758112547e+5, -2.9061808184080847e+7, -2.4340452007871681e+9, 8.6324615478688831e+9, 3.2815923816998806e+13, 2.2903496028191184e+15, -5.2861236813087708e+17],
    [9.5834692881399712e-1, -9.5768087966108064e-1, -1.4563716461600381e+1, -7.0874702341903804e+1, 1.9159171559571739e+3, 1.4246641933040158e+4, -7.1848387506834117e+5, 1.6408005654696776e+6, 3.2278688221518944e+8, -4.0298433501609614e+9, -6.3231963775822433e+10, -5.1857759293192616e+12, 3.6004251841747946e+14],
    [5.0e-1, -3.0763432974453854, 0.0, 1.3045228283361055e+2, 0.0, -2.8150932779135898e+3, 0.0, -4.9626477444174585e+6, 0.0, 2.1323956775954707e+9, 0.0, 5.9908776524160567e+11, 0.0],
    [4.1653071186002875e-2, -9.5768087966108064e-1, 1.4563716461600381e+1, -7.0874702341903804e+1, -1.9159171559571739e+3, 1.4246641933040158e+4, 7.1848387506834117e+5, 1.6408005654696776e+6, -3.2278688221518944e+8, -4.0298433501609614e+9, 6.3231963775822433e+10, -5.1857759293192616e+12, -3.6004251841747946e+14],
    [1.2112412829638718e-9, -3.7314699291374285e-7, 1.0594146453694612e-4, -2.7392788823883744e-2, 6.3457884913514603, -1.2856835823368597e+3, 2.1901213758112547e+5, -2.9061808184080847e+7, 2.4340452007871681e+9, 8.6324615478688831e+9, -3.2815923816998806e+13, 2.2903496028191184e+15, 5.2861236813087708e+17],
];

/// Relative error, except where the reference is an exact symmetry zero:
/// there the error is measured against the largest reference of that order.
pub fn scaled_error(value: f64, reference: f64, order_scale: f64) -> f64 {
    if reference == 0.0 {
        value.abs() / order_scale
    } else {
        (value - reference).abs() / reference.abs()
    }
}

pub fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

/// Composite Gauss–Legendre (20 points per panel) for smooth complex
/// integrands; deliberately unrelated to the adaptive Kronrod code.
pub fn gauss_legendre<F: Fn(f64) -> Complex64>(f: F, a: f64, b: f64, panels: usize) -> Complex64 {
    const X: [f64; 10] = [
        0.076_526_521_133_497_33,
        0.227_785_851_141_645_08,
        0.373_706_088_715_419_56,
        0.510_867_001_950_827_1,
        0.636_053_680_726_515,
        0.746_331_906_460_150_8,
        0.839_116_971_822_218_8,
        0.912_234_428_251_326,
        0.963_971_927_277_913_8,
        0.993_128_599_185_094_9,
    ];
    const W: [f64; 10] = [
        0.152_753_387_130_725_85,
        0.149_172_986_472_603_75,
        0.142_096_109_318_382_05,
        0.131_688_638_449_176_63,
        0.118_194_531_961_518_42,
        0.101_930_119_817_240_44,
        0.083_276_741_576_704_75,
        0.062_672_048_334_109_06,
        0.040_601_429_800_386_94,
        0.017_614_007_139_152_12,
    ];
    let h = (b - a) / panels as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    for p in 0..panels {
        let c = a + (p as f64 + 0.5) * h;
        let r = 0.5 * h;
        for i in 0..10 {
            acc += W[i] * r * (f(c - r * X[i]) + f(c + r * X[i]));
        }
    }
    acc
}

/// Finite-difference weights for the `m`-th derivative at `x0` on `nodes`
/// (Fornberg's algorithm).
pub fn fd_weights(x0: f64, nodes: &[f64], m: usize) -> Vec<f64> {
    let n = nodes.len();
    let mut c = vec![vec![0.0; m + 1]; n];
    let mut c1 = 1.0;
    let mut c4 = nodes[0] - x0;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = nodes[i] - x0;
        for j in 0..i {
            let c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.iter().map(|row| row[m]).collect()
}

/// `m`-th derivative by a centred `2p+1` point stencil of spacing `h`.
pub fn central_derivative<F: Fn(f64) -> Complex64>(f: F, x0: f64, h: f64, m: usize, p: usize) -> Complex64 {
    let nodes: Vec<f64> = (-(p as i64)..=p as i64).map(|k| x0 + k as f64 * h).collect();
    let w = fd_weights(x0, &nodes, m);
    nodes.iter().zip(&w).map(|(&x, &wk)| f(x) * wk).sum()
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(pts: &[(f64, f64)]) -> f64 {
    let l: Vec<(f64, f64)> = pts.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let n = l.len() as f64;
    let mx = l.iter().map(|p| p.0).sum::<f64>() / n;
    let my = l.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = l.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = l.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

