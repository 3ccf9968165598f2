//! Explicit null control of the 1D Schrödinger equation
//!
//! ```text
//! i θ_t + θ_xx = 0  on (0,T)×(0,1),   θ(t,0) = 0,   θ(t,1) = u(t),   θ(0,·) = θ₀
//! ```
//!
//! by a two-phase boundary control: the free dispersive evolution of the odd
//! extension of `θ₀` up to an intermediate time `τ`, then a flatness-based
//! series built from the flat output `θ_x(t,0)` multiplied by a Gevrey step.
//!
//! Modules:
//! - [`kernel`]: the fundamental solution, Hermite polynomials, log-Gamma.
//! - [`gevrey`]: the Gevrey step and its scaled derivative recursion.
//! - [`initial`]: piecewise initial conditions and their endpoint expansions.
//! - [`quad`]: adaptive Gauss–Kronrod quadrature for complex integrands.
//! - [`phase1`]: first-phase control by quadrature or by endpoint asymptotics.
//! - [`phase2`]: second-phase control from the truncated flatness series.
//! - [`fourier`]: sine-series variant of the first phase.
//! - [`sim`]: Crank–Nicolson verification simulator.
//! - [`scenario`]: configuration, control synthesis and end-to-end runs.

pub mod error;
pub mod fourier;
pub mod gevrey;
pub mod initial;
pub mod kernel;
pub mod phase1;
pub mod phase2;
pub mod quad;
pub mod scenario;
pub mod sim;

pub use error::{Error, Result};

/// Complex scalar used throughout.
pub type ComplexAmplitude = num_complex::Complex64;
