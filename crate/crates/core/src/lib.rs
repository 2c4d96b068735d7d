//! QAOA parameter schedules from small sets of basis coefficients.
//!
//! The crate builds schedules for the Quantum Approximate Optimization
//! Algorithm by expressing the angle sequences (γ_1..γ_p, β_1..β_p) as
//! truncated expansions in orthogonal function families on the unit
//! interval, then optimizing the leading expansion coefficients while the
//! circuit depth grows. It ships with:
//!
//! - [`problems`]: diagonal cost spectra for LABS, the Sherrington-Kirkpatrick
//!   model, and cardinality-constrained portfolio selection, with brute-force
//!   ground-state oracles,
//! - [`simulator`]: an exact statevector QAOA simulator for diagonal cost
//!   Hamiltonians with a transverse-field mixer,
//! - [`basis`] / [`schedule`]: Chebyshev, Legendre and half-wave Fourier
//!   parameterizations with coefficient ↔ angle conversion and depth
//!   interpolation,
//! - [`engine`]: the iterative-interpolation optimizer plus Fourier (Δp = 1)
//!   and linear-ramp baselines, with exact evaluation accounting,
//! - [`metrics`]: approximation ratio, time-to-solution, depth thresholds and
//!   power-law/exponential scaling fits.
//!
//! Scalar-generic numerics (basis evaluation, least squares, the simplex
//! optimizer, scaling fits) accept any [`Scalar`]; the simulator and spectra
//! are fixed to double precision ([`Real`]).

pub mod basis;
pub mod engine;
pub mod error;
pub mod lstsq;
pub mod metrics;
pub mod optimize;
pub mod problems;
pub mod scalar;
pub mod schedule;
pub mod simulator;

pub use error::{Error, Result};
pub use scalar::{Real, Scalar};

/// Complex amplitude type used by the statevector simulator.
pub type Amplitude = num_complex::Complex<Real>;

/// Default cap on qubit count for dense spectra and statevectors (memory: 2^N).
pub const DEFAULT_QUBIT_CAP: usize = 20;
