//! Cardinality-constrained binary portfolio selection.
//!
//! Minimize q·xᵀΣx − μᵀx over x ∈ {0,1}^n subject to Σx_i = K. The
//! constraint is folded into the spectrum as a quadratic penalty
//! λ·(Σx_i − K)², which vanishes exactly on feasible states.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::scalar::Real;

use super::{check_qubit_cap, fill_energies, CostSpectrum, ProblemKind, QUBIT_CAP};

/// One synthetic portfolio universe: covariance Σ, expected returns μ,
/// risk trade-off q, cardinality K, and penalty weight λ.
#[derive(Debug, Clone, PartialEq)]
pub struct PortfolioInstance {
    n: usize,
    covariance: Vec<Real>,
    expected_returns: Vec<Real>,
    risk_tradeoff: Real,
    cardinality: usize,
    penalty_weight: Real,
    seed: i64,
}

impl PortfolioInstance {
    /// Builds an instance from explicit data, validating symmetry (1e-12),
    /// positive semi-definiteness (smallest eigenvalue ≥ −1e-9), the
    /// cardinality range and λ > 0.
    pub fn new(
        covariance: Vec<Real>,
        expected_returns: Vec<Real>,
        risk_tradeoff: Real,
        cardinality: usize,
        penalty_weight: Real,
        seed: i64,
    ) -> Result<Self> {
        let n = expected_returns.len();
        if n < 2 {
            return Err(Error::InvalidInput(format!(
                "portfolio needs at least 2 assets, got {n}"
            )));
        }
        if covariance.len() != n * n {
            return Err(Error::DimensionMismatch(format!(
                "covariance must be {n}x{n}, got {} entries",
                covariance.len()
            )));
        }
        for i in 0..n {
            for j in i + 1..n {
                if (covariance[i * n + j] - covariance[j * n + i]).abs() > 1e-12 {
                    return Err(Error::InvalidInput(format!(
                        "covariance not symmetric at ({i},{j})"
                    )));
                }
            }
        }
        let sigma = DMatrix::from_row_slice(n, n, &covariance);
        let min_eig = sigma
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .copied()
            .fold(Real::INFINITY, Real::min);
        if min_eig < -1e-9 {
            return Err(Error::InvalidInput(format!(
                "covariance not PSD: smallest eigenvalue {min_eig:e}"
            )));
        }
        if cardinality == 0 || cardinality > n {
            return Err(Error::InvalidInput(format!(
                "cardinality {cardinality} outside 1..={n}"
            )));
        }
        if !(penalty_weight > 0.0) {
            return Err(Error::InvalidInput(format!(
                "penalty weight must be positive, got {penalty_weight}"
            )));
        }
        Ok(Self {
            n,
            covariance,
            expected_returns,
            risk_tradeoff,
            cardinality,
            penalty_weight,
            seed,
        })
    }

    /// Synthetic instance, deterministic in (n, seed, q, K).
    ///
    /// μ_i is uniform on [0, 0.1); Σ = B·Bᵀ/f rescaled to unit mean diagonal
    /// with B an n×f standard-normal matrix, f = ⌈n/2⌉. The penalty weight
    /// defaults to 2·(max|μ_i| + q·n·max_i Σ_ii).
    pub fn generate(n: usize, seed: i64, risk_tradeoff: Real, cardinality: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidInput(format!(
                "portfolio needs at least 2 assets, got {n}"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed as u64);
        let expected_returns: Vec<Real> = (0..n).map(|_| rng.random::<Real>() * 0.1).collect();
        let f = n.div_ceil(2);
        let factors: Vec<Real> = (0..n * f).map(|_| rng.sample(StandardNormal)).collect();
        let mut covariance = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                let mut dot = 0.0;
                for k in 0..f {
                    dot += factors[i * f + k] * factors[j * f + k];
                }
                covariance[i * n + j] = dot / f as Real;
            }
        }
        let mean_diag: Real = (0..n).map(|i| covariance[i * n + i]).sum::<Real>() / n as Real;
        for v in &mut covariance {
            *v /= mean_diag;
        }
        let max_mu = expected_returns.iter().fold(0.0, |m: Real, v| m.max(v.abs()));
        let max_diag = (0..n).fold(0.0, |m: Real, i| m.max(covariance[i * n + i]));
        let penalty_weight = 2.0 * (max_mu + risk_tradeoff * max_diag * n as Real);
        Self::new(
            covariance,
            expected_returns,
            risk_tradeoff,
            cardinality,
            penalty_weight,
            seed,
        )
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn cardinality(&self) -> usize {
        self.cardinality
    }

    pub fn penalty_weight(&self) -> Real {
        self.penalty_weight
    }

    pub fn seed(&self) -> i64 {
        self.seed
    }

    /// A copy of the instance with a different penalty weight.
    pub fn with_penalty_weight(&self, penalty_weight: Real) -> Result<Self> {
        Self::new(
            self.covariance.clone(),
            self.expected_returns.clone(),
            self.risk_tradeoff,
            self.cardinality,
            penalty_weight,
            self.seed,
        )
    }

    /// q·xᵀΣx − μᵀx without the penalty term; selection x is the bit set of
    /// `index`.
    pub fn objective(&self, index: u64) -> Real {
        let selected: Vec<usize> = (0..self.n).filter(|i| (index >> i) & 1 == 1).collect();
        let mut risk = 0.0;
        for &i in &selected {
            for &j in &selected {
                risk += self.covariance[i * self.n + j];
            }
        }
        let ret: Real = selected.iter().map(|&i| self.expected_returns[i]).sum();
        self.risk_tradeoff * risk - ret
    }

    /// Penalized energy q·xᵀΣx − μᵀx + λ·(Σx_i − K)².
    pub fn energy(&self, index: u64) -> Real {
        let count = (index & ((1u64 << self.n) - 1)).count_ones() as i64;
        let violation = (count - self.cardinality as i64) as Real;
        self.objective(index) + self.penalty_weight * violation * violation
    }
}

/// Dense penalized spectrum of a portfolio instance.
pub fn build_portfolio_spectrum(instance: &PortfolioInstance) -> Result<CostSpectrum> {
    build_portfolio_spectrum_with_cap(instance, QUBIT_CAP)
}

/// As [`build_portfolio_spectrum`] with an explicit qubit cap.
pub fn build_portfolio_spectrum_with_cap(
    instance: &PortfolioInstance,
    cap: usize,
) -> Result<CostSpectrum> {
    check_qubit_cap(instance.n, cap, "portfolio")?;
    let energies = fill_energies(instance.n, |x| instance.energy(x));
    CostSpectrum::from_energies(instance.n, energies, ProblemKind::Portfolio, instance.seed)
}
