//! Low Autocorrelation Binary Sequences.
//!
//! For a ±1 sequence s of length N the aperiodic autocorrelations are
//! C_k(s) = Σ_{i=1}^{N−k} s_i s_{i+k}, the energy is Σ_{k=1}^{N−1} C_k², and
//! the merit factor is N²/(2E). There is a single instance per N.

use crate::error::{Error, Result};
use crate::scalar::Real;

use super::{check_qubit_cap, fill_energies, CostSpectrum, ProblemKind, QUBIT_CAP};

/// Sidelobe energy Σ_{k=1}^{N−1} C_k(s)² of a ±1 sequence. Integer-exact.
pub fn labs_energy(spins: &[i8]) -> Result<i64> {
    let n = spins.len();
    if n < 2 {
        return Err(Error::InvalidInput(format!(
            "LABS needs at least 2 spins, got {n}"
        )));
    }
    if let Some(bad) = spins.iter().position(|s| *s != 1 && *s != -1) {
        return Err(Error::InvalidInput(format!(
            "spin at position {bad} is {}, expected +1 or -1",
            spins[bad]
        )));
    }
    let mut energy = 0i64;
    for k in 1..n {
        let c_k: i64 = (0..n - k).map(|i| (spins[i] * spins[i + k]) as i64).sum();
        energy += c_k * c_k;
    }
    Ok(energy)
}

/// Merit factor N²/(2·E(s)).
pub fn labs_merit_factor(spins: &[i8]) -> Result<Real> {
    let energy = labs_energy(spins)?;
    if energy == 0 {
        // Unreachable for N ≥ 2: C_{N−1} = s_1 s_N = ±1.
        return Err(Error::DivisionByZero("LABS energy is zero".into()));
    }
    let n = spins.len() as Real;
    Ok(n * n / (2.0 * energy as Real))
}

/// LABS energy of a basis-state index under the bit→spin convention.
///
/// Uses s_i s_{i+k} = 1 − 2(b_i ⊕ b_{i+k}), so each C_k is a masked popcount.
#[inline]
pub(crate) fn labs_energy_of_index(index: u64, n: usize) -> i64 {
    let mut energy = 0i64;
    for k in 1..n {
        let len = (n - k) as i64;
        let mask = (1u64 << (n - k)) - 1;
        let disagreements = ((index ^ (index >> k)) & mask).count_ones() as i64;
        let c_k = len - 2 * disagreements;
        energy += c_k * c_k;
    }
    energy
}

/// Dense LABS spectrum for the single instance of size `n` (2 ≤ n ≤ 20).
pub fn build_labs_spectrum(n: usize) -> Result<CostSpectrum> {
    build_labs_spectrum_with_cap(n, QUBIT_CAP)
}

/// As [`build_labs_spectrum`] with an explicit qubit cap.
pub fn build_labs_spectrum_with_cap(n: usize, cap: usize) -> Result<CostSpectrum> {
    if n < 2 {
        return Err(Error::InvalidInput(format!(
            "LABS needs at least 2 spins, got {n}"
        )));
    }
    check_qubit_cap(n, cap, "LABS")?;
    let energies = fill_energies(n, |x| labs_energy_of_index(x, n) as Real);
    CostSpectrum::from_energies(n, energies, ProblemKind::Labs, 0)
}
