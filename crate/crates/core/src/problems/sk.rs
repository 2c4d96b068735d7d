//! Sherrington-Kirkpatrick spin glass.
//!
//! All-to-all couplings J_ij ~ N(0,1) for i < j, energy
//! N^{−1/2} Σ_{i<j} J_ij s_i s_j. Instances regenerate bit-identically from
//! (n, seed).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::scalar::Real;

use super::{check_qubit_cap, fill_energies, CostSpectrum, ProblemKind, QUBIT_CAP};

/// One draw of SK couplings. `couplings` stores J_ij for i < j in
/// lexicographic order of (i, j).
#[derive(Debug, Clone, PartialEq)]
pub struct SkInstance {
    n: usize,
    couplings: Vec<Real>,
    seed: i64,
}

impl SkInstance {
    /// Samples the n(n−1)/2 couplings from the standard normal distribution.
    pub fn generate(n: usize, seed: i64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidInput(format!(
                "SK needs at least 2 spins, got {n}"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed as u64);
        let couplings = (0..n * (n - 1) / 2)
            .map(|_| rng.sample(StandardNormal))
            .collect();
        Ok(Self { n, couplings, seed })
    }

    /// Builds an instance from explicit couplings (lexicographic i < j order).
    pub fn with_couplings(n: usize, couplings: Vec<Real>, seed: i64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidInput(format!(
                "SK needs at least 2 spins, got {n}"
            )));
        }
        if couplings.len() != n * (n - 1) / 2 {
            return Err(Error::DimensionMismatch(format!(
                "expected {} couplings for n={}, got {}",
                n * (n - 1) / 2,
                n,
                couplings.len()
            )));
        }
        Ok(Self { n, couplings, seed })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn seed(&self) -> i64 {
        self.seed
    }

    /// J_ij for i < j.
    #[inline]
    pub fn coupling(&self, i: usize, j: usize) -> Real {
        debug_assert!(i < j && j < self.n);
        self.couplings[i * self.n - i * (i + 1) / 2 + (j - i - 1)]
    }

    /// Energy of a basis-state index, summed in fixed (i, j) order.
    #[inline]
    pub(crate) fn energy_of_index(&self, index: u64) -> Real {
        let norm = 1.0 / (self.n as Real).sqrt();
        let mut total = 0.0;
        let mut flat = 0;
        for i in 0..self.n {
            let s_i = 1 - 2 * ((index >> i) & 1) as i64;
            for j in i + 1..self.n {
                let s_j = 1 - 2 * ((index >> j) & 1) as i64;
                total += self.couplings[flat] * (s_i * s_j) as Real;
                flat += 1;
            }
        }
        norm * total
    }
}

/// Energy N^{−1/2} Σ_{i<j} J_ij s_i s_j of a ±1 configuration.
pub fn sk_energy(instance: &SkInstance, spins: &[i8]) -> Result<Real> {
    if spins.len() != instance.n {
        return Err(Error::DimensionMismatch(format!(
            "instance has {} spins, got {}",
            instance.n,
            spins.len()
        )));
    }
    if let Some(bad) = spins.iter().position(|s| *s != 1 && *s != -1) {
        return Err(Error::InvalidInput(format!(
            "spin at position {bad} is {}, expected +1 or -1",
            spins[bad]
        )));
    }
    let norm = 1.0 / (instance.n as Real).sqrt();
    let mut total = 0.0;
    let mut flat = 0;
    for i in 0..instance.n {
        for j in i + 1..instance.n {
            total += instance.couplings[flat] * Real::from(spins[i] * spins[j]);
            flat += 1;
        }
    }
    Ok(norm * total)
}

/// Dense SK spectrum, deterministic in (n, seed).
pub fn build_sk_spectrum(n: usize, seed: i64) -> Result<CostSpectrum> {
    build_sk_spectrum_with_cap(n, seed, QUBIT_CAP)
}

/// As [`build_sk_spectrum`] with an explicit qubit cap.
pub fn build_sk_spectrum_with_cap(n: usize, seed: i64, cap: usize) -> Result<CostSpectrum> {
    check_qubit_cap(n, cap, "SK")?;
    let instance = SkInstance::generate(n, seed)?;
    let energies = fill_energies(n, |x| instance.energy_of_index(x));
    CostSpectrum::from_energies(n, energies, ProblemKind::SherringtonKirkpatrick, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::spins_of_index;

    #[test]
    fn single_coupling() {
        let inst = SkInstance::with_couplings(2, vec![1.0], 0).unwrap();
        let e = sk_energy(&inst, &[1, -1]).unwrap();
        assert!((e + 1.0 / (2.0 as Real).sqrt()).abs() < 1e-15);
        assert!((e + 0.70711).abs() < 1e-5);
    }

    #[test]
    fn global_flip_symmetry() {
        let inst = SkInstance::generate(7, 42).unwrap();
        for x in [0u64, 1, 17, 99, 127] {
            let s = spins_of_index(x, 7);
            let flipped: Vec<i8> = s.iter().map(|v| -v).collect();
            assert_eq!(
                sk_energy(&inst, &s).unwrap().to_bits(),
                sk_energy(&inst, &flipped).unwrap().to_bits()
            );
        }
    }

    #[test]
    fn length_mismatch_rejected() {
        let inst = SkInstance::generate(4, 0).unwrap();
        assert!(sk_energy(&inst, &[1, 1, -1]).is_err());
        assert!(sk_energy(&inst, &[1, 1, -1, 0]).is_err());
    }

    #[test]
    fn spectrum_minimum_matches_enumeration() {
        for (n, seed) in [(4usize, 0i64), (10, 7)] {
            let inst = SkInstance::generate(n, seed).unwrap();
            let spectrum = build_sk_spectrum(n, seed).unwrap();
            let mut e_min = Real::INFINITY;
            for x in 0..1u64 << n {
                let e = sk_energy(&inst, &spins_of_index(x, n)).unwrap();
                e_min = e_min.min(e);
            }
            assert_eq!(spectrum.e_min(), e_min, "n={n} seed={seed}");
        }
    }

    #[test]
    fn ground_set_closed_under_complement() {
        let spectrum = build_sk_spectrum(8, 3).unwrap();
        let mask = (1usize << 8) - 1;
        let ground = spectrum.ground_set();
        assert_eq!(ground.len() % 2, 0);
        for &x in ground {
            assert!(ground.contains(&(!x & mask)), "complement of {x} missing");
        }
    }

    #[test]
    fn zero_mean_spectrum() {
        for seed in 0..4 {
            let spectrum = build_sk_spectrum(9, seed).unwrap();
            let mean: Real =
                spectrum.energies().iter().sum::<Real>() / spectrum.num_states() as Real;
            assert!(mean.abs() < 1e-9, "seed={seed} mean={mean}");
        }
    }

    #[test]
    fn bit_identical_regeneration() {
        let a = build_sk_spectrum(6, 12345).unwrap();
        let b = build_sk_spectrum(6, 12345).unwrap();
        assert_eq!(a, b);
        for (x, y) in a.energies().iter().zip(b.energies()) {
            assert_eq!(x.to_bits(), y.to_bits());
        }
    }

    #[test]
    fn coupling_indexing() {
        let inst = SkInstance::generate(5, 9).unwrap();
        let mut flat = 0;
        for i in 0..5 {
            for j in i + 1..5 {
                assert_eq!(inst.coupling(i, j), inst.couplings[flat]);
                flat += 1;
            }
        }
    }
}
