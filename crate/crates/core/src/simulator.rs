//! Exact statevector QAOA execution against a diagonal cost spectrum.
//!
//! The state after p layers is ∏_j e^{−iβ_j H_B} e^{−iγ_j H_C} |+⟩^⊗N with
//! H_C diagonal (the spectrum) and H_B = Σ_i X_i. Phase layers multiply each
//! amplitude by e^{−iγE_x}; mixer layers sweep one single-qubit X rotation
//! per qubit, costing N·2^N per layer instead of a dense 2^N×2^N product.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::problems::CostSpectrum;
use crate::scalar::Real;
use crate::schedule::Schedule;
use crate::Amplitude;

/// 2^N complex amplitudes; unitary layers keep the norm at 1 up to rounding.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amplitudes: Vec<Amplitude>,
}

impl StateVector {
    /// Wraps raw amplitudes (must be exactly 2^num_qubits of them).
    pub fn from_amplitudes(num_qubits: usize, amplitudes: Vec<Amplitude>) -> Result<Self> {
        if num_qubits == 0 || amplitudes.len() != 1usize << num_qubits {
            return Err(Error::DimensionMismatch(format!(
                "expected 2^{} amplitudes, got {}",
                num_qubits,
                amplitudes.len()
            )));
        }
        Ok(Self {
            num_qubits,
            amplitudes,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Amplitude] {
        &self.amplitudes
    }

    /// Σ_x |a_x|², summed pairwise for reproducible, well-conditioned totals.
    pub fn norm_sqr(&self) -> Real {
        pairwise_sum(0, self.amplitudes.len(), &|x| self.amplitudes[x].norm_sqr())
    }

    /// Multiplies each amplitude by e^{−iγE_x}. Norm is unchanged.
    pub fn apply_phase(&mut self, spectrum: &CostSpectrum, gamma: Real) -> Result<()> {
        if spectrum.num_qubits() != self.num_qubits {
            return Err(Error::DimensionMismatch(format!(
                "state has {} qubits, spectrum {}",
                self.num_qubits,
                spectrum.num_qubits()
            )));
        }
        let energies = spectrum.energies();
        for (amp, &e) in self.amplitudes.iter_mut().zip(energies) {
            let (sin, cos) = (-gamma * e).sin_cos();
            *amp *= Amplitude::new(cos, sin);
        }
        Ok(())
    }

    /// Applies ⊗_i e^{−iβX_i} as N single-qubit sweeps.
    pub fn apply_mixer(&mut self, beta: Real) {
        let (sin, cos) = beta.sin_cos();
        for qubit in 0..self.num_qubits {
            let stride = 1usize << qubit;
            for block in self.amplitudes.chunks_exact_mut(2 * stride) {
                let (lows, highs) = block.split_at_mut(stride);
                for (a0, a1) in lows.iter_mut().zip(highs) {
                    // (a0, a1) -> (cosβ·a0 − i·sinβ·a1, −i·sinβ·a0 + cosβ·a1)
                    let next0 =
                        Amplitude::new(cos * a0.re + sin * a1.im, cos * a0.im - sin * a1.re);
                    let next1 =
                        Amplitude::new(sin * a0.im + cos * a1.re, cos * a1.im - sin * a0.re);
                    *a0 = next0;
                    *a1 = next1;
                }
            }
        }
    }

    /// Debug dump: N as u32, then 2^N (re, im) pairs, little-endian doubles.
    pub fn write_binary(&self, path: &Path) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        w.write_all(&(self.num_qubits as u32).to_le_bytes())?;
        for a in &self.amplitudes {
            w.write_all(&a.re.to_le_bytes())?;
            w.write_all(&a.im.to_le_bytes())?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads a dump produced by [`StateVector::write_binary`].
    pub fn read_binary(path: &Path) -> Result<Self> {
        let mut r = BufReader::new(File::open(path)?);
        let mut word = [0u8; 4];
        r.read_exact(&mut word)?;
        let num_qubits = u32::from_le_bytes(word) as usize;
        if num_qubits == 0 || num_qubits > 63 {
            return Err(Error::Parse(format!("implausible qubit count {num_qubits}")));
        }
        let mut buf = [0u8; 8];
        let mut amplitudes = Vec::with_capacity(1usize << num_qubits);
        for _ in 0..1usize << num_qubits {
            r.read_exact(&mut buf)?;
            let re = Real::from_le_bytes(buf);
            r.read_exact(&mut buf)?;
            let im = Real::from_le_bytes(buf);
            amplitudes.push(Amplitude::new(re, im));
        }
        Self::from_amplitudes(num_qubits, amplitudes)
    }
}

/// |+⟩^⊗N: every amplitude 2^{−N/2}.
pub fn initial_plus_state(num_qubits: usize) -> Result<StateVector> {
    if num_qubits == 0 || num_qubits > 30 {
        return Err(Error::InvalidInput(format!(
            "qubit count {num_qubits} outside 1..=30"
        )));
    }
    let value = (2.0 as Real).powf(-(num_qubits as Real) / 2.0);
    Ok(StateVector {
        num_qubits,
        amplitudes: vec![Amplitude::new(value, 0.0); 1usize << num_qubits],
    })
}

/// Runs the full QAOA circuit: |+⟩^⊗N then (phase, mixer) per layer in order.
pub fn run_qaoa(spectrum: &CostSpectrum, schedule: &Schedule) -> Result<StateVector> {
    let mut state = initial_plus_state(spectrum.num_qubits())?;
    for (&gamma, &beta) in schedule.gammas().iter().zip(schedule.betas()) {
        if !gamma.is_finite() || !beta.is_finite() {
            return Err(Error::InvalidInput("non-finite schedule angle".into()));
        }
        state.apply_phase(spectrum, gamma)?;
        state.apply_mixer(beta);
    }
    Ok(state)
}

/// ⟨ψ|H_C|ψ⟩ = Σ_x |a_x|²·E_x, pairwise-summed.
pub fn expectation(state: &StateVector, spectrum: &CostSpectrum) -> Result<Real> {
    if spectrum.num_qubits() != state.num_qubits {
        return Err(Error::DimensionMismatch(format!(
            "state has {} qubits, spectrum {}",
            state.num_qubits,
            spectrum.num_qubits()
        )));
    }
    let energies = spectrum.energies();
    Ok(pairwise_sum(0, state.amplitudes.len(), &|x| {
        state.amplitudes[x].norm_sqr() * energies[x]
    }))
}

/// Total probability mass on all degenerate minimum-energy basis states.
pub fn ground_overlap(state: &StateVector, spectrum: &CostSpectrum) -> Result<Real> {
    if spectrum.num_qubits() != state.num_qubits {
        return Err(Error::DimensionMismatch(format!(
            "state has {} qubits, spectrum {}",
            state.num_qubits,
            spectrum.num_qubits()
        )));
    }
    Ok(spectrum
        .ground_set()
        .iter()
        .map(|&x| state.amplitudes[x].norm_sqr())
        .sum())
}

/// Deterministic pairwise reduction of f(lo) + ... + f(hi−1).
fn pairwise_sum(lo: usize, hi: usize, f: &impl Fn(usize) -> Real) -> Real {
    if hi - lo <= 64 {
        let mut total = 0.0;
        for x in lo..hi {
            total += f(x);
        }
        total
    } else {
        let mid = lo + (hi - lo) / 2;
        pairwise_sum(lo, mid, f) + pairwise_sum(mid, hi, f)
    }
}
