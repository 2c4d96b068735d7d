//! Benchmark cost functions as dense diagonal spectra over bitstrings.
//!
//! Every problem is encoded as a [`CostSpectrum`]: the energy of each of the
//! 2^N computational basis states, addressed by the basis-state index. The
//! spin convention is fixed once here and used everywhere: bit 0 of the index
//! maps to spin +1, bit 1 to spin −1, and qubit i is bit i of the index
//! (little-endian).

mod labs;
mod portfolio;
mod sk;

pub use labs::{build_labs_spectrum, build_labs_spectrum_with_cap, labs_energy, labs_merit_factor};
pub use portfolio::{
    build_portfolio_spectrum, build_portfolio_spectrum_with_cap, PortfolioInstance,
};
pub use sk::{build_sk_spectrum, build_sk_spectrum_with_cap, sk_energy, SkInstance};

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::DEFAULT_QUBIT_CAP;

/// Spin value of bit `b`: 0 ↔ +1, 1 ↔ −1.
#[inline]
pub fn spin_of_bit(b: u64) -> i8 {
    1 - 2 * (b as i8)
}

/// Spin sequence of a basis-state index, qubit i = bit i (little-endian).
pub fn spins_of_index(index: u64, num_qubits: usize) -> Vec<i8> {
    (0..num_qubits).map(|i| spin_of_bit((index >> i) & 1)).collect()
}

/// Which benchmark a spectrum encodes. Determines the AR convention and the
/// tag stored in spectrum files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ProblemKind {
    Labs,
    SherringtonKirkpatrick,
    Portfolio,
    /// Anything constructed directly from raw energies.
    Custom,
}

impl ProblemKind {
    fn file_tag(self) -> u32 {
        match self {
            ProblemKind::Labs => 0,
            ProblemKind::SherringtonKirkpatrick => 1,
            ProblemKind::Portfolio => 2,
            ProblemKind::Custom => 3,
        }
    }

    fn from_file_tag(tag: u32) -> Result<Self> {
        match tag {
            0 => Ok(ProblemKind::Labs),
            1 => Ok(ProblemKind::SherringtonKirkpatrick),
            2 => Ok(ProblemKind::Portfolio),
            3 => Ok(ProblemKind::Custom),
            other => Err(Error::Parse(format!("unknown problem-kind tag {other}"))),
        }
    }

    /// Short name used in CLI flags and file names.
    pub fn short_name(self) -> &'static str {
        match self {
            ProblemKind::Labs => "labs",
            ProblemKind::SherringtonKirkpatrick => "sk",
            ProblemKind::Portfolio => "po",
            ProblemKind::Custom => "custom",
        }
    }
}

impl std::fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.short_name())
    }
}

impl std::str::FromStr for ProblemKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "labs" => Ok(ProblemKind::Labs),
            "sk" => Ok(ProblemKind::SherringtonKirkpatrick),
            "po" => Ok(ProblemKind::Portfolio),
            "custom" => Ok(ProblemKind::Custom),
            other => Err(Error::Parse(format!(
                "unknown problem kind {other:?} (expected labs, sk or po)"
            ))),
        }
    }
}

/// Dense table of the 2^N eigenvalues of a diagonal cost Hamiltonian, with
/// cached extremes and the set of minimum-energy basis states.
#[derive(Debug, Clone, PartialEq)]
pub struct CostSpectrum {
    num_qubits: usize,
    energies: Vec<Real>,
    e_min: Real,
    e_max: Real,
    ground_set: Vec<usize>,
    kind: ProblemKind,
    seed: i64,
}

impl CostSpectrum {
    /// Builds a spectrum from raw energies, computing the cached extremes.
    ///
    /// `energies` must have exactly 2^num_qubits finite entries.
    pub fn from_energies(
        num_qubits: usize,
        energies: Vec<Real>,
        kind: ProblemKind,
        seed: i64,
    ) -> Result<Self> {
        if num_qubits == 0 {
            return Err(Error::InvalidInput("num_qubits must be at least 1".into()));
        }
        let expected = 1usize
            .checked_shl(num_qubits as u32)
            .ok_or_else(|| Error::ResourceLimit(format!("2^{num_qubits} states overflow")))?;
        if energies.len() != expected {
            return Err(Error::DimensionMismatch(format!(
                "expected 2^{} = {} energies, got {}",
                num_qubits,
                expected,
                energies.len()
            )));
        }
        if let Some(bad) = energies.iter().position(|e| !e.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "energy at index {bad} is not finite"
            )));
        }
        let (e_min, e_max, ground_set) = scan_extremes(&energies);
        Ok(Self {
            num_qubits,
            energies,
            e_min,
            e_max,
            ground_set,
            kind,
            seed,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn num_states(&self) -> usize {
        self.energies.len()
    }

    pub fn energies(&self) -> &[Real] {
        &self.energies
    }

    #[inline]
    pub fn energy(&self, index: usize) -> Real {
        self.energies[index]
    }

    pub fn e_min(&self) -> Real {
        self.e_min
    }

    pub fn e_max(&self) -> Real {
        self.e_max
    }

    /// Indices of all basis states attaining `e_min`, sorted ascending.
    pub fn ground_set(&self) -> &[usize] {
        &self.ground_set
    }

    pub fn kind(&self) -> ProblemKind {
        self.kind
    }

    pub fn seed(&self) -> i64 {
        self.seed
    }

    /// Spectrum with every energy multiplied by `factor` (extremes rescanned).
    pub fn scaled(&self, factor: Real) -> Result<Self> {
        let energies = self.energies.iter().map(|e| e * factor).collect();
        Self::from_energies(self.num_qubits, energies, self.kind, self.seed)
    }

    /// Writes the binary spectrum file: magic `QSPC`, version, N, kind tag,
    /// seed, then 2^N little-endian f64 energies.
    pub fn write_binary(&self, path: &Path) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        w.write_all(SPECTRUM_MAGIC)?;
        w.write_all(&SPECTRUM_VERSION.to_le_bytes())?;
        w.write_all(&(self.num_qubits as u32).to_le_bytes())?;
        w.write_all(&self.kind.file_tag().to_le_bytes())?;
        w.write_all(&self.seed.to_le_bytes())?;
        for e in &self.energies {
            w.write_all(&e.to_le_bytes())?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads a spectrum file written by [`CostSpectrum::write_binary`] and
    /// repopulates the cached extremes.
    pub fn read_binary(path: &Path) -> Result<Self> {
        let mut r = BufReader::new(File::open(path)?);
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != SPECTRUM_MAGIC {
            return Err(Error::Parse(format!(
                "bad magic {magic:?} in spectrum file {}",
                path.display()
            )));
        }
        let version = read_u32(&mut r)?;
        if version != SPECTRUM_VERSION {
            return Err(Error::Parse(format!(
                "unsupported spectrum file version {version}"
            )));
        }
        let num_qubits = read_u32(&mut r)? as usize;
        if num_qubits == 0 || num_qubits > 63 {
            return Err(Error::Parse(format!("implausible qubit count {num_qubits}")));
        }
        let kind = ProblemKind::from_file_tag(read_u32(&mut r)?)?;
        let mut seed_bytes = [0u8; 8];
        r.read_exact(&mut seed_bytes)?;
        let seed = i64::from_le_bytes(seed_bytes);
        let count = 1usize << num_qubits;
        let mut energies = Vec::with_capacity(count);
        let mut buf = [0u8; 8];
        for _ in 0..count {
            r.read_exact(&mut buf)?;
            energies.push(Real::from_le_bytes(buf));
        }
        if r.read(&mut buf)? != 0 {
            return Err(Error::Parse("trailing bytes in spectrum file".into()));
        }
        Self::from_energies(num_qubits, energies, kind, seed)
    }
}

const SPECTRUM_MAGIC: &[u8; 4] = b"QSPC";
const SPECTRUM_VERSION: u32 = 1;

fn read_u32(r: &mut impl Read) -> Result<u32> {
    let mut buf = [0u8; 4];
    r.read_exact(&mut buf)?;
    Ok(u32::from_le_bytes(buf))
}

/// Exact scan of a spectrum: minimum, maximum, and all indices attaining the
/// minimum (exact float equality; every builder produces e_min through the
/// same arithmetic path for all degenerate states).
pub fn brute_force_extremes(spectrum: &CostSpectrum) -> (Real, Real, Vec<usize>) {
    scan_extremes(spectrum.energies())
}

fn scan_extremes(energies: &[Real]) -> (Real, Real, Vec<usize>) {
    let mut e_min = Real::INFINITY;
    let mut e_max = Real::NEG_INFINITY;
    for &e in energies {
        if e < e_min {
            e_min = e;
        }
        if e > e_max {
            e_max = e;
        }
    }
    let ground_set = energies
        .iter()
        .enumerate()
        .filter_map(|(x, &e)| (e == e_min).then_some(x))
        .collect();
    (e_min, e_max, ground_set)
}

/// Fills all 2^n energies in parallel from a pure per-index function. Output
/// is bit-identical to a sequential fill.
pub(crate) fn fill_energies<E>(num_qubits: usize, energy: E) -> Vec<Real>
where
    E: Fn(u64) -> Real + Sync + Send,
{
    (0..1u64 << num_qubits)
        .into_par_iter()
        .map(energy)
        .collect()
}

pub(crate) fn check_qubit_cap(n: usize, cap: usize, problem: &str) -> Result<()> {
    if n > cap {
        return Err(Error::ResourceLimit(format!(
            "{problem} size {n} exceeds the qubit cap {cap}"
        )));
    }
    Ok(())
}

/// Default qubit cap re-exported next to the builders that enforce it.
pub const QUBIT_CAP: usize = DEFAULT_QUBIT_CAP;
