//! Orthogonal function families on the unit interval.
//!
//! A schedule entry at layer i of depth p is treated as a sample of a smooth
//! function at t = i/p. Supported families: shifted Chebyshev polynomials
//! T_{j−1}(2t−1), orthonormal shifted Legendre polynomials √(2j−1)·P_{j−1}(2t−1),
//! half-integer-frequency trigonometric functions (sines for the γ channel,
//! cosines for the β channel), and the two-function linear-ramp family.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{Real, Scalar};

/// Which basis family a coefficient schedule is expressed in.
///
/// Polynomial kinds are depth-independent functions of t = i/p. The
/// trigonometric kind ties its frequencies to the evaluation depth p, which
/// is what reproduces the Fourier-strategy semantics under interpolation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BasisKind {
    ShiftedChebyshev,
    ShiftedLegendre,
    FourierHalfWave,
    LinearRamp,
}

impl BasisKind {
    /// Upper bound on usable coefficients, if the family is finite.
    pub fn max_coefficients(self) -> Option<usize> {
        match self {
            BasisKind::LinearRamp => Some(2),
            _ => None,
        }
    }

    pub fn token(self) -> &'static str {
        match self {
            BasisKind::ShiftedChebyshev => "chebyshev",
            BasisKind::ShiftedLegendre => "legendre",
            BasisKind::FourierHalfWave => "fourier",
            BasisKind::LinearRamp => "linear",
        }
    }
}

impl std::fmt::Display for BasisKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.token())
    }
}

impl std::str::FromStr for BasisKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "chebyshev" => Ok(BasisKind::ShiftedChebyshev),
            "legendre" => Ok(BasisKind::ShiftedLegendre),
            "fourier" => Ok(BasisKind::FourierHalfWave),
            "linear" => Ok(BasisKind::LinearRamp),
            other => Err(Error::Parse(format!(
                "unknown basis {other:?} (expected chebyshev, legendre, fourier or linear)"
            ))),
        }
    }
}

/// Schedule channel a basis function belongs to. The trigonometric and
/// linear-ramp families differ between the two.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Channel {
    Gamma,
    Beta,
}

/// Chebyshev polynomial of the first kind, T_n(x).
pub fn chebyshev_t<F: Scalar>(n: usize, x: F) -> F {
    if n == 0 {
        return F::one();
    }
    let two = F::from(2.0).unwrap();
    let mut prev = F::one();
    let mut curr = x;
    for _ in 1..n {
        let next = two * x * curr - prev;
        prev = curr;
        curr = next;
    }
    curr
}

/// Legendre polynomial P_n(x) via the three-term recurrence.
pub fn legendre_p<F: Scalar>(n: usize, x: F) -> F {
    if n == 0 {
        return F::one();
    }
    let mut prev = F::one();
    let mut curr = x;
    for k in 1..n {
        let k_f = F::from(k).unwrap();
        let next = ((F::from(2 * k + 1).unwrap()) * x * curr - k_f * prev) / (k_f + F::one());
        prev = curr;
        curr = next;
    }
    curr
}

#[inline]
fn fourier_argument<F: Scalar>(j: F, i: F, p: usize) -> F {
    let half = F::from(0.5).unwrap();
    let pi = F::from(std::f64::consts::PI).unwrap();
    (j - half) * (i - half) * pi / F::from(p).unwrap()
}

/// Basis function f_j evaluated at grid index i of a depth-p schedule
/// (t = i/p). This is the single evaluation path used for every
/// coefficient→angle conversion, so that identical coefficients always
/// produce bit-identical schedules.
#[inline]
pub(crate) fn eval_at_index<F: Scalar>(
    kind: BasisKind,
    channel: Channel,
    j: usize,
    i: usize,
    p: usize,
) -> F {
    debug_assert!(j >= 1 && i >= 1 && i <= p);
    match kind {
        BasisKind::FourierHalfWave => {
            let arg = fourier_argument(F::from(j).unwrap(), F::from(i).unwrap(), p);
            match channel {
                Channel::Gamma => arg.sin(),
                Channel::Beta => arg.cos(),
            }
        }
        _ => {
            let t = F::from(i).unwrap() / F::from(p).unwrap();
            eval_polynomial_like(kind, channel, j, t)
        }
    }
}

fn eval_polynomial_like<F: Scalar>(kind: BasisKind, channel: Channel, j: usize, t: F) -> F {
    let two = F::from(2.0).unwrap();
    let x = two * t - F::one();
    match kind {
        BasisKind::ShiftedChebyshev => chebyshev_t(j - 1, x),
        BasisKind::ShiftedLegendre => {
            F::from(2 * j - 1).unwrap().sqrt() * legendre_p(j - 1, x)
        }
        BasisKind::LinearRamp => match (j, channel) {
            (1, _) => F::one(),
            (2, Channel::Gamma) => t,
            (2, Channel::Beta) => F::one() - t,
            _ => unreachable!("LinearRamp index validated by callers"),
        },
        BasisKind::FourierHalfWave => unreachable!("handled by eval_at_index"),
    }
}

/// Basis function f_j at an arbitrary t ∈ [0, 1].
///
/// For the trigonometric family the depth p fixes the frequencies and the
/// half-layer grid offset (i = t·p); polynomial kinds ignore p.
pub fn eval_basis<F: Scalar>(
    kind: BasisKind,
    channel: Channel,
    j: usize,
    t: F,
    p: usize,
) -> Result<F> {
    if j == 0 {
        return Err(Error::InvalidInput("basis index j starts at 1".into()));
    }
    if t < F::zero() || t > F::one() {
        return Err(Error::InvalidInput(format!("t = {t} outside [0, 1]")));
    }
    if let Some(cap) = kind.max_coefficients() {
        if j > cap {
            return Err(Error::InvalidInput(format!(
                "{kind} basis has only {cap} functions, got j = {j}"
            )));
        }
    }
    match kind {
        BasisKind::FourierHalfWave => {
            if p == 0 {
                return Err(Error::InvalidInput("depth p must be at least 1".into()));
            }
            let arg = fourier_argument(F::from(j).unwrap(), t * F::from(p).unwrap(), p);
            Ok(match channel {
                Channel::Gamma => arg.sin(),
                Channel::Beta => arg.cos(),
            })
        }
        _ => Ok(eval_polynomial_like(kind, channel, j, t)),
    }
}

/// Gauss-Legendre nodes and weights on [−1, 1], by Newton iteration on P_n.
pub fn gauss_legendre_nodes(n: usize) -> Vec<(Real, Real)> {
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let mut x = (std::f64::consts::PI * (k as Real + 0.75) / (n as Real + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let p_n = legendre_p(n, x);
            let p_nm1 = legendre_p(n - 1, x);
            dp = n as Real * (x * p_n - p_nm1) / (x * x - 1.0);
            let step = p_n / dp;
            x -= step;
            if step.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out.push((x, w));
    }
    out
}
