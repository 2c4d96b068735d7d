//! Derived performance metrics and scaling-law fits.
//!
//! Approximation-ratio conventions: LABS uses the merit-factor ratio
//! e_min/⟨E⟩ (energies are positive, so this equals MF(⟨E⟩)/MF_opt); the
//! minimization problems use the normalized energy (e_max − ⟨E⟩)/(e_max −
//! e_min). Both are 1 exactly at the optimum and lie in [0, 1].

use serde::{Deserialize, Serialize};

use crate::engine::RunTrace;
use crate::error::{Error, Result};
use crate::problems::{CostSpectrum, ProblemKind};
use crate::scalar::{Real, Scalar};

/// Approximation ratio of an expected energy against a spectrum's extremes.
///
/// Values outside [e_min, e_max] by more than 1e-9 indicate an upstream bug
/// and are rejected; smaller excursions are clamped to the bounds.
pub fn approximation_ratio(
    expected_energy: Real,
    spectrum: &CostSpectrum,
    kind: ProblemKind,
) -> Result<Real> {
    let (lo, hi) = (spectrum.e_min(), spectrum.e_max());
    if expected_energy < lo - 1e-9 || expected_energy > hi + 1e-9 {
        return Err(Error::InvalidInput(format!(
            "expected energy {expected_energy} outside [{lo}, {hi}]"
        )));
    }
    let energy = expected_energy.clamp(lo, hi);
    match kind {
        ProblemKind::Labs => {
            if lo <= 0.0 {
                return Err(Error::InvalidInput(
                    "LABS approximation ratio needs a positive minimum energy".into(),
                ));
            }
            Ok(lo / energy)
        }
        _ => {
            if hi == lo {
                return Ok(1.0);
            }
            Ok((hi - energy) / (hi - lo))
        }
    }
}

/// TTS = p / overlap: expected number of layers executed until the ground
/// state is sampled once.
pub fn time_to_solution(p: usize, overlap: Real) -> Result<Real> {
    if overlap == 0.0 {
        return Err(Error::InfiniteTts);
    }
    if !(overlap > 0.0 && overlap <= 1.0) {
        return Err(Error::InvalidInput(format!(
            "overlap {overlap} outside (0, 1]"
        )));
    }
    Ok(p as Real / overlap)
}

/// Which per-stage metric a threshold applies to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TraceMetric {
    Ar,
    Overlap,
}

impl TraceMetric {
    fn of_record(self, record: &crate::engine::StageRecord) -> Real {
        match self {
            TraceMetric::Ar => record.ar,
            TraceMetric::Overlap => record.overlap,
        }
    }
}

/// Smallest recorded depth whose metric reaches `threshold`, or None for a
/// failing trace.
pub fn depth_to_threshold(
    trace: &RunTrace,
    metric: TraceMetric,
    threshold: Real,
) -> Option<usize> {
    trace
        .records
        .iter()
        .find(|r| metric.of_record(r) >= threshold)
        .map(|r| r.p)
}

/// TNL accumulated up to the first stage whose metric reaches `threshold`.
pub fn tnl_to_threshold(trace: &RunTrace, metric: TraceMetric, threshold: Real) -> Option<u64> {
    trace
        .records
        .iter()
        .find(|r| metric.of_record(r) >= threshold)
        .map(|r| r.tnl_cumulative)
}

/// Scaling-law families for depth-vs-size fits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ScalingModel {
    /// p = a·N^b
    PowerLaw,
    /// p = a·b^N
    Exponential,
}

impl std::fmt::Display for ScalingModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ScalingModel::PowerLaw => "power",
            ScalingModel::Exponential => "exp",
        })
    }
}

impl std::str::FromStr for ScalingModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "power" => Ok(ScalingModel::PowerLaw),
            "exp" => Ok(ScalingModel::Exponential),
            other => Err(Error::Parse(format!(
                "unknown scaling model {other:?} (expected power or exp)"
            ))),
        }
    }
}

/// A fitted scaling law with its goodness of fit, computed in the log space
/// where the fit is linear.
#[derive(Debug, Clone, Serialize)]
pub struct ScalingFit<F = Real> {
    pub model: ScalingModel,
    pub a: F,
    pub b: F,
    pub r_squared: F,
    pub points: Vec<(F, F)>,
}

impl<F: Scalar> ScalingFit<F> {
    /// Model prediction at size n.
    pub fn predict(&self, n: F) -> F {
        match self.model {
            ScalingModel::PowerLaw => self.a * n.powf(self.b),
            ScalingModel::Exponential => self.a * self.b.powf(n),
        }
    }
}

/// Least-squares fit of (N, p) points in log space: log p against log N for
/// the power law, log p against N for the exponential.
pub fn fit_scaling<F: Scalar>(points: &[(F, F)], model: ScalingModel) -> Result<ScalingFit<F>> {
    if points.len() < 3 {
        return Err(Error::InvalidInput(format!(
            "scaling fit needs at least 3 points, got {}",
            points.len()
        )));
    }
    if points.iter().any(|(n, p)| *n <= F::zero() || *p <= F::zero()) {
        return Err(Error::InvalidInput(
            "scaling fit needs strictly positive sizes and depths".into(),
        ));
    }
    let xs: Vec<F> = points
        .iter()
        .map(|(n, _)| match model {
            ScalingModel::PowerLaw => n.ln(),
            ScalingModel::Exponential => *n,
        })
        .collect();
    let ys: Vec<F> = points.iter().map(|(_, p)| p.ln()).collect();
    let count = F::from(points.len()).unwrap();
    let x_mean = xs.iter().copied().sum::<F>() / count;
    let y_mean = ys.iter().copied().sum::<F>() / count;
    let mut sxx = F::zero();
    let mut sxy = F::zero();
    for (x, y) in xs.iter().zip(&ys) {
        sxx = sxx + (*x - x_mean) * (*x - x_mean);
        sxy = sxy + (*x - x_mean) * (*y - y_mean);
    }
    if sxx == F::zero() {
        return Err(Error::InvalidInput(
            "scaling fit needs at least two distinct sizes".into(),
        ));
    }
    let slope = sxy / sxx;
    let intercept = y_mean - slope * x_mean;
    let mut ss_res = F::zero();
    let mut ss_tot = F::zero();
    for (x, y) in xs.iter().zip(&ys) {
        let fit = intercept + slope * *x;
        ss_res = ss_res + (*y - fit) * (*y - fit);
        ss_tot = ss_tot + (*y - y_mean) * (*y - y_mean);
    }
    let r_squared = if ss_tot == F::zero() {
        F::one()
    } else {
        F::one() - ss_res / ss_tot
    };
    let (a, b) = match model {
        ScalingModel::PowerLaw => (intercept.exp(), slope),
        ScalingModel::Exponential => (intercept.exp(), slope.exp()),
    };
    Ok(ScalingFit {
        model,
        a,
        b,
        r_squared,
        points: points.to_vec(),
    })
}

/// Median and 10/90 percentile bands of TNL-at-target across traces.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TnlSummary {
    pub median: Real,
    pub p10: Real,
    pub p90: Real,
    pub succeeded: usize,
    pub failed: usize,
}

/// Aggregates TNL-at-target across runs; failing traces are excluded from
/// the percentiles and counted separately.
pub fn aggregate_tnl(
    traces: &[RunTrace],
    metric: TraceMetric,
    threshold: Real,
) -> Result<TnlSummary> {
    if traces.is_empty() {
        return Err(Error::InvalidInput("no traces to aggregate".into()));
    }
    let mut values: Vec<Real> = Vec::new();
    let mut failed = 0usize;
    for trace in traces {
        match tnl_to_threshold(trace, metric, threshold) {
            Some(tnl) => values.push(tnl as Real),
            None => failed += 1,
        }
    }
    if values.is_empty() {
        return Err(Error::EmptySummary);
    }
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(TnlSummary {
        median: percentile(&values, 0.5),
        p10: percentile(&values, 0.1),
        p90: percentile(&values, 0.9),
        succeeded: values.len(),
        failed,
    })
}

/// Linear-interpolation percentile of an ascending slice.
fn percentile(sorted: &[Real], q: Real) -> Real {
    let last = sorted.len() - 1;
    let h = q * last as Real;
    let lo = h.floor() as usize;
    if lo >= last {
        return sorted[last];
    }
    let frac = h - lo as Real;
    sorted[lo] + frac * (sorted[lo + 1] - sorted[lo])
}
