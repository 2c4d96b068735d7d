//! Angle schedules and their coefficient representations.
//!
//! A depth-p schedule is the pair (γ_1..γ_p, β_1..β_p). A coefficient
//! schedule stores C pairs (u_j, v_j) over a [`BasisKind`]; the angles are
//! recovered as γ_i = Σ_j u_j f_j(i/p) and β_i = Σ_j v_j f_j(i/p).
//! Coefficients are depth-free, so evaluating them at a different p is the
//! interpolation step that extends a schedule to deeper circuits.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use nalgebra::{DMatrix, DVector, RealField};

use crate::basis::{eval_at_index, BasisKind, Channel};
use crate::error::{Error, Result};
use crate::lstsq::solve_least_squares;
use crate::scalar::{Real, Scalar};

/// Paired angle sequences (γ_1..γ_p, β_1..β_p).
#[derive(Debug, Clone, PartialEq)]
pub struct Schedule<F = Real> {
    gammas: Vec<F>,
    betas: Vec<F>,
}

impl<F: Scalar> Schedule<F> {
    /// Validates equal lengths, p ≥ 1 and finite entries.
    pub fn new(gammas: Vec<F>, betas: Vec<F>) -> Result<Self> {
        if gammas.len() != betas.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} gammas vs {} betas",
                gammas.len(),
                betas.len()
            )));
        }
        if gammas.is_empty() {
            return Err(Error::InvalidInput("schedule depth must be at least 1".into()));
        }
        if gammas.iter().chain(betas.iter()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("non-finite schedule angle".into()));
        }
        Ok(Self { gammas, betas })
    }

    pub fn depth(&self) -> usize {
        self.gammas.len()
    }

    pub fn gammas(&self) -> &[F] {
        &self.gammas
    }

    pub fn betas(&self) -> &[F] {
        &self.betas
    }
}

/// Basis kind plus paired coefficient sequences (u_1..u_C, v_1..v_C).
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientSchedule<F = Real> {
    kind: BasisKind,
    u: Vec<F>,
    v: Vec<F>,
}

impl<F: Scalar> CoefficientSchedule<F> {
    pub fn new(kind: BasisKind, u: Vec<F>, v: Vec<F>) -> Result<Self> {
        if u.len() != v.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} u-coefficients vs {} v-coefficients",
                u.len(),
                v.len()
            )));
        }
        if u.is_empty() {
            return Err(Error::InvalidInput("need at least one coefficient pair".into()));
        }
        if let Some(cap) = kind.max_coefficients() {
            if u.len() > cap {
                return Err(Error::InvalidInput(format!(
                    "{kind} basis supports at most {cap} coefficients, got {}",
                    u.len()
                )));
            }
        }
        if u.iter().chain(v.iter()).any(|c| !c.is_finite()) {
            return Err(Error::InvalidInput("non-finite coefficient".into()));
        }
        Ok(Self { kind, u, v })
    }

    pub fn kind(&self) -> BasisKind {
        self.kind
    }

    /// Number of stored coefficient pairs.
    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }

    pub fn u(&self) -> &[F] {
        &self.u
    }

    pub fn v(&self) -> &[F] {
        &self.v
    }

    /// Zero-pads both coefficient vectors up to `len` pairs.
    pub fn pad_to(&mut self, len: usize) -> Result<()> {
        if let Some(cap) = self.kind.max_coefficients() {
            if len > cap {
                return Err(Error::InvalidInput(format!(
                    "{} basis supports at most {cap} coefficients",
                    self.kind
                )));
            }
        }
        while self.u.len() < len {
            self.u.push(F::zero());
            self.v.push(F::zero());
        }
        Ok(())
    }

    /// Overwrites the first `prefix.len()/2` pairs from a flat
    /// [u_1..u_k, v_1..v_k] slice, as used by the coefficient optimizer.
    pub(crate) fn set_active_prefix(&mut self, flat: &[F]) {
        let k = flat.len() / 2;
        debug_assert!(flat.len() == 2 * k && k <= self.u.len());
        self.u[..k].copy_from_slice(&flat[..k]);
        self.v[..k].copy_from_slice(&flat[k..]);
    }

    /// Flat [u_1..u_k, v_1..v_k] view of the first k pairs.
    pub(crate) fn active_prefix(&self, k: usize) -> Vec<F> {
        let mut flat = Vec::with_capacity(2 * k);
        flat.extend_from_slice(&self.u[..k]);
        flat.extend_from_slice(&self.v[..k]);
        flat
    }
}

/// Evaluates the coefficient expansion on the grid t_i = i/p for i = 1..p.
pub fn coeffs_to_angles<F: Scalar>(cs: &CoefficientSchedule<F>, p: usize) -> Result<Schedule<F>> {
    if p == 0 {
        return Err(Error::InvalidInput("depth p must be at least 1".into()));
    }
    let mut gammas = Vec::with_capacity(p);
    let mut betas = Vec::with_capacity(p);
    for i in 1..=p {
        let mut gamma = F::zero();
        let mut beta = F::zero();
        for j in 1..=cs.len() {
            gamma = gamma + cs.u[j - 1] * eval_at_index(cs.kind, Channel::Gamma, j, i, p);
            beta = beta + cs.v[j - 1] * eval_at_index(cs.kind, Channel::Beta, j, i, p);
        }
        gammas.push(gamma);
        betas.push(beta);
    }
    Schedule::new(gammas, betas)
}

/// A fitted coefficient schedule together with the per-channel least-squares
/// residual norms ‖A·u − γ‖₂ and ‖A·v − β‖₂.
#[derive(Debug, Clone)]
pub struct CoefficientFit<F = Real> {
    pub coefficients: CoefficientSchedule<F>,
    pub gamma_residual: F,
    pub beta_residual: F,
}

/// Fits C coefficient pairs to a schedule by least squares on the design
/// matrix A_ij = f_j(i/p). Exact when the schedule lies in the span.
pub fn angles_to_coeffs<F>(
    schedule: &Schedule<F>,
    kind: BasisKind,
    num_coefficients: usize,
) -> Result<CoefficientFit<F>>
where
    F: Scalar + RealField,
{
    let p = schedule.depth();
    if num_coefficients == 0 || num_coefficients > p {
        return Err(Error::InvalidInput(format!(
            "coefficient count {num_coefficients} outside 1..={p}"
        )));
    }
    if let Some(cap) = kind.max_coefficients() {
        if num_coefficients > cap {
            return Err(Error::InvalidInput(format!(
                "{kind} basis supports at most {cap} coefficients"
            )));
        }
    }
    let design = |channel: Channel| {
        DMatrix::from_fn(p, num_coefficients, |i, j| {
            eval_at_index::<F>(kind, channel, j + 1, i + 1, p)
        })
    };
    let gamma_fit = solve_least_squares(
        &design(Channel::Gamma),
        &DVector::from_column_slice(schedule.gammas()),
    )?;
    let beta_fit = solve_least_squares(
        &design(Channel::Beta),
        &DVector::from_column_slice(schedule.betas()),
    )?;
    Ok(CoefficientFit {
        coefficients: CoefficientSchedule::new(kind, gamma_fit.solution, beta_fit.solution)?,
        gamma_residual: gamma_fit.residual_norm,
        beta_residual: beta_fit.residual_norm,
    })
}

/// Evaluates the stored coefficients at a new depth. Identical to
/// [`coeffs_to_angles`]; for the trigonometric basis the frequencies rescale
/// with the new p.
pub fn interpolate<F: Scalar>(cs: &CoefficientSchedule<F>, p_new: usize) -> Result<Schedule<F>> {
    coeffs_to_angles(cs, p_new)
}

/// The four-parameter ramp β_i = a_β + b_β(1 − i/p), γ_i = a_γ + b_γ·i/p.
pub fn linear_schedule<F: Scalar>(
    a_beta: F,
    b_beta: F,
    a_gamma: F,
    b_gamma: F,
    p: usize,
) -> Result<Schedule<F>> {
    if p == 0 {
        return Err(Error::InvalidInput("depth p must be at least 1".into()));
    }
    let mut gammas = Vec::with_capacity(p);
    let mut betas = Vec::with_capacity(p);
    for i in 1..=p {
        let t = F::from(i).unwrap() / F::from(p).unwrap();
        gammas.push(a_gamma + b_gamma * t);
        betas.push(a_beta + b_beta * (F::one() - t));
    }
    Schedule::new(gammas, betas)
}

/// The half-integer-frequency parameterization with all p coefficient pairs:
/// γ_i = Σ_j u_j sin[(j−½)(i−½)π/p], β_i likewise with cosines.
pub fn zhou_fourier_angles<F: Scalar>(u: &[F], v: &[F], p: usize) -> Result<Schedule<F>> {
    if u.len() != p || v.len() != p {
        return Err(Error::DimensionMismatch(format!(
            "need exactly p = {p} coefficients per channel, got {} and {}",
            u.len(),
            v.len()
        )));
    }
    let cs = CoefficientSchedule::new(BasisKind::FourierHalfWave, u.to_vec(), v.to_vec())?;
    coeffs_to_angles(&cs, p)
}

// --- plain-text schedule files -------------------------------------------
//
// One header line `kind C p`, then one `u v` (or `gamma beta`) pair per
// line, ≥ 15 significant digits. Raw schedules use the kind token `raw`
// with C = p.

const RAW_TOKEN: &str = "raw";

/// Writes a coefficient schedule with the depth it is associated with.
pub fn write_coefficient_file(
    path: &Path,
    cs: &CoefficientSchedule<Real>,
    p: usize,
) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "{} {} {}", cs.kind().token(), cs.len(), p)?;
    for (u, v) in cs.u().iter().zip(cs.v()) {
        writeln!(w, "{u:.17e} {v:.17e}")?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a coefficient file, returning the schedule and its associated depth.
pub fn read_coefficient_file(path: &Path) -> Result<(CoefficientSchedule<Real>, usize)> {
    let (token, pairs, p) = read_pair_file(path)?;
    let kind: BasisKind = token.parse()?;
    let (u, v) = pairs.into_iter().unzip();
    Ok((CoefficientSchedule::new(kind, u, v)?, p))
}

/// Writes a raw angle schedule (`raw p p` header, then `gamma beta` lines).
pub fn write_schedule_file(path: &Path, schedule: &Schedule<Real>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    let p = schedule.depth();
    writeln!(w, "{RAW_TOKEN} {p} {p}")?;
    for (g, b) in schedule.gammas().iter().zip(schedule.betas()) {
        writeln!(w, "{g:.17e} {b:.17e}")?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a raw angle schedule written by [`write_schedule_file`].
pub fn read_schedule_file(path: &Path) -> Result<Schedule<Real>> {
    let (token, pairs, p) = read_pair_file(path)?;
    if token != RAW_TOKEN {
        return Err(Error::Parse(format!(
            "expected a raw schedule file, found kind {token:?}"
        )));
    }
    if pairs.len() != p {
        return Err(Error::Parse(format!(
            "header says p = {p} but file has {} pairs",
            pairs.len()
        )));
    }
    let (gammas, betas) = pairs.into_iter().unzip();
    Schedule::new(gammas, betas)
}

fn read_pair_file(path: &Path) -> Result<(String, Vec<(Real, Real)>, usize)> {
    let reader = BufReader::new(File::open(path)?);
    let mut lines = reader.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty schedule file".into()))??;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 3 {
        return Err(Error::Parse(format!("malformed header {header:?}")));
    }
    let token = fields[0].to_string();
    let count: usize = fields[1]
        .parse()
        .map_err(|_| Error::Parse(format!("bad coefficient count {:?}", fields[1])))?;
    let p: usize = fields[2]
        .parse()
        .map_err(|_| Error::Parse(format!("bad depth {:?}", fields[2])))?;
    let mut pairs = Vec::with_capacity(count);
    for line in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split_whitespace().collect();
        if cols.len() != 2 {
            return Err(Error::Parse(format!("expected two columns, got {line:?}")));
        }
        let a: Real = cols[0]
            .parse()
            .map_err(|_| Error::Parse(format!("bad float {:?}", cols[0])))?;
        let b: Real = cols[1]
            .parse()
            .map_err(|_| Error::Parse(format!("bad float {:?}", cols[1])))?;
        pairs.push((a, b));
    }
    if pairs.len() != count {
        return Err(Error::Parse(format!(
            "header says {count} pairs but file has {}",
            pairs.len()
        )));
    }
    Ok((token, pairs, p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const ALL_BASES: [BasisKind; 3] = [
        BasisKind::ShiftedChebyshev,
        BasisKind::ShiftedLegendre,
        BasisKind::FourierHalfWave,
    ];

    #[test]
    fn leading_legendre_coefficients_give_constant_schedules() {
        let cs = CoefficientSchedule::<Real>::new(
            BasisKind::ShiftedLegendre,
            vec![0.4, 0.0, 0.0],
            vec![-1.1, 0.0, 0.0],
        )
        .unwrap();
        let s = coeffs_to_angles(&cs, 7).unwrap();
        for (&g, &b) in s.gammas().iter().zip(s.betas()) {
            assert_eq!(g, 0.4);
            assert_eq!(b, -1.1);
        }
    }

    #[test]
    fn zero_coefficients_give_zero_schedule() {
        for kind in ALL_BASES {
            let cs = CoefficientSchedule::<Real>::new(kind, vec![0.0; 3], vec![0.0; 3]).unwrap();
            let s = coeffs_to_angles(&cs, 5).unwrap();
            assert!(s.gammas().iter().chain(s.betas()).all(|v| *v == 0.0));
        }
    }

    #[test]
    fn fourier_two_layer_values() {
        let cs = CoefficientSchedule::<Real>::new(
            BasisKind::FourierHalfWave,
            vec![1.0, 0.0],
            vec![0.0, 0.0],
        )
        .unwrap();
        let s = coeffs_to_angles(&cs, 2).unwrap();
        let pi = std::f64::consts::PI;
        assert!((s.gammas()[0] - (pi / 8.0).sin()).abs() < 1e-15);
        assert!((s.gammas()[1] - (3.0 * pi / 8.0).sin()).abs() < 1e-15);
        assert!((s.gammas()[0] - 0.38268).abs() < 1e-5);
        assert!((s.gammas()[1] - 0.92388).abs() < 1e-5);
    }

    #[test]
    fn constant_schedule_fits_to_leading_legendre_coefficient() {
        let schedule = Schedule::<Real>::new(vec![0.7; 12], vec![0.7; 12]).unwrap();
        for c in 1..=6usize {
            let fit = angles_to_coeffs(&schedule, BasisKind::ShiftedLegendre, c).unwrap();
            let u = fit.coefficients.u();
            assert!((u[0] - 0.7).abs() < 1e-10);
            for higher in &u[1..] {
                assert!(higher.abs() < 1e-10);
            }
        }
    }

    #[test]
    fn round_trip_on_representable_subspace() {
        // Coefficients -> angles -> coefficients is the identity when the
        // fit uses the same C and kind.
        for kind in ALL_BASES {
            for (p, c) in [(1usize, 1usize), (4, 3), (16, 8), (64, 16), (256, 64)] {
                let u: Vec<Real> = (0..c).map(|j| 0.8 / (j as Real + 1.0)).collect();
                let v: Vec<Real> = (0..c).map(|j| -0.5 / (j as Real * j as Real + 1.0)).collect();
                let cs = CoefficientSchedule::new(kind, u.clone(), v.clone()).unwrap();
                let angles = coeffs_to_angles(&cs, p).unwrap();
                let fit = angles_to_coeffs(&angles, kind, c).unwrap();
                for (orig, back) in u.iter().zip(fit.coefficients.u()) {
                    assert!((orig - back).abs() < 1e-9, "{kind} p={p} c={c}");
                }
                for (orig, back) in v.iter().zip(fit.coefficients.v()) {
                    assert!((orig - back).abs() < 1e-9, "{kind} p={p} c={c}");
                }
            }
        }
    }

    #[test]
    fn truncation_residual_is_monotone_in_c() {
        // A deliberately rough schedule that no small C captures exactly.
        let p = 24usize;
        let gammas: Vec<Real> = (1..=p)
            .map(|i| (7.0 * i as Real).sin() + 0.2 * i as Real / p as Real)
            .collect();
        let betas: Vec<Real> = (1..=p).map(|i| (5.0 * i as Real).cos()).collect();
        let schedule = Schedule::new(gammas, betas).unwrap();
        for kind in ALL_BASES {
            let mut prev = Real::INFINITY;
            for c in 1..=p {
                let fit = angles_to_coeffs(&schedule, kind, c).unwrap();
                let residual = fit.gamma_residual.max(fit.beta_residual);
                assert!(
                    residual <= prev + 1e-10,
                    "{kind} c={c}: {residual} > {prev}"
                );
                prev = residual;
            }
        }
    }

    #[test]
    fn interpolate_is_coeffs_to_angles() {
        let cs = CoefficientSchedule::<Real>::new(
            BasisKind::FourierHalfWave,
            vec![0.3, -0.2, 0.05],
            vec![0.6, 0.1, -0.4],
        )
        .unwrap();
        for p in [1usize, 3, 17, 100] {
            let a = interpolate(&cs, p).unwrap();
            let b = coeffs_to_angles(&cs, p).unwrap();
            assert_eq!(a, b);
            for (x, y) in a.gammas().iter().zip(b.gammas()) {
                assert_eq!(x.to_bits(), y.to_bits());
            }
        }
    }

    #[test]
    fn linear_function_is_exact_in_legendre_with_two_coefficients() {
        // Fit γ(t) = t on a 5-point grid, then evaluate on a 10-point grid.
        let source = linear_schedule(0.0, 0.0, 0.0, 1.0, 5).unwrap();
        let fit = angles_to_coeffs(&source, BasisKind::ShiftedLegendre, 2).unwrap();
        assert!(fit.gamma_residual < 1e-12);
        let dense = interpolate(&fit.coefficients, 10).unwrap();
        for (i, &g) in dense.gammas().iter().enumerate() {
            let expected = (i + 1) as Real / 10.0;
            assert!((g - expected).abs() < 1e-12, "i={i}: {g} vs {expected}");
        }
    }

    #[test]
    fn linear_ramp_is_exact_in_legendre() {
        let ramp = linear_schedule(0.1, 0.6, -0.2, 0.9, 20).unwrap();
        let fit = angles_to_coeffs(&ramp, BasisKind::ShiftedLegendre, 2).unwrap();
        assert!(fit.gamma_residual < 1e-12);
        assert!(fit.beta_residual < 1e-12);
    }

    #[test]
    fn linear_schedule_examples() {
        let flat = linear_schedule(0.3, 0.0, -0.1, 0.0, 5).unwrap();
        assert!(flat.gammas().iter().all(|&g| g == -0.1));
        assert!(flat.betas().iter().all(|&b| b == 0.3));

        let gamma_ramp = linear_schedule(0.0, 0.0, 0.0, 1.0, 4).unwrap();
        assert_eq!(gamma_ramp.gammas(), &[0.25, 0.5, 0.75, 1.0]);

        let beta_ramp = linear_schedule(0.0, 1.0, 0.0, 0.0, 4).unwrap();
        assert_eq!(beta_ramp.betas(), &[0.75, 0.5, 0.25, 0.0]);
    }

    #[test]
    fn zhou_examples() {
        let zero = zhou_fourier_angles(&[0.0f64, 0.0], &[0.0, 0.0], 2).unwrap();
        assert!(zero.gammas().iter().chain(zero.betas()).all(|v| *v == 0.0));

        let s = zhou_fourier_angles(&[2.0f64], &[3.0], 1).unwrap();
        let quarter_pi = std::f64::consts::FRAC_PI_4;
        assert!((s.gammas()[0] - 2.0 * quarter_pi.sin()).abs() < 1e-15);
        assert!((s.betas()[0] - 3.0 * quarter_pi.cos()).abs() < 1e-15);

        assert!(zhou_fourier_angles(&[1.0f64], &[1.0], 2).is_err());
    }

    #[test]
    fn zhou_equals_full_coefficient_fourier_evaluation() {
        let p = 9usize;
        let u: Vec<Real> = (0..p).map(|j| (j as Real * 1.3).sin()).collect();
        let v: Vec<Real> = (0..p).map(|j| (j as Real * 0.7).cos()).collect();
        let direct = zhou_fourier_angles(&u, &v, p).unwrap();
        let cs = CoefficientSchedule::new(BasisKind::FourierHalfWave, u, v).unwrap();
        let via_cs = coeffs_to_angles(&cs, p).unwrap();
        for (a, b) in direct
            .gammas()
            .iter()
            .zip(via_cs.gammas())
            .chain(direct.betas().iter().zip(via_cs.betas()))
        {
            assert!((a - b).abs() < 1e-12);
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn schedule_validation() {
        assert!(Schedule::<Real>::new(vec![0.0], vec![0.0, 0.0]).is_err());
        assert!(Schedule::<Real>::new(vec![], vec![]).is_err());
        assert!(Schedule::<Real>::new(vec![Real::NAN], vec![0.0]).is_err());
        assert!(CoefficientSchedule::<Real>::new(BasisKind::LinearRamp, vec![0.0; 3], vec![0.0; 3]).is_err());
        let schedule = Schedule::<Real>::new(vec![0.1, 0.2], vec![0.3, 0.4]).unwrap();
        assert!(angles_to_coeffs(&schedule, BasisKind::ShiftedLegendre, 3).is_err());
        assert!(angles_to_coeffs(&schedule, BasisKind::ShiftedLegendre, 0).is_err());
    }

    #[test]
    fn coefficient_file_round_trip() {
        let dir = std::env::temp_dir().join("qsched_sched_files");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("coeffs.txt");
        let cs = CoefficientSchedule::new(
            BasisKind::ShiftedChebyshev,
            vec![0.1234567890123456, -2.5e-11],
            vec![1.0 / 3.0, 7.25],
        )
        .unwrap();
        write_coefficient_file(&path, &cs, 40).unwrap();
        let contents = std::fs::read_to_string(&path).unwrap();
        assert!(contents.starts_with("chebyshev 2 40\n"));
        let (back, p) = read_coefficient_file(&path).unwrap();
        assert_eq!(p, 40);
        assert_eq!(back, cs);
        for (orig, round) in cs.u().iter().zip(back.u()) {
            assert_eq!(orig.to_bits(), round.to_bits());
        }
        std::fs::remove_file(&path).unwrap();
    }

    #[test]
    fn schedule_file_round_trip() {
        let dir = std::env::temp_dir().join("qsched_sched_files");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("sched.txt");
        let schedule = linear_schedule(0.05, 0.61, -0.02, 0.73, 9).unwrap();
        write_schedule_file(&path, &schedule).unwrap();
        let contents = std::fs::read_to_string(&path).unwrap();
        assert!(contents.starts_with("raw 9 9\n"));
        let back = read_schedule_file(&path).unwrap();
        assert_eq!(back, schedule);
        std::fs::remove_file(&path).unwrap();
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn prop_round_trip_recovers_coefficients(
            kind_idx in 0usize..3,
            p in 1usize..48,
            c_frac in 0.0f64..1.0,
            raw in proptest::collection::vec(-2.0f64..2.0, 16),
        ) {
            let kind = ALL_BASES[kind_idx];
            let c = 1 + ((p.min(8) - 1) as f64 * c_frac) as usize;
            let u: Vec<Real> = raw[..c].to_vec();
            let v: Vec<Real> = raw[8..8 + c].to_vec();
            let cs = CoefficientSchedule::new(kind, u.clone(), v.clone()).unwrap();
            let angles = coeffs_to_angles(&cs, p).unwrap();
            let fit = angles_to_coeffs(&angles, kind, c).unwrap();
            for (orig, back) in u.iter().zip(fit.coefficients.u()) {
                prop_assert!((orig - back).abs() < 1e-9);
            }
            for (orig, back) in v.iter().zip(fit.coefficients.v()) {
                prop_assert!((orig - back).abs() < 1e-9);
            }
        }

        #[test]
        fn prop_interpolation_depth_is_respected(
            p_new in 1usize..300,
            u0 in -1.0f64..1.0,
            v0 in -1.0f64..1.0,
        ) {
            let cs = CoefficientSchedule::new(
                BasisKind::ShiftedLegendre,
                vec![u0],
                vec![v0],
            ).unwrap();
            let s = interpolate(&cs, p_new).unwrap();
            prop_assert_eq!(s.depth(), p_new);
            prop_assert!(s.gammas().iter().all(|&g| g == u0));
            prop_assert!(s.betas().iter().all(|&b| b == v0));
        }
    }
}
