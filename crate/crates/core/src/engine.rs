//! Schedule optimizers: iterative interpolation and the two baselines.
//!
//! The iterative-interpolation loop keeps a padded coefficient vector as the
//! schedule's primary representation. Each stage optimizes the first 𝒞
//! coefficient pairs at the current depth with a budgeted simplex search,
//! grows 𝒞 after τ consecutive stages of sub-ε relative improvement, and
//! steps the depth by Δp by re-evaluating the (depth-free) coefficients on
//! the finer grid. The Fourier baseline is the same loop with 𝒞 pinned to p
//! and Δp = 1, so a freshly added pair starts at zero amplitude exactly as
//! the previous depth's schedule is extended.
//!
//! Every objective evaluation is one statevector run; the per-evaluation
//! depth log is the sole source of TNL = Σ_i i·f_eval^i accounting.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::time::Instant;

use crate::basis::BasisKind;
use crate::error::{Error, Result};
use crate::metrics::approximation_ratio;
use crate::optimize::{nelder_mead, SimplexOptions};
use crate::problems::CostSpectrum;
use crate::scalar::Real;
use crate::schedule::{
    angles_to_coeffs, coeffs_to_angles, linear_schedule, CoefficientSchedule, Schedule,
};
use crate::simulator::{expectation, ground_overlap, run_qaoa};

/// Linear-ramp parameters (a_β, b_β, a_γ, b_γ) used to seed every run.
///
/// The γ entries are expressed in units of the spectrum's [`gamma_scale`];
/// the engine multiplies them by that scale before use, so one default ramp
/// works across problems whose cost magnitudes differ by orders of
/// magnitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RampParams {
    pub a_beta: Real,
    pub b_beta: Real,
    pub a_gamma: Real,
    pub b_gamma: Real,
}

impl Default for RampParams {
    /// Monotone ramp of order-one magnitude; the first stage re-optimizes it.
    fn default() -> Self {
        Self {
            a_beta: 0.0,
            b_beta: 0.7,
            a_gamma: 0.0,
            b_gamma: 0.7,
        }
    }
}

/// Tolerances and per-stage evaluation caps for the coefficient optimizer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerSettings {
    pub param_tol: Real,
    pub obj_tol: Real,
    /// Per-stage evaluation cap is this many evaluations per tuned parameter
    /// (a stage tunes 2·𝒞 parameters).
    pub stage_evals_per_param: usize,
    pub initial_step: Real,
}

impl Default for OptimizerSettings {
    fn default() -> Self {
        Self {
            param_tol: 1e-4,
            obj_tol: 1e-6,
            stage_evals_per_param: 200,
            initial_step: 0.1,
        }
    }
}

impl OptimizerSettings {
    fn stage_cap(&self, c_active: usize) -> u64 {
        self.stage_evals_per_param as u64 * 2 * c_active as u64
    }
}

/// Per-qubit inverse energy width of a spectrum. The γ channel advances the
/// phase by γ·E per layer, so sensible γ magnitudes shrink as the cost
/// spectrum widens (LABS energies grow like N³, SK like √N·N). Initial
/// ramps and simplex steps for the γ coefficients are expressed in units of
/// this scale.
pub fn gamma_scale(spectrum: &CostSpectrum) -> Real {
    let width = spectrum.e_max() - spectrum.e_min();
    if width > 0.0 {
        spectrum.num_qubits() as Real / width
    } else {
        1.0
    }
}

/// Full configuration of an engine run.
#[derive(Debug, Clone, PartialEq)]
pub struct IIConfig {
    /// Starting depth.
    pub p0: usize,
    /// Depth step between stages.
    pub delta_p: usize,
    /// Largest depth a stage may run at.
    pub p_max: usize,
    /// Relative-improvement threshold ε for the patience counter.
    pub epsilon: Real,
    /// Initial number of tuned coefficient pairs 𝒞.
    pub c0: usize,
    /// How many pairs 𝒞 grows by when patience runs out.
    pub c_step: usize,
    /// Consecutive sub-ε stages required before 𝒞 grows.
    pub tau: usize,
    /// Stop once the stage AR reaches this value.
    pub ar_target: Option<Real>,
    /// Stop once the stage ground-state overlap reaches this value.
    pub overlap_target: Option<Real>,
    /// Hard cap on objective evaluations over the whole run.
    pub eval_budget: u64,
    pub basis: BasisKind,
    pub optimizer: OptimizerSettings,
    /// Recorded for provenance; the bundled simplex optimizer is
    /// deterministic, so the seed only selects problem instances upstream.
    pub seed: i64,
    pub init_ramp: RampParams,
    /// Pin 𝒞 to the current depth instead of growing it by patience
    /// (the Fourier-strategy baseline).
    pub track_depth: bool,
}

impl Default for IIConfig {
    fn default() -> Self {
        Self {
            p0: 3,
            delta_p: 5,
            p_max: 2000,
            epsilon: 1e-3,
            c0: 2,
            c_step: 2,
            tau: 5,
            ar_target: None,
            overlap_target: None,
            eval_budget: 40_000,
            basis: BasisKind::ShiftedLegendre,
            optimizer: OptimizerSettings::default(),
            seed: 0,
            init_ramp: RampParams::default(),
            track_depth: false,
        }
    }
}

impl IIConfig {
    pub fn validate(&self) -> Result<()> {
        if self.p0 == 0 {
            return Err(Error::InvalidInput("p0 must be at least 1".into()));
        }
        if self.p0 > self.p_max {
            return Err(Error::InvalidInput(format!(
                "p0 = {} exceeds p_max = {}",
                self.p0, self.p_max
            )));
        }
        if self.delta_p == 0 {
            return Err(Error::InvalidInput("delta_p must be at least 1".into()));
        }
        if self.c0 == 0 {
            return Err(Error::InvalidInput("c0 must be at least 1".into()));
        }
        if self.c_step == 0 {
            return Err(Error::InvalidInput("c_step must be at least 1".into()));
        }
        if self.tau == 0 {
            return Err(Error::InvalidInput("tau must be at least 1".into()));
        }
        if self.eval_budget == 0 {
            return Err(Error::InvalidInput("eval_budget must be at least 1".into()));
        }
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "epsilon must be finite and non-negative, got {}",
                self.epsilon
            )));
        }
        if self.ar_target.is_some() && self.overlap_target.is_some() {
            return Err(Error::InvalidInput(
                "set at most one of ar_target and overlap_target".into(),
            ));
        }
        for target in [self.ar_target, self.overlap_target].into_iter().flatten() {
            if !(target > 0.0 && target <= 1.0) {
                return Err(Error::InvalidInput(format!(
                    "target {target} outside (0, 1]"
                )));
            }
        }
        if let Some(cap) = self.basis.max_coefficients() {
            if self.c0 > cap {
                return Err(Error::InvalidInput(format!(
                    "c0 = {} exceeds the {} basis size {cap}",
                    self.c0, self.basis
                )));
            }
        } else if !self.track_depth && self.c0 > self.p0 {
            return Err(Error::InvalidInput(format!(
                "c0 = {} exceeds p0 = {} (the initial fit needs C <= p)",
                self.c0, self.p0
            )));
        }
        if !(self.optimizer.param_tol > 0.0)
            || !(self.optimizer.obj_tol >= 0.0)
            || self.optimizer.stage_evals_per_param == 0
            || !(self.optimizer.initial_step > 0.0)
        {
            return Err(Error::InvalidInput("bad optimizer settings".into()));
        }
        Ok(())
    }
}

/// Energy-minimization objective with exact evaluation accounting. The
/// per-evaluation depth log is the only input to TNL bookkeeping.
pub struct Objective<'a> {
    spectrum: &'a CostSpectrum,
    eval_depths: Vec<u32>,
}

impl<'a> Objective<'a> {
    pub fn new(spectrum: &'a CostSpectrum) -> Self {
        Self {
            spectrum,
            eval_depths: Vec::new(),
        }
    }

    pub fn spectrum(&self) -> &'a CostSpectrum {
        self.spectrum
    }

    /// Number of counted evaluations so far.
    pub fn count(&self) -> u64 {
        self.eval_depths.len() as u64
    }

    /// Depth of every counted evaluation, in order.
    pub fn eval_depths(&self) -> &[u32] {
        &self.eval_depths
    }

    /// One counted evaluation: run the circuit, return ⟨H_C⟩.
    pub fn evaluate(&mut self, schedule: &Schedule) -> Result<Real> {
        let state = run_qaoa(self.spectrum, schedule)?;
        let energy = expectation(&state, self.spectrum)?;
        self.eval_depths.push(schedule.depth() as u32);
        Ok(energy)
    }
}

/// Result of one budgeted coefficient-optimization stage.
#[derive(Debug, Clone)]
pub struct StageOutcome {
    pub coefficients: CoefficientSchedule,
    pub evals_used: u64,
    pub best_value: Real,
    /// Objective at the stage's starting point (the interpolated schedule).
    pub start_value: Real,
    /// The optimizer never saw a finite value; the starting point was kept.
    pub degraded: bool,
}

/// Optimizes the first `c_active` coefficient pairs of `cs` at depth `p`,
/// holding higher pairs fixed. Returns the best point seen, never worse than
/// the start, using at most `stage_budget` objective evaluations.
pub fn optimize_coefficients(
    objective: &mut Objective,
    cs: &CoefficientSchedule,
    c_active: usize,
    p: usize,
    stage_budget: u64,
    settings: &OptimizerSettings,
) -> Result<StageOutcome> {
    if c_active == 0 || c_active > cs.len() {
        return Err(Error::InvalidInput(format!(
            "c_active = {c_active} outside 1..={}",
            cs.len()
        )));
    }
    if stage_budget == 0 {
        return Err(Error::InvalidInput("stage budget must be at least 1".into()));
    }
    let base = cs.clone();
    let x0 = cs.active_prefix(c_active);
    // γ-coefficient steps are scaled to the spectrum's energy width.
    let mut steps = vec![settings.initial_step * gamma_scale(objective.spectrum()); c_active];
    steps.resize(2 * c_active, settings.initial_step);
    let mut start_value: Option<Real> = None;
    let outcome = nelder_mead(
        |x: &[Real]| {
            let mut candidate = base.clone();
            candidate.set_active_prefix(x);
            let value = coeffs_to_angles(&candidate, p)
                .and_then(|schedule| objective.evaluate(&schedule))
                .unwrap_or(Real::NAN);
            if start_value.is_none() {
                start_value = Some(value);
            }
            value
        },
        &x0,
        &steps,
        &SimplexOptions {
            param_tol: settings.param_tol,
            obj_tol: settings.obj_tol,
            max_evals: stage_budget,
        },
    );
    let start_value = start_value.unwrap_or(Real::NAN);
    let mut coefficients = base;
    let (best_value, degraded) = if outcome.failed {
        (start_value, true)
    } else {
        coefficients.set_active_prefix(&outcome.x);
        (outcome.value, false)
    };
    Ok(StageOutcome {
        coefficients,
        evals_used: outcome.evals,
        best_value,
        start_value,
        degraded,
    })
}

/// How a run terminated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TerminalStatus {
    ReachedPMax,
    ReachedTarget,
    BudgetExhausted,
}

impl TerminalStatus {
    pub fn token(self) -> &'static str {
        match self {
            TerminalStatus::ReachedPMax => "reached_p_max",
            TerminalStatus::ReachedTarget => "reached_target",
            TerminalStatus::BudgetExhausted => "budget_exhausted",
        }
    }
}

impl std::fmt::Display for TerminalStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.token())
    }
}

/// Everything recorded about one outer-loop stage.
#[derive(Debug, Clone)]
pub struct StageRecord {
    pub stage: usize,
    pub p: usize,
    pub c_active: usize,
    pub f_evals: u64,
    pub start_energy: Real,
    pub best_energy: Real,
    pub ar: Real,
    pub overlap: Real,
    pub tnl_cumulative: u64,
    /// Seconds spent in the stage's optimizer; excluded from CSV exports so
    /// identical runs produce identical files.
    pub wall_time: Real,
    /// Coefficient state after the stage's optimization (padded).
    pub coefficients: CoefficientSchedule,
    /// The interpolated schedule the stage started from.
    pub init_schedule: Schedule,
    pub degraded: bool,
}

/// Per-stage records of an engine run plus the raw evaluation log.
#[derive(Debug, Clone)]
pub struct RunTrace {
    pub records: Vec<StageRecord>,
    pub status: TerminalStatus,
    /// Depth of every counted objective evaluation, in order.
    pub eval_depths: Vec<u32>,
}

impl RunTrace {
    /// Cumulative TNL of the final stage.
    pub fn tnl(&self) -> u64 {
        self.records.last().map_or(0, |r| r.tnl_cumulative)
    }

    /// Independent TNL recomputation from the raw evaluation log.
    pub fn tnl_from_eval_log(&self) -> u64 {
        self.eval_depths.iter().map(|&p| p as u64).sum()
    }

    pub fn final_record(&self) -> Option<&StageRecord> {
        self.records.last()
    }

    /// The deterministic CSV export (no timing columns).
    pub fn to_csv(&self) -> String {
        let mut out = String::from("stage,p,c,f_evals,best_energy,ar,overlap,tnl_cumulative,status\n");
        for (idx, r) in self.records.iter().enumerate() {
            let status = if idx + 1 == self.records.len() {
                self.status.token()
            } else {
                "running"
            };
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{}\n",
                r.stage,
                r.p,
                r.c_active,
                r.f_evals,
                r.best_energy,
                r.ar,
                r.overlap,
                r.tnl_cumulative,
                status
            ));
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        w.write_all(self.to_csv().as_bytes())?;
        w.flush()?;
        Ok(())
    }
}

/// Output of an engine run: the schedule at the last completed depth, the
/// final coefficients, and the full trace.
#[derive(Debug, Clone)]
pub struct EngineRun {
    pub schedule: Schedule,
    pub coefficients: CoefficientSchedule,
    pub trace: RunTrace,
}

/// Fits the initialization ramp in the chosen basis with `c` coefficient
/// pairs. The linear-ramp basis holds the ramp parameters directly.
pub fn initialize_schedule(
    p0: usize,
    basis: BasisKind,
    c: usize,
    ramp: &RampParams,
) -> Result<CoefficientSchedule> {
    if basis == BasisKind::LinearRamp && c == 2 {
        return CoefficientSchedule::new(
            basis,
            vec![ramp.a_gamma, ramp.b_gamma],
            vec![ramp.a_beta, ramp.b_beta],
        );
    }
    let schedule = linear_schedule(ramp.a_beta, ramp.b_beta, ramp.a_gamma, ramp.b_gamma, p0)?;
    Ok(angles_to_coeffs(&schedule, basis, c)?.coefficients)
}

/// True when the patience counter has run out and 𝒞 should grow. A stage at
/// or above the improvement threshold resets the counter.
fn update_patience(patience: &mut usize, below_threshold: bool, tau: usize) -> bool {
    if below_threshold {
        *patience += 1;
        if *patience >= tau {
            *patience = 0;
            return true;
        }
    } else {
        *patience = 0;
    }
    false
}

fn run_engine(spectrum: &CostSpectrum, config: &IIConfig) -> Result<EngineRun> {
    config.validate()?;
    let mut objective = Objective::new(spectrum);
    let mut c_active = if config.track_depth { config.p0 } else { config.c0 };
    let scale = gamma_scale(spectrum);
    let ramp = RampParams {
        a_gamma: config.init_ramp.a_gamma * scale,
        b_gamma: config.init_ramp.b_gamma * scale,
        ..config.init_ramp
    };
    let mut cs = initialize_schedule(config.p0, config.basis, c_active, &ramp)?;
    let mut p = config.p0;
    let mut patience = 0usize;
    let mut tnl = 0u64;
    let mut records = Vec::new();
    let mut stage = 0usize;
    let mut running_best: Option<Real> = None;
    let status;

    loop {
        stage += 1;
        let init_schedule = coeffs_to_angles(&cs, p)?;
        let remaining = config.eval_budget.saturating_sub(objective.count());
        if remaining == 0 {
            status = TerminalStatus::BudgetExhausted;
            break;
        }
        let stage_budget = config.optimizer.stage_cap(c_active).min(remaining);
        let started = Instant::now();
        let outcome = optimize_coefficients(
            &mut objective,
            &cs,
            c_active,
            p,
            stage_budget,
            &config.optimizer,
        )?;
        let wall_time = started.elapsed().as_secs_f64();
        cs = outcome.coefficients;
        tnl += p as u64 * outcome.evals_used;

        // Derived metrics once per stage; never charged to the budget.
        let (ar, overlap) = if outcome.degraded {
            (Real::NAN, Real::NAN)
        } else {
            let state = run_qaoa(spectrum, &coeffs_to_angles(&cs, p)?)?;
            let overlap = ground_overlap(&state, spectrum)?;
            let ar = approximation_ratio(outcome.best_value, spectrum, spectrum.kind())?;
            (ar, overlap)
        };
        records.push(StageRecord {
            stage,
            p,
            c_active,
            f_evals: outcome.evals_used,
            start_energy: outcome.start_value,
            best_energy: outcome.best_value,
            ar,
            overlap,
            tnl_cumulative: tnl,
            wall_time,
            coefficients: cs.clone(),
            init_schedule,
            degraded: outcome.degraded,
        });

        let target_reached = match (config.ar_target, config.overlap_target) {
            (Some(t), _) => ar >= t,
            (None, Some(t)) => overlap >= t,
            (None, None) => false,
        };
        if target_reached {
            status = TerminalStatus::ReachedTarget;
            break;
        }
        if p + config.delta_p > config.p_max {
            status = TerminalStatus::ReachedPMax;
            break;
        }
        if objective.count() >= config.eval_budget {
            status = TerminalStatus::BudgetExhausted;
            break;
        }

        if config.track_depth {
            c_active = p + config.delta_p;
        } else {
            // Improvement of this stage's best over the run's best so far
            // (the first stage measures against its own start). A stage
            // that regresses, or only claws back interpolation damage
            // without beating the historical best, counts as stalled;
            // oscillating around a plateau therefore cannot reset patience.
            let reference = running_best.unwrap_or(outcome.start_value);
            let delta_perf = if reference.abs() < 1e-12 {
                0.0
            } else {
                ((reference - outcome.best_value) / reference.abs()).max(0.0)
            };
            if update_patience(&mut patience, delta_perf < config.epsilon, config.tau) {
                c_active += config.c_step;
                if let Some(cap) = config.basis.max_coefficients() {
                    c_active = c_active.min(cap);
                }
            }
        }
        running_best = Some(running_best.map_or(outcome.best_value, |b: Real| {
            b.min(outcome.best_value)
        }));
        cs.pad_to(c_active)?;
        p += config.delta_p;
    }

    let last_p = records.last().map_or(config.p0, |r: &StageRecord| r.p);
    let schedule = coeffs_to_angles(&cs, last_p)?;
    Ok(EngineRun {
        schedule,
        coefficients: cs,
        trace: RunTrace {
            records,
            status,
            eval_depths: objective.eval_depths,
        },
    })
}

/// Iterative interpolation (the adaptive-𝒞, Δp-stepping loop).
pub fn ii_run(spectrum: &CostSpectrum, config: &IIConfig) -> Result<EngineRun> {
    run_engine(spectrum, config)
}

/// The Fourier-strategy baseline: trigonometric basis, depth steps of 1, all
/// p coefficient pairs optimized at depth p, each new highest-frequency pair
/// starting at zero amplitude.
pub fn fourier_baseline_run(spectrum: &CostSpectrum, config: &IIConfig) -> Result<EngineRun> {
    let mut baseline = config.clone();
    baseline.basis = BasisKind::FourierHalfWave;
    baseline.delta_p = 1;
    baseline.track_depth = true;
    run_engine(spectrum, &baseline)
}

/// The four-parameter baseline: optimizes (a_β, b_β, a_γ, b_γ) at fixed
/// depth `p` under the same optimizer contract.
pub fn linear_baseline_run(
    spectrum: &CostSpectrum,
    p: usize,
    eval_budget: u64,
    optimizer: &OptimizerSettings,
    init_ramp: &RampParams,
) -> Result<EngineRun> {
    let config = IIConfig {
        p0: p,
        delta_p: 1,
        p_max: p,
        c0: 2,
        basis: BasisKind::LinearRamp,
        eval_budget,
        optimizer: *optimizer,
        init_ramp: *init_ramp,
        ..IIConfig::default()
    };
    run_engine(spectrum, &config)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::BasisKind;
    use crate::problems::{build_labs_spectrum, build_sk_spectrum, SkInstance};
    use crate::schedule::zhou_fourier_angles;

    fn quick_config() -> IIConfig {
        IIConfig {
            p0: 1,
            delta_p: 1,
            p_max: 3,
            c0: 1,
            eval_budget: 500,
            optimizer: OptimizerSettings {
                stage_evals_per_param: 30,
                ..OptimizerSettings::default()
            },
            ..IIConfig::default()
        }
    }

    #[test]
    fn config_validation() {
        assert!(IIConfig::default().validate().is_ok());
        assert!(IIConfig {
            p0: 0,
            ..IIConfig::default()
        }
        .validate()
        .is_err());
        assert!(IIConfig {
            p0: 10,
            p_max: 5,
            ..IIConfig::default()
        }
        .validate()
        .is_err());
        assert!(IIConfig {
            ar_target: Some(0.9),
            overlap_target: Some(0.5),
            ..IIConfig::default()
        }
        .validate()
        .is_err());
        assert!(IIConfig {
            c0: 4,
            p0: 3,
            ..IIConfig::default()
        }
        .validate()
        .is_err());
    }

    #[test]
    fn stage_budget_of_one_returns_start() {
        let spectrum = build_labs_spectrum(3).unwrap();
        let mut objective = Objective::new(&spectrum);
        let cs = initialize_schedule(2, BasisKind::ShiftedLegendre, 2, &RampParams::default())
            .unwrap();
        let outcome =
            optimize_coefficients(&mut objective, &cs, 2, 2, 1, &OptimizerSettings::default())
                .unwrap();
        assert_eq!(outcome.evals_used, 1);
        assert_eq!(outcome.coefficients, cs);
        assert_eq!(outcome.best_value, outcome.start_value);
        assert_eq!(objective.count(), 1);
        assert_eq!(objective.eval_depths(), &[2]);
    }

    #[test]
    fn stage_never_worsens_the_objective() {
        let spectrum = build_sk_spectrum(6, 0).unwrap();
        let mut objective = Objective::new(&spectrum);
        let cs = initialize_schedule(4, BasisKind::ShiftedLegendre, 2, &RampParams::default())
            .unwrap();
        let outcome =
            optimize_coefficients(&mut objective, &cs, 2, 4, 300, &OptimizerSettings::default())
                .unwrap();
        assert!(outcome.best_value <= outcome.start_value);
        assert!(outcome.evals_used <= 300);
    }

    #[test]
    fn single_stage_run_at_p0_equals_p_max() {
        let spectrum = build_labs_spectrum(3).unwrap();
        let config = IIConfig {
            p0: 2,
            p_max: 2,
            c0: 2,
            eval_budget: 100,
            ..IIConfig::default()
        };
        let run = ii_run(&spectrum, &config).unwrap();
        assert_eq!(run.trace.records.len(), 1);
        assert_eq!(run.trace.status, TerminalStatus::ReachedPMax);
        assert_eq!(run.schedule.depth(), 2);
    }

    #[test]
    fn small_sk_reaches_high_overlap() {
        // A 2-spin instance is solvable at depth 1 (grid-search verified in
        // the simulator tests); the engine should find it by p <= 4.
        let instance = SkInstance::with_couplings(2, vec![1.0], 0).unwrap();
        let energies = crate::problems::fill_energies(2, |x| instance.energy_of_index(x));
        let spectrum = crate::problems::CostSpectrum::from_energies(
            2,
            energies,
            crate::problems::ProblemKind::SherringtonKirkpatrick,
            0,
        )
        .unwrap();
        let config = IIConfig {
            p0: 1,
            delta_p: 1,
            p_max: 4,
            c0: 1,
            c_step: 1,
            tau: 2,
            overlap_target: Some(0.99),
            eval_budget: 4000,
            ..IIConfig::default()
        };
        let run = ii_run(&spectrum, &config).unwrap();
        assert_eq!(run.trace.status, TerminalStatus::ReachedTarget);
        let last = run.trace.final_record().unwrap();
        assert!(last.overlap >= 0.99, "overlap {}", last.overlap);
        assert!(last.p <= 4);
    }

    #[test]
    fn budget_exhaustion_is_a_status_not_an_error() {
        let spectrum = build_labs_spectrum(3).unwrap();
        let config = IIConfig {
            p0: 1,
            delta_p: 1,
            p_max: 1000,
            c0: 1,
            eval_budget: 7,
            ..IIConfig::default()
        };
        let run = ii_run(&spectrum, &config).unwrap();
        assert_eq!(run.trace.status, TerminalStatus::BudgetExhausted);
        assert!(run.trace.eval_depths.len() as u64 <= 7);
        assert!(!run.trace.records.is_empty());
    }

    #[test]
    fn hard_budget_ceiling() {
        let spectrum = build_labs_spectrum(4).unwrap();
        for budget in [1u64, 13, 137] {
            let config = IIConfig {
                p0: 1,
                delta_p: 1,
                p_max: 500,
                c0: 1,
                eval_budget: budget,
                ..IIConfig::default()
            };
            let run = ii_run(&spectrum, &config).unwrap();
            assert!(run.trace.eval_depths.len() as u64 <= budget);
        }
    }

    #[test]
    fn patience_counter_semantics() {
        let tau = 3;
        let mut patience = 0;
        assert!(!update_patience(&mut patience, true, tau));
        assert!(!update_patience(&mut patience, true, tau));
        // A good stage resets the streak.
        assert!(!update_patience(&mut patience, false, tau));
        assert_eq!(patience, 0);
        assert!(!update_patience(&mut patience, true, tau));
        assert!(!update_patience(&mut patience, true, tau));
        assert!(update_patience(&mut patience, true, tau));
        assert_eq!(patience, 0);
    }

    #[test]
    fn coefficients_grow_every_tau_stages_when_improvement_stalls() {
        let spectrum = build_labs_spectrum(3).unwrap();
        // ε so large that every stage counts as stalled.
        let config = IIConfig {
            p0: 1,
            delta_p: 1,
            p_max: 6,
            c0: 1,
            c_step: 3,
            tau: 2,
            epsilon: 1e9,
            eval_budget: 100_000,
            optimizer: OptimizerSettings {
                stage_evals_per_param: 3,
                ..OptimizerSettings::default()
            },
            ..IIConfig::default()
        };
        let run = ii_run(&spectrum, &config).unwrap();
        let cs: Vec<usize> = run.trace.records.iter().map(|r| r.c_active).collect();
        assert_eq!(cs, vec![1, 1, 4, 4, 7, 7]);
    }

    #[test]
    fn epsilon_zero_never_grows_coefficients() {
        let spectrum = build_labs_spectrum(3).unwrap();
        let config = IIConfig {
            epsilon: 0.0,
            p0: 1,
            delta_p: 1,
            p_max: 5,
            c0: 1,
            eval_budget: 2000,
            optimizer: OptimizerSettings {
                stage_evals_per_param: 5,
                ..OptimizerSettings::default()
            },
            ..IIConfig::default()
        };
        let run = ii_run(&spectrum, &config).unwrap();
        assert!(run.trace.records.iter().all(|r| r.c_active == 1));
    }

    #[test]
    fn tnl_bookkeeping_is_exact() {
        let spectrum = build_sk_spectrum(4, 5).unwrap();
        let run = ii_run(&spectrum, &quick_config()).unwrap();
        let trace = &run.trace;
        let from_records: u64 = trace
            .records
            .iter()
            .map(|r| r.p as u64 * r.f_evals)
            .sum();
        assert_eq!(trace.tnl(), from_records);
        assert_eq!(trace.tnl(), trace.tnl_from_eval_log());
        let total_evals: u64 = trace.records.iter().map(|r| r.f_evals).sum();
        assert_eq!(total_evals, trace.eval_depths.len() as u64);
    }

    #[test]
    fn deterministic_traces() {
        let spectrum = build_sk_spectrum(5, 9).unwrap();
        let a = ii_run(&spectrum, &quick_config()).unwrap();
        let b = ii_run(&spectrum, &quick_config()).unwrap();
        assert_eq!(a.trace.to_csv(), b.trace.to_csv());
        assert_eq!(a.schedule, b.schedule);
        let bits = |s: &Schedule| -> Vec<u64> {
            s.gammas()
                .iter()
                .chain(s.betas())
                .map(|v| v.to_bits())
                .collect()
        };
        assert_eq!(bits(&a.schedule), bits(&b.schedule));
    }

    #[test]
    fn fourier_baseline_single_depth() {
        let spectrum = build_labs_spectrum(3).unwrap();
        let config = IIConfig {
            p0: 1,
            p_max: 1,
            eval_budget: 200,
            ..IIConfig::default()
        };
        let run = fourier_baseline_run(&spectrum, &config).unwrap();
        assert_eq!(run.trace.records.len(), 1);
        assert_eq!(run.trace.records[0].c_active, 1);
        assert_eq!(run.trace.status, TerminalStatus::ReachedPMax);
    }

    #[test]
    fn fourier_baseline_initializes_from_previous_depth() {
        let spectrum = build_sk_spectrum(4, 2).unwrap();
        let config = IIConfig {
            p0: 1,
            p_max: 5,
            eval_budget: 3000,
            optimizer: OptimizerSettings {
                stage_evals_per_param: 20,
                ..OptimizerSettings::default()
            },
            ..IIConfig::default()
        };
        let run = fourier_baseline_run(&spectrum, &config).unwrap();
        assert_eq!(run.trace.records.len(), 5);
        for pair in run.trace.records.windows(2) {
            let (prev, curr) = (&pair[0], &pair[1]);
            assert_eq!(curr.p, prev.p + 1);
            assert_eq!(curr.c_active, curr.p);
            // The stage's starting schedule is the previous coefficients
            // extended by one zero-amplitude pair.
            let mut u = prev.coefficients.u().to_vec();
            let mut v = prev.coefficients.v().to_vec();
            u.push(0.0);
            v.push(0.0);
            let expected = zhou_fourier_angles(&u, &v, curr.p).unwrap();
            assert_eq!(curr.init_schedule, expected);
            // And its recorded objective matches an uncounted re-evaluation.
            let mut check = Objective::new(&spectrum);
            let reevaluated = check.evaluate(&expected).unwrap();
            assert_eq!(reevaluated.to_bits(), curr.start_energy.to_bits());
        }
    }

    #[test]
    fn track_depth_run_equals_fourier_baseline() {
        let spectrum = build_sk_spectrum(4, 7).unwrap();
        let config = IIConfig {
            p0: 1,
            p_max: 4,
            eval_budget: 1500,
            epsilon: 0.0,
            optimizer: OptimizerSettings {
                stage_evals_per_param: 15,
                ..OptimizerSettings::default()
            },
            ..IIConfig::default()
        };
        let mut as_ii = config.clone();
        as_ii.basis = BasisKind::FourierHalfWave;
        as_ii.delta_p = 1;
        as_ii.track_depth = true;
        let a = ii_run(&spectrum, &as_ii).unwrap();
        let b = fourier_baseline_run(&spectrum, &config).unwrap();
        assert_eq!(a.trace.to_csv(), b.trace.to_csv());
        for (ra, rb) in a.trace.records.iter().zip(&b.trace.records) {
            assert_eq!(ra.init_schedule, rb.init_schedule);
            assert_eq!(ra.coefficients, rb.coefficients);
        }
    }

    #[test]
    fn linear_baseline_keeps_exact_linear_form() {
        let spectrum = build_sk_spectrum(5, 3).unwrap();
        let run = linear_baseline_run(
            &spectrum,
            10,
            600,
            &OptimizerSettings::default(),
            &RampParams::default(),
        )
        .unwrap();
        assert_eq!(run.trace.records.len(), 1);
        assert_eq!(run.schedule.depth(), 10);
        // The optimized schedule is linear by construction: refitting the
        // two-function ramp family reproduces it with zero residual.
        let fit = angles_to_coeffs(&run.schedule, BasisKind::LinearRamp, 2).unwrap();
        assert!(fit.gamma_residual < 1e-12);
        assert!(fit.beta_residual < 1e-12);
    }

    #[test]
    fn linear_baseline_budget_one_returns_the_ramp() {
        let spectrum = build_sk_spectrum(4, 1).unwrap();
        let ramp = RampParams::default();
        let run =
            linear_baseline_run(&spectrum, 6, 1, &OptimizerSettings::default(), &ramp).unwrap();
        let scale = gamma_scale(&spectrum);
        let expected = linear_schedule(
            ramp.a_beta,
            ramp.b_beta,
            ramp.a_gamma * scale,
            ramp.b_gamma * scale,
            6,
        )
        .unwrap();
        assert_eq!(run.schedule, expected);
        assert_eq!(run.trace.records[0].f_evals, 1);
    }

    #[test]
    fn initialize_schedule_represents_the_ramp() {
        let ramp = RampParams::default();
        let cs = initialize_schedule(5, BasisKind::ShiftedLegendre, 2, &ramp).unwrap();
        assert_eq!(cs.len(), 2);
        let rebuilt = coeffs_to_angles(&cs, 5).unwrap();
        let expected = linear_schedule(0.0, 0.7, 0.0, 0.7, 5).unwrap();
        for (a, b) in rebuilt
            .gammas()
            .iter()
            .zip(expected.gammas())
            .chain(rebuilt.betas().iter().zip(expected.betas()))
        {
            assert!((a - b).abs() < 1e-12);
        }

        let zero = RampParams {
            a_beta: 0.0,
            b_beta: 0.0,
            a_gamma: 0.0,
            b_gamma: 0.0,
        };
        let cs0 = initialize_schedule(4, BasisKind::ShiftedLegendre, 3, &zero).unwrap();
        assert!(cs0.u().iter().chain(cs0.v()).all(|c| c.abs() < 1e-14));
    }

    #[test]
    fn trace_csv_shape() {
        let spectrum = build_labs_spectrum(3).unwrap();
        let run = ii_run(&spectrum, &quick_config()).unwrap();
        let csv = run.trace.to_csv();
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "stage,p,c,f_evals,best_energy,ar,overlap,tnl_cumulative,status"
        );
        let body: Vec<&str> = lines.collect();
        assert_eq!(body.len(), run.trace.records.len());
        assert!(body.last().unwrap().ends_with(run.trace.status.token()));
        for row in &body[..body.len() - 1] {
            assert!(row.ends_with("running"));
        }
    }
}
