//! Experiment-runner library behind the `qsched` binary.
//!
//! Everything the binary does is exposed as plain functions over an
//! [`ExperimentConfig`], so integration tests drive the same code paths
//! in-process. All outputs are deterministic in (config, sizes, seeds):
//! worker count never changes a byte, and no timing data enters any file.

pub mod config;

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use qsched::engine::{
    fourier_baseline_run, ii_run, linear_baseline_run, EngineRun, IIConfig, TerminalStatus,
};
use qsched::error::{Error, Result};
use qsched::metrics::{fit_scaling, ScalingModel, TraceMetric};
use qsched::problems::{
    build_labs_spectrum_with_cap, build_portfolio_spectrum_with_cap, build_sk_spectrum_with_cap,
    CostSpectrum, PortfolioInstance, ProblemKind,
};
use qsched::schedule::write_schedule_file;
use qsched::{Real, DEFAULT_QUBIT_CAP};

/// Which optimizer a run uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Ii,
    Fourier,
    Linear,
}

impl Method {
    pub fn token(self) -> &'static str {
        match self {
            Method::Ii => "ii",
            Method::Fourier => "fourier",
            Method::Linear => "linear",
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.token())
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ii" => Ok(Method::Ii),
            "fourier" => Ok(Method::Fourier),
            "linear" => Ok(Method::Linear),
            other => Err(Error::Parse(format!(
                "unknown method {other:?} (expected ii, fourier or linear)"
            ))),
        }
    }
}

/// One experiment: a problem family, the sizes and seeds to cover, the
/// optimizer, and the engine configuration shared by every run.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub problem: ProblemKind,
    pub sizes: Vec<usize>,
    pub seeds: Vec<i64>,
    pub method: Method,
    pub engine: IIConfig,
    pub out_dir: PathBuf,
    pub workers: usize,
    pub cap: usize,
    /// Portfolio cardinality K; defaults to ⌈n/2⌉ per size.
    pub cardinality: Option<usize>,
    /// Portfolio risk trade-off q.
    pub risk_tradeoff: Real,
}

impl ExperimentConfig {
    pub fn new(problem: ProblemKind, method: Method) -> Self {
        Self {
            problem,
            sizes: Vec::new(),
            seeds: vec![0],
            method,
            engine: IIConfig::default(),
            out_dir: PathBuf::from("."),
            workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
            cap: DEFAULT_QUBIT_CAP,
            cardinality: None,
            risk_tradeoff: 0.5,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.sizes.is_empty() {
            return Err(Error::InvalidInput("no problem sizes given".into()));
        }
        if self.seeds.is_empty() {
            return Err(Error::InvalidInput("seed range is empty".into()));
        }
        if self.workers == 0 {
            return Err(Error::InvalidInput("need at least one worker".into()));
        }
        // Validate what will actually run: the baselines override some
        // engine fields before starting.
        let mut engine = self.engine.clone();
        match self.method {
            Method::Linear => {
                engine.p0 = engine.p_max;
                engine.basis = qsched::basis::BasisKind::LinearRamp;
                engine.c0 = 2;
            }
            Method::Fourier => {
                engine.basis = qsched::basis::BasisKind::FourierHalfWave;
                engine.delta_p = 1;
                engine.track_depth = true;
            }
            Method::Ii => {}
        }
        engine.validate()
    }

    fn cardinality_for(&self, n: usize) -> usize {
        self.cardinality.unwrap_or_else(|| n.div_ceil(2))
    }
}

/// Builds the spectrum for one (problem, n, seed) cell.
pub fn build_spectrum(cfg: &ExperimentConfig, n: usize, seed: i64) -> Result<CostSpectrum> {
    match cfg.problem {
        ProblemKind::Labs => build_labs_spectrum_with_cap(n, cfg.cap),
        ProblemKind::SherringtonKirkpatrick => build_sk_spectrum_with_cap(n, seed, cfg.cap),
        ProblemKind::Portfolio => {
            let instance = PortfolioInstance::generate(
                n,
                seed,
                cfg.risk_tradeoff,
                cfg.cardinality_for(n),
            )?;
            build_portfolio_spectrum_with_cap(&instance, cfg.cap)
        }
        ProblemKind::Custom => Err(Error::InvalidInput(
            "custom spectra cannot be generated; load them from a file".into(),
        )),
    }
}

/// Spectrum file name: LABS has a single instance per size, the seeded
/// problems carry their seed.
pub fn spectrum_filename(problem: ProblemKind, n: usize, seed: i64) -> String {
    match problem {
        ProblemKind::Labs => format!("labs_n{n}.qspc"),
        _ => format!("{}_n{n}_s{seed}.qspc", problem.short_name()),
    }
}

fn run_stem(problem: ProblemKind, n: usize, seed: i64, method: Method) -> String {
    format!("{}_n{n}_s{seed}_{method}", problem.short_name())
}

/// Executes one engine run with the configured method.
pub fn execute_run(
    spectrum: &CostSpectrum,
    method: Method,
    engine: &IIConfig,
) -> Result<EngineRun> {
    match method {
        Method::Ii => ii_run(spectrum, engine),
        Method::Fourier => fourier_baseline_run(spectrum, engine),
        Method::Linear => linear_baseline_run(
            spectrum,
            engine.p_max,
            engine.eval_budget,
            &engine.optimizer,
            &engine.init_ramp,
        ),
    }
}

/// `generate`: writes one spectrum file per (size, seed) cell.
pub fn cmd_generate(cfg: &ExperimentConfig) -> Result<Vec<PathBuf>> {
    cfg.validate()?;
    std::fs::create_dir_all(&cfg.out_dir)?;
    let mut cells: Vec<(usize, i64)> = Vec::new();
    for &n in &cfg.sizes {
        match cfg.problem {
            // One instance per size, whatever the seed list says.
            ProblemKind::Labs => cells.push((n, 0)),
            _ => cells.extend(cfg.seeds.iter().map(|&s| (n, s))),
        }
    }
    let mut paths = Vec::with_capacity(cells.len());
    for (n, seed) in cells {
        let spectrum = build_spectrum(cfg, n, seed)?;
        let path = cfg.out_dir.join(spectrum_filename(cfg.problem, n, seed));
        spectrum.write_binary(&path)?;
        paths.push(path);
    }
    Ok(paths)
}

/// Output of a single `run` invocation.
#[derive(Debug)]
pub struct RunOutput {
    pub trace_path: PathBuf,
    pub schedule_path: PathBuf,
    pub status: TerminalStatus,
    pub run: EngineRun,
}

/// `run`: one (n, seed, method) cell. The spectrum is generated on the fly
/// unless `spectrum_file` points at an exported one.
pub fn cmd_run(cfg: &ExperimentConfig, spectrum_file: Option<&Path>) -> Result<RunOutput> {
    cfg.validate()?;
    if cfg.sizes.len() != 1 || cfg.seeds.len() != 1 {
        return Err(Error::InvalidInput(
            "run takes exactly one size and one seed (use sweep for ranges)".into(),
        ));
    }
    std::fs::create_dir_all(&cfg.out_dir)?;
    let (n, seed) = (cfg.sizes[0], cfg.seeds[0]);
    let spectrum = match spectrum_file {
        Some(path) => CostSpectrum::read_binary(path)?,
        None => build_spectrum(cfg, n, seed)?,
    };
    if spectrum.num_qubits() != n {
        return Err(Error::DimensionMismatch(format!(
            "spectrum has {} qubits, expected n = {n}",
            spectrum.num_qubits()
        )));
    }
    let mut engine = cfg.engine.clone();
    engine.seed = seed;
    let run = execute_run(&spectrum, cfg.method, &engine)?;
    let stem = run_stem(cfg.problem, n, seed, cfg.method);
    let trace_path = cfg.out_dir.join(format!("{stem}_trace.csv"));
    run.trace.write_csv(&trace_path)?;
    let schedule_path = cfg.out_dir.join(format!("{stem}_schedule.txt"));
    write_schedule_file(&schedule_path, &run.schedule)?;
    Ok(RunOutput {
        trace_path,
        schedule_path,
        status: run.trace.status,
        run,
    })
}

/// One long-form result row of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub problem: ProblemKind,
    pub n: usize,
    pub seed: i64,
    pub method: Method,
    pub depth_to_threshold: Option<usize>,
    pub tnl_at_target: Option<u64>,
    pub ar_final: Option<Real>,
    pub overlap_final: Option<Real>,
    pub status: String,
}

impl SweepRow {
    fn to_csv_line(&self) -> String {
        let opt_usize = |v: &Option<usize>| v.map_or(String::new(), |x| x.to_string());
        let opt_u64 = |v: &Option<u64>| v.map_or(String::new(), |x| x.to_string());
        let opt_real = |v: &Option<Real>| v.map_or(String::new(), |x| x.to_string());
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.problem,
            self.n,
            self.seed,
            self.method,
            opt_usize(&self.depth_to_threshold),
            opt_u64(&self.tnl_at_target),
            opt_real(&self.ar_final),
            opt_real(&self.overlap_final),
            self.status
        )
    }
}

pub const SWEEP_HEADER: &str =
    "problem,n,seed,method,depth_to_threshold,tnl_at_target,ar_final,overlap_final,status";

/// The sweep's threshold target, taken from whichever engine target is set.
fn sweep_target(engine: &IIConfig) -> Option<(TraceMetric, Real)> {
    engine
        .ar_target
        .map(|t| (TraceMetric::Ar, t))
        .or_else(|| engine.overlap_target.map(|t| (TraceMetric::Overlap, t)))
}

fn sweep_one(cfg: &ExperimentConfig, n: usize, seed: i64) -> SweepRow {
    let mut row = SweepRow {
        problem: cfg.problem,
        n,
        seed,
        method: cfg.method,
        depth_to_threshold: None,
        tnl_at_target: None,
        ar_final: None,
        overlap_final: None,
        status: String::new(),
    };
    let attempt = build_spectrum(cfg, n, seed).and_then(|spectrum| {
        let mut engine = cfg.engine.clone();
        engine.seed = seed;
        execute_run(&spectrum, cfg.method, &engine)
    });
    match attempt {
        Ok(run) => {
            if let Some((metric, threshold)) = sweep_target(&cfg.engine) {
                row.depth_to_threshold =
                    qsched::metrics::depth_to_threshold(&run.trace, metric, threshold);
                row.tnl_at_target =
                    qsched::metrics::tnl_to_threshold(&run.trace, metric, threshold);
            }
            if let Some(last) = run.trace.final_record() {
                row.ar_final = Some(last.ar);
                row.overlap_final = Some(last.overlap);
            }
            row.status = run.trace.status.token().to_string();
        }
        Err(err) => {
            row.status = format!("error: {err}").replace(',', ";").replace('\n', " ");
        }
    }
    row
}

/// `sweep`: every (size, seed) cell on a bounded worker pool. Rows are
/// sorted before writing, so the table is independent of scheduling.
pub fn cmd_sweep(cfg: &ExperimentConfig) -> Result<(Vec<SweepRow>, PathBuf)> {
    cfg.validate()?;
    std::fs::create_dir_all(&cfg.out_dir)?;
    let cells: Vec<(usize, i64)> = cfg
        .sizes
        .iter()
        .flat_map(|&n| cfg.seeds.iter().map(move |&s| (n, s)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| Error::InvalidInput(format!("worker pool: {e}")))?;
    let mut rows: Vec<SweepRow> =
        pool.install(|| cells.par_iter().map(|&(n, s)| sweep_one(cfg, n, s)).collect());
    rows.sort_by_key(|r| (r.n, r.seed, r.method.token()));
    let path = cfg.out_dir.join(format!(
        "sweep_{}_{}.csv",
        cfg.problem.short_name(),
        cfg.method
    ));
    let mut w = BufWriter::new(File::create(&path)?);
    writeln!(w, "{SWEEP_HEADER}")?;
    for row in &rows {
        writeln!(w, "{}", row.to_csv_line())?;
    }
    w.flush()?;
    Ok((rows, path))
}

/// Fit summary written as JSON next to the plot data.
#[derive(Debug, Serialize)]
pub struct FitReport {
    pub model: String,
    pub a: Real,
    pub b: Real,
    pub r_squared: Real,
    pub n_points: usize,
    pub failures: usize,
}

/// Per-size median depths from a sweep table, with failures (rows that never
/// reached the threshold) excluded from the median and counted.
pub fn median_depths_from_table(path: &Path) -> Result<(Vec<(Real, Real)>, usize)> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| Error::Parse(e.to_string()))?;
    let headers = reader
        .headers()
        .map_err(|e| Error::Parse(e.to_string()))?
        .clone();
    let col = |name: &str| -> Result<usize> {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Parse(format!("missing column {name:?} in {}", path.display())))
    };
    let n_col = col("n")?;
    let depth_col = col("depth_to_threshold")?;
    let mut by_size: BTreeMap<usize, Vec<Real>> = BTreeMap::new();
    let mut failures = 0usize;
    for record in reader.records() {
        let record = record.map_err(|e| Error::Parse(e.to_string()))?;
        let n: usize = record
            .get(n_col)
            .unwrap_or_default()
            .parse()
            .map_err(|_| Error::Parse("bad n value in sweep table".into()))?;
        let depth_field = record.get(depth_col).unwrap_or_default();
        if depth_field.is_empty() {
            failures += 1;
            by_size.entry(n).or_default();
            continue;
        }
        let depth: Real = depth_field
            .parse()
            .map_err(|_| Error::Parse("bad depth value in sweep table".into()))?;
        by_size.entry(n).or_default().push(depth);
    }
    let points: Vec<(Real, Real)> = by_size
        .into_iter()
        .filter_map(|(n, mut depths)| {
            if depths.is_empty() {
                return None;
            }
            depths.sort_by(|a, b| a.partial_cmp(b).unwrap());
            Some((n as Real, median(&depths)))
        })
        .collect();
    Ok((points, failures))
}

fn median(sorted: &[Real]) -> Real {
    let len = sorted.len();
    if len % 2 == 1 {
        sorted[len / 2]
    } else {
        0.5 * (sorted[len / 2 - 1] + sorted[len / 2])
    }
}

/// Output files of one fitted model.
#[derive(Debug)]
pub struct FitOutput {
    pub report: FitReport,
    pub json_path: PathBuf,
    pub plot_path: PathBuf,
}

/// `fit`: per-size medians of depth-to-threshold from a sweep table, fitted
/// to the requested scaling models. Writes a JSON report and an
/// (n, p_median, p_fit) plot-data CSV per model.
pub fn cmd_fit(table: &Path, models: &[ScalingModel], out_dir: &Path) -> Result<Vec<FitOutput>> {
    std::fs::create_dir_all(out_dir)?;
    let (points, failures) = median_depths_from_table(table)?;
    if points.len() < 3 {
        return Err(Error::InvalidInput(format!(
            "scaling fit needs at least 3 distinct sizes with successful runs, got {}",
            points.len()
        )));
    }
    let mut outputs = Vec::with_capacity(models.len());
    for &model in models {
        let fit = fit_scaling(&points, model)?;
        let report = FitReport {
            model: model.to_string(),
            a: fit.a,
            b: fit.b,
            r_squared: fit.r_squared,
            n_points: points.len(),
            failures,
        };
        let json_path = out_dir.join(format!("fit_{model}.json"));
        let mut jw = BufWriter::new(File::create(&json_path)?);
        serde_json::to_writer_pretty(&mut jw, &report)
            .map_err(|e| Error::Parse(e.to_string()))?;
        jw.write_all(b"\n")?;
        jw.flush()?;
        let plot_path = out_dir.join(format!("fit_{model}_plot.csv"));
        let mut pw = BufWriter::new(File::create(&plot_path)?);
        writeln!(pw, "n,p_median,p_fit")?;
        for &(n, p_median) in &points {
            writeln!(pw, "{},{},{}", n, p_median, fit.predict(n))?;
        }
        pw.flush()?;
        outputs.push(FitOutput {
            report,
            json_path,
            plot_path,
        });
    }
    Ok(outputs)
}

/// Inclusive integer list syntax used by `--n` and `--seeds`: either a
/// comma list (`10,12,14`) or an inclusive range (`0..19`).
pub fn parse_int_list<T>(text: &str) -> Result<Vec<T>>
where
    T: std::str::FromStr + PartialOrd + Copy + IntStep,
{
    let text = text.trim();
    if let Some((lo, hi)) = text.split_once("..") {
        let lo: T = lo
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad range start {lo:?}")))?;
        let hi: T = hi
            .trim()
            .trim_start_matches('=')
            .parse()
            .map_err(|_| Error::Parse(format!("bad range end {hi:?}")))?;
        if hi < lo {
            return Err(Error::Parse(format!("empty range {text:?}")));
        }
        let mut out = Vec::new();
        let mut cur = lo;
        loop {
            out.push(cur);
            if !(cur < hi) {
                break;
            }
            cur = cur.next_up();
        }
        return Ok(out);
    }
    text.split(',')
        .map(|tok| {
            tok.trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad integer {tok:?}")))
        })
        .collect()
}

/// Successor operation for [`parse_int_list`] range expansion.
pub trait IntStep {
    fn next_up(self) -> Self;
}

impl IntStep for usize {
    fn next_up(self) -> Self {
        self + 1
    }
}

impl IntStep for i64 {
    fn next_up(self) -> Self {
        self + 1
    }
}
