//! Study front end: configuration, convergence studies across refinement
//! strategies, sensitivity and density reports, and CSV artifacts.
//!
//! A study is described by a [`StudyConfig`] (JSON on disk): a model, a
//! strategy (single-fidelity, multi-level, or multi-index), refinement
//! parameters, a validation-sample count, and a seed. Validation samples are
//! drawn once per study from the seed and reused at every checkpoint;
//! reference values of the declared truth model are cached on disk keyed by
//! model, truth discretization, seed, and sample count. Identical configs and
//! seeds produce byte-identical output files; floats are printed with 17
//! significant digits.

mod metrics;

pub use metrics::{kde_density, pn_aggregate, relative_linf_error, silverman_bandwidth};

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::adaptive::{
    multilevel_model_set, AdaptiveOptions, MiscDriver, MiscSurrogate, SparseGridDriver, StopReason,
    TraceRow,
};
use crate::error::{Error, Result};
use crate::models::{
    advection_diffusion_ensemble, cosine_2d, cosine_ladder, AdvectionDiffusionConfig,
    ModelEnsemble, Multilevel, Pinned,
};
use crate::pce::surrogate_to_pce;

/// Refinement strategy of a study.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    /// Adaptive sparse grid on the finest declared model only.
    Single,
    /// Adaptive collocation over a one-dimensional diagonal model hierarchy.
    Multilevel,
    /// Adaptive collocation over the full discretization lattice.
    Multiindex,
}

impl Strategy {
    pub fn name(self) -> &'static str {
        match self {
            Strategy::Single => "single",
            Strategy::Multilevel => "multilevel",
            Strategy::Multiindex => "multiindex",
        }
    }
}

impl std::str::FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "single" => Ok(Strategy::Single),
            "multilevel" => Ok(Strategy::Multilevel),
            "multiindex" => Ok(Strategy::Multiindex),
            other => Err(Error::Config(format!("unknown strategy {other:?}"))),
        }
    }
}

/// Which built-in model a study drives.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelConfig {
    CosineLadder {
        #[serde(default = "default_ladder_eps")]
        eps: Vec<f64>,
    },
    #[serde(rename = "cosine_2d")]
    Cosine2d,
    AdvectionDiffusion {
        #[serde(flatten)]
        config: AdvectionDiffusionConfig,
    },
}

fn default_ladder_eps() -> Vec<f64> {
    vec![0.2, 0.1, 0.05]
}

/// Full study description. Anything unset falls back to the documented
/// default; CLI flags override file values.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StudyConfig {
    pub model: ModelConfig,
    #[serde(default = "default_strategy")]
    pub strategy: Strategy,
    #[serde(default = "default_kappa")]
    pub kappa: f64,
    #[serde(default)]
    pub tau: Option<f64>,
    #[serde(default)]
    pub w_max: Option<f64>,
    #[serde(default)]
    pub max_steps: Option<u64>,
    #[serde(default = "default_max_level")]
    pub max_level: u32,
    #[serde(default = "default_validation_samples")]
    pub validation_samples: usize,
    #[serde(default = "default_density_samples")]
    pub density_samples: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_out_dir")]
    pub out_dir: PathBuf,
    /// Discretization of the reference model for error studies; defaults to
    /// the finest declared level per dimension.
    #[serde(default)]
    pub truth_alpha: Option<Vec<u32>>,
    /// Ratio of the geometric work-checkpoint schedule.
    #[serde(default = "default_checkpoint_ratio")]
    pub checkpoint_ratio: f64,
}

fn default_strategy() -> Strategy {
    Strategy::Multiindex
}

fn default_kappa() -> f64 {
    0.5
}

fn default_max_level() -> u32 {
    10
}

fn default_validation_samples() -> usize {
    1000
}

fn default_density_samples() -> usize {
    100_000
}

fn default_out_dir() -> PathBuf {
    PathBuf::from("out")
}

fn default_checkpoint_ratio() -> f64 {
    std::f64::consts::SQRT_2.sqrt()
}

impl StudyConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        let cfg: StudyConfig = serde_json::from_str(&text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.validation_samples < 1 {
            return Err(Error::Config(
                "validation_samples must be at least 1".into(),
            ));
        }
        if self.tau.is_none() && self.w_max.is_none() && self.max_steps.is_none() {
            return Err(Error::Config(
                "set at least one stopping criterion: tau, w_max, or max_steps".into(),
            ));
        }
        if self.checkpoint_ratio <= 1.0 || self.checkpoint_ratio.is_nan() {
            return Err(Error::Config("checkpoint_ratio must exceed 1".into()));
        }
        Ok(())
    }

    fn adaptive_options(&self) -> AdaptiveOptions {
        AdaptiveOptions {
            kappa: self.kappa,
            tau: self.tau,
            w_max: self.w_max,
            max_steps: self.max_steps,
            max_level: self.max_level,
        }
    }
}

/// One checkpoint of a convergence trace.
#[derive(Debug, Clone)]
pub struct ConvergenceRow {
    pub work: f64,
    pub errors: Vec<f64>,
    pub steps: u64,
}

/// Everything a study produces in memory. A model failure mid-run leaves
/// `stop` empty and the error in `failure`; the trace and convergence rows
/// collected up to that point are still present (and still written to disk).
pub struct StudyOutput {
    pub strategy: Strategy,
    pub surrogate: MiscSurrogate,
    pub trace: Vec<TraceRow>,
    pub convergence: Vec<ConvergenceRow>,
    pub stop: Option<StopReason>,
    pub failure: Option<Error>,
}

/// Fixed-width float formatting: 17 significant digits, enough to round-trip
/// an f64 exactly.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Validation samples on the reference cube, drawn once from the seed.
pub fn sample_unit_cube(seed: u64, n: usize, dim: usize) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| (0..dim).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect())
        .collect()
}

fn base_model(model: &ModelConfig) -> Result<Box<dyn ModelEnsemble>> {
    match model {
        ModelConfig::CosineLadder { eps } => Ok(Box::new(cosine_ladder(eps)?)),
        ModelConfig::Cosine2d => Ok(Box::new(cosine_2d())),
        ModelConfig::AdvectionDiffusion { config } => {
            Ok(Box::new(advection_diffusion_ensemble(config.clone())?))
        }
    }
}

fn strategy_ensemble(model: &ModelConfig, strategy: Strategy) -> Result<Box<dyn ModelEnsemble>> {
    let base = base_model(model)?;
    match strategy {
        Strategy::Multiindex => Ok(base),
        Strategy::Single => Ok(Box::new(Pinned::at_top(base))),
        Strategy::Multilevel => {
            let n_alpha = base.n_alpha();
            if n_alpha == 0 {
                return Err(Error::Config(
                    "multilevel strategy needs a model with discretization dimensions".into(),
                ));
            }
            let levels = base.alpha_bounds().iter().copied().min().unwrap() as usize + 1;
            let hierarchy = multilevel_model_set(levels, n_alpha);
            Ok(Box::new(Multilevel::new(base, hierarchy)?))
        }
    }
}

/// Evaluate the declared truth model at the validation samples, with a disk
/// cache keyed by model, truth discretization, seed, and sample count.
pub fn reference_values(cfg: &StudyConfig, validation: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let truth_alpha = truth_alpha_of(cfg)?;
    let cache_dir = cfg.out_dir.join("cache");
    let tag = reference_tag(cfg, &truth_alpha)?;
    let cache_path = cache_dir.join(format!("ref-{tag}.csv"));
    if cache_path.exists() {
        let text = fs::read_to_string(&cache_path)?;
        let mut rows = Vec::new();
        for line in text.lines().skip(1) {
            if line.is_empty() {
                continue;
            }
            let row: std::result::Result<Vec<f64>, _> =
                line.split(',').map(str::parse::<f64>).collect();
            rows.push(row.map_err(|e| Error::Config(format!("bad cache line: {e}")))?);
        }
        if rows.len() == validation.len() {
            return Ok(rows);
        }
        // stale cache (different sample count); recompute below
    }

    let rows: Vec<Vec<f64>> = match &cfg.model {
        ModelConfig::CosineLadder { .. } => validation
            .iter()
            .map(|z| vec![crate::models::CosineLadder::truth(z[0])])
            .collect(),
        ModelConfig::Cosine2d => validation
            .iter()
            .map(|z| vec![crate::models::Cosine2d::value(z)])
            .collect(),
        ModelConfig::AdvectionDiffusion { config } => {
            let mut truth_cfg = config.clone();
            truth_cfg.max_level = truth_alpha.iter().copied().max().unwrap_or(0);
            let truth = advection_diffusion_ensemble(truth_cfg)?;
            let mut rows = Vec::with_capacity(validation.len());
            for z in validation {
                rows.push(truth.evaluate(&truth_alpha, z)?);
            }
            rows
        }
    };

    fs::create_dir_all(&cache_dir)?;
    let mut out = String::new();
    out.push_str("qoi_values\n");
    for row in &rows {
        let line: Vec<String> = row.iter().map(|&v| fmt_float(v)).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    fs::write(&cache_path, out)?;
    Ok(rows)
}

fn truth_alpha_of(cfg: &StudyConfig) -> Result<Vec<u32>> {
    match &cfg.model {
        ModelConfig::AdvectionDiffusion { config } => match &cfg.truth_alpha {
            Some(a) => {
                if a.len() != 3 {
                    return Err(Error::Config("truth_alpha needs 3 entries".into()));
                }
                Ok(a.clone())
            }
            None => Ok(vec![config.max_level; 3]),
        },
        _ => Ok(Vec::new()),
    }
}

fn reference_tag(cfg: &StudyConfig, truth_alpha: &[u32]) -> Result<String> {
    let model_json = serde_json::to_string(&cfg.model)?;
    let key = format!(
        "{model_json}|{truth_alpha:?}|{}|{}",
        cfg.seed, cfg.validation_samples
    );
    // FNV-1a
    let mut hash: u64 = 0xcbf29ce484222325;
    for b in key.bytes() {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x100000001b3);
    }
    Ok(format!("{hash:016x}"))
}

struct ConvergenceCollector<'a> {
    validation: &'a [Vec<f64>],
    reference: &'a [Vec<f64>],
    n_qoi: usize,
    ratio: f64,
    next_work: Option<f64>,
    rows: Vec<ConvergenceRow>,
}

impl<'a> ConvergenceCollector<'a> {
    fn new(
        validation: &'a [Vec<f64>],
        reference: &'a [Vec<f64>],
        n_qoi: usize,
        ratio: f64,
    ) -> Self {
        ConvergenceCollector {
            validation,
            reference,
            n_qoi,
            ratio,
            next_work: None,
            rows: Vec::new(),
        }
    }

    fn errors_of(&self, surrogate: &MiscSurrogate) -> Vec<f64> {
        let mut per_qoi_ref = vec![Vec::with_capacity(self.validation.len()); self.n_qoi];
        let mut per_qoi_sur = vec![Vec::with_capacity(self.validation.len()); self.n_qoi];
        for (z, reference) in self.validation.iter().zip(self.reference) {
            let value = surrogate
                .eval(z)
                .expect("accepted surrogate components are populated");
            for q in 0..self.n_qoi {
                per_qoi_ref[q].push(reference[q]);
                per_qoi_sur[q].push(value[q]);
            }
        }
        (0..self.n_qoi)
            .map(|q| {
                relative_linf_error(&per_qoi_ref[q], &per_qoi_sur[q])
                    .expect("validation references have positive range")
            })
            .collect()
    }

    fn on_step(&mut self, row: &TraceRow, surrogate: &MiscSurrogate) {
        let due = match self.next_work {
            None => true,
            Some(next) => row.work >= next,
        };
        if due {
            self.rows.push(ConvergenceRow {
                work: row.work,
                errors: self.errors_of(surrogate),
                steps: row.step,
            });
            self.next_work = Some(row.work * self.ratio);
        }
    }

    fn finish(&mut self, trace: &[TraceRow], surrogate: &MiscSurrogate) {
        if let Some(last) = trace.last() {
            let already = self.rows.last().is_some_and(|r| r.steps == last.step);
            if !already {
                self.rows.push(ConvergenceRow {
                    work: last.work,
                    errors: self.errors_of(surrogate),
                    steps: last.step,
                });
            }
        }
    }
}

/// Run one strategy with convergence checkpoints against the declared truth.
pub fn execute_study(cfg: &StudyConfig, strategy: Strategy) -> Result<StudyOutput> {
    cfg.validate()?;
    let ensemble = strategy_ensemble(&cfg.model, strategy)?;
    let validation = sample_unit_cube(cfg.seed, cfg.validation_samples, ensemble.n_inputs());
    let reference = reference_values(cfg, &validation)?;
    let opts = cfg.adaptive_options();
    let n_qoi = ensemble.n_qoi();
    let mut collector =
        ConvergenceCollector::new(&validation, &reference, n_qoi, cfg.checkpoint_ratio);

    // a Single strategy pins the model, so the ensemble has no alpha dims
    let (surrogate, trace, outcome) = if matches!(strategy, Strategy::Single) {
        let mut driver = SparseGridDriver::new(ensemble.as_ref(), opts)?;
        let outcome = driver.run_with_observer(&mut |row, s| collector.on_step(row, s));
        let (surrogate, trace) = driver.into_parts();
        (surrogate, trace, outcome)
    } else {
        let mut driver = MiscDriver::new(ensemble.as_ref(), opts)?;
        let outcome = driver.run_with_observer(&mut |row, s| collector.on_step(row, s));
        let (surrogate, trace) = driver.into_parts();
        (surrogate, trace, outcome)
    };
    let (stop, failure) = match outcome {
        Ok(stop) => {
            collector.finish(&trace, &surrogate);
            (Some(stop), None)
        }
        Err(e) => (None, Some(e)),
    };

    Ok(StudyOutput {
        strategy,
        surrogate,
        trace,
        convergence: collector.rows,
        stop,
        failure,
    })
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    let mut f = fs::File::create(path)?;
    f.write_all(contents.as_bytes())?;
    f.flush()?;
    Ok(())
}

/// Serialize a run trace: step, chosen index (semicolon-joined), gamma,
/// delta_w, cumulative work, per-QoI mean, per-QoI variance.
pub fn trace_csv(trace: &[TraceRow], n_qoi: usize) -> String {
    let mut out = String::from("step,index,gamma,delta_w,work");
    for q in 0..n_qoi {
        out.push_str(&format!(",mean_{q}"));
    }
    for q in 0..n_qoi {
        out.push_str(&format!(",var_{q}"));
    }
    out.push('\n');
    for row in trace {
        out.push_str(&format!(
            "{},{},{},{},{}",
            row.step,
            row.index.to_delimited(';'),
            fmt_float(row.gamma),
            fmt_float(row.delta_w),
            fmt_float(row.work)
        ));
        for q in 0..n_qoi {
            out.push_str(&format!(",{}", fmt_float(row.mean[q])));
        }
        for q in 0..n_qoi {
            out.push_str(&format!(",{}", fmt_float(row.variance[q])));
        }
        out.push('\n');
    }
    out
}

fn convergence_csv(rows: &[ConvergenceRow], n_qoi: usize) -> String {
    let mut out = String::from("work");
    for q in 0..n_qoi {
        out.push_str(&format!(",err_{q}"));
    }
    out.push_str(",steps\n");
    for row in rows {
        out.push_str(&fmt_float(row.work));
        for q in 0..n_qoi {
            out.push_str(&format!(",{}", fmt_float(row.errors[q])));
        }
        out.push_str(&format!(",{}\n", row.steps));
    }
    out
}

fn allocation_csv(surrogate: &MiscSurrogate) -> String {
    let mut out = String::from("alpha,points,work,work_fraction\n");
    for entry in surrogate.allocation_profile() {
        let alpha = if entry.alpha.is_empty() {
            String::from("-")
        } else {
            entry
                .alpha
                .iter()
                .map(u32::to_string)
                .collect::<Vec<_>>()
                .join(";")
        };
        out.push_str(&format!(
            "{alpha},{},{},{}\n",
            entry.points,
            fmt_float(entry.work),
            fmt_float(entry.work_fraction)
        ));
    }
    out
}

/// Run the configured study and write `trace.csv`, `convergence.csv`,
/// `allocation.csv`, and the accepted index set to the output directory.
/// On a model failure the partial trace and convergence rows are flushed
/// before the error propagates.
pub fn run_study(cfg: &StudyConfig) -> Result<StudyOutput> {
    let mut output = execute_study(cfg, cfg.strategy)?;
    let n_qoi = output.surrogate.n_qoi();
    write_file(
        &cfg.out_dir.join("trace.csv"),
        &trace_csv(&output.trace, n_qoi),
    )?;
    write_file(
        &cfg.out_dir.join("convergence.csv"),
        &convergence_csv(&output.convergence, n_qoi),
    )?;
    write_file(
        &cfg.out_dir.join("allocation.csv"),
        &allocation_csv(&output.surrogate),
    )?;
    let mut accepted = Vec::new();
    crate::combi::write_index_set(
        &mut accepted,
        output.surrogate.accepted(),
        Some(output.surrogate.coefficients()),
    )?;
    write_file(
        &cfg.out_dir.join("accepted.txt"),
        &String::from_utf8(accepted).expect("ascii index lines"),
    )?;
    // a model failure aborts the study after the partial artifacts are flushed
    if let Some(e) = output.failure.take() {
        return Err(e);
    }
    Ok(output)
}

/// Run several strategies under one config and merge their convergence traces
/// into `compare.csv` (strategy, work, per-QoI error, steps).
pub fn compare_study(cfg: &StudyConfig, strategies: &[Strategy]) -> Result<Vec<StudyOutput>> {
    if strategies.is_empty() {
        return Err(Error::Config("compare needs at least one strategy".into()));
    }
    let mut outputs = Vec::new();
    for &strategy in strategies {
        let mut output = execute_study(cfg, strategy)?;
        if let Some(e) = output.failure.take() {
            return Err(e);
        }
        outputs.push(output);
    }
    let n_qoi = outputs[0].surrogate.n_qoi();
    let mut out = String::from("strategy,work");
    for q in 0..n_qoi {
        out.push_str(&format!(",err_{q}"));
    }
    out.push_str(",steps\n");
    for output in &outputs {
        for row in &output.convergence {
            out.push_str(output.strategy.name());
            out.push_str(&format!(",{}", fmt_float(row.work)));
            for q in 0..n_qoi {
                out.push_str(&format!(",{}", fmt_float(row.errors[q])));
            }
            out.push_str(&format!(",{}\n", row.steps));
        }
    }
    write_file(&cfg.out_dir.join("compare.csv"), &out)?;
    Ok(outputs)
}

/// Sensitivity report: subsets covering at least 99.9% of every QoI's
/// variance, sorted by their largest index, written to `sobol.csv` with
/// 1-based variable numbering.
pub fn sobol_report(cfg: &StudyConfig) -> Result<PathBuf> {
    let mut output = execute_study(cfg, cfg.strategy)?;
    if let Some(e) = output.failure.take() {
        return Err(e);
    }
    let expansion = surrogate_to_pce(&output.surrogate)?;
    let n_qoi = expansion.n_qoi();
    let total = expansion.variance();
    let path = cfg.out_dir.join("sobol.csv");

    let mut csv = String::from("subset");
    for q in 0..n_qoi {
        csv.push_str(&format!(",index_{q}"));
    }
    csv.push('\n');

    if (0..n_qoi).all(|q| expansion.has_zero_variance(q)) {
        csv.push_str("zero-variance");
        for _ in 0..n_qoi {
            csv.push_str(",0");
        }
        csv.push('\n');
        write_file(&path, &csv)?;
        eprintln!("warning: surrogate has zero variance; empty sensitivity report");
        return Ok(path);
    }

    let by_subset = expansion.variance_by_subset();
    // normalized indices per subset
    let mut indexed: Vec<(Vec<usize>, Vec<f64>)> = by_subset
        .iter()
        .map(|(subset, var)| {
            let idx: Vec<f64> = var
                .iter()
                .zip(&total)
                .map(|(v, t)| if *t > 0.0 { v / t } else { 0.0 })
                .collect();
            (subset.clone(), idx)
        })
        .collect();

    // keep the top subsets until every QoI reaches 99.9% coverage
    let mut keep: std::collections::BTreeSet<Vec<usize>> = std::collections::BTreeSet::new();
    for q in 0..n_qoi {
        if expansion.has_zero_variance(q) {
            continue;
        }
        let mut order: Vec<usize> = (0..indexed.len()).collect();
        order.sort_by(|&a, &b| {
            indexed[b].1[q]
                .partial_cmp(&indexed[a].1[q])
                .unwrap()
                .then_with(|| indexed[a].0.cmp(&indexed[b].0))
        });
        let mut covered = 0.0;
        for i in order {
            if covered >= 0.999 {
                break;
            }
            covered += indexed[i].1[q];
            keep.insert(indexed[i].0.clone());
        }
    }
    indexed.retain(|(s, _)| keep.contains(s));
    indexed.sort_by(|a, b| {
        let ma = a.1.iter().cloned().fold(0.0f64, f64::max);
        let mb = b.1.iter().cloned().fold(0.0f64, f64::max);
        mb.partial_cmp(&ma).unwrap().then_with(|| a.0.cmp(&b.0))
    });

    for (subset, idx) in &indexed {
        let label: Vec<String> = subset.iter().map(|v| (v + 1).to_string()).collect();
        csv.push_str(&label.join(";"));
        for v in idx {
            csv.push_str(&format!(",{}", fmt_float(*v)));
        }
        csv.push('\n');
    }
    write_file(&path, &csv)?;
    Ok(path)
}

/// Output-density report: sample the completed surrogate, estimate each QoI's
/// density with a Gaussian kernel, and write `density.csv` rows
/// `(qoi, x, density)` on a 512-point grid.
pub fn density_report(cfg: &StudyConfig) -> Result<PathBuf> {
    let mut output = execute_study(cfg, cfg.strategy)?;
    if let Some(e) = output.failure.take() {
        return Err(e);
    }
    let surrogate = &output.surrogate;
    let n_qoi = surrogate.n_qoi();
    // a salted stream keeps density samples distinct from validation samples
    let samples_z = sample_unit_cube(
        cfg.seed ^ 0x64656e73697479,
        cfg.density_samples,
        surrogate.n_inputs(),
    );
    let mut per_qoi: Vec<Vec<f64>> = vec![Vec::with_capacity(samples_z.len()); n_qoi];
    for z in &samples_z {
        let v = surrogate.eval(z)?;
        for q in 0..n_qoi {
            per_qoi[q].push(v[q]);
        }
    }

    let mut csv = String::from("qoi,x,density\n");
    for (q, samples) in per_qoi.iter().enumerate() {
        let h = silverman_bandwidth(samples)?;
        let lo = samples.iter().cloned().fold(f64::INFINITY, f64::min) - 4.0 * h;
        let hi = samples.iter().cloned().fold(f64::NEG_INFINITY, f64::max) + 4.0 * h;
        let grid: Vec<f64> = (0..512)
            .map(|i| lo + (hi - lo) * i as f64 / 511.0)
            .collect();
        let density = kde_density(samples, &grid)?;
        for (x, d) in grid.iter().zip(&density) {
            csv.push_str(&format!("{q},{},{}\n", fmt_float(*x), fmt_float(*d)));
        }
    }
    let path = cfg.out_dir.join("density.csv");
    write_file(&path, &csv)?;
    Ok(path)
}
