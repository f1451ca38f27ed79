//! The adaptive multi-index collocation driver.
//!
//! A surrogate is a combination of tensor components indexed by a combined
//! multi-index `[alpha, beta]`: the first `n_alpha` entries select a model
//! discretization, the rest per-dimension stochastic interpolation levels.
//! The driver keeps two sets: the accepted set (always downward closed in the
//! combined space) and an active set of candidates whose components have been
//! built but not yet accepted. Each step pops the candidate with the largest
//! refinement indicator
//!
//! `gamma = (kappa * dE_mean + (1 - kappa) * dE_var) / dW`,
//!
//! accepts it, updates the combination coefficients incrementally, and pushes
//! every admissible forward neighbor as a new candidate. Candidate components
//! are evaluated when they enter the active set, so active-set work counts
//! toward the total. Error indicators are normalized by the magnitude of the
//! model value at the grid center of the coarsest model, mean changes come
//! from the quadrature rule, and variance changes from the running orthonormal
//! expansion of the surrogate, so indicators are deterministic.
//!
//! The loop never re-evaluates a model: a per-discretization ledger keys every
//! evaluated point by its nested-node identity, and the work ledger charges a
//! candidate only for the points it adds. On ties of the indicator the
//! lexicographically smallest combined index wins, which makes runs
//! reproducible byte for byte.
//!
//! [`SparseGridDriver`] is the single-fidelity specialization for ensembles
//! without discretization dimensions. It maintains its coefficients through
//! batch recomputation of the indicator formula instead of the incremental
//! update, and carries its own admissibility and selection logic, so it
//! doubles as an independent cross-check that the multi-index driver reduces
//! to the classic dimension-adaptive sparse grid when only one model exists.

use std::collections::{BTreeMap, HashMap, VecDeque};

use crate::combi::{combination_coefficients, sparse_eval, CombinationWeights, IndexSet};
use crate::error::{Error, Result};
use crate::index::MultiIndex;
use crate::models::ModelEnsemble;
use crate::pce::{component_to_pce, ComponentPce};
use crate::rules::NodeId;
use crate::tensor::{TensorComponent, TensorGrid};

/// Stopping criteria and refinement parameters for an adaptive run.
#[derive(Debug, Clone)]
pub struct AdaptiveOptions {
    /// Weight of the mean indicator against the variance indicator, in [0, 1].
    pub kappa: f64,
    /// Stop when the global error estimate (sum of active-set indicators)
    /// drops to this value.
    pub tau: Option<f64>,
    /// Stop once cumulative work reaches this budget.
    pub w_max: Option<f64>,
    /// Stop after this many accepted indices.
    pub max_steps: Option<u64>,
    /// Inclusive cap on every stochastic interpolation level.
    pub max_level: u32,
}

impl Default for AdaptiveOptions {
    fn default() -> Self {
        AdaptiveOptions {
            kappa: 0.5,
            tau: None,
            w_max: None,
            max_steps: None,
            max_level: 10,
        }
    }
}

impl AdaptiveOptions {
    fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.kappa) {
            return Err(Error::Validation(format!(
                "kappa must lie in [0, 1], got {}",
                self.kappa
            )));
        }
        if self.tau.is_none() && self.w_max.is_none() && self.max_steps.is_none() {
            return Err(Error::Validation(
                "at least one stopping criterion (tau, w_max, max_steps) must be set".into(),
            ));
        }
        if let Some(t) = self.tau {
            if t <= 0.0 {
                return Err(Error::Validation("tau must be positive".into()));
            }
        }
        if let Some(w) = self.w_max {
            if w <= 0.0 {
                return Err(Error::Validation("w_max must be positive".into()));
            }
        }
        Ok(())
    }
}

/// Why a run stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    /// No admissible candidates remain within the declared bounds.
    ActiveSetExhausted,
    /// The global error estimate fell to `tau`.
    ErrorBelowTolerance,
    /// Cumulative work reached `w_max`.
    WorkBudgetReached,
    /// The acceptance count reached `max_steps`.
    MaxStepsReached,
}

/// Indicator data for one candidate index.
#[derive(Debug, Clone)]
pub struct RefinementRecord {
    pub index: MultiIndex,
    /// Normalized per-QoI mean change.
    pub delta_e_mean: Vec<f64>,
    /// Normalized per-QoI variance change.
    pub delta_e_var: Vec<f64>,
    /// Work added by this candidate's new points.
    pub delta_w: f64,
    /// Worst-case combined error contribution over QoI.
    pub delta_e: f64,
    /// Benefit per unit work.
    pub gamma: f64,
}

/// One accepted step of an adaptive run.
#[derive(Debug, Clone)]
pub struct TraceRow {
    pub step: u64,
    pub index: MultiIndex,
    pub gamma: f64,
    pub delta_w: f64,
    /// Cumulative work after the step, including active-set candidates.
    pub work: f64,
    pub mean: Vec<f64>,
    pub variance: Vec<f64>,
}

/// Per-discretization share of the evaluation effort.
#[derive(Debug, Clone, PartialEq)]
pub struct AllocationEntry {
    pub alpha: Vec<u32>,
    /// Unique stochastic points evaluated under this discretization.
    pub points: usize,
    pub work: f64,
    pub work_fraction: f64,
}

/// Per-discretization cache of evaluated points and the work they cost.
/// Point identity is the vector of nested-node ids, so shared nodes across
/// levels are never re-evaluated.
#[derive(Debug, Default)]
struct EvalLedger {
    work: f64,
    cache: BTreeMap<Vec<u32>, HashMap<Vec<NodeId>, Vec<f64>>>,
    work_by_alpha: BTreeMap<Vec<u32>, f64>,
}

impl EvalLedger {
    fn count_missing(&self, alpha: &[u32], beta: &MultiIndex) -> usize {
        let grid = TensorGrid::new(beta);
        let known = self.cache.get(alpha);
        let mut missing = 0;
        grid.for_each_point(|_, digits| {
            let ids = grid.node_ids(digits);
            if known.is_none_or(|m| !m.contains_key(&ids)) {
                missing += 1;
            }
        });
        missing
    }

    /// Build a populated component, evaluating the model only at points not
    /// seen before under this `alpha`. Nothing is committed if any evaluation
    /// fails, so a failed call can be retried.
    fn build_component(
        &mut self,
        ensemble: &dyn ModelEnsemble,
        alpha: &[u32],
        beta: &MultiIndex,
    ) -> Result<(TensorComponent, f64)> {
        let mut comp = TensorComponent::new(alpha, beta.clone(), ensemble.n_qoi());
        let grid = comp.grid().clone();
        let n_qoi = ensemble.n_qoi();
        let known = self.cache.entry(alpha.to_vec()).or_default();

        let mut point_ids = Vec::with_capacity(grid.total());
        let mut fresh: Vec<(Vec<NodeId>, Vec<f64>)> = Vec::new();
        let mut failure = None;
        {
            let rules = comp.rules().to_vec();
            grid.for_each_point(|_, digits| {
                if failure.is_some() {
                    return;
                }
                let ids = grid.node_ids(digits);
                if !known.contains_key(&ids) && !fresh.iter().any(|(k, _)| *k == ids) {
                    let z: Vec<f64> = digits
                        .iter()
                        .zip(&rules)
                        .map(|(&j, r)| r.nodes()[j])
                        .collect();
                    match ensemble.evaluate(alpha, &z) {
                        Ok(v) => fresh.push((ids.clone(), v)),
                        Err(e) => failure = Some(e),
                    }
                }
                point_ids.push(ids);
            });
        }
        if let Some(e) = failure {
            return Err(e);
        }

        let n_new = fresh.len();
        for (ids, v) in fresh {
            known.insert(ids, v);
        }
        let delta_w = ensemble.cost(alpha) * n_new as f64;
        self.work += delta_w;
        *self.work_by_alpha.entry(alpha.to_vec()).or_insert(0.0) += delta_w;

        let mut values = Vec::with_capacity(grid.total() * n_qoi);
        let known = &self.cache[alpha];
        for ids in &point_ids {
            values.extend_from_slice(&known[ids]);
        }
        comp.set_values(values)?;
        Ok((comp, delta_w))
    }
}

/// Running orthonormal expansion of the accepted surrogate: coefficients,
/// mean, and variance, updated by the coefficient deltas of each step.
#[derive(Debug)]
struct StatsAccumulator {
    dim: usize,
    n_qoi: usize,
    eta: BTreeMap<MultiIndex, Vec<f64>>,
    variance: Vec<f64>,
}

impl StatsAccumulator {
    fn new(dim: usize, n_qoi: usize) -> Self {
        StatsAccumulator {
            dim,
            n_qoi,
            eta: BTreeMap::new(),
            variance: vec![0.0; n_qoi],
        }
    }

    fn mean(&self) -> Vec<f64> {
        self.eta
            .get(&MultiIndex::zeros(self.dim))
            .cloned()
            .unwrap_or_else(|| vec![0.0; self.n_qoi])
    }

    /// Mean and variance changes if `merged` were added, without committing.
    fn deltas(&self, merged: &BTreeMap<MultiIndex, Vec<f64>>) -> (Vec<f64>, Vec<f64>) {
        let mut dmean = vec![0.0; self.n_qoi];
        let mut dvar = vec![0.0; self.n_qoi];
        for (lambda, delta) in merged {
            if lambda.is_zero() {
                dmean.copy_from_slice(delta);
                continue;
            }
            let eta = self.eta.get(lambda);
            for q in 0..self.n_qoi {
                let e = eta.map_or(0.0, |v| v[q]);
                dvar[q] += 2.0 * e * delta[q] + delta[q] * delta[q];
            }
        }
        (dmean, dvar)
    }

    fn apply(&mut self, merged: &BTreeMap<MultiIndex, Vec<f64>>) {
        let (_, dvar) = self.deltas(merged);
        for (v, d) in self.variance.iter_mut().zip(&dvar) {
            *v += d;
        }
        for (lambda, delta) in merged {
            let entry = self
                .eta
                .entry(lambda.clone())
                .or_insert_with(|| vec![0.0; self.n_qoi]);
            for (e, &d) in entry.iter_mut().zip(delta) {
                *e += d;
            }
        }
    }
}

/// The surrogate under construction (or completed): accepted and active index
/// sets over the combined space, combination coefficients, the constituent
/// tensor components, and the evaluation ledger.
pub struct MiscSurrogate {
    n_alpha: usize,
    n_inputs: usize,
    n_qoi: usize,
    accepted: IndexSet,
    active: BTreeMap<MultiIndex, RefinementRecord>,
    coefficients: CombinationWeights,
    components: BTreeMap<MultiIndex, TensorComponent>,
    pce_boxes: BTreeMap<MultiIndex, ComponentPce>,
    ledger: EvalLedger,
    f00: Vec<f64>,
    stats: StatsAccumulator,
}

impl MiscSurrogate {
    fn new(n_alpha: usize, n_inputs: usize, n_qoi: usize) -> Self {
        MiscSurrogate {
            n_alpha,
            n_inputs,
            n_qoi,
            accepted: IndexSet::new(n_alpha + n_inputs),
            active: BTreeMap::new(),
            coefficients: CombinationWeights::new(),
            components: BTreeMap::new(),
            pce_boxes: BTreeMap::new(),
            ledger: EvalLedger::default(),
            f00: Vec::new(),
            stats: StatsAccumulator::new(n_inputs, n_qoi),
        }
    }

    pub fn n_alpha(&self) -> usize {
        self.n_alpha
    }

    pub fn n_inputs(&self) -> usize {
        self.n_inputs
    }

    pub fn n_qoi(&self) -> usize {
        self.n_qoi
    }

    /// The accepted combined index set; downward closed at all times.
    pub fn accepted(&self) -> &IndexSet {
        &self.accepted
    }

    /// Candidate records, keyed by combined index.
    pub fn active(&self) -> &BTreeMap<MultiIndex, RefinementRecord> {
        &self.active
    }

    pub fn coefficients(&self) -> &CombinationWeights {
        &self.coefficients
    }

    pub fn components(&self) -> &BTreeMap<MultiIndex, TensorComponent> {
        &self.components
    }

    pub fn component(&self, idx: &MultiIndex) -> Option<&TensorComponent> {
        self.components.get(idx)
    }

    /// Cumulative work, including candidates in the active set.
    pub fn work_total(&self) -> f64 {
        self.ledger.work
    }

    /// Model value at the grid center of the coarsest model.
    pub fn center_values(&self) -> &[f64] {
        &self.f00
    }

    /// Split a combined index into its model and stochastic parts.
    pub fn split<'b>(&self, idx: &'b MultiIndex) -> (&'b [u32], &'b [u32]) {
        idx.entries().split_at(self.n_alpha)
    }

    /// Surrogate value at `z`; zeros before anything is accepted.
    pub fn eval(&self, z: &[f64]) -> Result<Vec<f64>> {
        if self.coefficients.nonzero().next().is_none() {
            return Ok(vec![0.0; self.n_qoi]);
        }
        sparse_eval(&self.coefficients, &self.components, z)
    }

    /// Mean of the surrogate per QoI.
    pub fn mean(&self) -> Vec<f64> {
        self.stats.mean()
    }

    /// Variance of the surrogate per QoI, from the running expansion.
    pub fn variance(&self) -> Vec<f64> {
        self.stats.variance.clone()
    }

    /// Work a candidate would add: the model cost times the number of its
    /// grid points not yet evaluated under the same discretization.
    pub fn delta_work(&self, ensemble: &dyn ModelEnsemble, idx: &MultiIndex) -> f64 {
        let (alpha, beta) = self.split(idx);
        let beta = MultiIndex::new(beta.to_vec());
        ensemble.cost(alpha) * self.ledger.count_missing(alpha, &beta) as f64
    }

    /// Normalized indicator pair for a trial component at `idx`, as if it were
    /// accepted into the current surrogate.
    pub fn delta_error_indicators(
        &self,
        idx: &MultiIndex,
        trial: &TensorComponent,
    ) -> Result<(Vec<f64>, Vec<f64>)> {
        let trial_box = component_to_pce(trial)?;
        let deltas = coefficient_deltas(&self.accepted, idx);
        let merged = self.merge_deltas(&deltas, idx, &trial_box);
        let (dmean, dvar) = self.stats.deltas(&merged);
        Ok(self.normalize_indicators(&dmean, &dvar))
    }

    fn merge_deltas(
        &self,
        deltas: &[(MultiIndex, i64)],
        trial_idx: &MultiIndex,
        trial_box: &ComponentPce,
    ) -> BTreeMap<MultiIndex, Vec<f64>> {
        let mut merged: BTreeMap<MultiIndex, Vec<f64>> = BTreeMap::new();
        let n_qoi = self.n_qoi;
        for (idx, dc) in deltas {
            let scale = *dc as f64;
            let box_ = if idx == trial_idx {
                trial_box
            } else {
                &self.pce_boxes[idx]
            };
            box_.for_each(|digits, row| {
                let key = MultiIndex::new(digits.iter().map(|&d| d as u32).collect());
                let entry = merged.entry(key).or_insert_with(|| vec![0.0; n_qoi]);
                for (e, &v) in entry.iter_mut().zip(row) {
                    *e += scale * v;
                }
            });
        }
        merged
    }

    fn normalize_indicators(&self, dmean: &[f64], dvar: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let mut e_mean = vec![0.0; self.n_qoi];
        let mut e_var = vec![0.0; self.n_qoi];
        for q in 0..self.n_qoi {
            let norm = if self.f00[q].abs() < 1e-12 {
                1.0
            } else {
                self.f00[q].abs()
            };
            e_mean[q] = dmean[q].abs() / norm;
            e_var[q] = dvar[q].abs() / (norm * norm);
        }
        (e_mean, e_var)
    }

    /// Per-discretization unique point counts and work fractions. Counts cover
    /// every evaluated point, so the fractions sum to one against the total.
    pub fn allocation_profile(&self) -> Vec<AllocationEntry> {
        let total = self.ledger.work;
        self.ledger
            .cache
            .iter()
            .map(|(alpha, points)| {
                let work = self.ledger.work_by_alpha.get(alpha).copied().unwrap_or(0.0);
                AllocationEntry {
                    alpha: alpha.clone(),
                    points: points.len(),
                    work,
                    work_fraction: if total > 0.0 { work / total } else { 0.0 },
                }
            })
            .collect()
    }
}

/// Combination-coefficient changes from inserting `new_idx` into `accepted`:
/// the new index gets `+1`, and every accepted index within a unit box below
/// `new_idx` gains `(-1)^{|new_idx - idx|_1}`. Sorted by index.
pub fn coefficient_deltas(accepted: &IndexSet, new_idx: &MultiIndex) -> Vec<(MultiIndex, i64)> {
    let mut deltas = vec![(new_idx.clone(), 1i64)];
    for idx in accepted.iter() {
        if !idx.leq(new_idx) {
            continue;
        }
        let mut in_box = true;
        let mut l1 = 0u32;
        for (a, b) in idx.entries().iter().zip(new_idx.entries()) {
            let d = b - a;
            if d > 1 {
                in_box = false;
                break;
            }
            l1 += d;
        }
        if in_box && l1 > 0 {
            deltas.push((idx.clone(), if l1.is_multiple_of(2) { 1 } else { -1 }));
        }
    }
    deltas.sort_by(|a, b| a.0.cmp(&b.0));
    deltas
}

/// Insert `new_idx` into the combination: the incremental coefficient update.
/// The result equals the batch indicator-formula coefficients of
/// `accepted + {new_idx}` exactly.
pub fn update_coefficients(
    coefficients: &CombinationWeights,
    accepted: &IndexSet,
    new_idx: &MultiIndex,
) -> Result<CombinationWeights> {
    if accepted.contains(new_idx) {
        return Err(Error::Validation(format!(
            "index {new_idx:?} already accepted"
        )));
    }
    for k in 0..new_idx.len() {
        if let Some(b) = new_idx.backward(k) {
            if !accepted.contains(&b) {
                return Err(Error::Validation(format!(
                    "inserting {new_idx:?} violates downward closure: {b:?} missing"
                )));
            }
        }
    }
    let mut out = coefficients.clone();
    for (idx, dc) in coefficient_deltas(accepted, new_idx) {
        out.add(&idx, dc);
    }
    Ok(out)
}

/// Admissible forward neighbors of `idx`: every `idx + e_k` within the
/// per-dimension `bounds` whose backward neighbors are all accepted.
pub fn refine_neighbors(accepted: &IndexSet, idx: &MultiIndex, bounds: &[u32]) -> Vec<MultiIndex> {
    let mut out = Vec::new();
    for (k, &bound) in bounds.iter().enumerate() {
        if idx.entry(k) >= bound {
            continue;
        }
        let cand = idx.forward(k);
        let admissible = (0..cand.len()).all(|j| match cand.backward(j) {
            Some(b) => accepted.contains(&b),
            None => true,
        });
        if admissible {
            out.push(cand);
        }
    }
    out
}

/// Worst-case-per-QoI refinement indicator: the convex combination of the
/// normalized mean and variance changes, per unit work.
pub fn indicator_gamma(
    delta_e_mean: &[f64],
    delta_e_var: &[f64],
    delta_w: f64,
    kappa: f64,
) -> Result<f64> {
    if !(0.0..=1.0).contains(&kappa) {
        return Err(Error::Validation(format!(
            "kappa must lie in [0, 1], got {kappa}"
        )));
    }
    if delta_w <= 0.0 || delta_w.is_nan() {
        return Err(Error::Validation(format!(
            "delta_w must be positive, got {delta_w}"
        )));
    }
    let mut worst = 0.0f64;
    for (&em, &ev) in delta_e_mean.iter().zip(delta_e_var) {
        worst = worst.max(kappa * em + (1.0 - kappa) * ev);
    }
    Ok(worst / delta_w)
}

/// The diagonal model hierarchy `{(j, ..., j) : j = 0..k-1}` that lets the
/// multi-index driver run in multi-level mode over a scalar fidelity.
pub fn multilevel_model_set(k: usize, n_alpha: usize) -> Vec<MultiIndex> {
    assert!(k >= 1 && n_alpha >= 1);
    (0..k)
        .map(|j| MultiIndex::new(vec![j as u32; n_alpha]))
        .collect()
}

/// Result of an adaptive run.
pub struct RunResult {
    pub surrogate: MiscSurrogate,
    pub trace: Vec<TraceRow>,
    pub stop: StopReason,
}

/// The greedy multi-index driver.
pub struct MiscDriver<'a> {
    ensemble: &'a dyn ModelEnsemble,
    opts: AdaptiveOptions,
    bounds: Vec<u32>,
    surrogate: MiscSurrogate,
    trace: Vec<TraceRow>,
    step: u64,
    pending: VecDeque<MultiIndex>,
    pending_row: Option<TraceRow>,
}

impl<'a> MiscDriver<'a> {
    /// Set up a run: the first candidate is the combined zero index, whose
    /// single grid point is the center of the coarsest model.
    pub fn new(ensemble: &'a dyn ModelEnsemble, opts: AdaptiveOptions) -> Result<Self> {
        opts.validate()?;
        let n_alpha = ensemble.n_alpha();
        let n_inputs = ensemble.n_inputs();
        if n_inputs == 0 {
            return Err(Error::Validation(
                "ensemble has no stochastic inputs".into(),
            ));
        }
        let mut bounds = ensemble.alpha_bounds();
        if bounds.len() != n_alpha {
            return Err(Error::Validation("alpha bounds length mismatch".into()));
        }
        bounds.extend(std::iter::repeat_n(opts.max_level, n_inputs));
        let surrogate = MiscSurrogate::new(n_alpha, n_inputs, ensemble.n_qoi());
        let mut pending = VecDeque::new();
        pending.push_back(MultiIndex::zeros(n_alpha + n_inputs));
        Ok(MiscDriver {
            ensemble,
            opts,
            bounds,
            surrogate,
            trace: Vec::new(),
            step: 0,
            pending,
            pending_row: None,
        })
    }

    pub fn surrogate(&self) -> &MiscSurrogate {
        &self.surrogate
    }

    pub fn trace(&self) -> &[TraceRow] {
        &self.trace
    }

    pub fn into_parts(self) -> (MiscSurrogate, Vec<TraceRow>) {
        (self.surrogate, self.trace)
    }

    /// Sum of the active-set error contributions: the global error estimate
    /// checked against `tau`.
    pub fn global_error_estimate(&self) -> f64 {
        self.surrogate.active.values().map(|r| r.delta_e).sum()
    }

    /// Build one candidate: evaluate its new points, transform it, and score
    /// it against the current surrogate.
    fn add_candidate(&mut self, idx: &MultiIndex) -> Result<()> {
        let (alpha, beta) = idx.entries().split_at(self.surrogate.n_alpha);
        let beta = MultiIndex::new(beta.to_vec());
        let (comp, delta_w) = self
            .surrogate
            .ledger
            .build_component(self.ensemble, alpha, &beta)?;
        if self.surrogate.f00.is_empty() {
            // the first component is the single center point of the coarsest model
            self.surrogate.f00 = comp.values()?[..self.surrogate.n_qoi].to_vec();
        }
        let trial_box = component_to_pce(&comp)?;
        let deltas = coefficient_deltas(&self.surrogate.accepted, idx);
        let merged = self.surrogate.merge_deltas(&deltas, idx, &trial_box);
        let (dmean, dvar) = self.surrogate.stats.deltas(&merged);
        let (e_mean, e_var) = self.surrogate.normalize_indicators(&dmean, &dvar);
        let gamma = indicator_gamma(&e_mean, &e_var, delta_w, self.opts.kappa)?;
        let delta_e = gamma * delta_w;
        self.surrogate.components.insert(idx.clone(), comp);
        self.surrogate.pce_boxes.insert(idx.clone(), trial_box);
        self.surrogate.active.insert(
            idx.clone(),
            RefinementRecord {
                index: idx.clone(),
                delta_e_mean: e_mean,
                delta_e_var: e_var,
                delta_w,
                delta_e,
                gamma,
            },
        );
        Ok(())
    }

    fn drain_pending(&mut self, observer: &mut dyn FnMut(&TraceRow, &MiscSurrogate)) -> Result<()> {
        while let Some(idx) = self.pending.front().cloned() {
            self.add_candidate(&idx)?;
            self.pending.pop_front();
        }
        if let Some(mut row) = self.pending_row.take() {
            row.work = self.surrogate.ledger.work;
            observer(&row, &self.surrogate);
            self.trace.push(row);
        }
        Ok(())
    }

    fn select_best(&self) -> Option<MultiIndex> {
        let mut best: Option<(&MultiIndex, f64)> = None;
        for (idx, rec) in &self.surrogate.active {
            match best {
                Some((_, g)) if rec.gamma <= g => {}
                _ => best = Some((idx, rec.gamma)),
            }
        }
        best.map(|(idx, _)| idx.clone())
    }

    fn accept(&mut self, idx: &MultiIndex) {
        let record = self
            .surrogate
            .active
            .remove(idx)
            .expect("selected index is active");
        // incremental coefficient update (the batch formula gives the same result)
        let deltas = coefficient_deltas(&self.surrogate.accepted, idx);
        let trial_box = self.surrogate.pce_boxes[idx].clone();
        let merged = self.surrogate.merge_deltas(&deltas, idx, &trial_box);
        for (i, dc) in &deltas {
            self.surrogate.coefficients.add(i, *dc);
        }
        self.surrogate.stats.apply(&merged);
        self.surrogate
            .accepted
            .insert(idx.clone())
            .expect("consistent dimension");
        debug_assert!(self.surrogate.accepted.is_downward_closed());
        self.step += 1;

        for neighbor in refine_neighbors(&self.surrogate.accepted, idx, &self.bounds) {
            if !self.surrogate.active.contains_key(&neighbor)
                && !self.surrogate.accepted.contains(&neighbor)
            {
                self.pending.push_back(neighbor);
            }
        }
        self.pending_row = Some(TraceRow {
            step: self.step,
            index: idx.clone(),
            gamma: record.gamma,
            delta_w: record.delta_w,
            work: 0.0, // filled in after the candidates are built
            mean: self.surrogate.stats.mean(),
            variance: self.surrogate.stats.variance.clone(),
        });
    }

    pub fn run(&mut self) -> Result<StopReason> {
        self.run_with_observer(&mut |_, _| {})
    }

    /// Run the greedy loop; the observer sees each completed step. A model
    /// failure leaves the driver valid and resumable.
    pub fn run_with_observer(
        &mut self,
        observer: &mut dyn FnMut(&TraceRow, &MiscSurrogate),
    ) -> Result<StopReason> {
        loop {
            self.drain_pending(observer)?;
            if self.surrogate.active.is_empty() {
                return Ok(StopReason::ActiveSetExhausted);
            }
            if let Some(tau) = self.opts.tau {
                if self.global_error_estimate() <= tau {
                    return Ok(StopReason::ErrorBelowTolerance);
                }
            }
            if let Some(w_max) = self.opts.w_max {
                if self.surrogate.ledger.work >= w_max {
                    return Ok(StopReason::WorkBudgetReached);
                }
            }
            if let Some(max_steps) = self.opts.max_steps {
                if self.step >= max_steps {
                    return Ok(StopReason::MaxStepsReached);
                }
            }
            let best = self.select_best().expect("active set is non-empty");
            self.accept(&best);
        }
    }
}

/// Convenience wrapper: run the multi-index driver to completion.
pub fn amisc_run(ensemble: &dyn ModelEnsemble, opts: &AdaptiveOptions) -> Result<RunResult> {
    let mut driver = MiscDriver::new(ensemble, opts.clone())?;
    let stop = driver.run()?;
    let (surrogate, trace) = driver.into_parts();
    Ok(RunResult {
        surrogate,
        trace,
        stop,
    })
}

/// The dimension-adaptive sparse-grid driver for a single model: an ensemble
/// with zero discretization dimensions. Coefficients are recomputed from the
/// batch indicator formula at every step rather than updated incrementally,
/// and admissibility, selection, and termination are implemented here
/// independently of [`MiscDriver`]. With one fixed model the two drivers make
/// identical decisions and produce identical traces.
pub struct SparseGridDriver<'a> {
    ensemble: &'a dyn ModelEnsemble,
    opts: AdaptiveOptions,
    bounds: Vec<u32>,
    surrogate: MiscSurrogate,
    trace: Vec<TraceRow>,
    step: u64,
    pending: VecDeque<MultiIndex>,
    pending_row: Option<TraceRow>,
}

impl<'a> SparseGridDriver<'a> {
    pub fn new(ensemble: &'a dyn ModelEnsemble, opts: AdaptiveOptions) -> Result<Self> {
        opts.validate()?;
        if ensemble.n_alpha() != 0 {
            return Err(Error::Validation(
                "the sparse-grid driver takes a single-model ensemble; pin the discretization first"
                    .into(),
            ));
        }
        let n_inputs = ensemble.n_inputs();
        if n_inputs == 0 {
            return Err(Error::Validation(
                "ensemble has no stochastic inputs".into(),
            ));
        }
        let bounds = vec![opts.max_level; n_inputs];
        let surrogate = MiscSurrogate::new(0, n_inputs, ensemble.n_qoi());
        let mut pending = VecDeque::new();
        pending.push_back(MultiIndex::zeros(n_inputs));
        Ok(SparseGridDriver {
            ensemble,
            opts,
            bounds,
            surrogate,
            trace: Vec::new(),
            step: 0,
            pending,
            pending_row: None,
        })
    }

    pub fn surrogate(&self) -> &MiscSurrogate {
        &self.surrogate
    }

    pub fn trace(&self) -> &[TraceRow] {
        &self.trace
    }

    pub fn into_parts(self) -> (MiscSurrogate, Vec<TraceRow>) {
        (self.surrogate, self.trace)
    }

    pub fn global_error_estimate(&self) -> f64 {
        self.surrogate.active.values().map(|r| r.delta_e).sum()
    }

    /// Coefficient changes from inserting `idx`, via full batch recomputation.
    fn batch_deltas(&self, idx: &MultiIndex) -> Result<Vec<(MultiIndex, i64)>> {
        let mut grown = self.surrogate.accepted.clone();
        grown.insert(idx.clone())?;
        let new_weights = combination_coefficients(&grown)?;
        let mut deltas = Vec::new();
        for (i, c) in new_weights.iter() {
            let dc = c - self.surrogate.coefficients.get(i);
            if dc != 0 {
                deltas.push((i.clone(), dc));
            }
        }
        Ok(deltas)
    }

    fn add_candidate(&mut self, idx: &MultiIndex) -> Result<()> {
        let beta = idx.clone();
        let (comp, delta_w) = self
            .surrogate
            .ledger
            .build_component(self.ensemble, &[], &beta)?;
        if self.surrogate.f00.is_empty() {
            self.surrogate.f00 = comp.values()?[..self.surrogate.n_qoi].to_vec();
        }
        let trial_box = component_to_pce(&comp)?;
        let deltas = self.batch_deltas(idx)?;
        let merged = self.surrogate.merge_deltas(&deltas, idx, &trial_box);
        let (dmean, dvar) = self.surrogate.stats.deltas(&merged);
        let (e_mean, e_var) = self.surrogate.normalize_indicators(&dmean, &dvar);
        let gamma = indicator_gamma(&e_mean, &e_var, delta_w, self.opts.kappa)?;
        let delta_e = gamma * delta_w;
        self.surrogate.components.insert(idx.clone(), comp);
        self.surrogate.pce_boxes.insert(idx.clone(), trial_box);
        self.surrogate.active.insert(
            idx.clone(),
            RefinementRecord {
                index: idx.clone(),
                delta_e_mean: e_mean,
                delta_e_var: e_var,
                delta_w,
                delta_e,
                gamma,
            },
        );
        Ok(())
    }

    fn drain_pending(&mut self, observer: &mut dyn FnMut(&TraceRow, &MiscSurrogate)) -> Result<()> {
        while let Some(idx) = self.pending.front().cloned() {
            self.add_candidate(&idx)?;
            self.pending.pop_front();
        }
        if let Some(mut row) = self.pending_row.take() {
            row.work = self.surrogate.ledger.work;
            observer(&row, &self.surrogate);
            self.trace.push(row);
        }
        Ok(())
    }

    fn accept(&mut self, idx: &MultiIndex) -> Result<()> {
        let record = self
            .surrogate
            .active
            .remove(idx)
            .expect("selected index is active");
        let deltas = self.batch_deltas(idx)?;
        let trial_box = self.surrogate.pce_boxes[idx].clone();
        let merged = self.surrogate.merge_deltas(&deltas, idx, &trial_box);
        for (i, dc) in &deltas {
            self.surrogate.coefficients.add(i, *dc);
        }
        self.surrogate.stats.apply(&merged);
        self.surrogate.accepted.insert(idx.clone())?;
        self.step += 1;

        // forward neighbors, admissibility checked directly over the levels
        for k in 0..idx.len() {
            if idx.entry(k) >= self.bounds[k] {
                continue;
            }
            let cand = idx.forward(k);
            let mut admissible = true;
            for j in 0..cand.len() {
                if let Some(b) = cand.backward(j) {
                    if !self.surrogate.accepted.contains(&b) {
                        admissible = false;
                        break;
                    }
                }
            }
            if admissible
                && !self.surrogate.active.contains_key(&cand)
                && !self.surrogate.accepted.contains(&cand)
            {
                self.pending.push_back(cand);
            }
        }
        self.pending_row = Some(TraceRow {
            step: self.step,
            index: idx.clone(),
            gamma: record.gamma,
            delta_w: record.delta_w,
            work: 0.0,
            mean: self.surrogate.stats.mean(),
            variance: self.surrogate.stats.variance.clone(),
        });
        Ok(())
    }

    pub fn run(&mut self) -> Result<StopReason> {
        self.run_with_observer(&mut |_, _| {})
    }

    pub fn run_with_observer(
        &mut self,
        observer: &mut dyn FnMut(&TraceRow, &MiscSurrogate),
    ) -> Result<StopReason> {
        loop {
            self.drain_pending(observer)?;
            if self.surrogate.active.is_empty() {
                return Ok(StopReason::ActiveSetExhausted);
            }
            if let Some(tau) = self.opts.tau {
                if self.global_error_estimate() <= tau {
                    return Ok(StopReason::ErrorBelowTolerance);
                }
            }
            if let Some(w_max) = self.opts.w_max {
                if self.surrogate.ledger.work >= w_max {
                    return Ok(StopReason::WorkBudgetReached);
                }
            }
            if let Some(max_steps) = self.opts.max_steps {
                if self.step >= max_steps {
                    return Ok(StopReason::MaxStepsReached);
                }
            }
            let mut best: Option<(MultiIndex, f64)> = None;
            for (idx, rec) in &self.surrogate.active {
                match &best {
                    Some((_, g)) if rec.gamma <= *g => {}
                    _ => best = Some((idx.clone(), rec.gamma)),
                }
            }
            let (best, _) = best.expect("active set is non-empty");
            self.accept(&best)?;
        }
    }
}

/// Convenience wrapper: run the single-fidelity sparse-grid driver.
pub fn sparse_grid_run(ensemble: &dyn ModelEnsemble, opts: &AdaptiveOptions) -> Result<RunResult> {
    let mut driver = SparseGridDriver::new(ensemble, opts.clone())?;
    let stop = driver.run()?;
    let (surrogate, trace) = driver.into_parts();
    Ok(RunResult {
        surrogate,
        trace,
        stop,
    })
}
