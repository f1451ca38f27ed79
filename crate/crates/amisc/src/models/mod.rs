//! Built-in model ensembles: an evaluator `(alpha, z) -> QoI vector` with a
//! per-discretization cost and declared level bounds.
//!
//! Inputs `z` always live on the reference cube `[-1, 1]^n`; each model maps
//! them affinely onto its physical variable ranges internally. Evaluation is
//! deterministic for fixed `(alpha, z)`.

mod advection;
mod cosine;

pub use advection::{
    advection_cost, advection_diffusion_ensemble, kle_diffusivity, AdvectionDiffusion,
    AdvectionDiffusionConfig,
};
pub use cosine::{cosine_2d, cosine_ladder, Cosine2d, CosineLadder};

use crate::error::{Error, Result};
use crate::index::MultiIndex;

/// An ensemble of model discretizations of varying fidelity.
///
/// `alpha` indexes positions in the declared per-dimension level lists; the
/// zero index is the coarsest model. Cost must increase strictly along every
/// alpha dimension.
pub trait ModelEnsemble: Sync {
    /// Number of discretization dimensions (may be zero for a plain function).
    fn n_alpha(&self) -> usize;

    /// Number of stochastic inputs.
    fn n_inputs(&self) -> usize;

    /// Number of quantities of interest per evaluation.
    fn n_qoi(&self) -> usize;

    /// Inclusive per-dimension maximum alpha levels; length `n_alpha`.
    fn alpha_bounds(&self) -> Vec<u32>;

    /// Cost of one evaluation at discretization `alpha`, in units where the
    /// finest declared model costs 1.
    fn cost(&self, alpha: &[u32]) -> f64;

    /// Evaluate the model at discretization `alpha` and reference input `z`.
    fn evaluate(&self, alpha: &[u32], z: &[f64]) -> Result<Vec<f64>>;
}

impl<E: ModelEnsemble + ?Sized> ModelEnsemble for Box<E> {
    fn n_alpha(&self) -> usize {
        (**self).n_alpha()
    }

    fn n_inputs(&self) -> usize {
        (**self).n_inputs()
    }

    fn n_qoi(&self) -> usize {
        (**self).n_qoi()
    }

    fn alpha_bounds(&self) -> Vec<u32> {
        (**self).alpha_bounds()
    }

    fn cost(&self, alpha: &[u32]) -> f64 {
        (**self).cost(alpha)
    }

    fn evaluate(&self, alpha: &[u32], z: &[f64]) -> Result<Vec<f64>> {
        (**self).evaluate(alpha, z)
    }
}

pub(crate) fn check_alpha(ensemble: &dyn ModelEnsemble, alpha: &[u32]) -> Result<()> {
    let bounds = ensemble.alpha_bounds();
    if alpha.len() != bounds.len() {
        return Err(Error::Validation(format!(
            "alpha has {} entries, ensemble declares {}",
            alpha.len(),
            bounds.len()
        )));
    }
    for (i, (&a, &b)) in alpha.iter().zip(&bounds).enumerate() {
        if a > b {
            return Err(Error::Validation(format!(
                "alpha[{i}] = {a} exceeds declared bound {b}"
            )));
        }
    }
    Ok(())
}

/// An ensemble pinned at one fixed discretization, exposing zero alpha
/// dimensions. Running the adaptive driver on a pinned ensemble is the
/// single-fidelity case.
pub struct Pinned<E> {
    inner: E,
    alpha: Vec<u32>,
}

impl<E: ModelEnsemble> Pinned<E> {
    pub fn new(inner: E, alpha: Vec<u32>) -> Result<Self> {
        check_alpha(&inner, &alpha)?;
        Ok(Pinned { inner, alpha })
    }

    /// Pin at the finest declared discretization.
    pub fn at_top(inner: E) -> Self {
        let alpha = inner.alpha_bounds();
        Pinned { inner, alpha }
    }

    pub fn alpha(&self) -> &[u32] {
        &self.alpha
    }
}

impl<E: ModelEnsemble> ModelEnsemble for Pinned<E> {
    fn n_alpha(&self) -> usize {
        0
    }

    fn n_inputs(&self) -> usize {
        self.inner.n_inputs()
    }

    fn n_qoi(&self) -> usize {
        self.inner.n_qoi()
    }

    fn alpha_bounds(&self) -> Vec<u32> {
        Vec::new()
    }

    fn cost(&self, _alpha: &[u32]) -> f64 {
        self.inner.cost(&self.alpha)
    }

    fn evaluate(&self, _alpha: &[u32], z: &[f64]) -> Result<Vec<f64>> {
        self.inner.evaluate(&self.alpha, z)
    }
}

/// A multi-dimensional ensemble re-indexed along a one-dimensional hierarchy
/// of discretizations, so the same adaptive driver runs in multi-level mode.
pub struct Multilevel<E> {
    inner: E,
    hierarchy: Vec<MultiIndex>,
}

impl<E: ModelEnsemble> Multilevel<E> {
    /// `hierarchy[j]` is the inner discretization selected by level `j`.
    pub fn new(inner: E, hierarchy: Vec<MultiIndex>) -> Result<Self> {
        if hierarchy.is_empty() {
            return Err(Error::Validation("empty multilevel hierarchy".into()));
        }
        for idx in &hierarchy {
            check_alpha(&inner, idx.entries())?;
        }
        for w in hierarchy.windows(2) {
            if inner.cost(w[0].entries()) >= inner.cost(w[1].entries()) {
                return Err(Error::Validation(
                    "multilevel hierarchy must have strictly increasing cost".into(),
                ));
            }
        }
        Ok(Multilevel { inner, hierarchy })
    }

    pub fn hierarchy(&self) -> &[MultiIndex] {
        &self.hierarchy
    }
}

impl<E: ModelEnsemble> ModelEnsemble for Multilevel<E> {
    fn n_alpha(&self) -> usize {
        1
    }

    fn n_inputs(&self) -> usize {
        self.inner.n_inputs()
    }

    fn n_qoi(&self) -> usize {
        self.inner.n_qoi()
    }

    fn alpha_bounds(&self) -> Vec<u32> {
        vec![(self.hierarchy.len() - 1) as u32]
    }

    fn cost(&self, alpha: &[u32]) -> f64 {
        self.inner.cost(self.hierarchy[alpha[0] as usize].entries())
    }

    fn evaluate(&self, alpha: &[u32], z: &[f64]) -> Result<Vec<f64>> {
        self.inner
            .evaluate(self.hierarchy[alpha[0] as usize].entries(), z)
    }
}
