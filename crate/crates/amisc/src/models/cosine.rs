//! Algebraic test models: a one-variable cosine fidelity ladder and a
//! two-variable cosine with no discretization parameters.

use std::f64::consts::PI;

use super::ModelEnsemble;
use crate::error::{Error, Result};

/// A hierarchy of shifted cosines converging to `cos(pi/2 (z + 4/5))` as the
/// shift vanishes: level `a` evaluates `cos(pi/2 (z + 4/5 + eps_a))`. Costs
/// double per level.
pub struct CosineLadder {
    eps: Vec<f64>,
}

/// Build the ladder; `eps` must be strictly decreasing and non-negative.
pub fn cosine_ladder(eps: &[f64]) -> Result<CosineLadder> {
    if eps.is_empty() {
        return Err(Error::Validation(
            "cosine ladder needs at least one level".into(),
        ));
    }
    for w in eps.windows(2) {
        if w[1] >= w[0] {
            return Err(Error::Validation(format!(
                "eps must be strictly decreasing, got {} then {}",
                w[0], w[1]
            )));
        }
    }
    if *eps.last().unwrap() < 0.0 {
        return Err(Error::Validation("eps must be non-negative".into()));
    }
    Ok(CosineLadder { eps: eps.to_vec() })
}

impl Default for CosineLadder {
    fn default() -> Self {
        cosine_ladder(&[0.2, 0.1, 0.05]).unwrap()
    }
}

impl CosineLadder {
    pub fn eps(&self) -> &[f64] {
        &self.eps
    }

    /// The limit function the ladder converges to.
    pub fn truth(z: f64) -> f64 {
        (PI / 2.0 * (z + 0.8)).cos()
    }
}

impl ModelEnsemble for CosineLadder {
    fn n_alpha(&self) -> usize {
        1
    }

    fn n_inputs(&self) -> usize {
        1
    }

    fn n_qoi(&self) -> usize {
        1
    }

    fn alpha_bounds(&self) -> Vec<u32> {
        vec![(self.eps.len() - 1) as u32]
    }

    fn cost(&self, alpha: &[u32]) -> f64 {
        (1u64 << alpha[0]) as f64
    }

    fn evaluate(&self, alpha: &[u32], z: &[f64]) -> Result<Vec<f64>> {
        let eps = self.eps[alpha[0] as usize];
        Ok(vec![(PI / 2.0 * (z[0] + 0.8 + eps)).cos()])
    }
}

/// `cos(2 pi z1) cos(pi z2)` on `[-1, 1]^2`, uniform inputs, no solver
/// parameters. Its exact mean is zero and all of its variance sits on the
/// interaction of the two variables.
pub struct Cosine2d;

pub fn cosine_2d() -> Cosine2d {
    Cosine2d
}

impl Cosine2d {
    pub fn value(z: &[f64]) -> f64 {
        (2.0 * PI * z[0]).cos() * (PI * z[1]).cos()
    }
}

impl ModelEnsemble for Cosine2d {
    fn n_alpha(&self) -> usize {
        0
    }

    fn n_inputs(&self) -> usize {
        2
    }

    fn n_qoi(&self) -> usize {
        1
    }

    fn alpha_bounds(&self) -> Vec<u32> {
        Vec::new()
    }

    fn cost(&self, _alpha: &[u32]) -> f64 {
        1.0
    }

    fn evaluate(&self, _alpha: &[u32], z: &[f64]) -> Result<Vec<f64>> {
        Ok(vec![Self::value(z)])
    }
}
