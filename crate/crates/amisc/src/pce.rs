//! Orthonormal polynomial (Legendre) expansions of Lagrange tensor components
//! and combined surrogates; analytic means, variances, and Sobol indices.
//!
//! The orthonormal family is normalized Legendre under the uniform probability
//! density on `[-1, 1]`: `phi_k(z) = sqrt(2k + 1) P_k(z)`. Each univariate
//! Lagrange basis function is expanded exactly in that family by Gauss
//! quadrature (the integrands are polynomials), and a tensor component is
//! transformed dimension by dimension, so the cost is quadratic in the number
//! of component points rather than cubic. The transform of a combined
//! surrogate is the coefficient-weighted sum of its component transforms.
//!
//! Only uniform inputs ship; the transform is written against a pluggable
//! univariate family in the sense that everything downstream consumes the
//! transform matrix, not the Legendre recurrence.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use crate::combi::CombinationWeights;
use crate::error::{Error, Result};
use crate::index::MultiIndex;
use crate::rules::UnivariateRule;
use crate::tensor::TensorComponent;

/// Gauss-Legendre nodes (ascending) and weights for `integral_{-1}^{1} f dx`
/// (weights sum to 2). Newton iteration on the Legendre recurrence; accurate
/// for rules with thousands of points.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Chebyshev-style initial guess for the i-th largest root
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // evaluate P_n and P_{n-1} by recurrence
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let (pn, pn1) = if n == 1 { (x, 1.0) } else { (p1, p0) };
            dp = n as f64 * (x * pn - pn1) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
        // recompute the central weight from the recurrence at x = 0
        let mut p0 = 1.0;
        let mut p1 = 0.0;
        for k in 2..=n {
            let kf = k as f64;
            let p2 = (-(kf - 1.0) * p0) / kf;
            p0 = p1;
            p1 = p2;
        }
        let pn1 = if n == 1 { 1.0 } else { p0 };
        let dp = n as f64 * (0.0 - pn1) / (0.0 - 1.0);
        weights[n / 2] = 2.0 / (dp * dp);
    }
    (nodes, weights)
}

/// Values of the orthonormal Legendre family `phi_0 .. phi_{k_max}` at `x`.
pub fn legendre_normalized(k_max: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(k_max + 1);
    let mut p0 = 1.0;
    let mut p1 = x;
    out.push(1.0);
    if k_max >= 1 {
        out.push((3.0f64).sqrt() * x);
    }
    for k in 2..=k_max {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
        out.push((2.0 * kf + 1.0).sqrt() * p2);
    }
    out
}

/// Change of basis from the Lagrange polynomials of one univariate rule to the
/// orthonormal Legendre family: `matrix[j][k]` is the coefficient of `phi_k`
/// in Lagrange basis `j`.
#[derive(Debug, Clone)]
pub struct UnivariateTransform {
    level: u32,
    m: usize,
    matrix: Vec<f64>, // row j: coefficients over k = 0..m
}

impl UnivariateTransform {
    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn size(&self) -> usize {
        self.m
    }

    pub fn coefficient(&self, j: usize, k: usize) -> f64 {
        self.matrix[j * self.m + k]
    }

    pub fn row(&self, j: usize) -> &[f64] {
        &self.matrix[j * self.m..(j + 1) * self.m]
    }
}

/// Expand every Lagrange basis function of `rule` in the orthonormal family.
/// Gauss quadrature with as many points as the rule has nodes is exact for the
/// degree `2m - 2` integrands.
pub fn univariate_transform(rule: &UnivariateRule) -> UnivariateTransform {
    let m = rule.node_count();
    let (gx, gw) = gauss_legendre(m);
    let mut matrix = vec![0.0; m * m];
    for (&x, &w) in gx.iter().zip(&gw) {
        let basis = rule.basis_all(x);
        let phi = legendre_normalized(m - 1, x);
        let half_w = 0.5 * w; // probability density
        for j in 0..m {
            let bj = basis[j] * half_w;
            if bj == 0.0 {
                continue;
            }
            for k in 0..m {
                matrix[j * m + k] += bj * phi[k];
            }
        }
    }
    UnivariateTransform {
        level: rule.level(),
        m,
        matrix,
    }
}

/// Shared per-level transform for the Clenshaw-Curtis family.
pub fn cached_transform(level: u32) -> Arc<UnivariateTransform> {
    static CACHE: OnceLock<Mutex<BTreeMap<u32, Arc<UnivariateTransform>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(BTreeMap::new()));
    let mut guard = cache.lock().unwrap();
    guard
        .entry(level)
        .or_insert_with(|| Arc::new(univariate_transform(&UnivariateRule::cached(level))))
        .clone()
}

/// Dense orthonormal coefficients of a single tensor component, laid out over
/// the degree box `0..m(beta_i)` per dimension (dimension 1 slowest, QoI
/// fastest).
#[derive(Debug, Clone)]
pub struct ComponentPce {
    sizes: Vec<usize>,
    n_qoi: usize,
    coeffs: Vec<f64>,
}

impl ComponentPce {
    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    /// Walk the coefficient box in lexicographic degree order.
    pub fn for_each(&self, mut f: impl FnMut(&[usize], &[f64])) {
        let d = self.sizes.len();
        let total: usize = self.sizes.iter().product();
        let mut digits = vec![0usize; d];
        for t in 0..total {
            f(&digits, &self.coeffs[t * self.n_qoi..(t + 1) * self.n_qoi]);
            for i in (0..d).rev() {
                digits[i] += 1;
                if digits[i] < self.sizes[i] {
                    break;
                }
                digits[i] = 0;
            }
        }
    }
}

/// Transform one populated tensor component into its orthonormal coefficients
/// by contracting the value tensor with the univariate transform of each
/// dimension in turn.
pub fn component_to_pce(comp: &TensorComponent) -> Result<ComponentPce> {
    let values = comp.values()?;
    let sizes: Vec<usize> = comp.grid().sizes().to_vec();
    let n_qoi = comp.n_qoi();
    let d = sizes.len();
    let mut data = values.to_vec();
    // contract dimension i: out[.., k, ..] = sum_j nu[j][k] * in[.., j, ..]
    for i in 0..d {
        let nu = cached_transform(comp.beta().entry(i));
        let m = sizes[i];
        debug_assert_eq!(nu.size(), m);
        let inner: usize = sizes[i + 1..].iter().product::<usize>() * n_qoi;
        let outer: usize = sizes[..i].iter().product();
        let mut out = vec![0.0; data.len()];
        for o in 0..outer {
            let base = o * m * inner;
            for j in 0..m {
                let row = nu.row(j);
                let src = &data[base + j * inner..base + (j + 1) * inner];
                for (k, &njk) in row.iter().enumerate() {
                    if njk == 0.0 {
                        continue;
                    }
                    let dst = &mut out[base + k * inner..base + (k + 1) * inner];
                    for (dv, &sv) in dst.iter_mut().zip(src) {
                        *dv += njk * sv;
                    }
                }
            }
        }
        data = out;
    }
    Ok(ComponentPce {
        sizes,
        n_qoi,
        coeffs: data,
    })
}

/// An orthonormal polynomial expansion with vector-valued coefficients.
#[derive(Debug, Clone)]
pub struct PceExpansion {
    dim: usize,
    n_qoi: usize,
    coeffs: BTreeMap<MultiIndex, Vec<f64>>,
}

impl PceExpansion {
    pub fn new(dim: usize, n_qoi: usize) -> Self {
        PceExpansion {
            dim,
            n_qoi,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_qoi(&self) -> usize {
        self.n_qoi
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coefficient(&self, lambda: &MultiIndex) -> Option<&[f64]> {
        self.coeffs.get(lambda).map(Vec::as_slice)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&MultiIndex, &[f64])> {
        self.coeffs.iter().map(|(k, v)| (k, v.as_slice()))
    }

    /// Add `scale` times a component box into the expansion.
    pub fn accumulate(&mut self, scale: f64, comp: &ComponentPce) {
        debug_assert_eq!(comp.sizes.len(), self.dim);
        debug_assert_eq!(comp.n_qoi, self.n_qoi);
        let n_qoi = self.n_qoi;
        comp.for_each(|digits, row| {
            let key = MultiIndex::new(digits.iter().map(|&x| x as u32).collect());
            let entry = self.coeffs.entry(key).or_insert_with(|| vec![0.0; n_qoi]);
            for (e, &v) in entry.iter_mut().zip(row) {
                *e += scale * v;
            }
        });
    }

    /// Mean per QoI: the constant coefficient.
    pub fn mean(&self) -> Vec<f64> {
        self.coeffs
            .get(&MultiIndex::zeros(self.dim))
            .cloned()
            .unwrap_or_else(|| vec![0.0; self.n_qoi])
    }

    /// Variance per QoI: the sum of squared non-constant coefficients.
    pub fn variance(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.n_qoi];
        for (lambda, row) in &self.coeffs {
            if lambda.is_zero() {
                continue;
            }
            for (o, &v) in out.iter_mut().zip(row) {
                *o += v * v;
            }
        }
        out
    }

    /// `(mean, variance)` per QoI.
    pub fn mean_variance(&self) -> (Vec<f64>, Vec<f64>) {
        (self.mean(), self.variance())
    }

    /// Evaluate the expansion at `z`.
    pub fn eval(&self, z: &[f64]) -> Vec<f64> {
        debug_assert_eq!(z.len(), self.dim);
        let max_deg: usize = self
            .coeffs
            .keys()
            .flat_map(|l| l.entries().iter().map(|&e| e as usize))
            .max()
            .unwrap_or(0);
        let phi: Vec<Vec<f64>> = z
            .iter()
            .map(|&zi| legendre_normalized(max_deg, zi))
            .collect();
        let mut out = vec![0.0; self.n_qoi];
        for (lambda, row) in &self.coeffs {
            let mut b = 1.0;
            for (i, &l) in lambda.entries().iter().enumerate() {
                b *= phi[i][l as usize];
            }
            for (o, &v) in out.iter_mut().zip(row) {
                *o += b * v;
            }
        }
        out
    }

    /// Unnormalized variance contribution of every variable subset present in
    /// the expansion, keyed by the sorted 0-based variable subset.
    pub fn variance_by_subset(&self) -> BTreeMap<Vec<usize>, Vec<f64>> {
        let mut out: BTreeMap<Vec<usize>, Vec<f64>> = BTreeMap::new();
        for (lambda, row) in &self.coeffs {
            if lambda.is_zero() {
                continue;
            }
            let support: Vec<usize> = lambda
                .entries()
                .iter()
                .enumerate()
                .filter(|&(_, &e)| e > 0)
                .map(|(i, _)| i)
                .collect();
            let entry = out.entry(support).or_insert_with(|| vec![0.0; self.n_qoi]);
            for (e, &v) in entry.iter_mut().zip(row) {
                *e += v * v;
            }
        }
        out
    }

    /// True when a QoI's variance is zero up to the round-off floor of the
    /// transform (squared coefficients of a constant sit near `eps^2`).
    pub fn has_zero_variance(&self, q: usize) -> bool {
        let mean = self.mean()[q];
        self.variance()[q] <= 1e-26 * (1.0 + mean * mean)
    }

    /// Normalized Sobol indices for explicit variable subsets (0-based).
    /// Fails for any QoI with zero total variance.
    pub fn sobol_indices(&self, subsets: &[Vec<usize>]) -> Result<BTreeMap<Vec<usize>, Vec<f64>>> {
        let total = self.variance();
        for q in 0..self.n_qoi {
            if self.has_zero_variance(q) {
                return Err(Error::ZeroVariance(q));
            }
        }
        let by_subset = self.variance_by_subset();
        let mut out = BTreeMap::new();
        for subset in subsets {
            let mut sorted = subset.clone();
            sorted.sort_unstable();
            sorted.dedup();
            let var = by_subset
                .get(&sorted)
                .cloned()
                .unwrap_or_else(|| vec![0.0; self.n_qoi]);
            let normalized: Vec<f64> = var.iter().zip(&total).map(|(v, t)| v / t).collect();
            out.insert(sorted, normalized);
        }
        Ok(out)
    }

    /// Default reporting subsets: all singletons, all pairs, and any higher
    /// subset whose unnormalized variance exceeds `1e-6` of total variance.
    pub fn default_subsets(&self) -> Vec<Vec<usize>> {
        let total = self.variance();
        let by_subset = self.variance_by_subset();
        let mut out: BTreeSet<Vec<usize>> = BTreeSet::new();
        for i in 0..self.dim {
            out.insert(vec![i]);
            for j in i + 1..self.dim {
                out.insert(vec![i, j]);
            }
        }
        for (subset, var) in &by_subset {
            if subset.len() > 2 {
                let keep = var
                    .iter()
                    .zip(&total)
                    .any(|(v, t)| *t > 0.0 && *v > 1e-6 * t);
                if keep {
                    out.insert(subset.clone());
                }
            }
        }
        out.into_iter().collect()
    }
}

use std::collections::BTreeSet;

/// Combine per-index component transforms with combination coefficients into
/// one expansion: `T[S] = sum c_beta T[f_beta]`.
pub fn combine_to_pce(
    weights: &CombinationWeights,
    components: &BTreeMap<MultiIndex, TensorComponent>,
) -> Result<PceExpansion> {
    let mut expansion: Option<PceExpansion> = None;
    for (beta, c) in weights.nonzero() {
        let comp = components
            .get(beta)
            .ok_or_else(|| Error::NotReady(format!("missing component for {beta:?}")))?;
        let box_ = component_to_pce(comp)?;
        let exp =
            expansion.get_or_insert_with(|| PceExpansion::new(comp.grid().dim(), comp.n_qoi()));
        exp.accumulate(c as f64, &box_);
    }
    expansion.ok_or_else(|| Error::Validation("no nonzero combination terms".into()))
}

/// Transform a combined surrogate into one orthonormal expansion over its
/// stochastic inputs: the coefficient-weighted sum of the component
/// transforms. Evaluating the result matches the surrogate pointwise.
pub fn surrogate_to_pce(surrogate: &crate::adaptive::MiscSurrogate) -> Result<PceExpansion> {
    let mut expansion = PceExpansion::new(surrogate.n_inputs(), surrogate.n_qoi());
    for (idx, c) in surrogate.coefficients().nonzero() {
        let comp = surrogate
            .component(idx)
            .ok_or_else(|| Error::NotReady(format!("missing component for {idx:?}")))?;
        expansion.accumulate(c as f64, &component_to_pce(comp)?);
    }
    Ok(expansion)
}
