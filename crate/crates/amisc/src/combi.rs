//! Downward-closed index sets, Smolyak combination coefficients, isotropic
//! constructions, and sparse-grid point bookkeeping.
//!
//! A sparse approximation is a linear combination of low-resolution
//! tensor-product interpolants `sum_beta c_beta f_beta`. The coefficients come
//! from the inclusion-exclusion indicator formula
//! `c_beta = sum_{j in {0,1}^d} (-1)^{|j|_1} chi_I(beta + j)` and are valid for
//! any downward-closed index set. Levels are zero-based throughout.
//!
//! Grid points shared between constituent grids are merged by nested-node
//! identity ([`crate::rules::NodeId`]), never by floating-point tolerance.

use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, BTreeSet};
use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::index::MultiIndex;
use crate::tensor::{TensorComponent, TensorGrid};

/// A set of multi-indices of a common length.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IndexSet {
    dim: usize,
    set: BTreeSet<MultiIndex>,
}

impl IndexSet {
    pub fn new(dim: usize) -> Self {
        IndexSet {
            dim,
            set: BTreeSet::new(),
        }
    }

    pub fn from_indices(indices: impl IntoIterator<Item = MultiIndex>) -> Result<Self> {
        let mut iter = indices.into_iter();
        let first = iter
            .next()
            .ok_or_else(|| Error::Validation("empty index set needs explicit dim".into()))?;
        let mut s = IndexSet::new(first.len());
        s.insert(first)?;
        for idx in iter {
            s.insert(idx)?;
        }
        Ok(s)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.set.len()
    }

    pub fn is_empty(&self) -> bool {
        self.set.is_empty()
    }

    pub fn contains(&self, idx: &MultiIndex) -> bool {
        self.set.contains(idx)
    }

    pub fn insert(&mut self, idx: MultiIndex) -> Result<bool> {
        if idx.len() != self.dim {
            return Err(Error::Validation(format!(
                "index length {} does not match set dimension {}",
                idx.len(),
                self.dim
            )));
        }
        Ok(self.set.insert(idx))
    }

    /// Sorted iteration (lexicographic); the order is deterministic.
    pub fn iter(&self) -> impl Iterator<Item = &MultiIndex> {
        self.set.iter()
    }

    /// True iff every member has all of its backward neighbors in the set.
    pub fn is_downward_closed(&self) -> bool {
        self.violation().is_none()
    }

    fn violation(&self) -> Option<(MultiIndex, MultiIndex)> {
        for idx in &self.set {
            for k in 0..self.dim {
                if let Some(b) = idx.backward(k) {
                    if !self.set.contains(&b) {
                        return Some((idx.clone(), b));
                    }
                }
            }
        }
        None
    }

    pub fn validate_downward_closed(&self) -> Result<()> {
        match self.violation() {
            None => Ok(()),
            Some((idx, missing)) => Err(Error::NotDownwardClosed {
                index: format!("{idx:?}"),
                missing: format!("{missing:?}"),
            }),
        }
    }
}

impl FromIterator<MultiIndex> for IndexSet {
    fn from_iter<T: IntoIterator<Item = MultiIndex>>(iter: T) -> Self {
        IndexSet::from_indices(iter).expect("consistent index lengths")
    }
}

/// Combination coefficients `c_beta` for the members of an index set.
/// Stored for every member, including zeros; [`CombinationWeights::nonzero`]
/// iterates the terms that actually contribute.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CombinationWeights {
    map: BTreeMap<MultiIndex, i64>,
}

impl CombinationWeights {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, idx: &MultiIndex) -> i64 {
        self.map.get(idx).copied().unwrap_or(0)
    }

    pub fn set(&mut self, idx: MultiIndex, c: i64) {
        self.map.insert(idx, c);
    }

    pub fn add(&mut self, idx: &MultiIndex, dc: i64) {
        match self.map.entry(idx.clone()) {
            Entry::Occupied(mut e) => *e.get_mut() += dc,
            Entry::Vacant(e) => {
                e.insert(dc);
            }
        }
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&MultiIndex, i64)> {
        self.map.iter().map(|(k, &v)| (k, v))
    }

    pub fn nonzero(&self) -> impl Iterator<Item = (&MultiIndex, i64)> {
        self.iter().filter(|&(_, c)| c != 0)
    }

    pub fn sum(&self) -> i64 {
        self.map.values().sum()
    }

    /// Equality modulo zero coefficients.
    pub fn same_combination(&self, other: &CombinationWeights) -> bool {
        let a: BTreeMap<_, _> = self.nonzero().collect();
        let b: BTreeMap<_, _> = other.nonzero().collect();
        a == b
    }
}

/// Coefficient of `beta` from the indicator formula, enumerating the binary
/// offsets `j` with `beta + j` in the set. The depth-first walk prunes any
/// branch whose partial offset already leaves the set; downward closure makes
/// that pruning exact, so the cost stays modest even in high dimension.
fn chi_coefficient(set: &IndexSet, beta: &MultiIndex) -> i64 {
    fn go(set: &IndexSet, current: &mut Vec<u32>, from: usize, parity: i64) -> i64 {
        let mut total = parity;
        for k in from..current.len() {
            current[k] += 1;
            let probe = MultiIndex::new(current.clone());
            if set.contains(&probe) {
                total += go(set, current, k + 1, -parity);
            }
            current[k] -= 1;
        }
        total
    }
    let mut current = beta.entries().to_vec();
    go(set, &mut current, 0, 1)
}

/// Combination coefficients for every member of a downward-closed set.
/// The coefficients of any non-empty downward-closed set sum to one.
pub fn combination_coefficients(set: &IndexSet) -> Result<CombinationWeights> {
    if set.is_empty() {
        return Err(Error::Validation(
            "combination coefficients of an empty set".into(),
        ));
    }
    set.validate_downward_closed()?;
    let mut weights = CombinationWeights::new();
    for beta in set.iter() {
        weights.set(beta.clone(), chi_coefficient(set, beta));
    }
    Ok(weights)
}

/// The zero-based total-degree set `{beta : |beta|_1 <= l}`.
pub fn isotropic_index_set(l: u32, dim: usize) -> IndexSet {
    assert!(dim >= 1);
    fn go(set: &mut IndexSet, prefix: &mut Vec<u32>, dim: usize, budget: u32) {
        if prefix.len() == dim {
            set.insert(MultiIndex::new(prefix.clone())).unwrap();
            return;
        }
        for v in 0..=budget {
            prefix.push(v);
            go(set, prefix, dim, budget - v);
            prefix.pop();
        }
    }
    let mut set = IndexSet::new(dim);
    go(&mut set, &mut Vec::new(), dim, l);
    set
}

/// The union of the tensor grids of a downward-closed set, with per-index
/// new-point bookkeeping.
#[derive(Debug, Clone)]
pub struct SparsePoints {
    /// Unique points, grouped by owning index (sorted), grid order within.
    pub points: Vec<Vec<f64>>,
    /// For each member index, the positions (into `points`) of the grid points
    /// that appear in no smaller member grid. These sets partition `points`.
    pub new_points: BTreeMap<MultiIndex, Vec<usize>>,
}

/// Enumerate the unique points of the sparse grid over `set`.
///
/// A point of the grid of `beta` is new at `beta` exactly when its per-dimension
/// minimal-level signature equals `beta`; nested-node identity makes the
/// decomposition exact with no floating-point comparisons.
pub fn sparse_points(set: &IndexSet) -> Result<SparsePoints> {
    set.validate_downward_closed()?;
    let mut points = Vec::new();
    let mut new_points = BTreeMap::new();
    for beta in set.iter() {
        let grid = TensorGrid::new(beta);
        let rules: Vec<_> = beta
            .entries()
            .iter()
            .map(|&l| crate::rules::UnivariateRule::cached(l))
            .collect();
        let mut own = Vec::new();
        grid.for_each_point(|_, digits| {
            let sig = grid.min_level_signature(digits);
            if sig == beta.entries() {
                own.push(points.len());
                points.push(
                    digits
                        .iter()
                        .zip(&rules)
                        .map(|(&j, r)| r.nodes()[j])
                        .collect(),
                );
            }
        });
        new_points.insert(beta.clone(), own);
    }
    Ok(SparsePoints { points, new_points })
}

/// Combined interpolant `sum_beta c_beta f_beta(z)`.
pub fn sparse_eval(
    weights: &CombinationWeights,
    components: &BTreeMap<MultiIndex, TensorComponent>,
    z: &[f64],
) -> Result<Vec<f64>> {
    let mut out: Option<Vec<f64>> = None;
    for (beta, c) in weights.nonzero() {
        let comp = components
            .get(beta)
            .ok_or_else(|| Error::NotReady(format!("missing component for {beta:?}")))?;
        let v = comp.eval(z)?;
        let acc = out.get_or_insert_with(|| vec![0.0; v.len()]);
        for (a, x) in acc.iter_mut().zip(&v) {
            *a += c as f64 * x;
        }
    }
    out.ok_or_else(|| Error::Validation("no nonzero combination terms".into()))
}

/// Combined mean `sum_beta c_beta mu_beta`.
pub fn sparse_mean(
    weights: &CombinationWeights,
    components: &BTreeMap<MultiIndex, TensorComponent>,
) -> Result<Vec<f64>> {
    let mut out: Option<Vec<f64>> = None;
    for (beta, c) in weights.nonzero() {
        let comp = components
            .get(beta)
            .ok_or_else(|| Error::NotReady(format!("missing component for {beta:?}")))?;
        let v = comp.mean()?;
        let acc = out.get_or_insert_with(|| vec![0.0; v.len()]);
        for (a, x) in acc.iter_mut().zip(&v) {
            *a += c as f64 * x;
        }
    }
    out.ok_or_else(|| Error::Validation("no nonzero combination terms".into()))
}

/// Write an index set in the line-oriented text format: one index per line,
/// entries space-separated, coefficient appended after a tab when present.
pub fn write_index_set(
    w: &mut impl Write,
    set: &IndexSet,
    weights: Option<&CombinationWeights>,
) -> Result<()> {
    for idx in set.iter() {
        match weights {
            Some(cw) => writeln!(w, "{}\t{}", idx, cw.get(idx))?,
            None => writeln!(w, "{idx}")?,
        }
    }
    Ok(())
}

/// Parse the line-oriented index-set format written by [`write_index_set`].
pub fn read_index_set(r: impl BufRead) -> Result<(IndexSet, Option<CombinationWeights>)> {
    let mut indices = Vec::new();
    let mut weights = CombinationWeights::new();
    let mut any_weight = false;
    for line in r.lines() {
        let line = line?;
        let line = line.trim_end();
        if line.is_empty() {
            continue;
        }
        let (idx_part, coeff_part) = match line.split_once('\t') {
            Some((a, b)) => (a, Some(b)),
            None => (line, None),
        };
        let entries: std::result::Result<Vec<u32>, _> =
            idx_part.split_whitespace().map(str::parse).collect();
        let entries =
            entries.map_err(|e| Error::Validation(format!("bad index line {line:?}: {e}")))?;
        if entries.is_empty() {
            return Err(Error::Validation(format!("empty index line {line:?}")));
        }
        let idx = MultiIndex::new(entries);
        if let Some(c) = coeff_part {
            let c: i64 = c
                .trim()
                .parse()
                .map_err(|e| Error::Validation(format!("bad coefficient in {line:?}: {e}")))?;
            weights.set(idx.clone(), c);
            any_weight = true;
        }
        indices.push(idx);
    }
    let set = IndexSet::from_indices(indices)?;
    Ok((set, if any_weight { Some(weights) } else { None }))
}
