//! Multi-indices: fixed-length vectors of non-negative integers with the
//! componentwise partial order.
//!
//! A multi-index labels either per-dimension interpolation levels (stochastic
//! space) or discretization levels (model space), or the concatenation of
//! both. The derived `Ord` is lexicographic and exists only so indices can key
//! deterministic ordered containers; the domain ordering is [`MultiIndex::leq`].

use std::fmt;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    /// A multi-index must have at least one entry.
    pub fn new(entries: Vec<u32>) -> Self {
        assert!(!entries.is_empty(), "multi-index must be non-empty");
        MultiIndex(entries)
    }

    pub fn zeros(dim: usize) -> Self {
        Self::new(vec![0; dim])
    }

    /// Concatenation of a model part (possibly empty) and a stochastic part.
    pub fn concat(alpha: &[u32], beta: &[u32]) -> Self {
        let mut v = Vec::with_capacity(alpha.len() + beta.len());
        v.extend_from_slice(alpha);
        v.extend_from_slice(beta);
        Self::new(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn entry(&self, i: usize) -> u32 {
        self.0[i]
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    pub fn l1(&self) -> u64 {
        self.0.iter().map(|&e| e as u64).sum()
    }

    /// Componentwise partial order: `self <= other` in every entry.
    pub fn leq(&self, other: &MultiIndex) -> bool {
        debug_assert_eq!(self.len(), other.len());
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// Forward neighbor in dimension `k`.
    pub fn forward(&self, k: usize) -> MultiIndex {
        let mut v = self.0.clone();
        v[k] += 1;
        MultiIndex(v)
    }

    /// Backward neighbor in dimension `k`, or `None` at the zero face.
    pub fn backward(&self, k: usize) -> Option<MultiIndex> {
        if self.0[k] == 0 {
            return None;
        }
        let mut v = self.0.clone();
        v[k] -= 1;
        Some(MultiIndex(v))
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    /// Entries joined by an arbitrary separator, e.g. for CSV columns.
    pub fn to_delimited(&self, sep: char) -> String {
        let mut s = String::new();
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                s.push(sep);
            }
            s.push_str(&e.to_string());
        }
        s
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.to_delimited(','))
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_delimited(' '))
    }
}

impl From<Vec<u32>> for MultiIndex {
    fn from(v: Vec<u32>) -> Self {
        Self::new(v)
    }
}

impl From<&[u32]> for MultiIndex {
    fn from(v: &[u32]) -> Self {
        Self::new(v.to_vec())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partial_order_is_componentwise() {
        let a = MultiIndex::new(vec![1, 0]);
        let b = MultiIndex::new(vec![1, 2]);
        let c = MultiIndex::new(vec![0, 3]);
        assert!(a.leq(&b));
        assert!(!b.leq(&a));
        assert!(!a.leq(&c));
        assert!(!c.leq(&a));
        assert!(a.leq(&a));
    }

    #[test]
    fn neighbors() {
        let a = MultiIndex::new(vec![1, 0]);
        assert_eq!(a.forward(1), MultiIndex::new(vec![1, 1]));
        assert_eq!(a.backward(0), Some(MultiIndex::new(vec![0, 0])));
        assert_eq!(a.backward(1), None);
    }

    #[test]
    fn concat_and_split() {
        let j = MultiIndex::concat(&[2, 1], &[0, 3]);
        assert_eq!(j.entries(), &[2, 1, 0, 3]);
        assert_eq!(j.l1(), 6);
    }
}
