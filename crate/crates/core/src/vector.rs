use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::corpus::ConceptId;
use crate::Scalar;

/// Concept-indexed sparse vector. Zero components are never stored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "S: Serialize", deserialize = "S: Deserialize<'de>"))]
pub struct SparseVector<S> {
    entries: BTreeMap<ConceptId, S>,
}

impl<S: Scalar> Default for SparseVector<S> {
    fn default() -> Self {
        SparseVector {
            entries: BTreeMap::new(),
        }
    }
}

impl<S: Scalar> SparseVector<S> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, concept: ConceptId) -> S {
        self.entries.get(&concept).copied().unwrap_or_else(S::zero)
    }

    /// Sets a component; zero removes it.
    pub fn set(&mut self, concept: ConceptId, value: S) {
        if value == S::zero() {
            self.entries.remove(&concept);
        } else {
            self.entries.insert(concept, value);
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (ConceptId, S)> + '_ {
        self.entries.iter().map(|(&c, &w)| (c, w))
    }

    pub fn concepts(&self) -> impl Iterator<Item = ConceptId> + '_ {
        self.entries.keys().copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Euclidean norm, summing squares in ascending concept order.
    pub fn norm(&self) -> S {
        self.entries
            .values()
            .fold(S::zero(), |acc, &w| acc + w * w)
            .sqrt()
    }

    /// Dot product, accumulated over `self`'s components in ascending
    /// concept order.
    pub fn dot(&self, other: &Self) -> S {
        self.iter()
            .fold(S::zero(), |acc, (c, w)| acc + w * other.get(c))
    }

    /// Componentwise sum.
    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (c, w) in other.iter() {
            out.set(c, out.get(c) + w);
        }
        out
    }

    pub fn scale(&self, factor: S) -> Self {
        self.iter().map(|(c, w)| (c, w * factor)).collect()
    }

    /// Replaces negative components by zero (and so removes them).
    pub fn clamp_non_negative(&mut self) {
        self.entries.retain(|_, w| *w > S::zero());
    }

    pub fn is_non_negative(&self) -> bool {
        self.entries.values().all(|w| *w >= S::zero())
    }
}

impl<S: Scalar> FromIterator<(ConceptId, S)> for SparseVector<S> {
    fn from_iter<I: IntoIterator<Item = (ConceptId, S)>>(iter: I) -> Self {
        let mut v = SparseVector::new();
        for (c, w) in iter {
            v.set(c, w);
        }
        v
    }
}
