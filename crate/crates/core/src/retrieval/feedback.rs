use std::collections::{BTreeMap, BTreeSet};

use super::{QueryState, RetrievalError, SparseVector};
use crate::corpus::{ConceptId, VideoNum};
use crate::index::IndexedCorpus;
use crate::Scalar;

/// Relevance judgments over one presented result window.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct JudgmentSet {
    positives: BTreeSet<VideoNum>,
    negatives: BTreeSet<VideoNum>,
}

impl JudgmentSet {
    pub fn new(
        positives: impl IntoIterator<Item = VideoNum>,
        negatives: impl IntoIterator<Item = VideoNum>,
    ) -> Result<Self, RetrievalError> {
        let positives: BTreeSet<_> = positives.into_iter().collect();
        let negatives: BTreeSet<_> = negatives.into_iter().collect();
        let overlap: Vec<_> = positives.intersection(&negatives).cloned().collect();
        if !overlap.is_empty() {
            return Err(RetrievalError::Overlap(overlap));
        }
        Ok(JudgmentSet {
            positives,
            negatives,
        })
    }

    pub fn positives(&self) -> &BTreeSet<VideoNum> {
        &self.positives
    }

    pub fn negatives(&self) -> &BTreeSet<VideoNum> {
        &self.negatives
    }

    pub fn is_empty(&self) -> bool {
        self.positives.is_empty() && self.negatives.is_empty()
    }

    fn check_presented(&self, window: &[VideoNum]) -> Result<(), RetrievalError> {
        let shown: BTreeSet<&VideoNum> = window.iter().collect();
        let missing: Vec<_> = self
            .positives
            .iter()
            .chain(&self.negatives)
            .filter(|v| !shown.contains(v))
            .cloned()
            .collect();
        if missing.is_empty() {
            Ok(())
        } else {
            Err(RetrievalError::NotPresented(missing))
        }
    }
}

fn concepts_of<'a, S: Scalar>(
    index: &'a IndexedCorpus<S>,
    videos: &'a BTreeSet<VideoNum>,
) -> impl Iterator<Item = ConceptId> + 'a {
    videos
        .iter()
        .filter_map(|v| index.doc_vector(v))
        .flat_map(|d| d.concepts())
}

/// Next iteration of the query from judgments on the presented `window`.
///
/// `P_fb` becomes the current `PQ`; the new `PQ` is `P_initial + P_fb`
/// shifted by `+α` on concepts of positive videos and `-α` on concepts of
/// negative videos, then clamped at zero.
pub fn feedback_update<S: Scalar>(
    state: &QueryState<S>,
    judgments: &JudgmentSet,
    window: &[VideoNum],
    index: &IndexedCorpus<S>,
) -> Result<QueryState<S>, RetrievalError> {
    judgments.check_presented(window)?;

    let alpha = state.alpha;
    let mut delta: BTreeMap<ConceptId, S> = BTreeMap::new();
    for c in concepts_of(index, &judgments.positives).collect::<BTreeSet<_>>() {
        *delta.entry(c).or_insert_with(S::zero) = alpha;
    }
    for c in concepts_of(index, &judgments.negatives).collect::<BTreeSet<_>>() {
        let d = delta.entry(c).or_insert_with(S::zero);
        *d = *d - alpha;
    }

    let p_fb = state.pq.clone();
    let base = state.p_initial.add(&p_fb);
    let mut pq: SparseVector<S> = base.clone();
    for (c, d) in delta {
        pq.set(c, base.get(c) + d);
    }
    pq.clamp_non_negative();

    Ok(QueryState {
        iteration: state.iteration + 1,
        raw_text: state.raw_text.clone(),
        selected_concepts: state.selected_concepts.clone(),
        p_initial: state.p_initial.clone(),
        p_fb,
        pq,
        alpha,
    })
}
