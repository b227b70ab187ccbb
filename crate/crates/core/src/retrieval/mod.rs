//! Cosine ranking over the inverted index and the relevance-feedback
//! recurrence on query vectors.
//!
//! The feedback rule treats the query as a concept-weight vector:
//!
//! ```text
//! PQ_0     = P_initial                (P_fb_0 = 0)
//! P_fb_i   = PQ_{i-1}
//! PQ_i     = P_initial + P_fb_i  ± α  per concept, by judgment polarity
//! ```
//!
//! `+α` goes to every concept present in a positively judged video and
//! `-α` to every concept present in a negatively judged one; a concept in
//! both receives both. Components are clamped at zero.

mod feedback;

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::Serialize;
use thiserror::Error;

use crate::corpus::{ConceptId, ContextId, VideoNum};
use crate::index::IndexedCorpus;
use crate::Scalar;

pub use crate::vector::SparseVector;
pub use feedback::{feedback_update, JudgmentSet};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RetrievalError {
    #[error("k must be at least 1")]
    InvalidK,
    #[error("unknown context {0}")]
    UnknownContext(ContextId),
    #[error("unknown concept {0}")]
    UnknownConcept(ConceptId),
    #[error("alpha must be finite and non-negative, got {0}")]
    Alpha(f64),
    #[error("videos judged both relevant and irrelevant: {}", join(.0))]
    Overlap(Vec<VideoNum>),
    #[error("judged videos were not presented: {}", join(.0))]
    NotPresented(Vec<VideoNum>),
}

fn join(v: &[VideoNum]) -> String {
    v.iter().map(VideoNum::to_string).collect::<Vec<_>>().join(", ")
}

/// The evolving query of one search session.
#[derive(Debug, Clone, PartialEq)]
pub struct QueryState<S> {
    iteration: u32,
    raw_text: String,
    selected_concepts: BTreeSet<ConceptId>,
    p_initial: SparseVector<S>,
    p_fb: SparseVector<S>,
    pq: SparseVector<S>,
    alpha: S,
}

impl<S: Scalar> QueryState<S> {
    /// Iteration-0 state. Selected concepts weigh 1; expansion concepts
    /// weigh their expansion weight; overlaps keep the larger.
    pub fn new(
        raw_text: impl Into<String>,
        selected: BTreeSet<ConceptId>,
        expansion: &BTreeMap<ConceptId, f64>,
        alpha: S,
    ) -> Result<Self, RetrievalError> {
        let mut p_initial = SparseVector::new();
        for (&c, &w) in expansion {
            p_initial.set(c, S::from_weight(w));
        }
        for &c in &selected {
            p_initial.set(c, p_initial.get(c).max(S::one()));
        }
        let mut state = Self::from_vector(raw_text, p_initial, alpha)?;
        state.selected_concepts = selected;
        Ok(state)
    }

    /// Iteration-0 state from an explicit initial vector.
    pub fn from_vector(
        raw_text: impl Into<String>,
        mut p_initial: SparseVector<S>,
        alpha: S,
    ) -> Result<Self, RetrievalError> {
        if !(alpha >= S::zero() && alpha.is_finite()) {
            return Err(RetrievalError::Alpha(alpha.to_weight()));
        }
        p_initial.clamp_non_negative();
        Ok(QueryState {
            iteration: 0,
            raw_text: raw_text.into(),
            selected_concepts: p_initial.concepts().collect(),
            pq: p_initial.clone(),
            p_fb: SparseVector::new(),
            p_initial,
            alpha,
        })
    }

    pub fn iteration(&self) -> u32 {
        self.iteration
    }

    pub fn raw_text(&self) -> &str {
        &self.raw_text
    }

    pub fn selected_concepts(&self) -> &BTreeSet<ConceptId> {
        &self.selected_concepts
    }

    pub fn p_initial(&self) -> &SparseVector<S> {
        &self.p_initial
    }

    pub fn p_fb(&self) -> &SparseVector<S> {
        &self.p_fb
    }

    /// The effective query of the current iteration.
    pub fn pq(&self) -> &SparseVector<S> {
        &self.pq
    }

    pub fn alpha(&self) -> S {
        self.alpha
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankedResult<S> {
    pub rank: usize,
    pub video_num: VideoNum,
    pub score: S,
    /// Per-concept share of the score, ascending concept id.
    pub matched_concepts: Vec<(ConceptId, S)>,
}

/// `q·d / (‖q‖ ‖d‖)`, or 0 when either vector is zero.
pub fn cosine<S: Scalar>(q: &SparseVector<S>, d: &SparseVector<S>) -> S {
    let denom = q.norm() * d.norm();
    if denom == S::zero() {
        return S::zero();
    }
    (q.dot(d) / denom).min(S::one())
}

/// Ordering key for scores: the score in units of `1024 · ε`.
///
/// Scores that agree to within that quantum rank as ties (then broken by
/// video number), so rescaling the query, which moves cosines by a few
/// ulps, cannot reorder results.
pub fn rank_key<S: Scalar>(score: S) -> i64 {
    let quantum = S::epsilon() * S::from_u32(1024).unwrap();
    (score / quantum).round().to_i64().unwrap_or(0)
}

/// Top-`k` videos by cosine with the state's current query.
///
/// Only videos sharing a concept with the query are scored (through the
/// inverted index). Ties go to the smaller video number. With a context
/// filter, only videos carrying at least one concept of that context are
/// eligible.
pub fn search<S: Scalar>(
    index: &IndexedCorpus<S>,
    state: &QueryState<S>,
    k: usize,
    context_filter: Option<ContextId>,
) -> Result<Vec<RankedResult<S>>, RetrievalError> {
    if k == 0 {
        return Err(RetrievalError::InvalidK);
    }
    let context = context_filter
        .map(|id| {
            index
                .corpus()
                .context(id)
                .ok_or(RetrievalError::UnknownContext(id))
        })
        .transpose()?;
    let pq = state.pq();
    let q_norm = pq.norm();
    if q_norm == S::zero() {
        return Ok(Vec::new());
    }

    let mut dots: HashMap<&VideoNum, S> = HashMap::new();
    for (concept, qw) in pq.iter() {
        for posting in index.postings(concept) {
            let acc = dots.entry(&posting.video).or_insert_with(S::zero);
            *acc = *acc + qw * posting.weight;
        }
    }

    let mut scored: Vec<(&VideoNum, S)> = dots
        .into_iter()
        .filter(|(video, _)| match context {
            None => true,
            Some(ctx) => index
                .doc_vector(video)
                .is_some_and(|d| d.concepts().any(|c| ctx.members.contains_key(&c))),
        })
        .map(|(video, dot)| {
            let denom = q_norm * index.doc_norm(video).unwrap_or_else(S::zero);
            let score = if denom == S::zero() {
                S::zero()
            } else {
                (dot / denom).min(S::one())
            };
            (video, score)
        })
        .collect();
    scored.sort_by(|a, b| {
        rank_key(b.1)
            .cmp(&rank_key(a.1))
            .then_with(|| a.0.cmp(b.0))
    });
    scored.truncate(k);

    Ok(scored
        .into_iter()
        .enumerate()
        .map(|(i, (video, score))| {
            let doc = index.doc_vector(video).expect("scored video is indexed");
            let denom = q_norm * index.doc_norm(video).unwrap_or_else(S::zero);
            let matched_concepts = pq
                .iter()
                .filter_map(|(c, qw)| {
                    let dw = doc.get(c);
                    (dw > S::zero()).then(|| (c, qw * dw / denom))
                })
                .collect();
            RankedResult {
                rank: i + 1,
                video_num: video.clone(),
                score,
                matched_concepts,
            }
        })
        .collect())
}
