//! Concept-based retrieval over ritual-process video metadata.
//!
//! The crate covers the whole offline and query-side pipeline:
//!
//! - [`corpus`]: the context / concept / data hierarchy and the three XML
//!   corpus formats (shot listings, concept descriptions, context
//!   descriptions).
//! - [`text`]: bilingual (Arabic/English) normalization, stop words and the
//!   term → concept lexicon.
//! - [`ontology`]: the context/concept DAG and query expansion.
//! - [`index`]: TF-IDF weighting and the concept → video inverted index.
//! - [`retrieval`]: cosine ranking and the iterative relevance-feedback
//!   query recurrence.
//! - [`eval`]: precision/recall, curves, synthetic corpora and a simulated
//!   judging user.
//!
//! Numeric code is generic over [`Scalar`] (`f32` or `f64`). The aliases at
//! the crate root fix the scalar to `f64`, which is what the CLI and the
//! HTTP service use.

pub mod corpus;
pub mod engine;
pub mod error;
pub mod eval;
pub mod index;
pub mod ontology;
pub mod retrieval;
pub mod scalar;
pub mod text;
pub mod vector;

pub use corpus::{ConceptId, ContextId, Corpus, VideoNum};
pub use error::{Error, Result};
pub use scalar::Scalar;

/// Sparse concept-weight vector over `f64`.
pub type Vector = vector::SparseVector<f64>;
/// Inverted index over `f64` weights.
pub type Index = index::IndexedCorpus<f64>;
/// Query state over `f64` weights.
pub type Query = retrieval::QueryState<f64>;
/// Ranked hit over `f64` scores.
pub type Hit = retrieval::RankedResult<f64>;
/// Loaded engine over `f64`.
pub type SearchEngine = engine::Engine<f64>;

/// Default feedback step.
pub const DEFAULT_ALPHA: f64 = 0.02;
/// Default result depth; also the judged window.
pub const DEFAULT_K: usize = 30;
