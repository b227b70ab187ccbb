//! Query-side text processing: tokenization, normalization, stop words
//! and the term → concept lexicon.

mod lexicon;
mod normalize;
mod stopwords;

use thiserror::Error;

pub use lexicon::{match_concepts, parse_synonyms, ConceptMatch, Lexicon};
pub use normalize::{normalize_token, Lang, NormalizedTerm, Normalizer};
pub use stopwords::{parse_term_list, StopWords};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TextError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("descriptor `{term}` refers to unknown concept {concept}")]
    UnknownConcept { term: String, concept: u32 },
}
