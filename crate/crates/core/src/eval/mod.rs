//! Evaluation harness: precision/recall, per-rank curves, simulated
//! judging sessions and a seeded synthetic corpus generator.

mod generate;
mod metrics;
mod qrels;
mod session;

use std::path::PathBuf;

use thiserror::Error;

use crate::retrieval::RetrievalError;

pub use generate::{generate_corpus, GeneratedCorpus, GeneratorConfig, CORPUS_FILES};
pub use metrics::{curve, precision_recall, PRCurve, PrPoint};
pub use qrels::{parse_queries, write_queries, Qrels};
pub use session::{simulate_session, SessionConfig};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("no relevant videos given for the query")]
    EmptyQrels,
    #[error("cutoff must be at least 1")]
    InvalidCutoff,
    #[error("a session needs at least one iteration")]
    NoIterations,
    #[error("invalid corpus size: {0}")]
    Size(String),
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error(transparent)]
    Retrieval(#[from] RetrievalError),
    #[error("{}: {source}", .path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}
