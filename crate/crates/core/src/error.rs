use std::path::PathBuf;

use thiserror::Error;

use crate::corpus::CorpusError;
use crate::eval::EvalError;
use crate::index::IndexError;
use crate::ontology::OntologyError;
use crate::retrieval::RetrievalError;
use crate::text::TextError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Text(#[from] TextError),
    #[error(transparent)]
    Ontology(#[from] OntologyError),
    #[error(transparent)]
    Index(#[from] IndexError),
    #[error(transparent)]
    Retrieval(#[from] RetrievalError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("{}: {source}", .path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for filesystem failures, as opposed to bad data.
    pub fn is_io(&self) -> bool {
        matches!(self, Error::Io { .. } | Error::Eval(EvalError::Io { .. }))
    }
}
