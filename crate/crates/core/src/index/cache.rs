//! On-disk index cache.
//!
//! Layout: a text header followed by the JSON-encoded index.
//!
//! ```text
//! MANASIK-INDEX 1
//! sha256 <hex digest of the corpus inputs>
//! {...}
//! ```
//!
//! A cache whose digest differs from the current corpus inputs is stale.

use std::io::{BufRead, BufReader, Read, Write};

use sha2::{Digest, Sha256};

use super::{IndexError, IndexedCorpus};

pub const CACHE_MAGIC: &str = "MANASIK-INDEX";
pub const CACHE_VERSION: u32 = 1;

/// Digest of the corpus input files, in the order given.
pub fn content_hash<B: AsRef<[u8]>>(parts: &[B]) -> String {
    let mut hasher = Sha256::new();
    for part in parts {
        let bytes = part.as_ref();
        hasher.update((bytes.len() as u64).to_le_bytes());
        hasher.update(bytes);
    }
    hasher
        .finalize()
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

pub fn write_cache<W: Write>(
    mut out: W,
    index: &IndexedCorpus<f64>,
    hash: &str,
) -> Result<(), IndexError> {
    let io = |e: std::io::Error| IndexError::Cache(e.to_string());
    writeln!(out, "{CACHE_MAGIC} {CACHE_VERSION}").map_err(io)?;
    writeln!(out, "sha256 {hash}").map_err(io)?;
    serde_json::to_writer(&mut out, index).map_err(|e| IndexError::Cache(e.to_string()))?;
    out.flush().map_err(io)
}

/// Reads a cache. `Ok(None)` means the cache is stale for `expected_hash`.
pub fn read_cache<R: Read>(
    input: R,
    expected_hash: &str,
) -> Result<Option<IndexedCorpus<f64>>, IndexError> {
    let mut reader = BufReader::new(input);
    let mut line = String::new();
    let io = |e: std::io::Error| IndexError::Cache(e.to_string());

    reader.read_line(&mut line).map_err(io)?;
    let expected_header = format!("{CACHE_MAGIC} {CACHE_VERSION}");
    if line.trim_end() != expected_header {
        return Err(IndexError::Cache(format!(
            "unsupported header `{}`",
            line.trim_end()
        )));
    }
    line.clear();
    reader.read_line(&mut line).map_err(io)?;
    let Some(hash) = line.trim_end().strip_prefix("sha256 ") else {
        return Err(IndexError::Cache("missing content digest".into()));
    };
    if hash != expected_hash {
        return Ok(None);
    }
    serde_json::from_reader(reader)
        .map(Some)
        .map_err(|e| IndexError::Cache(e.to_string()))
}
