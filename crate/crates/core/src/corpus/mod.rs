//! The three-level data organization (contexts, concepts, videos) and the
//! XML files that carry it.
//!
//! Files are parsed into record types that mirror the documents exactly
//! (including unknown attributes), then [`finalize`] resolves the
//! cross-references into an immutable [`Corpus`].

mod build;
mod formats;
pub(crate) use formats::parse_decimal;
pub(crate) mod tree;

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::hash::{Hash, Hasher};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use build::{collect_videos, finalize, CorpusBuilder, MarkerMap};
pub use formats::{
    parse_concept_shot_file, parse_concept_video_file, parse_context_file,
    write_concept_shot_file, write_concept_video_file, write_context_file,
};

pub type ConceptId = u32;
pub type ContextId = u32;

/// Attributes not covered by a format, kept in document order so they
/// survive a parse/serialize cycle.
pub type ExtraAttrs = Vec<(String, String)>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CorpusError {
    #[error("malformed XML at line {line}, column {column}: {message}")]
    Xml {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid <{element}>: {message}")]
    Validation { element: String, message: String },
    #[error("unresolved references: {}", .dangling.join(", "))]
    Resolution { dangling: Vec<String> },
}

impl CorpusError {
    pub(crate) fn validation(element: &str, message: impl Into<String>) -> Self {
        CorpusError::Validation {
            element: element.to_string(),
            message: message.into(),
        }
    }
}

/// Video identifier as written in the files (usually zero padded).
///
/// Equality, hashing and ordering use the canonical form with leading
/// zeros removed, so `"00001"` and `"1"` name the same video. Ordering is
/// numeric for digit strings.
#[derive(Clone, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VideoNum(String);

impl VideoNum {
    pub fn new(raw: impl Into<String>) -> Self {
        VideoNum(raw.into())
    }

    /// The identifier as it appears in the source file.
    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn canonical(&self) -> &str {
        let trimmed = self.0.trim_start_matches('0');
        if trimmed.is_empty() && !self.0.is_empty() {
            "0"
        } else {
            trimmed
        }
    }
}

impl PartialEq for VideoNum {
    fn eq(&self, other: &Self) -> bool {
        self.canonical() == other.canonical()
    }
}

impl Eq for VideoNum {}

impl Hash for VideoNum {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.canonical().hash(state);
    }
}

impl Ord for VideoNum {
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b) = (self.canonical(), other.canonical());
        a.len().cmp(&b.len()).then_with(|| a.cmp(b))
    }
}

impl PartialOrd for VideoNum {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for VideoNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "VideoNum({:?})", self.0)
    }
}

impl fmt::Display for VideoNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for VideoNum {
    fn from(s: &str) -> Self {
        VideoNum::new(s)
    }
}

/// Bilingual display names. Arabic is mandatory.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Labels {
    pub ar: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub en: Option<String>,
}

impl Labels {
    pub fn new(ar: impl Into<String>, en: Option<String>) -> Self {
        Labels { ar: ar.into(), en }
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        std::iter::once(self.ar.as_str()).chain(self.en.as_deref())
    }
}

/// One keyframe entry of a shot listing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Shot {
    pub shot_id: String,
    pub seq_num: u32,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub extra: ExtraAttrs,
}

impl Shot {
    pub fn new(seq_num: u32, shot_id: impl Into<String>) -> Self {
        Shot {
            shot_id: shot_id.into(),
            seq_num,
            extra: Vec::new(),
        }
    }

    /// Video encoded in a `shot<video>_<n>` identifier.
    pub fn video(&self) -> Option<VideoNum> {
        let rest = self.shot_id.strip_prefix("shot")?;
        let (video, frame) = rest.split_once('_')?;
        let digits = |s: &str| !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit());
        (digits(video) && digits(frame)).then(|| VideoNum::new(video))
    }
}

/// The shots labelled with one concept marker (`fNum`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShotListing {
    pub marker: String,
    pub shots: Vec<Shot>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub extra: ExtraAttrs,
}

/// A `<video>` entry inside a concept description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VideoRef {
    pub num: VideoNum,
    pub name: String,
    pub weight: f64,
    pub number_shots: u32,
    pub shot_repres: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub extra: ExtraAttrs,
}

/// A `<concept>` entry of the concept description file, before link
/// resolution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConceptRecord {
    pub id: ConceptId,
    pub labels: Labels,
    pub videos: Vec<VideoRef>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub extra: ExtraAttrs,
}

/// A weighted concept member of a `<Contexte>`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContextMember {
    pub concept_id: ConceptId,
    pub concept_name: String,
    pub weight: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub extra: ExtraAttrs,
}

/// A `<Contexte>` entry of the context description file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContextRecord {
    pub id: ContextId,
    pub labels: Labels,
    pub nbr_concept: u32,
    pub members: Vec<ContextMember>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub extra: ExtraAttrs,
}

/// Per-video metadata independent of any concept.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VideoMeta {
    pub num: VideoNum,
    pub name: String,
    pub number_shots: u32,
    pub shot_repres: String,
}

impl From<&VideoRef> for VideoMeta {
    fn from(v: &VideoRef) -> Self {
        VideoMeta {
            num: v.num.clone(),
            name: v.name.clone(),
            number_shots: v.number_shots,
            shot_repres: v.shot_repres.clone(),
        }
    }
}

/// A video as a document of the vector space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VideoDoc {
    pub video_num: VideoNum,
    pub name: String,
    pub number_shots: u32,
    pub shot_repres: String,
    /// Sparse: no zero entries.
    pub concept_weights: BTreeMap<ConceptId, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Concept {
    pub concept_id: ConceptId,
    pub labels: Labels,
    /// Sparse: no zero entries.
    pub videos: BTreeMap<VideoNum, f64>,
    pub shots: Vec<Shot>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Context {
    pub context_id: ContextId,
    pub labels: Labels,
    pub nbr_concept: u32,
    pub members: BTreeMap<ConceptId, f64>,
}

/// Resolved, immutable corpus.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Corpus {
    videos: BTreeMap<VideoNum, VideoDoc>,
    concepts: BTreeMap<ConceptId, Concept>,
    contexts: BTreeMap<ContextId, Context>,
    has_shot_data: bool,
}

impl Corpus {
    /// Collection size, the `N` of IDF.
    pub fn n_videos(&self) -> usize {
        self.videos.len()
    }

    pub fn videos(&self) -> &BTreeMap<VideoNum, VideoDoc> {
        &self.videos
    }

    pub fn concepts(&self) -> &BTreeMap<ConceptId, Concept> {
        &self.concepts
    }

    pub fn contexts(&self) -> &BTreeMap<ContextId, Context> {
        &self.contexts
    }

    pub fn video(&self, num: &VideoNum) -> Option<&VideoDoc> {
        self.videos.get(num)
    }

    pub fn concept(&self, id: ConceptId) -> Option<&Concept> {
        self.concepts.get(&id)
    }

    pub fn context(&self, id: ContextId) -> Option<&Context> {
        self.contexts.get(&id)
    }

    /// Whether shot listings were attached before finalizing.
    pub fn has_shot_data(&self) -> bool {
        self.has_shot_data
    }
}
