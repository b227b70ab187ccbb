//! A loaded corpus with everything needed to answer queries: index,
//! normalizer, lexicon, ontology and search settings. The CLI and the
//! HTTP service both drive this type.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::corpus::{
    collect_videos, parse_concept_shot_file, parse_concept_video_file, parse_context_file,
    ConceptId, ContextId, Corpus, CorpusBuilder, MarkerMap, VideoNum,
};
use crate::index::{content_hash, read_cache, write_cache, IndexedCorpus, WeightSource};
use crate::ontology::{ExpansionMode, NodeId, Ontology, DEFAULT_ATTENUATION};
use crate::retrieval::{feedback_update, search, JudgmentSet, QueryState, RankedResult, RetrievalError};
use crate::text::{match_concepts, parse_synonyms, ConceptMatch, Lexicon, NormalizedTerm, Normalizer, StopWords};
use crate::{Error, Result, Scalar, DEFAULT_ALPHA, DEFAULT_K};

/// Input files of a corpus. Only the concept description file is required.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CorpusPaths {
    pub concepts: PathBuf,
    #[serde(default)]
    pub contexts: Option<PathBuf>,
    #[serde(default)]
    pub shots: Option<PathBuf>,
    #[serde(default)]
    pub ontology: Option<PathBuf>,
    #[serde(default)]
    pub stop_words: Option<PathBuf>,
    #[serde(default)]
    pub synonyms: Option<PathBuf>,
    /// `fNum TAB concept_id` overrides for shot listings.
    #[serde(default)]
    pub markers: Option<PathBuf>,
}

fn read(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|e| Error::io(path, e))
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

/// Raw bytes of every configured input, in a fixed order.
#[derive(Debug, Clone, Default)]
pub struct CorpusBytes {
    pub concepts: Vec<u8>,
    pub contexts: Option<Vec<u8>>,
    pub shots: Option<Vec<u8>>,
    pub ontology: Option<Vec<u8>>,
    pub stop_words: Option<String>,
    pub synonyms: Option<String>,
    pub markers: Option<String>,
}

impl CorpusPaths {
    pub fn read(&self) -> Result<CorpusBytes> {
        let opt = |p: &Option<PathBuf>| p.as_deref().map(read).transpose();
        let opt_text = |p: &Option<PathBuf>| p.as_deref().map(read_text).transpose();
        Ok(CorpusBytes {
            concepts: read(&self.concepts)?,
            contexts: opt(&self.contexts)?,
            shots: opt(&self.shots)?,
            ontology: opt(&self.ontology)?,
            stop_words: opt_text(&self.stop_words)?,
            synonyms: opt_text(&self.synonyms)?,
            markers: opt_text(&self.markers)?,
        })
    }
}

impl CorpusBytes {
    /// Digest over all inputs plus the weight source.
    pub fn hash(&self, source: WeightSource) -> String {
        let empty: &[u8] = &[];
        let source = match source {
            WeightSource::Precomputed => b"precomputed".as_slice(),
            WeightSource::Recompute => b"recompute".as_slice(),
        };
        content_hash(&[
            source,
            &self.concepts,
            self.contexts.as_deref().unwrap_or(empty),
            self.shots.as_deref().unwrap_or(empty),
            self.ontology.as_deref().unwrap_or(empty),
            self.stop_words.as_deref().map_or(empty, str::as_bytes),
            self.synonyms.as_deref().map_or(empty, str::as_bytes),
            self.markers.as_deref().map_or(empty, str::as_bytes),
        ])
    }

    pub fn corpus(&self) -> Result<Corpus> {
        let concepts = parse_concept_video_file(&self.concepts)?;
        let videos = collect_videos(&concepts)?;
        let contexts = match &self.contexts {
            Some(bytes) => parse_context_file(bytes)?,
            None => Vec::new(),
        };
        let mut builder = CorpusBuilder::new()
            .videos(videos)
            .concepts(concepts)
            .contexts(contexts);
        if let Some(bytes) = &self.shots {
            let markers = match &self.markers {
                Some(text) => MarkerMap::parse(text)?,
                None => MarkerMap::new(),
            };
            builder = builder.shots(parse_concept_shot_file(bytes)?, markers);
        }
        Ok(builder.finalize()?)
    }

    pub fn normalizer(&self) -> Normalizer {
        let mut stop = StopWords::default();
        if let Some(text) = &self.stop_words {
            stop = StopWords::from_list(text);
        }
        Normalizer::new(stop)
    }

    pub fn synonyms(&self) -> Result<Vec<(ConceptId, String)>> {
        Ok(match &self.synonyms {
            Some(text) => parse_synonyms(text)?
                .into_iter()
                .map(|(t, c)| (c, t))
                .collect(),
            None => Vec::new(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EngineSettings {
    pub alpha: f64,
    pub k: usize,
    pub expansion_depth: usize,
    pub expansion_mode: ExpansionMode,
    pub attenuation: f64,
}

impl Default for EngineSettings {
    fn default() -> Self {
        EngineSettings {
            alpha: DEFAULT_ALPHA,
            k: DEFAULT_K,
            expansion_depth: 1,
            expansion_mode: ExpansionMode::Suggest,
            attenuation: DEFAULT_ATTENUATION,
        }
    }
}

/// Concept candidates for a text query.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Suggestions {
    pub terms: Vec<NormalizedTerm>,
    pub candidates: Vec<ConceptMatch>,
    /// Ontology neighbours of the candidates (their contexts' members and
    /// narrower concepts), excluding the candidates themselves.
    pub related: BTreeMap<ConceptId, f64>,
}

impl Suggestions {
    /// Candidates sharing the best score, the non-interactive choice.
    pub fn best(&self) -> BTreeSet<ConceptId> {
        let Some(top) = self.candidates.first() else {
            return BTreeSet::new();
        };
        self.candidates
            .iter()
            .take_while(|c| c.score == top.score)
            .map(|c| c.concept_id)
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct Engine<S> {
    index: IndexedCorpus<S>,
    normalizer: Normalizer,
    lexicon: Lexicon,
    ontology: Ontology,
    settings: EngineSettings,
}

impl<S: Scalar> Engine<S> {
    /// Builds an engine around an index. Without an explicit ontology, the
    /// corpus contexts form it.
    pub fn new(
        index: IndexedCorpus<S>,
        ontology: Option<Ontology>,
        normalizer: Normalizer,
        synonyms: &[(ConceptId, String)],
        settings: EngineSettings,
    ) -> Result<Self> {
        let synonyms: Vec<(String, ConceptId)> =
            synonyms.iter().map(|(c, t)| (t.clone(), *c)).collect();
        let lexicon = Lexicon::build(index.corpus(), &normalizer, &synonyms)?;
        let ontology = match ontology {
            Some(o) => {
                o.check_against(index.corpus())?;
                o
            }
            None => Ontology::from_corpus(index.corpus()),
        }
        .with_attenuation(settings.attenuation)?;
        if !(settings.alpha >= 0.0 && settings.alpha.is_finite()) {
            return Err(RetrievalError::Alpha(settings.alpha).into());
        }
        if settings.k == 0 {
            return Err(RetrievalError::InvalidK.into());
        }
        Ok(Engine {
            index,
            normalizer,
            lexicon,
            ontology,
            settings,
        })
    }

    /// Parses, finalizes and indexes corpus inputs.
    pub fn from_bytes(bytes: &CorpusBytes, source: WeightSource, settings: EngineSettings) -> Result<Self> {
        let index = IndexedCorpus::build(bytes.corpus()?, source)?;
        Self::with_index(bytes, index, settings)
    }

    /// Like [`Engine::from_bytes`] but reuses an already built index.
    pub fn with_index(bytes: &CorpusBytes, index: IndexedCorpus<S>, settings: EngineSettings) -> Result<Self> {
        let ontology = bytes.ontology.as_deref().map(Ontology::parse).transpose()?;
        Self::new(index, ontology, bytes.normalizer(), &bytes.synonyms()?, settings)
    }

    pub fn load(paths: &CorpusPaths, source: WeightSource, settings: EngineSettings) -> Result<Self> {
        Self::from_bytes(&paths.read()?, source, settings)
    }

    pub fn index(&self) -> &IndexedCorpus<S> {
        &self.index
    }

    pub fn corpus(&self) -> &Corpus {
        self.index.corpus()
    }

    pub fn lexicon(&self) -> &Lexicon {
        &self.lexicon
    }

    pub fn normalizer(&self) -> &Normalizer {
        &self.normalizer
    }

    pub fn ontology(&self) -> &Ontology {
        &self.ontology
    }

    pub fn settings(&self) -> &EngineSettings {
        &self.settings
    }

    /// Normalizes the text, matches concepts and collects ontology
    /// neighbours of the candidates.
    pub fn suggest(&self, text: &str) -> Suggestions {
        let terms = self.normalizer.normalize(text);
        let candidates = match_concepts(&terms, &self.lexicon);
        let mut seeds = BTreeSet::new();
        for c in &candidates {
            let node = NodeId::Concept(c.concept_id);
            seeds.insert(node);
            if let Ok((parents, _)) = self.ontology.neighbors(node) {
                seeds.extend(parents.into_iter().filter(|p| matches!(p, NodeId::Context(_))));
            }
        }
        let mut related = self
            .ontology
            .expand(&seeds, self.settings.expansion_depth)
            .unwrap_or_default();
        for c in &candidates {
            related.remove(&c.concept_id);
        }
        Suggestions {
            terms,
            candidates,
            related,
        }
    }

    /// Iteration-0 query over the chosen concepts. In automatic expansion
    /// mode, ontology expansion of the chosen concepts joins the query.
    pub fn initial_state(&self, text: &str, selected: BTreeSet<ConceptId>) -> Result<QueryState<S>> {
        for &c in &selected {
            if self.corpus().concept(c).is_none() {
                return Err(RetrievalError::UnknownConcept(c).into());
            }
        }
        let expansion = match self.settings.expansion_mode {
            ExpansionMode::Suggest => BTreeMap::new(),
            ExpansionMode::Auto => {
                let nodes = selected.iter().map(|&c| NodeId::Concept(c)).collect();
                self.ontology.expand(&nodes, self.settings.expansion_depth)?
            }
        };
        Ok(QueryState::new(text, selected, &expansion, S::from_weight(self.settings.alpha))?)
    }

    pub fn search(
        &self,
        state: &QueryState<S>,
        k: Option<usize>,
        context: Option<ContextId>,
    ) -> Result<Vec<RankedResult<S>>> {
        Ok(search(&self.index, state, k.unwrap_or(self.settings.k), context)?)
    }

    pub fn feedback(
        &self,
        state: &QueryState<S>,
        judgments: &JudgmentSet,
        presented: &[VideoNum],
    ) -> Result<QueryState<S>> {
        Ok(feedback_update(state, judgments, presented, &self.index)?)
    }
}

impl Engine<f64> {
    /// Loads through an index cache: a cache whose digest matches the
    /// current inputs is reused, otherwise the index is rebuilt and the
    /// cache rewritten. Returns whether the cache was used.
    pub fn load_cached(
        paths: &CorpusPaths,
        source: WeightSource,
        settings: EngineSettings,
        cache: &Path,
    ) -> Result<(Self, bool)> {
        let bytes = paths.read()?;
        let hash = bytes.hash(source);
        if let Ok(file) = std::fs::File::open(cache) {
            if let Some(index) = read_cache(file, &hash)? {
                return Ok((Self::with_index(&bytes, index, settings)?, true));
            }
        }
        let engine = Self::from_bytes(&bytes, source, settings)?;
        engine.write_cache(cache, &hash)?;
        Ok((engine, false))
    }

    pub fn write_cache(&self, path: &Path, hash: &str) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        write_cache(std::io::BufWriter::new(file), &self.index, hash)?;
        Ok(())
    }
}
