use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, BTreeSet};

use super::{
    ConceptId, ConceptRecord, Context, ContextRecord, Corpus, CorpusError, Concept, ShotListing,
    VideoDoc, VideoMeta, VideoNum,
};

/// Maps shot-listing markers (`fNum`) to concept ids.
///
/// Markers without an explicit entry resolve to themselves when they are
/// integers.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MarkerMap {
    explicit: BTreeMap<String, ConceptId>,
}

impl MarkerMap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, marker: impl Into<String>, concept: ConceptId) {
        self.explicit.insert(marker.into(), concept);
    }

    /// Reads `marker TAB concept_id` lines; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self, CorpusError> {
        let mut map = MarkerMap::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = || CorpusError::validation("marker map", format!("line {}: expected `marker<TAB>concept_id`", n + 1));
            let (marker, id) = line.split_once('\t').ok_or_else(bad)?;
            let id = id.trim().parse().map_err(|_| bad())?;
            map.insert(marker.trim(), id);
        }
        Ok(map)
    }

    pub fn resolve(&self, marker: &str) -> Option<ConceptId> {
        self.explicit
            .get(marker)
            .copied()
            .or_else(|| marker.trim().parse().ok())
    }
}

/// Distinct video metadata referenced by a concept description file.
pub fn collect_videos(concepts: &[ConceptRecord]) -> Result<Vec<VideoMeta>, CorpusError> {
    let mut videos: BTreeMap<VideoNum, VideoMeta> = BTreeMap::new();
    for concept in concepts {
        for v in &concept.videos {
            let meta = VideoMeta::from(v);
            match videos.entry(v.num.clone()) {
                Entry::Vacant(e) => {
                    e.insert(meta);
                }
                Entry::Occupied(e) => {
                    let first = e.get();
                    if first.name != meta.name
                        || first.number_shots != meta.number_shots
                        || first.shot_repres != meta.shot_repres
                    {
                        return Err(CorpusError::validation(
                            "video",
                            format!(
                                "video {} has conflicting metadata in concept {}",
                                v.num, concept.id
                            ),
                        ));
                    }
                }
            }
        }
    }
    Ok(videos.into_values().collect())
}

/// Resolves the three parse outputs into a [`Corpus`].
pub fn finalize(
    videos: Vec<VideoMeta>,
    concepts: Vec<ConceptRecord>,
    contexts: Vec<ContextRecord>,
) -> Result<Corpus, CorpusError> {
    CorpusBuilder::new()
        .videos(videos)
        .concepts(concepts)
        .contexts(contexts)
        .finalize()
}

/// Collects parse outputs (and optional shot listings) before resolution.
#[derive(Debug, Clone, Default)]
pub struct CorpusBuilder {
    videos: Vec<VideoMeta>,
    concepts: Vec<ConceptRecord>,
    contexts: Vec<ContextRecord>,
    listings: Vec<ShotListing>,
    markers: MarkerMap,
    has_shot_data: bool,
}

impl CorpusBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn videos(mut self, videos: Vec<VideoMeta>) -> Self {
        self.videos.extend(videos);
        self
    }

    pub fn concepts(mut self, concepts: Vec<ConceptRecord>) -> Self {
        self.concepts.extend(concepts);
        self
    }

    pub fn contexts(mut self, contexts: Vec<ContextRecord>) -> Self {
        self.contexts.extend(contexts);
        self
    }

    pub fn shots(mut self, listings: Vec<ShotListing>, markers: MarkerMap) -> Self {
        self.listings.extend(listings);
        self.markers = markers;
        self.has_shot_data = true;
        self
    }

    pub fn finalize(self) -> Result<Corpus, CorpusError> {
        let mut dangling = Vec::new();

        let mut videos = BTreeMap::new();
        for meta in self.videos {
            if meta.number_shots == 0 {
                return Err(CorpusError::validation(
                    "video",
                    format!("video {} has NUMBER_shots = 0", meta.num),
                ));
            }
            if meta.shot_repres.trim().is_empty() {
                return Err(CorpusError::validation(
                    "video",
                    format!("video {} has an empty shotrepres", meta.num),
                ));
            }
            let doc = VideoDoc {
                video_num: meta.num.clone(),
                name: meta.name,
                number_shots: meta.number_shots,
                shot_repres: meta.shot_repres,
                concept_weights: BTreeMap::new(),
            };
            if videos.insert(meta.num.clone(), doc).is_some() {
                return Err(CorpusError::validation(
                    "video",
                    format!("video {} listed twice", meta.num),
                ));
            }
        }

        let mut concepts = BTreeMap::new();
        for record in self.concepts {
            if record.labels.ar.trim().is_empty() {
                return Err(CorpusError::validation(
                    "concept",
                    format!("concept {} has an empty Arabic label", record.id),
                ));
            }
            let mut concept = Concept {
                concept_id: record.id,
                labels: record.labels,
                videos: BTreeMap::new(),
                shots: Vec::new(),
            };
            let mut listed = BTreeSet::new();
            for v in record.videos {
                if !listed.insert(v.num.clone()) {
                    return Err(CorpusError::validation(
                        "concept",
                        format!("concept {} lists video {} twice", record.id, v.num),
                    ));
                }
                if !(v.weight >= 0.0 && v.weight.is_finite()) {
                    return Err(CorpusError::validation(
                        "video",
                        format!("weight {} of video {} is not a finite non-negative number", v.weight, v.num),
                    ));
                }
                let Some(doc) = videos.get_mut(&v.num) else {
                    dangling.push(format!("video {} (concept {})", v.num, record.id));
                    continue;
                };
                if v.weight > 0.0 {
                    doc.concept_weights.insert(record.id, v.weight);
                    concept.videos.insert(doc.video_num.clone(), v.weight);
                }
            }
            if concepts.insert(record.id, concept).is_some() {
                return Err(CorpusError::validation(
                    "concept",
                    format!("duplicate concept id {}", record.id),
                ));
            }
        }

        let mut contexts = BTreeMap::new();
        for record in self.contexts {
            if record.nbr_concept as usize != record.members.len() {
                return Err(CorpusError::validation(
                    "Contexte",
                    format!(
                        "context {} declares {} concepts but has {}",
                        record.id,
                        record.nbr_concept,
                        record.members.len()
                    ),
                ));
            }
            let mut members = BTreeMap::new();
            for m in record.members {
                if !(0.0..=1.0).contains(&m.weight) {
                    return Err(CorpusError::validation(
                        "concept",
                        format!("membership weight {} outside [0, 1] in context {}", m.weight, record.id),
                    ));
                }
                if !concepts.contains_key(&m.concept_id) {
                    dangling.push(format!("concept {} (context {})", m.concept_id, record.id));
                }
                members.insert(m.concept_id, m.weight);
            }
            let context = Context {
                context_id: record.id,
                labels: record.labels,
                nbr_concept: record.nbr_concept,
                members,
            };
            if contexts.insert(record.id, context).is_some() {
                return Err(CorpusError::validation(
                    "Contexte",
                    format!("duplicate context id {}", record.id),
                ));
            }
        }

        for listing in self.listings {
            let Some(concept_id) = self.markers.resolve(&listing.marker) else {
                dangling.push(format!("shot listing fNum={}", listing.marker));
                continue;
            };
            let Some(concept) = concepts.get_mut(&concept_id) else {
                dangling.push(format!(
                    "concept {concept_id} (shot listing fNum={})",
                    listing.marker
                ));
                continue;
            };
            for shot in listing.shots {
                match shot.video() {
                    None => {
                        return Err(CorpusError::validation(
                            "item",
                            format!("shotId `{}` is not of the form shot<video>_<n>", shot.shot_id),
                        ))
                    }
                    Some(v) if !videos.contains_key(&v) => {
                        dangling.push(format!("video {v} (shot {})", shot.shot_id));
                    }
                    Some(_) => concept.shots.push(shot),
                }
            }
        }

        if !dangling.is_empty() {
            dangling.sort();
            dangling.dedup();
            return Err(CorpusError::Resolution { dangling });
        }

        Ok(Corpus {
            videos,
            concepts,
            contexts,
            has_shot_data: self.has_shot_data,
        })
    }
}
