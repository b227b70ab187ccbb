use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::{NormalizedTerm, Normalizer, TextError};
use crate::corpus::{ConceptId, Corpus};

/// Normalized descriptor term → concepts it describes.
///
/// Descriptors are the normalized tokens of every concept label (both
/// languages) plus any synonym entries. Stop words are never keys.
#[derive(Debug, Clone, Default)]
pub struct Lexicon {
    entries: BTreeMap<String, BTreeSet<ConceptId>>,
    descriptors: BTreeMap<ConceptId, BTreeSet<String>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConceptMatch {
    pub concept_id: ConceptId,
    /// Fraction of distinct query terms found among the concept's
    /// descriptors, in (0, 1].
    pub score: f64,
}

/// Reads a synonym file: `term TAB concept_id` per line, `#` comments.
pub fn parse_synonyms(text: &str) -> Result<Vec<(String, ConceptId)>, TextError> {
    let mut out = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let syntax = |message: &str| TextError::Syntax {
            line: n + 1,
            message: message.to_string(),
        };
        let (term, id) = line
            .rsplit_once('\t')
            .ok_or_else(|| syntax("expected `term<TAB>concept_id`"))?;
        let id = id
            .trim()
            .parse()
            .map_err(|_| syntax("concept id is not an integer"))?;
        out.push((term.trim().to_string(), id));
    }
    Ok(out)
}

impl Lexicon {
    /// Builds the lexicon from the corpus labels and optional synonyms.
    pub fn build(
        corpus: &Corpus,
        normalizer: &Normalizer,
        synonyms: &[(String, ConceptId)],
    ) -> Result<Self, TextError> {
        let mut lexicon = Lexicon::default();
        for concept in corpus.concepts().values() {
            lexicon.descriptors.entry(concept.concept_id).or_default();
            for label in concept.labels.iter() {
                lexicon.add(normalizer, label, concept.concept_id);
            }
        }
        for (term, id) in synonyms {
            if corpus.concept(*id).is_none() {
                return Err(TextError::UnknownConcept {
                    term: term.clone(),
                    concept: *id,
                });
            }
            lexicon.add(normalizer, term, *id);
        }
        Ok(lexicon)
    }

    fn add(&mut self, normalizer: &Normalizer, text: &str, id: ConceptId) {
        for term in normalizer.normalize(text) {
            self.entries.entry(term.norm.clone()).or_default().insert(id);
            self.descriptors.entry(id).or_default().insert(term.norm);
        }
    }

    pub fn concepts_for(&self, norm: &str) -> Option<&BTreeSet<ConceptId>> {
        self.entries.get(norm)
    }

    pub fn descriptors(&self, id: ConceptId) -> Option<&BTreeSet<String>> {
        self.descriptors.get(&id)
    }

    pub fn terms(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Candidate concepts whose descriptors intersect the query terms.
///
/// Sorted by descending score, ties by ascending concept id. Duplicate
/// query terms count once.
pub fn match_concepts(terms: &[NormalizedTerm], lexicon: &Lexicon) -> Vec<ConceptMatch> {
    let distinct: BTreeSet<&str> = terms.iter().map(|t| t.norm.as_str()).collect();
    if distinct.is_empty() {
        return Vec::new();
    }
    let mut hits: BTreeMap<ConceptId, usize> = BTreeMap::new();
    for term in &distinct {
        for id in lexicon.concepts_for(term).into_iter().flatten() {
            *hits.entry(*id).or_default() += 1;
        }
    }
    let total = distinct.len() as f64;
    let mut matches: Vec<ConceptMatch> = hits
        .into_iter()
        .map(|(concept_id, n)| ConceptMatch {
            concept_id,
            score: n as f64 / total,
        })
        .collect();
    matches.sort_by(|a, b| {
        b.score
            .total_cmp(&a.score)
            .then(a.concept_id.cmp(&b.concept_id))
    });
    matches
}
