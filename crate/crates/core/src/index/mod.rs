//! The searchable vector space: per-video concept weights, norms, IDF and
//! the concept → video inverted index.

mod cache;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{ConceptId, Corpus, VideoNum};
use crate::vector::SparseVector;
use crate::Scalar;

pub use cache::{content_hash, read_cache, write_cache, CACHE_MAGIC, CACHE_VERSION};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IndexError {
    #[error("tf-idf undefined for tf={tf}, df={df}, n_docs={n_docs}")]
    Domain { tf: f64, df: usize, n_docs: usize },
    #[error("configuration error: {0}")]
    Config(String),
    #[error("video {video} has {count} shots labelled with concept {concept} but NUMBER_shots={number_shots}")]
    ShotCount {
        video: VideoNum,
        concept: ConceptId,
        count: usize,
        number_shots: u32,
    },
    #[error("index cache: {0}")]
    Cache(String),
}

/// Where per-(video, concept) weights come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightSource {
    /// The `Weight` attributes of the concept description file, verbatim.
    #[default]
    Precomputed,
    /// Shot-frequency TF times IDF, from the shot listings.
    Recompute,
}

impl std::str::FromStr for WeightSource {
    type Err = IndexError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "precomputed" => Ok(WeightSource::Precomputed),
            "recompute" => Ok(WeightSource::Recompute),
            other => Err(IndexError::Config(format!("unknown weight source `{other}`"))),
        }
    }
}

/// `tf · ln(n_docs / df)`.
pub fn tf_idf<S: Scalar>(tf: S, df: usize, n_docs: usize) -> Result<S, IndexError> {
    let domain = || IndexError::Domain {
        tf: tf.to_weight(),
        df,
        n_docs,
    };
    if df == 0 || df > n_docs || !(tf >= S::zero() && tf <= S::one()) {
        return Err(domain());
    }
    let ratio = S::from_usize(n_docs).ok_or_else(domain)? / S::from_usize(df).ok_or_else(domain)?;
    Ok(tf * ratio.ln())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Posting<S> {
    pub video: VideoNum,
    pub weight: S,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "S: Serialize", deserialize = "S: Deserialize<'de>"))]
pub struct IndexedCorpus<S> {
    corpus: Corpus,
    source: WeightSource,
    doc_vectors: BTreeMap<VideoNum, SparseVector<S>>,
    doc_norms: BTreeMap<VideoNum, S>,
    inverted: BTreeMap<ConceptId, Vec<Posting<S>>>,
    idf: BTreeMap<ConceptId, S>,
}

impl<S: Scalar> IndexedCorpus<S> {
    pub fn build(corpus: Corpus, source: WeightSource) -> Result<Self, IndexError> {
        let doc_vectors = match source {
            WeightSource::Precomputed => precomputed_vectors(&corpus),
            WeightSource::Recompute => recomputed_vectors(&corpus)?,
        };
        Ok(Self::from_vectors(corpus, source, doc_vectors))
    }

    fn from_vectors(
        corpus: Corpus,
        source: WeightSource,
        doc_vectors: BTreeMap<VideoNum, SparseVector<S>>,
    ) -> Self {
        let mut inverted: BTreeMap<ConceptId, Vec<Posting<S>>> = BTreeMap::new();
        let mut doc_norms = BTreeMap::new();
        for (video, vector) in &doc_vectors {
            doc_norms.insert(video.clone(), vector.norm());
            for (concept, weight) in vector.iter() {
                inverted.entry(concept).or_default().push(Posting {
                    video: video.clone(),
                    weight,
                });
            }
        }
        for postings in inverted.values_mut() {
            postings.sort_by(|a, b| {
                b.weight
                    .partial_cmp(&a.weight)
                    .unwrap_or(std::cmp::Ordering::Equal)
                    .then_with(|| a.video.cmp(&b.video))
            });
        }
        let n = S::from_usize(corpus.n_videos()).unwrap_or_else(S::zero);
        let idf = match source {
            WeightSource::Precomputed => inverted
                .iter()
                .map(|(&c, p)| (c, (n / S::from_usize(p.len()).unwrap()).ln()))
                .collect(),
            WeightSource::Recompute => shot_document_frequencies(&corpus)
                .into_iter()
                .map(|(c, df)| (c, (n / S::from_usize(df).unwrap()).ln()))
                .collect(),
        };
        IndexedCorpus {
            corpus,
            source,
            doc_vectors,
            doc_norms,
            inverted,
            idf,
        }
    }

    pub fn corpus(&self) -> &Corpus {
        &self.corpus
    }

    pub fn source(&self) -> WeightSource {
        self.source
    }

    pub fn n_docs(&self) -> usize {
        self.corpus.n_videos()
    }

    pub fn doc_vector(&self, video: &VideoNum) -> Option<&SparseVector<S>> {
        self.doc_vectors.get(video)
    }

    pub fn doc_vectors(&self) -> &BTreeMap<VideoNum, SparseVector<S>> {
        &self.doc_vectors
    }

    pub fn doc_norm(&self, video: &VideoNum) -> Option<S> {
        self.doc_norms.get(video).copied()
    }

    /// Postings by descending weight, ties by ascending video number.
    pub fn postings(&self, concept: ConceptId) -> &[Posting<S>] {
        self.inverted.get(&concept).map_or(&[], Vec::as_slice)
    }

    /// Concepts with at least one posting.
    pub fn indexed_concepts(&self) -> impl Iterator<Item = ConceptId> + '_ {
        self.inverted.keys().copied()
    }

    /// `ln(N / df)`; absent for concepts that label no video.
    pub fn idf(&self, concept: ConceptId) -> Option<S> {
        self.idf.get(&concept).copied()
    }
}

fn precomputed_vectors<S: Scalar>(corpus: &Corpus) -> BTreeMap<VideoNum, SparseVector<S>> {
    corpus
        .videos()
        .iter()
        .map(|(num, doc)| {
            let v = doc
                .concept_weights
                .iter()
                .map(|(&c, &w)| (c, S::from_weight(w)))
                .collect();
            (num.clone(), v)
        })
        .collect()
}

/// Distinct labelled shots per (concept, video).
fn shot_counts(corpus: &Corpus) -> BTreeMap<ConceptId, BTreeMap<VideoNum, usize>> {
    let mut counts: BTreeMap<ConceptId, BTreeMap<VideoNum, usize>> = BTreeMap::new();
    for concept in corpus.concepts().values() {
        let mut seen: BTreeMap<VideoNum, BTreeSet<&str>> = BTreeMap::new();
        for shot in &concept.shots {
            if let Some(v) = shot.video() {
                seen.entry(v).or_default().insert(shot.shot_id.as_str());
            }
        }
        let per_video = seen.into_iter().map(|(v, s)| (v, s.len())).collect();
        counts.insert(concept.concept_id, per_video);
    }
    counts
}

fn shot_document_frequencies(corpus: &Corpus) -> BTreeMap<ConceptId, usize> {
    shot_counts(corpus)
        .into_iter()
        .filter(|(_, per_video)| !per_video.is_empty())
        .map(|(c, per_video)| (c, per_video.len()))
        .collect()
}

fn recomputed_vectors<S: Scalar>(
    corpus: &Corpus,
) -> Result<BTreeMap<VideoNum, SparseVector<S>>, IndexError> {
    if !corpus.has_shot_data() {
        return Err(IndexError::Config(
            "recomputing weights requires shot listings".into(),
        ));
    }
    let n = corpus.n_videos();
    let mut vectors: BTreeMap<VideoNum, SparseVector<S>> = corpus
        .videos()
        .keys()
        .map(|v| (v.clone(), SparseVector::new()))
        .collect();
    for (concept, per_video) in shot_counts(corpus) {
        let df = per_video.len();
        for (video, count) in per_video {
            // finalize guarantees every shot's video exists
            let doc = &corpus.videos()[&video];
            if count > doc.number_shots as usize {
                return Err(IndexError::ShotCount {
                    video,
                    concept,
                    count,
                    number_shots: doc.number_shots,
                });
            }
            let tf = S::from_usize(count).unwrap() / S::from_u32(doc.number_shots).unwrap();
            let w = tf_idf(tf, df, n)?;
            vectors.get_mut(&video).unwrap().set(concept, w);
        }
    }
    Ok(vectors)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{collect_videos, finalize, ConceptRecord, Labels, VideoRef};
    use proptest::prelude::*;

    #[test]
    fn tf_idf_values() {
        assert_eq!(tf_idf(0.7f64, 4, 4).unwrap(), 0.0);
        assert!((tf_idf(0.5f64, 1, 4).unwrap() - std::f64::consts::LN_2).abs() < 1e-12);
        assert_eq!(tf_idf(0.0f64, 2, 4).unwrap(), 0.0);
        assert!((tf_idf(0.5f32, 1, 4).unwrap() - std::f32::consts::LN_2).abs() < 1e-6);
    }

    #[test]
    fn tf_idf_domain_errors() {
        assert!(matches!(tf_idf(0.5f64, 0, 4), Err(IndexError::Domain { .. })));
        assert!(matches!(tf_idf(0.5f64, 5, 4), Err(IndexError::Domain { .. })));
        assert!(matches!(tf_idf(1.5f64, 1, 4), Err(IndexError::Domain { .. })));
    }

    fn vref(num: &str, weight: f64) -> VideoRef {
        VideoRef {
            num: VideoNum::new(num),
            name: format!("VIDEO_{num}"),
            weight,
            number_shots: 3,
            shot_repres: format!("shot{num}_1"),
            extra: vec![],
        }
    }

    fn corpus_of(concepts: Vec<ConceptRecord>) -> Corpus {
        let videos = collect_videos(&concepts).unwrap();
        finalize(videos, concepts, vec![]).unwrap()
    }

    fn rec(id: u32, videos: Vec<VideoRef>) -> ConceptRecord {
        ConceptRecord {
            id,
            labels: Labels::new(format!("c{id}"), None),
            videos,
            extra: vec![],
        }
    }

    #[test]
    fn single_video_single_concept() {
        let index: IndexedCorpus<f64> =
            IndexedCorpus::build(corpus_of(vec![rec(1, vec![vref("1", 0.4)])]), WeightSource::Precomputed)
                .unwrap();
        let v = VideoNum::new("1");
        assert_eq!(index.doc_norm(&v), Some(0.4));
        assert_eq!(index.postings(1), &[Posting { video: v, weight: 0.4 }]);
        assert_eq!(index.idf(1), Some(0.0));
    }

    #[test]
    fn posting_ties_by_video() {
        let index: IndexedCorpus<f64> = IndexedCorpus::build(
            corpus_of(vec![rec(1, vec![vref("3", 0.5), vref("2", 0.5), vref("4", 0.9)])]),
            WeightSource::Precomputed,
        )
        .unwrap();
        let order: Vec<_> = index.postings(1).iter().map(|p| p.video.to_string()).collect();
        assert_eq!(order, vec!["4", "2", "3"]);
    }

    #[test]
    fn recompute_without_shots_is_config_error() {
        let corpus = corpus_of(vec![rec(1, vec![vref("1", 0.4)])]);
        assert!(matches!(
            IndexedCorpus::<f64>::build(corpus, WeightSource::Recompute),
            Err(IndexError::Config(_))
        ));
    }

    #[test]
    fn weight_source_names() {
        assert_eq!("recompute".parse::<WeightSource>().unwrap(), WeightSource::Recompute);
        assert!("tfidf".parse::<WeightSource>().is_err());
    }

    fn random_corpus() -> impl Strategy<Value = Corpus> {
        proptest::collection::vec(
            proptest::collection::btree_map(1u32..=30, 1u32..=100, 0..8),
            1..25,
        )
        .prop_map(|concepts| {
            let records = concepts
                .into_iter()
                .enumerate()
                .map(|(i, videos)| {
                    rec(
                        i as u32 + 1,
                        videos
                            .into_iter()
                            .map(|(v, w)| vref(&format!("{v:05}"), w as f64 / 100.0))
                            .collect(),
                    )
                })
                .collect();
            corpus_of(records)
        })
    }

    proptest! {
        #[test]
        fn forward_and_inverted_agree(corpus in random_corpus()) {
            let index = IndexedCorpus::<f64>::build(corpus.clone(), WeightSource::Precomputed).unwrap();
            let mut n_postings = 0;
            for c in index.indexed_concepts() {
                for p in index.postings(c) {
                    n_postings += 1;
                    prop_assert!(p.weight > 0.0);
                    prop_assert_eq!(index.doc_vector(&p.video).unwrap().get(c), p.weight);
                }
                let df = index.postings(c).len() as f64;
                prop_assert_eq!(index.idf(c).unwrap(), (corpus.n_videos() as f64 / df).ln());
            }
            let n_forward: usize = index.doc_vectors().values().map(|v| v.len()).sum();
            prop_assert_eq!(n_postings, n_forward);
            for (video, vector) in index.doc_vectors() {
                let direct = vector.iter().map(|(_, w)| w * w).sum::<f64>().sqrt();
                let norm = index.doc_norm(video).unwrap();
                prop_assert!((norm - direct).abs() <= 1e-9 * direct.max(f64::MIN_POSITIVE));
                // transposition against the corpus
                for (c, w) in vector.iter() {
                    prop_assert_eq!(corpus.concept(c).unwrap().videos[video], w);
                }
            }
        }

        #[test]
        fn idf_grows_when_unrelated_video_added(corpus in random_corpus()) {
            let before = IndexedCorpus::<f64>::build(corpus.clone(), WeightSource::Precomputed).unwrap();
            let mut videos: Vec<_> = corpus.videos().values().map(|d| crate::corpus::VideoMeta {
                num: d.video_num.clone(),
                name: d.name.clone(),
                number_shots: d.number_shots,
                shot_repres: d.shot_repres.clone(),
            }).collect();
            videos.push(crate::corpus::VideoMeta {
                num: VideoNum::new("999999"),
                name: "extra".into(),
                number_shots: 1,
                shot_repres: "shot999999_1".into(),
            });
            let records = corpus.concepts().values().map(|c| rec(c.concept_id, c.videos.iter().map(|(v, w)| vref(v.as_str(), *w)).collect())).collect();
            let after = IndexedCorpus::<f64>::build(finalize(videos, records, vec![]).unwrap(), WeightSource::Precomputed).unwrap();
            for c in before.indexed_concepts() {
                prop_assert!(after.idf(c).unwrap() > before.idf(c).unwrap());
            }
        }
    }
}
