//! Seeded synthetic corpora in the on-disk formats.
//!
//! Besides randomly annotated background videos, each planted query gets
//! an anchor concept `A` and a target concept `T`. Relevant videos carry
//! `{A: w, T: w}`, decoys carry `{A: w, X: w}` with `X` a background
//! concept, so the anchor alone cannot separate them while the target
//! can. The query text names the anchor; qrels list the relevant videos.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{write_queries, EvalError, Qrels};
use crate::corpus::{
    write_concept_shot_file, write_concept_video_file, write_context_file, ConceptId,
    ConceptRecord, ContextMember, ContextRecord, Labels, Shot, ShotListing, VideoNum, VideoRef,
};
use crate::ontology::{write_ontology_file, OntologyConcept, OntologyFile};

/// File names written by [`generate_corpus`]: concepts, contexts, shots,
/// ontology, qrels, queries.
pub const CORPUS_FILES: [&str; 6] = [
    "concepts.xml",
    "contexts.xml",
    "shots.xml",
    "ontology.xml",
    "qrels.tsv",
    "queries.tsv",
];

const RELEVANT_PER_QUERY: usize = 15;
const DECOYS_PER_QUERY: usize = 25;

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorConfig {
    pub n_videos: usize,
    pub n_concepts: usize,
    pub n_contexts: usize,
    /// Upper bound on planted queries; fewer are planted when the corpus
    /// is too small.
    pub n_queries: usize,
    pub seed: u64,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        GeneratorConfig {
            n_videos: 1000,
            n_concepts: 130,
            n_contexts: 12,
            n_queries: 5,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratedCorpus {
    pub concepts: Vec<ConceptRecord>,
    pub contexts: Vec<ContextRecord>,
    pub shots: Vec<ShotListing>,
    pub ontology: OntologyFile,
    pub qrels: Qrels,
    pub queries: Vec<(String, String)>,
}

fn arabic_digits(n: usize) -> String {
    n.to_string()
        .chars()
        .map(|d| char::from_u32(0x0660 + d.to_digit(10).unwrap()).unwrap())
        .collect()
}

fn concept_labels(id: ConceptId) -> Labels {
    Labels::new(
        format!("مفهوم{}", arabic_digits(id as usize)),
        Some(format!("topic{id}")),
    )
}

fn video_num(i: usize) -> String {
    format!("{i:05}")
}

fn weight(rng: &mut ChaCha8Rng) -> f64 {
    rng.gen_range(5..=100) as f64 / 100.0
}

impl GeneratorConfig {
    pub fn generate(&self) -> Result<GeneratedCorpus, EvalError> {
        if self.n_videos == 0 || self.n_concepts == 0 || self.n_contexts == 0 {
            return Err(EvalError::Size(format!(
                "videos, concepts and contexts must all be at least 1 (got {}, {}, {})",
                self.n_videos, self.n_concepts, self.n_contexts
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let group = RELEVANT_PER_QUERY + DECOYS_PER_QUERY;
        let planted = self
            .n_queries
            .min(self.n_concepts.saturating_sub(1) / 2)
            .min(self.n_videos / group);

        let mut concept_ids: Vec<ConceptId> = (1..=self.n_concepts as ConceptId).collect();
        concept_ids.shuffle(&mut rng);
        let (anchors, rest) = concept_ids.split_at(planted);
        let (targets, background) = rest.split_at(planted);

        let mut video_ids: Vec<usize> = (1..=self.n_videos).collect();
        video_ids.shuffle(&mut rng);

        // video -> concept -> weight
        let mut annotations: BTreeMap<usize, BTreeMap<ConceptId, f64>> = BTreeMap::new();
        let mut qrels = Qrels::default();
        let mut queries = Vec::new();
        let mut cursor = 0;
        for q in 0..planted {
            let query_id = format!("q{}", q + 1);
            for slot in 0..group {
                let video = video_ids[cursor];
                cursor += 1;
                let w = weight(&mut rng);
                let other = if slot < RELEVANT_PER_QUERY {
                    qrels.insert(&query_id, VideoNum::new(video_num(video)));
                    targets[q]
                } else {
                    *background.choose(&mut rng).unwrap()
                };
                annotations.insert(video, BTreeMap::from([(anchors[q], w), (other, w)]));
            }
            queries.push((query_id, format!("topic{}", anchors[q])));
        }
        for &video in &video_ids[cursor..] {
            let n = rng.gen_range(1..=3.min(background.len()));
            let chosen: Vec<ConceptId> = background.choose_multiple(&mut rng, n).copied().collect();
            let entry = annotations.entry(video).or_default();
            for c in chosen {
                entry.insert(c, weight(&mut rng));
            }
        }

        let mut number_shots = BTreeMap::new();
        let mut shot_repres = BTreeMap::new();
        for &video in annotations.keys() {
            let n: u32 = rng.gen_range(3..=5);
            number_shots.insert(video, n);
            shot_repres.insert(video, format!("shot{}_{}", video_num(video), rng.gen_range(1..=n)));
        }

        let mut concepts: BTreeMap<ConceptId, ConceptRecord> = (1..=self.n_concepts as ConceptId)
            .map(|id| {
                (
                    id,
                    ConceptRecord {
                        id,
                        labels: concept_labels(id),
                        videos: Vec::new(),
                        extra: Vec::new(),
                    },
                )
            })
            .collect();
        let mut listings: BTreeMap<ConceptId, Vec<String>> = BTreeMap::new();
        for (&video, weights) in &annotations {
            let n = number_shots[&video];
            for (&c, &w) in weights {
                concepts.get_mut(&c).unwrap().videos.push(VideoRef {
                    num: VideoNum::new(video_num(video)),
                    name: format!("VIDEO_{}", video_num(video)),
                    weight: w,
                    number_shots: n,
                    shot_repres: shot_repres[&video].clone(),
                    extra: Vec::new(),
                });
                let labelled = rng.gen_range(1..=n);
                let mut frames: Vec<u32> = (1..=n).collect();
                frames.shuffle(&mut rng);
                frames.truncate(labelled as usize);
                frames.sort_unstable();
                listings
                    .entry(c)
                    .or_default()
                    .extend(frames.into_iter().map(|f| format!("shot{}_{f}", video_num(video))));
            }
        }
        let shots = listings
            .into_iter()
            .map(|(c, ids)| ShotListing {
                marker: c.to_string(),
                shots: ids
                    .into_iter()
                    .enumerate()
                    .map(|(i, id)| Shot::new(i as u32 + 1, id))
                    .collect(),
                extra: Vec::new(),
            })
            .collect();

        let mut members: BTreeMap<u32, BTreeMap<ConceptId, f64>> = BTreeMap::new();
        for &c in concepts.keys() {
            let n = rng.gen_range(1..=2.min(self.n_contexts));
            let mut ctxs: Vec<u32> = (1..=self.n_contexts as u32).collect();
            ctxs.shuffle(&mut rng);
            for ctx in ctxs.into_iter().take(n) {
                let w = *[1.0, 1.0, 0.75, 0.5].choose(&mut rng).unwrap();
                members.entry(ctx).or_default().insert(c, w);
            }
        }
        let contexts: Vec<ContextRecord> = (1..=self.n_contexts as u32)
            .map(|id| {
                let m = members.remove(&id).unwrap_or_default();
                ContextRecord {
                    id,
                    labels: Labels::new(
                        format!("سياق{}", arabic_digits(id as usize)),
                        Some(format!("context{id}")),
                    ),
                    nbr_concept: m.len() as u32,
                    members: m
                        .into_iter()
                        .map(|(concept_id, weight)| ContextMember {
                            concept_id,
                            concept_name: concept_labels(concept_id).ar,
                            weight,
                            extra: Vec::new(),
                        })
                        .collect(),
                    extra: Vec::new(),
                }
            })
            .collect();

        // narrower links only from lower to higher ids, so the graph stays acyclic
        let mut narrower: BTreeMap<ConceptId, Vec<(ConceptId, f64)>> = BTreeMap::new();
        if self.n_concepts > 1 {
            for _ in 0..self.n_concepts / 5 {
                let a = rng.gen_range(1..self.n_concepts as ConceptId);
                let b = rng.gen_range(a + 1..=self.n_concepts as ConceptId);
                let links = narrower.entry(a).or_default();
                if !links.iter().any(|(x, _)| *x == b) {
                    links.push((b, 1.0));
                }
            }
        }
        let ontology = OntologyFile {
            contexts: contexts.clone(),
            concepts: concepts
                .values()
                .map(|c| OntologyConcept {
                    concept_id: c.id,
                    labels: c.labels.clone(),
                    narrower: narrower.remove(&c.id).unwrap_or_default(),
                    extra: Vec::new(),
                })
                .collect(),
        };

        Ok(GeneratedCorpus {
            concepts: concepts.into_values().collect(),
            contexts,
            shots,
            ontology,
            qrels,
            queries,
        })
    }
}

impl GeneratedCorpus {
    /// Documents in the order of [`CORPUS_FILES`].
    pub fn render(&self) -> [String; 6] {
        [
            write_concept_video_file(&self.concepts),
            write_context_file(&self.contexts),
            write_concept_shot_file(&self.shots),
            write_ontology_file(&self.ontology),
            self.qrels.to_tsv(),
            write_queries(&self.queries),
        ]
    }

    pub fn write_to(&self, dir: &Path) -> Result<Vec<PathBuf>, EvalError> {
        std::fs::create_dir_all(dir).map_err(|source| EvalError::Io {
            path: dir.to_path_buf(),
            source,
        })?;
        let mut paths = Vec::new();
        for (name, body) in CORPUS_FILES.iter().zip(self.render()) {
            let path = dir.join(name);
            std::fs::write(&path, body).map_err(|source| EvalError::Io {
                path: path.clone(),
                source,
            })?;
            paths.push(path);
        }
        Ok(paths)
    }
}

/// Generates a corpus and writes its files into `dir`.
pub fn generate_corpus(config: &GeneratorConfig, dir: &Path) -> Result<Vec<PathBuf>, EvalError> {
    config.generate()?.write_to(dir)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(seed: u64) -> GeneratorConfig {
        GeneratorConfig {
            n_videos: 120,
            n_concepts: 20,
            n_contexts: 4,
            n_queries: 2,
            seed,
        }
    }

    #[test]
    fn deterministic_for_seed() {
        assert_eq!(small(3).generate().unwrap().render(), small(3).generate().unwrap().render());
        assert_ne!(small(3).generate().unwrap().render(), small(4).generate().unwrap().render());
    }

    #[test]
    fn zero_sizes_rejected() {
        for cfg in [
            GeneratorConfig { n_videos: 0, ..small(1) },
            GeneratorConfig { n_concepts: 0, ..small(1) },
            GeneratorConfig { n_contexts: 0, ..small(1) },
        ] {
            assert!(matches!(cfg.generate(), Err(EvalError::Size(_))));
        }
    }

    #[test]
    fn planted_queries_and_qrels() {
        let g = small(9).generate().unwrap();
        assert_eq!(g.queries.len(), 2);
        assert_eq!(g.qrels.len(), 2);
        for q in g.qrels.queries() {
            assert_eq!(g.qrels.get(q).unwrap().len(), RELEVANT_PER_QUERY);
        }
    }

    #[test]
    fn tiny_corpus_plants_nothing() {
        let g = GeneratorConfig {
            n_videos: 3,
            n_concepts: 1,
            n_contexts: 1,
            n_queries: 5,
            seed: 1,
        }
        .generate()
        .unwrap();
        assert!(g.queries.is_empty());
        assert_eq!(g.concepts.len(), 1);
    }

    #[test]
    fn arabic_indic_digits() {
        assert_eq!(arabic_digits(17), "١٧");
    }
}
