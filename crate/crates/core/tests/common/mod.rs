//! Independent reference computations shared by the integration tests.
//!
//! Nothing here calls the index or the retrieval code; corpora are built
//! through the public corpus API and everything else is recomputed from
//! plain maps.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use manasik_core::corpus::{collect_videos, finalize, ConceptRecord, Labels, VideoRef};
use manasik_core::{ConceptId, Corpus, VideoNum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Docs = BTreeMap<String, BTreeMap<ConceptId, f64>>;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

pub fn read_fixture(name: &str) -> Vec<u8> {
    std::fs::read(fixture(name)).unwrap()
}

/// Corpus whose concept file links video `v` to concept `c` with `docs[v][c]`.
pub fn corpus_from_docs(docs: &Docs) -> Corpus {
    let mut by_concept: BTreeMap<ConceptId, Vec<VideoRef>> = BTreeMap::new();
    for (video, weights) in docs {
        for (&c, &w) in weights {
            by_concept.entry(c).or_default().push(VideoRef {
                num: VideoNum::new(video.clone()),
                name: format!("VIDEO_{video}"),
                weight: w,
                number_shots: 1,
                shot_repres: format!("shot{video}_1"),
                extra: vec![],
            });
        }
    }
    let concepts: Vec<ConceptRecord> = by_concept
        .into_iter()
        .map(|(id, videos)| ConceptRecord {
            id,
            labels: Labels::new(format!("c{id}"), None),
            videos,
            extra: vec![],
        })
        .collect();
    let videos = collect_videos(&concepts).unwrap();
    finalize(videos, concepts, vec![]).unwrap()
}

/// Random sparse corpus. Weights come from a coarse grid so that equal
/// scores, and hence tie breaking, actually occur.
pub fn random_docs(rng: &mut ChaCha8Rng, max_videos: usize, max_concepts: u32) -> Docs {
    let n_videos = rng.gen_range(1..=max_videos);
    let n_concepts = rng.gen_range(1..=max_concepts);
    let mut docs = Docs::new();
    for v in 1..=n_videos {
        let k = rng.gen_range(1..=n_concepts.min(6));
        let mut weights = BTreeMap::new();
        for _ in 0..k {
            let c = rng.gen_range(1..=n_concepts);
            weights.insert(c, rng.gen_range(1..=20) as f64 * 0.05);
        }
        docs.insert(format!("{v:05}"), weights);
    }
    docs
}

pub fn random_query(rng: &mut ChaCha8Rng, docs: &Docs) -> BTreeMap<ConceptId, f64> {
    let concepts: Vec<ConceptId> = docs
        .values()
        .flat_map(|d| d.keys().copied())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let n = rng.gen_range(1..=concepts.len().min(5));
    let mut q = BTreeMap::new();
    for _ in 0..n {
        let c = concepts[rng.gen_range(0..concepts.len())];
        q.insert(c, [1.0, 0.5, 0.25, 0.8][rng.gen_range(0..4)]);
    }
    q
}

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn norm(v: &BTreeMap<ConceptId, f64>) -> f64 {
    v.values().fold(0.0, |acc, w| acc + w * w).sqrt()
}

/// Scores every video: dot product summed in ascending concept order,
/// divided by both norms, capped at 1. Videos with a zero score are
/// not returned.
pub fn brute_force_scores(docs: &Docs, query: &BTreeMap<ConceptId, f64>) -> Vec<(String, f64)> {
    let qn = norm(query);
    let mut out = Vec::new();
    for (video, d) in docs {
        let mut dot = 0.0;
        for (c, qw) in query {
            if let Some(dw) = d.get(c) {
                dot += qw * dw;
            }
        }
        let denom = qn * norm(d);
        if dot > 0.0 && denom > 0.0 {
            out.push((video.clone(), (dot / denom).min(1.0)));
        }
    }
    out
}

/// Same ordering rule as the engine, restated: scores equal to within
/// 1024 machine epsilons tie, ties go to the numerically smaller video.
pub fn brute_force_ranking(docs: &Docs, query: &BTreeMap<ConceptId, f64>, k: usize) -> Vec<(String, f64)> {
    let quantum = f64::EPSILON * 1024.0;
    let mut scored = brute_force_scores(docs, query);
    scored.sort_by(|a, b| {
        let (ka, kb) = ((a.1 / quantum).round() as i64, (b.1 / quantum).round() as i64);
        kb.cmp(&ka).then_with(|| {
            let (na, nb) = (a.0.parse::<u64>().unwrap(), b.0.parse::<u64>().unwrap());
            na.cmp(&nb)
        })
    });
    scored.truncate(k);
    scored
}

/// Precision and recall at every rank, by direct counting.
pub fn reference_pr(ranking: &[String], relevant: &BTreeSet<String>, k: usize) -> Vec<(usize, f64, f64)> {
    let mut out = Vec::new();
    for cutoff in 1..=k.min(ranking.len()) {
        let hits = ranking[..cutoff].iter().filter(|v| relevant.contains(*v)).count();
        out.push((cutoff, hits as f64 / cutoff as f64, hits as f64 / relevant.len() as f64));
    }
    out
}

/// Four videos with 4, 2, 3 and 5 shots. Concept 1 labels two of video
/// 1's four shots; concept 2 appears in every video.
pub const TF_IDF_CONCEPTS: &str = r#"<?xml version="1.0" encoding="UTF-8"?>
<concepts>
  <concept num="1" Name="طواف">
    <video Num="00001" Name="VIDEO_00001" Weight="0.1" NUMBER_shots="4" shotrepres="shot00001_1" />
    <video Num="00003" Name="VIDEO_00003" Weight="0.1" NUMBER_shots="3" shotrepres="shot00003_1" />
  </concept>
  <concept num="2" Name="حج">
    <video Num="00001" Name="VIDEO_00001" Weight="0.1" NUMBER_shots="4" shotrepres="shot00001_1" />
    <video Num="00002" Name="VIDEO_00002" Weight="0.1" NUMBER_shots="2" shotrepres="shot00002_1" />
    <video Num="00003" Name="VIDEO_00003" Weight="0.1" NUMBER_shots="3" shotrepres="shot00003_1" />
    <video Num="00004" Name="VIDEO_00004" Weight="0.1" NUMBER_shots="5" shotrepres="shot00004_1" />
  </concept>
  <concept num="3" Name="عرفة">
    <video Num="00002" Name="VIDEO_00002" Weight="0.1" NUMBER_shots="2" shotrepres="shot00002_1" />
    <video Num="00004" Name="VIDEO_00004" Weight="0.1" NUMBER_shots="5" shotrepres="shot00004_1" />
  </concept>
  <concept num="4" Name="جمرات">
    <video Num="00004" Name="VIDEO_00004" Weight="0.1" NUMBER_shots="5" shotrepres="shot00004_1" />
  </concept>
</concepts>
"#;

pub const TF_IDF_SHOTS: &str = r#"<?xml version="1.0" encoding="UTF-8"?>
<concept>
  <videoFeatureExtractionFeatureResult fNum="1">
    <item seqNum="1" shotId="shot00001_1" />
    <item seqNum="2" shotId="shot00001_2" />
    <item seqNum="3" shotId="shot00003_2" />
  </videoFeatureExtractionFeatureResult>
  <videoFeatureExtractionFeatureResult fNum="2">
    <item seqNum="1" shotId="shot00001_3" />
    <item seqNum="2" shotId="shot00002_1" />
    <item seqNum="3" shotId="shot00003_1" />
    <item seqNum="4" shotId="shot00004_1" />
    <item seqNum="5" shotId="shot00004_2" />
  </videoFeatureExtractionFeatureResult>
  <videoFeatureExtractionFeatureResult fNum="3">
    <item seqNum="1" shotId="shot00002_1" />
    <item seqNum="2" shotId="shot00002_2" />
    <item seqNum="3" shotId="shot00004_5" />
  </videoFeatureExtractionFeatureResult>
  <videoFeatureExtractionFeatureResult fNum="4">
    <item seqNum="1" shotId="shot00004_3" />
    <item seqNum="2" shotId="shot00004_4" />
  </videoFeatureExtractionFeatureResult>
</concept>
"#;

fn attr<'a>(line: &'a str, name: &str) -> Option<&'a str> {
    let start = line.find(&format!("{name}=\""))? + name.len() + 2;
    Some(&line[start..start + line[start..].find('"')?])
}

/// Recomputes every weight by scanning the raw text: distinct labelled
/// shots per (video, concept), shot totals from the concept file,
/// `tf · ln(N / df)`.
pub fn tf_idf_oracle(concepts_xml: &str, shots_xml: &str) -> BTreeMap<(u64, u32), f64> {
    let mut shots_of: BTreeMap<u64, f64> = BTreeMap::new();
    for line in concepts_xml.lines() {
        if let (Some(num), Some(n)) = (attr(line, "Num"), attr(line, "NUMBER_shots")) {
            shots_of.insert(num.parse().unwrap(), n.parse().unwrap());
        }
    }
    let mut labelled: BTreeMap<u32, BTreeMap<u64, BTreeSet<String>>> = BTreeMap::new();
    let mut current = 0;
    for line in shots_xml.lines() {
        if let Some(f) = attr(line, "fNum") {
            current = f.parse().unwrap();
        }
        if let Some(id) = attr(line, "shotId") {
            let video = id["shot".len()..id.find('_').unwrap()].parse().unwrap();
            labelled.entry(current).or_default().entry(video).or_default().insert(id.to_string());
        }
    }
    let n = shots_of.len() as f64;
    let mut out = BTreeMap::new();
    for (concept, per_video) in labelled {
        let df = per_video.len() as f64;
        for (video, shots) in per_video {
            let tf = shots.len() as f64 / shots_of[&video];
            out.insert((video, concept), tf * (n / df).ln());
        }
    }
    out
}
