use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::Serialize;

use super::EvalError;
use crate::corpus::VideoNum;

/// Precision and recall of the first `cutoff` entries of `ranking`.
///
/// Precision divides by the number of entries actually returned (fewer
/// than `cutoff` when the ranking is short); recall divides by the number
/// of relevant videos.
pub fn precision_recall(
    ranking: &[VideoNum],
    relevant: &BTreeSet<VideoNum>,
    cutoff: usize,
) -> Result<(f64, f64), EvalError> {
    if relevant.is_empty() {
        return Err(EvalError::EmptyQrels);
    }
    if cutoff == 0 {
        return Err(EvalError::InvalidCutoff);
    }
    let returned = &ranking[..cutoff.min(ranking.len())];
    let hits = returned.iter().filter(|v| relevant.contains(*v)).count();
    let precision = if returned.is_empty() {
        0.0
    } else {
        hits as f64 / returned.len() as f64
    };
    Ok((precision, hits as f64 / relevant.len() as f64))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PrPoint {
    pub rank: usize,
    pub recall: f64,
    pub precision: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PRCurve {
    pub query_id: String,
    pub iteration: u32,
    pub points: Vec<PrPoint>,
}

impl PRCurve {
    /// `rank,recall,precision` rows with a header line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("rank,recall,precision\n");
        for p in &self.points {
            let _ = writeln!(out, "{},{},{}", p.rank, p.recall, p.precision);
        }
        out
    }

    pub fn precision_at(&self, rank: usize) -> Option<f64> {
        self.points.get(rank.checked_sub(1)?).map(|p| p.precision)
    }
}

/// One point per rank `1..=min(k, ranking.len())`.
pub fn curve(
    ranking: &[VideoNum],
    relevant: &BTreeSet<VideoNum>,
    k: usize,
) -> Result<PRCurve, EvalError> {
    if relevant.is_empty() {
        return Err(EvalError::EmptyQrels);
    }
    if k == 0 {
        return Err(EvalError::InvalidCutoff);
    }
    let mut hits = 0usize;
    let points = ranking
        .iter()
        .take(k)
        .enumerate()
        .map(|(i, v)| {
            if relevant.contains(v) {
                hits += 1;
            }
            PrPoint {
                rank: i + 1,
                recall: hits as f64 / relevant.len() as f64,
                precision: hits as f64 / (i + 1) as f64,
            }
        })
        .collect();
    Ok(PRCurve {
        query_id: String::new(),
        iteration: 0,
        points,
    })
}
