use std::collections::BTreeSet;

use super::{curve, EvalError, PRCurve};
use crate::corpus::{ContextId, VideoNum};
use crate::index::IndexedCorpus;
use crate::retrieval::{feedback_update, search, JudgmentSet, QueryState};
use crate::{Scalar, DEFAULT_K};

#[derive(Debug, Clone, PartialEq)]
pub struct SessionConfig {
    pub query_id: String,
    pub iterations: u32,
    /// Size of the auto-judged window at the top of each ranking.
    pub judge_window: usize,
    /// Depth of each evaluated ranking.
    pub k: usize,
    pub context: Option<ContextId>,
}

impl Default for SessionConfig {
    fn default() -> Self {
        SessionConfig {
            query_id: String::new(),
            iterations: 3,
            judge_window: DEFAULT_K,
            k: DEFAULT_K,
            context: None,
        }
    }
}

/// Runs `Q0 .. Q{iterations-1}`: search, evaluate, auto-judge the top
/// window against `relevant` (relevant → positive, otherwise negative),
/// update the query, repeat.
pub fn simulate_session<S: Scalar>(
    index: &IndexedCorpus<S>,
    initial: &QueryState<S>,
    relevant: &BTreeSet<VideoNum>,
    config: &SessionConfig,
) -> Result<Vec<PRCurve>, EvalError> {
    if config.iterations == 0 {
        return Err(EvalError::NoIterations);
    }
    if relevant.is_empty() {
        return Err(EvalError::EmptyQrels);
    }
    let depth = config.k.max(config.judge_window).max(1);
    let mut state = initial.clone();
    let mut curves = Vec::with_capacity(config.iterations as usize);
    for i in 0..config.iterations {
        let ranking: Vec<VideoNum> = search(index, &state, depth, config.context)?
            .into_iter()
            .map(|r| r.video_num)
            .collect();
        let mut c = curve(&ranking[..config.k.min(ranking.len())], relevant, config.k)?;
        c.query_id = config.query_id.clone();
        c.iteration = i;
        curves.push(c);
        if i + 1 == config.iterations {
            break;
        }
        let window = &ranking[..config.judge_window.min(ranking.len())];
        let (pos, neg): (Vec<VideoNum>, Vec<VideoNum>) =
            window.iter().cloned().partition(|v| relevant.contains(v));
        let judgments = JudgmentSet::new(pos, neg)?;
        state = feedback_update(&state, &judgments, window, index)?;
    }
    Ok(curves)
}
