//! Request and response bodies and the endpoint handlers.

use std::collections::BTreeSet;

use axum::extract::{FromRequest, Path, Request, State};
use axum::http::{header, StatusCode};
use axum::Json;
use manasik_core::corpus::Labels;
use manasik_core::ontology::{NodeId, NodeKind};
use manasik_core::retrieval::JudgmentSet;
use manasik_core::text::{Lang, NormalizedTerm};
use manasik_core::{ConceptId, ContextId, Hit, SearchEngine, VideoNum};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::ApiError;
use crate::session::Session;
use crate::AppState;

/// JSON body extractor with the service's size limit and error schema.
pub struct JsonBody<T>(pub T);

impl<T: DeserializeOwned> FromRequest<AppState> for JsonBody<T> {
    type Rejection = ApiError;

    async fn from_request(req: Request, state: &AppState) -> Result<Self, ApiError> {
        let limit = state.max_body_bytes;
        let too_large = || {
            ApiError::new(StatusCode::PAYLOAD_TOO_LARGE, "body_too_large", format!("request body exceeds {limit} bytes"))
        };
        let declared = req
            .headers()
            .get(header::CONTENT_LENGTH)
            .and_then(|v| v.to_str().ok())
            .and_then(|v| v.parse::<usize>().ok());
        if declared.is_some_and(|n| n > limit) {
            return Err(too_large());
        }
        let bytes = axum::body::to_bytes(req.into_body(), limit)
            .await
            .map_err(|_| too_large())?;
        serde_json::from_slice(&bytes).map(JsonBody).map_err(|e| {
            ApiError::bad_request("malformed_body", "request body is not valid JSON for this endpoint")
                .with_detail(e.to_string().into())
        })
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QueryRequest {
    pub text: String,
    #[serde(default)]
    pub lang: Option<Lang>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConceptRef {
    pub concept_id: ConceptId,
    pub labels: Labels,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Candidate {
    pub concept_id: ConceptId,
    pub labels: Labels,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Suggestion {
    pub concept_id: ConceptId,
    pub labels: Labels,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QueryResponse {
    pub session_id: String,
    pub terms: Vec<NormalizedTerm>,
    pub candidates: Vec<Candidate>,
    pub suggestions: Vec<Suggestion>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hint: Option<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchRequest {
    pub session_id: String,
    pub concepts: Vec<ConceptId>,
    #[serde(default)]
    pub context: Option<ContextId>,
    #[serde(default)]
    pub k: Option<usize>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FeedbackRequest {
    pub session_id: String,
    #[serde(default)]
    pub positive: Vec<String>,
    #[serde(default)]
    pub negative: Vec<String>,
    #[serde(default)]
    pub k: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MatchedConcept {
    pub concept_id: ConceptId,
    pub contribution: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultItem {
    pub rank: usize,
    pub video_num: String,
    pub name: String,
    pub score: f64,
    pub shot_repres: String,
    pub matched_concepts: Vec<MatchedConcept>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QueryWeight {
    pub concept_id: ConceptId,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankingResponse {
    pub session_id: String,
    pub iteration: u32,
    /// Current query vector.
    pub query: Vec<QueryWeight>,
    pub results: Vec<ResultItem>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NodeRef {
    pub id: NodeId,
    pub kind: NodeKind,
    pub labels: Labels,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChildRef {
    pub id: NodeId,
    pub kind: NodeKind,
    pub labels: Labels,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NodeResponse {
    pub id: NodeId,
    pub kind: NodeKind,
    pub labels: Labels,
    pub parents: Vec<NodeRef>,
    pub children: Vec<ChildRef>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContextMemberItem {
    pub concept_id: ConceptId,
    pub labels: Labels,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContextItem {
    pub context_id: ContextId,
    pub labels: Labels,
    pub nbr_concept: u32,
    pub members: Vec<ContextMemberItem>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VideoResponse {
    pub video_num: String,
    pub name: String,
    pub number_shots: u32,
    pub shot_repres: String,
    /// Indexed weights, the ones ranking uses.
    pub concepts: Vec<QueryWeight>,
}

fn concept_labels(engine: &SearchEngine, id: ConceptId) -> Labels {
    engine
        .corpus()
        .concept(id)
        .map(|c| c.labels.clone())
        .unwrap_or_else(|| Labels::new(id.to_string(), None))
}

pub async fn query(
    State(app): State<AppState>,
    JsonBody(req): JsonBody<QueryRequest>,
) -> Result<Json<QueryResponse>, ApiError> {
    if req.text.trim().is_empty() {
        return Err(ApiError::bad_request("empty_query", "query text is empty"));
    }
    let engine = app.engine();
    let suggestions = engine.suggest(&req.text);
    let handle = app.sessions.create(engine.clone(), req.text.clone(), req.lang);
    let session_id = handle.lock().await.id.clone();

    let candidates: Vec<Candidate> = suggestions
        .candidates
        .iter()
        .map(|m| Candidate {
            concept_id: m.concept_id,
            labels: concept_labels(&engine, m.concept_id),
            score: m.score,
        })
        .collect();
    let mut related: Vec<Suggestion> = suggestions
        .related
        .iter()
        .map(|(&concept_id, &weight)| Suggestion {
            concept_id,
            labels: concept_labels(&engine, concept_id),
            weight,
        })
        .collect();
    related.sort_by(|a, b| b.weight.total_cmp(&a.weight).then(a.concept_id.cmp(&b.concept_id)));
    let hint = candidates
        .is_empty()
        .then(|| "no concept matched the query; browse /api/ontology/root to pick concepts".to_string());
    Ok(Json(QueryResponse {
        session_id,
        terms: suggestions.terms,
        candidates,
        suggestions: related,
        hint,
    }))
}

async fn session(app: &AppState, id: &str) -> Result<crate::session::SessionHandle, ApiError> {
    app.sessions
        .get(id)
        .ok_or_else(|| ApiError::not_found("unknown_session", format!("no live session `{id}`")))
}

fn ranking(session: &mut Session, hits: Vec<Hit>) -> RankingResponse {
    let engine = &session.engine;
    let window = engine.settings().k;
    session.last_presented = hits.iter().take(window).map(|h| h.video_num.clone()).collect();
    let state = session.state.as_ref().expect("ranked sessions have a query");
    let results = hits
        .into_iter()
        .map(|h| {
            let doc = engine.corpus().video(&h.video_num).expect("ranked videos exist");
            ResultItem {
                rank: h.rank,
                video_num: h.video_num.as_str().to_string(),
                name: doc.name.clone(),
                score: h.score,
                shot_repres: doc.shot_repres.clone(),
                matched_concepts: h
                    .matched_concepts
                    .into_iter()
                    .map(|(concept_id, contribution)| MatchedConcept { concept_id, contribution })
                    .collect(),
            }
        })
        .collect();
    RankingResponse {
        session_id: session.id.clone(),
        iteration: state.iteration(),
        query: state
            .pq()
            .iter()
            .map(|(concept_id, weight)| QueryWeight { concept_id, weight })
            .collect(),
        results,
    }
}

/// Starts (or restarts) the feedback loop from a fresh concept choice.
pub async fn search(
    State(app): State<AppState>,
    JsonBody(req): JsonBody<SearchRequest>,
) -> Result<Json<RankingResponse>, ApiError> {
    let handle = session(&app, &req.session_id).await?;
    let mut session = handle.lock().await;
    if req.concepts.is_empty() {
        return Err(ApiError::unprocessable("empty_selection", "choose at least one concept"));
    }
    let engine = session.engine.clone();
    let selected: BTreeSet<ConceptId> = req.concepts.iter().copied().collect();
    let state = engine.initial_state(&session.raw_text, selected)?;
    let hits = engine.search(&state, req.k, req.context)?;
    session.state = Some(state);
    session.context = req.context;
    Ok(Json(ranking(&mut session, hits)))
}

pub async fn feedback(
    State(app): State<AppState>,
    JsonBody(req): JsonBody<FeedbackRequest>,
) -> Result<Json<RankingResponse>, ApiError> {
    let handle = session(&app, &req.session_id).await?;
    let mut session = handle.lock().await;
    let Some(state) = session.state.as_ref() else {
        return Err(ApiError::new(
            StatusCode::CONFLICT,
            "no_search",
            "feedback needs a prior search in this session",
        ));
    };
    let judgments = JudgmentSet::new(
        req.positive.iter().map(VideoNum::new),
        req.negative.iter().map(VideoNum::new),
    )?;
    let engine = session.engine.clone();
    let next = engine.feedback(state, &judgments, &session.last_presented)?;
    let hits = engine.search(&next, req.k, session.context)?;
    session.state = Some(next);
    Ok(Json(ranking(&mut session, hits)))
}

fn node_ref(engine: &SearchEngine, id: NodeId) -> Option<NodeRef> {
    let node = engine.ontology().node(id).ok()?;
    Some(NodeRef {
        id,
        kind: node.kind(),
        labels: node.labels.clone(),
    })
}

pub async fn ontology_node(
    State(app): State<AppState>,
    Path(node): Path<String>,
) -> Result<Json<NodeResponse>, ApiError> {
    let engine = app.engine();
    let unknown = || ApiError::not_found("unknown_node", format!("no ontology node `{node}`"));
    let id: NodeId = node.parse().map_err(|_| unknown())?;
    let n = engine.ontology().node(id).map_err(|_| unknown())?;
    let (parents, _) = engine.ontology().neighbors(id).map_err(|_| unknown())?;
    Ok(Json(NodeResponse {
        id,
        kind: n.kind(),
        labels: n.labels.clone(),
        parents: parents.into_iter().filter_map(|p| node_ref(&engine, p)).collect(),
        children: n
            .children
            .iter()
            .filter_map(|(&c, &weight)| {
                let r = node_ref(&engine, c)?;
                Some(ChildRef {
                    id: r.id,
                    kind: r.kind,
                    labels: r.labels,
                    weight,
                })
            })
            .collect(),
    }))
}

pub async fn contexts(State(app): State<AppState>) -> Json<Vec<ContextItem>> {
    let engine = app.engine();
    Json(
        engine
            .corpus()
            .contexts()
            .values()
            .map(|c| ContextItem {
                context_id: c.context_id,
                labels: c.labels.clone(),
                nbr_concept: c.nbr_concept,
                members: c
                    .members
                    .iter()
                    .map(|(&concept_id, &weight)| ContextMemberItem {
                        concept_id,
                        labels: concept_labels(&engine, concept_id),
                        weight,
                    })
                    .collect(),
            })
            .collect(),
    )
}

pub async fn video(
    State(app): State<AppState>,
    Path(num): Path<String>,
) -> Result<Json<VideoResponse>, ApiError> {
    let engine = app.engine();
    let key = VideoNum::new(num.clone());
    let doc = engine
        .corpus()
        .video(&key)
        .ok_or_else(|| ApiError::not_found("unknown_video", format!("no video `{num}`")))?;
    let concepts = engine
        .index()
        .doc_vector(&key)
        .map(|v| {
            v.iter()
                .map(|(concept_id, weight)| QueryWeight { concept_id, weight })
                .collect()
        })
        .unwrap_or_default();
    Ok(Json(VideoResponse {
        video_num: doc.video_num.as_str().to_string(),
        name: doc.name.clone(),
        number_shots: doc.number_shots,
        shot_repres: doc.shot_repres.clone(),
        concepts,
    }))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Health {
    pub status: &'static str,
    pub videos: usize,
    pub concepts: usize,
    pub sessions: usize,
}

pub async fn health(State(app): State<AppState>) -> Json<Health> {
    let engine = app.engine();
    Json(Health {
        status: "ok",
        videos: engine.corpus().n_videos(),
        concepts: engine.corpus().concepts().len(),
        sessions: app.sessions.len(),
    })
}

pub async fn not_found() -> ApiError {
    ApiError::not_found("no_route", "no such endpoint")
}
