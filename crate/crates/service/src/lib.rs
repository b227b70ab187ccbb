//! HTTP service for the interactive search loop: concept suggestion,
//! search, relevance feedback and ontology browsing, with per-session
//! query state.
//!
//! | method | path                       | body / result                                   |
//! |--------|----------------------------|-------------------------------------------------|
//! | POST   | `/api/query`               | `{text, lang?}` → session id, concept candidates |
//! | POST   | `/api/search`              | `{session_id, concepts, context?, k?}` → ranking |
//! | POST   | `/api/feedback`            | `{session_id, positive, negative, k?}` → ranking |
//! | GET    | `/api/ontology/{node}`     | `root`, `context:N` or `concept:N` → neighbours  |
//! | GET    | `/api/contexts`            | contexts with members                           |
//! | GET    | `/api/videos/{video_num}`  | video metadata and indexed weights              |
//! | GET    | `/api/health`              | corpus size and live sessions                   |
//!
//! Errors are `{code, message, detail}` with status 400 (malformed or
//! empty input), 404 (unknown session or resource), 409 (feedback before
//! search), 413 (body too large) or 422 (unknown concept or context,
//! invalid judgments).

pub mod api;
pub mod config;
pub mod error;
pub mod session;

use std::sync::Arc;

use axum::routing::{get, post};
use axum::Router;
use manasik_core::SearchEngine;
use parking_lot::RwLock;
use tower_http::services::ServeDir;

pub use config::{ConfigError, ServiceConfig};
pub use error::{ApiError, ErrorBody};
pub use session::{Clock, ManualClock, SessionStore, SystemClock};

#[derive(Clone)]
pub struct AppState {
    engine: Arc<RwLock<Arc<SearchEngine>>>,
    pub sessions: Arc<SessionStore>,
    pub max_body_bytes: usize,
}

impl AppState {
    pub fn new(engine: SearchEngine, config: &ServiceConfig) -> Self {
        Self::with_clock(engine, config, Arc::new(SystemClock::default()))
    }

    pub fn with_clock(engine: SearchEngine, config: &ServiceConfig, clock: Arc<dyn Clock>) -> Self {
        AppState {
            engine: Arc::new(RwLock::new(Arc::new(engine))),
            sessions: Arc::new(SessionStore::new(config.session_timeout(), clock)),
            max_body_bytes: config.max_body_bytes,
        }
    }

    /// The current engine. Requests keep the snapshot they started with.
    pub fn engine(&self) -> Arc<SearchEngine> {
        self.engine.read().clone()
    }

    /// Atomically installs a rebuilt engine. Existing sessions keep the
    /// engine they were created with; new sessions get this one.
    pub fn replace_engine(&self, engine: SearchEngine) {
        *self.engine.write() = Arc::new(engine);
    }
}

pub fn router(state: AppState, ui_dir: Option<&std::path::Path>) -> Router {
    let api = Router::new()
        .route("/api/query", post(api::query))
        .route("/api/search", post(api::search))
        .route("/api/feedback", post(api::feedback))
        .route("/api/ontology/{node}", get(api::ontology_node))
        .route("/api/contexts", get(api::contexts))
        .route("/api/videos/{video_num}", get(api::video))
        .route("/api/health", get(api::health))
        .fallback(api::not_found);
    let api = match ui_dir {
        Some(dir) => api.nest_service("/ui", ServeDir::new(dir)),
        None => api,
    };
    api.with_state(state)
}

/// Loads the engine named by `config`, through the index cache when one
/// is configured.
pub fn load_engine(config: &ServiceConfig) -> Result<SearchEngine, manasik_core::Error> {
    let settings = config.engine_settings();
    match &config.cache {
        Some(cache) => Ok(SearchEngine::load_cached(&config.corpus, config.weight_source, settings, cache)?.0),
        None => SearchEngine::load(&config.corpus, config.weight_source, settings),
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ServeError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Engine(#[from] manasik_core::Error),
    #[error("cannot listen on {addr}: {source}")]
    Bind { addr: String, source: std::io::Error },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Loads the corpus and serves until interrupted.
pub async fn serve(config: ServiceConfig) -> Result<(), ServeError> {
    if config.corpus.concepts.as_os_str().is_empty() {
        return Err(ConfigError::MissingCorpus.into());
    }
    let engine = load_engine(&config)?;
    let state = AppState::new(engine, &config);
    let app = router(state, config.ui_dir.as_deref());
    let addr = format!("{}:{}", config.host, config.port);
    let listener = tokio::net::TcpListener::bind(&addr)
        .await
        .map_err(|source| ServeError::Bind { addr: addr.clone(), source })?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, app)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}
