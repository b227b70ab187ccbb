//! In-memory sessions with idle expiry.
//!
//! Each session pins the engine that was current when it was created, so
//! an index swap never changes the corpus under a running session.

use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;
use std::time::{Duration, Instant};

use manasik_core::text::Lang;
use manasik_core::{ContextId, Query, SearchEngine, VideoNum};
use parking_lot::Mutex;

/// Time source for expiry; tests substitute [`ManualClock`].
pub trait Clock: Send + Sync {
    /// Time elapsed since an arbitrary fixed origin.
    fn now(&self) -> Duration;
}

#[derive(Debug)]
pub struct SystemClock(Instant);

impl Default for SystemClock {
    fn default() -> Self {
        SystemClock(Instant::now())
    }
}

impl Clock for SystemClock {
    fn now(&self) -> Duration {
        self.0.elapsed()
    }
}

#[derive(Debug, Default)]
pub struct ManualClock(AtomicU64);

impl ManualClock {
    pub fn advance(&self, by: Duration) {
        self.0.fetch_add(by.as_millis() as u64, Ordering::SeqCst);
    }
}

impl Clock for ManualClock {
    fn now(&self) -> Duration {
        Duration::from_millis(self.0.load(Ordering::SeqCst))
    }
}

#[derive(Debug)]
pub struct Session {
    pub id: String,
    pub engine: Arc<SearchEngine>,
    pub raw_text: String,
    pub lang: Option<Lang>,
    /// `None` until the first search.
    pub state: Option<Query>,
    pub context: Option<ContextId>,
    /// Judgeable videos: the top of the last ranking shown.
    pub last_presented: Vec<VideoNum>,
    pub created: Duration,
}

pub type SessionHandle = Arc<tokio::sync::Mutex<Session>>;

struct Entry {
    handle: SessionHandle,
    last_used: Duration,
}

pub struct SessionStore {
    sessions: Mutex<HashMap<String, Entry>>,
    counter: AtomicU64,
    timeout: Duration,
    clock: Arc<dyn Clock>,
}

impl SessionStore {
    pub fn new(timeout: Duration, clock: Arc<dyn Clock>) -> Self {
        SessionStore {
            sessions: Mutex::new(HashMap::new()),
            counter: AtomicU64::new(0),
            timeout,
            clock,
        }
    }

    /// Ids count up from `s1`, so a replayed request sequence sees the
    /// same ids.
    pub fn create(&self, engine: Arc<SearchEngine>, raw_text: String, lang: Option<Lang>) -> SessionHandle {
        let now = self.clock.now();
        let id = format!("s{}", self.counter.fetch_add(1, Ordering::SeqCst) + 1);
        let handle = Arc::new(tokio::sync::Mutex::new(Session {
            id: id.clone(),
            engine,
            raw_text,
            lang,
            state: None,
            context: None,
            last_presented: Vec::new(),
            created: now,
        }));
        let mut sessions = self.sessions.lock();
        sessions.retain(|_, e| now.saturating_sub(e.last_used) <= self.timeout);
        sessions.insert(
            id,
            Entry {
                handle: handle.clone(),
                last_used: now,
            },
        );
        handle
    }

    /// Live session by id, refreshing its idle timer. Expired sessions
    /// are dropped and reported as absent.
    pub fn get(&self, id: &str) -> Option<SessionHandle> {
        let now = self.clock.now();
        let mut sessions = self.sessions.lock();
        let entry = sessions.get_mut(id)?;
        if now.saturating_sub(entry.last_used) > self.timeout {
            sessions.remove(id);
            return None;
        }
        entry.last_used = now;
        Some(entry.handle.clone())
    }

    pub fn len(&self) -> usize {
        self.sessions.lock().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}
