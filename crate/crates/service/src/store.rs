use std::collections::HashMap;
use std::path::PathBuf;
use std::sync::{Arc, Mutex, RwLock};
use std::time::{Duration, Instant};

use chrono::{DateTime, SecondsFormat, Utc};
use serde::{Deserialize, Serialize};

use vigilsim::engine::{SessionHistory, TriggeredEvent};
use vigilsim::error::EngineError;
use vigilsim::{GameSession, Phase, VigilanceColour};

use crate::view::StateView;

pub const DEFAULT_IDLE_TIMEOUT: Duration = Duration::from_secs(2 * 60 * 60);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionSummary {
    pub session_id: String,
    pub scenario_name: String,
    pub day_index: usize,
    pub total_days: usize,
    pub phase: Phase,
    pub complete: bool,
    /// ISO-8601, UTC.
    pub created_at: String,
}

struct Live {
    session: GameSession,
    pending_events: Vec<TriggeredEvent>,
}

/// One registered session. Mutations take the write lock, so requests to
/// the same session are applied one at a time; reads share the lock and
/// only see committed states.
pub struct SessionEntry {
    id: String,
    scenario_name: String,
    created_at: DateTime<Utc>,
    live: tokio::sync::RwLock<Live>,
    last_used: Mutex<Instant>,
}

impl SessionEntry {
    fn touch(&self) {
        *self.last_used.lock().unwrap() = Instant::now();
    }

    fn idle_since(&self) -> Instant {
        *self.last_used.lock().unwrap()
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    fn summarize(&self, session: &GameSession) -> SessionSummary {
        SessionSummary {
            session_id: self.id.clone(),
            scenario_name: self.scenario_name.clone(),
            day_index: session.day_index(),
            total_days: session.scenario().len(),
            phase: session.phase(),
            complete: session.is_complete(),
            created_at: self.created_at.to_rfc3339_opts(SecondsFormat::Millis, true),
        }
    }

    pub async fn summary(&self) -> SessionSummary {
        self.touch();
        let live = self.live.read().await;
        self.summarize(&live.session)
    }

    pub async fn view(&self) -> StateView {
        self.touch();
        let live = self.live.read().await;
        StateView::project(&live.session, &live.pending_events)
    }

    pub async fn history(&self) -> SessionHistory {
        self.touch();
        self.live.read().await.session.history().clone()
    }

    pub async fn announce(&self, colour: VigilanceColour) -> Result<StateView, EngineError> {
        self.touch();
        let mut live = self.live.write().await;
        live.session.announce(colour)?;
        live.pending_events.clear();
        Ok(StateView::project(&live.session, &live.pending_events))
    }

    pub async fn advance(&self) -> Result<StateView, EngineError> {
        self.touch();
        let mut live = self.live.write().await;
        let outcome = live.session.advance()?;
        live.pending_events = outcome.events;
        Ok(StateView::project(&live.session, &live.pending_events))
    }
}

/// In-memory session registry with idle eviction.
pub struct SessionStore {
    sessions: RwLock<HashMap<String, Arc<SessionEntry>>>,
    idle_timeout: Duration,
    export_dir: Option<PathBuf>,
}

impl Default for SessionStore {
    fn default() -> Self {
        Self::new(DEFAULT_IDLE_TIMEOUT, None)
    }
}

impl SessionStore {
    /// Evicted sessions are written to `export_dir/<id>.json` in the
    /// history format when a directory is given.
    pub fn new(idle_timeout: Duration, export_dir: Option<PathBuf>) -> Self {
        Self {
            sessions: RwLock::new(HashMap::new()),
            idle_timeout,
            export_dir,
        }
    }

    pub fn idle_timeout(&self) -> Duration {
        self.idle_timeout
    }

    pub fn insert(&self, scenario_name: &str, session: GameSession) -> SessionSummary {
        let entry = SessionEntry {
            id: uuid::Uuid::new_v4().simple().to_string(),
            scenario_name: scenario_name.to_string(),
            created_at: Utc::now(),
            live: tokio::sync::RwLock::new(Live {
                session,
                pending_events: Vec::new(),
            }),
            last_used: Mutex::new(Instant::now()),
        };
        let summary = {
            let live = entry.live.try_read().expect("fresh lock");
            entry.summarize(&live.session)
        };
        self.sessions
            .write()
            .unwrap()
            .insert(entry.id.clone(), Arc::new(entry));
        summary
    }

    pub fn get(&self, id: &str) -> Option<Arc<SessionEntry>> {
        self.sessions.read().unwrap().get(id).cloned()
    }

    pub fn len(&self) -> usize {
        self.sessions.read().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub async fn summaries(&self) -> Vec<SessionSummary> {
        let entries: Vec<_> = self.sessions.read().unwrap().values().cloned().collect();
        let mut out = Vec::with_capacity(entries.len());
        for e in entries {
            let live = e.live.read().await;
            out.push(e.summarize(&live.session));
        }
        out.sort_by(|a, b| a.created_at.cmp(&b.created_at).then_with(|| a.session_id.cmp(&b.session_id)));
        out
    }

    /// Removes sessions idle for at least the timeout as of `now` and
    /// returns their ids.
    pub async fn evict_idle(&self, now: Instant) -> Vec<String> {
        let evicted: Vec<Arc<SessionEntry>> = {
            let mut map = self.sessions.write().unwrap();
            let stale: Vec<String> = map
                .values()
                .filter(|e| now.saturating_duration_since(e.idle_since()) >= self.idle_timeout)
                .map(|e| e.id.clone())
                .collect();
            stale.iter().filter_map(|id| map.remove(id)).collect()
        };
        let mut ids = Vec::with_capacity(evicted.len());
        for entry in evicted {
            if let Some(dir) = &self.export_dir {
                let history = entry.live.read().await.session.history().to_json();
                let path = dir.join(format!("{}.json", entry.id));
                if let Err(e) = std::fs::write(&path, history) {
                    eprintln!("export of session {} to {} failed: {e}", entry.id, path.display());
                }
            }
            ids.push(entry.id.clone());
        }
        ids
    }
}
