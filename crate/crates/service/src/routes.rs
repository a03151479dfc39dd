use std::path::Path;
use std::sync::Arc;
use std::time::{Duration, Instant};

use axum::extract::rejection::JsonRejection;
use axum::extract::{Path as UrlPath, State};
use axum::http::StatusCode;
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::Deserialize;
use tower_http::services::ServeDir;

use vigilsim::engine::SessionHistory;
use vigilsim::{GameSession, SimConfig, VigilanceColour};

use crate::content::{ConfigInfo, Content, ScenarioInfo};
use crate::error::ApiError;
use crate::store::{SessionEntry, SessionStore, SessionSummary};
use crate::view::StateView;

#[derive(Clone)]
pub struct AppState {
    pub content: Arc<Content>,
    pub store: Arc<SessionStore>,
}

impl AppState {
    pub fn new(content: Content, store: SessionStore) -> Self {
        Self {
            content: Arc::new(content),
            store: Arc::new(store),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CreateSession {
    pub scenario: String,
    /// Config name; built-in defaults when omitted.
    #[serde(default)]
    pub config: Option<String>,
    /// Overrides the config's population seed.
    #[serde(default)]
    pub seed: Option<u64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Announce {
    pub colour: String,
}

fn body<T>(payload: Result<Json<T>, JsonRejection>) -> Result<T, ApiError> {
    match payload {
        Ok(Json(v)) => Ok(v),
        Err(JsonRejection::JsonDataError(e)) => Err(ApiError::validation("body", e.body_text())),
        Err(e) => Err(ApiError::bad_request(e.body_text())),
    }
}

fn session(state: &AppState, id: &str) -> Result<Arc<SessionEntry>, ApiError> {
    state
        .store
        .get(id)
        .ok_or_else(|| ApiError::not_found(format!("no session {id:?}")))
}

async fn list_scenarios(State(state): State<AppState>) -> Json<Vec<ScenarioInfo>> {
    Json(state.content.scenario_infos())
}

async fn list_configs(State(state): State<AppState>) -> Json<Vec<ConfigInfo>> {
    Json(state.content.config_infos())
}

async fn list_sessions(State(state): State<AppState>) -> Json<Vec<SessionSummary>> {
    Json(state.store.summaries().await)
}

async fn create_session(
    State(state): State<AppState>,
    payload: Result<Json<CreateSession>, JsonRejection>,
) -> Result<(StatusCode, Json<SessionSummary>), ApiError> {
    let req = body(payload)?;
    let scenario = state
        .content
        .scenario(&req.scenario)
        .ok_or_else(|| ApiError::not_found(format!("no scenario {:?}", req.scenario)))?
        .clone();
    let mut config = match &req.config {
        Some(name) => state
            .content
            .config(name)
            .ok_or_else(|| ApiError::not_found(format!("no config {name:?}")))?
            .clone()?,
        None => SimConfig::default(),
    };
    if let Some(seed) = req.seed {
        config.population.seed = seed;
    }
    let scenario = match config.scale {
        Some(scale) => Arc::new((*scenario).clone().with_scale(scale)),
        None => scenario,
    };
    let settings = config.engine_settings(scenario.scale());
    let game = GameSession::new(scenario, &config.population, settings)?;
    let summary = state.store.insert(&req.scenario, game);
    Ok((StatusCode::CREATED, Json(summary)))
}

async fn get_state(State(state): State<AppState>, UrlPath(id): UrlPath<String>) -> Result<Json<StateView>, ApiError> {
    Ok(Json(session(&state, &id)?.view().await))
}

async fn get_summary(
    State(state): State<AppState>,
    UrlPath(id): UrlPath<String>,
) -> Result<Json<SessionSummary>, ApiError> {
    Ok(Json(session(&state, &id)?.summary().await))
}

async fn announce(
    State(state): State<AppState>,
    UrlPath(id): UrlPath<String>,
    payload: Result<Json<Announce>, JsonRejection>,
) -> Result<Json<StateView>, ApiError> {
    let entry = session(&state, &id)?;
    let req = body(payload)?;
    let colour: VigilanceColour = req
        .colour
        .parse()
        .map_err(|e: vigilsim::colour::UnknownColour| ApiError::validation("colour", e.to_string()))?;
    Ok(Json(entry.announce(colour).await?))
}

async fn advance(State(state): State<AppState>, UrlPath(id): UrlPath<String>) -> Result<Json<StateView>, ApiError> {
    Ok(Json(session(&state, &id)?.advance().await?))
}

async fn history(
    State(state): State<AppState>,
    UrlPath(id): UrlPath<String>,
) -> Result<Json<SessionHistory>, ApiError> {
    Ok(Json(session(&state, &id)?.history().await))
}

async fn api_not_found() -> ApiError {
    ApiError::not_found("no such endpoint")
}

/// The API under `/api`, plus static files from `static_dir` for every
/// other path.
pub fn router(state: AppState, static_dir: Option<&Path>) -> Router {
    let app = Router::new()
        .route("/api/scenarios", get(list_scenarios))
        .route("/api/configs", get(list_configs))
        .route("/api/sessions", get(list_sessions).post(create_session))
        .route("/api/sessions/{id}", get(get_state))
        .route("/api/sessions/{id}/summary", get(get_summary))
        .route("/api/sessions/{id}/announce", post(announce))
        .route("/api/sessions/{id}/advance", post(advance))
        .route("/api/sessions/{id}/history", get(history))
        .route("/api/{*rest}", get(api_not_found).post(api_not_found))
        .with_state(state);
    match static_dir {
        Some(dir) => app.fallback_service(ServeDir::new(dir)),
        None => app.fallback(api_not_found),
    }
}

/// Periodically evicts idle sessions until the runtime shuts down.
pub fn spawn_evictor(store: Arc<SessionStore>, every: Duration) -> tokio::task::JoinHandle<()> {
    tokio::spawn(async move {
        let mut tick = tokio::time::interval(every);
        loop {
            tick.tick().await;
            for id in store.evict_idle(Instant::now()).await {
                eprintln!("evicted idle session {id}");
            }
        }
    })
}
