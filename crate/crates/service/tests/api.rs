use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use axum::body::Body;
use axum::http::{Method, Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use proptest::prelude::*;
use serde_json::{json, Value};
use tower::ServiceExt;

use vigilsim::engine::SessionHistory;
use vigilsim::{GameSession, Phase, SimConfig, VigilanceColour};
use vigilsim_service::{router, AppState, Content, SessionStore, StateView};

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn app_with(store: SessionStore, static_dir: Option<&Path>) -> (Router, AppState) {
    let state = AppState::new(Content::discover(&fixtures()).unwrap(), store);
    (router(state.clone(), static_dir), state)
}

fn app() -> Router {
    app_with(SessionStore::default(), None).0
}

async fn call(app: &Router, method: Method, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let mut req = Request::builder().method(method).uri(uri);
    let body = match body {
        Some(v) => {
            req = req.header("content-type", "application/json");
            Body::from(v.to_string())
        }
        None => Body::empty(),
    };
    let resp = app.clone().oneshot(req.body(body).unwrap()).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    let value = if bytes.is_empty() {
        Value::Null
    } else {
        serde_json::from_slice(&bytes).unwrap_or_else(|_| Value::String(String::from_utf8_lossy(&bytes).into()))
    };
    (status, value)
}

async fn create(app: &Router, body: Value) -> String {
    let (status, v) = call(app, Method::POST, "/api/sessions", Some(body)).await;
    assert_eq!(status, StatusCode::CREATED, "{v}");
    v["session_id"].as_str().unwrap().to_string()
}

async fn announce(app: &Router, id: &str, colour: &str) -> (StatusCode, Value) {
    call(app, Method::POST, &format!("/api/sessions/{id}/announce"), Some(json!({ "colour": colour }))).await
}

async fn advance(app: &Router, id: &str) -> (StatusCode, Value) {
    call(app, Method::POST, &format!("/api/sessions/{id}/advance"), None).await
}

async fn state(app: &Router, id: &str) -> (StatusCode, Value) {
    call(app, Method::GET, &format!("/api/sessions/{id}"), None).await
}

#[tokio::test]
async fn lists_content() {
    let app = app();
    let (status, v) = call(&app, Method::GET, "/api/scenarios", None).await;
    assert_eq!(status, StatusCode::OK);
    let names: Vec<&str> = v.as_array().unwrap().iter().map(|s| s["name"].as_str().unwrap()).collect();
    assert!(names.contains(&"aude-2018-10"), "{names:?}");
    let october = v.as_array().unwrap().iter().find(|s| s["name"] == "aude-2018-10").unwrap();
    assert_eq!(october["first_date"], "2018-10-01");
    assert_eq!(october["days"], 31);

    let (_, v) = call(&app, Method::GET, "/api/configs", None).await;
    assert!(v.as_array().unwrap().iter().any(|c| c["name"] == "default" && c["valid"] == true));
}

#[tokio::test]
async fn create_examples() {
    let app = app();
    let (status, v) = call(&app, Method::POST, "/api/sessions", Some(json!({ "scenario": "nope" }))).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert_eq!(v["error"]["code"], "not_found");

    let (status, _) = call(
        &app,
        Method::POST,
        "/api/sessions",
        Some(json!({ "scenario": "aude-2018-10", "config": "nope" })),
    )
    .await;
    assert_eq!(status, StatusCode::NOT_FOUND);

    let (status, v) = call(
        &app,
        Method::POST,
        "/api/sessions",
        Some(json!({ "scenario": "aude-2018-10", "config": "default", "seed": 5 })),
    )
    .await;
    assert_eq!(status, StatusCode::CREATED);
    assert_eq!(v["phase"], "awaiting_colour");
    assert_eq!(v["day_index"], 0);
    assert_eq!(v["total_days"], 31);
    assert_eq!(v["scenario_name"], "aude-2018-10");
    assert!(v["created_at"].as_str().unwrap().ends_with('Z'));

    let (status, v) = call(&app, Method::POST, "/api/sessions", Some(json!({ "scenario": 3 }))).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(v["error"]["code"], "validation");
}

#[tokio::test]
async fn invalid_config_reports_field_path() {
    let mut content = Content::discover(&fixtures()).unwrap();
    let bad = "schema_version = 1\n[population]\nsize = 10\nseed = 1\ntrust_init = { kind = \"constant\", value = 1.5 }\n\
               threshold_mm = { kind = \"constant\", value = 50.0 }\nmemory_depth = { kind = \"constant\", value = 3 }\n";
    content.insert_config("broken", SimConfig::from_toml(bad));
    let app = router(AppState::new(content, SessionStore::default()), None);
    let (status, v) = call(
        &app,
        Method::POST,
        "/api/sessions",
        Some(json!({ "scenario": "aude-2018-10", "config": "broken" })),
    )
    .await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(v["error"]["path"], "population.trust_init");
}

#[tokio::test]
async fn state_and_mutation_examples() {
    let app = app();
    let id = create(&app, json!({ "scenario": "aude-2018-10", "config": "default" })).await;

    let (status, v) = state(&app, &id).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["weather"]["date"], "2018-10-01");
    assert!(v["weather"]["forecast_rain_mm"].is_number());
    assert!(v["weather"]["last_observed"].is_null());
    assert!(v.get("session_id").is_none());
    assert_eq!(state(&app, &id).await.1, v, "reads are idempotent");

    let (status, v) = announce(&app, &id, "blue").await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(v["error"]["path"], "colour");

    let (status, v) = advance(&app, &id).await;
    assert_eq!(status, StatusCode::CONFLICT);
    assert_eq!(v["error"]["code"], "conflict");

    let (status, v) = announce(&app, &id, "orange").await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(v["phase"], "awaiting_advance");
    assert_eq!(v["weather"]["current_colour"], "orange");
    assert!(v["population"]["evacuated_fraction"].is_number());
    let (status, _) = announce(&app, &id, "orange").await;
    assert_eq!(status, StatusCode::CONFLICT);

    let (status, v) = advance(&app, &id).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(v["day_index"], 1);
    assert_eq!(v["weather"]["last_observed"]["date"], "2018-10-01");
    assert_eq!(v["last_record"]["announced"], "orange");

    let (status, v) = state(&app, "missing").await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert_eq!(v["error"]["code"], "not_found");
    assert_eq!(advance(&app, "missing").await.0, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn red_announcement_pops_school_events() {
    let app = app();
    let id = create(&app, json!({ "scenario": "aude-2018-10" })).await;
    announce(&app, &id, "red").await;
    let (_, v) = advance(&app, &id).await;
    let ids: Vec<&str> = v["pending_events"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["id"].as_str().unwrap())
        .collect();
    assert!(ids.contains(&"schools_closed"), "{ids:?}");
    let (_, v) = announce(&app, &id, "green").await;
    assert!(v["pending_events"].as_array().unwrap().is_empty());
}

#[tokio::test]
async fn final_day_flags_complete() {
    let app = app();
    let id = create(&app, json!({ "scenario": "false-alarms-then-flood" })).await;
    let (_, v) = state(&app, &id).await;
    let days = v["total_days"].as_u64().unwrap();
    let mut last = Value::Null;
    for _ in 0..days {
        assert_eq!(announce(&app, &id, "yellow").await.0, StatusCode::OK);
        last = advance(&app, &id).await.1;
    }
    assert_eq!(last["complete"], true);
    assert!(last["weather"]["date"].is_null());
    assert_eq!(last["communication"]["days_played"], days);
    let (status, v) = announce(&app, &id, "red").await;
    assert_eq!(status, StatusCode::CONFLICT);
    assert_eq!(v["error"]["code"], "session_complete");
    assert_eq!(advance(&app, &id).await.0, StatusCode::CONFLICT);

    let (status, v) = call(&app, Method::GET, &format!("/api/sessions/{id}/history"), None).await;
    assert_eq!(status, StatusCode::OK);
    let history: SessionHistory = serde_json::from_value(v).unwrap();
    assert_eq!(history.records.len() as u64, days);
}

#[tokio::test]
async fn same_seed_same_first_view() {
    let app = app();
    let body = json!({ "scenario": "aude-2018-10", "config": "classroom", "seed": 99 });
    let a = create(&app, body.clone()).await;
    let b = create(&app, body).await;
    assert_ne!(a, b);
    let (_, va) = state(&app, &a).await;
    let (_, vb) = state(&app, &b).await;
    assert_eq!(va.to_string(), vb.to_string());
    assert_eq!(announce(&app, &a, "orange").await.1, announce(&app, &b, "orange").await.1);
}

#[tokio::test]
async fn state_view_round_trips() {
    let app = app();
    let id = create(&app, json!({ "scenario": "aude-2018-10" })).await;
    announce(&app, &id, "yellow").await;
    let (_, v) = advance(&app, &id).await;
    let view: StateView = serde_json::from_value(v.clone()).unwrap();
    assert_eq!(serde_json::to_value(&view).unwrap(), v);
}

#[tokio::test(flavor = "multi_thread", worker_threads = 4)]
async fn concurrent_requests_are_serialized() {
    let app = app();
    let id = create(&app, json!({ "scenario": "aude-2018-10", "config": "default" })).await;
    let mut tasks = Vec::new();
    for i in 0..64 {
        let (app, id) = (app.clone(), id.clone());
        tasks.push(tokio::spawn(async move {
            if i % 2 == 0 {
                let colour = ["green", "yellow", "orange", "red"][i / 2 % 4];
                announce(&app, &id, colour).await.0
            } else {
                advance(&app, &id).await.0
            }
        }));
    }
    let mut advanced = 0;
    for t in tasks {
        let status = t.await.unwrap();
        assert!(status == StatusCode::OK || status == StatusCode::CONFLICT, "{status}");
        if status == StatusCode::OK {
            advanced += 1;
        }
    }
    let (_, v) = call(&app, Method::GET, &format!("/api/sessions/{id}/history"), None).await;
    let history: SessionHistory = serde_json::from_value(v).unwrap();
    let (_, view) = state(&app, &id).await;
    let pending = (view["phase"] == "awaiting_advance") as usize;
    assert_eq!(history.records.len() * 2 + pending, advanced);

    // Replaying the committed colours sequentially reproduces the history.
    let content = Content::discover(&fixtures()).unwrap();
    let scenario = content.scenario("aude-2018-10").unwrap().clone();
    let cfg = content.config("default").unwrap().clone().unwrap();
    let mut oracle = GameSession::new(scenario.clone(), &cfg.population, cfg.engine_settings(scenario.scale())).unwrap();
    for rec in &history.records {
        oracle.announce(rec.announced).unwrap();
        oracle.advance().unwrap();
    }
    assert_eq!(oracle.history(), &history);
}

#[tokio::test]
async fn idle_sessions_are_evicted_and_exported() {
    let dir = tempfile::tempdir().unwrap();
    let (app, state_) = app_with(
        SessionStore::new(Duration::from_secs(7200), Some(dir.path().to_path_buf())),
        None,
    );
    let id = create(&app, json!({ "scenario": "aude-2018-10" })).await;
    announce(&app, &id, "green").await;
    advance(&app, &id).await;

    assert!(state_.store.evict_idle(Instant::now()).await.is_empty());
    let later = Instant::now() + Duration::from_secs(7200);
    assert_eq!(state_.store.evict_idle(later).await, vec![id.clone()]);
    assert_eq!(state(&app, &id).await.0, StatusCode::NOT_FOUND);

    let text = std::fs::read_to_string(dir.path().join(format!("{id}.json"))).unwrap();
    let history = SessionHistory::from_json(&text).unwrap();
    assert_eq!(history.records.len(), 1);
}

#[tokio::test]
async fn static_files_and_unknown_api_paths() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("index.html"), "<h1>dashboard</h1>").unwrap();
    let (app, _) = app_with(SessionStore::default(), Some(dir.path()));
    let (status, v) = call(&app, Method::GET, "/index.html", None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(v, "<h1>dashboard</h1>");
    let (status, v) = call(&app, Method::GET, "/api/nothing/here", None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert_eq!(v["error"]["code"], "not_found");
}

#[derive(Debug, Clone)]
enum Op {
    Announce(Option<VigilanceColour>),
    Advance,
    Get,
}

fn op() -> impl Strategy<Value = Op> {
    prop_oneof![
        3 => prop::option::weighted(0.9, (0usize..4).prop_map(|i| VigilanceColour::ALL[i])).prop_map(Op::Announce),
        3 => Just(Op::Advance),
        1 => Just(Op::Get),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    /// Any endpoint sequence leaves the service in the state the engine
    /// reaches when driven directly with the same calls.
    #[test]
    fn endpoint_sequences_match_engine(ops in prop::collection::vec(op(), 0..50), seed in 0u64..1000) {
        let rt = tokio::runtime::Builder::new_current_thread().enable_all().build().unwrap();
        rt.block_on(async {
            let app = app();
            let id = create(&app, json!({ "scenario": "false-alarms-then-flood", "config": "classroom", "seed": seed })).await;

            let content = Content::discover(&fixtures()).unwrap();
            let scenario = content.scenario("false-alarms-then-flood").unwrap().clone();
            let mut cfg = content.config("classroom").unwrap().clone().unwrap();
            cfg.population.seed = seed;
            let mut oracle = GameSession::new(scenario.clone(), &cfg.population, cfg.engine_settings(scenario.scale())).unwrap();
            let mut pending = Vec::new();

            for op in ops {
                let (status, body) = match &op {
                    Op::Announce(Some(c)) => announce(&app, &id, c.as_str()).await,
                    Op::Announce(None) => announce(&app, &id, "blue").await,
                    Op::Advance => advance(&app, &id).await,
                    Op::Get => state(&app, &id).await,
                };
                let expected = match &op {
                    Op::Announce(Some(c)) => oracle.announce(*c).map(|_| pending.clear()).is_ok(),
                    Op::Announce(None) => false,
                    Op::Advance => match oracle.advance() {
                        Ok(out) => { pending = out.events; true }
                        Err(_) => false,
                    },
                    Op::Get => true,
                };
                assert_eq!(status.is_success(), expected, "{op:?}: {body}");
                if status.is_success() {
                    assert_eq!(body, serde_json::to_value(StateView::project(&oracle, &pending)).unwrap());
                } else {
                    let want = if matches!(op, Op::Announce(None)) { StatusCode::UNPROCESSABLE_ENTITY } else { StatusCode::CONFLICT };
                    assert_eq!(status, want);
                }
            }
            let (_, view) = state(&app, &id).await;
            assert_eq!(view, serde_json::to_value(StateView::project(&oracle, &pending)).unwrap());
            assert!(view["phase"] == "awaiting_colour" || oracle.phase() == Phase::AwaitingAdvance);
        });
    }
}
