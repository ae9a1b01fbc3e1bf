use std::sync::Arc;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use capsicaps_core::protocol::{Session, SessionConfig, Signal};
use capsicaps_service::api::{router, AppState};
use capsicaps_service::levels::builtin_level;
use capsicaps_service::store::Store;
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

async fn call(app: &Router, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
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
    let value = if bytes.is_empty() { Value::Null } else { serde_json::from_slice(&bytes).unwrap() };
    (status, value)
}

async fn create(app: &Router, level: &str) -> String {
    let (status, v) = call(app, "POST", "/sessions", Some(json!({ "level_id": level }))).await;
    assert_eq!(status, StatusCode::CREATED, "{v}");
    v["session_id"].as_str().unwrap().to_string()
}

fn memory_app() -> Router {
    router(Arc::new(AppState::new(None)))
}

#[tokio::test]
async fn create_returns_j0() {
    let app = memory_app();
    let (status, v) = call(&app, "POST", "/sessions", Some(json!({ "level_id": "level9" }))).await;
    assert_eq!(status, StatusCode::CREATED);
    assert_eq!(v["phase"], "proposal_pending");
    assert_eq!(v["j0_state"]["move_number"], 0);
    assert!(v["board"].as_str().unwrap().contains("Virtual Board"));
    let (status, _) = call(&app, "POST", "/sessions", Some(json!({ "level_id": "nope" }))).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    let inline = json!({ "level": { "id": 2, "width": 1, "height": 1, "obstacle_map": "1", "inventory": "01000000" } });
    let (status, v) = call(&app, "POST", "/sessions", Some(inline)).await;
    assert_eq!(status, StatusCode::CREATED, "{v}");
}

#[tokio::test]
async fn one_full_cycle() {
    let app = memory_app();
    let id = create(&app, "level9").await;
    let (status, p) = call(&app, "POST", &format!("/sessions/{id}/propose"), None).await;
    assert_eq!(status, StatusCode::OK, "{p}");
    let (_, same) = call(&app, "GET", &format!("/sessions/{id}/proposal"), None).await;
    assert_eq!(same, p);

    let (status, r) = call(&app, "POST", &format!("/sessions/{id}/signal"), Some(json!({ "type": "ok" }))).await;
    assert_eq!(status, StatusCode::OK, "{r}");
    assert_eq!(r["checkpoint"]["outcome"], "passed");
    assert_eq!(r["calculation"]["outcome"], "concordant");
    assert_eq!(r["phase"], "checksum_pending");

    let (_, r) = call(&app, "POST", &format!("/sessions/{id}/signal"), Some(json!({ "type": "ok" }))).await;
    assert_eq!(r["outcome"]["outcome"], "checksum_confirmed");
    let checksum = r["locked_checksum"].as_str().unwrap().to_string();
    assert!(checksum.starts_with("J1_State-"), "{checksum}");

    let (_, r) = call(&app, "POST", &format!("/sessions/{id}/signal"), Some(json!({ "type": "ok" }))).await;
    assert_eq!(r["outcome"]["cycle"], 2);

    let (_, st) = call(&app, "GET", &format!("/sessions/{id}/state"), None).await;
    assert_eq!(st["cycle"], 2);
    assert_eq!(st["locked_checksum"], checksum.as_str());
    assert!(st["board"].as_str().unwrap().contains("y=1"));
}

#[tokio::test]
async fn error_mid_cycle_reverts() {
    let app = memory_app();
    let id = create(&app, "level9").await;
    call(&app, "POST", &format!("/sessions/{id}/propose"), None).await;
    let (_, r) = call(&app, "POST", &format!("/sessions/{id}/signal"), Some(json!({ "type": "ok" }))).await;
    assert_eq!(r["phase"], "checksum_pending");
    let (status, r) =
        call(&app, "POST", &format!("/sessions/{id}/signal"), Some(json!({ "type": "error", "text": "no" }))).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(r["outcome"]["outcome"], "reverted");
    assert_eq!(r["reverted_checksum"], "J0");
    assert_eq!(r["phase"], "proposal_pending");
    let audit = &r["outcome"]["audit"];
    assert_eq!(audit["at_phase"], "checksum_pending");

    let (_, log) = call(&app, "GET", &format!("/sessions/{id}/log"), None).await;
    let entries = log.as_array().unwrap();
    assert_eq!(entries[0]["entry"], "start");
    let fap = entries.iter().find(|e| e["entry"] == "fap").unwrap();
    assert_eq!(fap["rule_id"], audit["rule_id"]);
    assert_eq!(fap["reverted_digest"], audit["reverted_digest"]);
}

#[tokio::test]
async fn rejections_and_bad_signals() {
    let app = memory_app();
    let id = create(&app, "level9").await;
    let (status, v) =
        call(&app, "POST", &format!("/sessions/{id}/propose"), Some(json!({ "move": "G1@P12(b=0)+90" }))).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(v["rule_id"], "AVP-first-row");
    let (status, _) = call(&app, "POST", &format!("/sessions/{id}/propose"), Some(json!({ "move": "G9@" }))).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    let (status, _) = call(&app, "POST", &format!("/sessions/{id}/signal"), Some(json!({ "type": "ok" }))).await;
    assert_eq!(status, StatusCode::CONFLICT);
    let (status, v) =
        call(&app, "POST", &format!("/sessions/{id}/signal"), Some(json!({ "type": "probe", "text": "?" }))).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(v["outcome"]["outcome"], "probe_answered");
    let (status, _) = call(&app, "GET", &format!("/sessions/{id}/proposal"), None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    let (status, _) = call(&app, "GET", "/sessions/00000000-0000-0000-0000-000000000000/state", None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn persisted_sessions_resume() {
    let dir = tempfile::tempdir().unwrap();
    let app = router(Arc::new(AppState::load(Store::open(dir.path()).unwrap()).unwrap()));
    let id = create(&app, "level9").await;
    for _ in 0..3 {
        call(&app, "POST", &format!("/sessions/{id}/propose"), None).await;
        for _ in 0..3 {
            call(&app, "POST", &format!("/sessions/{id}/signal"), Some(json!({ "type": "ok" }))).await;
        }
    }
    let (_, before) = call(&app, "GET", &format!("/sessions/{id}/state"), None).await;
    assert_eq!(before["cycle"], 4);

    let reloaded = router(Arc::new(AppState::load(Store::open(dir.path()).unwrap()).unwrap()));
    let (status, after) = call(&reloaded, "GET", &format!("/sessions/{id}/state"), None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(after["locked_state"], before["locked_state"]);
    assert_eq!(after["locked_digest"], before["locked_digest"]);
}

#[tokio::test]
async fn api_matches_library() {
    let app = memory_app();
    let id = create(&app, "level6-open").await;
    let mut lib = Session::start(&builtin_level("level6-open").unwrap(), SessionConfig::default()).unwrap();
    for _ in 0..4 {
        call(&app, "POST", &format!("/sessions/{id}/propose"), None).await;
        lib.propose().unwrap();
        call(&app, "POST", &format!("/sessions/{id}/signal"), Some(json!({ "type": "ok" }))).await;
        lib.signal(Signal::Ok).unwrap();
        lib.internal_checkpoint().unwrap();
        lib.execute_calculation().unwrap();
        for _ in 0..2 {
            call(&app, "POST", &format!("/sessions/{id}/signal"), Some(json!({ "type": "ok" }))).await;
            lib.signal(Signal::Ok).unwrap();
        }
    }
    let (_, st) = call(&app, "GET", &format!("/sessions/{id}/state"), None).await;
    assert_eq!(st["locked_digest"], lib.locked_digest());
}

#[tokio::test]
async fn concurrent_sessions_are_independent() {
    let app = memory_app();
    let ids: Vec<String> = create_many(&app, 4).await;
    let mut handles = Vec::new();
    for id in ids.clone() {
        let app = app.clone();
        handles.push(tokio::spawn(async move {
            call(&app, "POST", &format!("/sessions/{id}/propose"), None).await;
            call(&app, "POST", &format!("/sessions/{id}/signal"), Some(json!({ "type": "ok" }))).await;
            call(&app, "POST", &format!("/sessions/{id}/signal"), Some(json!({ "type": "ok" }))).await;
            call(&app, "GET", &format!("/sessions/{id}/state"), None).await.1
        }));
    }
    let mut digests = Vec::new();
    for h in handles {
        digests.push(h.await.unwrap()["locked_digest"].clone());
    }
    assert!(digests.windows(2).all(|w| w[0] == w[1]));
    let (_, list) = call(&app, "GET", "/sessions", None).await;
    assert_eq!(list.as_array().unwrap().len(), 4);
}

async fn create_many(app: &Router, n: usize) -> Vec<String> {
    let mut out = Vec::new();
    for _ in 0..n {
        out.push(create(app, "level9").await);
    }
    out
}
