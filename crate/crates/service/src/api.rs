//! HTTP JSON API over live sessions.
//!
//! Each session sits behind its own mutex, so commands for one session are
//! applied one at a time while different sessions proceed independently.

use std::collections::HashMap;
use std::sync::Arc;

use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use capsicaps_core::notation::{format_load_checksum, parse_move, render_state, LevelFile};
use capsicaps_core::protocol::{
    CalculationOutcome, CheckpointOutcome, LogEntry, Phase, Session, SessionConfig, SessionError, Signal, SignalOutcome,
};
use capsicaps_core::rules::{GameState, TurnReport};
use capsicaps_core::strategist::Proposal;
use serde::{Deserialize, Serialize};
use serde_json::json;
use tokio::sync::{Mutex, RwLock};
use uuid::Uuid;

use crate::levels::builtin_level;
use crate::store::Store;
use crate::ServiceError;

pub struct AppState {
    sessions: RwLock<HashMap<Uuid, Arc<Mutex<Session>>>>,
    store: Option<Store>,
}

impl AppState {
    pub fn new(store: Option<Store>) -> AppState {
        AppState { sessions: RwLock::new(HashMap::new()), store }
    }

    /// Resume every session found in the store.
    pub fn load(store: Store) -> Result<AppState, ServiceError> {
        let mut sessions = HashMap::new();
        for (id, config, log) in store.load_all()? {
            let s = Session::resume(log, config)?;
            sessions.insert(id, Arc::new(Mutex::new(s)));
        }
        Ok(AppState { sessions: RwLock::new(sessions), store: Some(store) })
    }

    pub async fn session_ids(&self) -> Vec<Uuid> {
        let mut ids: Vec<_> = self.sessions.read().await.keys().copied().collect();
        ids.sort();
        ids
    }

    /// Write every session log to the store.
    pub async fn flush(&self) -> Result<(), ServiceError> {
        let Some(store) = &self.store else { return Ok(()) };
        for (id, s) in self.sessions.read().await.iter() {
            store.save_log(*id, s.lock().await.log())?;
        }
        Ok(())
    }

    async fn get(&self, id: Uuid) -> Result<Arc<Mutex<Session>>, ApiError> {
        self.sessions.read().await.get(&id).cloned().ok_or(ApiError::NotFound(id))
    }

    fn persist(&self, id: Uuid, session: &Session) -> Result<(), ApiError> {
        match &self.store {
            Some(store) => store.save_log(id, session.log()).map_err(ApiError::Storage),
            None => Ok(()),
        }
    }
}

#[derive(Debug)]
pub enum ApiError {
    NotFound(Uuid),
    BadRequest(String),
    Session(SessionError),
    Storage(ServiceError),
}

impl From<SessionError> for ApiError {
    fn from(e: SessionError) -> Self {
        ApiError::Session(e)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let (status, body) = match self {
            ApiError::NotFound(id) => (StatusCode::NOT_FOUND, json!({ "error": format!("no session {id}") })),
            ApiError::BadRequest(m) => (StatusCode::BAD_REQUEST, json!({ "error": m })),
            ApiError::Storage(e) => (StatusCode::INTERNAL_SERVER_ERROR, json!({ "error": e.to_string() })),
            ApiError::Session(e) => {
                let status = match &e {
                    SessionError::IllegalSignal { .. } | SessionError::WrongPhase { .. } => StatusCode::CONFLICT,
                    SessionError::Rejected { .. } | SessionError::Strategy(_) => StatusCode::UNPROCESSABLE_ENTITY,
                    SessionError::Notation(_) | SessionError::Rule(_) => StatusCode::BAD_REQUEST,
                    SessionError::Corrupt(_) => StatusCode::INTERNAL_SERVER_ERROR,
                };
                let rule_id = match &e {
                    SessionError::Rejected { rule_id, .. } => Some(rule_id.clone()),
                    SessionError::Rule(r) => Some(r.rule_id().to_string()),
                    _ => None,
                };
                (status, json!({ "error": e.to_string(), "rule_id": rule_id }))
            }
        };
        (status, Json(body)).into_response()
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CreateSession {
    /// A built-in level, by name or number.
    #[serde(default)]
    pub level_id: Option<String>,
    /// An inline level definition; takes precedence over `level_id`.
    #[serde(default)]
    pub level: Option<LevelFile>,
    #[serde(default)]
    pub config: Option<SessionConfig>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Created {
    pub session_id: Uuid,
    pub phase: Phase,
    pub load_checksum: String,
    pub j0_state: GameState,
    pub board: String,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct StateView {
    pub session_id: Uuid,
    pub phase: Phase,
    pub cycle: u32,
    pub locked_checksum: Option<String>,
    pub locked_digest: String,
    pub locked_state: GameState,
    /// Text rendering of the locked state's tables and board.
    pub board: String,
    pub proposal: Option<Proposal>,
    pub report: Option<TurnReport>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProposeRequest {
    /// A specific move in notation; otherwise the strategist chooses.
    #[serde(default, rename = "move")]
    pub mv: Option<String>,
}

/// What a signal did, including the automatic steps that follow an
/// approved proposal (checkpoint, then calculation).
#[derive(Debug, Serialize, Deserialize)]
pub struct SignalResponse {
    pub outcome: SignalOutcome,
    pub checkpoint: Option<CheckpointOutcome>,
    pub calculation: Option<CalculationOutcome>,
    pub phase: Phase,
    pub locked_checksum: Option<String>,
    /// Set when the signal caused a rollback: the checksum restored to, or
    /// `J0` when no cycle had been confirmed yet.
    pub reverted_checksum: Option<String>,
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/sessions", post(create_session).get(list_sessions))
        .route("/sessions/{id}/state", get(get_state))
        .route("/sessions/{id}/proposal", get(get_proposal))
        .route("/sessions/{id}/propose", post(propose))
        .route("/sessions/{id}/signal", post(signal))
        .route("/sessions/{id}/log", get(get_log))
        .with_state(state)
}

fn view(id: Uuid, s: &Session) -> StateView {
    let checksum = s.locked_checksum().map(|c| c.to_string());
    StateView {
        session_id: id,
        phase: s.phase(),
        cycle: s.cycle(),
        board: render_state(s.locked_state(), checksum.as_deref()),
        locked_checksum: checksum,
        locked_digest: s.locked_digest().to_string(),
        locked_state: s.locked_state().clone(),
        proposal: s.proposal().cloned(),
        report: s.report().cloned(),
    }
}

async fn create_session(
    State(app): State<Arc<AppState>>,
    body: Option<Json<CreateSession>>,
) -> Result<(StatusCode, Json<Created>), ApiError> {
    let req = body.map(|Json(b)| b).unwrap_or_default();
    let level = match (req.level, req.level_id) {
        (Some(file), _) => file.to_level().map_err(|e| ApiError::BadRequest(e.to_string()))?,
        (None, Some(id)) => builtin_level(&id).ok_or_else(|| ApiError::BadRequest(format!("unknown level {id}")))?,
        (None, None) => builtin_level("level9").expect("built-in level"),
    };
    let config = req.config.unwrap_or_default();
    let session = Session::start(&level, config.clone())?;
    let id = Uuid::new_v4();
    if let Some(store) = &app.store {
        store.save_config(id, &config).map_err(ApiError::Storage)?;
    }
    app.persist(id, &session)?;
    let created = Created {
        session_id: id,
        phase: session.phase(),
        load_checksum: format_load_checksum(session.locked_state()),
        j0_state: session.locked_state().clone(),
        board: render_state(session.locked_state(), None),
    };
    app.sessions.write().await.insert(id, Arc::new(Mutex::new(session)));
    Ok((StatusCode::CREATED, Json(created)))
}

async fn list_sessions(State(app): State<Arc<AppState>>) -> Json<Vec<Uuid>> {
    Json(app.session_ids().await)
}

async fn get_state(State(app): State<Arc<AppState>>, Path(id): Path<Uuid>) -> Result<Json<StateView>, ApiError> {
    let s = app.get(id).await?;
    let s = s.lock().await;
    Ok(Json(view(id, &s)))
}

async fn get_proposal(State(app): State<Arc<AppState>>, Path(id): Path<Uuid>) -> Result<Response, ApiError> {
    let s = app.get(id).await?;
    let s = s.lock().await;
    Ok(match s.proposal() {
        Some(p) => Json(p.clone()).into_response(),
        None => (StatusCode::NOT_FOUND, Json(json!({ "error": "no proposal pending" }))).into_response(),
    })
}

async fn propose(
    State(app): State<Arc<AppState>>,
    Path(id): Path<Uuid>,
    body: Option<Json<ProposeRequest>>,
) -> Result<Json<Proposal>, ApiError> {
    let req = body.map(|Json(b)| b).unwrap_or_default();
    let s = app.get(id).await?;
    let mut s = s.lock().await;
    let result = match req.mv {
        Some(text) => {
            let mv = parse_move(&text).map_err(|e| ApiError::BadRequest(e.to_string()))?;
            s.propose_move(mv).cloned()
        }
        None => s.propose().cloned(),
    };
    // Rejections are logged, so persist either way.
    app.persist(id, &s)?;
    Ok(Json(result?))
}

async fn signal(
    State(app): State<Arc<AppState>>,
    Path(id): Path<Uuid>,
    Json(sig): Json<Signal>,
) -> Result<Json<SignalResponse>, ApiError> {
    let s = app.get(id).await?;
    let mut s = s.lock().await;
    let outcome = s.signal(sig)?;
    let mut checkpoint = None;
    let mut calculation = None;
    if outcome == SignalOutcome::ProposalApproved {
        let c = s.internal_checkpoint()?;
        if c == CheckpointOutcome::Passed {
            calculation = Some(s.execute_calculation()?);
        }
        checkpoint = Some(c);
    }
    let reverted = |a: &capsicaps_core::protocol::AuditRecord| {
        a.reverted_to.as_ref().map(|c| c.to_string()).unwrap_or_else(|| "J0".into())
    };
    let reverted_checksum = match (&outcome, &checkpoint, &calculation) {
        (SignalOutcome::Reverted { audit }, _, _)
        | (_, Some(CheckpointOutcome::Reverted { audit }), _)
        | (_, _, Some(CalculationOutcome::Reverted { audit })) => Some(reverted(audit)),
        _ => None,
    };
    app.persist(id, &s)?;
    Ok(Json(SignalResponse {
        outcome,
        checkpoint,
        calculation,
        phase: s.phase(),
        locked_checksum: s.locked_checksum().map(|c| c.to_string()),
        reverted_checksum,
    }))
}

async fn get_log(State(app): State<Arc<AppState>>, Path(id): Path<Uuid>) -> Result<Json<Vec<LogEntry>>, ApiError> {
    let s = app.get(id).await?;
    let s = s.lock().await;
    Ok(Json(s.log().to_vec()))
}
