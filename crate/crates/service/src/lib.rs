//! Command-line verification and autoplay, session persistence and the HTTP
//! API used by the supervisor console.

pub mod api;
pub mod autoplay;
pub mod levels;
pub mod store;
pub mod verify;

use std::path::{Path, PathBuf};
use std::sync::Arc;

use capsicaps_core::notation::NotationError;
use capsicaps_core::protocol::SessionError;
use thiserror::Error;

pub use autoplay::{cli_autoplay, AutoplayOutcome, AutoplayResult};
pub use verify::{cli_verify, load_fixtures, FixtureComparison, MoveResult, MoveStatus, VerificationResult};

/// Overrides the data directory of `serve`.
pub const DATA_DIR_ENV: &str = "CAPSICAPS_DATA";

#[derive(Debug, Error)]
pub enum ServiceError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Parse { path: PathBuf, source: NotationError },
    #[error(transparent)]
    Session(#[from] SessionError),
    #[error("{0}")]
    Invalid(String),
}

impl ServiceError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        ServiceError::Io { path: path.to_path_buf(), source }
    }

    pub fn parse(path: &Path, source: NotationError) -> Self {
        ServiceError::Parse { path: path.to_path_buf(), source }
    }
}

/// Read a level file, falling back to a built-in level name.
pub fn read_level(name_or_path: &str) -> Result<capsicaps_core::rules::Level, ServiceError> {
    let path = Path::new(name_or_path);
    if path.exists() {
        let text = std::fs::read_to_string(path).map_err(|e| ServiceError::io(path, e))?;
        return capsicaps_core::notation::parse_level(&text).map_err(|e| ServiceError::parse(path, e));
    }
    levels::builtin_level(name_or_path)
        .ok_or_else(|| ServiceError::Invalid(format!("no level file or built-in level '{name_or_path}'")))
}

pub fn read_log(path: &Path) -> Result<capsicaps_core::notation::GameLog, ServiceError> {
    let text = std::fs::read_to_string(path).map_err(|e| ServiceError::io(path, e))?;
    capsicaps_core::notation::parse_game_log(&text).map_err(|e| ServiceError::parse(path, e))
}

/// Serve the API on `bind` until Ctrl-C, persisting sessions under `data_dir`.
pub async fn serve(bind: &str, data_dir: &Path) -> Result<(), ServiceError> {
    let store = store::Store::open(data_dir)?;
    let state = Arc::new(api::AppState::load(store)?);
    let listener =
        tokio::net::TcpListener::bind(bind).await.map_err(|e| ServiceError::Invalid(format!("bind {bind}: {e}")))?;
    let app = api::router(state.clone());
    axum::serve(listener, app)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
        .map_err(|e| ServiceError::Invalid(format!("server: {e}")))?;
    state.flush().await
}
