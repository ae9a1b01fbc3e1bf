//! Session logs on disk: `<id>.jsonl` plus `<id>.config.json`.

use std::path::{Path, PathBuf};

use capsicaps_core::protocol::{parse_json_lines, to_json_lines, LogEntry, SessionConfig};
use uuid::Uuid;

use crate::ServiceError;

#[derive(Debug, Clone)]
pub struct Store {
    dir: PathBuf,
}

impl Store {
    /// Open (and create if needed) a data directory.
    pub fn open(dir: impl Into<PathBuf>) -> Result<Store, ServiceError> {
        let dir = dir.into();
        std::fs::create_dir_all(&dir).map_err(|e| ServiceError::io(&dir, e))?;
        Ok(Store { dir })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn log_path(&self, id: Uuid) -> PathBuf {
        self.dir.join(format!("{id}.jsonl"))
    }

    fn config_path(&self, id: Uuid) -> PathBuf {
        self.dir.join(format!("{id}.config.json"))
    }

    fn write_atomic(path: &Path, text: &str) -> Result<(), ServiceError> {
        let tmp = path.with_extension("tmp");
        std::fs::write(&tmp, text).map_err(|e| ServiceError::io(&tmp, e))?;
        std::fs::rename(&tmp, path).map_err(|e| ServiceError::io(path, e))
    }

    pub fn save_config(&self, id: Uuid, config: &SessionConfig) -> Result<(), ServiceError> {
        let text = serde_json::to_string_pretty(config).expect("config serializes");
        Self::write_atomic(&self.config_path(id), &text)
    }

    pub fn save_log(&self, id: Uuid, log: &[LogEntry]) -> Result<(), ServiceError> {
        Self::write_atomic(&self.log_path(id), &to_json_lines(log))
    }

    /// Every stored session, in no particular order.
    pub fn load_all(&self) -> Result<Vec<(Uuid, SessionConfig, Vec<LogEntry>)>, ServiceError> {
        let mut out = Vec::new();
        let entries = std::fs::read_dir(&self.dir).map_err(|e| ServiceError::io(&self.dir, e))?;
        for entry in entries {
            let path = entry.map_err(|e| ServiceError::io(&self.dir, e))?.path();
            let Some(name) = path.file_name().and_then(|n| n.to_str()) else { continue };
            let Some(stem) = name.strip_suffix(".jsonl") else { continue };
            let Ok(id) = Uuid::parse_str(stem) else { continue };
            let text = std::fs::read_to_string(&path).map_err(|e| ServiceError::io(&path, e))?;
            let log = parse_json_lines(&text).map_err(|e| ServiceError::Invalid(format!("{}: {e}", path.display())))?;
            let config = match std::fs::read_to_string(self.config_path(id)) {
                Ok(t) => serde_json::from_str(&t)
                    .map_err(|e| ServiceError::Invalid(format!("{}: {e}", self.config_path(id).display())))?,
                Err(_) => SessionConfig::default(),
            };
            out.push((id, config, log));
        }
        Ok(out)
    }
}
