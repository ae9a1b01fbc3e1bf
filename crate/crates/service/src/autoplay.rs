//! Strategist-driven play with an always-approving supervisor.

use capsicaps_core::protocol::{AutoOutcome, LogEntry, Session, SessionConfig, SessionError};
use capsicaps_core::rules::Level;
use capsicaps_core::strategist::StrategyError;
use serde::{Deserialize, Serialize};

use crate::ServiceError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AutoplayOutcome {
    Victory,
    /// No legal move is left while some mouse is still on the board.
    Stalemate,
    MaxMoves,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AutoplayResult {
    pub outcome: AutoplayOutcome,
    pub moves_played: u32,
    pub checksums: Vec<String>,
    pub log: Vec<LogEntry>,
}

pub fn cli_autoplay(level: &Level, config: SessionConfig, max_moves: u32) -> Result<AutoplayResult, ServiceError> {
    let mut session = Session::start(level, config)?;
    let mut checksums = Vec::new();
    let mut outcome = AutoplayOutcome::MaxMoves;
    for _ in 0..max_moves {
        if session.locked_state().all_exited() {
            break;
        }
        match session.auto_cycle(None) {
            Ok(AutoOutcome::Confirmed { checksum, .. }) => checksums.push(checksum.to_string()),
            Ok(AutoOutcome::Rejected { rule_id, message }) => {
                return Err(ServiceError::Invalid(format!(
                    "strategist proposed an illegal move ({rule_id}): {message}"
                )))
            }
            Ok(AutoOutcome::Reverted { audit }) => {
                return Err(ServiceError::Invalid(format!("cycle {} reverted: {}", audit.cycle, audit.rule_id)))
            }
            Err(SessionError::Strategy(StrategyError::NoLegalMove)) => {
                outcome = AutoplayOutcome::Stalemate;
                break;
            }
            Err(e) => return Err(e.into()),
        }
    }
    if session.locked_state().all_exited() {
        outcome = AutoplayOutcome::Victory;
    }
    Ok(AutoplayResult {
        outcome,
        moves_played: session.locked_state().move_number,
        checksums,
        log: session.log().to_vec(),
    })
}
