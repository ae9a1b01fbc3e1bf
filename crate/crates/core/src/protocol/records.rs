//! Append-only session log entries, one JSON object per line.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::auditor::Discrepancy;
use super::Phase;
use crate::notation::ChecksumString;
use crate::rules::{GameState, Level, TurnReport};
use crate::strategist::{Justification, Proposal};

/// A supervisor input.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Signal {
    Ok,
    Error {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        text: Option<String>,
    },
    Probe {
        #[serde(default)]
        text: String,
    },
}

impl Signal {
    pub fn name(&self) -> &'static str {
        match self {
            Signal::Ok => "ok",
            Signal::Error { .. } => "error",
            Signal::Probe { .. } => "probe",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignalRecord {
    pub phase: Phase,
    pub signal: Signal,
    pub timestamp_ms: u64,
}

/// One completed gameplay cycle.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionRecord {
    pub cycle: u32,
    pub proposal: Proposal,
    pub signals: Vec<SignalRecord>,
    pub report: TurnReport,
    pub checksum: ChecksumString,
    /// Load checksum of the state this cycle started from.
    pub load_checksum: String,
    /// Canonical serialization of the locked final state.
    pub snapshot: String,
    pub digest: String,
    pub started_ms: u64,
    pub confirmed_ms: u64,
}

/// A proposal withdrawn at the internal checkpoint.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PspRetraction {
    pub cycle: u32,
    pub retracted: Proposal,
    pub corrected: Proposal,
    pub reason: String,
    pub timestamp_ms: u64,
}

/// Root-cause record of one rollback.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditRecord {
    pub cycle: u32,
    pub at_phase: Phase,
    pub annulled: Vec<String>,
    pub rule_id: String,
    pub narrative: Vec<String>,
    pub discrepancies: Vec<Discrepancy>,
    /// Checksum of the restored state; `None` when it is J0.
    pub reverted_to: Option<ChecksumString>,
    pub reverted_move: u32,
    pub reverted_digest: String,
    pub timestamp_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "entry", rename_all = "snake_case")]
pub enum LogEntry {
    Start { level: Level, load_checksum: String, snapshot: String, digest: String, timestamp_ms: u64 },
    Cycle(Box<SessionRecord>),
    Psp(Box<PspRetraction>),
    Fap(Box<AuditRecord>),
    Probe { cycle: u32, phase: Phase, text: String, answer: Option<Justification>, timestamp_ms: u64 },
    Rejection { cycle: u32, notation: String, rule_id: String, message: String, timestamp_ms: u64 },
}

impl LogEntry {
    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("log entries serialize")
    }

    pub fn from_line(line: &str) -> Result<LogEntry, serde_json::Error> {
        serde_json::from_str(line)
    }
}

/// JSON Lines rendering of a whole log.
pub fn to_json_lines(entries: &[LogEntry]) -> String {
    let mut out = String::new();
    for e in entries {
        out.push_str(&e.to_line());
        out.push('\n');
    }
    out
}

pub fn parse_json_lines(text: &str) -> Result<Vec<LogEntry>, serde_json::Error> {
    text.lines().filter(|l| !l.trim().is_empty()).map(LogEntry::from_line).collect()
}

/// Hex SHA-256 of a serialized snapshot.
pub fn digest(snapshot: &str) -> String {
    hex::encode(Sha256::digest(snapshot.as_bytes()))
}

/// Serialize a state and reload it, so later cycles only see the snapshot.
pub fn snapshot_round_trip(state: &GameState) -> (GameState, String, String) {
    let snapshot = state.to_canonical_json();
    let reloaded = GameState::from_canonical_json(&snapshot).expect("canonical snapshot reloads");
    let d = digest(&snapshot);
    (reloaded, snapshot, d)
}

pub fn now_ms() -> u64 {
    std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).map(|d| d.as_millis() as u64).unwrap_or(0)
}
