//! Replay a game log through the supervised cycle and compare the results
//! with golden state dumps.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use capsicaps_core::notation::{format_move, parse_state_tables, GameLog, StateTables};
use capsicaps_core::protocol::{AutoOutcome, Session, SessionConfig};
use capsicaps_core::rules::{GameState, Level, MouseStatus};
use capsicaps_core::strategist::{evaluate_proposal, FullSimulation};
use serde::{Deserialize, Serialize};

use crate::ServiceError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum MoveStatus {
    Legal {
        checksum: String,
    },
    Illegal {
        rule: String,
        message: String,
    },
    FixtureMismatch {
        checksum: String,
        diff: Vec<String>,
    },
    /// Not replayed because an earlier move failed.
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MoveResult {
    pub index: u32,
    pub notation: String,
    #[serde(flatten)]
    pub status: MoveStatus,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixtureComparison {
    pub move_number: u32,
    pub matched: bool,
    pub diff: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationResult {
    pub log_id: String,
    pub moves: Vec<MoveResult>,
    pub fixtures: Vec<FixtureComparison>,
    /// `M<id>: <status>` for every mouse after the last replayed move.
    pub final_mice: Vec<String>,
    pub findings: Vec<String>,
    pub passed: bool,
    pub elapsed_ms: u64,
}

impl VerificationResult {
    pub fn legal_moves(&self) -> usize {
        self.moves.iter().filter(|m| !matches!(m.status, MoveStatus::Illegal { .. } | MoveStatus::Skipped)).count()
    }

    /// Human-readable report. Everything except the timing line is
    /// deterministic.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "log: {}", self.log_id);
        for m in &self.moves {
            let line = match &m.status {
                MoveStatus::Legal { checksum } => format!("ok       {checksum}"),
                MoveStatus::Illegal { rule, message } => format!("ILLEGAL  {rule}: {message}"),
                MoveStatus::FixtureMismatch { checksum, diff } => {
                    format!(
                        "MISMATCH {checksum}\n{}",
                        diff.iter().map(|d| format!("           {d}")).collect::<Vec<_>>().join("\n")
                    )
                }
                MoveStatus::Skipped => "skipped".into(),
            };
            let _ = writeln!(out, "J{:<3} {:<28} {line}", m.index, m.notation);
        }
        let matched = self.fixtures.iter().filter(|f| f.matched).count();
        let _ = writeln!(out, "fixtures: {matched}/{} matched", self.fixtures.len());
        for f in self.fixtures.iter().filter(|f| !f.matched) {
            let _ = writeln!(out, "  J{}: {}", f.move_number, f.diff.join("; "));
        }
        let _ = writeln!(out, "final mice: {}", self.final_mice.join(", "));
        for f in &self.findings {
            let _ = writeln!(out, "finding: {f}");
        }
        let _ = writeln!(out, "result: {}", if self.passed { "PASS" } else { "FAIL" });
        let _ = writeln!(out, "elapsed: {} ms", self.elapsed_ms);
        out
    }
}

/// Read every `J<n>.state` file in `dir`, keyed by move number.
pub fn load_fixtures(dir: &Path) -> Result<BTreeMap<u32, StateTables>, ServiceError> {
    let mut out = BTreeMap::new();
    let entries = std::fs::read_dir(dir).map_err(|e| ServiceError::io(dir, e))?;
    for entry in entries {
        let path = entry.map_err(|e| ServiceError::io(dir, e))?.path();
        if path.extension().and_then(|e| e.to_str()) != Some("state") {
            continue;
        }
        let text = std::fs::read_to_string(&path).map_err(|e| ServiceError::io(&path, e))?;
        let tables = parse_state_tables(&text).map_err(|e| ServiceError::parse(&path, e))?;
        let n = tables.move_number.ok_or_else(|| ServiceError::Invalid(format!("{}: no Move line", path.display())))?;
        out.insert(n, tables);
    }
    Ok(out)
}

fn mouse_line(state: &GameState) -> Vec<String> {
    state
        .mice
        .iter()
        .map(|m| {
            let s = match m.status {
                MouseStatus::Waiting => "waiting".to_string(),
                MouseStatus::InPlay { cell, base } => format!("{cell} base {}", base.degrees()),
                MouseStatus::Victory { cell } => format!("exited ({cell})"),
            };
            format!("M{}: {s}", m.id)
        })
        .collect()
}

/// Replay `log` on `level` with automatic approvals, comparing against
/// `fixtures` at their move numbers.
pub fn cli_verify(level: &Level, log: &GameLog, fixtures: &BTreeMap<u32, StateTables>) -> VerificationResult {
    let started = Instant::now();
    let config = SessionConfig::default();
    let mut session = Session::start(level, config.clone()).expect("level validated by the caller");
    let mut moves = Vec::with_capacity(log.moves.len());
    let mut comparisons = BTreeMap::new();
    let mut failed = false;
    for (i, m) in log.moves.iter().enumerate() {
        let index = m.index.unwrap_or(i as u32 + 1);
        let notation = format_move(&m.mv);
        if failed {
            moves.push(MoveResult { index, notation, status: MoveStatus::Skipped });
            continue;
        }
        let proposal = evaluate_proposal(session.locked_state(), &m.mv, &config.strategy, &FullSimulation);
        let status = match session.auto_cycle(Some(proposal)) {
            Ok(AutoOutcome::Confirmed { checksum, report, .. }) => {
                let checksum = checksum.to_string();
                match fixtures.get(&report.move_number) {
                    None => MoveStatus::Legal { checksum },
                    Some(f) => {
                        let mut diff = f.diff(&report.final_state);
                        if let Some(expected) = &f.checksum {
                            if *expected != checksum {
                                diff.push(format!("checksum expected {expected} got {checksum}"));
                            }
                        }
                        comparisons.insert(
                            report.move_number,
                            FixtureComparison {
                                move_number: report.move_number,
                                matched: diff.is_empty(),
                                diff: diff.clone(),
                            },
                        );
                        if diff.is_empty() {
                            MoveStatus::Legal { checksum }
                        } else {
                            MoveStatus::FixtureMismatch { checksum, diff }
                        }
                    }
                }
            }
            Ok(AutoOutcome::Rejected { rule_id, message }) => MoveStatus::Illegal { rule: rule_id, message },
            Ok(AutoOutcome::Reverted { audit }) => {
                MoveStatus::Illegal { rule: audit.rule_id.clone(), message: audit.narrative.join("; ") }
            }
            Err(e) => MoveStatus::Illegal { rule: "session".into(), message: e.to_string() },
        };
        if matches!(status, MoveStatus::Illegal { .. }) {
            failed = true;
        }
        moves.push(MoveResult { index, notation, status });
    }
    for &n in fixtures.keys() {
        comparisons.entry(n).or_insert_with(|| FixtureComparison {
            move_number: n,
            matched: false,
            diff: vec![format!("move J{n} was never reached")],
        });
    }
    let fin = session.locked_state();
    let mut findings = Vec::new();
    if !fin.all_exited() {
        let out = fin.mice.iter().filter(|m| m.has_exited()).count();
        findings.push(format!("replay ends at J{} with {out} of {} mice exited", fin.move_number, fin.mice.len()));
    }
    if let Some(bad) = moves.iter().find(|m| matches!(m.status, MoveStatus::Illegal { .. })) {
        if let MoveStatus::Illegal { rule, .. } = &bad.status {
            findings.push(format!("J{} {} is illegal ({rule})", bad.index, bad.notation));
        }
    }
    let fixtures: Vec<_> = comparisons.into_values().collect();
    let passed =
        moves.iter().all(|m| matches!(m.status, MoveStatus::Legal { .. })) && fixtures.iter().all(|f| f.matched);
    VerificationResult {
        log_id: log.title.clone().unwrap_or_else(|| format!("level {}", level.id)),
        moves,
        fixtures,
        final_mice: mouse_line(fin),
        findings,
        passed,
        elapsed_ms: started.elapsed().as_millis() as u64,
    }
}
