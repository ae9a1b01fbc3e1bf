//! The gated gameplay cycle.
//!
//! ```text
//! ProposalPending --Ok--> InternalCheckpoint --pass--> CalculationPending
//!        ^                      | retraction                 | concordance
//!        |<---------------------+                            v
//!        |<--Ok-- Locked <--Ok (confirm checksum)-- ChecksumPending
//! ```
//!
//! An `Error` signal in any phase rolls back to the locked snapshot.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::auditor::{self, event_set, AuditVerdict, Discrepancy};
use super::records::{
    digest, now_ms, snapshot_round_trip, AuditRecord, LogEntry, PspRetraction, SessionRecord, Signal, SignalRecord,
};
use crate::notation::{format_checksum, format_load_checksum, format_move, ChecksumString, NotationError};
use crate::rules::{apply_move, check_move, GameState, Level, Move, RuleError, TurnReport};
use crate::strategist::{
    evaluate_proposal, FullSimulation, Justification, Predictor, Proposal, Strategist, StrategyConfig,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    AwaitingStart,
    ProposalPending,
    InternalCheckpoint,
    CalculationPending,
    ChecksumPending,
    Locked,
    Reverting,
}

/// Rule id used when no check explains a supervisor error.
pub const CAUSE_UNDETERMINED: &str = "supervisor-flagged, cause undetermined";

/// The primary turn evaluator. Tests inject faulty ones.
pub trait Evaluator: Send + Sync {
    fn evaluate(&self, state: &GameState, mv: &Move) -> Result<TurnReport, RuleError>;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct KernelEvaluator;

impl Evaluator for KernelEvaluator {
    fn evaluate(&self, state: &GameState, mv: &Move) -> Result<TurnReport, RuleError> {
        apply_move(state, mv)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SessionConfig {
    /// Reject illegal placements at submission time.
    pub avp_enabled: bool,
    /// Evaluations tried before a persistent discrepancy becomes a hard fault.
    pub max_avm_attempts: u32,
    pub strategy: StrategyConfig,
}

impl Default for SessionConfig {
    fn default() -> Self {
        SessionConfig { avp_enabled: true, max_avm_attempts: 3, strategy: StrategyConfig::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SessionError {
    #[error("signal '{signal}' is not accepted in phase {phase:?}")]
    IllegalSignal { signal: &'static str, phase: Phase },
    #[error("{operation} requires another phase (current: {phase:?})")]
    WrongPhase { operation: &'static str, phase: Phase },
    #[error("proposal rejected ({rule_id}): {message}")]
    Rejected { rule_id: String, message: String },
    #[error(transparent)]
    Strategy(#[from] crate::strategist::StrategyError),
    #[error(transparent)]
    Notation(#[from] NotationError),
    #[error(transparent)]
    Rule(#[from] RuleError),
    #[error("corrupt session log: {0}")]
    Corrupt(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum SignalOutcome {
    /// Proposal approved; the internal checkpoint is next.
    ProposalApproved,
    /// Report approved and the checksum confirmed.
    ChecksumConfirmed {
        checksum: ChecksumString,
    },
    /// Save point acknowledged; a new cycle starts.
    NextCycle {
        cycle: u32,
    },
    Reverted {
        audit: Box<AuditRecord>,
    },
    ProbeAnswered {
        answer: Option<Justification>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum CheckpointOutcome {
    Passed,
    Retracted { retraction: Box<PspRetraction> },
    Reverted { audit: Box<AuditRecord> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum CalculationOutcome {
    Concordant { report: Box<TurnReport>, attempts: u32 },
    Reverted { audit: Box<AuditRecord> },
}

/// Result of driving one whole cycle with automatic approvals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AutoOutcome {
    Confirmed { checksum: ChecksumString, report: Box<TurnReport>, retractions: usize },
    Rejected { rule_id: String, message: String },
    Reverted { audit: Box<AuditRecord> },
}

pub struct Session {
    config: SessionConfig,
    level: Level,
    phase: Phase,
    locked_state: GameState,
    locked_snapshot: String,
    locked_digest: String,
    locked_checksum: Option<ChecksumString>,
    proposal: Option<Proposal>,
    report: Option<TurnReport>,
    signals: Vec<SignalRecord>,
    cycle_started_ms: u64,
    log: Vec<LogEntry>,
    evaluator: Box<dyn Evaluator>,
    strategist: Strategist,
}

impl std::fmt::Debug for Session {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Session")
            .field("phase", &self.phase)
            .field("cycle", &self.cycle())
            .field("locked_digest", &self.locked_digest)
            .finish_non_exhaustive()
    }
}

impl Session {
    /// Build J0 from the level definition and open cycle 1.
    pub fn start(level: &Level, config: SessionConfig) -> Result<Session, SessionError> {
        let initial = GameState::initial(level)?;
        let (locked_state, snapshot, d) = snapshot_round_trip(&initial);
        let now = now_ms();
        let strategist = Strategist::new(config.strategy.clone());
        let mut session = Session {
            config,
            level: level.clone(),
            phase: Phase::AwaitingStart,
            locked_state,
            locked_snapshot: snapshot.clone(),
            locked_digest: d.clone(),
            locked_checksum: None,
            proposal: None,
            report: None,
            signals: Vec::new(),
            cycle_started_ms: now,
            log: Vec::new(),
            evaluator: Box::new(KernelEvaluator),
            strategist,
        };
        session.log.push(LogEntry::Start {
            level: level.clone(),
            load_checksum: format_load_checksum(&session.locked_state),
            snapshot,
            digest: d,
            timestamp_ms: now,
        });
        session.phase = Phase::ProposalPending;
        Ok(session)
    }

    /// Continue a session from its log: the last confirmed snapshot becomes
    /// the locked state and a fresh cycle opens.
    pub fn resume(entries: Vec<LogEntry>, config: SessionConfig) -> Result<Session, SessionError> {
        let corrupt = |m: &str| SessionError::Corrupt(m.to_string());
        let Some(LogEntry::Start { level, snapshot, digest: d0, .. }) = entries.first() else {
            return Err(corrupt("log does not begin with a start entry"));
        };
        let mut snap = (snapshot.clone(), d0.clone(), None);
        for e in &entries {
            match e {
                LogEntry::Cycle(r) => snap = (r.snapshot.clone(), r.digest.clone(), Some(r.checksum.clone())),
                LogEntry::Start { .. } if !std::ptr::eq(e, &entries[0]) => return Err(corrupt("second start entry")),
                _ => {}
            }
        }
        if digest(&snap.0) != snap.1 {
            return Err(corrupt("snapshot digest mismatch"));
        }
        let state = GameState::from_canonical_json(&snap.0).map_err(|e| SessionError::Corrupt(e.to_string()))?;
        state.check_invariants().map_err(|v| SessionError::Corrupt(v.to_string()))?;
        let strategist = Strategist::new(config.strategy.clone());
        Ok(Session {
            config,
            level: level.clone(),
            phase: Phase::ProposalPending,
            locked_state: state,
            locked_snapshot: snap.0,
            locked_digest: snap.1,
            locked_checksum: snap.2,
            proposal: None,
            report: None,
            signals: Vec::new(),
            cycle_started_ms: now_ms(),
            log: entries,
            evaluator: Box::new(KernelEvaluator),
            strategist,
        })
    }

    pub fn with_evaluator(mut self, evaluator: Box<dyn Evaluator>) -> Self {
        self.evaluator = evaluator;
        self
    }

    pub fn with_predictor(mut self, predictor: Box<dyn Predictor>) -> Self {
        self.strategist = Strategist::with_predictor(self.config.strategy.clone(), predictor);
        self
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    /// Number of the cycle in progress; cycle `n` produces move `Jn`.
    pub fn cycle(&self) -> u32 {
        self.locked_state.move_number + 1
    }

    pub fn level(&self) -> &Level {
        &self.level
    }

    pub fn config(&self) -> &SessionConfig {
        &self.config
    }

    pub fn locked_state(&self) -> &GameState {
        &self.locked_state
    }

    pub fn locked_snapshot(&self) -> &str {
        &self.locked_snapshot
    }

    pub fn locked_digest(&self) -> &str {
        &self.locked_digest
    }

    pub fn locked_checksum(&self) -> Option<&ChecksumString> {
        self.locked_checksum.as_ref()
    }

    pub fn proposal(&self) -> Option<&Proposal> {
        self.proposal.as_ref()
    }

    pub fn report(&self) -> Option<&TurnReport> {
        self.report.as_ref()
    }

    pub fn log(&self) -> &[LogEntry] {
        &self.log
    }

    fn require(&self, operation: &'static str, phase: Phase) -> Result<(), SessionError> {
        if self.phase == phase {
            Ok(())
        } else {
            Err(SessionError::WrongPhase { operation, phase: self.phase })
        }
    }

    /// Ask the strategist for a proposal and submit it.
    pub fn propose(&mut self) -> Result<&Proposal, SessionError> {
        self.require("propose", Phase::ProposalPending)?;
        let p = self.strategist.select(&self.locked_state)?;
        self.submit_proposal(p)?;
        Ok(self.proposal.as_ref().expect("just submitted"))
    }

    /// Submit a specific move, scored and declared by the session's strategist.
    pub fn propose_move(&mut self, mv: Move) -> Result<&Proposal, SessionError> {
        self.require("propose", Phase::ProposalPending)?;
        let p = evaluate_proposal(&self.locked_state, &mv, &self.strategist.config, self.strategist.predictor());
        self.submit_proposal(p)?;
        Ok(self.proposal.as_ref().expect("just submitted"))
    }

    /// Record a proposal for gate B, after the adjacency and phase pre-filter.
    pub fn submit_proposal(&mut self, p: Proposal) -> Result<(), SessionError> {
        self.require("submit_proposal", Phase::ProposalPending)?;
        if self.config.avp_enabled {
            if let Err(e) = check_move(&self.locked_state, &p.mv) {
                let (rule_id, message) = (e.rule_id().to_string(), e.to_string());
                self.log.push(LogEntry::Rejection {
                    cycle: self.cycle(),
                    notation: format_move(&p.mv),
                    rule_id: rule_id.clone(),
                    message: message.clone(),
                    timestamp_ms: now_ms(),
                });
                return Err(SessionError::Rejected { rule_id, message });
            }
        }
        self.proposal = Some(p);
        Ok(())
    }

    pub fn signal(&mut self, signal: Signal) -> Result<SignalOutcome, SessionError> {
        let record = SignalRecord { phase: self.phase, signal: signal.clone(), timestamp_ms: now_ms() };
        match signal {
            Signal::Probe { text } => {
                let answer = self.proposal.as_ref().map(|p| p.justification.clone());
                self.signals.push(record);
                self.log.push(LogEntry::Probe {
                    cycle: self.cycle(),
                    phase: self.phase,
                    text,
                    answer: answer.clone(),
                    timestamp_ms: now_ms(),
                });
                Ok(SignalOutcome::ProbeAnswered { answer })
            }
            Signal::Error { text } => {
                if self.phase == Phase::Reverting || self.phase == Phase::AwaitingStart {
                    return Err(SessionError::IllegalSignal { signal: "error", phase: self.phase });
                }
                self.signals.push(record);
                let audit = self.fap_revert(text, None);
                Ok(SignalOutcome::Reverted { audit: Box::new(audit) })
            }
            Signal::Ok => match self.phase {
                Phase::ProposalPending if self.proposal.is_some() => {
                    self.signals.push(record);
                    self.phase = Phase::InternalCheckpoint;
                    Ok(SignalOutcome::ProposalApproved)
                }
                Phase::ChecksumPending => {
                    self.signals.push(record);
                    let checksum = self.confirm_checksum()?;
                    Ok(SignalOutcome::ChecksumConfirmed { checksum })
                }
                Phase::Locked => {
                    self.phase = Phase::ProposalPending;
                    self.cycle_started_ms = now_ms();
                    Ok(SignalOutcome::NextCycle { cycle: self.cycle() })
                }
                phase => Err(SessionError::IllegalSignal { signal: "ok", phase }),
            },
        }
    }

    /// Verify the approved proposal's declared events before any calculation.
    pub fn internal_checkpoint(&mut self) -> Result<CheckpointOutcome, SessionError> {
        self.require("internal_checkpoint", Phase::InternalCheckpoint)?;
        let p = self.proposal.clone().expect("gate B requires a proposal");
        let verified = match auditor::simulate(&self.locked_state, &p.mv) {
            Ok(o) => o.events,
            Err(rule) => {
                let narrative = vec![format!("proposal {} is illegal in the locked state", format_move(&p.mv))];
                let audit = self.fap_revert(None, Some((rule.to_string(), narrative, Vec::new())));
                return Ok(CheckpointOutcome::Reverted { audit: Box::new(audit) });
            }
        };
        let declared = event_set(&p.declared_events);
        if declared == verified {
            self.phase = Phase::CalculationPending;
            return Ok(CheckpointOutcome::Passed);
        }
        let corrected = evaluate_proposal(&self.locked_state, &p.mv, &self.strategist.config, &FullSimulation);
        let retraction = PspRetraction {
            cycle: self.cycle(),
            reason: format!(
                "declared {} event(s) but the move produces {}; approval voided",
                declared.len(),
                verified.len()
            ),
            retracted: p,
            corrected: corrected.clone(),
            timestamp_ms: now_ms(),
        };
        self.log.push(LogEntry::Psp(Box::new(retraction.clone())));
        self.proposal = Some(corrected);
        self.phase = Phase::ProposalPending;
        Ok(CheckpointOutcome::Retracted { retraction: Box::new(retraction) })
    }

    /// Primary and auditor evaluation of the approved move, retried on
    /// disagreement; a persistent disagreement reverts the cycle.
    pub fn execute_calculation(&mut self) -> Result<CalculationOutcome, SessionError> {
        self.require("execute_calculation", Phase::CalculationPending)?;
        let mv = self.proposal.as_ref().expect("checkpoint requires a proposal").mv;
        let attempts = self.config.max_avm_attempts.max(1);
        let mut last: Vec<Discrepancy> = Vec::new();
        for attempt in 1..=attempts {
            let state = &self.locked_state;
            let evaluator = self.evaluator.as_ref();
            let (primary, mine) = std::thread::scope(|s| {
                let h = s.spawn(|| auditor::simulate(state, &mv));
                let primary = evaluator.evaluate(state, &mv);
                (primary, h.join().expect("auditor thread"))
            });
            let report = match primary {
                Ok(r) => r,
                Err(e) => {
                    let narrative = vec![format!("primary evaluation rejected the move: {e}")];
                    let audit = self.fap_revert(None, Some((e.rule_id().to_string(), narrative, Vec::new())));
                    return Ok(CalculationOutcome::Reverted { audit: Box::new(audit) });
                }
            };
            match auditor::compare(&mine, &mv, &report) {
                AuditVerdict::Concordance => {
                    self.report = Some(report.clone());
                    self.phase = Phase::ChecksumPending;
                    return Ok(CalculationOutcome::Concordant { report: Box::new(report), attempts: attempt });
                }
                AuditVerdict::Discrepancies(d) => last = d,
            }
        }
        let narrative = vec![format!("auditor disagreed with the primary evaluation {attempts} time(s)")];
        let audit = self.fap_revert(None, Some(("AVM-discrepancy".into(), narrative, last)));
        Ok(CalculationOutcome::Reverted { audit: Box::new(audit) })
    }

    /// Emit the checksum and lock the final state through a snapshot round trip.
    fn confirm_checksum(&mut self) -> Result<ChecksumString, SessionError> {
        let report = self.report.take().expect("gate C requires a report");
        let fin = &report.final_state;
        let checksum = format_checksum(report.move_number, &report.events(), &fin.inventory, fin.level.height)?;
        let load_checksum = format_load_checksum(&self.locked_state);
        let (reloaded, snapshot, d) = snapshot_round_trip(fin);
        let record = SessionRecord {
            cycle: self.cycle(),
            proposal: self.proposal.take().expect("gate C requires a proposal"),
            signals: std::mem::take(&mut self.signals),
            report,
            checksum: checksum.clone(),
            load_checksum,
            snapshot: snapshot.clone(),
            digest: d.clone(),
            started_ms: self.cycle_started_ms,
            confirmed_ms: now_ms(),
        };
        self.log.push(LogEntry::Cycle(Box::new(record)));
        self.locked_state = reloaded;
        self.locked_snapshot = snapshot;
        self.locked_digest = d;
        self.locked_checksum = Some(checksum.clone());
        self.phase = Phase::Locked;
        Ok(checksum)
    }

    /// Roll back to the locked snapshot and record the root cause.
    ///
    /// `forced` carries a cause already established by the caller; otherwise
    /// the annulled artifacts are re-checked to name the violated rule.
    fn fap_revert(
        &mut self,
        supervisor_text: Option<String>,
        forced: Option<(String, Vec<String>, Vec<Discrepancy>)>,
    ) -> AuditRecord {
        let at_phase = self.phase;
        self.phase = Phase::Reverting;
        let cycle = self.cycle();
        let mut annulled = Vec::new();
        if let Some(p) = &self.proposal {
            annulled.push(format!("proposal {}", format_move(&p.mv)));
        }
        if let Some(r) = &self.report {
            annulled.push(format!("turn report J{}", r.move_number));
        }
        let approvals = self.signals.iter().filter(|s| s.signal == Signal::Ok).count();
        if approvals > 0 {
            annulled.push(format!("{approvals} approval(s)"));
        }
        let (rule_id, mut narrative, discrepancies) = match forced {
            Some(f) => f,
            None => self.classify(),
        };
        if let Some(t) = supervisor_text.filter(|t| !t.is_empty()) {
            narrative.insert(0, format!("supervisor: {t}"));
        }
        let restored = GameState::from_canonical_json(&self.locked_snapshot).expect("locked snapshot reloads");
        debug_assert_eq!(digest(&self.locked_snapshot), self.locked_digest);
        self.locked_state = restored;
        self.proposal = None;
        self.report = None;
        self.signals.clear();
        let record = AuditRecord {
            cycle,
            at_phase,
            annulled,
            rule_id,
            narrative,
            discrepancies,
            reverted_to: self.locked_checksum.clone(),
            reverted_move: self.locked_state.move_number,
            reverted_digest: self.locked_digest.clone(),
            timestamp_ms: now_ms(),
        };
        self.log.push(LogEntry::Fap(Box::new(record.clone())));
        self.phase = Phase::ProposalPending;
        self.cycle_started_ms = now_ms();
        record
    }

    fn classify(&self) -> (String, Vec<String>, Vec<Discrepancy>) {
        let Some(p) = &self.proposal else {
            return (CAUSE_UNDETERMINED.into(), vec!["no artifact of this cycle fails a check".into()], Vec::new());
        };
        let notation = format_move(&p.mv);
        if let Err(e) = check_move(&self.locked_state, &p.mv) {
            return (e.rule_id().into(), vec![format!("proposal {notation} is illegal: {e}")], Vec::new());
        }
        let verified = match auditor::simulate(&self.locked_state, &p.mv) {
            Ok(o) => o,
            Err(rule) => {
                return (rule.into(), vec![format!("auditor rejects proposal {notation}")], Vec::new());
            }
        };
        if let Some(r) = &self.report {
            if let AuditVerdict::Discrepancies(d) = auditor::compare(&Ok(verified.clone()), &p.mv, r) {
                let rule = if d.iter().all(|d| d.field == "cross-consistency") {
                    "RCP-inconsistency"
                } else {
                    "AVM-discrepancy"
                };
                return (rule.into(), vec![format!("report for {notation} disagrees with the auditor")], d);
            }
        }
        let declared: BTreeSet<_> = event_set(&p.declared_events);
        if declared != verified.events {
            return (
                "PSP-declaration".into(),
                vec![format!("proposal {notation} declares events the move does not produce")],
                Vec::new(),
            );
        }
        (CAUSE_UNDETERMINED.into(), vec![format!("proposal {notation} passes every check")], Vec::new())
    }

    /// Drive one cycle with automatic approvals. Retractions are re-approved.
    pub fn auto_cycle(&mut self, proposal: Option<Proposal>) -> Result<AutoOutcome, SessionError> {
        let submitted = match proposal {
            Some(p) => self.submit_proposal(p),
            None => self.propose().map(|_| ()),
        };
        if let Err(SessionError::Rejected { rule_id, message }) = submitted {
            return Ok(AutoOutcome::Rejected { rule_id, message });
        }
        submitted?;
        let mut retractions = 0;
        loop {
            self.signal(Signal::Ok)?;
            match self.internal_checkpoint()? {
                CheckpointOutcome::Passed => break,
                CheckpointOutcome::Retracted { .. } => retractions += 1,
                CheckpointOutcome::Reverted { audit } => return Ok(AutoOutcome::Reverted { audit }),
            }
        }
        let report = match self.execute_calculation()? {
            CalculationOutcome::Concordant { report, .. } => report,
            CalculationOutcome::Reverted { audit } => return Ok(AutoOutcome::Reverted { audit }),
        };
        let SignalOutcome::ChecksumConfirmed { checksum } = self.signal(Signal::Ok)? else {
            unreachable!("gate C ok confirms the checksum")
        };
        self.signal(Signal::Ok)?;
        Ok(AutoOutcome::Confirmed { checksum, report, retractions })
    }
}
