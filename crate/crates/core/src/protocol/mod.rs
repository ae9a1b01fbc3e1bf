//! Supervised gameplay sessions: gates, checksum locking, the independent
//! auditor, proposal retraction and rollback.

pub mod auditor;
mod records;
mod session;

pub use auditor::{audit, cross_consistency, event_set, AuditEvent, AuditVerdict, Discrepancy};
pub use records::{
    digest, now_ms, parse_json_lines, snapshot_round_trip, to_json_lines, AuditRecord, LogEntry, PspRetraction,
    SessionRecord, Signal, SignalRecord,
};
pub use session::{
    AutoOutcome, CalculationOutcome, CheckpointOutcome, Evaluator, KernelEvaluator, Phase, Session, SessionConfig,
    SessionError, SignalOutcome, CAUSE_UNDETERMINED,
};
