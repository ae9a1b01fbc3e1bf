//! Caps i Caps game engine.
//!
//! The crate is split along the layers of a supervised game session:
//!
//! - [`rules`]: pure, deterministic game mechanics (topology, rotation
//!   cascade, jumps, placement legality, turn resolution).
//! - [`notation`]: textual formats (moves, level data, checksums, game logs,
//!   state tables).
//! - [`strategist`]: priority-ordered one-ply move selection.
//! - [`protocol`]: the gated gameplay cycle with checksum locking, the
//!   independent auditor and the rollback/retraction protocols.
//! - [`random`]: random levels and playouts used by property suites and
//!   fuzzing.

pub mod notation;
pub mod protocol;
pub mod random;
pub mod rules;
pub mod strategist;

pub use rules::{
    CellCoord, Direction, GameState, GearKind, Inventory, Level, Move, Rotation, RuleError, Spin, TurnEvent, TurnReport,
};
