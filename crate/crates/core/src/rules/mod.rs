//! Pure game mechanics. Nothing here performs I/O or keeps hidden state: every
//! operation takes a state by reference and returns a new value.

mod board;
mod error;
mod gear;
mod moves;
mod state;
mod turn;

pub use board::{
    base_vector, square_type, vector_to_destination, CellCoord, Direction, Inventory, Level, Side, SquareType, Target,
    MAX_SIDE,
};
pub use error::RuleError;
pub use gear::{GearKind, Occupancy, PlacedGear, Rotation, Slot};
pub use moves::{Move, Spin};
pub use state::{GameState, InvariantViolation, Mouse, MouseStatus};
pub use turn::{
    apply_events, apply_move, check_move, check_phase, check_placement_cell, connectivity_check, jump_analysis,
    legal_placements, rotation_cascade, victory_check, Conclusion, ConnectionCheck, Connectivity, EntryPhase,
    MouseAudit, NoJumpReason, PreMoveRecord, TurnEvent, TurnReport,
};
