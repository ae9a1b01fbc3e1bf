use thiserror::Error;

use super::board::{CellCoord, Direction};
use super::gear::GearKind;

/// Rule violations and malformed inputs. Every variant maps to a stable rule
/// id (see [`RuleError::rule_id`]) used by audits and verification reports.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RuleError {
    #[error("invalid level: {0}")]
    InvalidLevel(String),
    #[error("rotation b={0} outside 0..=3")]
    InvalidRotation(u8),
    #[error("{cell} lies outside the board")]
    OutOfBoard { cell: CellCoord },
    #[error("{found} move not allowed: {reason}")]
    PhaseViolation { found: &'static str, reason: &'static str },
    #[error("{cell} is not orthogonally adjacent to any placed gear")]
    NotAdjacent { cell: CellCoord },
    #[error("the first gear must be placed in row y=1, not {cell}")]
    FirstGearOffRow { cell: CellCoord },
    #[error("{cell} is an obstacle")]
    ObstacleCell { cell: CellCoord },
    #[error("{cell} already holds a gear")]
    CellOccupied { cell: CellCoord },
    #[error("no {kind} left in the inventory")]
    InventoryUnderflow { kind: GearKind },
    #[error("{cell} holds no gear to rotate")]
    EmptyCellRotation { cell: CellCoord },
    #[error("{cell} holds no gear for the pre-move")]
    EmptyCellPreMove { cell: CellCoord },
    #[error("gear network split into {components} components")]
    Disconnected { components: usize },
    #[error("mice {first} and {second} both resolve to base {base} of {cell}")]
    JumpConflict { cell: CellCoord, base: Direction, first: u8, second: u8 },
    #[error("every mouse has already exited")]
    GameOver,
}

impl RuleError {
    pub fn rule_id(&self) -> &'static str {
        match self {
            RuleError::InvalidLevel(_) => "invalid-level",
            RuleError::InvalidRotation(_) => "invalid-rotation",
            RuleError::OutOfBoard { .. } => "out-of-board",
            RuleError::PhaseViolation { .. } => "phase-violation",
            RuleError::NotAdjacent { .. } => "AVP-adjacency",
            RuleError::FirstGearOffRow { .. } => "AVP-first-row",
            RuleError::ObstacleCell { .. } => "AVP-obstacle",
            RuleError::CellOccupied { .. } => "AVP-occupied",
            RuleError::InventoryUnderflow { .. } => "inventory-underflow",
            RuleError::EmptyCellRotation { .. } => "empty-cell-rotation",
            RuleError::EmptyCellPreMove { .. } => "empty-cell-premove",
            RuleError::Disconnected { .. } => "FMTC-connectivity",
            RuleError::JumpConflict { .. } => "jump-conflict",
            RuleError::GameOver => "game-over",
        }
    }

    /// True for the placement-legality failures the adjacency pre-filter owns.
    pub fn is_avp(&self) -> bool {
        self.rule_id().starts_with("AVP-")
    }
}
