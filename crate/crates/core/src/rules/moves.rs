use serde::{Deserialize, Serialize};

use super::board::CellCoord;
use super::gear::{GearKind, Rotation};

/// A quarter turn applied to the activated square.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Spin {
    #[serde(rename = "-90")]
    Minus90,
    #[serde(rename = "+90")]
    Plus90,
}

impl Spin {
    pub const ALL: [Spin; 2] = [Spin::Minus90, Spin::Plus90];

    /// Change applied to `b` of gears on the activated square's type.
    pub fn quarter_turns(self) -> i8 {
        match self {
            Spin::Plus90 => 1,
            Spin::Minus90 => -1,
        }
    }

    pub fn inverse(self) -> Spin {
        match self {
            Spin::Plus90 => Spin::Minus90,
            Spin::Minus90 => Spin::Plus90,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Spin::Plus90 => "+90",
            Spin::Minus90 => "-90",
        }
    }
}

/// The only way state changes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Move {
    /// Place a gear from the inventory with an initial rotation, then spin it.
    Placement { kind: GearKind, cell: CellCoord, initial_b: Rotation, spin: Spin },
    /// Spin an existing gear (rotation phase only).
    Rotation { cell: CellCoord, spin: Spin },
    /// Set one gear's `b` directly, then spin (rotation phase only).
    PreMoveRotation { premove_cell: CellCoord, premove_b: Rotation, rotation_cell: CellCoord, spin: Spin },
}

impl Move {
    pub fn spin(&self) -> Spin {
        match self {
            Move::Placement { spin, .. } | Move::Rotation { spin, .. } | Move::PreMoveRotation { spin, .. } => *spin,
        }
    }

    /// Square the spin is applied to.
    pub fn activated_cell(&self) -> CellCoord {
        match self {
            Move::Placement { cell, .. } | Move::Rotation { cell, .. } => *cell,
            Move::PreMoveRotation { rotation_cell, .. } => *rotation_cell,
        }
    }

    pub fn is_placement(&self) -> bool {
        matches!(self, Move::Placement { .. })
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Move::Placement { .. } => "placement",
            Move::Rotation { .. } => "rotation",
            Move::PreMoveRotation { .. } => "pre-move rotation",
        }
    }
}
