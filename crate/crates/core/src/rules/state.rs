//! Game state: gears on the board, mice and remaining inventory.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::board::{CellCoord, Direction, Inventory, Level};
use super::error::RuleError;
use super::gear::{GearKind, PlacedGear, Slot};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum MouseStatus {
    /// Below its column, at `P<x>0`.
    Waiting,
    InPlay {
        cell: CellCoord,
        base: Direction,
    },
    /// Exited through the top edge; `cell` is `P<x><height+1>` of the exit column.
    Victory {
        cell: CellCoord,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Mouse {
    pub id: u8,
    pub status: MouseStatus,
}

impl Mouse {
    /// Column the mouse starts below.
    pub fn column(&self) -> u8 {
        self.id
    }

    pub fn is_waiting(&self) -> bool {
        matches!(self.status, MouseStatus::Waiting)
    }

    pub fn is_in_play(&self) -> bool {
        matches!(self.status, MouseStatus::InPlay { .. })
    }

    pub fn has_exited(&self) -> bool {
        matches!(self.status, MouseStatus::Victory { .. })
    }

    /// Square shown in the mouse table: `P<x>0` while waiting.
    pub fn display_cell(&self) -> String {
        match self.status {
            MouseStatus::Waiting => format!("P{}0", self.id),
            MouseStatus::InPlay { cell, .. } | MouseStatus::Victory { cell } => cell.to_string(),
        }
    }
}

/// The single source of truth for one point in a game.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameState {
    pub level: Level,
    pub gears: BTreeMap<CellCoord, PlacedGear>,
    pub mice: Vec<Mouse>,
    pub inventory: Inventory,
    pub move_number: u32,
}

/// A violated state invariant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvariantViolation(pub String);

impl std::fmt::Display for InvariantViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl GameState {
    /// The J0 state: empty board, every mouse waiting, full inventory.
    pub fn initial(level: &Level) -> Result<Self, RuleError> {
        level.validate()?;
        let mice = (1..=level.mouse_count()).map(|id| Mouse { id, status: MouseStatus::Waiting }).collect();
        Ok(GameState { level: level.clone(), gears: BTreeMap::new(), mice, inventory: level.inventory, move_number: 0 })
    }

    pub fn gear(&self, cell: CellCoord) -> Option<&PlacedGear> {
        self.gears.get(&cell)
    }

    pub fn mouse(&self, id: u8) -> Option<&Mouse> {
        self.mice.get(id.checked_sub(1)? as usize)
    }

    pub(crate) fn mouse_mut(&mut self, id: u8) -> &mut Mouse {
        &mut self.mice[id as usize - 1]
    }

    /// Placement phase lasts while any gear remains in the inventory.
    pub fn in_placement_phase(&self) -> bool {
        !self.inventory.is_empty()
    }

    pub fn all_exited(&self) -> bool {
        self.mice.iter().all(Mouse::has_exited)
    }

    /// Canonical JSON serialization; equal states give equal bytes.
    pub fn to_canonical_json(&self) -> String {
        serde_json::to_string(self).expect("game state serializes")
    }

    pub fn from_canonical_json(s: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }

    /// Number of placed gears of each kind.
    pub fn placed_counts(&self) -> [u8; 4] {
        let mut counts = [0u8; 4];
        for g in self.gears.values() {
            counts[g.kind.index()] += 1;
        }
        counts
    }

    /// Check every structural invariant of a reachable state.
    pub fn check_invariants(&self) -> Result<(), InvariantViolation> {
        let fail = |msg: String| Err(InvariantViolation(msg));
        let level = &self.level;

        for (cell, gear) in &self.gears {
            if !level.contains(*cell) {
                return fail(format!("gear at {cell} is off the board"));
            }
            if level.is_obstacle(*cell) {
                return fail(format!("gear at {cell} stands on an obstacle"));
            }
            if !gear.occupancy.matches_kind(gear.kind) {
                return fail(format!("{cell}: occupancy {} does not match {} base pattern", gear.occupancy, gear.kind));
            }
        }

        let components = super::turn::count_components(&self.gears.keys().copied().collect());
        if components > 1 {
            return fail(format!("gear network has {components} components"));
        }

        if self.mice.len() != level.mouse_count() as usize {
            return fail(format!("{} mice for a {}-column level", self.mice.len(), level.mouse_count()));
        }

        let placed = self.placed_counts();
        for kind in GearKind::ALL {
            let i = kind.index();
            if placed[i] as u32 + self.inventory.0[i] as u32 != level.inventory.0[i] as u32 {
                return fail(format!(
                    "{kind}: {} placed + {} remaining != {} initial",
                    placed[i], self.inventory.0[i], level.inventory.0[i]
                ));
            }
        }

        let mut seen = BTreeSet::new();
        for (i, mouse) in self.mice.iter().enumerate() {
            if mouse.id as usize != i + 1 {
                return fail(format!("mouse at index {i} has id {}", mouse.id));
            }
            match mouse.status {
                MouseStatus::Waiting => {}
                MouseStatus::InPlay { cell, base } => {
                    let Some(gear) = self.gears.get(&cell) else {
                        return fail(format!("M{} stands on {cell} which holds no gear", mouse.id));
                    };
                    if gear.occupancy.slot(base) != Slot::Occupied {
                        return fail(format!(
                            "M{} on {cell} base {base} but occupancy is {}",
                            mouse.id, gear.occupancy
                        ));
                    }
                    if !seen.insert((cell, base)) {
                        return fail(format!("two mice share {cell} base {base}"));
                    }
                }
                MouseStatus::Victory { cell } => {
                    if cell.y != level.height + 1 || cell.x < 1 || cell.x > level.width {
                        return fail(format!("M{} exited at invalid square {cell}", mouse.id));
                    }
                }
            }
        }

        for (cell, gear) in &self.gears {
            for d in Direction::ALL {
                if gear.occupancy.slot(d) == Slot::Occupied && !seen.contains(&(*cell, d)) {
                    return fail(format!("{cell} base {d} marked occupied but no mouse is there"));
                }
            }
        }
        Ok(())
    }
}
