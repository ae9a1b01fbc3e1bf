//! Turn resolution: placement legality, network connectivity, the rotation
//! cascade, the simultaneous jump wave and the full four-step turn.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use super::board::{CellCoord, Direction, Target};
use super::error::RuleError;
use super::gear::{PlacedGear, Rotation, Slot};
use super::moves::{Move, Spin};
use super::state::{GameState, MouseStatus};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntryPhase {
    /// Boarding the gear placed this turn, before the rotation.
    PreRotation,
    /// Boarding during the post-rotation jump wave.
    PostRotation,
}

/// A mouse movement produced by a turn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum TurnEvent {
    Entry { mouse: u8, cell: CellCoord, base: Direction, phase: EntryPhase },
    Jump { mouse: u8, from_cell: CellCoord, from_base: Direction, to_cell: CellCoord, landing_base: Direction },
    Exit { mouse: u8, from_cell: CellCoord, from_base: Direction },
}

impl TurnEvent {
    pub fn mouse(&self) -> u8 {
        match self {
            TurnEvent::Entry { mouse, .. } | TurnEvent::Jump { mouse, .. } | TurnEvent::Exit { mouse, .. } => *mouse,
        }
    }

    /// The `(cell, base)` slot the event fills, if any.
    fn landing(&self) -> Option<(CellCoord, Direction)> {
        match *self {
            TurnEvent::Entry { cell, base, .. } => Some((cell, base)),
            TurnEvent::Jump { to_cell, landing_base, .. } => Some((to_cell, landing_base)),
            TurnEvent::Exit { .. } => None,
        }
    }
}

/// One empty base examined on a destination gear.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConnectionCheck {
    pub base: Direction,
    pub final_vector: Direction,
    pub opposes: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoJumpReason {
    OffBoard,
    Obstacle,
    NoGear,
    NoOpposingEmptyBase,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "conclusion", rename_all = "snake_case")]
pub enum Conclusion {
    Jumps { to_cell: CellCoord, landing_base: Direction },
    Exits,
    DoesNotJump { reason: NoJumpReason },
}

/// Vector / Destination / Connection / Conclusion for one mouse in play.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MouseAudit {
    pub mouse: u8,
    pub cell: CellCoord,
    pub origin_base: Direction,
    pub gear: String,
    pub vector: Direction,
    pub destination: Target,
    pub destination_gear: Option<String>,
    pub connection_checks: Vec<ConnectionCheck>,
    pub conclusion: Conclusion,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PreMoveRecord {
    pub cell: CellCoord,
    pub b_before: Rotation,
    pub b_after: Rotation,
}

/// The complete, explicit trace of one turn.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TurnReport {
    pub move_number: u32,
    pub mv: Move,
    pub pre_rotation_entries: Vec<TurnEvent>,
    pub premove: Option<PreMoveRecord>,
    /// Gear cells in the network checked before the rotation.
    pub network_size: usize,
    pub rotation_deltas: BTreeMap<CellCoord, (Rotation, Rotation)>,
    pub audits: Vec<MouseAudit>,
    pub post_events: Vec<TurnEvent>,
    pub final_state: GameState,
}

impl TurnReport {
    /// Every event of the turn, pre-rotation entries first.
    pub fn events(&self) -> Vec<TurnEvent> {
        self.pre_rotation_entries.iter().chain(&self.post_events).copied().collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum Connectivity {
    Ok,
    Violation { components: usize },
}

/// Orthogonally connected components among `cells`.
pub(crate) fn count_components(cells: &BTreeSet<CellCoord>) -> usize {
    let mut seen = BTreeSet::new();
    let mut components = 0;
    for &start in cells {
        if !seen.insert(start) {
            continue;
        }
        components += 1;
        let mut queue = VecDeque::from([start]);
        while let Some(c) = queue.pop_front() {
            for n in c.neighbours(super::board::MAX_SIDE, super::board::MAX_SIDE) {
                if cells.contains(&n) && seen.insert(n) {
                    queue.push_back(n);
                }
            }
        }
    }
    components
}

/// Gear cells must form zero or one orthogonally connected network.
pub fn connectivity_check(state: &GameState) -> Connectivity {
    let cells = state.gears.keys().copied().collect();
    match count_components(&cells) {
        0 | 1 => Connectivity::Ok,
        components => Connectivity::Violation { components },
    }
}

/// Squares where a gear may be placed now.
///
/// On an empty board that is every playable square of row 1; afterwards every
/// empty playable square orthogonally adjacent to a gear.
pub fn legal_placements(state: &GameState) -> BTreeSet<CellCoord> {
    let level = &state.level;
    if state.gears.is_empty() {
        return (1..=level.width).map(|x| CellCoord::new(x, 1)).filter(|c| level.is_playable(*c)).collect();
    }
    let mut out = BTreeSet::new();
    for cell in state.gears.keys() {
        for n in cell.neighbours(level.width, level.height) {
            if level.is_playable(n) && !state.gears.contains_key(&n) {
                out.insert(n);
            }
        }
    }
    out
}

/// Why a placement on `cell` is illegal, if it is.
pub fn check_placement_cell(state: &GameState, cell: CellCoord) -> Result<(), RuleError> {
    let level = &state.level;
    level.check_cell(cell)?;
    if level.is_obstacle(cell) {
        return Err(RuleError::ObstacleCell { cell });
    }
    if state.gears.contains_key(&cell) {
        return Err(RuleError::CellOccupied { cell });
    }
    if state.gears.is_empty() {
        if cell.y != 1 {
            return Err(RuleError::FirstGearOffRow { cell });
        }
    } else if !cell.neighbours(level.width, level.height).any(|n| state.gears.contains_key(&n)) {
        return Err(RuleError::NotAdjacent { cell });
    }
    Ok(())
}

/// Phase legality: placements while the inventory holds gears, rotations after.
pub fn check_phase(state: &GameState, mv: &Move) -> Result<(), RuleError> {
    if state.all_exited() {
        return Err(RuleError::GameOver);
    }
    match (state.in_placement_phase(), mv.is_placement()) {
        (true, false) => Err(RuleError::PhaseViolation {
            found: mv.kind_name(),
            reason: "gears remain in the inventory, only placements are allowed",
        }),
        (false, true) => Err(RuleError::PhaseViolation {
            found: mv.kind_name(),
            reason: "the inventory is empty, placements are over",
        }),
        _ => Ok(()),
    }
}

/// New `b` of every gear after a spin on `activated`.
///
/// Gears on squares of the activated type turn with the spin, the others
/// against it.
pub fn rotation_cascade(
    state: &GameState,
    activated: CellCoord,
    spin: Spin,
) -> Result<BTreeMap<CellCoord, Rotation>, RuleError> {
    state.level.check_cell(activated)?;
    if !state.gears.contains_key(&activated) {
        return Err(RuleError::EmptyCellRotation { cell: activated });
    }
    let active_type = activated.square_type();
    let turns = spin.quarter_turns();
    Ok(state
        .gears
        .iter()
        .map(|(cell, gear)| {
            let delta = if cell.square_type() == active_type { turns } else { -turns };
            (*cell, gear.b.turned(delta))
        })
        .collect())
}

fn audit_mouse(state: &GameState, mouse: u8, cell: CellCoord, origin_base: Direction) -> MouseAudit {
    let level = &state.level;
    let gear = &state.gears[&cell];
    let vector = gear.vector_of(origin_base);
    let destination = vector.step(cell, level.width, level.height);
    let mut audit = MouseAudit {
        mouse,
        cell,
        origin_base,
        gear: gear.label(cell),
        vector,
        destination,
        destination_gear: None,
        connection_checks: Vec::new(),
        conclusion: Conclusion::DoesNotJump { reason: NoJumpReason::OffBoard },
    };
    let dest = match destination {
        Target::OffBoard { .. } => {
            if cell.y == level.height && vector == Direction::Up {
                audit.conclusion = Conclusion::Exits;
            }
            return audit;
        }
        Target::Cell(dest) => dest,
    };
    if level.is_obstacle(dest) {
        audit.conclusion = Conclusion::DoesNotJump { reason: NoJumpReason::Obstacle };
        return audit;
    }
    let Some(target) = state.gears.get(&dest) else {
        audit.conclusion = Conclusion::DoesNotJump { reason: NoJumpReason::NoGear };
        return audit;
    };
    audit.destination_gear = Some(target.label(dest));
    let required = vector.opposite();
    let mut landing = None;
    for (base, final_vector) in target.base_vectors() {
        if !target.occupancy.is_empty_base(base) {
            continue;
        }
        let opposes = final_vector == required;
        audit.connection_checks.push(ConnectionCheck { base, final_vector, opposes });
        if opposes {
            landing = Some(base);
        }
    }
    audit.conclusion = match landing {
        Some(landing_base) => Conclusion::Jumps { to_cell: dest, landing_base },
        None => Conclusion::DoesNotJump { reason: NoJumpReason::NoOpposingEmptyBase },
    };
    audit
}

/// One simultaneous jump wave computed on a frozen snapshot of `state`.
///
/// Mice in play exit (top row, vector 0º) or jump to the empty base of the
/// neighbouring gear whose vector opposes theirs. Waiting mice board the row-1
/// gear of their column when one of its empty bases points down. Returns the
/// events and one audit per mouse in play; fails if two mice claim one base.
pub fn jump_analysis(state: &GameState) -> Result<(Vec<TurnEvent>, Vec<MouseAudit>), RuleError> {
    let mut events = Vec::new();
    let mut audits = Vec::new();
    for mouse in &state.mice {
        match mouse.status {
            MouseStatus::InPlay { cell, base } => {
                let audit = audit_mouse(state, mouse.id, cell, base);
                match audit.conclusion {
                    Conclusion::Exits => {
                        events.push(TurnEvent::Exit { mouse: mouse.id, from_cell: cell, from_base: base })
                    }
                    Conclusion::Jumps { to_cell, landing_base } => events.push(TurnEvent::Jump {
                        mouse: mouse.id,
                        from_cell: cell,
                        from_base: base,
                        to_cell,
                        landing_base,
                    }),
                    Conclusion::DoesNotJump { .. } => {}
                }
                audits.push(audit);
            }
            MouseStatus::Waiting => {
                let entry_cell = CellCoord::new(mouse.column(), 1);
                if let Some(gear) = state.gears.get(&entry_cell) {
                    if let Some(base) = gear.empty_base_facing(Direction::Down) {
                        events.push(TurnEvent::Entry {
                            mouse: mouse.id,
                            cell: entry_cell,
                            base,
                            phase: EntryPhase::PostRotation,
                        });
                    }
                }
            }
            MouseStatus::Victory { .. } => {}
        }
    }
    check_conflicts(&events)?;
    Ok((events, audits))
}

fn check_conflicts(events: &[TurnEvent]) -> Result<(), RuleError> {
    let mut claimed: BTreeMap<(CellCoord, Direction), u8> = BTreeMap::new();
    for e in events {
        if let Some((cell, base)) = e.landing() {
            if let Some(first) = claimed.insert((cell, base), e.mouse()) {
                return Err(RuleError::JumpConflict { cell, base, first, second: e.mouse() });
            }
        }
    }
    Ok(())
}

/// Apply a wave of events atomically: every departure is vacated before any
/// landing is filled.
pub fn apply_events(state: &GameState, events: &[TurnEvent]) -> GameState {
    let mut next = state.clone();
    let height = next.level.height;
    for e in events {
        match *e {
            TurnEvent::Jump { from_cell, from_base, .. } | TurnEvent::Exit { from_cell, from_base, .. } => {
                if let Some(g) = next.gears.get_mut(&from_cell) {
                    g.occupancy.set(from_base, Slot::Empty);
                }
            }
            TurnEvent::Entry { .. } => {}
        }
    }
    for e in events {
        let status = match *e {
            TurnEvent::Exit { from_cell, .. } => MouseStatus::Victory { cell: CellCoord::new(from_cell.x, height + 1) },
            TurnEvent::Jump { to_cell, landing_base, .. } => {
                place_mouse(&mut next, to_cell, landing_base);
                MouseStatus::InPlay { cell: to_cell, base: landing_base }
            }
            TurnEvent::Entry { cell, base, .. } => {
                place_mouse(&mut next, cell, base);
                MouseStatus::InPlay { cell, base }
            }
        };
        next.mouse_mut(e.mouse()).status = status;
    }
    next
}

fn place_mouse(state: &mut GameState, cell: CellCoord, base: Direction) {
    if let Some(g) = state.gears.get_mut(&cell) {
        g.occupancy.set(base, Slot::Occupied);
    }
}

pub fn victory_check(state: &GameState) -> bool {
    state.all_exited()
}

/// Validate a move against the current state without executing it.
pub fn check_move(state: &GameState, mv: &Move) -> Result<(), RuleError> {
    check_phase(state, mv)?;
    match *mv {
        Move::Placement { kind, cell, .. } => {
            check_placement_cell(state, cell)?;
            if state.inventory.get(kind) == 0 {
                return Err(RuleError::InventoryUnderflow { kind });
            }
        }
        Move::Rotation { cell, .. } => {
            state.level.check_cell(cell)?;
            if !state.gears.contains_key(&cell) {
                return Err(RuleError::EmptyCellRotation { cell });
            }
        }
        Move::PreMoveRotation { premove_cell, rotation_cell, .. } => {
            state.level.check_cell(premove_cell)?;
            if !state.gears.contains_key(&premove_cell) {
                return Err(RuleError::EmptyCellPreMove { cell: premove_cell });
            }
            state.level.check_cell(rotation_cell)?;
            if !state.gears.contains_key(&rotation_cell) {
                return Err(RuleError::EmptyCellRotation { cell: rotation_cell });
            }
        }
    }
    Ok(())
}

/// Resolve one full turn. The input state is left untouched.
///
/// 1. Placement (with the pre-rotation entry check on the new gear) or pre-move.
/// 2. Network check, then the rotation cascade.
/// 3. One simultaneous jump wave.
/// 4. Consolidated final state.
pub fn apply_move(state: &GameState, mv: &Move) -> Result<TurnReport, RuleError> {
    check_move(state, mv)?;
    let mut next = state.clone();
    let mut pre_rotation_entries = Vec::new();
    let mut premove = None;

    match *mv {
        Move::Placement { kind, cell, initial_b, .. } => {
            next.inventory.take(kind)?;
            let mut gear = PlacedGear::new(kind, initial_b);
            if cell.y == 1 {
                let mouse_id = cell.x;
                let waiting = next.mouse(mouse_id).is_some_and(|m| m.is_waiting());
                if waiting {
                    if let Some(base) = gear.empty_base_facing(Direction::Down) {
                        gear.occupancy.set(base, Slot::Occupied);
                        next.mouse_mut(mouse_id).status = MouseStatus::InPlay { cell, base };
                        pre_rotation_entries.push(TurnEvent::Entry {
                            mouse: mouse_id,
                            cell,
                            base,
                            phase: EntryPhase::PreRotation,
                        });
                    }
                }
            }
            next.gears.insert(cell, gear);
        }
        Move::PreMoveRotation { premove_cell, premove_b, .. } => {
            let gear = next.gears.get_mut(&premove_cell).expect("checked above");
            premove = Some(PreMoveRecord { cell: premove_cell, b_before: gear.b, b_after: premove_b });
            gear.b = premove_b;
        }
        Move::Rotation { .. } => {}
    }

    if let Connectivity::Violation { components } = connectivity_check(&next) {
        return Err(RuleError::Disconnected { components });
    }
    let network_size = next.gears.len();

    let new_b = rotation_cascade(&next, mv.activated_cell(), mv.spin())?;
    let mut rotation_deltas = BTreeMap::new();
    for (cell, b) in new_b {
        let gear = next.gears.get_mut(&cell).expect("cascade covers placed gears");
        rotation_deltas.insert(cell, (gear.b, b));
        gear.b = b;
    }

    let (post_events, audits) = jump_analysis(&next)?;
    let mut final_state = apply_events(&next, &post_events);
    final_state.move_number = state.move_number + 1;

    Ok(TurnReport {
        move_number: final_state.move_number,
        mv: *mv,
        pre_rotation_entries,
        premove,
        network_size,
        rotation_deltas,
        audits,
        post_events,
        final_state,
    })
}
