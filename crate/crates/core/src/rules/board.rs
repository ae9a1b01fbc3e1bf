//! Board geometry: coordinates, square types, directions and levels.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::error::RuleError;
use super::gear::GearKind;

/// Largest supported board side. Cell names use one digit per axis (`P<x><y>`).
pub const MAX_SIDE: u8 = 9;

/// A board square `P<x><y>`; `x` is the column, `y` the row, both 1-based.
///
/// Ordering is ascending by column, then row, which is the canonical listing
/// order of state tables and load checksums.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct CellCoord {
    pub x: u8,
    pub y: u8,
}

impl CellCoord {
    pub const fn new(x: u8, y: u8) -> Self {
        Self { x, y }
    }

    /// Square type from the parity of `x + y`: even is R, odd is L.
    pub fn square_type(self) -> SquareType {
        if (self.x as u16 + self.y as u16).is_multiple_of(2) {
            SquareType::R
        } else {
            SquareType::L
        }
    }

    /// The four orthogonal neighbours that fall inside a `width` x `height` board.
    pub fn neighbours(self, width: u8, height: u8) -> impl Iterator<Item = CellCoord> {
        Direction::ALL.into_iter().filter_map(move |d| match d.step(self, width, height) {
            Target::Cell(c) => Some(c),
            Target::OffBoard { .. } => None,
        })
    }
}

impl std::str::FromStr for CellCoord {
    type Err = String;

    /// Parses `P<x><y>` with single-digit coordinates.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bytes = s.as_bytes();
        match bytes {
            [b'P', x @ b'1'..=b'9', y @ b'1'..=b'9'] => Ok(CellCoord::new(x - b'0', y - b'0')),
            _ => Err(format!("invalid cell {s:?}, expected P<x><y>")),
        }
    }
}

impl From<CellCoord> for String {
    fn from(c: CellCoord) -> String {
        c.to_string()
    }
}

impl TryFrom<String> for CellCoord {
    type Error = String;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl fmt::Display for CellCoord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "P{}{}", self.x, self.y)
    }
}

/// Square type from the x+y topology rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SquareType {
    L,
    R,
}

impl SquareType {
    pub fn letter(self) -> char {
        match self {
            SquareType::L => 'L',
            SquareType::R => 'R',
        }
    }
}

impl fmt::Display for SquareType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

/// A quarter-turn orientation. Angles grow counterclockwise: 0 is up, 90 left,
/// 180 down, 270 right.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(into = "u16", try_from = "u16")]
pub enum Direction {
    Up,
    Left,
    Down,
    Right,
}

impl Direction {
    pub const ALL: [Direction; 4] = [Direction::Up, Direction::Left, Direction::Down, Direction::Right];

    pub fn degrees(self) -> u16 {
        self.index() as u16 * 90
    }

    pub fn index(self) -> usize {
        match self {
            Direction::Up => 0,
            Direction::Left => 1,
            Direction::Down => 2,
            Direction::Right => 3,
        }
    }

    pub fn from_index(i: usize) -> Direction {
        Direction::ALL[i % 4]
    }

    pub fn from_degrees(deg: u16) -> Option<Direction> {
        match deg {
            0 => Some(Direction::Up),
            90 => Some(Direction::Left),
            180 => Some(Direction::Down),
            270 => Some(Direction::Right),
            _ => None,
        }
    }

    /// `(self + 90 * quarter_turns) mod 360`.
    pub fn rotated(self, quarter_turns: u8) -> Direction {
        Direction::from_index(self.index() + quarter_turns as usize)
    }

    pub fn opposite(self) -> Direction {
        self.rotated(2)
    }

    /// The square this direction points at from `cell`.
    pub fn step(self, cell: CellCoord, width: u8, height: u8) -> Target {
        let (x, y) = (cell.x, cell.y);
        let (nx, ny) = match self {
            Direction::Up => (x, y + 1),
            Direction::Left => (x - 1, y),
            Direction::Down => (x, y - 1),
            Direction::Right => (x + 1, y),
        };
        if nx >= 1 && nx <= width && ny >= 1 && ny <= height {
            Target::Cell(CellCoord::new(nx, ny))
        } else {
            let side = match self {
                Direction::Up => Side::Top,
                Direction::Left => Side::Left,
                Direction::Down => Side::Bottom,
                Direction::Right => Side::Right,
            };
            Target::OffBoard { side, x: nx, y: ny }
        }
    }
}

impl From<Direction> for u16 {
    fn from(d: Direction) -> u16 {
        d.degrees()
    }
}

impl TryFrom<u16> for Direction {
    type Error = String;

    fn try_from(deg: u16) -> Result<Self, Self::Error> {
        Direction::from_degrees(deg).ok_or_else(|| format!("{deg} is not a quarter-turn angle"))
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}º", self.degrees())
    }
}

/// Board edge crossed by an off-board vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Top,
    Bottom,
    Left,
    Right,
}

/// Where a vector points: a board square (possibly an obstacle or empty) or
/// beyond an edge. Off-board coordinates keep the would-be square (e.g. `P30`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    Cell(CellCoord),
    OffBoard { side: Side, x: u8, y: u8 },
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Target::Cell(c) => write!(f, "{c}"),
            Target::OffBoard { x, y, .. } => write!(f, "P{x}{y} (off board)"),
        }
    }
}

/// Remaining gear counts, indexed G1..G4.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Inventory(pub [u8; 4]);

impl Inventory {
    pub fn get(&self, kind: GearKind) -> u8 {
        self.0[kind.index()]
    }

    pub fn total(&self) -> u32 {
        self.0.iter().map(|&n| n as u32).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.total() == 0
    }

    pub fn take(&mut self, kind: GearKind) -> Result<(), RuleError> {
        let slot = &mut self.0[kind.index()];
        if *slot == 0 {
            return Err(RuleError::InventoryUnderflow { kind });
        }
        *slot -= 1;
        Ok(())
    }

    pub fn available_kinds(&self) -> impl Iterator<Item = GearKind> + '_ {
        GearKind::ALL.into_iter().filter(|k| self.get(*k) > 0)
    }
}

impl fmt::Display for Inventory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.0;
        write!(f, "{{ G1: {a}, G2: {b}, G3: {c}, G4: {d} }}")
    }
}

/// Immutable level definition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Level {
    pub id: u32,
    pub width: u8,
    pub height: u8,
    pub obstacles: BTreeSet<CellCoord>,
    pub inventory: Inventory,
}

impl Level {
    pub fn new(
        id: u32,
        width: u8,
        height: u8,
        obstacles: BTreeSet<CellCoord>,
        inventory: Inventory,
    ) -> Result<Self, RuleError> {
        let level = Level { id, width, height, obstacles, inventory };
        level.validate()?;
        Ok(level)
    }

    pub fn validate(&self) -> Result<(), RuleError> {
        if self.width == 0 || self.height == 0 || self.width > MAX_SIDE || self.height > MAX_SIDE {
            return Err(RuleError::InvalidLevel(format!(
                "board {}x{} outside 1..={MAX_SIDE}",
                self.width, self.height
            )));
        }
        if let Some(c) = self.obstacles.iter().find(|c| !self.contains(**c)) {
            return Err(RuleError::InvalidLevel(format!("obstacle {c} lies outside the board")));
        }
        Ok(())
    }

    /// One mouse per column.
    pub fn mouse_count(&self) -> u8 {
        self.width
    }

    pub fn contains(&self, cell: CellCoord) -> bool {
        cell.x >= 1 && cell.x <= self.width && cell.y >= 1 && cell.y <= self.height
    }

    pub fn is_obstacle(&self, cell: CellCoord) -> bool {
        self.obstacles.contains(&cell)
    }

    pub fn is_playable(&self, cell: CellCoord) -> bool {
        self.contains(cell) && !self.is_obstacle(cell)
    }

    /// All board squares in canonical order.
    pub fn cells(&self) -> impl Iterator<Item = CellCoord> + '_ {
        (1..=self.width).flat_map(move |x| (1..=self.height).map(move |y| CellCoord::new(x, y)))
    }

    pub fn check_cell(&self, cell: CellCoord) -> Result<(), RuleError> {
        if self.contains(cell) {
            Ok(())
        } else {
            Err(RuleError::OutOfBoard { cell })
        }
    }
}

/// Square type of a board cell; rejects coordinates outside the board.
pub fn square_type(level: &Level, cell: CellCoord) -> Result<SquareType, RuleError> {
    level.check_cell(cell)?;
    Ok(cell.square_type())
}

/// Final orientation of a base: `(origin + 90 * b) mod 360`.
pub fn base_vector(origin: Direction, b: super::gear::Rotation) -> Direction {
    origin.rotated(b.get())
}

/// The square a vector points at, or the off-board side it leaves through.
/// Obstacles are not filtered here.
pub fn vector_to_destination(cell: CellCoord, vector: Direction, level: &Level) -> Target {
    vector.step(cell, level.width, level.height)
}
