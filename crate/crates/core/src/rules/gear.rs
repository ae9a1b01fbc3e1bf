//! Gears: kinds, rotation state and base occupancy.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::board::{CellCoord, Direction};
use super::error::RuleError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum GearKind {
    G1,
    G2,
    G3,
    G4,
}

impl GearKind {
    pub const ALL: [GearKind; 4] = [GearKind::G1, GearKind::G2, GearKind::G3, GearKind::G4];

    pub fn index(self) -> usize {
        match self {
            GearKind::G1 => 0,
            GearKind::G2 => 1,
            GearKind::G3 => 2,
            GearKind::G4 => 3,
        }
    }

    /// 1-based type number as written in notation (`G<n>`).
    pub fn number(self) -> u8 {
        self.index() as u8 + 1
    }

    pub fn from_number(n: u8) -> Option<GearKind> {
        match n {
            1..=4 => Some(GearKind::ALL[n as usize - 1]),
            _ => None,
        }
    }

    /// Bases the gear carries, as origin angles at b = 0.
    pub fn origin_bases(self) -> &'static [Direction] {
        use Direction::*;
        match self {
            GearKind::G1 => &[Up],
            GearKind::G2 => &[Up, Down],
            GearKind::G3 => &[Left, Down, Right],
            GearKind::G4 => &[Up, Left, Down, Right],
        }
    }

    pub fn has_base(self, origin: Direction) -> bool {
        self.origin_bases().contains(&origin)
    }
}

impl fmt::Display for GearKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "G{}", self.number())
    }
}

/// Rotation state `b`, the number of quarter turns applied to the 0º base.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct Rotation(u8);

impl Rotation {
    pub const ALL: [Rotation; 4] = [Rotation(0), Rotation(1), Rotation(2), Rotation(3)];

    pub fn new(b: u8) -> Result<Self, RuleError> {
        if b < 4 {
            Ok(Rotation(b))
        } else {
            Err(RuleError::InvalidRotation(b))
        }
    }

    pub fn get(self) -> u8 {
        self.0
    }

    /// Apply a signed number of quarter turns, wrapping mod 4.
    pub fn turned(self, quarter_turns: i8) -> Rotation {
        Rotation((self.0 as i8 + quarter_turns).rem_euclid(4) as u8)
    }
}

impl TryFrom<u8> for Rotation {
    type Error = RuleError;

    fn try_from(b: u8) -> Result<Self, Self::Error> {
        Rotation::new(b)
    }
}

impl From<Rotation> for u8 {
    fn from(r: Rotation) -> u8 {
        r.0
    }
}

impl fmt::Display for Rotation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// One digit of a `Bxxxx` code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Slot {
    Empty,
    Occupied,
    Nonexistent,
}

impl Slot {
    pub fn digit(self) -> char {
        match self {
            Slot::Empty => '0',
            Slot::Occupied => '1',
            Slot::Nonexistent => '2',
        }
    }

    pub fn from_digit(c: char) -> Option<Slot> {
        match c {
            '0' => Some(Slot::Empty),
            '1' => Some(Slot::Occupied),
            '2' => Some(Slot::Nonexistent),
            _ => None,
        }
    }
}

/// Dynamic occupancy of the four origin bases (0º, 90º, 180º, 270º).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Occupancy([Slot; 4]);

impl Occupancy {
    /// Fresh occupancy for a kind: existing bases empty, the rest nonexistent.
    pub fn empty_for(kind: GearKind) -> Self {
        let mut slots = [Slot::Nonexistent; 4];
        for base in kind.origin_bases() {
            slots[base.index()] = Slot::Empty;
        }
        Occupancy(slots)
    }

    pub fn slot(&self, origin: Direction) -> Slot {
        self.0[origin.index()]
    }

    pub fn slots(&self) -> [Slot; 4] {
        self.0
    }

    pub fn is_empty_base(&self, origin: Direction) -> bool {
        self.slot(origin) == Slot::Empty
    }

    pub(crate) fn set(&mut self, origin: Direction, slot: Slot) {
        self.0[origin.index()] = slot;
    }

    /// True when the pattern of `2` digits is exactly the kind's complement.
    pub fn matches_kind(&self, kind: GearKind) -> bool {
        Direction::ALL.iter().all(|d| (self.slot(*d) == Slot::Nonexistent) != kind.has_base(*d))
    }

    /// Parse a `Bxxxx` code.
    pub fn parse(code: &str) -> Option<Occupancy> {
        let digits = code.strip_prefix('B')?;
        if digits.len() != 4 {
            return None;
        }
        let mut slots = [Slot::Empty; 4];
        for (i, c) in digits.chars().enumerate() {
            slots[i] = Slot::from_digit(c)?;
        }
        Some(Occupancy(slots))
    }
}

impl fmt::Display for Occupancy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("B")?;
        for s in self.0 {
            write!(f, "{}", s.digit())?;
        }
        Ok(())
    }
}

impl From<Occupancy> for String {
    fn from(o: Occupancy) -> String {
        o.to_string()
    }
}

impl TryFrom<String> for Occupancy {
    type Error = String;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        Occupancy::parse(&s).ok_or_else(|| format!("invalid occupancy code {s:?}"))
    }
}

/// A gear standing on the board.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PlacedGear {
    pub kind: GearKind,
    pub b: Rotation,
    pub occupancy: Occupancy,
}

impl PlacedGear {
    pub fn new(kind: GearKind, b: Rotation) -> Self {
        PlacedGear { kind, b, occupancy: Occupancy::empty_for(kind) }
    }

    /// Final vector of an origin base under the current rotation.
    pub fn vector_of(&self, origin: Direction) -> Direction {
        origin.rotated(self.b.get())
    }

    /// Existing bases with their final vectors, in origin order.
    pub fn base_vectors(&self) -> impl Iterator<Item = (Direction, Direction)> + '_ {
        self.kind.origin_bases().iter().map(|o| (*o, self.vector_of(*o)))
    }

    /// The empty base whose final vector equals `vector`, if any.
    pub fn empty_base_facing(&self, vector: Direction) -> Option<Direction> {
        self.base_vectors().find(|(o, v)| *v == vector && self.occupancy.is_empty_base(*o)).map(|(o, _)| o)
    }

    /// Gear identifier with the immutable prefix and dynamic parts, e.g. `G3P11R0`.
    pub fn label(&self, cell: CellCoord) -> String {
        format!("{}{}{}{}", self.kind, cell, cell.square_type(), self.b)
    }

    /// Immutable prefix, e.g. `G3P11R`.
    pub fn prefix(&self, cell: CellCoord) -> String {
        format!("{}{}{}", self.kind, cell, cell.square_type())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn origin_codes() {
        let codes: Vec<String> = GearKind::ALL.iter().map(|k| Occupancy::empty_for(*k).to_string()).collect();
        assert_eq!(codes, ["B0222", "B0202", "B2000", "B0000"]);
    }

    #[test]
    fn complement_pattern() {
        for kind in GearKind::ALL {
            assert!(Occupancy::empty_for(kind).matches_kind(kind));
        }
        assert!(!Occupancy::parse("B0000").unwrap().matches_kind(GearKind::G3));
        assert!(Occupancy::parse("B2100").unwrap().matches_kind(GearKind::G3));
    }

    #[test]
    fn rotation_wraps() {
        let b = Rotation::new(3).unwrap();
        assert_eq!(b.turned(1).get(), 0);
        assert_eq!(Rotation::new(0).unwrap().turned(-1).get(), 3);
        assert!(Rotation::new(4).is_err());
    }

    #[test]
    fn base_vectors_are_distinct() {
        for kind in GearKind::ALL {
            for b in Rotation::ALL {
                let g = PlacedGear::new(kind, b);
                let mut v: Vec<_> = g.base_vectors().map(|(_, v)| v).collect();
                v.sort();
                v.dedup();
                assert_eq!(v.len(), kind.origin_bases().len());
            }
        }
    }

    #[test]
    fn occupancy_parse_rejects_garbage() {
        assert!(Occupancy::parse("B013").is_none());
        assert!(Occupancy::parse("X0000").is_none());
        assert!(Occupancy::parse("B0300").is_none());
    }
}
