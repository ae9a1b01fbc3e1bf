//! Checksum strings (`J<n>_State-<events>-INV<dddd>`) and load checksums
//! (`Load_b:P<xy>=<b>;...`).

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::error::NotationError;
use crate::rules::{CellCoord, GameState, Inventory, Rotation, TurnEvent};

/// Descriptor used when a turn moves no mouse.
pub const NO_EVENT_DESCRIPTOR: &str = "Rotation";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ChecksumEvent {
    Out { mouse: u8 },
    At { mouse: u8, cell: CellCoord },
}

impl fmt::Display for ChecksumEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChecksumEvent::Out { mouse } => write!(f, "M{mouse}_OUT"),
            ChecksumEvent::At { mouse, cell } => write!(f, "M{mouse}@{cell}"),
        }
    }
}

/// A parsed or formatted state checksum.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct ChecksumString {
    pub move_number: u32,
    pub events: Vec<ChecksumEvent>,
    pub inventory: [u8; 4],
}

impl fmt::Display for ChecksumString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "J{}_State-", self.move_number)?;
        if self.events.is_empty() {
            f.write_str(NO_EVENT_DESCRIPTOR)?;
        }
        for (i, e) in self.events.iter().enumerate() {
            if i > 0 {
                f.write_str("_")?;
            }
            write!(f, "{e}")?;
        }
        f.write_str("-INV")?;
        for n in self.inventory {
            write!(f, "{n}")?;
        }
        Ok(())
    }
}

impl FromStr for ChecksumString {
    type Err = NotationError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = |why: &str| NotationError::Checksum(format!("{s:?}: {why}"));
        let rest = s.strip_prefix('J').ok_or_else(|| bad("missing J prefix"))?;
        let (num, rest) = rest.split_once("_State-").ok_or_else(|| bad("missing _State-"))?;
        let move_number = num.parse().map_err(|_| bad("bad move number"))?;
        let (desc, inv) = rest.rsplit_once("-INV").ok_or_else(|| bad("missing -INV"))?;
        if inv.len() != 4 || !inv.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad("inventory must be four digits"));
        }
        let mut inventory = [0u8; 4];
        for (i, b) in inv.bytes().enumerate() {
            inventory[i] = b - b'0';
        }
        let mut events = Vec::new();
        if desc != NO_EVENT_DESCRIPTOR {
            let tokens: Vec<&str> = desc.split('_').collect();
            let mut i = 0;
            while i < tokens.len() {
                let tok = tokens[i];
                let mouse_part = tok.strip_prefix('M').ok_or_else(|| bad("event must start with M"))?;
                if let Some((m, cell)) = mouse_part.split_once('@') {
                    let mouse = m.parse().map_err(|_| bad("bad mouse id"))?;
                    let cell = cell.parse().map_err(|_| bad("bad cell"))?;
                    events.push(ChecksumEvent::At { mouse, cell });
                    i += 1;
                } else if tokens.get(i + 1) == Some(&"OUT") {
                    let mouse = mouse_part.parse().map_err(|_| bad("bad mouse id"))?;
                    events.push(ChecksumEvent::Out { mouse });
                    i += 2;
                } else {
                    return Err(bad("unrecognised event"));
                }
            }
        }
        Ok(ChecksumString { move_number, events, inventory })
    }
}

impl From<ChecksumString> for String {
    fn from(c: ChecksumString) -> String {
        c.to_string()
    }
}

impl TryFrom<String> for ChecksumString {
    type Error = NotationError;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

fn event_class(e: &TurnEvent, height: u8) -> u8 {
    match e {
        TurnEvent::Exit { .. } => 0,
        TurnEvent::Jump { to_cell, .. } if to_cell.y == height => 1,
        TurnEvent::Jump { .. } => 2,
        TurnEvent::Entry { .. } => 3,
    }
}

/// Build the checksum of a turn.
///
/// Events are listed exits first, then jumps reaching the top row (`height`),
/// then other jumps, then entries; ascending mouse id inside each group.
pub fn format_checksum(
    move_number: u32,
    events: &[TurnEvent],
    inventory: &Inventory,
    height: u8,
) -> Result<ChecksumString, NotationError> {
    if let Some(n) = inventory.0.iter().find(|&&n| n > 9) {
        return Err(NotationError::Checksum(format!("inventory count {n} does not fit one digit")));
    }
    let mut sorted: Vec<&TurnEvent> = events.iter().collect();
    sorted.sort_by_key(|e| (event_class(e, height), e.mouse()));
    let events = sorted
        .into_iter()
        .map(|e| match *e {
            TurnEvent::Exit { mouse, .. } => ChecksumEvent::Out { mouse },
            TurnEvent::Jump { mouse, to_cell, .. } => ChecksumEvent::At { mouse, cell: to_cell },
            TurnEvent::Entry { mouse, cell, .. } => ChecksumEvent::At { mouse, cell },
        })
        .collect();
    Ok(ChecksumString { move_number, events, inventory: inventory.0 })
}

/// `Load_b:` listing of every gear's `b`, cells in canonical order.
pub fn format_load_checksum(state: &GameState) -> String {
    let body: Vec<String> = state.gears.iter().map(|(c, g)| format!("{c}={}", g.b)).collect();
    format!("Load_b:{}", body.join(";"))
}

pub fn parse_load_checksum(text: &str) -> Result<BTreeMap<CellCoord, Rotation>, NotationError> {
    let bad = |why: String| NotationError::Checksum(format!("{text:?}: {why}"));
    let body = text.strip_prefix("Load_b:").ok_or_else(|| bad("missing Load_b: prefix".into()))?;
    let mut out = BTreeMap::new();
    for item in body.split(';').filter(|s| !s.is_empty()) {
        let (cell, b) = item.split_once('=').ok_or_else(|| bad(format!("bad entry {item:?}")))?;
        let cell: CellCoord = cell.parse().map_err(bad)?;
        let b = b
            .parse::<u8>()
            .ok()
            .and_then(|b| Rotation::new(b).ok())
            .ok_or_else(|| bad(format!("bad rotation in {item:?}")))?;
        if out.insert(cell, b).is_some() {
            return Err(bad(format!("{cell} listed twice")));
        }
    }
    Ok(out)
}
