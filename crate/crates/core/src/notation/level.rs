//! Level headers: obstacle bit maps, inventory codes and level files.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::error::NotationError;
use crate::rules::{CellCoord, Inventory, Level};

/// Parse an obstacle map. Rows are read bottom to top, each left to right;
/// `0` marks an obstacle.
pub fn parse_obstacle_map(bits: &str, width: u8, height: u8) -> Result<BTreeSet<CellCoord>, NotationError> {
    let expected = width as usize * height as usize;
    if bits.len() != expected {
        return Err(NotationError::ObstacleMap(format!(
            "{} characters for a {width}x{height} board, expected {expected}",
            bits.len()
        )));
    }
    let mut obstacles = BTreeSet::new();
    for (i, c) in bits.chars().enumerate() {
        let x = (i % width as usize) as u8 + 1;
        let y = (i / width as usize) as u8 + 1;
        match c {
            '1' => {}
            '0' => {
                obstacles.insert(CellCoord::new(x, y));
            }
            other => {
                return Err(NotationError::ObstacleMap(format!("invalid character {other:?} at position {}", i + 1)))
            }
        }
    }
    Ok(obstacles)
}

pub fn format_obstacle_map(level: &Level) -> String {
    (1..=level.height)
        .flat_map(|y| (1..=level.width).map(move |x| CellCoord::new(x, y)))
        .map(|c| if level.is_obstacle(c) { '0' } else { '1' })
        .collect()
}

/// Parse an 8-digit inventory code: two digits each for G1..G4.
pub fn parse_inventory(code: &str) -> Result<Inventory, NotationError> {
    if code.len() != 8 || !code.bytes().all(|b| b.is_ascii_digit()) {
        return Err(NotationError::Inventory(format!("{code:?} is not 8 decimal digits")));
    }
    let mut counts = [0u8; 4];
    for (i, pair) in code.as_bytes().chunks(2).enumerate() {
        counts[i] = (pair[0] - b'0') * 10 + (pair[1] - b'0');
    }
    Ok(Inventory(counts))
}

pub fn format_inventory(inv: &Inventory) -> String {
    inv.0.iter().map(|n| format!("{n:02}")).collect()
}

/// On-disk level definition, using the header encodings verbatim.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LevelFile {
    pub id: u32,
    pub width: u8,
    pub height: u8,
    pub obstacle_map: String,
    pub inventory: String,
}

impl LevelFile {
    pub fn to_level(&self) -> Result<Level, NotationError> {
        let obstacles = parse_obstacle_map(&self.obstacle_map, self.width, self.height)?;
        let inventory = parse_inventory(&self.inventory)?;
        Ok(Level::new(self.id, self.width, self.height, obstacles, inventory)?)
    }

    pub fn from_level(level: &Level) -> Self {
        LevelFile {
            id: level.id,
            width: level.width,
            height: level.height,
            obstacle_map: format_obstacle_map(level),
            inventory: format_inventory(&level.inventory),
        }
    }
}

/// Parse a TOML level file.
pub fn parse_level(text: &str) -> Result<Level, NotationError> {
    let file: LevelFile = toml::from_str(text).map_err(|e| NotationError::LevelFile(e.to_string()))?;
    file.to_level()
}

pub fn format_level(level: &Level) -> String {
    toml::to_string(&LevelFile::from_level(level)).expect("level file serializes")
}
