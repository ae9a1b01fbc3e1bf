//! The textual state dump (Game State Table, Mouse State Table, Virtual
//! Board, inventory line), its parser, and field-exact comparison.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::error::NotationError;
use crate::rules::{
    CellCoord, Direction, GameState, GearKind, Inventory, Level, Mouse, MouseStatus, Occupancy, PlacedGear, Rotation,
};

/// The content of a state dump, independent of its typography.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateTables {
    pub move_number: Option<u32>,
    pub checksum: Option<String>,
    pub gears: BTreeMap<CellCoord, PlacedGear>,
    pub mice: Vec<Mouse>,
    pub inventory: Inventory,
}

impl StateTables {
    pub fn from_state(state: &GameState, checksum: Option<String>) -> Self {
        StateTables {
            move_number: Some(state.move_number),
            checksum,
            gears: state.gears.clone(),
            mice: state.mice.clone(),
            inventory: state.inventory,
        }
    }

    /// Rebuild a full state on `level`. The result is checked against the
    /// state invariants.
    pub fn to_state(&self, level: &Level) -> Result<GameState, NotationError> {
        let mut state = GameState::initial(level)?;
        state.gears = self.gears.clone();
        state.mice = self.mice.clone();
        state.inventory = self.inventory;
        state.move_number = self.move_number.unwrap_or(0);
        state.check_invariants().map_err(|v| NotationError::Table(v.to_string()))?;
        Ok(state)
    }

    /// Field-by-field differences against `actual`; empty when they agree.
    pub fn diff(&self, actual: &GameState) -> Vec<String> {
        let mut out = Vec::new();
        let cells: std::collections::BTreeSet<CellCoord> =
            self.gears.keys().chain(actual.gears.keys()).copied().collect();
        for cell in cells {
            match (self.gears.get(&cell), actual.gears.get(&cell)) {
                (Some(e), Some(a)) => {
                    if e.kind != a.kind {
                        out.push(format!("{cell}: kind expected {} got {}", e.kind, a.kind));
                    }
                    if e.b != a.b {
                        out.push(format!("{cell}: b expected {} got {}", e.b, a.b));
                    }
                    if e.occupancy != a.occupancy {
                        out.push(format!("{cell}: occupancy expected {} got {}", e.occupancy, a.occupancy));
                    }
                }
                (Some(e), None) => out.push(format!("{cell}: expected {} but no gear", e.label(cell))),
                (None, Some(a)) => out.push(format!("{cell}: unexpected gear {}", a.label(cell))),
                (None, None) => {}
            }
        }
        for (i, e) in self.mice.iter().enumerate() {
            match actual.mice.get(i) {
                Some(a) if a == e => {}
                Some(a) => out.push(format!("M{}: expected {} got {}", e.id, describe_mouse(e), describe_mouse(a))),
                None => out.push(format!("M{}: missing", e.id)),
            }
        }
        for a in actual.mice.iter().skip(self.mice.len()) {
            out.push(format!("M{}: unexpected mouse", a.id));
        }
        if self.inventory != actual.inventory {
            out.push(format!("inventory: expected {} got {}", self.inventory, actual.inventory));
        }
        out
    }
}

fn describe_mouse(m: &Mouse) -> String {
    match m.status {
        MouseStatus::Waiting => format!("Waiting at {}", m.display_cell()),
        MouseStatus::InPlay { cell, base } => format!("In Play at {cell} base {base}"),
        MouseStatus::Victory { cell } => format!("Victory at {cell}"),
    }
}

/// Render the state dump. `checksum` adds a `Checksum:` line.
pub fn render_state(state: &GameState, checksum: Option<&str>) -> String {
    let mut s = String::new();
    writeln!(s, "Move: J{}", state.move_number).unwrap();
    if let Some(c) = checksum {
        writeln!(s, "Checksum: {c}").unwrap();
    }
    s.push_str("\nGame State Table\nCell_ID | Immutable_Prefix | Dynamic_Rotation | Dynamic_Occupancy\n");
    if state.gears.is_empty() {
        let first = CellCoord::new(1, 1);
        let last = CellCoord::new(state.level.width, state.level.height);
        writeln!(s, "{first}-{last} | (empty) | (none) | (none)").unwrap();
    }
    for (cell, g) in &state.gears {
        writeln!(s, "{cell} | {} | {} | {}", g.prefix(*cell), g.b, g.occupancy).unwrap();
    }
    s.push_str("\nMouse State Table\nMouse_ID | State | Current_Cell | Gear_ID | Occupied_Origin_Base\n");
    for m in &state.mice {
        let (status, gear, base) = match m.status {
            MouseStatus::Waiting => ("Waiting", "(none)".to_string(), "(none)".to_string()),
            MouseStatus::InPlay { cell, base } => ("In Play", state.gears[&cell].prefix(cell), base.to_string()),
            MouseStatus::Victory { .. } => ("Victory", "(none)".to_string(), "(none)".to_string()),
        };
        writeln!(s, "M{} | {status} | {} | {gear} | {base}", m.id, m.display_cell()).unwrap();
    }
    s.push_str("\nVirtual Board\n");
    for y in (1..=state.level.height).rev() {
        write!(s, "y={y}: ").unwrap();
        for x in 1..=state.level.width {
            let cell = CellCoord::new(x, y);
            let content = if state.level.is_obstacle(cell) {
                "obstacle".to_string()
            } else if let Some(g) = state.gears.get(&cell) {
                let mut c = g.label(cell);
                for m in &state.mice {
                    if matches!(m.status, MouseStatus::InPlay { cell: mc, .. } if mc == cell) {
                        write!(c, " M{}", m.id).unwrap();
                    }
                }
                c
            } else {
                cell.to_string()
            };
            write!(s, "[{content:^12}]").unwrap();
        }
        s.push('\n');
    }
    writeln!(s, "\nCurrent Inventory: {}", state.inventory).unwrap();
    s
}

#[derive(Clone, Copy, PartialEq)]
enum Section {
    Header,
    Gears,
    Mice,
    Board,
}

fn parse_degrees(s: &str) -> Option<Direction> {
    let digits = s.trim_end_matches(['º', '°']);
    Direction::from_degrees(digits.parse().ok()?)
}

fn parse_prefix(prefix: &str, cell: CellCoord) -> Result<GearKind, String> {
    let rest = prefix.strip_prefix('G').ok_or("prefix must start with G")?;
    let kind = rest.get(..1).and_then(|d| d.parse().ok()).and_then(GearKind::from_number).ok_or("bad gear type")?;
    let expected = format!("{kind}{cell}{}", cell.square_type());
    if prefix != expected {
        return Err(format!("prefix {prefix} does not match {expected}"));
    }
    Ok(kind)
}

fn parse_inventory_line(s: &str) -> Option<Inventory> {
    let body = s.trim().strip_prefix('{')?.strip_suffix('}')?;
    let mut counts = [0u8; 4];
    let mut seen = [false; 4];
    for item in body.split(',') {
        let (k, v) = item.split_once(':')?;
        let kind = GearKind::from_number(k.trim().strip_prefix('G')?.parse().ok()?)?;
        counts[kind.index()] = v.trim().parse().ok()?;
        seen[kind.index()] = true;
    }
    seen.iter().all(|s| *s).then_some(Inventory(counts))
}

/// Parse a state dump. The Virtual Board section is ignored.
pub fn parse_state_tables(text: &str) -> Result<StateTables, NotationError> {
    let mut section = Section::Header;
    let mut tables = StateTables {
        move_number: None,
        checksum: None,
        gears: BTreeMap::new(),
        mice: Vec::new(),
        inventory: Inventory::default(),
    };
    let mut inventory_seen = false;
    for (i, line) in text.lines().enumerate() {
        let fail = |msg: String| NotationError::Table(msg).at_line(i + 1);
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(v) = line.strip_prefix("Move:") {
            let v = v.trim().trim_start_matches('J');
            tables.move_number = Some(v.parse().map_err(|_| fail(format!("bad move number {v:?}")))?);
            continue;
        }
        if let Some(v) = line.strip_prefix("Checksum:") {
            tables.checksum = Some(v.trim().to_string());
            continue;
        }
        if let Some(v) = line.strip_prefix("Current Inventory:") {
            tables.inventory = parse_inventory_line(v).ok_or_else(|| fail(format!("bad inventory {v:?}")))?;
            inventory_seen = true;
            continue;
        }
        match line {
            "Game State Table" => {
                section = Section::Gears;
                continue;
            }
            "Mouse State Table" => {
                section = Section::Mice;
                continue;
            }
            "Virtual Board" => {
                section = Section::Board;
                continue;
            }
            _ => {}
        }
        if line.starts_with("Cell_ID") || line.starts_with("Mouse_ID") {
            continue;
        }
        let cols: Vec<&str> = line.split('|').map(str::trim).collect();
        match section {
            Section::Header | Section::Board => {}
            Section::Gears => {
                if cols.get(1) == Some(&"(empty)") {
                    continue;
                }
                let [cell, prefix, b, occ] = cols[..] else {
                    return Err(fail(format!("expected 4 columns, got {}", cols.len())));
                };
                let cell: CellCoord = cell.parse().map_err(fail)?;
                let kind = parse_prefix(prefix, cell).map_err(fail)?;
                let b = b
                    .parse::<u8>()
                    .ok()
                    .and_then(|b| Rotation::new(b).ok())
                    .ok_or_else(|| fail(format!("bad rotation {b:?}")))?;
                let occupancy = Occupancy::parse(occ).ok_or_else(|| fail(format!("bad occupancy {occ:?}")))?;
                if !occupancy.matches_kind(kind) {
                    return Err(fail(format!("{occ} does not fit {kind}")));
                }
                if tables.gears.insert(cell, PlacedGear { kind, b, occupancy }).is_some() {
                    return Err(fail(format!("{cell} listed twice")));
                }
            }
            Section::Mice => {
                let [id, state, cell, gear, base] = cols[..] else {
                    return Err(fail(format!("expected 5 columns, got {}", cols.len())));
                };
                let id: u8 = id
                    .strip_prefix('M')
                    .and_then(|n| n.parse().ok())
                    .ok_or_else(|| fail(format!("bad mouse id {id:?}")))?;
                let status = match state {
                    "Waiting" => MouseStatus::Waiting,
                    "Victory" | "Victoria" => MouseStatus::Victory { cell: cell.parse().map_err(fail)? },
                    "In Play" => {
                        let cell: CellCoord = cell.parse().map_err(fail)?;
                        let base = parse_degrees(base).ok_or_else(|| fail(format!("bad base {base:?}")))?;
                        let g = tables
                            .gears
                            .get(&cell)
                            .ok_or_else(|| fail(format!("M{id} on {cell} which has no gear")))?;
                        if gear != g.prefix(cell) {
                            return Err(fail(format!("gear id {gear} does not match {}", g.prefix(cell))));
                        }
                        MouseStatus::InPlay { cell, base }
                    }
                    other => return Err(fail(format!("unknown mouse state {other:?}"))),
                };
                tables.mice.push(Mouse { id, status });
            }
        }
    }
    if !inventory_seen {
        return Err(NotationError::Table("missing Current Inventory line".into()));
    }
    Ok(tables)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rules::Inventory;

    fn level() -> Level {
        Level::new(1, 2, 2, Default::default(), Inventory([0, 0, 1, 1])).unwrap()
    }

    #[test]
    fn render_parse_round_trip() {
        let lv = level();
        let mut state = GameState::initial(&lv).unwrap();
        let text = render_state(&state, None);
        assert!(text.contains("P11-P22 | (empty)"));
        let t = parse_state_tables(&text).unwrap();
        assert!(t.diff(&state).is_empty());

        state.gears.insert(CellCoord::new(1, 1), PlacedGear::new(GearKind::G3, Rotation::new(2).unwrap()));
        state.inventory = Inventory([0, 0, 0, 1]);
        let text = render_state(&state, Some("J1_State-Rotation-INV0001"));
        let t = parse_state_tables(&text).unwrap();
        assert_eq!(t.checksum.as_deref(), Some("J1_State-Rotation-INV0001"));
        assert_eq!(t.to_state(&lv).unwrap().gears, state.gears);
    }

    #[test]
    fn diff_names_cells() {
        let lv = level();
        let mut state = GameState::initial(&lv).unwrap();
        state.gears.insert(CellCoord::new(1, 1), PlacedGear::new(GearKind::G3, Rotation::new(2).unwrap()));
        let t = StateTables::from_state(&state, None);
        state.gears.get_mut(&CellCoord::new(1, 1)).unwrap().b = Rotation::new(1).unwrap();
        assert_eq!(t.diff(&state), vec!["P11: b expected 2 got 1".to_string()]);
    }

    #[test]
    fn accepts_spelling_variants() {
        let text = "Game State Table\nP11 | G1P11R | 0 | B1222\n\nMouse State Table\n\
                    M1 | In Play | P11 | G1P11R | 0\nM2 | Victoria | P23 | (none) | (none)\n\
                    Current Inventory: { G1: 0, G2: 0, G3: 0, G4: 0 }\n";
        let t = parse_state_tables(text).unwrap();
        assert_eq!(t.mice[1].status, MouseStatus::Victory { cell: CellCoord::new(2, 3) });
    }

    #[test]
    fn rejects_inconsistent_prefix() {
        let text = "Game State Table\nP11 | G1P11L | 0 | B0222\nCurrent Inventory: { G1: 0, G2: 0, G3: 0, G4: 0 }\n";
        assert!(parse_state_tables(text).is_err());
    }
}
