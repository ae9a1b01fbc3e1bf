//! Independent second evaluator.
//!
//! A deliberately naive re-derivation of the turn rules that shares no code
//! with [`crate::rules::apply_move`]: a flat grid, raw degree arithmetic and a
//! brute-force scan of every base of every destination gear. It is used to
//! audit primary reports, verify declared events, and classify faults.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::rules::{CellCoord, EntryPhase, GameState, MouseStatus, Move, Spin, TurnEvent, TurnReport};

/// An event in the auditor's own vocabulary: coordinates and degrees.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum AuditEvent {
    Entry { mouse: u8, x: u8, y: u8, base: u16, pre_rotation: bool },
    Jump { mouse: u8, from: (u8, u8), from_base: u16, to: (u8, u8), landing: u16 },
    Exit { mouse: u8, from: (u8, u8), from_base: u16 },
}

impl AuditEvent {
    pub fn from_turn_event(e: &TurnEvent) -> AuditEvent {
        match *e {
            TurnEvent::Entry { mouse, cell, base, phase } => AuditEvent::Entry {
                mouse,
                x: cell.x,
                y: cell.y,
                base: base.degrees(),
                pre_rotation: phase == EntryPhase::PreRotation,
            },
            TurnEvent::Jump { mouse, from_cell, from_base, to_cell, landing_base } => AuditEvent::Jump {
                mouse,
                from: (from_cell.x, from_cell.y),
                from_base: from_base.degrees(),
                to: (to_cell.x, to_cell.y),
                landing: landing_base.degrees(),
            },
            TurnEvent::Exit { mouse, from_cell, from_base } => {
                AuditEvent::Exit { mouse, from: (from_cell.x, from_cell.y), from_base: from_base.degrees() }
            }
        }
    }
}

pub fn event_set(events: &[TurnEvent]) -> BTreeSet<AuditEvent> {
    events.iter().map(AuditEvent::from_turn_event).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct NGear {
    kind: u8,
    b: u8,
    /// Occupancy digits for origin 0, 90, 180, 270.
    slots: [u8; 4],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum NPos {
    Waiting,
    On { x: u8, y: u8, base: u16 },
    Out { x: u8, y: u8 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct NBoard {
    w: u8,
    h: u8,
    blocked: Vec<bool>,
    gears: Vec<Option<NGear>>,
    mice: Vec<NPos>,
    inv: [u8; 4],
    move_no: u32,
}

fn has_base(kind: u8, deg: u16) -> bool {
    match kind {
        1 => deg == 0,
        2 => deg == 0 || deg == 180,
        3 => deg != 0,
        _ => true,
    }
}

fn vector(base: u16, b: u8) -> u16 {
    (base + 90 * b as u16) % 360
}

const DEGREES: [u16; 4] = [0, 90, 180, 270];

impl NBoard {
    fn idx(&self, x: i32, y: i32) -> Option<usize> {
        if x < 1 || y < 1 || x > self.w as i32 || y > self.h as i32 {
            None
        } else {
            Some((y as usize - 1) * self.w as usize + (x as usize - 1))
        }
    }

    fn gear(&self, x: i32, y: i32) -> Option<&NGear> {
        self.idx(x, y).and_then(|i| self.gears[i].as_ref())
    }

    fn gear_mut(&mut self, x: u8, y: u8) -> &mut NGear {
        let i = self.idx(x as i32, y as i32).unwrap();
        self.gears[i].as_mut().unwrap()
    }

    fn gear_count(&self) -> usize {
        self.gears.iter().filter(|g| g.is_some()).count()
    }

    fn read(state: &GameState) -> NBoard {
        let lv = &state.level;
        let (w, h) = (lv.width, lv.height);
        let mut blocked = vec![false; w as usize * h as usize];
        let mut gears = vec![None; w as usize * h as usize];
        for y in 1..=h {
            for x in 1..=w {
                let i = (y as usize - 1) * w as usize + (x as usize - 1);
                let c = CellCoord::new(x, y);
                blocked[i] = lv.obstacles.contains(&c);
                if let Some(g) = state.gears.get(&c) {
                    let digits = g.occupancy.to_string();
                    let mut slots = [0u8; 4];
                    for (k, ch) in digits[1..].bytes().enumerate() {
                        slots[k] = ch - b'0';
                    }
                    gears[i] = Some(NGear { kind: g.kind.number(), b: g.b.get(), slots });
                }
            }
        }
        let mice = state
            .mice
            .iter()
            .map(|m| match m.status {
                MouseStatus::Waiting => NPos::Waiting,
                MouseStatus::InPlay { cell, base } => NPos::On { x: cell.x, y: cell.y, base: base.degrees() },
                MouseStatus::Victory { cell } => NPos::Out { x: cell.x, y: cell.y },
            })
            .collect();
        NBoard { w, h, blocked, gears, mice, inv: state.inventory.0, move_no: state.move_number }
    }

    fn components(&self) -> usize {
        let n = self.gears.len();
        let mut label: Vec<usize> = (0..n).collect();
        loop {
            let mut changed = false;
            for y in 1..=self.h as i32 {
                for x in 1..=self.w as i32 {
                    let i = self.idx(x, y).unwrap();
                    if self.gears[i].is_none() {
                        continue;
                    }
                    for (dx, dy) in [(1, 0), (-1, 0), (0, 1), (0, -1)] {
                        if let Some(j) = self.idx(x + dx, y + dy) {
                            if self.gears[j].is_some() && label[j] < label[i] {
                                label[i] = label[j];
                                changed = true;
                            }
                        }
                    }
                }
            }
            if !changed {
                break;
            }
        }
        let roots: BTreeSet<usize> = (0..n).filter(|&i| self.gears[i].is_some()).map(|i| label[i]).collect();
        roots.len()
    }
}

/// What the auditor computed for one move.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuditOutcome {
    pub events: BTreeSet<AuditEvent>,
    /// `b` of every gear right after the cascade.
    pub cascade: BTreeMap<(u8, u8), u8>,
    /// Mice in play when the jump wave was analysed.
    pub mice_in_play: usize,
    board: NBoard,
}

/// Re-derive a turn from scratch. Errors carry the violated rule id.
pub fn simulate(state: &GameState, mv: &Move) -> Result<AuditOutcome, &'static str> {
    let mut bd = NBoard::read(state);
    if bd.mice.iter().all(|m| matches!(m, NPos::Out { .. })) {
        return Err("game-over");
    }
    let stock: u32 = bd.inv.iter().map(|&n| n as u32).sum();
    let placing = matches!(mv, Move::Placement { .. });
    if (stock > 0) != placing {
        return Err("phase-violation");
    }
    let mut events = BTreeSet::new();
    let (ax, ay, spin) = match *mv {
        Move::Placement { kind, cell, initial_b, spin } => {
            let (x, y) = (cell.x as i32, cell.y as i32);
            let i = bd.idx(x, y).ok_or("out-of-board")?;
            if bd.blocked[i] {
                return Err("AVP-obstacle");
            }
            if bd.gears[i].is_some() {
                return Err("AVP-occupied");
            }
            if bd.gear_count() == 0 {
                if y != 1 {
                    return Err("AVP-first-row");
                }
            } else if ![(1, 0), (-1, 0), (0, 1), (0, -1)].iter().any(|(dx, dy)| bd.gear(x + dx, y + dy).is_some()) {
                return Err("AVP-adjacency");
            }
            let k = kind.number();
            if bd.inv[k as usize - 1] == 0 {
                return Err("inventory-underflow");
            }
            bd.inv[k as usize - 1] -= 1;
            let b = initial_b.get();
            let mut slots = [2u8; 4];
            for (s, deg) in DEGREES.iter().enumerate() {
                if has_base(k, *deg) {
                    slots[s] = 0;
                }
            }
            if y == 1 {
                let id = x as usize;
                if bd.mice.get(id - 1) == Some(&NPos::Waiting) {
                    for (s, deg) in DEGREES.iter().enumerate() {
                        if slots[s] == 0 && vector(*deg, b) == 180 {
                            slots[s] = 1;
                            bd.mice[id - 1] = NPos::On { x: x as u8, y: 1, base: *deg };
                            events.insert(AuditEvent::Entry {
                                mouse: id as u8,
                                x: x as u8,
                                y: 1,
                                base: *deg,
                                pre_rotation: true,
                            });
                            break;
                        }
                    }
                }
            }
            bd.gears[i] = Some(NGear { kind: k, b, slots });
            (cell.x, cell.y, spin)
        }
        Move::Rotation { cell, spin } => {
            if bd.gear(cell.x as i32, cell.y as i32).is_none() {
                return Err(if bd.idx(cell.x as i32, cell.y as i32).is_none() {
                    "out-of-board"
                } else {
                    "empty-cell-rotation"
                });
            }
            (cell.x, cell.y, spin)
        }
        Move::PreMoveRotation { premove_cell, premove_b, rotation_cell, spin } => {
            let (px, py) = (premove_cell.x as i32, premove_cell.y as i32);
            if bd.idx(px, py).is_none() {
                return Err("out-of-board");
            }
            if bd.gear(px, py).is_none() {
                return Err("empty-cell-premove");
            }
            let (rx, ry) = (rotation_cell.x as i32, rotation_cell.y as i32);
            if bd.idx(rx, ry).is_none() {
                return Err("out-of-board");
            }
            if bd.gear(rx, ry).is_none() {
                return Err("empty-cell-rotation");
            }
            bd.gear_mut(premove_cell.x, premove_cell.y).b = premove_b.get();
            (rotation_cell.x, rotation_cell.y, spin)
        }
    };

    if bd.components() > 1 {
        return Err("FMTC-connectivity");
    }

    let step: i32 = if spin == Spin::Plus90 { 1 } else { -1 };
    let parity = (ax + ay) % 2;
    let mut cascade = BTreeMap::new();
    for y in 1..=bd.h {
        for x in 1..=bd.w {
            let i = bd.idx(x as i32, y as i32).unwrap();
            if let Some(g) = bd.gears[i].as_mut() {
                let s = if (x + y) % 2 == parity { step } else { -step };
                g.b = ((g.b as i32 + s).rem_euclid(4)) as u8;
                cascade.insert((x, y), g.b);
            }
        }
    }

    let frozen = bd.clone();
    let mut wave = Vec::new();
    let mut in_play = 0;
    for (k, pos) in frozen.mice.iter().enumerate() {
        let id = k as u8 + 1;
        match *pos {
            NPos::On { x, y, base } => {
                in_play += 1;
                let g = frozen.gear(x as i32, y as i32).expect("mouse stands on a gear");
                let v = vector(base, g.b);
                if y == frozen.h && v == 0 {
                    wave.push(AuditEvent::Exit { mouse: id, from: (x, y), from_base: base });
                    continue;
                }
                let (dx, dy) = match v {
                    0 => (x as i32, y as i32 + 1),
                    90 => (x as i32 - 1, y as i32),
                    180 => (x as i32, y as i32 - 1),
                    _ => (x as i32 + 1, y as i32),
                };
                let Some(di) = frozen.idx(dx, dy) else { continue };
                if frozen.blocked[di] {
                    continue;
                }
                let Some(dg) = frozen.gears[di] else { continue };
                let want = (v + 180) % 360;
                let mut found = Vec::new();
                for (s, deg) in DEGREES.iter().enumerate() {
                    if dg.slots[s] == 0 && vector(*deg, dg.b) == want {
                        found.push(*deg);
                    }
                }
                if let Some(&landing) = found.first() {
                    wave.push(AuditEvent::Jump {
                        mouse: id,
                        from: (x, y),
                        from_base: base,
                        to: (dx as u8, dy as u8),
                        landing,
                    });
                }
            }
            NPos::Waiting => {
                if let Some(g) = frozen.gear(id as i32, 1) {
                    for (s, deg) in DEGREES.iter().enumerate() {
                        if g.slots[s] == 0 && vector(*deg, g.b) == 180 {
                            wave.push(AuditEvent::Entry { mouse: id, x: id, y: 1, base: *deg, pre_rotation: false });
                            break;
                        }
                    }
                }
            }
            NPos::Out { .. } => {}
        }
    }

    let mut landings = BTreeSet::new();
    for e in &wave {
        let spot = match *e {
            AuditEvent::Entry { x, y, base, .. } => Some((x, y, base)),
            AuditEvent::Jump { to, landing, .. } => Some((to.0, to.1, landing)),
            AuditEvent::Exit { .. } => None,
        };
        if let Some(s) = spot {
            if !landings.insert(s) {
                return Err("jump-conflict");
            }
        }
    }

    let slot_of = |deg: u16| (deg / 90) as usize;
    for e in &wave {
        match *e {
            AuditEvent::Jump { from, from_base, .. } | AuditEvent::Exit { from, from_base, .. } => {
                bd.gear_mut(from.0, from.1).slots[slot_of(from_base)] = 0;
            }
            AuditEvent::Entry { .. } => {}
        }
    }
    for e in &wave {
        match *e {
            AuditEvent::Entry { mouse, x, y, base, .. } => {
                bd.gear_mut(x, y).slots[slot_of(base)] = 1;
                bd.mice[mouse as usize - 1] = NPos::On { x, y, base };
            }
            AuditEvent::Jump { mouse, to, landing, .. } => {
                bd.gear_mut(to.0, to.1).slots[slot_of(landing)] = 1;
                bd.mice[mouse as usize - 1] = NPos::On { x: to.0, y: to.1, base: landing };
            }
            AuditEvent::Exit { mouse, from, .. } => {
                bd.mice[mouse as usize - 1] = NPos::Out { x: from.0, y: bd.h + 1 };
            }
        }
    }
    events.extend(wave);
    bd.move_no += 1;
    Ok(AuditOutcome { events, cascade, mice_in_play: in_play, board: bd })
}

/// One disagreement between the auditor and a claimed report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Discrepancy {
    pub field: String,
    pub cell: Option<CellCoord>,
    pub auditor: String,
    pub claimed: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", content = "discrepancies", rename_all = "snake_case")]
pub enum AuditVerdict {
    Concordance,
    Discrepancies(Vec<Discrepancy>),
}

impl AuditVerdict {
    pub fn is_concordant(&self) -> bool {
        matches!(self, AuditVerdict::Concordance)
    }
}

fn gear_text(g: Option<&NGear>) -> String {
    match g {
        None => "no gear".into(),
        Some(g) => format!("G{} b={} B{}{}{}{}", g.kind, g.b, g.slots[0], g.slots[1], g.slots[2], g.slots[3]),
    }
}

fn pos_text(p: &NPos) -> String {
    match p {
        NPos::Waiting => "waiting".into(),
        NPos::On { x, y, base } => format!("P{x}{y} base {base}"),
        NPos::Out { x, y } => format!("out at P{x}{y}"),
    }
}

/// Mutual consistency of the gear and mouse tables of one state.
pub fn cross_consistency(state: &GameState) -> Vec<Discrepancy> {
    let bd = NBoard::read(state);
    let mut out = Vec::new();
    let mut claimed_slots = BTreeSet::new();
    for (k, m) in bd.mice.iter().enumerate() {
        if let NPos::On { x, y, base } = *m {
            let cell = Some(CellCoord::new(x, y));
            match bd.gear(x as i32, y as i32) {
                Some(g) if g.slots[(base / 90) as usize] == 1 => {}
                g => out.push(Discrepancy {
                    field: "cross-consistency".into(),
                    cell,
                    auditor: format!("M{} needs an occupied base {base}", k + 1),
                    claimed: gear_text(g),
                }),
            }
            if !claimed_slots.insert((x, y, base)) {
                out.push(Discrepancy {
                    field: "cross-consistency".into(),
                    cell,
                    auditor: "one mouse per base".into(),
                    claimed: format!("base {base} shared"),
                });
            }
        }
    }
    for y in 1..=bd.h {
        for x in 1..=bd.w {
            if let Some(g) = bd.gear(x as i32, y as i32) {
                for (s, deg) in DEGREES.iter().enumerate() {
                    if g.slots[s] == 1 && !claimed_slots.contains(&(x, y, *deg)) {
                        out.push(Discrepancy {
                            field: "cross-consistency".into(),
                            cell: Some(CellCoord::new(x, y)),
                            auditor: format!("no mouse on base {deg}"),
                            claimed: gear_text(Some(g)),
                        });
                    }
                }
            }
        }
    }
    out
}

/// Audit a claimed report for `mv` on `initial`.
pub fn audit(initial: &GameState, mv: &Move, claimed: &TurnReport) -> AuditVerdict {
    compare(&simulate(initial, mv), mv, claimed)
}

/// Compare an auditor run (or its rejection) with a claimed report.
pub fn compare(mine: &Result<AuditOutcome, &'static str>, mv: &Move, claimed: &TurnReport) -> AuditVerdict {
    let mut out = Vec::new();
    let mine = match mine {
        Ok(o) => o,
        Err(rule) => {
            out.push(Discrepancy {
                field: "legality".into(),
                cell: Some(mv.activated_cell()),
                auditor: format!("illegal ({rule})"),
                claimed: "legal".into(),
            });
            return AuditVerdict::Discrepancies(out);
        }
    };
    if claimed.mv != *mv {
        out.push(Discrepancy {
            field: "move".into(),
            cell: None,
            auditor: format!("{mv:?}"),
            claimed: format!("{:?}", claimed.mv),
        });
    }
    let theirs = event_set(&claimed.events());
    if theirs != mine.events {
        for e in mine.events.difference(&theirs) {
            out.push(Discrepancy {
                field: "events".into(),
                cell: None,
                auditor: format!("{e:?}"),
                claimed: "missing".into(),
            });
        }
        for e in theirs.difference(&mine.events) {
            out.push(Discrepancy {
                field: "events".into(),
                cell: None,
                auditor: "absent".into(),
                claimed: format!("{e:?}"),
            });
        }
    }
    for (&(x, y), &b) in &mine.cascade {
        let cell = CellCoord::new(x, y);
        let claimed_b = claimed.rotation_deltas.get(&cell).map(|(_, after)| after.get());
        if claimed_b != Some(b) {
            out.push(Discrepancy {
                field: "rotation".into(),
                cell: Some(cell),
                auditor: format!("b={b}"),
                claimed: claimed_b.map_or("missing".into(), |b| format!("b={b}")),
            });
        }
    }
    if claimed.audits.len() != mine.mice_in_play {
        out.push(Discrepancy {
            field: "audit-coverage".into(),
            cell: None,
            auditor: format!("{} mice in play", mine.mice_in_play),
            claimed: format!("{} audit entries", claimed.audits.len()),
        });
    }

    let fin = NBoard::read(&claimed.final_state);
    let expect = &mine.board;
    if fin.w != expect.w || fin.h != expect.h || fin.blocked != expect.blocked {
        out.push(Discrepancy {
            field: "level".into(),
            cell: None,
            auditor: format!("{}x{}", expect.w, expect.h),
            claimed: format!("{}x{}", fin.w, fin.h),
        });
    } else {
        for y in 1..=expect.h {
            for x in 1..=expect.w {
                let (a, c) = (expect.gear(x as i32, y as i32), fin.gear(x as i32, y as i32));
                if a != c {
                    out.push(Discrepancy {
                        field: "gear".into(),
                        cell: Some(CellCoord::new(x, y)),
                        auditor: gear_text(a),
                        claimed: gear_text(c),
                    });
                }
            }
        }
    }
    for k in 0..expect.mice.len().max(fin.mice.len()) {
        let (a, c) = (expect.mice.get(k), fin.mice.get(k));
        if a != c {
            let cell = match (a, c) {
                (_, Some(NPos::On { x, y, .. })) | (Some(NPos::On { x, y, .. }), _) => Some(CellCoord::new(*x, *y)),
                _ => None,
            };
            out.push(Discrepancy {
                field: format!("mouse M{}", k + 1),
                cell,
                auditor: a.map_or("missing".into(), pos_text),
                claimed: c.map_or("missing".into(), pos_text),
            });
        }
    }
    if fin.inv != expect.inv {
        out.push(Discrepancy {
            field: "inventory".into(),
            cell: None,
            auditor: format!("{:?}", expect.inv),
            claimed: format!("{:?}", fin.inv),
        });
    }
    if fin.move_no != expect.move_no || claimed.move_number != expect.move_no {
        out.push(Discrepancy {
            field: "move number".into(),
            cell: None,
            auditor: expect.move_no.to_string(),
            claimed: claimed.move_number.to_string(),
        });
    }
    out.extend(cross_consistency(&claimed.final_state));
    if out.is_empty() {
        AuditVerdict::Concordance
    } else {
        AuditVerdict::Discrepancies(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rules::{apply_move, GearKind, Inventory, Level, Rotation};

    fn p(x: u8, y: u8) -> CellCoord {
        CellCoord::new(x, y)
    }

    #[test]
    fn agrees_on_a_first_placement() {
        let lv = Level::new(1, 2, 2, Default::default(), Inventory([0, 1, 1, 0])).unwrap();
        let s = GameState::initial(&lv).unwrap();
        let mv = Move::Placement { kind: GearKind::G2, cell: p(1, 1), initial_b: Rotation::ALL[0], spin: Spin::Plus90 };
        let r = apply_move(&s, &mv).unwrap();
        assert_eq!(audit(&s, &mv, &r), AuditVerdict::Concordance);
        assert_eq!(simulate(&s, &mv).unwrap().events, event_set(&r.events()));
    }

    #[test]
    fn flags_a_tampered_rotation() {
        let lv = Level::new(1, 2, 2, Default::default(), Inventory([0, 1, 1, 0])).unwrap();
        let s = GameState::initial(&lv).unwrap();
        let mv =
            Move::Placement { kind: GearKind::G3, cell: p(2, 1), initial_b: Rotation::ALL[1], spin: Spin::Minus90 };
        let mut r = apply_move(&s, &mv).unwrap();
        let g = r.final_state.gears.get_mut(&p(2, 1)).unwrap();
        g.b = g.b.turned(1);
        match audit(&s, &mv, &r) {
            AuditVerdict::Discrepancies(d) => {
                assert!(d.iter().any(|d| d.field == "gear" && d.cell == Some(p(2, 1))), "{d:?}");
            }
            v => panic!("{v:?}"),
        }
    }

    #[test]
    fn names_illegal_moves() {
        let lv = Level::new(1, 2, 2, [p(1, 2)].into_iter().collect(), Inventory([1, 0, 0, 0])).unwrap();
        let s = GameState::initial(&lv).unwrap();
        let mv = Move::Placement { kind: GearKind::G1, cell: p(1, 2), initial_b: Rotation::ALL[0], spin: Spin::Plus90 };
        assert_eq!(simulate(&s, &mv).unwrap_err(), "AVP-obstacle");
        let mv = Move::Rotation { cell: p(1, 1), spin: Spin::Plus90 };
        assert_eq!(simulate(&s, &mv).unwrap_err(), "phase-violation");
    }
}
