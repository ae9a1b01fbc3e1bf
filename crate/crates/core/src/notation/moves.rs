//! Move notation.
//!
//! ```text
//! G2@P21(b=0)+90            placement
//! G@P11-90                  rotation
//! G@P43:b=3 ; G@P11+90      pre-move then rotation
//! ```
//!
//! Any of them may carry a `J<n>:` prefix. Whitespace between tokens is ignored.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::error::NotationError;
use crate::rules::{CellCoord, GearKind, Move, Rotation, Spin};

/// One line of move notation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MoveText {
    pub index: Option<u32>,
    pub raw: String,
    pub mv: Move,
}

impl MoveText {
    /// Canonical rendering, with the `J<n>: ` prefix when an index is known.
    pub fn canonical(&self) -> String {
        match self.index {
            Some(i) => format!("J{i}: {}", format_move(&self.mv)),
            None => format_move(&self.mv),
        }
    }
}

struct Cursor<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(src: &'a str) -> Self {
        Cursor { src: src.as_bytes(), pos: 0 }
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T, NotationError> {
        Err(NotationError::Move { column: self.pos + 1, message: message.into() })
    }

    fn skip_ws(&mut self) {
        while self.src.get(self.pos).is_some_and(u8::is_ascii_whitespace) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek().is_some_and(|p| p.eq_ignore_ascii_case(&c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), NotationError> {
        if self.eat(c) {
            Ok(())
        } else {
            match self.peek() {
                Some(found) => self.err(format!("expected '{}', found '{}'", c as char, found as char)),
                None => self.err(format!("expected '{}', found end of input", c as char)),
            }
        }
    }

    fn digit(&mut self) -> Result<u8, NotationError> {
        match self.peek() {
            Some(d @ b'0'..=b'9') => {
                self.pos += 1;
                Ok(d - b'0')
            }
            _ => self.err("expected a digit"),
        }
    }

    fn number(&mut self) -> Result<u32, NotationError> {
        let mut n = self.digit()? as u32;
        while let Some(d @ b'0'..=b'9') = self.src.get(self.pos).copied() {
            self.pos += 1;
            n = n
                .checked_mul(10)
                .and_then(|n| n.checked_add((d - b'0') as u32))
                .ok_or(NotationError::Move { column: self.pos, message: "number too large".into() })?;
        }
        Ok(n)
    }

    fn cell(&mut self) -> Result<CellCoord, NotationError> {
        self.expect(b'P')?;
        let start = self.pos;
        let x = self.digit()?;
        let y = self.digit()?;
        if x == 0 || y == 0 {
            self.pos = start;
            return self.err("cell coordinates start at 1");
        }
        Ok(CellCoord::new(x, y))
    }

    fn rotation(&mut self) -> Result<Rotation, NotationError> {
        self.expect(b'b')?;
        self.expect(b'=')?;
        self.skip_ws();
        let start = self.pos;
        let b = self.number()?;
        if b > 3 {
            self.pos = start;
            return self.err(format!("b={b} outside 0..3"));
        }
        Ok(Rotation::new(b as u8).expect("range checked"))
    }

    fn spin(&mut self) -> Result<Spin, NotationError> {
        let sign = match self.peek() {
            Some(b'+') => Spin::Plus90,
            Some(b'-') => Spin::Minus90,
            _ => return self.err("expected spin +90 or -90"),
        };
        self.pos += 1;
        self.skip_ws();
        let start = self.pos;
        match self.number() {
            Ok(90) => Ok(sign),
            Ok(n) => {
                self.pos = start;
                self.err(format!("spin must be a quarter turn, got {n}"))
            }
            Err(_) => self.err("expected spin +90 or -90"),
        }
    }

    fn end(&mut self) -> Result<(), NotationError> {
        match self.peek() {
            None => Ok(()),
            Some(c) => self.err(format!("unexpected '{}' after move", c as char)),
        }
    }
}

fn parse_with_cursor(c: &mut Cursor<'_>) -> Result<(Option<u32>, Move), NotationError> {
    let mut index = None;
    if c.eat(b'J') {
        index = Some(c.number()?);
        c.expect(b':')?;
    }
    c.expect(b'G')?;
    let mv = match c.peek() {
        Some(b'1'..=b'4') => {
            let kind = GearKind::from_number(c.digit()?).expect("1..=4");
            c.expect(b'@')?;
            let cell = c.cell()?;
            c.expect(b'(')?;
            let initial_b = c.rotation()?;
            c.expect(b')')?;
            let spin = c.spin()?;
            Move::Placement { kind, cell, initial_b, spin }
        }
        Some(b'@') => {
            c.expect(b'@')?;
            let cell = c.cell()?;
            if c.eat(b':') {
                let premove_b = c.rotation()?;
                c.expect(b';')?;
                c.expect(b'G')?;
                c.expect(b'@')?;
                let rotation_cell = c.cell()?;
                let spin = c.spin()?;
                Move::PreMoveRotation { premove_cell: cell, premove_b, rotation_cell, spin }
            } else {
                Move::Rotation { cell, spin: c.spin()? }
            }
        }
        Some(d @ b'0'..=b'9') => return c.err(format!("gear type G{} does not exist", d as char)),
        _ => return c.err("expected gear type digit or '@'"),
    };
    c.end()?;
    Ok((index, mv))
}

/// Parse one move, with or without its `J<n>:` prefix.
pub fn parse_move(line: &str) -> Result<Move, NotationError> {
    parse_with_cursor(&mut Cursor::new(line)).map(|(_, mv)| mv)
}

/// Parse one move keeping its index and raw text.
pub fn parse_move_text(line: &str) -> Result<MoveText, NotationError> {
    let (index, mv) = parse_with_cursor(&mut Cursor::new(line))?;
    Ok(MoveText { index, raw: line.to_string(), mv })
}

/// Canonical notation, spaced like the published logs.
pub fn format_move(mv: &Move) -> String {
    match *mv {
        Move::Placement { kind, cell, initial_b, spin } => {
            format!("{kind}@{cell}(b={initial_b}){}", spin.as_str())
        }
        Move::Rotation { cell, spin } => format!("G@{cell}{}", spin.as_str()),
        Move::PreMoveRotation { premove_cell, premove_b, rotation_cell, spin } => {
            format!("G@{premove_cell}:b={premove_b} ; G@{rotation_cell}{}", spin.as_str())
        }
    }
}

/// Display adapter so moves can be used in format strings.
pub struct Notation<'a>(pub &'a Move);

impl fmt::Display for Notation<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_move(self.0))
    }
}
