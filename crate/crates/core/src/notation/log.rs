//! Plain-text game logs: one move per line, optional `---` header and footer.

use serde::{Deserialize, Serialize};

use super::error::NotationError;
use super::moves::{parse_move_text, MoveText};

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct GameLog {
    /// Text of the first `--- ... ---` line, if any.
    pub title: Option<String>,
    pub moves: Vec<MoveText>,
}

impl GameLog {
    pub fn len(&self) -> usize {
        self.moves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.moves.is_empty()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        if let Some(t) = &self.title {
            out.push_str(&format!("--- {t} ---\n"));
        }
        for m in &self.moves {
            out.push_str(&m.canonical());
            out.push('\n');
        }
        out
    }
}

/// Parse a game log. Move indices, when present, must run 1..N without gaps;
/// lines without an index take the next one.
pub fn parse_game_log(text: &str) -> Result<GameLog, NotationError> {
    let mut log = GameLog::default();
    for (i, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        if let Some(inner) = trimmed.strip_prefix("---") {
            if log.title.is_none() && log.moves.is_empty() {
                let t = inner.trim_end_matches('-').trim();
                if !t.is_empty() {
                    log.title = Some(t.to_string());
                }
            }
            continue;
        }
        let mut mt = parse_move_text(trimmed).map_err(|e| e.at_line(i + 1))?;
        let expected = log.moves.len() as u32 + 1;
        match mt.index {
            Some(n) if n != expected => {
                return Err(NotationError::Log(format!("move J{n} where J{expected} was expected")).at_line(i + 1));
            }
            Some(_) => {}
            None => mt.index = Some(expected),
        }
        log.moves.push(mt);
    }
    Ok(log)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_footer_and_comments() {
        let text =
            "--- GAME LOG: LEVEL 9 ---\n\n# note\nJ1: G4@P21(b=2)+90\nJ2: G2@P31(b=0)-90\n--- END OF RECORD ---\n";
        let log = parse_game_log(text).unwrap();
        assert_eq!(log.title.as_deref(), Some("GAME LOG: LEVEL 9"));
        assert_eq!(log.len(), 2);
        assert_eq!(parse_game_log(&log.to_text()).unwrap().moves.len(), 2);
    }

    #[test]
    fn empty_body() {
        assert!(parse_game_log("--- GAME LOG ---\n--- END ---\n").unwrap().is_empty());
        assert!(parse_game_log("").unwrap().is_empty());
    }

    #[test]
    fn gaps_and_bad_lines_report_line_numbers() {
        let err = parse_game_log("J1: G@P11+90\nJ3: G@P11+90\n").unwrap_err();
        assert!(matches!(err, NotationError::Line { line: 2, .. }), "{err}");
        let err = parse_game_log("J1: G@P11+90\n\nJ2: G@P11+45\n").unwrap_err();
        assert!(matches!(err, NotationError::Line { line: 3, .. }), "{err}");
    }

    #[test]
    fn unindexed_lines_are_numbered() {
        let log = parse_game_log("G@P11+90\nG@P11-90\n").unwrap();
        assert_eq!(log.moves[1].index, Some(2));
    }
}
