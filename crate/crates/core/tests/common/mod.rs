#![allow(dead_code)]

use std::path::PathBuf;

use capsicaps_core::notation::{parse_game_log, parse_level, parse_state_tables};
use capsicaps_core::rules::{apply_move, GameState, Level, Move};
use capsicaps_core::CellCoord;

pub fn data(rel: &str) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(rel);
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

pub fn level(name: &str) -> Level {
    parse_level(&data(&format!("levels/{name}.toml"))).unwrap()
}

pub fn p(x: u8, y: u8) -> CellCoord {
    CellCoord::new(x, y)
}

/// State after move `j` of the Level-9 log, rebuilt from the printed table.
pub fn level9_pre(j: u32) -> GameState {
    parse_state_tables(&data(&format!("fixtures/level9-pre/J{j}.state"))).unwrap().to_state(&level("level9")).unwrap()
}

pub fn log_moves(name: &str) -> Vec<Move> {
    parse_game_log(&data(&format!("logs/{name}.log"))).unwrap().moves.into_iter().map(|m| m.mv).collect()
}

/// State after the first `n` moves of a log.
pub fn replay_prefix(level: &Level, moves: &[Move], n: usize) -> GameState {
    let mut s = GameState::initial(level).unwrap();
    for mv in &moves[..n] {
        s = apply_move(&s, mv).unwrap().final_state;
    }
    s
}
