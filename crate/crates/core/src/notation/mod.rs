//! Textual formats: moves, level headers, checksums, game logs and state
//! tables. Everything here is a pure function of its input.

mod checksum;
mod error;
mod level;
mod log;
mod moves;
mod table;

pub use checksum::{
    format_checksum, format_load_checksum, parse_load_checksum, ChecksumEvent, ChecksumString, NO_EVENT_DESCRIPTOR,
};
pub use error::NotationError;
pub use level::{
    format_inventory, format_level, format_obstacle_map, parse_inventory, parse_level, parse_obstacle_map, LevelFile,
};
pub use log::{parse_game_log, GameLog};
pub use moves::{format_move, parse_move, parse_move_text, MoveText, Notation};
pub use table::{parse_state_tables, render_state, StateTables};
