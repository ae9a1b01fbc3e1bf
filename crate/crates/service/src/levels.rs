//! Level definitions shipped with the binary.

use capsicaps_core::notation::parse_level;
use capsicaps_core::rules::Level;

const BUILTIN: [(&str, &str); 4] = [
    ("level9", include_str!("../../../data/levels/level9.toml")),
    ("level6", include_str!("../../../data/levels/level6.toml")),
    ("level6-open", include_str!("../../../data/levels/level6-open.toml")),
    ("micro", include_str!("../../../data/levels/micro.toml")),
];

pub fn builtin_ids() -> impl Iterator<Item = &'static str> {
    BUILTIN.iter().map(|(id, _)| *id)
}

/// A shipped level by name (`level9`, `level6`, ...) or by numeric id
/// (`9`, `6`).
pub fn builtin_level(id: &str) -> Option<Level> {
    let name = if id.chars().all(|c| c.is_ascii_digit()) { format!("level{id}") } else { id.to_string() };
    BUILTIN.iter().find(|(n, _)| *n == name).map(|(_, text)| parse_level(text).expect("built-in level parses"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_builtins_parse() {
        for id in builtin_ids() {
            assert!(builtin_level(id).is_some(), "{id}");
        }
        assert_eq!(builtin_level("9").unwrap().width, 4);
        assert!(builtin_level("level42").is_none());
    }
}
