use capsicaps_core::notation::{
    format_level, format_move, format_obstacle_map, parse_level, parse_move, parse_obstacle_map, ChecksumString,
};
use capsicaps_core::protocol::{audit, cross_consistency, AuditVerdict};
use capsicaps_core::random::{fault_injected_session, random_level, random_move, random_playout, random_state};
use capsicaps_core::rules::{rotation_cascade, GameState, Spin};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn turn_all(state: &GameState, spin: Spin, times: usize) -> GameState {
    let mut s = state.clone();
    let Some(&cell) = s.gears.keys().next() else { return s };
    for _ in 0..times {
        for (c, b) in rotation_cascade(&s, cell, spin).unwrap() {
            s.gears.get_mut(&c).unwrap().b = b;
        }
    }
    s
}

fn conservation(before: &GameState, after: &GameState) -> Result<(), String> {
    let initial = after.level.inventory.0;
    let placed = after.placed_counts();
    for k in 0..4 {
        if placed[k] + after.inventory.0[k] != initial[k] {
            return Err(format!("gear count for G{} not conserved", k + 1));
        }
    }
    if after.mice.len() != before.mice.len() || after.move_number != before.move_number + 1 {
        return Err("mouse count or move number".into());
    }
    after.check_invariants().map_err(|v| v.to_string())?;
    let cc = cross_consistency(after);
    if !cc.is_empty() {
        return Err(format!("{cc:?}"));
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn rotation_group_laws(seed in any::<u64>()) {
        let s = random_state(&mut rng(seed), 6);
        let cw = turn_all(&s, Spin::Plus90, 4);
        prop_assert_eq!(cw.to_canonical_json(), s.to_canonical_json());
        let ccw = turn_all(&s, Spin::Minus90, 4);
        prop_assert_eq!(ccw.to_canonical_json(), s.to_canonical_json());
        let back = turn_all(&turn_all(&s, Spin::Plus90, 1), Spin::Minus90, 1);
        prop_assert_eq!(back.to_canonical_json(), s.to_canonical_json());
    }

    #[test]
    fn invariants_and_auditor_agree_along_playouts(seed in any::<u64>()) {
        let mut r = rng(seed);
        let level = random_level(&mut r, 5);
        for (before, mv, report) in random_playout(&level, 40, &mut r) {
            if let Err(e) = conservation(&before, &report.final_state) {
                return Err(TestCaseError::fail(format!("{}: {e}", format_move(&mv))));
            }
            prop_assert_eq!(audit(&before, &mv, &report), AuditVerdict::Concordance);
        }
    }

    #[test]
    fn notation_round_trip(seed in any::<u64>()) {
        let mv = random_move(&mut rng(seed));
        let text = format_move(&mv);
        prop_assert_eq!(parse_move(&text).unwrap(), mv);
        let spaced = text.replace('@', " @ ").to_lowercase();
        prop_assert_eq!(parse_move(&spaced).unwrap(), mv);
    }

    #[test]
    fn level_file_round_trip(seed in any::<u64>()) {
        let level = random_level(&mut rng(seed), 9);
        prop_assert_eq!(parse_level(&format_level(&level)).unwrap(), level.clone());
        let bits = format_obstacle_map(&level);
        prop_assert_eq!(parse_obstacle_map(&bits, level.width, level.height).unwrap(), level.obstacles.clone());
    }

    #[test]
    fn checksum_text_round_trip(seed in any::<u64>()) {
        let mut r = rng(seed);
        let level = random_level(&mut r, 5);
        for (_, _, report) in random_playout(&level, 20, &mut r) {
            let fin = &report.final_state;
            let c = capsicaps_core::notation::format_checksum(
                report.move_number, &report.events(), &fin.inventory, fin.level.height,
            ).unwrap();
            let text = c.to_string();
            prop_assert_eq!(text.parse::<ChecksumString>().unwrap(), c);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn fap_reverts_are_byte_exact(seed in any::<u64>()) {
        let run = fault_injected_session(&mut rng(seed), 4, 25);
        prop_assert!(run.failures.is_empty(), "{:?}", run.failures);
    }
}

#[test]
fn fault_runs_exercise_every_path() {
    let (mut reverts, mut confirmed) = (0, 0);
    for seed in 0..20 {
        let run = fault_injected_session(&mut rng(seed), 4, 25);
        assert!(run.failures.is_empty(), "{:?}", run.failures);
        reverts += run.reverts;
        confirmed += run.cycles_confirmed;
    }
    assert!(reverts > 20 && confirmed > 50, "{reverts} reverts, {confirmed} confirmed");
}
