mod common;

use std::collections::BTreeSet;

use capsicaps_core::notation::{format_move, parse_move};
use capsicaps_core::random::random_state;
use capsicaps_core::rules::{
    apply_move, base_vector, rotation_cascade, Direction, GameState, GearKind, Move, PlacedGear, Rotation, Slot, Spin,
};
use capsicaps_core::strategist::{
    enumerate_moves, path_potential, score_move, select_move, FullSimulation, Strategist, StrategyConfig, StrategyError,
};
use common::{level, level9_pre, p};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn forced_placement_at_j9() {
    let s = level9_pre(8);
    let moves = enumerate_moves(&s);
    // One cell, two kinds left in stock (G1 and G3), four b, two spins.
    assert_eq!(moves.len(), 16);
    assert!(moves
        .iter()
        .all(|m| matches!(m, Move::Placement { cell, kind: GearKind::G1 | GearKind::G3, .. } if *cell == p(4, 3))));
    let proposal = Strategist::default().select(&s).unwrap();
    assert!(matches!(proposal.mv, Move::Placement { cell, .. } if cell == p(4, 3)));
}

#[test]
fn enumeration_counts() {
    let empty = GameState::initial(&level("level9")).unwrap();
    let moves = enumerate_moves(&empty);
    assert_eq!(moves.len(), 4 * 4 * 4 * 2);
    let full = level9_pre(11);
    let moves = enumerate_moves(&full);
    assert_eq!(moves.len(), 62);
    let distinct: BTreeSet<String> = moves.iter().map(format_move).collect();
    assert_eq!(distinct.len(), moves.len());
}

#[test]
fn j18_ranking() {
    let s = level9_pre(17);
    let cfg = StrategyConfig::default();
    let double = score_move(&s, &parse_move("G@P43:b=3 ; G@P11+90").unwrap(), &cfg).unwrap();
    let single = score_move(&s, &parse_move("G@P11+90").unwrap(), &cfg).unwrap();
    assert_eq!((double.exits, double.to_final_row), (1, 1));
    assert!(double.advances >= 1);
    assert_eq!((single.exits, single.to_final_row), (1, 0));
    assert!(double > single);
    assert_eq!(double.deciding_field(&single), "to_final_row");
    let selected = select_move(&s, &cfg, &FullSimulation).unwrap();
    let chosen = score_move(&s, &selected.mv, &cfg).unwrap();
    assert!(chosen >= double);
    assert_eq!(selected.priority_met, 1);
}

#[test]
fn quiet_rotation_scores_zero() {
    // The J24 input state: the rotation moves nobody.
    let moves = common::log_moves("level9");
    let s = common::replay_prefix(&level("level9"), &moves, 23);
    let score = score_move(&s, &moves[23], &StrategyConfig::default()).unwrap();
    assert_eq!((score.exits, score.to_final_row, score.advances), (0, 0, 0));
}

#[test]
fn potential_examples() {
    let cfg = StrategyConfig::default();
    let mut s = GameState::initial(&level("level9")).unwrap();
    assert_eq!(path_potential(&s, &cfg), 0);
    let three = Rotation::new(3).unwrap();
    s.gears.insert(p(2, 1), PlacedGear::new(GearKind::G1, three));
    s.gears.insert(p(2, 2), PlacedGear::new(GearKind::G1, three));
    assert_eq!(path_potential(&s, &cfg), 1);
}

/// Scan every adjacent pair; one-rotation pairs are found by actually
/// turning the board both ways.
fn potential_oracle(s: &GameState, cur: i64, one: i64) -> i64 {
    let first = *s.gears.keys().next().unwrap();
    let turned: Vec<_> =
        [Spin::Plus90, Spin::Minus90].into_iter().map(|spin| rotation_cascade(s, first, spin).unwrap()).collect();
    let faces = |a: &PlacedGear, ab: Rotation, c: &PlacedGear, cb: Rotation, d: Direction| {
        a.kind.origin_bases().iter().any(|&oa| {
            c.kind.origin_bases().iter().any(|&oc| {
                base_vector(oa, ab) == d
                    && base_vector(oc, cb) == d.opposite()
                    && !(a.occupancy.slot(oa) == Slot::Occupied && c.occupancy.slot(oc) == Slot::Occupied)
            })
        })
    };
    let mut total = 0;
    for (&ca, a) in &s.gears {
        for (&cc, c) in &s.gears {
            let d = match (cc.x as i16 - ca.x as i16, cc.y as i16 - ca.y as i16) {
                (1, 0) => Direction::Right,
                (0, 1) => Direction::Up,
                _ => continue,
            };
            if faces(a, a.b, c, c.b, d) {
                total += cur;
            } else if turned.iter().any(|t| faces(a, t[&ca], c, t[&cc], d)) {
                total += one;
            }
        }
    }
    total
}

#[test]
fn potential_matches_pair_scan() {
    let moves = common::log_moves("level9");
    let lv = level("level9");
    let j12 = common::replay_prefix(&lv, &moves, 12);
    let cfg = StrategyConfig::default();
    assert_eq!(path_potential(&j12, &cfg), potential_oracle(&j12, 2, 1));
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..300 {
        let s = random_state(&mut rng, 5);
        if s.gears.is_empty() {
            continue;
        }
        assert_eq!(path_potential(&s, &cfg), potential_oracle(&s, 2, 1));
    }
}

#[test]
fn terminal_position() {
    let s = GameState::initial(&level("level9")).unwrap();
    let mut done = s.clone();
    for m in done.mice.iter_mut() {
        m.status = capsicaps_core::rules::MouseStatus::Victory { cell: p(m.id, 4) };
    }
    assert_eq!(Strategist::default().select(&done).unwrap_err(), StrategyError::NoLegalMove);
}

#[test]
fn selection_properties() {
    let cfg = StrategyConfig::default();
    let scaled = StrategyConfig { current_pair_weight: 6, one_rotation_pair_weight: 3, ..cfg.clone() };
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..120 {
        let s = random_state(&mut rng, 4);
        let moves = enumerate_moves(&s);
        let Ok(proposal) = select_move(&s, &cfg, &FullSimulation) else {
            assert!(moves.is_empty());
            continue;
        };
        assert!(moves.contains(&proposal.mv));
        if !s.inventory.is_empty() {
            assert!(proposal.mv.is_placement());
        }
        let best_exits = moves.iter().map(|m| score_move(&s, m, &cfg).unwrap().exits).max().unwrap();
        assert_eq!(score_move(&s, &proposal.mv, &cfg).unwrap().exits, best_exits);

        let again = GameState::from_canonical_json(&s.to_canonical_json()).unwrap();
        assert_eq!(select_move(&again, &cfg, &FullSimulation).unwrap(), proposal);

        let other = select_move(&s, &scaled, &FullSimulation).unwrap();
        if proposal.justification.deciding_field.as_deref().is_some_and(|f| f != "maneuver_value" && f != "tie_break") {
            assert_eq!(other.mv, proposal.mv);
        }
    }
}

#[test]
fn declared_events_match_kernel() {
    let s = level9_pre(11);
    let proposal = Strategist::default().select(&s).unwrap();
    assert_eq!(proposal.declared_events, apply_move(&s, &proposal.mv).unwrap().events());
    let p1 = &proposal.justification.checks;
    assert_eq!(p1.len(), 7);
    assert!(p1.iter().any(|c| c.priority == 6 && c.satisfiable));
}

#[test]
fn config_from_text() {
    let cfg = StrategyConfig::from_toml("current_pair_weight = 4\ndegraded_max_events = 2\n").unwrap();
    assert_eq!(cfg.current_pair_weight, 4);
    assert_eq!(cfg.one_rotation_pair_weight, 1);
    assert!(StrategyConfig::from_toml("unknown = 1").is_err());
}
