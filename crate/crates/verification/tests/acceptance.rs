//! Acceptance suite. Runs every criterion, prints one `[PASS]`/`[FAIL]`
//! line each (details indented below), and exits non-zero if any fails.

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use capsicaps_core::notation::{format_move, parse_move, parse_move_text};
use capsicaps_core::protocol::{audit, cross_consistency, AuditVerdict, AutoOutcome, LogEntry, Session, SessionConfig};
use capsicaps_core::random::{fault_injected_session, random_level, random_playout, random_state};
use capsicaps_core::rules::{
    apply_move, check_move, legal_placements, rotation_cascade, CellCoord, GameState, GearKind, Move, Rotation, Spin,
    TurnEvent,
};
use capsicaps_core::strategist::{
    evaluate_proposal, score_move, select_move, FullSimulation, StrategyConfig, Truncating,
};
use capsicaps_service::{cli_verify, load_fixtures, read_level, read_log, MoveStatus};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Outcome = Result<Vec<String>, Vec<String>>;
type Criterion = (&'static str, fn() -> Outcome);

fn data(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(rel)
}

fn p(x: u8, y: u8) -> CellCoord {
    CellCoord::new(x, y)
}

fn check(cond: bool, what: impl Into<String>, fails: &mut Vec<String>) {
    if !cond {
        fails.push(what.into());
    }
}

fn finish(details: Vec<String>, fails: Vec<String>) -> Outcome {
    if fails.is_empty() {
        Ok(details)
    } else {
        Err(fails.into_iter().chain(details).collect())
    }
}

fn within(limit: Duration, took: Duration, fails: &mut Vec<String>) -> String {
    check(took < limit, format!("runtime {took:?} exceeds {limit:?}"), fails);
    format!("runtime {took:?} (limit {limit:?})")
}

fn level9_state_after(n: usize) -> GameState {
    let level = read_level(data("levels/level9.toml").to_str().unwrap()).unwrap();
    let log = read_log(&data("logs/level9.log")).unwrap();
    let mut s = GameState::initial(&level).unwrap();
    for m in &log.moves[..n] {
        s = apply_move(&s, &m.mv).unwrap().final_state;
    }
    s
}

fn golden_level9() -> Outcome {
    let mut fails = Vec::new();
    let t = Instant::now();
    let level = read_level(data("levels/level9.toml").to_str().unwrap()).unwrap();
    let log = read_log(&data("logs/level9.log")).unwrap();
    let fixtures = load_fixtures(&data("fixtures/level9")).unwrap();
    let r = cli_verify(&level, &log, &fixtures);
    let took = t.elapsed();
    check(r.moves.len() == 25, format!("{} moves in log", r.moves.len()), &mut fails);
    check(r.legal_moves() == 25, format!("{} of 25 moves legal", r.legal_moves()), &mut fails);
    let set: BTreeSet<u32> = r.fixtures.iter().map(|f| f.move_number).collect();
    check(set == BTreeSet::from([9, 10, 12, 18]), format!("fixtures at {set:?}"), &mut fails);
    for f in r.fixtures.iter().filter(|f| !f.matched) {
        fails.push(format!("J{} mismatch: {}", f.move_number, f.diff.join("; ")));
    }
    let expected = [
        (9, "J9_State-M3@P21-INV0010"),
        (10, "J10_State-M3@P31_M4@P41-INV0000"),
        (12, "J12_State-M1@P31_M2@P12_M3@P41-INV0000"),
        (18, "J18_State-M4_OUT_M3@P43_M1@P31-INV0000"),
    ];
    for (n, want) in expected {
        let got = match &r.moves[n - 1].status {
            MoveStatus::Legal { checksum } | MoveStatus::FixtureMismatch { checksum, .. } => checksum.as_str(),
            _ => "(none)",
        };
        check(got == want, format!("J{n} checksum {got} != {want}"), &mut fails);
    }
    check(r.passed, "verification did not pass", &mut fails);
    let details = vec![
        format!(
            "25/25 legal, {}/4 fixtures field-exact, 4/4 checksums exact",
            r.fixtures.iter().filter(|f| f.matched).count()
        ),
        within(Duration::from_secs(1), took, &mut fails),
    ];
    finish(details, fails)
}

fn legality_level6() -> Outcome {
    let mut fails = Vec::new();
    let t = Instant::now();
    let level = read_level(data("levels/level6.toml").to_str().unwrap()).unwrap();
    let log = read_log(&data("logs/level6.log")).unwrap();
    let r = cli_verify(&level, &log, &Default::default());
    let took = t.elapsed();
    check(r.moves.len() == 19, format!("{} moves in log", r.moves.len()), &mut fails);
    for m in &r.moves {
        if let MoveStatus::Illegal { rule, message } = &m.status {
            fails.push(format!("J{} {} illegal: {rule} ({message})", m.index, m.notation));
        }
    }
    let mut details = vec![
        format!("{}/19 legal under obstacle map 111101111, inventory 01030103", r.legal_moves()),
        format!("final mice: {}", r.final_mice.join(", ")),
    ];
    details.extend(r.findings.iter().map(|f| format!("finding: {f}")));
    let open = read_level(data("levels/level6-open.toml").to_str().unwrap()).unwrap();
    let o = cli_verify(&open, &log, &Default::default());
    details.push(format!(
        "finding: with an obstacle-free 3x3 map the log replays {}/19 legal; final mice: {}",
        o.legal_moves(),
        o.final_mice.join(", ")
    ));
    details.push(within(Duration::from_secs(1), took, &mut fails));
    finish(details, fails)
}

fn avp_episode() -> Outcome {
    let mut fails = Vec::new();
    let j8 = level9_state_after(8);
    let cells = legal_placements(&j8);
    check(cells == BTreeSet::from([p(4, 3)]), format!("legal_placements = {cells:?}"), &mut fails);
    let original = parse_move("G1@P33(b=0)+90").unwrap();
    let rule = check_move(&j8, &original).err().map(|e| e.rule_id());
    check(rule == Some("AVP-adjacency"), format!("original proposal gives {rule:?}"), &mut fails);
    let mut s = Session::start(&j8.level, SessionConfig::default()).unwrap();
    let log = read_log(&data("logs/level9.log")).unwrap();
    for m in &log.moves[..8] {
        let prop = evaluate_proposal(s.locked_state(), &m.mv, &StrategyConfig::default(), &FullSimulation);
        s.auto_cycle(Some(prop)).unwrap();
    }
    let rejected = s.propose_move(original).err().map(|e| e.to_string());
    check(
        rejected.as_deref().is_some_and(|e| e.contains("AVP-adjacency")),
        "session accepted the original proposal",
        &mut fails,
    );
    finish(vec![format!("legal_placements = {{P43}}, original rejected: {}", rejected.unwrap_or_default())], fails)
}

fn psp_episode() -> Outcome {
    let mut fails = Vec::new();
    let level = read_level(data("levels/level9.toml").to_str().unwrap()).unwrap();
    let log = read_log(&data("logs/level9.log")).unwrap();
    let degraded = Truncating { max: 2 };
    let mut s = Session::start(&level, SessionConfig::default()).unwrap().with_predictor(Box::new(degraded));
    let mut retractions_at_12 = 0;
    for m in &log.moves[..12] {
        let prop = evaluate_proposal(s.locked_state(), &m.mv, &StrategyConfig::default(), &degraded);
        match s.auto_cycle(Some(prop)).unwrap() {
            AutoOutcome::Confirmed { retractions, .. } if s.locked_state().move_number == 12 => {
                retractions_at_12 = retractions
            }
            AutoOutcome::Confirmed { .. } => {}
            other => fails.push(format!("J{}: {other:?}", s.cycle())),
        }
    }
    let psp: Vec<_> = s
        .log()
        .iter()
        .filter_map(|e| match e {
            LogEntry::Psp(r) if r.cycle == 12 => Some(r),
            _ => None,
        })
        .collect();
    check(psp.len() == 1, format!("{} retractions at cycle 12", psp.len()), &mut fails);
    check(retractions_at_12 == 1, format!("reissue needed {retractions_at_12} retractions"), &mut fails);
    let expected: BTreeSet<(u8, CellCoord, CellCoord)> =
        [(1, p(2, 1), p(3, 1)), (2, p(2, 2), p(1, 2)), (3, p(3, 1), p(4, 1))].into();
    if let Some(r) = psp.first() {
        let got: BTreeSet<_> = r
            .corrected
            .declared_events
            .iter()
            .filter_map(|e| match *e {
                TurnEvent::Jump { mouse, from_cell, to_cell, .. } => Some((mouse, from_cell, to_cell)),
                _ => None,
            })
            .collect();
        check(
            r.corrected.declared_events.len() == 3 && got == expected,
            format!("corrected declares {got:?}"),
            &mut fails,
        );
        check(r.retracted.declared_events.len() == 2, "retracted proposal did not declare 2 events", &mut fails);
    }
    check(
        s.locked_checksum().map(|c| c.to_string()).as_deref() == Some("J12_State-M1@P31_M2@P12_M3@P41-INV0000"),
        "cycle 12 did not lock the triple jump",
        &mut fails,
    );
    finish(vec!["1 retraction at cycle 12; corrected proposal declares 3 jumps; reissue passes".into()], fails)
}

fn j18_ranking() -> Outcome {
    let mut fails = Vec::new();
    let j17 = level9_state_after(17);
    let cfg = StrategyConfig::default();
    let double = parse_move("G@P43:b=3 ; G@P11+90").unwrap();
    let single = parse_move("G@P11+90").unwrap();
    let sd = score_move(&j17, &double, &cfg).unwrap();
    let ss = score_move(&j17, &single, &cfg).unwrap();
    check(sd > ss, "double move does not outrank single", &mut fails);
    check(sd.exits == ss.exits && sd.to_final_row > ss.to_final_row, format!("{sd:?} vs {ss:?}"), &mut fails);
    let sel = select_move(&j17, &cfg, &FullSimulation).unwrap();
    let chosen = score_move(&j17, &sel.mv, &cfg).unwrap();
    check(sel.mv != single && chosen >= sd, format!("selected {}", format_move(&sel.mv)), &mut fails);
    finish(
        vec![format!(
            "exits {}={}, to_final_row {}>{}; selected {}",
            sd.exits,
            ss.exits,
            sd.to_final_row,
            ss.to_final_row,
            format_move(&sel.mv)
        )],
        fails,
    )
}

fn every_move() -> Vec<Move> {
    let mut out = Vec::new();
    let cells: Vec<CellCoord> = (1..=9).flat_map(|x| (1..=9).map(move |y| p(x, y))).collect();
    for &cell in &cells {
        for spin in Spin::ALL {
            out.push(Move::Rotation { cell, spin });
            for b in Rotation::ALL {
                for kind in GearKind::ALL {
                    out.push(Move::Placement { kind, cell, initial_b: b, spin });
                }
                for &rotation_cell in &cells {
                    out.push(Move::PreMoveRotation { premove_cell: cell, premove_b: b, rotation_cell, spin });
                }
            }
        }
    }
    out
}

fn property_suites() -> Outcome {
    let mut fails = Vec::new();
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);

    // (a) group laws
    let mut group_ok = 0;
    for _ in 0..1000 {
        let s = random_state(&mut rng, 6);
        let Some(&cell) = s.gears.keys().next() else {
            group_ok += 1;
            continue;
        };
        let bmap = |st: &GameState| st.gears.iter().map(|(c, g)| (*c, g.b)).collect::<Vec<_>>();
        let turn = |st: &GameState, spin| {
            let mut t = st.clone();
            for (c, b) in rotation_cascade(st, cell, spin).unwrap() {
                t.gears.get_mut(&c).unwrap().b = b;
            }
            t
        };
        let mut four = s.clone();
        for _ in 0..4 {
            four = turn(&four, Spin::Plus90);
        }
        let inverse = turn(&turn(&s, Spin::Plus90), Spin::Minus90);
        if bmap(&four) == bmap(&s) && bmap(&inverse) == bmap(&s) {
            group_ok += 1;
        }
    }
    check(group_ok == 1000, format!("(a) group laws hold on {group_ok}/1000 states"), &mut fails);

    // (b) + (c) invariants and auditor equivalence
    let (mut moves, mut inv_bad, mut avm_bad) = (0usize, 0usize, 0usize);
    while moves < 10_000 {
        let level = random_level(&mut rng, 6);
        for (before, mv, report) in random_playout(&level, 60, &mut rng) {
            moves += 1;
            let fin = &report.final_state;
            let placed = fin.placed_counts();
            let conserved = (0..4).all(|k| placed[k] + fin.inventory.0[k] == fin.level.inventory.0[k])
                && fin.mice.len() == before.mice.len();
            if !conserved || fin.check_invariants().is_err() || !cross_consistency(fin).is_empty() {
                inv_bad += 1;
            }
            if audit(&before, &mv, &report) != AuditVerdict::Concordance {
                avm_bad += 1;
            }
        }
    }
    check(inv_bad == 0, format!("(b) {inv_bad} invariant violations in {moves} moves"), &mut fails);
    check(avm_bad == 0, format!("(c) {avm_bad} auditor discrepancies in {moves} moves"), &mut fails);

    // (d) revert exactness and save-point replay
    let (mut reverts, mut confirmed) = (0, 0);
    for _ in 0..100 {
        let run = fault_injected_session(&mut rng, 5, 30);
        reverts += run.reverts;
        confirmed += run.cycles_confirmed;
        fails.extend(run.failures.into_iter().map(|f| format!("(d) {f}")));
    }
    check(reverts > 0, "(d) no reverts were exercised", &mut fails);

    // (e) notation round trip over the whole grammar
    let all = every_move();
    let mut rt_bad = 0;
    for (i, mv) in all.iter().enumerate() {
        let text = format_move(mv);
        let variant = format!("J{}: {}", i + 1, text.replace('@', " @ ").to_lowercase());
        let ok = parse_move(&text).ok() == Some(*mv) && parse_move_text(&variant).map(|m| m.mv).ok() == Some(*mv);
        if !ok {
            rt_bad += 1;
        }
    }
    check(rt_bad == 0, format!("(e) {rt_bad} round-trip failures"), &mut fails);

    let details = vec![
        "(a) 1000 states: 4 x spin = id, +90 then -90 = id".into(),
        format!("(b) {moves} random legal moves: conservation + cross-consistency hold"),
        format!("(c) {moves} moves: 0 auditor discrepancies"),
        format!("(d) 100 sessions, {reverts} injected reverts, {confirmed} confirmed cycles"),
        format!("(e) {} moves formatted and reparsed", all.len()),
        within(Duration::from_secs(60), t.elapsed(), &mut fails),
    ];
    finish(details, fails)
}

fn main() {
    let criteria: [Criterion; 6] = [
        ("Level-9 golden replay", golden_level9),
        ("Level-6 legality replay", legality_level6),
        ("AVP episode reproduction", avp_episode),
        ("PSP episode reproduction", psp_episode),
        ("J18 strategist check", j18_ranking),
        ("Property suites", property_suites),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(vec![format!("panicked: {}", msg.unwrap_or_default())])
        });
        let (tag, lines) = match outcome {
            Ok(l) => ("PASS", l),
            Err(l) => {
                failed += 1;
                ("FAIL", l)
            }
        };
        println!("[{tag}] {name}");
        for l in lines {
            println!("       {l}");
        }
    }
    println!("acceptance: {} passed, {failed} failed", 6 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
