//! Random levels, moves and playouts for property suites and fuzzing.

use rand::seq::IndexedRandom;
use rand::Rng;

use crate::rules::{apply_move, CellCoord, GameState, GearKind, Inventory, Level, Move, Rotation, Spin, TurnReport};
use crate::strategist::enumerate_moves;

/// A level up to `max_side` x `max_side` with a few obstacles and a playable
/// first row.
pub fn random_level(rng: &mut impl Rng, max_side: u8) -> Level {
    let max_side = max_side.clamp(1, crate::rules::MAX_SIDE);
    let width = rng.random_range(1..=max_side);
    let height = rng.random_range(1..=max_side);
    let mut obstacles = std::collections::BTreeSet::new();
    for x in 1..=width {
        for y in 1..=height {
            if rng.random_bool(0.15) {
                obstacles.insert(CellCoord::new(x, y));
            }
        }
    }
    if (1..=width).all(|x| obstacles.contains(&CellCoord::new(x, 1))) {
        obstacles.remove(&CellCoord::new(rng.random_range(1..=width), 1));
    }
    let free = (width as usize * height as usize - obstacles.len()) as u32;
    let total = rng.random_range(1..=free.min(36));
    let mut counts = [0u8; 4];
    for _ in 0..total {
        let k = rng.random_range(0..4);
        if counts[k] < 9 {
            counts[k] += 1;
        }
    }
    Level::new(0, width, height, obstacles, Inventory(counts)).expect("generated level is valid")
}

/// A uniformly chosen legal move, or `None` in a terminal position.
pub fn random_legal_move(state: &GameState, rng: &mut impl Rng) -> Option<Move> {
    enumerate_moves(state).choose(rng).copied()
}

/// Any move the notation grammar can express, legal or not.
pub fn random_move(rng: &mut impl Rng) -> Move {
    let cell = |rng: &mut dyn rand::RngCore| CellCoord::new(rng.random_range(1..=9), rng.random_range(1..=9));
    let b = |rng: &mut dyn rand::RngCore| Rotation::ALL[rng.random_range(0..4)];
    let spin = if rng.random_bool(0.5) { Spin::Plus90 } else { Spin::Minus90 };
    match rng.random_range(0..3) {
        0 => Move::Placement { kind: GearKind::ALL[rng.random_range(0..4)], cell: cell(rng), initial_b: b(rng), spin },
        1 => Move::Rotation { cell: cell(rng), spin },
        _ => Move::PreMoveRotation { premove_cell: cell(rng), premove_b: b(rng), rotation_cell: cell(rng), spin },
    }
}

/// Play up to `max_moves` random legal moves, returning each turn's input
/// state, move and report.
pub fn random_playout(level: &Level, max_moves: usize, rng: &mut impl Rng) -> Vec<(GameState, Move, TurnReport)> {
    let mut state = GameState::initial(level).expect("valid level");
    let mut out = Vec::new();
    for _ in 0..max_moves {
        let Some(mv) = random_legal_move(&state, rng) else { break };
        let report = apply_move(&state, &mv).expect("enumerated moves are legal");
        let next = report.final_state.clone();
        out.push((state, mv, report));
        state = next;
    }
    out
}

/// A state reached by a random number of random legal moves.
pub fn random_state(rng: &mut impl Rng, max_side: u8) -> GameState {
    let level = random_level(rng, max_side);
    let steps = rng.random_range(0..=30);
    random_playout(&level, steps, rng)
        .pop()
        .map(|(_, _, r)| r.final_state)
        .unwrap_or_else(|| GameState::initial(&level).expect("valid level"))
}

/// Outcome of [`fault_injected_session`].
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FaultRun {
    pub cycles_confirmed: usize,
    pub reverts: usize,
    /// Violations of revert exactness or save-point equivalence.
    pub failures: Vec<String>,
}

/// Drive a session on a random level for up to `cycles` cycles, injecting
/// `Error` signals at random gates. After every revert the locked snapshot
/// must equal the last confirmed one byte for byte; at the end, resuming from
/// a random save point and replaying the confirmed moves must reproduce the
/// continuous run.
pub fn fault_injected_session(rng: &mut impl Rng, max_side: u8, cycles: usize) -> FaultRun {
    use crate::protocol::{LogEntry, Session, SessionConfig, Signal};

    let level = random_level(rng, max_side);
    let mut session = Session::start(&level, SessionConfig::default()).expect("valid level");
    let mut run = FaultRun::default();
    for _ in 0..cycles {
        let Some(mv) = random_legal_move(session.locked_state(), rng) else { break };
        let before = session.locked_snapshot().to_string();
        let stop = if rng.random_bool(0.4) { Some(rng.random_range(0..5)) } else { None };
        let mut expected = before.clone();
        let mut step = |s: &mut Session, k: u8| -> Result<bool, String> {
            if stop == Some(k) {
                if k == 4 {
                    expected = s.locked_snapshot().to_string();
                }
                s.signal(Signal::Error { text: None }).map_err(|e| e.to_string())?;
                return Ok(true);
            }
            Ok(false)
        };
        let result = (|| -> Result<bool, String> {
            session.propose_move(mv).map_err(|e| e.to_string())?;
            if step(&mut session, 0)? {
                return Ok(true);
            }
            session.signal(Signal::Ok).map_err(|e| e.to_string())?;
            if step(&mut session, 1)? {
                return Ok(true);
            }
            session.internal_checkpoint().map_err(|e| e.to_string())?;
            if step(&mut session, 2)? {
                return Ok(true);
            }
            session.execute_calculation().map_err(|e| e.to_string())?;
            if step(&mut session, 3)? {
                return Ok(true);
            }
            session.signal(Signal::Ok).map_err(|e| e.to_string())?;
            if step(&mut session, 4)? {
                return Ok(true);
            }
            session.signal(Signal::Ok).map_err(|e| e.to_string())?;
            Ok(false)
        })();
        match result {
            Err(e) => {
                run.failures.push(format!("cycle {}: {e}", session.cycle()));
                return run;
            }
            Ok(true) => {
                run.reverts += 1;
                if stop == Some(4) {
                    run.cycles_confirmed += 1;
                }
                if session.locked_snapshot() != expected
                    || session.locked_state().to_canonical_json() != expected
                    || crate::protocol::digest(&expected) != session.locked_digest()
                {
                    run.failures.push(format!("cycle {}: revert is not byte-exact", session.cycle()));
                }
            }
            Ok(false) => run.cycles_confirmed += 1,
        }
    }

    let log = session.log().to_vec();
    let cycle_at: Vec<usize> =
        log.iter().enumerate().filter(|(_, e)| matches!(e, LogEntry::Cycle(_))).map(|(i, _)| i).collect();
    let cut = if cycle_at.is_empty() { 0 } else { cycle_at[rng.random_range(0..cycle_at.len())] };
    let mut resumed = match Session::resume(log[..=cut].to_vec(), SessionConfig::default()) {
        Ok(s) => s,
        Err(e) => {
            run.failures.push(format!("resume: {e}"));
            return run;
        }
    };
    for e in &log[cut + 1..] {
        if let LogEntry::Cycle(r) = e {
            let p = crate::strategist::evaluate_proposal(
                resumed.locked_state(),
                &r.proposal.mv,
                &resumed.config().strategy,
                &crate::strategist::FullSimulation,
            );
            match resumed.auto_cycle(Some(p)) {
                Ok(crate::protocol::AutoOutcome::Confirmed { .. }) => {}
                other => {
                    run.failures.push(format!("replay J{}: {other:?}", r.report.move_number));
                    return run;
                }
            }
        }
    }
    if resumed.locked_snapshot() != session.locked_snapshot() {
        run.failures.push("save-point replay diverges from the continuous run".into());
    }
    run
}
