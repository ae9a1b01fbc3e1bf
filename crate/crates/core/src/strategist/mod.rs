//! One-ply move selection following a strict priority hierarchy: win now,
//! reach the final row, advance mice, then maneuver for future paths.

mod potential;

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::notation::format_move;
use crate::rules::{apply_move, legal_placements, GameState, Move, Rotation, RuleError, Spin, TurnEvent, TurnReport};

pub use potential::path_potential;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StrategyError {
    #[error("no legal move exists (terminal position)")]
    NoLegalMove,
    #[error(transparent)]
    Rule(#[from] RuleError),
    #[error("strategy config: {0}")]
    Config(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StrategyConfig {
    pub current_pair_weight: i64,
    pub one_rotation_pair_weight: i64,
    /// Break exact ties toward the lowest canonical move key (else the highest).
    pub prefer_lowest_key: bool,
    /// Declare at most this many events in proposals (degraded predictor).
    pub degraded_max_events: Option<usize>,
}

impl Default for StrategyConfig {
    fn default() -> Self {
        StrategyConfig {
            current_pair_weight: 2,
            one_rotation_pair_weight: 1,
            prefer_lowest_key: true,
            degraded_max_events: None,
        }
    }
}

impl StrategyConfig {
    pub fn from_toml(text: &str) -> Result<Self, StrategyError> {
        toml::from_str(text).map_err(|e| StrategyError::Config(e.to_string()))
    }

    /// The predictor this configuration asks for.
    pub fn predictor(&self) -> Box<dyn Predictor> {
        match self.degraded_max_events {
            Some(max) => Box::new(Truncating { max }),
            None => Box::new(FullSimulation),
        }
    }
}

/// Canonical ordering key: variant, then cells, kind, b and spin (`-90` first).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct MoveKey([u8; 7]);

impl MoveKey {
    pub fn of(mv: &Move) -> MoveKey {
        let spin = |s: Spin| match s {
            Spin::Minus90 => 0,
            Spin::Plus90 => 1,
        };
        MoveKey(match *mv {
            Move::Placement { kind, cell, initial_b, spin: s } => {
                [0, cell.x, cell.y, kind.index() as u8, initial_b.get(), spin(s), 0]
            }
            Move::Rotation { cell, spin: s } => [1, cell.x, cell.y, spin(s), 0, 0, 0],
            Move::PreMoveRotation { premove_cell, premove_b, rotation_cell, spin: s } => {
                [2, premove_cell.x, premove_cell.y, premove_b.get(), rotation_cell.x, rotation_cell.y, spin(s)]
            }
        })
    }
}

/// Lexicographic evaluation of a simulated move. Higher counts are better;
/// among equal counts the lower `tie_break` key wins.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OutcomeScore {
    pub exits: u32,
    pub to_final_row: u32,
    pub advances: u32,
    pub maneuver_value: i64,
    pub tie_break: MoveKey,
}

impl OutcomeScore {
    fn merit(&self) -> (u32, u32, u32, i64) {
        (self.exits, self.to_final_row, self.advances, self.maneuver_value)
    }

    /// Name of the first field where two scores differ.
    pub fn deciding_field(&self, other: &OutcomeScore) -> &'static str {
        if self.exits != other.exits {
            "exits"
        } else if self.to_final_row != other.to_final_row {
            "to_final_row"
        } else if self.advances != other.advances {
            "advances"
        } else if self.maneuver_value != other.maneuver_value {
            "maneuver_value"
        } else {
            "tie_break"
        }
    }
}

impl Ord for OutcomeScore {
    /// `Greater` means better.
    fn cmp(&self, other: &Self) -> Ordering {
        self.merit().cmp(&other.merit()).then_with(|| other.tie_break.cmp(&self.tie_break))
    }
}

impl PartialOrd for OutcomeScore {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Produces the events a proposal declares.
pub trait Predictor: Send + Sync {
    fn predict(&self, state: &GameState, mv: &Move) -> Result<Vec<TurnEvent>, RuleError>;
}

/// Declares exactly what the kernel computes.
#[derive(Debug, Clone, Copy, Default)]
pub struct FullSimulation;

impl Predictor for FullSimulation {
    fn predict(&self, state: &GameState, mv: &Move) -> Result<Vec<TurnEvent>, RuleError> {
        Ok(apply_move(state, mv)?.events())
    }
}

/// Declares only the first `max` events; used to exercise retractions.
#[derive(Debug, Clone, Copy)]
pub struct Truncating {
    pub max: usize,
}

impl Predictor for Truncating {
    fn predict(&self, state: &GameState, mv: &Move) -> Result<Vec<TurnEvent>, RuleError> {
        let mut events = apply_move(state, mv)?.events();
        events.truncate(self.max);
        Ok(events)
    }
}

/// Every candidate move in the current phase.
///
/// Placement phase: legal cells x available kinds x b x spin. Rotation phase:
/// the two global rotations, activated on the lowest gear cell, then every
/// pre-move that changes a gear's `b`, each followed by either rotation.
pub fn enumerate_moves(state: &GameState) -> Vec<Move> {
    let mut out = Vec::new();
    if state.all_exited() {
        return out;
    }
    if state.in_placement_phase() {
        for cell in legal_placements(state) {
            for kind in state.inventory.available_kinds() {
                for initial_b in Rotation::ALL {
                    for spin in Spin::ALL {
                        out.push(Move::Placement { kind, cell, initial_b, spin });
                    }
                }
            }
        }
        return out;
    }
    let Some(&lowest) = state.gears.keys().next() else {
        return out;
    };
    for spin in Spin::ALL {
        out.push(Move::Rotation { cell: lowest, spin });
    }
    for (&cell, gear) in &state.gears {
        for b in Rotation::ALL.into_iter().filter(|b| *b != gear.b) {
            for spin in Spin::ALL {
                out.push(Move::PreMoveRotation { premove_cell: cell, premove_b: b, rotation_cell: lowest, spin });
            }
        }
    }
    out
}

fn score_report(report: &TurnReport, mv: &Move, config: &StrategyConfig) -> OutcomeScore {
    let height = report.final_state.level.height;
    let mut s = OutcomeScore {
        exits: 0,
        to_final_row: 0,
        advances: 0,
        maneuver_value: path_potential(&report.final_state, config),
        tie_break: MoveKey::of(mv),
    };
    for e in report.events() {
        match e {
            TurnEvent::Exit { .. } => s.exits += 1,
            TurnEvent::Jump { from_cell, to_cell, .. } => {
                if to_cell.y == height {
                    s.to_final_row += 1;
                }
                if to_cell.y > from_cell.y {
                    s.advances += 1;
                }
            }
            TurnEvent::Entry { .. } => s.advances += 1,
        }
    }
    s
}

/// Simulate `mv` and score the result.
pub fn score_move(state: &GameState, mv: &Move, config: &StrategyConfig) -> Result<OutcomeScore, RuleError> {
    let report = apply_move(state, mv)?;
    Ok(score_report(&report, mv, config))
}

/// Priority level a scored move satisfies.
pub fn priority_of(mv: &Move, score: &OutcomeScore) -> u8 {
    if score.exits > 0 {
        1
    } else if score.to_final_row > 0 {
        2
    } else if score.advances > 0 {
        3
    } else {
        match mv {
            Move::PreMoveRotation { .. } => 5,
            Move::Placement { .. } => 7,
            Move::Rotation { .. } => 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Alternative {
    pub notation: String,
    pub priority: u8,
    pub score: OutcomeScore,
}

/// One question of the priority checklist and its answer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PriorityCheck {
    pub priority: u8,
    pub question: String,
    pub satisfiable: bool,
    pub best: Option<Alternative>,
}

/// Machine-readable trace of a selection.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Justification {
    pub candidates: usize,
    pub checks: Vec<PriorityCheck>,
    pub selected: Alternative,
    pub runner_up: Option<Alternative>,
    /// First score field that separates the selected move from the runner-up.
    pub deciding_field: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Proposal {
    pub mv: Move,
    pub declared_events: Vec<TurnEvent>,
    pub priority_met: u8,
    pub justification: Justification,
}

const QUESTIONS: [(u8, &str); 7] = [
    (1, "can a mouse exit now"),
    (2, "can a mouse reach the final row"),
    (3, "can a mouse advance or enter"),
    (4, "can a plain rotation improve future paths"),
    (5, "can a pre-move improve the outcome"),
    (6, "self-review: is the selection the best alternative"),
    (7, "can a placement build future paths"),
];

fn better(a: &OutcomeScore, b: &OutcomeScore, prefer_lowest_key: bool) -> bool {
    match a.merit().cmp(&b.merit()) {
        Ordering::Greater => true,
        Ordering::Less => false,
        Ordering::Equal => {
            if prefer_lowest_key {
                a.tie_break < b.tie_break
            } else {
                a.tie_break > b.tie_break
            }
        }
    }
}

/// Best move under the lexicographic score, with its justification.
pub fn select_move(
    state: &GameState,
    config: &StrategyConfig,
    predictor: &dyn Predictor,
) -> Result<Proposal, StrategyError> {
    let moves = enumerate_moves(state);
    let mut scored = Vec::with_capacity(moves.len());
    for mv in &moves {
        let score = score_move(state, mv, config)?;
        scored.push((*mv, score, priority_of(mv, &score)));
    }
    let mut best: Option<usize> = None;
    for (i, (_, s, _)) in scored.iter().enumerate() {
        if best.is_none_or(|b| better(s, &scored[b].1, config.prefer_lowest_key)) {
            best = Some(i);
        }
    }
    let best = best.ok_or(StrategyError::NoLegalMove)?;
    let runner_up =
        scored.iter().enumerate().filter(|(i, _)| *i != best).fold(None::<usize>, |acc, (i, (_, s, _))| match acc {
            Some(a) if !better(s, &scored[a].1, config.prefer_lowest_key) => Some(a),
            _ => Some(i),
        });
    let alt = |i: usize| Alternative { notation: format_move(&scored[i].0), priority: scored[i].2, score: scored[i].1 };
    let checks = QUESTIONS
        .iter()
        .map(|&(priority, question)| {
            let best_here = if priority == 6 {
                Some(best)
            } else {
                scored.iter().enumerate().filter(|(_, (_, _, p))| *p == priority).fold(
                    None::<usize>,
                    |acc, (i, (_, s, _))| match acc {
                        Some(a) if !better(s, &scored[a].1, config.prefer_lowest_key) => Some(a),
                        _ => Some(i),
                    },
                )
            };
            PriorityCheck {
                priority,
                question: question.to_string(),
                satisfiable: best_here.is_some(),
                best: best_here.map(alt),
            }
        })
        .collect();
    let (mv, score, priority) = scored[best];
    let justification = Justification {
        candidates: scored.len(),
        checks,
        selected: alt(best),
        runner_up: runner_up.map(alt),
        deciding_field: runner_up.map(|r| score.deciding_field(&scored[r].1).to_string()),
    };
    Ok(Proposal { mv, declared_events: predictor.predict(state, &mv)?, priority_met: priority, justification })
}

/// Proposal for a given move, without searching. An illegal move yields an
/// empty declaration, a zero score and priority 7.
pub fn evaluate_proposal(state: &GameState, mv: &Move, config: &StrategyConfig, predictor: &dyn Predictor) -> Proposal {
    let zero = OutcomeScore { exits: 0, to_final_row: 0, advances: 0, maneuver_value: 0, tie_break: MoveKey::of(mv) };
    let (score, declared, priority) = match score_move(state, mv, config) {
        Ok(s) => (s, predictor.predict(state, mv).unwrap_or_default(), priority_of(mv, &s)),
        Err(_) => (zero, Vec::new(), 7),
    };
    let selected = Alternative { notation: format_move(mv), priority, score };
    Proposal {
        mv: *mv,
        declared_events: declared,
        priority_met: priority,
        justification: Justification {
            candidates: 1,
            checks: Vec::new(),
            selected,
            runner_up: None,
            deciding_field: None,
        },
    }
}

/// A strategist bound to a configuration and predictor.
pub struct Strategist {
    pub config: StrategyConfig,
    predictor: Box<dyn Predictor>,
}

impl Strategist {
    pub fn new(config: StrategyConfig) -> Self {
        let predictor = config.predictor();
        Strategist { config, predictor }
    }

    pub fn with_predictor(config: StrategyConfig, predictor: Box<dyn Predictor>) -> Self {
        Strategist { config, predictor }
    }

    pub fn select(&self, state: &GameState) -> Result<Proposal, StrategyError> {
        select_move(state, &self.config, self.predictor.as_ref())
    }

    pub fn predictor(&self) -> &dyn Predictor {
        self.predictor.as_ref()
    }
}

impl Default for Strategist {
    fn default() -> Self {
        Strategist::new(StrategyConfig::default())
    }
}
