use crate::rules::{Direction, GameState, PlacedGear, Rotation, Slot, Target};

use super::StrategyConfig;

fn blocked(g: &PlacedGear, a: Direction, h: &PlacedGear, b: Direction) -> bool {
    g.occupancy.slot(a) == Slot::Occupied && h.occupancy.slot(b) == Slot::Occupied
}

/// True when some base of `g` (rotated to `gb`) points along `d` while some
/// base of `h` (rotated to `hb`) points back, and the two are not both taken.
fn opposing(g: &PlacedGear, gb: Rotation, h: &PlacedGear, hb: Rotation, d: Direction) -> bool {
    g.kind.origin_bases().iter().any(|&a| {
        a.rotated(gb.get()) == d
            && h.kind.origin_bases().iter().any(|&b| b.rotated(hb.get()) == d.opposite() && !blocked(g, a, h, b))
    })
}

/// Path potential: adjacent gear pairs whose facing bases oppose now (weight
/// `current_pair_weight`) or after one global rotation either way (weight
/// `one_rotation_pair_weight`). Each pair counts once, at its best weight.
pub fn path_potential(state: &GameState, config: &StrategyConfig) -> i64 {
    let mut total = 0;
    for (&cell, g) in &state.gears {
        for d in [Direction::Right, Direction::Up] {
            let Target::Cell(other) = d.step(cell, state.level.width, state.level.height) else {
                continue;
            };
            let Some(h) = state.gears.get(&other) else { continue };
            total += pair_weight(g, h, d, config);
        }
    }
    total
}

fn pair_weight(g: &PlacedGear, h: &PlacedGear, d: Direction, config: &StrategyConfig) -> i64 {
    if opposing(g, g.b, h, h.b, d) {
        return config.current_pair_weight;
    }
    // Adjacent squares always have opposite types, so a global rotation turns
    // the two gears in opposite senses.
    let after_one = [1i8, -1].into_iter().any(|s| opposing(g, g.b.turned(s), h, h.b.turned(-s), d));
    if after_one {
        config.one_rotation_pair_weight
    } else {
        0
    }
}
