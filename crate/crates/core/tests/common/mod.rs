#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tw_core::game::GameDefinition;
use tw_core::logic::{admissible_actions, apply_action};
use tw_core::make::{make_game, GameSpec};
use tw_core::quest::ChainDirection;
use tw_core::State;

/// A varied generated game: doors on odd seeds, backward chaining on
/// every third seed.
pub fn varied_game(seed: u64) -> GameDefinition {
    let length = 1 + (seed % 5) as usize;
    let mut spec = GameSpec::new(
        2 + length + (seed % 3) as usize,
        4 + (seed % 7) as usize,
        length,
        seed,
    );
    spec.world.with_doors = seed % 2 == 1;
    if seed.is_multiple_of(3) {
        spec.direction = ChainDirection::Backward;
    }
    make_game(&spec).expect("generated game")
}

/// States met on a seeded random walk from the initial state.
pub fn walk_states(game: &GameDefinition, steps: usize, seed: u64) -> Vec<State> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut state = game.initial_state.clone();
    let mut out = vec![state.clone()];
    for _ in 0..steps {
        let actions = admissible_actions(&state, game.rules.rules());
        let Some(a) = actions.choose(&mut rng) else {
            break;
        };
        state = apply_action(&state, a).expect("admissible");
        out.push(state.clone());
    }
    out
}
