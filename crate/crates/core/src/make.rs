//! Whole-game generation: map, objects, quest, names and text from one
//! spec and seed.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::game::{GameDefinition, GameParts, Metadata};
use crate::kb::{builtin_rules, RuleSet};
use crate::quest::{
    backward_quest, forward_quest, ChainConfig, ChainDirection, QuestError, DEFAULT_SEARCH_BREADTH,
};
use crate::rng::{derive_seed, stage, stage_rng};
use crate::text::{assign_names_with, Grammar, NameError, TextOptions, Theme};
use crate::world::{generate_map, place_objects, TypeMix, WorldError, WorldSpec};

pub const DEFAULT_NB_ROOMS: usize = 5;
pub const DEFAULT_NB_OBJECTS: usize = 6;
pub const DEFAULT_QUEST_LENGTH: usize = 5;

/// Sub-seeds tried when no quest of the requested length exists.
pub const MAX_ATTEMPTS: u64 = 16;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameSpec {
    pub world: WorldSpec,
    pub quest_length: usize,
    pub direction: ChainDirection,
    pub theme: Theme,
    pub options: TextOptions,
    pub type_mix: TypeMix,
    pub max_search_breadth: usize,
}

impl GameSpec {
    pub fn new(nb_rooms: usize, nb_objects: usize, quest_length: usize, seed: u64) -> Self {
        GameSpec {
            world: WorldSpec {
                nb_rooms,
                grid_size: default_grid_size(nb_rooms),
                with_doors: false,
                nb_objects,
                seed,
            },
            quest_length,
            direction: ChainDirection::Forward,
            theme: Theme::House,
            options: TextOptions::default(),
            type_mix: TypeMix::house(),
            max_search_breadth: DEFAULT_SEARCH_BREADTH,
        }
    }
}

impl Default for GameSpec {
    fn default() -> Self {
        GameSpec::new(
            DEFAULT_NB_ROOMS,
            DEFAULT_NB_OBJECTS,
            DEFAULT_QUEST_LENGTH,
            0,
        )
    }
}

/// Smallest square with a free ring around `nb_rooms` cells.
pub fn default_grid_size(nb_rooms: usize) -> usize {
    (nb_rooms as f64).sqrt().ceil() as usize + 1
}

#[derive(Debug, Error)]
pub enum MakeError {
    #[error(transparent)]
    World(#[from] WorldError),
    #[error("invalid quest settings: {0}")]
    InvalidQuest(String),
    #[error("no quest of length {length} after {attempts} attempts: {last}")]
    NoQuest {
        length: usize,
        attempts: u64,
        last: QuestError,
    },
    #[error(transparent)]
    Names(#[from] NameError),
}

pub fn make_game(spec: &GameSpec) -> Result<GameDefinition, MakeError> {
    make_game_with(spec, &builtin_rules(), &Grammar::builtin(spec.theme))
}

/// As [`make_game`] with explicit rules and grammar. The logic layer only
/// draws from the world, object and quest streams, so two grammars over
/// the same spec yield the same atoms and quest.
pub fn make_game_with(
    spec: &GameSpec,
    rules: &RuleSet,
    grammar: &Grammar,
) -> Result<GameDefinition, MakeError> {
    spec.world.validate()?;
    if spec.quest_length == 0 {
        return Err(MakeError::InvalidQuest(
            "quest length must be at least 1".into(),
        ));
    }
    let seed = spec.world.seed;
    let mut last = None;
    for attempt in 0..MAX_ATTEMPTS {
        let sub = if attempt == 0 {
            seed
        } else {
            derive_seed(seed, attempt)
        };
        let map = generate_map(&spec.world, &mut stage_rng(sub, stage::WORLD))?;
        let placed = place_objects(
            &map,
            spec.world.nb_objects,
            &spec.type_mix,
            &mut stage_rng(sub, stage::OBJECTS),
        );
        let cfg = ChainConfig {
            max_search_breadth: spec.max_search_breadth,
            ..ChainConfig::new(spec.quest_length, spec.direction, sub)
        };
        let mut quest_rng = stage_rng(sub, stage::QUEST);
        let found = match spec.direction {
            ChainDirection::Forward => {
                forward_quest(&placed, rules, &cfg, &mut quest_rng).map(|q| (placed, q))
            }
            ChainDirection::Backward => backward_quest(&placed, rules, None, &cfg, &mut quest_rng),
        };
        let (initial, quest) = match found {
            Ok(found) => found,
            Err(e @ QuestError::NoQuestFound { .. }) => {
                last = Some(e);
                continue;
            }
            Err(e) => return Err(MakeError::InvalidQuest(e.to_string())),
        };
        let names = assign_names_with(
            &initial,
            grammar,
            spec.options.use_adjectives,
            &mut stage_rng(sub, stage::TEXT),
        )?;
        let metadata = Metadata {
            generator: "make".into(),
            seeds: [("seed".to_string(), seed), ("attempt".to_string(), attempt)].into(),
            level: None,
            mode: None,
        };
        let coords = map
            .rooms
            .iter()
            .map(|c| (c.id.clone(), (c.x, c.y)))
            .collect();
        return Ok(GameParts {
            initial_state: initial,
            rules: rules.clone(),
            quest: Some(quest),
            names,
            coords,
            options: spec.options,
            text_seed: sub,
            metadata,
        }
        .compose(grammar));
    }
    Err(MakeError::NoQuest {
        length: spec.quest_length,
        attempts: MAX_ATTEMPTS,
        last: last.expect("at least one attempt"),
    })
}
