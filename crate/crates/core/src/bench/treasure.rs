//! Treasure Hunter: find the object named in the welcome message and pick
//! it up, without touching the other one lying around.

use std::collections::BTreeMap;
use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::game::{GameDefinition, GameParts, Metadata};
use crate::kb::{builtin_rules, RuleSet};
use crate::logic::{admissible_actions, Atom, EntityId, State, TypeTag};
use crate::make::default_grid_size;
use crate::par::{map_range, Execution};
use crate::quest::{backward_chain, state_consistent, ChainConfig, ChainDirection, Goal, Quest};
use crate::rng::{derive_seed, stage, stage_rng};
use crate::text::{assign_names, Grammar, Granularity, NameError, TextOptions, Theme};
use crate::world::{generate_map, DoorState, WorldSpec, DOOR_CLOSED_PROBABILITY};

pub const MIN_LEVEL: u32 = 1;
pub const MAX_LEVEL: u32 = 30;
/// Sub-seeds tried before giving up on a (level, seed) pair.
pub const MAX_ATTEMPTS: u64 = 64;
const SEARCH_BREADTH: usize = 20_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Easy,
    Medium,
    Hard,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Easy => "easy",
            Mode::Medium => "medium",
            Mode::Hard => "hard",
        }
    }

    /// Rules the player can use.
    pub fn rules(self) -> RuleSet {
        let mut names = vec![
            "go/north", "go/south", "go/east", "go/west", "take/r", "drop/r",
        ];
        if self != Mode::Easy {
            names.extend([
                "open/c", "close/c", "open/d", "close/d", "take/c", "insert/c", "take/s", "put/s",
            ]);
        }
        if self == Mode::Hard {
            names.extend(["lock/c", "unlock/c", "lock/d", "unlock/d"]);
        }
        builtin_rules().subset(&names)
    }

    /// Rules the backward search may chain; it never undoes progress.
    fn quest_rules(self) -> RuleSet {
        let mut names = vec!["go/north", "go/south", "go/east", "go/west", "take/r"];
        if self != Mode::Easy {
            names.extend(["open/c", "open/d", "take/c", "take/s"]);
        }
        if self == Mode::Hard {
            names.extend(["unlock/c", "unlock/d"]);
        }
        builtin_rules().subset(&names)
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DifficultySpec {
    pub level: u32,
    pub mode: Mode,
    pub nb_rooms: usize,
    pub quest_length: usize,
}

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("level {0} is outside {MIN_LEVEL}..={MAX_LEVEL}")]
    InvalidLevel(u32),
    #[error("no treasure hunter game for level {level}, seed {seed} after {attempts} attempts")]
    GenerationFailed {
        level: u32,
        seed: u64,
        attempts: u64,
    },
    #[error(transparent)]
    Names(#[from] NameError),
}

/// Levels come in three bands of ten; quest length grows linearly inside
/// each band between the band's endpoints.
pub fn difficulty(level: u32) -> Result<DifficultySpec, BenchError> {
    if !(MIN_LEVEL..=MAX_LEVEL).contains(&level) {
        return Err(BenchError::InvalidLevel(level));
    }
    let (mode, nb_rooms, lo, hi, start) = match level {
        1..=10 => (Mode::Easy, 5, 1.0, 5.0, 1),
        11..=20 => (Mode::Medium, 10, 2.0, 10.0, 11),
        _ => (Mode::Hard, 20, 3.0, 20.0, 21),
    };
    let quest_length = (lo + f64::from(level - start) * (hi - lo) / 9.0).round() as usize;
    Ok(DifficultySpec {
        level,
        mode,
        nb_rooms,
        quest_length,
    })
}

pub fn make_treasure_hunter(level: u32, seed: u64) -> Result<GameDefinition, BenchError> {
    make_treasure_hunter_with(level, seed, Theme::House)
}

pub fn make_treasure_hunter_with(
    level: u32,
    seed: u64,
    theme: Theme,
) -> Result<GameDefinition, BenchError> {
    let spec = difficulty(level)?;
    let grammar = Grammar::builtin(theme);
    for attempt in 0..MAX_ATTEMPTS {
        let sub = if attempt == 0 {
            seed
        } else {
            derive_seed(seed, attempt)
        };
        if let Some(hunt) = attempt_hunt(&spec, sub) {
            return Ok(hunt.into_game(&spec, seed, attempt, &grammar)?);
        }
    }
    Err(BenchError::GenerationFailed {
        level,
        seed,
        attempts: MAX_ATTEMPTS,
    })
}

/// One game per seed, `seeds[i]` giving game `i`.
pub fn suite(
    level: u32,
    seeds: &[u64],
    exec: Execution,
) -> Result<Vec<GameDefinition>, BenchError> {
    map_range(seeds.len(), exec, |i| make_treasure_hunter(level, seeds[i]))
        .into_iter()
        .collect()
}

/// Seeds of a suite of `n` games derived from one base seed.
pub fn suite_seeds(seed: u64, n: usize) -> Vec<u64> {
    (0..n as u64).map(|i| derive_seed(seed, i)).collect()
}

struct Hunt {
    initial: State,
    quest: Quest,
    target: EntityId,
    coords: BTreeMap<EntityId, (i32, i32)>,
    sub_seed: u64,
}

impl Hunt {
    fn into_game(
        self,
        spec: &DifficultySpec,
        seed: u64,
        attempt: u64,
        grammar: &Grammar,
    ) -> Result<GameDefinition, NameError> {
        let mut rng = stage_rng(self.sub_seed, stage::TEXT);
        let names = assign_names(&self.initial, grammar, &mut rng)?;
        let options = TextOptions {
            instruction_granularity: Granularity::FinalActionOnly,
            ..TextOptions::default()
        };
        let metadata = Metadata {
            generator: "treasure-hunter".into(),
            seeds: [("seed".to_string(), seed), ("attempt".to_string(), attempt)].into(),
            level: Some(spec.level),
            mode: Some(spec.mode.name().into()),
        };
        let mut game = GameParts {
            initial_state: self.initial,
            rules: spec.mode.rules(),
            quest: Some(self.quest),
            names,
            coords: self.coords,
            options,
            text_seed: self.sub_seed,
            metadata,
        }
        .compose(grammar);
        let obj = format!("the {}", game.names.display(&self.target));
        let mut rng = stage_rng(self.sub_seed, stage::TEXT);
        let objective = grammar
            .render("instr_find", &[("obj", &obj)], &mut rng)
            .unwrap_or_default();
        game.text.welcome = format!("{} {objective}", game.text.welcome);
        game.text.objective = objective;
        Ok(game)
    }
}

fn attempt_hunt(spec: &DifficultySpec, sub: u64) -> Option<Hunt> {
    let mut world_rng = stage_rng(sub, stage::WORLD);
    let world = WorldSpec {
        nb_rooms: spec.nb_rooms,
        grid_size: default_grid_size(spec.nb_rooms),
        with_doors: spec.mode != Mode::Easy,
        nb_objects: 0,
        seed: sub,
    };
    let mut map = generate_map(&world, &mut world_rng).ok()?;
    // doors start open so the search may route through them; it closes
    // and locks the ones it needs, the rest are closed afterwards
    for st in map.door_states.values_mut() {
        *st = DoorState::Open;
    }
    let mut seed_state = State::from_atoms(map.atoms(true));
    let end_room = map.rooms.choose(&mut world_rng)?.id.clone();
    seed_state.insert(Atom::new("at", vec![EntityId::player(), end_room]));

    let mut obj_rng = stage_rng(sub, stage::OBJECTS);
    let (target_id, distractor_id) = if obj_rng.gen_bool(0.5) {
        ("o1", "o2")
    } else {
        ("o2", "o1")
    };
    let target = EntityId::new(target_id, TypeTag::Object);
    let goal = Goal::Produce(Atom::new("in", vec![target.clone(), EntityId::inventory()]));
    let cfg = ChainConfig {
        max_search_breadth: SEARCH_BREADTH,
        ..ChainConfig::new(spec.quest_length, ChainDirection::Backward, sub)
    };
    let mut quest_rng = stage_rng(sub, stage::QUEST);
    let (mut initial, quest) = backward_chain(
        &seed_state,
        &spec.mode.quest_rules(),
        &goal,
        &cfg,
        &mut quest_rng,
    )
    .ok()?;

    close_unused_doors(&mut initial, &quest, &mut obj_rng);
    let distractor = fresh_object(&initial, distractor_id);
    let spots: Vec<Atom> = placements(&initial, &distractor);
    initial.insert(spots.choose(&mut obj_rng)?.clone());

    let quest = Quest {
        winning_conditions: vec![Atom::new("in", vec![target.clone(), EntityId::inventory()])],
        losing_conditions: vec![Atom::new(
            "in",
            vec![distractor.clone(), EntityId::inventory()],
        )],
        actions: quest.actions,
    };
    if !state_consistent(&initial) || quest.validate(&initial).is_err() {
        return None;
    }
    let states = quest.replay(&initial).ok()?;
    if states.iter().any(|s| quest.is_lost(s)) {
        return None;
    }
    if !can_reach(
        &initial,
        &spec.mode.rules(),
        &quest.losing_conditions[0],
        &quest.winning_conditions[0],
    ) {
        return None;
    }
    let coords = map
        .rooms
        .iter()
        .map(|c| (c.id.clone(), (c.x, c.y)))
        .collect();
    Some(Hunt {
        initial,
        quest,
        target,
        coords,
        sub_seed: sub,
    })
}

/// Closes, with the world generator's probability, each door the quest
/// never touches or walks through.
fn close_unused_doors<R: Rng + ?Sized>(state: &mut State, quest: &Quest, rng: &mut R) {
    let links: Vec<(EntityId, EntityId, EntityId)> = state
        .with_predicate("link")
        .map(|a| (a.arg(0).clone(), a.arg(1).clone(), a.arg(2).clone()))
        .collect();
    let mut doors: BTreeMap<EntityId, Vec<(EntityId, EntityId)>> = BTreeMap::new();
    for (a, d, b) in links {
        doors.entry(d).or_default().push((a, b));
    }
    for (door, sides) in doors {
        let open = Atom::new("open", vec![door.clone()]);
        if !state.contains(&open) {
            continue;
        }
        let passages: Vec<Atom> = sides
            .iter()
            .map(|(a, b)| Atom::new("free", vec![a.clone(), b.clone()]))
            .collect();
        let used = quest.actions.iter().any(|act| {
            act.binding.contains(&door)
                || act
                    .required
                    .iter()
                    .chain(&act.consumed)
                    .chain(&act.produced)
                    .any(|atom| passages.contains(atom))
        });
        if used || !rng.gen_bool(DOOR_CLOSED_PROBABILITY) {
            continue;
        }
        state.remove(&open);
        for p in &passages {
            state.remove(p);
        }
        state.insert(Atom::new("closed", vec![door]));
    }
}

fn fresh_object(state: &State, preferred: &str) -> EntityId {
    let taken: Vec<String> = state
        .entities()
        .iter()
        .map(|e| e.id().to_string())
        .collect();
    std::iter::once(preferred.to_string())
        .chain((1..).map(|n| format!("o{n}")))
        .find(|id| !taken.contains(id))
        .map(|id| EntityId::new(id, TypeTag::Object))
        .expect("unbounded")
}

/// Every floor, container and supporter the distractor could sit on.
fn placements(state: &State, obj: &EntityId) -> Vec<Atom> {
    let mut out = Vec::new();
    for e in state.entities() {
        let pred = match e.tag() {
            TypeTag::Room => "at",
            TypeTag::Container => "in",
            TypeTag::Supporter => "on",
            _ => continue,
        };
        out.push(Atom::new(pred, vec![obj.clone(), e]));
    }
    out
}

/// Whether some sequence of actions produces `goal` without ever producing
/// `avoid`. Facts are only accumulated, never consumed; every action of the
/// benchmark rule sets can be undone, so this matches true reachability
/// there.
pub fn can_reach(initial: &State, rules: &RuleSet, goal: &Atom, avoid: &Atom) -> bool {
    let mut facts = State::from_atoms(initial.distinct().cloned());
    if facts.contains(goal) {
        return true;
    }
    loop {
        let mut grew = false;
        for a in admissible_actions(&facts, rules.rules()) {
            if a.produced.contains(avoid) {
                continue;
            }
            if a.produced.contains(goal) {
                return true;
            }
            for p in a.produced {
                if !facts.contains(&p) {
                    facts.insert(p);
                    grew = true;
                }
            }
        }
        if !grew {
            return false;
        }
    }
}
