//! One-life evaluation: each game runs until the first terminal pickup or
//! until the step budget is spent.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::agents::{AgentKind, Move};
use crate::engine::{Outcome, DEFAULT_MAX_STEPS};
use crate::env::{Env, EnvConfig};
use crate::game::GameDefinition;
use crate::par::{map_indexed, Execution};
use crate::rng::derive_seed;

pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameRecord {
    pub index: usize,
    /// The seed the game was generated from, when it records one.
    pub seed: Option<u64>,
    pub outcome: Outcome,
    pub steps: u32,
    pub score: i32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalResult {
    pub schema_version: u32,
    pub agent: AgentKind,
    pub agent_seed: u64,
    pub max_steps: u32,
    pub avg_score: f64,
    pub avg_steps: f64,
    pub games: Vec<GameRecord>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EvalConfig {
    pub agent: AgentKind,
    pub agent_seed: u64,
    pub max_steps: u32,
    pub execution: Execution,
}

impl EvalConfig {
    pub fn new(agent: AgentKind, agent_seed: u64) -> Self {
        EvalConfig {
            agent,
            agent_seed,
            max_steps: DEFAULT_MAX_STEPS,
            execution: Execution::default(),
        }
    }
}

/// Plays every game once with a fresh agent. Game `i` gets the agent seed
/// `derive_seed(agent_seed, i)`, so the result does not depend on
/// scheduling.
pub fn evaluate(games: &[Arc<GameDefinition>], cfg: &EvalConfig) -> EvalResult {
    let games: Vec<GameRecord> = map_indexed(games, cfg.execution, |i, g| play_one(i, g, cfg));
    let n = games.len().max(1) as f64;
    EvalResult {
        schema_version: REPORT_SCHEMA_VERSION,
        agent: cfg.agent,
        agent_seed: cfg.agent_seed,
        max_steps: cfg.max_steps,
        avg_score: games.iter().map(|r| f64::from(r.score)).sum::<f64>() / n,
        avg_steps: games.iter().map(|r| f64::from(r.steps)).sum::<f64>() / n,
        games,
    }
}

fn play_one(index: usize, game: &Arc<GameDefinition>, cfg: &EvalConfig) -> GameRecord {
    let seed = derive_seed(cfg.agent_seed, index as u64);
    let mut agent = cfg.agent.build(seed);
    let env_cfg = EnvConfig {
        mode: agent.mode(),
        max_steps: cfg.max_steps,
        seed,
        ..EnvConfig::default()
    };
    let mut env = Env::start(game.clone(), env_cfg).expect("benchmark games are valid");
    let mut stuck = false;
    while !env.session().is_done() {
        let step = match agent.act(&env) {
            Some(Move::Command(c)) => env.step(&c),
            Some(Move::Choice(i)) => env.step_choice(i),
            None => {
                stuck = true;
                break;
            }
        };
        step.expect("agent acts in its own mode on a running game");
    }
    let s = env.session();
    let (outcome, steps) = if stuck {
        (Outcome::Expired, cfg.max_steps)
    } else {
        (s.outcome(), s.moves())
    };
    GameRecord {
        index,
        seed: game.metadata.seeds.get("seed").copied(),
        outcome,
        steps,
        score: s.score(),
    }
}
