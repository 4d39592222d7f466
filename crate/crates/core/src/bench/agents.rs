//! Baseline agents.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::env::{Env, Mode};
use crate::rng::{stage, stage_rng};

/// The fixed command set of the simple agent.
pub const SIMPLE_COMMANDS: [&str; 11] = [
    "north",
    "south",
    "east",
    "west",
    "up",
    "down",
    "look",
    "inventory",
    "take all",
    "drop",
    "yes",
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Move {
    Command(String),
    Choice(usize),
}

pub trait Agent: Send {
    fn mode(&self) -> Mode;
    /// `None` when the agent has nothing it can do.
    fn act(&mut self, env: &Env) -> Option<Move>;
}

/// Uniform over the admissible commands.
pub struct RandomChoiceAgent {
    rng: ChaCha8Rng,
}

pub fn random_choice_agent(seed: u64) -> RandomChoiceAgent {
    RandomChoiceAgent {
        rng: stage_rng(seed, stage::AGENT),
    }
}

impl Agent for RandomChoiceAgent {
    fn mode(&self) -> Mode {
        Mode::Choice
    }

    fn act(&mut self, env: &Env) -> Option<Move> {
        let n = env.choices().len();
        (n > 0).then(|| Move::Choice(self.rng.gen_range(0..n)))
    }
}

/// Uniform over [`SIMPLE_COMMANDS`], whatever the game says.
pub struct SimpleAgent {
    rng: ChaCha8Rng,
}

pub fn simple_agent(seed: u64) -> SimpleAgent {
    SimpleAgent {
        rng: stage_rng(seed, stage::AGENT),
    }
}

impl SimpleAgent {
    pub fn sample(&mut self) -> &'static str {
        SIMPLE_COMMANDS.choose(&mut self.rng).expect("non-empty")
    }
}

impl Agent for SimpleAgent {
    fn mode(&self) -> Mode {
        Mode::Parser
    }

    fn act(&mut self, _env: &Env) -> Option<Move> {
        Some(Move::Command(self.sample().to_string()))
    }
}

/// Follows the engine's winning policy.
pub struct OracleAgent;

impl Agent for OracleAgent {
    fn mode(&self) -> Mode {
        Mode::Parser
    }

    fn act(&mut self, env: &Env) -> Option<Move> {
        env.session()
            .winning_commands()
            .into_iter()
            .next()
            .map(Move::Command)
    }
}

/// Types a word no game understands.
pub struct IdleAgent;

impl Agent for IdleAgent {
    fn mode(&self) -> Mode {
        Mode::Parser
    }

    fn act(&mut self, _env: &Env) -> Option<Move> {
        Some(Move::Command("xyzzy".into()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AgentKind {
    Random,
    Simple,
    Oracle,
    Idle,
}

impl AgentKind {
    pub fn build(self, seed: u64) -> Box<dyn Agent> {
        match self {
            AgentKind::Random => Box::new(random_choice_agent(seed)),
            AgentKind::Simple => Box::new(simple_agent(seed)),
            AgentKind::Oracle => Box::new(OracleAgent),
            AgentKind::Idle => Box::new(IdleAgent),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            AgentKind::Random => "random",
            AgentKind::Simple => "simple",
            AgentKind::Oracle => "oracle",
            AgentKind::Idle => "idle",
        }
    }
}

impl fmt::Display for AgentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AgentKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "random" => Ok(AgentKind::Random),
            "simple" => Ok(AgentKind::Simple),
            "oracle" => Ok(AgentKind::Oracle),
            "idle" => Ok(AgentKind::Idle),
            other => Err(format!(
                "unknown agent `{other}` (random, simple, oracle, idle)"
            )),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::EnvConfig;
    use crate::fixtures::{mini_world_game, mini_world_open_game};

    #[test]
    fn simple_agent_only_says_its_eleven_commands() {
        let mut a = simple_agent(3);
        let mut b = simple_agent(3);
        for _ in 0..200 {
            let c = a.sample();
            assert!(SIMPLE_COMMANDS.contains(&c));
            assert_eq!(c, b.sample());
        }
    }

    #[test]
    fn single_choice_is_taken() {
        let env = Env::start(mini_world_game(), EnvConfig::choice()).unwrap();
        assert_eq!(env.choices(), ["open fridge"]);
        let mut agent = random_choice_agent(0);
        for _ in 0..20 {
            assert_eq!(agent.act(&env), Some(Move::Choice(0)));
        }
    }

    #[test]
    fn random_agent_is_reproducible() {
        let env = Env::start(mini_world_open_game(), EnvConfig::choice()).unwrap();
        let picks = |seed| {
            let mut a = random_choice_agent(seed);
            (0..30).map(|_| a.act(&env)).collect::<Vec<_>>()
        };
        assert_eq!(picks(5), picks(5));
    }

    #[test]
    fn kinds_parse() {
        for k in [
            AgentKind::Random,
            AgentKind::Simple,
            AgentKind::Oracle,
            AgentKind::Idle,
        ] {
            assert_eq!(k.name().parse::<AgentKind>().unwrap(), k);
        }
        assert!("smart".parse::<AgentKind>().is_err());
    }
}
