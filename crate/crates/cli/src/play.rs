//! Terminal play loop.

use std::io::{self, BufRead, Write};

use tw_core::engine::{Observability, Observation, Outcome};
use tw_core::env::{Env, EnvConfig, EnvError, Mode};
use tw_core::game::GameDefinition;

pub struct PlayOptions {
    pub choices: bool,
    pub max_steps: u32,
    pub objective: bool,
    pub debug: bool,
    pub seed: u64,
}

pub fn run<R: BufRead, W: Write>(
    game: GameDefinition,
    opts: &PlayOptions,
    input: R,
    mut out: W,
) -> io::Result<()> {
    let config = EnvConfig {
        mode: if opts.choices {
            Mode::Choice
        } else {
            Mode::Parser
        },
        observability: Observability {
            objective: opts.objective,
            intermediate_reward: opts.debug,
            winning_policy: opts.debug,
            ..Observability::none()
        },
        max_steps: opts.max_steps,
        seed: opts.seed,
    };
    let mut env = Env::start(game, config)
        .map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e.to_string()))?;
    writeln!(out, "(session seed {})", opts.seed)?;
    let first = env.observation().clone();
    writeln!(out, "{}", first.feedback)?;
    if let Some(obj) = first
        .objective
        .as_deref()
        .filter(|o| !first.feedback.contains(o))
    {
        writeln!(out, "{obj}")?;
    }
    writeln!(out, "\n{}", first.description)?;
    turn_extras(&mut out, &env, &first, opts)?;

    let mut lines = input.lines();
    loop {
        write!(out, "> ")?;
        out.flush()?;
        let Some(line) = lines.next() else {
            writeln!(out, "\nBye.")?;
            return Ok(());
        };
        let line = line?;
        let line = line.trim();
        if matches!(line, "quit" | "exit") {
            writeln!(out, "Bye.")?;
            return Ok(());
        }
        let result = if opts.choices {
            match pick(&env, line) {
                Ok(i) => env.step_choice(i),
                Err(msg) => {
                    writeln!(out, "{msg}")?;
                    continue;
                }
            }
        } else {
            env.step(line)
        };
        let r = match result {
            Ok(r) => r,
            Err(EnvError::SessionFinished) => break,
            Err(e) => {
                writeln!(out, "{e}")?;
                continue;
            }
        };
        writeln!(out, "{}", r.observation.feedback)?;
        writeln!(
            out,
            "[score {}, moves {}]",
            r.observation.score, r.observation.moves
        )?;
        if r.done {
            break;
        }
        turn_extras(&mut out, &env, &r.observation, opts)?;
    }
    let s = env.session();
    let banner = match s.outcome() {
        Outcome::Won => "*** You won! ***",
        Outcome::Lost => "*** You lost! ***",
        Outcome::Expired => "*** Out of moves ***",
        Outcome::Running => "*** Game over ***",
    };
    writeln!(out, "\n{banner}")?;
    writeln!(out, "Final score {} in {} moves.", s.score(), s.moves())?;
    Ok(())
}

/// Numbered choices are shown from 1.
fn pick(env: &Env, line: &str) -> Result<usize, String> {
    let choices = env.choices();
    let by_number = line
        .parse::<usize>()
        .ok()
        .filter(|n| (1..=choices.len()).contains(n))
        .map(|n| n - 1);
    by_number
        .or_else(|| choices.iter().position(|c| c == line))
        .ok_or_else(|| format!("Type a number from 1 to {}.", choices.len()))
}

fn turn_extras<W: Write>(
    out: &mut W,
    env: &Env,
    obs: &Observation,
    opts: &PlayOptions,
) -> io::Result<()> {
    if opts.debug {
        if let Some(r) = obs.intermediate_reward {
            writeln!(out, "(intermediate reward {r})")?;
        }
        if let Some(p) = &obs.winning_policy {
            writeln!(out, "(winning policy: {})", p.join(", "))?;
        }
    }
    if opts.choices {
        for (i, c) in env.choices().iter().enumerate() {
            writeln!(out, "  {}. {c}", i + 1)?;
        }
    }
    Ok(())
}
