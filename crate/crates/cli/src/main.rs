//! `tw`: generate, play, evaluate, benchmark, inspect and serve games.

mod inspect;
mod play;
mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;
use tw_core::bench::{
    make_treasure_hunter_with, suite, suite_seeds, AgentKind, BenchError, EvalConfig,
};
use tw_core::fixtures::mini_world_game_with;
use tw_core::game::GameDefinition;
use tw_core::kb::builtin_rules;
use tw_core::make::{default_grid_size, make_game_with, GameSpec, MakeError};
use tw_core::par::Execution;
use tw_core::quest::ChainDirection;
use tw_core::text::{Grammar, Granularity, Theme};

#[derive(Debug, Parser)]
#[command(
    name = "tw",
    version,
    about = "Text-game generator, runtime and benchmark"
)]
struct Cli {
    /// Seed for generation and agents.
    #[arg(long, global = true, env = "TW_SEED")]
    seed: Option<u64>,

    /// Print timings to stderr and one line per evaluated game.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a game file.
    Make(MakeArgs),
    /// Play a game in the terminal.
    Play(PlayArgs),
    /// Run an agent over game files.
    Eval(EvalArgs),
    /// Run a benchmark suite.
    #[command(subcommand)]
    Bench(BenchCommand),
    /// Describe a game file.
    Inspect(InspectArgs),
    /// Start the session service.
    Serve(ServeArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum DirectionArg {
    Forward,
    Backward,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum InstructionsArg {
    EveryAction,
    FinalActionOnly,
    None,
}

#[derive(Debug, Args)]
struct MakeArgs {
    #[arg(long, default_value_t = tw_core::make::DEFAULT_NB_ROOMS)]
    rooms: usize,
    #[arg(long, default_value_t = tw_core::make::DEFAULT_NB_OBJECTS)]
    objects: usize,
    #[arg(long, default_value_t = tw_core::make::DEFAULT_QUEST_LENGTH)]
    quest_length: usize,
    /// Side of the square grid rooms are laid out on.
    #[arg(long)]
    grid: Option<usize>,
    /// Put doors between some rooms.
    #[arg(long)]
    doors: bool,
    #[arg(long, value_enum, default_value = "forward")]
    direction: DirectionArg,
    /// Candidate chains kept per search step.
    #[arg(long)]
    breadth: Option<usize>,

    #[arg(long, default_value = "house")]
    theme: Theme,
    /// Grammar file replacing the theme's grammar.
    #[arg(long)]
    grammar: Option<PathBuf>,
    #[arg(long)]
    no_adjectives: bool,
    #[arg(long)]
    no_coreference: bool,
    #[arg(long)]
    group_similar: bool,
    #[arg(long)]
    refer_by_attributes: bool,
    #[arg(long, value_enum, default_value = "every-action")]
    instructions: InstructionsArg,
    #[arg(long)]
    combine_instructions: bool,

    /// Make a Treasure Hunter game of this level instead.
    #[arg(long, conflicts_with_all = ["rooms", "objects", "quest_length", "grid", "doors", "direction", "breadth", "grammar", "mini_world"])]
    level: Option<u32>,
    /// Write the kitchen game with the apple in the fridge.
    #[arg(long, conflicts_with_all = ["rooms", "objects", "quest_length", "grid", "doors", "direction", "breadth", "grammar"])]
    mini_world: bool,

    #[arg(long, short)]
    out: Option<PathBuf>,
    /// Also print the winning commands.
    #[arg(long)]
    solution: bool,
}

#[derive(Debug, Args)]
struct PlayArgs {
    game: PathBuf,
    /// Pick commands by number.
    #[arg(long)]
    choices: bool,
    #[arg(long, default_value_t = tw_core::engine::DEFAULT_MAX_STEPS)]
    max_steps: u32,
    #[arg(long)]
    no_objective: bool,
    /// Show intermediate rewards and the winning policy each turn.
    #[arg(long)]
    debug: bool,
}

#[derive(Debug, Args)]
struct AgentArgs {
    /// random, simple, oracle or idle.
    #[arg(long, default_value = "random")]
    agent: AgentKind,
    #[arg(long, default_value_t = tw_core::engine::DEFAULT_MAX_STEPS)]
    max_steps: u32,
    /// Run games one after another.
    #[arg(long)]
    sequential: bool,
    /// Where to write the JSON report.
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct EvalArgs {
    #[arg(required = true)]
    games: Vec<PathBuf>,
    #[command(flatten)]
    agent: AgentArgs,
}

#[derive(Debug, Subcommand)]
enum BenchCommand {
    /// Treasure Hunter: find the target object and pick it up.
    Th(ThArgs),
}

#[derive(Debug, Args)]
struct ThArgs {
    #[arg(long)]
    level: u32,
    #[arg(long, default_value_t = 100)]
    games: usize,
    #[command(flatten)]
    agent: AgentArgs,
}

#[derive(Debug, Args)]
struct InspectArgs {
    game: PathBuf,
    /// Stop counting reachable states here.
    #[arg(long, default_value_t = 10_000)]
    state_limit: usize,
}

#[derive(Debug, Args)]
struct ServeArgs {
    #[arg(long, default_value = "127.0.0.1:8080")]
    addr: String,
    /// Drop sessions idle for this many seconds.
    #[arg(long, default_value_t = 1800)]
    ttl: u64,
    #[arg(long, default_value_t = 256)]
    max_sessions: usize,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Internal(_) => 3,
        }
    }
}

impl From<MakeError> for CliError {
    fn from(e: MakeError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<BenchError> for CliError {
    fn from(e: BenchError) -> Self {
        match e {
            BenchError::InvalidLevel(_) => CliError::Input(e.to_string()),
            other => CliError::Internal(other.to_string()),
        }
    }
}

pub fn load_game(path: &Path) -> Result<GameDefinition, CliError> {
    GameDefinition::load(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text)
        .map_err(|e| CliError::Internal(format!("cannot write {}: {e}", path.display())))
}

/// Exits 0 on success, 1 on usage errors, 2 on invalid input and 3 on
/// internal failures.
fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("tw: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let seed = cli.seed.unwrap_or(0);
    let verbose = cli.verbose > 0;
    match cli.command {
        Command::Make(args) => make(args, seed, verbose),
        Command::Play(args) => {
            let game = load_game(&args.game)?;
            let opts = play::PlayOptions {
                choices: args.choices,
                max_steps: args.max_steps,
                objective: !args.no_objective,
                debug: args.debug,
                seed,
            };
            let stdin = std::io::stdin();
            play::run(game, &opts, stdin.lock(), std::io::stdout().lock())
                .map_err(|e| CliError::Internal(e.to_string()))
        }
        Command::Eval(args) => {
            let games = args
                .games
                .iter()
                .map(|p| load_game(p).map(Arc::new))
                .collect::<Result<Vec<_>, _>>()?;
            let files = args.games.iter().map(|p| p.display().to_string()).collect();
            let started = Instant::now();
            let result = tw_core::bench::evaluate(&games, &eval_config(&args.agent, seed));
            timing(verbose, "eval", started.elapsed());
            let r = report::Report::files(files, result);
            finish(&r, args.agent.out.as_deref(), verbose)
        }
        Command::Bench(BenchCommand::Th(args)) => {
            if args.games == 0 {
                return Err(CliError::Input("--games must be at least 1".into()));
            }
            let exec = execution(args.agent.sequential);
            let started = Instant::now();
            let games: Vec<_> = suite(args.level, &suite_seeds(seed, args.games), exec)?
                .into_iter()
                .map(Arc::new)
                .collect();
            timing(verbose, "generate", started.elapsed());
            let started = Instant::now();
            let result = tw_core::bench::evaluate(&games, &eval_config(&args.agent, seed));
            timing(verbose, "evaluate", started.elapsed());
            let r = report::Report::treasure_hunter(args.level, seed, result);
            finish(&r, args.agent.out.as_deref(), verbose)
        }
        Command::Inspect(args) => {
            let game = load_game(&args.game)?;
            let text = inspect::report(&args.game, &game, args.state_limit);
            print!("{text}");
            Ok(())
        }
        Command::Serve(args) => serve(args),
    }
}

fn execution(sequential: bool) -> Execution {
    if sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    }
}

fn eval_config(args: &AgentArgs, seed: u64) -> EvalConfig {
    EvalConfig {
        max_steps: args.max_steps,
        execution: execution(args.sequential),
        ..EvalConfig::new(args.agent, seed)
    }
}

fn timing(verbose: bool, what: &str, took: Duration) {
    if verbose {
        eprintln!("{what}: {took:.2?}");
    }
}

fn finish(r: &report::Report, out: Option<&Path>, verbose: bool) -> Result<(), CliError> {
    print!("{}", r.summary(verbose));
    if let Some(out) = out {
        write_file(out, &r.to_json())?;
        println!("report: {}", out.display());
    }
    Ok(())
}

fn make(args: MakeArgs, seed: u64, verbose: bool) -> Result<(), CliError> {
    let started = Instant::now();
    let (game, default_name) = if args.mini_world {
        (
            mini_world_game_with(args.theme),
            format!("mini-world-{}.twg.json", args.theme.name()),
        )
    } else if let Some(level) = args.level {
        (
            make_treasure_hunter_with(level, seed, args.theme)?,
            format!("th-l{level}-s{seed}-{}.twg.json", args.theme.name()),
        )
    } else {
        let grammar = match &args.grammar {
            Some(path) => Grammar::load(path)
                .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?,
            None => Grammar::builtin(args.theme),
        };
        let mut spec = GameSpec::new(args.rooms, args.objects, args.quest_length, seed);
        spec.world.grid_size = args.grid.unwrap_or_else(|| default_grid_size(args.rooms));
        spec.world.with_doors = args.doors;
        spec.direction = match args.direction {
            DirectionArg::Forward => ChainDirection::Forward,
            DirectionArg::Backward => ChainDirection::Backward,
        };
        if let Some(b) = args.breadth {
            spec.max_search_breadth = b;
        }
        spec.theme = args.theme;
        spec.options.use_adjectives = !args.no_adjectives;
        spec.options.use_coreference = !args.no_coreference;
        spec.options.group_similar = args.group_similar;
        spec.options.refer_by_attributes = args.refer_by_attributes;
        spec.options.combine_instructions = args.combine_instructions;
        spec.options.instruction_granularity = match args.instructions {
            InstructionsArg::EveryAction => Granularity::EveryAction,
            InstructionsArg::FinalActionOnly => Granularity::FinalActionOnly,
            InstructionsArg::None => Granularity::None,
        };
        let game = make_game_with(&spec, &builtin_rules(), &grammar)?;
        let name = format!(
            "make-r{}-q{}-s{seed}-{}.twg.json",
            args.rooms,
            args.quest_length,
            args.theme.name()
        );
        (game, name)
    };
    timing(verbose, "make", started.elapsed());
    let out = args.out.unwrap_or_else(|| PathBuf::from(default_name));
    write_file(&out, &game.to_json())?;
    print!("{}", inspect::synopsis(&out, &game, args.solution));
    Ok(())
}

fn serve(args: ServeArgs) -> Result<(), CliError> {
    let config = tw_service::ServiceConfig {
        idle_ttl: Duration::from_secs(args.ttl),
        max_sessions: args.max_sessions,
    };
    let rt = tokio::runtime::Runtime::new().map_err(|e| CliError::Internal(e.to_string()))?;
    rt.block_on(async {
        let listener = tokio::net::TcpListener::bind(&args.addr)
            .await
            .map_err(|e| CliError::Input(format!("cannot listen on {}: {e}", args.addr)))?;
        let addr = listener
            .local_addr()
            .map_err(|e| CliError::Internal(e.to_string()))?;
        println!(
            "listening on http://{addr} (protocol {})",
            tw_service::protocol::PROTOCOL_VERSION
        );
        tw_service::serve(listener, config)
            .await
            .map_err(|e| CliError::Internal(e.to_string()))
    })
}
