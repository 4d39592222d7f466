//! Human-readable descriptions of game files.

use std::fmt::Write as _;
use std::path::Path;

use tw_core::game::GameDefinition;
use tw_core::logic::enumerate_reachable;
use tw_core::parser::render_command;
use tw_service::snapshot;

fn provenance(game: &GameDefinition) -> String {
    let m = &game.metadata;
    let mut s = format!("generator {}", m.generator);
    for (k, v) in &m.seeds {
        let _ = write!(s, ", {k} {v}");
    }
    if let Some(l) = m.level {
        let _ = write!(s, ", level {l}");
    }
    if let Some(mode) = &m.mode {
        let _ = write!(s, ", mode {mode}");
    }
    s
}

fn commands(game: &GameDefinition) -> Vec<String> {
    game.quest
        .iter()
        .flat_map(|q| q.actions.iter())
        .map(|a| render_command(a, &game.names, &game.rules))
        .collect()
}

/// What `make` prints after writing a game.
pub fn synopsis(path: &Path, game: &GameDefinition, solution: bool) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "wrote {}", path.display());
    let _ = writeln!(out, "{}", provenance(game));
    let _ = writeln!(out, "objective: {}", game.text.objective);
    if solution {
        let _ = writeln!(out, "solution:");
        for (i, c) in commands(game).iter().enumerate() {
            let _ = writeln!(out, "  {}. {c}", i + 1);
        }
    }
    out
}

pub fn report(path: &Path, game: &GameDefinition, state_limit: usize) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "game: {}", path.display());
    let _ = writeln!(out, "{}", provenance(game));
    let _ = writeln!(
        out,
        "theme {}, {} rules, {} entities",
        game.text.theme.name(),
        game.rules.rules().len(),
        game.entities().len()
    );

    let _ = writeln!(out, "\natoms ({}):", game.initial_state.len());
    for a in game.initial_state.iter() {
        let _ = writeln!(out, "  {a}");
    }

    match &game.quest {
        None => {
            let _ = writeln!(out, "\nquest: no quest");
            let _ = writeln!(out, "winning policy: none");
        }
        Some(q) => {
            let _ = writeln!(out, "\nquest: {} actions", q.len());
            for (i, a) in q.actions.iter().enumerate() {
                let _ = writeln!(out, "  {}. {a}", i + 1);
            }
            let wins: Vec<String> = q.winning_conditions.iter().map(|a| a.to_string()).collect();
            let _ = writeln!(out, "winning conditions: {}", wins.join(", "));
            if !q.losing_conditions.is_empty() {
                let lose: Vec<String> = q.losing_conditions.iter().map(|a| a.to_string()).collect();
                let _ = writeln!(out, "losing conditions: {}", lose.join(", "));
            }
            let _ = writeln!(out, "objective: {}", game.text.objective);
            let _ = writeln!(out, "winning policy: {}", commands(game).join(", "));
        }
    }

    let graph = enumerate_reachable(&game.initial_state, game.rules.rules(), state_limit);
    if graph.truncated {
        let _ = writeln!(
            out,
            "\nreachable states: more than {} (stopped at the limit)",
            graph.states.len()
        );
    } else {
        let _ = writeln!(out, "\nreachable states: {}", graph.states.len());
    }

    let map = snapshot(game, &game.initial_state);
    let _ = writeln!(
        out,
        "\nmap: {} rooms, {} exits, {} doors, {} placed objects",
        map.rooms.len(),
        map.exits.len(),
        map.doors.len(),
        map.objects.len()
    );
    for r in &map.rooms {
        let mut marks = String::new();
        if r.player {
            marks.push_str(" [player]");
        }
        if r.target {
            marks.push_str(" [target]");
        }
        let _ = writeln!(
            out,
            "  {} \"{}\" at ({}, {}){marks}",
            r.id, r.name, r.x, r.y
        );
        for e in map.exits.iter().filter(|e| e.from == r.id) {
            let door = match &e.door {
                Some(d) => {
                    let state = map
                        .doors
                        .iter()
                        .find(|n| &n.id == d)
                        .map(|n| format!("{:?}", n.state).to_lowercase())
                        .unwrap_or_default();
                    format!(" through {d} ({state})")
                }
                None => String::new(),
            };
            let _ = writeln!(out, "    {} to {}{door}", e.direction.word(), e.to);
        }
    }
    out
}
