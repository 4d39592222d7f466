//! Room descriptions, rebuilt from the current state on every call.

use std::collections::BTreeMap;

use super::grammar::{capitalize, Grammar};
use super::names::NameTable;
use super::TextOptions;
use crate::logic::{Atom, EntityId, State, TypeTag};
use crate::rng::{keyed_seed, stage, stage_rng};
use crate::world::Direction;

/// "an" before a vowel, "a" otherwise.
pub fn article(word: &str) -> &'static str {
    match word.chars().next().map(|c| c.to_ascii_lowercase()) {
        Some('a' | 'e' | 'i' | 'o' | 'u') => "an",
        _ => "a",
    }
}

pub fn with_article(name: &str) -> String {
    format!("{} {name}", article(name))
}

/// "a, b and c".
pub fn join_list(items: &[String]) -> String {
    match items {
        [] => String::new(),
        [one] => one.clone(),
        [init @ .., last] => format!("{} and {last}", init.join(", ")),
    }
}

fn count_word(n: usize) -> String {
    const WORDS: [&str; 11] = [
        "zero", "one", "two", "three", "four", "five", "six", "seven", "eight", "nine", "ten",
    ];
    WORDS
        .get(n)
        .map_or_else(|| n.to_string(), |w| w.to_string())
}

fn plural_kind(tag: TypeTag) -> &'static str {
    match tag {
        TypeTag::Container => "containers",
        TypeTag::Supporter => "supporters",
        TypeTag::Food => "foods",
        TypeTag::Key => "keys",
        TypeTag::Door => "doors",
        _ => "objects",
    }
}

fn status_of(state: &State, e: &EntityId) -> &'static str {
    for p in ["open", "closed", "locked"] {
        if state.contains(&Atom::new(p, vec![e.clone()])) {
            return p;
        }
    }
    "closed"
}

fn holding(state: &State, pred: &str, holder: &EntityId, names: &NameTable) -> Vec<String> {
    let mut items: Vec<&EntityId> = state
        .with_predicate(pred)
        .filter(|a| a.arg(1) == holder)
        .map(|a| a.arg(0))
        .collect();
    items.sort();
    items
        .into_iter()
        .map(|e| with_article(names.display(e)))
        .collect()
}

type Render<'a> = dyn FnMut(&str, &[(&str, &str)]) -> String + 'a;

/// The room title, its objects with their state and contents, and its
/// exits.
pub fn describe_room(
    state: &State,
    room: &EntityId,
    names: &NameTable,
    opts: &TextOptions,
    grammar: &Grammar,
    seed: u64,
) -> String {
    let mut rng = stage_rng(keyed_seed(seed, room.id()), stage::TEXT);
    let mut render = |symbol: &str, slots: &[(&str, &str)]| {
        grammar.render(symbol, slots, &mut rng).unwrap_or_default()
    };
    let room_name = names.display(room);
    let mut body: Vec<String> = vec![render("room_intro", &[("room", room_name)])];

    let player = EntityId::player();
    let mut here: Vec<&EntityId> = state
        .with_predicate("at")
        .filter(|a| a.arg(1) == room && a.arg(0) != &player)
        .map(|a| a.arg(0))
        .collect();
    here.sort();
    let (floor, fixed): (Vec<&EntityId>, Vec<&EntityId>) =
        here.into_iter().partition(|e| e.tag().is_portable());

    let groups = |items: &[&EntityId]| -> BTreeMap<(TypeTag, String), Vec<EntityId>> {
        let mut g: BTreeMap<(TypeTag, String), Vec<EntityId>> = BTreeMap::new();
        if opts.group_similar {
            for e in items {
                if let Some(adj) = names.get(e).and_then(|n| n.adjective.clone()) {
                    g.entry((e.tag(), adj)).or_default().push((*e).clone());
                }
            }
            g.retain(|_, v| v.len() >= 2);
        }
        g
    };
    let group_sentence =
        |render: &mut Render<'_>, key: &(TypeTag, String), members: &[EntityId]| {
            let list: Vec<String> = members
                .iter()
                .map(|m| with_article(names.get(m).map_or(m.id(), |n| n.noun.as_str())))
                .collect();
            render(
                "group_here",
                &[
                    ("count", &count_word(members.len())),
                    ("adjective", &key.1),
                    ("kind", plural_kind(key.0)),
                    ("list", &join_list(&list)),
                ],
            )
        };

    let fixed_groups = groups(&fixed);
    let mut announced: Vec<EntityId> = Vec::new();
    for e in &fixed {
        let group = fixed_groups.iter().find(|(_, v)| v.contains(e));
        let coref = opts.use_coreference && group.is_none();
        match group {
            Some((key, members)) => {
                if !announced.contains(&members[0]) {
                    body.push(group_sentence(&mut render, key, members));
                    announced.push(members[0].clone());
                }
            }
            None => body.push(render(
                "thing_here",
                &[("a_thing", &with_article(names.display(e)))],
            )),
        }
        let the = format!("the {}", names.display(e));
        let subject = if coref { "it".to_string() } else { the.clone() };
        let nothing = render("nothing", &[]);
        match e.tag() {
            TypeTag::Container => {
                let status = status_of(state, e);
                body.push(render(
                    &format!("container_{status}"),
                    &[("subject", &subject), ("the_thing", &the)],
                ));
                if status == "open" {
                    let items = holding(state, "in", e, names);
                    let list = if items.is_empty() {
                        nothing
                    } else {
                        join_list(&items)
                    };
                    let place = format!("in {subject}");
                    body.push(render(
                        "contents_in",
                        &[("where", &place), ("the_thing", &the), ("list", &list)],
                    ));
                }
            }
            TypeTag::Supporter => {
                let items = holding(state, "on", e, names);
                let list = if items.is_empty() {
                    nothing
                } else {
                    join_list(&items)
                };
                let place = format!("on {subject}");
                body.push(render(
                    "contents_on",
                    &[("where", &place), ("the_thing", &the), ("list", &list)],
                ));
            }
            _ => {}
        }
    }

    let floor_groups = groups(&floor);
    let mut announced: Vec<EntityId> = Vec::new();
    for e in &floor {
        match floor_groups.iter().find(|(_, v)| v.contains(e)) {
            Some((key, members)) => {
                if !announced.contains(&members[0]) {
                    body.push(group_sentence(&mut render, key, members));
                    announced.push(members[0].clone());
                }
            }
            None => body.push(render(
                "floor_item",
                &[("a_thing", &with_article(names.display(e)))],
            )),
        }
    }

    let mut exits = Vec::new();
    for dir in Direction::ALL {
        let Some(next) = state
            .with_predicate(dir.predicate())
            .find(|a| a.arg(1) == room)
            .map(|a| a.arg(0).clone())
        else {
            continue;
        };
        let door = state
            .with_predicate("link")
            .find(|a| a.arg(0) == room && a.arg(2) == &next)
            .map(|a| a.arg(1).clone());
        match door {
            Some(d) => exits.push(render(
                "exit_door",
                &[
                    ("a_door", &with_article(names.display(&d))),
                    ("direction", dir.word()),
                    ("door_state", status_of(state, &d)),
                ],
            )),
            None => {
                if state.contains(&Atom::new("free", vec![room.clone(), next])) {
                    exits.push(render("exit_free", &[("direction", dir.word())]));
                }
            }
        }
    }

    let mut out = format!("-= {} =-\n{}", capitalize(room_name), body.join(" "));
    if !exits.is_empty() {
        out.push('\n');
        out.push_str(&exits.join(" "));
    }
    out
}

/// What the player carries.
pub fn inventory_text(state: &State, names: &NameTable, grammar: &Grammar, seed: u64) -> String {
    let mut rng = stage_rng(keyed_seed(seed, "inventory"), stage::TEXT);
    let items = holding(state, "in", &EntityId::inventory(), names);
    if items.is_empty() {
        grammar
            .render("fb_inventory_empty", &[], &mut rng)
            .unwrap_or_default()
    } else {
        grammar
            .render("fb_inventory", &[("list", &join_list(&items))], &mut rng)
            .unwrap_or_default()
    }
}
