//! Quest instructions: the objective text shown to the player.

use rand::Rng;

use super::grammar::Grammar;
use super::names::NameTable;
use super::{Granularity, TextOptions};
use crate::logic::{EntityId, GroundAction, TypeTag};
use crate::quest::Quest;

/// Objective text plus every noun phrase it used, with the entity each one
/// stands for.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Instructions {
    pub text: String,
    pub references: Vec<(String, EntityId)>,
}

enum Step<'a> {
    Single(&'a GroundAction),
    GoMany(Vec<&'a str>),
    TakeFromShut {
        obj: &'a EntityId,
        src: &'a EntityId,
        locked: bool,
    },
}

fn direction_of(action: &GroundAction) -> Option<&str> {
    action.rule_name().strip_prefix("go/")
}

fn combine(actions: &[GroundAction], enabled: bool) -> Vec<Step<'_>> {
    let mut steps = Vec::new();
    let mut i = 0;
    while i < actions.len() {
        let a = &actions[i];
        if enabled {
            let run: Vec<&str> = actions[i..].iter().map_while(direction_of).collect();
            if run.len() >= 2 {
                i += run.len();
                steps.push(Step::GoMany(run));
                continue;
            }
            let rule_at = |j: usize| actions.get(j).map(|a| a.rule_name());
            let target = &a.binding[0];
            let opens_then_takes = |j: usize| {
                rule_at(j) == Some("open/c")
                    && &actions[j].binding[0] == target
                    && rule_at(j + 1) == Some("take/c")
                    && &actions[j + 1].binding[1] == target
            };
            if a.rule_name() == "unlock/c" && opens_then_takes(i + 1) {
                let take = &actions[i + 2];
                steps.push(Step::TakeFromShut {
                    obj: &take.binding[0],
                    src: target,
                    locked: true,
                });
                i += 3;
                continue;
            }
            if opens_then_takes(i) {
                let take = &actions[i + 1];
                steps.push(Step::TakeFromShut {
                    obj: &take.binding[0],
                    src: target,
                    locked: false,
                });
                i += 2;
                continue;
            }
        }
        steps.push(Step::Single(a));
        i += 1;
    }
    steps
}

fn attribute_noun(tag: TypeTag) -> Option<&'static str> {
    match tag {
        TypeTag::Food => Some("edible thing"),
        TypeTag::Object => Some("portable item"),
        TypeTag::Container => Some("container"),
        TypeTag::Supporter => Some("surface"),
        _ => None,
    }
}

struct Referrer<'a> {
    names: &'a NameTable,
    by_attributes: bool,
    references: Vec<(String, EntityId)>,
}

impl Referrer<'_> {
    /// The bare phrase for `e`, by attributes when asked for and unique.
    fn phrase(&mut self, e: &EntityId) -> String {
        let mut phrase = self.names.display(e).to_string();
        if self.by_attributes {
            let adj = self.names.get(e).and_then(|n| n.adjective.clone());
            if let (Some(adj), Some(noun)) = (adj, attribute_noun(e.tag())) {
                let candidate = format!("{adj} {noun}");
                let words: Vec<String> = candidate.split(' ').map(str::to_string).collect();
                let hits = self
                    .names
                    .iter()
                    .filter(|(other, _)| self.names.matches(other, &words))
                    .count();
                if hits == 1 {
                    phrase = candidate;
                }
            }
        }
        self.references.push((phrase.clone(), e.clone()));
        phrase
    }

    fn the(&mut self, e: &EntityId) -> String {
        format!("the {}", self.phrase(e))
    }
}

fn sentence<R: Rng + ?Sized>(
    step: &Step,
    refer: &mut Referrer,
    grammar: &Grammar,
    rng: &mut R,
) -> String {
    let mut render = |symbol: &str, slots: &[(&str, &str)]| {
        grammar.render(symbol, slots, rng).unwrap_or_default()
    };
    match step {
        Step::GoMany(dirs) => render("instr_go_many", &[("directions", &dirs.join(", then "))]),
        Step::TakeFromShut { obj, src, locked } => {
            let obj = refer.the(obj);
            let src = refer.phrase(src);
            let state = if *locked { "locked" } else { "closed" };
            render(
                "instr_take_from_shut",
                &[("obj", &obj), ("src", &src), ("state", state)],
            )
        }
        Step::Single(a) => {
            if let Some(dir) = direction_of(a) {
                return render("instr_go", &[("direction", dir)]);
            }
            let obj = refer.the(&a.binding[0]);
            let second = |refer: &mut Referrer| refer.the(&a.binding[1]);
            match a.rule_name() {
                "take/c" | "take/s" => {
                    let src = second(refer);
                    render("instr_take_from", &[("obj", &obj), ("src", &src)])
                }
                "take/r" => render("instr_take", &[("obj", &obj)]),
                "drop/r" => render("instr_drop", &[("obj", &obj)]),
                "put/s" => {
                    let dst = second(refer);
                    render("instr_put", &[("obj", &obj), ("dst", &dst)])
                }
                "insert/c" => {
                    let dst = second(refer);
                    render("instr_insert", &[("obj", &obj), ("dst", &dst)])
                }
                "open/c" | "open/d" => render("instr_open", &[("obj", &obj)]),
                "close/c" | "close/d" => render("instr_close", &[("obj", &obj)]),
                "unlock/c" | "unlock/d" => {
                    let key = second(refer);
                    render("instr_unlock", &[("obj", &obj), ("key", &key)])
                }
                "lock/c" | "lock/d" => {
                    let key = second(refer);
                    render("instr_lock", &[("obj", &obj), ("key", &key)])
                }
                "eat" => render("instr_eat", &[("obj", &obj)]),
                _ => render("instr_take", &[("obj", &obj)]),
            }
        }
    }
}

fn lower_first(s: &str) -> String {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) => c.to_lowercase().chain(chars).collect(),
        None => String::new(),
    }
}

/// One sentence per step, chained with the grammar's connective.
pub fn render_instructions<R: Rng + ?Sized>(
    actions: &[GroundAction],
    names: &NameTable,
    opts: &TextOptions,
    grammar: &Grammar,
    rng: &mut R,
) -> Instructions {
    let mut refer = Referrer {
        names,
        by_attributes: opts.refer_by_attributes,
        references: Vec::new(),
    };
    let mut parts: Vec<String> = Vec::new();
    for (i, step) in combine(actions, opts.combine_instructions)
        .iter()
        .enumerate()
    {
        let s = sentence(step, &mut refer, grammar, rng);
        if i == 0 {
            parts.push(s);
        } else {
            let then = grammar.render("instr_then", &[], rng).unwrap_or_default();
            parts.push(format!("{then} {}", lower_first(&s)));
        }
    }
    Instructions {
        text: parts.join(" "),
        references: refer.references,
    }
}

pub fn generate_instructions<R: Rng + ?Sized>(
    quest: &Quest,
    names: &NameTable,
    opts: &TextOptions,
    grammar: &Grammar,
    rng: &mut R,
) -> Instructions {
    match opts.instruction_granularity {
        Granularity::None => Instructions::default(),
        Granularity::FinalActionOnly => render_instructions(
            &quest.actions[quest.actions.len().saturating_sub(1)..],
            names,
            opts,
            grammar,
            rng,
        ),
        Granularity::EveryAction => render_instructions(&quest.actions, names, opts, grammar, rng),
    }
}
