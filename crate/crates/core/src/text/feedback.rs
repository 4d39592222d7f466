//! Short responses to actions and parser errors.

use rand::Rng;

use super::describe::join_list;
use super::grammar::Grammar;
use super::names::NameTable;
use crate::logic::GroundAction;
use crate::parser::{ParseError, Refusal};

#[derive(Debug, Clone, Copy)]
pub enum Event<'a> {
    Action(&'a GroundAction),
    Error(&'a ParseError),
    Won,
    Lost,
}

pub fn feedback_for<R: Rng + ?Sized>(
    event: Event,
    names: &NameTable,
    grammar: &Grammar,
    rng: &mut R,
) -> String {
    let mut render = |symbol: &str, slots: &[(&str, &str)]| {
        grammar.render(symbol, slots, rng).unwrap_or_default()
    };
    let the = |s: &str| format!("the {s}");
    match event {
        Event::Won => render("fb_won", &[]),
        Event::Lost => render("fb_lost", &[]),
        Event::Action(a) => {
            if a.rule_name().starts_with("go/") {
                return String::new();
            }
            let obj = the(names.display(&a.binding[0]));
            let second = || the(names.display(&a.binding[1]));
            match a.rule_name() {
                "take/c" | "take/s" => {
                    render("fb_take_from", &[("the_obj", &obj), ("the_src", &second())])
                }
                "take/r" => render("fb_take", &[("the_obj", &obj)]),
                "drop/r" => render("fb_drop", &[("the_obj", &obj)]),
                "put/s" => render("fb_put", &[("the_obj", &obj), ("the_dst", &second())]),
                "insert/c" => render("fb_insert", &[("the_obj", &obj), ("the_dst", &second())]),
                "open/c" | "open/d" => render("fb_open", &[("the_obj", &obj)]),
                "close/c" | "close/d" => render("fb_close", &[("the_obj", &obj)]),
                "unlock/c" | "unlock/d" => {
                    render("fb_unlock", &[("the_obj", &obj), ("the_key", &second())])
                }
                "lock/c" | "lock/d" => {
                    render("fb_lock", &[("the_obj", &obj), ("the_key", &second())])
                }
                "eat" => render("fb_eat", &[("the_obj", &obj)]),
                _ => render("fb_cannot", &[]),
            }
        }
        Event::Error(err) => match err {
            ParseError::EmptyInput => render("fb_empty", &[]),
            ParseError::UnknownVerb { word } => render("fb_unknown_verb", &[("word", word)]),
            ParseError::TooLong { limit } => {
                render("fb_too_long", &[("limit", &limit.to_string())])
            }
            ParseError::UnknownNoun { phrase, verb } if phrase.is_empty() => {
                render("fb_missing_noun", &[("verb", verb)])
            }
            ParseError::UnknownNoun { phrase, .. } => {
                render("fb_unknown_noun", &[("phrase", phrase)])
            }
            ParseError::Ambiguous { options } => {
                let options: Vec<String> = options.iter().map(|o| the(o)).collect();
                let list = match options.split_last() {
                    Some((last, init)) if !init.is_empty() => {
                        format!("{} or {last}", init.join(", "))
                    }
                    _ => join_list(&options),
                };
                render("fb_ambiguous", &[("options", &list)])
            }
            ParseError::NotAdmissible { refusal } => {
                let obj = refusal.object().map(the).unwrap_or_default();
                let symbol = match refusal {
                    Refusal::Locked(_) => "fb_locked",
                    Refusal::Closed(_) => "fb_closed",
                    Refusal::AlreadyOpen(_) => "fb_already_open",
                    Refusal::AlreadyClosed(_) => "fb_already_closed",
                    Refusal::NoExit => "fb_no_exit",
                    Refusal::NotHeld(_) => "fb_not_held",
                    Refusal::AlreadyHeld(_) => "fb_already_held",
                    Refusal::NoKey(_) => "fb_no_key",
                    Refusal::Cannot => "fb_cannot",
                    Refusal::NothingToTake => "fb_take_all_none",
                };
                render(symbol, &[("the_obj", &obj)])
            }
        },
    }
}
