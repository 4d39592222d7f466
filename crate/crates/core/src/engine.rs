//! Episodic runtime: step semantics, scoring, the winning policy and
//! intermediate rewards.

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::game::GameDefinition;
use crate::kb::RuleSet;
use crate::logic::{admissible_actions, apply_action, GroundAction, State};
use crate::parser::{interpret, parse, render_command, Intent, ParseError, Vocabulary};
use crate::quest::Quest;
use crate::rng::{derive_seed, stage, stage_rng};
use crate::text::{describe_room, feedback_for, inventory_text, Event, Grammar};
use crate::world::player_room;

pub const DEFAULT_MAX_STEPS: u32 = 1000;

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("invalid game: {}", .0.join("; "))]
    InvalidGame(Vec<String>),
    #[error("the session is finished")]
    SessionFinished,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Running,
    Won,
    Lost,
    /// The step budget ran out before the game ended.
    Expired,
}

impl Outcome {
    pub fn is_done(self) -> bool {
        self != Outcome::Running
    }
}

/// Which optional observation fields are filled in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct Observability {
    pub objective: bool,
    pub admissible_commands: bool,
    pub intermediate_reward: bool,
    pub winning_policy: bool,
    pub full_state: bool,
}

impl Default for Observability {
    fn default() -> Self {
        Observability {
            objective: true,
            admissible_commands: false,
            intermediate_reward: false,
            winning_policy: false,
            full_state: false,
        }
    }
}

impl Observability {
    pub fn all() -> Self {
        Observability {
            objective: true,
            admissible_commands: true,
            intermediate_reward: true,
            winning_policy: true,
            full_state: true,
        }
    }

    pub fn none() -> Self {
        Observability {
            objective: false,
            admissible_commands: false,
            intermediate_reward: false,
            winning_policy: false,
            full_state: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdmissibleCommand {
    pub command: String,
    /// Returns information without changing the state.
    pub informational: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Observation {
    pub feedback: String,
    pub description: String,
    pub inventory: String,
    pub location: String,
    pub score: i32,
    pub moves: u32,
    pub outcome: Outcome,
    /// Set when the last input did not parse or resolve.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<ParseError>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub objective: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub admissible_commands: Option<Vec<AdmissibleCommand>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub intermediate_reward: Option<i32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub winning_policy: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub full_state: Option<Vec<String>>,
    /// Debug only: the quest can no longer be completed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unwinnable: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepResult {
    pub observation: Observation,
    /// Game-score change: +1 on a win, -1 on a loss, 0 otherwise.
    pub reward: i32,
    pub done: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionConfig {
    pub observability: Observability,
    pub max_steps: u32,
    /// Picks among feedback phrasings.
    pub seed: u64,
    pub max_words: usize,
}

impl Default for SessionConfig {
    fn default() -> Self {
        SessionConfig {
            observability: Observability::default(),
            max_steps: DEFAULT_MAX_STEPS,
            seed: 0,
            max_words: crate::parser::DEFAULT_MAX_WORDS,
        }
    }
}

/// `+1` when the policy shrank, `-1` when it grew, `0` otherwise.
pub fn intermediate_reward(policy_delta: i32) -> i32 {
    -policy_delta.signum()
}

/// True when `policy` is executable from `state` and ends in a winning
/// state without passing through a losing one.
pub fn policy_wins(policy: &[GroundAction], state: &State, quest: &Quest) -> bool {
    let mut s = state.clone();
    for a in policy {
        if quest.is_lost(&s) {
            return false;
        }
        match apply_action(&s, a) {
            Ok(next) => s = next,
            Err(_) => return false,
        }
    }
    quest.is_won(&s) && !quest.is_lost(&s)
}

/// Result of maintaining the winning policy after one action.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolicyUpdate {
    pub policy: Vec<GroundAction>,
    pub delta: i32,
    /// No repair was found; the policy is empty.
    pub unwinnable: bool,
}

/// Shifts the policy when `action` follows it and repairs it with the
/// reciprocal action when `action` undid progress. `before` and `after` are
/// the states around `action`.
pub fn update_winning_policy(
    policy: &[GroundAction],
    action: &GroundAction,
    before: &State,
    after: &State,
    quest: &Quest,
    rules: &RuleSet,
) -> PolicyUpdate {
    let keep = |policy: Vec<GroundAction>, delta| PolicyUpdate {
        policy,
        delta,
        unwinnable: false,
    };
    if policy.first() == Some(action) {
        return keep(policy[1..].to_vec(), -1);
    }
    if let Some(i) = policy.iter().position(|a| a == action) {
        let mut rest = policy.to_vec();
        rest.remove(i);
        if policy_wins(&rest, after, quest) {
            return keep(rest, -1);
        }
    }
    if policy_wins(policy, after, quest) {
        return keep(policy.to_vec(), 0);
    }
    if let Some(rec_name) = rules.reciprocal(action.rule_name()) {
        let undo = admissible_actions(after, rules.rules())
            .into_iter()
            .filter(|a| a.rule_name() == rec_name)
            .find(|a| apply_action(after, a).is_ok_and(|s| &s == before));
        if let Some(undo) = undo {
            let mut repaired = Vec::with_capacity(policy.len() + 1);
            repaired.push(undo);
            repaired.extend_from_slice(policy);
            return keep(repaired, 1);
        }
    }
    PolicyUpdate {
        policy: Vec::new(),
        delta: 0,
        unwinnable: true,
    }
}

/// A running game.
#[derive(Debug, Clone)]
pub struct Session {
    game: Arc<GameDefinition>,
    grammar: Arc<Grammar>,
    config: SessionConfig,
    vocab: Vocabulary,
    state: State,
    moves: u32,
    score: i32,
    outcome: Outcome,
    policy: Vec<GroundAction>,
    unwinnable: bool,
}

impl Session {
    /// Starts at the initial state and returns the opening observation.
    pub fn reset(
        game: Arc<GameDefinition>,
        config: SessionConfig,
    ) -> Result<(Session, Observation), EngineError> {
        let problems = game.diagnostics();
        if !problems.is_empty() {
            return Err(EngineError::InvalidGame(problems));
        }
        let grammar = game
            .grammar()
            .map_err(|e| EngineError::InvalidGame(vec![e.to_string()]))?;
        let policy = game
            .quest
            .as_ref()
            .map(|q| q.actions.clone())
            .unwrap_or_default();
        let session = Session {
            state: game.initial_state.clone(),
            grammar: Arc::new(grammar),
            vocab: Vocabulary::with_max_words(config.max_words),
            game,
            config,
            moves: 0,
            score: 0,
            outcome: Outcome::Running,
            policy,
            unwinnable: false,
        };
        let obs = session.observe(session.game.text.welcome.clone(), None, 0);
        Ok((session, obs))
    }

    pub fn game(&self) -> &Arc<GameDefinition> {
        &self.game
    }

    pub fn state(&self) -> &State {
        &self.state
    }

    pub fn moves(&self) -> u32 {
        self.moves
    }

    pub fn score(&self) -> i32 {
        self.score
    }

    pub fn outcome(&self) -> Outcome {
        self.outcome
    }

    pub fn is_done(&self) -> bool {
        self.outcome.is_done()
    }

    pub fn is_unwinnable(&self) -> bool {
        self.unwinnable
    }

    pub fn config(&self) -> &SessionConfig {
        &self.config
    }

    pub fn winning_policy(&self) -> &[GroundAction] {
        &self.policy
    }

    pub fn winning_commands(&self) -> Vec<String> {
        self.policy.iter().map(|a| self.render(a)).collect()
    }

    pub fn render(&self, action: &GroundAction) -> String {
        render_command(action, &self.game.names, &self.game.rules)
    }

    /// Admissible actions in canonical order.
    pub fn admissible_actions(&self) -> Vec<GroundAction> {
        admissible_actions(&self.state, self.game.rules.rules())
    }

    /// Rendered admissible actions, then `look` and `inventory`.
    pub fn admissible_commands(&self) -> Vec<AdmissibleCommand> {
        let mut out: Vec<AdmissibleCommand> = self
            .admissible_actions()
            .iter()
            .map(|a| AdmissibleCommand {
                command: self.render(a),
                informational: false,
            })
            .collect();
        for info in ["look", "inventory"] {
            out.push(AdmissibleCommand {
                command: info.into(),
                informational: true,
            });
        }
        out
    }

    pub fn describe(&self) -> String {
        match player_room(&self.state) {
            Some(room) => describe_room(
                &self.state,
                &room,
                &self.game.names,
                &self.game.text.options,
                &self.grammar,
                self.game.text.seed,
            ),
            None => String::new(),
        }
    }

    fn inventory(&self) -> String {
        inventory_text(
            &self.state,
            &self.game.names,
            &self.grammar,
            self.game.text.seed,
        )
    }

    fn observe(
        &self,
        feedback: String,
        error: Option<ParseError>,
        intermediate: i32,
    ) -> Observation {
        let vis = self.config.observability;
        let location = player_room(&self.state)
            .map(|r| self.game.names.display(&r).to_string())
            .unwrap_or_default();
        Observation {
            feedback,
            description: self.describe(),
            inventory: self.inventory(),
            location,
            score: self.score,
            moves: self.moves,
            outcome: self.outcome,
            error,
            objective: vis.objective.then(|| self.game.text.objective.clone()),
            admissible_commands: vis.admissible_commands.then(|| {
                if self.is_done() {
                    Vec::new()
                } else {
                    self.admissible_commands()
                }
            }),
            intermediate_reward: vis.intermediate_reward.then_some(intermediate),
            winning_policy: vis.winning_policy.then(|| self.winning_commands()),
            full_state: vis
                .full_state
                .then(|| self.state.iter().map(|a| a.to_string()).collect()),
            unwinnable: vis.full_state.then_some(self.unwinnable),
        }
    }

    /// Applies one admissible action and updates policy and outcome. Returns
    /// the policy delta and the game-score reward.
    fn act(&mut self, action: &GroundAction) -> (i32, i32) {
        let before = std::mem::take(&mut self.state);
        self.state = apply_action(&before, action).expect("resolved actions are admissible");
        let Some(quest) = self.game.quest.clone() else {
            return (0, 0);
        };
        let mut delta = 0;
        if !self.unwinnable {
            let update = update_winning_policy(
                &self.policy,
                action,
                &before,
                &self.state,
                &quest,
                &self.game.rules,
            );
            self.policy = update.policy;
            self.unwinnable = update.unwinnable;
            delta = update.delta;
        }
        if quest.is_won(&self.state) {
            self.outcome = Outcome::Won;
            self.score += 1;
            self.policy.clear();
            (delta, 1)
        } else if quest.is_lost(&self.state) {
            self.outcome = Outcome::Lost;
            self.score -= 1;
            self.policy.clear();
            (delta, -1)
        } else {
            (delta, 0)
        }
    }

    pub fn step(&mut self, command: &str) -> Result<StepResult, EngineError> {
        if self.is_done() {
            return Err(EngineError::SessionFinished);
        }
        self.moves += 1;
        let mut rng = stage_rng(
            derive_seed(self.config.seed, u64::from(self.moves)),
            stage::FEEDBACK,
        );
        let names = &self.game.names;
        let intent = parse(command, &self.vocab)
            .and_then(|c| interpret(&c, &self.state, names, &self.game.rules));
        let (mut feedback, error, delta, reward) = match intent {
            Err(e) => {
                let text = feedback_for(Event::Error(&e), names, &self.grammar, &mut rng);
                (text, Some(e), 0, 0)
            }
            Ok(Intent::Look) => (self.describe(), None, 0, 0),
            Ok(Intent::Inventory) => (self.inventory(), None, 0, 0),
            Ok(Intent::Act(a)) => {
                let text = feedback_for(Event::Action(&a), names, &self.grammar, &mut rng);
                let (delta, reward) = self.act(&a);
                (text, None, delta, reward)
            }
            Ok(Intent::TakeAll(actions)) => {
                let mut lines = Vec::new();
                let (mut delta, mut reward) = (0, 0);
                for a in &actions {
                    if self.is_done() || !a.is_applicable(&self.state) {
                        break;
                    }
                    let text =
                        feedback_for(Event::Action(a), &self.game.names, &self.grammar, &mut rng);
                    lines.push(format!(
                        "{}: {text}",
                        self.game.names.display(&a.binding[0])
                    ));
                    let (d, r) = self.act(a);
                    delta += d;
                    reward += r;
                }
                (lines.join("\n"), None, delta, reward)
            }
        };
        match self.outcome {
            Outcome::Won => push_line(
                &mut feedback,
                &feedback_for(Event::Won, &self.game.names, &self.grammar, &mut rng),
            ),
            Outcome::Lost => push_line(
                &mut feedback,
                &feedback_for(Event::Lost, &self.game.names, &self.grammar, &mut rng),
            ),
            _ => {
                if self.moves >= self.config.max_steps {
                    self.outcome = Outcome::Expired;
                    self.policy.clear();
                }
            }
        }
        let observation = self.observe(feedback, error, intermediate_reward(delta));
        Ok(StepResult {
            observation,
            reward,
            done: self.is_done(),
        })
    }
}

fn push_line(text: &mut String, line: &str) {
    if !text.is_empty() {
        text.push('\n');
    }
    text.push_str(line);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{mini_world_game, mini_world_game_with};
    use crate::text::Theme;

    fn start(obs: Observability) -> (Session, Observation) {
        let cfg = SessionConfig {
            observability: obs,
            ..SessionConfig::default()
        };
        Session::reset(Arc::new(mini_world_game()), cfg).unwrap()
    }

    #[test]
    fn reset_describes_kitchen_with_policy_of_three() {
        let (s, obs) = start(Observability::all());
        assert!(
            obs.description.contains("fridge") && obs.description.contains("table"),
            "{}",
            obs.description
        );
        assert_eq!(s.winning_policy().len(), 3);
        assert_eq!(
            obs.winning_policy.unwrap(),
            ["open fridge", "take apple from fridge", "eat apple"]
        );
        assert_eq!(obs.location, "kitchen");
        let (_, again) = start(Observability::all());
        assert_eq!(again.feedback, obs.feedback);
        assert_eq!(again.description, obs.description);
    }

    #[test]
    fn disabled_fields_are_absent() {
        let (_, obs) = start(Observability::none());
        assert!(obs.objective.is_none() && obs.admissible_commands.is_none());
        assert!(
            obs.intermediate_reward.is_none()
                && obs.winning_policy.is_none()
                && obs.full_state.is_none()
        );
        let json = serde_json::to_value(&obs).unwrap();
        for key in [
            "objective",
            "admissible_commands",
            "intermediate_reward",
            "winning_policy",
            "full_state",
        ] {
            assert!(json.get(key).is_none(), "{key}");
        }
    }

    #[test]
    fn winning_sequence_wins() {
        let (mut s, _) = start(Observability::all());
        let mut total = 0;
        for cmd in ["open fridge", "take apple from fridge"] {
            let r = s.step(cmd).unwrap();
            assert_eq!((r.reward, r.done), (0, false));
            total += r.observation.intermediate_reward.unwrap();
        }
        let r = s.step("eat apple").unwrap();
        total += r.observation.intermediate_reward.unwrap();
        assert_eq!(
            (r.reward, r.done, r.observation.outcome),
            (1, true, Outcome::Won)
        );
        assert_eq!(total, 3);
        assert!(s.winning_policy().is_empty());
        assert!(matches!(s.step("look"), Err(EngineError::SessionFinished)));
        assert_eq!(s.score(), 1);
    }

    #[test]
    fn unknown_verb_leaves_state_alone() {
        let (mut s, _) = start(Observability::default());
        let before = s.state().clone();
        let r = s.step("xyzzy").unwrap();
        assert_eq!(r.reward, 0);
        assert_eq!(s.state(), &before);
        assert_eq!(r.observation.error.unwrap().code(), "unknown_verb");
        assert_eq!(s.moves(), 1);
    }

    #[test]
    fn detour_is_repaired_by_reciprocal() {
        let (mut s, _) = start(Observability::all());
        s.step("open fridge").unwrap();
        let r = s.step("close fridge").unwrap();
        assert_eq!(r.observation.intermediate_reward, Some(-1));
        assert_eq!(
            s.winning_commands(),
            ["open fridge", "take apple from fridge", "eat apple"]
        );
        let r = s.step("open fridge").unwrap();
        assert_eq!(r.observation.intermediate_reward, Some(1));
        assert_eq!(s.winning_policy().len(), 2);
    }

    #[test]
    fn policy_update_cases() {
        let g = mini_world_game();
        let q = g.quest.clone().unwrap();
        let rules = &g.rules;
        let s0 = g.initial_state.clone();
        let open = q.actions[0].clone();
        let s1 = apply_action(&s0, &open).unwrap();
        let up = update_winning_policy(&q.actions, &open, &s0, &s1, &q, rules);
        assert_eq!((up.policy.len(), up.delta), (2, -1));
        let take = q.actions[1].clone();
        let s2 = apply_action(&s1, &take).unwrap();
        let close = rules
            .rule("close/c")
            .unwrap()
            .instantiate(&open.binding)
            .unwrap();
        let s3 = apply_action(&s2, &close).unwrap();
        let up = update_winning_policy(&q.actions[2..], &close, &s2, &s3, &q, rules);
        assert_eq!((up.policy.len(), up.delta), (1, 0));
    }

    #[test]
    fn eating_a_needed_apple_early_is_unwinnable() {
        let g = mini_world_game();
        let q = g.quest.clone().unwrap();
        let mut quest = q.clone();
        // winning needs the apple on the table, so eating it is fatal
        let put = g.rules.rule("put/s").unwrap();
        let apple = q.actions[2].binding[0].clone();
        let table = crate::fixtures::table();
        let kitchen = crate::fixtures::kitchen();
        let put = put.instantiate(&[apple.clone(), table, kitchen]).unwrap();
        quest.actions[2] = put;
        quest.winning_conditions = quest.actions[2].produced.clone();
        let s0 = g.initial_state.clone();
        let s2 = apply_action(&apply_action(&s0, &q.actions[0]).unwrap(), &q.actions[1]).unwrap();
        let eat = g.rules.rule("eat").unwrap().instantiate(&[apple]).unwrap();
        let s3 = apply_action(&s2, &eat).unwrap();
        let up = update_winning_policy(&quest.actions[2..], &eat, &s2, &s3, &quest, &g.rules);
        assert!(up.unwinnable && up.policy.is_empty());
    }

    #[test]
    fn budget_expires() {
        let cfg = SessionConfig {
            max_steps: 3,
            ..SessionConfig::default()
        };
        let (mut s, _) = Session::reset(Arc::new(mini_world_game()), cfg).unwrap();
        s.step("look").unwrap();
        s.step("xyzzy").unwrap();
        let r = s.step("inventory").unwrap();
        assert!(r.done);
        assert_eq!(r.observation.outcome, Outcome::Expired);
        assert!(s.step("look").is_err());
    }

    #[test]
    fn themes_share_logic() {
        let a = mini_world_game_with(Theme::House);
        let b = mini_world_game_with(Theme::Basic);
        assert_eq!(a.initial_state, b.initial_state);
        assert_eq!(a.quest, b.quest);
        let (sa, _) = Session::reset(Arc::new(a), SessionConfig::default()).unwrap();
        let (sb, _) = Session::reset(Arc::new(b), SessionConfig::default()).unwrap();
        assert_eq!(sa.admissible_commands(), sb.admissible_commands());
        assert_ne!(sa.game().text.grammar, sb.game().text.grammar);
    }

    #[test]
    fn intermediate_reward_sign() {
        assert_eq!(intermediate_reward(-1), 1);
        assert_eq!(intermediate_reward(0), 0);
        assert_eq!(intermediate_reward(1), -1);
    }
}
