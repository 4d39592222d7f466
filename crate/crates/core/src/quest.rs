//! Quest generation by forward chaining over a fixed world, or by backward
//! chaining from a final action with fact creation.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kb::{atom_well_typed, RuleSet, DIRECTION_PREDICATES};
use crate::logic::{
    admissible_actions, apply_action, unify, Atom, EntityId, GroundAction, LogicError, Pattern,
    RuleSchema, State, TypeTag,
};

/// Default bound on candidate expansions during a search.
pub const DEFAULT_SEARCH_BREADTH: usize = 4000;
/// Upper bound on entities created by one backward search.
pub const MAX_CREATED_ENTITIES: usize = 24;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum QuestError {
    #[error("no quest of length {length} found within {expansions} expansions")]
    NoQuestFound { length: usize, expansions: usize },
    #[error("invalid chain config: {0}")]
    InvalidConfig(String),
    #[error("unknown rule `{0}`")]
    UnknownRule(String),
    #[error("invalid quest: {0}")]
    Invalid(String),
    #[error(transparent)]
    Logic(#[from] LogicError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChainDirection {
    Forward,
    Backward,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainConfig {
    pub quest_length: usize,
    pub direction: ChainDirection,
    pub allow_fact_creation: bool,
    pub max_search_breadth: usize,
    pub seed: u64,
}

impl ChainConfig {
    pub fn new(quest_length: usize, direction: ChainDirection, seed: u64) -> Self {
        ChainConfig {
            quest_length,
            direction,
            allow_fact_creation: direction == ChainDirection::Backward,
            max_search_breadth: DEFAULT_SEARCH_BREADTH,
            seed,
        }
    }

    fn check(&self, direction: ChainDirection) -> Result<(), QuestError> {
        if self.quest_length == 0 {
            return Err(QuestError::InvalidConfig(
                "quest_length must be at least 1".into(),
            ));
        }
        if self.direction != direction {
            return Err(QuestError::InvalidConfig(format!(
                "expected direction {direction:?}, got {:?}",
                self.direction
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Quest {
    pub actions: Vec<GroundAction>,
    pub winning_conditions: Vec<Atom>,
    pub losing_conditions: Vec<Atom>,
}

impl Quest {
    /// Winning conditions are the atoms produced by the last action.
    pub fn new(actions: Vec<GroundAction>) -> Self {
        let mut winning_conditions: Vec<Atom> = actions
            .last()
            .map(|a| a.produced.clone())
            .unwrap_or_default();
        winning_conditions.sort();
        winning_conditions.dedup();
        Quest {
            actions,
            winning_conditions,
            losing_conditions: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }

    pub fn is_won(&self, state: &State) -> bool {
        !self.winning_conditions.is_empty() && state.contains_all(&self.winning_conditions)
    }

    pub fn is_lost(&self, state: &State) -> bool {
        !self.losing_conditions.is_empty() && state.contains_all(&self.losing_conditions)
    }

    /// States visited by the quest, starting with `initial`.
    pub fn replay(&self, initial: &State) -> Result<Vec<State>, LogicError> {
        let mut states = vec![initial.clone()];
        for a in &self.actions {
            let next = apply_action(states.last().expect("non-empty"), a)?;
            states.push(next);
        }
        Ok(states)
    }

    /// Checks replay, the winning conditions, the chain property and cycle
    /// freedom from `initial`.
    pub fn validate(&self, initial: &State) -> Result<(), QuestError> {
        if self.actions.is_empty() {
            return Err(QuestError::Invalid("quest has no actions".into()));
        }
        let states = self.replay(initial)?;
        let last = states.last().expect("non-empty");
        if !self.is_won(last) {
            return Err(QuestError::Invalid(
                "final state misses the winning conditions".into(),
            ));
        }
        if let Some(i) = states[..states.len() - 1]
            .iter()
            .position(|s| self.is_won(s))
        {
            return Err(QuestError::Invalid(format!(
                "state {i} already satisfies the winning conditions"
            )));
        }
        for (i, pair) in self.actions.windows(2).enumerate() {
            if !depends_on(&pair[1], &pair[0]) {
                return Err(QuestError::Invalid(format!(
                    "action {} ({}) does not depend on {}",
                    i + 1,
                    pair[1],
                    pair[0]
                )));
            }
        }
        let distinct: BTreeSet<&State> = states.iter().collect();
        if distinct.len() != states.len() {
            return Err(QuestError::Invalid("quest revisits a state".into()));
        }
        Ok(())
    }
}

/// True when `a_prev` produces something `a_t` consumes or requires.
pub fn depends_on(a_t: &GroundAction, a_prev: &GroundAction) -> bool {
    a_prev
        .produced
        .iter()
        .any(|p| a_t.consumed.contains(p) || a_t.required.contains(p))
}

/// Randomized depth-first search for a dependent, cycle-free chain of
/// `quest_length` actions from `initial`.
pub fn forward_quest<R: Rng + ?Sized>(
    initial: &State,
    rules: &RuleSet,
    cfg: &ChainConfig,
    rng: &mut R,
) -> Result<Quest, QuestError> {
    cfg.check(ChainDirection::Forward)?;
    let mut search = Forward {
        rules: rules.rules(),
        length: cfg.quest_length,
        budget: cfg.max_search_breadth,
        used: 0,
        path: vec![initial.clone()],
        actions: Vec::new(),
    };
    if search.dfs(rng) {
        Ok(Quest::new(search.actions))
    } else {
        Err(QuestError::NoQuestFound {
            length: cfg.quest_length,
            expansions: search.used,
        })
    }
}

struct Forward<'a> {
    rules: &'a [RuleSchema],
    length: usize,
    budget: usize,
    used: usize,
    path: Vec<State>,
    actions: Vec<GroundAction>,
}

impl Forward<'_> {
    fn dfs<R: Rng + ?Sized>(&mut self, rng: &mut R) -> bool {
        if self.actions.len() == self.length {
            let quest = Quest::new(self.actions.clone());
            return !self.path[..self.path.len() - 1]
                .iter()
                .any(|s| quest.is_won(s));
        }
        let current = self.path.last().expect("non-empty").clone();
        let mut candidates: Vec<GroundAction> = admissible_actions(&current, self.rules)
            .into_iter()
            .filter(|a| self.actions.last().is_none_or(|prev| depends_on(a, prev)))
            .collect();
        candidates.shuffle(rng);
        for a in candidates {
            if self.used >= self.budget {
                return false;
            }
            self.used += 1;
            let next = apply_action(&current, &a).expect("admissible");
            if self.path.contains(&next) {
                continue;
            }
            self.path.push(next);
            self.actions.push(a);
            if self.dfs(rng) {
                return true;
            }
            self.actions.pop();
            self.path.pop();
        }
        false
    }
}

/// What the final action of a backward search must be.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Goal {
    /// Any rule.
    Any,
    /// An instance of the named rule.
    Rule(String),
    /// Any action whose right-hand side contains this atom.
    Produce(Atom),
}

/// Chains predecessors backward from a final action sampled per
/// `goal_hint`, creating missing entities and facts in `seed` when allowed.
/// Returns the initial state and the forward-ordered quest.
pub fn backward_quest<R: Rng + ?Sized>(
    seed: &State,
    rules: &RuleSet,
    goal_hint: Option<&str>,
    cfg: &ChainConfig,
    rng: &mut R,
) -> Result<(State, Quest), QuestError> {
    let goal = match goal_hint {
        Some(name) => {
            if rules.rule(name).is_none() {
                return Err(QuestError::UnknownRule(name.to_string()));
            }
            Goal::Rule(name.to_string())
        }
        None => Goal::Any,
    };
    backward_chain(seed, rules, &goal, cfg, rng)
}

pub fn backward_chain<R: Rng + ?Sized>(
    seed: &State,
    rules: &RuleSet,
    goal: &Goal,
    cfg: &ChainConfig,
    rng: &mut R,
) -> Result<(State, Quest), QuestError> {
    cfg.check(ChainDirection::Backward)?;
    if !state_consistent(seed) {
        return Err(QuestError::InvalidConfig(
            "seed state is inconsistent".into(),
        ));
    }
    let mut search = Backward {
        rules: rules.rules(),
        goal,
        length: cfg.quest_length,
        create: cfg.allow_fact_creation,
        budget: cfg.max_search_breadth,
        used: 0,
        seed_entities: seed.entities(),
    };
    // states[0] is the earliest state; actions[i] leads from states[i] to states[i + 1]
    let chain = Chain {
        states: vec![seed.clone()],
        actions: Vec::new(),
    };
    match search.dfs(chain, rng) {
        Some(chain) => {
            let quest = Quest::new(chain.actions);
            Ok((chain.states[0].clone(), quest))
        }
        None => Err(QuestError::NoQuestFound {
            length: cfg.quest_length,
            expansions: search.used,
        }),
    }
}

#[derive(Clone)]
struct Chain {
    states: Vec<State>,
    actions: Vec<GroundAction>,
}

struct Backward<'a> {
    rules: &'a [RuleSchema],
    goal: &'a Goal,
    length: usize,
    create: bool,
    budget: usize,
    used: usize,
    seed_entities: BTreeSet<EntityId>,
}

impl Backward<'_> {
    fn dfs<R: Rng + ?Sized>(&mut self, chain: Chain, rng: &mut R) -> Option<Chain> {
        if chain.actions.len() == self.length {
            return finish(chain);
        }
        let earliest = &chain.states[0];
        let mut candidates = match chain.actions.first() {
            None => self.final_candidates(earliest),
            Some(next) => {
                let mut all = BTreeSet::new();
                for anchor in next.consumed.iter().chain(&next.required) {
                    all.extend(self.candidates(earliest, Some(anchor), None));
                }
                all.into_iter().collect()
            }
        };
        candidates.shuffle(rng);
        for a in candidates {
            if self.used >= self.budget {
                return None;
            }
            self.used += 1;
            let Some(extended) = self.prepend(&chain, a) else {
                continue;
            };
            if let Some(done) = self.dfs(extended, rng) {
                return Some(done);
            }
        }
        None
    }

    fn final_candidates(&self, state: &State) -> Vec<GroundAction> {
        let mut all = BTreeSet::new();
        match self.goal {
            Goal::Any => all.extend(self.candidates(state, None, None)),
            Goal::Rule(name) => all.extend(self.candidates(state, None, Some(name))),
            Goal::Produce(atom) => all.extend(self.candidates(state, Some(atom), None)),
        }
        all.into_iter().collect()
    }

    /// Ground actions that could end in `state`: every right-hand side and
    /// persistent premise either matches an atom of `state` or, with fact
    /// creation, is left to be created. When `anchor` is given, it must be
    /// one of the produced atoms.
    fn candidates(
        &self,
        state: &State,
        anchor: Option<&Atom>,
        only: Option<&str>,
    ) -> BTreeSet<GroundAction> {
        let mut out = BTreeSet::new();
        let entities = state.entities();
        let mut fresh = FreshIds::new(&entities);
        for rule in self.rules {
            if only.is_some_and(|n| n != rule.name) {
                continue;
            }
            let mut seeds = Vec::new();
            let empty = vec![None; rule.params.len()];
            match anchor {
                None => seeds.push(empty),
                Some(atom) => {
                    for p in &rule.rhs {
                        let mut b = empty.clone();
                        if unify(p, atom, &rule.params, &mut b).is_some() {
                            seeds.push(b);
                        }
                    }
                }
            }
            let patterns: Vec<&Pattern> = rule
                .rhs
                .iter()
                .chain(rule.lhs.iter().filter(|p| p.persistent).map(|p| &p.pattern))
                .collect();
            for b in seeds {
                let mut partials = Vec::new();
                self.match_patterns(rule, state, &patterns, 0, b, &mut partials);
                for partial in partials {
                    self.complete(rule, &entities, &mut fresh, partial, 0, &mut out);
                }
            }
        }
        out
    }

    fn match_patterns(
        &self,
        rule: &RuleSchema,
        state: &State,
        patterns: &[&Pattern],
        i: usize,
        binding: Vec<Option<EntityId>>,
        out: &mut Vec<Vec<Option<EntityId>>>,
    ) {
        if out.len() > 64 {
            return;
        }
        let Some(p) = patterns.get(i) else {
            out.push(binding);
            return;
        };
        let mut matched = false;
        for atom in state.with_predicate(&p.predicate) {
            let mut b = binding.clone();
            if unify(p, atom, &rule.params, &mut b).is_some() {
                matched = true;
                self.match_patterns(rule, state, patterns, i + 1, b, out);
            }
        }
        let fully_bound = p.vars().all(|v| binding[v].is_some());
        if self.create && (!matched || !fully_bound) {
            self.match_patterns(rule, state, patterns, i + 1, binding, out);
        }
    }

    /// Binds the remaining variables to existing entities or, with fact
    /// creation, to fresh ones.
    fn complete(
        &self,
        rule: &RuleSchema,
        entities: &BTreeSet<EntityId>,
        fresh: &mut FreshIds,
        mut binding: Vec<Option<EntityId>>,
        from: usize,
        out: &mut BTreeSet<GroundAction>,
    ) {
        let Some(v) = (from..binding.len()).find(|&v| binding[v].is_none()) else {
            let full: Vec<EntityId> = binding.into_iter().map(|b| b.expect("bound")).collect();
            // a binding that uses one entity twice is never what a rule means
            let distinct: BTreeSet<&EntityId> = full.iter().collect();
            if distinct.len() == full.len() {
                if let Ok(a) = rule.instantiate(&full) {
                    out.insert(a);
                }
            }
            return;
        };
        let tag = rule.params[v].tag;
        for e in entities.iter().filter(|e| e.tag().conforms_to(tag)) {
            binding[v] = Some(e.clone());
            self.complete(rule, entities, fresh, binding.clone(), v + 1, out);
        }
        if self.create && creatable_tag(tag) {
            binding[v] = Some(fresh.next(tag, v));
            self.complete(rule, entities, fresh, binding.clone(), v + 1, out);
        }
    }

    /// Puts `a` in front of the chain, creating the facts it needs in every
    /// state from the earliest on.
    fn prepend(&self, chain: &Chain, a: GroundAction) -> Option<Chain> {
        let mut states = chain.states.clone();
        // a consumed fact that the rest of the chain never touches belongs
        // before `a`: pull it out of the later states
        for c in &a.consumed {
            let untouched = !a.produced.contains(c)
                && chain.actions.iter().all(|x| {
                    !x.consumed.contains(c) && !x.required.contains(c) && !x.produced.contains(c)
                });
            if untouched && states.iter().all(|s| s.contains(c)) {
                for s in &mut states {
                    s.remove(c);
                }
            }
        }
        let earliest = &states[0];
        let mut missing: Vec<Atom> = Vec::new();
        for atom in a.required.iter().chain(&a.produced) {
            if !earliest.contains(atom) && !missing.contains(atom) {
                missing.push(atom.clone());
            }
        }
        if !missing.is_empty() && !self.create {
            return None;
        }
        if !missing.iter().all(|m| creatable_atom(m, earliest)) {
            return None;
        }
        if !missing.is_empty() {
            for s in &mut states {
                for m in &missing {
                    s.insert(m.clone());
                }
                if !state_consistent(s) {
                    return None;
                }
            }
        }
        let mut pred = states[0].clone();
        for p in &a.produced {
            if !pred.remove(p) {
                return None;
            }
        }
        for c in &a.consumed {
            pred.insert(c.clone());
        }
        if !state_consistent(&pred) || states.contains(&pred) {
            return None;
        }
        let created = pred.entities().difference(&self.seed_entities).count();
        if created > MAX_CREATED_ENTITIES {
            return None;
        }
        states.insert(0, pred);
        let mut actions = chain.actions.clone();
        actions.insert(0, a);
        Some(Chain { states, actions })
    }
}

/// Completion pass and final checks on a full-length chain.
fn finish(mut chain: Chain) -> Option<Chain> {
    let extra = completion_atoms(&chain.states);
    if !extra.is_empty() {
        let mut initial = chain.states[0].clone();
        for a in extra {
            initial.insert(a);
        }
        let quest = Quest {
            actions: chain.actions.clone(),
            winning_conditions: Vec::new(),
            losing_conditions: Vec::new(),
        };
        chain.states = quest.replay(&initial).ok()?;
    }
    if !chain.states.iter().all(state_consistent) {
        return None;
    }
    let quest = Quest::new(chain.actions.clone());
    quest.validate(&chain.states[0]).ok()?;
    Some(chain)
}

/// State atoms for doors and containers that no state along the chain
/// mentions: doors are open when a passage through them is free, closed
/// otherwise; containers are closed.
fn completion_atoms(states: &[State]) -> Vec<Atom> {
    let initial = &states[0];
    let has_state = |e: &EntityId| {
        states.iter().any(|s| {
            ["open", "closed", "locked"]
                .iter()
                .any(|p| s.with_predicate(p).any(|a| a.arg(0) == e))
        })
    };
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    for e in initial.entities() {
        if !matches!(e.tag(), TypeTag::Door | TypeTag::Container)
            || has_state(&e)
            || !seen.insert(e.clone())
        {
            continue;
        }
        let open = e.tag() == TypeTag::Door
            && initial.with_predicate("link").any(|l| {
                l.arg(1) == &e
                    && initial
                        .contains(&Atom::new("free", vec![l.arg(0).clone(), l.arg(2).clone()]))
            });
        out.push(Atom::new(if open { "open" } else { "closed" }, vec![e]));
    }
    out
}

struct FreshIds {
    taken: BTreeSet<String>,
    next: BTreeMap<TypeTag, usize>,
    issued: BTreeMap<(TypeTag, usize), EntityId>,
}

impl FreshIds {
    fn new(entities: &BTreeSet<EntityId>) -> Self {
        FreshIds {
            taken: entities.iter().map(|e| e.id().to_string()).collect(),
            next: BTreeMap::new(),
            issued: BTreeMap::new(),
        }
    }

    /// The same slot always gets the same id, so one candidate never reuses
    /// a fresh entity for two parameters.
    fn next(&mut self, tag: TypeTag, slot: usize) -> EntityId {
        if let Some(e) = self.issued.get(&(tag, slot)) {
            return e.clone();
        }
        let n = self.next.entry(tag).or_insert(0);
        let id = loop {
            let candidate = format!("{}{}", tag.symbol(), *n);
            *n += 1;
            if self.taken.insert(candidate.clone()) {
                break candidate;
            }
        };
        let e = EntityId::new(id, tag);
        self.issued.insert((tag, slot), e.clone());
        e
    }
}

fn creatable_tag(tag: TypeTag) -> bool {
    matches!(
        tag,
        TypeTag::Container | TypeTag::Supporter | TypeTag::Object | TypeTag::Food | TypeTag::Key
    )
}

/// Facts that fact creation may add to `state`.
pub fn creatable_atom(atom: &Atom, state: &State) -> bool {
    if !atom_well_typed(atom) {
        return false;
    }
    let pred = atom.predicate();
    if DIRECTION_PREDICATES.contains(&pred) || pred == "link" {
        return false;
    }
    if pred == "at" && atom.arg(0).tag() == TypeTag::Player {
        return false;
    }
    if pred == "free" {
        return state
            .with_predicate("link")
            .any(|l| l.arg(0) == atom.arg(0) && l.arg(2) == atom.arg(1));
    }
    true
}

/// Physical consistency: one player location, one location per thing, one
/// state per openable, one match per key and lock, door states agreeing with
/// passages, and no repeated atoms.
pub fn state_consistent(state: &State) -> bool {
    if state.max_multiplicity() > 1 {
        return false;
    }
    let mut location: BTreeMap<&EntityId, usize> = BTreeMap::new();
    let mut status: BTreeMap<&EntityId, usize> = BTreeMap::new();
    let mut key_match: BTreeMap<&EntityId, usize> = BTreeMap::new();
    let mut lock_match: BTreeMap<&EntityId, usize> = BTreeMap::new();
    for atom in state.distinct() {
        match atom.predicate() {
            "at" | "in" | "on" | "eaten" => *location.entry(atom.arg(0)).or_default() += 1,
            "open" | "closed" | "locked" => *status.entry(atom.arg(0)).or_default() += 1,
            "match" => {
                *key_match.entry(atom.arg(0)).or_default() += 1;
                *lock_match.entry(atom.arg(1)).or_default() += 1;
            }
            _ => {}
        }
    }
    let player = EntityId::player();
    if location.get(&player).copied() != Some(1) && state.entities().contains(&player) {
        return false;
    }
    if [&location, &status, &key_match, &lock_match]
        .iter()
        .any(|m| m.values().any(|&n| n > 1))
    {
        return false;
    }
    // containment must not loop back on itself
    for atom in state.with_predicate("in") {
        if atom.arg(0) == atom.arg(1) {
            return false;
        }
    }
    for link in state.with_predicate("link") {
        let d = link.arg(1);
        let free = state.contains(&Atom::new(
            "free",
            vec![link.arg(0).clone(), link.arg(2).clone()],
        ));
        let open = state.contains(&Atom::new("open", vec![d.clone()]));
        let shut = state.contains(&Atom::new("closed", vec![d.clone()]))
            || state.contains(&Atom::new("locked", vec![d.clone()]));
        if (open && !free) || (shut && free) {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{apple, fridge, kitchen, mini_world_closed, mini_world_state};
    use crate::kb::{builtin_rules, core_rules};
    use crate::logic::enumerate_reachable;
    use crate::rng::stage_rng;

    fn act(rs: &RuleSet, name: &str, args: &[EntityId]) -> GroundAction {
        rs.rule(name).unwrap().instantiate(args).unwrap()
    }

    fn forward_cfg(len: usize) -> ChainConfig {
        ChainConfig::new(len, ChainDirection::Forward, 0)
    }

    fn backward_cfg(len: usize) -> ChainConfig {
        ChainConfig::new(len, ChainDirection::Backward, 0)
    }

    #[test]
    fn take_depends_on_open() {
        let rs = core_rules();
        let open = act(&rs, "open/c", &[fridge(), kitchen()]);
        let take = act(&rs, "take/c", &[apple(), fridge(), kitchen()]);
        let eat = act(&rs, "eat", &[apple()]);
        assert!(depends_on(&take, &open));
        assert!(depends_on(&eat, &take));
        assert!(!depends_on(&open, &open));
        assert!(!depends_on(&open, &eat));
    }

    /// Set-intersection oracle over every pair of ground actions in the
    /// kitchen's reachable graph.
    #[test]
    fn depends_on_matches_set_oracle() {
        let rs = core_rules();
        let g = enumerate_reachable(&mini_world_closed(), rs.rules(), 100);
        let actions: BTreeSet<GroundAction> = g.edges.iter().map(|(_, a, _)| a.clone()).collect();
        for a in &actions {
            for b in &actions {
                let produced: BTreeSet<&Atom> = b.produced.iter().collect();
                let needed: BTreeSet<&Atom> = a.consumed.iter().chain(&a.required).collect();
                assert_eq!(
                    depends_on(a, b),
                    !produced.is_disjoint(&needed),
                    "{a} after {b}"
                );
            }
        }
    }

    #[test]
    fn forward_length_one_on_kitchen() {
        let rs = core_rules();
        let s = mini_world_state();
        let mut seen = BTreeSet::new();
        for seed in 0..40 {
            let q = forward_quest(&s, &rs, &forward_cfg(1), &mut stage_rng(seed, 2)).unwrap();
            q.validate(&s).unwrap();
            assert_eq!(q.winning_conditions, q.actions[0].produced);
            seen.insert(q.actions[0].to_string());
        }
        let oracle: BTreeSet<String> = admissible_actions(&s, rs.rules())
            .iter()
            .map(|a| a.to_string())
            .collect();
        assert_eq!(seen, oracle);
    }

    #[test]
    fn forward_length_three_from_closed_fridge() {
        let rs = core_rules();
        let s = mini_world_closed();
        let mut found = false;
        for seed in 0..60 {
            let q = forward_quest(&s, &rs, &forward_cfg(3), &mut stage_rng(seed, 2)).unwrap();
            q.validate(&s).unwrap();
            let names: Vec<&str> = q.actions.iter().map(|a| a.rule_name()).collect();
            found |= names == ["open/c", "take/c", "eat"];
        }
        assert!(found);
    }

    #[test]
    fn forward_too_long_fails() {
        let rs = core_rules().subset(&["open/c", "close/c"]);
        let s = State::from_atoms([
            Atom::new("at", vec![EntityId::player(), kitchen()]),
            Atom::new("at", vec![fridge(), kitchen()]),
            Atom::new("closed", vec![fridge()]),
        ]);
        let r = forward_quest(&s, &rs, &forward_cfg(10), &mut stage_rng(0, 2));
        assert!(matches!(r, Err(QuestError::NoQuestFound { .. })));
    }

    #[test]
    fn zero_length_is_rejected() {
        let rs = core_rules();
        let r = forward_quest(
            &mini_world_state(),
            &rs,
            &forward_cfg(0),
            &mut stage_rng(0, 2),
        );
        assert!(matches!(r, Err(QuestError::InvalidConfig(_))));
    }

    fn empty_kitchen() -> State {
        State::from_atoms([Atom::new("at", vec![EntityId::player(), kitchen()])])
    }

    #[test]
    fn backward_eat_creates_apple_and_fridge() {
        let rs = core_rules().subset(&["open/c", "close/c", "take/c", "eat"]);
        let (initial, q) = backward_quest(
            &empty_kitchen(),
            &rs,
            Some("eat"),
            &backward_cfg(3),
            &mut stage_rng(5, 2),
        )
        .unwrap();
        q.validate(&initial).unwrap();
        let names: Vec<&str> = q.actions.iter().map(|a| a.rule_name()).collect();
        assert_eq!(names, ["open/c", "take/c", "eat"]);
        let food = q.actions[2].binding[0].clone();
        let cont = q.actions[0].binding[0].clone();
        assert_eq!(food.tag(), TypeTag::Food);
        assert!(initial.contains(&Atom::new("in", vec![food, cont.clone()])));
        assert!(initial.contains(&Atom::new("closed", vec![cont.clone()])));
        assert!(initial.contains(&Atom::new("at", vec![cont, kitchen()])));
        // after step 2 the food is in the inventory
        let states = q.replay(&initial).unwrap();
        assert!(states[2]
            .with_predicate("in")
            .any(|a| a.arg(1).tag() == TypeTag::Inventory));
    }

    #[test]
    fn backward_single_eat_creates_nothing_when_apple_is_held() {
        let seed = State::from_atoms([
            Atom::new("at", vec![EntityId::player(), kitchen()]),
            Atom::new("in", vec![apple(), EntityId::inventory()]),
        ]);
        let rs = core_rules();
        for s in 0..10 {
            let (initial, q) = backward_quest(
                &seed,
                &rs,
                Some("eat"),
                &backward_cfg(1),
                &mut stage_rng(s, 2),
            )
            .unwrap();
            if q.actions[0].binding[0] == apple() {
                assert_eq!(initial, seed);
                assert_eq!(q.actions[0].to_string(), "eat(apple)");
                return;
            }
        }
        panic!("never chose the held apple");
    }

    #[test]
    fn backward_without_creation_uses_existing_facts() {
        let mut cfg = backward_cfg(1);
        cfg.allow_fact_creation = false;
        let rs = core_rules();
        let (initial, q) = backward_quest(
            &mini_world_state(),
            &rs,
            Some("open/c"),
            &cfg,
            &mut stage_rng(1, 2),
        )
        .unwrap();
        assert_eq!(initial, mini_world_closed());
        assert_eq!(q.actions[0].to_string(), "open/c(fridge,kitchen)");
        // nothing has been eaten and nothing may be created
        let r = backward_quest(
            &mini_world_state(),
            &rs,
            Some("eat"),
            &cfg,
            &mut stage_rng(1, 2),
        );
        assert!(matches!(r, Err(QuestError::NoQuestFound { .. })));
    }

    #[test]
    fn backward_quests_replay() {
        let rs = builtin_rules();
        let map = crate::world::generate_map(
            &crate::world::WorldSpec {
                nb_rooms: 3,
                grid_size: 3,
                with_doors: true,
                nb_objects: 0,
                seed: 0,
            },
            &mut stage_rng(4, 0),
        )
        .unwrap();
        let seed = crate::world::place_objects(
            &map,
            3,
            &crate::world::TypeMix::house(),
            &mut stage_rng(4, 1),
        );
        for s in 0..30 {
            for len in 1..=5 {
                let (initial, q) =
                    backward_quest(&seed, &rs, None, &backward_cfg(len), &mut stage_rng(s, 2))
                        .unwrap_or_else(|e| panic!("seed {s} len {len}: {e}"));
                q.validate(&initial).unwrap();
                assert!(initial.iter().all(atom_well_typed));
                assert!(state_consistent(&initial));
            }
        }
    }

    #[test]
    fn consistency_rejects_two_locations() {
        let mut s = mini_world_state();
        assert!(state_consistent(&s));
        s.insert(Atom::new("in", vec![apple(), EntityId::inventory()]));
        assert!(!state_consistent(&s));
        let mut s = mini_world_state();
        s.insert(Atom::new("closed", vec![fridge()]));
        assert!(!state_consistent(&s));
    }

    #[test]
    fn map_facts_cannot_be_created() {
        let s = empty_kitchen();
        let hall = EntityId::new("hall", TypeTag::Room);
        assert!(!creatable_atom(
            &Atom::new("north_of", vec![hall.clone(), kitchen()]),
            &s
        ));
        assert!(!creatable_atom(
            &Atom::new("free", vec![hall.clone(), kitchen()]),
            &s
        ));
        assert!(!creatable_atom(
            &Atom::new("at", vec![EntityId::player(), hall]),
            &s
        ));
        assert!(creatable_atom(
            &Atom::new("at", vec![fridge(), kitchen()]),
            &s
        ));
    }
}
