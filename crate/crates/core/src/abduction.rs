//! Backward chaining over the flattened KB that may assume a bounded number
//! of missing literals, searched by iterative deepening on that number.
//!
//! Free variables of assumed literals, and witnesses introduced by a
//! clause's existential head variables, stand for unknown individuals: they
//! may be identified with each other but never with an entity already in
//! the model. Without this, "London is in January" could be explained by
//! assuming London has a temporal view that happens to be January itself.

use std::cell::{Cell, RefCell};
use std::rc::Rc;
use std::collections::BTreeSet;
use std::fmt;

use serde::{Serialize, Serializer};

use crate::kb::{is_abducible, HornClause, KnowledgeBase, COMPAT, LOCATED};
use crate::model::{compat_holds, Model};
use crate::term::{unify, Literal, Substitution, Term};
use crate::Language;

pub const DEFAULT_MAX_MISSING: usize = 3;
pub const DEFAULT_MAX_DEPTH: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AbductionOptions {
    pub max_missing: usize,
    /// Clause expansions allowed along one branch.
    pub max_depth: usize,
}

impl Default for AbductionOptions {
    fn default() -> Self {
        AbductionOptions { max_missing: DEFAULT_MAX_MISSING, max_depth: DEFAULT_MAX_DEPTH }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Via {
    Fact(Literal),
    Assumed,
    Clause(String),
    Compat,
}

impl fmt::Display for Via {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Via::Fact(l) => write!(f, "fact {l}"),
            Via::Assumed => f.write_str("assumed"),
            Via::Clause(c) => write!(f, "clause {c}"),
            Via::Compat => f.write_str("lattice"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceStep {
    pub goal: Literal,
    pub via: Via,
}

impl Serialize for TraceStep {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(&format_args!("{} <= {}", self.goal, self.via))
    }
}

/// A guard that failed outright: a ground compat between incompatible
/// types, which abduction never assumes.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Blocker {
    pub clause: String,
    #[serde(serialize_with = "as_text")]
    pub literal: Literal,
}

fn as_text<T: fmt::Display, S: Serializer>(t: &T, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(t)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AbductionResult {
    #[serde(serialize_with = "as_text")]
    pub target: Literal,
    /// Assumed literals, variables renamed B, C, ... by first occurrence.
    pub missing: Vec<Literal>,
    #[serde(serialize_with = "as_text")]
    pub bindings: Substitution,
    pub cost: usize,
    /// Source rule of the clause that proved the target, or `None` when the
    /// target is itself a fact.
    pub clause: Option<String>,
    #[serde(skip)]
    pub clause_index: Option<usize>,
    pub trace: Vec<TraceStep>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Abduction {
    pub results: Vec<AbductionResult>,
    pub blockers: Vec<Blocker>,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum AbductionError {
    #[error("unknown predicate '{0}'")]
    UnknownPredicate(String),
}

#[derive(Clone)]
struct Goal {
    literal: Literal,
    depth: usize,
    /// The clause this goal came from, for blocker reports.
    clause: Option<String>,
    /// Goals expanded by clauses on the way here.
    ancestors: Rc<Vec<Literal>>,
}

#[derive(Clone, Default)]
struct State {
    subst: Substitution,
    assumed: Vec<Literal>,
    frozen: BTreeSet<String>,
    trace: Vec<TraceStep>,
    top: Option<(usize, String)>,
}

struct Prover<'a> {
    model: &'a Model,
    kb: &'a KnowledgeBase,
    clauses: Vec<(usize, &'a HornClause)>,
    max_depth: usize,
    budget: usize,
    target: Literal,
    counter: Cell<usize>,
    solutions: RefCell<Vec<State>>,
    blockers: RefCell<BTreeSet<Blocker>>,
}

/// Every variable in `frozen` still resolves to a variable.
fn frozen_ok(s: &Substitution, frozen: &BTreeSet<String>) -> bool {
    frozen.iter().all(|v| matches!(s.apply(&Term::var(v)), Term::Var(_)))
}

fn unify_literals(a: &Literal, b: &Literal, s: &Substitution) -> Option<Substitution> {
    if a.predicate != b.predicate || a.args.len() != b.args.len() {
        return None;
    }
    a.args.iter().zip(&b.args).try_fold(s.clone(), |s, (x, y)| unify(x, y, &s))
}

impl Prover<'_> {
    fn rename(&self, clause: &HornClause) -> (Literal, Vec<Literal>, Vec<String>) {
        let n = self.counter.get();
        self.counter.set(n + 1);
        let mut vars = BTreeSet::new();
        for l in std::iter::once(&clause.head).chain(&clause.body) {
            vars.extend(l.free_vars());
        }
        let mut s = Substitution::new();
        for v in &vars {
            s = s.bind(v, &Term::var(format!("{v}_{n}"))).expect("fresh names");
        }
        let ex = clause.existential_vars.iter().map(|v| format!("{v}_{n}")).collect();
        (clause.head.apply(&s), clause.body.iter().map(|l| l.apply(&s)).collect(), ex)
    }

    fn solve(&self, goals: &[Goal], state: State) {
        let Some((goal, rest)) = goals.split_first() else {
            self.solutions.borrow_mut().push(state);
            return;
        };
        let lit = goal.literal.apply(&state.subst);
        let is_target = goal.depth == 0 && goal.clause.is_none();

        if lit.predicate == COMPAT {
            match compat_holds(&lit, self.kb.lattice()) {
                Some(true) => {
                    let mut st = state;
                    st.trace.push(TraceStep { goal: lit, via: Via::Compat });
                    self.solve(rest, st);
                }
                Some(false) => {
                    let clause = goal.clause.clone().unwrap_or_default();
                    self.blockers.borrow_mut().insert(Blocker { clause, literal: lit });
                }
                None => self.assume(&lit, rest, state),
            }
            return;
        }

        if lit.is_ground() && self.model.contains(&lit) {
            let mut st = state;
            st.trace.push(TraceStep { goal: lit.clone(), via: Via::Fact(lit) });
            self.solve(rest, st);
            return;
        }

        for fact in self.model.with_predicate(&lit.predicate).chain(state.assumed.iter()) {
            let fact = fact.apply(&state.subst);
            if let Some(s) = unify_literals(&lit, &fact, &state.subst).filter(|s| frozen_ok(s, &state.frozen)) {
                let mut st = state.clone();
                st.subst = s;
                let via = if self.model.contains(&fact) { Via::Fact(fact) } else { Via::Assumed };
                st.trace.push(TraceStep { goal: lit.clone(), via });
                self.solve(rest, st);
            }
        }

        let looping = goal.ancestors.iter().any(|a| is_variant(&a.apply(&state.subst), &lit));
        // the model is closed under the clauses, so an expansion only pays
        // off if something beneath it is assumed
        if goal.depth < self.max_depth && !looping && state.assumed.len() < self.budget {
            let mut ancestors = (*goal.ancestors).clone();
            ancestors.push(lit.clone());
            let ancestors = Rc::new(ancestors);
            for &(index, clause) in &self.clauses {
                if clause.head.predicate != lit.predicate || clause.head.arity() != lit.arity() {
                    continue;
                }
                if is_target && lit.predicate == LOCATED && !self.trigger_holds(clause, &lit) {
                    continue;
                }
                let (head, body, existentials) = self.rename(clause);
                let Some(s) = unify_literals(&lit, &head, &state.subst) else { continue };
                let mut frozen = state.frozen.clone();
                let mut witnesses = BTreeSet::new();
                let mut ok = true;
                for e in existentials.iter().filter(|e| head.free_vars().contains(*e)) {
                    match s.apply(&Term::var(e)) {
                        Term::Var(w)
                            if !state.frozen.iter().any(|f| s.apply(&Term::var(f)) == Term::var(&w)) && witnesses.insert(w.clone()) =>
                        {
                            frozen.insert(w);
                        }
                        _ => ok = false,
                    }
                }
                if !ok || !frozen_ok(&s, &frozen) {
                    continue;
                }
                let mut st = state.clone();
                st.subst = s;
                st.frozen = frozen;
                st.trace.push(TraceStep { goal: lit.clone(), via: Via::Clause(clause.source_rule.clone()) });
                if is_target {
                    st.top = Some((index, clause.source_rule.clone()));
                }
                let mut next: Vec<Goal> = body
                    .into_iter()
                    .map(|literal| Goal {
                        literal,
                        depth: goal.depth + 1,
                        clause: Some(clause.source_rule.clone()),
                        ancestors: ancestors.clone(),
                    })
                    .collect();
                next.extend_from_slice(rest);
                self.solve(&next, st);
            }
        }

        if !is_target && is_abducible(&lit.predicate) {
            self.assume(&lit, rest, state);
        }
    }

    /// The preposition literal of a locating clause holds in the model.
    fn trigger_holds(&self, clause: &HornClause, target: &Literal) -> bool {
        let Some(trigger) = clause.body.first() else { return false };
        let Some(s) = unify_literals(&clause.head, target, &Substitution::new()) else { return false };
        let trigger = trigger.apply(&s);
        self.model.with_predicate(&trigger.predicate).any(|f| unify_literals(&trigger, f, &Substitution::new()).is_some())
    }

    fn assume(&self, lit: &Literal, rest: &[Goal], state: State) {
        if state.assumed.len() >= self.budget || (lit.is_ground() && self.model.contains(lit)) {
            return;
        }
        // an entity's type comes from its noun and is not up for revision
        if lit.predicate == "type" && lit.args.first().and_then(Term::as_entity).is_some_and(|e| !self.model.types_of(e).is_empty()) {
            return;
        }
        let mut st = state;
        st.frozen.extend(lit.free_vars());
        st.assumed.push(lit.clone());
        st.trace.push(TraceStep { goal: lit.clone(), via: Via::Assumed });
        self.solve(rest, st);
    }
}

/// Equal up to a renaming of variables.
fn is_variant(a: &Literal, b: &Literal) -> bool {
    a.predicate == b.predicate && rename_for_display(std::slice::from_ref(a)) == rename_for_display(std::slice::from_ref(b))
}

/// Rename the free variables of `lits` to B, C, D, ... in order of first
/// occurrence.
pub fn rename_for_display(lits: &[Literal]) -> Vec<Literal> {
    let mut order: Vec<String> = Vec::new();
    fn collect(t: &Term, order: &mut Vec<String>) {
        match t {
            Term::Var(v) if !order.contains(v) => order.push(v.clone()),
            Term::Compound(_, args) => args.iter().for_each(|a| collect(a, order)),
            _ => {}
        }
    }
    for l in lits {
        l.args.iter().for_each(|a| collect(a, &mut order));
    }
    let mut s = Substitution::new();
    // bind to placeholders first so that names already in use cannot collide
    for (i, v) in order.iter().enumerate() {
        s = s.bind(v, &Term::var(format!("__{i}"))).expect("distinct variables");
    }
    let mut s2 = Substitution::new();
    for i in 0..order.len() {
        s2 = s2.bind(&format!("__{i}"), &Term::var(display_var(i))).expect("distinct placeholders");
    }
    lits.iter().map(|l| l.apply(&s).apply(&s2)).collect()
}

fn display_var(i: usize) -> String {
    const LETTERS: &[u8] = b"BCDEFGHIJKLMNOPQRSTUVWXYZ";
    let letter = LETTERS[i % LETTERS.len()] as char;
    match i / LETTERS.len() {
        0 => letter.to_string(),
        n => format!("{letter}{n}"),
    }
}

/// Find every minimal set of abducible literals that, added to the model,
/// would make `target` provable.
pub fn abduce(
    target: &Literal,
    model: &Model,
    kb: &KnowledgeBase,
    language: Language,
    options: &AbductionOptions,
) -> Result<Abduction, AbductionError> {
    if !kb.knows_predicate(&target.predicate) && model.with_predicate(&target.predicate).next().is_none() {
        return Err(AbductionError::UnknownPredicate(target.predicate.clone()));
    }
    let clauses: Vec<(usize, &HornClause)> =
        kb.horn().iter().enumerate().filter(|(_, c)| c.language.applies_to(language)).collect();
    let mut blockers = BTreeSet::new();
    for k in 0..=options.max_missing {
        let prover = Prover {
            model,
            kb,
            clauses: clauses.clone(),
            max_depth: options.max_depth,
            budget: k,
            target: target.clone(),
            counter: Cell::new(0),
            solutions: RefCell::new(Vec::new()),
            blockers: RefCell::new(BTreeSet::new()),
        };
        prover.solve(&[Goal { literal: target.clone(), depth: 0, clause: None, ancestors: Rc::default() }], State::default());
        blockers.extend(prover.blockers.take());
        let results = collect_results(&prover, prover.solutions.take());
        if !results.is_empty() {
            return Ok(Abduction { results, blockers: blockers.into_iter().collect() });
        }
    }
    Ok(Abduction { results: Vec::new(), blockers: blockers.into_iter().collect() })
}

fn collect_results(prover: &Prover<'_>, solutions: Vec<State>) -> Vec<AbductionResult> {
    let target_vars = prover.target.free_vars();
    let mut seen = BTreeSet::new();
    let mut out: Vec<AbductionResult> = Vec::new();
    for st in solutions {
        let mut missing: Vec<Literal> = Vec::new();
        for a in &st.assumed {
            let a = a.apply(&st.subst);
            if !missing.contains(&a) {
                missing.push(a);
            }
        }
        let missing = rename_for_display(&missing);
        let mut key: Vec<String> = missing.iter().map(ToString::to_string).collect();
        key.sort();
        if !seen.insert((st.top.as_ref().map(|t| t.0), key)) {
            continue;
        }
        let trace = st.trace.iter().map(|t| TraceStep { goal: t.goal.apply(&st.subst), via: t.via.clone() }).collect();
        out.push(AbductionResult {
            target: prover.target.clone(),
            cost: missing.len(),
            missing,
            bindings: st.subst.restrict(&target_vars),
            clause: st.top.as_ref().map(|t| t.1.clone()),
            clause_index: st.top.map(|t| t.0),
            trace,
        });
    }
    let Some(min) = out.iter().map(|r| r.cost).min() else { return out };
    out.retain(|r| r.cost == min);
    out.sort_by_cached_key(|r| (r.cost, r.clause_index, r.missing.iter().map(ToString::to_string).collect::<Vec<_>>()));
    // the same missing set reached through different clauses is reported once
    let mut seen_sets = BTreeSet::new();
    out.retain(|r| {
        let mut key: Vec<String> = r.missing.iter().map(ToString::to_string).collect();
        key.sort();
        seen_sets.insert((key, r.bindings.to_string()))
    });
    out
}
