//! Reference implementations used as oracles by the integration tests.
//! They share only the data types with the library: matching, Skolem
//! witnesses, depth accounting and the fixpoint loop are written out again
//! in the most direct way.

#![allow(dead_code)]

pub mod saturation;
pub mod terms;

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::path::PathBuf;

use prepdiag_core::abduction::{abduce, rename_for_display, AbductionOptions};
use prepdiag_core::diagnostics::preposition_uses;
use prepdiag_core::exercise::Bank;
use prepdiag_core::grammar::Lexicon;
use prepdiag_core::kb::{HornClause, KnowledgeBase, LOCATED};
use prepdiag_core::model::Model;
use prepdiag_core::pipeline::analyze;
use prepdiag_core::term::{parse_literal, EntityId, EntitySource, Literal, Term};
use prepdiag_core::Language;
use rand::Rng;

pub const DEPTH_CAP: usize = 2;

pub fn lits(src: &[&str]) -> Vec<Literal> {
    src.iter().map(|s| parse_literal(s).unwrap_or_else(|e| panic!("{s}: {e}"))).collect()
}

pub fn golden_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

pub fn golden(name: &str) -> String {
    std::fs::read_to_string(golden_path(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

type Binding = BTreeMap<String, Term>;

fn match_term(pattern: &Term, fact: &Term, b: &mut Binding) -> bool {
    match pattern {
        Term::Var(v) => match b.get(v) {
            Some(bound) => bound == fact,
            None => {
                b.insert(v.clone(), fact.clone());
                true
            }
        },
        Term::Compound(f, args) => match fact {
            Term::Compound(g, fargs) if f == g && args.len() == fargs.len() => {
                args.iter().zip(fargs).all(|(p, t)| match_term(p, t, b))
            }
            _ => false,
        },
        other => other == fact,
    }
}

fn match_literal(pattern: &Literal, fact: &Literal, b: &Binding) -> Option<Binding> {
    if pattern.predicate != fact.predicate || pattern.args.len() != fact.args.len() {
        return None;
    }
    let mut b = b.clone();
    pattern.args.iter().zip(&fact.args).all(|(p, f)| match_term(p, f, &mut b)).then_some(b)
}

fn substitute(t: &Term, b: &Binding) -> Term {
    match t {
        Term::Var(v) => b.get(v).cloned().unwrap_or_else(|| t.clone()),
        Term::Compound(f, args) => Term::Compound(f.clone(), args.iter().map(|a| substitute(a, b)).collect()),
        other => other.clone(),
    }
}

fn instantiate(l: &Literal, b: &Binding) -> Literal {
    Literal::new(l.predicate.clone(), l.args.iter().map(|a| substitute(a, b)).collect())
}

/// Forward-chaining state: the facts, the witness table and the depth of
/// every minted entity. Entities that were never minted are at depth 0.
#[derive(Clone, Debug)]
pub struct Naive<'k> {
    kb: &'k KnowledgeBase,
    clauses: Vec<&'k HornClause>,
    pub facts: Vec<Literal>,
    seen: HashSet<Literal>,
    witnesses: HashMap<(String, usize, Binding), Vec<EntityId>>,
    depth: HashMap<EntityId, usize>,
    next: u64,
    pub cap: usize,
}

impl<'k> Naive<'k> {
    pub fn new(kb: &'k KnowledgeBase, language: Language, facts: &[Literal], cap: usize) -> Naive<'k> {
        let mut n = Naive {
            kb,
            clauses: kb.horn().iter().filter(|c| c.language.applies_to(language)).collect(),
            facts: Vec::new(),
            seen: HashSet::new(),
            witnesses: HashMap::new(),
            depth: HashMap::new(),
            next: 1_000_000,
            cap,
        };
        for f in facts {
            n.add(f.clone());
        }
        n
    }

    fn add(&mut self, f: Literal) -> bool {
        for e in f.entities() {
            if let EntityId::Fresh(k) = e {
                self.next = self.next.max(k + 1);
            }
        }
        if self.seen.insert(f.clone()) {
            self.facts.push(f);
            true
        } else {
            false
        }
    }

    fn holds_compat(&self, l: &Literal) -> bool {
        match l.args.as_slice() {
            [Term::Const(a), Term::Const(b)] => self.kb.lattice().compatible(a, b).unwrap_or(false),
            _ => false,
        }
    }

    /// Every binding of `body` against the current facts. With `delta`,
    /// only bindings in which some body literal is matched by a delta fact:
    /// that literal is matched first and the rest joined over everything.
    fn bindings(&self, body: &[Literal], delta: Option<&HashSet<Literal>>) -> Vec<Binding> {
        let mut out = Vec::new();
        let Some(delta) = delta else {
            self.join(body, Binding::new(), &mut out);
            return out;
        };
        for (i, lit) in body.iter().enumerate() {
            if lit.predicate == "compat" {
                continue;
            }
            let rest: Vec<Literal> = body.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, l)| l.clone()).collect();
            for f in delta {
                if let Some(b) = match_literal(lit, f, &Binding::new()) {
                    self.join(&rest, b, &mut out);
                }
            }
        }
        out.sort();
        out.dedup();
        out
    }

    fn join(&self, body: &[Literal], b: Binding, out: &mut Vec<Binding>) {
        let Some((first, rest)) = body.split_first() else {
            out.push(b);
            return;
        };
        if first.predicate == "compat" {
            if self.holds_compat(&instantiate(first, &b)) {
                self.join(rest, b, out);
            }
            return;
        }
        for f in &self.facts {
            if let Some(b2) = match_literal(first, f, &b) {
                self.join(rest, b2, out);
            }
        }
    }

    /// Heads derivable by one round over all clauses.
    fn round(&mut self, delta: Option<&HashSet<Literal>>) -> Vec<Literal> {
        let mut derived = Vec::new();
        for c in self.clauses.clone() {
            for b in self.bindings(&c.body, delta) {
                let mut full = b.clone();
                if !c.existential_vars.is_empty() {
                    let key = (c.source_rule.clone(), c.group, b.clone());
                    let ws = match self.witnesses.get(&key) {
                        Some(ws) => ws.clone(),
                        None => {
                            let parent = c
                                .anchor_vars
                                .iter()
                                .filter_map(|v| b.get(v))
                                .flat_map(term_entities)
                                .map(|e| self.depth.get(&e).copied().unwrap_or(0))
                                .max()
                                .unwrap_or(0);
                            if parent + 1 > self.cap {
                                continue;
                            }
                            let ws: Vec<EntityId> = c
                                .existential_vars
                                .iter()
                                .map(|_| {
                                    self.next += 1;
                                    EntityId::Fresh(self.next - 1)
                                })
                                .collect();
                            for &w in &ws {
                                self.depth.insert(w, parent + 1);
                            }
                            self.witnesses.insert(key, ws.clone());
                            ws
                        }
                    };
                    for (v, w) in c.existential_vars.iter().zip(ws) {
                        full.insert(v.clone(), Term::Entity(w));
                    }
                }
                let head = instantiate(&c.head, &full);
                if !self.seen.contains(&head) {
                    derived.push(head);
                }
            }
        }
        derived
    }

    /// Recompute every clause over every fact until nothing changes.
    pub fn saturate(&mut self) {
        loop {
            let derived = self.round(None);
            let mut changed = false;
            for f in derived {
                changed |= self.add(f);
            }
            if !changed {
                return;
            }
        }
    }

    /// Add facts to an already saturated state and continue, looking only
    /// at rule instances that use something new.
    pub fn extend_with(&mut self, extra: &[Literal]) {
        let mut delta: HashSet<Literal> = extra.iter().filter(|f| !self.seen.contains(*f)).cloned().collect();
        for f in extra {
            self.add(f.clone());
        }
        while !delta.is_empty() {
            let derived = self.round(Some(&delta));
            delta = HashSet::new();
            for f in derived {
                if self.add(f.clone()) {
                    delta.insert(f);
                }
            }
        }
    }

    pub fn contains(&self, f: &Literal) -> bool {
        self.seen.contains(f)
    }

    /// Some fact is an instance of `pattern`.
    pub fn holds(&self, pattern: &Literal) -> bool {
        self.facts.iter().any(|f| match_literal(pattern, f, &Binding::new()).is_some())
    }

    /// Entities typed in two different partitions.
    pub fn inconsistent(&self) -> bool {
        let lattice = self.kb.lattice();
        let mut roots: HashMap<EntityId, String> = HashMap::new();
        for f in self.facts.iter().filter(|f| f.predicate == "type") {
            if let [Term::Entity(e), Term::Const(t)] = f.args.as_slice() {
                let Ok(root) = lattice.root(t) else { return true };
                if roots.insert(*e, root.to_string()).is_some_and(|r| r != root) {
                    return true;
                }
            }
        }
        false
    }
}

pub fn term_entities(t: &Term) -> Vec<EntityId> {
    let mut out = Vec::new();
    t.visit_entities(&mut |e| out.push(e));
    out
}

/// Replace every variable of `set` by a distinct entity not used anywhere
/// else.
pub fn ground_fresh(set: &[Literal], first: u64) -> Vec<Literal> {
    let vars: BTreeSet<String> = set.iter().flat_map(|l| l.free_vars()).collect();
    let b: Binding = vars.into_iter().enumerate().map(|(i, v)| (v, Term::Entity(EntityId::Fresh(first + i as u64)))).collect();
    set.iter().map(|l| instantiate(l, &b)).collect()
}

/// Does adding `extra` to the saturated state give a consistent model
/// with a fact matching `target`?
pub fn derives(base: &Naive<'_>, extra: &[Literal], target: &Literal) -> bool {
    let mut n = base.clone();
    n.extend_with(extra);
    n.holds(target) && !n.inconsistent()
}

/// Every ground abducible literal over `entities` plus the constants the
/// KB gives each argument position. `compat` is evaluated, never stated,
/// so it is not a candidate.
pub fn candidates(kb: &KnowledgeBase, entities: &[EntityId]) -> Vec<Literal> {
    let ent: Vec<Term> = entities.iter().map(|e| Term::Entity(*e)).collect();
    let types: Vec<Term> = kb.lattice().all_types().into_iter().map(Term::constant).collect();
    let spaces = [Term::constant("r2"), Term::constant("r3")];
    let dims = [Term::constant("2"), Term::constant("3")];
    let mut out = Vec::new();
    let pairs = |p: &str, out: &mut Vec<Literal>| {
        for a in &ent {
            for b in &ent {
                out.push(Literal::new(p, vec![a.clone(), b.clone()]));
            }
        }
    };
    for p in ["view", "interior", "surface", "bottom", "top", "touching", "subset"] {
        pairs(p, &mut out);
    }
    for a in &ent {
        out.push(Literal::new("orientable", vec![a.clone()]));
        for t in &types {
            out.push(Literal::new("type", vec![a.clone(), t.clone()]));
        }
        for d in &dims {
            out.push(Literal::new("dim", vec![a.clone(), d.clone()]));
        }
        for b in &ent {
            for s in &spaces {
                out.push(Literal::new("embedding", vec![a.clone(), b.clone(), s.clone()]));
            }
        }
    }
    out
}

/// One abduction question: the anchored facts of a sentence, its
/// saturated model and the literal to explain.
pub struct Problem {
    pub name: String,
    pub language: Language,
    pub anchored: Vec<Literal>,
    pub model: Model,
    pub target: Literal,
}

/// The questions diagnosis asks about every bank attempt: why each
/// preposition use fails to locate, and for a rejected attempt why each
/// literal of its first explanation is missing.
pub fn bank_problems(kb: &KnowledgeBase, lexicon: &Lexicon, bank: &Bank) -> Vec<Problem> {
    let mut out = Vec::new();
    for ex in bank.exercises() {
        let language = ex.target_language();
        for text in ex.reference_translations.iter().chain(&ex.wrong_attempts) {
            let a = analyze(text, language, kb, lexicon, &EntitySource::new()).unwrap_or_else(|e| panic!("{text}: {e}"));
            for u in preposition_uses(&a.model, kb) {
                let target = Literal::new(LOCATED, u.literal.args.clone());
                out.push(Problem {
                    name: format!("{}: {text}", ex.id),
                    language,
                    anchored: a.anchored.facts.clone(),
                    model: a.model.clone(),
                    target: target.clone(),
                });
                if u.located {
                    continue;
                }
                let r = abduce(&target, &a.model, kb, language, &AbductionOptions::default()).unwrap();
                if let Some(first) = r.results.first() {
                    for m in rename_for_display(&first.missing) {
                        out.push(Problem {
                            name: format!("{}: {text} / why {m}", ex.id),
                            language,
                            anchored: a.anchored.facts.clone(),
                            model: a.model.clone(),
                            target: m,
                        });
                    }
                }
            }
        }
    }
    out
}

pub fn sentence_problem(kb: &KnowledgeBase, lexicon: &Lexicon, language: Language, text: &str, target: Option<&str>) -> Problem {
    let a = analyze(text, language, kb, lexicon, &EntitySource::new()).unwrap_or_else(|e| panic!("{text}: {e}"));
    let target = match target {
        Some(t) => parse_literal(t).unwrap(),
        None => Literal::new(LOCATED, preposition_uses(&a.model, kb)[0].literal.args.clone()),
    };
    Problem { name: text.to_string(), language, anchored: a.anchored.facts.clone(), model: a.model, target }
}

/// Check `abduce` on one problem by brute force:
/// every returned set, with its variables read as new entities, really
/// yields the target; no proper subset of it does; and no set of fewer
/// ground abducible literals does. The last part enumerates all sets below
/// the returned cost, so it is limited to costs of at most 2.
pub fn check_minimality(kb: &KnowledgeBase, p: &Problem) -> Result<String, String> {
    let r = abduce(&p.target, &p.model, kb, p.language, &AbductionOptions::default()).map_err(|e| e.to_string())?;
    let mut base = Naive::new(kb, p.language, &p.anchored, DEPTH_CAP);
    base.saturate();
    let mut ents: Vec<EntityId> = base.facts.iter().flat_map(|f| f.entities()).collect::<BTreeSet<_>>().into_iter().collect();
    ents.extend([EntityId::Fresh(800_001), EntityId::Fresh(800_002)]);
    let pool: Vec<Literal> = candidates(kb, &ents)
        .into_iter()
        .filter(|c| !base.contains(c) && match_literal(&p.target, c, &Binding::new()).is_none())
        .collect();
    let singles = || -> Vec<&Literal> { pool.iter().filter(|c| derives(&base, std::slice::from_ref(*c), &p.target)).collect() };

    let Some(first) = r.results.first() else {
        // nothing returned, so there is no cost to undercut; report the
        // single literals that would work by naming an existing entity
        let found: Vec<String> = singles().iter().map(ToString::to_string).collect();
        return Ok(format!("no explanation within budget; single literals over existing entities: [{}]", found.join(", ")));
    };
    let cost = first.cost;
    for res in &r.results {
        if res.cost != cost || res.missing.len() != cost {
            return Err(format!("{}: mixed costs in results", p.name));
        }
        let ground = ground_fresh(&res.missing, 900_000);
        if !derives(&base, &ground, &p.target) {
            return Err(format!("{}: {:?} does not yield {}", p.name, ground.iter().map(ToString::to_string).collect::<Vec<_>>(), p.target));
        }
        for mask in 0..(1u32 << ground.len()) - 1 {
            let subset: Vec<Literal> = ground.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, l)| l.clone()).collect();
            if derives(&base, &subset, &p.target) {
                return Err(format!("{}: proper subset {subset:?} already yields {}", p.name, p.target));
            }
        }
    }
    match cost {
        0 => {}
        1 => {
            if derives(&base, &[], &p.target) {
                return Err(format!("{}: target holds without assumptions", p.name));
            }
        }
        2 => {
            let found = singles();
            if !found.is_empty() {
                return Err(format!("{}: cost 2 returned but {found:?} suffice", p.name));
            }
        }
        c => return Err(format!("{}: cost {c} is beyond exhaustive checking", p.name)),
    }
    Ok(format!("{} result(s) of cost {cost}", r.results.len()))
}

/// Up to `max` ground facts over a handful of entities: words of
/// `language`, its prepositions, possession, and a sprinkling of the
/// spatial predicates the postulates read.
pub fn random_facts(rng: &mut impl Rng, kb: &KnowledgeBase, language: Language, max: usize) -> Vec<Literal> {
    let words: Vec<&str> = kb
        .lexical_world()
        .filter(|r| r.language.applies_to(language))
        .filter_map(|r| r.trigger().map(|l| l.predicate.as_str()))
        .collect();
    let (preps, own) = match language {
        Language::En => (["in", "on"], "own"),
        Language::Ar => (["fy", "Ely"], "owner"),
    };
    let types = kb.lattice().all_types();
    let ent = |rng: &mut dyn rand::RngCore| match rng.gen_range(0..6) {
        0 => Term::Entity(EntityId::User),
        k => Term::Entity(EntityId::Fresh(k)),
    };
    let n = rng.gen_range(1..=max);
    (0..n)
        .map(|_| match rng.gen_range(0..10) {
            0..=3 => Literal::new(words[rng.gen_range(0..words.len())], vec![ent(rng)]),
            4..=5 => Literal::new(preps[rng.gen_range(0..2)], vec![ent(rng), ent(rng)]),
            6 => Literal::new(own, vec![Term::Entity(EntityId::User), ent(rng)]),
            7 => Literal::new("type", vec![ent(rng), Term::constant(types[rng.gen_range(0..types.len())])]),
            8 => {
                let space = if rng.gen_bool(0.5) { "r2" } else { "r3" };
                Literal::new("embedding", vec![ent(rng), ent(rng), Term::constant(space)])
            }
            _ => Literal::new("orientable", vec![ent(rng)]),
        })
        .collect()
}
