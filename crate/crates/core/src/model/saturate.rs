use std::collections::HashMap;

use crate::kb::{KnowledgeBase, COMPAT};
use crate::lattice::TypeLattice;
use crate::term::{unify, EntityId, EntitySource, Literal, Substitution, Term};
use crate::Language;

use super::{Model, ModelError, Provenance};

pub const DEFAULT_DEPTH_CAP: usize = 2;
pub const DEFAULT_FACT_BUDGET: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SaturationOptions {
    /// Witnesses deeper than this are not minted.
    pub depth_cap: usize,
    pub fact_budget: usize,
}

impl Default for SaturationOptions {
    fn default() -> Self {
        SaturationOptions { depth_cap: DEFAULT_DEPTH_CAP, fact_budget: DEFAULT_FACT_BUDGET }
    }
}

/// Saturate with default options, minting entities above any already used.
pub fn saturate(facts: &[Literal], kb: &KnowledgeBase, language: Language) -> Result<Model, ModelError> {
    let source = EntitySource::after(facts.iter().flat_map(|f| f.args.iter()));
    saturate_with(facts, kb, language, &SaturationOptions::default(), &source)
}

pub fn saturate_with(
    facts: &[Literal],
    kb: &KnowledgeBase,
    language: Language,
    options: &SaturationOptions,
    source: &EntitySource,
) -> Result<Model, ModelError> {
    if let Some(f) = facts.iter().find(|f| !f.is_ground()) {
        return Err(ModelError::NotGround(f.to_string()));
    }
    resaturate(Model::from_facts(facts.iter().cloned()), kb, language, options, source)
}

/// Continue saturating an existing model, reusing its witnesses and depths.
pub fn resaturate(
    mut model: Model,
    kb: &KnowledgeBase,
    language: Language,
    options: &SaturationOptions,
    source: &EntitySource,
) -> Result<Model, ModelError> {
    let lattice = kb.lattice();
    let mut partitions: HashMap<EntityId, (String, String)> = HashMap::new();
    for f in model.facts() {
        check_type(f, lattice, &mut partitions)?;
    }
    let rules: Vec<_> = kb.rules().iter().filter(|r| r.language.applies_to(language)).collect();
    loop {
        let mut changed = false;
        for rule in &rules {
            let (blocks, groups) = rule.body.blocks();
            let guard: Vec<&Literal> = blocks.iter().flat_map(|(_, g)| g.iter()).collect();
            let universals = rule.universals();
            for binding in matches(&model, &guard, lattice) {
                let binding = binding.restrict(&universals);
                let key = binding.to_string();
                if !model.fired.insert((rule.name.clone(), key.clone())) {
                    continue;
                }
                for (gi, group) in groups.iter().enumerate() {
                    let mut s = binding.clone();
                    if !group.existentials.is_empty() {
                        let skolem_key = (rule.name.clone(), gi, key.clone());
                        let witnesses = match model.skolems.get(&skolem_key) {
                            Some(w) => w.clone(),
                            None => {
                                let anchors = group.literals.iter().flat_map(|l| l.free_vars()).filter(|v| universals.contains(v));
                                let mut parent = 0;
                                for v in anchors {
                                    if let Some(t) = binding.get(&v) {
                                        t.visit_entities(&mut |e| parent = parent.max(model.depth(e).unwrap_or(0)));
                                    }
                                }
                                if parent + 1 > options.depth_cap {
                                    continue;
                                }
                                let w: Vec<EntityId> = group.existentials.iter().map(|_| source.fresh()).collect();
                                for &e in &w {
                                    model.set_depth(e, parent + 1);
                                }
                                model.skolems.insert(skolem_key, w.clone());
                                w
                            }
                        };
                        for (v, e) in group.existentials.iter().zip(witnesses) {
                            s = s.bind(v, &Term::Entity(e)).expect("existentials are fresh variables");
                        }
                    }
                    for lit in &group.literals {
                        let fact = lit.apply(&s);
                        check_type(&fact, lattice, &mut partitions)?;
                        let provenance = Provenance::Rule { rule: rule.name.clone(), bindings: binding.clone() };
                        if model.insert(fact, provenance) {
                            changed = true;
                            if model.len() > options.fact_budget {
                                return Err(ModelError::Overflow { budget: options.fact_budget });
                            }
                        }
                    }
                }
            }
        }
        if !changed {
            return Ok(model);
        }
    }
}

/// All bindings under which every guard literal holds, in fact order.
pub(crate) fn matches(model: &Model, guard: &[&Literal], lattice: &TypeLattice) -> Vec<Substitution> {
    let mut out = Vec::new();
    join(model, guard, lattice, Substitution::new(), &mut out);
    out
}

fn join(model: &Model, guard: &[&Literal], lattice: &TypeLattice, s: Substitution, out: &mut Vec<Substitution>) {
    let Some((first, rest)) = guard.split_first() else {
        out.push(s);
        return;
    };
    if first.predicate == COMPAT {
        if compat_holds(&first.apply(&s), lattice) == Some(true) {
            join(model, rest, lattice, s, out);
        }
        return;
    }
    for fact in model.with_predicate(&first.predicate) {
        if let Some(s2) = match_literal(first, fact, &s) {
            join(model, rest, lattice, s2, out);
        }
    }
}

pub(crate) fn match_literal(pattern: &Literal, fact: &Literal, s: &Substitution) -> Option<Substitution> {
    if pattern.predicate != fact.predicate || pattern.args.len() != fact.args.len() {
        return None;
    }
    pattern.args.iter().zip(&fact.args).try_fold(s.clone(), |s, (p, f)| unify(p, f, &s))
}

/// Evaluate a compat literal; `None` when its arguments are not both
/// ground type names known to the lattice.
pub fn compat_holds(l: &Literal, lattice: &TypeLattice) -> Option<bool> {
    match l.args.as_slice() {
        [Term::Const(a), Term::Const(b)] => lattice.compatible(a, b).ok(),
        _ => None,
    }
}

fn check_type(
    fact: &Literal,
    lattice: &TypeLattice,
    partitions: &mut HashMap<EntityId, (String, String)>,
) -> Result<(), ModelError> {
    if fact.predicate != "type" {
        return Ok(());
    }
    let (Some(Term::Entity(e)), Some(Term::Const(t))) = (fact.args.first(), fact.args.get(1)) else {
        return Ok(());
    };
    let root = lattice.root(t).map_err(|_| ModelError::UnknownType(t.clone()))?.to_string();
    match partitions.get(e) {
        Some((first, r)) if *r != root => {
            Err(ModelError::Inconsistent { entity: e.to_string(), first: first.clone(), second: t.clone() })
        }
        Some(_) => Ok(()),
        None => {
            partitions.insert(*e, (t.clone(), root));
            Ok(())
        }
    }
}
