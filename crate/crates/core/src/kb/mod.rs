//! Meaning postulates: guarded nested-quantifier rules, the lexical world
//! (per-word postulates), lattice declarations and bilingual equivalences,
//! plus flattening into Horn clauses for backward chaining.

mod flatten;
pub(crate) mod parse;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::lattice::{LatticeError, TypeLattice};
use crate::term::{Literal, ParseError, Term};
use crate::Language;

pub use flatten::flatten;

/// The predicate every locating postulate concludes.
pub const LOCATED: &str = "located";
/// Builtin guard evaluated against the type lattice.
pub const COMPAT: &str = "compat";

/// Guard predicates of the spatial postulates; the only predicates abduction
/// may assume.
pub const ABDUCIBLES: [&str; 12] = [
    "view", "type", "dim", "interior", "surface", "bottom", "top", "embedding", "orientable", "compat", "touching", "subset",
];

pub fn is_abducible(predicate: &str) -> bool {
    ABDUCIBLES.contains(&predicate)
}

const BUILTIN_KB: &str = include_str!("../../data/builtin.kb");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RuleLanguage {
    En,
    Ar,
    Both,
}

impl RuleLanguage {
    pub fn applies_to(self, lang: Language) -> bool {
        matches!((self, lang), (RuleLanguage::Both, _) | (RuleLanguage::En, Language::En) | (RuleLanguage::Ar, Language::Ar))
    }

    fn code(self) -> &'static str {
        match self {
            RuleLanguage::En => "en",
            RuleLanguage::Ar => "ar",
            RuleLanguage::Both => "both",
        }
    }
}

impl From<Language> for RuleLanguage {
    fn from(l: Language) -> Self {
        match l {
            Language::En => RuleLanguage::En,
            Language::Ar => RuleLanguage::Ar,
        }
    }
}

impl fmt::Display for RuleLanguage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RuleKind {
    /// A postulate written out as nested `all` blocks.
    Postulate,
    /// Marked `# plumbing` in the source: support rules beyond the
    /// locating and spatial postulates.
    Plumbing,
    /// A `word` declaration: one guard over the word's predicate.
    Word,
}

/// One existentially quantified conclusion group. Witnesses for
/// `existentials` are minted together, once per guard binding.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Consequent {
    pub existentials: Vec<String>,
    pub literals: Vec<Literal>,
}

/// The variables a guard block binds, and its guard literals.
pub type Block<'a> = (&'a [String], &'a [Literal]);

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RuleNode {
    ForAll { vars: Vec<String>, guard: Vec<Literal>, child: Box<RuleNode> },
    Conclude(Vec<Consequent>),
}

impl RuleNode {
    /// Guard blocks from the outside in, and the conclusion groups at the leaf.
    pub fn blocks(&self) -> (Vec<Block<'_>>, &[Consequent]) {
        let mut blocks = Vec::new();
        let mut node = self;
        loop {
            match node {
                RuleNode::ForAll { vars, guard, child } => {
                    blocks.push((vars.as_slice(), guard.as_slice()));
                    node = child;
                }
                RuleNode::Conclude(groups) => return (blocks, groups),
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GuardedRule {
    pub name: String,
    pub language: RuleLanguage,
    pub kind: RuleKind,
    pub body: RuleNode,
}

impl GuardedRule {
    pub fn concludes(&self, predicate: &str) -> bool {
        self.body.blocks().1.iter().any(|g| g.literals.iter().any(|l| l.predicate == predicate))
    }

    /// The first literal of the outermost guard.
    pub fn trigger(&self) -> Option<&Literal> {
        self.body.blocks().0.first().and_then(|(_, g)| g.first())
    }

    /// All universally quantified variables, outermost first.
    pub fn universals(&self) -> Vec<String> {
        self.body.blocks().0.iter().flat_map(|(vs, _)| vs.iter().cloned()).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HornClause {
    pub head: Literal,
    pub body: Vec<Literal>,
    pub source_rule: String,
    pub language: RuleLanguage,
    /// Index of the conclusion group the head came from; clauses from the
    /// same rule and group share Skolem witnesses.
    pub group: usize,
    pub existential_vars: Vec<String>,
    /// Universal variables occurring in the group's conclusions; their
    /// entities determine the nesting depth of minted witnesses.
    pub anchor_vars: Vec<String>,
}

impl fmt::Display for HornClause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} <- ", self.head)?;
        for (i, l) in self.body.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum KbError {
    #[error("parse error at {0}")]
    Parse(#[from] ParseError),
    #[error("rule '{rule}': variable {var} is not bound by an enclosing 'all' or 'some'")]
    Unbound { rule: String, var: String },
    #[error("rule '{rule}': variable {var} is quantified but never constrained by its guard")]
    Unguarded { rule: String, var: String },
    #[error("predicate '{predicate}' used with arity {found} in '{rule}' but arity {expected} elsewhere")]
    Arity { predicate: String, expected: usize, found: usize, rule: String },
    #[error("rule '{rule}': {message}")]
    Malformed { rule: String, message: String },
    #[error("duplicate rule name '{0}'")]
    DuplicateRule(String),
    #[error("lattice: {0}")]
    Lattice(#[from] LatticeError),
}

#[derive(Clone, Debug)]
pub struct KnowledgeBase {
    rules: Vec<GuardedRule>,
    horn: Vec<HornClause>,
    lattice: TypeLattice,
    equivalences: Vec<(String, String)>,
    arities: BTreeMap<String, usize>,
}

impl KnowledgeBase {
    pub fn builtin() -> KnowledgeBase {
        load_kb(BUILTIN_KB).expect("builtin knowledge base is valid")
    }

    pub fn builtin_source() -> &'static str {
        BUILTIN_KB
    }

    pub(crate) fn assemble(
        rules: Vec<GuardedRule>,
        lattice: TypeLattice,
        equivalences: Vec<(String, String)>,
    ) -> Result<KnowledgeBase, KbError> {
        let mut names = BTreeSet::new();
        let mut arities = BTreeMap::new();
        for r in &rules {
            if !names.insert(r.name.clone()) {
                return Err(KbError::DuplicateRule(r.name.clone()));
            }
            validate_rule(r, &lattice, &mut arities)?;
        }
        let horn = rules.iter().flat_map(flatten).collect();
        Ok(KnowledgeBase { rules, horn, lattice, equivalences, arities })
    }

    /// Every rule in file order, word rules included.
    pub fn rules(&self) -> &[GuardedRule] {
        &self.rules
    }

    pub fn rule(&self, name: &str) -> Option<&GuardedRule> {
        self.rules.iter().find(|r| r.name == name)
    }

    /// Word postulates only.
    pub fn lexical_world(&self) -> impl Iterator<Item = &GuardedRule> {
        self.rules.iter().filter(|r| r.kind == RuleKind::Word)
    }

    pub fn horn(&self) -> &[HornClause] {
        &self.horn
    }

    pub fn horn_for(&self, lang: Language) -> impl Iterator<Item = &HornClause> {
        self.horn.iter().filter(move |c| c.language.applies_to(lang))
    }

    pub fn lattice(&self) -> &TypeLattice {
        &self.lattice
    }

    pub fn equivalences(&self) -> &[(String, String)] {
        &self.equivalences
    }

    /// Whether `a` and `b` are declared translations (in either direction).
    pub fn equivalent(&self, a: &str, b: &str) -> bool {
        a == b || self.equivalences.iter().any(|(x, y)| (x == a && y == b) || (x == b && y == a))
    }

    pub fn translations(&self, predicate: &str) -> Vec<&str> {
        self.equivalences
            .iter()
            .filter_map(|(x, y)| {
                if x == predicate {
                    Some(y.as_str())
                } else if y == predicate {
                    Some(x.as_str())
                } else {
                    None
                }
            })
            .collect()
    }

    pub fn arity(&self, predicate: &str) -> Option<usize> {
        self.arities.get(predicate).copied()
    }

    pub fn knows_predicate(&self, predicate: &str) -> bool {
        predicate == COMPAT || self.arities.contains_key(predicate)
    }

    /// Predicates that trigger a `located` conclusion, i.e. prepositions.
    pub fn prepositions(&self) -> BTreeSet<&str> {
        self.rules
            .iter()
            .filter(|r| r.concludes(LOCATED))
            .filter_map(|r| r.trigger().map(|l| l.predicate.as_str()))
            .collect()
    }

    pub fn is_preposition(&self, predicate: &str) -> bool {
        self.prepositions().contains(predicate)
    }

    /// Predicates introduced by word postulates (nouns, names).
    pub fn word_predicates(&self) -> BTreeSet<&str> {
        self.lexical_world().filter_map(|r| r.trigger().map(|l| l.predicate.as_str())).collect()
    }
}

impl fmt::Display for KnowledgeBase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        parse::write_kb(f, self)
    }
}

pub fn load_kb(source: &str) -> Result<KnowledgeBase, KbError> {
    parse::parse_kb(source)
}

fn check_arity(l: &Literal, rule: &str, arities: &mut BTreeMap<String, usize>) -> Result<(), KbError> {
    if l.predicate == COMPAT {
        if l.arity() != 2 {
            return Err(KbError::Arity { predicate: COMPAT.into(), expected: 2, found: l.arity(), rule: rule.into() });
        }
        return Ok(());
    }
    match arities.get(&l.predicate) {
        Some(&n) if n != l.arity() => {
            Err(KbError::Arity { predicate: l.predicate.clone(), expected: n, found: l.arity(), rule: rule.into() })
        }
        Some(_) => Ok(()),
        None => {
            arities.insert(l.predicate.clone(), l.arity());
            Ok(())
        }
    }
}

fn check_type_constant(l: &Literal, rule: &str, lattice: &TypeLattice) -> Result<(), KbError> {
    if l.predicate == "type" {
        if let Some(Term::Const(t)) = l.args.get(1) {
            if !lattice.contains(t) {
                return Err(KbError::Malformed { rule: rule.into(), message: format!("type '{t}' is not declared in the lattice") });
            }
        }
    }
    Ok(())
}

fn validate_rule(rule: &GuardedRule, lattice: &TypeLattice, arities: &mut BTreeMap<String, usize>) -> Result<(), KbError> {
    let name = &rule.name;
    let (blocks, groups) = rule.body.blocks();
    if blocks.is_empty() {
        return Err(KbError::Malformed { rule: name.clone(), message: "no guard block".into() });
    }
    let mut scope: Vec<String> = Vec::new();
    for (vars, guard) in &blocks {
        for v in vars.iter() {
            if scope.contains(v) {
                return Err(KbError::Malformed { rule: name.clone(), message: format!("variable {v} quantified twice") });
            }
        }
        scope.extend(vars.iter().cloned());
        // guard literals see the enclosing scope; compat needs its arguments
        // bound by an earlier literal in the same path
        let mut bound: BTreeSet<String> = scope.iter().filter(|v| !vars.contains(v)).cloned().collect();
        for l in guard.iter() {
            check_arity(l, name, arities)?;
            check_type_constant(l, name, lattice)?;
            for v in l.free_vars() {
                if !scope.contains(&v) {
                    return Err(KbError::Unbound { rule: name.clone(), var: v });
                }
            }
            if l.predicate == COMPAT {
                if let Some(v) = l.free_vars().into_iter().find(|v| !bound.contains(v)) {
                    return Err(KbError::Malformed {
                        rule: name.clone(),
                        message: format!("compat argument {v} must be bound by an earlier guard literal"),
                    });
                }
            } else {
                bound.extend(l.free_vars());
            }
        }
        for v in vars.iter() {
            if !guard.iter().any(|l| l.predicate != COMPAT && l.free_vars().contains(v)) {
                return Err(KbError::Unguarded { rule: name.clone(), var: v.clone() });
            }
        }
    }
    if groups.is_empty() {
        return Err(KbError::Malformed { rule: name.clone(), message: "no conclusion".into() });
    }
    for g in groups {
        for e in &g.existentials {
            if scope.contains(e) {
                return Err(KbError::Malformed { rule: name.clone(), message: format!("existential {e} shadows a universal") });
            }
        }
        for l in &g.literals {
            check_arity(l, name, arities)?;
            check_type_constant(l, name, lattice)?;
            if l.predicate == COMPAT {
                return Err(KbError::Malformed { rule: name.clone(), message: "compat cannot be concluded".into() });
            }
            for v in l.free_vars() {
                if !scope.contains(&v) && !g.existentials.contains(&v) {
                    return Err(KbError::Unbound { rule: name.clone(), var: v });
                }
            }
        }
    }
    if rule.concludes(LOCATED) {
        let (_, outer) = blocks[0];
        if outer.len() != 1 {
            return Err(KbError::Malformed {
                rule: name.clone(),
                message: "a locating rule's outermost guard must be exactly one preposition literal".into(),
            });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::parse_literal;

    #[test]
    fn builtin_has_the_locating_rules() {
        let kb = KnowledgeBase::builtin();
        for name in ["in_rule", "on_rule", "fy_rule", "Ely_rule", "embed_interior", "embed_topbottom", "embed_surface"] {
            assert!(kb.rule(name).is_some(), "missing {name}");
        }
        let preps: Vec<_> = kb.prepositions().into_iter().collect();
        assert_eq!(preps, ["Ely", "fy", "in", "on"]);
    }

    #[test]
    fn unbound_consequent_variable_is_a_scoping_error() {
        let src = "partition physical.\nrule bad (en): all B: [p(B)] => q(B, Z).";
        assert_eq!(load_kb(src).unwrap_err(), KbError::Unbound { rule: "bad".into(), var: "Z".into() });
    }

    #[test]
    fn unbound_guard_variable_is_a_scoping_error() {
        let src = "rule bad (en): all B: [p(B, C)] => q(B).";
        assert_eq!(load_kb(src).unwrap_err(), KbError::Unbound { rule: "bad".into(), var: "C".into() });
    }

    #[test]
    fn arity_clash_is_rejected() {
        let src = "rule a (en): all B: [p(B)] => q(B).\nrule b (en): all B C: [p(B, C)] => q(B).";
        assert!(matches!(load_kb(src).unwrap_err(), KbError::Arity { ref predicate, expected: 1, found: 2, .. } if predicate == "p"));
    }

    #[test]
    fn parse_error_carries_position() {
        let src = "partition physical.\nrule r (en): all B: [p(B)] => q(B)";
        match load_kb(src).unwrap_err() {
            KbError::Parse(e) => assert_eq!(e.line, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn word_sugar_expands_to_a_one_guard_rule() {
        let src = "partition physical.\nword floor (en): type physical, embedding2 orientable.";
        let kb = load_kb(src).unwrap();
        let rule = kb.lexical_world().next().unwrap();
        let (blocks, groups) = rule.body.blocks();
        assert_eq!(blocks.len(), 1);
        assert_eq!(blocks[0].1, [parse_literal("floor(B)").unwrap()]);
        assert_eq!(groups.len(), 2);
        assert_eq!(groups[0].existentials, Vec::<String>::new());
        assert_eq!(groups[0].literals, [parse_literal("type(B, physical)").unwrap()]);
        assert_eq!(groups[1].existentials, ["C"]);
        assert_eq!(groups[1].literals, [parse_literal("embedding(C, B, r2)").unwrap(), parse_literal("orientable(C)").unwrap()]);
    }

    #[test]
    fn undeclared_type_constant_is_rejected() {
        let src = "word floor (en): type solid.";
        assert!(matches!(load_kb(src).unwrap_err(), KbError::Malformed { .. }));
    }

    #[test]
    fn locating_rule_needs_single_trigger() {
        let src = "rule r (en): all B C: [in(B, C), p(B)] => located(B, C).";
        assert!(matches!(load_kb(src).unwrap_err(), KbError::Malformed { .. }));
    }

    #[test]
    fn equivalences_are_symmetric() {
        let kb = KnowledgeBase::builtin();
        assert!(kb.equivalent("on", "Ely"));
        assert!(kb.equivalent("Ely", "on"));
        assert!(kb.equivalent("Tbq_floor", "floor"));
        assert!(!kb.equivalent("on", "fy"));
        assert_eq!(kb.translations("own"), ["owner"]);
    }

    #[test]
    fn plumbing_rules_are_marked() {
        let kb = KnowledgeBase::builtin();
        assert_eq!(kb.rule("identity_view").unwrap().kind, RuleKind::Plumbing);
        assert_eq!(kb.rule("in_rule").unwrap().kind, RuleKind::Postulate);
        assert_eq!(kb.rule("embed_interior").unwrap().kind, RuleKind::Postulate);
    }
}
