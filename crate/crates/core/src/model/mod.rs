//! Herbrand models built by forward saturation of anchored facts under the
//! KB's guarded rules.

mod iso;
mod saturate;

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;

use indexmap::IndexMap;
use serde::{Serialize, Serializer};

use crate::term::{EntityId, Literal, Substitution, Term};

pub use iso::{embed, isomorphism};
pub use saturate::{compat_holds, resaturate, saturate, saturate_with, SaturationOptions, DEFAULT_DEPTH_CAP, DEFAULT_FACT_BUDGET};

/// Where a fact came from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Provenance {
    Anchored,
    Rule { rule: String, bindings: Substitution },
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("saturation exceeded the budget of {budget} facts")]
    Overflow { budget: usize },
    #[error("{entity} has types {first} and {second} from different partitions")]
    Inconsistent { entity: String, first: String, second: String },
    #[error("unknown type '{0}'")]
    UnknownType(String),
    #[error("fact is not ground: {0}")]
    NotGround(String),
}

/// A finite set of ground positive literals, kept in insertion order, with
/// the provenance of each fact and the nesting depth of each entity.
#[derive(Clone, Debug, Default)]
pub struct Model {
    facts: IndexMap<Literal, Provenance>,
    by_predicate: HashMap<String, Vec<usize>>,
    depth: BTreeMap<EntityId, usize>,
    /// Witnesses minted per (rule, conclusion group, universal binding).
    pub(crate) skolems: HashMap<(String, usize, String), Vec<EntityId>>,
    /// (rule, universal binding) pairs that have fired.
    pub(crate) fired: HashSet<(String, String)>,
}

impl Model {
    pub fn new() -> Model {
        Model::default()
    }

    /// A model holding exactly `facts`, all anchored at depth 0.
    pub fn from_facts(facts: impl IntoIterator<Item = Literal>) -> Model {
        let mut m = Model::new();
        for f in facts {
            for e in f.entities() {
                m.depth.entry(e).or_insert(0);
            }
            m.insert(f, Provenance::Anchored);
        }
        m
    }

    /// Returns whether the fact was new.
    pub(crate) fn insert(&mut self, fact: Literal, provenance: Provenance) -> bool {
        if self.facts.contains_key(&fact) {
            return false;
        }
        self.by_predicate.entry(fact.predicate.clone()).or_default().push(self.facts.len());
        self.facts.insert(fact, provenance);
        true
    }

    pub(crate) fn set_depth(&mut self, e: EntityId, depth: usize) {
        self.depth.insert(e, depth);
    }

    pub fn len(&self) -> usize {
        self.facts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.facts.is_empty()
    }

    pub fn contains(&self, fact: &Literal) -> bool {
        self.facts.contains_key(fact)
    }

    /// Facts in insertion order.
    pub fn facts(&self) -> impl Iterator<Item = &Literal> {
        self.facts.keys()
    }

    pub fn with_predicate<'a>(&'a self, predicate: &str) -> impl Iterator<Item = &'a Literal> + 'a {
        self.by_predicate
            .get(predicate)
            .into_iter()
            .flatten()
            .map(move |&i| self.facts.get_index(i).expect("index in range").0)
    }

    pub fn provenance(&self, fact: &Literal) -> Option<&Provenance> {
        self.facts.get(fact)
    }

    pub fn depth(&self, e: EntityId) -> Option<usize> {
        self.depth.get(&e).copied()
    }

    pub fn entities(&self) -> BTreeSet<EntityId> {
        self.facts.keys().flat_map(Literal::entities).collect()
    }

    /// Largest fresh entity id in the model.
    pub fn max_entity(&self) -> u64 {
        self.entities()
            .into_iter()
            .filter_map(|e| match e {
                EntityId::Fresh(n) => Some(n),
                EntityId::User => None,
            })
            .max()
            .unwrap_or(0)
    }

    /// Canonical form: one literal per entry, sorted.
    pub fn sorted(&self) -> Vec<String> {
        let mut v: Vec<String> = self.facts.keys().map(ToString::to_string).collect();
        v.sort();
        v
    }

    /// Every `type(e, T)` fact about `e`.
    pub fn types_of(&self, e: EntityId) -> Vec<&str> {
        self.with_predicate("type")
            .filter(|l| l.args.len() == 2 && l.args[0] == Term::Entity(e))
            .filter_map(|l| match &l.args[1] {
                Term::Const(t) => Some(t.as_str()),
                _ => None,
            })
            .collect()
    }
}

impl PartialEq for Model {
    fn eq(&self, other: &Model) -> bool {
        self.len() == other.len() && self.facts().all(|f| other.contains(f))
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for line in self.sorted() {
            writeln!(f, "{line}")?;
        }
        Ok(())
    }
}

impl Serialize for Model {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.sorted().serialize(s)
    }
}

/// Read the one-literal-per-line golden format. Blank lines and lines
/// starting with `%` are skipped.
pub fn parse_facts(text: &str) -> Result<Vec<Literal>, crate::term::ParseError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('%'))
        .map(|(i, l)| {
            crate::term::parse_literal(l.trim()).map_err(|mut e| {
                e.line = i + 1;
                e
            })
        })
        .collect()
}
