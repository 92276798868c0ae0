//! Logical terms: the shared representation for lexical semantics, logical
//! forms, meaning postulates and model facts.
//!
//! Terms print in a prefix canonical form (`lam` for abstraction, `app` for
//! application, `ref(lam(X, ...))` for referring terms, `#<n>` for discourse
//! entities) and [`parse_term`] reads the same form back.

mod alpha;
mod beta;
mod parse;
mod unify;

use std::collections::BTreeSet;
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};

use serde::{Deserialize, Serialize};

pub use alpha::{alpha_equal, alpha_equal_modulo_entities, EntityBijection};
pub use beta::{beta_reduce, beta_reduce_with_limit, contract_nth, count_redexes, BetaError, DEFAULT_STEP_LIMIT};
pub use parse::{parse_literal, parse_term, ParseError};
pub(crate) use parse::TermReader;
pub use unify::{unify, Substitution};

/// A discourse or Skolem entity. `User` is the distinguished speaker entity
/// rendered `#user`; every other entity is minted from an [`EntitySource`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EntityId {
    User,
    Fresh(u64),
}

impl fmt::Display for EntityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EntityId::User => f.write_str("#user"),
            EntityId::Fresh(n) => write!(f, "#{n}"),
        }
    }
}

/// Session-scoped monotone entity counter.
#[derive(Debug)]
pub struct EntitySource {
    next: AtomicU64,
}

impl EntitySource {
    pub fn new() -> Self {
        Self::starting_at(1)
    }

    pub fn starting_at(first: u64) -> Self {
        EntitySource { next: AtomicU64::new(first.max(1)) }
    }

    /// A source whose ids are all larger than any fresh entity in `terms`.
    pub fn after<'a>(terms: impl IntoIterator<Item = &'a Term>) -> Self {
        let mut max = 0;
        for t in terms {
            t.visit_entities(&mut |e| {
                if let EntityId::Fresh(n) = e {
                    max = max.max(n);
                }
            });
        }
        Self::starting_at(max + 1)
    }

    pub fn fresh(&self) -> EntityId {
        EntityId::Fresh(self.next.fetch_add(1, Ordering::Relaxed))
    }

    /// The id the next call to [`fresh`](Self::fresh) would return.
    pub fn peek(&self) -> u64 {
        self.next.load(Ordering::Relaxed)
    }
}

impl Default for EntitySource {
    fn default() -> Self {
        Self::new()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(String),
    Const(String),
    Entity(EntityId),
    Compound(String, Vec<Term>),
    Lambda(String, Box<Term>),
    App(Box<Term>, Box<Term>),
    /// `ref(λparam. body)`; the restriction is a one-parameter abstraction
    /// by construction.
    Ref(String, Box<Term>),
}

impl Term {
    pub fn var(name: impl Into<String>) -> Term {
        Term::Var(name.into())
    }

    pub fn constant(name: impl Into<String>) -> Term {
        Term::Const(name.into())
    }

    pub fn compound(functor: impl Into<String>, args: Vec<Term>) -> Term {
        Term::Compound(functor.into(), args)
    }

    pub fn lambda(param: impl Into<String>, body: Term) -> Term {
        Term::Lambda(param.into(), Box::new(body))
    }

    pub fn app(fun: Term, arg: Term) -> Term {
        Term::App(Box::new(fun), Box::new(arg))
    }

    pub fn reference(param: impl Into<String>, body: Term) -> Term {
        Term::Ref(param.into(), Box::new(body))
    }

    pub fn and(left: Term, right: Term) -> Term {
        Term::Compound("and".into(), vec![left, right])
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }

    pub fn as_entity(&self) -> Option<EntityId> {
        match self {
            Term::Entity(e) => Some(*e),
            _ => None,
        }
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(v) => {
                if !bound.iter().any(|b| b == v) {
                    out.insert(v.clone());
                }
            }
            Term::Const(_) | Term::Entity(_) => {}
            Term::Compound(_, args) => args.iter().for_each(|a| a.collect_free(bound, out)),
            Term::Lambda(p, body) | Term::Ref(p, body) => {
                bound.push(p.clone());
                body.collect_free(bound, out);
                bound.pop();
            }
            Term::App(f, a) => {
                f.collect_free(bound, out);
                a.collect_free(bound, out);
            }
        }
    }

    pub fn has_free_var(&self, name: &str) -> bool {
        match self {
            Term::Var(v) => v == name,
            Term::Const(_) | Term::Entity(_) => false,
            Term::Compound(_, args) => args.iter().any(|a| a.has_free_var(name)),
            Term::Lambda(p, body) | Term::Ref(p, body) => p != name && body.has_free_var(name),
            Term::App(f, a) => f.has_free_var(name) || a.has_free_var(name),
        }
    }

    /// Closed: no free variables (bound variables inside abstractions are fine).
    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }

    pub fn visit_entities(&self, f: &mut impl FnMut(EntityId)) {
        match self {
            Term::Entity(e) => f(*e),
            Term::Var(_) | Term::Const(_) => {}
            Term::Compound(_, args) => args.iter().for_each(|a| a.visit_entities(f)),
            Term::Lambda(_, body) | Term::Ref(_, body) => body.visit_entities(f),
            Term::App(a, b) => {
                a.visit_entities(f);
                b.visit_entities(f);
            }
        }
    }

    /// Every variable name occurring anywhere, bound or free.
    pub fn all_var_names(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::Const(_) | Term::Entity(_) => {}
            Term::Compound(_, args) => args.iter().for_each(|a| a.all_var_names(out)),
            Term::Lambda(p, body) | Term::Ref(p, body) => {
                out.insert(p.clone());
                body.all_var_names(out);
            }
            Term::App(a, b) => {
                a.all_var_names(out);
                b.all_var_names(out);
            }
        }
    }

    /// Rename entities through `f`, leaving everything else untouched.
    pub fn map_entities(&self, f: &impl Fn(EntityId) -> Term) -> Term {
        match self {
            Term::Entity(e) => f(*e),
            Term::Var(_) | Term::Const(_) => self.clone(),
            Term::Compound(n, args) => Term::Compound(n.clone(), args.iter().map(|a| a.map_entities(f)).collect()),
            Term::Lambda(p, body) => Term::Lambda(p.clone(), Box::new(body.map_entities(f))),
            Term::Ref(p, body) => Term::Ref(p.clone(), Box::new(body.map_entities(f))),
            Term::App(a, b) => Term::App(Box::new(a.map_entities(f)), Box::new(b.map_entities(f))),
        }
    }

    /// Split a right- or left-nested `and(...)` tree into its conjuncts.
    pub fn conjuncts(&self) -> Vec<&Term> {
        let mut out = Vec::new();
        fn walk<'a>(t: &'a Term, out: &mut Vec<&'a Term>) {
            match t {
                Term::Compound(f, args) if f == "and" && args.len() == 2 => {
                    walk(&args[0], out);
                    walk(&args[1], out);
                }
                _ => out.push(t),
            }
        }
        walk(self, &mut out);
        out
    }
}

fn is_plain_ident(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn write_atom(f: &mut fmt::Formatter<'_>, name: &str) -> fmt::Result {
    let first = name.chars().next();
    let needs_quote = !is_plain_ident(name) || matches!(first, Some(c) if c.is_ascii_uppercase() || c == '_');
    if needs_quote {
        write!(f, "'{}'", name.replace('\\', "\\\\").replace('\'', "\\'"))
    } else {
        f.write_str(name)
    }
}

fn write_functor(f: &mut fmt::Formatter<'_>, name: &str) -> fmt::Result {
    if is_plain_ident(name) {
        f.write_str(name)
    } else {
        write!(f, "'{}'", name.replace('\\', "\\\\").replace('\'', "\\'"))
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => f.write_str(v),
            Term::Const(c) => write_atom(f, c),
            Term::Entity(e) => write!(f, "{e}"),
            Term::Compound(name, args) => {
                write_functor(f, name)?;
                f.write_str("(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
            Term::Lambda(p, body) => write!(f, "lam({p}, {body})"),
            Term::App(a, b) => write!(f, "app({a}, {b})"),
            Term::Ref(p, body) => write!(f, "ref(lam({p}, {body}))"),
        }
    }
}

impl Serialize for Term {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Term {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        parse_term(&text).map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarity {
    Positive,
    Negative,
}

/// A predicate applied to arguments. Facts in a model are ground positive
/// literals; rule guards and abduction goals may contain variables.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    pub predicate: String,
    pub args: Vec<Term>,
    pub polarity: Polarity,
}

impl Literal {
    pub fn new(predicate: impl Into<String>, args: Vec<Term>) -> Self {
        Literal { predicate: predicate.into(), args, polarity: Polarity::Positive }
    }

    pub fn negated(mut self) -> Self {
        self.polarity = match self.polarity {
            Polarity::Positive => Polarity::Negative,
            Polarity::Negative => Polarity::Positive,
        };
        self
    }

    pub fn arity(&self) -> usize {
        self.args.len()
    }

    /// No free variables in any argument.
    pub fn is_ground(&self) -> bool {
        self.args.iter().all(Term::is_closed)
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        self.args.iter().flat_map(|a| a.free_vars()).collect()
    }

    pub fn entities(&self) -> Vec<EntityId> {
        let mut out = Vec::new();
        for a in &self.args {
            a.visit_entities(&mut |e| {
                if !out.contains(&e) {
                    out.push(e)
                }
            });
        }
        out
    }

    pub fn to_term(&self) -> Term {
        let t = Term::Compound(self.predicate.clone(), self.args.clone());
        match self.polarity {
            Polarity::Positive => t,
            Polarity::Negative => Term::Compound("not".into(), vec![t]),
        }
    }

    /// Interpret a compound (or `not(compound)`) as a literal.
    pub fn from_term(t: &Term) -> Option<Literal> {
        match t {
            Term::Compound(f, args) if f == "not" && args.len() == 1 => Literal::from_term(&args[0]).map(Literal::negated),
            Term::Compound(f, args) => Some(Literal::new(f.clone(), args.clone())),
            Term::Const(c) => Some(Literal::new(c.clone(), Vec::new())),
            _ => None,
        }
    }

    pub fn apply(&self, s: &Substitution) -> Literal {
        Literal { predicate: self.predicate.clone(), args: self.args.iter().map(|a| s.apply(a)).collect(), polarity: self.polarity }
    }

    pub fn map_entities(&self, f: &impl Fn(EntityId) -> Term) -> Literal {
        Literal { predicate: self.predicate.clone(), args: self.args.iter().map(|a| a.map_entities(f)).collect(), polarity: self.polarity }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.polarity == Polarity::Negative {
            f.write_str("not(")?;
        }
        write_functor(f, &self.predicate)?;
        if !self.args.is_empty() {
            f.write_str("(")?;
            for (i, a) in self.args.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{a}")?;
            }
            f.write_str(")")?;
        }
        if self.polarity == Polarity::Negative {
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl Serialize for Literal {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Literal {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        parse_literal(&text).map_err(serde::de::Error::custom)
    }
}

/// Pick a variable name based on `base` that is not in `avoid`.
pub(crate) fn fresh_name(base: &str, avoid: &BTreeSet<String>) -> String {
    let stem = base.trim_end_matches(|c: char| c.is_ascii_digit() || c == '_');
    let stem = if stem.is_empty() { "V" } else { stem };
    (1..).map(|i| format!("{stem}_{i}")).find(|n| !avoid.contains(n)).expect("unbounded")
}
