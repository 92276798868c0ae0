//! Logical forms and anchoring of referring terms to discourse entities.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::grammar::Sign;
use crate::term::{EntityId, EntitySource, Literal, Substitution, Term};

pub const CLAIM: &str = "claim";

/// `utt(claim, body)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LogicalForm {
    pub utterance_type: String,
    pub body: Term,
}

impl LogicalForm {
    pub fn to_term(&self) -> Term {
        Term::compound("utt", vec![Term::constant(self.utterance_type.clone()), self.body.clone()])
    }

    pub fn from_term(t: &Term) -> Result<LogicalForm, LfError> {
        match t {
            Term::Compound(f, args) if f == "utt" && args.len() == 2 => match &args[0] {
                Term::Const(kind) if kind == CLAIM => Ok(LogicalForm { utterance_type: kind.clone(), body: args[1].clone() }),
                other => Err(LfError::UnsupportedUtterance(other.to_string())),
            },
            other => Err(LfError::NotAnUtterance(other.to_string())),
        }
    }
}

impl fmt::Display for LogicalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_term())
    }
}

impl Serialize for LogicalForm {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum LfError {
    #[error("not an utterance: {0}")]
    NotAnUtterance(String),
    #[error("unsupported utterance type '{0}'; only claims are handled")]
    UnsupportedUtterance(String),
    #[error("referring term restriction is not a conjunction of literals: {0}")]
    UnsupportedRestriction(String),
    #[error("anchored utterance is not a ground literal: {0}")]
    NotALiteral(String),
}

pub fn build_lf(sign: &Sign) -> Result<LogicalForm, LfError> {
    LogicalForm::from_term(&sign.semantics)
}

/// One anchored referring term.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Anchor {
    /// The ref term as it appeared, after its inner refs were anchored.
    #[serde(serialize_with = "as_text")]
    pub reference: Term,
    #[serde(serialize_with = "as_text")]
    pub entity: EntityId,
    /// The first one-place predicate of the restriction: the noun.
    pub head: Option<String>,
}

fn as_text<T: fmt::Display, S: Serializer>(t: &T, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(t)
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct AnchoredForm {
    pub facts: Vec<Literal>,
    pub anchors: Vec<Anchor>,
}

impl AnchoredForm {
    pub fn head_of(&self, entity: EntityId) -> Option<&str> {
        self.anchors.iter().find(|a| a.entity == entity).and_then(|a| a.head.as_deref())
    }

    fn push_fact(&mut self, l: Literal) {
        if !self.facts.contains(&l) {
            self.facts.push(l);
        }
    }
}

fn is_speaker(param: &str, body: &Term) -> bool {
    matches!(body, Term::Compound(f, args) if f == "speaker" && args.len() == 1 && args[0] == Term::var(param))
}

fn anchor_term(t: &Term, source: &EntitySource, out: &mut AnchoredForm) -> Result<Term, LfError> {
    match t {
        Term::Ref(param, body) => {
            let body = anchor_term(body, source, out)?;
            let reference = Term::Ref(param.clone(), Box::new(body.clone()));
            if is_speaker(param, &body) {
                out.push_fact(Literal::new("type", vec![Term::Entity(EntityId::User), Term::constant("human")]));
                out.anchors.push(Anchor { reference, entity: EntityId::User, head: Some("speaker".into()) });
                return Ok(Term::Entity(EntityId::User));
            }
            let entity = source.fresh();
            let s = Substitution::new().bind(param, &Term::Entity(entity)).expect("entity binding never fails");
            let restriction = s.apply(&body);
            let mut head = None;
            for c in restriction.conjuncts() {
                let lit = Literal::from_term(c)
                    .filter(|l| l.is_ground() && !l.args.is_empty())
                    .ok_or_else(|| LfError::UnsupportedRestriction(restriction.to_string()))?;
                if head.is_none() && lit.args == [Term::Entity(entity)] {
                    head = Some(lit.predicate.clone());
                }
                out.push_fact(lit);
            }
            out.anchors.push(Anchor { reference, entity, head });
            Ok(Term::Entity(entity))
        }
        Term::Compound(f, args) => {
            let args = args.iter().map(|a| anchor_term(a, source, out)).collect::<Result<_, _>>()?;
            Ok(Term::Compound(f.clone(), args))
        }
        Term::Lambda(p, b) => Ok(Term::Lambda(p.clone(), Box::new(anchor_term(b, source, out)?))),
        Term::App(a, b) => Ok(Term::app(anchor_term(a, source, out)?, anchor_term(b, source, out)?)),
        Term::Var(_) | Term::Const(_) | Term::Entity(_) => Ok(t.clone()),
    }
}

/// Replace every ref term, innermost first, by a fresh entity (or `#user`
/// for the speaker) and collect the restrictions and the main relation as
/// ground facts.
pub fn anchor(lf: &LogicalForm, source: &EntitySource) -> Result<AnchoredForm, LfError> {
    if lf.utterance_type != CLAIM {
        return Err(LfError::UnsupportedUtterance(lf.utterance_type.clone()));
    }
    let mut out = AnchoredForm::default();
    let body = anchor_term(&lf.body, source, &mut out)?;
    for c in body.conjuncts() {
        let lit = Literal::from_term(c).filter(Literal::is_ground).ok_or_else(|| LfError::NotALiteral(body.to_string()))?;
        out.push_fact(lit);
    }
    Ok(out)
}
