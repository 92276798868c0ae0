use std::fmt;

use serde::{Serialize, Serializer};

use crate::kb::{KnowledgeBase, RuleLanguage, LOCATED};
use crate::model::Model;
use crate::term::{EntityId, Literal, Term};
use crate::Language;

/// One preposition literal of a model and whether its arguments are located.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PrepositionUse {
    pub language: Language,
    #[serde(serialize_with = "as_text")]
    pub literal: Literal,
    pub located: bool,
}

fn as_text<T: fmt::Display, S: Serializer>(t: &T, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(t)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MismatchKind {
    LocatedOnlyInSource,
    LocatedOnlyInAttempt,
    NoEquivalent,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Mismatch {
    pub kind: MismatchKind,
    pub source: Option<PrepositionUse>,
    pub attempt: Option<PrepositionUse>,
}

impl Mismatch {
    /// The attempt has a preposition use that is not located.
    pub fn on_attempt_side(&self) -> bool {
        self.attempt.as_ref().is_some_and(|u| !u.located)
    }
}

/// The language whose locating rules a preposition triggers.
pub fn preposition_language(kb: &KnowledgeBase, predicate: &str) -> Option<Language> {
    kb.rules()
        .iter()
        .filter(|r| r.concludes(LOCATED))
        .find(|r| r.trigger().is_some_and(|t| t.predicate == predicate))
        .and_then(|r| match r.language {
            RuleLanguage::En => Some(Language::En),
            RuleLanguage::Ar => Some(Language::Ar),
            RuleLanguage::Both => None,
        })
}

/// Every binary preposition literal in `model`, in model order.
pub fn preposition_uses(model: &Model, kb: &KnowledgeBase) -> Vec<PrepositionUse> {
    let preps = kb.prepositions();
    model
        .facts()
        .filter(|f| f.args.len() == 2 && preps.contains(f.predicate.as_str()))
        .map(|f| {
            let located = model.contains(&Literal::new(LOCATED, f.args.clone()));
            let language = preposition_language(kb, &f.predicate).unwrap_or(Language::En);
            PrepositionUse { language, literal: f.clone(), located }
        })
        .collect()
}

/// Word predicates holding of `e`: its noun or name.
pub fn heads(model: &Model, kb: &KnowledgeBase, e: &Term) -> Vec<String> {
    let words = kb.word_predicates();
    model
        .facts()
        .filter(|f| f.args.len() == 1 && &f.args[0] == e && words.contains(f.predicate.as_str()))
        .map(|f| f.predicate.clone())
        .collect()
}

fn same_thing(kb: &KnowledgeBase, a: (&Model, &Term), b: (&Model, &Term)) -> bool {
    if a.1.as_entity() == Some(EntityId::User) || b.1.as_entity() == Some(EntityId::User) {
        return a.1 == b.1;
    }
    let ha = heads(a.0, kb, a.1);
    let hb = heads(b.0, kb, b.1);
    ha.iter().any(|x| hb.iter().any(|y| kb.equivalent(x, y)))
}

/// Pair the preposition uses of two models through the translation table
/// and report every pair whose located status differs, plus uses with no
/// counterpart.
pub fn compare_models(source: &Model, attempt: &Model, kb: &KnowledgeBase) -> Vec<Mismatch> {
    let src_uses = preposition_uses(source, kb);
    let mut att_uses: Vec<Option<PrepositionUse>> = preposition_uses(attempt, kb).into_iter().map(Some).collect();
    let mut out = Vec::new();
    for s in src_uses {
        let partner = att_uses.iter_mut().find(|a| {
            a.as_ref().is_some_and(|a| {
                same_thing(kb, (source, &s.literal.args[0]), (attempt, &a.literal.args[0]))
                    && same_thing(kb, (source, &s.literal.args[1]), (attempt, &a.literal.args[1]))
            })
        });
        match partner.and_then(Option::take) {
            Some(a) if a.located == s.located => {}
            Some(a) => {
                let kind = if s.located { MismatchKind::LocatedOnlyInSource } else { MismatchKind::LocatedOnlyInAttempt };
                out.push(Mismatch { kind, source: Some(s), attempt: Some(a) });
            }
            None => out.push(Mismatch { kind: MismatchKind::NoEquivalent, source: Some(s), attempt: None }),
        }
    }
    for a in att_uses.into_iter().flatten() {
        out.push(Mismatch { kind: MismatchKind::NoEquivalent, source: None, attempt: Some(a) });
    }
    out
}
