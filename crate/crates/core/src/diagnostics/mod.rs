//! Learner feedback: find preposition uses that fail to locate, explain
//! them with the cheapest abductive proof, render canned messages, and
//! answer "why?" questions about the missing properties.

mod compare;
pub mod templates;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize, Serializer};

use crate::abduction::{abduce, AbductionError, AbductionOptions, AbductionResult};
use crate::exercise::{Bank, BankError, Exercise};
use crate::grammar::{tokenize, Buckwalter, LexCategory, LexEntry, Lexicon};
use crate::kb::{KnowledgeBase, LOCATED};
use crate::pipeline::{analyze, Analysis, PipelineError};
use crate::session::Session;
use crate::term::{EntityId, Literal, Term};
use crate::Language;

pub use compare::{compare_models, heads, preposition_language, preposition_uses, Mismatch, MismatchKind, PrepositionUse};
pub use templates::{TemplateError, Templates};

pub const DEFAULT_WHY_DEPTH: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Accepted,
    Rejected,
    NoParse,
    UnknownWord,
}

impl Verdict {
    pub fn is_learner_error(self) -> bool {
        matches!(self, Verdict::NoParse | Verdict::UnknownWord)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Accepted => "accepted",
            Verdict::Rejected => "rejected",
            Verdict::NoParse => "no_parse",
            Verdict::UnknownWord => "unknown_word",
        })
    }
}

/// A token of the attempt in both writing systems.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Word {
    pub buckwalter: String,
    pub script: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Diagnosis {
    pub id: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub parent: Option<String>,
    pub verdict: Verdict,
    pub language: Language,
    pub preposition_pairs: Vec<PrepositionUse>,
    pub message: String,
    pub template: String,
    #[serde(serialize_with = "literals_as_text")]
    pub missing: Vec<Literal>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub token: Option<String>,
    pub words: Vec<Word>,
    pub depth: usize,
    /// Drill-downs already asked for, keyed by missing literal.
    pub children: BTreeMap<String, Diagnosis>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub trace: Vec<String>,
}

fn literals_as_text<S: Serializer>(lits: &[Literal], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(lits.iter().map(ToString::to_string))
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum DiagnosisError {
    #[error("unknown diagnosis '{0}'")]
    UnknownDiagnosis(String),
    #[error("{literal} is not a missing literal of diagnosis {id}")]
    NotMissing { id: String, literal: String },
    #[error("exercise '{id}' is unusable: {message}")]
    Exercise { id: String, message: String },
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
    #[error(transparent)]
    Abduction(#[from] AbductionError),
    #[error(transparent)]
    Template(#[from] TemplateError),
}

/// What a diagnosis was computed from, kept for drill-downs and
/// comparisons.
#[derive(Debug)]
pub struct Context {
    source_text: Option<String>,
    source: Option<Analysis>,
    text: String,
    attempt: Analysis,
    learner_prep: Option<String>,
    target: Option<Literal>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ModelView {
    pub language: Language,
    pub text: String,
    pub facts: Vec<String>,
}

/// Side-by-side view of the exercise sentence and the attempt.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Comparison {
    pub diagnosis_id: String,
    pub source: Option<ModelView>,
    pub attempt: Option<ModelView>,
    pub uses: Vec<PrepositionUse>,
    pub mismatches: Vec<Mismatch>,
}

#[derive(Clone, Debug)]
pub struct Diagnostician {
    kb: KnowledgeBase,
    lexicon: Lexicon,
    templates: Templates,
    pub abduction: AbductionOptions,
    pub why_depth: usize,
}

impl Diagnostician {
    pub fn new(kb: KnowledgeBase, lexicon: Lexicon, templates: Templates) -> Diagnostician {
        Diagnostician { kb, lexicon, templates, abduction: AbductionOptions::default(), why_depth: DEFAULT_WHY_DEPTH }
    }

    pub fn builtin() -> Diagnostician {
        Diagnostician::new(KnowledgeBase::builtin(), Lexicon::builtin(), Templates::builtin().clone())
    }

    pub fn kb(&self) -> &KnowledgeBase {
        &self.kb
    }

    pub fn lexicon(&self) -> &Lexicon {
        &self.lexicon
    }

    pub fn templates(&self) -> &Templates {
        &self.templates
    }

    /// Diagnose a translation of `exercise`'s sentence.
    pub fn diagnose(&self, session: &Session, exercise: &Exercise, text: &str, trace: bool) -> Result<Diagnosis, DiagnosisError> {
        let _writer = session.serialize_writes();
        let source = analyze(&exercise.source_text, exercise.source_language, &self.kb, &self.lexicon, session.entities())
            .map_err(|e| DiagnosisError::Exercise { id: exercise.id.clone(), message: e.to_string() })?;
        let d = self.diagnose_inner(session, Some((exercise.source_text.clone(), source)), exercise.target_language(), text, trace)?;
        session.record(&exercise.id, text, d.verdict);
        Ok(d)
    }

    /// Diagnose a free-standing sentence, with no exercise to compare to.
    pub fn diagnose_text(&self, session: &Session, language: Language, text: &str, trace: bool) -> Result<Diagnosis, DiagnosisError> {
        let _writer = session.serialize_writes();
        self.diagnose_inner(session, None, language, text, trace)
    }

    fn diagnose_inner(
        &self,
        session: &Session,
        source: Option<(String, Analysis)>,
        language: Language,
        text: &str,
        trace: bool,
    ) -> Result<Diagnosis, DiagnosisError> {
        let id = session.fresh_diagnosis_id();
        let words = self.words(text, language);
        let mut d = Diagnosis {
            id,
            parent: None,
            verdict: Verdict::Rejected,
            language,
            preposition_pairs: Vec::new(),
            message: String::new(),
            template: String::new(),
            missing: Vec::new(),
            token: None,
            words,
            depth: 0,
            children: BTreeMap::new(),
            trace: Vec::new(),
        };
        let attempt = match analyze(text, language, &self.kb, &self.lexicon, session.entities()) {
            Ok(a) => a,
            Err(PipelineError::UnknownWord { token, .. }) => {
                d.verdict = Verdict::UnknownWord;
                d.template = "unknown_word".into();
                d.message = self.templates.render("unknown_word", &BTreeMap::from([("token", token.clone())]))?;
                d.token = Some(token);
                session.store(d.clone(), None);
                return Ok(d);
            }
            Err(PipelineError::NoParse { .. }) => {
                d.verdict = Verdict::NoParse;
                d.template = "no_parse".into();
                d.message = self.templates.render("no_parse", &BTreeMap::new())?;
                session.store(d.clone(), None);
                return Ok(d);
            }
            Err(e) => return Err(e.into()),
        };

        let uses = preposition_uses(&attempt.model, &self.kb);
        if let Some((_, s)) = &source {
            d.preposition_pairs.extend(preposition_uses(&s.model, &self.kb));
        }
        d.preposition_pairs.extend(uses.iter().cloned());
        let failing = uses.iter().find(|u| !u.located).or(uses.first());
        let (source_text, source) = source.map_or((None, None), |(t, a)| (Some(t), Some(a)));
        let ctx = Arc::new(Context {
            source_text,
            source,
            text: text.to_string(),
            learner_prep: failing.map(|u| u.literal.predicate.clone()),
            target: failing.map(|u| Literal::new(LOCATED, u.literal.args.clone())),
            attempt,
        });

        if uses.iter().all(|u| u.located) {
            d.verdict = Verdict::Accepted;
            d.template = "accepted".into();
            d.message = self.templates.render("accepted", &self.slots(&ctx, &[], None))?;
            session.store(d.clone(), Some(ctx));
            return Ok(d);
        }

        let target = ctx.target.clone().expect("a failing use exists");
        let abduction = abduce(&target, &ctx.attempt.model, &self.kb, language, &self.abduction)?;
        let learner_prep = ctx.learner_prep.as_deref();
        let chosen = abduction
            .results
            .iter()
            .find(|r| r.clause.as_deref().and_then(|c| self.kb.rule(c)).and_then(|r| r.trigger()).map(|t| t.predicate.as_str()) == learner_prep)
            .or(abduction.results.first());
        match chosen {
            Some(r) if !r.missing.is_empty() => {
                d.template = self.specialized(&format!("missing_{}", r.missing[0].predicate), &r.missing[0]);
                d.missing = r.missing.clone();
                d.message = self.templates.render(&d.template, &self.slots(&ctx, &r.missing, None))?;
                if trace {
                    d.trace = trace_lines(r);
                }
            }
            _ => match abduction.blockers.first() {
                Some(b) => {
                    d.template = "blocked_compat".into();
                    let mut slots = self.slots(&ctx, &[], None);
                    if let [Term::Const(a), Term::Const(b)] = b.literal.args.as_slice() {
                        slots.insert("figure_type", a.clone());
                        slots.insert("ground_type", b.clone());
                    }
                    d.message = self.templates.render("blocked_compat", &slots)?;
                    if trace {
                        d.trace = abduction.blockers.iter().map(|b| format!("{} blocked in {}", b.literal, b.clause)).collect();
                    }
                }
                None => {
                    d.template = "unexplained".into();
                    d.message = self.templates.render("unexplained", &self.slots(&ctx, &[], None))?;
                }
            },
        }
        session.store(d.clone(), Some(ctx));
        Ok(d)
    }

    /// Explain one missing literal of an earlier diagnosis by abducing it
    /// in turn.
    pub fn why(&self, session: &Session, id: &str, literal: &Literal, trace: bool) -> Result<Diagnosis, DiagnosisError> {
        let _writer = session.serialize_writes();
        let stored = session.stored(id).ok_or_else(|| DiagnosisError::UnknownDiagnosis(id.to_string()))?;
        let parent = stored.diagnosis;
        let key = literal.to_string();
        let not_missing = || DiagnosisError::NotMissing { id: id.to_string(), literal: key.clone() };
        if !parent.missing.iter().any(|m| m.to_string() == key) {
            return Err(not_missing());
        }
        if let Some(existing) = parent.children.get(&key) {
            return Ok(existing.clone());
        }
        let ctx = stored.context.ok_or_else(not_missing)?;
        let mut child = Diagnosis {
            id: session.fresh_diagnosis_id(),
            parent: Some(parent.id.clone()),
            verdict: Verdict::Rejected,
            language: parent.language,
            preposition_pairs: parent.preposition_pairs.clone(),
            message: String::new(),
            template: String::new(),
            missing: Vec::new(),
            token: None,
            words: parent.words.clone(),
            depth: parent.depth + 1,
            children: BTreeMap::new(),
            trace: Vec::new(),
        };
        let about = std::slice::from_ref(literal);
        if child.depth > self.why_depth {
            child.template = "depth_limit".into();
            child.message = self.templates.render("depth_limit", &self.slots(&ctx, about, None))?;
        } else {
            let abduction = abduce(literal, &ctx.attempt.model, &self.kb, ctx.attempt.language, &self.abduction)?;
            match abduction.results.iter().find(|r| !r.missing.is_empty()) {
                Some(r) => {
                    child.template = self.specialized(&format!("why_{}", r.missing[0].predicate), &r.missing[0]);
                    child.missing = r.missing.clone();
                    let subject = self.subject(&ctx, &r.missing).or_else(|| self.subject(&ctx, about));
                    child.message = self.templates.render(&child.template, &self.slots(&ctx, &r.missing, subject))?;
                    if trace {
                        child.trace = trace_lines(r);
                    }
                }
                None => {
                    child.template = "no_explanation".into();
                    child.message = self.templates.render("no_explanation", &self.slots(&ctx, about, None))?;
                }
            }
        }
        session.store(child.clone(), Some(ctx));
        session.attach_child(&parent.id, &key, &child);
        Ok(child)
    }

    /// The exercise sentence's model next to the attempt's, with the
    /// preposition uses paired across languages.
    pub fn compare(&self, session: &Session, id: &str) -> Result<Comparison, DiagnosisError> {
        let stored = session.stored(id).ok_or_else(|| DiagnosisError::UnknownDiagnosis(id.to_string()))?;
        let Some(ctx) = stored.context else {
            return Ok(Comparison { diagnosis_id: id.to_string(), source: None, attempt: None, uses: Vec::new(), mismatches: Vec::new() });
        };
        let view = |a: &Analysis, text: &str| ModelView { language: a.language, text: text.to_string(), facts: a.model.sorted() };
        let mut uses = Vec::new();
        let mut mismatches = Vec::new();
        if let Some(src) = &ctx.source {
            uses.extend(preposition_uses(&src.model, &self.kb));
            mismatches = compare_models(&src.model, &ctx.attempt.model, &self.kb);
        }
        uses.extend(preposition_uses(&ctx.attempt.model, &self.kb));
        Ok(Comparison {
            diagnosis_id: id.to_string(),
            source: ctx.source.as_ref().zip(ctx.source_text.as_deref()).map(|(a, t)| view(a, t)),
            attempt: Some(view(&ctx.attempt, &ctx.text)),
            uses,
            mismatches,
        })
    }

    /// Check that every exercise's sentence parses, every reference
    /// translation is accepted and every documented wrong attempt is
    /// rejected.
    pub fn validate_bank(&self, bank: &Bank) -> Result<(), BankError> {
        for ex in bank.exercises() {
            let session = Session::new(format!("validate-{}", ex.id));
            let invalid = |message: String| BankError::Invalid { id: ex.id.clone(), message };
            for text in &ex.reference_translations {
                let d = self.diagnose(&session, ex, text, false).map_err(|e| invalid(e.to_string()))?;
                if d.verdict != Verdict::Accepted {
                    return Err(invalid(format!("reference translation '{text}' is {}: {}", d.verdict, d.message)));
                }
            }
            for text in &ex.wrong_attempts {
                let d = self.diagnose(&session, ex, text, false).map_err(|e| invalid(e.to_string()))?;
                if d.verdict != Verdict::Rejected {
                    return Err(invalid(format!("wrong attempt '{text}' is {}", d.verdict)));
                }
            }
        }
        Ok(())
    }

    /// `base_<c>` when the literal's last argument is a constant `c` and
    /// such a template exists, else `base`.
    fn specialized(&self, base: &str, lit: &Literal) -> String {
        if let Some(Term::Const(c)) = lit.args.last() {
            let key = format!("{base}_{c}");
            if self.templates.get(&key).is_some() {
                return key;
            }
        }
        base.to_string()
    }

    fn words(&self, text: &str, language: Language) -> Vec<Word> {
        let Ok(tokens) = tokenize(text, language, &self.lexicon) else { return Vec::new() };
        tokens
            .into_iter()
            .map(|t| {
                let script = match language {
                    Language::En => t.clone(),
                    Language::Ar => match self.lexicon.lookup(language, &t).next() {
                        Some(e) => e.written(),
                        None => Buckwalter::builtin().to_script(t.trim_matches('+')),
                    },
                };
                Word { buckwalter: t, script }
            })
            .collect()
    }

    fn display(&self, entry: &LexEntry) -> String {
        match entry.language {
            Language::Ar => format!("{} ({})", entry.written(), entry.surface),
            Language::En if entry.category == LexCategory::Name => {
                let mut c = entry.surface.chars();
                c.next().map(|f| f.to_uppercase().chain(c).collect()).unwrap_or_default()
            }
            Language::En => entry.surface.clone(),
        }
    }

    /// `predicate` as a word of `language`, translating if needed.
    fn word_for(&self, language: Language, predicate: &str) -> Option<String> {
        std::iter::once(predicate)
            .chain(self.kb.translations(predicate))
            .find_map(|p| self.lexicon.by_predicate(language, p))
            .map(|e| self.display(e))
    }

    fn head(&self, analysis: &Analysis, e: EntityId) -> Option<String> {
        analysis
            .anchored
            .head_of(e)
            .map(str::to_string)
            .or_else(|| heads(&analysis.model, &self.kb, &Term::Entity(e)).into_iter().next())
    }

    fn entity_word(&self, analysis: &Analysis, t: &Term, language: Language) -> Option<String> {
        let e = t.as_entity()?;
        if e == EntityId::User {
            return Some("you".into());
        }
        self.word_for(language, &self.head(analysis, e)?)
    }

    /// First entity of `lits` that a noun names.
    fn subject(&self, ctx: &Context, lits: &[Literal]) -> Option<EntityId> {
        lits.iter().flat_map(Literal::entities).find(|&e| e != EntityId::User && self.head(&ctx.attempt, e).is_some())
    }

    fn source_language(&self, ctx: &Context) -> Language {
        ctx.source.as_ref().map(|s| s.language).unwrap_or(match ctx.attempt.language {
            Language::En => Language::Ar,
            Language::Ar => Language::En,
        })
    }

    fn slots(&self, ctx: &Context, missing: &[Literal], subject: Option<EntityId>) -> BTreeMap<&'static str, String> {
        let lang = ctx.attempt.language;
        let source_lang = self.source_language(ctx);
        let mut slots = BTreeMap::new();
        if let Some(p) = &ctx.learner_prep {
            slots.extend(self.word_for(lang, p).map(|w| ("learner_prep", w)));
        }
        let source_prep = ctx
            .source
            .as_ref()
            .and_then(|s| preposition_uses(&s.model, &self.kb).into_iter().next())
            .map(|u| u.literal.predicate)
            .or_else(|| ctx.learner_prep.clone());
        if let Some(p) = source_prep {
            slots.extend(self.word_for(source_lang, &p).map(|w| ("source_prep", w)));
        }
        if let Some(target) = &ctx.target {
            slots.extend(self.entity_word(&ctx.attempt, &target.args[0], lang).map(|w| ("figure", w)));
            slots.extend(self.entity_word(&ctx.attempt, &target.args[1], lang).map(|w| ("ground", w)));
        }
        let subject = subject
            .or_else(|| self.subject(ctx, missing))
            .or_else(|| ctx.target.as_ref().and_then(|t| t.args[1].as_entity()));
        if let Some(e) = subject {
            let t = Term::Entity(e);
            slots.extend(self.entity_word(&ctx.attempt, &t, lang).map(|w| ("subject", w)));
            slots.extend(self.entity_word(&ctx.attempt, &t, source_lang).map(|w| ("subject_source", w)));
            let dims = ctx.attempt.model.with_predicate("dim").filter(|f| f.args.first() == Some(&t)).filter_map(|f| dimension_words(&f.args[1])).next();
            slots.extend(dims.map(|w| ("actual_dimension", w)));
        }
        if let Some(first) = missing.first() {
            let value = match first.predicate.as_str() {
                "dim" => first.args.get(1),
                "embedding" => first.args.get(2),
                _ => None,
            };
            slots.extend(value.and_then(dimension_words).map(|w| ("dimension", w)));
        }
        slots
    }
}

fn dimension_words(t: &Term) -> Option<String> {
    let s = match t {
        Term::Const(c) => c.as_str(),
        _ => return None,
    };
    Some(
        match s {
            "1" | "r1" => "one-dimensional",
            "2" | "r2" => "two-dimensional",
            "3" | "r3" => "three-dimensional",
            _ => return None,
        }
        .to_string(),
    )
}

fn trace_lines(r: &AbductionResult) -> Vec<String> {
    r.trace.iter().map(|s| format!("{} <= {}", s.goal, s.via)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::parse_literal;

    const ELY_MESSAGE: &str = "You tried to use على (Ely) as the translation of 'on', but it doesn't work in this case because although طابق (TAbq) is the correct translation of 'floor', طابق (TAbq) does not have a surface";

    fn office_floor() -> Exercise {
        Bank::builtin().get("ex-office-floor").unwrap().clone()
    }

    #[test]
    fn ely_attempt_gets_the_surface_message() {
        let dx = Diagnostician::builtin();
        let s = Session::new("t");
        let d = dx.diagnose(&s, &office_floor(), "mktby Ely AlTAbq AlvAny.", false).unwrap();
        assert_eq!(d.verdict, Verdict::Rejected);
        assert_eq!(d.message, ELY_MESSAGE);
        assert_eq!(d.missing.len(), 1);
        assert_eq!(d.missing[0].predicate, "surface");
    }

    #[test]
    fn fy_attempt_is_accepted() {
        let dx = Diagnostician::builtin();
        let d = dx.diagnose(&Session::new("t"), &office_floor(), "mktby fy AlTAbq AlvAny.", false).unwrap();
        assert_eq!(d.verdict, Verdict::Accepted, "{}", d.message);
        assert!(d.missing.is_empty());
    }

    #[test]
    fn unknown_word_is_named() {
        let dx = Diagnostician::builtin();
        let d = dx.diagnose(&Session::new("t"), &office_floor(), "mktby Ely AlTAbq Alxms.", false).unwrap();
        assert_eq!(d.verdict, Verdict::UnknownWord);
        assert_eq!(d.token.as_deref(), Some("Alxms"));
        assert!(d.message.contains("Alxms"));
    }

    #[test]
    fn why_surface_explains_the_container() {
        let dx = Diagnostician::builtin();
        let s = Session::new("t");
        let d = dx.diagnose(&s, &office_floor(), "mktby Ely AlTAbq AlvAny.", false).unwrap();
        let child = dx.why(&s, &d.id, &d.missing[0], false).unwrap();
        let missing: Vec<String> = child.missing.iter().map(ToString::to_string).collect();
        assert_eq!(missing.len(), 2);
        assert!(missing[0].starts_with("embedding(B, #") && missing[0].ends_with(", r2)"), "{missing:?}");
        assert_eq!(missing[1], "orientable(B)");
        assert!(child.message.contains("طابق (TAbq)") && child.message.contains("three-dimensional container"), "{}", child.message);
        assert_eq!(s.diagnosis(&d.id).unwrap().children.len(), 1);
    }

    #[test]
    fn why_needs_a_missing_literal_and_a_known_id() {
        let dx = Diagnostician::builtin();
        let s = Session::new("t");
        let d = dx.diagnose(&s, &office_floor(), "mktby Ely AlTAbq AlvAny.", false).unwrap();
        let other = parse_literal("top(#1, B)").unwrap();
        assert!(matches!(dx.why(&s, &d.id, &other, false), Err(DiagnosisError::NotMissing { .. })));
        assert!(matches!(dx.why(&s, "d999", &d.missing[0], false), Err(DiagnosisError::UnknownDiagnosis(_))));
    }

    #[test]
    fn drill_down_stops_at_the_cap() {
        let mut dx = Diagnostician::builtin();
        dx.why_depth = 0;
        let s = Session::new("t");
        let d = dx.diagnose(&s, &office_floor(), "mktby Ely AlTAbq AlvAny.", false).unwrap();
        let child = dx.why(&s, &d.id, &d.missing[0], false).unwrap();
        assert_eq!(child.template, "depth_limit");
        assert!(child.missing.is_empty());
    }

    #[test]
    fn cross_partition_is_blocked() {
        let dx = Diagnostician::builtin();
        let d = dx.diagnose_text(&Session::new("t"), Language::En, "London is in January.", true).unwrap();
        assert_eq!(d.verdict, Verdict::Rejected);
        assert_eq!(d.template, "blocked_compat");
        assert!(d.message.contains("physical") && d.message.contains("temporal"), "{}", d.message);
    }

    #[test]
    fn comparison_pairs_the_two_prepositions() {
        let dx = Diagnostician::builtin();
        let s = Session::new("t");
        let d = dx.diagnose(&s, &office_floor(), "mktby Ely AlTAbq AlvAny.", false).unwrap();
        let c = dx.compare(&s, &d.id).unwrap();
        assert_eq!(c.mismatches.len(), 1);
        assert_eq!(c.mismatches[0].kind, MismatchKind::LocatedOnlyInSource);
        assert!(c.source.unwrap().facts.iter().any(|f| f.starts_with("located(")));
    }

    #[test]
    fn words_echo_both_scripts() {
        let dx = Diagnostician::builtin();
        let d = dx.diagnose(&Session::new("t"), &office_floor(), "مكتبي على الطابق الثاني", false).unwrap();
        assert_eq!(d.message, ELY_MESSAGE);
        assert!(d.words.iter().any(|w| w.buckwalter == "Ely" && w.script == "على"));
    }
}
