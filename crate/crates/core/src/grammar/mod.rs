//! Bilingual grammar: lexicon, tokenizer and a unification chart parser.
//!
//! English and Arabic share one list of phrase-structure schemas. Everything
//! that differs between the languages (head direction of modifiers and
//! possessors, whether the copula is overt, definiteness agreement on
//! modifiers, the article clitic on ordinals) sits in a [`Constraints`]
//! table consulted by the schemas.

pub mod buckwalter;
mod chart;
pub mod lexicon;
pub mod tokenize;

use std::fmt;

use serde::Serialize;

use crate::term::{beta_reduce, BetaError, Term};
use crate::Language;

pub use buckwalter::{Buckwalter, TransliterationError};
pub use lexicon::{load_lexicon, LexCategory, LexEntry, Lexicon, LexiconError};
pub use tokenize::tokenize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Cat {
    /// N-bar: a noun with its modifiers, before determination.
    Nbar,
    Name,
    NP,
    Det,
    Poss,
    PossClitic,
    Ord,
    Cop,
    Prep,
    PP,
    Pred,
    S,
    Utt,
}

impl Cat {
    fn label(self) -> &'static str {
        match self {
            Cat::Nbar => "N'",
            Cat::Name => "Name",
            Cat::NP => "NP",
            Cat::Det => "Det",
            Cat::Poss => "Poss",
            Cat::PossClitic => "Poss+",
            Cat::Ord => "Ord",
            Cat::Cop => "Cop",
            Cat::Prep => "P",
            Cat::PP => "PP",
            Cat::Pred => "Pred",
            Cat::S => "S",
            Cat::Utt => "Utt",
        }
    }
}

impl From<LexCategory> for Cat {
    fn from(c: LexCategory) -> Cat {
        match c {
            LexCategory::Noun => Cat::Nbar,
            LexCategory::Name => Cat::Name,
            LexCategory::Cop => Cat::Cop,
            LexCategory::Prep => Cat::Prep,
            LexCategory::Det => Cat::Det,
            LexCategory::Ord => Cat::Ord,
            LexCategory::PronPoss => Cat::Poss,
            LexCategory::CliticPoss => Cat::PossClitic,
        }
    }
}

/// A category with its feature bundle. `def` is unset until something
/// marks definiteness.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Category {
    pub cat: Cat,
    pub def: Option<bool>,
}

impl Category {
    pub fn plain(cat: Cat) -> Category {
        Category { cat, def: None }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.cat.label())?;
        match self.def {
            Some(true) => f.write_str("[def=+]"),
            Some(false) => f.write_str("[def=-]"),
            None => Ok(()),
        }
    }
}

impl Serialize for Category {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Order {
    Before,
    After,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Copula {
    Required,
    Omitted,
}

/// The language-specific half of the grammar.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Constraints {
    /// Where a modifier sits relative to the noun it modifies.
    pub modifier_order: Order,
    pub possessor_order: Order,
    /// Category of the possessor: a separate word or a clitic.
    pub possessor: Cat,
    pub copula: Copula,
    /// Modifiers agree with their noun in definiteness.
    pub definiteness_agreement: bool,
    /// The article attaches to modifiers as well as nouns.
    pub article_on_modifiers: bool,
}

impl Constraints {
    pub fn for_language(language: Language) -> Constraints {
        match language {
            Language::En => Constraints {
                modifier_order: Order::Before,
                possessor_order: Order::Before,
                possessor: Cat::Poss,
                copula: Copula::Required,
                definiteness_agreement: false,
                article_on_modifiers: false,
            },
            Language::Ar => Constraints {
                modifier_order: Order::After,
                possessor_order: Order::After,
                possessor: Cat::PossClitic,
                copula: Copula::Omitted,
                definiteness_agreement: true,
                article_on_modifiers: true,
            },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Schema {
    /// Name -> NP
    Name,
    /// N' -> Ord N' | N' Ord
    Modifier,
    /// Ord[def=+] -> Det Ord
    Article,
    /// NP -> Det N'
    Specifier,
    /// NP -> Poss N' | N' Poss
    Possessor,
    /// PP -> P NP
    Complement,
    /// Pred -> Cop PP | PP
    Predicate,
    /// S -> NP Pred
    Subject,
    /// Utt -> S
    Utterance,
}

pub const SCHEMAS: [Schema; 9] = [
    Schema::Name,
    Schema::Modifier,
    Schema::Article,
    Schema::Specifier,
    Schema::Possessor,
    Schema::Complement,
    Schema::Predicate,
    Schema::Subject,
    Schema::Utterance,
];

/// Daughter of a schema application: its category and semantics.
pub(crate) type Daughter<'a> = (&'a Category, &'a Term);

fn app(f: &Term, x: &Term) -> Term {
    Term::app(f.clone(), x.clone())
}

impl Schema {
    pub fn name(self) -> &'static str {
        match self {
            Schema::Name => "name",
            Schema::Modifier => "modifier",
            Schema::Article => "article",
            Schema::Specifier => "specifier",
            Schema::Possessor => "possessor",
            Schema::Complement => "complement",
            Schema::Predicate => "predicate",
            Schema::Subject => "subject",
            Schema::Utterance => "utterance",
        }
    }

    /// Semantics are returned unreduced.
    pub(crate) fn unary(self, c: &Constraints, (cat, sem): Daughter<'_>) -> Option<(Category, Term)> {
        match (self, cat.cat) {
            (Schema::Name, Cat::Name) => Some((Category { cat: Cat::NP, def: Some(true) }, sem.clone())),
            (Schema::Predicate, Cat::PP) if c.copula == Copula::Omitted => Some((Category::plain(Cat::Pred), sem.clone())),
            (Schema::Utterance, Cat::S) => {
                Some((Category::plain(Cat::Utt), Term::compound("utt", vec![Term::constant("claim"), sem.clone()])))
            }
            _ => None,
        }
    }

    pub(crate) fn binary(self, c: &Constraints, left: Daughter<'_>, right: Daughter<'_>) -> Option<(Category, Term)> {
        let ordered = |order: Order| if order == Order::Before { (left, right) } else { (right, left) };
        let definite_ok = |n: &Category| n.def != Some(false);
        match self {
            Schema::Modifier => {
                let ((mc, ms), (hc, hs)) = ordered(c.modifier_order);
                if mc.cat != Cat::Ord || hc.cat != Cat::Nbar {
                    return None;
                }
                let def = if c.definiteness_agreement {
                    let md = mc.def.unwrap_or(false);
                    if hc.def.is_some_and(|h| h != md) {
                        return None;
                    }
                    Some(md)
                } else {
                    None
                };
                Some((Category { cat: Cat::Nbar, def }, app(ms, hs)))
            }
            Schema::Article => {
                let ((dc, _), (oc, os)) = (left, right);
                (c.article_on_modifiers && dc.cat == Cat::Det && oc.cat == Cat::Ord && oc.def.is_none())
                    .then(|| (Category { cat: Cat::Ord, def: Some(true) }, os.clone()))
            }
            Schema::Specifier => {
                let ((dc, ds), (nc, ns)) = (left, right);
                (dc.cat == Cat::Det && nc.cat == Cat::Nbar && definite_ok(nc))
                    .then(|| (Category { cat: Cat::NP, def: Some(true) }, app(ds, ns)))
            }
            Schema::Possessor => {
                let ((pc, ps), (nc, ns)) = ordered(c.possessor_order);
                (pc.cat == c.possessor && nc.cat == Cat::Nbar && definite_ok(nc))
                    .then(|| (Category { cat: Cat::NP, def: Some(true) }, app(ps, ns)))
            }
            Schema::Complement => {
                let ((pc, ps), (nc, ns)) = (left, right);
                (pc.cat == Cat::Prep && nc.cat == Cat::NP).then(|| (Category::plain(Cat::PP), app(ps, ns)))
            }
            Schema::Predicate => {
                let ((cc, cs), (pc, ps)) = (left, right);
                (c.copula == Copula::Required && cc.cat == Cat::Cop && pc.cat == Cat::PP)
                    .then(|| (Category::plain(Cat::Pred), app(cs, ps)))
            }
            Schema::Subject => {
                let ((nc, ns), (pc, ps)) = (left, right);
                (nc.cat == Cat::NP && pc.cat == Cat::Pred).then(|| (Category::plain(Cat::S), app(ps, ns)))
            }
            Schema::Name | Schema::Utterance => None,
        }
    }
}

/// One language's grammar: the shared schemas plus its constraint table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Grammar {
    pub language: Language,
    pub schemas: Vec<Schema>,
    pub constraints: Constraints,
}

impl Grammar {
    pub fn for_language(language: Language) -> Grammar {
        Grammar { language, schemas: SCHEMAS.to_vec(), constraints: Constraints::for_language(language) }
    }
}

/// A chart edge as returned to callers: a category over a token span with
/// its reduced semantics and the derivation below it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Sign {
    pub span: (usize, usize),
    pub category: Category,
    /// Schema name, or `lex` for a word.
    pub rule: String,
    pub semantics: Term,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub word: Option<String>,
    pub children: Vec<Sign>,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum GrammarError {
    #[error("'{token}' is not in the {language} vocabulary for these exercises")]
    UnknownWord { token: String, language: Language },
    #[error(transparent)]
    Transliteration(#[from] TransliterationError),
    #[error("semantic composition failed: {0}")]
    Semantics(#[from] BetaError),
}

pub(crate) fn reduce(t: Term) -> Result<Term, BetaError> {
    beta_reduce(&t)
}

/// Parse a token sequence. Every returned sign spans all tokens and has
/// category `Utt`; an empty list means the tokens are not a sentence.
pub fn parse(tokens: &[String], language: Language, lexicon: &Lexicon) -> Result<Vec<Sign>, GrammarError> {
    chart::parse(&Grammar::for_language(language), tokens, lexicon)
}

/// Tokenize then parse.
pub fn parse_text(text: &str, language: Language, lexicon: &Lexicon) -> Result<(Vec<String>, Vec<Sign>), GrammarError> {
    let tokens = tokenize(text, language, lexicon)?;
    let signs = parse(&tokens, language, lexicon)?;
    Ok((tokens, signs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::{alpha_equal, parse_term};

    fn sem(text: &str, lang: Language) -> Vec<Term> {
        parse_text(text, lang, &Lexicon::builtin()).unwrap().1.into_iter().map(|s| s.semantics).collect()
    }

    #[test]
    fn english_worked_sentence_lf() {
        let got = sem("My office is on the second floor.", Language::En);
        let want = parse_term(
            "utt(claim, on(ref(lam(E, and(own(ref(lam(F, speaker(F))), E), office(E)))), ref(lam(G, and(floor(G), second(G, lam(H, floor(H))))))))",
        )
        .unwrap();
        assert_eq!(got.len(), 1);
        assert!(alpha_equal(&got[0], &want), "{}", got[0]);
    }

    #[test]
    fn arabic_worked_sentence_lf() {
        let got = sem("mktby Ely AlTAbq AlvAny.", Language::Ar);
        let want = parse_term(
            "utt(claim, Ely(ref(lam(D, and(owner(ref(lam(E, speaker(E))), D), ktb_office(D)))), ref(lam(F, and(Tbq_floor(F), vny_second(F))))))",
        )
        .unwrap();
        assert_eq!(got.len(), 1);
        assert!(alpha_equal(&got[0], &want), "{}", got[0]);
    }

    #[test]
    fn plain_definites_and_names() {
        let want = parse_term("utt(claim, in(ref(lam(X, office(X))), ref(lam(Y, building(Y)))))").unwrap();
        assert!(alpha_equal(&sem("The office is in the building", Language::En)[0], &want));
        let want = parse_term("utt(claim, in(ref(lam(X, london(X))), ref(lam(Y, january(Y)))))").unwrap();
        assert!(alpha_equal(&sem("London is in January", Language::En)[0], &want));
    }

    #[test]
    fn ill_formed_orders_have_no_parse() {
        assert!(sem("office my is", Language::En).is_empty());
        assert!(sem("my office on the second floor", Language::En).is_empty());
        // an indefinite modifier on a definite noun fails agreement
        assert!(sem("mktby fy AlTAbq vAny", Language::Ar).is_empty());
        // English modifiers precede the noun
        assert!(sem("my office is on the floor second", Language::En).is_empty());
    }

    #[test]
    fn unknown_word_is_named() {
        let err = parse_text("my office is on the fifth floor", Language::En, &Lexicon::builtin()).unwrap_err();
        assert_eq!(err, GrammarError::UnknownWord { token: "fifth".into(), language: Language::En });
    }

    #[test]
    fn languages_differ_only_in_the_constraint_table() {
        let en = Grammar::for_language(Language::En);
        let ar = Grammar::for_language(Language::Ar);
        assert_eq!(en.schemas, ar.schemas);
        assert_ne!(en.constraints, ar.constraints);
        let en_json = serde_json::to_value(&en).unwrap();
        let ar_json = serde_json::to_value(&ar).unwrap();
        let differing: Vec<_> = en_json
            .as_object()
            .unwrap()
            .iter()
            .filter(|(k, v)| ar_json[k.as_str()] != **v)
            .map(|(k, _)| k.as_str())
            .collect();
        assert_eq!(differing, ["constraints", "language"]);
    }

    #[test]
    fn signs_tile_their_spans() {
        fn check(s: &Sign) {
            if let (Some(first), Some(last)) = (s.children.first(), s.children.last()) {
                assert_eq!(first.span.0, s.span.0);
                assert_eq!(last.span.1, s.span.1);
                for w in s.children.windows(2) {
                    assert_eq!(w[0].span.1, w[1].span.0);
                }
                s.children.iter().for_each(check);
            }
        }
        let (tokens, signs) = parse_text("mktby Ely AlTAbq AlvAny.", Language::Ar, &Lexicon::builtin()).unwrap();
        assert_eq!(signs[0].span, (0, tokens.len()));
        check(&signs[0]);
    }
}
