//! Bilingual lexicon. One entry per line:
//!
//! ```text
//! lex office (en) noun root=office sem=lam(X, office(X)).
//! lex Ely (ar) prep root=Ely script=على sem=lam(Y, lam(X, Ely(X, Y))).
//! ```
//!
//! Fields between the category and `sem=` are `key=value` pairs; `root` is
//! required for Arabic and defaults to the surface form for English,
//! `script` overrides the transliterated script form, and anything else is
//! kept as a feature.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::kb::parse::strip_comments;
use crate::term::{ParseError, Term, TermReader};
use crate::Language;

use super::buckwalter::Buckwalter;

const BUILTIN_LEXICON: &str = include_str!("../../data/builtin.lex");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LexCategory {
    Noun,
    Name,
    #[serde(rename = "verb-cop")]
    Cop,
    Prep,
    Det,
    Ord,
    PronPoss,
    CliticPoss,
}

impl LexCategory {
    pub fn code(self) -> &'static str {
        match self {
            LexCategory::Noun => "noun",
            LexCategory::Name => "name",
            LexCategory::Cop => "verb-cop",
            LexCategory::Prep => "prep",
            LexCategory::Det => "det",
            LexCategory::Ord => "ord",
            LexCategory::PronPoss => "pron-poss",
            LexCategory::CliticPoss => "clitic-poss",
        }
    }
}

impl fmt::Display for LexCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for LexCategory {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        use LexCategory::*;
        [Noun, Name, Cop, Prep, Det, Ord, PronPoss, CliticPoss]
            .into_iter()
            .find(|c| c.code() == s)
            .ok_or_else(|| format!("unknown category '{s}'"))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LexEntry {
    pub surface: String,
    pub language: Language,
    pub category: LexCategory,
    pub root: String,
    pub script: Option<String>,
    pub features: BTreeMap<String, String>,
    pub semantics: Term,
}

impl LexEntry {
    /// The predicate this entry contributes: `floor` for `lam(X, floor(X))`,
    /// `second` for the ordinal, `own` for the possessive.
    pub fn predicate(&self) -> Option<&str> {
        head_predicate(&self.semantics)
    }

    /// The surface form in the word's own script.
    pub fn written(&self) -> String {
        match (&self.script, self.language) {
            (Some(s), _) => s.clone(),
            (None, Language::Ar) => Buckwalter::builtin().to_script(&self.surface),
            (None, Language::En) => self.surface.clone(),
        }
    }
}

fn head_predicate(t: &Term) -> Option<&str> {
    match t {
        Term::Lambda(_, body) | Term::Ref(_, body) => head_predicate(body),
        Term::Compound(f, args) if f == "and" => args.iter().rev().find_map(head_predicate),
        Term::Compound(f, _) => Some(f),
        _ => None,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum LexiconError {
    #[error("lexicon: {0}")]
    Parse(#[from] ParseError),
    #[error("lexicon line {line}: {message}")]
    Malformed { line: usize, message: String },
}

#[derive(Clone, Debug, Default)]
pub struct Lexicon {
    entries: Vec<LexEntry>,
}

impl Lexicon {
    pub fn builtin() -> Lexicon {
        load_lexicon(BUILTIN_LEXICON).expect("builtin lexicon is valid")
    }

    pub fn entries(&self) -> &[LexEntry] {
        &self.entries
    }

    pub fn lookup<'a>(&'a self, language: Language, surface: &'a str) -> impl Iterator<Item = &'a LexEntry> + 'a {
        self.entries.iter().filter(move |e| e.language == language && e.surface == surface)
    }

    pub fn contains(&self, language: Language, surface: &str) -> bool {
        self.lookup(language, surface).next().is_some()
    }

    /// The first entry in `language` contributing `predicate`.
    pub fn by_predicate(&self, language: Language, predicate: &str) -> Option<&LexEntry> {
        self.entries.iter().find(|e| e.language == language && e.predicate() == Some(predicate))
    }
}

pub fn load_lexicon(source: &str) -> Result<Lexicon, LexiconError> {
    let (clean, _) = strip_comments(source);
    let mut entries = Vec::new();
    for (i, line) in clean.lines().enumerate() {
        let line_no = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        entries.push(parse_entry(line, line_no)?);
    }
    Ok(Lexicon { entries })
}

fn parse_entry(line: &str, line_no: usize) -> Result<LexEntry, LexiconError> {
    let bad = |message: String| LexiconError::Malformed { line: line_no, message };
    let sem_at = line.find("sem=").ok_or_else(|| bad("missing sem=".into()))?;
    let (head, sem_src) = line.split_at(sem_at);
    let mut words = head.split_whitespace();
    if words.next() != Some("lex") {
        return Err(bad("entries start with 'lex'".into()));
    }
    let surface = words.next().ok_or_else(|| bad("missing surface form".into()))?.to_string();
    let language = words
        .next()
        .and_then(|w| w.strip_prefix('(')?.strip_suffix(')'))
        .ok_or_else(|| bad("expected (en) or (ar)".into()))?
        .parse::<Language>()
        .map_err(|e| bad(e.to_string()))?;
    let category = words.next().ok_or_else(|| bad("missing category".into()))?.parse::<LexCategory>().map_err(bad)?;
    let mut root = None;
    let mut script = None;
    let mut features = BTreeMap::new();
    for field in words {
        let (k, v) = field.split_once('=').ok_or_else(|| bad(format!("expected key=value, found '{field}'")))?;
        match k {
            "root" => root = Some(v.to_string()),
            "script" => script = Some(v.to_string()),
            _ => {
                features.insert(k.to_string(), v.to_string());
            }
        }
    }
    let column = line[..sem_at].chars().count() + "sem=".len() + 1;
    let mut reader = TermReader::with_origin(&sem_src["sem=".len()..], line_no, column);
    let semantics = reader.term()?;
    reader.expect('.')?;
    if !reader.at_end() {
        return Err(reader.error("trailing input after entry").into());
    }
    if !semantics.is_closed() {
        return Err(bad(format!("semantics of '{surface}' has free variables")));
    }
    let root = match (root, language) {
        (Some(r), _) => r,
        (None, Language::En) => surface.clone(),
        (None, Language::Ar) => return Err(bad(format!("Arabic entry '{surface}' needs a root"))),
    };
    Ok(LexEntry { surface, language, category, root, script, features, semantics })
}
