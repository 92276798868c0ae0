//! Arabic script <-> Buckwalter transliteration.

use std::collections::HashMap;
use std::sync::OnceLock;

const BUILTIN_TABLE: &str = include_str!("../../data/buckwalter.tsv");

/// Short vowels, shadda, sukun, tanwin, dagger alif and tatweel: dropped
/// when reading script, since the lexicon is unvocalized.
const DROPPED: &[char] = &['a', 'u', 'i', 'o', '~', 'F', 'N', 'K', '`', '_'];

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum TransliterationError {
    #[error("character '{ch}' at offset {offset} is neither Arabic script nor Buckwalter")]
    UnknownCharacter { ch: char, offset: usize },
    #[error("table line {line}: {message}")]
    Table { line: usize, message: String },
}

#[derive(Clone, Debug)]
pub struct Buckwalter {
    to_latin: HashMap<char, char>,
    to_script: HashMap<char, char>,
}

impl Buckwalter {
    pub fn builtin() -> &'static Buckwalter {
        static TABLE: OnceLock<Buckwalter> = OnceLock::new();
        TABLE.get_or_init(|| Buckwalter::load(BUILTIN_TABLE).expect("builtin transliteration table is valid"))
    }

    /// Read a two-column TSV (script, Buckwalter); `#` lines are comments.
    pub fn load(tsv: &str) -> Result<Buckwalter, TransliterationError> {
        let mut to_latin = HashMap::new();
        let mut to_script = HashMap::new();
        for (i, line) in tsv.lines().enumerate() {
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |message: &str| TransliterationError::Table { line: i + 1, message: message.into() };
            let (a, b) = line.split_once('\t').ok_or_else(|| err("expected two tab-separated columns"))?;
            let single = |s: &str| {
                let mut cs = s.chars();
                match (cs.next(), cs.next()) {
                    (Some(c), None) => Some(c),
                    _ => None,
                }
            };
            let (a, b) = single(a).zip(single(b)).ok_or_else(|| err("each column must hold one character"))?;
            if to_latin.insert(a, b).is_some() || to_script.insert(b, a).is_some() {
                return Err(err("duplicate mapping"));
            }
        }
        Ok(Buckwalter { to_latin, to_script })
    }

    pub fn is_script(&self, c: char) -> bool {
        self.to_latin.contains_key(&c)
    }

    pub fn is_latin(&self, c: char) -> bool {
        self.to_script.contains_key(&c)
    }

    pub fn latin_of(&self, c: char) -> Option<char> {
        self.to_latin.get(&c).copied()
    }

    /// Whether a Buckwalter symbol is a diacritic dropped from script input.
    pub fn is_dropped(&self, latin: char) -> bool {
        DROPPED.contains(&latin)
    }

    /// Map script characters to Buckwalter, leaving ASCII input alone.
    pub fn to_buckwalter(&self, text: &str) -> Result<String, TransliterationError> {
        let mut out = String::with_capacity(text.len());
        for (offset, c) in text.chars().enumerate() {
            match self.to_latin.get(&c) {
                Some(b) if DROPPED.contains(b) => {}
                Some(&b) => out.push(b),
                None if c.is_ascii() || c.is_whitespace() => out.push(c),
                None => return Err(TransliterationError::UnknownCharacter { ch: c, offset }),
            }
        }
        Ok(out)
    }

    /// Render Buckwalter in script; characters without a mapping pass
    /// through unchanged.
    pub fn to_script(&self, bw: &str) -> String {
        bw.chars().map(|c| self.to_script.get(&c).copied().unwrap_or(c)).collect()
    }
}

/// Word-final alif maqsura is written as ya: ElY and Ely are one word.
pub fn normalize_word(word: &str) -> String {
    match word.strip_suffix('Y') {
        Some(stem) => format!("{stem}y"),
        None => word.to_string(),
    }
}
