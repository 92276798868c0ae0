//! Translation exercises: an English sentence, its accepted Arabic
//! translations, and documented wrong attempts.

use serde::Serialize;

use crate::Language;

const BUILTIN_BANK: &str = include_str!("../data/bank.txt");

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Exercise {
    pub id: String,
    pub source_language: Language,
    pub source_text: String,
    pub reference_translations: Vec<String>,
    /// Attempts that use the wrong preposition and must be rejected.
    pub wrong_attempts: Vec<String>,
    pub lexical_scope: Vec<String>,
}

impl Exercise {
    pub fn target_language(&self) -> Language {
        match self.source_language {
            Language::En => Language::Ar,
            Language::Ar => Language::En,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum BankError {
    #[error("bank line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("exercise '{0}' is defined twice")]
    Duplicate(String),
    #[error("exercise '{id}': {message}")]
    Invalid { id: String, message: String },
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Bank {
    exercises: Vec<Exercise>,
}

impl Bank {
    pub fn builtin() -> Bank {
        parse_bank(BUILTIN_BANK).expect("builtin bank is well formed")
    }

    pub fn builtin_source() -> &'static str {
        BUILTIN_BANK
    }

    pub fn exercises(&self) -> &[Exercise] {
        &self.exercises
    }

    pub fn get(&self, id: &str) -> Option<&Exercise> {
        self.exercises.iter().find(|e| e.id == id)
    }

    pub fn len(&self) -> usize {
        self.exercises.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exercises.is_empty()
    }
}

/// Split `key=value key="quoted value" ...` into pairs.
fn fields(s: &str) -> Result<Vec<(&str, &str)>, String> {
    let mut out = Vec::new();
    let mut rest = s.trim_start();
    while !rest.is_empty() {
        let eq = rest.find('=').ok_or_else(|| format!("expected key=value at '{rest}'"))?;
        let key = &rest[..eq];
        if key.is_empty() || !key.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
            return Err(format!("bad field name '{key}'"));
        }
        rest = &rest[eq + 1..];
        let value;
        if let Some(q) = rest.strip_prefix('"') {
            let end = q.find('"').ok_or_else(|| format!("unterminated quote in field '{key}'"))?;
            value = &q[..end];
            rest = &q[end + 1..];
        } else {
            let end = rest.find(char::is_whitespace).unwrap_or(rest.len());
            value = &rest[..end];
            rest = &rest[end..];
        }
        if !rest.is_empty() && !rest.starts_with(char::is_whitespace) {
            return Err(format!("expected whitespace after field '{key}'"));
        }
        out.push((key, value));
        rest = rest.trim_start();
    }
    Ok(out)
}

/// Parse the bank format: `exercise <id>: en="..." ar="..." [ar="..."]
/// [wrong="..."] scope=w1,w2,...`, one exercise per line, `#` comments.
pub fn parse_bank(src: &str) -> Result<Bank, BankError> {
    let mut exercises: Vec<Exercise> = Vec::new();
    for (i, raw) in src.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let malformed = |message: String| BankError::Malformed { line: i + 1, message };
        let rest = line.strip_prefix("exercise ").ok_or_else(|| malformed("expected 'exercise <id>: ...'".into()))?;
        let (id, rest) = rest.split_once(':').ok_or_else(|| malformed("missing ':' after the exercise id".into()))?;
        let id = id.trim();
        if id.is_empty() || id.contains(char::is_whitespace) {
            return Err(malformed(format!("bad exercise id '{id}'")));
        }
        let mut source = None;
        let mut ex = Exercise {
            id: id.to_string(),
            source_language: Language::En,
            source_text: String::new(),
            reference_translations: Vec::new(),
            wrong_attempts: Vec::new(),
            lexical_scope: Vec::new(),
        };
        for (key, value) in fields(rest).map_err(malformed)? {
            match key {
                "en" if source.is_none() => source = Some(value.to_string()),
                "en" => return Err(malformed("only one English sentence per exercise".into())),
                "ar" => ex.reference_translations.push(value.to_string()),
                "wrong" => ex.wrong_attempts.push(value.to_string()),
                "scope" => ex.lexical_scope.extend(value.split(',').filter(|w| !w.is_empty()).map(str::to_string)),
                other => return Err(malformed(format!("unknown field '{other}'"))),
            }
        }
        ex.source_text = source.ok_or_else(|| malformed("missing en=\"...\"".into()))?;
        if ex.reference_translations.is_empty() {
            return Err(malformed("at least one ar=\"...\" is required".into()));
        }
        if exercises.iter().any(|e| e.id == ex.id) {
            return Err(BankError::Duplicate(ex.id));
        }
        exercises.push(ex);
    }
    Ok(Bank { exercises })
}
