use std::collections::BTreeMap;
use std::sync::OnceLock;

use crate::kb::ABDUCIBLES;

const BUILTIN_TEMPLATES: &str = include_str!("../../data/templates.txt");

pub const SLOTS: [&str; 12] = [
    "learner_prep",
    "source_prep",
    "subject",
    "subject_source",
    "figure",
    "ground",
    "figure_type",
    "ground_type",
    "dimension",
    "actual_dimension",
    "token",
    "missing_property",
];

/// Keys every template set must define.
pub fn required_keys() -> Vec<String> {
    let mut keys: Vec<String> =
        ["accepted", "no_parse", "unknown_word", "unexplained", "blocked_compat", "no_explanation", "depth_limit"]
            .iter()
            .map(ToString::to_string)
            .collect();
    for p in ABDUCIBLES {
        keys.push(format!("missing_{p}"));
        keys.push(format!("why_{p}"));
    }
    keys
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum TemplateError {
    #[error("template line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("template '{0}' is defined twice")]
    Duplicate(String),
    #[error("template '{0}' is missing")]
    Missing(String),
    #[error("template '{key}' uses unknown slot '{{{slot}}}'")]
    UnknownSlot { key: String, slot: String },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Templates {
    patterns: BTreeMap<String, String>,
}

impl Templates {
    pub fn builtin() -> &'static Templates {
        static T: OnceLock<Templates> = OnceLock::new();
        T.get_or_init(|| Templates::parse(BUILTIN_TEMPLATES).expect("builtin templates are valid"))
    }

    pub fn builtin_source() -> &'static str {
        BUILTIN_TEMPLATES
    }

    pub fn parse(src: &str) -> Result<Templates, TemplateError> {
        let mut patterns = BTreeMap::new();
        for (i, raw) in src.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let malformed = |message: &str| TemplateError::Malformed { line: i + 1, message: message.to_string() };
            let rest = line.strip_prefix("template ").ok_or_else(|| malformed("expected 'template <key>: \"...\"'"))?;
            let (key, pattern) = rest.split_once(':').ok_or_else(|| malformed("missing ':' after the key"))?;
            let key = key.trim();
            if key.is_empty() || !key.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
                return Err(malformed("template keys are letters, digits and underscores"));
            }
            let pattern = pattern
                .trim()
                .strip_prefix('"')
                .and_then(|p| p.strip_suffix('"'))
                .ok_or_else(|| malformed("the pattern must be double-quoted"))?;
            for slot in slots_of(pattern) {
                if !SLOTS.contains(&slot) {
                    return Err(TemplateError::UnknownSlot { key: key.to_string(), slot: slot.to_string() });
                }
            }
            if patterns.insert(key.to_string(), pattern.to_string()).is_some() {
                return Err(TemplateError::Duplicate(key.to_string()));
            }
        }
        let t = Templates { patterns };
        if let Some(k) = required_keys().into_iter().find(|k| !t.patterns.contains_key(k)) {
            return Err(TemplateError::Missing(k));
        }
        Ok(t)
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.patterns.get(key).map(String::as_str)
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.patterns.keys().map(String::as_str)
    }

    /// Fill the slots of template `key`. Slots without a value are
    /// rendered as "it".
    pub fn render(&self, key: &str, values: &BTreeMap<&str, String>) -> Result<String, TemplateError> {
        let pattern = self.get(key).ok_or_else(|| TemplateError::Missing(key.to_string()))?;
        let mut out = String::with_capacity(pattern.len() + 32);
        let mut rest = pattern;
        while let Some(start) = rest.find('{') {
            out.push_str(&rest[..start]);
            let end = rest[start..].find('}').map(|e| start + e).expect("slots were validated at load");
            let slot = &rest[start + 1..end];
            out.push_str(values.get(slot).map(String::as_str).unwrap_or("it"));
            rest = &rest[end + 1..];
        }
        out.push_str(rest);
        Ok(out)
    }
}

fn slots_of(pattern: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut rest = pattern;
    while let Some(start) = rest.find('{') {
        match rest[start..].find('}') {
            Some(end) => {
                out.push(&rest[start + 1..start + end]);
                rest = &rest[start + end + 1..];
            }
            None => {
                // unterminated: reported as an unknown slot
                out.push(&rest[start..]);
                break;
            }
        }
    }
    out
}
