use crate::Language;

use super::buckwalter::{normalize_word, Buckwalter, TransliterationError};
use super::lexicon::{LexCategory, Lexicon};

pub const ARTICLE_TOKEN: &str = "Al+";
pub const POSSESSIVE_TOKEN: &str = "+y";

const SEPARATORS: &[char] = &['.', ',', ';', ':', '!', '?', '"', '(', ')'];

/// Split a sentence into lexicon tokens. English is lowercased; Arabic is
/// read in script or Buckwalter, normalized to Buckwalter, and has its
/// article and possessive clitics split off.
pub fn tokenize(text: &str, language: Language, lexicon: &Lexicon) -> Result<Vec<String>, TransliterationError> {
    match language {
        Language::En => tokenize_english(text),
        Language::Ar => tokenize_arabic(text, lexicon),
    }
}

fn is_separator(c: char) -> bool {
    c.is_whitespace() || SEPARATORS.contains(&c)
}

fn tokenize_english(text: &str) -> Result<Vec<String>, TransliterationError> {
    let mut words = vec![String::new()];
    for (offset, c) in text.chars().enumerate() {
        if is_separator(c) {
            words.push(String::new());
        } else if c.is_ascii_alphanumeric() || c == '\'' || c == '-' {
            words.last_mut().expect("non-empty").push(c.to_ascii_lowercase());
        } else {
            return Err(TransliterationError::UnknownCharacter { ch: c, offset });
        }
    }
    Ok(words.into_iter().filter(|w| !w.is_empty()).collect())
}

fn tokenize_arabic(text: &str, lexicon: &Lexicon) -> Result<Vec<String>, TransliterationError> {
    let table = Buckwalter::builtin();
    let mut words = vec![String::new()];
    for (offset, c) in text.chars().enumerate() {
        let latin = match table.latin_of(c) {
            Some(l) if table.is_dropped(l) => continue,
            Some(l) => l,
            None if is_separator(c) => ' ',
            None if table.is_latin(c) => c,
            None => return Err(TransliterationError::UnknownCharacter { ch: c, offset }),
        };
        if is_separator(latin) {
            words.push(String::new());
        } else {
            words.last_mut().expect("non-empty").push(latin);
        }
    }
    Ok(words.into_iter().filter(|w| !w.is_empty()).flat_map(|w| split_clitics(&normalize_word(&w), lexicon)).collect())
}

fn split_clitics(word: &str, lexicon: &Lexicon) -> Vec<String> {
    if lexicon.contains(Language::Ar, word) {
        return vec![word.to_string()];
    }
    if let Some(rest) = word.strip_prefix("Al").filter(|r| !r.is_empty()) {
        let tail = split_possessive(rest, lexicon).unwrap_or_else(|| vec![rest.to_string()]);
        if lexicon.contains(Language::Ar, &tail[0]) {
            return std::iter::once(ARTICLE_TOKEN.to_string()).chain(tail).collect();
        }
    }
    split_possessive(word, lexicon).unwrap_or_else(|| vec![word.to_string()])
}

/// `mktby` -> [mktb, +y]; a stem-final t is the bound form of taa marbuta,
/// so `grfty` -> [grfp, +y].
fn split_possessive(word: &str, lexicon: &Lexicon) -> Option<Vec<String>> {
    let stem = word.strip_suffix('y').filter(|s| !s.is_empty())?;
    let candidates = [stem.to_string(), stem.strip_suffix('t').map(|s| format!("{s}p")).unwrap_or_default()];
    candidates
        .into_iter()
        .filter(|c| !c.is_empty())
        .find(|c| lexicon.lookup(Language::Ar, c).any(|e| e.category == LexCategory::Noun))
        .map(|c| vec![c, POSSESSIVE_TOKEN.to_string()])
}
