//! Text to saturated model: tokenize, parse, build the logical form,
//! anchor it, saturate.

use serde::Serialize;

use crate::grammar::{parse_text, GrammarError, Lexicon, TransliterationError};
use crate::kb::KnowledgeBase;
use crate::lf::{anchor, build_lf, AnchoredForm, LfError, LogicalForm};
use crate::model::{saturate_with, Model, ModelError, SaturationOptions};
use crate::term::EntitySource;
use crate::Language;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum PipelineError {
    #[error("unknown word '{token}'")]
    UnknownWord { token: String, language: Language },
    #[error("no parse for '{text}'")]
    NoParse { text: String },
    #[error("grammar: {0}")]
    Grammar(GrammarError),
    #[error(transparent)]
    Lf(#[from] LfError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

impl PipelineError {
    /// Learner-level outcomes, as opposed to faults.
    pub fn is_learner_error(&self) -> bool {
        matches!(self, PipelineError::UnknownWord { .. } | PipelineError::NoParse { .. })
    }
}

impl From<GrammarError> for PipelineError {
    fn from(e: GrammarError) -> Self {
        match e {
            GrammarError::UnknownWord { token, language } => PipelineError::UnknownWord { token, language },
            other => PipelineError::Grammar(other),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Analysis {
    pub language: Language,
    pub tokens: Vec<String>,
    pub lf: LogicalForm,
    pub anchored: AnchoredForm,
    pub model: Model,
}

/// Tokens and logical form of the first parse.
pub fn logical_form(text: &str, language: Language, lexicon: &Lexicon) -> Result<(Vec<String>, LogicalForm), PipelineError> {
    let (tokens, signs) = parse_text(text, language, lexicon).map_err(|e| match e {
        GrammarError::Transliteration(TransliterationError::UnknownCharacter { ch, .. }) => {
            PipelineError::UnknownWord { token: ch.to_string(), language }
        }
        other => other.into(),
    })?;
    let sign = signs.first().ok_or_else(|| PipelineError::NoParse { text: text.to_string() })?;
    Ok((tokens, build_lf(sign)?))
}

pub fn analyze(
    text: &str,
    language: Language,
    kb: &KnowledgeBase,
    lexicon: &Lexicon,
    entities: &EntitySource,
) -> Result<Analysis, PipelineError> {
    let (tokens, lf) = logical_form(text, language, lexicon)?;
    let anchored = anchor(&lf, entities)?;
    let model = saturate_with(&anchored.facts, kb, language, &SaturationOptions::default(), entities)?;
    Ok(Analysis { language, tokens, lf, anchored, model })
}
