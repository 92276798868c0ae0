use std::path::{Path, PathBuf};

use prepdiag_core::diagnostics::Diagnostician;
use prepdiag_core::exercise::{parse_bank, Bank, BankError};
use prepdiag_core::grammar::Lexicon;
use prepdiag_core::kb::{load_kb, KbError, KnowledgeBase};
use prepdiag_core::diagnostics::Templates;

pub const KB_ENV: &str = "PREPDIAG_KB";

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Kb { path: PathBuf, source: KbError },
    #[error("{path}: {source}")]
    Bank { path: PathBuf, source: BankError },
    #[error("exercise bank rejected: {0}")]
    InvalidBank(BankError),
}

fn read(path: &Path) -> Result<String, ConfigError> {
    std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.to_path_buf(), source })
}

pub fn load_kb_file(path: &Path) -> Result<KnowledgeBase, ConfigError> {
    load_kb(&read(path)?).map_err(|source| ConfigError::Kb { path: path.to_path_buf(), source })
}

/// The KB at `path`, or the builtin one.
pub fn knowledge_base(path: Option<&Path>) -> Result<KnowledgeBase, ConfigError> {
    path.map_or_else(|| Ok(KnowledgeBase::builtin()), load_kb_file)
}

pub fn bank(path: Option<&Path>) -> Result<Bank, ConfigError> {
    match path {
        None => Ok(Bank::builtin()),
        Some(p) => parse_bank(&read(p)?).map_err(|source| ConfigError::Bank { path: p.to_path_buf(), source }),
    }
}

/// Everything a diagnosis needs, with the bank checked against the KB.
pub struct Resources {
    pub diagnostician: Diagnostician,
    pub bank: Bank,
}

pub fn resources(kb: Option<&Path>, bank_path: Option<&Path>) -> Result<Resources, ConfigError> {
    let diagnostician = Diagnostician::new(knowledge_base(kb)?, Lexicon::builtin(), Templates::builtin().clone());
    let bank = bank(bank_path)?;
    diagnostician.validate_bank(&bank).map_err(ConfigError::InvalidBank)?;
    Ok(Resources { diagnostician, bank })
}
