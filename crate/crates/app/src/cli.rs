use std::net::{IpAddr, SocketAddr};
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use prepdiag_core::diagnostics::{Diagnosis, Diagnostician};
use prepdiag_core::pipeline::{analyze, logical_form, PipelineError};
use prepdiag_core::session::Session;
use prepdiag_core::term::EntitySource;
use prepdiag_core::Language;

use crate::config::{self, ConfigError, KB_ENV};
use crate::server::{serve, AppState};

/// Learner-level failure: the sentence itself is not usable.
pub const EXIT_LEARNER: u8 = 1;
/// Bad input files, bad flags, internal faults.
pub const EXIT_FAULT: u8 = 2;

#[derive(Debug, Parser)]
#[command(name = "prepdiag", version, about = "Diagnose preposition choices in English/Arabic translations")]
pub struct Cli {
    /// Knowledge base file to use instead of the builtin one.
    #[arg(long, global = true, env = KB_ENV)]
    pub kb: Option<PathBuf>,
    /// Exercise bank file to use instead of the builtin one.
    #[arg(long, global = true)]
    pub bank: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the logical form of a sentence.
    Parse(TextArgs),
    /// Print the saturated model of a sentence.
    Model(TextArgs),
    /// Diagnose a translation of an exercise, or a free sentence.
    Diagnose(DiagnoseArgs),
    /// List the exercise bank.
    Exercises,
    /// Load and check a knowledge base file.
    CheckKb { file: PathBuf },
    /// Check that every exercise's references are accepted and its known
    /// wrong answers are rejected.
    CheckBank { file: Option<PathBuf> },
    /// Run the HTTP server.
    Serve(ServeArgs),
}

#[derive(Debug, Args)]
pub struct TextArgs {
    #[arg(long)]
    pub lang: Language,
    pub text: String,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct DiagnoseArgs {
    #[arg(long, requires = "answer", conflicts_with_all = ["lang", "text"])]
    pub exercise: Option<String>,
    #[arg(long)]
    pub answer: Option<String>,
    #[arg(long, requires = "text")]
    pub lang: Option<Language>,
    #[arg(long, requires = "lang")]
    pub text: Option<String>,
    /// Include the proof trace.
    #[arg(long)]
    pub trace: bool,
    /// Follow every missing literal down with "why?" questions.
    #[arg(long)]
    pub explain: bool,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long, default_value_t = 8080)]
    pub port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    pub host: IpAddr,
    /// Directory for session logs; sessions are kept in memory only if unset.
    #[arg(long)]
    pub sessions: Option<PathBuf>,
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Learner(PipelineError),
    #[error("{0}")]
    Fault(String),
}

impl From<PipelineError> for CliError {
    fn from(e: PipelineError) -> Self {
        if e.is_learner_error() {
            CliError::Learner(e)
        } else {
            CliError::Fault(e.to_string())
        }
    }
}

fn fault(e: impl std::fmt::Display) -> CliError {
    CliError::Fault(e.to_string())
}

pub fn run(cli: Cli) -> ExitCode {
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                CliError::Learner(_) => EXIT_LEARNER,
                _ => EXIT_FAULT,
            })
        }
    }
}

fn dispatch(cli: Cli) -> Result<u8, CliError> {
    let kb = cli.kb.as_deref();
    match cli.command {
        Command::Parse(a) => {
            let dx = diagnostician(kb)?;
            let (tokens, lf) = logical_form(&a.text, a.lang, dx.lexicon())?;
            if a.json {
                print_json(&serde_json::json!({ "language": a.lang, "tokens": tokens, "lf": lf }));
            } else {
                println!("{lf}");
            }
            Ok(0)
        }
        Command::Model(a) => {
            let dx = diagnostician(kb)?;
            let analysis = analyze(&a.text, a.lang, dx.kb(), dx.lexicon(), &EntitySource::new())?;
            if a.json {
                print_json(&serde_json::json!({ "language": a.lang, "lf": analysis.lf, "facts": analysis.model }));
            } else {
                print!("{}", analysis.model);
            }
            Ok(0)
        }
        Command::Diagnose(a) => diagnose(kb, cli.bank.as_deref(), a),
        Command::Exercises => {
            let bank = config::bank(cli.bank.as_deref())?;
            for e in bank.exercises() {
                println!("{}\t{}->{}\t{}", e.id, e.source_language, e.target_language(), e.source_text);
            }
            Ok(0)
        }
        Command::CheckKb { file } => {
            let loaded = config::load_kb_file(&file)?;
            println!("OK: {} rules", loaded.rules().len());
            Ok(0)
        }
        Command::CheckBank { file } => {
            let file = file.or(cli.bank);
            let r = config::resources(kb, file.as_deref())?;
            println!("OK: {} exercises", r.bank.len());
            Ok(0)
        }
        Command::Serve(a) => {
            let r = config::resources(kb, cli.bank.as_deref())?;
            let state = Arc::new(AppState::new(r.diagnostician, r.bank, a.sessions));
            let runtime = tokio::runtime::Runtime::new().map_err(fault)?;
            runtime.block_on(serve(state, SocketAddr::new(a.host, a.port))).map_err(fault)?;
            Ok(0)
        }
    }
}

fn diagnostician(kb: Option<&std::path::Path>) -> Result<Diagnostician, CliError> {
    let kb = config::knowledge_base(kb)?;
    Ok(Diagnostician::new(kb, prepdiag_core::grammar::Lexicon::builtin(), prepdiag_core::diagnostics::Templates::builtin().clone()))
}

fn diagnose(kb: Option<&std::path::Path>, bank: Option<&std::path::Path>, a: DiagnoseArgs) -> Result<u8, CliError> {
    let dx = diagnostician(kb)?;
    let session = Session::new("cli");
    let mut d = match (&a.exercise, &a.answer, a.lang, &a.text) {
        (Some(id), Some(answer), _, _) => {
            let bank = config::bank(bank)?;
            let exercise = bank.get(id).ok_or_else(|| CliError::Fault(format!("unknown exercise '{id}'")))?;
            dx.diagnose(&session, exercise, answer, a.trace).map_err(fault)?
        }
        (None, _, Some(lang), Some(text)) => dx.diagnose_text(&session, lang, text, a.trace).map_err(fault)?,
        _ => return Err(CliError::Fault("give --exercise and --answer, or --lang and --text".into())),
    };
    if a.explain {
        explain(&dx, &session, &d.id, &d.missing, a.trace)?;
        d = session.diagnosis(&d.id).expect("stored");
    }
    if a.json {
        print_json(&d);
    } else {
        print_tree(&d, 0);
    }
    Ok(if d.verdict.is_learner_error() { EXIT_LEARNER } else { 0 })
}

fn explain(dx: &Diagnostician, session: &Session, id: &str, missing: &[prepdiag_core::term::Literal], trace: bool) -> Result<(), CliError> {
    for literal in missing {
        let child = dx.why(session, id, literal, trace).map_err(fault)?;
        explain(dx, session, &child.id, &child.missing, trace)?;
    }
    Ok(())
}

fn print_tree(d: &Diagnosis, indent: usize) {
    let pad = "  ".repeat(indent);
    println!("{pad}[{}] {}: {}", d.id, d.verdict, d.message);
    if !d.missing.is_empty() {
        let missing: Vec<String> = d.missing.iter().map(ToString::to_string).collect();
        println!("{pad}  missing: {}", missing.join(", "));
    }
    if let Some(t) = &d.token {
        println!("{pad}  token: {t}");
    }
    for line in &d.trace {
        println!("{pad}  | {line}");
    }
    for (literal, child) in &d.children {
        println!("{pad}  why {literal}?");
        print_tree(child, indent + 2);
    }
}

fn print_json<T: serde::Serialize>(value: &T) {
    println!("{}", serde_json::to_string_pretty(value).expect("serializable"));
}
