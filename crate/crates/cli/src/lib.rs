//! The `adavu` command-line pipeline: loads the ontology and mapping
//! database, ingests annotation, onset and skeleton files, and writes
//! LabanXML, SVG and JSON reports.
//!
//! Exit codes: 0 on success, 2 when the inputs fail domain validation,
//! 1 for I/O, format and usage errors.

mod commands;

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use adavu_core::events::EventError;
use adavu_core::laban::{LabanError, MappingDb};
use adavu_core::labanxml::LabanXmlError;
use adavu_core::ontology::{OntologyError, Registry};
use adavu_core::recognizer::RecognizerError;
use clap::{Args, Parser, Subcommand};

pub use commands::{
    cmd_analyze_sync, cmd_predict, cmd_render, cmd_train, cmd_transcribe, cmd_validate_ontology, AnalyzeSyncReport,
    BarSummary, BeatStatus, OntologyReport, PredictReport, TrainReport, TranscribeReport,
};

#[derive(Debug, Parser)]
#[command(name = "adavu", version, about = "Transcribe Bharatanatyam Adavu recordings to Labanotation")]
pub struct Cli {
    /// More log output on standard error (repeatable).
    #[arg(long, short = 'v', action = clap::ArgAction::Count, global = true)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
#[allow(clippy::large_enum_variant)]
pub enum Command {
    /// Annotated or recognized key postures to LabanXML, SVG and a report.
    Transcribe(TranscribeArgs),
    /// Beat/posture synchronization of an onset file and a video annotation.
    AnalyzeSync(AnalyzeSyncArgs),
    /// Load and cross-check the ontology and the mapping database.
    ValidateOntology(ValidateOntologyArgs),
    /// LabanXML to SVG.
    Render(RenderArgs),
    /// Train a posture model from skeleton frames and an annotation.
    Train(TrainArgs),
    /// Recognize key postures in a skeleton stream.
    Predict(PredictArgs),
}

#[derive(Debug, Clone, Args)]
pub struct SourceArgs {
    /// Directory with sollukattus.json, adavus.json and postures.json (default: built-in).
    #[arg(long)]
    pub ontology: Option<PathBuf>,
    /// Laban mapping database JSON (default: built-in Natta database).
    #[arg(long)]
    pub mapping_db: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct TranscribeArgs {
    #[command(flatten)]
    pub sources: SourceArgs,
    /// Key-posture annotation CSV.
    #[arg(long)]
    pub annotation: Option<PathBuf>,
    /// Skeleton CSV, used with --model when no annotation is given.
    #[arg(long)]
    pub skeleton: Option<PathBuf>,
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// Onset CSV of the accompanying sollukattu.
    #[arg(long)]
    pub audio_events: Option<PathBuf>,
    /// Adavu to check the performance against, e.g. natta_1.
    #[arg(long)]
    pub adavu: Option<String>,
    /// Score title (default: the Adavu id, else "transcription").
    #[arg(long)]
    pub title: Option<String>,
    /// Beats per bar (default: from the Adavu's sollukattu, else 8).
    #[arg(long)]
    pub bar_length: Option<usize>,
    /// Sync tolerance in seconds.
    #[arg(long, default_value_t = 0.0)]
    pub tolerance: f64,
    /// Beat period in seconds instead of the median inter-onset interval.
    #[arg(long)]
    pub period: Option<f64>,
    /// Shortest run of frames accepted as a key posture when recognizing.
    #[arg(long, default_value_t = 5)]
    pub min_run: usize,
    #[arg(long)]
    pub out_xml: Option<PathBuf>,
    #[arg(long)]
    pub out_svg: Option<PathBuf>,
    /// Report JSON path (default: standard output).
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct AnalyzeSyncArgs {
    #[arg(long)]
    pub audio_events: PathBuf,
    #[arg(long)]
    pub annotation: PathBuf,
    #[arg(long, default_value_t = 8)]
    pub bar_length: usize,
    #[arg(long, default_value_t = 0.0)]
    pub tolerance: f64,
    #[arg(long)]
    pub period: Option<f64>,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ValidateOntologyArgs {
    #[command(flatten)]
    pub sources: SourceArgs,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct RenderArgs {
    /// LabanXML input.
    #[arg(long)]
    pub xml: PathBuf,
    /// SVG output (default: standard output).
    #[arg(long)]
    pub out_svg: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct TrainArgs {
    #[arg(long)]
    pub skeleton: PathBuf,
    #[arg(long)]
    pub annotation: PathBuf,
    /// Model JSON output.
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct PredictArgs {
    #[arg(long)]
    pub skeleton: PathBuf,
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long, default_value_t = 5)]
    pub min_run: usize,
    /// Frames further than this from every centroid count as motion.
    #[arg(long)]
    pub max_distance: Option<f64>,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

/// Why a command failed, which decides the exit code.
#[derive(Debug)]
pub enum Failure {
    /// The inputs were read but violate a domain rule.
    Validation(anyhow::Error),
    /// Missing files, unreadable or malformed input, bad arguments.
    Environment(anyhow::Error),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Validation(_) => 2,
            Failure::Environment(_) => 1,
        }
    }

    pub fn validation(message: impl fmt::Display) -> Failure {
        Failure::Validation(anyhow::anyhow!("{message}"))
    }

    pub fn environment(message: impl fmt::Display) -> Failure {
        Failure::Environment(anyhow::anyhow!("{message}"))
    }

    /// Prefixes the message, keeping the kind.
    pub fn context(self, c: impl fmt::Display + Send + Sync + 'static) -> Failure {
        match self {
            Failure::Validation(e) => Failure::Validation(e.context(c)),
            Failure::Environment(e) => Failure::Environment(e.context(c)),
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Validation(e) | Failure::Environment(e) => write!(f, "{e:#}"),
        }
    }
}

impl std::error::Error for Failure {}

impl From<OntologyError> for Failure {
    fn from(e: OntologyError) -> Failure {
        match e {
            OntologyError::UnknownBol(_) | OntologyError::Validation(_) => Failure::Validation(e.into()),
            OntologyError::Io { .. } | OntologyError::Format { .. } => Failure::Environment(e.into()),
        }
    }
}

impl From<EventError> for Failure {
    fn from(e: EventError) -> Failure {
        match e {
            EventError::Csv { .. } => Failure::Environment(e.into()),
            _ => Failure::Validation(e.into()),
        }
    }
}

impl From<LabanError> for Failure {
    fn from(e: LabanError) -> Failure {
        match e {
            LabanError::Io { .. } | LabanError::Format { .. } => Failure::Environment(e.into()),
            _ => Failure::Validation(e.into()),
        }
    }
}

impl From<LabanXmlError> for Failure {
    fn from(e: LabanXmlError) -> Failure {
        match e {
            LabanXmlError::Parse { .. } => Failure::Environment(e.into()),
            LabanXmlError::Validation { .. } => Failure::Validation(e.into()),
        }
    }
}

impl From<RecognizerError> for Failure {
    fn from(e: RecognizerError) -> Failure {
        match e {
            RecognizerError::Degenerate { .. } | RecognizerError::InvalidSkeleton { .. } | RecognizerError::Training(_) => {
                Failure::Validation(e.into())
            }
            _ => Failure::Environment(e.into()),
        }
    }
}

pub type CmdResult<T> = Result<T, Failure>;

fn open(path: &Path) -> CmdResult<fs::File> {
    fs::File::open(path).map_err(|e| Failure::environment(format!("cannot read {}: {e}", path.display())))
}

fn read_text(path: &Path) -> CmdResult<String> {
    fs::read_to_string(path).map_err(|e| Failure::environment(format!("cannot read {}: {e}", path.display())))
}

/// Writes to `path`, or to standard output when no path is given.
fn write_output(path: Option<&Path>, content: &str) -> CmdResult<()> {
    match path {
        Some(p) => fs::write(p, content).map_err(|e| Failure::environment(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn write_json<T: serde::Serialize>(path: Option<&Path>, value: &T) -> CmdResult<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(Failure::environment)?;
    text.push('\n');
    write_output(path, &text)
}

fn load_registry(dir: Option<&Path>) -> CmdResult<Registry> {
    Ok(match dir {
        Some(d) => Registry::load_dir(d)?,
        None => Registry::shipped()?,
    })
}

fn load_mapping_db(path: Option<&Path>) -> CmdResult<MappingDb> {
    match path {
        Some(p) => {
            if !p.is_file() {
                return Err(Failure::environment(format!("mapping database {} not found", p.display())));
            }
            Ok(MappingDb::load(p)?)
        }
        None => Ok(MappingDb::shipped()?),
    }
}

/// Runs one parsed command line.
pub fn run(cli: Cli) -> CmdResult<()> {
    match cli.command {
        Command::Transcribe(a) => cmd_transcribe(&a).map(|_| ()),
        Command::AnalyzeSync(a) => cmd_analyze_sync(&a).map(|_| ()),
        Command::ValidateOntology(a) => cmd_validate_ontology(&a).map(|_| ()),
        Command::Render(a) => cmd_render(&a),
        Command::Train(a) => cmd_train(&a).map(|_| ()),
        Command::Predict(a) => cmd_predict(&a).map(|_| ()),
    }
}
