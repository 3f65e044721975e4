//! Batch front-end: analyze a melody, extend it to a piece, or run the service.

pub mod config;
pub mod report;

use std::ffi::OsString;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};

use cadenza_core::capture::write_pitch_csv;
use cadenza_core::corpus::CorpusDb;
use cadenza_core::explainer::Level;
use cadenza_service::doc::AnalysisDoc;
use cadenza_service::{decode_input, AppState, InputFormat, ServiceConfig, ServiceError, Session};
use clap::{Parser, Subcommand};
use thiserror::Error;

use config::{FileConfig, Overrides, RunConfig};

pub const EXIT_OK: u8 = 0;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_INPUT: u8 = 3;
pub const EXIT_ENGINE: u8 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Engine(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Input(_) => EXIT_INPUT,
            CliError::Engine(_) => EXIT_ENGINE,
        }
    }
}

impl From<ServiceError> for CliError {
    fn from(e: ServiceError) -> Self {
        match e {
            e if e.is_input_error() => CliError::Input(e.to_string()),
            ServiceError::BadRequest(m) => CliError::Usage(m),
            e => CliError::Engine(e.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "cadenza", version, about = "Extend a melody into a two-hand piece and explain it")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print key, chords, degrees and fitted rhythm of a melody
    Analyze {
        /// Melody as .wav or .mid
        #[arg(long = "in")]
        input: PathBuf,
        /// Tempo for audio input; overrides the tempo of a MIDI file
        #[arg(long)]
        bpm: Option<u16>,
    },
    /// Add phrases, close with a cadence, write MIDI and an optional report
    Continue {
        #[arg(long = "in")]
        input: PathBuf,
        /// Number of continue clicks before the ending
        #[arg(long)]
        phrases: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        bpm: Option<u16>,
        /// beginner, intermediate or advanced
        #[arg(long, value_parser = parse_level)]
        level: Option<Level>,
        #[arg(long)]
        out: PathBuf,
        /// Markdown report path
        #[arg(long)]
        report: Option<PathBuf>,
        /// Frame-by-frame pitch track of audio input, as CSV
        #[arg(long)]
        pitch_csv: Option<PathBuf>,
        /// TOML settings; flags take precedence
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Run the HTTP service
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: std::net::IpAddr,
    },
}

fn parse_level(s: &str) -> Result<Level, String> {
    s.parse().map_err(|_| format!("expected beginner, intermediate or advanced, got `{s}`"))
}

fn read_input(path: &Path) -> Result<Vec<u8>, CliError> {
    std::fs::read(path).map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    std::fs::write(path, bytes).map_err(|e| CliError::Engine(format!("cannot write {}: {e}", path.display())))
}

fn file_name(path: &Path) -> Option<String> {
    path.file_name().map(|n| n.to_string_lossy().into_owned())
}

fn load(path: &Path, config: cadenza_core::generator::GenerationConfig) -> Result<(Session, Vec<u8>), CliError> {
    let bytes = read_input(path)?;
    let mut session = Session::new("cli", config).map_err(|e| CliError::Usage(e.to_string()))?;
    session
        .upload(bytes.clone(), file_name(path).as_deref())
        .map_err(|e| CliError::Input(e.to_string()))?;
    Ok((session, bytes))
}

pub fn analyze(input: &Path, bpm: Option<u16>) -> Result<AnalysisDoc, CliError> {
    let db = CorpusDb::builtin();
    let (mut session, _) = load(input, Default::default())?;
    Ok(session.process(bpm, &db)?)
}

/// Everything `continue` produces, before it is written anywhere.
pub struct Outcome {
    pub midi: Vec<u8>,
    pub report: String,
    pub pitch_csv: Option<Vec<u8>>,
}

pub fn compose(input: &Path, run: &RunConfig) -> Result<Outcome, CliError> {
    let db = CorpusDb::builtin();
    let (mut session, bytes) = load(input, run.generation)?;
    let analysis = session.process(run.bpm, &db)?;
    let mut phrases = Vec::with_capacity(run.phrases);
    for _ in 0..run.phrases {
        phrases.push(session.continue_phrase(&db)?);
    }
    session.end()?;
    let midi = session.export()?;
    let name = file_name(input).unwrap_or_default();
    let report = report::markdown(&name, run.generation.seed, run.level, &analysis, &phrases, &session, &db)?;
    let pitch_csv = match InputFormat::detect(&bytes, Some(&name))? {
        InputFormat::Wav => {
            let track = decode_input(InputFormat::Wav, &bytes, run.bpm)?.pitch_track.expect("audio has a track");
            let mut csv = Vec::new();
            write_pitch_csv(&track, &mut csv).expect("writing to memory");
            Some(csv)
        }
        InputFormat::Midi => None,
    };
    Ok(Outcome { midi, report, pitch_csv })
}

fn serve(host: std::net::IpAddr, port: u16) -> Result<(), CliError> {
    let rt = tokio::runtime::Runtime::new().map_err(|e| CliError::Engine(e.to_string()))?;
    let state = AppState::new(CorpusDb::builtin(), ServiceConfig::from_env());
    let addr = SocketAddr::new(host, port);
    eprintln!("listening on http://{addr}/api/v1");
    rt.block_on(cadenza_service::serve(addr, state)).map_err(|e| CliError::Engine(format!("cannot serve on {addr}: {e}")))
}

fn execute(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Analyze { input, bpm } => {
            let a = analyze(&input, bpm)?;
            for w in &a.warnings {
                eprintln!("warning: {w}");
            }
            print!("{}", report::analysis_text(&a));
        }
        Command::Continue { input, phrases, seed, bpm, level, out, report, pitch_csv, config } => {
            let file = match &config {
                Some(p) => FileConfig::load(p)?,
                None => FileConfig::default(),
            };
            let run = config::merge(file, Overrides { phrases, seed, bpm, level })?;
            let outcome = compose(&input, &run)?;
            write_file(&out, &outcome.midi)?;
            if let Some(p) = report {
                write_file(&p, outcome.report.as_bytes())?;
            }
            if let Some(p) = pitch_csv {
                match &outcome.pitch_csv {
                    Some(csv) => write_file(&p, csv)?,
                    None => eprintln!("warning: no pitch track for MIDI input; {} not written", p.display()),
                }
            }
        }
        Command::Serve { host, port } => serve(host, port)?,
    }
    Ok(())
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
