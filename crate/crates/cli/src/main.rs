mod commands;
mod config;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use lectometer::fusion::ReportFormat;

use config::EngineFlags;

#[derive(Parser, Debug)]
#[command(name = "lectometer", version, about = "Lecture-style quality scoring")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Score a recorded session and write report files.
    Score(ScoreArgs),
    /// Score frame records from standard input as they arrive.
    Stream(StreamArgs),
    /// Evaluate a report against annotator ratings.
    Eval(EvalArgs),
    /// Generate a synthetic session with known scores.
    Synth(SynthArgs),
}

#[derive(Args, Debug)]
struct ScoreArgs {
    /// Line-delimited frame observations.
    #[arg(long)]
    frames: PathBuf,
    /// Mono 16-bit PCM WAV track.
    #[arg(long)]
    audio: Option<PathBuf>,
    /// Line-delimited word events.
    #[arg(long)]
    words: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// `json` writes report.json; `csv` also writes report.csv.
    #[arg(long, default_value = "json")]
    format: ReportFormat,
    #[command(flatten)]
    engine: EngineFlags,
}

#[derive(Args, Debug)]
struct StreamArgs {
    #[arg(long)]
    audio: Option<PathBuf>,
    #[arg(long)]
    words: Option<PathBuf>,
    #[command(flatten)]
    engine: EngineFlags,
}

#[derive(Args, Debug)]
struct EvalArgs {
    /// report.json or report.csv produced by `score`.
    #[arg(long)]
    report: PathBuf,
    #[arg(long)]
    annotations: PathBuf,
    /// `item_id,frame_idx` map. Without it item ids are frame indices.
    #[arg(long)]
    items: Option<PathBuf>,
    /// Significance level for the human-vs-machine tests.
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct SynthArgs {
    /// Probability that each modality observation is positive.
    #[arg(long, default_value_t = 0.5)]
    quality: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 600_000)]
    duration_ms: u64,
    #[arg(long)]
    p_expression: Option<f64>,
    #[arg(long)]
    p_activity: Option<f64>,
    #[arg(long)]
    p_pose: Option<f64>,
    #[arg(long)]
    p_hand: Option<f64>,
    #[arg(long)]
    p_speech: Option<f64>,
    #[arg(long, default_value = ".")]
    out: PathBuf,
    #[command(flatten)]
    engine: EngineFlags,
}

/// A failure caused by the user's input rather than by this program.
#[derive(Debug)]
pub struct InputError(String);

impl InputError {
    pub fn new(msg: impl Into<String>) -> Self {
        InputError(msg.into())
    }
}

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for InputError {}

fn exit_code(err: &anyhow::Error) -> u8 {
    let input = err
        .chain()
        .any(|c| c.is::<InputError>() || c.is::<lectometer::Error>() || c.is::<std::io::Error>());
    if input {
        2
    } else {
        1
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Score(a) => commands::score(a),
        Command::Stream(a) => commands::stream(a),
        Command::Eval(a) => commands::eval(a),
        Command::Synth(a) => commands::synth(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
