//! Argument parsing and dispatch. `main.rs` only forwards to [`run`].

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use cbddl_core::sim::SimConfig;
use clap::{ArgGroup, Args, Parser, Subcommand};

use crate::commands;

#[derive(Debug, Parser)]
#[command(name = "cbddl", version, about = "Validate, simulate, score and analyze CBDDL task suites")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse and check task files; directories expand to their *.cbddl files.
    Validate(ValidateArgs),
    /// Roll out one action file and print the trajectory as JSON Lines.
    Replay(ReplayArgs),
    /// Score a suite manifest against recorded action files.
    Evaluate(EvaluateArgs),
    /// Produce perturbed instructions, visual profiles and images.
    Perturb(PerturbArgs),
    /// Pairwise task distances and a 2D layout.
    Diversity(DiversityArgs),
    /// Rebuild the suite CSV from per-task evaluation reports.
    Report(ReportArgs),
}

/// Simulator settings shared by `replay` and `evaluate`.
#[derive(Debug, Clone, Args)]
pub struct SimArgs {
    /// Episode length cap.
    #[arg(long, default_value_t = SimConfig::default().max_steps)]
    pub max_steps: usize,
    /// Penalty stiffness in N/m.
    #[arg(long, default_value_t = SimConfig::default().k_pen)]
    pub k_pen: f64,
    /// Seconds per step.
    #[arg(long, default_value_t = SimConfig::default().dt)]
    pub dt: f64,
    /// Half width in meters of the uniform jitter added to `At` placements.
    #[arg(long, default_value_t = 0.0)]
    pub jitter: f64,
}

impl SimArgs {
    pub fn config(&self) -> SimConfig {
        SimConfig {
            max_steps: self.max_steps,
            k_pen: self.k_pen,
            dt: self.dt,
            placement_jitter: self.jitter,
            ..SimConfig::default()
        }
    }
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[arg(required = true)]
    pub paths: Vec<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReplayArgs {
    pub task: PathBuf,
    /// JSON Lines action file.
    #[arg(long)]
    pub actions: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Episode index used in seed derivation.
    #[arg(long, default_value_t = 0)]
    pub episode: u64,
    #[command(flatten)]
    pub sim: SimArgs,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    pub manifest: PathBuf,
    /// Directory holding `<task name>.jsonl` action files.
    #[arg(long)]
    pub actions: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Episodes per task, overriding the manifest.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub episodes: Option<u64>,
    /// Seed base, overriding the manifest.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads; 0 picks one per core.
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
    #[command(flatten)]
    pub sim: SimArgs,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("level").required(true).multiple(true).args(["w", "v"])))]
pub struct PerturbArgs {
    pub task: PathBuf,
    /// Number of instruction slots to substitute (W-level).
    #[arg(long, value_parser = clap::value_parser!(u8).range(0..=4))]
    pub w: Option<u8>,
    /// Visual perturbation level (V-level).
    #[arg(long, value_parser = clap::value_parser!(u8).range(0..=4))]
    pub v: Option<u8>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Instruction template such as `Pick the {1:apple}`; inferred from
    /// the task's `:language` when absent.
    #[arg(long)]
    pub template: Option<String>,
    /// Binary PPM image to perturb with the sampled profile; needs --v and --out.
    #[arg(long, requires_all = ["v", "out"])]
    pub image: Option<PathBuf>,
    /// Write instruction.txt, profile.json and image.ppm here instead of printing.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DiversityArgs {
    /// Task files or directories of them.
    #[arg(required = true)]
    pub paths: Vec<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    /// JSON cost model `{"weights": {...}, "update_base": w}`.
    #[arg(long)]
    pub cost_model: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = cbddl_core::diversity::DEFAULT_ITERATIONS)]
    pub iterations: usize,
    /// Worker threads; 0 picks one per core.
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Directory of per-task report JSON files.
    pub dir: PathBuf,
    /// Write `suite.csv` here instead of printing.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { stdout.write_all(text.as_bytes()) } else { stderr.write_all(text.as_bytes()) };
            return code;
        }
    };
    let result = match &cli.command {
        Command::Validate(a) => commands::validate(a, stdout),
        Command::Replay(a) => commands::replay(a, stdout),
        Command::Evaluate(a) => commands::evaluate(a, stderr),
        Command::Perturb(a) => commands::perturb(a, stdout),
        Command::Diversity(a) => commands::diversity(a),
        Command::Report(a) => commands::report(a, stdout),
    };
    let _ = stdout.flush();
    match result {
        Ok(()) => 0,
        Err(e) => {
            if !matches!(e, crate::CliError::Reported) {
                let _ = writeln!(stderr, "error: {e}");
            }
            e.exit_code()
        }
    }
}
