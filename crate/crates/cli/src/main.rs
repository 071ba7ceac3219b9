//! `planlab`: plan verification, C*-RASP programs, datasets and theory checks.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

/// Exit statuses: 0 success or valid, 1 invalid verdict, 2 usage or input
/// error, 3 internal error or failed check.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Internal(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Internal(_) => 3,
        }
    }
}

pub type CmdResult = Result<Outcome, Failure>;

/// What a command reports besides its stdout: success, or a negative
/// verdict (invalid plan, rejected input, failed check).
#[derive(Debug, PartialEq, Eq)]
pub enum Outcome {
    Ok,
    Rejected,
    CheckFailed,
}

#[derive(Parser, Serialize, Debug)]
#[command(name = "planlab", version, about = "Plan verification and C*-RASP toolkit")]
pub struct Cli {
    /// Worker threads for generation and checks (output does not depend on it).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Also write the parsed command line, defaults included, to this file.
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Serialize, Debug)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Simulate a plan and print its verdict.
    Verify(VerifyArgs),
    /// Evaluate a program on an input word.
    RunCrasp(RunCraspArgs),
    /// Compile a verifier program for a domain.
    CompileCrasp(CompileArgs),
    /// Expand match lines over a finite value alphabet.
    Lower(LowerArgs),
    /// Encode a (domain, instance, plan) triple as a program input word.
    Encode(EncodeArgs),
    /// Generate dataset records.
    Gen(GenArgs),
    /// Summarize JSONL dataset files.
    Stats(StatsArgs),
    /// Run a brute-force theory check and print its report.
    CheckTheory(CheckArgs),
}

/// A domain file, or the id of a built-in variant (e.g. `grippers-wf`).
#[derive(Args, Serialize, Debug)]
pub struct TaskArgs {
    #[arg(long)]
    pub domain: String,
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long)]
    pub plan: PathBuf,
}

#[derive(Args, Serialize, Debug)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub task: TaskArgs,
    /// Include every visited state.
    #[arg(long)]
    pub trace: bool,
}

#[derive(Args, Serialize, Debug)]
pub struct RunCraspArgs {
    #[arg(long)]
    pub program: PathBuf,
    /// Word file: `#n` for extended values, bare or quoted Σ symbols.
    #[arg(long)]
    pub input: PathBuf,
    /// Print the evaluation table as TSV instead of the JSON verdict.
    #[arg(long)]
    pub dump_table: bool,
    /// Add the static program classification to the report.
    #[arg(long)]
    pub classify: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeArg {
    Wf,
    Df,
}

#[derive(Args, Serialize, Debug)]
pub struct CompileArgs {
    #[arg(long)]
    pub domain: String,
    #[arg(long, value_enum)]
    pub mode: ModeArg,
    /// Object names (whitespace separated); selects the fixed-universe
    /// construction.
    #[arg(long)]
    pub objects: Option<PathBuf>,
    /// Number objects from this value instead of reading `object_N` names.
    #[arg(long, requires = "objects")]
    pub base: Option<u64>,
    /// Write the program here and print the report on stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write the report here (when the program goes to stdout).
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Args, Serialize, Debug)]
pub struct LowerArgs {
    #[arg(long)]
    pub program: PathBuf,
    /// Extended values the inputs may carry, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub values: Vec<u64>,
    #[arg(long, default_value_t = planlab::crasp::DEFAULT_EXPANSION_BUDGET)]
    pub budget: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Serialize, Debug)]
pub struct EncodeArgs {
    #[command(flatten)]
    pub task: TaskArgs,
    /// Number objects from this value instead of reading `object_N` names.
    #[arg(long)]
    pub base: Option<u64>,
}

#[derive(Args, Serialize, Debug)]
pub struct GenArgs {
    /// Variant id: grippers-wf, grippers-df, colors-wf, colors-strips,
    /// lightsout-ce, lightsout-wf.
    pub variant: String,
    #[arg(long, env = "PLANLAB_SEED", default_value_t = 0)]
    pub seed: u64,
    /// One split, or `all`. Defaults to `all` with --out, else `train`.
    #[arg(long)]
    pub split: Option<String>,
    /// Records per split (rounded up to even). Defaults to the scaled-down
    /// table sizes for `all`, else 100.
    #[arg(long)]
    pub count: Option<usize>,
    /// In-distribution plan lengths, `lo:hi`.
    #[arg(long, default_value = "11:100")]
    pub lengths: String,
    /// Out-of-distribution plan lengths, `lo:hi`.
    #[arg(long, default_value = "101:200")]
    pub ood_lengths: String,
    #[arg(long)]
    pub max_objects: Option<usize>,
    /// Largest object index in generated names.
    #[arg(long)]
    pub name_pool: Option<usize>,
    #[arg(long, default_value_t = 0.5)]
    pub nonexec_share: f64,
    #[arg(long, default_value_t = 0.5)]
    pub df_mix: f64,
    /// Directory for split files, stats and manifest; JSONL goes to stdout
    /// without it.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Serialize, Debug)]
pub struct StatsArgs {
    #[arg(required = true)]
    pub files: Vec<PathBuf>,
}

#[derive(Args, Serialize, Debug)]
pub struct CheckArgs {
    #[command(subcommand)]
    pub check: Check,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ConstructionArg {
    Fixed,
    Variable,
}

#[derive(Subcommand, Serialize, Debug)]
#[serde(rename_all = "kebab-case")]
pub enum Check {
    /// Plan validity on the FlipFlop instance against `Σ* b e*`.
    Flipflop {
        #[arg(long, default_value_t = 10)]
        max_len: usize,
    },
    /// Lights Out simulation against the GF(2) verdict.
    Parity {
        /// `RxC`.
        #[arg(long, default_value = "5x5")]
        board: String,
        /// Enumerate every press sequence (boards up to 9 cells, length 6).
        #[arg(long)]
        exhaustive: bool,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long)]
        max_len: Option<usize>,
        /// Also run this many press-twice checks.
        #[arg(long, default_value_t = 0)]
        toggle: usize,
        #[arg(long, env = "PLANLAB_SEED", default_value_t = 0)]
        seed: u64,
    },
    /// Compiled verifier acceptance against simulation on generated records.
    Compiled {
        #[arg(long)]
        variant: String,
        #[arg(long, value_enum, default_value = "variable")]
        construction: ConstructionArg,
        /// Generated valid/invalid pairs; extra mutations and degenerate
        /// cases are added on top.
        #[arg(long, default_value_t = 500)]
        pairs: usize,
        #[arg(long, default_value = "11:60")]
        lengths: String,
        #[arg(long)]
        max_objects: Option<usize>,
        #[arg(long, env = "PLANLAB_SEED", default_value_t = 0)]
        seed: u64,
    },
    /// Original against lowered programs on every short string.
    Lowering {
        /// A single program; the built-in suite when absent.
        #[arg(long)]
        program: Option<PathBuf>,
        #[arg(long, default_value_t = 20)]
        programs: usize,
        #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
        values: Vec<u64>,
        #[arg(long, default_value_t = 8)]
        max_len: usize,
        #[arg(long, env = "PLANLAB_SEED", default_value_t = 0)]
        seed: u64,
    },
    /// Acceptance under shifts of every extended value.
    Translation {
        #[arg(long, default_value_t = 1000)]
        pairs: usize,
        #[arg(long, value_delimiter = ',', default_value = "1,17,1000")]
        deltas: Vec<u64>,
        #[arg(long, env = "PLANLAB_SEED", default_value_t = 0)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(3);
        }
    }
    if let Some(path) = &cli.manifest {
        if let Err(e) = commands::write_manifest(path, &cli) {
            eprintln!("error: {e:?}");
            return ExitCode::from(e.code());
        }
    }
    match commands::run(&cli) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::Rejected) => ExitCode::from(1),
        Ok(Outcome::CheckFailed) => ExitCode::from(3),
        Err(e) => {
            match &e {
                Failure::Usage(m) | Failure::Internal(m) => eprintln!("error: {m}"),
            }
            ExitCode::from(e.code())
        }
    }
}
