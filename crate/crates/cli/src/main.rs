use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

mod commands;
mod io;

/// Finite-state dimension of digit sequences.
#[derive(Debug, Parser, Serialize)]
#[command(name = "fsdim", version)]
pub struct Cli {
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    /// Write digits of a constructed sequence.
    Generate(GenerateArgs),
    /// Block-entropy matrix over block lengths and checkpoints.
    Entropy(EntropyArgs),
    /// Weyl averages S_n(k) over checkpoints.
    Weyl(WeylArgs),
    /// Dimension estimate (lower and upper) from block entropies.
    Dims(EntropyArgs),
    /// Entropy profiles and Fourier coefficients of analytic measures.
    Measure(MeasureArgs),
    /// Certified digits of m·x mod 1 or x + p/q mod 1.
    Arith(ArithArgs),
    /// s-gale of a finite-state gambler along a sequence.
    Gamble(GambleArgs),
    /// Run the acceptance checks and print a PASS/FAIL table.
    Repro(ReproArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GeneratorKind {
    Champernowne,
    Periodic,
    Diluted,
    Alternating,
    MuChampernowne,
}

#[derive(Debug, Args, Serialize)]
pub struct GenerateArgs {
    pub kind: GeneratorKind,
    #[arg(long, default_value_t = 2)]
    pub base: u32,
    /// Number of digits to write.
    #[arg(long)]
    pub n: usize,
    /// Output file (stdout if absent).
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    /// Digits of the period, for `periodic`.
    #[arg(long)]
    pub period: Option<String>,
    /// Dilution pattern, e.g. `0*` or `0**0`.
    #[arg(long)]
    pub pattern: Option<String>,
    /// Pattern of odd stages, for `alternating`.
    #[arg(long, default_value = "0*")]
    pub odd: String,
    /// Pattern of even stages, for `alternating`.
    #[arg(long, default_value = "0**0")]
    pub even: String,
    #[arg(long, default_value_t = 1024)]
    pub first_stage: usize,
    #[arg(long, default_value_t = 4)]
    pub ratio: usize,
    #[arg(long, default_value_t = 8)]
    pub stages: usize,
    /// Digits file filling the wildcards (default: Champernowne in `--base`).
    #[arg(long)]
    pub fill: Option<PathBuf>,
    /// Measure spec (JSON), for `mu-champernowne`.
    #[arg(long)]
    pub measure: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct EntropyArgs {
    #[arg(short, long)]
    pub input: PathBuf,
    #[arg(long, default_value = "sliding")]
    pub mode: fsdim::entropy::Mode,
    /// Block lengths, e.g. `1,2,4,8` or `1..8`.
    #[arg(long, default_value = "1,2,4,8")]
    pub l: String,
    /// `geometric`, `geometric:<e>`, `linear:<count>` or a list.
    #[arg(long, default_value = "geometric")]
    pub checkpoints: String,
    /// Prefix length (default: the whole file).
    #[arg(long)]
    pub n: Option<usize>,
    /// Tail statistics use checkpoints at or beyond this fraction of n.
    #[arg(long, default_value_t = 0.5)]
    pub burn_in: f64,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct WeylArgs {
    #[arg(short, long)]
    pub input: PathBuf,
    /// Frequencies, e.g. `1..8` or `-3,5`.
    #[arg(long, default_value = "1..8", allow_hyphen_values = true)]
    pub k: String,
    #[arg(long, default_value = "geometric")]
    pub checkpoints: String,
    /// Digits used per phase value.
    #[arg(long, default_value_t = 64)]
    pub depth: usize,
    #[arg(long)]
    pub n: Option<usize>,
    /// CSV with columns k, n, re, im, err_bound.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct MeasureArgs {
    /// Measure spec (JSON).
    #[arg(long)]
    pub spec: PathBuf,
    #[command(subcommand)]
    pub action: MeasureAction,
    #[arg(long, global = true)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MeasureAction {
    /// H_n(μ)/n over native cylinders.
    Average {
        #[arg(long, default_value = "1..12")]
        n: String,
    },
    /// H^m_n(μ)/(n log m).
    Renyi {
        #[arg(long, default_value_t = 2)]
        m: u32,
        #[arg(long, default_value = "1..12")]
        n: String,
    },
    /// Compare factors m1 and m2 at depth l.
    Invariance {
        #[arg(long, default_value_t = 2)]
        m1: u32,
        #[arg(long, default_value_t = 3)]
        m2: u32,
        #[arg(long, default_value = "4..12")]
        l: String,
    },
    /// Fourier coefficients from cylinder masses at depth L.
    Fourier {
        #[arg(long, default_value = "-4..4", allow_hyphen_values = true)]
        k: String,
        #[arg(long, default_value_t = 16)]
        depth: usize,
        /// Push the measure forward by this factor first.
        #[arg(long)]
        push: Option<u32>,
    },
    /// Mass of one cylinder.
    Cylinder {
        #[arg(long)]
        word: String,
    },
}

#[derive(Debug, Args, Serialize)]
pub struct ArithArgs {
    #[arg(short, long)]
    pub input: PathBuf,
    /// Integer multiplier m.
    #[arg(long, conflicts_with = "add", required_unless_present = "add")]
    pub mul: Option<u64>,
    /// Rational p/q to add.
    #[arg(long)]
    pub add: Option<String>,
    /// Output digits required.
    #[arg(long)]
    pub want: usize,
    /// Digits file for the result (stdout if absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Certification metadata as JSON.
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct GambleArgs {
    /// Gambler spec (JSON).
    #[arg(long)]
    pub gambler: PathBuf,
    #[arg(short, long)]
    pub input: PathBuf,
    #[arg(long, default_value_t = 1.0)]
    pub s: f64,
    #[arg(long, default_value = "geometric")]
    pub checkpoints: String,
    #[arg(long)]
    pub n: Option<usize>,
    /// log2 capital above which a rising gale counts as succeeding.
    #[arg(long, default_value_t = 20.0)]
    pub threshold: f64,
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct ReproArgs {
    /// `all`, a criterion number, or `lemma41` for the stage table.
    #[arg(long, default_value = "all")]
    pub case: String,
    #[arg(long)]
    pub json: Option<PathBuf>,
}

/// Failure classes mapped to exit codes.
#[derive(Debug)]
pub enum Failure {
    /// Bad flags, files or parameters (exit 2).
    Validation(String),
    /// A computation failed or a check did not hold (exit 3).
    Computation(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Validation(_) => 2,
            Failure::Computation(_) => 3,
        }
    }
}

pub type Outcome<T> = std::result::Result<T, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    if let Some(t) = cli.threads {
        if t == 0 {
            eprintln!("error: --threads must be positive");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(3);
        }
    }
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let (Failure::Validation(m) | Failure::Computation(m)) = &f;
            eprintln!("error: {m}");
            ExitCode::from(f.code())
        }
    }
}
