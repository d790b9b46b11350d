//! `geogt`: run exact coarse-geometry experiments and emit deterministic
//! JSON or CSV reports.

mod commands;
mod inputs;
mod report;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::Value;

pub const MEMORY_ENV: &str = "GEOGT_MEMORY_BUDGET";

#[derive(Parser, Debug)]
#[command(name = "geogt", version, about = "Exact experiments in coarse geometry and arithmetic groups")]
struct Cli {
    /// Worker threads; affects wall time only.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Write the report here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Root table and rank-2 classification of every pair.
    Rootsys(commands::RootsysArgs),
    /// Basis verification and commutator coefficients.
    Steinberg(commands::SteinbergArgs),
    /// Short words for large root elements.
    Logword(commands::LogwordArgs),
    /// Quadratic integer rings: units, identities, ideal norms, stubborn witnesses.
    Numring(commands::NumringArgs),
    /// Four-point hyperbolicity constant of a graph.
    Delta(commands::DeltaArgs),
    /// Quasi-isometry constants of a vertex map.
    Qi(commands::QiArgs),
    /// Fiber product of two coarsely equivariant maps.
    Fiber(commands::FiberArgs),
    /// Ball in a Cayley graph.
    Cayley(commands::CayleyArgs),
    /// Cayley ball with cosets of subgroups coned off.
    Cone(commands::ConeArgs),
    /// Combinatorial horoballs: admissibility, δ profiles, distance formula.
    Horoball(commands::HoroballArgs),
    /// Classify group elements acting on a finite space.
    Classify(commands::ActionArgs),
    /// Quasicharacters and pseudocharacters of an action.
    Pseudochar(commands::ActionArgs),
    /// Bounded-generation diameter of SL(n, Z/p).
    Bgen(commands::BgenArgs),
}

#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Reject(String),
    Budget(String),
    Io(String),
    Internal(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 64,
            Failure::Reject(_) => 2,
            Failure::Budget(_) => 3,
            Failure::Io(_) => 74,
            Failure::Internal(_) => 70,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Reject(m) | Failure::Budget(m) | Failure::Io(m) | Failure::Internal(m) => m,
        }
    }
}

impl From<geogt::Error> for Failure {
    fn from(e: geogt::Error) -> Self {
        match e {
            geogt::Error::Budget(_) => Failure::Budget(e.to_string()),
            geogt::Error::Internal(_) => Failure::Internal(e.to_string()),
            _ => Failure::Reject(e.to_string()),
        }
    }
}

pub enum Output {
    Json(Value),
    Csv(String),
}

fn parse_bytes(s: &str) -> Option<u64> {
    let s = s.trim();
    let (num, mult) = match s.chars().last()? {
        'k' | 'K' => (&s[..s.len() - 1], 1u64 << 10),
        'm' | 'M' => (&s[..s.len() - 1], 1 << 20),
        'g' | 'G' => (&s[..s.len() - 1], 1 << 30),
        _ => (s, 1),
    };
    num.trim().parse::<u64>().ok()?.checked_mul(mult)
}

fn run(cli: Cli) -> Result<(), Failure> {
    if let Ok(v) = std::env::var(MEMORY_ENV) {
        let bytes = parse_bytes(&v).ok_or_else(|| Failure::Usage(format!("{MEMORY_ENV}={v:?} is not a byte count")))?;
        geogt::budget::set_memory_budget(bytes);
    }
    if let Some(w) = cli.workers {
        if w == 0 {
            return Err(Failure::Usage("--workers must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build_global()
            .map_err(|e| Failure::Internal(e.to_string()))?;
    }
    let fmt = cli.format;
    let start = Instant::now();
    let (name, config, out) = match &cli.command {
        Command::Rootsys(a) => ("rootsys", echo(a), commands::rootsys(a, fmt)?),
        Command::Steinberg(a) => ("steinberg", echo(a), commands::steinberg(a)?),
        Command::Logword(a) => ("logword", echo(a), commands::logword(a)?),
        Command::Numring(a) => ("numring", echo(a), commands::numring(a)?),
        Command::Delta(a) => ("delta", echo(a), commands::delta(a)?),
        Command::Qi(a) => ("qi", echo(a), commands::qi(a)?),
        Command::Fiber(a) => ("fiber", echo(a), commands::fiber(a)?),
        Command::Cayley(a) => ("cayley", echo(a), commands::cayley(a)?),
        Command::Cone(a) => ("cone", echo(a), commands::cone(a)?),
        Command::Horoball(a) => ("horoball", echo(a), commands::horoball(a, fmt)?),
        Command::Classify(a) => ("classify", echo(a), commands::classify(a)?),
        Command::Pseudochar(a) => ("pseudochar", echo(a), commands::pseudochar(a)?),
        Command::Bgen(a) => ("bgen", echo(a), commands::bgen(a)?),
    };
    let text = match out {
        Output::Json(v) => {
            if fmt == Format::Csv {
                return Err(Failure::Usage(format!("{name} has no CSV report")));
            }
            report::json_document(name, config, v)
        }
        Output::Csv(s) => {
            eprintln!("fingerprint: {}", report::fingerprint(s.as_bytes()));
            s
        }
    };
    eprintln!("{name}: {:.3}s", start.elapsed().as_secs_f64());
    match &cli.output {
        Some(path) => std::fs::write(path, text).map_err(|e| Failure::Io(format!("{}: {e}", path.display()))),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Failure::Io(e.to_string())),
    }
}

fn echo<T: Serialize>(a: &T) -> Value {
    serde_json::to_value(a).expect("arguments serialize")
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 64,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
