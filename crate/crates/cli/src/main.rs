mod commands;
mod report;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::commands::{Command, RunConfig, VerifyTarget};

#[derive(Parser, Debug)]
#[command(
    name = "twoclosed",
    version,
    about = "Reproducible certificates for the groups G(m,p) acting on V⊗W"
)]
struct Cli {
    #[command(subcommand)]
    command: CliCommand,
    #[command(flatten)]
    opts: GlobalOpts,
}

#[derive(Args, Debug, Clone)]
struct GlobalOpts {
    /// Prime field order.
    #[arg(long, global = true)]
    p: Option<u32>,
    /// Dimension of W.
    #[arg(long, global = true)]
    m: Option<usize>,
    /// Number of slopes; must match --mu when both are given.
    #[arg(long, global = true)]
    z: Option<usize>,
    /// Comma-separated slopes, e.g. 1,2,3,4.
    #[arg(long, global = true, value_delimiter = ',')]
    mu: Option<Vec<u64>>,
    #[arg(long, global = true)]
    max_prime: Option<u64>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads; defaults to the number of CPUs.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<std::path::PathBuf>,
    /// Record wall-clock time per certificate. Reports stop being
    /// byte-identical across runs.
    #[arg(long, global = true)]
    timings: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Text,
}

#[derive(Subcommand, Debug)]
enum CliCommand {
    /// Number of orbitals of G(m,p).
    Rank,
    /// Sizes of the point-stabilizer orbits.
    Suborbits,
    /// Obstruction scan over primes up to --max-prime.
    Scan,
    #[command(subcommand)]
    Verify(VerifyCommand),
}

#[derive(Subcommand, Debug)]
enum VerifyCommand {
    /// One clique-structure lemma for the slopes in --mu.
    Lemma { name: String },
    /// Every union of nontrivial orbitals at p = 5 has extra automorphisms.
    #[command(name = "theorem-q5")]
    TheoremQ5,
    #[command(name = "theorem-q7")]
    TheoremQ7,
    #[command(name = "theorem-q13")]
    TheoremQ13,
    /// 2-closure certificate for p in {5, 7, 13}.
    TwoClosed,
    /// Rigidity of the two smallest λ-classes at p = 17.
    Q17,
    /// Reordering table for cross-ratios and the λ closed form.
    CrossRatioTable,
    /// All clique-structure lemmas for the slopes in --mu.
    Cliques,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let command = match cli.command {
        CliCommand::Rank => Command::Rank,
        CliCommand::Suborbits => Command::Suborbits,
        CliCommand::Scan => Command::Scan,
        CliCommand::Verify(v) => Command::Verify(match v {
            VerifyCommand::Lemma { name } => VerifyTarget::Lemma(name),
            VerifyCommand::TheoremQ5 => VerifyTarget::UnionCoverage(5),
            VerifyCommand::TheoremQ7 => VerifyTarget::UnionCoverage(7),
            VerifyCommand::TheoremQ13 => VerifyTarget::UnionCoverage(13),
            VerifyCommand::TwoClosed => VerifyTarget::TwoClosed,
            VerifyCommand::Q17 => VerifyTarget::Q17,
            VerifyCommand::CrossRatioTable => VerifyTarget::CrossRatioTable,
            VerifyCommand::Cliques => VerifyTarget::Cliques,
        }),
    };
    let o = cli.opts;
    let cfg = RunConfig {
        command,
        p: o.p,
        m: o.m,
        z: o.z,
        mus: o.mu,
        max_prime: o.max_prime,
        seed: o.seed,
        jobs: o.jobs,
        format: o.format,
        output_path: o.out,
        timings: o.timings,
    };
    match commands::run(&cfg) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
