use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use octofast::{certified_pipeline, Algorithm};
use octofast_cli::{Format, Mode, VerifyOptions};

/// Hyperbolic-octonion multiplication: schoolbook and 26-multiplication kernels.
///
/// Operands are 8 comma-separated coefficients in the order 1,e1,e2,e3,ε4,ε5,ε6,ε7.
/// Exact mode accepts integers, decimals and p/q fractions.
#[derive(Parser, Debug)]
#[command(name = "octofast", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Multiply two elements and print the 8 product coefficients.
    Mul {
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long, allow_hyphen_values = true)]
        b: String,
        #[arg(long, value_enum, default_value_t = AlgoArg::Fast)]
        algo: AlgoArg,
        #[arg(long, value_enum, default_value_t = ModeArg::Exact)]
        mode: ModeArg,
    },
    /// Check the fast kernel: basis table, random products and symbolic proof.
    Verify {
        /// Random operand pairs; 0 skips the random suite.
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        #[arg(long, env = "OCTOFAST_SEED", default_value_t = 42)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = ModeArg::Exact)]
        mode: ModeArg,
        /// Random coefficients are integers in [-RANGE, RANGE].
        #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(i64).range(1..))]
        range: i64,
    },
    /// Print instrumented operation counts.
    Count {
        #[arg(long, value_enum, default_value_t = AlgoArg::Fast)]
        algo: AlgoArg,
    },
    /// Time both kernels on identical seeded float operands (CSV).
    Bench {
        #[arg(long, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(1..))]
        trials: u64,
        #[arg(long, env = "OCTOFAST_SEED", default_value_t = 42)]
        seed: u64,
    },
    /// Print the fast kernel as a straight-line program.
    Emit {
        #[arg(long, value_enum, default_value_t = FormatArg::Text)]
        format: FormatArg,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum AlgoArg {
    Naive,
    Fast,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Exact,
    Float,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormatArg {
    Text,
    Csv,
}

impl From<AlgoArg> for Algorithm {
    fn from(a: AlgoArg) -> Self {
        match a {
            AlgoArg::Naive => Algorithm::Naive,
            AlgoArg::Fast => Algorithm::Fast,
        }
    }
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Exact => Mode::Exact,
            ModeArg::Float => Mode::Float,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Mul { x, b, algo, mode } => match octofast_cli::multiply(&x, &b, algo.into(), mode.into()) {
            Ok(y) => println!("{y}"),
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
        },
        Command::Verify {
            trials,
            seed,
            mode,
            range,
        } => {
            let opts = VerifyOptions {
                trials,
                seed,
                mode: mode.into(),
                range,
            };
            let outcome = octofast_cli::verify(certified_pipeline(), &opts);
            for line in &outcome.lines {
                println!("{line}");
            }
            if !outcome.passed {
                return ExitCode::from(1);
            }
        }
        Command::Count { algo } => println!("{}", octofast_cli::count(algo.into())),
        Command::Bench { trials, seed } => print!("{}", octofast_cli::bench(trials, seed)),
        Command::Emit { format } => print!(
            "{}",
            octofast_cli::emit(match format {
                FormatArg::Text => Format::Text,
                FormatArg::Csv => Format::Csv,
            })
        ),
    }
    ExitCode::SUCCESS
}
