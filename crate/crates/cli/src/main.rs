use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;
mod output;

use output::OutputFormat;

/// Infinite products of rational functions with Thue-Morse and
/// Rudin-Shapiro exponents.
#[derive(Parser)]
#[command(name = "digitprod", version, about)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
pub struct Global {
    /// Decimal digits of working precision.
    #[arg(long, global = true, env = "DIGITPROD_DIGITS", default_value_t = 60)]
    pub digits: u32,
    /// Dyadic split levels for pm-t products.
    #[arg(long, global = true, default_value_t = digitprod::evaluator::DEFAULT_SPLIT_LEVELS)]
    pub split_levels: u32,
    /// Terms summed after splitting (default 4096 for Thue-Morse, 1000000 for Rudin-Shapiro).
    #[arg(long, global = true)]
    pub terms: Option<u64>,
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Text)]
    pub format: OutputFormat,
    /// Absolute tolerance for verification (default: 10x the error estimate).
    #[arg(long, global = true)]
    pub tolerance: Option<f64>,
    /// Write the output here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Print the first values of an exponent sequence.
    Seq {
        /// t, v, pm-t, pm-v or plain
        kind: String,
        #[arg(long, default_value_t = 16)]
        count: u64,
    },
    /// Evaluate a product such as "(2n+1)/(2n+2)".
    Eval {
        rational: String,
        #[arg(long, default_value = "pm-t")]
        kind: String,
        #[arg(long, default_value_t = 0)]
        start: u64,
    },
    /// Check catalog identities numerically (and symbolically for pm-t).
    Verify {
        name: Option<String>,
        #[arg(long, conflicts_with = "name")]
        all: bool,
    },
    /// List the identity catalog.
    Catalog,
    /// g(0) and the Flajolet-Martin constants.
    Constants {
        #[arg(value_parser = ["g0", "fm-R", "fm-phi"])]
        name: String,
    },
    /// g(x) = f(x/2, (x+1)/2)/(x+1).
    G {
        #[arg(long, allow_hyphen_values = true)]
        x: String,
    },
    /// Signs of truncated remainders of the iterated difference sums.
    Probe {
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        #[arg(long, default_value_t = 1)]
        k: u32,
        #[arg(long, default_value_t = 64)]
        n_max: u64,
        #[arg(long, default_value_t = 1 << 20)]
        n_tail: u64,
    },
    /// Tabulate h(x) = f(x/2, (x+1)/2) and check that it decreases.
    Scan {
        #[arg(long)]
        lo: String,
        #[arg(long)]
        hi: String,
        #[arg(long, default_value_t = 40)]
        steps: u32,
    },
    /// Reduce a G-expression, or a family instance, to an exact constant.
    Reduce {
        #[arg(required_unless_present = "family", conflicts_with = "family")]
        expression: Option<String>,
        #[arg(long)]
        family: Option<String>,
        #[arg(long, requires = "family", allow_hyphen_values = true)]
        a: Option<String>,
        #[arg(long, requires = "family", allow_hyphen_values = true)]
        b: Option<String>,
        #[arg(long, default_value_t = digitprod::symbolic::DEFAULT_DEPTH)]
        depth: u32,
    },
}

fn run(cli: Cli) -> digitprod::Result<output::Report> {
    let g = &cli.global;
    match cli.command {
        Command::Seq { kind, count } => commands::seq(&kind, count),
        Command::Eval { rational, kind, start } => commands::eval(g, &rational, &kind, start),
        Command::Verify { name, all } => commands::verify(g, name.as_deref(), all),
        Command::Catalog => Ok(commands::catalog()),
        Command::Constants { name } => commands::constants(g, &name),
        Command::G { x } => commands::g(g, &x),
        Command::Probe { a, b, k, n_max, n_tail } => commands::probe(&a, &b, k, n_max, n_tail),
        Command::Scan { lo, hi, steps } => commands::scan(g, &lo, &hi, steps),
        Command::Reduce { expression, family, a, b, depth } => {
            commands::reduce(expression.as_deref(), family.as_deref(), a.as_deref(), b.as_deref(), depth)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let format = cli.global.format;
    let target = cli.global.output.clone();
    let report = match run(cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(if e.is_mathematical() { 3 } else { 2 });
        }
    };
    let rendered = report.render(format);
    match target {
        Some(path) => {
            if let Err(e) = std::fs::write(&path, rendered) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{rendered}"),
    }
    if report.failed {
        ExitCode::from(3)
    } else {
        ExitCode::SUCCESS
    }
}
