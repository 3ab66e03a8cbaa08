mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use report::{Failure, EXIT_PARSE};

#[derive(Parser, Debug)]
#[command(name = "ctxkit", version, about = "Contextuality toolkit: scenarios, bounds, sheaf tables, paradoxes and toy models")]
pub struct Cli {
    /// Seed for every randomized step
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Emit the report as JSON
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Place an empirical table in the contextuality hierarchy
    Classify {
        /// Table JSON: {"observables": {name: arity}, "contexts": [[..]], "rows": [[..]]}
        file: Option<PathBuf>,
        #[arg(long)]
        preset: Option<String>,
    },
    /// Independence number and Lovász theta of a weighted graph
    Invariants {
        /// Graph JSON: {"n": .., "edges": [[i, j], ..], "weights": [..]}
        file: Option<PathBuf>,
        /// c<N>, k<N>, e<N> or chsh
        #[arg(long)]
        preset: Option<String>,
    },
    /// Classical and quantum values of a built-in inequality
    Inequality {
        /// kcbs, chsh or mermin-peres
        #[arg(long)]
        preset: String,
    },
    /// Pre- and post-selection paradox report
    Paradox {
        /// three-box, cheshire, pigeonhole or square
        name: String,
        /// Only the weak values
        #[arg(long)]
        weak: bool,
        /// Toy-model reproduction (cheshire only)
        #[arg(long, conflicts_with = "weak")]
        toy: bool,
    },
    /// Noncontextuality bounds in the ontological-model setting
    Ncbound {
        #[arg(value_enum, default_value_t = NcTarget::Cabello18)]
        target: NcTarget,
        /// Vector file, one four-component complex vector per line
        #[arg(long)]
        vectors: Option<PathBuf>,
    },
    /// Toy theory: update table, seeded measurement sequence, Cheshire
    Toy {
        #[arg(value_enum, default_value_t = ToyAction::Table)]
        action: ToyAction,
        /// Initial state: +x, -x, +y, -y, +z, -z or mixed
        #[arg(long, default_value = "+z", allow_hyphen_values = true)]
        state: String,
        /// Comma-separated axes measured in turn
        #[arg(long, default_value = "x,z,x,y,z")]
        axes: String,
        /// Trials for the repeatability estimate
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
    },
    /// Structure of a scenario or a probabilistic model on it
    Scenario {
        /// Scenario JSON {"vertices", "edges"} or model JSON {"scenario", "values"}
        file: Option<PathBuf>,
        /// triangle, kcbs, bell122, bell222, cabello18
        #[arg(long)]
        preset: Option<String>,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum NcTarget {
    Cabello18,
    Prep,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum ToyAction {
    Table,
    Demo,
    Cheshire,
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PARSE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    let echo: Vec<String> = std::iter::once("ctxkit".to_string()).chain(argv.into_iter().skip(1)).collect();
    match commands::run(&cli, echo) {
        Ok(r) => {
            if cli.json {
                println!("{}", r.render_json());
            } else {
                print!("{}", r.render_text());
            }
            ExitCode::SUCCESS
        }
        Err(Failure { code, message }) => {
            eprintln!("error: {message}");
            ExitCode::from(code as u8)
        }
    }
}
