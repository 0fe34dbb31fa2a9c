//! `stvaudit` command-line front end.
//!
//! Exit codes: 0 success (anomalies found or not), 1 operational failure,
//! 2 unreadable or invalid input, 3 unresolved tie under `--tie-policy fail`,
//! 4 a certificate failed verification.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use stvaudit::anomaly::{SearchBudget, SearchKind, SearchOptions};
use stvaudit::TiePolicy;

mod commands;
mod input;
mod table;

use input::Failure;

#[derive(Parser, Debug)]
#[command(
    name = "stvaudit",
    version,
    about = "Count STV elections and search them for monotonicity anomalies"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Votes by round for each election.
    Tabulate {
        #[command(flatten)]
        inputs: Inputs,
        #[command(flatten)]
        output: Output,
    },
    /// Search each election for anomalies and certify what is found.
    Anomalies {
        #[command(flatten)]
        inputs: Inputs,
        #[command(flatten)]
        search: Search,
        #[command(flatten)]
        output: Output,
    },
    /// Closeness, Condorcet and SNTV comparison, with anomaly series.
    Closeness {
        #[command(flatten)]
        inputs: Inputs,
        #[command(flatten)]
        search: Search,
        #[command(flatten)]
        output: Output,
    },
    /// Ballot-length statistics.
    Stats {
        #[command(flatten)]
        inputs: Inputs,
        #[command(flatten)]
        output: Output,
    },
    /// Replay certificates against the ballot file they were made from.
    Verify {
        /// Ballot file the certificates refer to.
        election: PathBuf,
        /// Certificate JSON files.
        #[arg(required = true)]
        certificates: Vec<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
}

#[derive(Args, Debug)]
pub struct Inputs {
    /// Ballot files or directories of `.blt` files.
    #[arg(required = true)]
    pub paths: Vec<PathBuf>,
    /// Count with this many seats instead of the file's.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub seats: Option<u64>,
    #[arg(long, value_enum, default_value_t = Policy::Fail)]
    pub tie_policy: Policy,
}

#[derive(Args, Debug)]
pub struct Output {
    #[arg(long, value_enum, default_value_t = Format::Table)]
    pub format: Format,
    /// Also write result files into this directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct Search {
    /// Comma-separated: committee, upward, downward, noshow.
    #[arg(long, value_delimiter = ',', default_value = "committee,upward,downward,noshow")]
    pub kinds: Vec<SearchKind>,
    /// Trial counts allowed per search and election.
    #[arg(long, default_value_t = SearchBudget::default().max_probes, value_parser = clap::value_parser!(u64).range(1..))]
    pub budget_probes: u64,
    /// Wall-clock limit per search and election.
    #[arg(long)]
    pub budget_seconds: Option<u64>,
}

impl Search {
    pub fn options(&self, policy: TiePolicy) -> SearchOptions {
        SearchOptions {
            budget: SearchBudget {
                max_probes: self.budget_probes,
                max_time: self.budget_seconds.map(Duration::from_secs),
            },
            policy,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Policy {
    Fail,
    Index,
}

impl From<Policy> for TiePolicy {
    fn from(p: Policy) -> Self {
        match p {
            Policy::Fail => TiePolicy::Fail,
            Policy::Index => TiePolicy::Index,
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Tabulate { inputs, output } => commands::tabulate(&inputs, &output),
        Command::Anomalies { inputs, search, output } => commands::anomalies(&inputs, &search, &output),
        Command::Closeness { inputs, search, output } => commands::closeness(&inputs, &search, &output),
        Command::Stats { inputs, output } => commands::stats(&inputs, &output),
        Command::Verify {
            election,
            certificates,
            format,
        } => commands::verify(&election, &certificates, format),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            if !matches!(f, Failure::Reported(_)) {
                eprintln!("error: {f}");
            }
            ExitCode::from(f.code())
        }
    }
}
