//! Loading ballot files and collecting per-file failures.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use stvaudit::corpus::{discover, read_ballot_file, BallotFile, CorpusError};
use stvaudit::TieError;

use crate::Inputs;

#[derive(Debug)]
pub enum Failure {
    Operational(String),
    Input(String),
    Tie(String),
    Rejected(String),
    /// Already printed; carries the exit code.
    Reported(u8),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Operational(_) => 1,
            Failure::Input(_) => 2,
            Failure::Tie(_) => 3,
            Failure::Rejected(_) => 4,
            Failure::Reported(code) => *code,
        }
    }

    pub fn io(what: impl fmt::Display, e: std::io::Error) -> Self {
        Failure::Operational(format!("{what}: {e}"))
    }

    pub fn tie(label: &str, e: TieError) -> Self {
        Failure::Tie(format!(
            "{label}: {e} (rerun with --tie-policy index to break it by candidate order)"
        ))
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Operational(m) | Failure::Input(m) | Failure::Tie(m) | Failure::Rejected(m) => f.write_str(m),
            Failure::Reported(code) => write!(f, "failed with exit code {code}"),
        }
    }
}

impl From<CorpusError> for Failure {
    fn from(e: CorpusError) -> Self {
        Failure::Input(e.to_string())
    }
}

/// A parsed input with a display label and a file-name-safe stem unique
/// within the run.
pub struct Loaded {
    pub label: String,
    pub stem: String,
    pub file: BallotFile,
}

/// Parses every input in parallel, keeping path order.
pub fn load(inputs: &Inputs) -> Result<(Vec<Loaded>, Vec<Failure>), Failure> {
    let paths = discover(&inputs.paths)?;
    let parsed: Vec<Result<BallotFile, Failure>> = paths
        .par_iter()
        .map(|p| {
            let file = read_ballot_file(p)?;
            match inputs.seats {
                Some(s) => file
                    .with_seats(s as usize)
                    .map_err(|e| Failure::Input(format!("{}: {e}", p.display()))),
                None => Ok(file),
            }
        })
        .collect();
    let mut seen: BTreeMap<String, usize> = BTreeMap::new();
    let mut loaded = Vec::new();
    let mut failures = Vec::new();
    for r in parsed {
        match r {
            Ok(file) => {
                let base = file.stem();
                let n = seen.entry(base.clone()).or_default();
                *n += 1;
                let stem = if *n == 1 { base } else { format!("{base}-{n}") };
                log::info!("loaded {}", file.path.display());
                loaded.push(Loaded {
                    label: file.path.display().to_string(),
                    stem,
                    file,
                });
            }
            Err(e) => failures.push(e),
        }
    }
    Ok((loaded, failures))
}

/// Runs `f` on every input in parallel, keeping input order.
pub fn par_map<'a, T: Send>(
    loaded: &'a [Loaded],
    f: impl Fn(&'a Loaded) -> Result<T, Failure> + Sync + Send,
) -> (Vec<T>, Vec<Failure>) {
    let results: Vec<Result<T, Failure>> = loaded.par_iter().map(f).collect();
    let mut ok = Vec::new();
    let mut failures = Vec::new();
    for r in results {
        match r {
            Ok(v) => ok.push(v),
            Err(e) => failures.push(e),
        }
    }
    (ok, failures)
}

/// Prints failures to stderr; the first one decides the exit code.
pub fn report(failures: Vec<Failure>) -> Result<(), Failure> {
    let code = failures.first().map(Failure::code);
    for f in &failures {
        eprintln!("error: {f}");
    }
    match code {
        Some(c) => Err(Failure::Reported(c)),
        None => Ok(()),
    }
}
