//! Reading ballot files and writing results.

use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::model::{Election, PreferenceProfile};

pub mod blt;
pub mod manifest;
pub mod results;
pub mod stats;

use blt::{parse_blt_bytes, BltError};
use manifest::Manifest;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}: {source}", path.display())]
    Parse {
        path: PathBuf,
        #[source]
        source: BltError,
    },
    #[error("{}: bad manifest: {source}", path.display())]
    Manifest {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Metadata {
    pub title: String,
    pub council: Option<String>,
    pub ward: Option<String>,
    pub year: Option<u32>,
}

/// A ballot file on disk, parsed.
#[derive(Clone, Debug)]
pub struct BallotFile {
    pub path: PathBuf,
    pub election: Election,
    pub metadata: Metadata,
    /// SHA-256 of the raw file bytes.
    pub content_hash: String,
}

impl BallotFile {
    /// File name without extension.
    pub fn stem(&self) -> String {
        self.path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default()
    }

    /// Same ballots, different seat count.
    pub fn with_seats(mut self, seats: usize) -> Result<Self, crate::error::ModelError> {
        self.election = self.election.with_seats(seats)?;
        Ok(self)
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CorpusError + '_ {
    move |source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Reads a ballot file and its sidecar manifest, if any.
pub fn read_ballot_file(path: &Path) -> Result<BallotFile, CorpusError> {
    let bytes = std::fs::read(path).map_err(io_err(path))?;
    let parsed = parse_blt_bytes(&bytes).map_err(|source| CorpusError::Parse {
        path: path.to_path_buf(),
        source,
    })?;
    let sidecar = path.with_extension("json");
    let manifest = if sidecar.is_file() {
        let text = std::fs::read_to_string(&sidecar).map_err(io_err(&sidecar))?;
        Manifest::from_json(&text).map_err(|source| CorpusError::Manifest {
            path: sidecar.clone(),
            source,
        })?
    } else {
        Manifest::default()
    };
    let mut election = parsed.election;
    if !manifest.parties.is_empty() {
        let mut roster = election.profile().roster().to_vec();
        for c in roster.iter_mut().filter(|c| c.party.is_none()) {
            c.party = manifest.parties.get(&c.name).cloned();
        }
        let profile =
            PreferenceProfile::new(roster, election.profile().ballots().to_vec()).expect("roster relabelled only");
        election = election.with_profile(profile).expect("same ballots");
    }
    Ok(BallotFile {
        path: path.to_path_buf(),
        election,
        metadata: Metadata {
            ward: manifest
                .ward
                .or_else(|| Some(parsed.title.clone()).filter(|t| !t.is_empty())),
            title: parsed.title,
            council: manifest.council,
            year: manifest.year,
        },
        content_hash: hex::encode(Sha256::digest(&bytes)),
    })
}

/// Expands directories to the `.blt` files beneath them, sorted by path.
/// Explicit file arguments are kept whatever their extension.
pub fn discover(paths: &[PathBuf]) -> Result<Vec<PathBuf>, CorpusError> {
    let mut out = Vec::new();
    for p in paths {
        let meta = std::fs::metadata(p).map_err(io_err(p))?;
        if meta.is_dir() {
            for entry in walkdir::WalkDir::new(p).sort_by_file_name() {
                let entry = entry.map_err(|e| CorpusError::Io {
                    path: p.clone(),
                    source: e.into(),
                })?;
                let is_blt = entry.path().extension().is_some_and(|x| x.eq_ignore_ascii_case("blt"));
                if entry.file_type().is_file() && is_blt {
                    out.push(entry.into_path());
                }
            }
        } else {
            out.push(p.clone());
        }
    }
    Ok(out)
}
