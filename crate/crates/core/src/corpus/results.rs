//! On-disk results: certificate JSON files and the summary matrix.

use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::anomaly::{AnomalyCertificate, AnomalyKind, ElectionAnalysis, Flag, SearchKind};

/// One row of the anomaly summary.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SummaryRow {
    pub election: String,
    pub seats: usize,
    pub candidates: usize,
    pub voters: u64,
    /// `yes`, `no`, or `-` when not searched.
    pub committee_size: String,
    pub upward: String,
    /// `strong`, `weak`, `no` or `-`.
    pub downward: String,
    /// `yes`, `ambiguous`, `no` or `-`.
    pub no_show: String,
    pub probes: u64,
    pub truncated: bool,
    pub skipped_first_round: bool,
}

impl SummaryRow {
    pub fn new(election: &str, seats: usize, candidates: usize, voters: u64, a: &ElectionAnalysis) -> Self {
        let has = |k: AnomalyKind| a.certificates.iter().any(|c| c.kind == k);
        let cell = |kind: SearchKind, value: &str| {
            if a.kinds.contains(&kind) {
                value.to_string()
            } else {
                "-".to_string()
            }
        };
        let yes_no = |b: bool| if b { "yes" } else { "no" };
        let downward = if has(AnomalyKind::DownwardStrong) {
            "strong"
        } else if has(AnomalyKind::DownwardWeak) {
            "weak"
        } else {
            "no"
        };
        let no_show = a
            .certificates
            .iter()
            .filter(|c| c.kind == AnomalyKind::NoShow)
            .map(|c| !c.flags.contains(&Flag::AmbiguousNoShow))
            .max()
            .map_or("no", |clean| if clean { "yes" } else { "ambiguous" });
        SummaryRow {
            election: election.to_string(),
            seats,
            candidates,
            voters,
            committee_size: cell(SearchKind::Committee, yes_no(has(AnomalyKind::CommitteeSize))),
            upward: cell(SearchKind::Upward, yes_no(has(AnomalyKind::Upward))),
            downward: cell(SearchKind::Downward, downward),
            no_show: cell(SearchKind::Noshow, no_show),
            probes: a.probes,
            truncated: a.truncated,
            skipped_first_round: a.skipped_first_round,
        }
    }

    pub fn any_anomaly(&self) -> bool {
        self.committee_size == "yes" || self.ballot_anomaly()
    }

    /// Upward, downward or no-show.
    pub fn ballot_anomaly(&self) -> bool {
        self.upward == "yes"
            || matches!(self.downward.as_str(), "strong" | "weak")
            || matches!(self.no_show.as_str(), "yes" | "ambiguous")
    }
}

pub fn summary_csv(rows: &[SummaryRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).expect("in-memory write");
    }
    if rows.is_empty() {
        w.write_record([
            "election",
            "seats",
            "candidates",
            "voters",
            "committee_size",
            "upward",
            "downward",
            "no_show",
            "probes",
            "truncated",
            "skipped_first_round",
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
}

/// Deterministic file name for the `index`-th certificate of an election.
pub fn certificate_file_name(stem: &str, index: usize, cert: &AnomalyCertificate) -> String {
    format!("{stem}.{index:02}.{}.json", cert.kind.label())
}

/// Writes each certificate as pretty JSON into `dir`; returns the paths.
pub fn write_certificates(dir: &Path, stem: &str, certs: &[AnomalyCertificate]) -> std::io::Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    certs
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let path = dir.join(certificate_file_name(stem, i, c));
            std::fs::write(&path, c.to_json() + "\n")?;
            Ok(path)
        })
        .collect()
}
