use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{check_committee_size, search_downward, search_no_show, search_upward, AnomalyCertificate, SearchOptions};
use crate::error::TieError;
use crate::model::Election;

/// A family of anomaly checks that can be switched on or off.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SearchKind {
    Committee,
    Upward,
    Downward,
    Noshow,
}

impl SearchKind {
    pub const ALL: [SearchKind; 4] = [
        SearchKind::Committee,
        SearchKind::Upward,
        SearchKind::Downward,
        SearchKind::Noshow,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SearchKind::Committee => "committee",
            SearchKind::Upward => "upward",
            SearchKind::Downward => "downward",
            SearchKind::Noshow => "noshow",
        }
    }
}

impl fmt::Display for SearchKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SearchKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SearchKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown anomaly kind {s:?} (expected committee, upward, downward or noshow)"))
    }
}

/// Findings for one election across the requested checks.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ElectionAnalysis {
    pub kinds: BTreeSet<SearchKind>,
    /// Committee-size, upward, downward and no-show certificates, in that order.
    pub certificates: Vec<AnomalyCertificate>,
    pub probes: u64,
    /// Some search ran out of budget.
    pub truncated: bool,
    pub skipped_first_round: bool,
}

/// Runs each requested check. Every ballot-change search gets its own budget.
pub fn analyze(
    election: &Election,
    kinds: &BTreeSet<SearchKind>,
    options: &SearchOptions,
) -> Result<ElectionAnalysis, TieError> {
    let mut out = ElectionAnalysis {
        kinds: kinds.clone(),
        ..ElectionAnalysis::default()
    };
    for &kind in kinds {
        let report = match kind {
            SearchKind::Committee => {
                out.certificates.extend(check_committee_size(election, options.policy)?);
                continue;
            }
            SearchKind::Upward => search_upward(election, options)?,
            SearchKind::Downward => search_downward(election, options)?,
            SearchKind::Noshow => search_no_show(election, options)?,
        };
        out.certificates.extend(report.certificates);
        out.probes += report.probes;
        out.truncated |= report.truncated;
        out.skipped_first_round |= report.skipped_first_round;
    }
    Ok(out)
}
