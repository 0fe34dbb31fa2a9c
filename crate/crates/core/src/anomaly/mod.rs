//! Monotonicity anomalies: certificates, searchers, verification and a
//! brute-force oracle for small elections.

use std::collections::BTreeSet;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::engine::TiePolicy;
use crate::model::CandidateId;

mod analysis;
mod committee;
mod downward;
mod modify;
mod noshow;
pub mod oracle;
mod probe;
mod search;
mod upward;
mod verify;

pub use analysis::{analyze, ElectionAnalysis, SearchKind};
pub use committee::check_committee_size;
pub use downward::search_downward;
pub use modify::{apply_modifications, bullet_rewrite_targets, shift_down_targets, shift_up_targets};
pub use noshow::search_no_show;
pub use oracle::{confirm, exhaustive_oracle, relations, OracleCaps, OracleError};
pub use upward::search_upward;
pub use verify::{verify_certificate, Rejection, VerifiedCertificate};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnomalyKind {
    CommitteeSize,
    Upward,
    DownwardStrong,
    DownwardWeak,
    NoShow,
}

impl AnomalyKind {
    pub fn label(self) -> &'static str {
        match self {
            AnomalyKind::CommitteeSize => "committee_size",
            AnomalyKind::Upward => "upward",
            AnomalyKind::DownwardStrong => "downward_strong",
            AnomalyKind::DownwardWeak => "downward_weak",
            AnomalyKind::NoShow => "no_show",
        }
    }
}

/// One change to the ballots, or the alternative seat count of a
/// committee-size certificate.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Modification {
    ShiftUp {
        from: Vec<CandidateId>,
        to: Vec<CandidateId>,
        count: u64,
    },
    ShiftDown {
        from: Vec<CandidateId>,
        to: Vec<CandidateId>,
        count: u64,
    },
    BulletRewrite {
        from: Vec<CandidateId>,
        to: Vec<CandidateId>,
        count: u64,
    },
    Remove {
        from: Vec<CandidateId>,
        count: u64,
    },
    SeatCount {
        seats: usize,
    },
}

impl Modification {
    pub fn source(&self) -> Option<&[CandidateId]> {
        match self {
            Modification::ShiftUp { from, .. }
            | Modification::ShiftDown { from, .. }
            | Modification::BulletRewrite { from, .. }
            | Modification::Remove { from, .. } => Some(from),
            Modification::SeatCount { .. } => None,
        }
    }

    pub fn result(&self) -> Option<&[CandidateId]> {
        match self {
            Modification::ShiftUp { to, .. }
            | Modification::ShiftDown { to, .. }
            | Modification::BulletRewrite { to, .. } => Some(to),
            _ => None,
        }
    }

    pub fn count(&self) -> u64 {
        match self {
            Modification::ShiftUp { count, .. }
            | Modification::ShiftDown { count, .. }
            | Modification::BulletRewrite { count, .. }
            | Modification::Remove { count, .. } => *count,
            Modification::SeatCount { .. } => 0,
        }
    }

    fn count_mut(&mut self) -> Option<&mut u64> {
        match self {
            Modification::ShiftUp { count, .. }
            | Modification::ShiftDown { count, .. }
            | Modification::BulletRewrite { count, .. }
            | Modification::Remove { count, .. } => Some(count),
            Modification::SeatCount { .. } => None,
        }
    }

    /// Same change regardless of count.
    fn same_move(&self, other: &Modification) -> bool {
        std::mem::discriminant(self) == std::mem::discriminant(other)
            && self.source() == other.source()
            && self.result() == other.result()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Flag {
    /// The new winner is outside the top S on some removed ballot.
    AmbiguousNoShow,
    /// Every changed ballot had the same ranking and received the same change.
    IdenticalBallotsUsed,
    /// A count needed an index tie-break.
    TieEncountered,
}

/// A replayable demonstration of an anomaly.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnomalyCertificate {
    pub kind: AnomalyKind,
    /// Fingerprint of the unmodified election.
    pub election: String,
    pub seats: usize,
    /// Moved candidate, or the candidate who gains a seat.
    pub focal: CandidateId,
    /// Winner who loses their seat in a no-show certificate.
    pub displaced: Option<CandidateId>,
    pub modifications: Vec<Modification>,
    pub original_winners: BTreeSet<CandidateId>,
    pub modified_winners: BTreeSet<CandidateId>,
    pub flags: BTreeSet<Flag>,
}

impl AnomalyCertificate {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    pub fn relation(&self) -> Relation {
        match self.kind {
            AnomalyKind::CommitteeSize => Relation::CommitteeSize(
                self.modifications
                    .iter()
                    .find_map(|m| match m {
                        Modification::SeatCount { seats } => Some(*seats),
                        _ => None,
                    })
                    .unwrap_or(0),
            ),
            AnomalyKind::Upward => Relation::Upward(self.focal),
            AnomalyKind::DownwardStrong | AnomalyKind::DownwardWeak => Relation::Downward(self.focal),
            AnomalyKind::NoShow => Relation::NoShow(self.focal, self.displaced.unwrap_or(self.focal)),
        }
    }

    /// Ballots changed or removed.
    pub fn ballots_changed(&self) -> u64 {
        self.modifications.iter().map(Modification::count).sum()
    }
}

/// What a certificate demonstrates, ignoring how.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Relation {
    CommitteeSize(usize),
    Upward(CandidateId),
    Downward(CandidateId),
    /// Gaining candidate, displaced winner.
    NoShow(CandidateId, CandidateId),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchBudget {
    pub max_probes: u64,
    pub max_time: Option<Duration>,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            max_probes: 1_000_000,
            max_time: None,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SearchOptions {
    pub budget: SearchBudget,
    pub policy: TiePolicy,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SearchReport {
    pub certificates: Vec<AnomalyCertificate>,
    /// Trial counts run.
    pub probes: u64,
    /// The budget ran out before the search finished.
    pub truncated: bool,
    /// Every winner reached quota in the first round, so nothing was searched.
    pub skipped_first_round: bool,
}
