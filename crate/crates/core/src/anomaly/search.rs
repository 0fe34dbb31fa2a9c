//! State shared by the ballot-change searchers.

use std::collections::{BTreeMap, BTreeSet};

use super::modify::Working;
use super::probe::{Probe, Prober};
use super::verify::{shape_flags, verify_certificate};
use super::{AnomalyCertificate, AnomalyKind, Flag, Modification, SearchOptions, SearchReport};
use crate::engine::{tabulate, TabulationRecord};
use crate::error::TieError;
use crate::fixed::FixedVote;
use crate::model::{CandidateId, Election};

/// An exclusion round of the baseline count.
pub(crate) struct EliminationRound {
    pub totals: BTreeMap<CandidateId, FixedVote>,
    pub eliminated: CandidateId,
}

impl EliminationRound {
    /// First candidate on `ranking` still continuing in this round.
    pub fn head(&self, ranking: &[CandidateId]) -> Option<CandidateId> {
        ranking.iter().copied().find(|c| self.totals.contains_key(c))
    }

    /// Second continuing candidate on `ranking`.
    pub fn second(&self, ranking: &[CandidateId]) -> Option<CandidateId> {
        ranking.iter().copied().filter(|c| self.totals.contains_key(c)).nth(1)
    }
}

pub(crate) enum Outcome {
    Winners(BTreeSet<CandidateId>, bool),
    Skip,
    Stop,
}

pub(crate) struct Context<'e> {
    pub election: &'e Election,
    pub record: TabulationRecord,
    pub winners: BTreeSet<CandidateId>,
    base_tie: bool,
    fingerprint: String,
    prober: Prober,
}

impl<'e> Context<'e> {
    /// `Ok(None)` when the first round decides every seat.
    pub fn start(election: &'e Election, options: &SearchOptions) -> Result<Option<Self>, TieError> {
        let record = tabulate(election, options.policy)?;
        if record.rounds.len() == 1 {
            return Ok(None);
        }
        Ok(Some(Context {
            election,
            winners: record.winner_set(),
            base_tie: !record.tie_breaks.is_empty(),
            record,
            fingerprint: election.fingerprint(),
            prober: Prober::new(options),
        }))
    }

    pub fn skipped() -> SearchReport {
        SearchReport {
            skipped_first_round: true,
            ..SearchReport::default()
        }
    }

    pub fn quota(&self) -> FixedVote {
        self.record.quota
    }

    pub fn elimination_rounds(&self) -> Vec<EliminationRound> {
        self.record
            .rounds
            .iter()
            .filter_map(|r| {
                r.eliminated().map(|e| EliminationRound {
                    totals: r.totals.clone(),
                    eliminated: e,
                })
            })
            .collect()
    }

    pub fn losers(&self) -> Vec<CandidateId> {
        self.election
            .active_candidates()
            .into_iter()
            .filter(|c| !self.winners.contains(c))
            .collect()
    }

    pub fn probe(&mut self, work: &Working) -> Outcome {
        match self.prober.run(work.election()) {
            Probe::Winners { winners, tie } => Outcome::Winners(winners, tie),
            Probe::Abandoned => Outcome::Skip,
            Probe::OutOfBudget => Outcome::Stop,
        }
    }

    /// Builds and verifies a certificate; `None` if it fails replay.
    pub fn certify(
        &self,
        kind: AnomalyKind,
        focal: CandidateId,
        displaced: Option<CandidateId>,
        modifications: Vec<Modification>,
        modified_winners: BTreeSet<CandidateId>,
        tie: bool,
    ) -> Option<AnomalyCertificate> {
        let mut cert = AnomalyCertificate {
            kind,
            election: self.fingerprint.clone(),
            seats: self.election.seats(),
            focal,
            displaced,
            modifications,
            original_winners: self.winners.clone(),
            modified_winners,
            flags: BTreeSet::new(),
        };
        cert.flags = shape_flags(&cert);
        if tie || self.base_tie {
            cert.flags.insert(Flag::TieEncountered);
        }
        match verify_certificate(self.election, &cert) {
            Ok(v) => Some(v.into_inner()),
            Err(e) => {
                log::debug!("discarding unverified {} certificate: {e}", kind.label());
                None
            }
        }
    }

    pub fn finish(self, certificates: Vec<AnomalyCertificate>) -> SearchReport {
        SearchReport {
            certificates,
            probes: self.prober.probes,
            truncated: self.prober.truncated,
            skipped_first_round: false,
        }
    }
}

/// `x` moved to the top of `ranking`.
pub(crate) fn to_top(ranking: &[CandidateId], x: CandidateId) -> Vec<CandidateId> {
    std::iter::once(x)
        .chain(ranking.iter().copied().filter(|&c| c != x))
        .collect()
}

/// `x` moved to directly below `b` on `ranking`.
pub(crate) fn below(ranking: &[CandidateId], x: CandidateId, b: CandidateId) -> Vec<CandidateId> {
    let mut r: Vec<CandidateId> = ranking.iter().copied().filter(|&c| c != x).collect();
    let at = r.iter().position(|&c| c == b).expect("b on ranking") + 1;
    r.insert(at, x);
    r
}

/// Whole votes needed to close a gap strictly.
pub(crate) fn votes_to_pass(gap: FixedVote) -> u64 {
    gap.floor_votes() + 1
}

/// Whole votes needed to reach a gap.
pub(crate) fn votes_to_reach(gap: FixedVote) -> u64 {
    gap.units().div_ceil(crate::fixed::SCALE)
}

/// Greedily takes up to `need` ballots from the given rankings, applying
/// `make` to each. `None` if fewer than `need` are available.
pub(crate) fn take_greedy<'e>(
    election: &'e Election,
    rankings: impl IntoIterator<Item = (Vec<CandidateId>, u64)>,
    need: u64,
    make: impl Fn(&[CandidateId], u64) -> Modification,
) -> Option<Working<'e>> {
    if need == 0 {
        return None;
    }
    let mut work = Working::new(election);
    let mut left = need;
    for (ranking, count) in rankings {
        let take = count.min(left);
        if !work.push(make(&ranking, take)) {
            return None;
        }
        left -= take;
        if left == 0 {
            return Some(work);
        }
    }
    None
}
