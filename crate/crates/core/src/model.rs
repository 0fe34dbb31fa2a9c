//! Candidates, ballots, preference profiles and elections.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::ModelError;

/// A candidate, identified by its 1-based position in the ballot file.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CandidateId(pub u32);

impl CandidateId {
    pub fn from_index(index: usize) -> Self {
        CandidateId(index as u32 + 1)
    }

    /// 0-based array index.
    pub fn index(self) -> usize {
        self.0 as usize - 1
    }
}

impl fmt::Display for CandidateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Debug for CandidateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Candidate {
    pub id: CandidateId,
    pub name: String,
    pub party: Option<String>,
}

impl Candidate {
    pub fn new(id: CandidateId, name: impl Into<String>) -> Self {
        Candidate {
            id,
            name: name.into(),
            party: None,
        }
    }

    pub fn with_party(mut self, party: impl Into<String>) -> Self {
        self.party = Some(party.into());
        self
    }
}

/// Builds a roster of candidates named by the given strings, with ids 1..n.
pub fn roster_from_names<S: AsRef<str>>(names: &[S]) -> Vec<Candidate> {
    names
        .iter()
        .enumerate()
        .map(|(i, n)| Candidate::new(CandidateId::from_index(i), n.as_ref()))
        .collect()
}

/// One distinct ranking and the number of ballots cast with it.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BallotType {
    pub ranking: Vec<CandidateId>,
    pub count: u64,
}

impl BallotType {
    pub fn new(ranking: Vec<CandidateId>, count: u64) -> Self {
        BallotType { ranking, count }
    }

    /// 0-based rank of `candidate`, if listed.
    pub fn position(&self, candidate: CandidateId) -> Option<usize> {
        self.ranking.iter().position(|&c| c == candidate)
    }

    pub fn is_bullet(&self) -> bool {
        self.ranking.len() == 1
    }

    pub fn first(&self) -> CandidateId {
        self.ranking[0]
    }

    /// Weak-order comparison: `a` strictly above `b` when `a` is listed and
    /// `b` is either unlisted or listed lower.
    pub fn prefers(&self, a: CandidateId, b: CandidateId) -> bool {
        match (self.position(a), self.position(b)) {
            (Some(pa), Some(pb)) => pa < pb,
            (Some(_), None) => true,
            _ => false,
        }
    }
}

/// Merges duplicate rankings, drops zero-count types and sorts by ranking.
pub fn canonicalize(
    roster: &[Candidate],
    ballots: impl IntoIterator<Item = BallotType>,
) -> Result<Vec<BallotType>, ModelError> {
    let n = roster.len();
    let mut merged: BTreeMap<Vec<CandidateId>, u64> = BTreeMap::new();
    let mut seen = vec![false; n];
    for ballot in ballots {
        if ballot.ranking.is_empty() {
            return Err(ModelError::EmptyRanking);
        }
        seen.iter_mut().for_each(|s| *s = false);
        for &c in &ballot.ranking {
            if c.0 == 0 || c.index() >= n {
                return Err(ModelError::UnknownCandidate(c));
            }
            if std::mem::replace(&mut seen[c.index()], true) {
                return Err(ModelError::DuplicateInRanking(c));
            }
        }
        if ballot.count > 0 {
            *merged.entry(ballot.ranking).or_insert(0) += ballot.count;
        }
    }
    Ok(merged
        .into_iter()
        .map(|(ranking, count)| BallotType { ranking, count })
        .collect())
}

/// A multiset of ballot types over a candidate roster, always canonical.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PreferenceProfile {
    roster: Vec<Candidate>,
    ballots: Vec<BallotType>,
}

impl PreferenceProfile {
    pub fn new(roster: Vec<Candidate>, ballots: impl IntoIterator<Item = BallotType>) -> Result<Self, ModelError> {
        for (i, c) in roster.iter().enumerate() {
            if c.id != CandidateId::from_index(i) {
                return Err(ModelError::RosterIds);
            }
            if c.name.trim().is_empty() {
                return Err(ModelError::EmptyName(c.id));
            }
        }
        let ballots = canonicalize(&roster, ballots)?;
        if ballots.is_empty() {
            return Err(ModelError::NoVoters);
        }
        Ok(PreferenceProfile { roster, ballots })
    }

    /// Convenience constructor from `(count, ranking)` pairs of 1-based ids.
    pub fn from_counts(roster: Vec<Candidate>, rows: &[(u64, &[u32])]) -> Result<Self, ModelError> {
        let ballots = rows
            .iter()
            .map(|(count, r)| BallotType::new(r.iter().map(|&c| CandidateId(c)).collect(), *count));
        PreferenceProfile::new(roster, ballots)
    }

    pub fn roster(&self) -> &[Candidate] {
        &self.roster
    }

    pub fn ballots(&self) -> &[BallotType] {
        &self.ballots
    }

    pub fn num_candidates(&self) -> usize {
        self.roster.len()
    }

    pub fn candidate_ids(&self) -> impl Iterator<Item = CandidateId> + '_ {
        self.roster.iter().map(|c| c.id)
    }

    pub fn total_voters(&self) -> u64 {
        self.ballots.iter().map(|b| b.count).sum()
    }

    pub fn name(&self, id: CandidateId) -> &str {
        &self.roster[id.index()].name
    }

    /// Re-canonicalizes; the result equals `self` for any constructed profile.
    pub fn canonicalize(&self) -> Result<PreferenceProfile, ModelError> {
        PreferenceProfile::new(self.roster.clone(), self.ballots.iter().cloned())
    }

    /// Count of the ballot type with exactly this ranking.
    pub fn count_of(&self, ranking: &[CandidateId]) -> u64 {
        self.ballots
            .binary_search_by(|b| b.ranking.as_slice().cmp(ranking))
            .map(|i| self.ballots[i].count)
            .unwrap_or(0)
    }
}

/// First-choice tallies for every roster candidate (zero when never first).
pub fn first_place_tallies(profile: &PreferenceProfile) -> BTreeMap<CandidateId, u64> {
    let mut tallies: BTreeMap<CandidateId, u64> = profile.candidate_ids().map(|c| (c, 0)).collect();
    for b in profile.ballots() {
        *tallies.get_mut(&b.first()).expect("canonical ranking") += b.count;
    }
    tallies
}

/// A profile together with the number of seats to fill.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Election {
    profile: PreferenceProfile,
    seats: usize,
    withdrawn: BTreeSet<CandidateId>,
}

impl Election {
    pub fn new(profile: PreferenceProfile, seats: usize) -> Result<Self, ModelError> {
        Election::with_withdrawn(profile, seats, BTreeSet::new())
    }

    /// Withdrawn candidates stay in the roster but take no part in the count
    /// and must not appear on any ranking.
    pub fn with_withdrawn(
        profile: PreferenceProfile,
        seats: usize,
        withdrawn: BTreeSet<CandidateId>,
    ) -> Result<Self, ModelError> {
        for &w in &withdrawn {
            if w.0 == 0 || w.index() >= profile.num_candidates() {
                return Err(ModelError::UnknownCandidate(w));
            }
        }
        if let Some(c) = profile
            .ballots()
            .iter()
            .flat_map(|b| b.ranking.iter())
            .find(|c| withdrawn.contains(c))
        {
            return Err(ModelError::WithdrawnOnBallot(*c));
        }
        let active = profile.num_candidates() - withdrawn.len();
        if seats == 0 || seats > active {
            return Err(ModelError::BadSeats { seats, active });
        }
        Ok(Election {
            profile,
            seats,
            withdrawn,
        })
    }

    pub fn profile(&self) -> &PreferenceProfile {
        &self.profile
    }

    pub fn seats(&self) -> usize {
        self.seats
    }

    pub fn withdrawn(&self) -> &BTreeSet<CandidateId> {
        &self.withdrawn
    }

    pub fn is_withdrawn(&self, c: CandidateId) -> bool {
        self.withdrawn.contains(&c)
    }

    /// Candidates taking part in the count.
    pub fn active_candidates(&self) -> Vec<CandidateId> {
        self.profile
            .candidate_ids()
            .filter(|c| !self.withdrawn.contains(c))
            .collect()
    }

    pub fn num_active(&self) -> usize {
        self.profile.num_candidates() - self.withdrawn.len()
    }

    /// Every active candidate wins.
    pub fn is_degenerate(&self) -> bool {
        self.seats == self.num_active()
    }

    /// Same ballots and roster, different seat count.
    pub fn with_seats(&self, seats: usize) -> Result<Election, ModelError> {
        Election::with_withdrawn(self.profile.clone(), seats, self.withdrawn.clone())
    }

    /// Same roster and seats over a new set of ballots.
    pub fn with_profile(&self, profile: PreferenceProfile) -> Result<Election, ModelError> {
        Election::with_withdrawn(profile, self.seats, self.withdrawn.clone())
    }

    /// SHA-256 of the canonical ballot-file rendering of this election.
    pub fn fingerprint(&self) -> String {
        let text = crate::corpus::blt::write_blt(self, None);
        hex::encode(Sha256::digest(text.as_bytes()))
    }
}
