//! Scottish-rules STV counting.
//!
//! Each round opens with the totals of the continuing candidates. Every
//! continuing candidate at or above quota is elected in that round. The round
//! then performs one action: the largest pending surplus is transferred, or,
//! when no surplus is pending, the lowest continuing candidate is excluded.
//! The count stops once all seats are filled or the continuing candidates
//! exactly fill the remaining seats.
//!
//! Ballots are handled per ballot type ("parcel"): a parcel carries the
//! combined value of all ballots of that type and a pointer to its current
//! preference. A surplus transfer scales every parcel held by the elected
//! candidate by `surplus / total`, truncated to five decimals per parcel.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{ModelError, TieError};
use crate::fixed::FixedVote;
use crate::model::{CandidateId, Election};

/// What to do when equal totals cannot be separated by earlier rounds.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TiePolicy {
    /// Report a [`TieError`].
    #[default]
    Fail,
    /// Pick the lowest candidate id and note the break in the record.
    Index,
}

/// `floor(voters / (seats + 1)) + 1`.
pub fn compute_quota(total_voters: u64, seats: usize) -> Result<u64, ModelError> {
    if total_voters == 0 {
        return Err(ModelError::NoVoters);
    }
    if seats == 0 {
        return Err(ModelError::BadSeats { seats, active: 0 });
    }
    Ok(total_voters / (seats as u64 + 1) + 1)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum RoundAction {
    Surplus {
        candidate: CandidateId,
        surplus: FixedVote,
    },
    Elimination {
        candidate: CandidateId,
    },
    /// Final round: nothing left to transfer.
    Complete,
}

/// The single kind of thing that happened in a round.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RoundEvent {
    Elected(Vec<CandidateId>),
    /// Transfer of a surplus belonging to a candidate elected in an earlier round.
    SurplusTransfer(CandidateId),
    Eliminated(CandidateId),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Round {
    pub number: usize,
    /// Opening totals of the continuing candidates.
    pub totals: BTreeMap<CandidateId, FixedVote>,
    /// Value held by candidates elected before this round opened.
    pub held: BTreeMap<CandidateId, FixedVote>,
    /// Cumulative non-transferable value at the opening of the round.
    pub exhausted: FixedVote,
    /// Cumulative value lost to truncation at the opening of the round.
    pub loss: FixedVote,
    pub elected: Vec<CandidateId>,
    pub action: RoundAction,
    /// Value received by each continuing candidate from this round's action.
    pub transfers: BTreeMap<CandidateId, FixedVote>,
    /// Value that became non-transferable during this round's action.
    pub exhausted_by_action: FixedVote,
}

impl Round {
    pub fn event(&self) -> RoundEvent {
        if !self.elected.is_empty() {
            return RoundEvent::Elected(self.elected.clone());
        }
        match self.action {
            RoundAction::Elimination { candidate } => RoundEvent::Eliminated(candidate),
            RoundAction::Surplus { candidate, .. } => RoundEvent::SurplusTransfer(candidate),
            RoundAction::Complete => RoundEvent::Elected(Vec::new()),
        }
    }

    pub fn eliminated(&self) -> Option<CandidateId> {
        match self.action {
            RoundAction::Elimination { candidate } => Some(candidate),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TieBreak {
    pub round: usize,
    pub candidates: Vec<CandidateId>,
    pub chosen: CandidateId,
}

/// The votes-by-round table of one count.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TabulationRecord {
    pub seats: usize,
    pub total_voters: u64,
    pub quota: FixedVote,
    pub rounds: Vec<Round>,
    /// In order of election.
    pub winners: Vec<CandidateId>,
    pub final_exhausted: FixedVote,
    pub final_loss: FixedVote,
    /// Ties settled by candidate index under [`TiePolicy::Index`].
    pub tie_breaks: Vec<TieBreak>,
}

impl TabulationRecord {
    pub fn winner_set(&self) -> BTreeSet<CandidateId> {
        self.winners.iter().copied().collect()
    }

    /// Candidates excluded, in order.
    pub fn elimination_order(&self) -> Vec<CandidateId> {
        self.rounds.iter().filter_map(Round::eliminated).collect()
    }

    /// Round number (1-based) in which `c` was elected.
    pub fn elected_in_round(&self, c: CandidateId) -> Option<usize> {
        self.rounds.iter().find(|r| r.elected.contains(&c)).map(|r| r.number)
    }

    /// All seats filled by candidates at quota in the first round.
    pub fn first_round_terminated(&self) -> bool {
        self.rounds.first().is_some_and(|r| {
            r.elected.len() == self.seats && r.totals.values().filter(|&&t| t >= self.quota).count() == self.seats
        })
    }
}

/// Lightweight result of a count without the per-round table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub winners: BTreeSet<CandidateId>,
    /// A tie was settled by candidate index.
    pub index_tie: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Status {
    Continuing,
    Elected,
    Eliminated,
    Withdrawn,
}

#[derive(Clone, Debug)]
struct Parcel {
    ballot: usize,
    value: FixedVote,
    pos: usize,
}

/// Value moved by one surplus transfer or exclusion.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TransferSummary {
    pub received: BTreeMap<CandidateId, FixedVote>,
    pub exhausted: FixedVote,
    pub loss: FixedVote,
}

/// Mutable state of a count in progress.
pub struct Count<'e> {
    election: &'e Election,
    policy: TiePolicy,
    quota: FixedVote,
    status: Vec<Status>,
    totals: Vec<FixedVote>,
    holdings: Vec<Vec<Parcel>>,
    exhausted: FixedVote,
    loss: FixedVote,
    history: Vec<Vec<Option<FixedVote>>>,
    elected: Vec<CandidateId>,
    pending: Vec<CandidateId>,
    round: usize,
    tie_breaks: Vec<TieBreak>,
}

impl<'e> Count<'e> {
    pub fn new(election: &'e Election, policy: TiePolicy) -> Self {
        let profile = election.profile();
        let n = profile.num_candidates();
        let quota = compute_quota(profile.total_voters(), election.seats()).expect("valid election");
        let status = (0..n)
            .map(|i| {
                if election.is_withdrawn(CandidateId::from_index(i)) {
                    Status::Withdrawn
                } else {
                    Status::Continuing
                }
            })
            .collect();
        let mut count = Count {
            election,
            policy,
            quota: FixedVote::from_votes(quota),
            status,
            totals: vec![FixedVote::ZERO; n],
            holdings: vec![Vec::new(); n],
            exhausted: FixedVote::ZERO,
            loss: FixedVote::ZERO,
            history: Vec::new(),
            elected: Vec::new(),
            pending: Vec::new(),
            round: 0,
            tie_breaks: Vec::new(),
        };
        for (i, b) in profile.ballots().iter().enumerate() {
            let parcel = Parcel {
                ballot: i,
                value: FixedVote::from_votes(b.count),
                pos: 0,
            };
            count.route(parcel, &mut TransferSummary::default());
        }
        count
    }

    pub fn quota(&self) -> FixedVote {
        self.quota
    }

    pub fn total(&self, c: CandidateId) -> FixedVote {
        self.totals[c.index()]
    }

    pub fn exhausted(&self) -> FixedVote {
        self.exhausted
    }

    pub fn loss(&self) -> FixedVote {
        self.loss
    }

    pub fn elected(&self) -> &[CandidateId] {
        &self.elected
    }

    pub fn is_continuing(&self, c: CandidateId) -> bool {
        self.status[c.index()] == Status::Continuing
    }

    pub fn continuing(&self) -> Vec<CandidateId> {
        (0..self.status.len())
            .filter(|&i| self.status[i] == Status::Continuing)
            .map(CandidateId::from_index)
            .collect()
    }

    /// Moves a parcel to its next continuing preference, or exhausts it.
    fn route(&mut self, mut parcel: Parcel, summary: &mut TransferSummary) {
        let ranking = &self.election.profile().ballots()[parcel.ballot].ranking;
        while parcel.pos < ranking.len() && self.status[ranking[parcel.pos].index()] != Status::Continuing {
            parcel.pos += 1;
        }
        if parcel.pos < ranking.len() {
            let to = ranking[parcel.pos];
            self.totals[to.index()] += parcel.value;
            *summary.received.entry(to).or_default() += parcel.value;
            self.holdings[to.index()].push(parcel);
        } else {
            self.exhausted += parcel.value;
            summary.exhausted += parcel.value;
        }
    }

    fn snapshot(&self) -> Vec<Option<FixedVote>> {
        self.status
            .iter()
            .zip(&self.totals)
            .map(|(s, &t)| (*s == Status::Continuing).then_some(t))
            .collect()
    }

    /// Declares every continuing candidate at or above quota elected, highest
    /// total first, and queues their surpluses.
    pub fn elect_at_quota(&mut self) -> Vec<CandidateId> {
        let mut newly: Vec<CandidateId> = self
            .continuing()
            .into_iter()
            .filter(|&c| self.totals[c.index()] >= self.quota)
            .collect();
        newly.sort_by(|a, b| self.totals[b.index()].cmp(&self.totals[a.index()]).then(a.cmp(b)));
        for &c in &newly {
            self.status[c.index()] = Status::Elected;
            self.elected.push(c);
            self.pending.push(c);
        }
        newly
    }

    fn elect_without_quota(&mut self, mut rest: Vec<CandidateId>) -> Vec<CandidateId> {
        rest.sort_by(|a, b| self.totals[b.index()].cmp(&self.totals[a.index()]).then(a.cmp(b)));
        for &c in &rest {
            self.status[c.index()] = Status::Elected;
            self.elected.push(c);
        }
        rest
    }

    /// Settles a tie by the most recent earlier round in which the tied
    /// candidates' totals differ, then by policy.
    fn break_tie(&mut self, mut tied: Vec<CandidateId>, lowest: bool) -> Result<CandidateId, TieError> {
        tied.sort();
        let last = self.history.len().saturating_sub(1);
        for snapshot in self.history[..last].iter().rev() {
            let values: Option<Vec<FixedVote>> = tied.iter().map(|c| snapshot[c.index()]).collect();
            let Some(values) = values else { continue };
            let target = if lowest {
                *values.iter().min().unwrap()
            } else {
                *values.iter().max().unwrap()
            };
            tied = tied
                .iter()
                .zip(&values)
                .filter(|(_, &v)| v == target)
                .map(|(&c, _)| c)
                .collect();
            if tied.len() == 1 {
                return Ok(tied[0]);
            }
        }
        match self.policy {
            TiePolicy::Fail => Err(TieError {
                round: self.round,
                candidates: tied,
            }),
            TiePolicy::Index => {
                let chosen = tied[0];
                self.tie_breaks.push(TieBreak {
                    round: self.round,
                    candidates: tied,
                    chosen,
                });
                Ok(chosen)
            }
        }
    }

    /// Removes and returns the pending surplus to transfer next: the largest.
    fn next_surplus(&mut self) -> Result<CandidateId, TieError> {
        let best = self
            .pending
            .iter()
            .map(|c| self.totals[c.index()])
            .max()
            .expect("pending surplus");
        let tied: Vec<CandidateId> = self
            .pending
            .iter()
            .copied()
            .filter(|c| self.totals[c.index()] == best)
            .collect();
        let chosen = if tied.len() == 1 {
            tied[0]
        } else {
            self.break_tie(tied, false)?
        };
        self.pending.retain(|&c| c != chosen);
        Ok(chosen)
    }

    /// Transfers the surplus of an elected candidate to the next continuing
    /// preference on each of their ballots; the candidate keeps exactly quota.
    ///
    /// # Panics
    ///
    /// If `elected` has not been elected or holds less than quota.
    pub fn transfer_surplus(&mut self, elected: CandidateId) -> TransferSummary {
        assert_eq!(
            self.status[elected.index()],
            Status::Elected,
            "surplus of a non-elected candidate"
        );
        let total = self.totals[elected.index()];
        let surplus = total.checked_sub(self.quota).expect("elected below quota");
        self.pending.retain(|&c| c != elected);
        let mut summary = TransferSummary::default();
        if surplus.is_zero() {
            return summary;
        }
        let parcels = std::mem::take(&mut self.holdings[elected.index()]);
        let mut moved = FixedVote::ZERO;
        for mut parcel in parcels {
            parcel.value = parcel.value.mul_ratio_trunc(surplus, total);
            moved += parcel.value;
            self.route(parcel, &mut summary);
        }
        summary.loss = surplus - moved;
        self.loss += summary.loss;
        self.totals[elected.index()] = self.quota;
        summary
    }

    /// Excludes `candidate`, passing each ballot on at its current value.
    pub fn eliminate(&mut self, candidate: CandidateId) -> TransferSummary {
        assert_eq!(self.status[candidate.index()], Status::Continuing);
        self.status[candidate.index()] = Status::Eliminated;
        self.totals[candidate.index()] = FixedVote::ZERO;
        let mut summary = TransferSummary::default();
        for parcel in std::mem::take(&mut self.holdings[candidate.index()]) {
            self.route(parcel, &mut summary);
        }
        summary
    }

    /// Excludes the continuing candidate with the lowest total.
    pub fn eliminate_lowest(&mut self) -> Result<(CandidateId, TransferSummary), TieError> {
        let continuing = self.continuing();
        assert!(continuing.len() >= 2, "exclusion needs two continuing candidates");
        let low = continuing.iter().map(|c| self.totals[c.index()]).min().unwrap();
        let tied: Vec<CandidateId> = continuing
            .into_iter()
            .filter(|c| self.totals[c.index()] == low)
            .collect();
        let loser = if tied.len() == 1 {
            tied[0]
        } else {
            self.break_tie(tied, true)?
        };
        Ok((loser, self.eliminate(loser)))
    }

    fn conserved(&self) -> bool {
        let held: FixedVote = self
            .status
            .iter()
            .zip(&self.totals)
            .filter(|(s, _)| matches!(s, Status::Continuing | Status::Elected))
            .map(|(_, &t)| t)
            .sum();
        (held + self.exhausted + self.loss).units()
            == FixedVote::from_votes(self.election.profile().total_voters()).units()
    }

    /// Opens the next round: snapshots totals, declares candidates at quota
    /// and applies the stopping rules. Returns the newly elected candidates
    /// and whether the count is complete.
    fn open_round(&mut self) -> (Vec<CandidateId>, bool) {
        self.round += 1;
        self.history.push(self.snapshot());
        debug_assert!(self.conserved());
        let mut newly = self.elect_at_quota();
        let seats = self.election.seats();
        if self.elected.len() >= seats {
            return (newly, true);
        }
        let continuing = self.continuing();
        if self.elected.len() + continuing.len() <= seats {
            newly.extend(self.elect_without_quota(continuing));
            return (newly, true);
        }
        (newly, false)
    }

    fn act(&mut self) -> Result<(RoundAction, TransferSummary), TieError> {
        if !self.pending.is_empty() {
            let c = self.next_surplus()?;
            let surplus = self.totals[c.index()] - self.quota;
            let summary = self.transfer_surplus(c);
            Ok((RoundAction::Surplus { candidate: c, surplus }, summary))
        } else {
            let (c, summary) = self.eliminate_lowest()?;
            Ok((RoundAction::Elimination { candidate: c }, summary))
        }
    }

    /// Runs the count to completion, recording every round.
    pub fn run(mut self) -> Result<TabulationRecord, TieError> {
        let mut rounds = Vec::new();
        loop {
            let totals: BTreeMap<CandidateId, FixedVote> = self
                .continuing()
                .into_iter()
                .map(|c| (c, self.totals[c.index()]))
                .collect();
            let held: BTreeMap<CandidateId, FixedVote> =
                self.elected.iter().map(|&c| (c, self.totals[c.index()])).collect();
            let (exhausted, loss) = (self.exhausted, self.loss);
            let (elected, done) = self.open_round();
            let (action, summary) = if done {
                (RoundAction::Complete, TransferSummary::default())
            } else {
                self.act()?
            };
            rounds.push(Round {
                number: self.round,
                totals,
                held,
                exhausted,
                loss,
                elected,
                action,
                transfers: summary.received,
                exhausted_by_action: summary.exhausted,
            });
            if done {
                break;
            }
        }
        Ok(TabulationRecord {
            seats: self.election.seats(),
            total_voters: self.election.profile().total_voters(),
            quota: self.quota,
            rounds,
            winners: self.elected,
            final_exhausted: self.exhausted,
            final_loss: self.loss,
            tie_breaks: self.tie_breaks,
        })
    }

    /// Runs the count to completion without building the round table.
    pub fn run_outcome(mut self) -> Result<Outcome, TieError> {
        loop {
            let (_, done) = self.open_round();
            if done {
                break;
            }
            self.act()?;
        }
        Ok(Outcome {
            winners: self.elected.into_iter().collect(),
            index_tie: !self.tie_breaks.is_empty(),
        })
    }
}

/// Full count of `election` with its votes-by-round table.
pub fn tabulate(election: &Election, policy: TiePolicy) -> Result<TabulationRecord, TieError> {
    Count::new(election, policy).run()
}

/// Winner set only; used by the searchers for probe counts.
pub fn winners(election: &Election, policy: TiePolicy) -> Result<Outcome, TieError> {
    Count::new(election, policy).run_outcome()
}

/// `W(P, s)` for every `s` in `1..=S` on the same ballots.
pub fn winner_sets_for_all_seat_counts(
    election: &Election,
    policy: TiePolicy,
) -> Result<BTreeMap<usize, BTreeSet<CandidateId>>, TieError> {
    (1..=election.seats())
        .map(|s| {
            let e = election.with_seats(s).expect("fewer seats stays valid");
            winners(&e, policy).map(|o| (s, o.winners))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{example_profile, perth_kinross_profile};
    use crate::model::{roster_from_names, PreferenceProfile};

    fn fv(s: &str) -> FixedVote {
        s.parse().unwrap()
    }

    fn ids(v: &[u32]) -> Vec<CandidateId> {
        v.iter().map(|&c| CandidateId(c)).collect()
    }

    #[test]
    fn quota_values() {
        assert_eq!(compute_quota(501, 1).unwrap(), 251);
        assert_eq!(compute_quota(501, 2).unwrap(), 168);
        assert_eq!(compute_quota(1, 1).unwrap(), 1);
        assert!(compute_quota(0, 1).is_err());
        assert!(compute_quota(10, 0).is_err());
    }

    #[test]
    fn single_seat_example() {
        let e = Election::new(example_profile(), 1).unwrap();
        let rec = tabulate(&e, TiePolicy::Fail).unwrap();
        assert_eq!(rec.quota, FixedVote::from_votes(251));
        assert_eq!(rec.winners, ids(&[2]));
        assert_eq!(rec.rounds.len(), 3);
        assert_eq!(rec.rounds[0].eliminated(), Some(CandidateId(3)));
        assert_eq!(rec.rounds[1].eliminated(), Some(CandidateId(4)));
        assert_eq!(rec.rounds[1].totals[&CandidateId(4)], fv("154"));
        assert_eq!(rec.rounds[2].totals[&CandidateId(2)], fv("301"));
    }

    #[test]
    fn elimination_transfers_first_round() {
        let e = Election::new(example_profile(), 2).unwrap();
        let mut count = Count::new(&e, TiePolicy::Fail);
        assert!(count.elect_at_quota().is_empty());
        let (loser, summary) = count.eliminate_lowest().unwrap();
        assert_eq!(loser, CandidateId(3));
        assert_eq!(summary.received[&CandidateId(1)], fv("57"));
        assert_eq!(summary.received[&CandidateId(2)], fv("12"));
        assert_eq!(summary.received[&CandidateId(4)], fv("40"));
        assert!(summary.exhausted.is_zero());
    }

    #[test]
    fn surplus_transfer_example() {
        let e = Election::new(example_profile(), 2).unwrap();
        let mut count = Count::new(&e, TiePolicy::Fail);
        count.eliminate_lowest().unwrap();
        assert_eq!(count.elect_at_quota(), ids(&[1]));
        assert_eq!(count.total(CandidateId(1)), fv("192"));
        let summary = count.transfer_surplus(CandidateId(1));
        assert_eq!(summary.received[&CandidateId(2)], fv("7.5"));
        assert_eq!(summary.received[&CandidateId(4)], fv("9.375"));
        assert_eq!(summary.exhausted, fv("7.125"));
        assert!(summary.loss.is_zero());
        assert_eq!(count.total(CandidateId(1)), fv("168"));
        assert_eq!(count.total(CandidateId(2)), fv("162.5"));
        assert_eq!(count.total(CandidateId(4)), fv("163.375"));
    }

    #[test]
    fn zero_surplus_is_noop() {
        // 3 seats, 8 voters: quota 3; A has exactly 3.
        let p = PreferenceProfile::from_counts(
            roster_from_names(&["A", "B", "C", "D"]),
            &[(3, &[1, 2]), (2, &[2]), (2, &[3]), (1, &[4])],
        )
        .unwrap();
        let e = Election::new(p, 3).unwrap();
        let mut count = Count::new(&e, TiePolicy::Fail);
        assert_eq!(count.elect_at_quota(), ids(&[1]));
        let before = count.total(CandidateId(2));
        let summary = count.transfer_surplus(CandidateId(1));
        assert_eq!(summary, TransferSummary::default());
        assert_eq!(count.total(CandidateId(2)), before);
        let rec = tabulate(&e, TiePolicy::Fail).unwrap();
        assert_eq!(
            rec.rounds[0].action,
            RoundAction::Surplus {
                candidate: CandidateId(1),
                surplus: FixedVote::ZERO
            }
        );
    }

    #[test]
    fn perth_kinross_runoff() {
        let e = Election::new(perth_kinross_profile(), 1).unwrap();
        let rec = tabulate(&e, TiePolicy::Fail).unwrap();
        assert_eq!(rec.rounds[0].eliminated(), Some(CandidateId(1)));
        assert_eq!(rec.rounds[1].totals[&CandidateId(2)], fv("2381"));
        assert_eq!(rec.rounds[1].totals[&CandidateId(3)], fv("2227"));
        assert_eq!(rec.winners, ids(&[2]));
    }

    #[test]
    fn all_seats_filled_immediately() {
        let e = Election::new(example_profile(), 4).unwrap();
        let rec = tabulate(&e, TiePolicy::Fail).unwrap();
        assert_eq!(rec.rounds.len(), 1);
        assert_eq!(rec.winner_set().len(), 4);
    }

    #[test]
    fn two_left_one_seat() {
        let p = PreferenceProfile::from_counts(roster_from_names(&["A", "B"]), &[(3, &[1]), (2, &[2])]).unwrap();
        let e = Election::new(p, 1).unwrap();
        assert_eq!(tabulate(&e, TiePolicy::Fail).unwrap().winners, ids(&[1]));
    }

    #[test]
    fn early_stop_below_quota() {
        // D can finish below quota when it is the last continuing candidate.
        let p =
            PreferenceProfile::from_counts(roster_from_names(&["A", "B", "C"]), &[(10, &[1]), (4, &[2]), (3, &[3])])
                .unwrap();
        let e = Election::new(p, 2).unwrap();
        let rec = tabulate(&e, TiePolicy::Fail).unwrap();
        assert_eq!(rec.winners, ids(&[1, 2]));
        assert!(rec.rounds.last().unwrap().totals[&CandidateId(2)] < rec.quota);
    }

    #[test]
    fn ties_by_policy() {
        let p = PreferenceProfile::from_counts(roster_from_names(&["A", "B", "C"]), &[(4, &[1]), (2, &[2]), (2, &[3])])
            .unwrap();
        let e = Election::new(p, 1).unwrap();
        let err = tabulate(&e, TiePolicy::Fail).unwrap_err();
        assert_eq!(err.candidates, ids(&[2, 3]));
        let rec = tabulate(&e, TiePolicy::Index).unwrap();
        assert_eq!(rec.rounds[0].eliminated(), Some(CandidateId(2)));
        assert_eq!(rec.tie_breaks.len(), 1);
        assert!(winners(&e, TiePolicy::Index).unwrap().index_tie);
    }

    #[test]
    fn backward_tie_break() {
        // Round 1: C out (1). Round 2: A 4, B 4 tied with D 5 ahead; in round 1 A had 4, B had 3.
        let p = PreferenceProfile::from_counts(
            roster_from_names(&["A", "B", "C", "D"]),
            &[(4, &[1]), (3, &[2]), (1, &[3, 2]), (5, &[4]), (2, &[4, 1])],
        )
        .unwrap();
        let e = Election::new(p, 1).unwrap();
        let rec = tabulate(&e, TiePolicy::Fail).unwrap();
        assert_eq!(rec.elimination_order()[..2], ids(&[3, 2]));
        assert!(rec.tie_breaks.is_empty());
    }

    #[test]
    fn seat_count_sweep() {
        let e = Election::new(example_profile(), 2).unwrap();
        let sets = winner_sets_for_all_seat_counts(&e, TiePolicy::Fail).unwrap();
        assert_eq!(sets[&1], ids(&[2]).into_iter().collect());
        assert_eq!(sets[&2], ids(&[1, 4]).into_iter().collect());
        let single = Election::new(example_profile(), 1).unwrap();
        assert_eq!(
            winner_sets_for_all_seat_counts(&single, TiePolicy::Fail).unwrap().len(),
            1
        );
    }

    #[test]
    fn outcome_matches_record() {
        for s in 1..=4 {
            let e = Election::new(example_profile(), s).unwrap();
            assert_eq!(
                winners(&e, TiePolicy::Fail).unwrap().winners,
                tabulate(&e, TiePolicy::Fail).unwrap().winner_set()
            );
        }
    }

    mod properties {
        use proptest::prelude::*;

        use super::*;
        use crate::fixtures::strategies::arb_election;

        proptest! {
            #[test]
            fn value_is_conserved(e in arb_election(7, 20, 60)) {
                let rec = tabulate(&e, TiePolicy::Index).unwrap();
                let initial = FixedVote::from_votes(e.profile().total_voters());
                for r in &rec.rounds {
                    let counted: FixedVote = r.totals.values().chain(r.held.values()).copied().sum();
                    prop_assert_eq!(counted + r.exhausted + r.loss, initial);
                }
                prop_assert_eq!(rec.winners.len(), e.seats());
                prop_assert!(rec.final_loss >= rec.rounds.last().unwrap().loss);
                prop_assert!(rec.final_exhausted + rec.final_loss <= initial);
            }

            #[test]
            fn outcome_matches_record(e in arb_election(6, 12, 40)) {
                let rec = tabulate(&e, TiePolicy::Index).unwrap();
                let out = winners(&e, TiePolicy::Index).unwrap();
                prop_assert_eq!(out.winners, rec.winner_set());
                prop_assert_eq!(out.index_tie, !rec.tie_breaks.is_empty());
            }

            #[test]
            fn fail_policy_agrees_when_no_tie(e in arb_election(6, 12, 40)) {
                let indexed = tabulate(&e, TiePolicy::Index).unwrap();
                match tabulate(&e, TiePolicy::Fail) {
                    Ok(rec) => prop_assert_eq!(rec, indexed),
                    Err(_) => prop_assert!(!indexed.tie_breaks.is_empty()),
                }
            }
        }
    }
}
