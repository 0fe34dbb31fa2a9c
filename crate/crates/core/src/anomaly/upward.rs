//! Winners who lose after being moved up.

use std::collections::BTreeMap;

use super::modify::{shift_up_targets, Working};
use super::search::{take_greedy, to_top, votes_to_pass, Context, Outcome};
use super::{AnomalyCertificate, AnomalyKind, Modification, SearchOptions, SearchReport};
use crate::error::TieError;
use crate::model::{CandidateId, Election};

fn shift(from: &[CandidateId], to: Vec<CandidateId>, count: u64) -> Modification {
    Modification::ShiftUp {
        from: from.to_vec(),
        to,
        count,
    }
}

struct Upward<'e> {
    ctx: Context<'e>,
    found: BTreeMap<CandidateId, AnomalyCertificate>,
}

enum Step {
    Hit,
    Miss,
    Stop,
}

impl Upward<'_> {
    fn try_work(&mut self, x: CandidateId, work: &Working) -> Step {
        match self.ctx.probe(work) {
            Outcome::Stop => Step::Stop,
            Outcome::Skip => Step::Miss,
            Outcome::Winners(w, tie) => {
                if w.contains(&x) {
                    return Step::Miss;
                }
                match self
                    .ctx
                    .certify(AnomalyKind::Upward, x, None, work.mods().to_vec(), w, tie)
                {
                    Some(cert) => {
                        let better = self
                            .found
                            .get(&x)
                            .is_none_or(|old| cert.ballots_changed() < old.ballots_changed());
                        if better {
                            self.found.insert(x, cert);
                        }
                        Step::Hit
                    }
                    None => Step::Miss,
                }
            }
        }
    }

    fn open(&self) -> Vec<CandidateId> {
        self.ctx
            .record
            .winners
            .iter()
            .copied()
            .filter(|x| !self.found.contains_key(x))
            .collect()
    }

    /// Push the winner to the top of ballots headed by a rival so the rival
    /// drops out before the candidate who was actually excluded.
    fn elimination_order(&mut self) -> bool {
        let quota = self.ctx.quota();
        let election = self.ctx.election;
        for round in self.ctx.elimination_rounds() {
            for x in self.open() {
                let Some(&tx) = round.totals.get(&x) else { continue };
                let te = round.totals[&round.eliminated];
                for (&ci, &tc) in &round.totals {
                    if ci == x || ci == round.eliminated {
                        continue;
                    }
                    let need = votes_to_pass(tc - te);
                    if tx + crate::fixed::FixedVote::from_votes(need) >= quota {
                        continue;
                    }
                    let pool = election
                        .profile()
                        .ballots()
                        .iter()
                        .filter(|b| round.head(&b.ranking) == Some(ci))
                        .map(|b| (b.ranking.clone(), b.count));
                    let Some(work) = take_greedy(election, pool, need, |r, k| shift(r, to_top(r, x), k)) else {
                        continue;
                    };
                    match self.try_work(x, &work) {
                        Step::Stop => return false,
                        Step::Hit => break,
                        Step::Miss => {}
                    }
                }
            }
        }
        true
    }

    /// Lift a later winner above an earlier one so the earlier winner
    /// misses quota in the round they were elected.
    fn seat_order(&mut self) -> bool {
        let winners = self.ctx.record.winners.clone();
        let quota = self.ctx.quota();
        let election = self.ctx.election;
        for (i, &w1) in winners.iter().enumerate() {
            let Some(r1) = self.ctx.record.elected_in_round(w1) else {
                continue;
            };
            let Some(&t1) = self.ctx.record.rounds[r1 - 1].totals.get(&w1) else {
                continue;
            };
            if t1 < quota {
                continue;
            }
            let need = votes_to_pass(t1 - quota);
            for &x in &winners[i + 1..] {
                if self.found.contains_key(&x) {
                    continue;
                }
                let pool = election
                    .profile()
                    .ballots()
                    .iter()
                    .filter(|b| b.ranking.len() >= 2 && b.ranking[0] == w1 && b.ranking[1] == x)
                    .map(|b| (b.ranking.clone(), b.count));
                let Some(work) = take_greedy(election, pool, need, |r, k| shift(r, to_top(r, x), k)) else {
                    continue;
                };
                if let Step::Stop = self.try_work(x, &work) {
                    return false;
                }
            }
        }
        true
    }

    /// One ballot at a time over ballots headed by each rival, nearest first.
    fn brute_force(&mut self) -> bool {
        let election = self.ctx.election;
        let ballots = election.profile().ballots();
        for x in self.open() {
            'rivals: for b in election.active_candidates() {
                if b == x {
                    continue;
                }
                let mut headed: Vec<_> = ballots
                    .iter()
                    .filter(|t| t.first() == b && t.position(x).is_some())
                    .collect();
                headed.sort_by_key(|t| t.position(x));
                let bullets: Vec<_> = ballots.iter().filter(|t| t.ranking == [b]).collect();
                let second: Vec<_> = headed.iter().copied().filter(|t| t.position(x) == Some(1)).collect();
                let orders = [
                    headed.iter().chain(&bullets).copied().collect::<Vec<_>>(),
                    second.iter().chain(&bullets).copied().collect::<Vec<_>>(),
                ];
                for (n, order) in orders.iter().enumerate() {
                    if n == 1 && order.len() == orders[0].len() {
                        continue;
                    }
                    let mut work = Working::new(election);
                    for t in order {
                        for _ in 0..t.count {
                            work.push(shift(&t.ranking, to_top(&t.ranking, x), 1));
                            match self.try_work(x, &work) {
                                Step::Stop => return false,
                                Step::Hit => break 'rivals,
                                Step::Miss => {}
                            }
                        }
                    }
                }
            }
        }
        true
    }

    /// Every single-type move: each ballot type, each higher position, each count.
    fn sweep(&mut self) -> bool {
        let election = self.ctx.election;
        for x in self.open() {
            'types: for t in election.profile().ballots() {
                for to in shift_up_targets(&t.ranking, x) {
                    for k in 1..=t.count {
                        let mut work = Working::new(election);
                        work.push(shift(&t.ranking, to.clone(), k));
                        match self.try_work(x, &work) {
                            Step::Stop => return false,
                            Step::Hit => break 'types,
                            Step::Miss => {}
                        }
                    }
                }
            }
        }
        true
    }
}

/// Searches for winners who lose a seat after being ranked higher on some
/// ballots. At most one certificate per winner, in winner order.
pub fn search_upward(election: &Election, options: &SearchOptions) -> Result<SearchReport, TieError> {
    let Some(ctx) = Context::start(election, options)? else {
        return Ok(Context::skipped());
    };
    let mut s = Upward {
        ctx,
        found: BTreeMap::new(),
    };
    let _ = s.elimination_order() && s.seat_order() && s.brute_force() && s.sweep();
    let certs = s.found.into_values().collect();
    Ok(s.ctx.finish(certs))
}
