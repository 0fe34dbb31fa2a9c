//! Voters whose abstention would have helped a preferred candidate.

use std::collections::{BTreeMap, BTreeSet};

use super::modify::{removable, Working};
use super::search::{take_greedy, votes_to_pass, Context, Outcome};
use super::{AnomalyCertificate, AnomalyKind, Flag, Modification, SearchOptions, SearchReport};
use crate::error::TieError;
use crate::model::{BallotType, CandidateId, Election};

fn remove(from: &[CandidateId], count: u64) -> Modification {
    Modification::Remove {
        from: from.to_vec(),
        count,
    }
}

fn rank(cert: &AnomalyCertificate) -> (bool, u64) {
    (cert.flags.contains(&Flag::AmbiguousNoShow), cert.ballots_changed())
}

/// `x` within the top `seats` places.
fn clear(ranking: &[CandidateId], x: CandidateId, seats: usize) -> bool {
    ranking.iter().take(seats).any(|&c| c == x)
}

type Pair = (CandidateId, CandidateId);

struct NoShow<'e> {
    ctx: Context<'e>,
    found: BTreeMap<Pair, AnomalyCertificate>,
}

enum Step {
    Hit(Pair),
    Miss,
    Stop,
}

impl NoShow<'_> {
    fn seats(&self) -> usize {
        self.ctx.election.seats()
    }

    fn pairs(&self) -> Vec<Pair> {
        let losers = self.ctx.losers();
        losers
            .iter()
            .flat_map(|&x| self.ctx.winners.iter().map(move |&y| (x, y)))
            .collect()
    }

    /// Pairs still worth searching: none found, or only an ambiguous one.
    fn open(&self) -> Vec<Pair> {
        self.pairs()
            .into_iter()
            .filter(|p| {
                self.found
                    .get(p)
                    .is_none_or(|c| c.flags.contains(&Flag::AmbiguousNoShow))
            })
            .collect()
    }

    fn try_work(&mut self, work: &Working) -> Step {
        match self.ctx.probe(work) {
            Outcome::Stop => Step::Stop,
            Outcome::Skip => Step::Miss,
            Outcome::Winners(w, tie) => {
                let gained: Vec<_> = w.difference(&self.ctx.winners).copied().collect();
                let lost: Vec<_> = self.ctx.winners.difference(&w).copied().collect();
                let ([x], [y]) = (gained.as_slice(), lost.as_slice()) else {
                    return Step::Miss;
                };
                let (x, y) = (*x, *y);
                let seats = self.seats();
                if !work.mods().iter().all(|m| removable(m.source().unwrap(), x, y, seats)) {
                    return Step::Miss;
                }
                match self
                    .ctx
                    .certify(AnomalyKind::NoShow, x, Some(y), work.mods().to_vec(), w, tie)
                {
                    Some(cert) => {
                        if self.found.get(&(x, y)).is_none_or(|old| rank(&cert) < rank(old)) {
                            self.found.insert((x, y), cert);
                        }
                        Step::Hit((x, y))
                    }
                    None => Step::Miss,
                }
            }
        }
    }

    fn eligible<'b>(&self, ballots: &'b [BallotType], (x, y): Pair) -> impl Iterator<Item = &'b BallotType> + use<'b> {
        let seats = self.seats();
        ballots.iter().filter(move |b| removable(&b.ranking, x, y, seats))
    }

    /// Remove ballots headed by a rival so the rival drops out before the
    /// candidate who was actually excluded.
    fn elimination_order(&mut self) -> bool {
        let election = self.ctx.election;
        let ballots = election.profile().ballots();
        for round in self.ctx.elimination_rounds() {
            let te = round.totals[&round.eliminated];
            for pair in self.open() {
                for (&ci, &tc) in &round.totals {
                    if ci == round.eliminated {
                        continue;
                    }
                    let need = votes_to_pass(tc - te);
                    let pool = self
                        .eligible(ballots, pair)
                        .filter(|b| round.head(&b.ranking) == Some(ci))
                        .map(|b| (b.ranking.clone(), b.count));
                    let Some(work) = take_greedy(election, pool, need, remove) else {
                        continue;
                    };
                    if let Step::Stop = self.try_work(&work) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Remove ballots headed by an early winner so they miss quota in the
    /// round they were elected.
    fn seat_order(&mut self) -> bool {
        let election = self.ctx.election;
        let ballots = election.profile().ballots();
        let quota = self.ctx.quota();
        let winners = self.ctx.record.winners.clone();
        for w1 in winners {
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
            for pair in self.open() {
                let pool = self
                    .eligible(ballots, pair)
                    .filter(|b| b.first() == w1)
                    .map(|b| (b.ranking.clone(), b.count));
                let Some(work) = take_greedy(election, pool, need, remove) else {
                    continue;
                };
                if let Step::Stop = self.try_work(&work) {
                    return false;
                }
            }
        }
        true
    }

    /// One ballot at a time over every eligible ballot type, ballots that
    /// rank the gaining candidate highest first.
    fn brute_force(&mut self) -> bool {
        let election = self.ctx.election;
        let ballots = election.profile().ballots();
        let seats = self.seats();
        for pair in self.open() {
            if !self.open().contains(&pair) {
                continue;
            }
            let (x, _) = pair;
            let mut order: Vec<&BallotType> = self.eligible(ballots, pair).collect();
            order.sort_by_key(|b| (!clear(&b.ranking, x, seats), b.position(x)));
            let mut work = Working::new(election);
            'order: for t in order {
                for _ in 0..t.count {
                    work.push(remove(&t.ranking, 1));
                    match self.try_work(&work) {
                        Step::Stop => return false,
                        Step::Hit(p) if p == pair => break 'order,
                        _ => {}
                    }
                }
            }
        }
        true
    }

    /// Every single ballot type, every removal count.
    fn sweep(&mut self) -> bool {
        let election = self.ctx.election;
        let seats = self.seats();
        let pairs = self.pairs();
        for t in election.profile().ballots() {
            let wanted: BTreeSet<Pair> = pairs
                .iter()
                .copied()
                .filter(|&(x, y)| removable(&t.ranking, x, y, seats))
                .filter(|&(x, y)| match self.found.get(&(x, y)) {
                    None => true,
                    Some(c) => c.flags.contains(&Flag::AmbiguousNoShow) && clear(&t.ranking, x, seats),
                })
                .collect();
            if wanted.is_empty() {
                continue;
            }
            for k in 1..=t.count {
                let mut work = Working::new(election);
                work.push(remove(&t.ranking, k));
                match self.try_work(&work) {
                    Step::Stop => return false,
                    Step::Hit(_) => {
                        let settled = wanted.iter().all(|&(x, y)| {
                            self.found.get(&(x, y)).is_some_and(|c| {
                                !c.flags.contains(&Flag::AmbiguousNoShow) || !clear(&t.ranking, x, seats)
                            })
                        });
                        if settled {
                            break;
                        }
                    }
                    Step::Miss => {}
                }
            }
        }
        true
    }
}

/// Searches for ballots whose removal swaps a winner for a candidate those
/// voters ranked higher. At most one certificate per (gaining, displaced)
/// pair, preferring unambiguous and then smaller removals.
pub fn search_no_show(election: &Election, options: &SearchOptions) -> Result<SearchReport, TieError> {
    let Some(ctx) = Context::start(election, options)? else {
        return Ok(Context::skipped());
    };
    let mut s = NoShow {
        ctx,
        found: BTreeMap::new(),
    };
    let _ = s.elimination_order() && s.seat_order() && s.brute_force() && s.sweep();
    let certs = s.found.into_values().collect();
    Ok(s.ctx.finish(certs))
}
