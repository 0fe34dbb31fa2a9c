//! Losers who win after being moved down.

use std::collections::BTreeMap;

use super::modify::{bullet_rewrite_targets, shift_down_targets, Working};
use super::search::{below, take_greedy, votes_to_pass, votes_to_reach, Context, Outcome};
use super::{AnomalyCertificate, AnomalyKind, Modification, SearchOptions, SearchReport};
use crate::error::TieError;
use crate::model::{CandidateId, Election};

fn shift(from: &[CandidateId], to: Vec<CandidateId>, count: u64) -> Modification {
    Modification::ShiftDown {
        from: from.to_vec(),
        to,
        count,
    }
}

fn rewrite(from: &[CandidateId], to: Vec<CandidateId>, count: u64) -> Modification {
    Modification::BulletRewrite {
        from: from.to_vec(),
        to,
        count,
    }
}

fn rank(cert: &AnomalyCertificate) -> (bool, u64) {
    (cert.kind == AnomalyKind::DownwardWeak, cert.ballots_changed())
}

struct Downward<'e> {
    ctx: Context<'e>,
    found: BTreeMap<CandidateId, AnomalyCertificate>,
}

enum Step {
    Hit,
    Miss,
    Stop,
}

impl Downward<'_> {
    fn try_work(&mut self, x: CandidateId, work: &Working) -> Step {
        match self.ctx.probe(work) {
            Outcome::Stop => Step::Stop,
            Outcome::Skip => Step::Miss,
            Outcome::Winners(w, tie) => {
                if !w.contains(&x) {
                    return Step::Miss;
                }
                let weak = work
                    .mods()
                    .iter()
                    .any(|m| matches!(m, Modification::BulletRewrite { .. }));
                let kind = if weak {
                    AnomalyKind::DownwardWeak
                } else {
                    AnomalyKind::DownwardStrong
                };
                match self.ctx.certify(kind, x, None, work.mods().to_vec(), w, tie) {
                    Some(cert) => {
                        if self.found.get(&x).is_none_or(|old| rank(&cert) < rank(old)) {
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
            .losers()
            .into_iter()
            .filter(|x| !self.found.contains_key(x))
            .collect()
    }

    fn has_strong(&self, x: CandidateId) -> bool {
        self.found
            .get(&x)
            .is_some_and(|c| c.kind == AnomalyKind::DownwardStrong)
    }

    /// Hand ballots headed by the loser to the candidate about to be excluded
    /// so that someone else goes out first.
    fn elimination_order(&mut self) -> bool {
        let election = self.ctx.election;
        for round in self.ctx.elimination_rounds() {
            let e = round.eliminated;
            let te = round.totals[&e];
            let Some((&next, &tn)) = round
                .totals
                .iter()
                .filter(|(&c, _)| c != e)
                .min_by_key(|(&c, &t)| (t, c))
            else {
                continue;
            };
            for x in self.open() {
                if x == e || x == next || !round.totals.contains_key(&x) {
                    continue;
                }
                let need = votes_to_pass(tn - te);
                let pool = election
                    .profile()
                    .ballots()
                    .iter()
                    .filter(|b| round.head(&b.ranking) == Some(x) && round.second(&b.ranking) == Some(e))
                    .map(|b| (b.ranking.clone(), b.count));
                let Some(work) = take_greedy(election, pool, need, |r, k| shift(r, below(r, x, e), k)) else {
                    continue;
                };
                if let Step::Stop = self.try_work(x, &work) {
                    return false;
                }
            }
        }
        true
    }

    /// Hand ballots headed by the loser to a winner so that winner reaches
    /// quota sooner and releases a surplus earlier.
    fn seat_order(&mut self) -> bool {
        let election = self.ctx.election;
        let quota = self.ctx.quota();
        let rounds = self.ctx.record.rounds.clone();
        for round in &rounds {
            for (&w, &tw) in &round.totals {
                if !self.ctx.winners.contains(&w) || tw >= quota {
                    continue;
                }
                let need = votes_to_reach(quota - tw);
                for x in self.open() {
                    if !round.totals.contains_key(&x) {
                        continue;
                    }
                    let pool = election
                        .profile()
                        .ballots()
                        .iter()
                        .filter(|b| {
                            let cont = |c: &CandidateId| round.totals.contains_key(c);
                            let mut it = b.ranking.iter().filter(|c| cont(c));
                            it.next() == Some(&x) && it.next() == Some(&w)
                        })
                        .map(|b| (b.ranking.clone(), b.count));
                    let Some(work) = take_greedy(election, pool, need, |r, k| shift(r, below(r, x, w), k)) else {
                        continue;
                    };
                    if let Step::Stop = self.try_work(x, &work) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// One ballot at a time: ballots headed by the loser, moving it below a
    /// rival, nearest rival first; then bullet votes rewritten to the rival.
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
                    .filter(|t| t.first() == x && t.position(b).is_some())
                    .collect();
                headed.sort_by_key(|t| t.position(b));
                let bullets: Vec<_> = ballots.iter().filter(|t| t.ranking == [x]).collect();
                let second: Vec<_> = headed.iter().copied().filter(|t| t.position(b) == Some(1)).collect();
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
                        let m = |k| {
                            if t.is_bullet() {
                                rewrite(&t.ranking, vec![b, x], k)
                            } else {
                                shift(&t.ranking, below(&t.ranking, x, b), k)
                            }
                        };
                        for _ in 0..t.count {
                            work.push(m(1));
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

    /// Every single-type move: lower positions first, then bullet rewrites.
    fn sweep(&mut self) -> bool {
        let election = self.ctx.election;
        let candidates = election.active_candidates();
        for x in self.ctx.losers() {
            if self.has_strong(x) {
                continue;
            }
            let mut moves: Vec<(Vec<CandidateId>, Vec<CandidateId>, u64, bool)> = Vec::new();
            for t in election.profile().ballots() {
                for to in shift_down_targets(&t.ranking, x) {
                    moves.push((t.ranking.clone(), to, t.count, false));
                }
            }
            for t in election.profile().ballots() {
                for to in bullet_rewrite_targets(&t.ranking, x, &candidates) {
                    moves.push((t.ranking.clone(), to, t.count, true));
                }
            }
            'moves: for (from, to, count, bullet) in moves {
                if bullet && self.found.contains_key(&x) {
                    break;
                }
                for k in 1..=count {
                    let mut work = Working::new(election);
                    let m = if bullet {
                        rewrite(&from, to.clone(), k)
                    } else {
                        shift(&from, to.clone(), k)
                    };
                    work.push(m);
                    match self.try_work(x, &work) {
                        Step::Stop => return false,
                        Step::Hit => break 'moves,
                        Step::Miss => {}
                    }
                }
            }
        }
        true
    }
}

/// Searches for losers who win a seat after being ranked lower on some
/// ballots. At most one certificate per loser, strong form preferred.
pub fn search_downward(election: &Election, options: &SearchOptions) -> Result<SearchReport, TieError> {
    let Some(ctx) = Context::start(election, options)? else {
        return Ok(Context::skipped());
    };
    let mut s = Downward {
        ctx,
        found: BTreeMap::new(),
    };
    let _ = s.elimination_order() && s.seat_order() && s.brute_force() && s.sweep();
    let certs = s.found.into_values().collect();
    Ok(s.ctx.finish(certs))
}
