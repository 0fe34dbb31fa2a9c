//! Exhaustive enumeration of single-type ballot changes for small elections.
//!
//! Replays here work on an expanded list of individual ballots rather than
//! on ballot-type counts, so they do not share code with the searchers.

use std::collections::BTreeSet;

use thiserror::Error;

use super::modify::{bullet_rewrite_targets, shift_down_targets, shift_up_targets};
use super::verify::{shape_flags, verify_certificate};
use super::{AnomalyCertificate, AnomalyKind, Modification, Relation};
use crate::engine::{winners, TiePolicy};
use crate::error::TieError;
use crate::model::{BallotType, CandidateId, Election, PreferenceProfile};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleCaps {
    pub max_candidates: usize,
    pub max_types: usize,
    pub max_voters: u64,
}

impl Default for OracleCaps {
    fn default() -> Self {
        OracleCaps {
            max_candidates: 4,
            max_types: 6,
            max_voters: 40,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("election exceeds oracle caps ({candidates} candidates, {types} ballot types, {voters} voters)")]
    CapsExceeded {
        candidates: usize,
        types: usize,
        voters: u64,
    },
    #[error(transparent)]
    Tie(#[from] TieError),
}

fn expand(election: &Election) -> Vec<Vec<CandidateId>> {
    election
        .profile()
        .ballots()
        .iter()
        .flat_map(|b| std::iter::repeat_n(b.ranking.clone(), b.count as usize))
        .collect()
}

/// Applies ballot changes one ballot at a time. `None` if a change asks for
/// more ballots than exist.
fn replay(election: &Election, mods: &[Modification]) -> Option<Election> {
    let mut ballots: Vec<Option<Vec<CandidateId>>> = expand(election).into_iter().map(Some).collect();
    let mut seats = election.seats();
    for m in mods {
        if let Modification::SeatCount { seats: s } = m {
            seats = *s;
            continue;
        }
        let from = m.source()?;
        let mut left = m.count();
        let mut replaced = Vec::new();
        for slot in ballots.iter_mut() {
            if left == 0 {
                break;
            }
            if slot.as_deref() == Some(from) {
                *slot = None;
                replaced.push(m.result().map(<[CandidateId]>::to_vec));
                left -= 1;
            }
        }
        if left > 0 {
            return None;
        }
        ballots.extend(replaced);
    }
    let types = ballots.into_iter().flatten().map(|r| BallotType::new(r, 1));
    let profile = PreferenceProfile::new(election.profile().roster().to_vec(), types).ok()?;
    Election::with_withdrawn(profile, seats, election.withdrawn().clone()).ok()
}

fn strictly_higher(from: &[CandidateId], to: &[CandidateId], x: CandidateId) -> bool {
    let rest = |r: &[CandidateId]| r.iter().copied().filter(|&c| c != x).collect::<Vec<_>>();
    let old = from.iter().position(|&c| c == x).unwrap_or(usize::MAX);
    let new = to.iter().position(|&c| c == x);
    rest(from) == rest(to)
        && match new {
            Some(q) => q < old && (old != usize::MAX || q == 0),
            None => false,
        }
}

fn strictly_lower(from: &[CandidateId], to: &[CandidateId], x: CandidateId) -> bool {
    let rest = |r: &[CandidateId]| r.iter().copied().filter(|&c| c != x).collect::<Vec<_>>();
    match (from.iter().position(|&c| c == x), to.iter().position(|&c| c == x)) {
        (Some(p), Some(q)) => q > p && rest(from) == rest(to),
        _ => false,
    }
}

/// Independent replay of a certificate: rebuilds the modified ballots one by
/// one, recounts both elections and checks the claimed relation.
pub fn confirm(election: &Election, cert: &AnomalyCertificate) -> bool {
    let x = cert.focal;
    let s = election.seats();
    let legal = cert.modifications.iter().all(|m| match (cert.kind, m) {
        (AnomalyKind::CommitteeSize, Modification::SeatCount { seats }) => *seats < s && *seats > 0,
        (AnomalyKind::Upward, Modification::ShiftUp { from, to, .. }) => strictly_higher(from, to, x),
        (AnomalyKind::DownwardStrong | AnomalyKind::DownwardWeak, Modification::ShiftDown { from, to, .. }) => {
            strictly_lower(from, to, x)
        }
        (AnomalyKind::DownwardWeak, Modification::BulletRewrite { from, to, .. }) => {
            from.as_slice() == [x] && to.first() != Some(&x) && (to.len() == 1 || to.as_slice() == [to[0], x])
        }
        (AnomalyKind::NoShow, Modification::Remove { from, .. }) => {
            let y = cert.displaced.unwrap_or(x);
            let px = from.iter().position(|&c| c == x);
            let py = from.iter().position(|&c| c == y);
            px.is_some() && py.is_none_or(|q| q >= s && px.unwrap() < q)
        }
        _ => false,
    });
    if !legal || cert.modifications.is_empty() {
        return false;
    }
    let Some(modified) = replay(election, &cert.modifications) else {
        return false;
    };
    let (Ok(before), Ok(after)) = (winners(election, TiePolicy::Fail), winners(&modified, TiePolicy::Fail)) else {
        return false;
    };
    let (w, w2) = (before.winners, after.winners);
    if w != cert.original_winners || w2 != cert.modified_winners {
        return false;
    }
    match cert.kind {
        AnomalyKind::CommitteeSize => !w2.is_subset(&w),
        AnomalyKind::Upward => w.contains(&x) && !w2.contains(&x),
        AnomalyKind::DownwardStrong | AnomalyKind::DownwardWeak => !w.contains(&x) && w2.contains(&x),
        AnomalyKind::NoShow => {
            let Some(y) = cert.displaced else { return false };
            let mut expect = w.clone();
            !w.contains(&x) && expect.remove(&y) && {
                expect.insert(x);
                expect == w2
            }
        }
    }
}

/// All single-type certificates of `kind` (both downward forms for either
/// downward kind), each confirmed and verified.
pub fn exhaustive_oracle(
    election: &Election,
    kind: AnomalyKind,
    caps: &OracleCaps,
) -> Result<Vec<AnomalyCertificate>, OracleError> {
    let profile = election.profile();
    if profile.num_candidates() > caps.max_candidates
        || profile.ballots().len() > caps.max_types
        || profile.total_voters() > caps.max_voters
    {
        return Err(OracleError::CapsExceeded {
            candidates: profile.num_candidates(),
            types: profile.ballots().len(),
            voters: profile.total_voters(),
        });
    }
    let base = winners(election, TiePolicy::Fail)?.winners;
    let candidates = election.active_candidates();
    let fingerprint = election.fingerprint();
    let seats = election.seats();

    let mut trials: Vec<(AnomalyKind, CandidateId, Option<CandidateId>, Modification)> = Vec::new();
    match kind {
        AnomalyKind::CommitteeSize => {
            for s in 1..seats {
                trials.push((kind, CandidateId(0), None, Modification::SeatCount { seats: s }));
            }
        }
        AnomalyKind::Upward => {
            for &x in base.iter() {
                for t in profile.ballots() {
                    for to in shift_up_targets(&t.ranking, x) {
                        for k in 1..=t.count {
                            let m = Modification::ShiftUp {
                                from: t.ranking.clone(),
                                to: to.clone(),
                                count: k,
                            };
                            trials.push((kind, x, None, m));
                        }
                    }
                }
            }
        }
        AnomalyKind::DownwardStrong | AnomalyKind::DownwardWeak => {
            for &x in candidates.iter().filter(|c| !base.contains(c)) {
                for t in profile.ballots() {
                    for to in shift_down_targets(&t.ranking, x) {
                        for k in 1..=t.count {
                            let m = Modification::ShiftDown {
                                from: t.ranking.clone(),
                                to: to.clone(),
                                count: k,
                            };
                            trials.push((AnomalyKind::DownwardStrong, x, None, m));
                        }
                    }
                    for to in bullet_rewrite_targets(&t.ranking, x, &candidates) {
                        for k in 1..=t.count {
                            let m = Modification::BulletRewrite {
                                from: t.ranking.clone(),
                                to: to.clone(),
                                count: k,
                            };
                            trials.push((AnomalyKind::DownwardWeak, x, None, m));
                        }
                    }
                }
            }
        }
        AnomalyKind::NoShow => {
            for t in profile.ballots() {
                for k in 1..=t.count {
                    let m = Modification::Remove {
                        from: t.ranking.clone(),
                        count: k,
                    };
                    trials.push((kind, CandidateId(0), None, m));
                }
            }
        }
    }

    let mut out = Vec::new();
    for (kind, focal, _, m) in trials {
        let Some(modified) = replay(election, std::slice::from_ref(&m)) else {
            continue;
        };
        let Ok(after) = winners(&modified, TiePolicy::Fail) else {
            continue;
        };
        let after = after.winners;
        let mut candidates_for: Vec<(CandidateId, Option<CandidateId>)> = Vec::new();
        match kind {
            AnomalyKind::CommitteeSize => {
                if let Some(&f) = after.difference(&base).next() {
                    candidates_for.push((f, None));
                }
            }
            AnomalyKind::NoShow => {
                let gained: Vec<_> = after.difference(&base).copied().collect();
                let lost: Vec<_> = base.difference(&after).copied().collect();
                if let ([x], [y]) = (gained.as_slice(), lost.as_slice()) {
                    candidates_for.push((*x, Some(*y)));
                }
            }
            _ => candidates_for.push((focal, None)),
        }
        for (focal, displaced) in candidates_for {
            let mut cert = AnomalyCertificate {
                kind,
                election: fingerprint.clone(),
                seats,
                focal,
                displaced,
                modifications: vec![m.clone()],
                original_winners: base.clone(),
                modified_winners: after.clone(),
                flags: BTreeSet::new(),
            };
            cert.flags = shape_flags(&cert);
            if confirm(election, &cert) && verify_certificate(election, &cert).is_ok() {
                out.push(cert);
            }
        }
    }
    Ok(out)
}

pub fn relations<'a>(certs: impl IntoIterator<Item = &'a AnomalyCertificate>) -> BTreeSet<Relation> {
    certs.into_iter().map(AnomalyCertificate::relation).collect()
}
