//! Building modified profiles and checking that individual ballot changes
//! are legal moves.

use std::collections::BTreeMap;

use super::verify::Rejection;
use super::Modification;
use crate::model::{BallotType, CandidateId, Election, PreferenceProfile};

fn without(ranking: &[CandidateId], x: CandidateId) -> Vec<CandidateId> {
    ranking.iter().copied().filter(|&c| c != x).collect()
}

fn inserted(rest: &[CandidateId], x: CandidateId, at: usize) -> Vec<CandidateId> {
    let mut r = rest.to_vec();
    r.insert(at, x);
    r
}

/// Rankings obtained by moving `x` strictly higher on `ranking`. An unlisted
/// `x` may only be inserted at the top.
pub fn shift_up_targets(ranking: &[CandidateId], x: CandidateId) -> Vec<Vec<CandidateId>> {
    match ranking.iter().position(|&c| c == x) {
        Some(p) => {
            let rest = without(ranking, x);
            (0..p).map(|q| inserted(&rest, x, q)).collect()
        }
        None => vec![inserted(ranking, x, 0)],
    }
}

/// Rankings obtained by moving a listed `x` strictly lower, staying listed.
pub fn shift_down_targets(ranking: &[CandidateId], x: CandidateId) -> Vec<Vec<CandidateId>> {
    match ranking.iter().position(|&c| c == x) {
        Some(p) => {
            let rest = without(ranking, x);
            (p + 1..ranking.len()).map(|q| inserted(&rest, x, q)).collect()
        }
        None => Vec::new(),
    }
}

/// `[x]` rewritten to `[y]` or `[y, x]` for every other candidate `y`.
pub fn bullet_rewrite_targets(
    ranking: &[CandidateId],
    x: CandidateId,
    candidates: &[CandidateId],
) -> Vec<Vec<CandidateId>> {
    if ranking != [x] {
        return Vec::new();
    }
    candidates
        .iter()
        .filter(|&&y| y != x)
        .flat_map(|&y| [vec![y], vec![y, x]])
        .collect()
}

fn position(ranking: &[CandidateId], x: CandidateId) -> Option<usize> {
    ranking.iter().position(|&c| c == x)
}

pub(crate) fn check_shift_up(from: &[CandidateId], to: &[CandidateId], x: CandidateId) -> Result<(), String> {
    if without(from, x) != without(to, x) {
        return Err("other candidates change relative order".into());
    }
    match (position(from, x), position(to, x)) {
        (_, None) => Err(format!("{x} missing from the result")),
        (None, Some(0)) => Ok(()),
        (None, Some(_)) => Err(format!("unlisted {x} must be inserted at the top")),
        (Some(p), Some(q)) if q < p => Ok(()),
        _ => Err(format!("{x} does not move up")),
    }
}

pub(crate) fn check_shift_down(from: &[CandidateId], to: &[CandidateId], x: CandidateId) -> Result<(), String> {
    if without(from, x) != without(to, x) {
        return Err("other candidates change relative order".into());
    }
    match (position(from, x), position(to, x)) {
        (Some(p), Some(q)) if q > p => Ok(()),
        (None, _) => Err(format!("{x} is not on the ballot")),
        _ => Err(format!("{x} does not move down")),
    }
}

pub(crate) fn check_bullet_rewrite(from: &[CandidateId], to: &[CandidateId], x: CandidateId) -> Result<(), String> {
    if from != [x] {
        return Err(format!("source is not a bullet vote for {x}"));
    }
    match to {
        [y] | [y, _] if *y == x => Err("rewrite keeps the same first choice".into()),
        [_] => Ok(()),
        [_, z] if *z == x => Ok(()),
        _ => Err("result must be a bullet vote or a two-entry ranking ending in the original".into()),
    }
}

/// `x` above `y` in the weak order, and `y` outside the top `seats` places.
pub(crate) fn removable(from: &[CandidateId], x: CandidateId, y: CandidateId, seats: usize) -> bool {
    match (position(from, x), position(from, y)) {
        (Some(_), None) => true,
        (Some(px), Some(py)) => px < py && py >= seats,
        _ => false,
    }
}

/// A profile under construction: the base counts with changes applied.
#[derive(Clone, Debug)]
pub(crate) struct Working<'e> {
    base: &'e Election,
    counts: BTreeMap<Vec<CandidateId>, u64>,
    mods: Vec<Modification>,
}

impl<'e> Working<'e> {
    pub fn new(base: &'e Election) -> Self {
        let counts = base
            .profile()
            .ballots()
            .iter()
            .map(|b| (b.ranking.clone(), b.count))
            .collect();
        Working {
            base,
            counts,
            mods: Vec::new(),
        }
    }

    pub fn available(&self, ranking: &[CandidateId]) -> u64 {
        self.counts.get(ranking).copied().unwrap_or(0)
    }

    pub fn mods(&self) -> &[Modification] {
        &self.mods
    }

    /// Applies a ballot change; `false` when too few source ballots remain.
    pub fn push(&mut self, m: Modification) -> bool {
        let Some(from) = m.source() else { return false };
        let n = m.count();
        let Some(have) = self.counts.get_mut(from) else {
            return false;
        };
        if *have < n || n == 0 {
            return false;
        }
        *have -= n;
        if *have == 0 {
            self.counts.remove(from);
        }
        if let Some(to) = m.result() {
            *self.counts.entry(to.to_vec()).or_default() += n;
        }
        match self.mods.iter_mut().find(|e| e.same_move(&m)) {
            Some(e) => *e.count_mut().unwrap() += n,
            None => self.mods.push(m),
        }
        true
    }

    pub fn election(&self) -> Option<Election> {
        let ballots = self.counts.iter().map(|(r, &c)| BallotType::new(r.clone(), c));
        let profile = PreferenceProfile::new(self.base.profile().roster().to_vec(), ballots).ok()?;
        self.base.with_profile(profile).ok()
    }
}

/// The election obtained by applying `mods` in order. Seat-count entries
/// change the number of seats; ballot entries move or remove ballots.
pub fn apply_modifications(election: &Election, mods: &[Modification]) -> Result<Election, Rejection> {
    let mut seats = election.seats();
    let mut work = Working::new(election);
    for m in mods {
        if let Modification::SeatCount { seats: s } = m {
            seats = *s;
            continue;
        }
        let from = m.source().unwrap();
        if m.count() == 0 || work.available(from) < m.count() {
            return Err(Rejection::CountOverflow {
                ranking: from.to_vec(),
                requested: m.count(),
                available: work.available(from),
            });
        }
        work.push(m.clone());
    }
    let modified = work.election().ok_or(Rejection::InvalidProfile)?;
    if seats == election.seats() {
        Ok(modified)
    } else {
        modified.with_seats(seats).map_err(|_| Rejection::InvalidProfile)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ids(v: &[u32]) -> Vec<CandidateId> {
        v.iter().map(|&c| CandidateId(c)).collect()
    }

    #[test]
    fn up_targets() {
        let t = shift_up_targets(&ids(&[4, 1, 3]), CandidateId(3));
        assert_eq!(t, vec![ids(&[3, 4, 1]), ids(&[4, 3, 1])]);
        assert_eq!(shift_up_targets(&ids(&[2]), CandidateId(1)), vec![ids(&[1, 2])]);
        assert!(shift_up_targets(&ids(&[1, 2]), CandidateId(1)).is_empty());
        for to in &t {
            assert!(check_shift_up(&ids(&[4, 1, 3]), to, CandidateId(3)).is_ok());
        }
    }

    #[test]
    fn down_targets() {
        let t = shift_down_targets(&ids(&[2, 3, 1]), CandidateId(2));
        assert_eq!(t, vec![ids(&[3, 2, 1]), ids(&[3, 1, 2])]);
        assert!(shift_down_targets(&ids(&[3, 1]), CandidateId(2)).is_empty());
        for to in &t {
            assert!(check_shift_down(&ids(&[2, 3, 1]), to, CandidateId(2)).is_ok());
        }
    }

    #[test]
    fn malformed_shifts() {
        assert!(check_shift_up(&ids(&[4, 1, 3]), &ids(&[1, 4, 3]), CandidateId(3)).is_err());
        assert!(check_shift_up(&ids(&[4, 1]), &ids(&[4, 3, 1]), CandidateId(3)).is_err());
        assert!(check_shift_down(&ids(&[2, 3]), &ids(&[3]), CandidateId(2)).is_err());
        assert!(check_bullet_rewrite(&ids(&[2]), &ids(&[3, 2]), CandidateId(2)).is_ok());
        assert!(check_bullet_rewrite(&ids(&[2]), &ids(&[3, 1]), CandidateId(2)).is_err());
        assert!(check_bullet_rewrite(&ids(&[2, 1]), &ids(&[3]), CandidateId(2)).is_err());
    }

    #[test]
    fn bullets() {
        let t = bullet_rewrite_targets(&ids(&[2]), CandidateId(2), &ids(&[1, 2, 3]));
        assert_eq!(t, vec![ids(&[1]), ids(&[1, 2]), ids(&[3]), ids(&[3, 2])]);
    }

    #[test]
    fn removal_rule() {
        assert!(removable(&ids(&[2, 3, 1]), CandidateId(3), CandidateId(4), 2));
        assert!(!removable(&ids(&[2, 3, 4]), CandidateId(3), CandidateId(4), 3));
        assert!(removable(&ids(&[2, 3, 4]), CandidateId(3), CandidateId(4), 2));
        assert!(!removable(&ids(&[2, 4, 3]), CandidateId(3), CandidateId(4), 1));
        assert!(!removable(&ids(&[2]), CandidateId(3), CandidateId(4), 1));
    }
}
