use std::collections::BTreeSet;

use super::verify::shape_flags;
use super::{AnomalyCertificate, AnomalyKind, Flag, Modification};
use crate::engine::{tabulate, winners, TiePolicy};
use crate::error::TieError;
use crate::model::Election;

/// Every smaller seat count whose winners are not all among the full
/// committee. Exact: an empty result means no such anomaly exists.
pub fn check_committee_size(election: &Election, policy: TiePolicy) -> Result<Vec<AnomalyCertificate>, TieError> {
    let seats = election.seats();
    if seats < 2 {
        return Ok(Vec::new());
    }
    let full = tabulate(election, policy)?;
    let full_set = full.winner_set();
    let fingerprint = election.fingerprint();
    let mut certs = Vec::new();
    for s in 1..seats {
        let smaller = election.with_seats(s).expect("fewer seats stays valid");
        let outcome = winners(&smaller, policy)?;
        if outcome.winners.is_subset(&full_set) {
            continue;
        }
        let focal = *outcome.winners.difference(&full_set).next().expect("not a subset");
        let mut cert = AnomalyCertificate {
            kind: AnomalyKind::CommitteeSize,
            election: fingerprint.clone(),
            seats,
            focal,
            displaced: None,
            modifications: vec![Modification::SeatCount { seats: s }],
            original_winners: full_set.clone(),
            modified_winners: outcome.winners,
            flags: BTreeSet::new(),
        };
        cert.flags = shape_flags(&cert);
        if outcome.index_tie || !full.tie_breaks.is_empty() {
            cert.flags.insert(Flag::TieEncountered);
        }
        certs.push(cert);
    }
    Ok(certs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::anomaly::verify_certificate;
    use crate::engine::winner_sets_for_all_seat_counts;
    use crate::fixtures::example_profile;
    use crate::model::{roster_from_names, CandidateId, PreferenceProfile};

    #[test]
    fn example_has_committee_anomaly() {
        let e = Election::new(example_profile(), 2).unwrap();
        let certs = check_committee_size(&e, TiePolicy::Fail).unwrap();
        assert_eq!(certs.len(), 1);
        assert_eq!(certs[0].focal, CandidateId(2));
        assert_eq!(certs[0].modifications, vec![Modification::SeatCount { seats: 1 }]);
        verify_certificate(&e, &certs[0]).unwrap();
    }

    #[test]
    fn single_seat_is_vacuous() {
        let e = Election::new(example_profile(), 1).unwrap();
        assert!(check_committee_size(&e, TiePolicy::Fail).unwrap().is_empty());
    }

    #[test]
    fn unanimous_profile_has_none() {
        let p = PreferenceProfile::from_counts(roster_from_names(&["A", "B", "C"]), &[(9, &[1, 2, 3])]).unwrap();
        for s in 1..=3 {
            let e = Election::new(p.clone(), s).unwrap();
            assert!(check_committee_size(&e, TiePolicy::Fail).unwrap().is_empty());
            let sets = winner_sets_for_all_seat_counts(&e, TiePolicy::Fail).unwrap();
            assert!(sets.values().all(|w| w.contains(&CandidateId(1))));
            assert!(sets.values().all(|w| w.is_subset(&sets[&s])));
        }
    }
}
