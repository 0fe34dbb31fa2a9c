//! Small reference profiles used by tests, docs and the CLI self-checks.

use crate::model::{roster_from_names, PreferenceProfile};

/// Four candidates A–D, 501 voters, thirteen ballot types.
pub fn example_profile() -> PreferenceProfile {
    PreferenceProfile::from_counts(
        roster_from_names(&["A", "B", "C", "D"]),
        &[
            (19, &[1, 2]),
            (41, &[1, 2, 3, 4]),
            (60, &[1, 3, 4]),
            (15, &[1, 4]),
            (73, &[2, 3, 1]),
            (51, &[2, 1, 4, 3]),
            (19, &[2, 4, 3, 1]),
            (57, &[3, 1]),
            (12, &[3, 2, 1, 4]),
            (40, &[3, 4, 2, 1]),
            (8, &[4, 1, 3]),
            (47, &[4, 3, 2]),
            (59, &[4, 2]),
        ],
    )
    .expect("valid fixture")
}

/// Three surviving candidates of the 2017 Perth City South by-election
/// (Barrett, Coates, Leitch); three-deep ballots are merged into their
/// two-deep prefixes as they carry the same information.
pub fn perth_kinross_profile() -> PreferenceProfile {
    PreferenceProfile::from_counts(
        roster_from_names(&["Barrett", "Coates", "Leitch"]),
        &[
            (770, &[1]),
            (619, &[1, 2, 3]),
            (344, &[1, 3, 2]),
            (846, &[2]),
            (867, &[2, 1, 3]),
            (49, &[2, 3, 1]),
            (1167, &[3]),
            (620, &[3, 1, 2]),
            (96, &[3, 2, 1]),
        ],
    )
    .expect("valid fixture")
}

#[cfg(test)]
pub(crate) mod strategies {
    use proptest::prelude::*;

    use crate::model::{roster_from_names, BallotType, CandidateId, Election, PreferenceProfile};

    /// Elections with 2..=`max_n` candidates and at least one voter.
    pub fn arb_election(max_n: u32, max_types: usize, max_count: u64) -> impl Strategy<Value = Election> {
        (2..=max_n)
            .prop_flat_map(move |n| {
                let ranking = Just((1..=n).collect::<Vec<u32>>())
                    .prop_shuffle()
                    .prop_flat_map(move |perm| (1..=n as usize).prop_map(move |len| perm[..len].to_vec()));
                (
                    Just(n),
                    1..n as usize,
                    prop::collection::vec((ranking, 1..=max_count), 1..=max_types),
                )
            })
            .prop_map(|(n, seats, rows)| {
                let names: Vec<String> = (1..=n).map(|i| format!("C{i}")).collect();
                let ballots = rows
                    .into_iter()
                    .map(|(r, c)| BallotType::new(r.into_iter().map(CandidateId).collect(), c));
                let profile = PreferenceProfile::new(roster_from_names(&names), ballots).expect("valid rows");
                Election::new(profile, seats).expect("seats below candidate count")
            })
    }
}
