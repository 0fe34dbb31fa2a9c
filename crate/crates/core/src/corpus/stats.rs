//! Ballot-length statistics over a corpus.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::model::Election;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ElectionStats {
    pub name: String,
    pub voters: u64,
    /// Active candidates.
    pub candidates: usize,
    pub seats: usize,
    pub mean_length: f64,
    pub median_length: f64,
}

/// Elections sharing a key, pooled.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GroupStats {
    pub elections: usize,
    pub voters: u64,
    /// Mean over all voters in the group.
    pub mean_length: f64,
    /// Median of the per-election medians.
    pub median_length: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct CorpusStats {
    pub elections: Vec<ElectionStats>,
    pub by_seats: BTreeMap<usize, GroupStats>,
    /// Keyed by (seats, candidates).
    #[serde(serialize_with = "keyed_pairs")]
    pub by_seats_and_candidates: BTreeMap<(usize, usize), GroupStats>,
}

fn keyed_pairs<S: serde::Serializer>(m: &BTreeMap<(usize, usize), GroupStats>, ser: S) -> Result<S::Ok, S::Error> {
    #[derive(Serialize)]
    struct Entry<'a> {
        seats: usize,
        candidates: usize,
        #[serde(flatten)]
        stats: &'a GroupStats,
    }
    ser.collect_seq(m.iter().map(|(&(seats, candidates), stats)| Entry {
        seats,
        candidates,
        stats,
    }))
}

/// Voter-weighted median of ranking lengths.
fn weighted_median(mut lengths: Vec<(usize, u64)>) -> f64 {
    lengths.sort_unstable();
    let total: u64 = lengths.iter().map(|&(_, c)| c).sum();
    if total == 0 {
        return 0.0;
    }
    // Values at 1-based positions ceil(total/2) and floor(total/2)+1.
    let at = |pos: u64| {
        let mut seen = 0;
        for &(len, c) in &lengths {
            seen += c;
            if seen >= pos {
                return len as f64;
            }
        }
        unreachable!()
    };
    (at(total.div_ceil(2)) + at(total / 2 + 1)) / 2.0
}

fn median(mut xs: Vec<f64>) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    xs.sort_by(f64::total_cmp);
    let m = xs.len() / 2;
    if xs.len() % 2 == 1 {
        xs[m]
    } else {
        (xs[m - 1] + xs[m]) / 2.0
    }
}

pub fn election_stats(name: &str, election: &Election) -> ElectionStats {
    let ballots = election.profile().ballots();
    let voters = election.profile().total_voters();
    let ranked: u64 = ballots.iter().map(|b| b.ranking.len() as u64 * b.count).sum();
    ElectionStats {
        name: name.to_string(),
        voters,
        candidates: election.num_active(),
        seats: election.seats(),
        mean_length: ranked as f64 / voters as f64,
        median_length: weighted_median(ballots.iter().map(|b| (b.ranking.len(), b.count)).collect()),
    }
}

fn group<'a>(members: impl Iterator<Item = &'a ElectionStats>) -> GroupStats {
    let mut g = GroupStats {
        elections: 0,
        voters: 0,
        mean_length: 0.0,
        median_length: 0.0,
    };
    let mut ranked = 0.0;
    let mut medians = Vec::new();
    for e in members {
        g.elections += 1;
        g.voters += e.voters;
        ranked += e.mean_length * e.voters as f64;
        medians.push(e.median_length);
    }
    g.mean_length = ranked / g.voters as f64;
    g.median_length = median(medians);
    g
}

/// Statistics for named elections, in the order given.
pub fn descriptive_stats<'a>(elections: impl IntoIterator<Item = (&'a str, &'a Election)>) -> CorpusStats {
    let elections: Vec<ElectionStats> = elections.into_iter().map(|(name, e)| election_stats(name, e)).collect();
    let mut seat_keys: Vec<usize> = elections.iter().map(|e| e.seats).collect();
    seat_keys.sort_unstable();
    seat_keys.dedup();
    let mut pair_keys: Vec<(usize, usize)> = elections.iter().map(|e| (e.seats, e.candidates)).collect();
    pair_keys.sort_unstable();
    pair_keys.dedup();
    CorpusStats {
        by_seats: seat_keys
            .into_iter()
            .map(|s| (s, group(elections.iter().filter(|e| e.seats == s))))
            .collect(),
        by_seats_and_candidates: pair_keys
            .into_iter()
            .map(|k| (k, group(elections.iter().filter(|e| (e.seats, e.candidates) == k))))
            .collect(),
        elections,
    }
}

impl CorpusStats {
    /// Per-election rows followed by group rows, as CSV.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            "scope",
            "name",
            "seats",
            "candidates",
            "elections",
            "voters",
            "mean_length",
            "median_length",
        ])
        .expect("in-memory write");
        for e in &self.elections {
            w.write_record([
                "election".to_string(),
                e.name.clone(),
                e.seats.to_string(),
                e.candidates.to_string(),
                "1".to_string(),
                e.voters.to_string(),
                format!("{:.4}", e.mean_length),
                format!("{:.1}", e.median_length),
            ])
            .expect("in-memory write");
        }
        let rows = self
            .by_seats
            .iter()
            .map(|(s, g)| ("seats", *s, String::new(), g))
            .chain(
                self.by_seats_and_candidates
                    .iter()
                    .map(|((s, n), g)| ("seats_candidates", *s, n.to_string(), g)),
            );
        for (scope, s, n, g) in rows {
            w.write_record([
                scope.to_string(),
                String::new(),
                s.to_string(),
                n,
                g.elections.to_string(),
                g.voters.to_string(),
                format!("{:.4}", g.mean_length),
                format!("{:.1}", g.median_length),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::example_profile;
    use crate::model::{roster_from_names, PreferenceProfile};

    #[test]
    fn bullets_have_length_one() {
        let p = PreferenceProfile::from_counts(roster_from_names(&["A", "B", "C"]), &[(5, &[1]), (3, &[2]), (1, &[3])])
            .unwrap();
        let s = election_stats("b", &Election::new(p, 1).unwrap());
        assert_eq!(s.mean_length, 1.0);
        assert_eq!(s.median_length, 1.0);
    }

    #[test]
    fn example_lengths() {
        let e = Election::new(example_profile(), 2).unwrap();
        let s = election_stats("ex", &e);
        // Hand count of ranking lengths over the 501 voters.
        let ranked: u64 = e
            .profile()
            .ballots()
            .iter()
            .map(|b| b.ranking.len() as u64 * b.count)
            .sum();
        assert_eq!(s.voters, 501);
        assert_eq!(s.mean_length, ranked as f64 / 501.0);
        assert!(s.mean_length >= 1.0 && s.mean_length <= 4.0);
    }

    #[test]
    fn weighted_median_even_split() {
        assert_eq!(weighted_median(vec![(1, 2), (3, 2)]), 2.0);
        assert_eq!(weighted_median(vec![(1, 3), (3, 2)]), 1.0);
        assert_eq!(weighted_median(vec![(2, 1)]), 2.0);
    }

    #[test]
    fn groups_pool_voters() {
        let r = roster_from_names(&["A", "B", "C"]);
        let a = Election::new(PreferenceProfile::from_counts(r.clone(), &[(10, &[1])]).unwrap(), 2).unwrap();
        let b = Election::new(PreferenceProfile::from_counts(r, &[(30, &[1, 2, 3])]).unwrap(), 2).unwrap();
        let st = descriptive_stats([("a", &a), ("b", &b)]);
        let g = &st.by_seats[&2];
        assert_eq!(g.elections, 2);
        assert_eq!(g.mean_length, 2.5);
        assert_eq!(g.median_length, 2.0);
        assert_eq!(st.by_seats_and_candidates[&(2, 3)].voters, 40);
        let csv = st.to_csv();
        assert!(csv.starts_with("scope,name,seats"));
        assert!(csv.contains("seats,,2,,2,40,2.5000,2.0"));
        let v = serde_json::to_value(&st).unwrap();
        assert_eq!(v["by_seats_and_candidates"][0]["candidates"], 3);
        assert_eq!(v["by_seats"]["2"]["voters"], 40);
    }
}
