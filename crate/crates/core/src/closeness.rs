//! How close a count was, and how STV compares with SNTV and a Condorcet
//! committee.

use std::collections::{BTreeMap, BTreeSet};
use std::io;

use serde::{Deserialize, Serialize};

use crate::engine::{TabulationRecord, TiePolicy};
use crate::error::TieError;
use crate::fixed::FixedVote;
use crate::model::{first_place_tallies, CandidateId, Election};

/// Percentages at which closeness is reported.
pub const PERCENTS: std::ops::RangeInclusive<u32> = 50..=95;

fn within(min: FixedVote, max: FixedVote, p: u32) -> bool {
    min.units() as u128 * 100 >= p as u128 * max.units() as u128
}

fn k_close(record: &TabulationRecord, k: usize, p: u32) -> bool {
    let winners = record.winner_set();
    record.rounds.iter().any(|round| {
        let cands: Vec<(CandidateId, FixedVote)> = round.totals.iter().map(|(&c, &t)| (c, t)).collect();
        subsets(cands.len(), k).any(|idx| {
            let members: Vec<&(CandidateId, FixedVote)> = idx.iter().map(|&i| &cands[i]).collect();
            let wins = members.iter().filter(|(c, _)| winners.contains(c)).count();
            if wins == 0 || wins == k {
                return false;
            }
            let min = members.iter().map(|m| m.1).min().unwrap();
            let max = members.iter().map(|m| m.1).max().unwrap();
            within(min, max, p)
        })
    })
}

fn subsets(n: usize, k: usize) -> impl Iterator<Item = Vec<usize>> {
    let mut idx: Vec<usize> = (0..k).collect();
    let mut done = k > n;
    std::iter::from_fn(move || {
        if done {
            return None;
        }
        let out = idx.clone();
        let mut i = k;
        loop {
            if i == 0 {
                done = true;
                break;
            }
            i -= 1;
            if idx[i] < n - k + i {
                idx[i] += 1;
                for j in i + 1..k {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
        Some(out)
    })
}

/// Some round has three continuing candidates, at least one eventual winner
/// and one eventual loser among them, whose smallest opening total is at
/// least `p` percent of their largest.
pub fn three_candidate_close(record: &TabulationRecord, p: u32) -> bool {
    k_close(record, 3, p)
}

/// As [`three_candidate_close`] for a winner and a loser.
pub fn two_candidate_close(record: &TabulationRecord, p: u32) -> bool {
    k_close(record, 2, p)
}

/// `m[a][b]`: voters ranking `a` above `b`, unranked candidates tied last.
pub fn pairwise_matrix(election: &Election) -> Vec<Vec<u64>> {
    let n = election.profile().num_candidates();
    let mut m = vec![vec![0u64; n]; n];
    for b in election.profile().ballots() {
        for (i, &a) in b.ranking.iter().enumerate() {
            for &c in &b.ranking[i + 1..] {
                m[a.index()][c.index()] += b.count;
            }
            for (c, cell) in m[a.index()].iter_mut().enumerate() {
                if b.position(CandidateId::from_index(c)).is_none() {
                    *cell += b.count;
                }
            }
        }
    }
    m
}

/// The committee of `election.seats()` candidates each of whom beats every
/// outsider head to head, if there is one.
pub fn condorcet_committee(election: &Election) -> Option<BTreeSet<CandidateId>> {
    let m = pairwise_matrix(election);
    let active = election.active_candidates();
    let s = election.seats();
    let outside = active.len() - s;
    // A member beats all `outside` outsiders; an outsider beats at most
    // the other outsiders. So members are exactly those with that many wins.
    let members: BTreeSet<CandidateId> = active
        .iter()
        .copied()
        .filter(|&a| {
            active
                .iter()
                .filter(|&&b| m[a.index()][b.index()] > m[b.index()][a.index()])
                .count()
                >= outside
        })
        .collect();
    if members.len() != s {
        return None;
    }
    let ok = members.iter().all(|&i| {
        active
            .iter()
            .filter(|c| !members.contains(c))
            .all(|&o| m[i.index()][o.index()] > m[o.index()][i.index()])
    });
    ok.then_some(members)
}

/// The `seats` candidates with the most first preferences. The flag is set
/// when an index tie-break decided the last place.
pub fn sntv_winners(election: &Election, policy: TiePolicy) -> Result<(BTreeSet<CandidateId>, bool), TieError> {
    let tallies = first_place_tallies(election.profile());
    let mut order: Vec<(CandidateId, u64)> = election
        .active_candidates()
        .into_iter()
        .map(|c| (c, tallies[&c]))
        .collect();
    order.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    let s = election.seats();
    if s == order.len() {
        return Ok((order.into_iter().map(|(c, _)| c).collect(), false));
    }
    let cut = order[s - 1].1;
    let tied = order[s].1 == cut;
    if tied && policy == TiePolicy::Fail {
        return Err(TieError {
            round: 1,
            candidates: order.iter().filter(|(_, t)| *t == cut).map(|(c, _)| *c).collect(),
        });
    }
    Ok((order[..s].iter().map(|(c, _)| *c).collect(), tied))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClosenessReport {
    pub first_round_terminated: bool,
    pub three_close: BTreeMap<u32, bool>,
    pub two_close: BTreeMap<u32, bool>,
    pub condorcet_committee: Option<BTreeSet<CandidateId>>,
    pub sntv_winners: BTreeSet<CandidateId>,
    pub sntv_index_tie: bool,
    /// STV, SNTV and the Condorcet committee all give the same winners.
    pub methods_agree: bool,
}

impl ClosenessReport {
    /// Largest `p` at which the election is three-candidate close.
    pub fn max_three_close(&self) -> Option<u32> {
        self.three_close.iter().filter(|(_, &v)| v).map(|(&p, _)| p).max()
    }
}

pub fn closeness_report(
    election: &Election,
    record: &TabulationRecord,
    policy: TiePolicy,
) -> Result<ClosenessReport, TieError> {
    let three_close = PERCENTS.map(|p| (p, three_candidate_close(record, p))).collect();
    let two_close = PERCENTS.map(|p| (p, two_candidate_close(record, p))).collect();
    let condorcet = condorcet_committee(election);
    let (sntv, sntv_index_tie) = sntv_winners(election, policy)?;
    let stv = record.winner_set();
    Ok(ClosenessReport {
        first_round_terminated: record.rounds.len() == 1,
        three_close,
        two_close,
        methods_agree: condorcet.as_ref() == Some(&stv) && sntv == stv,
        condorcet_committee: condorcet,
        sntv_winners: sntv,
        sntv_index_tie,
    })
}

/// One election's closeness together with its anomaly findings.
#[derive(Clone, Debug)]
pub struct SeriesInput<'a> {
    pub report: &'a ClosenessReport,
    pub any_anomaly: bool,
    /// Any anomaly other than committee size.
    pub ballot_anomaly: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesPoint {
    pub p: u32,
    pub close_count: usize,
    pub anomalous_close_count: usize,
}

impl SeriesPoint {
    /// Six-decimal ratio, rounded half up; `None` for 0/0.
    pub fn ratio(&self) -> Option<String> {
        if self.close_count == 0 {
            return None;
        }
        let scaled = (self.anomalous_close_count as u128 * 2_000_000 + self.close_count as u128)
            / (2 * self.close_count as u128);
        Some(format!("{}.{:06}", scaled / 1_000_000, scaled % 1_000_000))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClosenessSeries {
    pub three_any: Vec<SeriesPoint>,
    pub three_excluding_committee: Vec<SeriesPoint>,
    pub two_any: Vec<SeriesPoint>,
    pub two_excluding_committee: Vec<SeriesPoint>,
}

fn series(
    items: &[SeriesInput],
    close: impl Fn(&ClosenessReport, u32) -> bool,
    hit: impl Fn(&SeriesInput) -> bool,
) -> Vec<SeriesPoint> {
    if items.is_empty() {
        return Vec::new();
    }
    PERCENTS
        .map(|p| {
            let close_items: Vec<&SeriesInput> = items.iter().filter(|i| close(i.report, p)).collect();
            SeriesPoint {
                p,
                close_count: close_items.len(),
                anomalous_close_count: close_items.iter().filter(|i| hit(i)).count(),
            }
        })
        .collect()
}

pub fn closeness_series(items: &[SeriesInput]) -> ClosenessSeries {
    let three = |r: &ClosenessReport, p| r.three_close.get(&p).copied().unwrap_or(false);
    let two = |r: &ClosenessReport, p| r.two_close.get(&p).copied().unwrap_or(false);
    ClosenessSeries {
        three_any: series(items, three, |i| i.any_anomaly),
        three_excluding_committee: series(items, three, |i| i.ballot_anomaly),
        two_any: series(items, two, |i| i.any_anomaly),
        two_excluding_committee: series(items, two, |i| i.ballot_anomaly),
    }
}

pub fn write_series_csv<W: io::Write>(points: &[SeriesPoint], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["p", "close_count", "anomalous_close_count", "ratio"])?;
    for pt in points {
        w.write_record([
            pt.p.to_string(),
            pt.close_count.to_string(),
            pt.anomalous_close_count.to_string(),
            pt.ratio().unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::tabulate;
    use crate::fixtures::example_profile;
    use crate::model::{roster_from_names, PreferenceProfile};

    fn set(v: &[u32]) -> BTreeSet<CandidateId> {
        v.iter().map(|&c| CandidateId(c)).collect()
    }

    fn example(seats: usize) -> (Election, TabulationRecord) {
        let e = Election::new(example_profile(), seats).unwrap();
        let r = tabulate(&e, TiePolicy::Fail).unwrap();
        (e, r)
    }

    #[test]
    fn example_closeness() {
        let (_, r) = example(2);
        assert!(three_candidate_close(&r, 50));
        assert!(two_candidate_close(&r, 95));
        assert!(!three_candidate_close(&r, 100));
        assert!(!two_candidate_close(&r, 100));
    }

    #[test]
    fn subsets_enumerate() {
        assert_eq!(subsets(4, 2).count(), 6);
        assert_eq!(subsets(5, 3).count(), 10);
        assert_eq!(subsets(2, 3).count(), 0);
        assert_eq!(subsets(3, 3).collect::<Vec<_>>(), vec![vec![0, 1, 2]]);
    }

    #[test]
    fn pairwise_margins() {
        let (e, _) = example(2);
        let m = pairwise_matrix(&e);
        let margin = |a: usize, b: usize| m[a][b] as i64 - m[b][a] as i64;
        assert_eq!(margin(0, 1), -101);
        assert_eq!(margin(0, 2), -54);
        assert_eq!(margin(0, 3), 155);
        assert_eq!(margin(1, 2), 38);
        assert_eq!(margin(1, 3), -14);
        assert_eq!(margin(2, 3), 84);
    }

    #[test]
    fn example_has_no_condorcet_committee() {
        for s in 1..=3 {
            assert_eq!(condorcet_committee(&example(s).0), None);
        }
        assert_eq!(condorcet_committee(&example(4).0), Some(set(&[1, 2, 3, 4])));
    }

    #[test]
    fn unanimous_and_cycle() {
        let p = PreferenceProfile::from_counts(roster_from_names(&["A", "B", "C"]), &[(5, &[1, 2, 3])]).unwrap();
        assert_eq!(condorcet_committee(&Election::new(p, 1).unwrap()), Some(set(&[1])));
        let p = PreferenceProfile::from_counts(
            roster_from_names(&["A", "B", "C"]),
            &[(3, &[1, 2, 3]), (3, &[2, 3, 1]), (3, &[3, 1, 2])],
        )
        .unwrap();
        assert_eq!(condorcet_committee(&Election::new(p, 1).unwrap()), None);
    }

    #[test]
    fn sntv() {
        let (e, _) = example(2);
        assert_eq!(sntv_winners(&e, TiePolicy::Fail).unwrap(), (set(&[1, 2]), false));
        let (e, _) = example(4);
        assert_eq!(sntv_winners(&e, TiePolicy::Fail).unwrap().0, set(&[1, 2, 3, 4]));
        let p = PreferenceProfile::from_counts(roster_from_names(&["A", "B", "C"]), &[(3, &[1]), (2, &[2]), (2, &[3])])
            .unwrap();
        let e = Election::new(p, 2).unwrap();
        assert_eq!(
            sntv_winners(&e, TiePolicy::Fail).unwrap_err().candidates,
            set(&[2, 3]).into_iter().collect::<Vec<_>>()
        );
        assert_eq!(sntv_winners(&e, TiePolicy::Index).unwrap(), (set(&[1, 2]), true));
    }

    #[test]
    fn ratios() {
        let pt = |a, c| SeriesPoint {
            p: 50,
            close_count: c,
            anomalous_close_count: a,
        };
        assert_eq!(pt(61, 865).ratio().as_deref(), Some("0.070520"));
        assert_eq!(pt(13, 43).ratio().as_deref(), Some("0.302326"));
        assert_eq!(pt(0, 0).ratio(), None);
        assert_eq!(pt(1, 1).ratio().as_deref(), Some("1.000000"));
    }

    #[test]
    fn series_shapes() {
        assert_eq!(closeness_series(&[]), ClosenessSeries::default());
        let (e, r) = example(2);
        let report = closeness_report(&e, &r, TiePolicy::Fail).unwrap();
        let s = closeness_series(&[SeriesInput {
            report: &report,
            any_anomaly: true,
            ballot_anomaly: false,
        }]);
        assert_eq!(s.three_any.len(), PERCENTS.count());
        assert_eq!(
            s.three_any[0],
            SeriesPoint {
                p: 50,
                close_count: 1,
                anomalous_close_count: 1
            }
        );
        assert_eq!(s.three_excluding_committee[0].anomalous_close_count, 0);
        let mut buf = Vec::new();
        write_series_csv(&s.two_any[..1], &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "p,close_count,anomalous_close_count,ratio\n50,1,1,1.000000\n"
        );
    }

    mod properties {
        use proptest::prelude::*;

        use super::*;
        use crate::fixtures::strategies::arb_election;

        /// Every committee of the right size that beats all outsiders.
        fn brute_force(e: &Election) -> Vec<BTreeSet<CandidateId>> {
            let m = pairwise_matrix(e);
            let active = e.active_candidates();
            subsets(active.len(), e.seats())
                .map(|idx| idx.iter().map(|&i| active[i]).collect::<BTreeSet<_>>())
                .filter(|inside| {
                    inside.iter().all(|&i| {
                        active
                            .iter()
                            .filter(|c| !inside.contains(c))
                            .all(|&o| m[i.index()][o.index()] > m[o.index()][i.index()])
                    })
                })
                .collect()
        }

        proptest! {
            #[test]
            fn condorcet_committee_is_the_unique_one(e in arb_election(7, 15, 30)) {
                let all = brute_force(&e);
                prop_assert!(all.len() <= 1);
                prop_assert_eq!(condorcet_committee(&e), all.into_iter().next());
            }

            #[test]
            fn closeness_is_monotone(e in arb_election(6, 12, 40)) {
                let rec = tabulate(&e, TiePolicy::Index).unwrap();
                for p in 51..=95 {
                    prop_assert!(!three_candidate_close(&rec, p) || three_candidate_close(&rec, p - 1));
                    prop_assert!(!two_candidate_close(&rec, p) || two_candidate_close(&rec, p - 1));
                }
            }
        }
    }
}
