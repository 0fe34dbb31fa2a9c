use std::collections::BTreeSet;

use thiserror::Error;

use super::modify::{apply_modifications, check_bullet_rewrite, check_shift_down, check_shift_up, removable};
use super::{AnomalyCertificate, AnomalyKind, Flag, Modification};
use crate::engine::{winners, TiePolicy};
use crate::error::TieError;
use crate::model::{CandidateId, Election};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Rejection {
    #[error("election fingerprint or seat count does not match")]
    ElectionMismatch,
    #[error("{requested} ballots requested from {ranking:?} but only {available} available")]
    CountOverflow {
        ranking: Vec<CandidateId>,
        requested: u64,
        available: u64,
    },
    #[error("malformed modification: {0}")]
    MalformedShift(String),
    #[error("modified ballots do not form a valid election")]
    InvalidProfile,
    #[error("relation not satisfied: {0}")]
    RelationNotSatisfied(String),
    #[error(transparent)]
    Tie(#[from] TieError),
    #[error("flags {recorded:?} differ from recomputed {computed:?}")]
    FlagMismatch {
        recorded: BTreeSet<Flag>,
        computed: BTreeSet<Flag>,
    },
}

/// A certificate that has been replayed against its election.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifiedCertificate(AnomalyCertificate);

impl VerifiedCertificate {
    pub fn certificate(&self) -> &AnomalyCertificate {
        &self.0
    }

    pub fn into_inner(self) -> AnomalyCertificate {
        self.0
    }
}

fn malformed(msg: impl Into<String>) -> Rejection {
    Rejection::MalformedShift(msg.into())
}

fn check_shapes(cert: &AnomalyCertificate, seats: usize) -> Result<(), Rejection> {
    let x = cert.focal;
    let ballot_mods = cert.modifications.iter().filter(|m| m.source().is_some()).count();
    let seat_mods = cert.modifications.len() - ballot_mods;
    match cert.kind {
        AnomalyKind::CommitteeSize => {
            if ballot_mods != 0 || seat_mods != 1 {
                return Err(malformed("committee-size certificate needs exactly one seat count"));
            }
        }
        _ => {
            if seat_mods != 0 || ballot_mods == 0 {
                return Err(malformed("ballot certificate needs ballot changes only"));
            }
        }
    }
    if cert.kind == AnomalyKind::NoShow && cert.displaced.is_none() {
        return Err(malformed("no-show certificate without a displaced winner"));
    }
    let mut bullets = 0;
    for m in &cert.modifications {
        match (cert.kind, m) {
            (AnomalyKind::CommitteeSize, Modification::SeatCount { seats: s }) => {
                if *s == 0 || *s >= seats {
                    return Err(malformed(format!("alternative seat count {s} not below {seats}")));
                }
            }
            (AnomalyKind::Upward, Modification::ShiftUp { from, to, .. }) => {
                check_shift_up(from, to, x).map_err(malformed)?;
            }
            (AnomalyKind::DownwardStrong | AnomalyKind::DownwardWeak, Modification::ShiftDown { from, to, .. }) => {
                check_shift_down(from, to, x).map_err(malformed)?;
            }
            (AnomalyKind::DownwardWeak, Modification::BulletRewrite { from, to, .. }) => {
                check_bullet_rewrite(from, to, x).map_err(malformed)?;
                bullets += 1;
            }
            (AnomalyKind::NoShow, Modification::Remove { from, .. }) => {
                let y = cert.displaced.unwrap();
                if !removable(from, x, y, seats) {
                    return Err(Rejection::RelationNotSatisfied(format!(
                        "removed ballot {from:?} does not rank {x} above {y} with {y} outside the top {seats}"
                    )));
                }
            }
            (kind, m) => {
                return Err(malformed(format!(
                    "{m:?} not allowed in a {} certificate",
                    kind.label()
                )))
            }
        }
    }
    if cert.kind == AnomalyKind::DownwardWeak && bullets == 0 {
        return Err(malformed("weak downward certificate without a bullet rewrite"));
    }
    Ok(())
}

/// Flags implied by the changes themselves.
pub(crate) fn shape_flags(cert: &AnomalyCertificate) -> BTreeSet<Flag> {
    let mut flags = BTreeSet::new();
    let ballot_mods: Vec<&Modification> = cert.modifications.iter().filter(|m| m.source().is_some()).collect();
    if ballot_mods.len() == 1 {
        flags.insert(Flag::IdenticalBallotsUsed);
    }
    if cert.kind == AnomalyKind::NoShow
        && ballot_mods
            .iter()
            .any(|m| !m.source().unwrap().iter().take(cert.seats).any(|&c| c == cert.focal))
    {
        flags.insert(Flag::AmbiguousNoShow);
    }
    flags
}

/// Winner set under the strict policy, falling back to index breaks when
/// `allow_index` is set. The flag reports whether a break was needed.
fn count_winners(e: &Election, allow_index: bool) -> Result<(BTreeSet<CandidateId>, bool), TieError> {
    match winners(e, TiePolicy::Fail) {
        Ok(o) => Ok((o.winners, false)),
        Err(_) if allow_index => Ok((winners(e, TiePolicy::Index)?.winners, true)),
        Err(t) => Err(t),
    }
}

fn relation_holds(
    cert: &AnomalyCertificate,
    base: &BTreeSet<CandidateId>,
    modified: &BTreeSet<CandidateId>,
) -> Result<(), String> {
    let x = cert.focal;
    match cert.kind {
        AnomalyKind::CommitteeSize => {
            if modified.is_subset(base) {
                return Err("smaller committee is contained in the full committee".into());
            }
        }
        AnomalyKind::Upward => {
            if !base.contains(&x) || modified.contains(&x) {
                return Err(format!("{x} must win before and lose after"));
            }
        }
        AnomalyKind::DownwardStrong | AnomalyKind::DownwardWeak => {
            if base.contains(&x) || !modified.contains(&x) {
                return Err(format!("{x} must lose before and win after"));
            }
        }
        AnomalyKind::NoShow => {
            let y = cert.displaced.unwrap();
            let mut expected = base.clone();
            if base.contains(&x) || !expected.remove(&y) {
                return Err(format!("{y} must win and {x} must lose originally"));
            }
            expected.insert(x);
            if &expected != modified {
                return Err(format!("winners do not change by replacing {y} with {x}"));
            }
        }
    }
    Ok(())
}

/// Replays a certificate against `election` and checks everything it claims.
pub fn verify_certificate(election: &Election, cert: &AnomalyCertificate) -> Result<VerifiedCertificate, Rejection> {
    if cert.seats != election.seats() || cert.election != election.fingerprint() {
        return Err(Rejection::ElectionMismatch);
    }
    check_shapes(cert, election.seats())?;
    let allow_index = cert.flags.contains(&Flag::TieEncountered);
    let modified_election = apply_modifications(election, &cert.modifications)?;
    let (base, tie_base) = count_winners(election, allow_index)?;
    let (modified, tie_mod) = count_winners(&modified_election, allow_index)?;
    if base != cert.original_winners || modified != cert.modified_winners {
        return Err(Rejection::RelationNotSatisfied(
            "recorded winner sets do not replay".into(),
        ));
    }
    relation_holds(cert, &base, &modified).map_err(Rejection::RelationNotSatisfied)?;
    let mut computed = shape_flags(cert);
    if tie_base || tie_mod {
        computed.insert(Flag::TieEncountered);
    }
    if computed != cert.flags {
        return Err(Rejection::FlagMismatch {
            recorded: cert.flags.clone(),
            computed,
        });
    }
    Ok(VerifiedCertificate(cert.clone()))
}
