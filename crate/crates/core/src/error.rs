use thiserror::Error;

use crate::model::CandidateId;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("ranking lists candidate {0} twice")]
    DuplicateInRanking(CandidateId),
    #[error("unknown candidate {0}")]
    UnknownCandidate(CandidateId),
    #[error("empty ranking")]
    EmptyRanking,
    #[error("profile has no voters")]
    NoVoters,
    #[error("roster ids must be dense and start at 1")]
    RosterIds,
    #[error("candidate {0} has an empty name")]
    EmptyName(CandidateId),
    #[error("withdrawn candidate {0} appears on a ballot")]
    WithdrawnOnBallot(CandidateId),
    #[error("{seats} seats is invalid for {active} active candidates")]
    BadSeats { seats: usize, active: usize },
}

/// Raised when a tie cannot be resolved by earlier-round totals and the
/// policy forbids an arbitrary break.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unresolved tie between {candidates:?} in round {round}")]
pub struct TieError {
    pub round: usize,
    pub candidates: Vec<CandidateId>,
}
