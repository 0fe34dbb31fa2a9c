//! Scottish-rules STV tabulation, monotonicity anomaly search and
//! closeness analysis for ranked-ballot elections.

pub mod anomaly;
pub mod closeness;
pub mod engine;
pub mod error;
pub mod fixed;
pub mod fixtures;
pub mod model;

pub mod corpus;

pub use engine::{tabulate, TabulationRecord, TiePolicy};
pub use error::{ModelError, TieError};
pub use fixed::FixedVote;
pub use model::{BallotType, Candidate, CandidateId, Election, PreferenceProfile};
