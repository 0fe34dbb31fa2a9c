use std::collections::BTreeSet;
use std::time::Instant;

use super::SearchOptions;
use crate::engine::{winners, TiePolicy};
use crate::model::{CandidateId, Election};

pub(crate) enum Probe {
    Winners {
        winners: BTreeSet<CandidateId>,
        tie: bool,
    },
    /// Abandoned: a tie the policy would not settle, or an invalid profile.
    Abandoned,
    OutOfBudget,
}

/// Runs trial counts within a budget.
pub(crate) struct Prober {
    policy: TiePolicy,
    max_probes: u64,
    deadline: Option<Instant>,
    pub probes: u64,
    pub truncated: bool,
}

impl Prober {
    pub fn new(options: &SearchOptions) -> Self {
        Prober {
            policy: options.policy,
            max_probes: options.budget.max_probes,
            deadline: options.budget.max_time.map(|d| Instant::now() + d),
            probes: 0,
            truncated: false,
        }
    }

    pub fn exhausted(&mut self) -> bool {
        if !self.truncated && (self.probes >= self.max_probes || self.deadline.is_some_and(|d| Instant::now() >= d)) {
            self.truncated = true;
        }
        self.truncated
    }

    pub fn run(&mut self, election: Option<Election>) -> Probe {
        if self.exhausted() {
            return Probe::OutOfBudget;
        }
        self.probes += 1;
        let Some(e) = election else { return Probe::Abandoned };
        match winners(&e, self.policy) {
            Ok(o) => Probe::Winners {
                winners: o.winners,
                tie: o.index_tie,
            },
            Err(_) => Probe::Abandoned,
        }
    }
}
