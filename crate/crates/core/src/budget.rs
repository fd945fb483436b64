//! Search budgets and run statistics shared by every backtracking engine in
//! the crate. A budget bounds both the number of expanded nodes and wall-clock
//! time; exceeding either yields an explicit incomplete status, never a silent
//! truncation.

use serde::Serialize;
use std::time::Duration;

/// Outcome of a budgeted search run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BudgetStatus {
    /// The search space was exhausted (or the caller stopped the run after
    /// obtaining what it asked for).
    Complete,
    /// The node budget was hit before exhaustion.
    NodeBudgetExceeded,
    /// The wall-clock timeout was hit before exhaustion.
    TimedOut,
}

impl BudgetStatus {
    pub fn is_complete(self) -> bool {
        self == BudgetStatus::Complete
    }
}

/// Limits for a single search run.
#[derive(Clone, Copy, Debug)]
pub struct SearchBudget {
    /// Maximum number of search nodes (value assignments tried).
    pub max_nodes: u64,
    /// Optional wall-clock limit.
    pub timeout: Option<Duration>,
}

impl Default for SearchBudget {
    /// Desk-scale default: 10^8 nodes and 300 seconds.
    fn default() -> Self {
        SearchBudget {
            max_nodes: 100_000_000,
            timeout: Some(Duration::from_secs(300)),
        }
    }
}

impl SearchBudget {
    pub fn nodes(max_nodes: u64) -> Self {
        SearchBudget {
            max_nodes,
            timeout: None,
        }
    }

    pub fn unlimited() -> Self {
        SearchBudget {
            max_nodes: u64::MAX,
            timeout: None,
        }
    }

    pub fn with_timeout(mut self, timeout: Duration) -> Self {
        self.timeout = Some(timeout);
        self
    }
}

/// Statistics of a finished (or interrupted) search run. `elapsed` is
/// excluded from serialized payloads so that deterministic reruns reproduce
/// reports byte for byte.
#[derive(Clone, Debug, Serialize)]
pub struct SearchStats {
    /// Nodes expanded, i.e. candidate value assignments tried.
    pub nodes: u64,
    /// Dead ends detected by propagation or feasibility pruning.
    pub prunes: u64,
    pub status: BudgetStatus,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl SearchStats {
    pub fn new() -> Self {
        SearchStats {
            nodes: 0,
            prunes: 0,
            status: BudgetStatus::Complete,
            elapsed: Duration::ZERO,
        }
    }

    /// Folds another run into this one. The merged status is the worst of the
    /// two (any incomplete status wins over `Complete`).
    pub fn absorb(&mut self, other: &SearchStats) {
        self.nodes += other.nodes;
        self.prunes += other.prunes;
        self.elapsed += other.elapsed;
        if self.status.is_complete() && !other.status.is_complete() {
            self.status = other.status;
        }
    }
}

impl Default for SearchStats {
    fn default() -> Self {
        SearchStats::new()
    }
}
