//! Minimum-cost allocation.
//!
//! * [`solve_exact`]: depth-first branch-and-bound over per-user candidate sets.
//! * [`solve_greedy`]: one pass, cheapest fitting candidate per user.
//! * [`solve_bruteforce`]: every 0/1 matrix, for cross-checking small cases.
//! * [`lower_bound`]: the optimum with server capacities ignored.

mod bruteforce;
mod candidates;
mod exact;
mod greedy;

use std::fmt;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::instance::Instance;
use crate::model::{Assignment, ModelError};

pub use bruteforce::{solve_bruteforce, solve_bruteforce_with, DEFAULT_MAX_VARIABLES};
pub use candidates::{enumerate_candidates, CandidateSubset};
pub use exact::{solve_exact, ExactOptions};
pub use greedy::solve_greedy;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SolveStatus {
    /// Proven minimum-cost assignment.
    Optimal,
    /// Feasible assignment with no optimality claim (heuristics).
    Feasible,
    /// No feasible assignment exists, or, when `heuristic` is set on the
    /// result, the heuristic failed to find one.
    Infeasible,
    /// A node or time limit stopped the search; the incumbent, if any, is attached.
    TimedOut,
}

impl fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SolveStatus::Optimal => "Optimal",
            SolveStatus::Feasible => "Feasible",
            SolveStatus::Infeasible => "Infeasible",
            SolveStatus::TimedOut => "TimedOut",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SolveStats {
    pub nodes_explored: u64,
    pub candidates_generated: u64,
    pub wall_time: Duration,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub status: SolveStatus,
    pub assignment: Option<Assignment>,
    /// `total_cost` of `assignment`.
    pub objective: Option<f64>,
    /// Set by heuristic methods; an `Infeasible` status then only means the
    /// heuristic gave up.
    pub heuristic: bool,
    pub stats: SolveStats,
}

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("brute force needs {variables} binary variables, above the limit of {limit}")]
    TooManyVariables { variables: usize, limit: usize },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("malformed solve result: {0}")]
    Format(String),
}

pub const RESULT_CSV_HEADER: &str =
    "status,objective,nodes_explored,candidates_generated,wall_time,assignment";

impl SolveResult {
    pub(crate) fn from_assignment(
        inst: &Instance,
        status: SolveStatus,
        assignment: Option<Assignment>,
        heuristic: bool,
        stats: SolveStats,
    ) -> Self {
        let objective = assignment.as_ref().map(|a| {
            crate::model::total_cost(inst, a).expect("solver assignments match the instance")
        });
        SolveResult {
            status,
            assignment,
            objective,
            heuristic,
            stats,
        }
    }

    /// JSON form: `{"status", "objective", "assignment": [[u, s], ...],
    /// "heuristic", "stats": {...}}` with pairs sorted.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&SolveResultDoc::from(self)).expect("result is serializable")
    }

    /// CSV form: a header and one row, floats to six significant digits,
    /// pairs written `u:s` separated by spaces.
    pub fn to_csv(&self) -> String {
        use crate::experiments::sig6;
        let pairs = self
            .assignment
            .as_ref()
            .map(|a| {
                a.pairs()
                    .iter()
                    .map(|(u, s)| format!("{u}:{s}"))
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .unwrap_or_default();
        format!(
            "{RESULT_CSV_HEADER}\n{},{},{},{},{},{}\n",
            self.status,
            self.objective.map(sig6).unwrap_or_default(),
            self.stats.nodes_explored,
            self.stats.candidates_generated,
            sig6(self.stats.wall_time.as_secs_f64()),
            pairs
        )
    }

    /// Reads the assignment pairs back out of [`SolveResult::to_json`] output.
    pub fn assignment_from_json(
        text: &str,
        users: usize,
        servers: usize,
    ) -> Result<Option<Assignment>, SolverError> {
        let doc: AssignmentDoc =
            serde_json::from_str(text).map_err(|e| SolverError::Format(e.to_string()))?;
        doc.assignment
            .map(|pairs| {
                Assignment::from_pairs(users, servers, pairs.into_iter().map(|[u, s]| (u, s)))
                    .map_err(SolverError::from)
            })
            .transpose()
    }
}

#[derive(Serialize)]
struct SolveResultDoc {
    status: SolveStatus,
    objective: Option<f64>,
    assignment: Option<Vec<[usize; 2]>>,
    heuristic: bool,
    stats: StatsDoc,
}

#[derive(Serialize)]
struct StatsDoc {
    nodes_explored: u64,
    candidates_generated: u64,
    wall_time: f64,
}

#[derive(Deserialize)]
struct AssignmentDoc {
    assignment: Option<Vec<[usize; 2]>>,
}

impl From<&SolveResult> for SolveResultDoc {
    fn from(r: &SolveResult) -> Self {
        SolveResultDoc {
            status: r.status,
            objective: r.objective,
            assignment: r
                .assignment
                .as_ref()
                .map(|a| a.pairs().into_iter().map(|(u, s)| [u, s]).collect()),
            heuristic: r.heuristic,
            stats: StatsDoc {
                nodes_explored: r.stats.nodes_explored,
                candidates_generated: r.stats.candidates_generated,
                wall_time: r.stats.wall_time.as_secs_f64(),
            },
        }
    }
}

/// Capacity-relaxed bound on the optimum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LowerBound {
    Finite(f64),
    /// Some user has no candidate set at all; no assignment is feasible.
    Unserveable {
        user: usize,
    },
}

/// Sum over users of their cheapest candidate cost.
///
/// Every feasible assignment gives each user a set that contains one of its
/// candidates and costs at least as much, so this never exceeds the optimum.
pub fn lower_bound(inst: &Instance) -> LowerBound {
    let mut total = 0.0;
    for u in 0..inst.user_count() {
        match enumerate_candidates(inst, u).first() {
            Some(c) => total += c.cost,
            None => return LowerBound::Unserveable { user: u },
        }
    }
    LowerBound::Finite(total)
}

/// Users in branching order: larger demand first, then by index.
pub(crate) fn user_order(inst: &Instance) -> Vec<usize> {
    let mut order: Vec<usize> = (0..inst.user_count()).collect();
    order.sort_by_key(|&u| (std::cmp::Reverse(inst.users[u].demand), u));
    order
}

#[cfg(test)]
pub(crate) mod fixtures {
    use crate::instance::{Instance, ServerSpec, UserSpec};

    pub fn user(demand: u64, service_level: f64, budget: f64) -> UserSpec {
        UserSpec {
            demand,
            budget,
            service_level,
        }
    }

    pub fn server(unit_cost: f64, availability: f64, capacity: u64) -> ServerSpec {
        ServerSpec {
            unit_cost,
            capacity,
            availability,
        }
    }

    /// Two users competing for a cheap server with room for one of them.
    pub fn two_user_ab() -> Instance {
        Instance::new(
            vec![user(1, 0.6, 10.0), user(1, 0.6, 10.0)],
            vec![server(1.0, 0.7, 1), server(5.0, 0.7, 2)],
            2,
        )
        .unwrap()
    }

    /// Greedy hands the cheap server to the first user; the second cannot
    /// afford the expensive one.
    pub fn greedy_trap() -> Instance {
        Instance::new(
            vec![user(2, 0.8, 20.0), user(2, 0.8, 2.0)],
            vec![server(1.0, 0.9, 2), server(9.0, 0.9, 2)],
            1,
        )
        .unwrap()
    }
}
