use std::time::Instant;

use super::{SolveResult, SolveStats, SolveStatus, SolverError};
use crate::instance::Instance;
use crate::model::{is_feasible, total_cost, Assignment, EPSILON};

/// Default cap on `users * servers` for [`solve_bruteforce`].
pub const DEFAULT_MAX_VARIABLES: usize = 20;

/// Exhaustive search over all `2^(users * servers)` assignments.
///
/// Shares nothing with the exact solver beyond the constraint evaluators in
/// [`crate::model`], which makes it a reference for cross-checking.
pub fn solve_bruteforce(inst: &Instance) -> Result<SolveResult, SolverError> {
    solve_bruteforce_with(inst, DEFAULT_MAX_VARIABLES)
}

pub fn solve_bruteforce_with(
    inst: &Instance,
    max_variables: usize,
) -> Result<SolveResult, SolverError> {
    let start = Instant::now();
    let (users, servers) = (inst.user_count(), inst.server_count());
    let variables = users * servers;
    if variables > max_variables || variables >= 64 {
        return Err(SolverError::TooManyVariables {
            variables,
            limit: max_variables.min(63),
        });
    }

    let mut a = Assignment::empty(users, servers);
    let mut best: Option<(f64, u64)> = None;
    for mask in 0..(1u64 << variables) {
        for bit in 0..variables {
            a.set(bit / servers, bit % servers, mask & (1 << bit) != 0);
        }
        let cost = total_cost(inst, &a)?;
        if let Some((b, _)) = best {
            if cost >= b - EPSILON {
                continue;
            }
        }
        if is_feasible(inst, &a)? {
            best = Some((cost, mask));
        }
    }

    let stats = SolveStats {
        nodes_explored: 1u64 << variables,
        candidates_generated: 0,
        wall_time: start.elapsed(),
    };
    let result = match best {
        Some((_, mask)) => {
            let pairs = (0..variables)
                .filter(|bit| mask & (1 << bit) != 0)
                .map(|bit| (bit / servers, bit % servers));
            let a = Assignment::from_pairs(users, servers, pairs)?;
            SolveResult::from_assignment(inst, SolveStatus::Optimal, Some(a), false, stats)
        }
        None => SolveResult::from_assignment(inst, SolveStatus::Infeasible, None, false, stats),
    };
    Ok(result)
}
