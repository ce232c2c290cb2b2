use std::time::Instant;

use super::candidates::enumerate_candidates;
use super::{user_order, SolveResult, SolveStats, SolveStatus};
use crate::instance::Instance;
use crate::model::Assignment;

/// Single pass in branching order: each user takes its cheapest candidate
/// that still fits the residual capacities.
///
/// Returns `Feasible` when every user is placed. Otherwise the status is
/// `Infeasible` with `heuristic` set, since the instance may still have a
/// solution the greedy order missed.
pub fn solve_greedy(inst: &Instance) -> SolveResult {
    let start = Instant::now();
    let mut residual: Vec<u64> = inst.servers.iter().map(|s| s.capacity).collect();
    let mut a = Assignment::for_instance(inst);
    let mut generated = 0u64;
    let mut placed = 0u64;

    for u in user_order(inst) {
        let demand = inst.users[u].demand;
        let candidates = enumerate_candidates(inst, u);
        generated += candidates.len() as u64;
        let pick = candidates
            .iter()
            .find(|c| c.servers.iter().all(|&s| residual[s] >= demand));
        let Some(pick) = pick else {
            return SolveResult::from_assignment(
                inst,
                SolveStatus::Infeasible,
                None,
                true,
                SolveStats {
                    nodes_explored: placed,
                    candidates_generated: generated,
                    wall_time: start.elapsed(),
                },
            );
        };
        for &s in &pick.servers {
            residual[s] -= demand;
            a.set(u, s, true);
        }
        placed += 1;
    }

    SolveResult::from_assignment(
        inst,
        SolveStatus::Feasible,
        Some(a),
        true,
        SolveStats {
            nodes_explored: placed,
            candidates_generated: generated,
            wall_time: start.elapsed(),
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::check_feasible;
    use crate::solver::fixtures::*;
    use crate::solver::{solve_exact, ExactOptions};

    #[test]
    fn second_user_falls_back_to_expensive_server() {
        let inst = two_user_ab();
        let r = solve_greedy(&inst);
        assert_eq!(r.status, SolveStatus::Feasible);
        assert!(r.heuristic);
        assert_eq!(r.objective, Some(6.0));
        assert!(check_feasible(&inst, r.assignment.as_ref().unwrap())
            .unwrap()
            .is_feasible());
    }

    #[test]
    fn single_user_matches_exact() {
        let inst =
            Instance::new(vec![user(2, 0.9, 100.0)], vec![server(10.0, 0.95, 50)], 1).unwrap();
        let g = solve_greedy(&inst);
        let e = solve_exact(&inst, &ExactOptions::default());
        assert_eq!(g.objective, e.objective);
        assert_eq!(g.assignment, e.assignment);
    }

    #[test]
    fn trap_defeats_greedy() {
        let r = solve_greedy(&greedy_trap());
        assert_eq!(r.status, SolveStatus::Infeasible);
        assert!(r.heuristic);
        assert!(r.assignment.is_none());
    }
}
