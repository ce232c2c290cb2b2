use std::collections::HashMap;
use std::time::{Duration, Instant};

use super::candidates::{enumerate_candidates, CandidateSubset};
use super::{user_order, SolveResult, SolveStats, SolveStatus};
use crate::instance::Instance;
use crate::model::{qos_satisfied, Assignment, EPSILON};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ExactOptions {
    pub time_limit: Option<Duration>,
    pub node_limit: Option<u64>,
}

/// Proves a minimum-cost assignment, proves infeasibility, or stops at a
/// limit with the best incumbent found.
///
/// Users are placed one at a time, largest demand first (ties by index). Each
/// user branches over its minimal candidate sets in (cost, servers) order,
/// skipping sets that do not fit the residual capacities. A node is cut when
/// its cost plus the cheapest candidate of every unplaced user reaches the
/// incumbent. Two refinements tighten that cut without losing optima:
///
/// * the per-user cheapest candidate is taken among sets that still fit the
///   residual capacities;
/// * users with identical requirements are interchangeable, so their
///   candidate indices are forced to be nondecreasing along the branching
///   order.
///
/// The result depends only on the instance, never on timing (unless a time
/// limit fires).
pub fn solve_exact(inst: &Instance, opts: &ExactOptions) -> SolveResult {
    let start = Instant::now();
    let order = user_order(inst);

    let mut class_of = vec![0; inst.user_count()];
    let mut keys: HashMap<(u64, u64, u64), usize> = HashMap::new();
    let mut reps: Vec<usize> = Vec::new();
    for &u in &order {
        let user = &inst.users[u];
        let key = (
            user.demand,
            user.budget.to_bits(),
            user.service_level.to_bits(),
        );
        class_of[u] = *keys.entry(key).or_insert_with(|| {
            reps.push(u);
            reps.len() - 1
        });
    }

    let infeasible = |candidates_generated: u64| {
        SolveResult::from_assignment(
            inst,
            SolveStatus::Infeasible,
            None,
            false,
            SolveStats {
                nodes_explored: 0,
                candidates_generated,
                wall_time: start.elapsed(),
            },
        )
    };

    // Replica-volume test before enumeration: each user needs at least as
    // many servers as the most available ones would take, and each copy
    // occupies its full demand.
    let mut avail: Vec<f64> = inst.servers.iter().map(|s| s.availability).collect();
    avail.sort_by(|a, b| b.total_cmp(a));
    let fewest: Vec<Option<usize>> = reps
        .iter()
        .map(|&rep| fewest_servers(&avail, inst.multicast_bound, inst.users[rep].service_level))
        .collect();
    let mut volume: u64 = 0;
    for &u in &order {
        match fewest[class_of[u]] {
            Some(k) => volume += inst.users[u].demand * k as u64,
            None => return infeasible(0),
        }
    }
    if volume > inst.total_capacity() {
        return infeasible(0);
    }

    let mut classes = Vec::with_capacity(reps.len());
    let mut generated = 0u64;
    for &rep in &reps {
        let candidates = enumerate_candidates(inst, rep);
        generated += candidates.len() as u64;
        if candidates.is_empty() {
            return infeasible(generated);
        }
        let min_size = candidates
            .iter()
            .map(|c| c.servers.len())
            .min()
            .unwrap_or(0) as u64;
        classes.push(Class {
            demand: inst.users[rep].demand,
            cheapest: candidates[0].cost,
            min_size,
            candidates,
        });
    }

    let ordered_class: Vec<usize> = order.iter().map(|&u| class_of[u]).collect();
    // static_tail[i]: sum of cheapest candidate costs over order[i..]
    let mut static_tail = vec![0.0; order.len() + 1];
    for i in (0..order.len()).rev() {
        static_tail[i] = static_tail[i + 1] + classes[ordered_class[i]].cheapest;
    }
    let mut remaining = vec![0usize; classes.len()];
    for &c in &ordered_class {
        remaining[c] += 1;
    }

    let mut search = Search {
        classes: &classes,
        ordered_class: &ordered_class,
        static_tail,
        remaining,
        floor: vec![0; classes.len()],
        residual: inst.servers.iter().map(|s| s.capacity).collect(),
        residual_total: inst.total_capacity(),
        path: Vec::with_capacity(order.len()),
        best: None,
        nodes: 0,
        opts: *opts,
        start,
        stopped: false,
    };
    search.dfs(0, 0.0);

    let assignment = search.best.as_ref().map(|(_, picks)| {
        let mut a = Assignment::for_instance(inst);
        for (depth, &idx) in picks.iter().enumerate() {
            for &s in &classes[ordered_class[depth]].candidates[idx].servers {
                a.set(order[depth], s, true);
            }
        }
        a
    });
    let status = match (search.stopped, &assignment) {
        (true, _) => SolveStatus::TimedOut,
        (false, Some(_)) => SolveStatus::Optimal,
        (false, None) => SolveStatus::Infeasible,
    };
    SolveResult::from_assignment(
        inst,
        status,
        assignment,
        false,
        SolveStats {
            nodes_explored: search.nodes,
            candidates_generated: generated,
            wall_time: start.elapsed(),
        },
    )
}

/// Fewest servers, taken from `avail_desc` (sorted most available first),
/// that meet `service_level` within `bound` servers. Budgets are ignored.
fn fewest_servers(avail_desc: &[f64], bound: usize, service_level: f64) -> Option<usize> {
    let mut failure = 1.0;
    for (k, p) in avail_desc.iter().take(bound).enumerate() {
        failure *= 1.0 - p;
        if qos_satisfied(failure, service_level) {
            return Some(k + 1);
        }
    }
    None
}

struct Class {
    demand: u64,
    cheapest: f64,
    min_size: u64,
    candidates: Vec<CandidateSubset>,
}

struct Search<'a> {
    classes: &'a [Class],
    ordered_class: &'a [usize],
    static_tail: Vec<f64>,
    remaining: Vec<usize>,
    /// Candidate index chosen by the latest placed member of each class.
    floor: Vec<usize>,
    residual: Vec<u64>,
    residual_total: u64,
    path: Vec<usize>,
    best: Option<(f64, Vec<usize>)>,
    nodes: u64,
    opts: ExactOptions,
    start: Instant,
    stopped: bool,
}

impl Search<'_> {
    fn dfs(&mut self, depth: usize, cost: f64) {
        if depth == self.ordered_class.len() {
            if self.best.as_ref().map_or(true, |(b, _)| cost < b - EPSILON) {
                self.best = Some((cost, self.path.clone()));
            }
            return;
        }
        let class_id = self.ordered_class[depth];
        let class = &self.classes[class_id];
        let tail = self.static_tail[depth + 1];
        let prev_floor = self.floor[class_id];
        self.remaining[class_id] -= 1;

        for idx in prev_floor..class.candidates.len() {
            if self.limit_reached() {
                self.stopped = true;
                break;
            }
            let cand = &class.candidates[idx];
            let new_cost = cost + cand.cost;
            if let Some((best, _)) = &self.best {
                // sorted by cost: nothing further along can do better
                if new_cost + tail >= best - EPSILON {
                    break;
                }
            }
            if !self.fits(cand, class.demand) {
                continue;
            }
            self.nodes += 1;
            self.place(cand, class.demand);
            self.floor[class_id] = idx;
            self.path.push(idx);
            if self.promising(new_cost) {
                self.dfs(depth + 1, new_cost);
            }
            self.path.pop();
            self.remove(cand, class.demand);
            if self.stopped {
                break;
            }
        }

        self.floor[class_id] = prev_floor;
        self.remaining[class_id] += 1;
    }

    fn limit_reached(&self) -> bool {
        if let Some(limit) = self.opts.node_limit {
            if self.nodes >= limit {
                return true;
            }
        }
        if let Some(limit) = self.opts.time_limit {
            if self.nodes % 256 == 0 && self.start.elapsed() >= limit {
                return true;
            }
        }
        false
    }

    fn fits(&self, cand: &CandidateSubset, demand: u64) -> bool {
        cand.servers.iter().all(|&s| self.residual[s] >= demand)
    }

    fn place(&mut self, cand: &CandidateSubset, demand: u64) {
        for &s in &cand.servers {
            self.residual[s] -= demand;
        }
        self.residual_total -= demand * cand.servers.len() as u64;
    }

    fn remove(&mut self, cand: &CandidateSubset, demand: u64) {
        for &s in &cand.servers {
            self.residual[s] += demand;
        }
        self.residual_total += demand * cand.servers.len() as u64;
    }

    /// Capacity-aware bound over the unplaced users.
    fn promising(&self, cost: f64) -> bool {
        let mut bound = cost;
        let mut volume = 0u64;
        for (c, class) in self.classes.iter().enumerate() {
            let left = self.remaining[c];
            if left == 0 {
                continue;
            }
            volume += left as u64 * class.demand * class.min_size;
            let first_fit = class.candidates[self.floor[c]..]
                .iter()
                .find(|cand| self.fits(cand, class.demand));
            match first_fit {
                Some(cand) => bound += left as f64 * cand.cost,
                None => return false,
            }
        }
        if volume > self.residual_total {
            return false;
        }
        self.best
            .as_ref()
            .map_or(true, |(best, _)| bound < best - EPSILON)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::reduce_from_3partition;
    use crate::model::check_feasible;
    use crate::solver::fixtures::*;

    #[test]
    fn capacity_forces_split() {
        let inst = two_user_ab();
        let r = solve_exact(&inst, &ExactOptions::default());
        assert_eq!(r.status, SolveStatus::Optimal);
        assert_eq!(r.objective, Some(6.0));
        let a = r.assignment.unwrap();
        assert!(check_feasible(&inst, &a).unwrap().is_feasible());
        assert_eq!(a.pairs(), vec![(0, 0), (1, 1)]);
    }

    #[test]
    fn infeasible_reduction() {
        let inst = reduce_from_3partition(&[3, 3, 3, 1, 1, 1], 4).unwrap();
        let r = solve_exact(&inst, &ExactOptions::default());
        assert_eq!(r.status, SolveStatus::Infeasible);
        assert!(r.assignment.is_none() && r.objective.is_none());
    }

    #[test]
    fn feasible_reductions() {
        for (ints, bound) in [(vec![2, 2, 2], 6), (vec![1, 1, 1, 1, 1, 1], 3)] {
            let inst = reduce_from_3partition(&ints, bound).unwrap();
            let r = solve_exact(&inst, &ExactOptions::default());
            assert_eq!(r.status, SolveStatus::Optimal);
            assert_eq!(r.objective, Some(0.0));
        }
    }

    #[test]
    fn unserveable_user_explores_nothing() {
        let inst = Instance::new(
            vec![user(1, 0.6, 10.0), user(1, 0.95, 10.0)],
            vec![server(1.0, 0.7, 5), server(1.0, 0.7, 5)],
            1,
        )
        .unwrap();
        let r = solve_exact(&inst, &ExactOptions::default());
        assert_eq!(r.status, SolveStatus::Infeasible);
        assert_eq!(r.stats.nodes_explored, 0);

        // reachable by QoS but not affordable
        let broke = Instance::new(vec![user(1, 0.6, 0.5)], vec![server(1.0, 0.7, 5)], 1).unwrap();
        let r = solve_exact(&broke, &ExactOptions::default());
        assert_eq!(r.status, SolveStatus::Infeasible);
        assert_eq!(r.stats.nodes_explored, 0);
    }

    #[test]
    fn beats_greedy_on_trap() {
        let r = solve_exact(&greedy_trap(), &ExactOptions::default());
        assert_eq!(r.status, SolveStatus::Optimal);
        assert_eq!(r.objective, Some(20.0));
        assert_eq!(r.assignment.unwrap().pairs(), vec![(0, 1), (1, 0)]);
    }

    #[test]
    fn node_limit_reports_timed_out() {
        let users = (0..8).map(|i| user(1 + i % 3, 0.6, 100.0)).collect();
        let servers = (0..5).map(|s| server(1.0 + s as f64, 0.7, 4)).collect();
        let inst = Instance::new(users, servers, 2).unwrap();
        let r = solve_exact(
            &inst,
            &ExactOptions {
                node_limit: Some(3),
                ..Default::default()
            },
        );
        assert_eq!(r.status, SolveStatus::TimedOut);
        assert!(r.stats.nodes_explored <= 3);
        assert!(r.assignment.is_none());

        let full = solve_exact(&inst, &ExactOptions::default());
        assert_eq!(full.status, SolveStatus::Optimal);
        let r = solve_exact(
            &inst,
            &ExactOptions {
                node_limit: Some(full.stats.nodes_explored.max(9) - 1),
                ..Default::default()
            },
        );
        if r.status == SolveStatus::TimedOut {
            if let Some(obj) = r.objective {
                assert!(obj >= full.objective.unwrap() - EPSILON);
            }
        }
    }

    #[test]
    fn repeated_runs_agree() {
        let users = (0..6).map(|i| user(1 + i % 2, 0.75, 100.0)).collect();
        let servers = (0..4).map(|_| server(3.0, 0.5, 6)).collect();
        let inst = Instance::new(users, servers, 3).unwrap();
        let a = solve_exact(&inst, &ExactOptions::default());
        let b = solve_exact(&inst, &ExactOptions::default());
        assert_eq!(a.status, SolveStatus::Optimal);
        assert_eq!(a.assignment, b.assignment);
        assert_eq!(a.objective, Some(9.0 * 2.0 * 3.0));
    }

    #[test]
    fn replica_volume_short_circuits() {
        // each user needs 2 replicas of 3 units; 4 users need 24 > 20 units
        let users = vec![user(3, 0.75, 100.0); 4];
        let servers = vec![server(1.0, 0.5, 5); 4];
        let inst = Instance::new(users, servers, 4).unwrap();
        let r = solve_exact(&inst, &ExactOptions::default());
        assert_eq!(r.status, SolveStatus::Infeasible);
        assert_eq!(r.stats.candidates_generated, 0);
    }
}
