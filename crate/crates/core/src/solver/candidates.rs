use std::cmp::Ordering;

use crate::instance::Instance;
use crate::model::{self, budget_satisfied, qos_satisfied};

/// A minimal server set that meets one user's service level, multicast bound
/// and budget on its own.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateSubset {
    pub user: usize,
    /// Ascending server indices.
    pub servers: Vec<usize>,
    /// `d_u * sum_s w_s` over `servers`.
    pub cost: f64,
}

impl CandidateSubset {
    pub(crate) fn cmp_key(&self, other: &Self) -> Ordering {
        self.cost
            .total_cmp(&other.cost)
            .then_with(|| self.servers.cmp(&other.servers))
    }
}

/// Lists every minimal feasible multicast set for user `u`, cheapest first,
/// ties broken by lexicographic server indices.
///
/// A set is kept when it has at most `M` servers, fits the user's budget,
/// meets the service level, and stops meeting it once any one of its servers
/// is dropped. Supersets of a feasible set are never generated. An empty list
/// means the user cannot be served at all.
pub fn enumerate_candidates(inst: &Instance, u: usize) -> Vec<CandidateSubset> {
    let user = &inst.users[u];
    let logs = model::log_coefficients(inst);
    let n = inst.server_count();
    let max_size = inst.multicast_bound.min(n);

    // best_gain[i][r]: most negative sum of r log-failures among servers i..n.
    let best_gain: Vec<Vec<f64>> = (0..=n)
        .map(|i| {
            let mut tail: Vec<f64> = logs.server[i..].to_vec();
            tail.sort_by(f64::total_cmp);
            let mut acc = vec![0.0];
            let mut sum = 0.0;
            for x in tail {
                sum += x;
                acc.push(sum);
            }
            acc
        })
        .collect();

    let mut search = Enumeration {
        inst,
        user: u,
        demand: user.demand as f64,
        budget: user.budget,
        service_level: user.service_level,
        log_threshold: logs.threshold(u),
        log_server: &logs.server,
        best_gain,
        max_size,
        chosen: Vec::with_capacity(max_size),
        out: Vec::new(),
    };
    search.extend(0, 0.0, 0.0);

    let mut out = search.out;
    out.sort_by(CandidateSubset::cmp_key);
    out
}

struct Enumeration<'a> {
    inst: &'a Instance,
    user: usize,
    demand: f64,
    budget: f64,
    service_level: f64,
    log_threshold: f64,
    log_server: &'a [f64],
    best_gain: Vec<Vec<f64>>,
    max_size: usize,
    chosen: Vec<usize>,
    out: Vec<CandidateSubset>,
}

// Slack on the log-space reachability test; the product form has the final say.
const LOG_SLACK: f64 = 1e-9;

impl Enumeration<'_> {
    fn extend(&mut self, next: usize, cost: f64, log_sum: f64) {
        let n = self.inst.server_count();
        for s in next..n {
            let new_cost = cost + self.demand * self.inst.servers[s].unit_cost;
            if !budget_satisfied(new_cost, self.budget) {
                continue;
            }
            self.chosen.push(s);
            let failure = model::failure_of(self.inst, self.chosen.iter().copied());
            if qos_satisfied(failure, self.service_level) {
                if self.is_minimal() {
                    self.out.push(CandidateSubset {
                        user: self.user,
                        servers: self.chosen.clone(),
                        cost: new_cost,
                    });
                }
            } else if self.chosen.len() < self.max_size {
                let new_log = log_sum + self.log_server[s];
                let room = (self.max_size - self.chosen.len()).min(n - s - 1);
                if new_log + self.best_gain[s + 1][room] <= self.log_threshold + LOG_SLACK {
                    self.extend(s + 1, new_cost, new_log);
                }
            }
            self.chosen.pop();
        }
    }

    fn is_minimal(&self) -> bool {
        (0..self.chosen.len()).all(|skip| {
            let rest = self
                .chosen
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != skip)
                .map(|(_, &s)| s);
            !qos_satisfied(model::failure_of(self.inst, rest), self.service_level)
        })
    }
}
