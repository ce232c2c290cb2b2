//! Objective and constraint evaluation for a fixed assignment.
//!
//! A user `u` is served when at least one server in its multicast set is
//! available. Availabilities are independent, so the failure probability is
//! the product of `1 - p_s` over the chosen servers and the service-level
//! requirement reads
//!
//! ```text
//! prod_{s : x_us = 1} (1 - p_s)  <=  1 - l_u
//! ```
//!
//! Taking logarithms turns this into the linear row
//! `sum_s x_us ln(1 - p_s) <= ln(1 - l_u)` (see [`log_coefficients`]). The
//! product form is the one feasibility decisions rest on; the log form is a
//! pruning aid for the search and must agree with it away from the tolerance
//! band.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::instance::Instance;

/// Absolute tolerance on every real-valued inequality.
pub const EPSILON: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("assignment is {found_users}x{found_servers} but the instance is {users}x{servers}")]
    DimensionMismatch {
        users: usize,
        servers: usize,
        found_users: usize,
        found_servers: usize,
    },
    #[error("user index {index} out of range for {count} users")]
    UserOutOfRange { index: usize, count: usize },
    #[error("pair ({user}, {server}) out of range for a {users}x{servers} assignment")]
    PairOutOfRange {
        user: usize,
        server: usize,
        users: usize,
        servers: usize,
    },
}

/// Binary user-by-server decision matrix: `get(u, s)` is true when user `u`
/// sends its demand to server `s`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Assignment {
    users: usize,
    servers: usize,
    x: Vec<bool>,
}

impl Assignment {
    /// The all-zero assignment.
    pub fn empty(users: usize, servers: usize) -> Self {
        Assignment {
            users,
            servers,
            x: vec![false; users * servers],
        }
    }

    pub fn for_instance(inst: &Instance) -> Self {
        Self::empty(inst.user_count(), inst.server_count())
    }

    pub fn from_pairs(
        users: usize,
        servers: usize,
        pairs: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, ModelError> {
        let mut a = Self::empty(users, servers);
        for (user, server) in pairs {
            if user >= users || server >= servers {
                return Err(ModelError::PairOutOfRange {
                    user,
                    server,
                    users,
                    servers,
                });
            }
            a.set(user, server, true);
        }
        Ok(a)
    }

    pub fn user_count(&self) -> usize {
        self.users
    }

    pub fn server_count(&self) -> usize {
        self.servers
    }

    pub fn get(&self, user: usize, server: usize) -> bool {
        self.x[user * self.servers + server]
    }

    pub fn set(&mut self, user: usize, server: usize, on: bool) {
        self.x[user * self.servers + server] = on;
    }

    /// Servers user `u` sends to, ascending.
    pub fn selected(&self, user: usize) -> impl Iterator<Item = usize> + '_ {
        let row = &self.x[user * self.servers..(user + 1) * self.servers];
        row.iter().enumerate().filter(|(_, &on)| on).map(|(s, _)| s)
    }

    /// All `(user, server)` pairs with `x_us = 1`, sorted.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        (0..self.users)
            .flat_map(|u| self.selected(u).map(move |s| (u, s)))
            .collect()
    }

    fn check_dims(&self, inst: &Instance) -> Result<(), ModelError> {
        if self.users != inst.user_count() || self.servers != inst.server_count() {
            return Err(ModelError::DimensionMismatch {
                users: inst.user_count(),
                servers: inst.server_count(),
                found_users: self.users,
                found_servers: self.servers,
            });
        }
        Ok(())
    }
}

/// `sum_u sum_s d_u * w_s * x_us`.
pub fn total_cost(inst: &Instance, a: &Assignment) -> Result<f64, ModelError> {
    a.check_dims(inst)?;
    Ok((0..inst.user_count()).map(|u| user_cost(inst, a, u)).sum())
}

fn user_cost(inst: &Instance, a: &Assignment, u: usize) -> f64 {
    let d = inst.users[u].demand as f64;
    a.selected(u).map(|s| d * inst.servers[s].unit_cost).sum()
}

/// Probability that none of the servers chosen for user `u` is available.
/// An empty selection fails with certainty.
pub fn failure_probability(inst: &Instance, a: &Assignment, u: usize) -> Result<f64, ModelError> {
    a.check_dims(inst)?;
    if u >= inst.user_count() {
        return Err(ModelError::UserOutOfRange {
            index: u,
            count: inst.user_count(),
        });
    }
    Ok(failure_of(inst, a.selected(u)))
}

/// Failure probability of an arbitrary server set, multiplied in iteration order.
pub fn failure_of(inst: &Instance, servers: impl IntoIterator<Item = usize>) -> f64 {
    servers
        .into_iter()
        .fold(1.0, |acc, s| acc * (1.0 - inst.servers[s].availability))
}

/// Product-form service-level test. Equality counts as satisfied.
#[inline]
pub fn qos_satisfied(failure: f64, service_level: f64) -> bool {
    failure <= (1.0 - service_level) + EPSILON
}

#[inline]
pub fn budget_satisfied(cost: f64, budget: f64) -> bool {
    cost <= budget + EPSILON
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ConstraintKind {
    MulticastBound,
    Budget,
    Capacity,
    #[serde(rename = "QoS")]
    QoS,
}

/// One violated inequality `lhs <= rhs`, with both sides evaluated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstraintViolation {
    pub kind: ConstraintKind,
    /// User index for per-user constraints, server index for capacity.
    pub index: usize,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FeasibilityReport {
    pub violations: Vec<ConstraintViolation>,
}

impl FeasibilityReport {
    pub fn is_feasible(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report is serializable")
    }
}

/// Evaluates the multicast bound, budget and service level of every user and
/// the capacity of every server, listing each violation in
/// (constraint kind, entity index) order.
pub fn check_feasible(inst: &Instance, a: &Assignment) -> Result<FeasibilityReport, ModelError> {
    a.check_dims(inst)?;
    let mut violations = Vec::new();

    for (u, user) in inst.users.iter().enumerate() {
        let count = a.selected(u).count();
        if count > inst.multicast_bound {
            violations.push(ConstraintViolation {
                kind: ConstraintKind::MulticastBound,
                index: u,
                lhs: count as f64,
                rhs: inst.multicast_bound as f64,
            });
        }
        let cost = user_cost(inst, a, u);
        if !budget_satisfied(cost, user.budget) {
            violations.push(ConstraintViolation {
                kind: ConstraintKind::Budget,
                index: u,
                lhs: cost,
                rhs: user.budget,
            });
        }
    }

    for (s, server) in inst.servers.iter().enumerate() {
        let load: u64 = (0..inst.user_count())
            .filter(|&u| a.get(u, s))
            .map(|u| inst.users[u].demand)
            .sum();
        if load > server.capacity {
            violations.push(ConstraintViolation {
                kind: ConstraintKind::Capacity,
                index: s,
                lhs: load as f64,
                rhs: server.capacity as f64,
            });
        }
    }

    for (u, user) in inst.users.iter().enumerate() {
        let failure = failure_of(inst, a.selected(u));
        if !qos_satisfied(failure, user.service_level) {
            violations.push(ConstraintViolation {
                kind: ConstraintKind::QoS,
                index: u,
                lhs: failure,
                rhs: 1.0 - user.service_level,
            });
        }
    }

    violations.sort_by_key(|v| (v.kind, v.index));
    Ok(FeasibilityReport { violations })
}

/// Short-circuiting feasibility test; agrees with `check_feasible(..).is_feasible()`.
pub fn is_feasible(inst: &Instance, a: &Assignment) -> Result<bool, ModelError> {
    a.check_dims(inst)?;
    for (u, user) in inst.users.iter().enumerate() {
        if a.selected(u).count() > inst.multicast_bound
            || !budget_satisfied(user_cost(inst, a, u), user.budget)
            || !qos_satisfied(failure_of(inst, a.selected(u)), user.service_level)
        {
            return Ok(false);
        }
    }
    for (s, server) in inst.servers.iter().enumerate() {
        let load: u64 = (0..inst.user_count())
            .filter(|&u| a.get(u, s))
            .map(|u| inst.users[u].demand)
            .sum();
        if load > server.capacity {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Linearized service-level coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct LogCoefficients {
    /// `ln(1 - p_s)` per server; all negative.
    pub server: Vec<f64>,
    /// `ln(1 - l_u)` per user.
    pub user: Vec<f64>,
    threshold: Vec<f64>,
}

impl LogCoefficients {
    /// Log-form service-level test for user `u` over `servers`.
    ///
    /// The right-hand side is `ln(1 - l_u + EPSILON)`, the image of the
    /// product-form threshold, so both tests share one tolerance.
    pub fn qos_satisfied(&self, u: usize, servers: impl IntoIterator<Item = usize>) -> bool {
        let lhs: f64 = servers.into_iter().map(|s| self.server[s]).sum();
        lhs <= self.threshold[u]
    }

    /// Tolerant right-hand side for user `u`.
    pub fn threshold(&self, u: usize) -> f64 {
        self.threshold[u]
    }
}

pub fn log_coefficients(inst: &Instance) -> LogCoefficients {
    LogCoefficients {
        server: inst
            .servers
            .iter()
            .map(|s| (1.0 - s.availability).ln())
            .collect(),
        user: inst
            .users
            .iter()
            .map(|u| (1.0 - u.service_level).ln())
            .collect(),
        threshold: inst
            .users
            .iter()
            .map(|u| ((1.0 - u.service_level) + EPSILON).ln())
            .collect(),
    }
}

/// Smallest `k >= 1` with `(1 - p)^k <= 1 - l`, or `None` when `p` or `l`
/// lies outside (0,1) or `k` would not fit in an `i32`.
///
/// This ignores the multicast bound and the number of servers; callers apply
/// those limits.
pub fn min_replicas(p: f64, l: f64) -> Option<u32> {
    if !(p > 0.0 && p < 1.0 && l > 0.0 && l < 1.0) {
        return None;
    }
    let q = 1.0 - p;
    let ok = |k: u32| qos_satisfied(q.powi(k as i32), l);
    let estimate = (1.0 - l).ln() / q.ln();
    if !estimate.is_finite() || estimate > (i32::MAX - 2) as f64 {
        return None;
    }
    let mut k = (estimate.floor() as u32).max(1);
    while k > 1 && ok(k - 1) {
        k -= 1;
    }
    while !ok(k) {
        k += 1;
    }
    Some(k)
}
