//! Problem instances: users demanding service, fog servers offering it, and
//! the per-user multicast bound.
//!
//! An [`Instance`] is plain data. Constructors that read external input
//! ([`parse_instance`], [`generate_instance`], [`reduce_from_3partition`])
//! always return validated instances; hand-built values can be checked with
//! [`validate`], which reports every broken invariant instead of stopping at
//! the first one.

mod generate;
mod json;
mod reduction;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use generate::generate_instance;
pub use json::{parse_instance, parse_instance_unvalidated, serialize_instance, ParseMode};
pub use reduction::reduce_from_3partition;

/// A user and its service requirement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UserSpec {
    /// Indivisible demand in service units.
    pub demand: u64,
    /// Upper limit on the user's total sending cost.
    pub budget: f64,
    /// Required probability that at least one chosen server is available.
    pub service_level: f64,
}

/// A fog server.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ServerSpec {
    /// Cost of sending one demand unit to this server, paid whether or not
    /// the server turns out to be available.
    pub unit_cost: f64,
    /// Total demand units the server accepts across all users.
    pub capacity: u64,
    /// Probability that the server is present, independent of other servers.
    pub availability: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Instance {
    /// Maximum number of servers a single user may send its demand to.
    pub multicast_bound: usize,
    pub users: Vec<UserSpec>,
    pub servers: Vec<ServerSpec>,
}

impl Instance {
    /// Builds an instance and rejects it unless every invariant holds.
    pub fn new(
        users: Vec<UserSpec>,
        servers: Vec<ServerSpec>,
        multicast_bound: usize,
    ) -> Result<Self, InstanceError> {
        let inst = Instance {
            multicast_bound,
            users,
            servers,
        };
        inst.validated()
    }

    pub fn user_count(&self) -> usize {
        self.users.len()
    }

    pub fn server_count(&self) -> usize {
        self.servers.len()
    }

    pub fn total_demand(&self) -> u64 {
        self.users.iter().map(|u| u.demand).sum()
    }

    pub fn total_capacity(&self) -> u64 {
        self.servers.iter().map(|s| s.capacity).sum()
    }

    pub(crate) fn validated(self) -> Result<Self, InstanceError> {
        let violations = validate(&self);
        if violations.is_empty() {
            Ok(self)
        } else {
            Err(InstanceError::Domain(violations))
        }
    }
}

/// The element of an instance a [`Violation`] refers to.
///
/// Ordering is instance-level first, then users, then servers, each by index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Entity {
    Instance,
    User(usize),
    Server(usize),
}

impl fmt::Display for Entity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Entity::Instance => write!(f, "instance"),
            Entity::User(i) => write!(f, "user {i}"),
            Entity::Server(i) => write!(f, "server {i}"),
        }
    }
}

/// One broken instance invariant.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub entity: Entity,
    pub field: &'static str,
    /// The bound that was violated, phrased as "must ...".
    pub bound: String,
    /// The offending value as it appears in the instance.
    pub value: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {} {} (got {})",
            self.entity, self.field, self.bound, self.value
        )
    }
}

#[derive(Debug, Error)]
pub enum InstanceError {
    #[error("syntax error at `{path}` (line {line}, column {column}): {message}")]
    Syntax {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid instance: {}", join_violations(.0))]
    Domain(Vec<Violation>),
    #[error("invalid 3-partition input: {0}")]
    Reduction(String),
}

fn join_violations(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

const OPEN_UNIT: &str = "must lie strictly in (0,1)";

fn in_open_unit(x: f64) -> bool {
    x > 0.0 && x < 1.0
}

/// Checks every invariant of `inst` and returns the violations sorted by
/// (entity, field). An empty list means the instance is valid.
pub fn validate(inst: &Instance) -> Vec<Violation> {
    let mut out = Vec::new();

    if inst.users.is_empty() {
        out.push(Violation {
            entity: Entity::Instance,
            field: "users",
            bound: "must contain at least one user".into(),
            value: "0 users".into(),
        });
    }
    if inst.servers.is_empty() {
        out.push(Violation {
            entity: Entity::Instance,
            field: "servers",
            bound: "must contain at least one server".into(),
            value: "0 servers".into(),
        });
    }
    if inst.multicast_bound < 1 || inst.multicast_bound > inst.servers.len() {
        out.push(Violation {
            entity: Entity::Instance,
            field: "multicast_bound",
            bound: format!(
                "must lie between 1 and the number of servers ({})",
                inst.servers.len()
            ),
            value: inst.multicast_bound.to_string(),
        });
    }

    for (i, user) in inst.users.iter().enumerate() {
        let entity = Entity::User(i);
        if !(user.budget >= 0.0 && user.budget.is_finite()) {
            out.push(Violation {
                entity,
                field: "budget",
                bound: "must be a finite value >= 0".into(),
                value: user.budget.to_string(),
            });
        }
        if user.demand < 1 {
            out.push(Violation {
                entity,
                field: "demand",
                bound: "must be >= 1".into(),
                value: user.demand.to_string(),
            });
        }
        if !in_open_unit(user.service_level) {
            out.push(Violation {
                entity,
                field: "service_level",
                bound: OPEN_UNIT.into(),
                value: user.service_level.to_string(),
            });
        }
    }

    for (i, server) in inst.servers.iter().enumerate() {
        let entity = Entity::Server(i);
        if !in_open_unit(server.availability) {
            out.push(Violation {
                entity,
                field: "availability",
                bound: OPEN_UNIT.into(),
                value: server.availability.to_string(),
            });
        }
        if !(server.unit_cost >= 0.0 && server.unit_cost.is_finite()) {
            out.push(Violation {
                entity,
                field: "unit_cost",
                bound: "must be a finite value >= 0".into(),
                value: server.unit_cost.to_string(),
            });
        }
    }

    out.sort_by(|a, b| (a.entity, a.field).cmp(&(b.entity, b.field)));
    out
}
