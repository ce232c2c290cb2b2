use super::{Instance, InstanceError, ServerSpec, UserSpec};

/// Availability given to every server, and service level required by every
/// user, in reduced instances. A single server meets the requirement exactly.
pub const REDUCTION_PROBABILITY: f64 = 0.5;

/// Encodes a 3-Partition input as an allocation instance.
///
/// Each integer becomes a user with that demand; there is one zero-cost
/// server of capacity `bound` per triple, and each user may send to exactly
/// one server. With availabilities equal to service levels any single server
/// satisfies a user, so the instance is feasible exactly when the integers
/// can be packed into `len / 3` groups whose sums stay within `bound`.
pub fn reduce_from_3partition(integers: &[u64], bound: u64) -> Result<Instance, InstanceError> {
    if integers.is_empty() || integers.len() % 3 != 0 {
        return Err(InstanceError::Reduction(format!(
            "expected a non-empty multiple of 3 integers, got {}",
            integers.len()
        )));
    }
    if bound == 0 {
        return Err(InstanceError::Reduction("bound must be positive".into()));
    }
    if let Some(&a) = integers.iter().find(|&&a| a == 0 || a > bound) {
        return Err(InstanceError::Reduction(format!(
            "every integer must lie in 1..={bound}, got {a}"
        )));
    }

    let users = integers
        .iter()
        .map(|&demand| UserSpec {
            demand,
            budget: 0.0,
            service_level: REDUCTION_PROBABILITY,
        })
        .collect();
    let servers = vec![
        ServerSpec {
            unit_cost: 0.0,
            capacity: bound,
            availability: REDUCTION_PROBABILITY,
        };
        integers.len() / 3
    ];
    Instance::new(users, servers, 1)
}
