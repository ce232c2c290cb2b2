use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::{Instance, ServerSpec, UserSpec};
use crate::experiments::{BudgetPolicy, CostModel, ScenarioError, ScenarioSpec};

/// Draws an instance with `user_count` users from `spec`.
///
/// The stream is ChaCha8 seeded with `seed` through `seed_from_u64`, so the
/// output is identical on every platform. Server costs are the only random
/// draws and are taken first, in server order; instances generated with the
/// same `seed` but different `user_count` therefore share their servers.
pub fn generate_instance(
    spec: &ScenarioSpec,
    user_count: usize,
    seed: u64,
) -> Result<Instance, ScenarioError> {
    spec.validate()?;
    if user_count < 1 {
        return Err(ScenarioError::Invalid("user_count must be >= 1".into()));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let costs: Vec<f64> = match spec.cost_model {
        CostModel::Fixed { value } => vec![value; spec.server_count],
        CostModel::UniformInt { lo, hi } => (0..spec.server_count)
            .map(|_| rng.gen_range(lo..=hi) as f64)
            .collect(),
        CostModel::Normal { mean, std_dev } => {
            let normal = Normal::new(mean, std_dev)
                .map_err(|e| ScenarioError::Invalid(format!("normal cost model: {e}")))?;
            (0..spec.server_count)
                .map(|_| loop {
                    let w = normal.sample(&mut rng);
                    if w > 0.0 {
                        break w;
                    }
                })
                .collect()
        }
    };

    let max_cost = costs.iter().copied().fold(0.0, f64::max);
    let budget = match spec.budget_policy {
        BudgetPolicy::NonBinding => spec.demand as f64 * spec.multicast_bound as f64 * max_cost,
        BudgetPolicy::Explicit(b) => b,
    };

    let servers = costs
        .into_iter()
        .map(|unit_cost| ServerSpec {
            unit_cost,
            capacity: spec.server_capacity,
            availability: spec.availability,
        })
        .collect();
    let users = vec![
        UserSpec {
            demand: spec.demand,
            budget,
            service_level: spec.service_level,
        };
        user_count
    ];

    Instance::new(users, servers, spec.multicast_bound)
        .map_err(|e| ScenarioError::Invalid(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::UserRange;
    use proptest::prelude::*;

    fn spec(cost_model: CostModel) -> ScenarioSpec {
        ScenarioSpec {
            server_count: 10,
            server_capacity: 50,
            demand: 2,
            cost_model,
            availability: 0.95,
            service_level: 0.9,
            multicast_bound: 3,
            budget_policy: BudgetPolicy::NonBinding,
            user_range: UserRange {
                from: 1,
                to: 50,
                step: 1,
            },
            seed: 42,
        }
    }

    #[test]
    fn fixed_cost_is_homogeneous() {
        let inst = generate_instance(&spec(CostModel::Fixed { value: 10.0 }), 7, 1).unwrap();
        assert_eq!(inst.server_count(), 10);
        assert_eq!(inst.user_count(), 7);
        assert!(inst
            .servers
            .iter()
            .all(|s| s.unit_cost == 10.0 && s.capacity == 50));
        assert!(inst.users.iter().all(|u| u.demand == 2));
        // non-binding: d * M * max w
        assert!(inst.users.iter().all(|u| u.budget == 60.0));
    }

    #[test]
    fn same_seed_same_instance() {
        let s = spec(CostModel::Normal {
            mean: 10.0,
            std_dev: 3.0,
        });
        assert_eq!(
            generate_instance(&s, 5, 9).unwrap(),
            generate_instance(&s, 5, 9).unwrap()
        );
        assert_ne!(
            generate_instance(&s, 5, 9).unwrap(),
            generate_instance(&s, 5, 10).unwrap()
        );
    }

    #[test]
    fn servers_do_not_depend_on_user_count() {
        let s = spec(CostModel::UniformInt { lo: 1, hi: 19 });
        let a = generate_instance(&s, 1, 3).unwrap();
        let b = generate_instance(&s, 40, 3).unwrap();
        assert_eq!(a.servers, b.servers);
    }

    #[test]
    fn invalid_parameters_are_rejected() {
        for model in [
            CostModel::Fixed { value: -1.0 },
            CostModel::UniformInt { lo: 5, hi: 4 },
            CostModel::Normal {
                mean: 10.0,
                std_dev: -0.5,
            },
        ] {
            assert!(generate_instance(&spec(model), 3, 0).is_err());
        }
        assert!(generate_instance(&spec(CostModel::Fixed { value: 1.0 }), 0, 0).is_err());
    }

    #[test]
    fn explicit_budget_is_copied() {
        let mut s = spec(CostModel::Fixed { value: 10.0 });
        s.budget_policy = BudgetPolicy::Explicit(5.0);
        let inst = generate_instance(&s, 2, 0).unwrap();
        assert!(inst.users.iter().all(|u| u.budget == 5.0));
    }

    proptest! {
        #[test]
        fn uniform_costs_stay_in_range(seed in any::<u64>(), lo in 0i64..20, width in 0i64..20) {
            let hi = lo + width;
            let inst = generate_instance(&spec(CostModel::UniformInt { lo, hi }), 1, seed).unwrap();
            for s in &inst.servers {
                prop_assert!(s.unit_cost.fract() == 0.0);
                prop_assert!(s.unit_cost >= lo as f64 && s.unit_cost <= hi as f64);
            }
        }

        #[test]
        fn normal_costs_are_positive(seed in any::<u64>(), sigma in 0.0f64..20.0) {
            let model = CostModel::Normal { mean: 10.0, std_dev: sigma };
            let inst = generate_instance(&spec(model), 1, seed).unwrap();
            prop_assert!(inst.servers.iter().all(|s| s.unit_cost > 0.0));
        }
    }
}
