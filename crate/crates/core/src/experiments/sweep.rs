use crate::instance::generate_instance;
use crate::solver::{solve_exact, ExactOptions, SolveStatus};

use super::{ScenarioError, ScenarioSpec};

/// One solved point of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub user_count: usize,
    pub status: SolveStatus,
    pub total_cost: Option<f64>,
    /// `total_cost / sum_u d_u`: cost per requested demand unit, replicas
    /// included in the numerator only.
    pub avg_cost_per_unit: Option<f64>,
    pub nodes: u64,
    /// Seconds.
    pub wall_time: f64,
}

/// One cell of an availability x service-level grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridRow {
    pub availability: f64,
    pub service_level: f64,
    pub row: SweepRow,
}

fn solve_point(
    spec: &ScenarioSpec,
    user_count: usize,
    opts: &ExactOptions,
) -> Result<SweepRow, ScenarioError> {
    let inst = generate_instance(spec, user_count, spec.seed)?;
    let result = solve_exact(&inst, opts);
    let total_cost = match result.status {
        SolveStatus::Optimal | SolveStatus::Feasible => result.objective,
        SolveStatus::Infeasible | SolveStatus::TimedOut => None,
    };
    Ok(SweepRow {
        user_count,
        status: result.status,
        total_cost,
        avg_cost_per_unit: total_cost.map(|c| c / inst.total_demand() as f64),
        nodes: result.stats.nodes_explored,
        wall_time: result.stats.wall_time.as_secs_f64(),
    })
}

/// Solves one generated instance per user count in `spec.user_range`, all
/// drawn with `spec.seed`.
pub fn run_cost_sweep(spec: &ScenarioSpec) -> Result<Vec<SweepRow>, ScenarioError> {
    run_cost_sweep_with(spec, &ExactOptions::default())
}

pub fn run_cost_sweep_with(
    spec: &ScenarioSpec,
    opts: &ExactOptions,
) -> Result<Vec<SweepRow>, ScenarioError> {
    spec.validate()?;
    spec.user_range
        .counts()
        .map(|u| solve_point(spec, u, opts))
        .collect()
}

/// Solves `base` once per (availability, service level) pair, availabilities
/// in the outer loop. Cells whose replication needs exceed the multicast
/// bound or the total capacity come back `Infeasible`.
pub fn run_availability_sweep(
    base: &ScenarioSpec,
    availabilities: &[f64],
    service_levels: &[f64],
    user_count: usize,
) -> Result<Vec<GridRow>, ScenarioError> {
    run_availability_sweep_with(
        base,
        availabilities,
        service_levels,
        user_count,
        &ExactOptions::default(),
    )
}

pub fn run_availability_sweep_with(
    base: &ScenarioSpec,
    availabilities: &[f64],
    service_levels: &[f64],
    user_count: usize,
    opts: &ExactOptions,
) -> Result<Vec<GridRow>, ScenarioError> {
    let mut rows = Vec::with_capacity(availabilities.len() * service_levels.len());
    for &p in availabilities {
        for &l in service_levels {
            let spec = ScenarioSpec {
                availability: p,
                service_level: l,
                ..base.clone()
            };
            spec.validate()?;
            rows.push(GridRow {
                availability: p,
                service_level: l,
                row: solve_point(&spec, user_count, opts)?,
            });
        }
    }
    Ok(rows)
}
