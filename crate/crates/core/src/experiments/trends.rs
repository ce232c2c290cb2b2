use std::fmt;

use crate::model::{min_replicas, EPSILON};
use crate::solver::SolveStatus;

use super::{BudgetPolicy, CostModel, GridRow, ScenarioSpec, SweepOutput, SweepRow};

/// Which properties [`assert_trends`] checks.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrendSpec {
    /// Total cost never drops as users are added.
    pub nondecreasing_total: bool,
    /// Cost per demand unit never drops as users are added.
    pub nondecreasing_average: bool,
    /// Every feasible row costs exactly `user_count * per_user`.
    pub linear_per_user: Option<f64>,
    /// Grid cells: cost nonincreasing in availability at fixed service level,
    /// nondecreasing in service level at fixed availability (infeasible cells
    /// count as infinitely expensive).
    pub grid_monotone: bool,
}

impl TrendSpec {
    /// The properties that must hold for sweeps of `spec`.
    ///
    /// Adding a user never makes the optimum cheaper, and because all users
    /// are identical the optimum is convex in the user count, so both the
    /// total and the average are monotone. With a fixed unit cost and
    /// non-binding budgets every user pays `d * w * k`, where `k` is the
    /// replica count for the scenario's availability and service level.
    pub fn for_scenario(spec: &ScenarioSpec) -> Self {
        let linear_per_user = match (spec.cost_model.clone(), spec.budget_policy) {
            (CostModel::Fixed { value }, BudgetPolicy::NonBinding) => {
                min_replicas(spec.availability, spec.service_level)
                    .filter(|&k| k as usize <= spec.multicast_bound)
                    .map(|k| spec.demand as f64 * value * k as f64)
            }
            _ => None,
        };
        TrendSpec {
            nondecreasing_total: true,
            nondecreasing_average: true,
            linear_per_user,
            grid_monotone: false,
        }
    }

    pub fn grid() -> Self {
        TrendSpec {
            grid_monotone: true,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Trend {
    NondecreasingTotal,
    NondecreasingAverage,
    Linear,
    NonincreasingInAvailability,
    NondecreasingInServiceLevel,
}

impl fmt::Display for Trend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Trend::NondecreasingTotal => "total cost nondecreasing in users",
            Trend::NondecreasingAverage => "average cost nondecreasing in users",
            Trend::Linear => "total cost linear in users",
            Trend::NonincreasingInAvailability => "cost nonincreasing in availability",
            Trend::NondecreasingInServiceLevel => "cost nondecreasing in service level",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrendViolation {
    pub trend: Trend,
    /// Indices into the sweep output of the offending pair (equal for
    /// single-row properties).
    pub rows: (usize, usize),
    pub detail: String,
}

impl fmt::Display for TrendViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (a, b) = self.rows;
        if a == b {
            write!(f, "{}: row {}: {}", self.trend, a, self.detail)
        } else {
            write!(f, "{}: rows {} -> {}: {}", self.trend, a, b, self.detail)
        }
    }
}

fn tol(x: f64) -> f64 {
    EPSILON * x.abs().max(1.0)
}

/// Checks the properties enabled in `spec` and lists every violation.
pub fn assert_trends(output: &SweepOutput, spec: &TrendSpec) -> Vec<TrendViolation> {
    match output {
        SweepOutput::Cost(rows) => cost_trends(rows, spec),
        SweepOutput::Grid(rows) if spec.grid_monotone => grid_trends(rows),
        SweepOutput::Grid(_) => Vec::new(),
    }
}

fn cost_trends(rows: &[SweepRow], spec: &TrendSpec) -> Vec<TrendViolation> {
    let mut out = Vec::new();
    let feasible: Vec<(usize, &SweepRow, f64, f64)> = rows
        .iter()
        .enumerate()
        .filter_map(|(i, r)| Some((i, r, r.total_cost?, r.avg_cost_per_unit?)))
        .collect();

    for pair in feasible.windows(2) {
        let (i, a, a_total, a_avg) = pair[0];
        let (j, b, b_total, b_avg) = pair[1];
        if b.user_count < a.user_count {
            continue;
        }
        if spec.nondecreasing_total && b_total < a_total - tol(a_total) {
            out.push(TrendViolation {
                trend: Trend::NondecreasingTotal,
                rows: (i, j),
                detail: format!(
                    "U={} costs {a_total} but U={} costs {b_total}",
                    a.user_count, b.user_count
                ),
            });
        }
        if spec.nondecreasing_average && b_avg < a_avg - tol(a_avg) {
            out.push(TrendViolation {
                trend: Trend::NondecreasingAverage,
                rows: (i, j),
                detail: format!(
                    "U={} averages {a_avg} but U={} averages {b_avg}",
                    a.user_count, b.user_count
                ),
            });
        }
    }

    // an infeasible row counts as infinitely expensive
    if spec.nondecreasing_total {
        let first_infeasible = rows
            .iter()
            .position(|r| r.status == SolveStatus::Infeasible);
        if let Some(i) = first_infeasible {
            for &(j, r, total, _) in &feasible {
                if j > i && r.user_count >= rows[i].user_count {
                    out.push(TrendViolation {
                        trend: Trend::NondecreasingTotal,
                        rows: (i, j),
                        detail: format!(
                            "U={} is infeasible but U={} costs {total}",
                            rows[i].user_count, r.user_count
                        ),
                    });
                }
            }
        }
    }

    if let Some(per_user) = spec.linear_per_user {
        for &(i, r, total, _) in &feasible {
            let expected = r.user_count as f64 * per_user;
            if (total - expected).abs() > tol(expected) {
                out.push(TrendViolation {
                    trend: Trend::Linear,
                    rows: (i, i),
                    detail: format!("U={} costs {total}, expected {expected}", r.user_count),
                });
            }
        }
    }
    out
}

fn grid_cost(row: &GridRow) -> Option<f64> {
    match row.row.status {
        SolveStatus::TimedOut => None,
        SolveStatus::Infeasible => Some(f64::INFINITY),
        SolveStatus::Optimal | SolveStatus::Feasible => row.row.total_cost,
    }
}

fn grid_trends(rows: &[GridRow]) -> Vec<TrendViolation> {
    let mut out = Vec::new();
    // cells sharing one coordinate, ordered along the other
    let mut check = |trend: Trend,
                     same: fn(&GridRow) -> f64,
                     along: fn(&GridRow) -> f64,
                     increasing_cost: bool| {
        let mut idx: Vec<usize> = (0..rows.len()).collect();
        idx.sort_by(|&a, &b| {
            same(&rows[a])
                .total_cmp(&same(&rows[b]))
                .then(along(&rows[a]).total_cmp(&along(&rows[b])))
                .then(a.cmp(&b))
        });
        for w in idx.windows(2) {
            let (i, j) = (w[0], w[1]);
            if same(&rows[i]) != same(&rows[j]) {
                continue;
            }
            let (Some(ci), Some(cj)) = (grid_cost(&rows[i]), grid_cost(&rows[j])) else {
                continue;
            };
            let bad = if increasing_cost {
                cj < ci - tol(ci)
            } else {
                cj > ci + tol(ci)
            };
            if bad {
                out.push(TrendViolation {
                    trend,
                    rows: (i, j),
                    detail: format!(
                        "(p={}, l={}) costs {ci} but (p={}, l={}) costs {cj}",
                        rows[i].availability,
                        rows[i].service_level,
                        rows[j].availability,
                        rows[j].service_level
                    ),
                });
            }
        }
    };
    check(
        Trend::NonincreasingInAvailability,
        |r| r.service_level,
        |r| r.availability,
        false,
    );
    check(
        Trend::NondecreasingInServiceLevel,
        |r| r.availability,
        |r| r.service_level,
        true,
    );
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(u: usize, cost: Option<f64>) -> SweepRow {
        SweepRow {
            user_count: u,
            status: if cost.is_some() {
                SolveStatus::Optimal
            } else {
                SolveStatus::Infeasible
            },
            total_cost: cost,
            avg_cost_per_unit: cost.map(|c| c / (2 * u) as f64),
            nodes: 0,
            wall_time: 0.0,
        }
    }

    fn cell(p: f64, l: f64, cost: Option<f64>) -> GridRow {
        GridRow {
            availability: p,
            service_level: l,
            row: row(10, cost),
        }
    }

    #[test]
    fn linear_sweep_passes() {
        let rows: Vec<_> = (1..=5).map(|u| row(u, Some(20.0 * u as f64))).collect();
        let spec = TrendSpec {
            nondecreasing_total: true,
            nondecreasing_average: true,
            linear_per_user: Some(20.0),
            grid_monotone: false,
        };
        assert!(assert_trends(&SweepOutput::Cost(rows), &spec).is_empty());
    }

    #[test]
    fn injected_decrease_names_the_pair() {
        let mut rows: Vec<_> = (1..=5).map(|u| row(u, Some(20.0 * u as f64))).collect();
        rows[3].total_cost = Some(50.0);
        rows[3].avg_cost_per_unit = Some(50.0 / 8.0);
        let spec = TrendSpec {
            nondecreasing_total: true,
            ..Default::default()
        };
        let v = assert_trends(&SweepOutput::Cost(rows), &spec);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].trend, Trend::NondecreasingTotal);
        assert_eq!(v[0].rows, (2, 3));
        assert!(v[0].to_string().contains("rows 2 -> 3"));
    }

    #[test]
    fn infeasible_tail_passes_but_recovery_does_not() {
        let spec = TrendSpec {
            nondecreasing_total: true,
            linear_per_user: Some(20.0),
            ..Default::default()
        };
        let tail = vec![row(1, Some(20.0)), row(2, Some(40.0)), row(3, None)];
        assert!(assert_trends(&SweepOutput::Cost(tail), &spec).is_empty());

        let gap = vec![row(1, Some(20.0)), row(2, None), row(3, Some(60.0))];
        let v = assert_trends(&SweepOutput::Cost(gap), &spec);
        assert_eq!(v.len(), 1, "{v:?}");
        assert_eq!(v[0].rows, (1, 2));
        assert!(v[0].to_string().contains("U=2 is infeasible"));
    }

    #[test]
    fn linearity_violation() {
        let rows = vec![row(1, Some(20.0)), row(2, Some(41.0))];
        let spec = TrendSpec {
            linear_per_user: Some(20.0),
            ..Default::default()
        };
        let v = assert_trends(&SweepOutput::Cost(rows), &spec);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].rows, (1, 1));
    }

    #[test]
    fn grid_monotonicity() {
        let good = vec![
            cell(0.5, 0.5, Some(200.0)),
            cell(0.5, 0.9, Some(800.0)),
            cell(0.5, 0.99, None),
            cell(0.9, 0.5, Some(200.0)),
            cell(0.9, 0.9, Some(200.0)),
            cell(0.9, 0.99, Some(400.0)),
        ];
        assert!(assert_trends(&SweepOutput::Grid(good.clone()), &TrendSpec::grid()).is_empty());

        let mut bad = good;
        bad[4].row.total_cost = Some(900.0);
        let v = assert_trends(&SweepOutput::Grid(bad), &TrendSpec::grid());
        let trends: Vec<_> = v.iter().map(|v| (v.trend, v.rows)).collect();
        assert_eq!(
            trends,
            vec![
                (Trend::NonincreasingInAvailability, (1, 4)),
                (Trend::NondecreasingInServiceLevel, (4, 5)),
            ]
        );
    }

    #[test]
    fn infeasible_cell_at_higher_availability_is_flagged() {
        let rows = vec![cell(0.5, 0.9, Some(800.0)), cell(0.9, 0.9, None)];
        let v = assert_trends(&SweepOutput::Grid(rows), &TrendSpec::grid());
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].trend, Trend::NonincreasingInAvailability);
    }
}
