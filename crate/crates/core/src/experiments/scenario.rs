use serde::{Deserialize, Serialize};
use thiserror::Error;

/// How server unit costs are drawn.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CostModel {
    /// Every server costs `value`.
    Fixed { value: f64 },
    /// Independent integer draws in `lo..=hi`.
    UniformInt { lo: i64, hi: i64 },
    /// Independent Gaussian draws, redrawn until strictly positive.
    Normal { mean: f64, std_dev: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum BudgetPolicy {
    /// `B_u = d_u * M * max_s w_s`: every user can afford any subset of
    /// at most `M` servers, so budgets never bind.
    #[default]
    NonBinding,
    /// The same explicit budget for every user.
    Explicit(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UserRange {
    pub from: usize,
    pub to: usize,
    pub step: usize,
}

impl UserRange {
    pub fn counts(&self) -> impl Iterator<Item = usize> {
        (self.from..=self.to).step_by(self.step.max(1))
    }
}

/// A parametric description of a family of homogeneous instances.
///
/// Only server costs are random; everything else is set uniformly across
/// users or servers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSpec {
    pub server_count: usize,
    pub server_capacity: u64,
    pub demand: u64,
    pub cost_model: CostModel,
    pub availability: f64,
    pub service_level: f64,
    pub multicast_bound: usize,
    #[serde(default)]
    pub budget_policy: BudgetPolicy,
    pub user_range: UserRange,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScenarioError {
    #[error("invalid scenario: {0}")]
    Invalid(String),
    #[error("malformed scenario file at `{path}`: {message}")]
    Syntax { path: String, message: String },
}

impl ScenarioSpec {
    pub fn validate(&self) -> Result<(), ScenarioError> {
        let bad = |msg: String| Err(ScenarioError::Invalid(msg));
        if self.server_count < 1 {
            return bad("server_count must be >= 1".into());
        }
        if self.demand < 1 {
            return bad("demand must be >= 1".into());
        }
        if self.multicast_bound < 1 || self.multicast_bound > self.server_count {
            return bad(format!(
                "multicast_bound must lie between 1 and server_count ({}), got {}",
                self.server_count, self.multicast_bound
            ));
        }
        for (name, x) in [
            ("availability", self.availability),
            ("service_level", self.service_level),
        ] {
            if !(x > 0.0 && x < 1.0) {
                return bad(format!("{name} must lie strictly in (0,1), got {x}"));
            }
        }
        match self.cost_model {
            CostModel::Fixed { value } if !(value >= 0.0 && value.is_finite()) => {
                return bad(format!("fixed cost must be >= 0, got {value}"));
            }
            CostModel::UniformInt { lo, hi } if lo > hi => {
                return bad(format!(
                    "uniform_int requires lo <= hi, got lo={lo} hi={hi}"
                ));
            }
            CostModel::UniformInt { lo, .. } if lo < 0 => {
                return bad(format!("uniform_int requires lo >= 0, got {lo}"));
            }
            CostModel::Normal { std_dev, .. } if !(std_dev >= 0.0 && std_dev.is_finite()) => {
                return bad(format!("normal requires std_dev >= 0, got {std_dev}"));
            }
            CostModel::Normal { mean, .. } if !(mean > 0.0 && mean.is_finite()) => {
                return bad(format!("normal requires mean > 0, got {mean}"));
            }
            _ => {}
        }
        if let BudgetPolicy::Explicit(b) = self.budget_policy {
            if !(b >= 0.0 && b.is_finite()) {
                return bad(format!("explicit budget must be >= 0, got {b}"));
            }
        }
        let r = self.user_range;
        if r.step < 1 || r.from < 1 || r.from > r.to {
            return bad(format!(
                "user_range must satisfy 1 <= from <= to and step >= 1, got {}..={} step {}",
                r.from, r.to, r.step
            ));
        }
        Ok(())
    }
}
