//! Parametric sweeps over generated instances.
//!
//! A [`ScenarioFile`] pairs a [`ScenarioSpec`] with an optional
//! availability x service-level grid. Without a grid it runs as a cost sweep
//! over `user_range`; with one, as a grid at a fixed user count. Either way
//! the output renders to CSV and can be checked against the trends the
//! scenario implies.

mod csv;
mod scenario;
mod sweep;
mod trends;

use serde::{Deserialize, Serialize};

use crate::solver::ExactOptions;

pub use csv::{emit_csv, emit_grid_csv, sig6, GRID_HEADER, SWEEP_HEADER};
pub use scenario::{BudgetPolicy, CostModel, ScenarioError, ScenarioSpec, UserRange};
pub use sweep::{
    run_availability_sweep, run_availability_sweep_with, run_cost_sweep, run_cost_sweep_with,
    GridRow, SweepRow,
};
pub use trends::{assert_trends, Trend, TrendSpec, TrendViolation};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridAxes {
    pub availabilities: Vec<f64>,
    pub service_levels: Vec<f64>,
    pub user_count: usize,
}

/// On-disk experiment description: `{"scenario": {...}, "grid": {...}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub scenario: ScenarioSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridAxes>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SweepOutput {
    Cost(Vec<SweepRow>),
    Grid(Vec<GridRow>),
}

impl SweepOutput {
    pub fn to_csv(&self) -> String {
        match self {
            SweepOutput::Cost(rows) => emit_csv(rows),
            SweepOutput::Grid(rows) => emit_grid_csv(rows),
        }
    }
}

impl ScenarioFile {
    pub fn parse(text: &str) -> Result<Self, ScenarioError> {
        let mut de = serde_json::Deserializer::from_str(text);
        let file: ScenarioFile =
            serde_path_to_error::deserialize(&mut de).map_err(|e| ScenarioError::Syntax {
                path: e.path().to_string(),
                message: e.inner().to_string(),
            })?;
        de.end().map_err(|e| ScenarioError::Syntax {
            path: ".".into(),
            message: e.to_string(),
        })?;
        file.validate()?;
        Ok(file)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("scenario is serializable");
        s.push('\n');
        s
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        self.scenario.validate()?;
        if let Some(grid) = &self.grid {
            if grid.availabilities.is_empty() || grid.service_levels.is_empty() {
                return Err(ScenarioError::Invalid("grid axes must not be empty".into()));
            }
            if grid.user_count < 1 {
                return Err(ScenarioError::Invalid(
                    "grid user_count must be >= 1".into(),
                ));
            }
            for &x in grid.availabilities.iter().chain(&grid.service_levels) {
                if !(x > 0.0 && x < 1.0) {
                    return Err(ScenarioError::Invalid(format!(
                        "grid values must lie strictly in (0,1), got {x}"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.scenario.seed = seed;
        self
    }

    pub fn run(&self) -> Result<SweepOutput, ScenarioError> {
        self.run_with(&ExactOptions::default())
    }

    pub fn run_with(&self, opts: &ExactOptions) -> Result<SweepOutput, ScenarioError> {
        self.validate()?;
        match &self.grid {
            None => run_cost_sweep_with(&self.scenario, opts).map(SweepOutput::Cost),
            Some(g) => run_availability_sweep_with(
                &self.scenario,
                &g.availabilities,
                &g.service_levels,
                g.user_count,
                opts,
            )
            .map(SweepOutput::Grid),
        }
    }

    /// Trends every run of this file must satisfy.
    pub fn trend_spec(&self) -> TrendSpec {
        match self.grid {
            Some(_) => TrendSpec::grid(),
            None => TrendSpec::for_scenario(&self.scenario),
        }
    }
}

/// Preset names accepted by [`preset`]. `fig2`..`fig5` name experiments;
/// the longer names are the underlying scenarios.
pub const PRESET_NAMES: &[&str] = &[
    "fig2",
    "fig3",
    "fig4",
    "fig5",
    "fig2-fixed",
    "fig2-uniform",
    "fig2-normal1",
    "fig2-normal3",
];

/// Built-in scenario files.
///
/// * `fig2` / `fig2-fixed`: 10 servers of 50 units, demand 2, unit cost 10.
/// * `fig3` / `fig2-uniform`: same servers, integer costs uniform in 1..=19.
/// * `fig4` / `fig2-normal3`: costs normal with mean 10, deviation 3.
/// * `fig2-normal1`: costs normal with mean 10, deviation 1.
/// * `fig5`: 30 servers of 50 units, unit cost 10, 125 users, availability
///   x service-level grid.
///
/// Cost sweeps use availability 0.95, service level 0.9, users 1..=50 and
/// seed 42.
pub fn preset(name: &str) -> Option<ScenarioFile> {
    let text = match name {
        "fig2" | "fig2-fixed" => include_str!("../../presets/fig2-fixed.json"),
        "fig3" | "fig2-uniform" => include_str!("../../presets/fig2-uniform.json"),
        "fig4" | "fig2-normal3" => include_str!("../../presets/fig2-normal3.json"),
        "fig2-normal1" => include_str!("../../presets/fig2-normal1.json"),
        "fig5" => include_str!("../../presets/fig5.json"),
        _ => return None,
    };
    Some(ScenarioFile::parse(text).expect("built-in presets are valid"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_preset_parses() {
        for name in PRESET_NAMES {
            let file = preset(name).unwrap();
            assert_eq!(file.scenario.seed, 42);
        }
        assert!(preset("fig9").is_none());
    }

    #[test]
    fn fixed_preset_has_linear_trend() {
        let spec = preset("fig2").unwrap().trend_spec();
        assert_eq!(spec.linear_per_user, Some(20.0));
        assert!(preset("fig3")
            .unwrap()
            .trend_spec()
            .linear_per_user
            .is_none());
        assert!(preset("fig5").unwrap().trend_spec().grid_monotone);
    }

    #[test]
    fn scenario_file_round_trip_and_errors() {
        let file = preset("fig5").unwrap();
        assert_eq!(ScenarioFile::parse(&file.to_json()).unwrap(), file);

        let err = ScenarioFile::parse(r#"{"scenario": {"server_count": 3}}"#).unwrap_err();
        assert!(matches!(err, ScenarioError::Syntax { .. }), "{err}");

        let mut bad = preset("fig2").unwrap();
        bad.scenario.availability = 1.5;
        assert!(matches!(
            ScenarioFile::parse(&bad.to_json()),
            Err(ScenarioError::Invalid(_))
        ));
        assert!(ScenarioFile::parse("{ not json").is_err());
    }

    #[test]
    fn seed_override() {
        assert_eq!(preset("fig3").unwrap().with_seed(7).scenario.seed, 7);
    }
}
