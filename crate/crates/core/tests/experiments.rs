use mfa::experiments::{
    assert_trends, preset, run_cost_sweep, ScenarioFile, SweepOutput, Trend, TrendSpec,
    PRESET_NAMES,
};
use mfa::solver::SolveStatus;

fn without_wall_time(csv: &str) -> Vec<String> {
    csv.lines()
        .map(|l| l.rsplit_once(',').unwrap().0.to_string())
        .collect()
}

#[test]
fn every_preset_passes_its_trends() {
    for name in PRESET_NAMES {
        let file = preset(name).unwrap();
        let out = file.run().unwrap();
        let v = assert_trends(&out, &file.trend_spec());
        assert!(v.is_empty(), "{name}: {v:?}");
    }
}

#[test]
fn sweeps_are_reproducible() {
    for name in ["fig3", "fig4", "fig5"] {
        let file = preset(name).unwrap();
        let a = file.run().unwrap().to_csv();
        let b = file.run().unwrap().to_csv();
        assert_eq!(without_wall_time(&a), without_wall_time(&b), "{name}");
    }
}

#[test]
fn saturated_fixed_sweep_turns_infeasible() {
    let mut file = preset("fig2-fixed").unwrap();
    file.scenario.user_range.from = 248;
    file.scenario.user_range.to = 252;
    let rows = run_cost_sweep(&file.scenario).unwrap();
    let status: Vec<_> = rows.iter().map(|r| (r.user_count, r.status)).collect();
    assert_eq!(
        status,
        vec![
            (248, SolveStatus::Optimal),
            (249, SolveStatus::Optimal),
            (250, SolveStatus::Optimal),
            (251, SolveStatus::Infeasible),
            (252, SolveStatus::Infeasible),
        ]
    );
    let csv = SweepOutput::Cost(rows).to_csv();
    assert!(csv.lines().nth(4).unwrap().starts_with("251,Infeasible,,,"));
}

#[test]
fn corrupted_row_is_reported() {
    let file = preset("fig3").unwrap();
    let SweepOutput::Cost(mut rows) = file.run().unwrap() else {
        panic!("cost sweep expected")
    };
    rows[10].total_cost = Some(rows[9].total_cost.unwrap() - 1.0);
    let v = assert_trends(&SweepOutput::Cost(rows), &file.trend_spec());
    assert!(v
        .iter()
        .any(|v| v.trend == Trend::NondecreasingTotal && v.rows == (9, 10)));
}

#[test]
fn average_cost_rises_once_cheap_servers_fill() {
    let SweepOutput::Cost(rows) = preset("fig4").unwrap().run().unwrap() else {
        panic!()
    };
    let first = rows[0].avg_cost_per_unit.unwrap();
    let last = rows.last().unwrap().avg_cost_per_unit.unwrap();
    // one server holds 25 users; the first 25 all pay the cheapest rate
    assert!(rows[..25]
        .iter()
        .all(|r| r.avg_cost_per_unit == Some(first)));
    assert!(last > first);
}

#[test]
fn scenario_files_round_trip() {
    for name in PRESET_NAMES {
        let file = preset(name).unwrap();
        assert_eq!(ScenarioFile::parse(&file.to_json()).unwrap(), file);
    }
}

#[test]
fn feasible_after_infeasible_is_reported() {
    let mut file = preset("fig2-fixed").unwrap();
    file.scenario.user_range.from = 249;
    file.scenario.user_range.to = 252;
    let SweepOutput::Cost(mut rows) = file.run().unwrap() else {
        panic!()
    };
    assert!(assert_trends(&SweepOutput::Cost(rows.clone()), &file.trend_spec()).is_empty());
    rows[3] = rows[1].clone();
    rows[3].user_count = 252;
    let v = assert_trends(
        &SweepOutput::Cost(rows),
        &TrendSpec::for_scenario(&file.scenario),
    );
    assert!(
        v.iter()
            .any(|v| v.trend == Trend::NondecreasingTotal && v.rows == (2, 3)),
        "{v:?}"
    );
}
