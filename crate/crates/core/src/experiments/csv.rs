use std::fmt::Write;

use super::{GridRow, SweepRow};

pub const SWEEP_HEADER: &str = "user_count,status,total_cost,avg_cost_per_unit,nodes,wall_time";
pub const GRID_HEADER: &str =
    "availability,service_level,user_count,status,total_cost,avg_cost_per_unit,nodes,wall_time";

/// Renders a cost sweep; absent values become empty fields.
pub fn emit_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(SWEEP_HEADER);
    out.push('\n');
    for r in rows {
        write_row(&mut out, r);
    }
    out
}

/// Renders a grid sweep with the two axis columns in front.
pub fn emit_grid_csv(rows: &[GridRow]) -> String {
    let mut out = String::from(GRID_HEADER);
    out.push('\n');
    for g in rows {
        let _ = write!(out, "{},{},", sig6(g.availability), sig6(g.service_level));
        write_row(&mut out, &g.row);
    }
    out
}

fn write_row(out: &mut String, r: &SweepRow) {
    let opt = |x: Option<f64>| x.map(sig6).unwrap_or_default();
    let _ = writeln!(
        out,
        "{},{},{},{},{},{}",
        r.user_count,
        r.status,
        opt(r.total_cost),
        opt(r.avg_cost_per_unit),
        r.nodes,
        sig6(r.wall_time)
    );
}

/// Six significant digits, trailing zeros kept (`100` -> `100.000`).
/// Magnitudes outside `[1e-5, 1e6)` switch to exponent notation.
pub fn sig6(x: f64) -> String {
    if x == 0.0 {
        return "0.00000".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    // let the formatter do the rounding, then read the decimal exponent back
    let sci = format!("{x:.5e}");
    let exp: i32 = sci[sci.find('e').unwrap() + 1..].parse().unwrap();
    if (-5..6).contains(&exp) {
        let decimals = (5 - exp) as usize;
        format!("{x:.decimals$}")
    } else {
        sci
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::SolveStatus;

    #[test]
    fn significant_digits() {
        assert_eq!(sig6(100.0), "100.000");
        assert_eq!(sig6(10.0), "10.0000");
        assert_eq!(sig6(0.5), "0.500000");
        assert_eq!(sig6(99.99999), "100.000");
        assert_eq!(sig6(123456.7), "123457");
        assert_eq!(sig6(1234567.0), "1.23457e6");
        assert_eq!(sig6(0.000012345), "0.0000123450");
        assert_eq!(sig6(0.0), "0.00000");
        assert_eq!(sig6(-2.5), "-2.50000");
    }

    #[test]
    fn empty_sweep_is_header_only() {
        assert_eq!(emit_csv(&[]), format!("{SWEEP_HEADER}\n"));
    }

    #[test]
    fn feasible_and_infeasible_rows() {
        let rows = [
            SweepRow {
                user_count: 5,
                status: SolveStatus::Optimal,
                total_cost: Some(100.0),
                avg_cost_per_unit: Some(10.0),
                nodes: 5,
                wall_time: 0.25,
            },
            SweepRow {
                user_count: 250,
                status: SolveStatus::Infeasible,
                total_cost: None,
                avg_cost_per_unit: None,
                nodes: 0,
                wall_time: 0.001,
            },
        ];
        let csv = emit_csv(&rows);
        let lines: Vec<_> = csv.lines().collect();
        assert_eq!(lines[1], "5,Optimal,100.000,10.0000,5,0.250000");
        assert_eq!(lines[2], "250,Infeasible,,,0,0.00100000");
    }

    #[test]
    fn grid_prefixes_axes() {
        let rows = [GridRow {
            availability: 0.5,
            service_level: 0.9,
            row: SweepRow {
                user_count: 10,
                status: SolveStatus::Optimal,
                total_cost: Some(800.0),
                avg_cost_per_unit: Some(40.0),
                nodes: 10,
                wall_time: 0.0,
            },
        }];
        let csv = emit_grid_csv(&rows);
        assert!(csv.starts_with("availability,service_level,user_count,"));
        assert_eq!(
            csv.lines().nth(1).unwrap(),
            "0.500000,0.900000,10,Optimal,800.000,40.0000,10,0.00000"
        );
    }
}
