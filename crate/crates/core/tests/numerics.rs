mod common;

use approx::{assert_abs_diff_eq, assert_relative_eq};
use ptscatter::analysis::{
    detect_anomalies, find_critical_v2, handedness_summary, linspace, sweep,
    transmission_anomalous, Backend, Column, Handedness, DEFAULT_EPS,
};
use ptscatter::analytic;
use ptscatter::engine::{
    absorption_integral, solve_scattering, step_halving, NumericOptions, Propagator,
};
use ptscatter::{Model, PotentialSpec, ScatterError, Side};

fn opts() -> NumericOptions {
    NumericOptions::default()
}

#[test]
fn engine_matches_closed_forms() {
    let scarf = PotentialSpec::scarf(4.0, 2.0, 1.0).unwrap();
    let s = solve_scattering(&scarf, 2.0, Side::Left, &opts()).unwrap();
    let c = analytic::scarf_coefficients(&scarf, 2.0).unwrap();
    assert_relative_eq!(s.transmission(), c.transmission, max_relative = 1e-4);
    assert_relative_eq!(s.reflection(), c.reflection_left, max_relative = 1e-4);

    let rect = PotentialSpec::rect(2.0, 1.0, 1.0, -1, 1).unwrap();
    let s = solve_scattering(&rect, 1.0, Side::Left, &opts()).unwrap();
    assert_abs_diff_eq!(
        s.reflection(),
        analytic::rect_reflection(&rect, 1.0, Side::Left).unwrap(),
        epsilon = 1e-6
    );
}

#[test]
fn engine_matches_oracle_on_intractable_models() {
    for (model, v1, v2) in [
        (Model::RationalOdd, 4.0, 7.5),
        (Model::ExpLinear, 4.0, 8.0),
        (Model::ExpLinear, 5.0, 4.0),
    ] {
        let spec = PotentialSpec::pt_symmetric(model, v1, v2, 1.0).unwrap();
        for side in [Side::Left, Side::Right] {
            let p = Propagator::new(&spec, side, &opts()).unwrap();
            for e in [0.4, 3.0, 8.0] {
                let (r, t) = p.amplitudes(e).unwrap();
                let (r_o, t_o) = common::transfer_matrix_from(&spec, side, e, p.half_width(), 1e-4);
                assert_relative_eq!(t.norm_sqr(), t_o, max_relative = 1e-6);
                assert_relative_eq!(r.norm_sqr(), r_o, max_relative = 1e-6);
            }
        }
    }
}

// The left-incidence transmission of rational_odd (4, 7.5) exceeds 1 at high
// energy; two independent routes agree on it.
#[test]
fn rational_odd_left_transmission_exceeds_one_at_high_energy() {
    let spec = PotentialSpec::rational_odd(4.0, 7.5, 1.0).unwrap();
    let p = Propagator::new(&spec, Side::Left, &opts()).unwrap();
    let (_, t) = p.amplitudes(10.0).unwrap();
    let (_, t_o) = common::transfer_matrix(&spec, 10.0, p.half_width(), 1e-4);
    assert!(t.norm_sqr() > 1.0 && t_o > 1.0, "{} {t_o}", t.norm_sqr());
}

#[test]
fn absorption_integral_balances() {
    let spec = PotentialSpec::scarf(4.0, 2.0, 1.0).unwrap();
    let s = solve_scattering(&spec, 2.0, Side::Left, &opts()).unwrap();
    assert_abs_diff_eq!(
        absorption_integral(&spec, &s).unwrap(),
        1.0 - s.reflection() - s.transmission(),
        epsilon = 1e-3
    );
    let s = solve_scattering(&spec, 0.5, Side::Right, &opts()).unwrap();
    assert!(s.reflection() > 1.0);
    assert!(absorption_integral(&spec, &s).unwrap() < 0.0);

    let real = PotentialSpec::scarf(4.0, 0.0, 1.0).unwrap();
    let s = solve_scattering(&real, 2.0, Side::Left, &opts()).unwrap();
    assert_eq!(absorption_integral(&real, &s).unwrap(), 0.0);
}

#[test]
fn step_halving_ratios_near_sixteen() {
    let spec = PotentialSpec::scarf(4.0, 2.0, 1.0).unwrap();
    let h = step_halving(&spec, 0.5, Side::Left, &opts().with_step(0.05)).unwrap();
    let (rt, rr) = h.ratios();
    assert!((12.0..20.0).contains(&rt), "{rt}");
    assert!((12.0..20.0).contains(&rr), "{rr}");
    assert_eq!(h.steps, [0.05, 0.025, 0.0125]);
}

#[test]
fn numeric_requests_are_reproducible() {
    let spec = PotentialSpec::exp_linear(5.0, 4.0, 1.0).unwrap();
    let grid = linspace(0.1, 12.0, 40);
    let a = sweep(&spec, &grid, Backend::Numeric, &opts()).unwrap();
    let b = sweep(&spec, &grid, Backend::Numeric, &opts()).unwrap();
    assert_eq!(a.rows, b.rows);
}

#[test]
fn sweep_basics() {
    let spec = PotentialSpec::scarf(4.0, 2.0, 1.0).unwrap();
    for backend in [Backend::Analytic, Backend::Numeric] {
        let table = sweep(&spec, &[1.0], backend, &opts()).unwrap();
        assert_eq!(table.rows.len(), 1);
        assert_eq!(table.rows[0].energy, 1.0);
    }
    let table = sweep(&spec, &linspace(0.1, 12.0, 100), Backend::Analytic, &opts()).unwrap();
    for c in &table.rows {
        assert!(c.reflection_left < c.reflection_right);
        assert!(c.reflection_left <= 1.0);
        assert!(c.transmission > 0.0 && c.transmission < 1.0);
    }
    assert!(matches!(
        sweep(
            &PotentialSpec::exp_linear(5.0, 4.0, 1.0).unwrap(),
            &[1.0],
            Backend::Analytic,
            &opts()
        ),
        Err(ScatterError::NoClosedForm(Model::ExpLinear))
    ));
    assert!(sweep(&spec, &[2.0, 1.0], Backend::Analytic, &opts()).is_err());
}

#[test]
fn anomaly_report_scarf_below_critical() {
    let spec = PotentialSpec::scarf(4.0, 2.0, 1.0).unwrap();
    let table = sweep(&spec, &linspace(0.1, 12.0, 200), Backend::Analytic, &opts()).unwrap();
    let report = detect_anomalies(&table, DEFAULT_EPS);
    let rr = report.intervals(Column::RRight);
    assert!(!rr.is_empty());
    assert_eq!(rr[0].low, 0.1);
    assert!(report.intervals(Column::T).is_empty());
    assert!(report.physical_left);
    assert!(!report.physical_right);
    assert_eq!(report.handedness, Handedness::LeftAbsorptive);
    assert!(handedness_summary(&table).monotone_claim);
}

#[test]
fn anomaly_report_real_potential_is_clean() {
    let grid = linspace(0.1, 12.0, 120);
    for model in Model::ALL {
        let spec = PotentialSpec::pt_symmetric(model, 4.0, 0.0, 1.0).unwrap();
        let table = sweep(&spec, &grid, Backend::preferred(model), &opts()).unwrap();
        let report = detect_anomalies(&table, DEFAULT_EPS);
        assert!(report.is_clean(), "{model}");
        assert_eq!(report.handedness, Handedness::None);
        let summary = handedness_summary(&table);
        assert!(
            summary.min_gap.abs() <= 1e-14 && summary.max_gap.abs() <= 1e-14,
            "{model}"
        );
    }
}

#[test]
fn anomaly_intervals_agree_across_backends() {
    let spec = PotentialSpec::scarf(4.0, 5.0, 1.0).unwrap();
    let grid = linspace(0.1, 12.0, 200);
    let a = detect_anomalies(
        &sweep(&spec, &grid, Backend::Analytic, &opts()).unwrap(),
        DEFAULT_EPS,
    );
    let n = detect_anomalies(
        &sweep(&spec, &grid, Backend::Numeric, &opts()).unwrap(),
        DEFAULT_EPS,
    );
    for column in Column::ALL {
        let (ia, inum) = (a.intervals(column), n.intervals(column));
        assert_eq!(ia.len(), inum.len(), "{column:?}");
        for (x, y) in ia.iter().zip(inum) {
            assert_abs_diff_eq!(x.low, y.low, epsilon = 1e-3);
            assert_abs_diff_eq!(x.high, y.high, epsilon = 1e-3);
        }
    }
    let t = a.intervals(Column::T);
    assert!(t.iter().any(|i| i.low <= 5.0 && i.high >= 3.0));
}

#[test]
fn rect_left_reflection_lower_at_unit_energy() {
    let spec = PotentialSpec::rect(2.0, 1.0, 1.0, -1, 1).unwrap();
    let (c, _) = ptscatter::engine::coefficients_numeric(&spec, 1.0, &opts()).unwrap();
    assert!(c.reflection_left < c.reflection_right);
}

#[test]
fn critical_search_brackets_the_onset() {
    let grid = linspace(0.8, 12.0, 200);
    let r = find_critical_v2(
        Model::RationalOdd,
        4.0,
        1.0,
        (6.0, 9.0),
        &grid,
        0.05,
        &opts(),
    )
    .unwrap();
    assert!(r.bracket.1 - r.bracket.0 <= 0.05);
    assert!(
        !transmission_anomalous(Model::RationalOdd, 4.0, r.bracket.0, 1.0, &grid, &opts()).unwrap()
    );
    assert!(
        transmission_anomalous(Model::RationalOdd, 4.0, r.bracket.1, 1.0, &grid, &opts()).unwrap()
    );

    let scarf = find_critical_v2(
        Model::Scarf,
        4.0,
        1.0,
        (0.0, 5.0),
        &linspace(0.8, 12.0, 200),
        0.01,
        &opts(),
    )
    .unwrap();
    assert_abs_diff_eq!(scarf.v2_critical, 4.0, epsilon = 0.02);
}

#[test]
fn critical_search_reports_missing_crossing() {
    let grid = linspace(0.8, 12.0, 50);
    assert!(matches!(
        find_critical_v2(Model::Scarf, 4.0, 1.0, (0.0, 2.0), &grid, 0.01, &opts()),
        Err(ScatterError::NoCrossing { .. })
    ));
}
