use plateflow::spectral::TorusGrid;
use plateflow::{ModeIndex, SolverConfig};
use plateflow_cli::expr::parse;
use plateflow_cli::scenario::{checked_expression, sample_plate, sample_slab};
use plateflow_cli::CliError;

#[test]
fn precedence_and_constants() {
    let e = parse("1 + 2*3^2 - -pi/π").unwrap();
    assert_eq!(e.eval([0.0; 4]), 1.0 + 18.0 + 1.0);
    assert_eq!(parse("2.5e-1*x3").unwrap().eval([0.0, 0.0, 0.0, 4.0]), 1.0);
    assert_eq!(parse("-2^2").unwrap().eval([0.0; 4]), -4.0);
}

#[test]
fn parse_errors_carry_the_column() {
    let e = parse("sin(t) + foo(x1)").unwrap_err();
    assert_eq!(e.position, 9);
    assert!(parse("cos(t").unwrap_err().message.contains("')'"));
    assert!(parse("").is_err());
    assert!(parse("1 2").is_err());
    assert!(parse("log(t)").is_err());
}

fn cfg() -> SolverConfig {
    SolverConfig::default().with_truncation(5, 5, 8)
}

#[test]
fn zero_expression_gives_zero_field() {
    let c = cfg();
    let e = checked_expression("f", "0", &c, false).unwrap();
    let s = sample_slab(&[e], &c.grid().unwrap(), 1.0);
    assert_eq!(s.field.max_abs(), 0.0);
}

#[test]
fn product_of_harmonics_lands_on_four_modes() {
    let c = cfg();
    let grid: TorusGrid = c.grid().unwrap();
    let e = checked_expression("h", "0.001*cos(t)*sin(x1)", &c, true).unwrap();
    let s = sample_plate(&e, &grid, 1.0);
    assert!(s.truncation_defect < 1e-17);
    for m in grid.modes() {
        let v = s.field.get(m);
        if m.k.abs() == 1 && m.xi[0].abs() == 1 && m.xi[1] == 0 {
            // cos t sin x1 = (e^{it} + e^{-it})(e^{ix1} - e^{-ix1}) / 4i
            let expect = 0.001 / 4.0 * m.xi[0] as f64;
            assert!((v.im + expect).abs() < 1e-17 && v.re.abs() < 1e-17, "{m}: {v}");
        } else {
            assert!(v.norm() < 1e-18, "{m}: {v}");
        }
    }
    assert_eq!(s.field.get(ModeIndex::new(1, [1, 0])), s.field.get(ModeIndex::new(-1, [-1, 0])).conj());
}

#[test]
fn wall_normal_dependence_is_sampled_at_the_nodes() {
    let c = cfg();
    let grid = c.grid().unwrap();
    let e = checked_expression("g", "x3^2*cos(x2)", &c, false).unwrap();
    let s = sample_slab(&[e], &grid, 2.0);
    let prof = s.field.profile(ModeIndex::new(0, [0, 1]), 0);
    for (v, x) in prof.iter().zip(grid.nodes()) {
        assert!((v.re - x * x).abs() < 1e-15);
    }
}

#[test]
fn non_periodic_constructs_are_rejected() {
    let c = cfg();
    match checked_expression("f", "cos(0.5*t)", &c, false) {
        Err(CliError::Periodicity { variable, .. }) => assert_eq!(variable, "t"),
        other => panic!("{other:?}"),
    }
    assert!(matches!(checked_expression("f", "x1", &c, false), Err(CliError::Periodicity { .. })));
    assert!(checked_expression("f", "exp(sin(x2))*x3", &c, false).is_ok());
    assert!(matches!(checked_expression("h", "x3", &c, true), Err(CliError::Config(_))));
    let other = SolverConfig { period_t: 4.0 * std::f64::consts::PI, ..c };
    assert!(checked_expression("f", "cos(0.5*t)", &other, false).is_ok());
}

#[test]
fn harmonics_beyond_the_truncation_are_reported() {
    let c = cfg();
    let e = checked_expression("f", "cos(4*x1)", &c, false).unwrap();
    let s = sample_slab(&[e], &c.grid().unwrap(), 1.0);
    // only FFT rounding survives the truncation
    assert!(s.field.max_abs() < 1e-15);
    assert!((s.truncation_defect - 1.0).abs() < 1e-12);
}
