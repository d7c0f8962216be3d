use lp_sim::config::parse;
use lp_sim::record::{csv_text, parse_csv, Bound, Series};
use lp_sim::registry::EXPERIMENTS;
use lp_sim::{RunError, EXIT_SCHEMA};

fn schema_error(text: &str) -> bool {
    matches!(parse(text), Err(RunError::Schema(_)))
}

#[test]
fn defaults_parse_and_round_trip() {
    for exp in EXPERIMENTS.iter() {
        let text = (exp.defaults)().to_toml();
        let (cfg, found) = parse(&text).unwrap_or_else(|e| panic!("{}: {e}", exp.id));
        assert_eq!(found.id, exp.id);
        assert_eq!(cfg.to_toml(), text);
    }
}

#[test]
fn partial_config_merges_over_defaults() {
    let (cfg, _) = parse("experiment = \"factor_eight\"\n[grid]\nn = 8\n").unwrap();
    let defaults = (lp_sim::registry::find("factor_eight").unwrap().defaults)();
    assert_eq!(cfg.grid.n, 8);
    assert_eq!(cfg.grid.length, defaults.grid.length);
    assert_eq!(cfg.physics.mass, defaults.physics.mass);
    assert_eq!(cfg.seeds, defaults.seeds);
}

#[test]
fn schema_violations_are_rejected() {
    assert!(schema_error("seeds = [1]\n"));
    assert!(schema_error("experiment = \"nope\"\n"));
    assert!(schema_error("experiment = \"factor_eight\"\ncolour = 1\n"));
    assert!(schema_error("experiment = \"factor_eight\"\n[grid]\nn = 7\n"));
    assert!(schema_error("experiment = \"factor_eight\"\n[grid]\nn = 256\n"));
    assert!(schema_error("experiment = \"factor_eight\"\nseeds = []\n"));
    assert!(schema_error("experiment = \"factor_eight\"\n[physics]\ne = -1.0\n"));
    assert!(schema_error("experiment = \"factor_eight\"\n[regulator]\nsigma_cells = 1.0\n"));
    assert!(schema_error("experiment = \"factor_eight\"\n[integrator]\nsteps = 0\n"));
    assert!(schema_error("experiment = \"factor_eight\"\n[tolerances]\nposition_vs_fourier = 1e-3\n"));
    assert!(schema_error("experiment = \"factor_eight\"\n[tolerances]\ntensor_vs_energy = 0.0\n"));
    assert!(schema_error("experiment = \"two_time_consistency\"\n[physics]\ne = 0.1\n"));
    assert!(schema_error("experiment = \"hamiltonian_structure\"\n[integrator]\nsteps = 21\n"));
    assert!(schema_error("experiment = \"lp_constraint\"\n[integrator]\nsteps = 10\n"));
    assert_eq!(RunError::Schema(String::new()).exit_code(), EXIT_SCHEMA);
}

#[test]
fn csv_round_trips_exactly() {
    let series = vec![
        Series { name: "alpha".into(), points: vec![(0.0, 1.0), (0.1, -2.5e-17), (1e300, f64::MIN_POSITIVE)] },
        Series { name: "beta".into(), points: vec![(3.0, std::f64::consts::PI)] },
    ];
    let text = csv_text(&series.iter().collect::<Vec<_>>());
    assert!(text.starts_with("series,x,y\n"));
    let back = parse_csv(&text).unwrap();
    assert_eq!(back.len(), 2);
    for (a, b) in series.iter().zip(&back) {
        assert_eq!(a.name, b.name);
        assert_eq!(a.points, b.points);
    }
    assert!(parse_csv("name,x,y\n").is_err());
    assert!(parse_csv("series,x,y\na,1\n").is_err());
}

#[test]
fn bounds_and_overrides() {
    assert!(Bound::AtMost { tolerance: 1.0 }.holds(1.0));
    assert!(!Bound::AtLeast { tolerance: 1.0 }.holds(0.5));
    assert!(Bound::Near { target: 16.0, tolerance: 0.3 }.holds(20.0));
    assert!(!Bound::Near { target: 16.0, tolerance: 0.3 }.holds(32.0));
    assert!(Bound::Diagnostic.holds(f64::INFINITY));
    let tight = Bound::Near { target: 16.0, tolerance: 0.3 }.with_tolerance(0.01);
    assert!(!tight.holds(16.5));
}
