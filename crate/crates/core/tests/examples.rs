//! Every example doubles as a test: its `run_example` output is checked here.

#[path = "../examples/weighted_transform.rs"]
mod weighted_transform;
#[path = "../examples/fractional_laplacian.rs"]
mod fractional_laplacian;
#[path = "../examples/mittag_leffler.rs"]
mod mittag_leffler;
#[path = "../examples/fox_h.rs"]
mod fox_h;
#[path = "../examples/mellin_pair.rs"]
mod mellin_pair;
#[path = "../examples/uncertainty.rs"]
mod uncertainty;
#[path = "../examples/green_routes.rs"]
mod green_routes;
#[path = "../examples/cauchy_problem.rs"]
mod cauchy_problem;
#[path = "../examples/hilfer_derivative.rs"]
mod hilfer_derivative;
#[path = "../examples/validate_suite.rs"]
mod validate_suite;
#[path = "../examples/run_config.rs"]
mod run_config;

#[test]
fn transform_round_trip() {
    let (rt, pl) = weighted_transform::run_example().unwrap();
    assert!(rt < 1e-12 && pl < 1e-12, "{rt:e} {pl:e}");
}

#[test]
fn laplacian_forms_converge() {
    let gaps = fractional_laplacian::run_example().unwrap();
    assert!(gaps.windows(2).all(|w| w[1].1 < w[0].1));
    assert!(gaps.last().unwrap().1 < 5e-2);
}

#[test]
fn mittag_leffler_cases() {
    for (a, mu, v, exact, _) in mittag_leffler::run_example().unwrap() {
        assert!((v - exact).abs() < 1e-12, "E[{a},{mu}] {v} vs {exact}");
    }
}

#[test]
fn fox_h_heat_factor() {
    for (z, h, exact, _) in fox_h::run_example().unwrap() {
        assert!((h - exact).abs() <= 1e-10 * exact, "Z={z}: {h} vs {exact}");
    }
}

#[test]
fn mellin_pair_errors() {
    let (fwd, inv) = mellin_pair::run_example().unwrap();
    assert!(fwd < 1e-8 && inv < 1e-6, "{fwd:e} {inv:e}");
}

#[test]
fn uncertainty_products() {
    let rows = uncertainty::run_example().unwrap();
    assert!((rows[0].1 - 0.5).abs() < 1e-6);
    assert!(rows.iter().all(|r| r.1 >= r.2));
}

#[test]
fn green_routes_agree() {
    for [x, a, b, c] in green_routes::run_example().unwrap() {
        assert!(((a - b) / b).abs() < 1e-4, "x={x}");
        assert!(((c - b) / b).abs() < 1e-8, "x={x}");
    }
}

#[test]
fn cauchy_heat_flow() {
    assert!(cauchy_problem::run_example().unwrap() < 1e-8);
}

#[test]
fn hilfer_identities() {
    let o = hilfer_derivative::run_example().unwrap();
    assert!(o.power_rule < 1e-7 && o.laplace < 1e-6, "{} {}", o.power_rule, o.laplace);
}

#[test]
fn validate_passes() {
    assert!(validate_suite::run_example().unwrap());
}

#[test]
fn config_green_table() {
    let csv = run_config::run_example().unwrap();
    let rows: Vec<&str> = csv.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows[0], "t,x0,spectral,mellin,foxh,delta_spectral_mellin,delta_spectral_foxh,delta_mellin_foxh");
    assert_eq!(rows.len(), 4);
    let origin: Vec<f64> = rows[1].split(',').map(|v| v.parse().unwrap()).collect();
    let heat = (4.0 * std::f64::consts::PI).powf(-0.5);
    for v in &origin[2..5] {
        assert!((v - heat).abs() < 1e-8 * heat);
    }
}
