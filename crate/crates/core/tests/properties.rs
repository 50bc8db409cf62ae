//! Property tests for the structural identities each module promises.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use proptest::prelude::*;
use proptest::test_runner::RngSeed;
use wspectral::config::RunConfig;
use wspectral::fracops::weighted_fractional_integral;
use wspectral::mellin::mellin_forward;
use wspectral::solver::{green_foxh_route, green_mellin_route, green_spectral_route};
use wspectral::specfun::{gamma, gamma_complex, mittag_leffler, mellin_barnes, ContourSpec, FoxHSpec};
use wspectral::uncertainty::dispersion_report;
use wspectral::wfourier::{forward, inner_product, spectral_inner_product, weighted_gradient, weighted_norm};
use wspectral::{
    build_grid, make_diffeomorphism, DeformedGrid, GeometrySpec, GridFunction, HilferOrder, HilferProblem,
    SpatialWeight, TemporalPair,
};

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        rng_seed: RngSeed::Fixed(0x5eed_f00d_7e57),
        failure_persistence: None,
        ..ProptestConfig::default()
    }
}

fn geometry() -> impl Strategy<Value = (&'static str, Vec<f64>)> {
    prop_oneof![
        Just(("identity", vec![])),
        Just(("cubic", vec![])),
        (0.2..2.0f64).prop_map(|a| ("sinh", vec![a])),
        (0.5..2.0f64).prop_map(|a| ("asinh", vec![a])),
    ]
}

fn weight() -> impl Strategy<Value = SpatialWeight> {
    prop_oneof![
        Just(SpatialWeight::one()),
        (0.1..2.0f64).prop_map(|c| SpatialWeight::from_catalog("quadratic", &[c]).unwrap()),
        (-0.3..0.3f64).prop_map(|c| SpatialWeight::from_catalog("exp", &[c]).unwrap()),
    ]
}

/// Geometry and weight together. The asinh map sends the grid edge to
/// |x| ~ e^10, where an exponential weight leaves L².
fn setting() -> impl Strategy<Value = ((&'static str, Vec<f64>), SpatialWeight)> {
    (geometry(), weight()).prop_filter("exp weight on the asinh map", |((name, _), w)| {
        !(*name == "asinh" && w.name().starts_with("exp"))
    })
}

fn line(name: &str, params: &[f64], half: f64, n: usize) -> Arc<DeformedGrid> {
    let d = make_diffeomorphism(GeometrySpec::catalog(name, params, 1)).unwrap();
    build_grid(&d, &[(-half, half)], &[n]).unwrap()
}

/// Sum of two Gaussian bumps in u, well resolved on [-10, 10] with 256 nodes.
fn bumps(g: &Arc<DeformedGrid>, c: [f64; 4]) -> GridFunction {
    GridFunction::from_u_fn(g, |u| {
        let a = (-(u[0] - c[0]).powi(2)).exp();
        let b = (-0.5 * (u[0] - c[1]).powi(2)).exp();
        Complex64::new(a + c[2] * b, c[3] * a)
    })
}

fn bump_params() -> impl Strategy<Value = [f64; 4]> {
    (-2.0..2.0f64, -2.0..2.0f64, -1.0..1.0f64, -1.0..1.0f64).prop_map(|(a, b, c, d)| [a, b, c, d])
}

proptest! {
    #![proptest_config(config(24))]

    #[test]
    fn grid_nodes_map_back((name, params) in geometry(), half in 2.0..10.0f64) {
        let g = line(name, &params, half, 64);
        let d = g.geometry();
        for k in 0..g.len() {
            let u = g.u(k)[0];
            let back = d.map(g.x(k))[0];
            prop_assert!((back - u).abs() <= 1e-10 * (1.0 + u.abs()));
            prop_assert!(g.jac_weights()[k] > 0.0);
        }
    }

    #[test]
    fn separable_jacobian_is_axis_product(a in 0.2..2.0f64, x in -3.0..3.0f64, y in -3.0..3.0f64) {
        let d = make_diffeomorphism(GeometrySpec::catalog("sinh", &[a], 2)).unwrap();
        let det = d.jacobian_det(&[x, y]).unwrap();
        let axis = d.axis(0).unwrap();
        let product = axis.derivative(x) * d.axis(1).unwrap().derivative(y);
        prop_assert!((det - product).abs() <= 1e-12 * product.abs());
    }

    #[test]
    fn plancherel_and_polarization(((name, params), w) in setting(), c in bump_params(), e in bump_params()) {
        let g = line(name, &params, 10.0, 256);
        let f = bumps(&g, c);
        let h = bumps(&g, e);
        let (ff, fh) = (forward(&f, &w), forward(&h, &w));
        let n2 = weighted_norm(&f, &w).powi(2);
        prop_assert!((n2 - ff.norm_squared()).abs() <= 1e-8 * n2);
        let lhs = inner_product(&f, &h, &w).unwrap();
        let rhs = spectral_inner_product(&ff, &fh).unwrap();
        let scale = weighted_norm(&f, &w) * weighted_norm(&h, &w);
        prop_assert!((lhs - rhs).norm() <= 1e-8 * scale);
    }

    #[test]
    fn transform_is_linear(w in weight(), c in bump_params(), e in bump_params(), a in -2.0..2.0f64, b in -2.0..2.0f64) {
        let g = line("cubic", &[], 10.0, 128);
        let (f, h) = (bumps(&g, c), bumps(&g, e));
        let (ca, cb) = (Complex64::new(a, 0.5), Complex64::new(b, -0.25));
        let lhs = forward(&f.combine(ca, &h, cb).unwrap(), &w);
        let (ff, fh) = (forward(&f, &w), forward(&h, &w));
        let scale = 1.0 + ff.values().iter().chain(fh.values()).map(|v| v.norm()).fold(0.0, f64::max);
        for k in 0..lhs.values().len() {
            let rhs = ca * ff.values()[k] + cb * fh.values()[k];
            prop_assert!((lhs.values()[k] - rhs).norm() <= 1e-13 * scale * (a.abs() + b.abs() + 1.0));
        }
    }

    #[test]
    fn gradient_diagonalizes(((name, params), w) in setting(), c in bump_params()) {
        let g = line(name, &params, 10.0, 256);
        let f = bumps(&g, c);
        // The identity is for resolved inputs: ωf must vanish at the grid
        // edge and its spectrum in the outer shell.
        let weighted = |k: usize| (f.values()[k] * w.value(g.x(k))).norm();
        let peak = (0..g.len()).map(weighted).fold(0.0, f64::max);
        prop_assume!(weighted(0).max(weighted(g.len() - 1)) <= 1e-13 * peak);
        prop_assume!(forward(&f, &w).decay_ratio() <= 1e-12);
        let lhs = forward(&weighted_gradient(&f, &w, 0).unwrap(), &w);
        let mut rhs = forward(&f, &w);
        rhs.apply(|xi| Complex64::new(0.0, xi[0]));
        let diff: f64 = lhs.values().iter().zip(rhs.values()).map(|(a, b)| (a - b).norm_sqr()).sum();
        let size: f64 = rhs.values().iter().map(|b| b.norm_sqr()).sum();
        prop_assert!(diff.sqrt() <= 1e-9 * size.sqrt());
    }

    #[test]
    fn gamma_reflection(re in -6.0..6.0f64, im in -4.0..4.0f64) {
        let z = Complex64::new(re, im);
        prop_assume!((re - re.round()).abs() > 1e-3 || im.abs() > 1e-3);
        let v = gamma_complex(z).unwrap() * gamma_complex(1.0 - z).unwrap() * (PI * z).sin() / PI;
        prop_assert!((v - 1.0).norm() <= 1e-11);
    }

    #[test]
    fn mittag_leffler_at_zero(alpha in 0.1..2.0f64, mu in 0.1..3.0f64) {
        let v = mittag_leffler(alpha, mu, Complex64::new(0.0, 0.0)).unwrap();
        prop_assert!((v.re - 1.0 / gamma(mu).unwrap()).abs() <= 1e-12);
    }

    #[test]
    fn hilfer_mu_is_consistent(alpha in 0.05..2.0f64, beta in 0.0..1.0f64) {
        let o = HilferOrder::new(alpha, beta).unwrap();
        let m = o.m() as f64;
        prop_assert!(o.mu() >= alpha - 1e-15 && o.mu() <= m + 1e-15);
        prop_assert!((HilferOrder::new(alpha, 0.0).unwrap().mu() - alpha).abs() < 1e-15);
        prop_assert!((HilferOrder::new(alpha, 1.0).unwrap().mu() - m).abs() < 1e-15);
    }

    #[test]
    fn uncertainty_bound_holds(c in bump_params(), (name, params) in geometry()) {
        let g = line(name, &params, 10.0, 256);
        let w = SpatialWeight::one();
        let raw = bumps(&g, c);
        let f = raw.scaled((1.0 / weighted_norm(&raw, &w)).into());
        let r = dispersion_report(&f, &w).unwrap();
        prop_assert!(r.product >= r.bound * (1.0 - 1e-6));
        prop_assert!(r.component_products.iter().all(|&p| p >= 0.5 * (1.0 - 1e-6)));
    }

    #[test]
    fn uncertainty_translation_covariance(shift in -1.5..1.5f64) {
        let g = line("identity", &[], 12.0, 256);
        let w = SpatialWeight::one();
        let make = |s: f64| {
            let raw = GridFunction::from_u_fn(&g, |u| Complex64::new((-(u[0] - s).powi(2)).exp() * (1.0 + 0.3 * (u[0] - s)), 0.0));
            raw.scaled((1.0 / weighted_norm(&raw, &w)).into())
        };
        let a = dispersion_report(&make(0.0), &w).unwrap();
        let b = dispersion_report(&make(shift), &w).unwrap();
        prop_assert!((b.means_phi[0] - a.means_phi[0] - shift).abs() < 1e-9);
        prop_assert!((b.std_phi[0] - a.std_phi[0]).abs() < 1e-9);
        prop_assert!((b.std_xi[0] - a.std_xi[0]).abs() < 1e-9);
    }
}

proptest! {
    #![proptest_config(config(12))]

    #[test]
    fn fractional_integral_semigroup(a in 0.05..0.95f64, b in 0.05..0.95f64, t in 0.2..3.0f64, which in 0usize..3) {
        let tp = match which {
            0 => TemporalPair::from_catalog("power", &[1.3], "exp", &[0.2], None),
            1 => TemporalPair::from_catalog("expm1", &[0.5], "power", &[0.5], None),
            _ => Ok(TemporalPair::classical()),
        }
        .unwrap();
        let psi = |s: f64| (1.0 + s).ln() + 0.5;
        let once = |s: f64| weighted_fractional_integral(&psi, a, &tp, s).unwrap();
        let twice = weighted_fractional_integral(&once, b, &tp, t).unwrap();
        let direct = weighted_fractional_integral(&psi, a + b, &tp, t).unwrap();
        prop_assert!((twice - direct).abs() <= 1e-7 * direct.abs().max(1.0), "{twice} vs {direct}");
    }

    #[test]
    fn fractional_integral_conjugation(a in 0.05..1.5f64, t in 0.2..3.0f64, c in -0.5..0.5f64) {
        let weighted = TemporalPair::from_catalog("power", &[1.2], "exp", &[c], None).unwrap();
        let plain = TemporalPair::from_catalog("power", &[1.2], "one", &[], None).unwrap();
        let psi = |s: f64| (-s).exp() + s;
        let lhs = weighted_fractional_integral(&psi, a, &weighted, t).unwrap();
        let rho_psi = |s: f64| weighted.rho(s) * psi(s);
        let rhs = weighted_fractional_integral(&rho_psi, a, &plain, t).unwrap() / weighted.rho(t);
        prop_assert!((lhs - rhs).abs() <= 1e-9 * rhs.abs().max(1.0));
    }

    #[test]
    fn mellin_conjugate_symmetry(re in 0.3..3.0f64, im in -4.0..4.0f64, p in 0.5..2.5f64) {
        let d = make_diffeomorphism(GeometrySpec::catalog("power", &[p], 1)).unwrap();
        let w = SpatialWeight::one();
        let f = |x: f64| (-x).exp();
        let s = Complex64::new(re, im);
        let a = mellin_forward(&f, &d, &w, s).unwrap();
        let b = mellin_forward(&f, &d, &w, s.conj()).unwrap();
        prop_assert!((a - b.conj()).norm() <= 1e-10 * a.norm().max(1.0));
    }

    #[test]
    fn contour_abscissa_independence(alpha in 0.3..1.8f64, s in 0.4..1.0f64, w in 0.05..5.0f64, frac in 0.2..0.8f64) {
        let h = FoxHSpec::diffusion_wave(1, s, alpha, 1.0).unwrap();
        let (lo, hi) = h.separating_interval().unwrap();
        let lo = if lo.is_finite() { lo } else { hi - 3.0 };
        let hi = if hi.is_finite() { hi } else { lo + 3.0 };
        let c1 = lo + frac * (hi - lo);
        let c2 = lo + (1.0 - 0.5 * frac) * (hi - lo);
        prop_assume!((c1 - c2).abs() > 0.05);
        let r1 = mellin_barnes(&h, w, &ContourSpec::new(c1, 50.0, 4096).unwrap());
        let r2 = mellin_barnes(&h, w, &ContourSpec::new(c2, 50.0, 4096).unwrap());
        if let (Ok(a), Ok(b)) = (r1, r2) {
            let allowed = 2.0 * (a.error_estimate + b.error_estimate) + 1e-12 * a.value.norm().max(b.value.norm());
            prop_assert!((a.value - b.value).norm() <= allowed, "{} vs {} ({allowed:e})", a.value, b.value);
        }
    }

    #[test]
    fn foxh_matches_mellin(alpha in 0.2..2.0f64, beta in 0.0..1.0f64, s in 0.3..1.0f64, x in 0.1..4.0f64, t in 0.2..3.0f64) {
        let p = HilferProblem::trivial(1, alpha, beta, s).unwrap();
        let c = p.default_contour().unwrap();
        let m = green_mellin_route(&[x], t, &p, &c).unwrap();
        let f = green_foxh_route(&[x], t, &p).unwrap();
        let allowed = 1e-8 * m.value.abs() + m.error_estimate + f.error_estimate;
        prop_assert!((m.value - f.value).abs() <= allowed, "{} vs {}", m.value, f.value);
    }

    #[test]
    fn green_is_radially_symmetric(alpha in 0.3..2.0f64, beta in 0.0..1.0f64, s in 0.4..1.0f64, a in 0.2..1.5f64) {
        let p = HilferProblem::new(
            HilferOrder::new(alpha, beta).unwrap(),
            wspectral::FractionalOrder::new(s).unwrap(),
            1.0,
            make_diffeomorphism(GeometrySpec::catalog("sinh", &[a], 1)).unwrap(),
            SpatialWeight::one(),
            TemporalPair::classical(),
        ).unwrap();
        let g = build_grid(&p.geometry, &[(-20.0, 20.0)], &[256]).unwrap();
        let v = green_spectral_route(&g, 1.0, &p).unwrap();
        let n = g.len();
        let peak = v.values().iter().map(|z| z.norm()).fold(0.0, f64::max);
        // Cell-centred u nodes pair k with n - 1 - k.
        for k in 0..n / 2 {
            let (a, b) = (v.values()[k].re, v.values()[n - 1 - k].re);
            prop_assert!((a - b).abs() <= 1e-9 * peak, "k={k}: {a} vs {b}");
        }
    }

    #[test]
    fn subdiffusive_green_is_nonnegative(alpha in 0.2..1.0f64, s in 0.4..1.0f64) {
        let p = HilferProblem::trivial(1, alpha, 1.0, s).unwrap();
        // For s = 1 the symbol decays like |ξ|^-2, so truncation ringing falls
        // like 1/ξ_max²; this grid puts it below the 1e-6 bar.
        let g = line("identity", &[], 30.0, 4096);
        let v = green_spectral_route(&g, 1.0, &p).unwrap();
        let peak = v.values().iter().map(|z| z.re).fold(0.0, f64::max);
        prop_assert!(v.values().iter().all(|z| z.re >= -1e-6 * peak));
    }

    #[test]
    fn green_self_similarity(alpha in 0.3..1.0f64, s in 0.5..1.0f64, x in 0.3..3.0f64, t2 in 1.2..3.0f64) {
        let p = HilferProblem::trivial(1, alpha, 1.0, s).unwrap();
        let c = p.default_contour().unwrap();
        // Same Z at two times: x scales like γ(t)^{α/2s}.
        let x2 = x * t2.powf(alpha / (2.0 * s));
        let collapse = |x: f64, t: f64| {
            let g = green_mellin_route(&[x], t, &p, &c).unwrap().value;
            g * x / p.time_factor(t)
        };
        let (a, b) = (collapse(x, 1.0), collapse(x2, t2));
        prop_assert!((a - b).abs() <= 1e-4 * a.abs(), "{a} vs {b}");
    }

    #[test]
    fn config_toml_round_trips(alpha in 0.1..2.0f64, beta in 0.0..1.0f64, s in 0.1..1.0f64, n in 64usize..1024) {
        let mut cfg = RunConfig::default();
        cfg.alpha = alpha;
        cfg.beta = beta;
        cfg.s = s;
        cfg.grid.sizes = vec![n];
        let back = RunConfig::from_toml_str(&cfg.canonical()).unwrap();
        prop_assert_eq!(back, cfg);
    }
}


