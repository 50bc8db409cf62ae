//! Subcommand dispatch for `wspec`.

use std::collections::HashMap;
use std::str::FromStr;
use std::sync::Mutex;

use num_complex::Complex64;

use crate::config::{test_function, RunConfig};
use crate::error::{Error, Result};
use crate::fracops::{
    fractional_laplacian_singular, fractional_laplacian_spectral, weighted_fractional_integral,
    weighted_hilfer_derivative, FractionalOrder, HilferOrder, TimeSignal,
};
use crate::mellin::{mellin_forward, mellin_inverse_detailed, InversionControl, MellinStrip};
use crate::solver::{green_at, solve_cauchy, GreenRoute};
use crate::specfun::{fox_h_1232, gamma, mittag_leffler_detailed};
use crate::table::{config_hash, write_plot_data, write_svg, Cell, ResultTable, Series};
use crate::uncertainty::dispersion_report;
use crate::validate::{validation_report, ValidateOptions};
use crate::wfourier::{forward, inverse, weighted_norm, GridFunction};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Transform,
    Laplacian,
    Mlf,
    Hfun,
    Mellin,
    Uncertainty,
    Green,
    Solve,
    Hilfer,
    Validate,
}

impl Command {
    pub const ALL: [Command; 10] = [
        Command::Transform,
        Command::Laplacian,
        Command::Mlf,
        Command::Hfun,
        Command::Mellin,
        Command::Uncertainty,
        Command::Green,
        Command::Solve,
        Command::Hilfer,
        Command::Validate,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Transform => "transform",
            Command::Laplacian => "laplacian",
            Command::Mlf => "mlf",
            Command::Hfun => "hfun",
            Command::Mellin => "mellin",
            Command::Uncertainty => "uncertainty",
            Command::Green => "green",
            Command::Solve => "solve",
            Command::Hilfer => "hilfer",
            Command::Validate => "validate",
        }
    }
}

impl FromStr for Command {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown command {s:?}")))
    }
}

/// What a command produced. `validate` fills `report` instead of a table.
#[derive(Debug)]
pub struct CommandOutput {
    pub table: Option<ResultTable>,
    pub report: Option<String>,
    pub plots: Vec<Series>,
    pub passed: bool,
}

impl CommandOutput {
    fn table(table: ResultTable) -> Self {
        CommandOutput {
            table: Some(table),
            report: None,
            plots: Vec::new(),
            passed: true,
        }
    }

    fn with_plots(mut self, plots: Vec<Series>) -> Self {
        self.plots = plots;
        self
    }
}

/// Validates the config, then runs `cmd`. Writing results is left to
/// [`emit`] so callers can inspect them first.
pub fn run_command(cmd: Command, cfg: &RunConfig) -> Result<CommandOutput> {
    cfg.validate()?;
    let mut out = match cmd {
        Command::Transform => transform(cfg)?,
        Command::Laplacian => laplacian(cfg)?,
        Command::Mlf => mlf(cfg)?,
        Command::Hfun => hfun(cfg)?,
        Command::Mellin => mellin(cfg)?,
        Command::Uncertainty => uncertainty(cfg)?,
        Command::Green => green(cfg)?,
        Command::Solve => solve(cfg)?,
        Command::Hilfer => hilfer(cfg)?,
        Command::Validate => {
            let report = validation_report(&ValidateOptions::default())?;
            return Ok(CommandOutput {
                table: None,
                report: Some(report.text),
                plots: Vec::new(),
                passed: report.all_passed,
            });
        }
    };
    if let Some(t) = out.table.as_mut() {
        t.meta("command", cmd.name());
        t.meta("config_sha256", config_hash(&cfg.canonical()));
    }
    Ok(out)
}

/// Writes the table (or report) to the configured path, or returns it for
/// stdout. Plot files go next to the configured prefix.
pub fn emit(out: &CommandOutput, cfg: &RunConfig, full_precision: bool) -> Result<Option<String>> {
    if let Some(prefix) = &cfg.output.plot {
        if !out.plots.is_empty() {
            write_plot_data(prefix, &out.plots)?;
            write_svg(prefix, "profiles", &out.plots)?;
        }
    }
    let text = match (&out.table, &out.report) {
        (Some(t), _) => match &cfg.output.path {
            Some(path) => {
                t.write_csv(path)?;
                return Ok(None);
            }
            None if full_precision => t.to_csv(),
            None => t.to_display(),
        },
        (None, Some(report)) => match &cfg.output.path {
            Some(path) => {
                crate::table::write_atomic(path, report.as_bytes())?;
                return Ok(None);
            }
            None => report.clone(),
        },
        (None, None) => String::new(),
    };
    Ok(Some(text))
}

fn coord_columns(mut t: ResultTable, prefix: &str, n: usize) -> ResultTable {
    for j in 0..n {
        t = t.real_column(format!("{prefix}{j}"));
    }
    t
}

fn transform(cfg: &RunConfig) -> Result<CommandOutput> {
    let grid = cfg.grid()?;
    let w = cfg.spatial_weight()?;
    let f = GridFunction::from_real_fn(&grid, test_function(&cfg.run.function)?);
    let field = forward(&f, &w);
    let back = inverse(&field, &w, &grid)?;
    let diff = back.combine(Complex64::new(1.0, 0.0), &f, Complex64::new(-1.0, 0.0))?;
    let mut t = coord_columns(ResultTable::new(), "xi", cfg.n).complex_column("transform");
    t.meta("round_trip_error", format!("{:e}", weighted_norm(&diff, &w) / weighted_norm(&f, &w)));
    t.meta(
        "plancherel_defect",
        format!("{:e}", (field.norm_squared() - weighted_norm(&f, &w).powi(2)).abs()),
    );
    for (k, v) in field.values().iter().enumerate() {
        let mut row: Vec<Cell> = field.xi(k).into_iter().map(Cell::from).collect();
        row.push((*v).into());
        t.push_row(row)?;
    }
    Ok(CommandOutput::table(t))
}

fn laplacian(cfg: &RunConfig) -> Result<CommandOutput> {
    let grid = cfg.grid()?;
    let w = cfg.spatial_weight()?;
    let f = GridFunction::from_real_fn(&grid, test_function(&cfg.run.function)?);
    let spectral = fractional_laplacian_spectral(&f, &w, FractionalOrder::new(cfg.s)?)?;
    // The hypersingular form exists for s < 1 on the line.
    let singular = if cfg.n == 1 && cfg.s < 1.0 {
        Some(fractional_laplacian_singular(&f, &w, cfg.s)?)
    } else {
        None
    };
    let mut t = coord_columns(ResultTable::new(), "x", cfg.n).real_column("f").complex_column("spectral");
    if let Some(sing) = &singular {
        t = t.complex_column("singular");
        let d = sing.combine(Complex64::new(1.0, 0.0), &spectral, Complex64::new(-1.0, 0.0))?;
        t.meta("relative_difference", format!("{:e}", weighted_norm(&d, &w) / weighted_norm(&spectral, &w)));
    }
    let mut profile = Vec::new();
    for k in 0..grid.len() {
        let x = grid.x(k);
        let mut row: Vec<Cell> = x.iter().copied().map(Cell::from).collect();
        row.push(f.values()[k].re.into());
        row.push(spectral.values()[k].into());
        if let Some(sing) = &singular {
            row.push(sing.values()[k].into());
        }
        t.push_row(row)?;
        if cfg.n == 1 {
            profile.push((x[0], spectral.values()[k].re));
        }
    }
    let plots = if cfg.n == 1 {
        vec![Series {
            label: format!("laplacian s={}", cfg.s),
            points: profile,
        }]
    } else {
        Vec::new()
    };
    Ok(CommandOutput::table(t).with_plots(plots))
}

fn mlf(cfg: &RunConfig) -> Result<CommandOutput> {
    let (a, mu) = (cfg.run.mlf_alpha, cfg.run.mlf_mu);
    let mut t = ResultTable::new()
        .complex_column("z")
        .complex_column("value")
        .real_column("error_estimate");
    t.meta("alpha", format!("{a}"));
    t.meta("mu", format!("{mu}"));
    let mut methods = Vec::new();
    for (i, &re) in cfg.run.z.iter().enumerate() {
        let z = Complex64::new(re, cfg.run.z_im.get(i).copied().unwrap_or(0.0));
        let e = mittag_leffler_detailed(a, mu, z)?;
        methods.push(e.method.name());
        t.push_row(vec![z.into(), e.value.into(), e.error_estimate.into()])?;
    }
    t.meta("methods", methods.join(" "));
    Ok(CommandOutput::table(t))
}

fn hfun(cfg: &RunConfig) -> Result<CommandOutput> {
    let p = cfg.problem()?;
    let mut t = ResultTable::new()
        .real_column("z")
        .real_column("value")
        .real_column("error_estimate")
        .real_column("imaginary_residue");
    t.meta("kernel", "H^{1,2}_{3,2} of the diffusion-wave fundamental solution");
    for &z in &cfg.run.z {
        let v = fox_h_1232(&p, z)?;
        t.push_row(vec![z.into(), v.value.into(), v.error_estimate.into(), v.imaginary_residue.into()])?;
    }
    Ok(CommandOutput::table(t))
}

fn mellin(cfg: &RunConfig) -> Result<CommandOutput> {
    let d = cfg.diffeomorphism()?;
    let w = cfg.spatial_weight()?;
    let f = test_function(&cfg.run.function)?;
    let f1 = |x: f64| f(&[x]);
    match cfg.run.mellin_mode.as_str() {
        "forward" => {
            let mut t = ResultTable::new().complex_column("s").complex_column("transform");
            for &s in &cfg.run.mellin_s {
                let s = Complex64::new(s, 0.0);
                t.push_row(vec![s.into(), mellin_forward(&f1, &d, &w, s)?.into()])?;
            }
            Ok(CommandOutput::table(t))
        }
        "inverse" => {
            let [lo, hi, c] = cfg.run.mellin_strip;
            let strip = MellinStrip::new(lo, hi, c)?;
            let control = InversionControl {
                half_height: 30.0,
                nodes: 1024,
                tol: cfg.run.tolerance,
                max_levels: 4,
            };
            // The trapezoid revisits nodes across refinement levels.
            let memo: Mutex<HashMap<(u64, u64), Complex64>> = Mutex::new(HashMap::new());
            let failure: Mutex<Option<Error>> = Mutex::new(None);
            let transform = |s: Complex64| {
                let key = (s.re.to_bits(), s.im.to_bits());
                if let Some(v) = memo.lock().expect("memo lock").get(&key) {
                    return *v;
                }
                let v = mellin_forward(&f1, &d, &w, s).unwrap_or_else(|e| {
                    failure.lock().expect("failure lock").get_or_insert(e);
                    Complex64::new(0.0, 0.0)
                });
                memo.lock().expect("memo lock").insert(key, v);
                v
            };
            let mut t = ResultTable::new()
                .real_column("x")
                .real_column("f")
                .complex_column("reconstruction")
                .real_column("error_estimate");
            for &x in cfg.run.probes.iter().filter(|&&x| x > 0.0) {
                let r = mellin_inverse_detailed(&transform, &strip, &d, &w, x, &control)?;
                if let Some(e) = failure.lock().expect("failure lock").take() {
                    return Err(e);
                }
                t.push_row(vec![x.into(), f1(x).into(), r.value.into(), r.error_estimate.into()])?;
            }
            Ok(CommandOutput::table(t))
        }
        other => Err(Error::Config(format!("mellin_mode must be forward or inverse, got {other:?}"))),
    }
}

fn uncertainty(cfg: &RunConfig) -> Result<CommandOutput> {
    let grid = cfg.grid()?;
    let w = cfg.spatial_weight()?;
    let raw = GridFunction::from_real_fn(&grid, test_function(&cfg.run.function)?);
    let f = raw.scaled(Complex64::new(1.0 / weighted_norm(&raw, &w), 0.0));
    let r = dispersion_report(&f, &w)?;
    let mut t = ResultTable::new()
        .real_column("axis")
        .real_column("mean_phi")
        .real_column("mean_xi")
        .real_column("std_phi")
        .real_column("std_xi")
        .real_column("product");
    for j in 0..cfg.n {
        t.push_row(vec![
            (j as f64).into(),
            r.means_phi[j].into(),
            r.means_xi[j].into(),
            r.std_phi[j].into(),
            r.std_xi[j].into(),
            r.component_products[j].into(),
        ])?;
    }
    t.meta("total_product", crate::table::exact(r.product));
    t.meta("bound_n2_over_4", crate::table::exact(r.bound));
    t.meta("sharp_bound_n2_over_2", crate::table::exact(r.sharp_bound));
    Ok(CommandOutput::table(t))
}

fn green(cfg: &RunConfig) -> Result<CommandOutput> {
    let p = cfg.problem()?;
    let routes = cfg.routes()?;
    let mut t = ResultTable::new().real_column("t");
    t = coord_columns(t, "x", cfg.n);
    for r in &routes {
        t = t.real_column(r.name());
    }
    let pairs: Vec<(usize, usize)> = (0..routes.len())
        .flat_map(|i| (i + 1..routes.len()).map(move |j| (i, j)))
        .collect();
    for &(i, j) in &pairs {
        t = t.real_column(format!("delta_{}_{}", routes[i].name(), routes[j].name()));
    }
    let mut worst_err = vec![0.0f64; routes.len()];
    let mut plots: Vec<Series> = Vec::new();
    for &time in &cfg.run.t {
        let mut series: Vec<Vec<(f64, f64)>> = vec![Vec::new(); routes.len()];
        for &probe in &cfg.run.probes {
            let mut x = vec![0.0; cfg.n];
            x[0] = probe;
            let evals: Vec<f64> = routes
                .iter()
                .enumerate()
                .map(|(i, &r)| {
                    let e = green_at(r, &x, time, &p)?;
                    worst_err[i] = worst_err[i].max(e.error_estimate);
                    series[i].push((probe, e.value));
                    Ok(e.value)
                })
                .collect::<Result<_>>()?;
            let mut row: Vec<Cell> = vec![time.into()];
            row.extend(x.iter().copied().map(Cell::from));
            row.extend(evals.iter().copied().map(Cell::from));
            row.extend(pairs.iter().map(|&(i, j)| Cell::from(evals[i] - evals[j])));
            t.push_row(row)?;
        }
        plots.extend(routes.iter().zip(series).map(|(r, points)| Series {
            label: format!("{} t={time}", r.name()),
            points,
        }));
    }
    for (r, e) in routes.iter().zip(&worst_err) {
        t.meta(format!("error_estimate_{}", r.name()), format!("{e:e}"));
    }
    Ok(CommandOutput::table(t).with_plots(plots))
}

fn solve(cfg: &RunConfig) -> Result<CommandOutput> {
    let p = cfg.problem()?;
    let grid = cfg.grid()?;
    let f0 = GridFunction::from_real_fn(&grid, test_function(&cfg.run.function)?);
    let mut t = coord_columns(ResultTable::new().real_column("t"), "x", cfg.n).complex_column("u");
    t.meta("route", GreenRoute::Spectral.name());
    let mut plots = Vec::new();
    for &time in &cfg.run.t {
        let u = solve_cauchy(&f0, time, &p)?;
        let mut profile = Vec::new();
        for k in 0..grid.len() {
            let x = grid.x(k);
            let mut row: Vec<Cell> = vec![time.into()];
            row.extend(x.iter().copied().map(Cell::from));
            row.push(u.values()[k].into());
            t.push_row(row)?;
            profile.push((x[0], u.values()[k].re));
        }
        if cfg.n == 1 {
            plots.push(Series {
                label: format!("u t={time}"),
                points: profile,
            });
        }
    }
    Ok(CommandOutput::table(t).with_plots(plots))
}

/// Hilfer derivative and fractional integral of ψ = γ^k/ρ, with the closed
/// forms from the power rule alongside.
fn hilfer(cfg: &RunConfig) -> Result<CommandOutput> {
    let tp = cfg.temporal_pair()?;
    let order = HilferOrder::new(cfg.alpha, cfg.beta)?;
    let k = cfg.run.signal_power;
    if !(k >= 0.0) {
        return Err(Error::Config(format!("signal_power must be nonnegative, got {k}")));
    }
    let psi = |t: f64| tp.gamma(t).powf(k) / tp.rho(t);
    let dpsi = |t: f64| {
        let (g, r) = (tp.gamma(t), tp.rho(t));
        let dg = if k == 0.0 { 0.0 } else { k * g.powf(k - 1.0) * tp.gamma_prime(t) };
        (dg * r - g.powf(k) * tp.rho_prime(t)) / (r * r)
    };
    let signal = TimeSignal::with_derivative(psi, dpsi);
    let a = cfg.alpha;
    let ratio_d = gamma(k + 1.0)? * crate::specfun::rgamma(k + 1.0 - a);
    let ratio_i = gamma(k + 1.0)? * crate::specfun::rgamma(k + 1.0 + a);
    let mut t = ResultTable::new()
        .real_column("t")
        .real_column("derivative")
        .real_column("derivative_exact")
        .real_column("integral")
        .real_column("integral_exact");
    t.meta("signal", format!("gamma^{k} / rho"));
    let caputo_like = cfg.beta == 1.0;
    for &time in &cfg.run.t {
        let g = tp.gamma(time);
        let r = tp.rho(time);
        let d = weighted_hilfer_derivative(&signal, order, &tp, time)?;
        // Under β = 1 polynomial parts below degree m are annihilated.
        let d_exact = if caputo_like && k < order.m() as f64 && k.fract() == 0.0 {
            0.0
        } else {
            ratio_d * g.powf(k - a) / r
        };
        let i = weighted_fractional_integral(&psi, a, &tp, time)?;
        let i_exact = ratio_i * g.powf(k + a) / r;
        t.push_row(vec![time.into(), d.into(), d_exact.into(), i.into(), i_exact.into()])?;
    }
    Ok(CommandOutput::table(t))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mlf_at_minus_one_is_inverse_e() {
        let mut cfg = RunConfig::default();
        cfg.run.z = vec![-1.0];
        let out = run_command(Command::Mlf, &cfg).unwrap();
        let t = out.table.unwrap();
        assert!((t.column("value_re").unwrap()[0] - (-1f64).exp()).abs() < 1e-14);
        assert!(t.to_display().contains("0.3678794412"));
    }

    #[test]
    fn green_classical_limit_three_columns() {
        let mut cfg = RunConfig::default();
        cfg.run.probes = vec![0.0, 1.0, 2.0];
        let t = run_command(Command::Green, &cfg).unwrap().table.unwrap();
        for (i, x) in [0.0f64, 1.0, 2.0].iter().enumerate() {
            let exact = (4.0 * std::f64::consts::PI).powf(-0.5) * (-x * x / 4.0).exp();
            for route in ["spectral", "mellin", "foxh"] {
                let v = t.column(route).unwrap()[i];
                assert!(((v - exact) / exact).abs() < 1e-6, "{route} at {x}: {v} vs {exact}");
            }
        }
        assert!(t.header().iter().any(|h| h == "delta_spectral_mellin"));
    }

    #[test]
    fn tables_are_deterministic() {
        let cfg = RunConfig::default();
        let a = run_command(Command::Transform, &cfg).unwrap().table.unwrap().to_csv();
        let b = run_command(Command::Transform, &cfg).unwrap().table.unwrap().to_csv();
        assert_eq!(a, b);
    }

    #[test]
    fn hilfer_power_signal_matches_closed_form() {
        let mut cfg = RunConfig::default();
        cfg.alpha = 0.6;
        cfg.beta = 0.5;
        cfg.gamma = "power".into();
        cfg.gamma_params = vec![1.3];
        cfg.rho = "exp".into();
        cfg.rho_params = vec![0.2];
        cfg.run.t = vec![0.7, 1.4];
        let t = run_command(Command::Hilfer, &cfg).unwrap().table.unwrap();
        let (d, de) = (t.column("derivative").unwrap(), t.column("derivative_exact").unwrap());
        let (i, ie) = (t.column("integral").unwrap(), t.column("integral_exact").unwrap());
        for k in 0..2 {
            assert!(((d[k] - de[k]) / de[k]).abs() < 1e-6, "{} vs {}", d[k], de[k]);
            assert!(((i[k] - ie[k]) / ie[k]).abs() < 1e-8);
        }
    }

    #[test]
    fn unknown_command_is_config_error() {
        assert_eq!("frobnicate".parse::<Command>().unwrap_err().exit_code(), 2);
    }
}
