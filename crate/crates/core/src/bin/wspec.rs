use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use wspectral::commands::{emit, run_command, Command};
use wspectral::config::{Overrides, RunConfig};
use wspectral::Error;

/// Weighted spectral calculus from the command line.
#[derive(Parser)]
#[command(name = "wspec", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Subcommand, Clone, Copy)]
enum Sub {
    /// Weighted Fourier transform of the test function on the grid.
    Transform,
    /// Fractional Laplacian, spectral and (on the line) hypersingular.
    Laplacian,
    /// Mittag-Leffler function E_{alpha,mu}(z).
    Mlf,
    /// Fox H-function factor of the fundamental solution.
    Hfun,
    /// phi-Mellin transform, forward at s or inverse at the probes.
    Mellin,
    /// Position and momentum dispersions of the normalized test function.
    Uncertainty,
    /// Fundamental solution at the probes by the selected routes.
    Green,
    /// Cauchy problem with the test function as initial data.
    Solve,
    /// Weighted Hilfer derivative and fractional integral of gamma^k / rho.
    Hilfer,
    /// Built-in invariant suite; exit 1 on any failure.
    Validate,
}

impl From<Sub> for Command {
    fn from(s: Sub) -> Self {
        match s {
            Sub::Transform => Command::Transform,
            Sub::Laplacian => Command::Laplacian,
            Sub::Mlf => Command::Mlf,
            Sub::Hfun => Command::Hfun,
            Sub::Mellin => Command::Mellin,
            Sub::Uncertainty => Command::Uncertainty,
            Sub::Green => Command::Green,
            Sub::Solve => Command::Solve,
            Sub::Hilfer => Command::Hilfer,
            Sub::Validate => Command::Validate,
        }
    }
}

#[derive(Args)]
struct Flags {
    /// TOML run configuration; flags override its values.
    #[arg(long, short, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    geometry: Option<String>,
    #[arg(long, global = true, value_delimiter = ',', allow_hyphen_values = true)]
    geometry_params: Option<Vec<f64>>,
    #[arg(long, short, global = true)]
    n: Option<usize>,
    #[arg(long, global = true)]
    weight: Option<String>,
    #[arg(long, global = true, value_delimiter = ',', allow_hyphen_values = true)]
    weight_params: Option<Vec<f64>>,
    #[arg(long, global = true)]
    gamma: Option<String>,
    #[arg(long, global = true, value_delimiter = ',', allow_hyphen_values = true)]
    gamma_params: Option<Vec<f64>>,
    #[arg(long, global = true)]
    rho: Option<String>,
    #[arg(long, global = true, value_delimiter = ',', allow_hyphen_values = true)]
    rho_params: Option<Vec<f64>>,
    #[arg(long, global = true)]
    alpha: Option<f64>,
    #[arg(long, global = true)]
    beta: Option<f64>,
    #[arg(long, global = true)]
    s: Option<f64>,
    #[arg(long, global = true)]
    lambda: Option<f64>,
    /// Mittag-Leffler second parameter.
    #[arg(long, global = true)]
    mu: Option<f64>,
    /// Grid bounds in u as lo,hi[,lo,hi...].
    #[arg(long, global = true, value_delimiter = ',', allow_hyphen_values = true)]
    bounds: Option<Vec<f64>>,
    #[arg(long, global = true, value_delimiter = ',')]
    sizes: Option<Vec<usize>>,
    #[arg(long, short, global = true, value_delimiter = ',')]
    t: Option<Vec<f64>>,
    #[arg(long, global = true, value_delimiter = ',', allow_hyphen_values = true)]
    probes: Option<Vec<f64>>,
    /// spectral, mellin, foxh, or all.
    #[arg(long, global = true, value_delimiter = ',')]
    routes: Option<Vec<String>>,
    /// Test function: gaussian, sech, lorentzian.
    #[arg(long, global = true)]
    function: Option<String>,
    /// Arguments (real parts) for mlf and hfun.
    #[arg(long, short, global = true, value_delimiter = ',', allow_hyphen_values = true)]
    z: Option<Vec<f64>>,
    #[arg(long, global = true, value_delimiter = ',', allow_hyphen_values = true)]
    z_im: Option<Vec<f64>>,
    /// forward or inverse.
    #[arg(long, global = true)]
    mellin_mode: Option<String>,
    #[arg(long, global = true, value_delimiter = ',', allow_hyphen_values = true)]
    mellin_s: Option<Vec<f64>>,
    /// CSV output path; stdout when omitted.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    /// Prefix for plot data and SVG files.
    #[arg(long, global = true)]
    plot: Option<PathBuf>,
    /// Print the full-precision CSV on stdout instead of the rounded view.
    #[arg(long, global = true)]
    csv: bool,
}

impl Flags {
    fn overrides(&self) -> Overrides {
        let routes = self.routes.as_ref().map(|r| {
            if r.iter().any(|x| x == "all") {
                vec!["spectral".into(), "mellin".into(), "foxh".into()]
            } else {
                r.clone()
            }
        });
        Overrides {
            geometry: self.geometry.clone(),
            geometry_params: self.geometry_params.clone(),
            n: self.n,
            weight: self.weight.clone(),
            weight_params: self.weight_params.clone(),
            gamma: self.gamma.clone(),
            gamma_params: self.gamma_params.clone(),
            rho: self.rho.clone(),
            rho_params: self.rho_params.clone(),
            alpha: self.alpha,
            beta: self.beta,
            s: self.s,
            lambda: self.lambda,
            bounds: self.bounds.clone(),
            sizes: self.sizes.clone(),
            t: self.t.clone(),
            probes: self.probes.clone(),
            routes,
            function: self.function.clone(),
            z: self.z.clone(),
            z_im: self.z_im.clone(),
            mu: self.mu,
            mellin_mode: self.mellin_mode.clone(),
            mellin_s: self.mellin_s.clone(),
            output: self.output.clone(),
            plot: self.plot.clone(),
        }
    }
}

fn configure_threads() -> Result<(), Error> {
    if let Ok(v) = std::env::var("WSPEC_THREADS") {
        let n: usize = v
            .parse()
            .map_err(|_| Error::Config(format!("WSPEC_THREADS must be a positive integer, got {v:?}")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global()
            .map_err(|e| Error::Config(e.to_string()))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<bool, Error> {
    configure_threads()?;
    let mut cfg = match &cli.flags.config {
        Some(path) => RunConfig::from_path(path)?,
        None => RunConfig::default(),
    };
    cfg.apply(cli.flags.overrides())?;
    let out = run_command(cli.command.into(), &cfg)?;
    if let Some(text) = emit(&out, &cfg, cli.flags.csv)? {
        print!("{text}");
    }
    Ok(out.passed)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("error: validation failed");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            eprintln!("  detail: {e:?}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
