//! Run configuration for the `wspec` binary.
//!
//! A TOML document with flat problem keys and three tables:
//!
//! ```toml
//! geometry = "sinh"
//! geometry_params = [0.5]
//! n = 1
//! weight = "quadratic"
//! weight_params = [0.2]
//! gamma = "power"
//! gamma_params = [1.2]
//! rho = "exp"
//! rho_params = [0.1]
//! alpha = 0.8
//! beta = 0.5
//! s = 0.75
//! lambda = 1.0
//!
//! [grid]
//! bounds = [[-12.0, 12.0]]
//! sizes = [512]
//!
//! [run]
//! t = [0.5, 1.0]
//! probes = [0.0, 1.0, 2.0]
//! routes = ["spectral", "mellin", "foxh"]
//!
//! [output]
//! path = "green.csv"
//! plot = "plots/green"
//! ```
//!
//! Every key is optional; unknown keys are rejected. Command-line flags
//! override file values through [`Overrides`].

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fracops::{FractionalOrder, HilferOrder};
use crate::geometry::{build_grid, make_diffeomorphism, DeformedGrid, Diffeomorphism, GeometrySpec, SpatialWeight, TemporalPair};
use crate::solver::{GreenRoute, HilferProblem};
use std::sync::Arc;

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    /// Per-axis bounds in the deformed coordinate u; a single entry is
    /// repeated over all axes.
    pub bounds: Vec<[f64; 2]>,
    pub sizes: Vec<usize>,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            bounds: vec![[-12.0, 12.0]],
            sizes: vec![512],
        }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct RunSection {
    /// Evaluation times for `green`, `solve` and `hilfer`.
    pub t: Vec<f64>,
    /// Probe points along the first axis (`green`), or x > 0 for `mellin inverse`.
    pub probes: Vec<f64>,
    pub routes: Vec<String>,
    /// Test function for grid commands: gaussian, sech, lorentzian.
    pub function: String,
    /// Arguments for `mlf` (real parts) and `hfun`.
    pub z: Vec<f64>,
    /// Imaginary parts matching `z` for `mlf`; empty means real.
    pub z_im: Vec<f64>,
    /// Mittag-Leffler parameters.
    pub mlf_alpha: f64,
    pub mlf_mu: f64,
    /// `mellin`: "forward" or "inverse".
    pub mellin_mode: String,
    /// Real parts of the Mellin variable for `mellin forward`.
    pub mellin_s: Vec<f64>,
    /// Strip [sigma_min, sigma_max, abscissa] for `mellin inverse`.
    pub mellin_strip: [f64; 3],
    /// Temporal signal for `hilfer`: psi = gamma^k / rho.
    pub signal_power: f64,
    pub tolerance: f64,
}

impl Default for RunSection {
    fn default() -> Self {
        RunSection {
            t: vec![1.0],
            probes: vec![0.0, 1.0, 2.0],
            routes: vec!["spectral".into(), "mellin".into(), "foxh".into()],
            function: "gaussian".into(),
            z: vec![-1.0],
            z_im: Vec::new(),
            mlf_alpha: 1.0,
            mlf_mu: 1.0,
            mellin_mode: "forward".into(),
            mellin_s: vec![0.5, 1.0, 2.0],
            mellin_strip: [0.0, 8.0, 1.0],
            signal_power: 1.0,
            tolerance: 1e-7,
        }
    }
}

#[derive(Clone, Debug, Default, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    /// CSV destination; stdout when absent.
    pub path: Option<PathBuf>,
    /// Prefix for `.dat` plot files and the SVG profile.
    pub plot: Option<PathBuf>,
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub geometry: String,
    pub geometry_params: Vec<f64>,
    pub n: usize,
    pub weight: String,
    pub weight_params: Vec<f64>,
    pub gamma: String,
    pub gamma_params: Vec<f64>,
    pub rho: String,
    pub rho_params: Vec<f64>,
    pub rho_at_zero: f64,
    pub alpha: f64,
    pub beta: f64,
    pub s: f64,
    pub lambda: f64,
    pub grid: GridConfig,
    pub run: RunSection,
    pub output: OutputSection,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            geometry: "identity".into(),
            geometry_params: Vec::new(),
            n: 1,
            weight: "constant".into(),
            weight_params: vec![1.0],
            gamma: "identity".into(),
            gamma_params: Vec::new(),
            rho: "one".into(),
            rho_params: Vec::new(),
            rho_at_zero: 1.0,
            alpha: 1.0,
            beta: 1.0,
            s: 1.0,
            lambda: 1.0,
            grid: GridConfig::default(),
            run: RunSection::default(),
            output: OutputSection::default(),
        }
    }
}

/// Flag values that take precedence over the file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub geometry: Option<String>,
    pub geometry_params: Option<Vec<f64>>,
    pub n: Option<usize>,
    pub weight: Option<String>,
    pub weight_params: Option<Vec<f64>>,
    pub gamma: Option<String>,
    pub gamma_params: Option<Vec<f64>>,
    pub rho: Option<String>,
    pub rho_params: Option<Vec<f64>>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub s: Option<f64>,
    pub lambda: Option<f64>,
    pub bounds: Option<Vec<f64>>,
    pub sizes: Option<Vec<usize>>,
    pub t: Option<Vec<f64>>,
    pub probes: Option<Vec<f64>>,
    pub routes: Option<Vec<String>>,
    pub function: Option<String>,
    pub z: Option<Vec<f64>>,
    pub z_im: Option<Vec<f64>>,
    pub mu: Option<f64>,
    pub mellin_mode: Option<String>,
    pub mellin_s: Option<Vec<f64>>,
    pub output: Option<PathBuf>,
    pub plot: Option<PathBuf>,
}

macro_rules! take {
    ($from:expr, $to:expr) => {
        if let Some(v) = $from {
            $to = v;
        }
    };
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    /// Applies flag overrides. `mlf` reads its order from `--alpha`, so the
    /// alpha flag also sets `run.mlf_alpha`.
    pub fn apply(&mut self, o: Overrides) -> Result<()> {
        take!(o.geometry, self.geometry);
        take!(o.geometry_params, self.geometry_params);
        take!(o.n, self.n);
        take!(o.weight, self.weight);
        take!(o.weight_params, self.weight_params);
        take!(o.gamma, self.gamma);
        take!(o.gamma_params, self.gamma_params);
        take!(o.rho, self.rho);
        take!(o.rho_params, self.rho_params);
        if let Some(a) = o.alpha {
            self.alpha = a;
            self.run.mlf_alpha = a;
        }
        take!(o.beta, self.beta);
        take!(o.s, self.s);
        take!(o.lambda, self.lambda);
        if let Some(b) = o.bounds {
            if b.len() % 2 != 0 || b.is_empty() {
                return Err(Error::Config("--bounds takes pairs lo,hi".into()));
            }
            self.grid.bounds = b.chunks(2).map(|c| [c[0], c[1]]).collect();
        }
        take!(o.sizes, self.grid.sizes);
        take!(o.t, self.run.t);
        take!(o.probes, self.run.probes);
        take!(o.routes, self.run.routes);
        take!(o.function, self.run.function);
        take!(o.z, self.run.z);
        take!(o.z_im, self.run.z_im);
        take!(o.mu, self.run.mlf_mu);
        take!(o.mellin_mode, self.run.mellin_mode);
        take!(o.mellin_s, self.run.mellin_s);
        if o.output.is_some() {
            self.output.path = o.output;
        }
        if o.plot.is_some() {
            self.output.plot = o.plot;
        }
        Ok(())
    }

    /// Range and catalog checks run before dispatch.
    pub fn validate(&self) -> Result<()> {
        let cfg = |m: String| Err(Error::Config(m));
        if !(self.alpha > 0.0 && self.alpha <= 2.0) {
            return cfg(format!("alpha must lie in (0, 2], got {}", self.alpha));
        }
        if !(0.0..=1.0).contains(&self.beta) {
            return cfg(format!("beta must lie in [0, 1], got {}", self.beta));
        }
        if !(self.s > 0.0 && self.s <= 1.0) {
            return cfg(format!("s must lie in (0, 1], got {}", self.s));
        }
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return cfg(format!("lambda must be positive, got {}", self.lambda));
        }
        if !(1..=3).contains(&self.n) {
            return cfg(format!("n must be 1, 2 or 3, got {}", self.n));
        }
        if !(self.rho_at_zero > 0.0) {
            return cfg(format!("rho_at_zero must be positive, got {}", self.rho_at_zero));
        }
        if self.run.t.iter().any(|&t| !(t > 0.0 && t.is_finite())) {
            return cfg("every t must be positive".into());
        }
        let axes = |len: usize, what: &str| {
            if len == 1 || len == self.n {
                Ok(())
            } else {
                Err(Error::Config(format!("grid.{what} needs 1 or n = {} entries, got {len}", self.n)))
            }
        };
        axes(self.grid.bounds.len(), "bounds")?;
        axes(self.grid.sizes.len(), "sizes")?;
        if self.grid.bounds.iter().any(|b| !(b[0] < b[1])) {
            return cfg("grid bounds need lo < hi".into());
        }
        if self.grid.sizes.iter().any(|&s| s < 2) {
            return cfg("grid sizes must be at least 2".into());
        }
        if !self.run.z_im.is_empty() && self.run.z_im.len() != self.run.z.len() {
            return cfg("run.z_im must match run.z in length".into());
        }
        for r in &self.run.routes {
            GreenRoute::parse(r).map_err(|e| Error::Config(e.to_string()))?;
        }
        test_function(&self.run.function)?;
        // Catalog lookups surface unknown names here.
        self.diffeomorphism()?;
        self.spatial_weight()?;
        self.temporal_pair()?;
        Ok(())
    }

    pub fn diffeomorphism(&self) -> Result<Diffeomorphism> {
        make_diffeomorphism(GeometrySpec::catalog(&self.geometry, &self.geometry_params, self.n))
    }

    pub fn spatial_weight(&self) -> Result<SpatialWeight> {
        SpatialWeight::from_catalog(&self.weight, &self.weight_params)
    }

    pub fn temporal_pair(&self) -> Result<TemporalPair> {
        TemporalPair::from_catalog(&self.gamma, &self.gamma_params, &self.rho, &self.rho_params, Some(self.rho_at_zero))
    }

    pub fn grid(&self) -> Result<Arc<DeformedGrid>> {
        let bounds: Vec<(f64, f64)> = (0..self.n)
            .map(|j| {
                let b = self.grid.bounds[j.min(self.grid.bounds.len() - 1)];
                (b[0], b[1])
            })
            .collect();
        let sizes: Vec<usize> = (0..self.n)
            .map(|j| self.grid.sizes[j.min(self.grid.sizes.len() - 1)])
            .collect();
        build_grid(&self.diffeomorphism()?, &bounds, &sizes)
    }

    pub fn problem(&self) -> Result<HilferProblem> {
        HilferProblem::new(
            HilferOrder::new(self.alpha, self.beta)?,
            FractionalOrder::new(self.s)?,
            self.lambda,
            self.diffeomorphism()?,
            self.spatial_weight()?,
            self.temporal_pair()?,
        )
    }

    pub fn routes(&self) -> Result<Vec<GreenRoute>> {
        self.run.routes.iter().map(|r| GreenRoute::parse(r)).collect()
    }

    /// Canonical serialization, used for the config hash in table metadata.
    pub fn canonical(&self) -> String {
        toml::to_string(self).unwrap_or_default()
    }
}

/// Grid test functions, evaluated at the physical point x.
pub fn test_function(name: &str) -> Result<fn(&[f64]) -> f64> {
    fn gaussian(x: &[f64]) -> f64 {
        (-x.iter().map(|v| v * v).sum::<f64>()).exp()
    }
    fn sech(x: &[f64]) -> f64 {
        x.iter().map(|v| 1.0 / v.cosh()).product()
    }
    fn lorentzian(x: &[f64]) -> f64 {
        1.0 / (1.0 + x.iter().map(|v| v * v).sum::<f64>())
    }
    match name {
        "gaussian" => Ok(gaussian),
        "sech" => Ok(sech),
        "lorentzian" => Ok(lorentzian),
        other => Err(Error::UnknownCatalog {
            kind: "function",
            name: other.to_string(),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_fills_defaults() {
        let c = RunConfig::from_toml_str("geometry = \"identity\"\nn = 1\nalpha = 1\nbeta = 1\ns = 1\nlambda = 1\n").unwrap();
        c.validate().unwrap();
        assert_eq!(c.grid.bounds, vec![[-12.0, 12.0]]);
        assert_eq!(c.grid.sizes, vec![512]);
        assert_eq!(c.rho_at_zero, 1.0);
    }

    #[test]
    fn alpha_out_of_range_names_the_constraint() {
        let c = RunConfig::from_toml_str("alpha = 2.5").unwrap();
        let err = c.validate().unwrap_err();
        assert!(err.to_string().contains("alpha must lie in (0, 2]"), "{err}");
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn unknown_keys_and_types_are_config_errors() {
        let e = RunConfig::from_toml_str("alpah = 1.0").unwrap_err();
        assert!(matches!(e, Error::Config(_)));
        assert!(e.to_string().contains("alpah"));
        let e = RunConfig::from_toml_str("[grid]\nsizes = \"many\"").unwrap_err();
        assert!(e.to_string().contains("line"), "{e}");
    }

    #[test]
    fn flags_override_file() {
        let mut c = RunConfig::from_toml_str("alpha = 0.5\n[run]\nt = [2.0]").unwrap();
        c.apply(Overrides {
            alpha: Some(1.5),
            t: Some(vec![0.25, 0.5]),
            ..Default::default()
        })
        .unwrap();
        assert_eq!(c.alpha, 1.5);
        assert_eq!(c.run.t, vec![0.25, 0.5]);
    }

    #[test]
    fn cubic_grid_nodes_solve_the_cubic() {
        let c = RunConfig::from_toml_str("geometry = \"cubic\"\n[grid]\nbounds = [[-2.0, 2.0]]\nsizes = [16]").unwrap();
        c.validate().unwrap();
        let g = c.grid().unwrap();
        for k in 0..g.len() {
            let (x, u) = (g.x(k)[0], g.u(k)[0]);
            assert!((x * x * x + x - u).abs() < 1e-12);
        }
    }

    #[test]
    fn unknown_catalog_is_rejected() {
        let c = RunConfig::from_toml_str("geometry = \"torus\"").unwrap();
        assert_eq!(c.validate().unwrap_err().exit_code(), 2);
    }
}
