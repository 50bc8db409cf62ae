//! Fractional operators: spatial (weighted fractional Laplacian, Sobolev
//! norms) and temporal (weighted γ-integrals, Hilfer derivatives, the
//! generalized Laplace transform).

pub mod spatial;
pub mod temporal;

use serde::Serialize;

use crate::error::{Error, Result};

pub use spatial::{
    fractional_laplacian_singular, fractional_laplacian_singular_with, fractional_laplacian_spectral,
    hypersingular_constant, sobolev_norm, SingularBoundary,
};
pub use temporal::{
    generalized_laplace, generalized_laplace_with, weighted_fractional_integral, weighted_hilfer_derivative, TimeSignal,
};

/// Spatial order s ∈ (0, 1].
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FractionalOrder(f64);

impl FractionalOrder {
    pub fn new(s: f64) -> Result<Self> {
        if s > 0.0 && s <= 1.0 {
            Ok(FractionalOrder(s))
        } else {
            Err(Error::invalid(format!("s must lie in (0, 1], got {s}")))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Temporal order α ∈ (0, 2] with type β ∈ [0, 1]; m = ⌈α⌉ and the
/// singularity order μ = α + β(m - α) are derived.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HilferOrder {
    alpha: f64,
    beta: f64,
    m: u32,
    mu: f64,
}

impl HilferOrder {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 2.0) {
            return Err(Error::invalid(format!("alpha must lie in (0, 2], got {alpha}")));
        }
        if !(0.0..=1.0).contains(&beta) {
            return Err(Error::invalid(format!("beta must lie in [0, 1], got {beta}")));
        }
        let m = alpha.ceil() as u32;
        let mu = alpha + beta * (m as f64 - alpha);
        Ok(HilferOrder { alpha, beta, m, mu })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
    pub fn beta(&self) -> f64 {
        self.beta
    }
    pub fn m(&self) -> u32 {
        self.m
    }
    pub fn mu(&self) -> f64 {
        self.mu
    }
    /// Order (1-β)(m-α) of the integral applied first.
    pub fn inner_order(&self) -> f64 {
        (1.0 - self.beta) * (self.m as f64 - self.alpha)
    }
    /// Order β(m-α) of the integral applied last.
    pub fn outer_order(&self) -> f64 {
        self.beta * (self.m as f64 - self.alpha)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mu_limits() {
        let rl = HilferOrder::new(0.6, 0.0).unwrap();
        assert_eq!(rl.mu(), 0.6);
        let caputo = HilferOrder::new(1.4, 1.0).unwrap();
        assert_eq!(caputo.m(), 2);
        assert_eq!(caputo.mu(), 2.0);
        let err = HilferOrder::new(2.5, 0.5).unwrap_err().to_string();
        assert!(err.contains("alpha must lie in (0, 2]"));
        assert!(FractionalOrder::new(0.0).is_err());
        assert!(FractionalOrder::new(1.0).is_ok());
    }
}
