//! Special functions: complex Gamma, zeta helpers, Bessel J₀, Mittag-Leffler and Fox H.

pub mod bessel;
pub mod foxh;
pub mod gamma;
pub mod mittag_leffler;
pub mod zeta;

pub use bessel::bessel_j0;
pub use foxh::{
    check_convergence, fox_h_1232, mellin_barnes, ContourIntegral, ContourSpec, FoxHSpec, FoxValue,
    ValidityReport,
};
pub use gamma::{gamma, gamma_complex, ln_gamma, ln_gamma_complex, rgamma, rgamma_complex};
pub use mittag_leffler::{
    mittag_leffler, mittag_leffler_detailed, mittag_leffler_real, MlfEvaluation, MlfMethod,
};
pub use zeta::{hurwitz_zeta, riemann_zeta};
