//! Analytic constants and kernels.

pub mod binom;
pub mod constants;
pub mod eisenstein;
pub mod euler;
pub mod kernels;
pub mod mellin;
pub mod quad;
pub mod rho;
pub mod special;

use serde::Serialize;

/// A value with an absolute error bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Certified {
    pub value: f64,
    pub err: f64,
}

pub use binom::{i_of, i_series, j_of, j_series};
pub use constants::{c1k, c56, f_of, f_one_third, local_constant_c, secondary_constants, SecondaryConstants};
pub use eisenstein::eisenstein_kernel_sum;
pub use euler::{EulerProductSpec, GenSeries};
pub use kernels::{mellin_psi, psi_kernel, KernelKind, SmoothTestFunction};
pub use mellin::{mellin_phi, mellin_phi_numeric, mellin_phi_scaled};
pub use rho::{local_density_sum, rho_brute, rho_density};
pub use special::{gamma_real, zeta_real};
