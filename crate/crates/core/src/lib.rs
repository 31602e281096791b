//! Class groups of imaginary quadratic fields `Q(sqrt(-d))` with `d ≡ 2 mod 4`,
//! Heegner points of their torsion classes, the diophantine parametrization of
//! `k`-torsion ideals, and the analytic constants governing their counts.

pub mod analytic;
pub mod arith;
pub mod census;
pub mod classgroup;
pub mod error;
pub mod heegner;
pub mod torsion;

pub use error::{Error, Result};
