//! Zitterbewegung of a localized electron in a weak uniform magnetic field.
//!
//! Two descriptions are computed side by side: expectation values of a
//! Gaussian Dirac packet, and the classical Barut–Zanghi spinning particle.
//! Their frequency shifts under charge and spin reversal are then compared.
//!
//! Natural units throughout: ħ = c = m = 1, so the free Zitterbewegung
//! frequency is 2 and the reduced Compton wavelength is 1. The field enters
//! only through ε = −ω_c/ω_zbw.

// Guards written as `!(x > 0.0)` also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bz;
pub mod dirac_packet;
pub mod error;
pub mod fitting;
pub mod io;
pub mod quadrature;
pub mod quantum;
pub mod symmetry;
pub mod units;

pub use error::{Error, Result};
pub use units::{Charge, DimensionlessParams, Spin};
