//! Fractional s-mass of codimension-two surfaces: competitors, linking and
//! degree checks, fractional energies, lattice energies and minimization.

// `!(x > 0.0)` is used on purpose so that NaN inputs are rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod discrete;
pub mod energy;
pub mod error;
pub mod fields;
pub mod geom;
pub mod io;
pub mod linkdeg;
pub mod minimize;
pub mod quad;
pub mod special;

pub use error::{Error, Result};
