//! Exact counting of quadratic irrationals in orbits of arithmetic groups and
//! of representations by binary quadratic forms, with the hyperbolic geometry
//! that predicts their growth.

pub mod bianchi;
pub mod counting;
pub mod error;
pub mod hypgeom;
pub mod matrix;
pub mod pell;
pub mod qforms;
pub mod quadfield;
pub mod quadirr;
pub mod real;

pub use error::{Error, Result};
