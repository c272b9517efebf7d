//! Direct solver for the variable-coefficient Helmholtz equation
//! `β(x) v + Δv/κ² = g` with first-order non-reflecting boundaries.
//!
//! The inverse operator is applied as two passes of `(β + Δ/κ²)^{-1/2}`,
//! each evaluated by the operator Fourier transform: a paraxial pseudo-time
//! march whose snapshots are combined with closed-form Fresnel weights.

pub mod config;
pub mod converge;
pub mod demos;
pub mod error;
pub mod grid;
pub mod helmholtz;
pub mod io;
pub mod oracle;
pub mod paraxial;
pub mod quadrature;
pub mod raster;
pub mod schedule;
pub mod special;

pub use error::{OftError, Result};
pub use grid::{ComplexField, Grid, RefractionField};
