//! Harmonic analysis on finite, one- and two-dimensional filtered abelian groups.

pub mod adelic;
pub mod archimed;
pub mod centext;
pub mod error;
pub mod filt1;
pub mod filt2;
pub mod finabel;
pub mod harm1;
pub mod harm2;
pub mod par;
pub mod report;
pub mod suites;
pub mod vmeas;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;

/// Integer matrix, row-major.
pub type IMat = Vec<Vec<i64>>;
