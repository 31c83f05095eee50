//! Finite abelian groups: structure, Fourier analysis and image maps.

pub mod fft;
pub mod fourier;
pub mod group;
pub mod hom;
pub mod identities;
pub mod images;
pub mod snf;
pub mod subgroup;

pub use fourier::{fourier_c0, fourier_c0_dist, fourier_c0_with, max_dev, DistributionC0, FunctionC0, MeasureC0};
pub use group::{eval_char, FinAbGroup, GroupElement};
pub use hom::{direct_sum, fibered_product, GroupHom};
pub use images::*;
pub use snf::smith_normal_form;
pub use subgroup::{quotient, Subgroup};
