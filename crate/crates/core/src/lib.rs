//! Exact computations for parabolic multiplicative affine Springer fibers.

pub mod affine_weyl;
pub mod error;
pub mod intmat;
pub mod invariants;
pub mod laurent;
pub mod loop_group;
pub mod oracle;
pub mod root_data;
pub mod selftest;
pub mod vinberg;

pub use error::{Error, Result};
