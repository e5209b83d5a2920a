// `!(x > 0.0)` is how validation rejects NaN alongside the bad values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod flatcone;
pub mod invariants;
pub mod model;
pub mod numeric;
pub mod ode;
pub mod revsurface;

pub use error::{Error, Result};
