// Matrix code indexes rows and columns together; `!(a <= b)` guards are deliberate NaN checks.
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod exact;
pub mod interval;

pub use error::{Error, Result};
pub mod lattice;
pub mod enumerate;
pub mod exponents;
pub mod transfer;
pub mod constructions;
pub mod io;
