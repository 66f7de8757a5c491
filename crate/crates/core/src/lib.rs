//! Invariants, exhaustive exponential sums and congruence counts for
//! two-variable quasi-homogeneous integer polynomials.

pub mod error;
pub mod exhaustive;
pub mod funcfield;
pub mod numeric;
pub mod padic;
pub mod poly;
pub mod quasi;
pub mod sublevel;
pub mod upoly;
pub mod verify;

pub use error::{Error, Result};
pub use poly::{BivariatePoly, NewtonData, ParseError, Support};
