//! Exact probabilistic Stirling, Bell and Fubini polynomials over
//! arbitrary-precision rationals, with independent computation routes and
//! checks of their series, determinant and polylogarithm representations.

pub mod error;
pub mod exactnum;
pub mod fubini;
pub mod identities;
pub mod moments;
pub mod par;
pub mod stirling;

pub use error::{Error, Result};
pub use exactnum::{RatPoly, Rational, TruncEGF};
pub use fubini::Route;
pub use moments::DistSpec;
pub use par::Execution;
