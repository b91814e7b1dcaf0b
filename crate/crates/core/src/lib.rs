//! Exact harmonic and hyperharmonic numbers, r-Stirling cycle numbers, and
//! p-adic valuations, with O(log) digit-sum formulas for the 2-adic norm of
//! the whole harmonic family and search harnesses built on top of them.
//!
//! ```
//! use hyperharmonic::{fastnorm, hyper, Rational};
//!
//! let value = hyper::hyperharmonic_closed(18, 8);
//! assert_eq!(value, "10914604807/18564".parse::<Rational>().unwrap());
//! assert_eq!(fastnorm::hyperharmonic_norm2(18, 8).nu2, -2);
//! ```

pub mod error;
pub mod exact;
pub mod fastnorm;
pub mod hyper;
pub mod padic;
pub mod search;
pub mod verify;

pub use error::{Error, Result};
pub use exact::Rational;
pub use num_bigint::BigInt;
pub use padic::Valuation;
