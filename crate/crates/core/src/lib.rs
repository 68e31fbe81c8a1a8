//! Exact arithmetic and certificate checking for Diophantine constructions
//! over number fields and elliptic curves.

pub mod ball;
pub mod dioph;
pub mod divisors;
pub mod elliptic;
pub mod error;
pub mod intarith;
pub mod linalg;
pub mod modp;
pub mod numfield;
pub mod poly;
pub mod rat;
pub mod roots;
pub mod units;
pub mod zfactor;

pub use error::{Error, Result};
pub use rat::Rat;
