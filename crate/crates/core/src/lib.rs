//! Exact perimeter and area scaling for self-similar constructions.
//!
//! Numbers live in ℚ(√3) ([`QuadExt`]) over a hybrid machine/big rational
//! ([`Rat`]), so every equality checked here is exact.

pub mod error;
pub mod geometry;
pub mod limits;
pub mod overlap;
pub mod params;
pub mod qfield;
pub mod rat;
pub mod registry;
pub mod render;
pub mod series;

pub use error::{Error, Result};
pub use limits::{ElementCap, DEFAULT_ELEMENT_CAP};
pub use qfield::QuadExt;
pub use rat::Rat;
