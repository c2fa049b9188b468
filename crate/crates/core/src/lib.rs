//! Multimeters, superchannels between them, their realizations, and exact
//! desk-scale deciders for triviality preservation and trash-and-prepare.

pub mod analysis;
pub mod densemat;
pub mod error;
pub mod feasibility;
pub mod par;
pub mod qcore;
pub mod random;
pub mod supermap;
pub mod tol;

pub use densemat::{CMat, C64};
pub use error::{Error, Result};
