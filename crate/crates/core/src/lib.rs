//! Walk-type zeta functions of coined walks on the torus.

pub mod coins;
pub mod error;
pub mod kernel;
pub mod linalg;
pub mod symbol;
pub mod walk;
pub mod zeta;

pub use error::{Error, Result};
