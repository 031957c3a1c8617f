pub mod arith;
pub mod error;
pub mod registry;

pub use error::{Error, Result};
pub mod dynamics;
pub mod parry;
pub mod germ;
pub mod puiseux;
pub mod zeta;
pub mod report;
pub mod checks;
