pub mod cli;
pub mod data;
pub mod delpezzo;
pub mod error;
pub mod exactmath;
pub mod invariants;
pub mod lattice;
pub mod scenarios;
pub mod zariski;

pub use error::{Error, Result};
pub use exactmath::Rational;
