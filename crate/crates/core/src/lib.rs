//! Compressed syndrome-measurement schedules for stabilizer codes.

pub mod error;
pub mod analyze;
pub mod circuits;
pub mod classical;
pub mod compress;
pub mod decode;
pub mod experiment;
pub mod gf2;
pub mod qcode;
pub mod sim;

pub use error::{Error, Result};
