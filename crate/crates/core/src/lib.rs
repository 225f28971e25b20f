//! Hardy-Hodge decomposition of Clifford-valued vector fields on periodic grids.

pub mod clifford;
pub mod error;
pub mod extension;
pub mod fft;
pub mod grid;
pub mod hodge;
pub mod io;
pub mod silent;
pub mod spectral;
pub mod suite;
pub mod synth;

pub use error::{Error, Result};
