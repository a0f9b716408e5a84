//! Exact computation of limiting mixed Hodge structures for one-parameter
//! simple-normal-crossing degenerations, with numerical checks of the
//! residue pairing constants on model charts.

pub mod exactcore;
pub mod fixtures;
pub mod dmodlocal;
pub mod error;
pub mod hlcohomology;
pub mod hodgelefschetz;
pub mod mellinverify;
pub mod sncdegeneration;
pub mod weightfilt;

pub use error::{Error, Result};
