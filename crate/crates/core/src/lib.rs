pub mod cli;
pub mod elliptic;
pub mod error;
pub mod floquet;
pub mod jet;
pub mod potentials;
pub mod spectra;

pub use error::{Error, Result};
