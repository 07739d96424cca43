//! Relative particle-number squeezing of Bogoliubov excitations in a
//! homogeneous condensate driven by two-laser stimulated light scattering.
//!
//! The crate is organised bottom-up:
//!
//! - [`units`]: laboratory parameters and the derived scales n0, k0, E0, Ω̃
//! - [`bogoliubov`]: u, v, β and ω at dimensionless momentum y = |k|/k0
//! - [`gaussian`]: Gaussian states, symplectic flow, Wick moments
//! - [`channels`]: the pair-extraction and direct-Bragg channels
//! - [`fock`]: brute-force truncated Fock-space oracle
//! - [`losses`]: Beliaev lifetime and rescattering estimates
//! - [`oracle`]: Gaussian-vs-Fock cross-validation harness
//! - [`cli`]: configuration, CSV output and the command front end

pub mod bogoliubov;
pub mod channels;
pub mod cli;
pub mod error;
pub mod fock;
pub mod gaussian;
pub mod losses;
pub mod oracle;
pub mod units;

pub use error::{Error, Result};
