//! Multimode bosonic Gaussian states: symplectic operations, quadratic
//! Hamiltonian flow and number moments by Wick's theorem.
//!
//! Quadratures are x = (a + a†)/√2, p = (a − a†)/(i√2), interleaved as
//! (x1, p1, ..., xM, pM); the vacuum covariance is I/2.

mod quadratic;
mod quasiparticle;
mod registry;
mod state;
pub mod symplectic;

pub use quadratic::{
    evolve_between, evolve_quadratic, propagator, Component, Propagator, QuadraticForm,
    INTEGRATOR_TOLERANCE,
};
pub use quasiparticle::{bogoliubov_ground_state, BogoliubovMap};
pub use registry::{ModeRegistry, LABEL_TOLERANCE};
pub use state::{GaussianState, ROUNDOFF_FLOOR};
