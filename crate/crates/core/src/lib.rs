//! Coupled-mode simulation of a levitated nanoparticle in an asymmetric
//! trap: non-Hermitian spectra, rotating-frame amplitude and phonon
//! dynamics, stochastic Langevin ensembles with g² coherence, and
//! frequency-domain force sensitivity.

pub mod cli;
pub mod coherence;
pub mod constants;
pub mod dynamics;
pub mod error;
pub mod langevin;
pub mod model;
pub mod ode;
pub mod sensing;
pub mod spectrum;

pub use error::{Error, Result};
pub use model::{derive_parameters, load_config, DerivedParams, Mode, SystemConfig};
