//! Numerical laboratory for ultracold atoms scattering off a cavity mode
//! (the mazer): closed-form dressed coefficients for the meza and `sech^2`
//! couplings, incoherent averaging over momentum and photon-number
//! fluctuations, and a split-operator wave-packet propagator for arbitrary
//! coupling profiles and detunings.

pub mod ensemble;
pub mod error;
pub mod experiments;
pub mod gamma;
pub mod model;
pub mod output;
pub mod propagator;
pub mod quadrature;
pub mod scattering;

pub use ensemble::{EnsembleResult, MomentumDistribution};
pub use error::{EnsembleError, GammaError, ModelError, PropagatorError, ScatteringError};
pub use model::{ModeProfile, PhotonDistribution, PhotonStatistics};
pub use scattering::{BareCoefficients, DressedCoefficients};
