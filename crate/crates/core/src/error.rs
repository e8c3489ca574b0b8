use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("invalid mode profile: {0}")]
    InvalidProfile(String),
    #[error("dressed basis undefined for zero coupling and zero detuning")]
    DegenerateDressedBasis,
    #[error("invalid photon distribution: {0}")]
    InvalidPhotonDistribution(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GammaError {
    #[error("gamma function pole at {0}")]
    Pole(f64),
    #[error("non-finite gamma argument")]
    NonFinite,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScatteringError {
    #[error("incident momentum must be finite and positive, got {0}")]
    InvalidMomentum(f64),
    #[error("invalid scattering parameter: {0}")]
    InvalidParameter(String),
    #[error("population defect {0:e} exceeds tolerance")]
    UnitarityDefect(f64),
    #[error(transparent)]
    Gamma(#[from] GammaError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EnsembleError {
    #[error("invalid momentum distribution: {0}")]
    InvalidDistribution(String),
    #[error("quadrature did not reach tolerance {tol:e} (last change {change:e})")]
    QuadratureNotConverged { tol: f64, change: f64 },
    #[error(transparent)]
    Scattering(#[from] ScatteringError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PropagatorError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("grid too small: {0:e} of the initial packet lies outside the grid")]
    GridTooSmall(f64),
    #[error("invalid propagation config: {0}")]
    InvalidConfig(String),
    #[error("boundary contamination at t = {time}: edge mass {mass:e}")]
    BoundaryContamination { time: f64, mass: f64 },
    #[error("scattering not converged by t = {0}")]
    NotConverged(f64),
    #[error("collapse estimate requires packet width {width} below profile waist {waist}")]
    PacketTooWide { width: f64, waist: f64 },
    #[error("collapse estimate needs a Gaussian or sech profile")]
    UnsupportedProfile,
    #[error(transparent)]
    Model(#[from] ModelError),
}
