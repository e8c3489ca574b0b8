//! Physical parameters shared by every other module: coupling profiles,
//! dressed-state geometry and initial photon statistics.
//!
//! Natural units are used throughout (`hbar = m = 1`), so momenta, couplings,
//! detunings, lengths and times are plain `f64` values.

use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_PI_4;

use crate::error::ModelError;

/// Default truncation mass for photon distributions.
pub const DEFAULT_PHOTON_TRUNCATION: f64 = 1e-10;

/// Spatial shape of the atom-field coupling `lambda(z)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ModeProfile {
    /// Top-hat: `lambda0` on `0 < z < length`, zero elsewhere.
    Meza { lambda0: f64, length: f64 },
    /// `lambda0 * sech^2(z / waist)`.
    Sech { lambda0: f64, waist: f64 },
    /// `lambda0 * exp(-z^2 / waist^2)`.
    Gaussian { lambda0: f64, waist: f64 },
    /// Linearly interpolated samples, zero outside the sampled range.
    Custom(TabulatedProfile),
}

/// Tabulated coupling samples at strictly ascending positions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TabulatedProfile {
    pub z: Vec<f64>,
    pub lambda: Vec<f64>,
}

impl TabulatedProfile {
    pub fn new(z: Vec<f64>, lambda: Vec<f64>) -> Result<Self, ModelError> {
        let table = Self { z, lambda };
        table.validate()?;
        Ok(table)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if self.z.len() != self.lambda.len() {
            return Err(ModelError::InvalidProfile(format!(
                "{} positions but {} couplings",
                self.z.len(),
                self.lambda.len()
            )));
        }
        if self.z.len() < 2 {
            return Err(ModelError::InvalidProfile(
                "at least two samples are required".into(),
            ));
        }
        if self.z.iter().chain(&self.lambda).any(|v| !v.is_finite()) {
            return Err(ModelError::InvalidProfile("non-finite sample".into()));
        }
        if self.lambda.iter().any(|&l| l < 0.0) {
            return Err(ModelError::InvalidProfile("negative coupling sample".into()));
        }
        if self.z.windows(2).any(|w| w[1] <= w[0]) {
            return Err(ModelError::InvalidProfile(
                "positions must be strictly ascending".into(),
            ));
        }
        Ok(())
    }

    fn eval(&self, z: f64) -> f64 {
        let first = self.z[0];
        let last = self.z[self.z.len() - 1];
        if z < first || z > last {
            return 0.0;
        }
        // index of the first sample strictly greater than z
        let hi = self.z.partition_point(|&zi| zi <= z);
        if hi == self.z.len() {
            return self.lambda[self.lambda.len() - 1];
        }
        let lo = hi - 1;
        let t = (z - self.z[lo]) / (self.z[hi] - self.z[lo]);
        self.lambda[lo] + t * (self.lambda[hi] - self.lambda[lo])
    }
}

impl ModeProfile {
    pub fn meza(lambda0: f64, length: f64) -> Result<Self, ModelError> {
        let p = ModeProfile::Meza { lambda0, length };
        p.validate()?;
        Ok(p)
    }

    pub fn sech(lambda0: f64, waist: f64) -> Result<Self, ModelError> {
        let p = ModeProfile::Sech { lambda0, waist };
        p.validate()?;
        Ok(p)
    }

    pub fn gaussian(lambda0: f64, waist: f64) -> Result<Self, ModelError> {
        let p = ModeProfile::Gaussian { lambda0, waist };
        p.validate()?;
        Ok(p)
    }

    pub fn custom(z: Vec<f64>, lambda: Vec<f64>) -> Result<Self, ModelError> {
        Ok(ModeProfile::Custom(TabulatedProfile::new(z, lambda)?))
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let (lambda0, scale) = match self {
            ModeProfile::Meza { lambda0, length } => (*lambda0, *length),
            ModeProfile::Sech { lambda0, waist } | ModeProfile::Gaussian { lambda0, waist } => {
                (*lambda0, *waist)
            }
            ModeProfile::Custom(table) => return table.validate(),
        };
        if !(lambda0.is_finite() && lambda0 >= 0.0) {
            return Err(ModelError::InvalidProfile(format!(
                "coupling must be finite and non-negative, got {lambda0}"
            )));
        }
        if !(scale.is_finite() && scale > 0.0) {
            return Err(ModelError::InvalidProfile(format!(
                "length scale must be finite and positive, got {scale}"
            )));
        }
        Ok(())
    }

    /// Coupling strength `lambda(z)`.
    pub fn eval(&self, z: f64) -> f64 {
        match self {
            ModeProfile::Meza { lambda0, length } => {
                if z > 0.0 && z < *length {
                    *lambda0
                } else {
                    0.0
                }
            }
            ModeProfile::Sech { lambda0, waist } => {
                let c = (z / waist).cosh();
                // cosh overflows to inf far out, giving exactly zero
                lambda0 / (c * c)
            }
            ModeProfile::Gaussian { lambda0, waist } => {
                let u = z / waist;
                lambda0 * (-u * u).exp()
            }
            ModeProfile::Custom(table) => table.eval(z),
        }
    }

    /// Peak coupling.
    pub fn lambda0(&self) -> f64 {
        match self {
            ModeProfile::Meza { lambda0, .. }
            | ModeProfile::Sech { lambda0, .. }
            | ModeProfile::Gaussian { lambda0, .. } => *lambda0,
            ModeProfile::Custom(table) => table.lambda.iter().copied().fold(0.0, f64::max),
        }
    }

    /// Characteristic length (meza length, waist, or finest sample spacing).
    pub fn length_scale(&self) -> f64 {
        match self {
            ModeProfile::Meza { length, .. } => *length,
            ModeProfile::Sech { waist, .. } | ModeProfile::Gaussian { waist, .. } => *waist,
            ModeProfile::Custom(table) => table
                .z
                .windows(2)
                .map(|w| w[1] - w[0])
                .fold(f64::INFINITY, f64::min),
        }
    }

    /// Interval outside of which `lambda(z) <= rel * lambda0`.
    ///
    /// For `lambda0 == 0` the interval is degenerate at the origin.
    pub fn interaction_interval(&self, rel: f64) -> (f64, f64) {
        let rel = rel.clamp(f64::MIN_POSITIVE, 1.0);
        match self {
            ModeProfile::Meza { length, .. } => (0.0, *length),
            ModeProfile::Sech { waist, .. } => {
                // sech^2(u) = rel  <=>  cosh(u) = 1/sqrt(rel)
                let half = waist * (1.0 / rel.sqrt()).acosh();
                (-half, half)
            }
            ModeProfile::Gaussian { waist, .. } => {
                let half = waist * (1.0 / rel).ln().sqrt();
                (-half, half)
            }
            ModeProfile::Custom(table) => {
                let threshold = rel * self.lambda0();
                let inside: Vec<f64> = table
                    .z
                    .iter()
                    .zip(&table.lambda)
                    .filter(|(_, &l)| l > threshold)
                    .map(|(&z, _)| z)
                    .collect();
                match (inside.first(), inside.last()) {
                    // widen by one sample spacing on each side: interpolation
                    // stays above threshold part of the way to the next sample
                    (Some(&a), Some(&b)) => {
                        let lo = table.z.partition_point(|&z| z < a).saturating_sub(1);
                        let hi = (table.z.partition_point(|&z| z <= b)).min(table.z.len() - 1);
                        (table.z[lo], table.z[hi])
                    }
                    _ => (0.0, 0.0),
                }
            }
        }
    }
}

/// Mixing angle of the dressed basis, `tan(2 theta) = 2 lambda sqrt(n+1) / detuning`.
///
/// Returns a value in `[0, pi/2]`; zero detuning gives `pi/4`.
pub fn mixing_angle(lambda: f64, n: u32, detuning: f64) -> Result<f64, ModelError> {
    if lambda == 0.0 && detuning == 0.0 {
        return Err(ModelError::DegenerateDressedBasis);
    }
    if detuning == 0.0 {
        return Ok(FRAC_PI_4);
    }
    let g = lambda * f64::from(n + 1).sqrt();
    Ok(0.5 * (2.0 * g).atan2(detuning))
}

/// Local generalized Rabi frequency `sqrt((detuning/2)^2 + lambda^2 (n+1))`.
pub fn rabi_frequency(lambda: f64, n: u32, detuning: f64) -> f64 {
    let half = 0.5 * detuning;
    (half * half + lambda * lambda * f64::from(n + 1)).sqrt()
}

/// Adiabatic potentials `(V+, V-)` at position `z` in manifold `n`.
pub fn adiabatic_potentials(profile: &ModeProfile, n: u32, detuning: f64, z: f64) -> (f64, f64) {
    let w = rabi_frequency(profile.eval(z), n, detuning);
    (w, -w)
}

/// Initial field statistics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "mean", rename_all = "lowercase")]
pub enum PhotonStatistics {
    Vacuum,
    Coherent(f64),
    Thermal(f64),
}

/// Truncated, renormalized photon-number distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct PhotonDistribution {
    pub kind: PhotonStatistics,
    pub truncation: f64,
    /// `(n, weight)` pairs with consecutive `n` starting at zero.
    pub weights: Vec<(u32, f64)>,
}

impl PhotonDistribution {
    pub fn vacuum() -> Self {
        Self {
            kind: PhotonStatistics::Vacuum,
            truncation: DEFAULT_PHOTON_TRUNCATION,
            weights: vec![(0, 1.0)],
        }
    }

    pub fn total(&self) -> f64 {
        self.weights.iter().map(|&(_, w)| w).sum()
    }

    pub fn mean(&self) -> f64 {
        self.weights.iter().map(|&(n, w)| f64::from(n) * w).sum()
    }
}

/// Photon-number weights for vacuum, coherent (Poisson) or thermal
/// (Bose-Einstein) fields, cut at the smallest `N` whose cumulative mass
/// reaches `1 - truncation` and renormalized.
pub fn photon_weights(
    kind: PhotonStatistics,
    truncation: f64,
) -> Result<PhotonDistribution, ModelError> {
    if !(truncation > 0.0 && truncation < 1.0) {
        return Err(ModelError::InvalidPhotonDistribution(format!(
            "truncation must lie in (0, 1), got {truncation}"
        )));
    }
    let mean = match kind {
        PhotonStatistics::Vacuum => 0.0,
        PhotonStatistics::Coherent(m) | PhotonStatistics::Thermal(m) => m,
    };
    if !(mean.is_finite() && mean >= 0.0) {
        return Err(ModelError::InvalidPhotonDistribution(format!(
            "mean photon number must be finite and non-negative, got {mean}"
        )));
    }
    if mean == 0.0 {
        return Ok(PhotonDistribution {
            kind,
            truncation,
            weights: vec![(0, 1.0)],
        });
    }

    let log_weight = |n: u32, prev: f64| -> f64 {
        let nf = f64::from(n);
        match kind {
            PhotonStatistics::Coherent(m) => {
                if n == 0 {
                    -m
                } else {
                    prev + m.ln() - nf.ln()
                }
            }
            PhotonStatistics::Thermal(m) => {
                if n == 0 {
                    -(m + 1.0).ln()
                } else {
                    prev + (m / (m + 1.0)).ln()
                }
            }
            PhotonStatistics::Vacuum => unreachable!(),
        }
    };

    let mut weights = Vec::new();
    let mut cumulative = 0.0;
    let mut log_w = 0.0;
    let mut n = 0u32;
    loop {
        log_w = log_weight(n, log_w);
        let w = log_w.exp();
        weights.push((n, w));
        cumulative += w;
        if cumulative >= 1.0 - truncation {
            break;
        }
        // rounding can stall the cumulative sum just short of the target;
        // once past the mode the remaining terms are negligible
        if f64::from(n) > mean && w < truncation * 1e-6 {
            break;
        }
        n = n.checked_add(1).ok_or_else(|| {
            ModelError::InvalidPhotonDistribution("photon number overflow".into())
        })?;
    }
    for (_, w) in weights.iter_mut() {
        *w /= cumulative;
    }
    Ok(PhotonDistribution {
        kind,
        truncation,
        weights,
    })
}
