//! Incoherent averaging of scattering observables over momentum and
//! photon-number fluctuations.

use log::warn;

use crate::error::{EnsembleError, ScatteringError};
use crate::model::PhotonDistribution;
use crate::quadrature::GaussLegendre;
use crate::scattering::{binary_entropy, BareCoefficients};

/// Smallest momentum retained when a distribution reaches `k <= 0`.
pub const K_MIN: f64 = 1e-6;
/// Half-width of the quadrature support in standard deviations.
pub const SUPPORT_SIGMAS: f64 = 6.0;

const PANEL_ORDER: usize = 16;
const MIN_PANELS: usize = 8;
const MAX_PANELS: usize = 1 << 14;

/// Gaussian momentum distribution of an incident wave packet.
///
/// The amplitude is `(1/(pi dk^2))^{1/4} exp(-(k-k0)^2 / (4 dk^2))`; its
/// square is used as a normal density with standard deviation `dk`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentumDistribution {
    pub k0: f64,
    pub dk: f64,
}

impl MomentumDistribution {
    pub fn new(k0: f64, dk: f64) -> Result<Self, EnsembleError> {
        if !(k0.is_finite() && k0 > 0.0) {
            return Err(EnsembleError::InvalidDistribution(format!(
                "central momentum must be finite and positive, got {k0}"
            )));
        }
        if !(dk.is_finite() && dk >= 0.0) {
            return Err(EnsembleError::InvalidDistribution(format!(
                "momentum width must be finite and non-negative, got {dk}"
            )));
        }
        Ok(Self { k0, dk })
    }

    /// Sharp momentum.
    pub fn delta(k0: f64) -> Result<Self, EnsembleError> {
        Self::new(k0, 0.0)
    }

    /// Width as a fraction of the centre, `dk = fraction * k0`.
    pub fn relative(k0: f64, fraction: f64) -> Result<Self, EnsembleError> {
        Self::new(k0, fraction * k0)
    }

    /// Normal probability density with standard deviation `dk`.
    pub fn density(&self, k: f64) -> f64 {
        let u = (k - self.k0) / self.dk;
        (-0.5 * u * u).exp() / (self.dk * (2.0 * std::f64::consts::PI).sqrt())
    }

    /// Quadrature support `[max(K_MIN, k0 - 6 dk), k0 + 6 dk]`.
    pub fn support(&self) -> (f64, f64) {
        (
            (self.k0 - SUPPORT_SIGMAS * self.dk).max(K_MIN),
            self.k0 + SUPPORT_SIGMAS * self.dk,
        )
    }

    /// Probability mass at `k < K_MIN`, discarded before renormalizing.
    pub fn nonpositive_mass(&self) -> f64 {
        if self.dk == 0.0 {
            return 0.0;
        }
        0.5 * libm::erfc((self.k0 - K_MIN) / (self.dk * std::f64::consts::SQRT_2))
    }
}

/// Momentum- and/or photon-averaged squared coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EnsembleResult {
    pub reflect_e: f64,
    pub reflect_g: f64,
    pub transmit_e: f64,
    pub transmit_g: f64,
    /// Momentum mass at `k <= 0` dropped before renormalization.
    pub truncated_mass: f64,
}

impl EnsembleResult {
    pub fn from_bare(b: &BareCoefficients) -> Self {
        Self {
            reflect_e: b.r_e.norm_sqr(),
            reflect_g: b.r_g.norm_sqr(),
            transmit_e: b.t_e.norm_sqr(),
            transmit_g: b.t_g.norm_sqr(),
            truncated_mass: 0.0,
        }
    }

    pub fn transmission(&self) -> f64 {
        self.transmit_e + self.transmit_g
    }

    pub fn reflection(&self) -> f64 {
        self.reflect_e + self.reflect_g
    }

    pub fn total(&self) -> f64 {
        self.transmission() + self.reflection()
    }

    /// `(P_e, P_g)`.
    pub fn populations(&self) -> (f64, f64) {
        (
            self.reflect_e + self.transmit_e,
            self.reflect_g + self.transmit_g,
        )
    }

    pub fn entropy(&self) -> f64 {
        ensemble_entropy(self)
    }
}

/// Averages `|R_e|^2, |R_g|^2, |T_e|^2, |T_g|^2` over the momentum density.
///
/// Composite Gauss-Legendre quadrature on the support; the panel count is
/// doubled until all four averages change by less than `tol`. A zero width
/// returns `coeff_fn(k0)` exactly. When more than `tol` of the distribution
/// sits at `k <= 0` a warning is logged; the remainder is renormalized.
pub fn momentum_average<F>(
    coeff_fn: F,
    dist: &MomentumDistribution,
    tol: f64,
) -> Result<EnsembleResult, EnsembleError>
where
    F: Fn(f64) -> Result<BareCoefficients, ScatteringError>,
{
    if dist.dk == 0.0 {
        return Ok(EnsembleResult::from_bare(&coeff_fn(dist.k0)?));
    }
    let truncated = dist.nonpositive_mass();
    if truncated > tol {
        warn!(
            "momentum distribution k0 = {}, dk = {} has {truncated:.3e} of its mass at k <= 0; truncated and renormalized",
            dist.k0, dist.dk
        );
    }
    let rule = GaussLegendre::new(PANEL_ORDER);
    let (a, b) = dist.support();
    let mut panels = MIN_PANELS;
    let mut previous = average_on_panels(&coeff_fn, dist, &rule, a, b, panels)?;
    loop {
        panels *= 2;
        let current = average_on_panels(&coeff_fn, dist, &rule, a, b, panels)?;
        let change = max_change(&previous, &current);
        if change < tol {
            return Ok(EnsembleResult {
                truncated_mass: truncated,
                ..current
            });
        }
        if panels >= MAX_PANELS {
            return Err(EnsembleError::QuadratureNotConverged { tol, change });
        }
        previous = current;
    }
}

fn max_change(a: &EnsembleResult, b: &EnsembleResult) -> f64 {
    [
        a.reflect_e - b.reflect_e,
        a.reflect_g - b.reflect_g,
        a.transmit_e - b.transmit_e,
        a.transmit_g - b.transmit_g,
    ]
    .iter()
    .fold(0.0, |m, d| m.max(d.abs()))
}

fn average_on_panels<F>(
    coeff_fn: &F,
    dist: &MomentumDistribution,
    rule: &GaussLegendre,
    a: f64,
    b: f64,
    panels: usize,
) -> Result<EnsembleResult, EnsembleError>
where
    F: Fn(f64) -> Result<BareCoefficients, ScatteringError>,
{
    let width = (b - a) / panels as f64;
    let mut acc = EnsembleResult::default();
    let mut mass = 0.0;
    for p in 0..panels {
        let lo = a + width * p as f64;
        for (k, w) in rule.nodes_on(lo, lo + width) {
            let weight = w * dist.density(k);
            let c = coeff_fn(k)?;
            acc.reflect_e += weight * c.r_e.norm_sqr();
            acc.reflect_g += weight * c.r_g.norm_sqr();
            acc.transmit_e += weight * c.t_e.norm_sqr();
            acc.transmit_g += weight * c.t_g.norm_sqr();
            mass += weight;
        }
    }
    acc.reflect_e /= mass;
    acc.reflect_g /= mass;
    acc.transmit_e /= mass;
    acc.transmit_g /= mass;
    Ok(acc)
}

/// Quantities that can be averaged with probability weights.
pub trait Weighted: Sized {
    fn zero() -> Self;
    fn add_scaled(&mut self, weight: f64, other: &Self);
}

impl Weighted for f64 {
    fn zero() -> Self {
        0.0
    }

    fn add_scaled(&mut self, weight: f64, other: &Self) {
        *self += weight * other;
    }
}

impl Weighted for EnsembleResult {
    fn zero() -> Self {
        Self::default()
    }

    fn add_scaled(&mut self, weight: f64, other: &Self) {
        self.reflect_e += weight * other.reflect_e;
        self.reflect_g += weight * other.reflect_g;
        self.transmit_e += weight * other.transmit_e;
        self.transmit_g += weight * other.transmit_g;
        self.truncated_mass = self.truncated_mass.max(other.truncated_mass);
    }
}

/// `sum_n w(n) per_n(n)` over a photon distribution, in ascending `n`.
pub fn photon_average<T, E, F>(mut per_n: F, dist: &PhotonDistribution) -> Result<T, E>
where
    T: Weighted,
    F: FnMut(u32) -> Result<T, E>,
{
    let mut acc = T::zero();
    for &(n, w) in &dist.weights {
        acc.add_scaled(w, &per_n(n)?);
    }
    Ok(acc)
}

/// Binary entropy of the averaged populations.
pub fn ensemble_entropy(res: &EnsembleResult) -> f64 {
    let (pe, pg) = res.populations();
    let total = pe + pg;
    if total <= 0.0 {
        return 0.0;
    }
    binary_entropy((pe / total).clamp(0.0, 1.0))
}
