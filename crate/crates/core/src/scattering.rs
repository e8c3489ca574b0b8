//! Closed-form dressed scattering amplitudes at zero detuning.
//!
//! At `detuning = 0` the two dressed channels decouple and each scatters off
//! a real potential `+/- lambda(z) sqrt(n+1)`: a barrier for the `+` channel
//! and a well for the `-` channel. The amplitudes here refer to an atom
//! incident from the left with unit amplitude `e^{ikz}`.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::ScatteringError;
use crate::gamma::ln_gamma;

/// Tolerated population defect before entropy refuses to renormalize.
pub const POPULATION_TOLERANCE: f64 = 1e-9;

/// Below this `|k_n l|` the meza amplitudes switch to the series form of
/// `sin(x)/x`, which removes the `k = kappa_n` singularity.
const SINC_SERIES_THRESHOLD: f64 = 1e-3;

/// Wavenumbers of the two dressed channels for incident momentum `k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelWavenumbers {
    pub k: f64,
    /// `sqrt(k^2 - kappa_n^2)`, positive imaginary below threshold.
    pub k_plus: Complex64,
    /// `sqrt(k^2 + kappa_n^2)`, always real.
    pub k_minus: Complex64,
    /// `sqrt(2 lambda0)`.
    pub kappa: f64,
    /// `kappa (n+1)^{1/4}`.
    pub kappa_n: f64,
}

impl ChannelWavenumbers {
    pub fn new(k: f64, n: u32, lambda0: f64) -> Self {
        let kappa = (2.0 * lambda0).sqrt();
        let kappa_n = kappa * f64::from(n + 1).powf(0.25);
        let k2 = k * k;
        let q2 = kappa_n * kappa_n;
        // an exact +0 imaginary part pins the principal branch to +i
        let k_plus = Complex64::new(k2 - q2, 0.0).sqrt();
        let k_minus = Complex64::new(k2 + q2, 0.0).sqrt();
        Self {
            k,
            k_plus,
            k_minus,
            kappa,
            kappa_n,
        }
    }
}

/// `kappa_n = sqrt(2 lambda0) (n+1)^{1/4}`.
pub fn kappa_n(n: u32, lambda0: f64) -> f64 {
    (2.0 * lambda0).sqrt() * f64::from(n + 1).powf(0.25)
}

/// Dressed reflection and transmission amplitudes of one excitation manifold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DressedCoefficients {
    pub rho_plus: Complex64,
    pub rho_minus: Complex64,
    pub tau_plus: Complex64,
    pub tau_minus: Complex64,
}

impl DressedCoefficients {
    pub fn free() -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        Self {
            rho_plus: zero,
            rho_minus: zero,
            tau_plus: one,
            tau_minus: one,
        }
    }

    /// `(|rho+|^2 + |tau+|^2, |rho-|^2 + |tau-|^2)`.
    pub fn channel_flux(&self) -> (f64, f64) {
        (
            self.rho_plus.norm_sqr() + self.tau_plus.norm_sqr(),
            self.rho_minus.norm_sqr() + self.tau_minus.norm_sqr(),
        )
    }

    pub fn to_bare(&self) -> BareCoefficients {
        bare_from_dressed(self)
    }
}

/// Amplitudes in the bare basis `|n,e>`, `|n+1,g>` for an atom entering excited.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BareCoefficients {
    pub r_e: Complex64,
    pub r_g: Complex64,
    pub t_e: Complex64,
    pub t_g: Complex64,
}

impl BareCoefficients {
    pub fn transmission_probability(&self) -> f64 {
        transmission_probability(self)
    }

    pub fn reflection_probability(&self) -> f64 {
        self.r_e.norm_sqr() + self.r_g.norm_sqr()
    }

    /// Sum of all four probabilities; unity for a lossless scatterer.
    pub fn total(&self) -> f64 {
        self.reflection_probability() + self.transmission_probability()
    }

    /// `(P_e, P_g)` internal-state populations after scattering.
    pub fn populations(&self) -> (f64, f64) {
        (
            self.r_e.norm_sqr() + self.t_e.norm_sqr(),
            self.r_g.norm_sqr() + self.t_g.norm_sqr(),
        )
    }

    pub fn entropy(&self) -> Result<f64, ScatteringError> {
        entropy(self)
    }
}

/// Meza (top-hat) profile of height `lambda0` on `0 < z < length`.
///
/// The reflection amplitudes carry the phase reference of the printed
/// closed form, `rho = i Delta sin(k_n l) tau`, which corresponds to
/// measuring the reflected wave from the middle of the cavity; the
/// transmission amplitudes are independent of that choice.
pub fn meza_dressed(
    k: f64,
    n: u32,
    lambda0: f64,
    length: f64,
) -> Result<DressedCoefficients, ScatteringError> {
    check_momentum(k)?;
    check_nonneg("lambda0", lambda0)?;
    check_positive("length", length)?;
    let w = ChannelWavenumbers::new(k, n, lambda0);
    let (rho_plus, tau_plus) = meza_channel(k, w.k_plus, length);
    let (rho_minus, tau_minus) = meza_channel(k, w.k_minus, length);
    Ok(DressedCoefficients {
        rho_plus,
        rho_minus,
        tau_plus,
        tau_minus,
    })
}

fn sinc(x: Complex64) -> Complex64 {
    if x.norm() < SINC_SERIES_THRESHOLD {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sin() / x
    }
}

/// One square channel with internal momentum `kc`.
fn meza_channel(k: f64, kc: Complex64, length: f64) -> (Complex64, Complex64) {
    let i = Complex64::i();
    let x = kc * length;
    let phase = (-i * k * length).exp();
    if x.im > 20.0 {
        // deep tunnelling: cos and sin grow like e^{Im x}, so work with
        // tan(x) and 1/cos(x) written through the small factor e^{2ix}
        let small = (2.0 * i * x).exp();
        let tan = i * (1.0 - small) / (1.0 + small);
        let inv_cos = 2.0 * (i * x).exp() / (1.0 + small);
        let sigma_tan = 0.5 * (kc / k * tan + k * length * tan / x);
        let delta_tan = 0.5 * (kc / k * tan - k * length * tan / x);
        let denom = 1.0 - i * sigma_tan;
        let tau = phase * inv_cos / denom;
        let rho = i * delta_tan / denom * phase;
        return (rho, tau);
    }
    // (k / kc) sin(kc l) == k l sinc(kc l), finite at kc = 0
    let inv_term = k * length * sinc(x);
    let direct_term = kc / k * x.sin();
    let sigma_sin = 0.5 * (direct_term + inv_term);
    let delta_sin = 0.5 * (direct_term - inv_term);
    let tau = phase / (x.cos() - i * sigma_sin);
    let rho = i * delta_sin * tau;
    (rho, tau)
}

/// `sech^2` profile at zero detuning (Poschl-Teller barrier and well).
///
/// `tau = G(1/2 - i(kL + xi)) G(1/2 - i(kL - xi)) / (G(-ikL) G(1 - ikL))` and
/// `rho = [G(ikL) G(1 - ikL) / (G(1/2 + i xi) G(1/2 - i xi))] tau` with
/// `xi = sqrt(+/- 2 lambda0 L^2 sqrt(n+1) - 1/4)`. The prefactor of `rho`
/// is evaluated through the reflection formula as `-i cosh(pi xi) / sinh(pi k L)`.
pub fn sech_dressed(
    k: f64,
    n: u32,
    lambda0: f64,
    waist: f64,
) -> Result<DressedCoefficients, ScatteringError> {
    check_momentum(k)?;
    check_nonneg("lambda0", lambda0)?;
    check_positive("waist", waist)?;
    let strength = 2.0 * lambda0 * waist * waist * f64::from(n + 1).sqrt();
    let (rho_plus, tau_plus) = sech_channel(k * waist, strength)?;
    let (rho_minus, tau_minus) = sech_channel(k * waist, -strength)?;
    Ok(DressedCoefficients {
        rho_plus,
        rho_minus,
        tau_plus,
        tau_minus,
    })
}

/// `xi = sqrt(strength - 1/4)` with the positive-imaginary branch.
pub fn sech_xi(strength: f64) -> Complex64 {
    Complex64::new(strength - 0.25, 0.0).sqrt()
}

fn sech_channel(a: f64, strength: f64) -> Result<(Complex64, Complex64), ScatteringError> {
    let i = Complex64::i();
    let xi = sech_xi(strength);
    let ka = Complex64::new(a, 0.0);
    let half = Complex64::new(0.5, 0.0);
    let ln_tau = ln_gamma(half - i * (ka + xi))? + ln_gamma(half - i * (ka - xi))?
        - ln_gamma(-i * ka)?
        - ln_gamma(1.0 - i * ka)?;
    let tau = ln_tau.exp();
    let ln_ratio = ln_cosh(PI * xi) - ln_sinh_real(PI * a);
    let rho = -i * ln_ratio.exp() * tau;
    Ok((rho, tau))
}

fn ln_cosh(w: Complex64) -> Complex64 {
    if w.re.abs() < 20.0 {
        return w.cosh().ln();
    }
    // cosh w = e^{sw} (1 + e^{-2sw}) / 2 with s = sign(Re w)
    let sw = if w.re > 0.0 { w } else { -w };
    sw + (1.0 + (-2.0 * sw).exp()).ln() - std::f64::consts::LN_2
}

fn ln_sinh_real(x: f64) -> f64 {
    if x < 20.0 {
        x.sinh().ln()
    } else {
        x + (-(-2.0 * x).exp()).ln_1p() - std::f64::consts::LN_2
    }
}

/// Bare-basis amplitudes from the dressed ones at zero detuning.
pub fn bare_from_dressed(d: &DressedCoefficients) -> BareCoefficients {
    BareCoefficients {
        r_e: 0.5 * (d.rho_plus + d.rho_minus),
        r_g: 0.5 * (d.rho_plus - d.rho_minus),
        t_e: 0.5 * (d.tau_plus + d.tau_minus),
        t_g: 0.5 * (d.tau_plus - d.tau_minus),
    }
}

/// `|T_e|^2 + |T_g|^2`.
pub fn transmission_probability(b: &BareCoefficients) -> f64 {
    b.t_e.norm_sqr() + b.t_g.norm_sqr()
}

/// Base-2 binary entropy with `0 log 0 = 0`.
pub fn binary_entropy(p: f64) -> f64 {
    let term = |x: f64| if x > 0.0 { -x * x.log2() } else { 0.0 };
    term(p) + term(1.0 - p)
}

/// Atom-field entanglement entropy from the scattered populations.
///
/// Populations are renormalized when their sum is within
/// [`POPULATION_TOLERANCE`] of one; a larger defect is an error.
pub fn entropy(b: &BareCoefficients) -> Result<f64, ScatteringError> {
    let (pe, pg) = b.populations();
    entropy_from_populations(pe, pg)
}

pub fn entropy_from_populations(pe: f64, pg: f64) -> Result<f64, ScatteringError> {
    let total = pe + pg;
    let defect = (total - 1.0).abs();
    if defect.is_nan() || defect > POPULATION_TOLERANCE {
        return Err(ScatteringError::UnitarityDefect(defect));
    }
    Ok(binary_entropy((pe / total).clamp(0.0, 1.0)))
}

/// Meza tunnelling resonances `m pi / kappa_n` for `m = 1..=m_max`.
pub fn meza_resonance_lengths(n: u32, lambda0: f64, m_max: u32) -> Vec<f64> {
    let kn = kappa_n(n, lambda0);
    (1..=m_max).map(|m| f64::from(m) * PI / kn).collect()
}

/// Sech reflectionless waists `sqrt(m(m+1)) / kappa_n` for `m = 1..=m_max`.
pub fn sech_resonance_lengths(n: u32, lambda0: f64, m_max: u32) -> Vec<f64> {
    let kn = kappa_n(n, lambda0);
    (1..=m_max)
        .map(|m| {
            let m = f64::from(m);
            (m * (m + 1.0)).sqrt() / kn
        })
        .collect()
}

fn check_momentum(k: f64) -> Result<(), ScatteringError> {
    if k.is_finite() && k > 0.0 {
        Ok(())
    } else {
        Err(ScatteringError::InvalidMomentum(k))
    }
}

fn check_nonneg(name: &str, v: f64) -> Result<(), ScatteringError> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(ScatteringError::InvalidParameter(format!(
            "{name} must be finite and non-negative, got {v}"
        )))
    }
}

fn check_positive(name: &str, v: f64) -> Result<(), ScatteringError> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(ScatteringError::InvalidParameter(format!(
            "{name} must be finite and positive, got {v}"
        )))
    }
}
