use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::grid::Grid1D;
use crate::error::PropagatorError;

/// Largest packet mass allowed outside the grid at launch.
pub const TAIL_TOLERANCE: f64 = 1e-10;

/// Internal channel of the manifold: `|n, e>` or `|n+1, g>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Channel {
    #[default]
    Excited,
    Ground,
}

/// Atom-cavity state restricted to one manifold, sampled on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoChannelWavePacket {
    pub grid: Grid1D,
    pub psi_e: Vec<Complex64>,
    pub psi_g: Vec<Complex64>,
    /// Manifold index.
    pub n: u32,
}

impl TwoChannelWavePacket {
    pub fn zeros(grid: Grid1D, n: u32) -> Self {
        Self {
            grid,
            psi_e: vec![Complex64::new(0.0, 0.0); grid.n],
            psi_g: vec![Complex64::new(0.0, 0.0); grid.n],
            n,
        }
    }

    pub fn with_manifold(mut self, n: u32) -> Self {
        self.n = n;
        self
    }

    /// `(|psi_e|^2 dz, |psi_g|^2 dz)` summed over the grid.
    pub fn channel_norms(&self) -> (f64, f64) {
        let dz = self.grid.dz();
        (sum_sqr(&self.psi_e) * dz, sum_sqr(&self.psi_g) * dz)
    }

    pub fn norm(&self) -> f64 {
        let (e, g) = self.channel_norms();
        e + g
    }

    /// Total density `|psi_e|^2 + |psi_g|^2` per grid point.
    pub fn density(&self) -> Vec<f64> {
        self.psi_e
            .iter()
            .zip(&self.psi_g)
            .map(|(e, g)| e.norm_sqr() + g.norm_sqr())
            .collect()
    }

    pub fn mean_position(&self) -> f64 {
        let (m0, m1, _) = self.position_moments();
        m1 / m0
    }

    pub fn position_width(&self) -> f64 {
        let (m0, m1, m2) = self.position_moments();
        let mean = m1 / m0;
        (m2 / m0 - mean * mean).max(0.0).sqrt()
    }

    fn position_moments(&self) -> (f64, f64, f64) {
        let mut m = (0.0, 0.0, 0.0);
        for (i, rho) in self.density().into_iter().enumerate() {
            let z = self.grid.z(i);
            m.0 += rho;
            m.1 += rho * z;
            m.2 += rho * z * z;
        }
        m
    }

    pub fn mean_momentum(&self) -> f64 {
        let (m0, m1, _) = self.momentum_moments();
        m1 / m0
    }

    pub fn momentum_width(&self) -> f64 {
        let (m0, m1, m2) = self.momentum_moments();
        let mean = m1 / m0;
        (m2 / m0 - mean * mean).max(0.0).sqrt()
    }

    /// Momentum-space norm `sum |phi(k)|^2 dk` with the unitary transform
    /// convention, for comparison with the position-space norm.
    pub fn momentum_norm(&self) -> f64 {
        let (m0, _, _) = self.momentum_moments();
        m0 * self.grid.dz() / self.grid.n as f64
    }

    fn momentum_moments(&self) -> (f64, f64, f64) {
        let fft = FftPlanner::new().plan_fft_forward(self.grid.n);
        let k = self.grid.wavenumbers();
        let mut m = (0.0, 0.0, 0.0);
        for psi in [&self.psi_e, &self.psi_g] {
            let mut buf = psi.clone();
            fft.process(&mut buf);
            for (phi, &kj) in buf.iter().zip(&k) {
                let p = phi.norm_sqr();
                m.0 += p;
                m.1 += p * kj;
                m.2 += p * kj * kj;
            }
        }
        m
    }

    /// `<self|other> = sum (e* e' + g* g') dz`.
    pub fn overlap(&self, other: &Self) -> Complex64 {
        let dz = self.grid.dz();
        let e: Complex64 = self.psi_e.iter().zip(&other.psi_e).map(|(a, b)| a.conj() * b).sum();
        let g: Complex64 = self.psi_g.iter().zip(&other.psi_g).map(|(a, b)| a.conj() * b).sum();
        (e + g) * dz
    }

    /// `2 sum conj(psi_e) psi_g dz`, the transverse internal coherence.
    pub fn coherence(&self) -> Complex64 {
        let c: Complex64 = self.psi_e.iter().zip(&self.psi_g).map(|(e, g)| e.conj() * g).sum();
        2.0 * c * self.grid.dz()
    }

    pub fn normalize(&mut self) {
        let scale = 1.0 / self.norm().sqrt();
        for v in self.psi_e.iter_mut().chain(self.psi_g.iter_mut()) {
            *v *= scale;
        }
    }
}

fn sum_sqr(v: &[Complex64]) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum()
}

/// Minimal-uncertainty Gaussian in one channel,
/// `(2 pi dz^2)^{-1/4} exp(-(z-z0)^2 / (4 dz^2)) exp(i k0 z)`, renormalized on
/// the grid.
pub fn init_packet(
    grid: &Grid1D,
    z0: f64,
    width: f64,
    k0: f64,
    channel: Channel,
) -> Result<TwoChannelWavePacket, PropagatorError> {
    if !(z0.is_finite() && k0.is_finite() && width.is_finite() && width > 0.0) {
        return Err(PropagatorError::InvalidConfig(format!(
            "packet needs finite centre, momentum and positive width (z0 = {z0}, dz = {width}, k0 = {k0})"
        )));
    }
    let tail = gaussian_tail_outside(grid, z0, width);
    if tail > TAIL_TOLERANCE {
        return Err(PropagatorError::GridTooSmall(tail));
    }
    let mut packet = TwoChannelWavePacket::zeros(*grid, 0);
    let prefactor = (2.0 * PI * width * width).powf(-0.25);
    let target = match channel {
        Channel::Excited => &mut packet.psi_e,
        Channel::Ground => &mut packet.psi_g,
    };
    for (i, v) in target.iter_mut().enumerate() {
        let z = grid.z(i);
        let u = (z - z0) / width;
        *v = Complex64::from_polar(prefactor * (-0.25 * u * u).exp(), k0 * z);
    }
    packet.normalize();
    Ok(packet)
}

/// Mass of a normal density (mean `z0`, deviation `width`) outside the grid.
pub fn gaussian_tail_outside(grid: &Grid1D, z0: f64, width: f64) -> f64 {
    let s = width * SQRT_2;
    0.5 * libm::erfc((z0 - grid.z_min) / s) + 0.5 * libm::erfc((grid.z_max - z0) / s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn grid() -> Grid1D {
        Grid1D::centered(200.0, 4096).unwrap()
    }

    #[test]
    fn packet_is_normalized_with_gaussian_moments() {
        let p = init_packet(&grid(), -30.0, 7.0, 1.3, Channel::Excited).unwrap();
        assert_abs_diff_eq!(p.norm(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(p.mean_position(), -30.0, epsilon = 1e-8);
        assert_abs_diff_eq!(p.mean_momentum(), 1.3, epsilon = 1e-8);
        assert_abs_diff_eq!(p.position_width(), 7.0, epsilon = 1e-8);
        assert_abs_diff_eq!(p.momentum_width(), 1.0 / 14.0, epsilon = 1e-8);
        assert_abs_diff_eq!(p.position_width() * p.momentum_width(), 0.5, epsilon = 1e-8);
        assert_eq!(p.channel_norms().1, 0.0);
    }

    #[test]
    fn ground_channel_launch() {
        let p = init_packet(&grid(), 0.0, 5.0, 0.0, Channel::Ground).unwrap();
        assert_eq!(p.channel_norms().0, 0.0);
        assert_abs_diff_eq!(p.channel_norms().1, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn packet_too_close_to_edge() {
        let err = init_packet(&grid(), -180.0, 5.0, 0.0, Channel::Excited).unwrap_err();
        assert!(matches!(err, PropagatorError::GridTooSmall(m) if m > 1e-10));
    }

    #[test]
    fn parseval_holds() {
        let p = init_packet(&grid(), 12.0, 3.0, -2.0, Channel::Excited).unwrap();
        assert_abs_diff_eq!(p.momentum_norm(), p.norm(), epsilon = 1e-12);
    }
}
