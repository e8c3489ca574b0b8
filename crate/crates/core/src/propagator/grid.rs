use std::f64::consts::PI;

use crate::error::PropagatorError;

/// Smallest admissible point count.
pub const MIN_POINTS: usize = 1 << 10;

/// Uniform periodic grid `z_i = z_min + i dz`, `i = 0..N`, with `z_max`
/// excluded.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D {
    pub z_min: f64,
    pub z_max: f64,
    pub n: usize,
}

impl Grid1D {
    pub fn new(z_min: f64, z_max: f64, n: usize) -> Result<Self, PropagatorError> {
        if !(z_min.is_finite() && z_max.is_finite() && z_max > z_min) {
            return Err(PropagatorError::InvalidGrid(format!(
                "need finite z_min < z_max, got [{z_min}, {z_max}]"
            )));
        }
        if n < MIN_POINTS || !n.is_power_of_two() {
            return Err(PropagatorError::InvalidGrid(format!(
                "point count must be a power of two >= {MIN_POINTS}, got {n}"
            )));
        }
        Ok(Self { z_min, z_max, n })
    }

    /// Grid on `[-half_width, half_width)`.
    pub fn centered(half_width: f64, n: usize) -> Result<Self, PropagatorError> {
        Self::new(-half_width, half_width, n)
    }

    /// Smallest power-of-two grid covering `[z_min, z_max]` with spacing at
    /// most `dz_max`. The upper end is extended to use the full point count.
    pub fn covering(z_min: f64, z_max: f64, dz_max: f64) -> Result<Self, PropagatorError> {
        if !(dz_max.is_finite() && dz_max > 0.0) {
            return Err(PropagatorError::InvalidGrid(format!(
                "grid spacing must be positive, got {dz_max}"
            )));
        }
        let needed = ((z_max - z_min) / dz_max).ceil();
        if !(needed.is_finite() && needed < (1u64 << 40) as f64) {
            return Err(PropagatorError::InvalidGrid(format!(
                "cannot cover [{z_min}, {z_max}] with spacing {dz_max}"
            )));
        }
        let n = (needed as usize).max(MIN_POINTS).next_power_of_two();
        let extra = n as f64 * dz_max - (z_max - z_min);
        Self::new(z_min - 0.5 * extra, z_max + 0.5 * extra, n)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn dz(&self) -> f64 {
        (self.z_max - self.z_min) / self.n as f64
    }

    pub fn z(&self, i: usize) -> f64 {
        self.z_min + self.dz() * i as f64
    }

    pub fn positions(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.z(i)).collect()
    }

    /// Momentum spacing `2 pi / (N dz)`.
    pub fn dk(&self) -> f64 {
        2.0 * PI / (self.z_max - self.z_min)
    }

    /// Largest representable momentum `pi / dz`.
    pub fn k_nyquist(&self) -> f64 {
        PI / self.dz()
    }

    /// Conjugate momenta in transform order (non-negative first).
    pub fn wavenumbers(&self) -> Vec<f64> {
        let dk = self.dk();
        let half = self.n / 2;
        (0..self.n)
            .map(|j| {
                if j < half {
                    dk * j as f64
                } else {
                    dk * (j as f64 - self.n as f64)
                }
            })
            .collect()
    }

    /// Number of points in each edge band holding `fraction` of the grid.
    pub fn edge_points(&self, fraction: f64) -> usize {
        ((self.n as f64 * fraction).round() as usize).clamp(1, self.n / 2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_point_counts() {
        assert!(Grid1D::centered(10.0, 1000).is_err());
        assert!(Grid1D::centered(10.0, 512).is_err());
        assert!(Grid1D::centered(-1.0, 1024).is_err());
        assert!(Grid1D::centered(10.0, 1024).is_ok());
    }

    #[test]
    fn spacing_and_momenta() {
        let g = Grid1D::new(-8.0, 8.0, 1024).unwrap();
        assert_eq!(g.dz(), 16.0 / 1024.0);
        let k = g.wavenumbers();
        assert_eq!(k[0], 0.0);
        assert_eq!(k[1], g.dk());
        assert_eq!(k[1023], -g.dk());
        assert!((k[512] + g.k_nyquist()).abs() < 1e-12);
    }

    #[test]
    fn covering_respects_spacing() {
        let g = Grid1D::covering(-100.0, 300.0, 0.3).unwrap();
        assert!(g.dz() <= 0.3 + 1e-15);
        assert!(g.z_min <= -100.0 && g.z_max >= 300.0);
        assert_eq!(g.n, 2048);
    }
}
