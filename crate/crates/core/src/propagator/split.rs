use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::grid::Grid1D;
use super::packet::TwoChannelWavePacket;
use crate::model::{rabi_frequency, ModeProfile};

/// Precomputed Strang-split propagator for a fixed grid, profile, manifold,
/// detuning and time step. A negative step runs the evolution backwards.
pub struct SplitOperator {
    grid: Grid1D,
    n: u32,
    dt: f64,
    // half-step potential unitary [[a, b], [b, d]] per grid point
    a: Vec<Complex64>,
    b: Vec<Complex64>,
    d: Vec<Complex64>,
    // its square, for fused half steps
    a2: Vec<Complex64>,
    b2: Vec<Complex64>,
    d2: Vec<Complex64>,
    // exp(-i k^2 dt / 2) / N
    kinetic: Vec<Complex64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    scratch: Vec<Complex64>,
}

impl std::fmt::Debug for SplitOperator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SplitOperator")
            .field("grid", &self.grid)
            .field("n", &self.n)
            .field("dt", &self.dt)
            .finish_non_exhaustive()
    }
}

impl SplitOperator {
    pub fn new(grid: &Grid1D, profile: &ModeProfile, n: u32, detuning: f64, dt: f64) -> Self {
        let sqrt_n1 = f64::from(n + 1).sqrt();
        let half_dt = 0.5 * dt;
        let mut a = Vec::with_capacity(grid.n);
        let mut b = Vec::with_capacity(grid.n);
        let mut d = Vec::with_capacity(grid.n);
        for i in 0..grid.n {
            let lambda = profile.eval(grid.z(i));
            let omega = rabi_frequency(lambda, n, detuning);
            let c = (omega * half_dt).cos();
            let s = if omega > 0.0 {
                (omega * half_dt).sin() / omega
            } else {
                half_dt
            };
            a.push(Complex64::new(c, -s * 0.5 * detuning));
            d.push(Complex64::new(c, s * 0.5 * detuning));
            b.push(Complex64::new(0.0, -s * lambda * sqrt_n1));
        }
        let a2 = a.iter().zip(&b).map(|(a, b)| a * a + b * b).collect();
        let b2 = a.iter().zip(&b).zip(&d).map(|((a, b), d)| b * (a + d)).collect();
        let d2 = b.iter().zip(&d).map(|(b, d)| b * b + d * d).collect();
        let inv_n = 1.0 / grid.n as f64;
        let kinetic = grid
            .wavenumbers()
            .into_iter()
            .map(|k| Complex64::from_polar(inv_n, -0.5 * k * k * dt))
            .collect();
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(grid.n);
        let inverse = planner.plan_fft_inverse(grid.n);
        let scratch_len = forward
            .get_inplace_scratch_len()
            .max(inverse.get_inplace_scratch_len());
        Self {
            grid: *grid,
            n,
            dt,
            a,
            b,
            d,
            a2,
            b2,
            d2,
            kinetic,
            forward,
            inverse,
            scratch: vec![Complex64::new(0.0, 0.0); scratch_len],
        }
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    /// One step: half potential, full kinetic, half potential.
    pub fn step(&mut self, packet: &mut TwoChannelWavePacket) {
        self.potential_half(packet);
        self.kinetic(&mut packet.psi_e);
        self.kinetic(&mut packet.psi_g);
        self.potential_half(packet);
    }

    /// `count` consecutive steps, fusing adjacent potential half-steps.
    pub fn step_many(&mut self, packet: &mut TwoChannelWavePacket, count: usize) {
        if count == 0 {
            return;
        }
        self.potential_half(packet);
        for i in 0..count {
            self.kinetic(&mut packet.psi_e);
            self.kinetic(&mut packet.psi_g);
            if i + 1 < count {
                self.potential_full(packet);
            }
        }
        self.potential_half(packet);
    }

    fn potential_half(&self, packet: &mut TwoChannelWavePacket) {
        for (i, (e, g)) in packet.psi_e.iter_mut().zip(packet.psi_g.iter_mut()).enumerate() {
            let (a, b, d) = (self.a[i], self.b[i], self.d[i]);
            let ne = a * *e + b * *g;
            let ng = b * *e + d * *g;
            *e = ne;
            *g = ng;
        }
    }

    fn potential_full(&self, packet: &mut TwoChannelWavePacket) {
        for (i, (e, g)) in packet.psi_e.iter_mut().zip(packet.psi_g.iter_mut()).enumerate() {
            let (a, b, d) = (self.a2[i], self.b2[i], self.d2[i]);
            let ne = a * *e + b * *g;
            *g = b * *e + d * *g;
            *e = ne;
        }
    }

    fn kinetic(&mut self, psi: &mut [Complex64]) {
        self.forward.process_with_scratch(psi, &mut self.scratch);
        for (v, p) in psi.iter_mut().zip(&self.kinetic) {
            *v *= p;
        }
        self.inverse.process_with_scratch(psi, &mut self.scratch);
    }
}

/// Single Strang step with a freshly built operator. Prefer
/// [`SplitOperator`] when stepping repeatedly.
pub fn step(
    mut packet: TwoChannelWavePacket,
    dt: f64,
    detuning: f64,
    profile: &ModeProfile,
) -> TwoChannelWavePacket {
    let n = packet.n;
    SplitOperator::new(&packet.grid, profile, n, detuning, dt).step(&mut packet);
    packet
}
