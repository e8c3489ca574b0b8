//! Independent stationary-scattering oracles for a single real potential
//! channel, `-psi''/2 + V psi = k^2/2 psi`, incident from the left.
//!
//! Both return `(rho, tau)` with `psi = e^{ikz} + rho e^{-ikz}` on the left
//! and `psi = tau e^{ikz}` on the right, phases referenced to `z = 0`.

#![allow(dead_code)]

use num_complex::Complex64;

/// Piecewise-constant potential: `values[j]` on `[edges[j], edges[j+1]]`,
/// zero outside `[edges[0], edges[last]]`. Exact interface matching.
pub fn transfer_matrix(k: f64, edges: &[f64], values: &[f64]) -> (Complex64, Complex64) {
    assert_eq!(edges.len(), values.len() + 1);
    let i = Complex64::i();
    let mut momenta = vec![Complex64::new(k, 0.0)];
    momenta.extend(values.iter().map(|&v| Complex64::new(k * k - 2.0 * v, 0.0).sqrt()));
    momenta.push(Complex64::new(k, 0.0));

    // region j (0..=values.len()+1): a e^{i q z} + b e^{-i q z}
    let (mut a, mut b) = (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
    for j in (0..edges.len()).rev() {
        let z = edges[j];
        let (ql, qr) = (momenta[j], momenta[j + 1]);
        // value and derivative just right of the interface
        let psi = a * (i * qr * z).exp() + b * (-i * qr * z).exp();
        let dpsi = i * qr * (a * (i * qr * z).exp() - b * (-i * qr * z).exp());
        // solve a' e^{i ql z} + b' e^{-i ql z} = psi, i ql (a' e - b' e^-) = dpsi
        let ratio = dpsi / (i * ql);
        a = 0.5 * (psi + ratio) * (-i * ql * z).exp();
        b = 0.5 * (psi - ratio) * (i * ql * z).exp();
    }
    (b / a, 1.0 / a)
}

/// Integrates the stationary equation from `z_right` back to `z_left` with
/// classical RK4 at steps `h` and `h/2`, Richardson-combined.
pub fn integrate_stationary<V: Fn(f64) -> f64>(
    k: f64,
    potential: V,
    z_left: f64,
    z_right: f64,
    h: f64,
) -> (Complex64, Complex64) {
    let coarse = rk4_sweep(k, &potential, z_left, z_right, h);
    let fine = rk4_sweep(k, &potential, z_left, z_right, 0.5 * h);
    let a = (16.0 * fine.0 - coarse.0) / 15.0;
    let b = (16.0 * fine.1 - coarse.1) / 15.0;
    (b / a, 1.0 / a)
}

fn rk4_sweep<V: Fn(f64) -> f64>(
    k: f64,
    potential: &V,
    z_left: f64,
    z_right: f64,
    h_max: f64,
) -> (Complex64, Complex64) {
    let i = Complex64::i();
    let steps = ((z_right - z_left) / h_max).ceil() as usize;
    let h = -(z_right - z_left) / steps as f64;
    let k2 = k * k;
    let rhs = |z: f64, y: [Complex64; 2]| -> [Complex64; 2] {
        [y[1], (2.0 * potential(z) - k2) * y[0]]
    };
    let start = (i * k * z_right).exp();
    let mut y = [start, i * k * start];
    let mut z = z_right;
    for _ in 0..steps {
        let k1 = rhs(z, y);
        let y2 = [y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1]];
        let k2_ = rhs(z + 0.5 * h, y2);
        let y3 = [y[0] + 0.5 * h * k2_[0], y[1] + 0.5 * h * k2_[1]];
        let k3 = rhs(z + 0.5 * h, y3);
        let y4 = [y[0] + h * k3[0], y[1] + h * k3[1]];
        let k4 = rhs(z + h, y4);
        for c in 0..2 {
            y[c] += h / 6.0 * (k1[c] + 2.0 * k2_[c] + 2.0 * k3[c] + k4[c]);
        }
        z += h;
    }
    let ratio = y[1] / (i * k);
    let a = 0.5 * (y[0] + ratio) * (-i * k * z).exp();
    let b = 0.5 * (y[0] - ratio) * (i * k * z).exp();
    (a, b)
}

/// `V(z) = strength * sech^2(z / waist)` integrated over a window wide
/// enough that the neglected tail changes the amplitudes by less than `eps`.
pub fn sech_channel_oracle(k: f64, strength: f64, waist: f64, eps: f64) -> (Complex64, Complex64) {
    if strength == 0.0 {
        return (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0));
    }
    // first-order tail estimate: 4|V0| e^{-2Z/L} L / (2k) < eps
    let z_max = 0.5 * waist * (4.0 * strength.abs() * waist / (2.0 * k * eps)).ln().max(1.0) + waist;
    let k_local = (k * k + 2.0 * strength.abs()).sqrt();
    let h = (0.04 / k_local).min(0.02);
    integrate_stationary(
        k,
        |z| {
            let c = (z / waist).cosh();
            strength / (c * c)
        },
        -z_max,
        z_max,
        h,
    )
}
