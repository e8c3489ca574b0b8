//! Complex gamma function.
//!
//! Lanczos approximation (g = 7, nine terms) on the right half plane and the
//! reflection formula `Gamma(w) Gamma(1 - w) = pi / sin(pi w)` to the left of
//! `Re(w) = 1/2`. Everything is carried in logarithms so products of gamma
//! values with large imaginary arguments neither overflow nor underflow.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::GammaError;

const LANCZOS_G: f64 = 7.0;
#[allow(clippy::excessive_precision)]
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];
const HALF_LN_TWO_PI: f64 = 0.918_938_533_204_672_8;

fn check_argument(w: Complex64) -> Result<(), GammaError> {
    if !(w.re.is_finite() && w.im.is_finite()) {
        return Err(GammaError::NonFinite);
    }
    if w.im == 0.0 && w.re <= 0.0 && w.re == w.re.round() {
        return Err(GammaError::Pole(w.re));
    }
    Ok(())
}

/// `ln Gamma(w)` on some branch; only `exp` of sums of these is meaningful.
pub fn ln_gamma(w: Complex64) -> Result<Complex64, GammaError> {
    check_argument(w)?;
    Ok(ln_gamma_unchecked(w))
}

fn ln_gamma_unchecked(w: Complex64) -> Complex64 {
    if w.re < 0.5 {
        let ln_pi = Complex64::new(PI.ln(), 0.0);
        return ln_pi - ln_sin_pi(w) - ln_gamma_unchecked(1.0 - w);
    }
    let z = w - 1.0;
    let mut series = Complex64::new(LANCZOS_COEFFS[0], 0.0);
    for (i, &c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        series += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    HALF_LN_TWO_PI + (z + 0.5) * t.ln() - t + series.ln()
}

/// `ln sin(pi w)` without overflow for large `|Im w|`.
fn ln_sin_pi(w: Complex64) -> Complex64 {
    if w.im.abs() < 10.0 {
        return (w * PI).sin().ln();
    }
    // sin x = (i/2) e^{-ix} (1 - e^{2ix}); |e^{2ix}| < 1 for Im x > 0
    let (x, conj) = if w.im > 0.0 {
        (w * PI, false)
    } else {
        (w.conj() * PI, true)
    };
    let i = Complex64::i();
    let val = -i * x + Complex64::new(0.5, 0.0).ln() + i.ln() + (1.0 - (2.0 * i * x).exp()).ln();
    if conj {
        val.conj()
    } else {
        val
    }
}

/// Complex gamma function to roughly 13-15 significant digits.
pub fn complex_gamma(w: Complex64) -> Result<Complex64, GammaError> {
    Ok(ln_gamma(w)?.exp())
}
