use mazer::ensemble::{momentum_average, MomentumDistribution};
use mazer::model::{adiabatic_potentials, mixing_angle, photon_weights, ModeProfile, PhotonStatistics};
use mazer::propagator::{init_packet, Channel, Grid1D, SplitOperator};
use mazer::scattering::{binary_entropy, meza_dressed, sech_dressed, BareCoefficients};
use proptest::prelude::*;

fn meza_p(k: f64, l: f64) -> f64 {
    meza_dressed(k, 0, 1.0, l).unwrap().to_bare().transmission_probability()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn smooth_profiles_are_even(lam in 0.0f64..3.0, l in 0.1f64..20.0, z in -50.0f64..50.0) {
        for p in [ModeProfile::sech(lam, l).unwrap(), ModeProfile::gaussian(lam, l).unwrap()] {
            prop_assert_eq!(p.eval(z), p.eval(-z));
        }
    }

    #[test]
    fn meza_is_supported_on_its_interval(lam in 0.1f64..3.0, l in 0.1f64..20.0, u in -2.0f64..3.0) {
        let p = ModeProfile::meza(lam, l).unwrap();
        let z = u * l;
        if u > 0.0 && u < 1.0 {
            prop_assert_eq!(p.eval(z), lam);
        } else if !(0.0..=1.0).contains(&u) {
            prop_assert_eq!(p.eval(z), 0.0);
        }
    }

    #[test]
    fn adiabatic_potentials_are_opposite(lam in 0.0f64..3.0, n in 0u32..5, det in -5.0f64..5.0, z in -10.0f64..10.0) {
        let p = ModeProfile::gaussian(lam, 2.0).unwrap();
        let (vp, vm) = adiabatic_potentials(&p, n, det, z);
        prop_assert!((vp + vm).abs() <= 1e-15 * vp.abs().max(1.0));
        prop_assert!(vp >= 0.0);
    }

    #[test]
    fn photon_weights_are_normalized(mean in 0.0f64..6.0, thermal in any::<bool>()) {
        let kind = if thermal { PhotonStatistics::Thermal(mean) } else { PhotonStatistics::Coherent(mean) };
        let dist = photon_weights(kind, 1e-10).unwrap();
        let total: f64 = dist.weights.iter().map(|(_, w)| w).sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
        prop_assert!(dist.weights.iter().all(|(_, w)| *w >= 0.0));
    }

    #[test]
    fn mixing_angle_decreases_with_detuning(lam in 0.05f64..3.0, n in 0u32..4, d1 in 0.0f64..20.0, gap in 1e-3f64..5.0) {
        let a = mixing_angle(lam, n, d1).unwrap();
        let b = mixing_angle(lam, n, d1 + gap).unwrap();
        prop_assert!(b < a);
    }

    #[test]
    fn bare_probabilities_are_complete(k in 1e-3f64..3.0, n in 0u32..4, l in 0.2f64..50.0, lam in 0.0f64..3.0) {
        for d in [meza_dressed(k, n, lam, l).unwrap(), sech_dressed(k, n, lam, l).unwrap()] {
            let b = d.to_bare();
            prop_assert!((b.total() - 1.0).abs() < 1e-10);
            let s = b.entropy().unwrap();
            prop_assert!((0.0..=1.0 + 1e-12).contains(&s));
        }
    }

    #[test]
    fn entropy_is_maximal_only_at_even_split(p in 0.0f64..1.0) {
        let s = binary_entropy(p);
        prop_assert!((s - binary_entropy(1.0 - p)).abs() < 1e-12);
        if (p - 0.5).abs() > 1e-3 {
            prop_assert!(s < 1.0);
        }
    }

    #[test]
    fn meza_is_continuous_across_the_barrier_top(l in 0.5f64..20.0, n in 0u32..3) {
        let kappa = 2f64.sqrt() * f64::from(n + 1).powf(0.25);
        let eps = 1e-12;
        let below = meza_dressed(kappa - eps, n, 1.0, l).unwrap();
        let at = meza_dressed(kappa, n, 1.0, l).unwrap();
        let above = meza_dressed(kappa + eps, n, 1.0, l).unwrap();
        for (x, y) in [(below, at), (at, above)] {
            prop_assert!((x.tau_plus - y.tau_plus).norm() < 1e-8);
            prop_assert!((x.rho_plus - y.rho_plus).norm() < 1e-8);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn averaged_transmission_stays_in_pointwise_range(k0 in 0.2f64..2.0, frac in 0.0f64..0.2, l in 1.0f64..20.0) {
        let dist = MomentumDistribution::new(k0, frac * k0).unwrap();
        let res = momentum_average(
            |k| -> Result<BareCoefficients, _> { Ok(meza_dressed(k, 0, 1.0, l)?.to_bare()) },
            &dist,
            1e-8,
        )
        .unwrap();
        prop_assert!((res.total() - 1.0).abs() < 1e-6);
        let (lo, hi) = dist.support();
        let samples: Vec<f64> = (0..=2000).map(|i| meza_p(lo + (hi - lo) * i as f64 / 2000.0, l)).collect();
        let min = samples.iter().cloned().fold(f64::INFINITY, f64::min);
        let max = samples.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let p = res.transmission();
        prop_assert!(p >= min - 1e-6 && p <= max + 1e-6, "{p} outside [{min}, {max}]");
    }

    #[test]
    fn split_steps_conserve_norm(lam in 0.0f64..3.0, det in -2.0f64..2.0, k0 in 0.0f64..3.0, n in 0u32..3, width in 1.0f64..6.0) {
        let grid = Grid1D::centered(100.0, 1024).unwrap();
        let profile = ModeProfile::gaussian(lam, 3.0).unwrap();
        let mut packet = init_packet(&grid, -20.0, width, k0, Channel::Excited).unwrap().with_manifold(n);
        let before = packet.norm();
        SplitOperator::new(&grid, &profile, n, det, 0.02).step_many(&mut packet, 300);
        prop_assert!((packet.norm() - before).abs() < 1e-12);
        prop_assert!((packet.momentum_norm() - packet.norm()).abs() < 1e-12);
    }
}
