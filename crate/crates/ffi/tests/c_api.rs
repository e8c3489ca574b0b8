use std::ffi::CStr;
use std::ptr;

use mazer_ffi::*;

fn last_error() -> String {
    let mut buf = vec![0 as std::ffi::c_char; 256];
    unsafe {
        mazer_last_error(buf.as_mut_ptr(), buf.len());
        CStr::from_ptr(buf.as_ptr()).to_string_lossy().into_owned()
    }
}

#[test]
fn meza_amplitudes_conserve_flux() {
    let mut d = MazerDressed::default();
    let status = unsafe { mazer_meza_dressed(0.3, 0, 0.1, 5.0, &mut d) };
    assert_eq!(status, MazerStatus::Ok);
    let norm = |c: MazerComplex| c.re * c.re + c.im * c.im;
    assert!((norm(d.rho_plus) + norm(d.tau_plus) - 1.0).abs() < 1e-12);
    assert!((norm(d.rho_minus) + norm(d.tau_minus) - 1.0).abs() < 1e-12);

    let mut b = MazerBare::default();
    assert_eq!(unsafe { mazer_bare_from_dressed(&d, &mut b) }, MazerStatus::Ok);
    let (mut p, mut s) = (0.0, 0.0);
    assert_eq!(unsafe { mazer_bare_observables(&b, &mut p, &mut s) }, MazerStatus::Ok);
    assert!(p > 0.0 && p < 1.0);
    assert!((0.0..=1.0).contains(&s));
}

#[test]
fn sech_matches_library() {
    let mut d = MazerDressed::default();
    assert_eq!(unsafe { mazer_sech_dressed(0.5, 1, 0.1, 5.0, &mut d) }, MazerStatus::Ok);
    let lib = mazer::scattering::sech_dressed(0.5, 1, 0.1, 5.0).unwrap();
    assert_eq!(d.tau_minus.re, lib.tau_minus.re);
    assert_eq!(d.rho_plus.im, lib.rho_plus.im);
}

#[test]
fn errors_are_reported() {
    let mut d = MazerDressed::default();
    let status = unsafe { mazer_meza_dressed(-1.0, 0, 0.1, 5.0, &mut d) };
    assert_eq!(status, MazerStatus::InvalidArgument);
    assert!(last_error().contains("momentum"));

    let status = unsafe { mazer_meza_dressed(1.0, 0, 0.1, 5.0, ptr::null_mut()) };
    assert_eq!(status, MazerStatus::NullPointer);

    let msg = unsafe { CStr::from_ptr(mazer_status_message(MazerStatus::NotConverged)) };
    assert!(!msg.to_bytes().is_empty());

    let mut p = 0.0;
    let status = unsafe {
        mazer_ensemble_transmission(MazerProfile::Gaussian, 0.1, 5.0, 0, 1.0, 0.1, 1e-8, &mut p, ptr::null_mut())
    };
    assert_eq!(status, MazerStatus::InvalidArgument);
}

#[test]
fn last_error_truncates() {
    let mut d = MazerDressed::default();
    unsafe { mazer_meza_dressed(f64::NAN, 0, 0.1, 5.0, &mut d) };
    let full = unsafe { mazer_last_error(ptr::null_mut(), 0) };
    let mut buf = [1 as std::ffi::c_char; 8];
    let reported = unsafe { mazer_last_error(buf.as_mut_ptr(), buf.len()) };
    assert_eq!(full, reported);
    assert!(full > 7);
    assert_eq!(buf[7], 0);
}

#[test]
fn ensemble_average_without_spread_is_plane_wave() {
    let mut p = 0.0;
    let status = unsafe {
        mazer_ensemble_transmission(MazerProfile::Meza, 0.1, 20.0, 0, 0.5, 0.0, 1e-8, &mut p, ptr::null_mut())
    };
    assert_eq!(status, MazerStatus::Ok);
    let b = mazer::scattering::meza_dressed(0.5, 0, 0.1, 20.0).unwrap().to_bare();
    assert!((p - b.transmission_probability()).abs() < 1e-14);
}

#[test]
fn propagator_handle_lifecycle() {
    let mut handle: *mut MazerPropagator = ptr::null_mut();
    let status = unsafe {
        mazer_propagator_new(MazerProfile::Gaussian, 0.1, 2.0, 3.0, 4.0, 0.0, 0.0, &mut handle)
    };
    assert_eq!(status, MazerStatus::Ok, "{}", last_error());
    assert!(!handle.is_null());

    let (mut t, mut dt, mut points) = (0.0, 0.0, 0usize);
    unsafe {
        assert_eq!(
            mazer_propagator_info(handle, &mut t, &mut dt, &mut points, ptr::null_mut(), ptr::null_mut()),
            MazerStatus::Ok
        );
    }
    assert_eq!(t, 0.0);
    assert!(dt > 0.0 && points >= 1024);

    let mut before = MazerObservables::default();
    unsafe { mazer_propagator_observables(handle, &mut before) };
    assert!((before.inversion - 1.0).abs() < 1e-9);
    assert!(before.p_right < 1e-9);

    assert_eq!(unsafe { mazer_propagator_step(handle, 200) }, MazerStatus::Ok);
    let mut after = MazerObservables::default();
    unsafe { mazer_propagator_observables(handle, &mut after) };
    assert!((after.p_excited + after.p_ground - 1.0).abs() < 1e-10);

    let mut de = vec![0.0; points];
    let mut dg = vec![0.0; points];
    unsafe {
        assert_eq!(
            mazer_propagator_densities(handle, de.as_mut_ptr(), dg.as_mut_ptr(), points),
            MazerStatus::Ok
        );
        assert_eq!(
            mazer_propagator_densities(handle, de.as_mut_ptr(), dg.as_mut_ptr(), points - 1),
            MazerStatus::InvalidArgument
        );
    }
    assert!(de.iter().chain(&dg).all(|v| v.is_finite() && *v >= 0.0));

    let (mut p, mut s) = (0.0, 0.0);
    let status = unsafe { mazer_propagator_transmission(handle, &mut p, &mut s) };
    assert_eq!(status, MazerStatus::Ok, "{}", last_error());
    assert!(p > 0.99, "fast atom transmits, got {p}");

    unsafe { mazer_propagator_free(handle) };
    unsafe { mazer_propagator_free(ptr::null_mut()) };
}

#[test]
fn header_is_generated() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/mazer.h")).unwrap();
    for name in ["mazer_meza_dressed", "mazer_propagator_new", "MazerStatus", "MAZER_H"] {
        assert!(header.contains(name), "{name} missing from header");
    }
}
