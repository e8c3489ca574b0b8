//! C ABI over the `mazer` library.
//!
//! Every function returns a [`MazerStatus`]; results are written through
//! out-pointers. On failure a description is kept per thread and can be read
//! with [`mazer_last_error`]. Propagations are driven through the opaque
//! [`MazerPropagator`] handle, released with [`mazer_propagator_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use num_complex::Complex64;

use mazer::ensemble::{momentum_average, MomentumDistribution};
use mazer::error::{EnsembleError, PropagatorError, ScatteringError};
use mazer::model::ModeProfile;
use mazer::propagator::{
    self, bloch_length, init_packet, observables, probability_right, AutoConfig, Channel,
    PropagationConfig, SplitOperator, Status, TwoChannelWavePacket,
};
use mazer::scattering::{meza_dressed, sech_dressed, BareCoefficients, DressedCoefficients};

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MazerStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    NumericalFailure = 3,
    NotConverged = 4,
    BoundaryContamination = 5,
    Panic = 6,
}

/// Coupling profile shapes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MazerProfile {
    Meza = 0,
    Sech = 1,
    Gaussian = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MazerComplex {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for MazerComplex {
    fn from(c: Complex64) -> Self {
        Self { re: c.re, im: c.im }
    }
}

impl From<MazerComplex> for Complex64 {
    fn from(c: MazerComplex) -> Self {
        Complex64::new(c.re, c.im)
    }
}

/// Dressed-channel amplitudes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MazerDressed {
    pub rho_plus: MazerComplex,
    pub rho_minus: MazerComplex,
    pub tau_plus: MazerComplex,
    pub tau_minus: MazerComplex,
}

/// Bare-state reflection and transmission amplitudes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MazerBare {
    pub r_e: MazerComplex,
    pub r_g: MazerComplex,
    pub t_e: MazerComplex,
    pub t_g: MazerComplex,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MazerObservables {
    pub inversion: f64,
    pub entropy: f64,
    pub p_excited: f64,
    pub p_ground: f64,
    pub p_right: f64,
    pub envelope: f64,
}

/// Opaque propagation state.
pub struct MazerPropagator {
    config: PropagationConfig,
    op: SplitOperator,
    packet: TwoChannelWavePacket,
    steps: u64,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: impl Into<String>) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg.into());
}

fn fail(status: MazerStatus, msg: impl Into<String>) -> MazerStatus {
    set_error(msg);
    status
}

fn guard(f: impl FnOnce() -> MazerStatus) -> MazerStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => fail(MazerStatus::Panic, "internal panic"),
    }
}

fn scattering_status(e: &ScatteringError) -> MazerStatus {
    match e {
        ScatteringError::InvalidMomentum(_) | ScatteringError::InvalidParameter(_) => {
            MazerStatus::InvalidArgument
        }
        _ => MazerStatus::NumericalFailure,
    }
}

fn propagator_status(e: &PropagatorError) -> MazerStatus {
    match e {
        PropagatorError::NotConverged(_) => MazerStatus::NotConverged,
        PropagatorError::BoundaryContamination { .. } => MazerStatus::BoundaryContamination,
        _ => MazerStatus::InvalidArgument,
    }
}

fn profile(kind: MazerProfile, lambda0: f64, length: f64) -> Result<ModeProfile, MazerStatus> {
    let p = match kind {
        MazerProfile::Meza => ModeProfile::meza(lambda0, length),
        MazerProfile::Sech => ModeProfile::sech(lambda0, length),
        MazerProfile::Gaussian => ModeProfile::gaussian(lambda0, length),
    };
    p.map_err(|e| fail(MazerStatus::InvalidArgument, e.to_string()))
}

fn dressed_out(d: &DressedCoefficients) -> MazerDressed {
    MazerDressed {
        rho_plus: d.rho_plus.into(),
        rho_minus: d.rho_minus.into(),
        tau_plus: d.tau_plus.into(),
        tau_minus: d.tau_minus.into(),
    }
}

fn bare_out(b: &BareCoefficients) -> MazerBare {
    MazerBare {
        r_e: b.r_e.into(),
        r_g: b.r_g.into(),
        t_e: b.t_e.into(),
        t_g: b.t_g.into(),
    }
}

fn bare_in(b: &MazerBare) -> BareCoefficients {
    BareCoefficients {
        r_e: b.r_e.into(),
        r_g: b.r_g.into(),
        t_e: b.t_e.into(),
        t_g: b.t_g.into(),
    }
}

/// Copies the calling thread's last error message into `buf` (NUL
/// terminated, truncated to `len`). Returns the full message length.
///
/// # Safety
/// `buf` must be null or valid for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn mazer_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            ptr::copy_nonoverlapping(msg.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn mazer_status_message(status: MazerStatus) -> *const c_char {
    let s: &'static CStr = match status {
        MazerStatus::Ok => c"ok",
        MazerStatus::NullPointer => c"null pointer argument",
        MazerStatus::InvalidArgument => c"invalid argument",
        MazerStatus::NumericalFailure => c"numerical failure",
        MazerStatus::NotConverged => c"propagation did not converge",
        MazerStatus::BoundaryContamination => c"wave packet reached the grid boundary",
        MazerStatus::Panic => c"internal panic",
    };
    s.as_ptr()
}

/// Dressed amplitudes of the meza (top-hat) coupling of length `length`.
///
/// # Safety
/// `out` must be null or point to writable memory for one `MazerDressed`.
#[no_mangle]
pub unsafe extern "C" fn mazer_meza_dressed(
    k: f64,
    n: u32,
    lambda0: f64,
    length: f64,
    out: *mut MazerDressed,
) -> MazerStatus {
    guard(|| {
        if out.is_null() {
            return fail(MazerStatus::NullPointer, "out is null");
        }
        match meza_dressed(k, n, lambda0, length) {
            Ok(d) => {
                *out = dressed_out(&d);
                MazerStatus::Ok
            }
            Err(e) => fail(scattering_status(&e), e.to_string()),
        }
    })
}

/// Dressed amplitudes of the `sech^2` coupling of waist `waist`.
///
/// # Safety
/// `out` must be null or point to writable memory for one `MazerDressed`.
#[no_mangle]
pub unsafe extern "C" fn mazer_sech_dressed(
    k: f64,
    n: u32,
    lambda0: f64,
    waist: f64,
    out: *mut MazerDressed,
) -> MazerStatus {
    guard(|| {
        if out.is_null() {
            return fail(MazerStatus::NullPointer, "out is null");
        }
        match sech_dressed(k, n, lambda0, waist) {
            Ok(d) => {
                *out = dressed_out(&d);
                MazerStatus::Ok
            }
            Err(e) => fail(scattering_status(&e), e.to_string()),
        }
    })
}

/// Bare-state amplitudes for an atom entering in the excited state.
///
/// # Safety
/// `dressed` and `out` must be null or valid pointers.
#[no_mangle]
pub unsafe extern "C" fn mazer_bare_from_dressed(
    dressed: *const MazerDressed,
    out: *mut MazerBare,
) -> MazerStatus {
    guard(|| {
        if dressed.is_null() || out.is_null() {
            return fail(MazerStatus::NullPointer, "null argument");
        }
        let d = &*dressed;
        let dc = DressedCoefficients {
            rho_plus: d.rho_plus.into(),
            rho_minus: d.rho_minus.into(),
            tau_plus: d.tau_plus.into(),
            tau_minus: d.tau_minus.into(),
        };
        *out = bare_out(&dc.to_bare());
        MazerStatus::Ok
    })
}

/// Transmission probability `|T_e|^2 + |T_g|^2` and entanglement entropy.
///
/// # Safety
/// `bare` must be valid; `p_trans` and `entropy` may be null when unwanted.
#[no_mangle]
pub unsafe extern "C" fn mazer_bare_observables(
    bare: *const MazerBare,
    p_trans: *mut f64,
    entropy: *mut f64,
) -> MazerStatus {
    guard(|| {
        if bare.is_null() {
            return fail(MazerStatus::NullPointer, "bare is null");
        }
        let b = bare_in(&*bare);
        let s = match b.entropy() {
            Ok(s) => s,
            Err(e) => return fail(scattering_status(&e), e.to_string()),
        };
        if !p_trans.is_null() {
            *p_trans = b.transmission_probability();
        }
        if !entropy.is_null() {
            *entropy = s;
        }
        MazerStatus::Ok
    })
}

/// Momentum-averaged transmission probability and entropy for the meza or
/// sech profile with Gaussian momentum spread `dk` around `k0`.
///
/// # Safety
/// `p_trans` and `entropy` may be null when unwanted.
#[no_mangle]
pub unsafe extern "C" fn mazer_ensemble_transmission(
    kind: MazerProfile,
    lambda0: f64,
    length: f64,
    n: u32,
    k0: f64,
    dk: f64,
    tol: f64,
    p_trans: *mut f64,
    entropy: *mut f64,
) -> MazerStatus {
    guard(|| {
        let dist = match MomentumDistribution::new(k0, dk) {
            Ok(d) => d,
            Err(e) => return fail(MazerStatus::InvalidArgument, e.to_string()),
        };
        let coeff = |k: f64| -> Result<BareCoefficients, ScatteringError> {
            let d = match kind {
                MazerProfile::Meza => meza_dressed(k, n, lambda0, length)?,
                MazerProfile::Sech => sech_dressed(k, n, lambda0, length)?,
                MazerProfile::Gaussian => {
                    return Err(ScatteringError::InvalidParameter(
                        "no closed form for the Gaussian profile".into(),
                    ))
                }
            };
            Ok(d.to_bare())
        };
        match momentum_average(coeff, &dist, tol) {
            Ok(r) => {
                if !p_trans.is_null() {
                    *p_trans = r.transmission();
                }
                if !entropy.is_null() {
                    *entropy = r.entropy();
                }
                MazerStatus::Ok
            }
            Err(EnsembleError::Scattering(e)) => fail(scattering_status(&e), e.to_string()),
            Err(e @ EnsembleError::QuadratureNotConverged { .. }) => {
                fail(MazerStatus::NotConverged, e.to_string())
            }
            Err(e) => fail(MazerStatus::InvalidArgument, e.to_string()),
        }
    })
}

/// Creates a propagator for a packet of width `packet_width` launched with
/// momentum `k0` in the excited channel of manifold 0; grid, step and
/// launch point follow the automatic resolution rules.
///
/// # Safety
/// `out` must be null or valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn mazer_propagator_new(
    kind: MazerProfile,
    lambda0: f64,
    length: f64,
    k0: f64,
    packet_width: f64,
    detuning: f64,
    t_max: f64,
    out: *mut *mut MazerPropagator,
) -> MazerStatus {
    guard(|| {
        if out.is_null() {
            return fail(MazerStatus::NullPointer, "out is null");
        }
        *out = ptr::null_mut();
        let profile = match profile(kind, lambda0, length) {
            Ok(p) => p,
            Err(s) => return s,
        };
        let mut auto = AutoConfig::new(profile, k0, packet_width, detuning);
        auto.t_max = (t_max > 0.0).then_some(t_max);
        let config = match auto.build() {
            Ok(c) => c,
            Err(e) => return fail(propagator_status(&e), e.to_string()),
        };
        let grid = match config.grid() {
            Ok(g) => g,
            Err(e) => return fail(propagator_status(&e), e.to_string()),
        };
        let packet = match init_packet(&grid, config.z0, config.packet_width, config.k0, Channel::Excited) {
            Ok(p) => p,
            Err(e) => return fail(propagator_status(&e), e.to_string()),
        };
        let op = SplitOperator::new(&grid, &config.profile, 0, config.detuning, config.dt);
        *out = Box::into_raw(Box::new(MazerPropagator {
            config,
            op,
            packet,
            steps: 0,
        }));
        MazerStatus::Ok
    })
}

/// Releases a propagator. Null is ignored.
///
/// # Safety
/// `handle` must come from `mazer_propagator_new` and not be used again.
#[no_mangle]
pub unsafe extern "C" fn mazer_propagator_free(handle: *mut MazerPropagator) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

/// Advances the state by `count` time steps.
///
/// # Safety
/// `handle` must be a live propagator.
#[no_mangle]
pub unsafe extern "C" fn mazer_propagator_step(handle: *mut MazerPropagator, count: u64) -> MazerStatus {
    guard(|| {
        let Some(h) = handle.as_mut() else {
            return fail(MazerStatus::NullPointer, "handle is null");
        };
        h.op.step_many(&mut h.packet, count as usize);
        h.steps += count;
        MazerStatus::Ok
    })
}

/// Elapsed time, time step, point count and grid limits.
///
/// # Safety
/// `handle` must be a live propagator; out-pointers may be null.
#[no_mangle]
pub unsafe extern "C" fn mazer_propagator_info(
    handle: *const MazerPropagator,
    time: *mut f64,
    dt: *mut f64,
    points: *mut usize,
    z_min: *mut f64,
    z_max: *mut f64,
) -> MazerStatus {
    guard(|| {
        let Some(h) = handle.as_ref() else {
            return fail(MazerStatus::NullPointer, "handle is null");
        };
        let write = |p: *mut f64, v: f64| {
            if !p.is_null() {
                *p = v;
            }
        };
        write(time, h.steps as f64 * h.config.dt);
        write(dt, h.config.dt);
        write(z_min, h.config.z_min);
        write(z_max, h.config.z_max);
        if !points.is_null() {
            *points = h.config.points;
        }
        MazerStatus::Ok
    })
}

/// Current internal-state and spatial observables.
///
/// # Safety
/// `handle` and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn mazer_propagator_observables(
    handle: *const MazerPropagator,
    out: *mut MazerObservables,
) -> MazerStatus {
    guard(|| {
        let (Some(h), false) = (handle.as_ref(), out.is_null()) else {
            return fail(MazerStatus::NullPointer, "null argument");
        };
        let o = observables(&h.packet);
        *out = MazerObservables {
            inversion: o.w,
            entropy: o.s,
            p_excited: o.p_e,
            p_ground: o.p_g,
            p_right: probability_right(&h.packet),
            envelope: bloch_length(&h.packet),
        };
        MazerStatus::Ok
    })
}

/// Copies channel densities into caller buffers of `len` entries each;
/// `len` must equal the point count.
///
/// # Safety
/// `density_e` and `density_g` must be valid for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn mazer_propagator_densities(
    handle: *const MazerPropagator,
    density_e: *mut f64,
    density_g: *mut f64,
    len: usize,
) -> MazerStatus {
    guard(|| {
        let Some(h) = handle.as_ref() else {
            return fail(MazerStatus::NullPointer, "handle is null");
        };
        if density_e.is_null() || density_g.is_null() {
            return fail(MazerStatus::NullPointer, "null buffer");
        }
        if len != h.packet.psi_e.len() {
            return fail(
                MazerStatus::InvalidArgument,
                format!("buffer length {len} differs from grid size {}", h.packet.psi_e.len()),
            );
        }
        for i in 0..len {
            *density_e.add(i) = h.packet.psi_e[i].norm_sqr();
            *density_g.add(i) = h.packet.psi_g[i].norm_sqr();
        }
        MazerStatus::Ok
    })
}

/// Full run from a fresh launch until the termination predicate fires;
/// writes the asymptotic transmission probability and final entropy.
///
/// # Safety
/// `handle` must be valid; out-pointers may be null.
#[no_mangle]
pub unsafe extern "C" fn mazer_propagator_transmission(
    handle: *const MazerPropagator,
    p_trans: *mut f64,
    entropy: *mut f64,
) -> MazerStatus {
    guard(|| {
        let Some(h) = handle.as_ref() else {
            return fail(MazerStatus::NullPointer, "handle is null");
        };
        let result = match propagator::propagate(&h.config) {
            Ok(r) => r,
            Err(e) => return fail(propagator_status(&e), e.to_string()),
        };
        match (result.status, result.transmission()) {
            (Status::Converged(_), Ok(p)) => {
                if !p_trans.is_null() {
                    *p_trans = p;
                }
                if !entropy.is_null() {
                    *entropy = observables(&result.packet).s;
                }
                MazerStatus::Ok
            }
            (_, Err(e)) => fail(propagator_status(&e), e.to_string()),
            _ => fail(MazerStatus::NotConverged, "termination predicate did not fire"),
        }
    })
}
