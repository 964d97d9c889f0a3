//! C-callable interface to the para-Fermi oscillator library.
//!
//! Every entry point returns a [`PfStatus`]; on any non-`Ok` status a
//! human-readable message is stored per thread and can be read back with
//! [`pf_last_error`]. Objects cross the boundary as opaque handles that the
//! caller frees with the matching `_free` function. The C header is
//! generated into `include/pfsim.h` at build time.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::str::FromStr;

use pfsim::dynamics::Trajectory;
use pfsim::experiment::{run_revival, run_simulate, run_verify, ExperimentConfig, VerifyScope};
use pfsim::models::ModelParams;
use pfsim::parafermi::build_subspace;
use pfsim::{PfError, Tolerances};

/// Outcome of a call across the C boundary.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum PfStatus {
    /// The call succeeded.
    Ok = 0,
    /// A verification suite ran and found a violated invariant.
    VerificationFailed = 1,
    /// Bad argument: null pointer, unknown name, or invalid physics input.
    InvalidInput = 2,
    /// A numerical contract was broken (conservation drift, non-Hermitian
    /// operator, size limit).
    NumericalContract = 3,
    /// A panic was caught at the boundary; state may be inconsistent.
    Internal = 4,
}

/// Opaque handle to a constructed oscillator subspace.
pub struct PfSubspace;

/// Opaque handle to a simulated trajectory.
pub struct PfTrajectory;

/// Collapse and revival landmarks of one trajectory. Times and envelopes
/// of landmarks that were not found are NaN and their `has_` flag is 0.
#[repr(C)]
pub struct PfRevival {
    /// Envelope amplitude at the start of the run.
    pub r_init: f64,
    /// Averaging window used for the envelope, in time units.
    pub window: f64,
    pub collapse_time: f64,
    pub collapse_rms: f64,
    pub revival_time: f64,
    pub revival_rms: f64,
    /// Time and envelope of the global envelope minimum.
    pub min_time: f64,
    pub min_rms: f64,
    /// Strongest envelope recovery after the minimum.
    pub recovery_time: f64,
    pub recovery_rms: f64,
    /// Predicted revival time for equal couplings on resonance.
    pub predicted_homogeneous: f64,
    /// Predicted revival time for general couplings.
    pub predicted_general: f64,
    pub has_collapse: u8,
    pub has_revival: u8,
    /// 1 when collapse and revival were both identified cleanly.
    pub confident: u8,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let sanitized = msg.replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).unwrap_or_default();
    });
}

fn status_of(e: &PfError) -> PfStatus {
    match e.exit_code() {
        1 => PfStatus::VerificationFailed,
        2 => PfStatus::InvalidInput,
        _ => PfStatus::NumericalContract,
    }
}

fn fail(e: PfError) -> PfStatus {
    let status = status_of(&e);
    set_last_error(&e.to_string());
    status
}

fn invalid(msg: &str) -> PfStatus {
    set_last_error(msg);
    PfStatus::InvalidInput
}

fn guarded<F: FnOnce() -> PfStatus>(f: F) -> PfStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => {
            set_last_error("internal panic caught at the C boundary");
            PfStatus::Internal
        }
    }
}

fn config(lambda: u32, omega0: f64, omega1: f64, omega2: f64, g1: f64, g2: f64) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::default();
    cfg.lambda = lambda;
    cfg.omega0 = omega0;
    cfg.omega1 = omega1;
    cfg.omega2 = omega2;
    cfg.g1 = g1;
    cfg.g2 = g2;
    cfg
}

const MAX_POINTS: usize = 1_000_000;

/// Message for the most recent failure on this thread. The pointer stays
/// valid until the next failing call on the same thread. Never null.
#[no_mangle]
pub extern "C" fn pf_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Library version as a static nul-terminated string.
#[no_mangle]
pub extern "C" fn pf_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Build the oscillator subspace of the given order with the given cavity
/// frequencies and couplings. On success writes a handle to `out`; free it
/// with `pf_subspace_free`.
#[no_mangle]
pub extern "C" fn pf_subspace_new(
    lambda: u32,
    omega0: f64,
    omega1: f64,
    omega2: f64,
    g1: f64,
    g2: f64,
    out: *mut *mut PfSubspace,
) -> PfStatus {
    guarded(|| {
        if out.is_null() {
            return invalid("out pointer is null");
        }
        let p = ModelParams { omega0, omega1, omega2, g1, g2 };
        match build_subspace(lambda, &p) {
            Ok(s) => {
                let raw = Box::into_raw(Box::new(s)) as *mut PfSubspace;
                unsafe { *out = raw };
                PfStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

fn subspace_ref<'a>(handle: *const PfSubspace) -> Option<&'a pfsim::parafermi::PfSubspace> {
    unsafe { (handle as *const pfsim::parafermi::PfSubspace).as_ref() }
}

/// Dimension of the subspace (2 lambda + 1).
#[no_mangle]
pub extern "C" fn pf_subspace_dim(handle: *const PfSubspace, out: *mut usize) -> PfStatus {
    guarded(|| {
        let Some(s) = subspace_ref(handle) else {
            return invalid("subspace handle is null");
        };
        if out.is_null() {
            return invalid("out pointer is null");
        }
        unsafe { *out = s.dim };
        PfStatus::Ok
    })
}

/// Run the algebraic verification suite on the subspace with default
/// tolerances. Returns `Ok` when every invariant holds; on
/// `VerificationFailed` the message names the worst residual.
#[no_mangle]
pub extern "C" fn pf_subspace_verify(handle: *const PfSubspace) -> PfStatus {
    guarded(|| {
        let Some(s) = subspace_ref(handle) else {
            return invalid("subspace handle is null");
        };
        match s.verify(&Tolerances::default()) {
            Ok(rep) if rep.pass => PfStatus::Ok,
            Ok(rep) => {
                set_last_error(&format!(
                    "verification failed for order {}: worst commutator residual {:.3e}, \
                     reflection residual {:.3e}, closed-form residual {:.3e}",
                    rep.lambda,
                    rep.comm_i3_iplus.max(rep.comm_i3_iminus),
                    rep.anticomm_r_iplus.max(rep.anticomm_r_iminus),
                    rep.h_closed_form,
                ));
                PfStatus::VerificationFailed
            }
            Err(e) => fail(e),
        }
    })
}

/// Free a subspace handle. Null is ignored.
#[no_mangle]
pub extern "C" fn pf_subspace_free(handle: *mut PfSubspace) {
    if !handle.is_null() {
        drop(unsafe { Box::from_raw(handle as *mut pfsim::parafermi::PfSubspace) });
    }
}

/// Evolve the lowest-weight state of the given oscillator order and write a
/// trajectory handle to `out`; free it with `pf_trajectory_free`.
/// `t_end <= 0` selects the default horizon of one predicted revival
/// period; `n_points` is the number of sample times (2 to 1000000).
#[no_mangle]
pub extern "C" fn pf_simulate(
    lambda: u32,
    omega0: f64,
    omega1: f64,
    omega2: f64,
    g1: f64,
    g2: f64,
    t_end: f64,
    n_points: usize,
    out: *mut *mut PfTrajectory,
) -> PfStatus {
    guarded(|| {
        if out.is_null() {
            return invalid("out pointer is null");
        }
        if n_points > MAX_POINTS {
            return invalid("n_points exceeds 1000000");
        }
        let mut cfg = config(lambda, omega0, omega1, omega2, g1, g2);
        cfg.n_points = n_points;
        if t_end > 0.0 {
            cfg.t_end = Some(t_end);
        }
        match run_simulate(&cfg) {
            Ok(sim) => {
                let raw = Box::into_raw(Box::new(sim.trajectory)) as *mut PfTrajectory;
                unsafe { *out = raw };
                PfStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

fn trajectory_ref<'a>(handle: *const PfTrajectory) -> Option<&'a Trajectory> {
    unsafe { (handle as *const Trajectory).as_ref() }
}

/// Number of sample times in the trajectory.
#[no_mangle]
pub extern "C" fn pf_trajectory_len(handle: *const PfTrajectory, out: *mut usize) -> PfStatus {
    guarded(|| {
        let Some(t) = trajectory_ref(handle) else {
            return invalid("trajectory handle is null");
        };
        if out.is_null() {
            return invalid("out pointer is null");
        }
        unsafe { *out = t.times.len() };
        PfStatus::Ok
    })
}

/// Copy one observable column into a caller-provided buffer of exactly
/// `len == pf_trajectory_len` doubles. Columns: 0 time, 1 mode-1 occupation,
/// 2 mode-2 occupation, 3 weight projection, 4 inversion, 5 norm.
#[no_mangle]
pub extern "C" fn pf_trajectory_column(
    handle: *const PfTrajectory,
    column: u32,
    buf: *mut f64,
    len: usize,
) -> PfStatus {
    guarded(|| {
        let Some(t) = trajectory_ref(handle) else {
            return invalid("trajectory handle is null");
        };
        if buf.is_null() {
            return invalid("buffer pointer is null");
        }
        let source: &[f64] = match column {
            0 => &t.times,
            1 => &t.n1,
            2 => &t.n2,
            3 => &t.i3,
            4 => &t.sigma_z,
            5 => &t.norm,
            _ => return invalid("column must be 0..=5"),
        };
        if len != source.len() {
            return invalid("buffer length does not match the trajectory length");
        }
        unsafe { std::ptr::copy_nonoverlapping(source.as_ptr(), buf, len) };
        PfStatus::Ok
    })
}

/// Free a trajectory handle. Null is ignored.
#[no_mangle]
pub extern "C" fn pf_trajectory_free(handle: *mut PfTrajectory) {
    if !handle.is_null() {
        drop(unsafe { Box::from_raw(handle as *mut Trajectory) });
    }
}

/// Simulate the lowest-weight state and locate collapse and revival
/// landmarks. Same parameter conventions as `pf_simulate`.
#[no_mangle]
pub extern "C" fn pf_revival(
    lambda: u32,
    omega0: f64,
    omega1: f64,
    omega2: f64,
    g1: f64,
    g2: f64,
    t_end: f64,
    n_points: usize,
    out: *mut PfRevival,
) -> PfStatus {
    guarded(|| {
        if out.is_null() {
            return invalid("out pointer is null");
        }
        if n_points > MAX_POINTS {
            return invalid("n_points exceeds 1000000");
        }
        let mut cfg = config(lambda, omega0, omega1, omega2, g1, g2);
        cfg.n_points = n_points;
        if t_end > 0.0 {
            cfg.t_end = Some(t_end);
        }
        match run_revival(&cfg) {
            Ok(o) => {
                let rep = &o.report;
                let filled = PfRevival {
                    r_init: rep.r_init,
                    window: rep.window,
                    collapse_time: rep.collapse_time.unwrap_or(f64::NAN),
                    collapse_rms: rep.collapse_rms.unwrap_or(f64::NAN),
                    revival_time: rep.revival_time.unwrap_or(f64::NAN),
                    revival_rms: rep.revival_rms.unwrap_or(f64::NAN),
                    min_time: rep.min_time,
                    min_rms: rep.min_rms,
                    recovery_time: rep.recovery_time,
                    recovery_rms: rep.recovery_rms,
                    predicted_homogeneous: o.predicted_homogeneous,
                    predicted_general: o.predicted_general,
                    has_collapse: u8::from(rep.collapse_time.is_some()),
                    has_revival: u8::from(rep.revival_time.is_some()),
                    confident: u8::from(rep.confident),
                };
                unsafe { *out = filled };
                PfStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Run the verification suite and write a JSON report string to `out`.
/// `scope` is one of "algebra", "frames", "closedform", "all"; null means
/// "all". The report is written on both `Ok` and `VerificationFailed`;
/// free it with `pf_string_free`.
#[no_mangle]
pub extern "C" fn pf_verify_json(
    scope: *const c_char,
    lambda_max: u32,
    out: *mut *mut c_char,
) -> PfStatus {
    guarded(|| {
        if out.is_null() {
            return invalid("out pointer is null");
        }
        let scope = if scope.is_null() {
            VerifyScope::All
        } else {
            let text = match unsafe { CStr::from_ptr(scope) }.to_str() {
                Ok(t) => t,
                Err(_) => return invalid("scope is not valid UTF-8"),
            };
            match VerifyScope::from_str(text) {
                Ok(s) => s,
                Err(e) => return fail(e),
            }
        };
        let report = match run_verify(scope, lambda_max, &Tolerances::default()) {
            Ok(r) => r,
            Err(e) => return fail(e),
        };
        let json = match serde_json::to_string_pretty(&report) {
            Ok(j) => j,
            Err(e) => return fail(PfError::InvalidArgument(e.to_string())),
        };
        let c = CString::new(json).unwrap_or_default();
        unsafe { *out = c.into_raw() };
        if report.pass {
            PfStatus::Ok
        } else {
            set_last_error("verification suite reported a failure; see the JSON report");
            PfStatus::VerificationFailed
        }
    })
}

/// Free a string returned by this library. Null is ignored.
#[no_mangle]
pub extern "C" fn pf_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(unsafe { CString::from_raw(s) });
    }
}
