//! C ABI over the decaying-momentum toolkit.
//!
//! Handles are opaque pointers created and destroyed by this library; every
//! fallible call returns a [`DemonOptStatus`] and writes its result through
//! an out-pointer. The most recent error message is kept per thread and can
//! be fetched with [`demon_opt_last_error_message`].
//!
//! Every pointer argument is null-checked before use; validity, alignment,
//! and length of non-null buffers are the caller's contract, as with any C
//! library.
#![allow(clippy::not_unsafe_ptr_arg_deref)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr};

use demon_opt::error::Error;
use demon_opt::optimizers::{
    adam_step, demon_adam_step, demon_sgdm_step, sgdm_step, OptimizerState, StepHyper,
};
use demon_opt::schedules::{demon_beta, demon_theory_beta, schedule_eval, ScheduleSpec};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DemonOptStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidArgument = 3,
    DomainError = 4,
    DimensionMismatch = 5,
    NonFinite = 6,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: impl Into<String>) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg.into());
}

fn fail(status: DemonOptStatus, msg: impl Into<String>) -> DemonOptStatus {
    set_error(msg);
    status
}

fn status_for(err: &Error) -> DemonOptStatus {
    match err {
        Error::Domain(_) => DemonOptStatus::DomainError,
        Error::DimensionMismatch { .. } => DemonOptStatus::DimensionMismatch,
        Error::NonFiniteGradient { .. } | Error::NonFinite(_) => DemonOptStatus::NonFinite,
        _ => DemonOptStatus::InvalidArgument,
    }
}

fn from_result<T>(result: Result<T, Error>, out: Option<&mut T>) -> DemonOptStatus {
    match result {
        Ok(value) => {
            if let Some(slot) = out {
                *slot = value;
            }
            DemonOptStatus::Ok
        }
        Err(e) => fail(status_for(&e), e.to_string()),
    }
}

/// Copy the most recent error message for this thread into `buf`
/// (NUL-terminated, truncated to `len`). Returns the full message length in
/// bytes, excluding the terminator.
#[no_mangle]
pub extern "C" fn demon_opt_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        let bytes = msg.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            unsafe {
                std::ptr::copy_nonoverlapping(bytes.as_ptr(), buf.cast::<u8>(), n);
                *buf.add(n) = 0;
            }
        }
        bytes.len()
    })
}

/// Decaying-momentum coefficient at iteration `t` of `total`.
#[no_mangle]
pub extern "C" fn demon_opt_demon_beta(
    t: f64,
    total: f64,
    beta_init: f64,
    out: *mut f64,
) -> DemonOptStatus {
    let Some(out) = (unsafe { out.as_mut() }) else {
        return fail(DemonOptStatus::NullPointer, "out pointer is null");
    };
    from_result(demon_beta(t, total, beta_init), Some(out))
}

/// Theory momentum schedule `(t+1) / (t (t+2))`, defined for `t >= 1`.
#[no_mangle]
pub extern "C" fn demon_opt_demon_theory_beta(t: f64, out: *mut f64) -> DemonOptStatus {
    let Some(out) = (unsafe { out.as_mut() }) else {
        return fail(DemonOptStatus::NullPointer, "out pointer is null");
    };
    from_result(demon_theory_beta(t), Some(out))
}

/// Opaque schedule handle.
pub struct DemonOptSchedule {
    spec: ScheduleSpec,
}

/// Parse a schedule description from a JSON record (same shape as the
/// library's config files). On success writes a handle that must be freed
/// with [`demon_opt_schedule_free`].
#[no_mangle]
pub extern "C" fn demon_opt_schedule_parse_json(
    json: *const c_char,
    out: *mut *mut DemonOptSchedule,
) -> DemonOptStatus {
    if json.is_null() || out.is_null() {
        return fail(DemonOptStatus::NullPointer, "null argument");
    }
    let text = match unsafe { CStr::from_ptr(json) }.to_str() {
        Ok(t) => t,
        Err(e) => return fail(DemonOptStatus::InvalidUtf8, e.to_string()),
    };
    let spec: ScheduleSpec = match serde_json::from_str(text) {
        Ok(s) => s,
        Err(e) => return fail(DemonOptStatus::InvalidArgument, e.to_string()),
    };
    if let Err(e) = spec.validate() {
        return fail(status_for(&e), e.to_string());
    }
    unsafe {
        *out = Box::into_raw(Box::new(DemonOptSchedule { spec }));
    }
    DemonOptStatus::Ok
}

/// Evaluate a parsed schedule at iteration `t` of `total`. Plateau
/// schedules are stateful and not evaluable through this entry point.
#[no_mangle]
pub extern "C" fn demon_opt_schedule_eval(
    schedule: *const DemonOptSchedule,
    t: f64,
    total: f64,
    out: *mut f64,
) -> DemonOptStatus {
    let (Some(schedule), Some(out)) = (unsafe { schedule.as_ref() }, unsafe { out.as_mut() })
    else {
        return fail(DemonOptStatus::NullPointer, "null argument");
    };
    from_result(schedule_eval(&schedule.spec, t, total, None), Some(out))
}

/// Release a schedule handle. A null pointer is a no-op.
#[no_mangle]
pub extern "C" fn demon_opt_schedule_free(schedule: *mut DemonOptSchedule) {
    if !schedule.is_null() {
        drop(unsafe { Box::from_raw(schedule) });
    }
}

/// Opaque optimizer-state handle: parameters, momentum and second-moment
/// buffers, and the step counter.
pub struct DemonOptState {
    state: OptimizerState,
}

/// Create optimizer state with the given starting parameters and zeroed
/// buffers. Free with [`demon_opt_state_free`].
#[no_mangle]
pub extern "C" fn demon_opt_state_new(
    theta: *const f64,
    dim: usize,
    out: *mut *mut DemonOptState,
) -> DemonOptStatus {
    if theta.is_null() || out.is_null() {
        return fail(DemonOptStatus::NullPointer, "null argument");
    }
    if dim == 0 {
        return fail(DemonOptStatus::InvalidArgument, "dim must be >= 1");
    }
    let theta = unsafe { std::slice::from_raw_parts(theta, dim) };
    if theta.iter().any(|x| !x.is_finite()) {
        return fail(DemonOptStatus::NonFinite, "theta must be finite");
    }
    let state = OptimizerState::new(theta.to_vec());
    unsafe {
        *out = Box::into_raw(Box::new(DemonOptState { state }));
    }
    DemonOptStatus::Ok
}

/// Parameter count of a state handle (0 for null).
#[no_mangle]
pub extern "C" fn demon_opt_state_dim(state: *const DemonOptState) -> usize {
    unsafe { state.as_ref() }.map_or(0, |s| s.state.dim())
}

/// Update-call counter of a state handle (0 for null).
#[no_mangle]
pub extern "C" fn demon_opt_state_step(state: *const DemonOptState) -> u64 {
    unsafe { state.as_ref() }.map_or(0, |s| s.state.step)
}

/// Copy the current parameters into `buf` (length must equal the state dim).
#[no_mangle]
pub extern "C" fn demon_opt_state_theta(
    state: *const DemonOptState,
    buf: *mut f64,
    len: usize,
) -> DemonOptStatus {
    let Some(s) = (unsafe { state.as_ref() }) else {
        return fail(DemonOptStatus::NullPointer, "state is null");
    };
    if buf.is_null() {
        return fail(DemonOptStatus::NullPointer, "buf is null");
    }
    if len != s.state.dim() {
        return fail(
            DemonOptStatus::DimensionMismatch,
            format!("buf len {} != dim {}", len, s.state.dim()),
        );
    }
    unsafe {
        std::ptr::copy_nonoverlapping(s.state.theta.as_ptr(), buf, len);
    }
    DemonOptStatus::Ok
}

/// Release a state handle. A null pointer is a no-op.
#[no_mangle]
pub extern "C" fn demon_opt_state_free(state: *mut DemonOptState) {
    if !state.is_null() {
        drop(unsafe { Box::from_raw(state) });
    }
}

fn gradient_slice<'a>(
    state: &DemonOptState,
    g: *const f64,
    len: usize,
) -> Result<&'a [f64], DemonOptStatus> {
    if g.is_null() {
        return Err(fail(DemonOptStatus::NullPointer, "gradient is null"));
    }
    if len != state.state.dim() {
        return Err(fail(
            DemonOptStatus::DimensionMismatch,
            format!("gradient len {} != dim {}", len, state.state.dim()),
        ));
    }
    Ok(unsafe { std::slice::from_raw_parts(g, len) })
}

/// One SGDM update with an externally scheduled momentum coefficient
/// (`beta = 0` is plain SGD).
#[no_mangle]
pub extern "C" fn demon_opt_sgdm_step(
    state: *mut DemonOptState,
    g: *const f64,
    len: usize,
    eta: f64,
    beta: f64,
    weight_decay: f64,
) -> DemonOptStatus {
    let Some(s) = (unsafe { state.as_mut() }) else {
        return fail(DemonOptStatus::NullPointer, "state is null");
    };
    let g = match gradient_slice(s, g, len) {
        Ok(g) => g,
        Err(status) => return status,
    };
    let h = StepHyper {
        eta,
        beta,
        weight_decay,
        ..StepHyper::default()
    };
    from_result(sgdm_step(&mut s.state, g, &h), None)
}

/// One decaying-momentum SGDM update at iteration `t` of `total`.
#[no_mangle]
pub extern "C" fn demon_opt_demon_sgdm_step(
    state: *mut DemonOptState,
    g: *const f64,
    len: usize,
    eta: f64,
    beta_init: f64,
    t: usize,
    total: usize,
    weight_decay: f64,
) -> DemonOptStatus {
    let Some(s) = (unsafe { state.as_mut() }) else {
        return fail(DemonOptStatus::NullPointer, "state is null");
    };
    let g = match gradient_slice(s, g, len) {
        Ok(g) => g,
        Err(status) => return status,
    };
    let extras = StepHyper {
        weight_decay,
        ..StepHyper::default()
    };
    from_result(
        demon_sgdm_step(&mut s.state, g, eta, beta_init, t, total, &extras),
        None,
    )
}

/// One decaying-momentum Adam update at iteration `t` of `total`.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub extern "C" fn demon_opt_demon_adam_step(
    state: *mut DemonOptState,
    g: *const f64,
    len: usize,
    eta: f64,
    beta_init: f64,
    t: usize,
    total: usize,
    beta2: f64,
    epsilon: f64,
    weight_decay: f64,
) -> DemonOptStatus {
    let Some(s) = (unsafe { state.as_mut() }) else {
        return fail(DemonOptStatus::NullPointer, "state is null");
    };
    let g = match gradient_slice(s, g, len) {
        Ok(g) => g,
        Err(status) => return status,
    };
    let h = StepHyper {
        eta,
        beta: 0.0,
        beta2,
        epsilon,
        weight_decay,
    };
    from_result(
        demon_adam_step(&mut s.state, g, eta, beta_init, t, total, &h),
        None,
    )
}

/// One bias-corrected Adam update.
#[no_mangle]
pub extern "C" fn demon_opt_adam_step(
    state: *mut DemonOptState,
    g: *const f64,
    len: usize,
    eta: f64,
    beta1: f64,
    beta2: f64,
    epsilon: f64,
    weight_decay: f64,
) -> DemonOptStatus {
    let Some(s) = (unsafe { state.as_mut() }) else {
        return fail(DemonOptStatus::NullPointer, "state is null");
    };
    let g = match gradient_slice(s, g, len) {
        Ok(g) => g,
        Err(status) => return status,
    };
    let h = StepHyper {
        eta,
        beta: beta1,
        beta2,
        epsilon,
        weight_decay,
    };
    from_result(adam_step(&mut s.state, g, &h), None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ffi::CString;

    fn last_error() -> String {
        let mut buf = vec![0i8; 256];
        let n = demon_opt_last_error_message(buf.as_mut_ptr(), buf.len());
        let bytes: Vec<u8> = buf[..n.min(255)].iter().map(|&b| b as u8).collect();
        String::from_utf8(bytes).unwrap()
    }

    #[test]
    fn beta_endpoints_via_ffi() {
        let mut out = -1.0;
        assert_eq!(
            demon_opt_demon_beta(0.0, 100.0, 0.9, &mut out),
            DemonOptStatus::Ok
        );
        assert_eq!(out, 0.9);
        assert_eq!(
            demon_opt_demon_beta(100.0, 100.0, 0.9, &mut out),
            DemonOptStatus::Ok
        );
        assert_eq!(out, 0.0);
        assert_eq!(
            demon_opt_demon_beta(0.0, 100.0, 1.5, &mut out),
            DemonOptStatus::DomainError
        );
        assert!(last_error().contains("beta_init"));
        assert_eq!(
            demon_opt_demon_beta(0.0, 100.0, 0.9, std::ptr::null_mut()),
            DemonOptStatus::NullPointer
        );
    }

    #[test]
    fn theory_beta_via_ffi() {
        let mut out = 0.0;
        assert_eq!(demon_opt_demon_theory_beta(1.0, &mut out), DemonOptStatus::Ok);
        assert_eq!(out, 2.0 / 3.0);
        assert_eq!(
            demon_opt_demon_theory_beta(0.0, &mut out),
            DemonOptStatus::DomainError
        );
    }

    #[test]
    fn schedule_parse_eval_free() {
        let json = CString::new(r#"{"kind":"demon","init_value":0.9,"target":"momentum"}"#).unwrap();
        let mut handle: *mut DemonOptSchedule = std::ptr::null_mut();
        assert_eq!(
            demon_opt_schedule_parse_json(json.as_ptr(), &mut handle),
            DemonOptStatus::Ok
        );
        let mut out = 0.0;
        assert_eq!(
            demon_opt_schedule_eval(handle, 50.0, 100.0, &mut out),
            DemonOptStatus::Ok
        );
        assert!((out - 0.45 / 0.55).abs() < 1e-15);
        demon_opt_schedule_free(handle);

        let bad = CString::new(r#"{"kind":"demon","init_value":0.9,"target":"momentum","x":1}"#)
            .unwrap();
        let mut handle: *mut DemonOptSchedule = std::ptr::null_mut();
        assert_eq!(
            demon_opt_schedule_parse_json(bad.as_ptr(), &mut handle),
            DemonOptStatus::InvalidArgument
        );
        assert!(last_error().contains('x'));
    }

    #[test]
    fn sgdm_steps_match_hand_values() {
        let theta = [0.0];
        let mut state: *mut DemonOptState = std::ptr::null_mut();
        assert_eq!(
            demon_opt_state_new(theta.as_ptr(), 1, &mut state),
            DemonOptStatus::Ok
        );
        assert_eq!(demon_opt_state_dim(state), 1);

        let g = [1.0];
        assert_eq!(
            demon_opt_sgdm_step(state, g.as_ptr(), 1, 0.1, 0.9, 0.0),
            DemonOptStatus::Ok
        );
        assert_eq!(
            demon_opt_sgdm_step(state, g.as_ptr(), 1, 0.1, 0.9, 0.0),
            DemonOptStatus::Ok
        );
        let mut out = [0.0];
        assert_eq!(
            demon_opt_state_theta(state, out.as_mut_ptr(), 1),
            DemonOptStatus::Ok
        );
        assert!((out[0] + 0.29).abs() < 1e-15);
        assert_eq!(demon_opt_state_step(state), 2);

        // dimension mismatch surfaces as a status code
        assert_eq!(
            demon_opt_sgdm_step(state, g.as_ptr(), 2, 0.1, 0.9, 0.0),
            DemonOptStatus::DimensionMismatch
        );
        let nan = [f64::NAN];
        assert_eq!(
            demon_opt_sgdm_step(state, nan.as_ptr(), 1, 0.1, 0.9, 0.0),
            DemonOptStatus::NonFinite
        );
        demon_opt_state_free(state);
    }

    #[test]
    fn demon_steps_via_ffi_match_library() {
        use demon_opt::optimizers::OptimizerState;

        let mut state: *mut DemonOptState = std::ptr::null_mut();
        let theta = [0.5, -0.25];
        demon_opt_state_new(theta.as_ptr(), 2, &mut state);
        let mut reference = OptimizerState::new(theta.to_vec());
        let total = 50;
        for t in 0..total {
            let g = [(t as f64 * 0.3).sin(), 0.2];
            assert_eq!(
                demon_opt_demon_sgdm_step(state, g.as_ptr(), 2, 0.05, 0.9, t, total, 0.0),
                DemonOptStatus::Ok
            );
            demon_sgdm_step(
                &mut reference,
                &g,
                0.05,
                0.9,
                t,
                total,
                &StepHyper::default(),
            )
            .unwrap();
        }
        let mut out = [0.0; 2];
        demon_opt_state_theta(state, out.as_mut_ptr(), 2);
        assert_eq!(out.to_vec(), reference.theta);
        demon_opt_state_free(state);

        // adam variants run and reject bad t
        let mut state: *mut DemonOptState = std::ptr::null_mut();
        demon_opt_state_new(theta.as_ptr(), 2, &mut state);
        let g = [1.0, -1.0];
        assert_eq!(
            demon_opt_demon_adam_step(state, g.as_ptr(), 2, 0.001, 0.9, 0, 10, 0.999, 1e-8, 0.0),
            DemonOptStatus::Ok
        );
        assert_eq!(
            demon_opt_demon_adam_step(state, g.as_ptr(), 2, 0.001, 0.9, 10, 10, 0.999, 1e-8, 0.0),
            DemonOptStatus::DomainError
        );
        assert_eq!(
            demon_opt_adam_step(state, g.as_ptr(), 2, 0.001, 0.9, 0.999, 1e-8, 0.0),
            DemonOptStatus::Ok
        );
        demon_opt_state_free(state);
        demon_opt_state_free(std::ptr::null_mut());
        demon_opt_schedule_free(std::ptr::null_mut());
    }

    #[test]
    fn generated_header_covers_the_surface() {
        let header = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("include/demon_opt.h");
        let text = std::fs::read_to_string(header).expect("cbindgen header exists");
        for symbol in [
            "demon_opt_demon_beta",
            "demon_opt_schedule_parse_json",
            "demon_opt_schedule_eval",
            "demon_opt_schedule_free",
            "demon_opt_state_new",
            "demon_opt_state_theta",
            "demon_opt_sgdm_step",
            "demon_opt_demon_sgdm_step",
            "demon_opt_demon_adam_step",
            "demon_opt_adam_step",
            "demon_opt_last_error_message",
            "DemonOptStatus",
            "DemonOptSchedule",
            "DemonOptState",
        ] {
            assert!(text.contains(symbol), "header is missing {symbol}");
        }
    }
}
