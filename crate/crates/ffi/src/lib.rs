//! C ABI over the `ion_cavity` simulator.
//!
//! Handles are opaque heap objects owned by the caller once returned and
//! released with the matching `*_free` function. Every fallible call
//! returns an [`IcStatus`]; on failure [`ic_last_error`] describes the
//! problem for the calling thread. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, c_double, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use ion_cavity::config::{parse_config, RunConfig};
use ion_cavity::gates::{cnot_sequence, truth_table, GateReport, Model};
use ion_cavity::hamiltonian::{lamb_dicke_ops, PhysParams};
use ion_cavity::propagate::GridPolicy;
use ion_cavity::space::ModeLayout;
use ion_cavity::Error;

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IcStatus {
    Ok = 0,
    InvalidArgument = 1,
    Parse = 2,
    Validation = 3,
    Numerical = 4,
    Io = 5,
    NullPointer = 6,
    Panic = 7,
}

/// Propagation model selector.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IcModel {
    Effective = 0,
    Full = 1,
    Lab = 2,
}

impl From<IcModel> for Model {
    fn from(m: IcModel) -> Model {
        match m {
            IcModel::Effective => Model::Effective,
            IcModel::Full => Model::Full,
            IcModel::Lab => Model::Lab,
        }
    }
}

/// Validated run configuration.
pub struct IcConfig {
    inner: RunConfig,
}

/// Result of a truth-table run.
pub struct IcReport {
    inner: GateReport,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn status_of(e: &Error) -> IcStatus {
    match e {
        Error::InvalidArgument(_) => IcStatus::InvalidArgument,
        Error::Parse { .. } | Error::Json(_) => IcStatus::Parse,
        Error::Validation(_) => IcStatus::Validation,
        Error::Numerical(_) => IcStatus::Numerical,
        Error::Io(_) | Error::Csv(_) => IcStatus::Io,
    }
}

fn guard<F: FnOnce() -> Result<(), IcStatus>>(f: F) -> IcStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => IcStatus::Ok,
        Ok(Err(s)) => s,
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            IcStatus::Panic
        }
    }
}

fn fail(e: Error) -> IcStatus {
    set_error(e.to_string());
    status_of(&e)
}

fn null(what: &str) -> IcStatus {
    set_error(format!("{what} is null"));
    IcStatus::NullPointer
}

/// Message for the most recent failure on this thread, or NULL. The
/// pointer stays valid until the next library call on the same thread.
#[no_mangle]
pub extern "C" fn ic_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ic_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parse a JSON run configuration.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ic_config_from_json(json: *const c_char, out: *mut *mut IcConfig) -> IcStatus {
    guard(|| {
        if json.is_null() {
            return Err(null("json"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let text = CStr::from_ptr(json)
            .to_str()
            .map_err(|_| fail(Error::InvalidArgument("config is not valid UTF-8".into())))?;
        let inner = parse_config(text).map_err(fail)?;
        *out = Box::into_raw(Box::new(IcConfig { inner }));
        Ok(())
    })
}

/// Built-in default parameters with the given cutoffs and model.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ic_config_default(
    vib_cutoff: usize,
    cav_cutoff: usize,
    model: IcModel,
    out: *mut *mut IcConfig,
) -> IcStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let layout = ModeLayout::new(vib_cutoff, cav_cutoff).map_err(fail)?;
        let inner = RunConfig {
            params: PhysParams::desk_default(),
            layout,
            model: model.into(),
            noise: None,
            grid_policy: GridPolicy::default(),
            output_path: None,
        };
        *out = Box::into_raw(Box::new(IcConfig { inner }));
        Ok(())
    })
}

/// # Safety
/// `config` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ic_config_free(config: *mut IcConfig) {
    if !config.is_null() {
        drop(Box::from_raw(config));
    }
}

/// Run the CNOT schedule on the four logical inputs.
///
/// # Safety
/// `config` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ic_truth_table(config: *const IcConfig, out: *mut *mut IcReport) -> IcStatus {
    guard(|| {
        let cfg = config.as_ref().ok_or_else(|| null("config"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let c = &cfg.inner;
        let seq = cnot_sequence(&c.params, c.layout, c.model).map_err(fail)?;
        let inner = truth_table(&seq, c.grid_policy).map_err(fail)?;
        *out = Box::into_raw(Box::new(IcReport { inner }));
        Ok(())
    })
}

/// # Safety
/// `report` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ic_report_free(report: *mut IcReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// Logical matrix as 32 doubles, row-major, interleaved `re, im`.
///
/// # Safety
/// `report` must be live; `out` must hold 32 doubles.
#[no_mangle]
pub unsafe extern "C" fn ic_report_logical_matrix(report: *const IcReport, out: *mut c_double) -> IcStatus {
    guard(|| {
        let r = report.as_ref().ok_or_else(|| null("report"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let dst = std::slice::from_raw_parts_mut(out, 32);
        for row in 0..4 {
            for col in 0..4 {
                let z = r.inner.logical_matrix[(row, col)];
                dst[2 * (4 * row + col)] = z.re;
                dst[2 * (4 * row + col) + 1] = z.im;
            }
        }
        Ok(())
    })
}

/// Leakage out of the logical subspace for each of the four inputs.
///
/// # Safety
/// `report` must be live; `out` must hold 4 doubles.
#[no_mangle]
pub unsafe extern "C" fn ic_report_leakage(report: *const IcReport, out: *mut c_double) -> IcStatus {
    guard(|| {
        let r = report.as_ref().ok_or_else(|| null("report"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        std::slice::from_raw_parts_mut(out, 4).copy_from_slice(&r.inner.leakage_per_input);
        Ok(())
    })
}

/// Raw, phase-fitted and local-equivalence fidelities. Any output pointer
/// may be NULL.
///
/// # Safety
/// `report` must be live; non-null outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn ic_report_fidelities(
    report: *const IcReport,
    raw: *mut c_double,
    phase_fitted: *mut c_double,
    local_equiv: *mut c_double,
) -> IcStatus {
    guard(|| {
        let r = report.as_ref().ok_or_else(|| null("report"))?;
        for (p, v) in [
            (raw, r.inner.raw_fidelity),
            (phase_fitted, r.inner.phase_fitted_fidelity),
            (local_equiv, r.inner.local_equiv_fidelity),
        ] {
            if !p.is_null() {
                *p = v;
            }
        }
        Ok(())
    })
}

/// Makhlin invariants `G1 = g1_re + i g1_im` and `G2`.
///
/// # Safety
/// `report` must be live; outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn ic_report_makhlin(
    report: *const IcReport,
    g1_re: *mut c_double,
    g1_im: *mut c_double,
    g2: *mut c_double,
) -> IcStatus {
    guard(|| {
        let r = report.as_ref().ok_or_else(|| null("report"))?;
        if g1_re.is_null() || g1_im.is_null() || g2.is_null() {
            return Err(null("output"));
        }
        *g1_re = r.inner.makhlin.g1.re;
        *g1_im = r.inner.makhlin.g1.im;
        *g2 = r.inner.makhlin.g2;
        Ok(())
    })
}

/// Report as JSON; release the string with [`ic_string_free`].
///
/// # Safety
/// `report` must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ic_report_to_json(report: *const IcReport, out: *mut *mut c_char) -> IcStatus {
    guard(|| {
        let r = report.as_ref().ok_or_else(|| null("report"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let s = CString::new(r.inner.to_json_string()).expect("json has no NUL bytes");
        *out = s.into_raw();
        Ok(())
    })
}

/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ic_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// `‖sin(ηX) − ηX‖` and its bound `max|ηλ|³/6` at the given cutoff.
///
/// # Safety
/// Outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn ic_lamb_dicke_check(
    eta: c_double,
    cutoff: usize,
    error_norm: *mut c_double,
    bound: *mut c_double,
) -> IcStatus {
    guard(|| {
        if error_norm.is_null() || bound.is_null() {
            return Err(null("output"));
        }
        let c = lamb_dicke_ops(eta, cutoff).map_err(fail)?;
        *error_norm = c.error_norm;
        *bound = c.bound;
        Ok(())
    })
}
