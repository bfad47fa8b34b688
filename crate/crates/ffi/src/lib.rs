//! C ABI over the bigrade engine.
//!
//! Every function returns a [`BigradeStatus`]; on failure the message is available
//! from [`bigrade_last_error_message`] on the same thread. Strings handed out by the
//! library must be released with [`bigrade_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use bigrade::koszul::Verdict;
use bigrade::session::{Session, SessionConfig};
use bigrade::verify::{finite_length_block, verify, VerifyOptions};
use bigrade::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BigradeStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    /// Malformed generators, bad prime, invalid window, or an ideal that is not m-primary.
    InvalidInput = 3,
    FitUnstable = 4,
    /// Any other failure inside the engine, including failed internal cross-checks.
    Computation = 5,
    OutOfRange = 6,
    BufferTooSmall = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BigradeVerdictKind {
    Finite = 0,
    InfiniteDetected = 1,
    Inconclusive = 2,
}

/// Session settings. Obtain defaults from [`bigrade_options_default`].
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct BigradeOptions {
    pub prime: u32,
    /// Truncation order; 0 derives it from the inputs.
    pub order: u32,
    pub r_max: u32,
    pub s_max: u32,
    pub k_min: u32,
    pub k_max: u32,
    /// When false the seed is derived from the inputs.
    pub has_seed: bool,
    pub seed: u64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BigradeCoefficients {
    pub e20: i64,
    pub e11: i64,
    pub e02: i64,
    pub e10: i64,
    pub e01: i64,
    pub e00: i64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BigradeVerdict {
    pub kind: BigradeVerdictKind,
    /// Length for `Finite`, detected slope for `InfiniteDetected`, 0 otherwise.
    pub value: u64,
}

/// Opaque session handle.
pub struct BigradeSession {
    session: Session,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> BigradeStatus {
    match e {
        Error::Parse { .. }
        | Error::Config(_)
        | Error::InvalidModulus(_)
        | Error::NotMPrimary { .. }
        | Error::ZeroDivisorInput
        | Error::NotRegularSequence => BigradeStatus::InvalidInput,
        Error::FitUnstable(_) => BigradeStatus::FitUnstable,
        _ => BigradeStatus::Computation,
    }
}

struct Failure(BigradeStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> BigradeStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => BigradeStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            BigradeStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(BigradeStatus::NullArgument, format!("{what} is null"))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| Failure(BigradeStatus::InvalidUtf8, format!("{what}: {e}")))
}

unsafe fn handle<'a>(h: *mut BigradeSession) -> Result<&'a mut BigradeSession, Failure> {
    h.as_mut().ok_or_else(|| null("session"))
}

unsafe fn out<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| null(what))
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s).expect("json has no nul bytes").into_raw()
}

/// Default settings: prime 32003, derived order, 8x8 window, k in 4..=10, derived seed.
#[no_mangle]
pub extern "C" fn bigrade_options_default() -> BigradeOptions {
    let d = SessionConfig::default();
    BigradeOptions {
        prime: d.prime,
        order: 0,
        r_max: d.r_max,
        s_max: d.s_max,
        k_min: d.k_min,
        k_max: d.k_max,
        has_seed: false,
        seed: 0,
    }
}

/// Creates a session for the ideals `first` and `second`, given as comma separated
/// generators such as `"x^2, x*y, y^2"`. `options` may be null for defaults.
///
/// # Safety
/// `first` and `second` must be nul-terminated strings; `options` null or valid;
/// `out_session` writable.
#[no_mangle]
pub unsafe extern "C" fn bigrade_session_new(
    first: *const c_char,
    second: *const c_char,
    options: *const BigradeOptions,
    out_session: *mut *mut BigradeSession,
) -> BigradeStatus {
    guard(|| {
        let slot = out(out_session, "out_session")?;
        *slot = ptr::null_mut();
        let o = options.as_ref().copied().unwrap_or_else(|| bigrade_options_default());
        let cfg = SessionConfig {
            prime: o.prime,
            order: (o.order != 0).then_some(o.order),
            r_max: o.r_max,
            s_max: o.s_max,
            k_min: o.k_min,
            k_max: o.k_max,
            seed: o.has_seed.then_some(o.seed),
            ..SessionConfig::new(text(first, "first")?, text(second, "second")?)
        };
        let session = Session::new(&cfg)?;
        *slot = Box::into_raw(Box::new(BigradeSession { session }));
        Ok(())
    })
}

/// # Safety
/// `session` must come from [`bigrade_session_new`] and not be used afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn bigrade_session_free(session: *mut BigradeSession) {
    if !session.is_null() {
        drop(Box::from_raw(session));
    }
}

/// The message of the last failed call on this thread, or null. Valid until the
/// next call into the library on this thread.
#[no_mangle]
pub extern "C" fn bigrade_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `s` must come from this library and not be used afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn bigrade_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// The truncation order currently in use; it grows if a computation needed more.
///
/// # Safety
/// `session` valid, `out_order` writable.
#[no_mangle]
pub unsafe extern "C" fn bigrade_session_order(session: *mut BigradeSession, out_order: *mut u32) -> BigradeStatus {
    guard(|| {
        let h = handle(session)?;
        *out(out_order, "out_order")? = h.session.algebra.order();
        Ok(())
    })
}

/// The seed used for random joint reductions.
///
/// # Safety
/// `session` valid, `out_seed` writable.
#[no_mangle]
pub unsafe extern "C" fn bigrade_session_seed(session: *mut BigradeSession, out_seed: *mut u64) -> BigradeStatus {
    guard(|| {
        let h = handle(session)?;
        *out(out_seed, "out_seed")? = h.session.seed();
        Ok(())
    })
}

/// `λ(R/I^r J^s)` for `(r,s)` inside the window.
///
/// # Safety
/// `session` valid, `out_length` writable.
#[no_mangle]
pub unsafe extern "C" fn bigrade_length(
    session: *mut BigradeSession,
    r: u32,
    s: u32,
    out_length: *mut u64,
) -> BigradeStatus {
    guard(|| {
        let h = handle(session)?;
        let slot = out(out_length, "out_length")?;
        let c = &h.session.config;
        if r > c.r_max || s > c.s_max {
            return Err(Failure(
                BigradeStatus::OutOfRange,
                format!("({r},{s}) lies outside the {}x{} window", c.r_max, c.s_max),
            ));
        }
        *slot = h.session.run_in_place(|s2| Ok(s2.table()?.get(r, s)))?;
        Ok(())
    })
}

/// Copies the whole table row-major into `buffer`, `(r_max+1)*(s_max+1)` entries.
/// With a null `buffer` only `out_len` is filled in.
///
/// # Safety
/// `session` valid, `buffer` null or writable for `capacity` entries, `out_len` writable.
#[no_mangle]
pub unsafe extern "C" fn bigrade_length_table(
    session: *mut BigradeSession,
    buffer: *mut u64,
    capacity: usize,
    out_len: *mut usize,
) -> BigradeStatus {
    guard(|| {
        let h = handle(session)?;
        let len = out(out_len, "out_len")?;
        let c = &h.session.config;
        *len = (c.r_max as usize + 1) * (c.s_max as usize + 1);
        if buffer.is_null() {
            return Ok(());
        }
        if capacity < *len {
            return Err(Failure(BigradeStatus::BufferTooSmall, format!("need {} entries, got {capacity}", *len)));
        }
        let values: Vec<u64> = h.session.run_in_place(|s| Ok(s.table()?.rows().concat()))?;
        std::slice::from_raw_parts_mut(buffer, values.len()).copy_from_slice(&values);
        Ok(())
    })
}

/// The six bigraded coefficients.
///
/// # Safety
/// `session` valid, `out_coefficients` writable.
#[no_mangle]
pub unsafe extern "C" fn bigrade_coefficients(
    session: *mut BigradeSession,
    out_coefficients: *mut BigradeCoefficients,
) -> BigradeStatus {
    guard(|| {
        let h = handle(session)?;
        let slot = out(out_coefficients, "out_coefficients")?;
        let b = h.session.run_in_place(|s| Ok(s.coefficients()?.bhattacharya))?;
        *slot = BigradeCoefficients {
            e20: b.e20,
            e11: b.e11,
            e02: b.e02,
            e10: b.e10,
            e01: b.e01,
            e00: b.e00,
        };
        Ok(())
    })
}

/// The full coefficient report as JSON; free with [`bigrade_string_free`].
///
/// # Safety
/// `session` valid, `out_json` writable.
#[no_mangle]
pub unsafe extern "C" fn bigrade_coefficients_json(
    session: *mut BigradeSession,
    out_json: *mut *mut c_char,
) -> BigradeStatus {
    guard(|| {
        let h = handle(session)?;
        let slot = out(out_json, "out_json")?;
        *slot = ptr::null_mut();
        let v = h.session.run_in_place(|s| Ok(s.coefficients()?.to_json()))?;
        *slot = into_c_string(v.to_string());
        Ok(())
    })
}

/// Classifies `λ(H^2(r,s))` from the lengths of the Koszul-type quotients.
///
/// # Safety
/// `session` valid, `out_verdict` writable.
#[no_mangle]
pub unsafe extern "C" fn bigrade_classify_h2(
    session: *mut BigradeSession,
    r: u32,
    s: u32,
    out_verdict: *mut BigradeVerdict,
) -> BigradeStatus {
    guard(|| {
        let h = handle(session)?;
        let slot = out(out_verdict, "out_verdict")?;
        let (class, _) = h.session.run_in_place(|sess| finite_length_block(sess, r, s))?;
        *slot = match class.verdict {
            Verdict::Finite(v) => BigradeVerdict { kind: BigradeVerdictKind::Finite, value: v },
            Verdict::InfiniteDetected(v) => BigradeVerdict { kind: BigradeVerdictKind::InfiniteDetected, value: v },
            Verdict::Inconclusive => BigradeVerdict { kind: BigradeVerdictKind::Inconclusive, value: 0 },
        };
        Ok(())
    })
}

/// Runs every verification block. The report is returned as JSON (free with
/// [`bigrade_string_free`]); `out_passed` tells whether all asserted blocks agree.
///
/// # Safety
/// `session` valid, `out_json` writable, `out_passed` null or writable.
#[no_mangle]
pub unsafe extern "C" fn bigrade_verify_json(
    session: *mut BigradeSession,
    out_json: *mut *mut c_char,
    out_passed: *mut bool,
) -> BigradeStatus {
    guard(|| {
        let h = handle(session)?;
        let slot = out(out_json, "out_json")?;
        *slot = ptr::null_mut();
        let report = h.session.run_in_place(|s| verify(s, &VerifyOptions::default()))?;
        if let Some(p) = out_passed.as_mut() {
            *p = report.passed();
        }
        *slot = into_c_string(report.to_json().to_string());
        Ok(())
    })
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn bigrade_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
