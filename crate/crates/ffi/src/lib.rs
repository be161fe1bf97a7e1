//! C ABI over `kdiv`.
//!
//! Objects cross the boundary as opaque handles created by `*_new` /
//! `*_from_json` functions and released by the matching `*_free`. Every
//! fallible call returns a [`KdivStatus`]; on failure the message is kept
//! per thread and can be read with [`kdiv_last_error`]. Strings returned to
//! the caller are owned by the caller and must go back through
//! [`kdiv_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use kdiv::divisibility::{k_divide, p_k_divide, DivisibilityCertificate};
use kdiv::kfunctional::{k_curve, k_value};
use kdiv::{ConcavePL, Couple, DyadicGrid, Element, Error};

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KdivStatus {
    Ok = 0,
    InvalidInput = 1,
    Unsupported = 2,
    HypothesisViolated = 3,
    IterationLimit = 4,
    Numeric = 5,
    NullPointer = 6,
    Utf8 = 7,
    Panic = 8,
    OutOfRange = 9,
}

pub struct KdivCouple(Couple);
pub struct KdivElement(Element);
pub struct KdivCurve(ConcavePL);
pub struct KdivCertificate(DivisibilityCertificate);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> KdivStatus {
    match e {
        Error::InvalidInput(_) | Error::DimensionMismatch { .. } | Error::NonPositiveExponent(_) | Error::NotConcave(_) => {
            KdivStatus::InvalidInput
        }
        Error::Unsupported(_) => KdivStatus::Unsupported,
        Error::HypothesisViolated { .. } => KdivStatus::HypothesisViolated,
        Error::IterationLimit(_) => KdivStatus::IterationLimit,
        Error::Numeric(_) => KdivStatus::Numeric,
    }
}

/// Runs `f`, turning errors and panics into a status plus a stored message.
fn guard(f: impl FnOnce() -> Result<(), KdivStatus>) -> KdivStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => KdivStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic".into());
            KdivStatus::Panic
        }
    }
}

fn lib<T>(r: kdiv::Result<T>) -> Result<T, KdivStatus> {
    r.map_err(|e| {
        set_error(e.to_string());
        status_of(&e)
    })
}

fn fail<T>(status: KdivStatus, msg: &str) -> Result<T, KdivStatus> {
    set_error(msg.into());
    Err(status)
}

unsafe fn str_arg<'a>(s: *const c_char) -> Result<&'a str, KdivStatus> {
    if s.is_null() {
        return fail(KdivStatus::NullPointer, "null string argument");
    }
    match CStr::from_ptr(s).to_str() {
        Ok(v) => Ok(v),
        Err(_) => fail(KdivStatus::Utf8, "argument is not valid UTF-8"),
    }
}

unsafe fn obj<'a, T>(p: *const T) -> Result<&'a T, KdivStatus> {
    if p.is_null() {
        return fail(KdivStatus::NullPointer, "null handle");
    }
    Ok(&*p)
}

unsafe fn out<T>(p: *mut T, v: T) -> Result<(), KdivStatus> {
    if p.is_null() {
        return fail(KdivStatus::NullPointer, "null output pointer");
    }
    p.write(v);
    Ok(())
}

fn json<T: serde::de::DeserializeOwned>(s: &str, what: &str) -> Result<T, KdivStatus> {
    serde_json::from_str(s).or_else(|e| fail(KdivStatus::InvalidInput, &format!("{what}: {e}")))
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s).map(CString::into_raw).unwrap_or(ptr::null_mut())
}

/// Message of the last failed call on this thread, or NULL. Valid until the
/// next call into the library from the same thread.
#[no_mangle]
pub extern "C" fn kdiv_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn kdiv_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a couple such as `{"kind":"sequence_lp","p":0.5,"q":"inf"}`.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out_couple` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kdiv_couple_from_json(text: *const c_char, out_couple: *mut *mut KdivCouple) -> KdivStatus {
    guard(|| {
        let c: Couple = json(str_arg(text)?, "couple")?;
        lib(c.validate())?;
        out(out_couple, Box::into_raw(Box::new(KdivCouple(c))))
    })
}

/// # Safety
/// `c` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn kdiv_couple_free(c: *mut KdivCouple) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

/// Parses `{"seq":[..]}` or `{"step":{"breaks":[..],"values":[..]}}`.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out_element` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kdiv_element_from_json(text: *const c_char, out_element: *mut *mut KdivElement) -> KdivStatus {
    guard(|| {
        let e: Element = json(str_arg(text)?, "element")?;
        out(out_element, Box::into_raw(Box::new(KdivElement(e))))
    })
}

/// A sequence element copied from `values[0..len]`.
///
/// # Safety
/// `values` must point to `len` doubles; `out_element` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kdiv_element_from_values(
    values: *const f64,
    len: usize,
    out_element: *mut *mut KdivElement,
) -> KdivStatus {
    guard(|| {
        if values.is_null() {
            return fail(KdivStatus::NullPointer, "null values");
        }
        let v = std::slice::from_raw_parts(values, len).to_vec();
        let e = lib(Element::seq(v))?;
        out(out_element, Box::into_raw(Box::new(KdivElement(e))))
    })
}

/// Number of values (sequence entries or step pieces).
///
/// # Safety
/// `e` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn kdiv_element_len(e: *const KdivElement) -> usize {
    if e.is_null() {
        return 0;
    }
    (*e).0.len()
}

/// # Safety
/// `e` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn kdiv_element_free(e: *mut KdivElement) {
    if !e.is_null() {
        drop(Box::from_raw(e));
    }
}

/// `K(t, x)` for one `t`.
///
/// # Safety
/// Handles must be live; `out_value` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kdiv_k_value(
    x: *const KdivElement,
    couple: *const KdivCouple,
    t: f64,
    accuracy: f64,
    out_value: *mut f64,
) -> KdivStatus {
    guard(|| {
        let v = lib(k_value(&obj(x)?.0, &obj(couple)?.0, t, accuracy))?;
        out(out_value, v)
    })
}

/// The K-curve of `x`. The grid is used by the numeric engine only.
///
/// # Safety
/// Handles must be live; `out_curve` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kdiv_k_curve(
    x: *const KdivElement,
    couple: *const KdivCouple,
    min_exp: i32,
    max_exp: i32,
    per_octave: u32,
    accuracy: f64,
    out_curve: *mut *mut KdivCurve,
) -> KdivStatus {
    guard(|| {
        let g = lib(DyadicGrid::new(min_exp, max_exp, per_octave))?;
        let k = lib(k_curve(&obj(x)?.0, &obj(couple)?.0, &g, accuracy))?;
        out(out_curve, Box::into_raw(Box::new(KdivCurve(k.curve))))
    })
}

/// Parses `{"knots":[[0,0],[1,1]],"tail_slope":0}`.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out_curve` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kdiv_curve_from_json(text: *const c_char, out_curve: *mut *mut KdivCurve) -> KdivStatus {
    guard(|| {
        let c: ConcavePL = json(str_arg(text)?, "curve")?;
        out(out_curve, Box::into_raw(Box::new(KdivCurve(c))))
    })
}

/// A curve scaled by `lambda >= 0`.
///
/// # Safety
/// `c` must be a live handle; `out_curve` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kdiv_curve_scale(c: *const KdivCurve, lambda: f64, out_curve: *mut *mut KdivCurve) -> KdivStatus {
    guard(|| {
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return fail(KdivStatus::InvalidInput, "scale must be finite and nonnegative");
        }
        let s = obj(c)?.0.scale(lambda);
        out(out_curve, Box::into_raw(Box::new(KdivCurve(s))))
    })
}

/// # Safety
/// `c` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn kdiv_curve_eval(c: *const KdivCurve, t: f64) -> f64 {
    if c.is_null() {
        return f64::NAN;
    }
    (*c).0.eval(t)
}

/// # Safety
/// `c` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn kdiv_curve_free(c: *mut KdivCurve) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

unsafe fn majorant_list(m: *const *const KdivCurve, n: usize) -> Result<Vec<ConcavePL>, KdivStatus> {
    if m.is_null() {
        return fail(KdivStatus::NullPointer, "null majorant list");
    }
    std::slice::from_raw_parts(m, n).iter().map(|c| Ok(obj(*c)?.0.clone())).collect()
}

/// Splits `x` along `majorants[0..n]`; `p = 1` is the linear version.
///
/// # Safety
/// Handles must be live, `majorants` must hold `n` of them and `out_cert`
/// must be writable.
#[no_mangle]
pub unsafe extern "C" fn kdiv_divide(
    x: *const KdivElement,
    couple: *const KdivCouple,
    p: f64,
    majorants: *const *const KdivCurve,
    n: usize,
    out_cert: *mut *mut KdivCertificate,
) -> KdivStatus {
    guard(|| {
        let m = majorant_list(majorants, n)?;
        let (x, c) = (&obj(x)?.0, &obj(couple)?.0);
        let cert = if p == 1.0 { lib(k_divide(x, c, &m))? } else { lib(p_k_divide(x, c, p, &m))? };
        out(out_cert, Box::into_raw(Box::new(KdivCertificate(cert))))
    })
}

/// # Safety
/// `c` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn kdiv_certificate_pieces(c: *const KdivCertificate) -> usize {
    if c.is_null() {
        return 0;
    }
    (*c).0.pieces.len()
}

/// Copies the values of piece `i` into `buf[0..len]`; `len` must equal the
/// element length.
///
/// # Safety
/// `c` must be a live handle and `buf` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn kdiv_certificate_piece(c: *const KdivCertificate, i: usize, buf: *mut f64, len: usize) -> KdivStatus {
    guard(|| {
        let cert = &obj(c)?.0;
        let Some(piece) = cert.pieces.get(i) else {
            return fail(KdivStatus::OutOfRange, "piece index out of range");
        };
        if buf.is_null() {
            return fail(KdivStatus::NullPointer, "null buffer");
        }
        let v = piece.values();
        if v.len() != len {
            return fail(KdivStatus::OutOfRange, &format!("piece has {} values, buffer {}", v.len(), len));
        }
        std::slice::from_raw_parts_mut(buf, len).copy_from_slice(v);
        Ok(())
    })
}

/// Writes the measured and the certified constant; returns whether the
/// certificate is valid.
///
/// # Safety
/// `c` must be a live handle; output pointers may be NULL.
#[no_mangle]
pub unsafe extern "C" fn kdiv_certificate_constants(c: *const KdivCertificate, measured: *mut f64, certified: *mut f64) -> bool {
    if c.is_null() {
        return false;
    }
    let cert = &(*c).0;
    if !measured.is_null() {
        *measured = cert.gamma_measured;
    }
    if !certified.is_null() {
        *certified = cert.gamma_cert;
    }
    cert.valid
}

/// The full certificate as JSON; free with [`kdiv_string_free`].
///
/// # Safety
/// `c` must be a live handle; `out_json` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kdiv_certificate_to_json(c: *const KdivCertificate, out_json: *mut *mut c_char) -> KdivStatus {
    guard(|| {
        let s = kdiv::io::to_json(&obj(c)?.0);
        out(out_json, into_c_string(s))
    })
}

/// # Safety
/// `c` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn kdiv_certificate_free(c: *mut KdivCertificate) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

/// Runs a command-line job given as `argv[0..argc]` without the program
/// name, e.g. `{"kfunc", "--couple", "...", "--element", "..."}`, and
/// returns its artifact (CSV or JSON) in `out_text`.
///
/// # Safety
/// `argv` must hold `argc` NUL-terminated strings; `out_text` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kdiv_run(argv: *const *const c_char, argc: usize, out_text: *mut *mut c_char) -> KdivStatus {
    guard(|| {
        if argv.is_null() && argc > 0 {
            return fail(KdivStatus::NullPointer, "null argv");
        }
        let mut args = vec!["kdiv".to_string()];
        for a in std::slice::from_raw_parts(argv, argc) {
            args.push(str_arg(*a)?.to_string());
        }
        let job = match <kdiv::cli::JobSpec as clap::Parser>::try_parse_from(&args) {
            Ok(j) => j,
            Err(e) => return fail(KdivStatus::InvalidInput, &e.to_string()),
        };
        let text = lib(kdiv::cli::run(&job))?;
        out(out_text, into_c_string(text))
    })
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn kdiv_status_name(s: KdivStatus) -> *const c_char {
    let name: &'static CStr = match s {
        KdivStatus::Ok => c"ok",
        KdivStatus::InvalidInput => c"invalid input",
        KdivStatus::Unsupported => c"unsupported",
        KdivStatus::HypothesisViolated => c"hypothesis violated",
        KdivStatus::IterationLimit => c"iteration limit",
        KdivStatus::Numeric => c"numeric failure",
        KdivStatus::NullPointer => c"null pointer",
        KdivStatus::Utf8 => c"invalid UTF-8",
        KdivStatus::Panic => c"internal panic",
        KdivStatus::OutOfRange => c"out of range",
    };
    name.as_ptr()
}
