//! C interface to `grhom`.
//!
//! Objects are opaque handles created by `grhom_*_new`-style functions and
//! released with the matching `*_free`. Every fallible call returns a
//! [`GrhomStatus`]; on failure the message is available from
//! [`grhom_last_error`] on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use grhom::cli::{run_script, CliError, RunOptions};
use grhom::complexes::Complex;
use grhom::globalext::{rhom_sheaf, sheaf_cohomology, RHomOptions};
use grhom::gradedmod::PresentedModule;
use grhom::polyring::{Polynomial, Ring};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GrhomStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Script = 4,
    Math = 5,
    BufferTooSmall = 6,
    Panic = 7,
}

/// A graded ring: a polynomial ring over GF(p), possibly modulo an ideal.
pub struct GrhomRing(Ring);

/// A bounded complex of graded modules.
pub struct GrhomComplex(Complex);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

struct Failure(GrhomStatus, String);

impl From<grhom::Error> for Failure {
    fn from(e: grhom::Error) -> Self {
        let status = match e {
            grhom::Error::Parse { .. } => GrhomStatus::Parse,
            _ => GrhomStatus::Math,
        };
        Failure(status, e.to_string())
    }
}

impl From<CliError> for Failure {
    fn from(e: CliError) -> Self {
        let status = match e {
            CliError::Parse(_) => GrhomStatus::Parse,
            CliError::Math { .. } => GrhomStatus::Math,
            _ => GrhomStatus::Script,
        };
        Failure(status, e.to_string())
    }
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> GrhomStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error(String::new());
            GrhomStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            GrhomStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(GrhomStatus::NullArgument, format!("{what} is null"))
}

unsafe fn borrow<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    // SAFETY: caller passes a live handle or null.
    unsafe { p.as_ref() }.ok_or_else(|| null(what))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    // SAFETY: caller passes a NUL-terminated string.
    unsafe { CStr::from_ptr(p) }.to_str().map_err(|_| Failure(GrhomStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn polys(ring: &Ring, p: *const *const c_char, n: usize) -> Result<Vec<Polynomial>, Failure> {
    if p.is_null() && n > 0 {
        return Err(null("polynomial array"));
    }
    (0..n)
        .map(|i| {
            // SAFETY: caller guarantees `n` readable entries.
            let s = unsafe { text(*p.add(i), "polynomial")? };
            Ok(ring.parse(s)?)
        })
        .collect()
}

unsafe fn emit<T>(out: *mut *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    // SAFETY: `out` is non-null and writable.
    unsafe { *out = Box::into_raw(Box::new(value)) };
    Ok(())
}

/// Message of the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next `grhom_*` call on this thread.
#[no_mangle]
pub extern "C" fn grhom_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Polynomial ring GF(`prime`)[x0, .., x{nvars-1}].
///
/// # Safety
/// `out` must be a valid pointer to writable storage.
#[no_mangle]
pub unsafe extern "C" fn grhom_ring_new(prime: u64, nvars: usize, out: *mut *mut GrhomRing) -> GrhomStatus {
    guard(|| unsafe { emit(out, GrhomRing(Ring::standard(prime, nvars)?)) })
}

/// Quotient of `ring` by the homogeneous polynomials `gens[0..n]`, written
/// in the variables x0, x1, ...
///
/// # Safety
/// `ring` must be a live handle, `gens` must hold `n` NUL-terminated strings
/// and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn grhom_ring_quotient(
    ring: *const GrhomRing,
    gens: *const *const c_char,
    n: usize,
    out: *mut *mut GrhomRing,
) -> GrhomStatus {
    guard(|| unsafe {
        let ring = &borrow(ring, "ring")?.0;
        let q = ring.quotient(polys(ring, gens, n)?)?;
        emit(out, GrhomRing(q))
    })
}

/// # Safety
/// `ring` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn grhom_ring_free(ring: *mut GrhomRing) {
    if !ring.is_null() {
        // SAFETY: the handle came from `Box::into_raw`.
        drop(unsafe { Box::from_raw(ring) });
    }
}

/// The line bundle O(`d`) as a complex in degree 0.
///
/// # Safety
/// `ring` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn grhom_line_bundle(ring: *const GrhomRing, d: i32, out: *mut *mut GrhomComplex) -> GrhomStatus {
    guard(|| unsafe {
        let ring = borrow(ring, "ring")?.0.clone();
        emit(out, GrhomComplex(Complex::from_module(PresentedModule::free(ring, vec![-d]), 0)))
    })
}

/// Koszul complex on `polys_in[0..n]`, ending in degree 0.
///
/// # Safety
/// `ring` must be a live handle, `polys_in` must hold `n` NUL-terminated
/// strings and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn grhom_koszul(
    ring: *const GrhomRing,
    polys_in: *const *const c_char,
    n: usize,
    out: *mut *mut GrhomComplex,
) -> GrhomStatus {
    guard(|| unsafe {
        let ring = &borrow(ring, "ring")?.0;
        let k = Complex::koszul(ring, &polys(ring, polys_in, n)?)?;
        emit(out, GrhomComplex(k))
    })
}

/// `c[i]`.
///
/// # Safety
/// `c` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn grhom_complex_shift(
    c: *const GrhomComplex,
    i: i32,
    out: *mut *mut GrhomComplex,
) -> GrhomStatus {
    guard(|| unsafe { emit(out, GrhomComplex(borrow(c, "complex")?.0.shift(i))) })
}

/// `c(d)`.
///
/// # Safety
/// `c` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn grhom_complex_twist(
    c: *const GrhomComplex,
    d: i32,
    out: *mut *mut GrhomComplex,
) -> GrhomStatus {
    guard(|| unsafe { emit(out, GrhomComplex(borrow(c, "complex")?.0.twist(d))) })
}

/// # Safety
/// `c` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn grhom_complex_free(c: *mut GrhomComplex) {
    if !c.is_null() {
        // SAFETY: the handle came from `Box::into_raw`.
        drop(unsafe { Box::from_raw(c) });
    }
}

/// Writes dim Ext^m(c, d) for m in `lo..=hi` into `dims[0..hi-lo+1]`.
///
/// # Safety
/// `c` and `d` must be live handles; `dims` must have room for `len` entries.
#[no_mangle]
pub unsafe extern "C" fn grhom_ext_dims(
    c: *const GrhomComplex,
    d: *const GrhomComplex,
    lo: i32,
    hi: i32,
    dims: *mut usize,
    len: usize,
) -> GrhomStatus {
    guard(|| unsafe {
        let (c, d) = (&borrow(c, "source")?.0, &borrow(d, "target")?.0);
        if dims.is_null() {
            return Err(null("dims"));
        }
        let needed = (hi as i64 - lo as i64 + 1).max(0) as usize;
        if len < needed {
            return Err(Failure(GrhomStatus::BufferTooSmall, format!("need {needed} entries, got {len}")));
        }
        let res = rhom_sheaf(c, d, lo, hi, &RHomOptions::default())?;
        for (i, r) in res.results.iter().enumerate() {
            // SAFETY: `i < needed <= len`.
            *dims.add(i) = r.dim;
        }
        Ok(())
    })
}

/// dim H^m(X, F(v)) for the complex `f`.
///
/// # Safety
/// `f` must be a live handle and `dim` writable.
#[no_mangle]
pub unsafe extern "C" fn grhom_sheaf_cohomology(
    f: *const GrhomComplex,
    m: i32,
    v: i32,
    dim: *mut usize,
) -> GrhomStatus {
    guard(|| unsafe {
        let f = &borrow(f, "complex")?.0;
        if dim.is_null() {
            return Err(null("dim"));
        }
        *dim = sheaf_cohomology(f, m, v)?;
        Ok(())
    })
}

/// Runs a `.gx` script and returns its JSON report in `*json`, to be released
/// with [`grhom_string_free`]. A `prime` of 0 keeps the script's own prime.
///
/// # Safety
/// `script` must be NUL-terminated and `json` writable.
#[no_mangle]
pub unsafe extern "C" fn grhom_run_script(script: *const c_char, prime: u64, json: *mut *mut c_char) -> GrhomStatus {
    guard(|| unsafe {
        let script = text(script, "script")?;
        if json.is_null() {
            return Err(null("json"));
        }
        let opts = RunOptions { prime: (prime != 0).then_some(prime) };
        let report = run_script(script, opts)?;
        let body = serde_json::to_string(&report).map_err(|e| Failure(GrhomStatus::Script, e.to_string()))?;
        *json = CString::new(body).map(CString::into_raw).unwrap_or(ptr::null_mut());
        Ok(())
    })
}

/// # Safety
/// `s` must be null or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn grhom_string_free(s: *mut c_char) {
    if !s.is_null() {
        // SAFETY: `s` came from `CString::into_raw`.
        drop(unsafe { CString::from_raw(s) });
    }
}
