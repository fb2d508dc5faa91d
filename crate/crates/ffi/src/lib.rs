//! C ABI for surgelens. Specs live behind an opaque handle; every call
//! returns an [`SlStatus`], and the message for the most recent failure on
//! the calling thread is available from [`sl_last_error`]. Strings handed out
//! by the library are freed with [`sl_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use surgelens::catalog::{lens_canonical, Outcome};
use surgelens::cyclo::CycNum;
use surgelens::obstruct::lens_candidate_filter;
use surgelens::scan::{classify, family_link};
use surgelens::surgery::{h1_surgery, SurgerySlope, SurgerySpec};
use surgelens::{Error, LaurentPoly};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SlStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    BadArity = 4,
    NotCyclic = 5,
    Precondition = 6,
    Arithmetic = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SlOutcome {
    Lens = 0,
    NotLens = 1,
    NotCyclicH1 = 2,
    OutOfTableRange = 3,
}

/// A classification. `lens_p`, `lens_q` and `lens_case` are zero unless
/// `outcome` is `SL_OUTCOME_LENS`.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SlVerdict {
    pub outcome: SlOutcome,
    pub lens_p: u64,
    pub lens_q: i64,
    pub lens_case: u8,
}

/// Opaque surgery spec: a link plus one slope per component.
pub struct SlSpec(SurgerySpec);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> SlStatus {
    match e {
        Error::Parse(_) => SlStatus::Parse,
        Error::BadArity(_) => SlStatus::BadArity,
        Error::NotCyclic => SlStatus::NotCyclic,
        Error::Precondition(_) | Error::BadDivisor { .. } => SlStatus::Precondition,
        _ => SlStatus::Arithmetic,
    }
}

struct Fail(SlStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

/// Runs `f`, turning errors and panics into a status plus a stored message.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> SlStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            SlStatus::Ok
        }
        Ok(Err(Fail(s, msg))) => {
            set_error(msg);
            s
        }
        Err(_) => {
            set_error("internal panic".into());
            SlStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail(SlStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(SlStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn opt_str_arg<'a>(p: *const c_char, what: &str) -> Result<Option<&'a str>, Fail> {
    if p.is_null() {
        Ok(None)
    } else {
        str_arg(p, what).map(Some)
    }
}

fn out_ptr<T>(p: *mut T, what: &str) -> Result<(), Fail> {
    if p.is_null() {
        Err(Fail(SlStatus::NullPointer, format!("{what} is null")))
    } else {
        Ok(())
    }
}

unsafe fn spec_ref<'a>(spec: *const SlSpec) -> Result<&'a SurgerySpec, Fail> {
    spec.as_ref()
        .map(|s| &s.0)
        .ok_or_else(|| Fail(SlStatus::NullPointer, "spec is null".into()))
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> Result<(), Fail> {
    out_ptr(out, "out")?;
    let c = CString::new(s).map_err(|_| Fail(SlStatus::Arithmetic, "interior NUL in output".into()))?;
    *out = c.into_raw();
    Ok(())
}

/// Message for the last failed call on this thread, or NULL. The pointer is
/// valid until the next call into the library on the same thread.
#[no_mangle]
pub extern "C" fn sl_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn sl_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn sl_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Builds a spec from a family name (`milnor3`, `milnor`, `whitehead`,
/// `brunnian_type`) and a slope list such as `"1/1,1/1,7/1"`. `f` may be
/// NULL unless the family is `brunnian_type`; `components` is ignored where
/// the family fixes it.
///
/// # Safety
/// String arguments must be NUL-terminated or NULL where allowed; `out` must
/// be writable.
#[no_mangle]
pub unsafe extern "C" fn sl_spec_new(
    family: *const c_char,
    components: usize,
    twists: i64,
    f: *const c_char,
    slopes: *const c_char,
    out: *mut *mut SlSpec,
) -> SlStatus {
    guard(|| {
        out_ptr(out, "out")?;
        let family = str_arg(family, "family")?;
        let f = opt_str_arg(f, "f")?;
        let slopes = SurgerySlope::parse_list(str_arg(slopes, "slopes")?)?;
        let link = family_link(family, Some(components), Some(twists), f)?;
        *out = Box::into_raw(Box::new(SlSpec(SurgerySpec::new(link, slopes)?)));
        Ok(())
    })
}

/// Builds a spec from `{"link": {...}, "slopes": [...]}`.
///
/// # Safety
/// `json` must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sl_spec_from_json(json: *const c_char, out: *mut *mut SlSpec) -> SlStatus {
    guard(|| {
        out_ptr(out, "out")?;
        let text = str_arg(json, "json")?;
        let v: serde_json::Value =
            serde_json::from_str(text).map_err(|e| Fail(SlStatus::Parse, e.to_string()))?;
        *out = Box::into_raw(Box::new(SlSpec(SurgerySpec::from_json(&v)?)));
        Ok(())
    })
}

/// # Safety
/// `spec` must come from this library and not have been freed, or be NULL.
#[no_mangle]
pub unsafe extern "C" fn sl_spec_free(spec: *mut SlSpec) {
    if !spec.is_null() {
        drop(Box::from_raw(spec));
    }
}

/// Number of link components.
///
/// # Safety
/// `spec` must be a live handle or NULL (which gives 0).
#[no_mangle]
pub unsafe extern "C" fn sl_spec_components(spec: *const SlSpec) -> usize {
    spec.as_ref().map_or(0, |s| s.0.lambda())
}

/// Order of `H_1` when it is finite cyclic of order at least 2, else 0.
///
/// # Safety
/// `spec` must be a live handle or NULL (which gives 0).
#[no_mangle]
pub unsafe extern "C" fn sl_spec_h1_order(spec: *const SlSpec) -> u64 {
    spec.as_ref().and_then(|s| h1_surgery(&s.0).cyclic_order()).unwrap_or(0)
}

/// # Safety
/// `spec` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sl_classify(spec: *const SlSpec, out: *mut SlVerdict) -> SlStatus {
    guard(|| {
        out_ptr(out, "out")?;
        let spec = spec_ref(spec)?;
        let v = classify(&spec.link, &spec.slopes)?;
        let (outcome, p, q) = match v.outcome {
            Outcome::Lens(l) => (SlOutcome::Lens, l.p(), l.q()),
            Outcome::NotLens => (SlOutcome::NotLens, 0, 0),
            Outcome::NotCyclicH1 => (SlOutcome::NotCyclicH1, 0, 0),
            Outcome::OutOfTableRange => (SlOutcome::OutOfTableRange, 0, 0),
        };
        *out = SlVerdict {
            outcome,
            lens_p: p,
            lens_q: q,
            lens_case: v.matched.map_or(0, |m| m.case),
        };
        Ok(())
    })
}

/// The classification as JSON; free with [`sl_string_free`].
///
/// # Safety
/// `spec` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sl_classify_json(spec: *const SlSpec, out: *mut *mut c_char) -> SlStatus {
    guard(|| {
        let spec = spec_ref(spec)?;
        write_string(out, classify(&spec.link, &spec.slopes)?.to_json().to_string())
    })
}

/// Obstruction pipeline verdict for component `k` (1-based) as JSON.
///
/// # Safety
/// `spec` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sl_obstruct_json(spec: *const SlSpec, k: usize, out: *mut *mut c_char) -> SlStatus {
    guard(|| {
        let spec = spec_ref(spec)?;
        if k == 0 || k > spec.lambda() {
            return Err(Fail(SlStatus::Precondition, format!("component {k} out of range 1..={}", spec.lambda())));
        }
        if h1_surgery(spec).cyclic_order().is_none() {
            return Err(Error::NotCyclic.into());
        }
        write_string(out, lens_candidate_filter(spec, k - 1)?.to_json().to_string())
    })
}

/// Canonical representative of `L(p, q)`.
///
/// # Safety
/// `p_out` and `q_out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sl_lens_canonical(p: i64, q: i64, p_out: *mut u64, q_out: *mut i64) -> SlStatus {
    guard(|| {
        out_ptr(p_out, "p_out")?;
        out_ptr(q_out, "q_out")?;
        let l = lens_canonical(p, q)?;
        *p_out = l.p();
        *q_out = l.q();
        Ok(())
    })
}

/// Field norm of `Σ coeffs[i] ζ_d^i` as a decimal rational string
/// (`"3"`, `"-1"`, `"5/7"`).
///
/// # Safety
/// `coeffs` must point to `len` readable values (or be NULL with `len` 0);
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sl_d_norm(d: u64, coeffs: *const i64, len: usize, out: *mut *mut c_char) -> SlStatus {
    guard(|| {
        if d == 0 {
            return Err(Fail(SlStatus::Precondition, "d must be positive".into()));
        }
        let c: &[i64] = if len == 0 {
            &[]
        } else if coeffs.is_null() {
            return Err(Fail(SlStatus::NullPointer, "coeffs is null".into()));
        } else {
            std::slice::from_raw_parts(coeffs, len)
        };
        let poly = if c.is_empty() { LaurentPoly::zero(1) } else { LaurentPoly::from_coeffs(c) };
        write_string(out, CycNum::from_laurent(d, &poly).d_norm().to_string())
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn errors_are_reported_per_thread() {
        let mut v = SlVerdict { outcome: SlOutcome::NotLens, lens_p: 0, lens_q: 0, lens_case: 0 };
        assert_eq!(unsafe { sl_classify(ptr::null(), &mut v) }, SlStatus::NullPointer);
        let msg = unsafe { CStr::from_ptr(sl_last_error()) }.to_str().unwrap();
        assert!(msg.contains("null"));
        let (mut p, mut q) = (0u64, 0i64);
        assert_eq!(unsafe { sl_lens_canonical(7, 4, &mut p, &mut q) }, SlStatus::Ok);
        assert!(sl_last_error().is_null());
        assert_eq!((p, q), (7, 2));
    }
}
