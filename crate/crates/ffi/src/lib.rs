//! C ABI over `psets`.
//!
//! Point sets are opaque `PsetsPointSet*` handles released with
//! `psets_pointset_free`. Fallible calls return a `PsetsStatus`; on failure
//! the message is available from `psets_last_error` on the same thread until
//! the next failing call. Strings returned by the library are owned by the
//! caller and released with `psets_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use psets::expsum::{exp_sum, verify_weil, VerifyConfig};
use psets::numtheory::{is_prime, next_prime};
use psets::pointsets::{Family, PointSet, SetSpec};
use psets::sensing::coherence;
use psets::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PsetsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    NotPrime = 3,
    OutOfRange = 4,
    DimensionMismatch = 5,
    NotCertified = 6,
    BudgetExceeded = 7,
    Malformed = 8,
    NumericalFailure = 9,
    Panic = 10,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PsetsFamily {
    Pset = 0,
    ParamPset = 1,
    Pq = 2,
    Qsquare = 3,
    Rsquare = 4,
}

impl From<PsetsFamily> for Family {
    fn from(f: PsetsFamily) -> Self {
        match f {
            PsetsFamily::Pset => Family::Pset,
            PsetsFamily::ParamPset => Family::ParamPset,
            PsetsFamily::Pq => Family::Pq,
            PsetsFamily::Qsquare => Family::Qsquare,
            PsetsFamily::Rsquare => Family::Rsquare,
        }
    }
}

/// Opaque point set handle.
pub struct PsetsPointSet(PointSet);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> PsetsStatus {
    match e {
        Error::NotPrime(_) => PsetsStatus::NotPrime,
        Error::OutOfRange(..) | Error::FrequencyOutOfBox(_) | Error::DegreeTooLarge { .. } => PsetsStatus::OutOfRange,
        Error::DimensionMismatch { .. } => PsetsStatus::DimensionMismatch,
        Error::NotCertified(_) => PsetsStatus::NotCertified,
        Error::RangeTooLarge { .. } | Error::BudgetExceeded { .. } => PsetsStatus::BudgetExceeded,
        Error::Malformed(_) => PsetsStatus::Malformed,
        Error::IllConditioned(_) | Error::ZeroInverse(..) => PsetsStatus::NumericalFailure,
        Error::InvalidParams(_) | Error::DegenerateParams { .. } | Error::SameEpsilon => PsetsStatus::InvalidArgument,
    }
}

struct Fail(PsetsStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(PsetsStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, converting errors and panics into a status plus last-error message.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> PsetsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => PsetsStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(_) => {
            set_last_error("internal panic".into());
            PsetsStatus::Panic
        }
    }
}

unsafe fn slice<'a, T>(data: *const T, len: usize) -> Option<&'a [T]> {
    if data.is_null() {
        None
    } else {
        Some(std::slice::from_raw_parts(data, len))
    }
}

unsafe fn handle<'a>(set: *const PsetsPointSet) -> Result<&'a PointSet, Fail> {
    set.as_ref().map(|h| &h.0).ok_or_else(|| null("set"))
}

unsafe fn emit(set: PointSet, out: *mut *mut PsetsPointSet) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("out"));
    }
    *out = Box::into_raw(Box::new(PsetsPointSet(set)));
    Ok(())
}

fn to_c_string(s: String) -> *mut c_char {
    CString::new(s).map_or(ptr::null_mut(), CString::into_raw)
}

/// Message of the last failed call on this thread, or NULL. Valid until the next failure.
#[no_mangle]
pub extern "C" fn psets_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

#[no_mangle]
pub extern "C" fn psets_is_prime(n: u64) -> bool {
    is_prime(n)
}

/// Smallest prime `≥ n`, or 0 when it would not fit in 63 bits.
#[no_mangle]
pub extern "C" fn psets_next_prime(n: u64) -> u64 {
    if n > (1u64 << 63) - 25 {
        return 0;
    }
    next_prime(n).get()
}

/// Builds a set of any family. `a` and `b` hold `d` entries, `eps` and `eps_b`
/// hold `d − 1`; any of them may be NULL to take the defaults (`a = 1`, `ε = 0`).
/// `q` is ignored unless `family` is `Pq`.
///
/// # Safety
/// Non-null arrays must be readable for the stated lengths; `out` must be writable.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn psets_pointset_new(
    family: PsetsFamily,
    d: usize,
    p: u64,
    q: u64,
    a: *const u64,
    eps: *const u8,
    b: *const u64,
    eps_b: *const u8,
    out: *mut *mut PsetsPointSet,
) -> PsetsStatus {
    guard(|| {
        let mut spec = SetSpec::new(family.into(), d, p);
        let e = d.saturating_sub(1);
        spec.q = matches!(family, PsetsFamily::Pq).then_some(q);
        spec.a = slice(a, d).map(<[u64]>::to_vec);
        spec.eps = slice(eps, e).map(<[u8]>::to_vec);
        spec.b = slice(b, d).map(<[u64]>::to_vec);
        spec.eps_b = slice(eps_b, e).map(<[u8]>::to_vec);
        emit(spec.build()?, out)
    })
}

/// Reads a set from the JSON document produced by `psets_pointset_to_json`.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn psets_pointset_from_json(json: *const c_char, out: *mut *mut PsetsPointSet) -> PsetsStatus {
    guard(|| {
        if json.is_null() {
            return Err(null("json"));
        }
        let text = CStr::from_ptr(json)
            .to_str()
            .map_err(|e| Fail(PsetsStatus::Malformed, e.to_string()))?;
        emit(PointSet::from_json(text)?, out)
    })
}

/// # Safety
/// `set` must come from this library and not have been freed already.
#[no_mangle]
pub unsafe extern "C" fn psets_pointset_free(set: *mut PsetsPointSet) {
    if !set.is_null() {
        drop(Box::from_raw(set));
    }
}

/// Number of points (0 for NULL).
///
/// # Safety
/// `set` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn psets_pointset_len(set: *const PsetsPointSet) -> usize {
    set.as_ref().map_or(0, |h| h.0.len())
}

/// Dimension (0 for NULL).
///
/// # Safety
/// `set` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn psets_pointset_dim(set: *const PsetsPointSet) -> usize {
    set.as_ref().map_or(0, |h| h.0.dim())
}

/// Copies point `index` as `dim` numerators over a common denominator.
///
/// # Safety
/// `numerators` must have room for `capacity` values; `denominator` must be writable.
#[no_mangle]
pub unsafe extern "C" fn psets_pointset_point(
    set: *const PsetsPointSet,
    index: usize,
    numerators: *mut u64,
    capacity: usize,
    denominator: *mut u64,
) -> PsetsStatus {
    guard(|| {
        let s = handle(set)?;
        if numerators.is_null() || denominator.is_null() {
            return Err(null("output buffer"));
        }
        let x = s
            .points()
            .get(index)
            .ok_or_else(|| Fail(PsetsStatus::OutOfRange, format!("index {index} of {}", s.len())))?;
        if capacity < x.dim() {
            return Err(Fail(
                PsetsStatus::DimensionMismatch,
                format!("buffer holds {capacity}, point has {}", x.dim()),
            ));
        }
        std::slice::from_raw_parts_mut(numerators, x.dim()).copy_from_slice(&x.numerators);
        *denominator = x.denominator;
        Ok(())
    })
}

/// JSON document for the set; release with `psets_string_free`. NULL for a NULL handle.
///
/// # Safety
/// `set` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn psets_pointset_to_json(set: *const PsetsPointSet) -> *mut c_char {
    match set.as_ref() {
        Some(h) => to_c_string(h.0.to_json()),
        None => ptr::null_mut(),
    }
}

/// # Safety
/// `s` must be NULL or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn psets_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// `S(k) = Σ_x exp(2πi k·x)` for a frequency of length `dim`.
///
/// # Safety
/// `k` must hold `k_len` values; `re` and `im` must be writable.
#[no_mangle]
pub unsafe extern "C" fn psets_exp_sum(
    set: *const PsetsPointSet,
    k: *const i64,
    k_len: usize,
    re: *mut f64,
    im: *mut f64,
) -> PsetsStatus {
    guard(|| {
        let s = handle(set)?;
        let k = slice(k, k_len).ok_or_else(|| null("k"))?;
        if re.is_null() || im.is_null() {
            return Err(null("output"));
        }
        let v = exp_sum(s, k)?;
        *re = v.re;
        *im = v.im;
        Ok(())
    })
}

/// Checks the set's exponential-sum bound over its full frequency box. `passed`
/// receives the verdict; if `report_json` is non-NULL it receives the report,
/// to be released with `psets_string_free`. `budget = 0` selects the default.
///
/// # Safety
/// `set` must be a live handle; the output pointers must be writable or NULL.
#[no_mangle]
pub unsafe extern "C" fn psets_verify_weil(
    set: *const PsetsPointSet,
    budget: u64,
    passed: *mut bool,
    report_json: *mut *mut c_char,
) -> PsetsStatus {
    guard(|| {
        let s = handle(set)?;
        let cfg = if budget == 0 {
            VerifyConfig::default()
        } else {
            VerifyConfig { budget: budget as u128 }
        };
        let report = verify_weil(s, &cfg)?;
        if !passed.is_null() {
            *passed = report.passed();
        }
        if !report_json.is_null() {
            *report_json = to_c_string(serde_json::to_string(&report).expect("reports serialize"));
        }
        Ok(())
    })
}

/// Mutual incoherence `μ` of the sampling matrix on `[−s, s]^d`. `bound`
/// receives the certified bound, or a negative value when none applies.
///
/// # Safety
/// `set` must be a live handle; `mu` must be writable; `bound` may be NULL.
#[no_mangle]
pub unsafe extern "C" fn psets_coherence(set: *const PsetsPointSet, s: u64, mu: *mut f64, bound: *mut f64) -> PsetsStatus {
    guard(|| {
        let x = handle(set)?;
        if mu.is_null() {
            return Err(null("mu"));
        }
        let rep = coherence(x, s)?;
        *mu = rep.mu;
        if !bound.is_null() {
            *bound = rep.certified_bound.unwrap_or(-1.0);
        }
        Ok(())
    })
}
