//! C ABI for `ppt_forge`.
//!
//! Objects cross the boundary as opaque heap handles that the caller releases
//! with the matching `*_free` function. Every fallible call returns a
//! [`PfStatus`]; on failure [`pf_last_error_message`] describes what went
//! wrong on the calling thread. Strings returned to C are owned by the caller
//! and released with [`pf_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use ppt_forge::catalysis::{minimal_catalyst_rank, ppt_maxent_catalysis_possible};
use ppt_forge::closed_form::t1_value;
use ppt_forge::ppt_sdp::{self, build_reduced};
use ppt_forge::spectra::{self, Order};
use ppt_forge::{
    decide, Decision, Error, Rule, SchmidtVector, SdpCertificate, TransformQuery, Verdict,
};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PfStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidVector = 2,
    Domain = 3,
    Precondition = 4,
    Unsupported = 5,
    DimensionGuard = 6,
    Solver = 7,
    Io = 8,
    Json = 9,
    InvalidUtf8 = 10,
    BufferTooSmall = 11,
    Panic = 12,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PfDecision {
    Feasible = 0,
    Infeasible = 1,
    Boundary = 2,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PfRule {
    Nielsen = 0,
    RankFastPath = 1,
    MonotoneS12 = 2,
    Borderline = 3,
    Rank3Exact = 4,
    CstarD = 5,
    T1LowerBound = 6,
    SdpT = 7,
}

/// PPT monotones of a pure state, all in bits.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PfMonotones {
    pub e_c: f64,
    pub e_d: f64,
    pub e_xd: f64,
    pub e_xc: f64,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PfBounds {
    pub lower: f64,
    pub upper: f64,
}

/// Opaque Schmidt coefficient vector.
pub struct PfSchmidtVector(SchmidtVector);

/// Opaque SDP certificate.
pub struct PfCertificate(SdpCertificate);

/// Opaque feasibility verdict.
pub struct PfVerdict(Verdict);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    let c = CString::new(msg).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn clear_last_error() {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
}

struct Failure(PfStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::InvalidVector(_) => PfStatus::InvalidVector,
            Error::Domain(_) => PfStatus::Domain,
            Error::Precondition(_) => PfStatus::Precondition,
            Error::Unsupported(_) => PfStatus::Unsupported,
            Error::DimensionGuard { .. } => PfStatus::DimensionGuard,
            Error::Solver(_) => PfStatus::Solver,
            Error::Io { .. } => PfStatus::Io,
            Error::Json(_) => PfStatus::Json,
        };
        Failure(status, e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure(PfStatus::Json, e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(PfStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, records any failure for [`pf_last_error_message`] and converts
/// panics into [`PfStatus::Panic`].
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> PfStatus {
    clear_last_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => PfStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic across the C boundary".into());
            set_last_error(format!("panic: {msg}"));
            PfStatus::Panic
        }
    }
}

/// # Safety
/// `p` must be null or point to a live value of type `T`.
unsafe fn borrow<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    // SAFETY: the caller guarantees `p` is null or valid for reads.
    unsafe { p.as_ref() }.ok_or_else(|| null(what))
}

/// # Safety
/// `out` must be null or valid for a write of `T`.
unsafe fn write_out<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    // SAFETY: non-null and writable per the caller's contract.
    unsafe { out.write(value) };
    Ok(())
}

fn into_c_string(s: String) -> Result<*mut c_char, Failure> {
    CString::new(s).map(CString::into_raw).map_err(|_| {
        Failure(
            PfStatus::InvalidUtf8,
            "string contains an interior NUL".into(),
        )
    })
}

fn to_rule(rule: Rule) -> PfRule {
    match rule {
        Rule::Nielsen => PfRule::Nielsen,
        Rule::RankFastPath => PfRule::RankFastPath,
        Rule::MonotoneS12 => PfRule::MonotoneS12,
        Rule::Borderline => PfRule::Borderline,
        Rule::Rank3Exact => PfRule::Rank3Exact,
        Rule::CstarD => PfRule::CstarD,
        Rule::T1LowerBound => PfRule::T1LowerBound,
        Rule::SdpT => PfRule::SdpT,
    }
}

/// Builds a vector from `len` coefficients. They must be non-negative and sum
/// to 1; order does not matter.
///
/// # Safety
/// `coeffs` must point to `len` readable doubles and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pf_vector_new(
    coeffs: *const f64,
    len: usize,
    out: *mut *mut PfSchmidtVector,
) -> PfStatus {
    guard(|| {
        if coeffs.is_null() {
            return Err(null("coeffs"));
        }
        // SAFETY: the caller guarantees `len` readable elements.
        let slice = unsafe { std::slice::from_raw_parts(coeffs, len) };
        let v = SchmidtVector::new(slice.to_vec())?;
        // SAFETY: `out` is checked for null inside `write_out`.
        unsafe { write_out(out, Box::into_raw(Box::new(PfSchmidtVector(v))), "out") }
    })
}

/// Parses a comma separated list such as `"0.05,0.05,0.9"` or `"1/4,3/4"`.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pf_vector_parse(
    text: *const c_char,
    out: *mut *mut PfSchmidtVector,
) -> PfStatus {
    guard(|| {
        if text.is_null() {
            return Err(null("text"));
        }
        // SAFETY: the caller guarantees a NUL-terminated string.
        let s = unsafe { CStr::from_ptr(text) }
            .to_str()
            .map_err(|e| Failure(PfStatus::InvalidUtf8, e.to_string()))?;
        let v: SchmidtVector = s.parse()?;
        // SAFETY: `out` is checked for null inside `write_out`.
        unsafe { write_out(out, Box::into_raw(Box::new(PfSchmidtVector(v))), "out") }
    })
}

/// Number of stored coefficients, or 0 for a null handle.
///
/// # Safety
/// `v` must be null or a handle from `pf_vector_new`/`pf_vector_parse`.
#[no_mangle]
pub unsafe extern "C" fn pf_vector_len(v: *const PfSchmidtVector) -> usize {
    // SAFETY: null or a live handle per the contract.
    unsafe { v.as_ref() }.map_or(0, |v| v.0.len())
}

/// Copies the coefficients in ascending order into `buf`.
///
/// # Safety
/// `v` must be a live handle and `buf` must have room for `cap` doubles.
#[no_mangle]
pub unsafe extern "C" fn pf_vector_coeffs(
    v: *const PfSchmidtVector,
    buf: *mut f64,
    cap: usize,
) -> PfStatus {
    guard(|| {
        // SAFETY: see the function contract.
        let v = unsafe { borrow(v, "vector") }?;
        if buf.is_null() {
            return Err(null("buf"));
        }
        let c = v.0.coeffs();
        if cap < c.len() {
            return Err(Failure(
                PfStatus::BufferTooSmall,
                format!("need {} slots, got {cap}", c.len()),
            ));
        }
        // SAFETY: `buf` holds at least `c.len()` elements and cannot alias `c`.
        unsafe { ptr::copy_nonoverlapping(c.as_ptr(), buf, c.len()) };
        Ok(())
    })
}

/// # Safety
/// `v` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pf_vector_free(v: *mut PfSchmidtVector) {
    if !v.is_null() {
        // SAFETY: created by `Box::into_raw` and freed once.
        drop(unsafe { Box::from_raw(v) });
    }
}

/// Rényi entropy in bits. Pass `INFINITY` for the min-entropy.
///
/// # Safety
/// `v` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pf_renyi_entropy(
    v: *const PfSchmidtVector,
    t: f64,
    out: *mut f64,
) -> PfStatus {
    guard(|| {
        // SAFETY: see the function contract.
        let v = unsafe { borrow(v, "vector") }?;
        let order = if t == f64::INFINITY {
            Order::Infinity
        } else {
            Order::Finite(t)
        };
        let h = spectra::renyi_entropy(&v.0, order)?;
        // SAFETY: see the function contract.
        unsafe { write_out(out, h, "out") }
    })
}

/// # Safety
/// `v` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pf_monotones(
    v: *const PfSchmidtVector,
    out: *mut PfMonotones,
) -> PfStatus {
    guard(|| {
        // SAFETY: see the function contract.
        let v = unsafe { borrow(v, "vector") }?;
        let m = spectra::ppt_monotone_report(&v.0);
        let m = PfMonotones {
            e_c: m.e_c,
            e_d: m.e_d,
            e_xd: m.e_xd,
            e_xc: m.e_xc,
        };
        // SAFETY: see the function contract.
        unsafe { write_out(out, m, "out") }
    })
}

/// Sets `*out` to whether `lambda ≺ mu`, i.e. `lambda → mu` is possible by
/// LOCC.
///
/// # Safety
/// Both handles must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pf_majorizes(
    lambda: *const PfSchmidtVector,
    mu: *const PfSchmidtVector,
    out: *mut bool,
) -> PfStatus {
    guard(|| {
        // SAFETY: see the function contract.
        let (l, m) = unsafe { (borrow(lambda, "lambda")?, borrow(mu, "mu")?) };
        // SAFETY: see the function contract.
        unsafe { write_out(out, spectra::majorizes(&l.0, &m.0), "out") }
    })
}

/// Closed-form lower bound `T₁(K; λ)`. Requires `k ≥ 2`.
///
/// # Safety
/// `v` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pf_t1_value(
    v: *const PfSchmidtVector,
    k: usize,
    out: *mut f64,
) -> PfStatus {
    guard(|| {
        // SAFETY: see the function contract.
        let v = unsafe { borrow(v, "vector") }?;
        let t = t1_value(&v.0, k)?;
        // SAFETY: see the function contract.
        unsafe { write_out(out, t, "out") }
    })
}

/// Analytic lower and upper bounds on the SDP value.
///
/// # Safety
/// `v` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pf_bounds(
    v: *const PfSchmidtVector,
    k: usize,
    out: *mut PfBounds,
) -> PfStatus {
    guard(|| {
        // SAFETY: see the function contract.
        let v = unsafe { borrow(v, "vector") }?;
        let b = ppt_sdp::bounds(&v.0, k)?;
        // SAFETY: see the function contract.
        unsafe {
            write_out(
                out,
                PfBounds {
                    lower: b.lower,
                    upper: b.upper,
                },
                "out",
            )
        }
    })
}

/// Solves the reduced SDP for `T(K; λ)` and returns a certificate handle.
///
/// # Safety
/// `v` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pf_sdp_solve(
    v: *const PfSchmidtVector,
    k: usize,
    out: *mut *mut PfCertificate,
) -> PfStatus {
    guard(|| {
        // SAFETY: see the function contract.
        let v = unsafe { borrow(v, "vector") }?;
        let cert = ppt_sdp::solve(&build_reduced(&v.0, k)?)?;
        // SAFETY: see the function contract.
        unsafe { write_out(out, Box::into_raw(Box::new(PfCertificate(cert))), "out") }
    })
}

/// Primal objective, or NaN for a null handle.
///
/// # Safety
/// `c` must be null or a live certificate handle.
#[no_mangle]
pub unsafe extern "C" fn pf_certificate_value(c: *const PfCertificate) -> f64 {
    // SAFETY: null or a live handle per the contract.
    unsafe { c.as_ref() }.map_or(f64::NAN, |c| c.0.value())
}

/// Duality gap, or NaN for a null handle.
///
/// # Safety
/// `c` must be null or a live certificate handle.
#[no_mangle]
pub unsafe extern "C" fn pf_certificate_gap(c: *const PfCertificate) -> f64 {
    // SAFETY: null or a live handle per the contract.
    unsafe { c.as_ref() }.map_or(f64::NAN, |c| c.0.gap)
}

/// # Safety
/// `c` must be null or a live certificate handle.
#[no_mangle]
pub unsafe extern "C" fn pf_certificate_is_optimal(c: *const PfCertificate) -> bool {
    // SAFETY: null or a live handle per the contract.
    unsafe { c.as_ref() }.is_some_and(|c| c.0.is_optimal())
}

/// Serializes the certificate. Free the string with `pf_string_free`.
///
/// # Safety
/// `c` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pf_certificate_json(
    c: *const PfCertificate,
    out: *mut *mut c_char,
) -> PfStatus {
    guard(|| {
        // SAFETY: see the function contract.
        let c = unsafe { borrow(c, "certificate") }?;
        let s = into_c_string(serde_json::to_string(&c.0)?)?;
        // SAFETY: see the function contract.
        unsafe { write_out(out, s, "out") }
    })
}

/// # Safety
/// `c` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pf_certificate_free(c: *mut PfCertificate) {
    if !c.is_null() {
        // SAFETY: created by `Box::into_raw` and freed once.
        drop(unsafe { Box::from_raw(c) });
    }
}

fn verdict_out(query: TransformQuery, out: *mut *mut PfVerdict) -> Result<(), Failure> {
    let v = decide(&query)?;
    // SAFETY: `out` comes straight from an extern caller bound by its contract.
    unsafe { write_out(out, Box::into_raw(Box::new(PfVerdict(v))), "out") }
}

/// Decides `Φ_K → target` under PPT operations.
///
/// # Safety
/// `target` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pf_decide_ppt(
    k: usize,
    target: *const PfSchmidtVector,
    out: *mut *mut PfVerdict,
) -> PfStatus {
    guard(|| {
        // SAFETY: see the function contract.
        let t = unsafe { borrow(target, "target") }?;
        verdict_out(TransformQuery::ppt(k, t.0.clone()), out)
    })
}

/// Decides `source → target` under LOCC.
///
/// # Safety
/// Both handles must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pf_decide_locc(
    source: *const PfSchmidtVector,
    target: *const PfSchmidtVector,
    out: *mut *mut PfVerdict,
) -> PfStatus {
    guard(|| {
        // SAFETY: see the function contract.
        let (s, t) = unsafe { (borrow(source, "source")?, borrow(target, "target")?) };
        verdict_out(TransformQuery::locc(s.0.clone(), t.0.clone()), out)
    })
}

/// # Safety
/// `v` must be a live verdict handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pf_verdict_decision(
    v: *const PfVerdict,
    out: *mut PfDecision,
) -> PfStatus {
    guard(|| {
        // SAFETY: see the function contract.
        let v = unsafe { borrow(v, "verdict") }?;
        let d = match v.0.decision {
            Decision::Feasible => PfDecision::Feasible,
            Decision::Infeasible => PfDecision::Infeasible,
            Decision::Boundary => PfDecision::Boundary,
        };
        // SAFETY: see the function contract.
        unsafe { write_out(out, d, "out") }
    })
}

/// # Safety
/// `v` must be a live verdict handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pf_verdict_rule(v: *const PfVerdict, out: *mut PfRule) -> PfStatus {
    guard(|| {
        // SAFETY: see the function contract.
        let v = unsafe { borrow(v, "verdict") }?;
        // SAFETY: see the function contract.
        unsafe { write_out(out, to_rule(v.0.rule), "out") }
    })
}

/// Writes the value `T` behind the verdict. Sets `*has_value` to false and
/// leaves `*out` untouched when the deciding rule did not compute one.
///
/// # Safety
/// `v` must be a live verdict handle; `out` and `has_value` writable.
#[no_mangle]
pub unsafe extern "C" fn pf_verdict_t(
    v: *const PfVerdict,
    out: *mut f64,
    has_value: *mut bool,
) -> PfStatus {
    guard(|| {
        // SAFETY: see the function contract.
        let v = unsafe { borrow(v, "verdict") }?;
        if out.is_null() {
            return Err(null("out"));
        }
        // SAFETY: see the function contract.
        unsafe { write_out(has_value, v.0.t.is_some(), "has_value") }?;
        if let Some(t) = v.0.t {
            // SAFETY: checked non-null above.
            unsafe { out.write(t) };
        }
        Ok(())
    })
}

/// Serializes the verdict. Free the string with `pf_string_free`.
///
/// # Safety
/// `v` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pf_verdict_json(v: *const PfVerdict, out: *mut *mut c_char) -> PfStatus {
    guard(|| {
        // SAFETY: see the function contract.
        let v = unsafe { borrow(v, "verdict") }?;
        let s = into_c_string(serde_json::to_string(&v.0)?)?;
        // SAFETY: see the function contract.
        unsafe { write_out(out, s, "out") }
    })
}

/// # Safety
/// `v` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pf_verdict_free(v: *mut PfVerdict) {
    if !v.is_null() {
        // SAFETY: created by `Box::into_raw` and freed once.
        drop(unsafe { Box::from_raw(v) });
    }
}

/// Whether some maximally entangled catalyst enables `Φ_K → λ` under PPT.
///
/// # Safety
/// `v` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pf_catalysis_possible(
    k: usize,
    v: *const PfSchmidtVector,
    out: *mut bool,
) -> PfStatus {
    guard(|| {
        // SAFETY: see the function contract.
        let v = unsafe { borrow(v, "vector") }?;
        // SAFETY: see the function contract.
        unsafe { write_out(out, ppt_maxent_catalysis_possible(k, &v.0), "out") }
    })
}

/// Smallest catalyst rank `C ≤ budget` that works, or 0 if none was found.
///
/// # Safety
/// `v` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pf_minimal_catalyst_rank(
    k: usize,
    v: *const PfSchmidtVector,
    budget: usize,
    out: *mut usize,
) -> PfStatus {
    guard(|| {
        // SAFETY: see the function contract.
        let v = unsafe { borrow(v, "vector") }?;
        let scan = minimal_catalyst_rank(k, &v.0, budget)?;
        // SAFETY: see the function contract.
        unsafe { write_out(out, scan.minimal_c.unwrap_or(0), "out") }
    })
}

/// Message for the last failed call on this thread, or null if the last call
/// succeeded. Free the copy with `pf_string_free`.
#[no_mangle]
pub extern "C" fn pf_last_error_message() -> *mut c_char {
    LAST_ERROR.with(|slot| {
        slot.borrow()
            .as_ref()
            .map_or(ptr::null_mut(), |c| c.clone().into_raw())
    })
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pf_string_free(s: *mut c_char) {
    if !s.is_null() {
        // SAFETY: produced by `CString::into_raw` and freed once.
        drop(unsafe { CString::from_raw(s) });
    }
}
