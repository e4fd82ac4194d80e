//! C ABI for the qeuler library.
//!
//! Every function returns a [`QeStatus`]; on failure the message is available
//! from [`qe_last_error_message`] on the same thread. Strings handed out by
//! the library must be released with [`qe_string_free`], handles with their
//! matching `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::sync::Arc;

use qeuler::arith::Rational;
use qeuler::cli::parse_q;
use qeuler::identities::{
    verify, verify_grid, BernoulliStore, IdentityId, IndexRange, PadicSetup, ParamRanges, Params, Signature,
    Verdict, VerifyContext,
};
use qeuler::padic::Prime;
use qeuler::qintegral::{integrate, IntegralRequest, IntegralSettings, Measure};
use qeuler::qspecial::EulerTable;
use qeuler::report::Report;
use qeuler::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QeStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DivisionByZero = 3,
    Domain = 4,
    PrecisionExhausted = 5,
    NotConverged = 6,
    Internal = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QeVerdict {
    Holds = 0,
    Fails = 1,
    HoldsToPrecision = 2,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QeMeasure {
    Bosonic = 0,
    Fermionic = 1,
}

/// Shared computation state: the Euler table, the q-Bernoulli store and the p-adic setting.
pub struct QeContext {
    table: Arc<EulerTable>,
    bernoulli: Arc<BernoulliStore>,
    setup: PadicSetup,
}

/// A finished grid run.
pub struct QeReport {
    report: Report,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> QeStatus {
    match e {
        Error::DivisionByZero | Error::Pole { .. } => QeStatus::DivisionByZero,
        Error::Domain(_) => QeStatus::Domain,
        Error::PrecisionExhausted(_) | Error::CostCapExceeded { .. } => QeStatus::PrecisionExhausted,
        Error::ConvergenceNotReached { .. } => QeStatus::NotConverged,
        Error::Parse(_) | Error::NotExact(_) => QeStatus::InvalidArgument,
        Error::InternalInconsistency(_) | Error::Io(_) => QeStatus::Internal,
    }
}

enum Fail {
    Null(&'static str),
    Lib(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Lib(e)
    }
}

/// Runs `f`, converting errors and panics into a status plus a stored message.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> QeStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => QeStatus::Ok,
        Ok(Err(Fail::Null(what))) => {
            set_last_error(format!("null pointer: {what}"));
            QeStatus::NullPointer
        }
        Ok(Err(Fail::Lib(e))) => {
            set_last_error(e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_last_error("internal panic".into());
            QeStatus::Panic
        }
    }
}

unsafe fn read_str<'a>(s: *const c_char, what: &'static str) -> Result<&'a str, Fail> {
    if s.is_null() {
        return Err(Fail::Null(what));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| Fail::Lib(Error::Parse(format!("{what} is not UTF-8"))))
}

unsafe fn context<'a>(ctx: *const QeContext) -> Result<&'a QeContext, Fail> {
    ctx.as_ref().ok_or(Fail::Null("context"))
}

unsafe fn write_out<T>(out: *mut T, value: T, what: &'static str) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail::Null(what));
    }
    out.write(value);
    Ok(())
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).expect("no interior nul").into_raw()
}

/// The message of the last failed call on this thread, or NULL. Free with `qe_string_free`.
#[no_mangle]
pub extern "C" fn qe_last_error_message() -> *mut c_char {
    LAST_ERROR.with(|e| match &*e.borrow() {
        Some(c) => c.clone().into_raw(),
        None => ptr::null_mut(),
    })
}

/// Releases a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and must not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn qe_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Creates a context for prime `p`, `q` (`"1+p"`, an integer or `"a/b"`; NULL means `1+p`)
/// and `precision` requested p-adic digits.
///
/// # Safety
/// `q` must be NULL or a valid C string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qe_context_new(
    p: u64,
    q: *const c_char,
    precision: i64,
    out: *mut *mut QeContext,
) -> QeStatus {
    guard(|| {
        let prime = Prime::new(p)?;
        let q = if q.is_null() { "1+p" } else { read_str(q, "q")? };
        let settings = IntegralSettings::new(prime, parse_q(q, Some(p))?)?;
        let setup = PadicSetup::new(settings, precision)?;
        let ctx = Box::new(QeContext {
            table: Arc::new(EulerTable::new()),
            bernoulli: Arc::new(BernoulliStore::new()),
            setup,
        });
        write_out(out, Box::into_raw(ctx), "out")
    })
}

/// # Safety
/// `ctx` must be NULL or a pointer from `qe_context_new` that is not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn qe_context_free(ctx: *mut QeContext) {
    if !ctx.is_null() {
        drop(Box::from_raw(ctx));
    }
}

/// Writes the q-Euler number `n` as a rational function in `q`, e.g. `"(-q)/(1 + q)"`.
///
/// # Safety
/// `ctx` must be a live context and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qe_euler_number(ctx: *const QeContext, n: u32, out: *mut *mut c_char) -> QeStatus {
    guard(|| {
        let ctx = context(ctx)?;
        let s = ctx.table.number(n as usize).to_string();
        write_out(out, into_c_string(s), "out")
    })
}

/// Writes the q-Euler number `n` evaluated at the rational `q0` (e.g. `"1"` or `"2/3"`).
///
/// # Safety
/// `ctx` must be a live context, `q0` a valid C string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qe_euler_number_at(
    ctx: *const QeContext,
    n: u32,
    q0: *const c_char,
    out: *mut *mut c_char,
) -> QeStatus {
    guard(|| {
        let ctx = context(ctx)?;
        let q0: Rational = read_str(q0, "q0")?.parse()?;
        let s = ctx.table.number(n as usize).eval(&q0)?.to_string();
        write_out(out, into_c_string(s), "out")
    })
}

fn params_for(id: IdentityId, a: i64, b: i64) -> Params {
    match id.signature() {
        Signature::KM => Params::KM { k: a, m: b },
        Signature::K => Params::K { k: a },
        Signature::N => Params::N { n: a },
    }
}

fn verify_context(ctx: &QeContext) -> VerifyContext {
    VerifyContext::new(ctx.setup.clone())
        .with_table(ctx.table.clone())
        .with_bernoulli(ctx.bernoulli.clone())
}

/// Verifies identity `id` (e.g. `"THM1"`) at one point. For `(k, m)` identities `a = k`,
/// `b = m`; otherwise `a` is the single parameter and `b` is ignored. `out_oracles_pass`
/// may be NULL.
///
/// # Safety
/// `ctx` must be a live context, `id` a valid C string and `out_verdict` writable.
#[no_mangle]
pub unsafe extern "C" fn qe_verify(
    ctx: *const QeContext,
    id: *const c_char,
    a: i64,
    b: i64,
    out_verdict: *mut QeVerdict,
    out_oracles_pass: *mut bool,
) -> QeStatus {
    guard(|| {
        let ctx = context(ctx)?;
        let id: IdentityId = read_str(id, "id")?.parse()?;
        let r = verify(id, params_for(id, a, b), &verify_context(ctx))?;
        let v = match r.verdict {
            Verdict::Holds => QeVerdict::Holds,
            Verdict::Fails => QeVerdict::Fails,
            Verdict::HoldsToPrecision => QeVerdict::HoldsToPrecision,
        };
        if !out_oracles_pass.is_null() {
            out_oracles_pass.write(r.oracles_pass());
        }
        write_out(out_verdict, v, "out_verdict")
    })
}

/// Verifies `id` over the inclusive box `a_lo..=a_hi` (times `b_lo..=b_hi` for `(k, m)`
/// identities) and returns the report handle.
///
/// # Safety
/// `ctx` must be a live context, `id` a valid C string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qe_verify_grid(
    ctx: *const QeContext,
    id: *const c_char,
    a_lo: i64,
    a_hi: i64,
    b_lo: i64,
    b_hi: i64,
    out: *mut *mut QeReport,
) -> QeStatus {
    guard(|| {
        let ctx = context(ctx)?;
        let name = read_str(id, "id")?;
        let id: IdentityId = name.parse()?;
        let a = IndexRange::new(a_lo, a_hi);
        let ranges = match id.signature() {
            Signature::KM => ParamRanges::km(a, IndexRange::new(b_lo, b_hi)),
            Signature::K => ParamRanges::k(a),
            Signature::N => ParamRanges::n(a),
        };
        let entries = verify_grid(id, &ranges, &verify_context(ctx))?;
        let mut config = std::collections::BTreeMap::new();
        config.insert("identity".to_string(), id.to_string());
        config.insert("a".to_string(), a.to_string());
        if id.signature() == Signature::KM {
            config.insert("b".to_string(), IndexRange::new(b_lo, b_hi).to_string());
        }
        config.insert("p".to_string(), ctx.setup.settings.prime.to_string());
        config.insert("q".to_string(), ctx.setup.settings.q.to_string());
        config.insert("K".to_string(), ctx.setup.precision.to_string());
        let report = Report::new("verify", config).with_entries(&entries).seal();
        write_out(out, Box::into_raw(Box::new(QeReport { report })), "out")
    })
}

/// Writes the report as JSON.
///
/// # Safety
/// `report` must be a live report handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qe_report_json(report: *const QeReport, out: *mut *mut c_char) -> QeStatus {
    guard(|| {
        let r = report.as_ref().ok_or(Fail::Null("report"))?;
        write_out(out, into_c_string(r.report.to_json()), "out")
    })
}

/// Number of failed or errored cells outside the printed variants; -1 for a NULL handle.
///
/// # Safety
/// `report` must be NULL or a live report handle.
#[no_mangle]
pub unsafe extern "C" fn qe_report_blocking_failures(report: *const QeReport) -> i64 {
    match report.as_ref() {
        Some(r) => r.report.blocking_failures() as i64,
        None => -1,
    }
}

/// # Safety
/// `report` must be NULL or a handle from `qe_verify_grid` that is not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn qe_report_free(report: *mut QeReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// Adaptive integral of `(x0 + y)^n` against the chosen measure. Writes the value's
/// canonical rational representative and the digits actually vouched for; a run that
/// stops short of the requested precision returns `NotConverged` but still fills both.
///
/// # Safety
/// `ctx` must be a live context, `x0` NULL (meaning 0) or a valid C string, and both
/// outputs writable.
#[no_mangle]
pub unsafe extern "C" fn qe_integrate(
    ctx: *const QeContext,
    measure: QeMeasure,
    n: u32,
    x0: *const c_char,
    out_value: *mut *mut c_char,
    out_achieved: *mut i64,
) -> QeStatus {
    guard(|| {
        let ctx = context(ctx)?;
        if out_value.is_null() || out_achieved.is_null() {
            return Err(Fail::Null("output"));
        }
        let x0: Rational = if x0.is_null() {
            Rational::zero()
        } else {
            read_str(x0, "x0")?.parse()?
        };
        let measure = match measure {
            QeMeasure::Bosonic => Measure::Bosonic,
            QeMeasure::Fermionic => Measure::Fermionic,
        };
        let k = ctx.setup.precision;
        let req = IntegralRequest::monomial(measure, n as usize, &x0, k, ctx.setup.settings.clone());
        let res = integrate(&req)?;
        out_value.write(into_c_string(res.value.lift().to_string()));
        out_achieved.write(res.achieved_precision);
        res.into_converged(k)?;
        Ok(())
    })
}
