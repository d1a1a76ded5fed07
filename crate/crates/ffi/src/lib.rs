//! C ABI for the cdperc engine.
//!
//! Every fallible function returns a [`CdpercStatus`]; on failure the message
//! is available from [`cdperc_last_error`] on the same thread. Results are
//! written through out-pointers. Handles are opaque and released with their
//! `_free` function; passing NULL to a `_free` function is a no-op.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use cdperc::bounds::{binom_cdf, poisson_cdf, verify_theorem1, verify_theorem1_table, BoundReport, Method};
use cdperc::clocks::ClockField;
use cdperc::dynamics::{exact_event_probability, Event, SmallGraph};
use cdperc::explore::{explore_planar, replay_planar, Outcome, PlanarExploration, PlanarVariant, StopRule, VertexStatus};
use cdperc::lattice::EdgeId;
use cdperc::mixed::{sc_upper, theta_n_mixed, MixedParams};
use cdperc::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CdpercStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidParameter = 3,
    Parse = 4,
    OutOfRange = 5,
    Io = 6,
    IndexOutOfBounds = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CdpercPlanarVariant {
    Cubic = 0,
    MatchingSquare = 1,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(CdpercStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::Parse(_) | Error::MalformedTrace { .. } => CdpercStatus::Parse,
            Error::OutOfRange { .. } => CdpercStatus::OutOfRange,
            Error::Io(_) => CdpercStatus::Io,
            _ => CdpercStatus::InvalidParameter,
        };
        Failure(status, e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(CdpercStatus::NullPointer, format!("{what} is NULL"))
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> CdpercStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CdpercStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            CdpercStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(CdpercStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

unsafe fn write<T>(out: *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    out.write(value);
    Ok(())
}

unsafe fn handle<'a, T>(h: *const T) -> Result<&'a T, Failure> {
    h.as_ref().ok_or_else(|| null("handle"))
}

/// Message of the last failure on this thread, or NULL. Valid until the next
/// call into the library on the same thread.
#[no_mangle]
pub extern "C" fn cdperc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn cdperc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Frees a string returned by this library.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn cdperc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// `P(Bin(m, p) <= k)`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cdperc_binom_cdf(m: u64, p: f64, k: u64, out: *mut f64) -> CdpercStatus {
    guard(|| {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidParameter(format!("p = {p} not in [0, 1]")).into());
        }
        write(out, binom_cdf(m, p, k))
    })
}

/// `P(Poisson(lambda) <= k)`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cdperc_poisson_cdf(lambda: f64, k: u64, out: *mut f64) -> CdpercStatus {
    guard(|| {
        if !(lambda >= 0.0) {
            return Err(Error::InvalidParameter(format!("lambda = {lambda} must be non-negative")).into());
        }
        write(out, poisson_cdf(lambda, k))
    })
}

/// Closed-form upper boundary of the supercritical region at bond parameter `b`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cdperc_sc_upper(b: f64, out: *mut f64) -> CdpercStatus {
    guard(|| write(out, sc_upper(b)?))
}

/// Exact probability of `event` (`edge:<i>` or `connect:<a>-<b>`) at time `t`
/// on a named small graph.
///
/// # Safety
/// `graph` and `event` must be NUL-terminated strings; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cdperc_oracle_probability(
    graph: *const c_char,
    kappa: u32,
    t: f64,
    event: *const c_char,
    out: *mut f64,
) -> CdpercStatus {
    guard(|| {
        let g = SmallGraph::named(str_arg(graph, "graph")?)?;
        let ev: Event = str_arg(event, "event")?.parse()?;
        write(out, exact_event_probability(&g, kappa, t, ev)?)
    })
}

/// Monte Carlo estimate of the mixed-percolation connection probability to
/// the sphere of radius `n` in `Z^dim`.
///
/// # Safety
/// `estimate` and `stderr` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cdperc_mixed_theta(
    s: f64,
    b: f64,
    n: u32,
    dim: usize,
    samples: u64,
    seed: u64,
    estimate: *mut f64,
    stderr: *mut f64,
) -> CdpercStatus {
    guard(|| {
        if estimate.is_null() || stderr.is_null() {
            return Err(null("output pointer"));
        }
        let est = theta_n_mixed(MixedParams::new(s, b)?, n, samples, seed, dim)?;
        write(estimate, est.estimate)?;
        write(stderr, est.stderr)
    })
}

/// Seeded field of edge clocks.
pub struct CdpercClockField(ClockField);

/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cdperc_clock_field_new(seed: u64, out: *mut *mut CdpercClockField) -> CdpercStatus {
    guard(|| write(out, Box::into_raw(Box::new(CdpercClockField(ClockField::new(seed))))))
}

/// Clock of the edge from `base[0..dim]` in direction `dir`.
///
/// # Safety
/// `field` must be a live handle, `base` readable for `dim` values and `out`
/// valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cdperc_clock_field_clock(
    field: *const CdpercClockField,
    base: *const i64,
    dim: usize,
    dir: u8,
    out: *mut f64,
) -> CdpercStatus {
    guard(|| {
        let f = handle(field)?;
        if base.is_null() {
            return Err(null("base"));
        }
        if dim == 0 {
            return Err(Error::InvalidParameter("dimension must be positive".into()).into());
        }
        let point = std::slice::from_raw_parts(base, dim).to_vec();
        write(out, f.0.clock(&EdgeId::new(point, dir)))
    })
}

/// # Safety
/// `field` must be NULL or a live handle; it is invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn cdperc_clock_field_free(field: *mut CdpercClockField) {
    if !field.is_null() {
        drop(Box::from_raw(field));
    }
}

/// Report of a bound verification sweep.
pub struct CdpercBoundReport(BoundReport);

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CdpercBoundRow {
    pub d: u32,
    pub kappa: u32,
    pub s: f64,
    pub b: f64,
    pub s_threshold: f64,
    pub b_threshold: f64,
    /// Row covers every `d` above `d` through the closed-form bound.
    pub closed_form: bool,
    pub pass: bool,
}

fn boxed_report(r: BoundReport, out: *mut *mut CdpercBoundReport) -> Result<(), Failure> {
    unsafe { write(out, Box::into_raw(Box::new(CdpercBoundReport(r)))) }
}

/// Exact sweep of `(s, b)` at `t = c/d` for `d_min <= d <= d_max`.
///
/// # Safety
/// `c` must be a NUL-terminated decimal string; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cdperc_verify_sweep(
    c: *const c_char,
    kappa: u32,
    d_min: u32,
    d_max: u32,
    chen_floor: u32,
    out: *mut *mut CdpercBoundReport,
) -> CdpercStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("output pointer"));
        }
        boxed_report(verify_theorem1(str_arg(c, "c")?, kappa, d_min, d_max, chen_floor)?, out)
    })
}

/// The low-dimensional table cases at rate `c`.
///
/// # Safety
/// `c` must be a NUL-terminated decimal string; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cdperc_verify_table(c: *const c_char, out: *mut *mut CdpercBoundReport) -> CdpercStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("output pointer"));
        }
        boxed_report(verify_theorem1_table(str_arg(c, "c")?)?, out)
    })
}

/// # Safety
/// `report` must be a live handle; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cdperc_bound_report_len(report: *const CdpercBoundReport, out: *mut usize) -> CdpercStatus {
    guard(|| write(out, handle(report)?.0.rows.len()))
}

/// # Safety
/// `report` must be a live handle; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cdperc_bound_report_all_pass(report: *const CdpercBoundReport, out: *mut bool) -> CdpercStatus {
    guard(|| write(out, handle(report)?.0.all_pass))
}

/// # Safety
/// `report` must be a live handle; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cdperc_bound_report_row(
    report: *const CdpercBoundReport,
    index: usize,
    out: *mut CdpercBoundRow,
) -> CdpercStatus {
    guard(|| {
        let rows = &handle(report)?.0.rows;
        let r = rows.get(index).ok_or_else(|| {
            Failure(CdpercStatus::IndexOutOfBounds, format!("row {index} of {}", rows.len()))
        })?;
        write(
            out,
            CdpercBoundRow {
                d: r.d,
                kappa: r.kappa,
                s: r.s,
                b: r.b,
                s_threshold: r.s_threshold,
                b_threshold: r.b_threshold,
                closed_form: r.method == Method::Chen,
                pass: r.pass,
            },
        )
    })
}

/// # Safety
/// `report` must be NULL or a live handle; it is invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn cdperc_bound_report_free(report: *mut CdpercBoundReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// One planar exploration run together with its parameters.
pub struct CdpercPlanarRun {
    run: PlanarExploration,
    variant: PlanarVariant,
    kappa: u32,
    t: f64,
    field: ClockField,
}

/// Explores the in-plane cluster of the origin with clocks seeded by `seed`,
/// recording a trace.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cdperc_planar_explore(
    variant: CdpercPlanarVariant,
    kappa: u32,
    t: f64,
    seed: u64,
    max_open: usize,
    radius: i64,
    out: *mut *mut CdpercPlanarRun,
) -> CdpercStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("output pointer"));
        }
        let variant = match variant {
            CdpercPlanarVariant::Cubic => PlanarVariant::Cubic,
            CdpercPlanarVariant::MatchingSquare => PlanarVariant::MatchingSquare,
        };
        let field = ClockField::new(seed);
        let run = explore_planar(variant, kappa, t, field, StopRule::new(max_open, radius)?, true)?;
        write(out, Box::into_raw(Box::new(CdpercPlanarRun { run, variant, kappa, t, field })))
    })
}

/// # Safety
/// `run` must be a live handle; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cdperc_planar_run_open_count(run: *const CdpercPlanarRun, out: *mut usize) -> CdpercStatus {
    guard(|| write(out, handle(run)?.run.state.count(VertexStatus::Open)))
}

/// Whether the run reached its stop rule with active vertices left.
///
/// # Safety
/// `run` must be a live handle; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cdperc_planar_run_survived(run: *const CdpercPlanarRun, out: *mut bool) -> CdpercStatus {
    guard(|| write(out, handle(run)?.run.outcome == Outcome::Survived))
}

/// Number of opened vertices not confirmed by replaying the dynamics.
///
/// # Safety
/// `run` must be a live handle; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cdperc_planar_run_replay_violations(
    run: *const CdpercPlanarRun,
    out: *mut usize,
) -> CdpercStatus {
    guard(|| {
        let r = handle(run)?;
        write(out, replay_planar(&r.run, r.variant, r.kappa, r.t, r.field).len())
    })
}

/// The run's trace in text form; free with [`cdperc_string_free`].
///
/// # Safety
/// `run` must be a live handle; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cdperc_planar_run_trace(run: *const CdpercPlanarRun, out: *mut *mut c_char) -> CdpercStatus {
    guard(|| {
        let r = handle(run)?;
        let text = r.run.trace.as_ref().map(|t| t.to_string()).unwrap_or_default();
        let c = CString::new(text).map_err(|e| Failure(CdpercStatus::Parse, e.to_string()))?;
        write(out, c.into_raw())
    })
}

/// # Safety
/// `run` must be NULL or a live handle; it is invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn cdperc_planar_run_free(run: *mut CdpercPlanarRun) {
    if !run.is_null() {
        drop(Box::from_raw(run));
    }
}

/// Checks a planar trace text step by step; `ok` receives the verdict.
///
/// # Safety
/// `text` must be a NUL-terminated string; `ok` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cdperc_check_trace(text: *const c_char, ok: *mut bool) -> CdpercStatus {
    guard(|| write(ok, cdperc::explore::check_decoupling(str_arg(text, "text")?)?.ok))
}
