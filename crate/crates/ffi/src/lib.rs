//! C ABI over `twostroke`.
//!
//! Every fallible call returns a [`TsStatus`]; on failure the message is
//! available from [`ts_last_error_message`] on the same thread. Objects
//! are opaque handles released with their `_free` function.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use twostroke::catalysis::{
    delta_p_closed_form, simple_perm_report, solve_catalyst_state, SimplePermSpec,
};
use twostroke::lp::{birkhoff_decompose, lp_work_upper_bound, BistochasticMatrix, LpSolution, LpStatus};
use twostroke::perm::{apply_permutation, optimal_noncatalytic, otto_swap, Objective, PermutationMap};
use twostroke::thermo::{
    gibbs_populations, gibbs_product, stroke_report, CycleReport, InverseTemperaturePair, Mode,
    Spectrum,
};
use twostroke::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TsStatus {
    Ok = 0,
    NullPointer = 1,
    /// Invalid parameters, shapes or buffer sizes.
    InvalidArgument = 2,
    /// Infeasible catalyst, singular system or no engine regime.
    Infeasible = 3,
    GuardExceeded = 4,
    Internal = 5,
}

pub const TS_MODE_ENGINE: u32 = 1;
pub const TS_MODE_COOLER: u32 = 2;
pub const TS_MODE_ACCELERATOR: u32 = 4;
pub const TS_MODE_DEGENERATE: u32 = 8;

pub const TS_LP_OPTIMAL: i32 = 0;
pub const TS_LP_INFEASIBLE: i32 = 1;
pub const TS_LP_GUARD_EXCEEDED: i32 = 2;

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct TsCycleReport {
    pub work: f64,
    pub heat_hot: f64,
    pub heat_cold: f64,
    /// NaN when `has_efficiency` is 0.
    pub efficiency: f64,
    pub has_efficiency: i32,
    /// Bitwise OR of the `TS_MODE_*` flags.
    pub modes: u32,
}

/// Qubit hot and cold baths with fixed frequencies and temperatures.
pub struct TsEngine {
    omega_h: f64,
    omega_c: f64,
    beta: InverseTemperaturePair,
}

pub struct TsLpSolution(LpSolution);

pub struct TsBirkhoff(Vec<(f64, PermutationMap)>);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior NUL");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(status: TsStatus, msg: impl Into<String>) -> TsStatus {
    set_error(msg.into());
    status
}

fn from_error(e: Error) -> TsStatus {
    let status = match e {
        Error::InfeasibleCatalyst { .. }
        | Error::Singular
        | Error::DegeneratePoint
        | Error::CyclicityViolated(_)
        | Error::Inconsistent(_) => TsStatus::Infeasible,
        Error::EnumerationTooLarge(_) => TsStatus::GuardExceeded,
        Error::Lp(_) | Error::NoPerfectMatching => TsStatus::Internal,
        _ => TsStatus::InvalidArgument,
    };
    fail(status, e.to_string())
}

/// Runs `f`, mapping errors and panics to status codes.
fn guard(f: impl FnOnce() -> Result<(), TsStatus>) -> TsStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => TsStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => fail(TsStatus::Internal, "panic inside twostroke"),
    }
}

trait OrStatus<T> {
    fn st(self) -> Result<T, TsStatus>;
}

impl<T> OrStatus<T> for twostroke::Result<T> {
    fn st(self) -> Result<T, TsStatus> {
        self.map_err(from_error)
    }
}

unsafe fn slice_in<'a>(p: *const f64, n: usize) -> Result<&'a [f64], TsStatus> {
    if p.is_null() {
        return Err(fail(TsStatus::NullPointer, "null input buffer"));
    }
    Ok(slice::from_raw_parts(p, n))
}

unsafe fn out_ref<'a, T>(p: *mut T) -> Result<&'a mut T, TsStatus> {
    p.as_mut().ok_or_else(|| fail(TsStatus::NullPointer, "null output pointer"))
}

fn to_c(r: &CycleReport) -> TsCycleReport {
    let mut modes = 0;
    for m in &r.modes {
        modes |= match m {
            Mode::Engine => TS_MODE_ENGINE,
            Mode::Cooler => TS_MODE_COOLER,
            Mode::Accelerator => TS_MODE_ACCELERATOR,
            Mode::Degenerate => TS_MODE_DEGENERATE,
        };
    }
    TsCycleReport {
        work: r.work,
        heat_hot: r.heat_hot,
        heat_cold: r.heat_cold,
        efficiency: r.efficiency.unwrap_or(f64::NAN),
        has_efficiency: r.efficiency.is_some() as i32,
        modes,
    }
}

/// Message of the last failed call on this thread, or NULL. The pointer
/// stays valid until the next call into the library on this thread.
#[no_mangle]
pub extern "C" fn ts_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Gibbs populations of `levels[0..n]` at inverse temperature `beta`.
#[no_mangle]
pub unsafe extern "C" fn ts_gibbs_populations(
    levels: *const f64,
    n: usize,
    beta: f64,
    out: *mut f64,
    out_len: usize,
) -> TsStatus {
    guard(|| {
        let levels = slice_in(levels, n)?;
        if out.is_null() {
            return Err(fail(TsStatus::NullPointer, "null output buffer"));
        }
        if out_len < n {
            return Err(fail(TsStatus::InvalidArgument, format!("output holds {out_len}, need {n}")));
        }
        let p = gibbs_populations(&Spectrum::new(levels.to_vec()).st()?, beta).st()?;
        slice::from_raw_parts_mut(out, n).copy_from_slice(&p);
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn ts_engine_new(
    beta_h: f64,
    beta_c: f64,
    omega_h: f64,
    omega_c: f64,
    out: *mut *mut TsEngine,
) -> TsStatus {
    guard(|| {
        let out = out_ref(out)?;
        *out = ptr::null_mut();
        let beta = InverseTemperaturePair::new(beta_h, beta_c).st()?;
        Spectrum::qubit(omega_h).st()?;
        Spectrum::qubit(omega_c).st()?;
        *out = Box::into_raw(Box::new(TsEngine {
            omega_h,
            omega_c,
            beta,
        }));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn ts_engine_free(engine: *mut TsEngine) {
    if !engine.is_null() {
        drop(Box::from_raw(engine));
    }
}

unsafe fn engine_ref<'a>(e: *const TsEngine) -> Result<&'a TsEngine, TsStatus> {
    e.as_ref().ok_or_else(|| fail(TsStatus::NullPointer, "null engine"))
}

/// The swap of `|01>` and `|10>` without a catalyst. Reports whatever the
/// stroke does, engine or not.
#[no_mangle]
pub unsafe extern "C" fn ts_engine_otto_report(engine: *const TsEngine, out: *mut TsCycleReport) -> TsStatus {
    guard(|| {
        let e = engine_ref(engine)?;
        let out = out_ref(out)?;
        let (hh, hc) = (Spectrum::qubit(e.omega_h).st()?, Spectrum::qubit(e.omega_c).st()?);
        let initial = gibbs_product(&[1.0], &hh, &hc, e.beta).st()?;
        let fin = apply_permutation(&initial, &otto_swap()).st()?;
        *out = to_c(&stroke_report(&initial, &fin, &hh, &hc).st()?);
        Ok(())
    })
}

/// Best non-catalytic efficiency over all 24 permutations; `Infeasible`
/// when none produces work.
#[no_mangle]
pub unsafe extern "C" fn ts_engine_optimal_efficiency(engine: *const TsEngine, out: *mut f64) -> TsStatus {
    guard(|| {
        let e = engine_ref(engine)?;
        let out = out_ref(out)?;
        let r = optimal_noncatalytic(
            &Spectrum::qubit(e.omega_h).st()?,
            &Spectrum::qubit(e.omega_c).st()?,
            e.beta,
            Objective::Efficiency,
        )
        .st()?;
        if !r.engine_regime {
            return Err(fail(TsStatus::Infeasible, "no engine regime"));
        }
        *out = r.best_value;
        Ok(())
    })
}

/// Simple permutation with `m` hot and `n` cold swaps on an `m + n`-level
/// catalyst. `catalyst_out` (length `catalyst_len >= m + n`) and
/// `delta_p_out` may be NULL.
#[no_mangle]
pub unsafe extern "C" fn ts_engine_simple_report(
    engine: *const TsEngine,
    m: usize,
    n: usize,
    out: *mut TsCycleReport,
    catalyst_out: *mut f64,
    catalyst_len: usize,
    delta_p_out: *mut f64,
) -> TsStatus {
    guard(|| {
        let e = engine_ref(engine)?;
        let out = out_ref(out)?;
        let spec = SimplePermSpec::new(m, n).st()?;
        if !catalyst_out.is_null() && catalyst_len < spec.d() {
            return Err(fail(
                TsStatus::InvalidArgument,
                format!("catalyst buffer holds {catalyst_len}, need {}", spec.d()),
            ));
        }
        let r = simple_perm_report(spec, e.omega_h, e.omega_c, e.beta).st()?;
        *out = to_c(&r.report);
        if !catalyst_out.is_null() {
            slice::from_raw_parts_mut(catalyst_out, spec.d()).copy_from_slice(&r.catalyst.p);
        }
        if let Some(dp) = delta_p_out.as_mut() {
            *dp = r.catalyst.delta_p;
        }
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn ts_delta_p_closed_form(m: usize, n: usize, a_h: f64, a_c: f64, out: *mut f64) -> TsStatus {
    guard(|| {
        let out = out_ref(out)?;
        *out = delta_p_closed_form(SimplePermSpec::new(m, n).st()?, a_h, a_c).st()?;
        Ok(())
    })
}

/// Stationary catalyst of the simple permutation from the linear system.
/// `p_out` must hold `m + n` values.
#[no_mangle]
pub unsafe extern "C" fn ts_solve_catalyst(
    m: usize,
    n: usize,
    a_h: f64,
    a_c: f64,
    p_out: *mut f64,
    p_len: usize,
    delta_p_out: *mut f64,
) -> TsStatus {
    guard(|| {
        let spec = SimplePermSpec::new(m, n).st()?;
        if p_out.is_null() {
            return Err(fail(TsStatus::NullPointer, "null output buffer"));
        }
        if p_len < spec.d() {
            return Err(fail(TsStatus::InvalidArgument, format!("buffer holds {p_len}, need {}", spec.d())));
        }
        let s = solve_catalyst_state(spec, a_h, a_c).st()?;
        slice::from_raw_parts_mut(p_out, spec.d()).copy_from_slice(&s.p);
        if let Some(dp) = delta_p_out.as_mut() {
            *dp = s.delta_p;
        }
        Ok(())
    })
}

/// LP bound on work for `catalyst ⊗ hot ⊗ cold`, with the catalyst in
/// state `catalyst[0..d_s]` and the baths thermal. A solution whose
/// status is guard-exceeded is still returned, together with
/// `GuardExceeded`.
#[no_mangle]
pub unsafe extern "C" fn ts_lp_solve(
    hot_levels: *const f64,
    d_h: usize,
    cold_levels: *const f64,
    d_c: usize,
    catalyst: *const f64,
    d_s: usize,
    beta_h: f64,
    beta_c: f64,
    out: *mut *mut TsLpSolution,
) -> TsStatus {
    guard(|| {
        let out = out_ref(out)?;
        *out = ptr::null_mut();
        let hh = Spectrum::new(slice_in(hot_levels, d_h)?.to_vec()).st()?;
        let hc = Spectrum::new(slice_in(cold_levels, d_c)?.to_vec()).st()?;
        let p = slice_in(catalyst, d_s)?;
        let beta = InverseTemperaturePair::new(beta_h, beta_c).st()?;
        let initial = gibbs_product(p, &hh, &hc, beta).st()?;
        let h = Spectrum::tensor_sum(&[&Spectrum::trivial(d_s), &hh, &hc]);
        let sol = lp_work_upper_bound(&h, &initial, d_s).st()?;
        let status = sol.status;
        *out = Box::into_raw(Box::new(TsLpSolution(sol)));
        match status {
            LpStatus::Optimal => Ok(()),
            LpStatus::Infeasible => Err(fail(TsStatus::Infeasible, "LP infeasible")),
            LpStatus::GuardExceeded => Err(fail(
                TsStatus::GuardExceeded,
                twostroke::lp::RESTRICTED_NOTE,
            )),
        }
    })
}

unsafe fn lp_ref<'a>(s: *const TsLpSolution) -> Option<&'a LpSolution> {
    s.as_ref().map(|s| &s.0)
}

/// NaN for a NULL handle.
#[no_mangle]
pub unsafe extern "C" fn ts_lp_value(sol: *const TsLpSolution) -> f64 {
    lp_ref(sol).map_or(f64::NAN, |s| s.value)
}

/// One of `TS_LP_*`, or -1 for a NULL handle.
#[no_mangle]
pub unsafe extern "C" fn ts_lp_status(sol: *const TsLpSolution) -> i32 {
    match lp_ref(sol).map(|s| s.status) {
        Some(LpStatus::Optimal) => TS_LP_OPTIMAL,
        Some(LpStatus::Infeasible) => TS_LP_INFEASIBLE,
        Some(LpStatus::GuardExceeded) => TS_LP_GUARD_EXCEEDED,
        None => -1,
    }
}

#[no_mangle]
pub unsafe extern "C" fn ts_lp_num_terms(sol: *const TsLpSolution) -> usize {
    lp_ref(sol).map_or(0, |s| s.alphas.len())
}

/// Weight and permutation image of mixture term `k`; `image_out` must
/// hold the total dimension.
#[no_mangle]
pub unsafe extern "C" fn ts_lp_term(
    sol: *const TsLpSolution,
    k: usize,
    image_out: *mut usize,
    image_len: usize,
    weight_out: *mut f64,
) -> TsStatus {
    guard(|| {
        let s = lp_ref(sol).ok_or_else(|| fail(TsStatus::NullPointer, "null solution"))?;
        let a = s
            .alphas
            .get(k)
            .ok_or_else(|| fail(TsStatus::InvalidArgument, format!("term {k} out of range")))?;
        write_term(a.weight, &a.image, image_out, image_len, weight_out)
    })
}

#[no_mangle]
pub unsafe extern "C" fn ts_lp_free(sol: *mut TsLpSolution) {
    if !sol.is_null() {
        drop(Box::from_raw(sol));
    }
}

unsafe fn write_term(
    weight: f64,
    image: &PermutationMap,
    image_out: *mut usize,
    image_len: usize,
    weight_out: *mut f64,
) -> Result<(), TsStatus> {
    if !image_out.is_null() {
        if image_len < image.len() {
            return Err(fail(
                TsStatus::InvalidArgument,
                format!("image buffer holds {image_len}, need {}", image.len()),
            ));
        }
        slice::from_raw_parts_mut(image_out, image.len()).copy_from_slice(image.image());
    }
    if let Some(w) = weight_out.as_mut() {
        *w = weight;
    }
    Ok(())
}

/// Decomposes the row-major `n x n` bistochastic matrix `entries` into
/// weighted permutations.
#[no_mangle]
pub unsafe extern "C" fn ts_birkhoff_decompose(
    entries: *const f64,
    n: usize,
    out: *mut *mut TsBirkhoff,
) -> TsStatus {
    guard(|| {
        let out = out_ref(out)?;
        *out = ptr::null_mut();
        let len = n
            .checked_mul(n)
            .ok_or_else(|| fail(TsStatus::InvalidArgument, "dimension overflow"))?;
        let b = BistochasticMatrix::new(n, slice_in(entries, len)?.to_vec()).st()?;
        let terms = birkhoff_decompose(&b).st()?;
        *out = Box::into_raw(Box::new(TsBirkhoff(terms)));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn ts_birkhoff_num_terms(b: *const TsBirkhoff) -> usize {
    b.as_ref().map_or(0, |b| b.0.len())
}

#[no_mangle]
pub unsafe extern "C" fn ts_birkhoff_term(
    b: *const TsBirkhoff,
    k: usize,
    image_out: *mut usize,
    image_len: usize,
    weight_out: *mut f64,
) -> TsStatus {
    guard(|| {
        let b = b.as_ref().ok_or_else(|| fail(TsStatus::NullPointer, "null decomposition"))?;
        let (w, p) = b
            .0
            .get(k)
            .ok_or_else(|| fail(TsStatus::InvalidArgument, format!("term {k} out of range")))?;
        write_term(*w, p, image_out, image_len, weight_out)
    })
}

#[no_mangle]
pub unsafe extern "C" fn ts_birkhoff_free(b: *mut TsBirkhoff) {
    if !b.is_null() {
        drop(Box::from_raw(b));
    }
}
