//! Drives the exported functions the way a C caller would.

use std::ffi::CStr;
use std::ptr;

use twostroke_ffi::*;

fn last_error() -> String {
    let p = ts_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn gibbs_matches_boltzmann_weights() {
    let levels = [0.0, 1.0];
    let mut out = [0.0; 2];
    let s = unsafe { ts_gibbs_populations(levels.as_ptr(), 2, 2.0, out.as_mut_ptr(), 2) };
    assert_eq!(s, TsStatus::Ok);
    let z = 1.0 + (-2.0f64).exp();
    assert!((out[0] - 1.0 / z).abs() < 1e-15);
    assert!((out[1] - (-2.0f64).exp() / z).abs() < 1e-15);
    assert!(ts_last_error_message().is_null());
}

#[test]
fn short_buffer_is_rejected() {
    let levels = [0.0, 1.0, 2.0];
    let mut out = [0.0; 2];
    let s = unsafe { ts_gibbs_populations(levels.as_ptr(), 3, 1.0, out.as_mut_ptr(), 2) };
    assert_eq!(s, TsStatus::InvalidArgument);
    assert!(last_error().contains("need 3"));
    let s = unsafe { ts_gibbs_populations(ptr::null(), 3, 1.0, out.as_mut_ptr(), 2) };
    assert_eq!(s, TsStatus::NullPointer);
}

#[test]
fn engine_lifecycle_and_reports() {
    let mut e = ptr::null_mut();
    assert_eq!(unsafe { ts_engine_new(1.0, 3.0, 1.0, 0.5, &mut e) }, TsStatus::Ok);
    let mut r = TsCycleReport::default();
    assert_eq!(unsafe { ts_engine_otto_report(e, &mut r) }, TsStatus::Ok);
    assert_eq!(r.modes & TS_MODE_ENGINE, TS_MODE_ENGINE);
    assert_eq!(r.has_efficiency, 1);
    assert!((r.efficiency - 0.5).abs() < 1e-12);
    let mut eta = 0.0;
    assert_eq!(unsafe { ts_engine_optimal_efficiency(e, &mut eta) }, TsStatus::Ok);
    assert!((eta - 0.5).abs() < 1e-12);
    unsafe { ts_engine_free(e) };
    unsafe { ts_engine_free(ptr::null_mut()) };
}

#[test]
fn worked_example_through_the_abi() {
    let mut e = ptr::null_mut();
    assert_eq!(unsafe { ts_engine_new(6.0, 7.0, 2.0, 3.0, &mut e) }, TsStatus::Ok);
    let mut r = TsCycleReport::default();
    let mut p = [0.0; 5];
    let mut dp = 0.0;
    let s = unsafe { ts_engine_simple_report(e, 2, 3, &mut r, p.as_mut_ptr(), 5, &mut dp) };
    assert_eq!(s, TsStatus::Ok);
    assert_eq!(r.efficiency, 0.1);
    assert!(r.work > 0.0 && dp > 0.0);
    assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);

    let mut eta = 0.0;
    assert_eq!(unsafe { ts_engine_optimal_efficiency(e, &mut eta) }, TsStatus::Infeasible);
    assert!(last_error().contains("no engine regime"));
    unsafe { ts_engine_free(e) };
}

#[test]
fn bad_temperatures_give_invalid_argument() {
    let mut e = ptr::null_mut();
    assert_eq!(unsafe { ts_engine_new(3.0, 1.0, 1.0, 0.5, &mut e) }, TsStatus::InvalidArgument);
    assert!(e.is_null());
}

#[test]
fn closed_form_agrees_with_linear_solve() {
    let (a_h, a_c) = (0.6, 0.2);
    let mut closed = 0.0;
    assert_eq!(unsafe { ts_delta_p_closed_form(2, 3, a_h, a_c, &mut closed) }, TsStatus::Ok);
    let mut p = [0.0; 5];
    let mut solved = 0.0;
    let s = unsafe { ts_solve_catalyst(2, 3, a_h, a_c, p.as_mut_ptr(), 5, &mut solved) };
    assert_eq!(s, TsStatus::Ok);
    assert!((closed - solved).abs() < 1e-12);
    assert_eq!(unsafe { ts_delta_p_closed_form(2, 3, 0.5, 0.5, &mut closed) }, TsStatus::Infeasible);
}

#[test]
fn lp_handles() {
    let q = [0.0, 1.0];
    let c = [0.0, 0.5];
    let cat = [1.0];
    let mut sol = ptr::null_mut();
    let s = unsafe { ts_lp_solve(q.as_ptr(), 2, c.as_ptr(), 2, cat.as_ptr(), 1, 1.0, 3.0, &mut sol) };
    assert_eq!(s, TsStatus::Ok);
    assert_eq!(unsafe { ts_lp_status(sol) }, TS_LP_OPTIMAL);
    let v = unsafe { ts_lp_value(sol) };
    assert!((v - 0.0432579487818).abs() < 1e-12);
    assert_eq!(unsafe { ts_lp_num_terms(sol) }, 1);
    let mut image = [0usize; 4];
    let mut w = 0.0;
    assert_eq!(unsafe { ts_lp_term(sol, 0, image.as_mut_ptr(), 4, &mut w) }, TsStatus::Ok);
    assert_eq!(image, [0, 2, 1, 3]);
    assert_eq!(w, 1.0);
    assert_eq!(unsafe { ts_lp_term(sol, 1, image.as_mut_ptr(), 4, &mut w) }, TsStatus::InvalidArgument);
    unsafe { ts_lp_free(sol) };
    assert!(unsafe { ts_lp_value(ptr::null()) }.is_nan());
    assert_eq!(unsafe { ts_lp_status(ptr::null()) }, -1);
}

#[test]
fn lp_guard_still_returns_a_handle() {
    let q = [0.0, 1.0];
    let c = [0.0, 0.5];
    let cat = [0.5, 0.3, 0.2];
    let mut sol = ptr::null_mut();
    let s = unsafe { ts_lp_solve(q.as_ptr(), 2, c.as_ptr(), 2, cat.as_ptr(), 3, 1.0, 3.0, &mut sol) };
    assert_eq!(s, TsStatus::GuardExceeded);
    assert!(!sol.is_null());
    assert_eq!(unsafe { ts_lp_status(sol) }, TS_LP_GUARD_EXCEEDED);
    unsafe { ts_lp_free(sol) };
}

#[test]
fn birkhoff_round_trip() {
    // 0.7 * identity + 0.3 * cyclic shift
    let m = [0.7, 0.0, 0.3, 0.3, 0.7, 0.0, 0.0, 0.3, 0.7];
    let mut b = ptr::null_mut();
    assert_eq!(unsafe { ts_birkhoff_decompose(m.as_ptr(), 3, &mut b) }, TsStatus::Ok);
    let k = unsafe { ts_birkhoff_num_terms(b) };
    assert_eq!(k, 2);
    let mut rebuilt = [0.0; 9];
    for t in 0..k {
        let mut image = [0usize; 3];
        let mut w = 0.0;
        assert_eq!(unsafe { ts_birkhoff_term(b, t, image.as_mut_ptr(), 3, &mut w) }, TsStatus::Ok);
        for (x, &y) in image.iter().enumerate() {
            rebuilt[y * 3 + x] += w;
        }
    }
    for (a, b) in rebuilt.iter().zip(&m) {
        assert!((a - b).abs() < 1e-12);
    }
    unsafe { ts_birkhoff_free(b) };

    let bad = [0.5, 0.5, 0.5, 0.4];
    let mut b = ptr::null_mut();
    assert_eq!(unsafe { ts_birkhoff_decompose(bad.as_ptr(), 2, &mut b) }, TsStatus::InvalidArgument);
    assert!(b.is_null());
}
