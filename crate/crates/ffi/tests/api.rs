use std::ffi::{CStr, CString};
use std::ptr;

use caialg_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(caialg_last_error()) }.to_string_lossy().into_owned()
}

#[test]
fn matrix_functions() {
    let m = [3.0, 0.0, 0.0, -4.0];
    let mut out = 0.0;
    assert_eq!(unsafe { caialg_op_norm(m.as_ptr(), ptr::null(), 2, &mut out) }, CaialgStatus::Ok);
    assert_eq!(out, 4.0);
    let im = [0.0, 1.0, 0.0, 0.0];
    assert_eq!(unsafe { caialg_spectral_radius(m.as_ptr(), im.as_ptr(), 2, &mut out) }, CaialgStatus::Ok);
    assert!((out - 4.0).abs() < 1e-12);
    assert_eq!(unsafe { caialg_op_norm(ptr::null(), ptr::null(), 2, &mut out) }, CaialgStatus::NullPointer);
    let bad = [f64::NAN];
    assert_eq!(unsafe { caialg_op_norm(bad.as_ptr(), ptr::null(), 1, &mut out) }, CaialgStatus::InvalidArgument);
    assert!(!last_error().is_empty());
}

#[test]
fn cai_block_and_buffer_checks() {
    let mut buf = [0.0; 16];
    let mut mu = 0usize;
    assert_eq!(unsafe { caialg_cai_block(4, 2, buf.as_mut_ptr(), 16, &mut mu) }, CaialgStatus::Ok);
    // E_{4,2} = {2, 3, 4}
    assert_eq!(mu, 3);
    for row in buf.chunks(4) {
        assert!(row.iter().all(|&x| x >= 0.0));
        assert!(row.iter().sum::<f64>() <= 1.0 + 1e-15);
    }
    assert!(buf.iter().any(|&x| (x - 1.0 / 3.0).abs() < 1e-15));
    assert_eq!(unsafe { caialg_cai_block(4, 2, buf.as_mut_ptr(), 15, ptr::null_mut()) }, CaialgStatus::OutOfBounds);
}

#[test]
fn params_lifecycle() {
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { caialg_params_new_linear(1.0, 30, &mut p) }, CaialgStatus::Ok);
    let mut c = 0.0;
    assert_eq!(unsafe { caialg_params_c(p, 4, &mut c) }, CaialgStatus::Ok);
    assert_eq!(c, 5.0);
    assert_eq!(unsafe { caialg_params_c(p, 31, &mut c) }, CaialgStatus::Range);

    let el = CString::new(r#"{"type": "cai_unit", "k": 3}"#).unwrap();
    let mut v = 0.0;
    assert_eq!(unsafe { caialg_p_norm(p, el.as_ptr(), 1, 30, &mut v) }, CaialgStatus::Ok);
    assert!(v <= 1.0 + 1e-12 && v > 0.5);
    let bad = CString::new(r#"{"type": "cai_unit"}"#).unwrap();
    assert_eq!(unsafe { caialg_p_norm(p, bad.as_ptr(), 1, 30, &mut v) }, CaialgStatus::InvalidArgument);
    unsafe { caialg_params_free(p) };
    unsafe { caialg_params_free(ptr::null_mut()) };

    let table = [2.0, 3.0, 5.0];
    assert_eq!(unsafe { caialg_params_new_table(table.as_ptr(), 3, 3, &mut p) }, CaialgStatus::Ok);
    unsafe { caialg_params_free(p) };
    let not_increasing = [2.0, 1.5];
    assert_ne!(unsafe { caialg_params_new_table(not_increasing.as_ptr(), 2, 2, &mut p) }, CaialgStatus::Ok);
}

#[test]
fn suite_and_reports() {
    let cfg = CString::new(r#"{"n_max": 20, "lemmas": ["minimal_idempotents", "hbeta"], "hbeta": {"C": 0.5, "N": 64}}"#).unwrap();
    let mut set = ptr::null_mut();
    assert_eq!(unsafe { caialg_run_suite(cfg.as_ptr(), &mut set) }, CaialgStatus::Ok);
    let (mut len, mut code) = (0usize, 0i32);
    unsafe {
        assert_eq!(caialg_report_set_len(set, &mut len), CaialgStatus::Ok);
        assert_eq!(caialg_report_set_exit_code(set, &mut code), CaialgStatus::Ok);
    }
    assert!(len > 2);
    assert_eq!(code, 1);

    let mut view = CaialgReportView { measured: 0.0, bound: 0.0, margin: 0.0, pass: false, status: -1 };
    let mut id = ptr::null_mut();
    unsafe {
        assert_eq!(caialg_report_get(set, 1, &mut view), CaialgStatus::Ok);
        assert_eq!(caialg_report_lemma_id(set, 1, &mut id), CaialgStatus::Ok);
        assert_eq!(CStr::from_ptr(id).to_str().unwrap(), "hbeta.algebra_weight");
        caialg_string_free(id);
        assert_eq!(caialg_report_get(set, len, &mut view), CaialgStatus::OutOfBounds);
    }
    assert!(!view.pass);
    assert_eq!(view.status, 1);

    let mut text = ptr::null_mut();
    unsafe {
        assert_eq!(caialg_report_set_render(set, 1, &mut text), CaialgStatus::Ok);
        assert!(CStr::from_ptr(text).to_str().unwrap().starts_with("lemma_id,"));
        caialg_string_free(text);
        assert_eq!(caialg_report_set_render(set, 7, &mut text), CaialgStatus::InvalidArgument);
        caialg_report_set_free(set);
    }
}

#[test]
fn malformed_config_is_config_error() {
    let cfg = CString::new("{\"n_max\": ").unwrap();
    let mut set = ptr::null_mut();
    assert_eq!(unsafe { caialg_run_suite(cfg.as_ptr(), &mut set) }, CaialgStatus::Config);
    assert!(set.is_null());
    assert!(last_error().contains("malformed"));
    assert!(!unsafe { CStr::from_ptr(caialg_version()) }.to_str().unwrap().is_empty());
}
