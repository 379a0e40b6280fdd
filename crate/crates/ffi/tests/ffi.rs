use std::ffi::CStr;
use std::path::Path;
use std::process::Command;
use std::ptr;

use fas_extremes_ffi::*;

unsafe fn matrix(model: FasModel, w: f64, n: usize) -> *mut FasCorrMatrix {
    let mut m = ptr::null_mut();
    assert_eq!(fas_corr_matrix_new(model, w, n, &mut m), FasStatus::Ok);
    m
}

unsafe fn last_error() -> String {
    CStr::from_ptr(fas_last_error_message()).to_string_lossy().into_owned()
}

#[test]
fn handle_lifecycle_and_entries() {
    unsafe {
        let m = matrix(FasModel::Gaussian, 1.0, 10);
        assert_eq!(fas_corr_matrix_dim(m), 10);
        let mut v = 0.0;
        assert_eq!(fas_corr_matrix_get(m, 3, 3, &mut v), FasStatus::Ok);
        assert_eq!(v, 1.0);
        assert_eq!(fas_corr_matrix_get(m, 0, 9, &mut v), FasStatus::Ok);
        assert!((v - (-std::f64::consts::PI.powi(2)).exp()).abs() < 1e-14);
        assert_eq!(fas_corr_matrix_get(m, 10, 0, &mut v), FasStatus::Config);
        let mut pr = 0.0;
        assert_eq!(fas_participation_ratio(m, &mut pr), FasStatus::Ok);
        assert!(pr > 1.0 && pr < 10.0);
        fas_corr_matrix_free(m);
        fas_corr_matrix_free(ptr::null_mut());
        fas_spectrum_free(ptr::null_mut());
        assert_eq!(fas_corr_matrix_dim(ptr::null()), 0);
    }
}

#[test]
fn analytic_outage_through_spectrum() {
    unsafe {
        let m = matrix(FasModel::Gaussian, 1.0, 10);
        let mut s = ptr::null_mut();
        assert_eq!(fas_spectrum_new(m, &mut s), FasStatus::Ok);
        let (mut l1, mut p1, mut p2, mut pk, mut rate) = (0.0, 0.0, 0.0, 0.0, 0.0);
        assert_eq!(fas_spectrum_eigenvalue(s, 0, &mut l1), FasStatus::Ok);
        assert!(l1 > 1.0 && l1 < 10.0);
        assert_eq!(fas_outage_rank1(s, 1.0, &mut p1), FasStatus::Ok);
        assert_eq!(fas_outage_rank2(s, 1.0, 16, 200, &mut p2), FasStatus::Ok);
        assert_eq!(fas_outage_rank_k(s, 2, 1.0, 16, &mut pk), FasStatus::Ok);
        assert!(p2 < p1 && (p2 - pk).abs() < 5e-2, "{p1} {p2} {pk}");
        assert_eq!(fas_outage_rank_k(s, 5, 1.0, 16, &mut pk), FasStatus::Config);
        assert!(last_error().contains("configuration"));
        assert_eq!(fas_ergodic_rate_rank1(s, 10.0, &mut rate), FasStatus::Ok);
        assert!(rate > 0.0);
        assert_eq!(fas_spectrum_eigenvalue(s, 10, &mut l1), FasStatus::Config);
        fas_spectrum_free(s);
        fas_corr_matrix_free(m);
    }
}

#[test]
fn bounds_and_simulation_agree() {
    unsafe {
        let m = matrix(FasModel::Jakes, 1.0, 20);
        let (mut lo, mut hi, mut blk, mut valid) = (0.0, 0.0, 0.0, -1);
        assert_eq!(fas_slepian_sandwich(m, 1.0, 8, &mut lo, &mut hi), FasStatus::Ok);
        assert!(lo <= hi);
        assert_eq!(fas_block_bound(m, 1.0, 1, 8, &mut blk, &mut valid), FasStatus::Ok);
        assert_eq!(blk, lo);
        assert!(valid == 0 || valid == 1);
        let (mut p, mut se) = (0.0, 0.0);
        assert_eq!(fas_simulate_outage(m, 1.0, 200_000, 7, 2, &mut p, &mut se), FasStatus::Ok);
        assert!(se > 0.0 && lo - 4.0 * se <= p && p <= hi + 4.0 * se, "{lo} {p} {hi}");
        let (mut p2, mut se2) = (0.0, 0.0);
        fas_simulate_outage(m, 1.0, 200_000, 7, 2, &mut p2, &mut se2);
        assert_eq!(p.to_bits(), p2.to_bits());
        assert_eq!(fas_simulate_outage(m, 1.0, 0, 7, 2, &mut p, &mut se), FasStatus::Config);
        fas_corr_matrix_free(m);
    }
}

#[test]
fn scalar_functions() {
    unsafe {
        let mut v = 0.0;
        assert_eq!(fas_equicorr_cdf_exact(1.0, 0.9, 5, 8, &mut v), FasStatus::Ok);
        assert!((v - 0.427_846_750_220_901_9).abs() < 1e-9);
        assert_eq!(fas_outage_continuous(3.1623, 1.0, &mut v), FasStatus::Ok);
        assert!((v - 0.362_970_959_219_264_7).abs() < 1e-12);
        let mut eq = ptr::null_mut();
        assert_eq!(fas_corr_matrix_equicorrelated(4, 0.5, &mut eq), FasStatus::Ok);
        assert_eq!(fas_corr_matrix_dim(eq), 4);
        fas_corr_matrix_free(eq);
        let version = CStr::from_ptr(fas_version()).to_str().unwrap();
        assert_eq!(version, env!("CARGO_PKG_VERSION"));
    }
}

#[test]
fn errors_map_to_status_codes() {
    unsafe {
        let mut m = ptr::null_mut();
        assert_eq!(fas_corr_matrix_new(FasModel::Jakes, -1.0, 10, &mut m), FasStatus::Config);
        assert!(m.is_null());
        assert!(!last_error().is_empty());
        assert_eq!(
            fas_corr_matrix_new(FasModel::Jakes, 1.0, 10, ptr::null_mut()),
            FasStatus::NullPointer
        );
        let mut v = 0.0;
        assert_eq!(fas_outage_rank1(ptr::null(), 1.0, &mut v), FasStatus::NullPointer);
        assert!(last_error().contains("spectrum"));
        assert_eq!(fas_equicorr_cdf_exact(-1.0, 0.5, 4, 8, &mut v), FasStatus::Domain);
        assert_eq!(fas_equicorr_cdf_exact(1.0, 0.5, 4, 8, ptr::null_mut()), FasStatus::NullPointer);
    }
}

#[test]
fn header_is_valid_c() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/fas_extremes.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for name in ["fas_corr_matrix_new", "fas_outage_rank2", "fas_simulate_outage", "FAS_STATUS_OK"] {
        assert!(text.contains(name), "{name} missing from header");
    }
    let Ok(status) = Command::new("cc")
        .args(["-fsyntax-only", "-Wall", "-Werror", "-x", "c"])
        .arg(&header)
        .status()
    else {
        eprintln!("no C compiler; skipping syntax check");
        return;
    };
    assert!(status.success());
}
