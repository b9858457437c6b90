use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::ptr;

use finsler_ffi::*;

fn data(name: &str) -> CString {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name);
    CString::new(std::fs::read_to_string(path).unwrap()).unwrap()
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(finsler_last_error()) }.to_str().unwrap().to_owned()
}

fn matpoly(name: &str) -> *mut FinslerMatPoly {
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { finsler_matpoly_from_json(data(name).as_ptr(), &mut out) }, FinslerStatus::Ok);
    assert!(!out.is_null());
    out
}

fn certificate(name: &str) -> *mut FinslerCertificate {
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { finsler_certificate_from_json(data(name).as_ptr(), &mut out) }, FinslerStatus::Ok);
    out
}

#[test]
fn shape_of_parsed_handle() {
    let f = matpoly("three_by_three_F.json");
    let (mut n, mut d) = (0, 0);
    assert_eq!(unsafe { finsler_matpoly_shape(f, &mut n, &mut d) }, FinslerStatus::Ok);
    assert_eq!((n, d), (3, 1));
    unsafe { finsler_matpoly_free(f) };
}

#[test]
fn malformed_json_is_a_parse_error_with_message() {
    let mut out = ptr::null_mut();
    let bad = CString::new("{\"n\": 2").unwrap();
    assert_eq!(unsafe { finsler_matpoly_from_json(bad.as_ptr(), &mut out) }, FinslerStatus::Parse);
    assert!(out.is_null());
    assert!(!last_error().is_empty());
}

#[test]
fn null_arguments_are_reported() {
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { finsler_matpoly_from_json(ptr::null(), &mut out) }, FinslerStatus::NullPointer);
    let mut iv = FinslerInterval { empty: 0, lo: 0.0, hi: 0.0, low_confidence: 0 };
    assert_eq!(
        unsafe { finsler_section_at(ptr::null(), ptr::null(), ptr::null(), 0, 1e-9, &mut iv) },
        FinslerStatus::NullPointer
    );
    unsafe { finsler_matpoly_free(ptr::null_mut()) };
    unsafe { finsler_certificate_free(ptr::null_mut()) };
}

#[test]
fn constant_interval_matches_closed_form() {
    // F = diag(2, 1), G = diag(1, 1): F - rG ≻ 0 iff r < 1.
    let f = [2.0, 0.0, 0.0, 1.0];
    let g = [1.0, 0.0, 0.0, 1.0];
    let mut iv = FinslerInterval { empty: 1, lo: 0.0, hi: 0.0, low_confidence: 1 };
    assert_eq!(
        unsafe { finsler_interval_constant(2, f.as_ptr(), g.as_ptr(), 1e-9, &mut iv) },
        FinslerStatus::Ok
    );
    assert_eq!(iv.empty, 0);
    assert_eq!(iv.lo, f64::NEG_INFINITY);
    assert!((iv.hi - 1.0).abs() < 1e-12);
}

#[test]
fn section_of_diagonal_pair() {
    let (f, g) = (matpoly("diag_pair_F.json"), matpoly("diag_pair_G.json"));
    let mut iv = FinslerInterval { empty: 1, lo: 0.0, hi: 0.0, low_confidence: 0 };
    for x in [-2.0f64, 0.5, 3.0] {
        assert_eq!(unsafe { finsler_section_at(f, g, &x, 1, 1e-9, &mut iv) }, FinslerStatus::Ok);
        let (lo, hi) = if x < 0.0 { (1.0 + 1.0 / x, f64::INFINITY) } else { (f64::NEG_INFINITY, 1.0 / x) };
        assert_eq!(iv.empty, 0);
        assert!(iv.lo == lo || (iv.lo - lo).abs() < 1e-12, "{x}: {iv:?}");
        assert!(iv.hi == hi || (iv.hi - hi).abs() < 1e-12, "{x}: {iv:?}");
    }
    let wrong = matpoly("three_by_three_G.json");
    let x = 1.0;
    assert_eq!(unsafe { finsler_section_at(f, wrong, &x, 1, 1e-9, &mut iv) }, FinslerStatus::Shape);
    unsafe {
        finsler_matpoly_free(f);
        finsler_matpoly_free(g);
        finsler_matpoly_free(wrong);
    }
}

#[test]
fn certificate_verifies_and_wrong_target_is_localized() {
    let cert = certificate("remark_cert.json");
    let target = matpoly("remark_target.json");
    let g = matpoly("odd_degree_G.json");
    let gs = [g as *const FinslerMatPoly];
    let mut mm = FinslerMismatch { row: 0, col: 0 };
    assert_eq!(
        unsafe { finsler_certificate_verify(cert, target, gs.as_ptr(), 1, &mut mm) },
        FinslerStatus::Ok
    );
    assert!(last_error().is_empty());

    let other = matpoly("identity_F.json");
    assert_eq!(
        unsafe { finsler_certificate_verify(cert, other, gs.as_ptr(), 1, &mut mm) },
        FinslerStatus::Mismatch
    );
    assert_eq!((mm.row, mm.col), (1, 1));
    assert!(last_error().contains("wqm"));

    // Identity certificates need a target.
    assert_eq!(
        unsafe { finsler_certificate_verify(cert, ptr::null(), gs.as_ptr(), 1, &mut mm) },
        FinslerStatus::Shape
    );
    unsafe {
        finsler_certificate_free(cert);
        for m in [target, g, other] {
            finsler_matpoly_free(m);
        }
    }
}

#[test]
fn chain_certificate_needs_no_target() {
    let cert = certificate("chain_cert.json");
    let g = matpoly("chain_G.json");
    let gs = [g as *const FinslerMatPoly];
    assert_eq!(
        unsafe { finsler_certificate_verify(cert, ptr::null(), gs.as_ptr(), 1, ptr::null_mut()) },
        FinslerStatus::Ok,
        "{}",
        last_error()
    );
    unsafe {
        finsler_certificate_free(cert);
        finsler_matpoly_free(g);
    }
}

#[test]
fn header_declares_every_entry_point() {
    let header = std::fs::read_to_string(PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include/finsler.h")).unwrap();
    for name in [
        "finsler_last_error",
        "finsler_matpoly_from_json",
        "finsler_matpoly_free",
        "finsler_matpoly_shape",
        "finsler_interval_constant",
        "finsler_section_at",
        "finsler_certificate_from_json",
        "finsler_certificate_free",
        "finsler_certificate_verify",
        "FINSLER_STATUS_MISMATCH = 5",
    ] {
        assert!(header.contains(name), "{name} missing from header");
    }
}
