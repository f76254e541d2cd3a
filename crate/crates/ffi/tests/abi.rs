use std::ffi::{CStr, CString};
use std::ptr;

use psets_ffi::*;

fn last_error() -> String {
    let p = psets_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn build(family: PsetsFamily, d: usize, p: u64, q: u64, a: Option<&[u64]>, eps: Option<&[u8]>) -> (PsetsStatus, *mut PsetsPointSet) {
    let mut out = ptr::null_mut();
    let st = unsafe {
        psets_pointset_new(
            family,
            d,
            p,
            q,
            a.map_or(ptr::null(), |s| s.as_ptr()),
            eps.map_or(ptr::null(), |s| s.as_ptr()),
            ptr::null(),
            ptr::null(),
            &mut out,
        )
    };
    (st, out)
}

#[test]
fn classical_set_through_the_abi() {
    let (st, set) = build(PsetsFamily::Pset, 2, 5, 0, None, None);
    assert_eq!(st, PsetsStatus::Ok);
    unsafe {
        assert_eq!(psets_pointset_len(set), 5);
        assert_eq!(psets_pointset_dim(set), 2);
        let mut num = [0u64; 2];
        let mut den = 0u64;
        assert_eq!(psets_pointset_point(set, 2, num.as_mut_ptr(), 2, &mut den), PsetsStatus::Ok);
        assert_eq!((num, den), ([2, 4], 5));
        assert_eq!(psets_pointset_point(set, 5, num.as_mut_ptr(), 2, &mut den), PsetsStatus::OutOfRange);
        assert_eq!(psets_pointset_point(set, 0, num.as_mut_ptr(), 1, &mut den), PsetsStatus::DimensionMismatch);
        psets_pointset_free(set);
    }
}

#[test]
fn exp_sum_matches_the_library() {
    let (_, set) = build(PsetsFamily::Pset, 2, 13, 0, None, None);
    let mut pass = false;
    let mut json = ptr::null_mut();
    unsafe {
        let (mut re, mut im) = (0.0, 0.0);
        assert_eq!(psets_exp_sum(set, [0i64, 0].as_ptr(), 2, &mut re, &mut im), PsetsStatus::Ok);
        assert!((re - 13.0).abs() < 1e-12 && im.abs() < 1e-12);
        assert_eq!(psets_exp_sum(set, [1i64].as_ptr(), 1, &mut re, &mut im), PsetsStatus::DimensionMismatch);
        assert!(last_error().contains("dimension"));
        assert_eq!(psets_verify_weil(set, 0, &mut pass, &mut json), PsetsStatus::Ok);
        assert!(pass);
        let text = CStr::from_ptr(json).to_str().unwrap().to_owned();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert!(v["max_ratio"].as_f64().unwrap() <= 1.0 + 1e-9);
        psets_string_free(json);
        let (mut mu, mut bound) = (0.0, 0.0);
        assert_eq!(psets_coherence(set, 2, &mut mu, &mut bound), PsetsStatus::Ok);
        assert!(mu <= bound * (1.0 + 1e-9));
        assert_eq!(psets_coherence(set, 7, &mut mu, &mut bound), PsetsStatus::OutOfRange);
        psets_pointset_free(set);
    }
}

#[test]
fn json_round_trip() {
    let (_, set) = build(PsetsFamily::ParamPset, 3, 7, 0, Some(&[2, 3, 5]), Some(&[1, 0]));
    unsafe {
        let json = psets_pointset_to_json(set);
        let mut back = ptr::null_mut();
        assert_eq!(psets_pointset_from_json(json, &mut back), PsetsStatus::Ok);
        assert_eq!(psets_pointset_len(back), psets_pointset_len(set));
        let again = psets_pointset_to_json(back);
        assert_eq!(CStr::from_ptr(json), CStr::from_ptr(again));
        psets_string_free(json);
        psets_string_free(again);
        psets_pointset_free(set);
        psets_pointset_free(back);

        let bad = CString::new("{\"construction\":\"pset\"}").unwrap();
        assert_eq!(psets_pointset_from_json(bad.as_ptr(), &mut back), PsetsStatus::Malformed);
    }
}

#[test]
fn errors_and_null_handling() {
    let (st, set) = build(PsetsFamily::Pset, 2, 9, 0, None, None);
    assert_eq!(st, PsetsStatus::NotPrime);
    assert!(set.is_null());
    assert!(last_error().contains('9'));
    let (st, _) = build(PsetsFamily::ParamPset, 2, 7, 0, Some(&[1, 7]), None);
    assert_eq!(st, PsetsStatus::InvalidArgument);
    let (st, set) = build(PsetsFamily::Pq, 2, 3, 7, None, None);
    assert_eq!(st, PsetsStatus::Ok);
    unsafe {
        assert_eq!(psets_pointset_len(set), 9);
        psets_pointset_free(set);
        assert_eq!(psets_pointset_len(ptr::null()), 0);
        assert!(psets_pointset_to_json(ptr::null()).is_null());
        let mut mu = 0.0;
        assert_eq!(psets_coherence(ptr::null(), 1, &mut mu, ptr::null_mut()), PsetsStatus::NullPointer);
        psets_pointset_free(ptr::null_mut());
        psets_string_free(ptr::null_mut());
    }
}

#[test]
fn primes() {
    assert!(psets_is_prime(101));
    assert!(!psets_is_prime(561));
    assert_eq!(psets_next_prime(90), 97);
    assert_eq!(psets_next_prime(u64::MAX), 0);
}

#[test]
fn header_declares_every_export() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/psets.h")).unwrap();
    for name in [
        "psets_last_error",
        "psets_is_prime",
        "psets_next_prime",
        "psets_pointset_new",
        "psets_pointset_from_json",
        "psets_pointset_free",
        "psets_pointset_len",
        "psets_pointset_dim",
        "psets_pointset_point",
        "psets_pointset_to_json",
        "psets_string_free",
        "psets_exp_sum",
        "psets_verify_weil",
        "psets_coherence",
        "typedef struct PsetsPointSet PsetsPointSet",
    ] {
        assert!(header.contains(name), "{name} missing from header");
    }
}

#[test]
fn c_program_links_against_the_static_library() {
    let Some(profile_dir) = std::env::current_exe().ok().and_then(|p| Some(p.parent()?.parent()?.to_path_buf())) else {
        return;
    };
    let lib = profile_dir.join("libpsets_ffi.a");
    let root = env!("CARGO_MANIFEST_DIR");
    if !lib.exists() || std::process::Command::new("cc").arg("--version").output().is_err() {
        eprintln!("skipping: no C compiler or static library");
        return;
    }
    let exe = profile_dir.join("psets_c_smoke");
    let status = std::process::Command::new("cc")
        .args(["-std=c11", "-Wall", "-Werror", "-I"])
        .arg(format!("{root}/include"))
        .arg(format!("{root}/tests/c/smoke.c"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success());
    let out = std::process::Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "exit {:?}", out.status);
    assert!(String::from_utf8_lossy(&out.stdout).contains("13 9 is not prime"));
}
