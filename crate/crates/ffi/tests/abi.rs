use std::ffi::{CStr, CString};
use std::ptr;

use diophant_ffi::*;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

unsafe fn take(s: *mut std::ffi::c_char) -> String {
    assert!(!s.is_null());
    let out = CStr::from_ptr(s).to_str().unwrap().to_string();
    diophant_string_free(s);
    out
}

unsafe fn field(r: *const DiophantReport, key: &str) -> String {
    take(diophant_report_field(r, c(key).as_ptr()))
}

#[test]
fn continued_fraction_handle() {
    unsafe {
        let mut cf = ptr::null_mut();
        assert_eq!(
            diophant_cf_expand(c("355/113").as_ptr(), 10, 0, &mut cf),
            DiophantStatus::Ok
        );
        assert_eq!(diophant_cf_len(cf), 3);
        let qs: Vec<String> = (0..3)
            .map(|i| {
                let mut s = ptr::null_mut();
                assert_eq!(diophant_cf_quotient(cf, i, &mut s), DiophantStatus::Ok);
                take(s)
            })
            .collect();
        assert_eq!(qs, ["3", "7", "16"]);
        let mut s = ptr::null_mut();
        assert_eq!(diophant_cf_quotient(cf, 3, &mut s), DiophantStatus::IndexOutOfRange);
        assert!(take(diophant_cf_to_json(cf)).starts_with("{\"quotients\":[\"3\",\"7\",\"16\"]"));
        diophant_cf_free(cf);

        let mut pi = ptr::null_mut();
        assert_eq!(diophant_cf_expand(c("pi").as_ptr(), 5, 0, &mut pi), DiophantStatus::Ok);
        let mut s = ptr::null_mut();
        assert_eq!(diophant_cf_quotient(pi, 4, &mut s), DiophantStatus::Ok);
        assert_eq!(take(s), "292");
        diophant_cf_free(pi);
    }
}

#[test]
fn errors_are_reported() {
    unsafe {
        let mut cf = ptr::null_mut();
        assert_eq!(
            diophant_cf_expand(c("1/(").as_ptr(), 5, 0, &mut cf),
            DiophantStatus::Parse
        );
        assert!(!diophant_last_error().is_null());
        assert_eq!(
            diophant_cf_expand(ptr::null(), 5, 0, &mut cf),
            DiophantStatus::NullPointer
        );
        assert_eq!(
            diophant_cf_expand(c("sqrt(2)*sqrt(3)-sqrt(6)").as_ptr(), 5, 256, &mut cf),
            DiophantStatus::PrecisionExhausted
        );
        let mut r = ptr::null_mut();
        assert_eq!(diophant_pell(c("16").as_ptr(), &mut r), DiophantStatus::NotApplicable);
        assert_eq!(diophant_pell(c("x").as_ptr(), &mut r), DiophantStatus::Parse);
        let mut h = 0u64;
        assert_eq!(diophant_class_number(0, &mut h), DiophantStatus::InvalidParameters);
        assert_eq!(diophant_class_number(12, &mut h), DiophantStatus::Failed);
        assert!(CStr::from_ptr(diophant_last_error())
            .to_str()
            .unwrap()
            .contains("squarefree"));
        assert_eq!(diophant_class_number(163, &mut h), DiophantStatus::Ok);
        assert!(diophant_last_error().is_null());
        assert_eq!(h, 1);
        // null handles are tolerated
        diophant_cf_free(ptr::null_mut());
        diophant_report_free(ptr::null_mut());
        diophant_string_free(ptr::null_mut());
        assert_eq!(diophant_cf_len(ptr::null()), 0);
    }
}

#[test]
fn reports() {
    unsafe {
        let mut r = ptr::null_mut();
        assert_eq!(diophant_pell(c("61").as_ptr(), &mut r), DiophantStatus::Ok);
        assert_eq!(field(r, "x"), "1766319049");
        assert_eq!(field(r, "y"), "226153980");
        diophant_report_free(r);

        let mut b = ptr::null_mut();
        assert_eq!(
            diophant_bound_lf4(2, 4, c("1/2").as_ptr(), c("4").as_ptr(), &mut b),
            DiophantStatus::Ok
        );
        let v: f64 = field(b, "log10_bound").parse().unwrap();
        assert!((131.0..132.0).contains(&v));
        diophant_report_free(b);

        let mut m = ptr::null_mut();
        assert_eq!(diophant_bound_mordell(c("1621").as_ptr(), &mut m), DiophantStatus::Ok);
        assert!(field(m, "inner_exponent").starts_with("132097.8"));
        diophant_report_free(m);

        let mut t = ptr::null_mut();
        assert_eq!(
            diophant_bound_thue_cubic(c("1621").as_ptr(), &mut t),
            DiophantStatus::Ok
        );
        diophant_report_free(t);

        let mut g = ptr::null_mut();
        assert_eq!(
            diophant_solve_exponential_gap(c("3").as_ptr(), c("2").as_ptr(), c("1").as_ptr(), &mut g),
            DiophantStatus::Ok
        );
        let json = take(diophant_report_json(g));
        assert!(json.contains("\"solutions\":[[1,1],[2,3]]"));
        diophant_report_free(g);
    }
}

#[test]
fn quadruple_and_certificate_round_trip() {
    unsafe {
        let mut q = ptr::null_mut();
        assert_eq!(diophant_solve_quadruple(&mut q), DiophantStatus::Ok);
        assert_eq!(field(q, "conclusion"), "no_fifth_element");
        let json = take(diophant_report_json(q));
        diophant_report_free(q);

        let dir = tempfile::tempdir().unwrap();
        let report: serde_json::Value = serde_json::from_str(&json).unwrap();
        let path = diophant::cli::save_certificate(&report, "quadruple", dir.path()).unwrap();
        let cpath = c(path.to_str().unwrap());
        let mut v = ptr::null_mut();
        assert_eq!(
            diophant_verify_certificate(cpath.as_ptr(), 0, &mut v),
            DiophantStatus::Ok
        );
        assert_eq!(field(v, "verified"), "true");
        diophant_report_free(v);

        // move the first reduction step off its convergent
        let mut doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
        let cert = &mut doc["report"]["linear_forms"][0]["reduction"]["certificates"][0];
        let q: num_bigint::BigInt = cert["q"].as_str().unwrap().parse().unwrap();
        let moved: num_bigint::BigInt = q + 1;
        cert["q"] = serde_json::json!(moved.to_string());
        std::fs::write(&path, doc.to_string()).unwrap();
        assert_eq!(
            diophant_verify_certificate(cpath.as_ptr(), 0, ptr::null_mut()),
            DiophantStatus::Verification
        );
    }
}

#[test]
fn header_is_valid_c() {
    let header = concat!(env!("CARGO_MANIFEST_DIR"), "/include/diophant.h");
    let text = std::fs::read_to_string(header).unwrap();
    for sym in [
        "diophant_cf_expand",
        "diophant_solve_quadruple",
        "diophant_last_error",
        "DIOPHANT_STATUS_OK",
    ] {
        assert!(text.contains(sym), "{sym} missing from header");
    }
    match std::process::Command::new("cc")
        .args(["-fsyntax-only", "-x", "c", header])
        .status()
    {
        Ok(s) => assert!(s.success()),
        Err(_) => eprintln!("no C compiler; skipped syntax check"),
    }
}

#[test]
fn version_is_static() {
    let v = unsafe { CStr::from_ptr(diophant_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}
