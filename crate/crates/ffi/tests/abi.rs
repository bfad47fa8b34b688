use std::ffi::{CStr, CString};
use std::ptr;

use bigrade_ffi::*;

#[derive(Debug)]
struct Handle(*mut BigradeSession);

impl Drop for Handle {
    fn drop(&mut self) {
        unsafe { bigrade_session_free(self.0) }
    }
}

fn open(i: &str, j: &str, options: Option<BigradeOptions>) -> Result<Handle, (BigradeStatus, String)> {
    let (i, j) = (CString::new(i).unwrap(), CString::new(j).unwrap());
    let mut h = ptr::null_mut();
    let opts = options.as_ref().map_or(ptr::null(), |o| o as *const _);
    let status = unsafe { bigrade_session_new(i.as_ptr(), j.as_ptr(), opts, &mut h) };
    if status == BigradeStatus::Ok {
        assert!(!h.is_null());
        Ok(Handle(h))
    } else {
        assert!(h.is_null());
        Err((status, last_error()))
    }
}

fn last_error() -> String {
    let p = bigrade_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn take_string(p: *mut std::ffi::c_char) -> String {
    let s = unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned();
    unsafe { bigrade_string_free(p) };
    s
}

#[test]
fn square_of_maximal_against_parameters() {
    let h = open("x^2, x*y, y^2", "x^2, y^2", None).unwrap();
    let mut c = BigradeCoefficients::default();
    assert_eq!(unsafe { bigrade_coefficients(h.0, &mut c) }, BigradeStatus::Ok);
    assert_eq!((c.e20, c.e11, c.e02, c.e10, c.e01, c.e00), (4, 4, 4, 1, 1, 0));

    let mut v = BigradeVerdict { kind: BigradeVerdictKind::Inconclusive, value: 0 };
    assert_eq!(unsafe { bigrade_classify_h2(h.0, 0, 0, &mut v) }, BigradeStatus::Ok);
    assert_eq!(v, BigradeVerdict { kind: BigradeVerdictKind::InfiniteDetected, value: 1 });

    let mut len = 0;
    assert_eq!(unsafe { bigrade_length(h.0, 2, 3, &mut len) }, BigradeStatus::Ok);
    assert_eq!(len, 55);
    assert_eq!(unsafe { bigrade_length(h.0, 9, 0, &mut len) }, BigradeStatus::OutOfRange);
    assert!(last_error().contains("window"));

    let mut json = ptr::null_mut();
    assert_eq!(unsafe { bigrade_coefficients_json(h.0, &mut json) }, BigradeStatus::Ok);
    let v: serde_json::Value = serde_json::from_str(&take_string(json)).unwrap();
    assert_eq!(v["bhattacharya"]["e11"], 4);
}

#[test]
fn length_table_buffer_protocol() {
    let mut o = bigrade_options_default();
    o.r_max = 4;
    o.s_max = 5;
    let h = open("x, y", "x, y", Some(o)).unwrap();
    let mut n = 0usize;
    assert_eq!(unsafe { bigrade_length_table(h.0, ptr::null_mut(), 0, &mut n) }, BigradeStatus::Ok);
    assert_eq!(n, 30);
    let mut small = vec![0u64; 10];
    assert_eq!(
        unsafe { bigrade_length_table(h.0, small.as_mut_ptr(), small.len(), &mut n) },
        BigradeStatus::BufferTooSmall
    );
    let mut buf = vec![0u64; n];
    assert_eq!(unsafe { bigrade_length_table(h.0, buf.as_mut_ptr(), buf.len(), &mut n) }, BigradeStatus::Ok);
    for r in 0..=4u64 {
        for s in 0..=5u64 {
            let d = r + s + 1;
            assert_eq!(buf[(r * 6 + s) as usize], d * (d - 1) / 2);
        }
    }
}

#[test]
fn verification_report() {
    let mut o = bigrade_options_default();
    o.has_seed = true;
    o.seed = 3;
    let h = open("x, y", "x, y", Some(o)).unwrap();
    let mut json = ptr::null_mut();
    let mut passed = false;
    assert_eq!(unsafe { bigrade_verify_json(h.0, &mut json, &mut passed) }, BigradeStatus::Ok);
    assert!(passed);
    let v: serde_json::Value = serde_json::from_str(&take_string(json)).unwrap();
    assert_eq!(v["kind"], "verification");
    assert_eq!(v["seed"], 3);
    let mut seed = 0;
    assert_eq!(unsafe { bigrade_session_seed(h.0, &mut seed) }, BigradeStatus::Ok);
    assert_eq!(seed, 3);
}

#[test]
fn error_codes() {
    assert_eq!(open("x^2, x*y+", "x, y", None).unwrap_err().0, BigradeStatus::InvalidInput);
    let (status, msg) = open("x*y", "x, y", None).unwrap_err();
    assert_eq!(status, BigradeStatus::InvalidInput);
    assert!(msg.contains("m-primary"), "{msg}");

    let mut o = bigrade_options_default();
    o.prime = 15;
    assert_eq!(open("x, y", "x, y", Some(o)).unwrap_err().0, BigradeStatus::InvalidInput);

    let mut o = bigrade_options_default();
    o.r_max = 4;
    o.s_max = 4;
    let h = open("x^9, x^8*y, y^9", "x, y", Some(o)).unwrap();
    let mut c = BigradeCoefficients::default();
    assert_eq!(unsafe { bigrade_coefficients(h.0, &mut c) }, BigradeStatus::FitUnstable);

    let mut h = ptr::null_mut();
    let j = CString::new("x, y").unwrap();
    assert_eq!(
        unsafe { bigrade_session_new(ptr::null(), j.as_ptr(), ptr::null(), &mut h) },
        BigradeStatus::NullArgument
    );
    let bad = [0xffu8, 0];
    assert_eq!(
        unsafe { bigrade_session_new(bad.as_ptr().cast(), j.as_ptr(), ptr::null(), &mut h) },
        BigradeStatus::InvalidUtf8
    );
    let mut order = 0;
    assert_eq!(unsafe { bigrade_session_order(ptr::null_mut(), &mut order) }, BigradeStatus::NullArgument);
    unsafe {
        bigrade_session_free(ptr::null_mut());
        bigrade_string_free(ptr::null_mut());
    }
}

#[test]
fn success_clears_last_error() {
    let _ = open("x*y", "x, y", None).unwrap_err();
    let h = open("x, y", "x, y", None).unwrap();
    assert!(bigrade_last_error_message().is_null());
    let mut order = 0;
    assert_eq!(unsafe { bigrade_session_order(h.0, &mut order) }, BigradeStatus::Ok);
    assert!(order > 0);
    let v = unsafe { CStr::from_ptr(bigrade_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}
