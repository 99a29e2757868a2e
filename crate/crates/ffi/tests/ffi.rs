use std::ffi::{CStr, CString};
use std::ptr;

use pseudogram_ffi::*;

const COORDINATE: &str = r#"{"n":3,"symmetric":true,"elements":[
 {"weight":1.0,"vertices":[[0,1,0],[0,0,1],[0,-1,0],[0,0,-1]]},
 {"weight":1.0,"vertices":[[0,0,1],[1,0,0],[0,0,-1],[-1,0,0]]},
 {"weight":1.0,"vertices":[[1,0,0],[0,1,0],[-1,0,0],[0,-1,0]]}]}"#;

fn load(json: &str) -> (PsgStatus, *mut PsgArrangement) {
    let c = CString::new(json).unwrap();
    let mut h = ptr::null_mut();
    let s = unsafe { psg_arrangement_from_json(c.as_ptr(), &mut h) };
    (s, h)
}

unsafe fn take(s: *mut std::ffi::c_char) -> String {
    let out = CStr::from_ptr(s).to_str().unwrap().to_string();
    psg_string_free(s);
    out
}

#[test]
fn round_trip_through_handles() {
    let (s, h) = load(COORDINATE);
    assert_eq!(s, PsgStatus::Ok);
    unsafe {
        assert_eq!(psg_arrangement_len(h), 3);
        let mut valid = -1;
        assert_eq!(psg_validate(h, &mut valid), PsgStatus::Ok);
        assert_eq!(valid, 1);
        let mut out = ptr::null_mut();
        assert_eq!(psg_covectors_json(h, &mut out), PsgStatus::Ok);
        let cov: Vec<String> = serde_json::from_str(&take(out)).unwrap();
        assert_eq!(cov.len(), 27);
        assert_eq!(psg_chirotope_json(h, &mut out), PsgStatus::Ok);
        assert_eq!(take(out), "[[0,1,2,1]]");
        let (mut frame, mut trace) = (ptr::null_mut(), ptr::null_mut());
        assert_eq!(psg_straighten(h, 6, &mut frame, &mut trace), PsgStatus::Ok);
        let f: serde_json::Value = serde_json::from_str(&take(frame)).unwrap();
        assert_eq!(f["rows"].as_array().unwrap().len(), 3);
        let t: serde_json::Value = serde_json::from_str(&take(trace)).unwrap();
        assert_eq!(t["frames"].as_array().unwrap().len(), 6);
        let mut d = -1.0;
        assert_eq!(psg_weighted_distance(h, h, &mut d), PsgStatus::Ok);
        assert!(d.abs() < 1e-12);
        psg_arrangement_free(h);
    }
}

#[test]
fn errors_carry_status_and_message() {
    let (s, h) = load("{not json");
    assert_eq!(s, PsgStatus::InvalidArgument);
    assert!(h.is_null());
    let msg = unsafe { CStr::from_ptr(psg_last_error_message()) }.to_str().unwrap();
    assert!(msg.contains("JSON"), "{msg}");

    let (s, _) = load(r#"{"n":1,"symmetric":true,"elements":[{"weight":1.0,"vertices":[[3,0,0],[0,1,0],[-1,0,0],[0,-1,0]]}]}"#);
    assert_eq!(s, PsgStatus::InvalidArrangement);

    let pair = r#"{"n":2,"symmetric":true,"elements":[
     {"weight":1.0,"vertices":[[0,1,0],[0,0,1],[0,-1,0],[0,0,-1]]},
     {"weight":1.0,"vertices":[[0,0,1],[1,0,0],[0,0,-1],[-1,0,0]]}]}"#;
    let (s, h) = load(pair);
    assert_eq!(s, PsgStatus::Ok);
    unsafe {
        let mut frame = ptr::null_mut();
        assert_eq!(psg_straighten(h, 20, &mut frame, ptr::null_mut()), PsgStatus::InvalidArrangement);
        assert!(frame.is_null());
        let mut valid = 0;
        assert_eq!(psg_validate(ptr::null(), &mut valid), PsgStatus::InvalidArgument);
        assert_eq!(psg_arrangement_len(ptr::null()), 0);
        let mut d = 0.0;
        let (s3, h3) = load(COORDINATE);
        assert_eq!(s3, PsgStatus::Ok);
        assert_eq!(psg_weighted_distance(h, h3, &mut d), PsgStatus::InvalidArgument);
        psg_arrangement_free(h);
        psg_arrangement_free(h3);
        psg_arrangement_free(ptr::null_mut());
        psg_string_free(ptr::null_mut());
    }
}

#[test]
fn header_compiles_as_c() {
    let header = concat!(env!("CARGO_MANIFEST_DIR"), "/include/pseudogram.h");
    let Ok(status) = std::process::Command::new("cc").args(["-fsyntax-only", "-x", "c", header]).status() else {
        eprintln!("no C compiler; skipping");
        return;
    };
    assert!(status.success());
}
