use std::ffi::{c_char, CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use grhom_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(grhom_last_error()) }.to_string_lossy().into_owned()
}

#[test]
fn koszul_sections_through_handles() {
    unsafe {
        let mut ring = ptr::null_mut();
        assert_eq!(grhom_ring_new(32003, 3, &mut ring), GrhomStatus::Ok);
        let gens = [CString::new("x0^2").unwrap(), CString::new("x0*x1").unwrap()];
        let ptrs: Vec<*const c_char> = gens.iter().map(|s| s.as_ptr()).collect();
        let mut k = ptr::null_mut();
        assert_eq!(grhom_koszul(ring, ptrs.as_ptr(), 2, &mut k), GrhomStatus::Ok);
        let mut o = ptr::null_mut();
        assert_eq!(grhom_line_bundle(ring, 0, &mut o), GrhomStatus::Ok);
        let mut dims = [usize::MAX; 3];
        assert_eq!(grhom_ext_dims(o, k, -1, 1, dims.as_mut_ptr(), 3), GrhomStatus::Ok);
        assert_eq!(dims, [0, 4, 0]);
        assert_eq!(grhom_ext_dims(o, k, -1, 1, dims.as_mut_ptr(), 2), GrhomStatus::BufferTooSmall);
        assert!(last_error().contains("need 3"));

        let mut o2 = ptr::null_mut();
        assert_eq!(grhom_complex_twist(o, 2, &mut o2), GrhomStatus::Ok);
        let mut h0 = 0;
        assert_eq!(grhom_sheaf_cohomology(o2, 0, 0, &mut h0), GrhomStatus::Ok);
        assert_eq!(h0, 6);
        let mut shifted = ptr::null_mut();
        assert_eq!(grhom_complex_shift(o2, 1, &mut shifted), GrhomStatus::Ok);
        assert_eq!(grhom_sheaf_cohomology(shifted, -1, 0, &mut h0), GrhomStatus::Ok);
        assert_eq!(h0, 6);
        assert!(last_error().is_empty());

        for c in [k, o, o2, shifted] {
            grhom_complex_free(c);
        }
        grhom_ring_free(ring);
    }
}

#[test]
fn quotient_ring_and_errors() {
    unsafe {
        let mut ring = ptr::null_mut();
        assert_eq!(grhom_ring_new(32003, 3, &mut ring), GrhomStatus::Ok);
        let bad = CString::new("x0*x1 +").unwrap();
        let mut q = ptr::null_mut();
        assert_eq!(grhom_ring_quotient(ring, &bad.as_ptr(), 1, &mut q), GrhomStatus::Parse);
        assert!(!last_error().is_empty());
        let good = CString::new("x0*x1").unwrap();
        assert_eq!(grhom_ring_quotient(ring, &good.as_ptr(), 1, &mut q), GrhomStatus::Ok);
        assert_eq!(grhom_ring_quotient(ptr::null(), &good.as_ptr(), 1, &mut q), GrhomStatus::NullArgument);
        assert_eq!(grhom_ring_new(32004, 3, &mut q), GrhomStatus::Math);
        let mut dim = 0;
        assert_eq!(grhom_sheaf_cohomology(ptr::null(), 0, 0, &mut dim), GrhomStatus::NullArgument);
        grhom_ring_free(q);
        grhom_ring_free(ring);
        grhom_ring_free(ptr::null_mut());
        grhom_complex_free(ptr::null_mut());
    }
}

#[test]
fn scripts_return_json() {
    unsafe {
        let script = CString::new("ring 32003 [x, y, z];\nprint cohomology(O(2), 0, 0);\n").unwrap();
        let mut json = ptr::null_mut();
        assert_eq!(grhom_run_script(script.as_ptr(), 0, &mut json), GrhomStatus::Ok);
        let text = CStr::from_ptr(json).to_str().unwrap().to_owned();
        grhom_string_free(json);
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["results"][0]["result"]["dim"], 6);
        assert_eq!(v["ring"]["prime"], 32003);

        let bad = CString::new("ring 5 [x];\nprint y;").unwrap();
        assert_eq!(grhom_run_script(bad.as_ptr(), 0, &mut json), GrhomStatus::Script);
        let broken = CString::new("ring 5 [x").unwrap();
        assert_eq!(grhom_run_script(broken.as_ptr(), 0, &mut json), GrhomStatus::Parse);
        let invalid = [0xffu8, 0];
        assert_eq!(grhom_run_script(invalid.as_ptr() as *const c_char, 0, &mut json), GrhomStatus::InvalidUtf8);
    }
}

const C_PROGRAM: &str = r#"
#include <stdio.h>
#include "grhom.h"

int main(void) {
    GrhomRing *ring = NULL;
    GrhomComplex *o = NULL;
    size_t dim = 0;
    if (grhom_ring_new(32003, 4, &ring) != GRHOM_STATUS_OK) return 1;
    if (grhom_line_bundle(ring, 1, &o) != GRHOM_STATUS_OK) return 2;
    if (grhom_sheaf_cohomology(o, 0, 0, &dim) != GRHOM_STATUS_OK) return 3;
    if (grhom_sheaf_cohomology(NULL, 0, 0, &dim) != GRHOM_STATUS_NULL_ARGUMENT) return 4;
    printf("%zu\n", dim);
    grhom_complex_free(o);
    grhom_ring_free(ring);
    return 0;
}
"#;

#[test]
fn header_compiles_and_links_from_c() {
    let Ok(cc) = which_cc() else {
        eprintln!("no C compiler found, skipping");
        return;
    };
    let crate_dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().and_then(|d| d.parent()).unwrap();
    let lib = profile_dir.join("libgrhom_ffi.a");
    if !lib.exists() {
        eprintln!("{} not built, skipping", lib.display());
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("main.c");
    let bin = dir.path().join("main");
    std::fs::write(&src, C_PROGRAM).unwrap();
    let status = Command::new(cc)
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(crate_dir.join("include"))
        .arg(&src)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success());
    let out = Command::new(&bin).output().unwrap();
    assert!(out.status.success(), "exit {:?}", out.status.code());
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "4");
}

fn which_cc() -> Result<&'static str, ()> {
    ["cc", "gcc", "clang"]
        .into_iter()
        .find(|c| Command::new(c).arg("--version").output().is_ok_and(|o| o.status.success()))
        .ok_or(())
}
