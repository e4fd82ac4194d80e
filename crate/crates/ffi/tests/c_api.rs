//! Drives the library through its exported symbols, the way C callers do.

use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use qeuler_ffi::*;

fn take(s: *mut std::ffi::c_char) -> String {
    assert!(!s.is_null());
    let out = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_string();
    unsafe { qe_string_free(s) };
    out
}

fn context(p: u64, k: i64) -> *mut QeContext {
    let mut ctx = ptr::null_mut();
    let st = unsafe { qe_context_new(p, ptr::null(), k, &mut ctx) };
    assert_eq!(st, QeStatus::Ok);
    ctx
}

#[test]
fn euler_numbers_through_the_abi() {
    let ctx = context(3, 4);
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { qe_euler_number(ctx, 2, &mut s) }, QeStatus::Ok);
    assert_eq!(take(s), "(-q + q^2)/(1 + 2*q + q^2)");
    let one = CString::new("1").unwrap();
    for (n, want) in [(0, "1"), (1, "-1/2"), (2, "0"), (3, "1/4")] {
        assert_eq!(unsafe { qe_euler_number_at(ctx, n, one.as_ptr(), &mut s) }, QeStatus::Ok);
        assert_eq!(take(s), want);
    }
    let pole = CString::new("-1").unwrap();
    assert_eq!(
        unsafe { qe_euler_number_at(ctx, 1, pole.as_ptr(), &mut s) },
        QeStatus::DivisionByZero
    );
    assert!(take(qe_last_error_message()).contains("pole"));
    unsafe { qe_context_free(ctx) };
}

#[test]
fn bad_arguments_map_to_codes() {
    let mut ctx = ptr::null_mut();
    assert_eq!(unsafe { qe_context_new(4, ptr::null(), 4, &mut ctx) }, QeStatus::Domain);
    assert_eq!(unsafe { qe_context_new(3, ptr::null(), 0, &mut ctx) }, QeStatus::Domain);
    let bad_q = CString::new("2").unwrap();
    assert_eq!(unsafe { qe_context_new(3, bad_q.as_ptr(), 4, &mut ctx) }, QeStatus::Domain);
    assert_eq!(unsafe { qe_context_new(3, ptr::null(), 4, ptr::null_mut()) }, QeStatus::NullPointer);

    let mut v = QeVerdict::Fails;
    let id = CString::new("THM1").unwrap();
    assert_eq!(
        unsafe { qe_verify(ptr::null(), id.as_ptr(), 1, 1, &mut v, ptr::null_mut()) },
        QeStatus::NullPointer
    );
    let ctx = context(3, 4);
    assert_eq!(
        unsafe { qe_verify(ctx, id.as_ptr(), 0, 1, &mut v, ptr::null_mut()) },
        QeStatus::Domain
    );
    assert_eq!(unsafe { qe_report_blocking_failures(ptr::null()) }, -1);
    unsafe {
        qe_report_free(ptr::null_mut());
        qe_context_free(ptr::null_mut());
        qe_string_free(ptr::null_mut());
        qe_context_free(ctx);
    }
}

#[test]
fn verification_and_grid() {
    let ctx = context(3, 4);
    let mut v = QeVerdict::Fails;
    let mut oracles = false;
    let thm6 = CString::new("THM6").unwrap();
    assert_eq!(unsafe { qe_verify(ctx, thm6.as_ptr(), 1, 1, &mut v, &mut oracles) }, QeStatus::Ok);
    assert_eq!(v, QeVerdict::HoldsToPrecision);
    assert!(oracles);

    let printed = CString::new("THM3_PRINTED").unwrap();
    let mut report = ptr::null_mut();
    assert_eq!(
        unsafe { qe_verify_grid(ctx, printed.as_ptr(), 1, 2, 0, 0, &mut report) },
        QeStatus::Ok
    );
    assert_eq!(unsafe { qe_report_blocking_failures(report) }, 0);
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { qe_report_json(report, &mut s) }, QeStatus::Ok);
    let json = take(s);
    assert!(json.contains("\"schema\": \"qeuler-report/1\""));
    assert!(json.contains("\"verdict\": \"fails\""));
    unsafe { qe_report_free(report) };
    unsafe { qe_context_free(ctx) };
}

#[test]
fn integrals_report_honest_precision() {
    let ctx = context(3, 6);
    let mut s = ptr::null_mut();
    let mut achieved = 0;
    let st = unsafe { qe_integrate(ctx, QeMeasure::Fermionic, 1, ptr::null(), &mut s, &mut achieved) };
    assert_eq!(st, QeStatus::Ok);
    assert_eq!(achieved, 6);
    // -4/5 modulo 3^6
    let v: i64 = take(s).parse().unwrap();
    assert_eq!((v * 5 + 4).rem_euclid(729), 0);
    unsafe { qe_context_free(ctx) };
}

fn header() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include")
}

fn compiler() -> Option<String> {
    ["cc", "clang", "gcc"]
        .into_iter()
        .find(|c| Command::new(c).arg("--version").output().is_ok())
        .map(String::from)
}

#[test]
fn header_declares_the_surface() {
    let text = std::fs::read_to_string(header().join("qeuler.h")).unwrap();
    for sym in [
        "qe_context_new",
        "qe_context_free",
        "qe_euler_number",
        "qe_euler_number_at",
        "qe_verify",
        "qe_verify_grid",
        "qe_report_json",
        "qe_report_free",
        "qe_integrate",
        "qe_string_free",
        "qe_last_error_message",
        "QE_STATUS_NOT_CONVERGED",
    ] {
        assert!(text.contains(sym), "header lacks {sym}");
    }
}

#[test]
fn c_program_compiles_and_runs() {
    let Some(cc) = compiler() else {
        eprintln!("no C compiler found; skipping");
        return;
    };
    let src = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests").join("smoke.c");
    let check = Command::new(&cc)
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(header())
        .arg(&src)
        .output()
        .unwrap();
    assert!(check.status.success(), "{}", String::from_utf8_lossy(&check.stderr));

    // Link against the shared library when cargo has produced it next to this test.
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().and_then(|d| d.parent()).unwrap().to_path_buf();
    if !profile_dir.join("libqeuler_ffi.so").exists() {
        eprintln!("libqeuler_ffi.so not built; compile-checked only");
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let bin = dir.path().join("smoke");
    let link = Command::new(&cc)
        .args(["-std=c99", "-I"])
        .arg(header())
        .arg(&src)
        .arg("-L")
        .arg(&profile_dir)
        .arg(format!("-Wl,-rpath,{}", profile_dir.display()))
        .args(["-lqeuler_ffi", "-o"])
        .arg(&bin)
        .output()
        .unwrap();
    assert!(link.status.success(), "{}", String::from_utf8_lossy(&link.stderr));
    let run = Command::new(&bin).output().unwrap();
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    assert_eq!(String::from_utf8_lossy(&run.stdout).trim(), "ok");
}
