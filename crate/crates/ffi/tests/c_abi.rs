use std::ffi::{CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use treegame_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(tg_last_error()) }
        .to_string_lossy()
        .into_owned()
}

fn take_string(p: *mut std::ffi::c_char) -> String {
    let s = unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned();
    unsafe { tg_string_free(p) };
    s
}

#[test]
fn tree_handle_lifecycle() {
    unsafe {
        let mut t = ptr::null_mut();
        assert_eq!(tg_tree_new(&mut t), TgStatus::Ok);
        assert_eq!(tg_tree_attach(t, 0, 2, 3), TgStatus::Ok);
        let (mut n, mut h) = (0, 0);
        assert_eq!(tg_tree_len(t, &mut n), TgStatus::Ok);
        assert_eq!(tg_tree_height(t, &mut h), TgStatus::Ok);
        assert_eq!((n, h), (6, 3));

        assert_eq!(tg_tree_attach(t, 99, 1, 0), TgStatus::InvalidArgument);
        assert!(last_error().contains("99"));

        let mut json = ptr::null_mut();
        assert_eq!(tg_tree_to_json(t, &mut json), TgStatus::Ok);
        let json = take_string(json);
        assert_eq!(json, "{\"n\":6,\"parent\":[null,0,1,2,2,2]}\n");

        let c = CString::new(json).unwrap();
        let mut back = ptr::null_mut();
        assert_eq!(tg_tree_from_json(c.as_ptr(), &mut back), TgStatus::Ok);
        tg_tree_free(back);
        tg_tree_free(t);
    }
}

#[test]
fn null_and_parse_errors() {
    unsafe {
        let mut n = 0;
        assert_eq!(tg_tree_len(ptr::null(), &mut n), TgStatus::NullPointer);
        let bad = CString::new("{\"n\":2,\"parent\":[null]}").unwrap();
        let mut t = ptr::null_mut();
        assert_eq!(tg_tree_from_json(bad.as_ptr(), &mut t), TgStatus::Parse);
        assert!(t.is_null());
        let mut k = 0;
        assert_eq!(tg_max_team_size(100, 1, 3, &mut k), TgStatus::Infeasible);
        assert_eq!(tg_max_team_size(65536, 1, 4, &mut k), TgStatus::Ok);
        assert_eq!(k, 5878);
        assert_eq!(last_error(), "");
        tg_tree_free(ptr::null_mut());
        tg_run_free(ptr::null_mut());
        tg_string_free(ptr::null_mut());
    }
}

#[test]
fn lemma_run_and_verify() {
    let name = CString::new("phase_bfs").unwrap();
    let cfg = TgLemmaConfig {
        n: 4096,
        segment: 1,
        m: 3,
        k: 4096,
        mode: TgMode::Repaired,
        explorer: name.as_ptr(),
        cap: 1000,
        idle_rounds: 0,
        local_view: false,
    };
    unsafe {
        let mut run = ptr::null_mut();
        assert_eq!(tg_run_lemma(&cfg, &mut run), TgStatus::Ok, "{}", last_error());
        let (mut fin, mut rounds, mut verts, mut height) = (false, 0, 0, 0);
        assert_eq!(
            tg_run_outcome(run, &mut fin, &mut rounds, &mut verts, &mut height),
            TgStatus::Ok
        );
        assert!(rounds >= 3);
        assert_eq!(height, 3);

        let (mut passed, mut failed) = (0, 0);
        let mut report = ptr::null_mut();
        assert_eq!(tg_run_verify(run, &mut passed, &mut failed, &mut report), TgStatus::Ok);
        assert_eq!(failed, 0);
        assert!(take_string(report).contains("\"claim1\""));

        let mut tj = ptr::null_mut();
        assert_eq!(tg_run_transcript_json(run, &mut tj), TgStatus::Ok);
        assert!(take_string(tj).starts_with("{\"params\""));
        tg_run_free(run);
    }
}

#[test]
fn fixed_run_and_bounds() {
    let tree_json = CString::new("{\"n\":5,\"parent\":[null,0,0,0,0]}").unwrap();
    let name = CString::new("single_dfs").unwrap();
    let bogus = CString::new("dfs").unwrap();
    unsafe {
        let mut t = ptr::null_mut();
        assert_eq!(tg_tree_from_json(tree_json.as_ptr(), &mut t), TgStatus::Ok);
        let mut run = ptr::null_mut();
        assert_eq!(
            tg_run_fixed(t, bogus.as_ptr(), 1, 0, &mut run),
            TgStatus::InvalidArgument
        );
        assert_eq!(tg_run_fixed(t, name.as_ptr(), 1, 0, &mut run), TgStatus::Ok);
        let (mut fin, mut rounds, mut verts, mut height) = (false, 0, 0, 0);
        tg_run_outcome(run, &mut fin, &mut rounds, &mut verts, &mut height);
        assert!(fin);
        assert_eq!(rounds, 7);
        let (mut p, mut f) = (0, 0);
        assert_eq!(
            tg_run_verify(run, &mut p, &mut f, ptr::null_mut()),
            TgStatus::InvalidArgument
        );

        let mut json = ptr::null_mut();
        assert_eq!(
            tg_offline_bounds(t, 1, true, i64::from(rounds), &mut json),
            TgStatus::Ok
        );
        let v: serde_json::Value = serde_json::from_str(&take_string(json)).unwrap();
        assert_eq!(v["brute_opt"], 7);
        assert_eq!(v["ratio_lb"]["num"], 1);
        assert_eq!(tg_offline_bounds(t, 0, false, -1, &mut json), TgStatus::InvalidArgument);
        tg_run_free(run);
        tg_tree_free(t);
    }
}

fn crate_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

fn artifact_dir() -> PathBuf {
    // target/<profile>/deps/<test binary>
    let exe = std::env::current_exe().unwrap();
    exe.parent().and_then(Path::parent).unwrap().to_path_buf()
}

#[test]
fn header_compiles_and_links() {
    let dir = tempfile::tempdir().unwrap();
    let include = crate_dir().join("include");
    let source = crate_dir().join("tests/c/smoke.c");
    let lib = artifact_dir().join("libtreegame_ffi.a");
    assert!(lib.exists(), "static library missing at {}", lib.display());

    let syntax = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Wextra", "-Werror", "-fsyntax-only", "-I"])
        .arg(&include)
        .arg(&source)
        .status()
        .expect("cc available");
    assert!(syntax.success());

    let exe = dir.path().join("smoke");
    let link = Command::new("cc")
        .args(["-std=c99", "-O1", "-I"])
        .arg(&include)
        .arg(&source)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(link.success());
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("ok "));
}
