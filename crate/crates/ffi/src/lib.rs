//! C ABI for the tree exploration game.
//!
//! Every function returns a [`TgStatus`]; on failure the message is available
//! from [`tg_last_error`] on the same thread. Handles are opaque and must be
//! released with their `_free` function. Strings returned through `char **`
//! are owned by the caller and released with [`tg_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use treegame::error::{Error, GameError, ParamsError, TreeError, VerifyError};
use treegame::game::{default_cap, play, GameRun, PlayConfig, ViewMode};
use treegame::offline::bounds_report;
use treegame::revealer::{self, derive_params, FixedTreeRevealer, GadgetMode, LemmaParams, LemmaRevealer};
use treegame::tree::{RootedTree, VertexId};
use treegame::verify::verify_lemma_run;
use treegame::ExplorerKind;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TgStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Infeasible = 3,
    GameError = 4,
    Integrity = 5,
    Parse = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TgMode {
    Repaired = 0,
    Strict = 1,
}

/// Opaque rooted tree.
pub struct TgTree {
    tree: RootedTree,
}

/// Opaque finished game.
pub struct TgRun {
    run: GameRun,
    params: Option<LemmaParams>,
}

/// Settings for [`tg_run_lemma`]. Zero `cap` or `idle_rounds` picks the default.
#[repr(C)]
pub struct TgLemmaConfig {
    pub n: u64,
    pub segment: u32,
    pub m: u32,
    pub k: u32,
    pub mode: TgMode,
    /// Explorer name, e.g. `"greedy_frontier"`.
    pub explorer: *const c_char,
    pub cap: u32,
    pub idle_rounds: u32,
    pub local_view: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

struct Failure(TgStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::Params(_) | Error::Verify(VerifyError::Params(_)) => TgStatus::Infeasible,
            Error::Verify(VerifyError::Integrity(_)) => TgStatus::Integrity,
            Error::Tree(TreeError::Parse { .. }) | Error::Json(_) => TgStatus::Parse,
            Error::Tree(_) | Error::Usage(_) => TgStatus::InvalidArgument,
            _ => TgStatus::GameError,
        };
        Failure(status, e.to_string())
    }
}

macro_rules! impl_failure_from {
    ($($t:ty),*) => {$(
        impl From<$t> for Failure {
            fn from(e: $t) -> Self {
                Error::from(e).into()
            }
        }
    )*};
}
impl_failure_from!(TreeError, GameError, ParamsError, VerifyError);

fn invalid(msg: impl Into<String>) -> Failure {
    Failure(TgStatus::InvalidArgument, msg.into())
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

/// Runs `f`, records any error or panic, and maps it to a status.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> TgStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error(String::new());
            TgStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(_) => {
            set_last_error("internal panic".into());
            TgStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T) -> Result<&'a T, Failure> {
    p.as_ref().ok_or(Failure(TgStatus::NullPointer, "null handle".into()))
}

unsafe fn out<'a, T>(p: *mut T) -> Result<&'a mut T, Failure> {
    p.as_mut()
        .ok_or(Failure(TgStatus::NullPointer, "null output pointer".into()))
}

unsafe fn read_str<'a>(p: *const c_char) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure(TgStatus::NullPointer, "null string".into()));
    }
    CStr::from_ptr(p).to_str().map_err(|_| invalid("string is not UTF-8"))
}

fn to_c_string(bytes: Vec<u8>) -> Result<*mut c_char, Failure> {
    let s = CString::new(bytes).map_err(|_| invalid("output contains NUL"))?;
    Ok(s.into_raw())
}

/// Message of the last failed call on this thread; empty after a success.
/// Valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn tg_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// # Safety
/// `s` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn tg_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Single-vertex tree.
///
/// # Safety
/// `out_tree` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tg_tree_new(out_tree: *mut *mut TgTree) -> TgStatus {
    guard(|| {
        *out(out_tree)? = Box::into_raw(Box::new(TgTree {
            tree: RootedTree::new(),
        }));
        Ok(())
    })
}

/// Parses `{"n": .., "parent": [null, ..]}`.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out_tree` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tg_tree_from_json(json: *const c_char, out_tree: *mut *mut TgTree) -> TgStatus {
    guard(|| {
        let slot = out(out_tree)?;
        let tree = RootedTree::decode(read_str(json)?.as_bytes())?;
        *slot = Box::into_raw(Box::new(TgTree { tree }));
        Ok(())
    })
}

/// Attaches a path of `path_len` edges ending in `leaves` leaves at vertex `at`.
///
/// # Safety
/// `tree` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn tg_tree_attach(tree: *mut TgTree, at: u32, path_len: u32, leaves: u32) -> TgStatus {
    guard(|| {
        let t = out(tree)?;
        t.tree.attach_path_with_star(VertexId(at), path_len, leaves)?;
        Ok(())
    })
}

/// # Safety
/// `tree` must be a live handle; `out_len` writable.
#[no_mangle]
pub unsafe extern "C" fn tg_tree_len(tree: *const TgTree, out_len: *mut u32) -> TgStatus {
    guard(|| {
        *out(out_len)? = deref(tree)?.tree.len() as u32;
        Ok(())
    })
}

/// # Safety
/// `tree` must be a live handle; `out_height` writable.
#[no_mangle]
pub unsafe extern "C" fn tg_tree_height(tree: *const TgTree, out_height: *mut u32) -> TgStatus {
    guard(|| {
        *out(out_height)? = deref(tree)?.tree.height();
        Ok(())
    })
}

/// # Safety
/// `tree` must be a live handle; `out_json` writable.
#[no_mangle]
pub unsafe extern "C" fn tg_tree_to_json(tree: *const TgTree, out_json: *mut *mut c_char) -> TgStatus {
    guard(|| {
        let slot = out(out_json)?;
        *slot = to_c_string(deref(tree)?.tree.encode())?;
        Ok(())
    })
}

/// # Safety
/// `tree` must come from this library or be null; it is invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn tg_tree_free(tree: *mut TgTree) {
    if !tree.is_null() {
        drop(Box::from_raw(tree));
    }
}

/// Largest `k` the lower-bound construction supports for `(n, L, m)`.
///
/// # Safety
/// `out_k` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tg_max_team_size(n: u64, segment: u32, m: u32, out_k: *mut u64) -> TgStatus {
    guard(|| {
        let slot = out(out_k)?;
        *slot = revealer::max_team_size(n, segment, m)?;
        Ok(())
    })
}

fn explorer_kind(name: &str) -> Result<ExplorerKind, Failure> {
    name.parse().map_err(invalid)
}

/// Plays one game against the lemma revealer.
///
/// # Safety
/// `config` must point to a valid config whose `explorer` is a
/// NUL-terminated string; `out_run` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tg_run_lemma(config: *const TgLemmaConfig, out_run: *mut *mut TgRun) -> TgStatus {
    guard(|| {
        let c = deref(config)?;
        let slot = out(out_run)?;
        let kind = explorer_kind(read_str(c.explorer)?)?;
        let mode = match c.mode {
            TgMode::Repaired => GadgetMode::Repaired,
            TgMode::Strict => GadgetMode::Strict,
        };
        let params = derive_params(c.n, c.segment, c.m, c.k, mode)?;
        let cap = match c.cap {
            0 => default_cap(params.branch_count() * u64::from(c.segment) + 1, u64::from(c.segment)),
            cap => cap,
        };
        let idle = match c.idle_rounds {
            0 => params.checkpoints.first().copied().unwrap_or(c.segment),
            r => r,
        };
        let mut explorer = kind.build(idle);
        let mut rev = LemmaRevealer::new(params.clone())?;
        let view = if c.local_view { ViewMode::Local } else { ViewMode::Game };
        let run = play(explorer.as_mut(), &mut rev, PlayConfig { k: c.k, cap, view })?;
        *slot = Box::into_raw(Box::new(TgRun {
            run,
            params: Some(params),
        }));
        Ok(())
    })
}

/// Plays one game on a fixed tree. Zero `cap` picks the default.
///
/// # Safety
/// `tree` must be a live handle, `explorer` a NUL-terminated string and
/// `out_run` writable.
#[no_mangle]
pub unsafe extern "C" fn tg_run_fixed(
    tree: *const TgTree,
    explorer: *const c_char,
    k: u32,
    cap: u32,
    out_run: *mut *mut TgRun,
) -> TgStatus {
    guard(|| {
        let t = &deref(tree)?.tree;
        let slot = out(out_run)?;
        let kind = explorer_kind(read_str(explorer)?)?;
        let cap = match cap {
            0 => default_cap(t.len() as u64, u64::from(t.height())),
            c => c,
        };
        let mut e = kind.build(0);
        let mut rev = FixedTreeRevealer::new(t.clone());
        let run = play(
            e.as_mut(),
            &mut rev,
            PlayConfig {
                k,
                cap,
                view: ViewMode::Game,
            },
        )?;
        *slot = Box::into_raw(Box::new(TgRun { run, params: None }));
        Ok(())
    })
}

/// # Safety
/// `run` must be a live handle; the outputs writable.
#[no_mangle]
pub unsafe extern "C" fn tg_run_outcome(
    run: *const TgRun,
    finished: *mut bool,
    final_round: *mut u32,
    vertices: *mut u32,
    height: *mut u32,
) -> TgStatus {
    guard(|| {
        let o = &deref(run)?.run.transcript.outcome;
        *out(finished)? = o.finished;
        *out(final_round)? = o.final_round;
        *out(vertices)? = o.n;
        *out(height)? = o.height;
        Ok(())
    })
}

/// # Safety
/// `run` must be a live handle; `out_json` writable.
#[no_mangle]
pub unsafe extern "C" fn tg_run_transcript_json(run: *const TgRun, out_json: *mut *mut c_char) -> TgStatus {
    guard(|| {
        let slot = out(out_json)?;
        *slot = to_c_string(deref(run)?.run.transcript.to_json())?;
        Ok(())
    })
}

/// Final tree of the game as a new handle.
///
/// # Safety
/// `run` must be a live handle; `out_tree` writable.
#[no_mangle]
pub unsafe extern "C" fn tg_run_tree(run: *const TgRun, out_tree: *mut *mut TgTree) -> TgStatus {
    guard(|| {
        let slot = out(out_tree)?;
        let tree = deref(run)?.run.state.tree().clone();
        *slot = Box::into_raw(Box::new(TgTree { tree }));
        Ok(())
    })
}

/// Replays a lemma game and counts passed and failed checks. `out_report`
/// may be null; otherwise it receives the report as JSON.
///
/// # Safety
/// `run` must be a live handle; `passed` and `failed` writable.
#[no_mangle]
pub unsafe extern "C" fn tg_run_verify(
    run: *const TgRun,
    passed: *mut u32,
    failed: *mut u32,
    out_report: *mut *mut c_char,
) -> TgStatus {
    guard(|| {
        let r = deref(run)?;
        let params = r.params.as_ref().ok_or_else(|| invalid("not a lemma game"))?;
        let report = verify_lemma_run(&r.run.transcript, params)?;
        *out(passed)? = report.passed;
        *out(failed)? = report.failed;
        if let Some(slot) = out_report.as_mut() {
            *slot = to_c_string(report.to_json())?;
        }
        Ok(())
    })
}

/// # Safety
/// `run` must come from this library or be null; it is invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn tg_run_free(run: *mut TgRun) {
    if !run.is_null() {
        drop(Box::from_raw(run));
    }
}

/// Offline bounds for `tree` with `k` agents as JSON. `online_rounds` < 0
/// means no online run to compare.
///
/// # Safety
/// `tree` must be a live handle; `out_json` writable.
#[no_mangle]
pub unsafe extern "C" fn tg_offline_bounds(
    tree: *const TgTree,
    k: u32,
    brute: bool,
    online_rounds: i64,
    out_json: *mut *mut c_char,
) -> TgStatus {
    guard(|| {
        let t = &deref(tree)?.tree;
        let slot = out(out_json)?;
        if k == 0 {
            return Err(invalid("k must be at least 1"));
        }
        let online = u32::try_from(online_rounds).ok();
        *slot = to_c_string(bounds_report(t, k as usize, online, brute).to_json())?;
        Ok(())
    })
}
