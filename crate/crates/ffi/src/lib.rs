//! C ABI over the checker and the game simulation.
//!
//! Every fallible function returns a [`PpStatus`]; on failure a message is available from
//! [`pp_last_error`] on the same thread. Handles are opaque and must be released with
//! their `_free` function. Strings returned through `char **out` are owned by the caller
//! and released with [`pp_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use prepost::check::{check_specs, CheckConfig, CheckReport};
use prepost::dsl::{parse_checked, spec_to_doc, Specification};
use prepost::game::{new_session, write_log, Board, GameConfig, GameState, Phase, TowerKind};
use prepost::verdict::Overall;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PpStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    InvalidConfig = 4,
    CheckError = 5,
    GameError = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PpOverall {
    Equivalent = 0,
    NotEquivalent = 1,
    Undetermined = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PpTowerKind {
    Zapper = 0,
    Splash = 1,
    Slower = 2,
}

/// A parsed and typechecked specification.
pub struct PpSpec {
    spec: Specification,
}

/// The result of comparing two specifications, including the blob plan.
pub struct PpVerdict {
    report: CheckReport,
}

/// A game session.
pub struct PpGame {
    state: GameState,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

struct Fail(PpStatus, String);

fn fail(status: PpStatus, msg: impl std::fmt::Display) -> Fail {
    Fail(status, msg.to_string())
}

/// Runs `f`, converting errors and panics into a status code plus a last-error message.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> PpStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            PpStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            PpStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, name: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(fail(PpStatus::NullArgument, format!("`{name}` is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|_| fail(PpStatus::InvalidUtf8, format!("`{name}` is not UTF-8")))
}

unsafe fn opt_str_arg<'a>(p: *const c_char, name: &str) -> Result<Option<&'a str>, Fail> {
    if p.is_null() {
        Ok(None)
    } else {
        str_arg(p, name).map(Some)
    }
}

unsafe fn ref_arg<'a, T>(p: *const T, name: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| fail(PpStatus::NullArgument, format!("`{name}` is null")))
}

unsafe fn mut_arg<'a, T>(p: *mut T, name: &str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(|| fail(PpStatus::NullArgument, format!("`{name}` is null")))
}

unsafe fn put<T>(out: *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(fail(PpStatus::NullArgument, "`out` is null"));
    }
    out.write(value);
    Ok(())
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), Fail> {
    let c = CString::new(s).map_err(|e| fail(PpStatus::InvalidUtf8, e))?;
    put(out, c.into_raw())
}

/// Message for the last failed call on this thread, or null. Valid until the next call.
#[no_mangle]
pub extern "C" fn pp_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pp_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses and typechecks DSL text.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pp_spec_parse(text: *const c_char, out: *mut *mut PpSpec) -> PpStatus {
    guard(|| {
        let text = str_arg(text, "text")?;
        let spec = parse_checked(text).map_err(|d| fail(PpStatus::ParseError, d))?;
        put(out, Box::into_raw(Box::new(PpSpec { spec })))
    })
}

/// The specification as a JSON AST document.
///
/// # Safety
/// `spec` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pp_spec_to_json(spec: *const PpSpec, out: *mut *mut c_char) -> PpStatus {
    guard(|| {
        let spec = ref_arg(spec, "spec")?;
        put_string(out, spec_to_doc(&spec.spec).to_string())
    })
}

/// # Safety
/// `spec` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pp_spec_free(spec: *mut PpSpec) {
    if !spec.is_null() {
        drop(Box::from_raw(spec));
    }
}

/// Compares `student` with `model`. `config_json` is a check configuration object
/// (camelCase keys) or null for defaults.
///
/// # Safety
/// Handles must be live; `config_json` null or NUL-terminated; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pp_check(
    model: *const PpSpec,
    student: *const PpSpec,
    config_json: *const c_char,
    out: *mut *mut PpVerdict,
) -> PpStatus {
    guard(|| {
        let model = ref_arg(model, "model")?;
        let student = ref_arg(student, "student")?;
        let cfg: CheckConfig = match opt_str_arg(config_json, "config_json")? {
            Some(s) => serde_json::from_str(s).map_err(|e| fail(PpStatus::InvalidConfig, e))?,
            None => CheckConfig::default(),
        };
        cfg.eval.validate().map_err(|e| fail(PpStatus::InvalidConfig, e))?;
        let report = check_specs(&model.spec, &student.spec, &cfg).map_err(|e| fail(PpStatus::CheckError, e))?;
        put(out, Box::into_raw(Box::new(PpVerdict { report })))
    })
}

/// # Safety
/// `verdict` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pp_verdict_overall(verdict: *const PpVerdict, out: *mut PpOverall) -> PpStatus {
    guard(|| {
        let v = ref_arg(verdict, "verdict")?;
        let overall = match v.report.verdict.overall {
            Overall::Equivalent => PpOverall::Equivalent,
            Overall::NotEquivalent => PpOverall::NotEquivalent,
            Overall::Undetermined => PpOverall::Undetermined,
        };
        put(out, overall)
    })
}

/// The full check report (verdict and blob plan) as JSON.
///
/// # Safety
/// `verdict` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pp_verdict_to_json(verdict: *const PpVerdict, out: *mut *mut c_char) -> PpStatus {
    guard(|| {
        let v = ref_arg(verdict, "verdict")?;
        put_string(out, serde_json::to_string(&v.report).map_err(|e| fail(PpStatus::CheckError, e))?)
    })
}

/// # Safety
/// `verdict` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pp_verdict_free(verdict: *mut PpVerdict) {
    if !verdict.is_null() {
        drop(Box::from_raw(verdict));
    }
}

/// Starts a game on the standard board from the verdict's blob plan. `config_json` is a
/// game configuration object or null for defaults.
///
/// # Safety
/// `verdict` must be a live handle; `config_json` null or NUL-terminated; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pp_game_new(
    verdict: *const PpVerdict,
    config_json: *const c_char,
    seed: u64,
    out: *mut *mut PpGame,
) -> PpStatus {
    guard(|| {
        let v = ref_arg(verdict, "verdict")?;
        let cfg: GameConfig = match opt_str_arg(config_json, "config_json")? {
            Some(s) => serde_json::from_str(s).map_err(|e| fail(PpStatus::InvalidConfig, e))?,
            None => GameConfig::default(),
        };
        let state = new_session(v.report.plan.clone(), Board::standard(), cfg, seed).map_err(|e| fail(PpStatus::GameError, e))?;
        put(out, Box::into_raw(Box::new(PpGame { state })))
    })
}

/// # Safety
/// `game` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn pp_game_place_tower(game: *mut PpGame, kind: PpTowerKind, col: i32, row: i32) -> PpStatus {
    guard(|| {
        let g = mut_arg(game, "game")?;
        let kind = match kind {
            PpTowerKind::Zapper => TowerKind::Zapper,
            PpTowerKind::Splash => TowerKind::Splash,
            PpTowerKind::Slower => TowerKind::Slower,
        };
        g.state.place_tower(kind, (col, row)).map(|_| ()).map_err(|e| fail(PpStatus::GameError, e))
    })
}

/// # Safety
/// `game` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn pp_game_start_wave(game: *mut PpGame) -> PpStatus {
    guard(|| {
        let g = mut_arg(game, "game")?;
        g.state.start_wave().map_err(|e| fail(PpStatus::GameError, e))
    })
}

/// Advances up to `ticks` ticks (0 runs to the end) and reports whether the game ended.
///
/// # Safety
/// `game` must be a live handle; `ended` null or writable.
#[no_mangle]
pub unsafe extern "C" fn pp_game_tick(game: *mut PpGame, ticks: u32, ended: *mut bool) -> PpStatus {
    guard(|| {
        let g = mut_arg(game, "game")?;
        if ticks == 0 {
            g.state.run_to_end();
        } else {
            for _ in 0..ticks {
                g.state.tick();
            }
        }
        if !ended.is_null() {
            ended.write(g.state.phase == Phase::Ended);
        }
        Ok(())
    })
}

/// # Safety
/// `game` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pp_game_snapshot_json(game: *const PpGame, out: *mut *mut c_char) -> PpStatus {
    guard(|| {
        let g = ref_arg(game, "game")?;
        put_string(out, serde_json::to_string(&g.state.snapshot()).map_err(|e| fail(PpStatus::GameError, e))?)
    })
}

/// # Safety
/// `game` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pp_game_score_json(game: *const PpGame, out: *mut *mut c_char) -> PpStatus {
    guard(|| {
        let g = ref_arg(game, "game")?;
        put_string(out, serde_json::to_string(&g.state.final_score()).map_err(|e| fail(PpStatus::GameError, e))?)
    })
}

/// The session's action log in JSON-lines form, replayable with `prepost replay`.
///
/// # Safety
/// `game` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pp_game_log(game: *const PpGame, out: *mut *mut c_char) -> PpStatus {
    guard(|| {
        let g = ref_arg(game, "game")?;
        put_string(out, write_log(&g.state))
    })
}

/// # Safety
/// `game` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pp_game_free(game: *mut PpGame) {
    if !game.is_null() {
        drop(Box::from_raw(game));
    }
}
