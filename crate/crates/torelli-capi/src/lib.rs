//! C ABI for the `torelli` crate.
//!
//! Conventions:
//! - Handles are opaque pointers created and destroyed by this library.
//! - Structured data crosses the boundary as JSON strings in the same
//!   schemas the `torelli` command-line tool uses.
//! - Every function returns a `TorelliStatus`; results are written to out
//!   parameters. `torelli_last_error_message` describes the most recent
//!   failure on the calling thread.
//! - Strings returned through out parameters are owned by the caller and
//!   must be released with `torelli_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::ptr;

use torelli::contraction::{
    contract_via_rank_reduction, genus2_contract, verify_trace, ContractError, PathInComplex,
    SearchOpts, TraceJson,
};
use torelli::isocomplex::Line;
use torelli::mapclass::{acts_trivially, TwistWord, WordJson};
use torelli::psurface::{build_h1p, H1PModule, PartitionedSurface};

/// Result code of every API call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TorelliStatus {
    /// The call succeeded.
    TorelliOk = 0,
    /// A required pointer argument was null.
    TorelliNullPointer = 1,
    /// A string argument was not valid UTF-8.
    TorelliInvalidUtf8 = 2,
    /// The input was rejected; see `torelli_last_error_message`.
    TorelliInvalidInput = 3,
    /// A search-based routine gave up within its budget.
    TorelliSearchExhausted = 4,
}

use TorelliStatus::*;

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: impl std::fmt::Display) {
    let text = CString::new(message.to_string().replace('\0', " "))
        .unwrap_or_else(|_| CString::new("error message unavailable").unwrap());
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(text));
}

/// Message describing the most recent failure on this thread, or null if
/// no call has failed yet. The pointer stays valid until the next failing
/// call on the same thread; do not free it.
#[no_mangle]
pub extern "C" fn torelli_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| match &*slot.borrow() {
        Some(text) => text.as_ptr(),
        None => ptr::null(),
    })
}

/// A partitioned surface together with its homology module.
pub struct TorelliSurface {
    surface: PartitionedSurface,
    module: H1PModule,
}

/// A twist word bound to the surface it was parsed against.
pub struct TorelliWord {
    word: TwistWord,
}

unsafe fn read_str<'a>(ptr: *const c_char) -> Result<&'a str, TorelliStatus> {
    if ptr.is_null() {
        set_error("null string argument");
        return Err(TorelliNullPointer);
    }
    unsafe { CStr::from_ptr(ptr) }.to_str().map_err(|e| {
        set_error(format!("invalid UTF-8: {e}"));
        TorelliInvalidUtf8
    })
}

fn write_out<T>(out: *mut T, value: T) -> TorelliStatus {
    if out.is_null() {
        set_error("null out parameter");
        return TorelliNullPointer;
    }
    unsafe { out.write(value) };
    TorelliOk
}

/// Parse a surface from `{"genus", "boundaries", "partition"}` JSON and
/// build its homology module. The handle must be released with
/// `torelli_surface_free`.
///
/// # Safety
/// `json` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn torelli_surface_from_json(
    json: *const c_char,
    out: *mut *mut TorelliSurface,
) -> TorelliStatus {
    let text = match unsafe { read_str(json) } {
        Ok(t) => t,
        Err(s) => return s,
    };
    let surface: PartitionedSurface = match serde_json::from_str(text) {
        Ok(s) => s,
        Err(e) => {
            set_error(format!("malformed surface JSON: {e}"));
            return TorelliInvalidInput;
        }
    };
    if let Err(e) = surface.validate() {
        set_error(e);
        return TorelliInvalidInput;
    }
    let module = build_h1p(&surface);
    write_out(out, Box::into_raw(Box::new(TorelliSurface { surface, module })))
}

/// Release a surface handle. Null is ignored.
///
/// # Safety
/// `handle` must come from `torelli_surface_from_json` and not be used
/// again afterwards.
#[no_mangle]
pub unsafe extern "C" fn torelli_surface_free(handle: *mut TorelliSurface) {
    if !handle.is_null() {
        drop(unsafe { Box::from_raw(handle) });
    }
}

/// Rank of the surface's homology module.
///
/// # Safety
/// `handle` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn torelli_surface_rank(
    handle: *const TorelliSurface,
    out: *mut usize,
) -> TorelliStatus {
    if handle.is_null() {
        set_error("null surface handle");
        return TorelliNullPointer;
    }
    write_out(out, unsafe { &*handle }.module.rank)
}

/// Parse a twist word from `{"factors": [{"class", "exp"}]}` JSON against
/// a surface. The handle must be released with `torelli_word_free`.
///
/// # Safety
/// All pointers must be valid; `json` must be NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn torelli_word_from_json(
    surface: *const TorelliSurface,
    json: *const c_char,
    out: *mut *mut TorelliWord,
) -> TorelliStatus {
    if surface.is_null() {
        set_error("null surface handle");
        return TorelliNullPointer;
    }
    let text = match unsafe { read_str(json) } {
        Ok(t) => t,
        Err(s) => return s,
    };
    let word_json: WordJson = match serde_json::from_str(text) {
        Ok(w) => w,
        Err(e) => {
            set_error(format!("malformed word JSON: {e}"));
            return TorelliInvalidInput;
        }
    };
    let word = match word_json.to_word(&unsafe { &*surface }.surface) {
        Ok(w) => w,
        Err(e) => {
            set_error(e);
            return TorelliInvalidInput;
        }
    };
    write_out(out, Box::into_raw(Box::new(TorelliWord { word })))
}

/// Release a word handle. Null is ignored.
///
/// # Safety
/// `handle` must come from `torelli_word_from_json` and not be used again.
#[no_mangle]
pub unsafe extern "C" fn torelli_word_free(handle: *mut TorelliWord) {
    if !handle.is_null() {
        drop(unsafe { Box::from_raw(handle) });
    }
}

/// Decide whether a word acts trivially on the surface's homology module;
/// writes 1 or 0 to `out`.
///
/// # Safety
/// All pointers must be valid, and the word must have been parsed against
/// the same surface.
#[no_mangle]
pub unsafe extern "C" fn torelli_word_acts_trivially(
    surface: *const TorelliSurface,
    word: *const TorelliWord,
    out: *mut i32,
) -> TorelliStatus {
    if surface.is_null() || word.is_null() {
        set_error("null handle");
        return TorelliNullPointer;
    }
    let trivial = acts_trivially(&unsafe { &*word }.word, &unsafe { &*surface }.module);
    write_out(out, trivial as i32)
}

fn parse_loop(text: &str) -> Result<PathInComplex, TorelliStatus> {
    #[derive(serde::Deserialize)]
    struct LoopJson {
        g: usize,
        closed: bool,
        vertices: Vec<Vec<i64>>,
    }
    let parsed: LoopJson = serde_json::from_str(text).map_err(|e| {
        set_error(format!("malformed loop JSON: {e}"));
        TorelliInvalidInput
    })?;
    let vertices = parsed
        .vertices
        .iter()
        .map(|v| Line::from_i64(v))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| {
            set_error(e);
            TorelliInvalidInput
        })?;
    PathInComplex::new(parsed.g, parsed.closed, vertices).map_err(|e| {
        set_error(e);
        TorelliInvalidInput
    })
}

fn to_c_string(text: String) -> Result<*mut c_char, TorelliStatus> {
    CString::new(text)
        .map(CString::into_raw)
        .map_err(|_| {
            set_error("output contained an interior NUL byte");
            TorelliInvalidInput
        })
}

/// Contract a closed loop in the isotropic-line complex, writing a move
/// trace as a JSON string to `out_trace_json` (free it with
/// `torelli_string_free`). `max_bound` and `budget` of zero select the
/// defaults.
///
/// # Safety
/// `loop_json` must be NUL-terminated and `out_trace_json` valid.
#[no_mangle]
pub unsafe extern "C" fn torelli_contract_loop(
    loop_json: *const c_char,
    max_bound: u64,
    budget: usize,
    out_trace_json: *mut *mut c_char,
) -> TorelliStatus {
    let text = match unsafe { read_str(loop_json) } {
        Ok(t) => t,
        Err(s) => return s,
    };
    let path = match parse_loop(text) {
        Ok(p) => p,
        Err(s) => return s,
    };
    let mut opts = SearchOpts::default();
    if max_bound > 0 {
        opts.max_bound = max_bound.max(opts.base_bound);
    }
    if budget > 0 {
        opts.budget = budget;
    }
    let result = if path.g == 2 {
        genus2_contract(&path, &opts)
    } else {
        contract_via_rank_reduction(&path, &opts)
    };
    let trace = match result {
        Ok(t) => t,
        Err(ContractError::SearchExhausted(msg)) => {
            set_error(msg);
            return TorelliSearchExhausted;
        }
        Err(e) => {
            set_error(e);
            return TorelliInvalidInput;
        }
    };
    let json = match TraceJson::from_trace(&trace).and_then(|j| {
        serde_json::to_string(&j).map_err(|e| ContractError::InvalidPath(e.to_string()))
    }) {
        Ok(s) => s,
        Err(e) => {
            set_error(e);
            return TorelliInvalidInput;
        }
    };
    match to_c_string(json) {
        Ok(ptr) => write_out(out_trace_json, ptr),
        Err(s) => s,
    }
}

/// Replay a move trace against a loop; writes 1 to `out` iff the trace
/// starts at the loop and every move replays correctly.
///
/// # Safety
/// All pointers must be valid NUL-terminated strings / out pointers.
#[no_mangle]
pub unsafe extern "C" fn torelli_verify_trace(
    loop_json: *const c_char,
    trace_json: *const c_char,
    out: *mut i32,
) -> TorelliStatus {
    let loop_text = match unsafe { read_str(loop_json) } {
        Ok(t) => t,
        Err(s) => return s,
    };
    let trace_text = match unsafe { read_str(trace_json) } {
        Ok(t) => t,
        Err(s) => return s,
    };
    let path = match parse_loop(loop_text) {
        Ok(p) => p,
        Err(s) => return s,
    };
    let trace_json: TraceJson = match serde_json::from_str(trace_text) {
        Ok(t) => t,
        Err(e) => {
            set_error(format!("malformed trace JSON: {e}"));
            return TorelliInvalidInput;
        }
    };
    let trace = match trace_json.to_trace() {
        Ok(t) => t,
        Err(e) => {
            set_error(e);
            return TorelliInvalidInput;
        }
    };
    let verified = trace.initial == path && verify_trace(&trace);
    write_out(out, verified as i32)
}

/// Release a string returned by this library. Null is ignored.
///
/// # Safety
/// `ptr` must come from this library and not be used again afterwards.
#[no_mangle]
pub unsafe extern "C" fn torelli_string_free(ptr: *mut c_char) {
    if !ptr.is_null() {
        drop(unsafe { CString::from_raw(ptr) });
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cstr(s: &str) -> CString {
        CString::new(s).unwrap()
    }

    const SURFACE: &str =
        r#"{"genus": 0, "boundaries": [1, 2, 3, 4], "partition": [[1, 2], [3, 4]]}"#;

    #[test]
    fn surface_lifecycle_and_rank() {
        let json = cstr(SURFACE);
        let mut handle: *mut TorelliSurface = ptr::null_mut();
        let status = unsafe { torelli_surface_from_json(json.as_ptr(), &mut handle) };
        assert_eq!(status, TorelliOk);
        let mut rank = 0usize;
        assert_eq!(unsafe { torelli_surface_rank(handle, &mut rank) }, TorelliOk);
        assert_eq!(rank, 4);
        unsafe { torelli_surface_free(handle) };
    }

    #[test]
    fn invalid_inputs_set_the_error_message() {
        let json = cstr("{ not json");
        let mut handle: *mut TorelliSurface = ptr::null_mut();
        let status = unsafe { torelli_surface_from_json(json.as_ptr(), &mut handle) };
        assert_eq!(status, TorelliInvalidInput);
        let msg = torelli_last_error_message();
        assert!(!msg.is_null());
        let msg = unsafe { CStr::from_ptr(msg) }.to_str().unwrap();
        assert!(msg.contains("malformed surface JSON"));

        let status = unsafe { torelli_surface_from_json(ptr::null(), &mut handle) };
        assert_eq!(status, TorelliNullPointer);
    }

    #[test]
    fn word_triviality_through_the_abi() {
        let json = cstr(SURFACE);
        let mut surface: *mut TorelliSurface = ptr::null_mut();
        assert_eq!(
            unsafe { torelli_surface_from_json(json.as_ptr(), &mut surface) },
            TorelliOk
        );

        let trivial =
            cstr(r#"{"factors": [{"class": {"beta": {"1": 1, "2": 1}}, "exp": 1}]}"#);
        let mut word: *mut TorelliWord = ptr::null_mut();
        assert_eq!(
            unsafe { torelli_word_from_json(surface, trivial.as_ptr(), &mut word) },
            TorelliOk
        );
        let mut verdict = -1i32;
        assert_eq!(
            unsafe { torelli_word_acts_trivially(surface, word, &mut verdict) },
            TorelliOk
        );
        assert_eq!(verdict, 1);
        unsafe { torelli_word_free(word) };

        let crossing =
            cstr(r#"{"factors": [{"class": {"beta": {"1": 1, "3": 1}}, "exp": 1}]}"#);
        let mut word: *mut TorelliWord = ptr::null_mut();
        assert_eq!(
            unsafe { torelli_word_from_json(surface, crossing.as_ptr(), &mut word) },
            TorelliOk
        );
        let mut verdict = -1i32;
        assert_eq!(
            unsafe { torelli_word_acts_trivially(surface, word, &mut verdict) },
            TorelliOk
        );
        assert_eq!(verdict, 0);
        unsafe { torelli_word_free(word) };
        unsafe { torelli_surface_free(surface) };
    }

    #[test]
    fn contract_and_verify_round_trip() {
        let loop_json = cstr(
            r#"{"g": 3, "closed": true, "vertices": [
                [1, 0, 0, 0, 0, 0],
                [0, 0, 0, 0, 0, 1],
                [1, 0, 0, 0, 0, 0]]}"#,
        );
        let mut trace: *mut c_char = ptr::null_mut();
        let status =
            unsafe { torelli_contract_loop(loop_json.as_ptr(), 0, 0, &mut trace) };
        assert_eq!(status, TorelliOk);
        assert!(!trace.is_null());

        let mut verified = -1i32;
        let status =
            unsafe { torelli_verify_trace(loop_json.as_ptr(), trace, &mut verified) };
        assert_eq!(status, TorelliOk);
        assert_eq!(verified, 1);

        // The same trace must not verify against a different loop.
        let other = cstr(
            r#"{"g": 3, "closed": true, "vertices": [
                [0, 0, 1, 0, 0, 0],
                [0, 0, 0, 0, 0, 1],
                [0, 0, 1, 0, 0, 0]]}"#,
        );
        let mut verified = -1i32;
        let status = unsafe { torelli_verify_trace(other.as_ptr(), trace, &mut verified) };
        assert_eq!(status, TorelliOk);
        assert_eq!(verified, 0);
        unsafe { torelli_string_free(trace) };
    }

    #[test]
    fn generated_header_declares_the_api() {
        let header = std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
            .join("include")
            .join("torelli.h");
        let text = std::fs::read_to_string(&header)
            .unwrap_or_else(|e| panic!("missing generated header {}: {e}", header.display()));
        for symbol in [
            "torelli_surface_from_json",
            "torelli_surface_free",
            "torelli_surface_rank",
            "torelli_word_from_json",
            "torelli_word_acts_trivially",
            "torelli_contract_loop",
            "torelli_verify_trace",
            "torelli_string_free",
            "torelli_last_error_message",
            "TorelliStatus",
        ] {
            assert!(text.contains(symbol), "header missing {symbol}");
        }
    }
}
