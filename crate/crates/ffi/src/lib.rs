//! C ABI for the rootcause classifier.
//!
//! A classifier is an opaque handle created from the model and vocabulary
//! files written by `rootcause train`. Every function returns an [`RcStatus`]
//! code; a human-readable message for the most recent failure on the calling
//! thread is available through [`rc_last_error`]. Class indices follow the
//! library's canonical category order, see [`rc_class_name`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use rootcause::corpus::NUM_CLASSES;
use rootcause::pipeline::ClassifierPipeline;
use rootcause::textprep::PrepConfig;

/// Result codes returned by every API call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RcStatus {
    /// Success.
    Ok = 0,
    /// Success, but the text normalized to an empty feature vector; the
    /// prediction rests on the model bias alone.
    ZeroVector = 1,
    /// A required pointer argument was null.
    NullArgument = 2,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 3,
    /// The model or vocabulary file could not be loaded or failed
    /// verification.
    LoadFailed = 4,
    /// Classification failed; see `rc_last_error`.
    ClassifyFailed = 5,
    /// An internal invariant was violated.
    Internal = 6,
}

/// Opaque classifier handle.
pub struct RcClassifier {
    pipeline: ClassifierPipeline,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(message: impl ToString) {
    let message = message.to_string().replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(message).unwrap_or_default();
    });
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn rc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Number of root-cause classes (the length of every probability array).
#[no_mangle]
pub extern "C" fn rc_class_count() -> usize {
    NUM_CLASSES
}

/// Canonical name of the class at `index` as a static string, or null when
/// the index is out of range.
#[no_mangle]
pub extern "C" fn rc_class_name(index: u32) -> *const c_char {
    const NAMES: [&[u8]; NUM_CLASSES] = [
        b"configuration-issue\0",
        b"network-issue\0",
        b"database-issue\0",
        b"gui-issue\0",
        b"performance-issue\0",
        b"permission-deprecation-issue\0",
        b"security-issue\0",
        b"program-anomaly-issue\0",
        b"test-code-issue\0",
    ];
    match NAMES.get(index as usize) {
        Some(name) => name.as_ptr() as *const c_char,
        None => std::ptr::null(),
    }
}

/// Copies the calling thread's most recent error message (NUL-terminated,
/// truncated to `capacity`) into `buffer` and returns the full message
/// length in bytes, excluding the terminator.
///
/// # Safety
/// `buffer` must point to at least `capacity` writable bytes, or be null
/// (in which case only the length is returned).
#[no_mangle]
pub unsafe extern "C" fn rc_last_error(buffer: *mut c_char, capacity: usize) -> usize {
    LAST_ERROR.with(|slot| {
        let message = slot.borrow();
        let bytes = message.as_bytes();
        if !buffer.is_null() && capacity > 0 {
            let n = bytes.len().min(capacity - 1);
            unsafe {
                std::ptr::copy_nonoverlapping(bytes.as_ptr() as *const c_char, buffer, n);
                *buffer.add(n) = 0;
            }
        }
        bytes.len()
    })
}

unsafe fn read_c_str<'a>(ptr: *const c_char) -> Result<&'a str, RcStatus> {
    if ptr.is_null() {
        set_last_error("null string argument");
        return Err(RcStatus::NullArgument);
    }
    unsafe { CStr::from_ptr(ptr) }.to_str().map_err(|e| {
        set_last_error(format!("invalid utf-8: {e}"));
        RcStatus::InvalidUtf8
    })
}

/// Opens a classifier from the model and vocabulary files written by
/// `rootcause train`. On success writes the handle to `out`; release it
/// with [`rc_classifier_close`]. The model must have been trained with the
/// default term lists.
///
/// # Safety
/// `model_path` and `vocab_path` must be NUL-terminated strings and `out`
/// a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rc_classifier_open(
    model_path: *const c_char,
    vocab_path: *const c_char,
    out: *mut *mut RcClassifier,
) -> RcStatus {
    if out.is_null() {
        set_last_error("null output pointer");
        return RcStatus::NullArgument;
    }
    let model_path = match unsafe { read_c_str(model_path) } {
        Ok(s) => s,
        Err(status) => return status,
    };
    let vocab_path = match unsafe { read_c_str(vocab_path) } {
        Ok(s) => s,
        Err(status) => return status,
    };
    let result = catch_unwind(|| {
        ClassifierPipeline::load(model_path, vocab_path, PrepConfig::classifier())
    });
    match result {
        Ok(Ok(pipeline)) => {
            let handle = Box::new(RcClassifier { pipeline });
            unsafe { *out = Box::into_raw(handle) };
            RcStatus::Ok
        }
        Ok(Err(e)) => {
            set_last_error(e);
            RcStatus::LoadFailed
        }
        Err(_) => {
            set_last_error("panic while loading the classifier");
            RcStatus::Internal
        }
    }
}

/// Releases a classifier handle. Null is a no-op.
///
/// # Safety
/// `handle` must be a pointer returned by [`rc_classifier_open`] that has
/// not been closed already.
#[no_mangle]
pub unsafe extern "C" fn rc_classifier_close(handle: *mut RcClassifier) {
    if !handle.is_null() {
        drop(unsafe { Box::from_raw(handle) });
    }
}

/// Classifies a bug-report summary. Writes the winning class index to
/// `class_out` and, when `probabilities_out` is non-null, the full
/// probability vector of [`rc_class_count`] entries. Returns `ZeroVector`
/// instead of `Ok` when the summary normalized to nothing.
///
/// # Safety
/// `handle` must be an open classifier, `summary` a NUL-terminated string,
/// `class_out` a valid pointer, and `probabilities_out` either null or an
/// array of at least [`rc_class_count`] doubles.
#[no_mangle]
pub unsafe extern "C" fn rc_classify(
    handle: *const RcClassifier,
    summary: *const c_char,
    probabilities_out: *mut f64,
    class_out: *mut u32,
) -> RcStatus {
    if handle.is_null() || class_out.is_null() {
        set_last_error("null handle or output pointer");
        return RcStatus::NullArgument;
    }
    let summary = match unsafe { read_c_str(summary) } {
        Ok(s) => s,
        Err(status) => return status,
    };
    let classifier = unsafe { &*handle };
    let result = catch_unwind(AssertUnwindSafe(|| {
        classifier.pipeline.classify_text(summary)
    }));
    match result {
        Ok(Ok(classification)) => {
            unsafe {
                *class_out = classification.label.index() as u32;
                if !probabilities_out.is_null() {
                    std::ptr::copy_nonoverlapping(
                        classification.probabilities.as_ptr(),
                        probabilities_out,
                        NUM_CLASSES,
                    );
                }
            }
            if classification.zero_vector {
                RcStatus::ZeroVector
            } else {
                RcStatus::Ok
            }
        }
        Ok(Err(e)) => {
            set_last_error(e);
            RcStatus::ClassifyFailed
        }
        Err(_) => {
            set_last_error("panic during classification");
            RcStatus::Internal
        }
    }
}
