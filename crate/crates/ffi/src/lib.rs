//! C ABI over the altgen core: layout parsing, icon detection, context JSON,
//! prompt building, alt-text injection and metric scoring.
//!
//! Every function returns an [`AltgenStatus`]. On failure a message is kept
//! per thread and can be read with [`altgen_last_error_message`]. Strings and
//! buffers handed out by the library are released with
//! [`altgen_string_free`] and [`altgen_bytes_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use altgen::layout::{inject_alt_text, parse_layout, LayoutError, ParsedLayout};
use altgen::metrics::{evaluate, EvalRecord, MetricConfig, SynonymTable};
use altgen::ui_model::{AblationConfig, GenerationMode, IconContext};
use altgen::{detect_icons, extract_context, IconCandidate};
use serde_json::json;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AltgenStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    NotFound = 4,
    AlreadyAnnotated = 5,
    InvalidInput = 6,
    IoError = 7,
    Internal = 8,
}

pub const ALTGEN_MODE_TEXTT: u32 = 0;
pub const ALTGEN_MODE_MMT_ICON: u32 = 1;
pub const ALTGEN_MODE_MMT_CONTAINER: u32 = 2;

pub const ALTGEN_OMIT_OCR_TEXT: u32 = 1;
pub const ALTGEN_OMIT_RESOURCE_ID: u32 = 2;
pub const ALTGEN_OMIT_PARENT_SIBLING: u32 = 4;

/// A parsed layout and its detected icons.
pub struct AltgenLayout {
    parsed: ParsedLayout,
    icons: Vec<IconCandidate>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(AltgenStatus, String);

impl From<LayoutError> for Failure {
    fn from(e: LayoutError) -> Self {
        let status = match e {
            LayoutError::Parse { .. } => AltgenStatus::ParseError,
            LayoutError::BadPath { .. } => AltgenStatus::NotFound,
            LayoutError::AlreadyAnnotated { .. } => AltgenStatus::AlreadyAnnotated,
            LayoutError::Moved { .. } => AltgenStatus::InvalidInput,
            LayoutError::Io { .. } => AltgenStatus::IoError,
        };
        Failure(status, e.to_string())
    }
}

fn invalid(msg: impl std::fmt::Display) -> Failure {
    Failure(AltgenStatus::InvalidInput, msg.to_string())
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> AltgenStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => AltgenStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            AltgenStatus::Internal
        }
    }
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure(AltgenStatus::NullArgument, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| Failure(AltgenStatus::InvalidUtf8, format!("{what}: {e}")))
}

unsafe fn bytes<'a>(p: *const u8, len: usize, what: &str) -> Result<&'a [u8], Failure> {
    if p.is_null() {
        return Err(Failure(AltgenStatus::NullArgument, format!("{what} is null")));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

fn out_ptr<T>(p: *mut T, what: &str) -> Result<*mut T, Failure> {
    if p.is_null() {
        Err(Failure(AltgenStatus::NullArgument, format!("{what} is null")))
    } else {
        Ok(p)
    }
}

unsafe fn layout_ref<'a>(p: *const AltgenLayout) -> Result<&'a AltgenLayout, Failure> {
    p.as_ref().ok_or(Failure(AltgenStatus::NullArgument, "layout is null".into()))
}

fn give_string(s: String, out: *mut *mut c_char) -> Result<(), Failure> {
    let c = CString::new(s).map_err(|_| Failure(AltgenStatus::Internal, "string holds a NUL byte".into()))?;
    unsafe { *out = c.into_raw() };
    Ok(())
}

fn mode_from(code: u32) -> Result<GenerationMode, Failure> {
    match code {
        ALTGEN_MODE_TEXTT => Ok(GenerationMode::TEXT_T),
        ALTGEN_MODE_MMT_ICON => Ok(GenerationMode::MMT_ICON),
        ALTGEN_MODE_MMT_CONTAINER => Ok(GenerationMode::MMT_CONTAINER),
        other => Err(invalid(format!("unknown mode {other}"))),
    }
}

fn ablation_from(flags: u32) -> Result<AblationConfig, Failure> {
    if flags & !(ALTGEN_OMIT_OCR_TEXT | ALTGEN_OMIT_RESOURCE_ID | ALTGEN_OMIT_PARENT_SIBLING) != 0 {
        return Err(invalid(format!("unknown ablation flags {flags:#x}")));
    }
    Ok(AblationConfig {
        omit_ocr_text: flags & ALTGEN_OMIT_OCR_TEXT != 0,
        omit_resource_id: flags & ALTGEN_OMIT_RESOURCE_ID != 0,
        omit_parent_sibling: flags & ALTGEN_OMIT_PARENT_SIBLING != 0,
    })
}

/// Message for the last failed call on this thread, or NULL. The pointer stays
/// valid until the next altgen call on the same thread.
#[no_mangle]
pub extern "C" fn altgen_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn altgen_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Release a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed already.
#[no_mangle]
pub unsafe extern "C" fn altgen_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Release a buffer returned by [`altgen_inject`]. NULL is ignored.
///
/// # Safety
/// `p` and `len` must be exactly what this library returned.
#[no_mangle]
pub unsafe extern "C" fn altgen_bytes_free(p: *mut u8, len: usize) {
    if !p.is_null() {
        drop(Box::from_raw(ptr::slice_from_raw_parts_mut(p, len)));
    }
}

/// Parse layout XML and detect its icons. `activity_hint` may be NULL.
///
/// # Safety
/// `xml` must point to `len` readable bytes; string arguments must be
/// NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn altgen_layout_parse(
    xml: *const u8,
    len: usize,
    layout_name: *const c_char,
    activity_hint: *const c_char,
    out: *mut *mut AltgenLayout,
) -> AltgenStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        *out = ptr::null_mut();
        let xml = bytes(xml, len, "xml")?;
        let name = text(layout_name, "layout_name")?;
        let hint = if activity_hint.is_null() { None } else { Some(text(activity_hint, "activity_hint")?) };
        let parsed = parse_layout(xml, name, hint)?;
        let icons = detect_icons(&parsed.screen);
        *out = Box::into_raw(Box::new(AltgenLayout { parsed, icons }));
        Ok(())
    })
}

/// Release a layout handle. NULL is ignored.
///
/// # Safety
/// `layout` must come from [`altgen_layout_parse`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn altgen_layout_free(layout: *mut AltgenLayout) {
    if !layout.is_null() {
        drop(Box::from_raw(layout));
    }
}

/// Number of detected icons.
///
/// # Safety
/// `layout` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn altgen_layout_icon_count(layout: *const AltgenLayout, out: *mut usize) -> AltgenStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        *out = layout_ref(layout)?.icons.len();
        Ok(())
    })
}

/// JSON array describing the detected icons: path, class, resource id and
/// whether a contentDescription is already present.
///
/// # Safety
/// `layout` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn altgen_layout_icons_json(layout: *const AltgenLayout, out: *mut *mut c_char) -> AltgenStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let l = layout_ref(layout)?;
        let icons: Vec<_> = l
            .icons
            .iter()
            .map(|c| {
                let annotated = l.parsed.element(&c.path).and_then(|e| e.android_attr("contentDescription")).is_some();
                json!({
                    "path": c.path,
                    "class_name": c.node.class_name,
                    "resource_id": c.node.resource_id,
                    "annotated": annotated,
                })
            })
            .collect();
        give_string(serde_json::Value::Array(icons).to_string(), out)
    })
}

/// Canonical context JSON for the icon at `index`.
///
/// # Safety
/// `layout` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn altgen_layout_context_json(layout: *const AltgenLayout, index: usize, out: *mut *mut c_char) -> AltgenStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let l = layout_ref(layout)?;
        let cand = l
            .icons
            .get(index)
            .ok_or_else(|| Failure(AltgenStatus::NotFound, format!("icon {index} of {}", l.icons.len())))?;
        give_string(extract_context(&l.parsed.screen, cand).to_canonical_json(), out)
    })
}

/// Prompt text for a context JSON under a mode (`ALTGEN_MODE_*`) and a set of
/// `ALTGEN_OMIT_*` flags.
///
/// # Safety
/// `context_json` must be NUL-terminated and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn altgen_build_prompt(context_json: *const c_char, mode: u32, ablation: u32, out: *mut *mut c_char) -> AltgenStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let ctx = IconContext::from_canonical_json(text(context_json, "context_json")?).map_err(invalid)?;
        let payload = altgen::genai::build_prompt(&ctx, mode_from(mode)?, ablation_from(ablation)?).map_err(invalid)?;
        give_string(payload.text, out)
    })
}

/// Insert `android:contentDescription` on the element at `path`. The new
/// document is returned in `out`/`out_len`; free it with [`altgen_bytes_free`].
///
/// # Safety
/// `xml` must point to `len` bytes and `path` to `path_len` indices (may be
/// NULL when `path_len` is 0); `alt_text` must be NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn altgen_inject(
    xml: *const u8,
    len: usize,
    path: *const usize,
    path_len: usize,
    alt_text: *const c_char,
    out: *mut *mut u8,
    out_len: *mut usize,
) -> AltgenStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let out_len = out_ptr(out_len, "out_len")?;
        *out = ptr::null_mut();
        *out_len = 0;
        let xml = bytes(xml, len, "xml")?;
        let path: &[usize] = if path_len == 0 { &[] } else { std::slice::from_raw_parts(out_ptr(path.cast_mut(), "path")?, path_len) };
        let alt = text(alt_text, "alt_text")?;
        let edited = inject_alt_text(xml, path, alt)?.into_boxed_slice();
        *out_len = edited.len();
        *out = Box::into_raw(edited).cast();
        Ok(())
    })
}

/// Score a JSON array of `{icon_ref, candidate, references}` records and
/// return the metric report as JSON.
///
/// # Safety
/// `records_json` must be NUL-terminated and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn altgen_evaluate(records_json: *const c_char, out: *mut *mut c_char) -> AltgenStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let records: Vec<EvalRecord> = serde_json::from_str(text(records_json, "records_json")?).map_err(invalid)?;
        let report = evaluate(&records, &MetricConfig::default(), &SynonymTable::default()).map_err(invalid)?;
        give_string(serde_json::to_string(&report).map_err(invalid)?, out)
    })
}
