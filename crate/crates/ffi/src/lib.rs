//! C ABI over the decision procedures: opaque instance handles, status
//! codes mirroring the CLI exit contract, and JSON strings for structured
//! payloads.
//!
//! Every returned string is allocated by this library and must be released
//! with [`combdual_string_free`]. Status codes: 0 success / tough branch /
//! accept, 1 star branch, 2 invalid input, 3 verification rejected,
//! 4 internal error, 5 null pointer. `combdual_last_error` describes the
//! most recent failure on the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};

use combdual::certificate::{CertificateDoc, CertificatePayload, DichotomyCertificate};
use combdual::duality::{decide, toughness, Toughness};
use combdual::instance::{instance_digest, parse_instance};
use combdual::presentation::{Presentation, TargetSet};
use combdual::truncation::{materialize, DEFAULT_VERTEX_BUDGET};
use combdual::verify::verify_payload;

/// Status codes shared with the command-line interface.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CombdualStatus {
    Ok = 0,
    StarBranch = 1,
    InvalidInput = 2,
    Rejected = 3,
    InternalError = 4,
    NullPointer = 5,
}

/// Opaque parsed instance: a presentation together with its target set.
pub struct CombdualInstance {
    presentation: Presentation,
    target: TargetSet,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let s = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = s);
}

fn write_string(out: *mut *mut c_char, content: String) -> CombdualStatus {
    if out.is_null() {
        set_error("output pointer is null");
        return CombdualStatus::NullPointer;
    }
    match CString::new(content) {
        Ok(s) => {
            unsafe { *out = s.into_raw() };
            CombdualStatus::Ok
        }
        Err(_) => {
            set_error("payload contains an interior NUL byte");
            CombdualStatus::InternalError
        }
    }
}

/// Message describing the most recent failure on this thread. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn combdual_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must be a pointer previously returned by one of the `combdual_*`
/// functions and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn combdual_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(unsafe { CString::from_raw(s) });
    }
}

/// Parses an instance document. On success stores a fresh handle in `out`.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn combdual_instance_parse(
    json: *const c_char,
    out: *mut *mut CombdualInstance,
) -> CombdualStatus {
    if json.is_null() || out.is_null() {
        set_error("null pointer argument");
        return CombdualStatus::NullPointer;
    }
    let text = match unsafe { CStr::from_ptr(json) }.to_str() {
        Ok(t) => t,
        Err(_) => {
            set_error("instance document is not valid UTF-8");
            return CombdualStatus::InvalidInput;
        }
    };
    match parse_instance(text) {
        Ok((presentation, target)) => {
            let handle = Box::new(CombdualInstance { presentation, target });
            unsafe { *out = Box::into_raw(handle) };
            CombdualStatus::Ok
        }
        Err(e) => {
            set_error(e.to_string());
            CombdualStatus::InvalidInput
        }
    }
}

/// Releases an instance handle.
///
/// # Safety
/// `instance` must come from `combdual_instance_parse` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn combdual_instance_free(instance: *mut CombdualInstance) {
    if !instance.is_null() {
        drop(unsafe { Box::from_raw(instance) });
    }
}

/// Hex digest binding certificates to this instance.
///
/// # Safety
/// `instance` must be a live handle; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn combdual_instance_digest(
    instance: *const CombdualInstance,
    out: *mut *mut c_char,
) -> CombdualStatus {
    let Some(inst) = (unsafe { instance.as_ref() }) else {
        set_error("null instance handle");
        return CombdualStatus::NullPointer;
    };
    write_string(out, instance_digest(&inst.presentation, &inst.target))
}

/// Critical vertex sets and the toughness verdict, as a JSON report.
///
/// # Safety
/// `instance` must be a live handle; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn combdual_analyze(
    instance: *const CombdualInstance,
    out: *mut *mut c_char,
) -> CombdualStatus {
    let Some(inst) = (unsafe { instance.as_ref() }) else {
        set_error("null instance handle");
        return CombdualStatus::NullPointer;
    };
    let patterns = combdual::decompose::critical_sets(&inst.presentation);
    let verdict = toughness(&inst.presentation, &inst.target);
    let doc = serde_json::json!({
        "criticalPatterns": patterns,
        "tough": matches!(verdict, Toughness::Tough),
    });
    write_string(out, doc.to_string())
}

/// Decides the dichotomy and writes the certificate document to `out`.
/// Returns `Ok` for the tough branch, `StarBranch` for the star branch.
///
/// # Safety
/// `instance` must be a live handle; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn combdual_decide(
    instance: *const CombdualInstance,
    out: *mut *mut c_char,
) -> CombdualStatus {
    let Some(inst) = (unsafe { instance.as_ref() }) else {
        set_error("null instance handle");
        return CombdualStatus::NullPointer;
    };
    match decide(&inst.presentation, &inst.target) {
        Ok(cert) => {
            let branch = match &cert {
                DichotomyCertificate::Star(_) => CombdualStatus::StarBranch,
                DichotomyCertificate::Tough { .. } => CombdualStatus::Ok,
            };
            let doc = CertificateDoc::new(
                instance_digest(&inst.presentation, &inst.target),
                CertificatePayload::Dichotomy(cert),
            );
            match write_string(out, doc.to_json()) {
                CombdualStatus::Ok => branch,
                other => other,
            }
        }
        Err(e) => {
            set_error(e.to_string());
            CombdualStatus::InternalError
        }
    }
}

/// Verifies a certificate document against the instance. Returns `Ok` on
/// accept, `Rejected` on reject, `InvalidInput` for malformed documents or a
/// digest mismatch. `out_report` (optional) receives the check report JSON.
///
/// # Safety
/// `instance` must be a live handle; `certificate_json` must be a
/// NUL-terminated string; `out_report` may be null.
#[no_mangle]
pub unsafe extern "C" fn combdual_verify(
    instance: *const CombdualInstance,
    certificate_json: *const c_char,
    out_report: *mut *mut c_char,
) -> CombdualStatus {
    let Some(inst) = (unsafe { instance.as_ref() }) else {
        set_error("null instance handle");
        return CombdualStatus::NullPointer;
    };
    if certificate_json.is_null() {
        set_error("null certificate");
        return CombdualStatus::NullPointer;
    }
    let text = match unsafe { CStr::from_ptr(certificate_json) }.to_str() {
        Ok(t) => t,
        Err(_) => {
            set_error("certificate is not valid UTF-8");
            return CombdualStatus::InvalidInput;
        }
    };
    let doc = match CertificateDoc::parse(text) {
        Ok(d) => d,
        Err(e) => {
            set_error(e.to_string());
            return CombdualStatus::InvalidInput;
        }
    };
    if doc.presentation_digest != instance_digest(&inst.presentation, &inst.target) {
        set_error("certificate was issued for a different instance");
        return CombdualStatus::InvalidInput;
    }
    let report = verify_payload(&inst.presentation, &inst.target, &doc.payload);
    if !out_report.is_null() {
        let checks: Vec<serde_json::Value> = report
            .sorted_checks()
            .into_iter()
            .map(|c| serde_json::json!({ "name": c.name, "passed": c.passed, "detail": c.detail }))
            .collect();
        let body = serde_json::json!({
            "verdict": if report.accepted() { "accept" } else { "reject" },
            "checks": checks,
        });
        let status = write_string(out_report, body.to_string());
        if status != CombdualStatus::Ok {
            return status;
        }
    }
    if report.accepted() {
        CombdualStatus::Ok
    } else {
        set_error(report.first_failure().unwrap_or_default());
        CombdualStatus::Rejected
    }
}

/// Materializes a truncation as Graphviz DOT text.
///
/// # Safety
/// `instance` must be a live handle; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn combdual_materialize_dot(
    instance: *const CombdualInstance,
    depth: u32,
    copies: u32,
    out: *mut *mut c_char,
) -> CombdualStatus {
    let Some(inst) = (unsafe { instance.as_ref() }) else {
        set_error("null instance handle");
        return CombdualStatus::NullPointer;
    };
    let t = match materialize(&inst.presentation, depth, copies, DEFAULT_VERTEX_BUDGET) {
        Ok(t) => t,
        Err(e) => {
            set_error(e.to_string());
            return CombdualStatus::InvalidInput;
        }
    };
    let mut s = String::from("graph truncation {\n");
    for i in 0..t.vertex_count() as u32 {
        s.push_str(&format!("  v{i} [label=\"{}\"];\n", t.name_of(i)));
    }
    for &(a, b) in &t.graph.edges {
        s.push_str(&format!("  v{a} -- v{b};\n"));
    }
    s.push_str("}\n");
    write_string(out, s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ptr;

    fn parse(handle_json: &str) -> *mut CombdualInstance {
        let c = CString::new(handle_json).unwrap();
        let mut out: *mut CombdualInstance = ptr::null_mut();
        let status = unsafe { combdual_instance_parse(c.as_ptr(), &mut out) };
        assert_eq!(status, CombdualStatus::Ok);
        out
    }

    fn take(s: *mut c_char) -> String {
        assert!(!s.is_null());
        let out = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_owned();
        unsafe { combdual_string_free(s) };
        out
    }

    #[test]
    fn parse_decide_verify_round_trip() {
        let (p, t) = combdual::corpus::graded_chain();
        let inst = parse(&combdual::instance::serialize_instance(&p, &t));

        let mut cert: *mut c_char = ptr::null_mut();
        let status = unsafe { combdual_decide(inst, &mut cert) };
        assert_eq!(status, CombdualStatus::Ok, "tough branch");
        let cert_json = take(cert);

        let c = CString::new(cert_json).unwrap();
        let mut report: *mut c_char = ptr::null_mut();
        let status = unsafe { combdual_verify(inst, c.as_ptr(), &mut report) };
        assert_eq!(status, CombdualStatus::Ok);
        let report = take(report);
        assert!(report.contains("\"verdict\":\"accept\""));

        unsafe { combdual_instance_free(inst) };
    }

    #[test]
    fn star_branch_status() {
        let (p, t) = combdual::corpus::fan_one_class();
        let inst = parse(&combdual::instance::serialize_instance(&p, &t));
        let mut cert: *mut c_char = ptr::null_mut();
        let status = unsafe { combdual_decide(inst, &mut cert) };
        assert_eq!(status, CombdualStatus::StarBranch);
        take(cert);
        unsafe { combdual_instance_free(inst) };
    }

    #[test]
    fn invalid_input_and_error_message() {
        let c = CString::new("{ nope").unwrap();
        let mut out: *mut CombdualInstance = ptr::null_mut();
        let status = unsafe { combdual_instance_parse(c.as_ptr(), &mut out) };
        assert_eq!(status, CombdualStatus::InvalidInput);
        let msg = unsafe { CStr::from_ptr(combdual_last_error()) };
        assert!(!msg.to_bytes().is_empty());
    }

    #[test]
    fn digest_mismatch_rejected_as_invalid() {
        let (p, t) = combdual::corpus::graded_chain();
        let inst = parse(&combdual::instance::serialize_instance(&p, &t));
        let mut cert: *mut c_char = ptr::null_mut();
        unsafe { combdual_decide(inst, &mut cert) };
        let cert_json = take(cert);
        let (p2, t2) = combdual::corpus::finite_path();
        let other = parse(&combdual::instance::serialize_instance(&p2, &t2));
        let c = CString::new(cert_json).unwrap();
        let status = unsafe { combdual_verify(other, c.as_ptr(), ptr::null_mut()) };
        assert_eq!(status, CombdualStatus::InvalidInput);
        unsafe { combdual_instance_free(inst) };
        unsafe { combdual_instance_free(other) };
    }

    #[test]
    fn tampered_certificate_rejected() {
        let (p, t) = combdual::corpus::graded_chain();
        let inst = parse(&combdual::instance::serialize_instance(&p, &t));
        let mut cert: *mut c_char = ptr::null_mut();
        unsafe { combdual_decide(inst, &mut cert) };
        let tampered = take(cert).replace("\"spinePairRule\": true", "\"spinePairRule\": false");
        let c = CString::new(tampered).unwrap();
        let status = unsafe { combdual_verify(inst, c.as_ptr(), ptr::null_mut()) };
        assert_eq!(status, CombdualStatus::Rejected);
        unsafe { combdual_instance_free(inst) };
    }

    #[test]
    fn dot_export_matches_shape() {
        let (p, t) = combdual::corpus::graded_chain();
        let inst = parse(&combdual::instance::serialize_instance(&p, &t));
        let mut dot: *mut c_char = ptr::null_mut();
        let status = unsafe { combdual_materialize_dot(inst, 1, 1, &mut dot) };
        assert_eq!(status, CombdualStatus::Ok);
        let text = take(dot);
        assert!(text.starts_with("graph truncation {"));
        assert_eq!(text.matches(" -- ").count(), 4);
        unsafe { combdual_instance_free(inst) };
    }
}
