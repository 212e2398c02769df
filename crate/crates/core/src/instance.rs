//! The `combdual/1` instance document format.
//!
//! Instances are JSON documents describing a presentation and a target set.
//! Digests are computed over a canonical rendering (sorted object keys) so
//! that certificates can bind to the instance they were produced for.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::finite_graph::FiniteGraph;
use crate::presentation::{FanClass, GradedClass, InvalidInstance, Presentation, TargetSet};

pub const INSTANCE_FORMAT: &str = "combdual/1";

#[derive(Debug, Error)]
pub enum InstanceError {
    #[error("malformed instance document: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("unsupported format tag {found:?}, expected {INSTANCE_FORMAT:?}")]
    BadFormat { found: String },
    #[error("invalid instance: {0}")]
    Invalid(#[from] InvalidInstance),
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct SpineDoc {
    present: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    anchor: Option<u32>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct InstanceDoc {
    format: String,
    kernel: FiniteGraph,
    #[serde(default)]
    spine: SpineDoc,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    fan_classes: Vec<FanClass>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    graded_classes: Vec<GradedClass>,
    #[serde(default)]
    target: TargetSet,
}

impl InstanceDoc {
    fn from_parts(p: &Presentation, t: &TargetSet) -> Self {
        InstanceDoc {
            format: INSTANCE_FORMAT.to_string(),
            kernel: p.kernel.clone(),
            spine: SpineDoc { present: p.has_spine, anchor: p.spine_anchor },
            fan_classes: p.fan_classes.clone(),
            graded_classes: p.graded_classes.clone(),
            target: t.clone(),
        }
    }

    fn into_parts(self) -> (Presentation, TargetSet) {
        (
            Presentation {
                kernel: self.kernel,
                has_spine: self.spine.present,
                spine_anchor: self.spine.anchor,
                fan_classes: self.fan_classes,
                graded_classes: self.graded_classes,
            },
            self.target,
        )
    }
}

/// Parses and fully validates an instance document.
pub fn parse_instance(text: &str) -> Result<(Presentation, TargetSet), InstanceError> {
    let doc: InstanceDoc = serde_json::from_str(text)?;
    if doc.format != INSTANCE_FORMAT {
        return Err(InstanceError::BadFormat { found: doc.format });
    }
    let (p, t) = doc.into_parts();
    p.validate()?;
    p.validate_target(&t)?;
    Ok((p, t))
}

/// Renders an instance as a pretty-printed document.
pub fn serialize_instance(p: &Presentation, t: &TargetSet) -> String {
    let doc = InstanceDoc::from_parts(p, t);
    let mut s = serde_json::to_string_pretty(&doc).expect("instance serialization");
    s.push('\n');
    s
}

/// Canonical rendering: JSON with sorted object keys and no extra whitespace.
pub fn canonical_json<T: Serialize>(value: &T) -> String {
    let v = serde_json::to_value(value).expect("canonical serialization");
    v.to_string()
}

pub fn to_hex(bytes: &[u8]) -> String {
    let mut s = String::with_capacity(bytes.len() * 2);
    for b in bytes {
        s.push_str(&format!("{b:02x}"));
    }
    s
}

/// SHA-256 digest of the canonical instance rendering, hex encoded.
pub fn instance_digest(p: &Presentation, t: &TargetSet) -> String {
    let doc = InstanceDoc::from_parts(p, t);
    let canon = canonical_json(&doc);
    let mut h = Sha256::new();
    h.update(canon.as_bytes());
    to_hex(&h.finalize())
}
