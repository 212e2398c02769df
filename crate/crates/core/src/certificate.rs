//! Certificate types and the `combdual-cert/1` document format.
//!
//! Certificates carry the constructor's choices as plain data: every claimed
//! property is recomputed by the verifier from the presentation, the target
//! set and this data, never from constructor state.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::assignment::AdmissibleAssignment;
use crate::instance::{canonical_json, to_hex};
use crate::separation::OrientedSeparation;
use crate::symbolic::SymbolicVertexSet;
use crate::vertex::{ClassRef, VertexRef};

pub const CERT_FORMAT: &str = "combdual-cert/1";

/// Selects copies of a replicated class.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum CopySelector {
    AllButFinitely { exceptions: BTreeSet<u32> },
    ExactlyFinitely { members: BTreeSet<u32> },
}

impl CopySelector {
    pub fn selects(&self, copy: u32) -> bool {
        match self {
            CopySelector::AllButFinitely { exceptions } => !exceptions.contains(&copy),
            CopySelector::ExactlyFinitely { members } => members.contains(&copy),
        }
    }

    pub fn is_cofinite(&self) -> bool {
        matches!(self, CopySelector::AllButFinitely { .. })
    }

    /// Some selected copies, smallest first; fewer than `count` when the
    /// selector is finite and small.
    pub fn sample(&self, count: usize) -> Vec<u32> {
        let bound = match self {
            CopySelector::AllButFinitely { exceptions } => {
                count as u32 + exceptions.len() as u32
            }
            CopySelector::ExactlyFinitely { members } => {
                members.last().map_or(0, |m| m + 1)
            }
        };
        (0..bound).filter(|&c| self.selects(c)).take(count).collect()
    }
}

/// Witness that the target set is not tough: an infinite star centered at a
/// deleted vertex whose leaves live in pairwise distinct components.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct UndominatingStarCertificate {
    pub center: VertexRef,
    pub witness_x: BTreeSet<VertexRef>,
    pub class: ClassRef,
    /// Level of the witnessing copies for graded classes.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub level: Option<u32>,
    /// Template locals from an attachment local of the center to a target
    /// local; the star path in each copy.
    pub local_path: Vec<u32>,
    pub copy_selector: CopySelector,
}

/// One concrete linkage path: endpoints in the part, inner vertices outside.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LinkagePath {
    pub path: Vec<VertexRef>,
}

impl LinkagePath {
    /// Endpoints of the path; `None` for degenerate paths, which the
    /// verifier rejects separately.
    pub fn ends(&self) -> Option<(VertexRef, VertexRef)> {
        match (self.path.first(), self.path.last()) {
            (Some(&a), Some(&b)) if self.path.len() >= 2 => Some((a, b)),
            _ => None,
        }
    }
}

/// Tough subgraph `G[B] ∪ L`: the part `B` of the principal tree set plus a
/// linkage of B-paths between part vertices sharing a critical vertex set.
/// Spine pairs follow the canonical designated-copy rule; the flag records
/// that the rule is in force.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ToughSubgraphCertificate {
    pub part_b: SymbolicVertexSet,
    pub assignment: AdmissibleAssignment,
    pub explicit_paths: Vec<LinkagePath>,
    pub spine_pair_rule: bool,
}

/// How one star element was constructed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum ElementProvenance {
    /// Finite-target construction: components with neighbourhood exactly
    /// `subset`.
    FiniteTarget { subset: BTreeSet<VertexRef> },
    /// Maximum of a parliament corridor.
    CorridorLeaf,
    /// `position`-th element derived from an end corridor's grade chain:
    /// position 0 is the chain foot, position `j >= 1` the corner of steps
    /// `j` and `j - 1`.
    CorridorEnd { chain: usize, position: usize },
}

/// Parametric continuation of the star beyond the materialized elements.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum StarTailRule {
    /// Corners of the grade chain anchored at `anchor`, from `from_position`.
    #[serde(rename_all = "camelCase")]
    CornerChain {
        chain: usize,
        anchor: OrientedSeparation,
        from_position: usize,
    },
    /// Principal separations of one graded family as singleton leaves, from
    /// `from_param`.
    #[serde(rename_all = "camelCase")]
    LeafFamily { class: u32, from_param: u32 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct StarElement {
    pub separation: OrientedSeparation,
    pub provenance: ElementProvenance,
}

/// Tame star-decomposition with the target in the central part and every
/// critical vertex set living in a leaf.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct StarDecompositionCertificate {
    /// Present on the infinite-target construction path.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub assignment: Option<AdmissibleAssignment>,
    pub elements: Vec<StarElement>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub tails: Vec<StarTailRule>,
    pub central_part: SymbolicVertexSet,
}

/// The two-sided outcome of the decision procedure.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
#[allow(clippy::large_enum_variant)]
pub enum DichotomyCertificate {
    Star(UndominatingStarCertificate),
    Tough {
        tough_subgraph: ToughSubgraphCertificate,
        star_decomposition: StarDecompositionCertificate,
    },
}

/// Any certificate payload, as written to disk.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum CertificatePayload {
    UndominatingStar(UndominatingStarCertificate),
    ToughSubgraph(ToughSubgraphCertificate),
    StarDecomposition(StarDecompositionCertificate),
    Dichotomy(DichotomyCertificate),
}

impl CertificatePayload {
    pub fn kind(&self) -> &'static str {
        match self {
            CertificatePayload::UndominatingStar(_) => "undominating-star",
            CertificatePayload::ToughSubgraph(_) => "tough-subgraph",
            CertificatePayload::StarDecomposition(_) => "star-decomposition",
            CertificatePayload::Dichotomy(_) => "dichotomy",
        }
    }
}

/// Canonical designated-copy rule for spine pairs, shared verbatim by the
/// constructor and the verifier as part of the certificate semantics.
///
/// A pair `{s_i, s_j}` (i < j) is rule-covered when both vertices lie in the
/// part and some graded window contains both levels. Pairs are ordered
/// lexicographically by `(j, i)`; each eligible non-adjacent pair connects
/// through one reserved copy of the least suitable class at the least
/// suitable level, fresh copies handed out in pair order, skipping copies
/// that meet the explicit target.
pub mod spine_rule {
    use super::*;
    use crate::presentation::{Presentation, TargetSet};

    /// Least suitable `(class, level)` whose window spans both levels.
    pub fn connector_slot(p: &Presentation, i: u32, j: u32) -> Option<(u32, u32)> {
        for (g, gc) in p.graded_classes.iter().enumerate() {
            for level in j..=j + gc.window.width_bound() {
                if gc.window.contains(level, i) && gc.window.contains(level, j) {
                    return Some((g as u32, level));
                }
            }
        }
        None
    }

    /// Whether the canonical rule covers `{s_i, s_j}` inside the given part:
    /// both in the part, a common window exists, and the pair is not an edge
    /// of the part.
    pub fn covers(p: &Presentation, part: &SymbolicVertexSet, i: u32, j: u32) -> bool {
        i < j
            && j != i + 1
            && part.contains(VertexRef::Spine(i))
            && part.contains(VertexRef::Spine(j))
            && connector_slot(p, i, j).is_some()
    }

    /// The designated B-path for a covered pair.
    pub fn designated_path(
        p: &Presentation,
        target: &TargetSet,
        part: &SymbolicVertexSet,
        i: u32,
        j: u32,
    ) -> Option<LinkagePath> {
        if !covers(p, part, i, j) {
            return None;
        }
        let (class, level) = connector_slot(p, i, j)?;
        // Reservation count: earlier pairs (i', j) in (j, i)-lex order that
        // land in the same slot.
        let reserved = (0..i)
            .filter(|&i2| {
                covers(p, part, i2, j) && connector_slot(p, i2, j) == Some((class, level))
            })
            .count() as u32;
        let meets_target = |copy: u32| {
            target.explicit.iter().any(|v| {
                matches!(v, VertexRef::Graded { class: c, level: l, copy: cp, .. }
                    if *c == class && *l == level && *cp == copy)
            }) || part.graded_copy_intersects(class, level, copy)
        };
        // Cofinitely many copies intersect a part that selects this class
        // uniformly; then no connector exists and the rule yields nothing.
        let slice_exceptions = part
            .graded
            .get(&class)
            .map(|g| g.slice_at(level))
            .map_or(0, |s| s.exceptions.keys().next_back().map_or(0, |k| k + 1));
        let bound = reserved + slice_exceptions + target.explicit.len() as u32 + 2;
        let copy = (0..bound).filter(|&c| !meets_target(c)).nth(reserved as usize)?;
        let local = *p.graded(class).attachment_locals.first().unwrap();
        Some(LinkagePath {
            path: vec![
                VertexRef::Spine(i),
                VertexRef::Graded { class, level, copy, local },
                VertexRef::Spine(j),
            ],
        })
    }

    /// All rule-covered pairs with `j <= max_level`, in `(j, i)` order.
    pub fn pairs_up_to(
        p: &Presentation,
        part: &SymbolicVertexSet,
        max_level: u32,
    ) -> Vec<(u32, u32)> {
        let mut out = Vec::new();
        for j in 0..=max_level {
            for i in 0..j {
                if covers(p, part, i, j) {
                    out.push((i, j));
                }
            }
        }
        out
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct CertificateDoc {
    pub format: String,
    pub kind: String,
    /// Digest of the instance the certificate was produced for.
    pub presentation_digest: String,
    pub payload: CertificatePayload,
}

#[derive(Debug, Error)]
pub enum CertificateError {
    #[error("malformed certificate document: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("unsupported format tag {found:?}, expected {CERT_FORMAT:?}")]
    BadFormat { found: String },
    #[error("kind tag {kind:?} does not match the payload ({payload})")]
    KindMismatch { kind: String, payload: &'static str },
    #[error("certificate was issued for a different instance (digest mismatch)")]
    DigestMismatch,
}

impl CertificateDoc {
    pub fn new(presentation_digest: String, payload: CertificatePayload) -> Self {
        CertificateDoc {
            format: CERT_FORMAT.to_string(),
            kind: payload.kind().to_string(),
            presentation_digest,
            payload,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("certificate serialization");
        s.push('\n');
        s
    }

    pub fn parse(text: &str) -> Result<CertificateDoc, CertificateError> {
        let doc: CertificateDoc = serde_json::from_str(text)?;
        if doc.format != CERT_FORMAT {
            return Err(CertificateError::BadFormat { found: doc.format });
        }
        if doc.kind != doc.payload.kind() {
            return Err(CertificateError::KindMismatch {
                kind: doc.kind,
                payload: doc.payload.kind(),
            });
        }
        Ok(doc)
    }

    /// Digest of the canonical rendering of this document.
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        h.update(canonical_json(self).as_bytes());
        to_hex(&h.finalize())
    }
}
