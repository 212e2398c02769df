//! Vertex references for finitely presented infinite graphs.
//!
//! A presented graph has four kinds of vertices: finitely many kernel
//! vertices, the levels of an optional spine ray, and the vertices of the
//! ω-replicated copies of fan and graded class templates. `VertexRef` names
//! any one of them. The derived `Ord` is the canonical vertex order used for
//! all deterministic tie-breaking: kernel before spine before fan copies
//! before graded copies, lexicographic within each kind.

use std::fmt;

use serde::{Deserialize, Serialize};

/// A single vertex of a presented graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum VertexRef {
    /// Kernel vertex by index.
    Kernel(u32),
    /// Spine vertex at the given level.
    Spine(u32),
    /// Vertex of a fan-class copy: `(class, copy, local)`.
    Fan { class: u32, copy: u32, local: u32 },
    /// Vertex of a graded-class copy: `(class, level, copy, local)`.
    Graded { class: u32, level: u32, copy: u32, local: u32 },
}

impl VertexRef {
    pub fn is_kernel(&self) -> bool {
        matches!(self, VertexRef::Kernel(_))
    }

    pub fn is_spine(&self) -> bool {
        matches!(self, VertexRef::Spine(_))
    }

    pub fn spine_level(&self) -> Option<u32> {
        match self {
            VertexRef::Spine(m) => Some(*m),
            _ => None,
        }
    }

    /// Highest spine level this vertex mentions, if any. Graded copies count
    /// with their own level since their window reaches it.
    pub fn level_bound(&self) -> Option<u32> {
        match self {
            VertexRef::Kernel(_) => None,
            VertexRef::Spine(m) => Some(*m),
            VertexRef::Fan { .. } => None,
            VertexRef::Graded { level, .. } => Some(*level),
        }
    }
}

impl fmt::Display for VertexRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VertexRef::Kernel(i) => write!(f, "k{i}"),
            VertexRef::Spine(m) => write!(f, "s{m}"),
            VertexRef::Fan { class, copy, local } => write!(f, "c{class}.{copy}.{local}"),
            VertexRef::Graded { class, level, copy, local } => {
                write!(f, "g{class}.{level}.{copy}.{local}")
            }
        }
    }
}

/// Reference to a replicated class, fan or graded.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum ClassRef {
    Fan(u32),
    Graded(u32),
}

impl fmt::Display for ClassRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClassRef::Fan(c) => write!(f, "c{c}"),
            ClassRef::Graded(g) => write!(f, "g{g}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_order_kernel_spine_copies() {
        let k = VertexRef::Kernel(7);
        let s = VertexRef::Spine(0);
        let f = VertexRef::Fan { class: 0, copy: 0, local: 0 };
        let g = VertexRef::Graded { class: 0, level: 0, copy: 0, local: 0 };
        assert!(k < s && s < f && f < g);
    }

    #[test]
    fn lexicographic_within_variant() {
        let a = VertexRef::Fan { class: 0, copy: 5, local: 1 };
        let b = VertexRef::Fan { class: 1, copy: 0, local: 0 };
        let c = VertexRef::Fan { class: 0, copy: 5, local: 2 };
        assert!(a < b);
        assert!(a < c);
    }

    #[test]
    fn display_names() {
        assert_eq!(VertexRef::Kernel(3).to_string(), "k3");
        assert_eq!(VertexRef::Spine(12).to_string(), "s12");
        assert_eq!(
            VertexRef::Graded { class: 1, level: 2, copy: 3, local: 0 }.to_string(),
            "g1.2.3.0"
        );
    }
}
