//! Oriented finite-order separations with symbolic sides.
//!
//! An oriented separation `(A, B)` is stored as its finite separator
//! `A ∩ B` together with the symbolic small side `A \ B`; the big side is
//! the complement of the small side. All order comparisons reduce to
//! symbolic subset tests, so they are exact over the infinite graph.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::presentation::Presentation;
use crate::symbolic::SymbolicVertexSet;
use crate::vertex::VertexRef;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct OrientedSeparation {
    pub separator: BTreeSet<VertexRef>,
    /// The vertices strictly on the small side, `A \ B`.
    pub small_side: SymbolicVertexSet,
}

/// Mutual position of two oriented separations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Eq,
    Le,
    Ge,
    /// Nested, but only after reorienting one side.
    NestedOther,
    Crossing,
}

#[derive(Debug, Error)]
pub enum SeparationInvalid {
    #[error("separator contains invalid vertex {0}")]
    BadSeparatorVertex(VertexRef),
    #[error("small side overlaps the separator at {0}")]
    SideMeetsSeparator(VertexRef),
    #[error("edge {0} - {1} crosses from the small side past the separator")]
    CrossingEdge(VertexRef, VertexRef),
}

impl OrientedSeparation {
    pub fn new(separator: BTreeSet<VertexRef>, small_side: SymbolicVertexSet) -> Self {
        let sep = SymbolicVertexSet::from_vertices(separator.iter().copied());
        OrientedSeparation { separator, small_side: small_side.difference(&sep) }
    }

    pub fn order(&self) -> usize {
        self.separator.len()
    }

    pub fn separator_set(&self) -> SymbolicVertexSet {
        SymbolicVertexSet::from_vertices(self.separator.iter().copied())
    }

    /// `A = (A \ B) ∪ (A ∩ B)`.
    pub fn side_a(&self) -> SymbolicVertexSet {
        self.small_side.union(&self.separator_set())
    }

    /// `B = V \ (A \ B)`.
    pub fn side_b(&self, p: &Presentation) -> SymbolicVertexSet {
        self.small_side.complement(p)
    }

    /// `B \ A`.
    pub fn big_side_strict(&self, p: &Presentation) -> SymbolicVertexSet {
        self.side_a().complement(p)
    }

    /// Swaps the orientation; an involution preserving the separator.
    pub fn invert(&self, p: &Presentation) -> OrientedSeparation {
        OrientedSeparation {
            separator: self.separator.clone(),
            small_side: self.big_side_strict(p),
        }
    }

    /// `self ≤ other` in the separation order: `A1 ⊆ A2` and `B1 ⊇ B2`.
    pub fn le(&self, other: &OrientedSeparation) -> bool {
        self.small_side.is_subset(&other.small_side)
            && self.side_a().is_subset(&other.side_a())
    }

    pub fn compare(&self, other: &OrientedSeparation, p: &Presentation) -> Relation {
        let le = self.le(other);
        let ge = other.le(self);
        if le && ge {
            return Relation::Eq;
        }
        if le {
            return Relation::Le;
        }
        if ge {
            return Relation::Ge;
        }
        let inv = other.invert(p);
        if self.le(&inv) || inv.le(self) {
            return Relation::NestedOther;
        }
        Relation::Crossing
    }

    pub fn nested_with(&self, other: &OrientedSeparation, p: &Presentation) -> bool {
        self.compare(other, p) != Relation::Crossing
    }

    /// `A ⊆ B`, i.e. nothing strictly on the small side.
    pub fn is_small(&self) -> bool {
        self.small_side.is_empty()
    }

    /// `B ⊆ A`.
    pub fn is_cosmall(&self, p: &Presentation) -> bool {
        self.big_side_strict(p).is_empty()
    }

    /// `A = B`.
    pub fn is_degenerate(&self, p: &Presentation) -> bool {
        self.is_small() && self.is_cosmall(p)
    }

    /// Checks the separation invariants against the presented graph: valid
    /// vertices, disjoint side and separator by construction, and no edge
    /// leaving the small side except into the separator.
    pub fn validate(&self, p: &Presentation) -> Result<(), SeparationInvalid> {
        for &v in &self.separator {
            if !p.contains_vertex(v) {
                return Err(SeparationInvalid::BadSeparatorVertex(v));
            }
        }
        if let Some(v) = self.small_side.intersect(&self.separator_set()).min_vertex() {
            return Err(SeparationInvalid::SideMeetsSeparator(v));
        }
        let outside = self.big_side_strict(p);
        if let Some((u, v)) = p.edge_between(&self.small_side, &outside) {
            return Err(SeparationInvalid::CrossingEdge(u, v));
        }
        Ok(())
    }

    /// Infimum `(A1 ∩ A2, B1 ∪ B2)`.
    pub fn meet(&self, other: &OrientedSeparation) -> OrientedSeparation {
        let new_small = self.small_side.intersect(&other.small_side);
        let new_a = self.side_a().intersect(&other.side_a());
        let separator_set = new_a.difference(&new_small);
        let separator: BTreeSet<VertexRef> = separator_set
            .enumerate_finite()
            .expect("corner separator is contained in the union of two finite separators")
            .into_iter()
            .collect();
        OrientedSeparation { separator, small_side: new_small }
    }

    /// Supremum `(A1 ∪ A2, B1 ∩ B2)`.
    pub fn join(&self, other: &OrientedSeparation) -> OrientedSeparation {
        let new_small = self.small_side.union(&other.small_side);
        let sep_union = self.separator_set().union(&other.separator_set());
        let separator: BTreeSet<VertexRef> = sep_union
            .difference(&new_small)
            .enumerate_finite()
            .expect("separator union is finite")
            .into_iter()
            .collect();
        OrientedSeparation { separator, small_side: new_small }
    }
}

/// Corner mode for the public corner operation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CornerMode {
    Meet,
    Join,
}

pub fn corner(s1: &OrientedSeparation, s2: &OrientedSeparation, mode: CornerMode) -> OrientedSeparation {
    match mode {
        CornerMode::Meet => s1.meet(s2),
        CornerMode::Join => s1.join(s2),
    }
}

/// First violation of the star property among the listed elements: a pair
/// `(i, j)` with `elements[i] ≰ elements[j]*`.
pub fn star_property_violation(
    p: &Presentation,
    elements: &[OrientedSeparation],
) -> Option<(usize, usize)> {
    for i in 0..elements.len() {
        for j in 0..elements.len() {
            if i == j {
                continue;
            }
            if elements[i] == elements[j] {
                continue;
            }
            if !elements[i].le(&elements[j].invert(p)) {
                return Some((i, j));
            }
        }
    }
    None
}

/// The relation `s1 ≲ s2` for a component-side separation `s1 = (C, X)`:
/// either `s1 ≤ s2` outright, or removing one member component of `C` makes
/// it so. Only the unique member covering `A1 \ A2` can help, so the search
/// is constant-size.
pub fn lessish(
    x: &BTreeSet<VertexRef>,
    members: &[SymbolicVertexSet],
    s2: &OrientedSeparation,
) -> bool {
    let mut small = SymbolicVertexSet::default();
    for m in members {
        small = small.union(m);
    }
    let s1 = OrientedSeparation::new(x.clone(), small);
    if s1.le(s2) {
        return true;
    }
    let excess = s1.side_a().difference(&s2.side_a());
    if excess.intersects(&s1.separator_set()) {
        // The separator itself sticks out; no component drop can fix that.
        return false;
    }
    let covering: Vec<&SymbolicVertexSet> =
        members.iter().filter(|m| m.intersects(&excess)).collect();
    let [single] = covering.as_slice() else {
        return false;
    };
    if !excess.is_subset(single) {
        return false;
    }
    let dropped = OrientedSeparation::new(x.clone(), s1.small_side.difference(single));
    dropped.le(s2)
}
