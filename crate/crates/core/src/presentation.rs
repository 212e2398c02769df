//! Finite presentations of countably infinite graphs.
//!
//! A presentation consists of a finite kernel graph, an optional spine ray
//! `s0 - s1 - s2 - ...`, and two kinds of ω-replicated template classes:
//!
//! * a *fan class* has countably many disjoint template copies, each joined
//!   to the same finite anchor set by the class's attachment edges, so every
//!   copy has neighbourhood exactly the anchor set;
//! * a *graded class* has, for every spine level `n`, countably many disjoint
//!   template copies whose attachment locals are joined to every spine vertex
//!   in the level window `window(n)` (a prefix `{0..n}` or a sliding band).
//!
//! All queries against the infinite graph are answered exactly from this
//! finite data.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::finite_graph::FiniteGraph;
use crate::symbolic::{CopyFamily, GradedPart, LevelSet, SymbolicVertexSet};
use crate::vertex::{ClassRef, VertexRef};

/// How a graded class's attachment window depends on the level.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", tag = "kind")]
pub enum WindowKind {
    /// `window(n) = {0, ..., n}`.
    Prefix,
    /// `window(n) = {max(0, n - width + 1), ..., n}`.
    Band { width: u32 },
}

impl WindowKind {
    pub fn window(&self, level: u32) -> (u32, u32) {
        match self {
            WindowKind::Prefix => (0, level),
            WindowKind::Band { width } => (level.saturating_sub(width.saturating_sub(1)), level),
        }
    }

    pub fn contains(&self, level: u32, spine: u32) -> bool {
        let (lo, hi) = self.window(level);
        lo <= spine && spine <= hi
    }

    pub fn width_bound(&self) -> u32 {
        match self {
            WindowKind::Prefix => 1,
            WindowKind::Band { width } => *width,
        }
    }
}

/// ω-replicated template attached to a fixed finite anchor set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FanClass {
    pub template: FiniteGraph,
    /// `(local, anchor)` pairs; anchors are kernel or spine vertices.
    pub attachment: BTreeSet<(u32, VertexRef)>,
}

impl FanClass {
    /// The anchor set `att(c)`: the exact neighbourhood of every copy.
    pub fn anchors(&self) -> BTreeSet<VertexRef> {
        self.attachment.iter().map(|&(_, a)| a).collect()
    }

    pub fn attached_locals(&self, anchor: VertexRef) -> BTreeSet<u32> {
        self.attachment
            .iter()
            .filter(|&&(_, a)| a == anchor)
            .map(|&(l, _)| l)
            .collect()
    }
}

/// ω-replicated template attached level-wise along the spine.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct GradedClass {
    pub template: FiniteGraph,
    pub window: WindowKind,
    pub attachment_locals: BTreeSet<u32>,
}

impl GradedClass {
    /// Spine vertex set of `window(n)`.
    pub fn window_vertices(&self, level: u32) -> BTreeSet<VertexRef> {
        let (lo, hi) = self.window.window(level);
        (lo..=hi).map(VertexRef::Spine).collect()
    }
}

/// Finite description of a countably infinite connected graph.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Presentation {
    pub kernel: FiniteGraph,
    pub has_spine: bool,
    /// Kernel index joined to spine level 0, required when both kernel and
    /// spine are present.
    pub spine_anchor: Option<u32>,
    pub fan_classes: Vec<FanClass>,
    pub graded_classes: Vec<GradedClass>,
}

/// Membership mask for one class: the listed locals belong to the target set
/// in every copy (at every level, for graded classes).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ClassMask {
    pub class: ClassRef,
    pub locals: BTreeSet<u32>,
}

/// The vertex set `U` the duality is decided against.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TargetSet {
    #[serde(default)]
    pub explicit: BTreeSet<VertexRef>,
    #[serde(default)]
    pub class_masks: Vec<ClassMask>,
    #[serde(default)]
    pub spine_cofinal_from: Option<u32>,
}

impl TargetSet {
    /// The target as a symbolic vertex set.
    pub fn vertex_set(&self) -> SymbolicVertexSet {
        let mut s = SymbolicVertexSet::from_vertices(self.explicit.iter().copied());
        for mask in &self.class_masks {
            if mask.locals.is_empty() {
                continue;
            }
            match mask.class {
                ClassRef::Fan(c) => {
                    let part = s.fan.entry(c).or_default();
                    *part = part.union(&CopyFamily::uniform(mask.locals.clone()));
                }
                ClassRef::Graded(g) => {
                    let part = s.graded.entry(g).or_default();
                    *part = part.union(&GradedPart::uniform(CopyFamily::uniform(
                        mask.locals.clone(),
                    )));
                }
            }
        }
        if let Some(from) = self.spine_cofinal_from {
            s.spine = s.spine.union(&LevelSet::tail(from));
        }
        s.canonicalize();
        s
    }

    pub fn mask_for(&self, class: ClassRef) -> Option<&BTreeSet<u32>> {
        self.class_masks
            .iter()
            .find(|m| m.class == class)
            .map(|m| &m.locals)
            .filter(|l| !l.is_empty())
    }

    pub fn has_mask(&self) -> bool {
        self.class_masks.iter().any(|m| !m.locals.is_empty())
    }

    pub fn is_finite(&self) -> bool {
        !self.has_mask() && self.spine_cofinal_from.is_none()
    }
}

/// Size caps keeping every symbolic computation's cost bounded by the
/// instance description, not by unchecked indices inside it.
pub const MAX_KERNEL_VERTICES: u32 = 65_536;
pub const MAX_TEMPLATE_VERTICES: u32 = 4_096;
pub const MAX_LEVEL_REFERENCE: u32 = 512;

#[derive(Debug, Error)]
pub enum InvalidInstance {
    #[error("presentation has no vertices")]
    Empty,
    #[error("{0} exceeds the supported size ({1})")]
    ResourceBound(&'static str, u32),
    #[error("kernel graph is malformed (edge endpoint out of range or loop)")]
    MalformedKernel,
    #[error("fan class {0} template must be connected and nonempty")]
    FanTemplate(u32),
    #[error("fan class {0} has an empty attachment set")]
    EmptyAttachment(u32),
    #[error("fan class {0} attachment references invalid vertex {1}")]
    BadAnchor(u32, VertexRef),
    #[error("fan class {0} attachment local {1} out of template range")]
    BadLocal(u32, u32),
    #[error("graded class {0} template must be connected and nonempty")]
    GradedTemplate(u32),
    #[error("graded class {0} requires a spine")]
    GradedNeedsSpine(u32),
    #[error("graded class {0} has no attachment locals")]
    NoAttachmentLocals(u32),
    #[error("graded class {0} attachment local {1} out of template range")]
    BadGradedLocal(u32, u32),
    #[error("graded class {0} band width must be positive")]
    ZeroBandWidth(u32),
    #[error("kernel and spine are both present but no spine anchor is set")]
    MissingSpineAnchor,
    #[error("spine anchor {0} out of kernel range")]
    BadSpineAnchor(u32),
    #[error("presented graph is disconnected")]
    Disconnected,
    #[error("target set references invalid vertex {0}")]
    BadTargetVertex(VertexRef),
    #[error("target mask references invalid class or local: {0} local {1}")]
    BadTargetMask(ClassRef, u32),
    #[error("target uses the spine but the presentation has none")]
    TargetNeedsSpine,
}

#[derive(Debug, Error)]
#[error("vertex {0} is not a vertex of this presentation")]
pub struct InvalidVertex(pub VertexRef);

impl Presentation {
    /// Checks every structural invariant, including connectivity of the
    /// presented graph via its finite auxiliary structure.
    pub fn validate(&self) -> Result<(), InvalidInstance> {
        if self.kernel.vertex_count > MAX_KERNEL_VERTICES {
            return Err(InvalidInstance::ResourceBound("kernel", MAX_KERNEL_VERTICES));
        }
        if !self.kernel.is_well_formed() {
            return Err(InvalidInstance::MalformedKernel);
        }
        if self.kernel.vertex_count == 0 && !self.has_spine {
            return Err(InvalidInstance::Empty);
        }
        for (i, fc) in self.fan_classes.iter().enumerate() {
            let i = i as u32;
            if fc.template.vertex_count > MAX_TEMPLATE_VERTICES {
                return Err(InvalidInstance::ResourceBound("fan template", MAX_TEMPLATE_VERTICES));
            }
            if fc.template.vertex_count == 0
                || !fc.template.is_well_formed()
                || !fc.template.is_connected()
            {
                return Err(InvalidInstance::FanTemplate(i));
            }
            if fc.attachment.is_empty() {
                return Err(InvalidInstance::EmptyAttachment(i));
            }
            for &(local, anchor) in &fc.attachment {
                if local >= fc.template.vertex_count {
                    return Err(InvalidInstance::BadLocal(i, local));
                }
                match anchor {
                    VertexRef::Kernel(k) if k < self.kernel.vertex_count => {}
                    VertexRef::Spine(m) if self.has_spine => {
                        if m > MAX_LEVEL_REFERENCE {
                            return Err(InvalidInstance::ResourceBound(
                                "anchor level",
                                MAX_LEVEL_REFERENCE,
                            ));
                        }
                    }
                    other => return Err(InvalidInstance::BadAnchor(i, other)),
                }
            }
        }
        for (i, gc) in self.graded_classes.iter().enumerate() {
            let i = i as u32;
            if !self.has_spine {
                return Err(InvalidInstance::GradedNeedsSpine(i));
            }
            if gc.template.vertex_count > MAX_TEMPLATE_VERTICES {
                return Err(InvalidInstance::ResourceBound(
                    "graded template",
                    MAX_TEMPLATE_VERTICES,
                ));
            }
            if gc.template.vertex_count == 0
                || !gc.template.is_well_formed()
                || !gc.template.is_connected()
            {
                return Err(InvalidInstance::GradedTemplate(i));
            }
            if gc.attachment_locals.is_empty() {
                return Err(InvalidInstance::NoAttachmentLocals(i));
            }
            match gc.window {
                WindowKind::Band { width: 0 } => return Err(InvalidInstance::ZeroBandWidth(i)),
                WindowKind::Band { width } if width > MAX_LEVEL_REFERENCE => {
                    return Err(InvalidInstance::ResourceBound(
                        "band width",
                        MAX_LEVEL_REFERENCE,
                    ))
                }
                _ => {}
            }
            for &l in &gc.attachment_locals {
                if l >= gc.template.vertex_count {
                    return Err(InvalidInstance::BadGradedLocal(i, l));
                }
            }
        }
        if self.kernel.vertex_count > 0 && self.has_spine {
            match self.spine_anchor {
                None => return Err(InvalidInstance::MissingSpineAnchor),
                Some(a) if a >= self.kernel.vertex_count => {
                    return Err(InvalidInstance::BadSpineAnchor(a))
                }
                _ => {}
            }
        }
        if !self.auxiliary_connected() {
            return Err(InvalidInstance::Disconnected);
        }
        Ok(())
    }

    /// Connectivity of the presented graph, decided on the finite auxiliary
    /// structure: kernel vertices, one token for the whole spine, and one
    /// hyperedge per fan class over its anchors.
    fn auxiliary_connected(&self) -> bool {
        // Node numbering: kernel 0..k, spine token k (when present).
        let k = self.kernel.vertex_count as usize;
        let n = k + usize::from(self.has_spine);
        if n == 0 {
            return true;
        }
        let mut g = FiniteGraph::new(n as u32);
        for &(a, b) in &self.kernel.edges {
            g.add_edge(a, b);
        }
        if self.has_spine {
            if let Some(a) = self.spine_anchor {
                g.add_edge(a, k as u32);
            }
        }
        for fc in &self.fan_classes {
            let anchors: Vec<u32> = fc
                .anchors()
                .into_iter()
                .map(|a| match a {
                    VertexRef::Kernel(i) => i,
                    _ => k as u32,
                })
                .collect();
            for w in anchors.windows(2) {
                g.add_edge(w[0], w[1]);
            }
        }
        // Graded classes only ever touch the spine token.
        g.is_connected()
    }

    pub fn validate_target(&self, target: &TargetSet) -> Result<(), InvalidInstance> {
        for &v in &target.explicit {
            if !self.contains_vertex(v) {
                return Err(InvalidInstance::BadTargetVertex(v));
            }
            if v.level_bound().unwrap_or(0) > MAX_LEVEL_REFERENCE {
                return Err(InvalidInstance::ResourceBound(
                    "target level",
                    MAX_LEVEL_REFERENCE,
                ));
            }
        }
        if target.spine_cofinal_from.unwrap_or(0) > MAX_LEVEL_REFERENCE {
            return Err(InvalidInstance::ResourceBound(
                "target tail level",
                MAX_LEVEL_REFERENCE,
            ));
        }
        for mask in &target.class_masks {
            let size = match mask.class {
                ClassRef::Fan(c) => self
                    .fan_classes
                    .get(c as usize)
                    .map(|fc| fc.template.vertex_count),
                ClassRef::Graded(g) => self
                    .graded_classes
                    .get(g as usize)
                    .map(|gc| gc.template.vertex_count),
            };
            let size = size.ok_or(InvalidInstance::BadTargetMask(mask.class, 0))?;
            if let Some(&l) = mask.locals.iter().find(|&&l| l >= size) {
                return Err(InvalidInstance::BadTargetMask(mask.class, l));
            }
        }
        if target.spine_cofinal_from.is_some() && !self.has_spine {
            return Err(InvalidInstance::TargetNeedsSpine);
        }
        Ok(())
    }

    pub fn contains_vertex(&self, v: VertexRef) -> bool {
        match v {
            VertexRef::Kernel(i) => i < self.kernel.vertex_count,
            VertexRef::Spine(_) => self.has_spine,
            VertexRef::Fan { class, local, .. } => self
                .fan_classes
                .get(class as usize)
                .is_some_and(|fc| local < fc.template.vertex_count),
            VertexRef::Graded { class, local, .. } => self
                .graded_classes
                .get(class as usize)
                .is_some_and(|gc| local < gc.template.vertex_count),
        }
    }

    pub fn check_vertex(&self, v: VertexRef) -> Result<(), InvalidVertex> {
        if self.contains_vertex(v) {
            Ok(())
        } else {
            Err(InvalidVertex(v))
        }
    }

    pub fn fan(&self, class: u32) -> &FanClass {
        &self.fan_classes[class as usize]
    }

    pub fn graded(&self, class: u32) -> &GradedClass {
        &self.graded_classes[class as usize]
    }

    pub fn class_refs(&self) -> impl Iterator<Item = ClassRef> + '_ {
        (0..self.fan_classes.len() as u32)
            .map(ClassRef::Fan)
            .chain((0..self.graded_classes.len() as u32).map(ClassRef::Graded))
    }

    /// Largest band width over all graded classes, or 1 when none use bands.
    pub fn max_band_width(&self) -> u32 {
        self.graded_classes
            .iter()
            .map(|gc| gc.window.width_bound())
            .max()
            .unwrap_or(1)
            .max(1)
    }

    /// Highest spine level mentioned by the presentation itself (fan anchors
    /// on the spine).
    pub fn anchor_level_bound(&self) -> u32 {
        self.fan_classes
            .iter()
            .flat_map(|fc| fc.anchors())
            .filter_map(|a| a.spine_level())
            .max()
            .unwrap_or(0)
    }

    /// Saturation level for level-indexed computations touching the given
    /// explicit vertices: all behavior above it is eventually uniform.
    /// Stability is still re-verified empirically wherever it is relied on.
    pub fn saturation_level<'a>(
        &self,
        mentioned: impl IntoIterator<Item = &'a VertexRef>,
        target: &TargetSet,
    ) -> u32 {
        let mut lvl = self.anchor_level_bound();
        for v in mentioned {
            lvl = lvl.max(v.level_bound().unwrap_or(0));
        }
        for v in &target.explicit {
            lvl = lvl.max(v.level_bound().unwrap_or(0));
        }
        lvl = lvl.max(target.spine_cofinal_from.unwrap_or(0));
        lvl + self.max_band_width() + 2
    }

    /// The full vertex set as a symbolic set.
    pub fn universe(&self) -> SymbolicVertexSet {
        let mut s = SymbolicVertexSet {
            kernel: (0..self.kernel.vertex_count).collect(),
            ..Default::default()
        };
        if self.has_spine {
            s.spine = LevelSet::cofinite([]);
        }
        for (c, fc) in self.fan_classes.iter().enumerate() {
            s.fan.insert(
                c as u32,
                CopyFamily::uniform((0..fc.template.vertex_count).collect()),
            );
        }
        for (g, gc) in self.graded_classes.iter().enumerate() {
            let slice = CopyFamily::uniform((0..gc.template.vertex_count).collect());
            s.graded.insert(g as u32, GradedPart::uniform(slice));
        }
        s.canonicalize();
        s
    }

    /// Exact neighbourhood of a vertex; infinite for vertices that anchor a
    /// replicated class.
    pub fn neighbors(&self, v: VertexRef) -> Result<SymbolicVertexSet, InvalidVertex> {
        self.check_vertex(v)?;
        let mut out = SymbolicVertexSet::default();
        match v {
            VertexRef::Kernel(i) => {
                out.kernel = self.kernel.neighbors(i).collect();
                if self.has_spine && self.spine_anchor == Some(i) {
                    out.spine = LevelSet::finite([0]);
                }
                for (c, fc) in self.fan_classes.iter().enumerate() {
                    let locals = fc.attached_locals(VertexRef::Kernel(i));
                    if !locals.is_empty() {
                        out.fan.insert(c as u32, CopyFamily::uniform(locals));
                    }
                }
            }
            VertexRef::Spine(m) => {
                let mut levels = BTreeSet::new();
                if m > 0 {
                    levels.insert(m - 1);
                }
                levels.insert(m + 1);
                out.spine = LevelSet::finite(levels);
                if m == 0 {
                    if let Some(a) = self.spine_anchor {
                        out.kernel.insert(a);
                    }
                }
                for (c, fc) in self.fan_classes.iter().enumerate() {
                    let locals = fc.attached_locals(VertexRef::Spine(m));
                    if !locals.is_empty() {
                        out.fan.insert(c as u32, CopyFamily::uniform(locals));
                    }
                }
                for (g, gc) in self.graded_classes.iter().enumerate() {
                    // Levels n with m in window(n): all n >= m for prefix
                    // windows, the band m..m+width-1 for band windows.
                    let slice = CopyFamily::uniform(gc.attachment_locals.clone());
                    let part = match gc.window {
                        WindowKind::Prefix => {
                            GradedPart::from_level(slice, LevelSet::cofinite(0..m))
                        }
                        WindowKind::Band { width } => GradedPart::from_level(
                            slice,
                            LevelSet::finite(m..m + width),
                        ),
                    };
                    out.graded.insert(g as u32, part);
                }
            }
            VertexRef::Fan { class, copy, local } => {
                let fc = self.fan(class);
                let mut locals = BTreeSet::new();
                for w in fc.template.neighbors(local) {
                    locals.insert(w);
                }
                if !locals.is_empty() {
                    out.fan.insert(class, CopyFamily::single_copy(copy, locals));
                }
                for &(l, anchor) in &fc.attachment {
                    if l == local {
                        out.insert_vertex(anchor);
                    }
                }
            }
            VertexRef::Graded { class, level, copy, local } => {
                let gc = self.graded(class);
                let locals: BTreeSet<u32> = gc.template.neighbors(local).collect();
                if !locals.is_empty() {
                    let slice = CopyFamily::single_copy(copy, locals);
                    out.graded
                        .insert(class, GradedPart::single_level(level, slice));
                }
                if gc.attachment_locals.contains(&local) {
                    let (lo, hi) = gc.window.window(level);
                    out.spine = out.spine.union(&LevelSet::finite(lo..=hi));
                }
            }
        }
        out.canonicalize();
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    #[test]
    fn graded_chain_neighbors_of_spine_zero() {
        let (p, _) = corpus::graded_chain();
        let n = p.neighbors(VertexRef::Spine(0)).unwrap();
        // s1 plus every copy of the graded class at every level.
        assert!(n.contains(VertexRef::Spine(1)));
        assert!(!n.contains(VertexRef::Spine(2)));
        assert!(n.contains(VertexRef::Graded { class: 0, level: 0, copy: 17, local: 0 }));
        assert!(n.contains(VertexRef::Graded { class: 0, level: 400, copy: 0, local: 0 }));
        assert!(!n.contains(VertexRef::Spine(0)));
    }

    #[test]
    fn graded_chain_copy_neighborhood_is_window() {
        let (p, _) = corpus::graded_chain();
        let v = VertexRef::Graded { class: 0, level: 2, copy: 5, local: 0 };
        let n = p.neighbors(v).unwrap();
        let expect: Vec<VertexRef> = (0..=2).map(VertexRef::Spine).collect();
        assert_eq!(n.enumerate_finite().unwrap(), expect);
    }

    #[test]
    fn finite_path_neighbors() {
        let (p, _) = corpus::finite_path();
        let n = p.neighbors(VertexRef::Kernel(1)).unwrap();
        assert_eq!(
            n.enumerate_finite().unwrap(),
            vec![VertexRef::Kernel(0), VertexRef::Kernel(2)]
        );
    }

    #[test]
    fn empty_attachment_rejected() {
        let mut p = corpus::fan_one_class().0;
        p.fan_classes[0].attachment.clear();
        assert!(matches!(p.validate(), Err(InvalidInstance::EmptyAttachment(0))));
    }

    #[test]
    fn disconnected_rejected() {
        // Two isolated kernel vertices, no classes to glue them.
        let p = Presentation {
            kernel: FiniteGraph::new(2),
            has_spine: false,
            spine_anchor: None,
            fan_classes: vec![],
            graded_classes: vec![],
        };
        assert!(matches!(p.validate(), Err(InvalidInstance::Disconnected)));
    }

    #[test]
    fn graded_without_spine_rejected() {
        let mut p = corpus::mixed_chain().0;
        p.has_spine = false;
        p.spine_anchor = None;
        assert!(matches!(p.validate(), Err(InvalidInstance::GradedNeedsSpine(0))));
    }

    #[test]
    fn neighbor_symmetry_spot_check() {
        for (p, _) in [corpus::graded_chain(), corpus::fan_two_classes()] {
            let verts = crate::truncation::materialize(&p, 4, 3, usize::MAX)
                .unwrap()
                .names()
                .to_vec();
            for &u in &verts {
                let nu = p.neighbors(u).unwrap();
                for &w in &verts {
                    let nw = p.neighbors(w).unwrap();
                    assert_eq!(nu.contains(w), nw.contains(u), "asymmetry at {u} {w}");
                }
            }
        }
    }
}

#[cfg(test)]
mod resource_bound_tests {
    use super::*;
    use crate::corpus;

    #[test]
    fn oversized_instances_rejected() {
        let mut p = corpus::finite_path().0;
        p.kernel.vertex_count = MAX_KERNEL_VERTICES + 1;
        assert!(matches!(p.validate(), Err(InvalidInstance::ResourceBound("kernel", _))));

        let (p, mut t) = corpus::graded_chain();
        t.spine_cofinal_from = Some(MAX_LEVEL_REFERENCE + 1);
        assert!(matches!(
            p.validate_target(&t),
            Err(InvalidInstance::ResourceBound("target tail level", _))
        ));

        let (mut p, _) = corpus::graded_chain();
        p.graded_classes[0].window = WindowKind::Band { width: MAX_LEVEL_REFERENCE + 5 };
        assert!(matches!(
            p.validate(),
            Err(InvalidInstance::ResourceBound("band width", _))
        ));
    }
}
