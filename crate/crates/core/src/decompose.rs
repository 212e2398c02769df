//! Exact component decompositions of `G - X` for finite `X`, and the
//! critical vertex sets of a presented graph.
//!
//! Deleting a finite set from a presented graph leaves finitely many
//! components that contain kernel, spine or materialized copy vertices (the
//! *explicit* components, one of which contains the spine tail), plus
//! infinite families of whole-copy components whose anchor sets were wholly
//! deleted (the *free bundles*). Both kinds are computed exactly on a finite
//! auxiliary structure: copies meeting `X` are materialized, classes whose
//! surviving anchors glue vertices together contribute hyperedges, and all
//! spine levels above a saturation horizon collapse into a tail token.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::presentation::{InvalidVertex, Presentation, WindowKind};
use crate::symbolic::{CopyFamily, GradedPart, LevelSet, SymbolicVertexSet};
use crate::union_find::UnionFind;
use crate::vertex::{ClassRef, VertexRef};

/// An infinite family of whole-copy components sharing one neighbourhood.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FreeBundle {
    pub class: ClassRef,
    /// Level of the family for graded classes; `None` for fan classes.
    pub level: Option<u32>,
    /// Copies excluded from the family because `X` meets them.
    pub touched: BTreeSet<u32>,
    /// Common neighbourhood of every member, a subset of the deleted set.
    pub neighbourhood: BTreeSet<VertexRef>,
}

impl FreeBundle {
    pub fn selects(&self, copy: u32) -> bool {
        !self.touched.contains(&copy)
    }

    /// Least copy index in the family.
    pub fn min_copy(&self) -> u32 {
        (0..).find(|c| self.selects(*c)).unwrap()
    }
}

/// Identity of one component of `G - X`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum ComponentId {
    Explicit(usize),
    /// One whole copy out of a free bundle.
    BundleCopy(usize, u32),
}

/// The components of `G - X` for a finite deleted set `X`.
#[derive(Clone, Debug, PartialEq)]
pub struct ComponentDecomposition {
    pub deleted: BTreeSet<VertexRef>,
    /// Finitely many components holding kernel, spine or materialized
    /// vertices, in canonical order.
    pub explicit: Vec<SymbolicVertexSet>,
    pub bundles: Vec<FreeBundle>,
    /// Index into `explicit` of the component containing the spine tail.
    pub tail_component: Option<usize>,
    /// Spine levels above this are uniform and live in the tail component.
    pub horizon: u32,
}

impl ComponentDecomposition {
    pub fn has_infinitely_many_components(&self) -> bool {
        !self.bundles.is_empty()
    }

    /// The whole vertex set of one bundle member.
    pub fn bundle_copy_vertices(&self, p: &Presentation, bundle: usize, copy: u32) -> SymbolicVertexSet {
        let b = &self.bundles[bundle];
        let mut out = SymbolicVertexSet::default();
        match b.class {
            ClassRef::Fan(c) => {
                let locals = (0..p.fan(c).template.vertex_count).collect();
                out.fan.insert(c, CopyFamily::single_copy(copy, locals));
            }
            ClassRef::Graded(g) => {
                let locals = (0..p.graded(g).template.vertex_count).collect();
                let slice = CopyFamily::single_copy(copy, locals);
                out.graded.insert(g, GradedPart::single_level(b.level.unwrap(), slice));
            }
        }
        out
    }

    /// Union of all bundle members of one bundle.
    pub fn bundle_vertices(&self, p: &Presentation, bundle: usize) -> SymbolicVertexSet {
        let b = &self.bundles[bundle];
        let mut out = SymbolicVertexSet::default();
        match b.class {
            ClassRef::Fan(c) => {
                let locals: BTreeSet<u32> = (0..p.fan(c).template.vertex_count).collect();
                let mut fam = CopyFamily::uniform(locals);
                for &t in &b.touched {
                    fam.exceptions.insert(t, BTreeSet::new());
                }
                out.fan.insert(c, fam);
            }
            ClassRef::Graded(g) => {
                let locals: BTreeSet<u32> = (0..p.graded(g).template.vertex_count).collect();
                let mut fam = CopyFamily::uniform(locals);
                for &t in &b.touched {
                    fam.exceptions.insert(t, BTreeSet::new());
                }
                out.graded
                    .insert(g, GradedPart::single_level(b.level.unwrap(), fam));
            }
        }
        out.canonicalize();
        out
    }

    /// Which component a surviving vertex belongs to.
    pub fn component_of(&self, v: VertexRef) -> Option<ComponentId> {
        if self.deleted.contains(&v) {
            return None;
        }
        for (i, c) in self.explicit.iter().enumerate() {
            if c.contains(v) {
                return Some(ComponentId::Explicit(i));
            }
        }
        for (bi, b) in self.bundles.iter().enumerate() {
            match (b.class, v) {
                (ClassRef::Fan(c), VertexRef::Fan { class, copy, .. })
                    if c == class && b.selects(copy) =>
                {
                    return Some(ComponentId::BundleCopy(bi, copy));
                }
                (ClassRef::Graded(g), VertexRef::Graded { class, level, copy, .. })
                    if g == class && b.level == Some(level) && b.selects(copy) =>
                {
                    return Some(ComponentId::BundleCopy(bi, copy));
                }
                _ => {}
            }
        }
        None
    }

    pub fn component_vertices(&self, p: &Presentation, id: ComponentId) -> SymbolicVertexSet {
        match id {
            ComponentId::Explicit(i) => self.explicit[i].clone(),
            ComponentId::BundleCopy(bi, copy) => self.bundle_copy_vertices(p, bi, copy),
        }
    }
}

enum AuxNode {
    Kernel(u32),
    Spine(u32),
    Tail,
    Fragment { class: ClassRef, level: Option<u32>, copy: u32, locals: Vec<u32> },
}

/// Computes the components of `G - X`.
pub fn delete_and_decompose(
    p: &Presentation,
    deleted: &BTreeSet<VertexRef>,
) -> Result<ComponentDecomposition, InvalidVertex> {
    for &v in deleted {
        p.check_vertex(v)?;
    }
    let deleted_kernel: BTreeSet<u32> = deleted
        .iter()
        .filter_map(|v| match v {
            VertexRef::Kernel(i) => Some(*i),
            _ => None,
        })
        .collect();
    let deleted_spine: BTreeSet<u32> = deleted
        .iter()
        .filter_map(|v| v.spine_level())
        .collect();
    // (class, level?, copy) -> deleted locals
    let mut touched: BTreeMap<(ClassRef, Option<u32>, u32), BTreeSet<u32>> = BTreeMap::new();
    for &v in deleted {
        match v {
            VertexRef::Fan { class, copy, local } => {
                touched
                    .entry((ClassRef::Fan(class), None, copy))
                    .or_default()
                    .insert(local);
            }
            VertexRef::Graded { class, level, copy, local } => {
                touched
                    .entry((ClassRef::Graded(class), Some(level), copy))
                    .or_default()
                    .insert(local);
            }
            _ => {}
        }
    }

    let base = deleted
        .iter()
        .filter_map(|v| v.level_bound())
        .max()
        .unwrap_or(0)
        .max(p.anchor_level_bound());
    let band = p.max_band_width();
    let horizon = base + band + 2;

    // Auxiliary nodes.
    let mut nodes: Vec<AuxNode> = Vec::new();
    let mut kernel_node: BTreeMap<u32, usize> = BTreeMap::new();
    let mut spine_node: BTreeMap<u32, usize> = BTreeMap::new();
    for i in 0..p.kernel.vertex_count {
        if !deleted_kernel.contains(&i) {
            kernel_node.insert(i, nodes.len());
            nodes.push(AuxNode::Kernel(i));
        }
    }
    let mut tail_node = None;
    if p.has_spine {
        for m in 0..=horizon {
            if !deleted_spine.contains(&m) {
                spine_node.insert(m, nodes.len());
                nodes.push(AuxNode::Spine(m));
            }
        }
        tail_node = Some(nodes.len());
        nodes.push(AuxNode::Tail);
    }
    // Fragments of touched copies.
    let mut fragment_nodes: Vec<usize> = Vec::new();
    for (&(class, level, copy), gone) in &touched {
        let template = match class {
            ClassRef::Fan(c) => &p.fan(c).template,
            ClassRef::Graded(g) => &p.graded(g).template,
        };
        // Components of the template minus the deleted locals.
        let survivors: Vec<u32> = (0..template.vertex_count)
            .filter(|l| !gone.contains(l))
            .collect();
        let mut seen: BTreeSet<u32> = BTreeSet::new();
        for &start in &survivors {
            if seen.contains(&start) {
                continue;
            }
            let mut frag = vec![start];
            seen.insert(start);
            let mut stack = vec![start];
            while let Some(l) = stack.pop() {
                for w in template.neighbors(l) {
                    if !gone.contains(&w) && seen.insert(w) {
                        frag.push(w);
                        stack.push(w);
                    }
                }
            }
            frag.sort_unstable();
            fragment_nodes.push(nodes.len());
            nodes.push(AuxNode::Fragment { class, level, copy, locals: frag });
        }
    }

    let mut uf = UnionFind::new(nodes.len());
    // Kernel edges and the spine anchor.
    for &(a, b) in &p.kernel.edges {
        if let (Some(&x), Some(&y)) = (kernel_node.get(&a), kernel_node.get(&b)) {
            uf.union(x, y);
        }
    }
    if let (Some(a), Some(&s0)) = (p.spine_anchor, spine_node.get(&0)) {
        if let Some(&k) = kernel_node.get(&a) {
            uf.union(k, s0);
        }
    }
    // Consecutive spine edges and the tail token.
    for m in 0..horizon {
        if let (Some(&x), Some(&y)) = (spine_node.get(&m), spine_node.get(&(m + 1))) {
            uf.union(x, y);
        }
    }
    if let (Some(&top), Some(t)) = (spine_node.get(&horizon), tail_node) {
        uf.union(top, t);
    }
    // Fan classes: untouched copies glue all surviving anchors together.
    let aux_of = |v: VertexRef| -> Option<usize> {
        match v {
            VertexRef::Kernel(i) => kernel_node.get(&i).copied(),
            VertexRef::Spine(m) => spine_node.get(&m).copied(),
            _ => None,
        }
    };
    let mut fan_rep: Vec<Option<usize>> = Vec::new();
    for fc in &p.fan_classes {
        let surviving: Vec<usize> = fc
            .anchors()
            .into_iter()
            .filter(|a| !deleted.contains(a))
            .filter_map(aux_of)
            .collect();
        for w in surviving.windows(2) {
            uf.union(w[0], w[1]);
        }
        fan_rep.push(surviving.first().copied());
    }
    // Graded classes: untouched copies at each level glue the surviving part
    // of their window; beyond the horizon they glue it to the tail.
    let mut graded_rep: Vec<BTreeMap<u32, usize>> = Vec::new();
    for gc in &p.graded_classes {
        let mut reps = BTreeMap::new();
        for level in 0..=horizon {
            let (lo, hi) = gc.window.window(level);
            let surviving: Vec<usize> =
                (lo..=hi).filter_map(|m| spine_node.get(&m).copied()).collect();
            for w in surviving.windows(2) {
                uf.union(w[0], w[1]);
            }
            if let Some(&r) = surviving.first() {
                reps.insert(level, r);
            }
        }
        for level in horizon + 1..=horizon + band + 1 {
            let (lo, hi) = gc.window.window(level);
            let t = tail_node.unwrap();
            for m in lo..=hi.min(horizon) {
                if let Some(&s) = spine_node.get(&m) {
                    uf.union(s, t);
                }
            }
        }
        graded_rep.push(reps);
    }
    // Touched-copy fragments attach through their surviving attachment edges.
    for &fi in &fragment_nodes {
        let AuxNode::Fragment { class, level, locals, .. } = &nodes[fi] else {
            unreachable!()
        };
        match class {
            ClassRef::Fan(c) => {
                for &(local, anchor) in &p.fan(*c).attachment {
                    if locals.contains(&local) && !deleted.contains(&anchor) {
                        if let Some(a) = aux_of(anchor) {
                            uf.union(fi, a);
                        }
                    }
                }
            }
            ClassRef::Graded(g) => {
                let gc = p.graded(*g);
                let (lo, hi) = gc.window.window(level.unwrap());
                if gc.attachment_locals.iter().any(|l| locals.contains(l)) {
                    for m in lo..=hi {
                        if let Some(&s) = spine_node.get(&m) {
                            uf.union(fi, s);
                        }
                    }
                }
            }
        }
    }

    // Assemble explicit components per union-find root.
    let mut builders: BTreeMap<usize, SymbolicVertexSet> = BTreeMap::new();
    let piece = |builders: &mut BTreeMap<usize, SymbolicVertexSet>,
                     uf: &mut UnionFind,
                     node: usize,
                     s: SymbolicVertexSet| {
        let root = uf.find(node);
        let entry = builders.entry(root).or_default();
        *entry = entry.union(&s);
    };
    for (i, node) in nodes.iter().enumerate() {
        let s = match node {
            AuxNode::Kernel(k) => SymbolicVertexSet::singleton(VertexRef::Kernel(*k)),
            AuxNode::Spine(m) => SymbolicVertexSet::singleton(VertexRef::Spine(*m)),
            AuxNode::Tail => SymbolicVertexSet {
                spine: LevelSet::tail(horizon + 1),
                ..Default::default()
            },
            AuxNode::Fragment { class, level, copy, locals } => {
                SymbolicVertexSet::from_vertices(locals.iter().map(|&local| match class {
                    ClassRef::Fan(c) => VertexRef::Fan { class: *c, copy: *copy, local },
                    ClassRef::Graded(g) => VertexRef::Graded {
                        class: *g,
                        level: level.unwrap(),
                        copy: *copy,
                        local,
                    },
                }))
            }
        };
        piece(&mut builders, &mut uf, i, s);
    }

    let mut bundles: Vec<FreeBundle> = Vec::new();
    // Untouched fan copies: either a bundle or part of an anchor's component.
    for (c, fc) in p.fan_classes.iter().enumerate() {
        let c = c as u32;
        let touched_copies: BTreeSet<u32> = touched
            .keys()
            .filter(|(cl, _, _)| *cl == ClassRef::Fan(c))
            .map(|&(_, _, copy)| copy)
            .collect();
        let all_locals: BTreeSet<u32> = (0..fc.template.vertex_count).collect();
        match fan_rep[c as usize] {
            Some(rep) => {
                let mut fam = CopyFamily::uniform(all_locals);
                for &t in &touched_copies {
                    fam.exceptions.insert(t, BTreeSet::new());
                }
                let mut s = SymbolicVertexSet::default();
                s.fan.insert(c, fam);
                s.canonicalize();
                piece(&mut builders, &mut uf, rep, s);
            }
            None => bundles.push(FreeBundle {
                class: ClassRef::Fan(c),
                level: None,
                touched: touched_copies,
                neighbourhood: fc.anchors(),
            }),
        }
    }
    // Untouched graded copies, level by level up to the horizon, then the
    // uniform tail of levels.
    for (g, gc) in p.graded_classes.iter().enumerate() {
        let g = g as u32;
        let all_locals: BTreeSet<u32> = (0..gc.template.vertex_count).collect();
        for level in 0..=horizon {
            let touched_copies: BTreeSet<u32> = touched
                .keys()
                .filter(|(cl, lv, _)| *cl == ClassRef::Graded(g) && *lv == Some(level))
                .map(|&(_, _, copy)| copy)
                .collect();
            let mut fam = CopyFamily::uniform(all_locals.clone());
            for &t in &touched_copies {
                fam.exceptions.insert(t, BTreeSet::new());
            }
            match graded_rep[g as usize].get(&level) {
                Some(&rep) => {
                    let mut s = SymbolicVertexSet::default();
                    s.graded.insert(g, GradedPart::single_level(level, fam));
                    s.canonicalize();
                    piece(&mut builders, &mut uf, rep, s);
                }
                None => bundles.push(FreeBundle {
                    class: ClassRef::Graded(g),
                    level: Some(level),
                    touched: touched_copies,
                    neighbourhood: gc.window_vertices(level),
                }),
            }
        }
        let mut s = SymbolicVertexSet::default();
        s.graded.insert(
            g,
            GradedPart::from_level(CopyFamily::uniform(all_locals), LevelSet::tail(horizon + 1)),
        );
        s.canonicalize();
        if let Some(t) = tail_node {
            piece(&mut builders, &mut uf, t, s);
        }
    }

    let tail_root = tail_node.map(|t| uf.find(t));
    let mut keyed: Vec<(usize, SymbolicVertexSet)> = builders.into_iter().collect();
    keyed.sort_by_key(|(_, s)| s.min_vertex());
    let tail_component = tail_root.map(|r| keyed.iter().position(|(k, _)| *k == r).unwrap());
    let explicit = keyed.into_iter().map(|(_, s)| s).collect();
    bundles.sort_by_key(|b| (b.class, b.level));

    Ok(ComponentDecomposition {
        deleted: deleted.clone(),
        explicit,
        bundles,
        tail_component,
        horizon,
    })
}

/// Indices of the explicit components whose neighbourhood is exactly the
/// deleted set.
pub fn exact_explicit_indices(p: &Presentation, d: &ComponentDecomposition) -> Vec<usize> {
    d.explicit
        .iter()
        .enumerate()
        .filter(|(_, c)| {
            d.deleted
                .iter()
                .all(|&x| p.edge_between(c, &SymbolicVertexSet::singleton(x)).is_some())
        })
        .map(|(i, _)| i)
        .collect()
}

/// The components of `G - X` whose neighbourhood is exactly the deleted set:
/// whole bundles with matching neighbourhood, plus explicit components whose
/// symbolic neighbourhood equals it. Each entry is one component family
/// (a bundle counts as one entry holding all its member components).
pub fn full_neighbourhood_members(
    p: &Presentation,
    d: &ComponentDecomposition,
) -> Vec<SymbolicVertexSet> {
    let mut out = Vec::new();
    for (bi, b) in d.bundles.iter().enumerate() {
        if b.neighbourhood == d.deleted {
            out.push(d.bundle_vertices(p, bi));
        }
    }
    for i in exact_explicit_indices(p, d) {
        out.push(d.explicit[i].clone());
    }
    out
}

/// One member of `crit(G)`: an explicit finite set realized by fan classes,
/// or a level-parametric window family realized by graded classes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum CriticalPattern {
    Explicit {
        set: BTreeSet<VertexRef>,
        witnesses: Vec<ClassRef>,
    },
    Graded {
        class: u32,
        window: WindowKind,
        /// All graded classes sharing this window family.
        witnesses: Vec<u32>,
    },
}

impl CriticalPattern {
    /// The concrete vertex set at a parameter (`None` for explicit patterns).
    pub fn instantiate(&self, p: &Presentation, param: Option<u32>) -> BTreeSet<VertexRef> {
        match self {
            CriticalPattern::Explicit { set, .. } => set.clone(),
            CriticalPattern::Graded { class, .. } => {
                p.graded(*class).window_vertices(param.unwrap())
            }
        }
    }
}

/// All critical vertex sets of the presented graph, as finitely many
/// patterns. A finite set is critical exactly when it is the anchor set of a
/// fan class or a window instance of a graded class: the only infinite
/// families of disjoint connected sets with one common finite exact
/// neighbourhood are whole template copies.
pub fn critical_sets(p: &Presentation) -> Vec<CriticalPattern> {
    let mut by_set: BTreeMap<BTreeSet<VertexRef>, Vec<ClassRef>> = BTreeMap::new();
    for (c, fc) in p.fan_classes.iter().enumerate() {
        by_set.entry(fc.anchors()).or_default().push(ClassRef::Fan(c as u32));
    }
    let mut out: Vec<CriticalPattern> = by_set
        .into_iter()
        .map(|(set, witnesses)| CriticalPattern::Explicit { set, witnesses })
        .collect();
    let mut by_window: BTreeMap<String, (u32, WindowKind, Vec<u32>)> = BTreeMap::new();
    for (g, gc) in p.graded_classes.iter().enumerate() {
        let g = g as u32;
        let key = format!("{:?}", gc.window);
        by_window
            .entry(key)
            .or_insert((g, gc.window, Vec::new()))
            .2
            .push(g);
    }
    for (_, (class, window, witnesses)) in by_window {
        out.push(CriticalPattern::Graded { class, window, witnesses });
    }
    out
}

/// A concrete critical vertex set: a pattern plus a parameter for graded
/// patterns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CriticalInstance {
    pub pattern: usize,
    pub param: Option<u32>,
    pub set: BTreeSet<VertexRef>,
}

/// Instantiates every pattern with parameters up to `bound`, deduplicating
/// sets realized by several patterns (explicit patterns win).
pub fn critical_instances(
    p: &Presentation,
    patterns: &[CriticalPattern],
    bound: u32,
) -> Vec<CriticalInstance> {
    let mut seen: BTreeSet<BTreeSet<VertexRef>> = BTreeSet::new();
    let mut out = Vec::new();
    for (i, pat) in patterns.iter().enumerate() {
        match pat {
            CriticalPattern::Explicit { set, .. } => {
                if seen.insert(set.clone()) {
                    out.push(CriticalInstance { pattern: i, param: None, set: set.clone() });
                }
            }
            CriticalPattern::Graded { .. } => {
                for n in 0..=bound {
                    let set = pat.instantiate(p, Some(n));
                    if seen.insert(set.clone()) {
                        out.push(CriticalInstance { pattern: i, param: Some(n), set });
                    }
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    fn decompose(p: &Presentation, vs: &[VertexRef]) -> ComponentDecomposition {
        delete_and_decompose(p, &vs.iter().copied().collect()).unwrap()
    }

    #[test]
    fn graded_chain_two_spine_levels() {
        let (p, _) = corpus::graded_chain();
        let d = decompose(&p, &[VertexRef::Spine(0), VertexRef::Spine(1)]);
        // One explicit tail component, free bundles at levels 0 and 1.
        assert_eq!(d.explicit.len(), 1);
        assert_eq!(d.tail_component, Some(0));
        let tail = &d.explicit[0];
        assert!(tail.contains(VertexRef::Spine(2)));
        assert!(tail.contains(VertexRef::Graded { class: 0, level: 2, copy: 90, local: 0 }));
        assert!(tail.contains(VertexRef::Graded { class: 0, level: 800, copy: 0, local: 0 }));
        assert!(!tail.contains(VertexRef::Graded { class: 0, level: 1, copy: 0, local: 0 }));
        assert_eq!(d.bundles.len(), 2);
        assert_eq!(d.bundles[0].level, Some(0));
        assert_eq!(
            d.bundles[0].neighbourhood,
            [VertexRef::Spine(0)].into_iter().collect()
        );
        assert_eq!(d.bundles[1].level, Some(1));
        assert_eq!(
            d.bundles[1].neighbourhood,
            [VertexRef::Spine(0), VertexRef::Spine(1)].into_iter().collect()
        );
    }

    #[test]
    fn finite_path_split() {
        let (p, _) = corpus::finite_path();
        let d = decompose(&p, &[VertexRef::Kernel(1)]);
        assert_eq!(d.explicit.len(), 2);
        assert!(d.bundles.is_empty());
        assert_eq!(
            d.explicit[0].enumerate_finite().unwrap(),
            vec![VertexRef::Kernel(0)]
        );
        assert_eq!(
            d.explicit[1].enumerate_finite().unwrap(),
            vec![VertexRef::Kernel(2)]
        );
    }

    #[test]
    fn empty_deletion_single_component() {
        let (p, _) = corpus::graded_chain();
        let d = decompose(&p, &[]);
        assert_eq!(d.explicit.len(), 1);
        assert!(d.bundles.is_empty());
        assert_eq!(d.explicit[0], p.universe());
    }

    #[test]
    fn fan_bundle_when_anchors_deleted() {
        let (p, _) = corpus::fan_two_classes();
        let d = decompose(&p, &[VertexRef::Kernel(0), VertexRef::Kernel(1)]);
        // k2 plus class-1 copies stay connected; class-0 copies become a bundle.
        assert_eq!(d.explicit.len(), 1);
        assert!(d.explicit[0].contains(VertexRef::Kernel(2)));
        assert!(d.explicit[0].contains(VertexRef::Fan { class: 1, copy: 5, local: 0 }));
        assert_eq!(d.bundles.len(), 1);
        assert_eq!(d.bundles[0].class, ClassRef::Fan(0));
    }

    #[test]
    fn touched_copy_fragments() {
        let (p, _) = corpus::fan_one_class();
        // Delete both anchors and one copy's only vertex.
        let d = decompose(
            &p,
            &[
                VertexRef::Kernel(0),
                VertexRef::Kernel(1),
                VertexRef::Fan { class: 0, copy: 3, local: 0 },
            ],
        );
        // k2 survives alone; copies form a bundle except copy 3 (fully deleted).
        assert_eq!(d.explicit.len(), 1);
        assert_eq!(
            d.explicit[0].enumerate_finite().unwrap(),
            vec![VertexRef::Kernel(2)]
        );
        assert_eq!(d.bundles.len(), 1);
        assert!(!d.bundles[0].selects(3));
        assert!(d.bundles[0].selects(2));
    }

    #[test]
    fn component_partition_property() {
        // Explicit components and bundles are disjoint and cover V minus X.
        let (p, _) = corpus::mixed_chain();
        let x: BTreeSet<VertexRef> = [
            VertexRef::Spine(0),
            VertexRef::Spine(2),
            VertexRef::Kernel(1),
            VertexRef::Graded { class: 1, level: 2, copy: 1, local: 0 },
        ]
        .into_iter()
        .collect();
        let d = delete_and_decompose(&p, &x).unwrap();
        let mut union = SymbolicVertexSet::default();
        for (i, c) in d.explicit.iter().enumerate() {
            assert!(!c.intersects(&union), "component {i} overlaps another");
            union = union.union(c);
        }
        for bi in 0..d.bundles.len() {
            let b = d.bundle_vertices(&p, bi);
            assert!(!b.intersects(&union));
            union = union.union(&b);
        }
        let expect = p.universe().difference(&SymbolicVertexSet::from_vertices(x));
        assert_eq!(union, expect);
    }

    #[test]
    fn no_edges_between_components() {
        let (p, _) = corpus::mixed_chain();
        let x: BTreeSet<VertexRef> =
            [VertexRef::Spine(1), VertexRef::Kernel(0)].into_iter().collect();
        let d = delete_and_decompose(&p, &x).unwrap();
        for i in 0..d.explicit.len() {
            for j in 0..d.explicit.len() {
                if i != j {
                    assert!(
                        p.edge_between(&d.explicit[i], &d.explicit[j]).is_none(),
                        "edge between explicit components {i} and {j}"
                    );
                }
            }
        }
    }

    #[test]
    fn critical_sets_of_bundled_instances() {
        let (p, _) = corpus::graded_chain();
        let pats = critical_sets(&p);
        assert_eq!(pats.len(), 1);
        assert!(matches!(
            pats[0],
            CriticalPattern::Graded { class: 0, window: WindowKind::Prefix, .. }
        ));
        assert_eq!(
            pats[0].instantiate(&p, Some(2)),
            (0..=2).map(VertexRef::Spine).collect()
        );

        let (p, _) = corpus::finite_path();
        assert!(critical_sets(&p).is_empty());

        let (p, _) = corpus::fan_two_classes();
        let pats = critical_sets(&p);
        assert_eq!(pats.len(), 2);
        let sets: Vec<BTreeSet<VertexRef>> =
            pats.iter().map(|pt| pt.instantiate(&p, None)).collect();
        assert_eq!(sets[0], [VertexRef::Kernel(0), VertexRef::Kernel(1)].into_iter().collect());
        assert_eq!(sets[1], [VertexRef::Kernel(1), VertexRef::Kernel(2)].into_iter().collect());
    }

    #[test]
    fn critical_instances_dedupe() {
        let (p, _) = corpus::graded_chain();
        let pats = critical_sets(&p);
        let inst = critical_instances(&p, &pats, 4);
        assert_eq!(inst.len(), 5);
        assert!(inst.iter().all(|i| i.param.is_some()));
    }
}
