//! Finite truncations of presented graphs.
//!
//! A truncation materializes the induced subgraph on the kernel, the spine up
//! to depth `d`, the first `m` copies of every fan class, and the first `m`
//! copies per level up to `d` of every graded class. It is the substrate for
//! all brute-force oracle checks.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::finite_graph::FiniteGraph;
use crate::presentation::Presentation;
use crate::vertex::VertexRef;

/// Default cap on materialized vertices; `COMBDUAL_BUDGET` overrides it in
/// the CLI.
pub const DEFAULT_VERTEX_BUDGET: usize = 5000;

#[derive(Debug, Error)]
#[error("truncation would materialize {requested} vertices, over the budget of {budget}")]
pub struct ResourceLimit {
    pub requested: usize,
    pub budget: usize,
}

/// A materialized finite induced subgraph with its vertex naming.
#[derive(Clone, Debug)]
pub struct Truncation {
    pub graph: FiniteGraph,
    pub depth: u32,
    pub copies: u32,
    names: Vec<VertexRef>,
    index: BTreeMap<VertexRef, u32>,
}

impl Truncation {
    pub fn names(&self) -> &[VertexRef] {
        &self.names
    }

    pub fn name_of(&self, i: u32) -> VertexRef {
        self.names[i as usize]
    }

    pub fn index_of(&self, v: VertexRef) -> Option<u32> {
        self.index.get(&v).copied()
    }

    pub fn contains(&self, v: VertexRef) -> bool {
        self.index.contains_key(&v)
    }

    pub fn vertex_count(&self) -> usize {
        self.names.len()
    }
}

fn vertex_count_for(p: &Presentation, d: u32, m: u32) -> usize {
    let mut n = p.kernel.vertex_count as usize;
    if p.has_spine {
        n += d as usize + 1;
    }
    for fc in &p.fan_classes {
        n += m as usize * fc.template.vertex_count as usize;
    }
    for gc in &p.graded_classes {
        n += (d as usize + 1) * m as usize * gc.template.vertex_count as usize;
    }
    n
}

/// Materializes the truncation with spine depth `d` and `m` copies per class
/// (per level for graded classes). Vertex numbering follows the canonical
/// vertex order, so output is deterministic.
pub fn materialize(
    p: &Presentation,
    d: u32,
    m: u32,
    budget: usize,
) -> Result<Truncation, ResourceLimit> {
    let requested = vertex_count_for(p, d, m);
    if requested > budget {
        return Err(ResourceLimit { requested, budget });
    }
    let mut names: Vec<VertexRef> = Vec::with_capacity(requested);
    for i in 0..p.kernel.vertex_count {
        names.push(VertexRef::Kernel(i));
    }
    if p.has_spine {
        for lvl in 0..=d {
            names.push(VertexRef::Spine(lvl));
        }
    }
    for (c, fc) in p.fan_classes.iter().enumerate() {
        for copy in 0..m {
            for local in 0..fc.template.vertex_count {
                names.push(VertexRef::Fan { class: c as u32, copy, local });
            }
        }
    }
    for (g, gc) in p.graded_classes.iter().enumerate() {
        for level in 0..=d {
            for copy in 0..m {
                for local in 0..gc.template.vertex_count {
                    names.push(VertexRef::Graded { class: g as u32, level, copy, local });
                }
            }
        }
    }
    debug_assert!(names.windows(2).all(|w| w[0] < w[1]));
    let index: BTreeMap<VertexRef, u32> = names
        .iter()
        .enumerate()
        .map(|(i, &v)| (v, i as u32))
        .collect();

    let mut graph = FiniteGraph::new(names.len() as u32);
    let idx = |v: VertexRef| index.get(&v).copied();
    for &(a, b) in &p.kernel.edges {
        graph.add_edge(idx(VertexRef::Kernel(a)).unwrap(), idx(VertexRef::Kernel(b)).unwrap());
    }
    if p.has_spine {
        if let Some(a) = p.spine_anchor {
            graph.add_edge(idx(VertexRef::Kernel(a)).unwrap(), idx(VertexRef::Spine(0)).unwrap());
        }
        for lvl in 0..d {
            graph.add_edge(
                idx(VertexRef::Spine(lvl)).unwrap(),
                idx(VertexRef::Spine(lvl + 1)).unwrap(),
            );
        }
    }
    for (c, fc) in p.fan_classes.iter().enumerate() {
        let c = c as u32;
        for copy in 0..m {
            for &(l1, l2) in &fc.template.edges {
                graph.add_edge(
                    idx(VertexRef::Fan { class: c, copy, local: l1 }).unwrap(),
                    idx(VertexRef::Fan { class: c, copy, local: l2 }).unwrap(),
                );
            }
            for &(local, anchor) in &fc.attachment {
                if let Some(ai) = idx(anchor) {
                    graph.add_edge(ai, idx(VertexRef::Fan { class: c, copy, local }).unwrap());
                }
            }
        }
    }
    for (g, gc) in p.graded_classes.iter().enumerate() {
        let g = g as u32;
        for level in 0..=d {
            let (lo, hi) = gc.window.window(level);
            for copy in 0..m {
                for &(l1, l2) in &gc.template.edges {
                    graph.add_edge(
                        idx(VertexRef::Graded { class: g, level, copy, local: l1 }).unwrap(),
                        idx(VertexRef::Graded { class: g, level, copy, local: l2 }).unwrap(),
                    );
                }
                for &local in &gc.attachment_locals {
                    let vi = idx(VertexRef::Graded { class: g, level, copy, local }).unwrap();
                    for s in lo..=hi.min(d) {
                        graph.add_edge(vi, idx(VertexRef::Spine(s)).unwrap());
                    }
                }
            }
        }
    }
    Ok(Truncation { graph, depth: d, copies: m, names, index })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    #[test]
    fn graded_chain_small_truncation() {
        let (p, _) = corpus::graded_chain();
        let t = materialize(&p, 1, 1, usize::MAX).unwrap();
        assert_eq!(t.vertex_count(), 4);
        let s0 = t.index_of(VertexRef::Spine(0)).unwrap();
        let s1 = t.index_of(VertexRef::Spine(1)).unwrap();
        let c0 = t
            .index_of(VertexRef::Graded { class: 0, level: 0, copy: 0, local: 0 })
            .unwrap();
        let c1 = t
            .index_of(VertexRef::Graded { class: 0, level: 1, copy: 0, local: 0 })
            .unwrap();
        assert_eq!(t.graph.edges.len(), 4);
        assert!(t.graph.has_edge(s0, s1));
        assert!(t.graph.has_edge(c0, s0));
        assert!(t.graph.has_edge(c1, s0));
        assert!(t.graph.has_edge(c1, s1));
    }

    #[test]
    fn finite_path_truncation_is_kernel() {
        let (p, _) = corpus::finite_path();
        let t = materialize(&p, 9, 7, usize::MAX).unwrap();
        assert_eq!(t.vertex_count(), 3);
        assert_eq!(t.graph.edges.len(), 2);
    }

    #[test]
    fn fan_two_classes_counts() {
        let (p, _) = corpus::fan_two_classes();
        let t = materialize(&p, 0, 2, usize::MAX).unwrap();
        assert_eq!(t.vertex_count(), 7);
    }

    #[test]
    fn budget_enforced() {
        let (p, _) = corpus::graded_chain();
        let err = materialize(&p, 1000, 1000, 5000).unwrap_err();
        assert!(err.requested > err.budget);
    }

    #[test]
    fn truncation_agrees_with_neighbors() {
        for (p, _) in [corpus::graded_chain(), corpus::mixed_chain()] {
            let t = materialize(&p, 5, 3, usize::MAX).unwrap();
            for i in 0..t.vertex_count() as u32 {
                for j in 0..t.vertex_count() as u32 {
                    if i == j {
                        continue;
                    }
                    let (u, v) = (t.name_of(i), t.name_of(j));
                    assert_eq!(
                        t.graph.has_edge(i, j),
                        p.neighbors(u).unwrap().contains(v),
                        "edge mismatch {u} {v}"
                    );
                }
            }
        }
    }
}
