//! Brute-force ground truth on finite truncations.
//!
//! Everything here recomputes graph quantities by materializing vertices and
//! running union-find, without consulting the symbolic machinery, so that the
//! two routes can be compared against each other.

use std::collections::{BTreeMap, BTreeSet};

use crate::decompose::{delete_and_decompose, ComponentDecomposition};
use crate::presentation::Presentation;
use crate::truncation::Truncation;
use crate::union_find::UnionFind;
use crate::vertex::VertexRef;

/// Components of the truncation minus a deleted index set, as sorted vertex
/// name sets, sorted by least member.
pub fn components_after_deletion(
    t: &Truncation,
    deleted: &BTreeSet<u32>,
) -> Vec<BTreeSet<VertexRef>> {
    let n = t.vertex_count();
    let mut uf = UnionFind::new(n);
    for &(a, b) in &t.graph.edges {
        if !deleted.contains(&a) && !deleted.contains(&b) {
            uf.union(a as usize, b as usize);
        }
    }
    let mut groups: BTreeMap<usize, BTreeSet<VertexRef>> = BTreeMap::new();
    for i in 0..n as u32 {
        if deleted.contains(&i) {
            continue;
        }
        let root = uf.find(i as usize);
        groups.entry(root).or_default().insert(t.name_of(i));
    }
    let mut out: Vec<BTreeSet<VertexRef>> = groups.into_values().collect();
    out.sort_by(|a, b| a.first().cmp(&b.first()));
    out
}

/// Neighbourhood of a vertex set inside the truncation.
pub fn truncated_neighbourhood(t: &Truncation, comp: &BTreeSet<VertexRef>) -> BTreeSet<VertexRef> {
    let mut n = BTreeSet::new();
    for &(a, b) in &t.graph.edges {
        let (va, vb) = (t.name_of(a), t.name_of(b));
        if comp.contains(&va) && !comp.contains(&vb) {
            n.insert(vb);
        }
        if comp.contains(&vb) && !comp.contains(&va) {
            n.insert(va);
        }
    }
    n
}

/// Restriction of a symbolic decomposition to the truncation: every explicit
/// component clipped to materialized vertices, plus each bundle member that
/// is materialized, empties dropped.
pub fn restrict_decomposition(
    p: &Presentation,
    d: &ComponentDecomposition,
    t: &Truncation,
) -> Vec<BTreeSet<VertexRef>> {
    let mut out = Vec::new();
    for c in &d.explicit {
        let r: BTreeSet<VertexRef> = c
            .restrict_to_truncation(t.depth, t.copies)
            .into_iter()
            .filter(|v| t.contains(*v))
            .collect();
        if !r.is_empty() {
            out.push(r);
        }
    }
    for (bi, b) in d.bundles.iter().enumerate() {
        let level_ok = b.level.is_none_or(|lvl| lvl <= t.depth);
        if !level_ok {
            continue;
        }
        for copy in 0..t.copies {
            if !b.selects(copy) {
                continue;
            }
            let r: BTreeSet<VertexRef> = d
                .bundle_copy_vertices(p, bi, copy)
                .restrict_to_truncation(t.depth, t.copies)
                .into_iter()
                .filter(|v| t.contains(*v))
                .collect();
            if !r.is_empty() {
                out.push(r);
            }
        }
    }
    out.sort_by(|a, b| a.first().cmp(&b.first()));
    out
}

/// Compares the symbolic decomposition of `G - X` with brute force on the
/// truncation. Returns a description of the first mismatch.
pub fn check_components_against_truncation(
    p: &Presentation,
    t: &Truncation,
    deleted: &BTreeSet<VertexRef>,
) -> Result<(), String> {
    let d = delete_and_decompose(p, deleted).map_err(|e| e.to_string())?;
    let symbolic = restrict_decomposition(p, &d, t);
    let idx: BTreeSet<u32> = deleted.iter().filter_map(|&v| t.index_of(v)).collect();
    if idx.len() != deleted.len() {
        return Err("deleted set not fully materialized".into());
    }
    let brute = components_after_deletion(t, &idx);
    if symbolic == brute {
        return Ok(());
    }
    for (i, (s, b)) in symbolic.iter().zip(brute.iter()).enumerate() {
        if s != b {
            return Err(format!(
                "component {i} differs for X={deleted:?}: symbolic {s:?} vs brute {b:?}"
            ));
        }
    }
    Err(format!(
        "component count differs for X={:?}: symbolic {} vs brute {}",
        deleted,
        symbolic.len(),
        brute.len()
    ))
}

/// Finite sets that look critical at truncation scale: at least `threshold`
/// components of the truncation minus `x` have neighbourhood exactly `x`.
pub fn looks_critical(t: &Truncation, x: &BTreeSet<VertexRef>, threshold: usize) -> bool {
    let idx: BTreeSet<u32> = x.iter().filter_map(|&v| t.index_of(v)).collect();
    if idx.len() != x.len() {
        return false;
    }
    let mut hits = 0usize;
    for comp in components_after_deletion(t, &idx) {
        if truncated_neighbourhood(t, &comp) == *x {
            hits += 1;
            if hits >= threshold {
                return true;
            }
        }
    }
    false
}

/// All subsets of the truncation's vertices of size at most `max_size` with
/// at least `threshold` components whose truncated neighbourhood is exactly
/// the subset. Exponential; meant for desk-scale cross-checks only.
pub fn brute_force_critical_sets(
    t: &Truncation,
    max_size: usize,
    threshold: usize,
) -> Vec<BTreeSet<VertexRef>> {
    let n = t.vertex_count();
    let edges: Vec<(u32, u32)> = t.graph.edges.iter().copied().collect();
    assert!(max_size <= 8, "deleted-set masks are u8-indexed");
    let mut found = Vec::new();
    let mut deleted_pos = vec![u8::MAX; n];
    let mut parent: Vec<u32> = vec![0; n];
    let mut comp_mask: Vec<u8> = vec![0; n];
    let mut subset: Vec<usize> = Vec::new();

    fn find(parent: &mut [u32], mut x: u32) -> u32 {
        while parent[x as usize] != x {
            parent[x as usize] = parent[parent[x as usize] as usize];
            x = parent[x as usize];
        }
        x
    }

    #[allow(clippy::too_many_arguments)]
    fn check(
        t: &Truncation,
        edges: &[(u32, u32)],
        deleted_pos: &[u8],
        parent: &mut [u32],
        comp_mask: &mut [u8],
        subset: &[usize],
        threshold: usize,
        found: &mut Vec<BTreeSet<VertexRef>>,
    ) {
        let n = deleted_pos.len();
        for (i, slot) in parent.iter_mut().enumerate().take(n) {
            *slot = i as u32;
        }
        for &(a, b) in edges {
            if deleted_pos[a as usize] == u8::MAX && deleted_pos[b as usize] == u8::MAX {
                let (ra, rb) = (find(parent, a), find(parent, b));
                if ra != rb {
                    parent[ra as usize] = rb;
                }
            }
        }
        comp_mask.iter_mut().for_each(|m| *m = 0);
        // Which subset members each surviving component touches, and whether
        // it touches anything outside the subset (it cannot, by definition
        // of deletion), tracked as a bitmask over subset positions.
        for &(a, b) in edges {
            let (da, db) = (deleted_pos[a as usize], deleted_pos[b as usize]);
            match (da == u8::MAX, db == u8::MAX) {
                (true, false) => {
                    let r = find(parent, a) as usize;
                    comp_mask[r] |= 1 << db;
                }
                (false, true) => {
                    let r = find(parent, b) as usize;
                    comp_mask[r] |= 1 << da;
                }
                _ => {}
            }
        }
        let full: u8 = if subset.len() == 8 { u8::MAX } else { (1 << subset.len()) - 1 };
        let mut hits = 0usize;
        for i in 0..n {
            if deleted_pos[i] == u8::MAX && find(parent, i as u32) as usize == i
                && comp_mask[i] == full {
                    hits += 1;
                    if hits >= threshold {
                        found.push(subset.iter().map(|&v| t.name_of(v as u32)).collect());
                        return;
                    }
                }
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn rec(
        t: &Truncation,
        edges: &[(u32, u32)],
        max_size: usize,
        threshold: usize,
        start: usize,
        deleted_pos: &mut Vec<u8>,
        parent: &mut Vec<u32>,
        comp_mask: &mut Vec<u8>,
        subset: &mut Vec<usize>,
        found: &mut Vec<BTreeSet<VertexRef>>,
    ) {
        if !subset.is_empty() {
            check(t, edges, deleted_pos, parent, comp_mask, subset, threshold, found);
        }
        if subset.len() == max_size {
            return;
        }
        let n = deleted_pos.len();
        for i in start..n {
            deleted_pos[i] = subset.len() as u8;
            subset.push(i);
            rec(
                t, edges, max_size, threshold, i + 1, deleted_pos, parent, comp_mask, subset,
                found,
            );
            subset.pop();
            deleted_pos[i] = u8::MAX;
        }
    }

    rec(
        t,
        &edges,
        max_size,
        threshold,
        0,
        &mut deleted_pos,
        &mut parent,
        &mut comp_mask,
        &mut subset,
        &mut found,
    );
    found.sort();
    found
}
