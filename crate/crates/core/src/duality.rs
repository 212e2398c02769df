//! The decision procedure and certificate constructors.
//!
//! For a presented graph and target set exactly one side holds: either some
//! replicated class carries the target into infinitely many components over
//! a critical vertex set (yielding an undominating star attached to the
//! target), or the target is tough, in which case the principal tree set
//! yields both a tough subgraph containing the target and a tame
//! star-decomposition with the target in the central part. Every constructed
//! certificate is re-verified before being returned.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::assignment::{build_principal_tree_set, AssignmentError, PrincipalTreeSet};
use crate::certificate::{
    spine_rule, CertificatePayload, CopySelector, DichotomyCertificate, ElementProvenance,
    LinkagePath, StarDecompositionCertificate, StarElement, StarTailRule,
    ToughSubgraphCertificate, UndominatingStarCertificate,
};
use crate::corridor::{family_part, parliament, parliament_corridors, CorridorTarget, TreeSetError};
use crate::decompose::delete_and_decompose;
use crate::presentation::{Presentation, TargetSet};
use crate::symbolic::SymbolicVertexSet;
use crate::vertex::{ClassRef, VertexRef};

#[derive(Debug, Error)]
pub enum DualityError {
    #[error(transparent)]
    Assignment(#[from] AssignmentError),
    #[error(transparent)]
    TreeSet(#[from] TreeSetError),
    #[error("no B-path available between {0} and {1}")]
    NoBPath(VertexRef, VertexRef),
    #[error("constructed certificate rejected at check {stage}: {detail}")]
    CheckerRejected { stage: String, detail: String },
    #[error("internal error: {0}")]
    Internal(String),
}

/// Witness for the non-tough side: a class whose copies meet the target in
/// every copy, over the named critical vertex set.
#[derive(Clone, Debug, PartialEq)]
pub struct NotToughWitness {
    pub class: ClassRef,
    pub level: Option<u32>,
    pub witness: BTreeSet<VertexRef>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Toughness {
    Tough,
    NotTough(NotToughWitness),
}

/// Decides toughness of the target set: not tough exactly when some class
/// mask is nonempty, making infinitely many components over that class's
/// critical vertex set meet the target. The first witness in canonical class
/// order is reported.
pub fn toughness(p: &Presentation, target: &TargetSet) -> Toughness {
    for class in p.class_refs() {
        if target.mask_for(class).is_none() {
            continue;
        }
        let (level, witness) = match class {
            ClassRef::Fan(c) => (None, p.fan(c).anchors()),
            ClassRef::Graded(g) => (Some(0), p.graded(g).window_vertices(0)),
        };
        return Toughness::NotTough(NotToughWitness { class, level, witness });
    }
    Toughness::Tough
}

/// Builds the undominating-star certificate for a non-tough witness: the
/// least witness vertex becomes the center, each selected copy contributes
/// the shortest template path from an attachment local of the center to a
/// masked target local.
pub fn extract_undominating_star(
    p: &Presentation,
    target: &TargetSet,
    w: &NotToughWitness,
) -> Result<UndominatingStarCertificate, DualityError> {
    let center = *w
        .witness
        .iter()
        .next()
        .ok_or_else(|| DualityError::Internal("empty witness set".into()))?;
    let mask = target
        .mask_for(w.class)
        .ok_or_else(|| DualityError::Internal("witness class has no mask".into()))?;
    let (template, anchored_locals) = match w.class {
        ClassRef::Fan(c) => {
            let fc = p.fan(c);
            (&fc.template, fc.attached_locals(center))
        }
        ClassRef::Graded(g) => {
            let gc = p.graded(g);
            (&gc.template, gc.attachment_locals.clone())
        }
    };
    let mut best: Option<Vec<u32>> = None;
    for &a in &anchored_locals {
        for &b in mask {
            if let Some(path) = template.shortest_path(a, b) {
                let better = match &best {
                    None => true,
                    Some(cur) => (path.len(), &path) < (cur.len(), cur),
                };
                if better {
                    best = Some(path);
                }
            }
        }
    }
    let local_path =
        best.ok_or_else(|| DualityError::Internal("template has no path to a mask local".into()))?;
    let exceptions: BTreeSet<u32> = target
        .explicit
        .iter()
        .filter_map(|v| match (*v, w.class) {
            (VertexRef::Fan { class, copy, .. }, ClassRef::Fan(c)) if class == c => Some(copy),
            (VertexRef::Graded { class, level, copy, .. }, ClassRef::Graded(g))
                if class == g && Some(level) == w.level =>
            {
                Some(copy)
            }
            _ => None,
        })
        .collect();
    Ok(UndominatingStarCertificate {
        center,
        witness_x: w.witness.clone(),
        class: w.class,
        level: w.level,
        local_path,
        copy_selector: CopySelector::AllButFinitely { exceptions },
    })
}

/// The part defined by the principal orientation, extended by the explicit
/// target vertices (which it already contains by construction).
pub fn compute_part(
    p: &Presentation,
    pts: &PrincipalTreeSet,
    target: &TargetSet,
) -> Result<SymbolicVertexSet, TreeSetError> {
    let part = family_part(p, &pts.family)?;
    Ok(part.union(&SymbolicVertexSet::from_vertices(target.explicit.iter().copied())))
}

/// Pairs of part vertices lying together in some critical vertex set but not
/// covered by the canonical spine rule, in canonical order.
fn explicit_pair_pool(
    p: &Presentation,
    pts: &PrincipalTreeSet,
    part: &SymbolicVertexSet,
) -> Vec<(VertexRef, VertexRef)> {
    let mut pool: BTreeSet<(VertexRef, VertexRef)> = BTreeSet::new();
    for ea in &pts.assignment.explicit {
        let members: Vec<VertexRef> = ea
            .set
            .iter()
            .copied()
            .filter(|&v| part.contains(v))
            .collect();
        for (ai, &a) in members.iter().enumerate() {
            for &b in &members[ai + 1..] {
                let graded_pair = match (a, b) {
                    (VertexRef::Spine(i), VertexRef::Spine(j)) => {
                        spine_rule::connector_slot(p, i.min(j), i.max(j)).is_some()
                    }
                    _ => false,
                };
                if !graded_pair {
                    pool.insert((a, b));
                }
            }
        }
    }
    pool.into_iter().collect()
}

/// Greedy linkage path for one explicit pair: among copies of fan classes
/// anchored at both endpoints, minimize the number of new edges against the
/// linkage built so far, ties broken by the canonical vertex sequence.
fn explicit_pair_path(
    p: &Presentation,
    part: &SymbolicVertexSet,
    used_edges: &BTreeSet<(VertexRef, VertexRef)>,
    reserved: &mut BTreeMap<u32, u32>,
    pair: (VertexRef, VertexRef),
) -> Result<LinkagePath, DualityError> {
    let (x, y) = pair;
    let mut best: Option<(usize, Vec<VertexRef>)> = None;
    for (c, fc) in p.fan_classes.iter().enumerate() {
        let c = c as u32;
        let anchors = fc.anchors();
        if !anchors.contains(&x) || !anchors.contains(&y) {
            continue;
        }
        // Template route between locals attached to the two endpoints.
        let mut route: Option<Vec<u32>> = None;
        for &lx in &fc.attached_locals(x) {
            for &ly in &fc.attached_locals(y) {
                if let Some(r) = fc.template.shortest_path(lx, ly) {
                    let better = match &route {
                        None => true,
                        Some(cur) => (r.len(), &r) < (cur.len(), cur),
                    };
                    if better {
                        route = Some(r);
                    }
                }
            }
        }
        let Some(route) = route else { continue };
        // Candidate copies: every copy used so far plus the next fresh one.
        let mut candidates: Vec<u32> = used_edges
            .iter()
            .flat_map(|(u, v)| [u, v])
            .filter_map(|v| match v {
                VertexRef::Fan { class, copy, .. } if *class == c => Some(*copy),
                _ => None,
            })
            .collect();
        candidates.sort_unstable();
        candidates.dedup();
        let fresh_start = reserved.get(&c).copied().unwrap_or(0);
        if let Some(fresh) = (fresh_start..)
            .find(|&k| !part.fan_copy_intersects(c, k) && !candidates.contains(&k))
        {
            candidates.push(fresh);
        }
        for copy in candidates {
            let vertices: Vec<VertexRef> = std::iter::once(x)
                .chain(route.iter().map(|&local| VertexRef::Fan { class: c, copy, local }))
                .chain(std::iter::once(y))
                .collect();
            if vertices[1..vertices.len() - 1].iter().any(|v| part.contains(*v)) {
                continue;
            }
            let cost = vertices
                .windows(2)
                .filter(|w| {
                    let e = edge_key(w[0], w[1]);
                    !used_edges.contains(&e)
                })
                .count();
            let better = match &best {
                None => true,
                Some((bc, bv)) => (cost, &vertices) < (*bc, bv),
            };
            if better {
                best = Some((cost, vertices));
            }
        }
    }
    let (_, path) = best.ok_or(DualityError::NoBPath(x, y))?;
    if let VertexRef::Fan { class, copy, .. } = path[1] {
        let slot = reserved.entry(class).or_insert(0);
        *slot = (*slot).max(copy + 1);
    }
    Ok(LinkagePath { path })
}

fn edge_key(a: VertexRef, b: VertexRef) -> (VertexRef, VertexRef) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Builds the tough-subgraph certificate: the principal part plus a linkage
/// of B-paths between part vertices sharing a critical vertex set.
pub fn build_tough_subgraph(
    p: &Presentation,
    target: &TargetSet,
) -> Result<ToughSubgraphCertificate, DualityError> {
    let pts = build_principal_tree_set(p, target)?;
    let part = compute_part(p, &pts, target)?;
    if !target.vertex_set().is_subset(&part) {
        return Err(DualityError::Internal("target escapes the principal part".into()));
    }
    let mut used_edges: BTreeSet<(VertexRef, VertexRef)> = BTreeSet::new();
    let mut reserved: BTreeMap<u32, u32> = BTreeMap::new();
    let mut explicit_paths = Vec::new();
    for pair in explicit_pair_pool(p, &pts, &part) {
        let (x, y) = pair;
        if p.neighbors(x)
            .map_err(|e| DualityError::Internal(e.to_string()))?
            .contains(y)
        {
            continue;
        }
        let path = explicit_pair_path(p, &part, &used_edges, &mut reserved, pair)?;
        for w in path.path.windows(2) {
            used_edges.insert(edge_key(w[0], w[1]));
        }
        explicit_paths.push(path);
    }
    Ok(ToughSubgraphCertificate {
        part_b: part,
        assignment: pts.assignment,
        explicit_paths,
        spine_pair_rule: !p.graded_classes.is_empty(),
    })
}

/// Builds the tame star-decomposition certificate. Finite targets use the
/// subset star over the target's own components; infinite targets go through
/// the parliament of the principal orientation.
pub fn build_star_decomposition(
    p: &Presentation,
    target: &TargetSet,
) -> Result<StarDecompositionCertificate, DualityError> {
    if target.spine_cofinal_from.is_none() {
        return build_finite_target_star(p, target);
    }
    let pts = build_principal_tree_set(p, target)?;
    let part = compute_part(p, &pts, target)?;
    let par = parliament(p, &pts.family)?;
    let structure = parliament_corridors(&pts.family, &par)?;

    let mut elements: Vec<StarElement> = Vec::new();
    let mut tails: Vec<StarTailRule> = Vec::new();
    let mut chain_count = 0usize;
    for c in &structure.corridors {
        match &c.target {
            CorridorTarget::Leaf(sep) => {
                if !elements.iter().any(|e| e.separation == *sep) {
                    elements.push(StarElement {
                        separation: sep.clone(),
                        provenance: ElementProvenance::CorridorLeaf,
                    });
                }
            }
            CorridorTarget::End(chain) => {
                let chain_id = chain_count;
                chain_count += 1;
                let steps = &chain.steps;
                if steps.is_empty() {
                    return Err(DualityError::Internal("empty grade chain".into()));
                }
                elements.push(StarElement {
                    separation: steps[0].clone(),
                    provenance: ElementProvenance::CorridorEnd { chain: chain_id, position: 0 },
                });
                for j in 1..steps.len() {
                    let corner = steps[j].meet(&steps[j - 1].invert(p));
                    elements.push(StarElement {
                        separation: corner,
                        provenance: ElementProvenance::CorridorEnd { chain: chain_id, position: j },
                    });
                }
                tails.push(StarTailRule::CornerChain {
                    chain: chain_id,
                    anchor: steps[0].clone(),
                    from_position: steps.len(),
                });
            }
        }
    }
    for &(rule, from_param) in &structure.leaf_tails {
        let class = pts.assignment.graded[rule].class;
        // Members up to the horizon already appear as leaf corridors; the
        // tail continues past them.
        let from_param = from_param.max(pts.family.horizon + 1);
        tails.push(StarTailRule::LeafFamily { class, from_param });
    }

    let central_part = star_central_part(p, &pts, &elements, &tails)?;
    if !part.is_subset(&central_part) {
        return Err(DualityError::CheckerRejected {
            stage: "partInclusion".into(),
            detail: "principal part escapes the star's central part".into(),
        });
    }
    Ok(StarDecompositionCertificate {
        assignment: Some(pts.assignment),
        elements,
        tails,
        central_part,
    })
}

/// Central part of a star given its explicit elements and tail rules.
pub fn star_central_part(
    p: &Presentation,
    pts: &PrincipalTreeSet,
    elements: &[StarElement],
    tails: &[StarTailRule],
) -> Result<SymbolicVertexSet, DualityError> {
    let mut small = SymbolicVertexSet::default();
    for e in elements {
        small = small.union(&e.separation.small_side);
    }
    for tail in tails {
        let tail_union = match tail {
            StarTailRule::CornerChain { anchor, from_position, .. } => {
                let chain = crate::corridor::GradeChain::from_anchor(
                    &pts.family,
                    anchor.clone(),
                    *from_position + 4,
                )?;
                let top = *from_position as u32 + 3;
                crate::corridor::stable_union(*from_position as u32, top, |j| {
                    let j = j as usize;
                    let hi = chain.step(j).expect("chain step within prefix");
                    let lo = chain.step(j - 1).expect("chain step within prefix");
                    hi.meet(&lo.invert(p)).small_side
                })?
            }
            StarTailRule::LeafFamily { class, from_param } => {
                let rule_idx = pts
                    .assignment
                    .graded
                    .iter()
                    .position(|ga| ga.class == *class)
                    .ok_or_else(|| DualityError::Internal("tail class not in assignment".into()))?;
                let rule = &pts.family.rules[rule_idx];
                let top = pts.family.horizon.max(from_param + 3);
                crate::corridor::stable_union(*from_param, top, |n| {
                    rule.materialize(n).small_side
                })?
            }
        };
        small = small.union(&tail_union);
    }
    Ok(small.complement(p))
}

/// The subset star for a finite target: one element per nonempty subset that
/// is the exact neighbourhood of at least one component.
fn build_finite_target_star(
    p: &Presentation,
    target: &TargetSet,
) -> Result<StarDecompositionCertificate, DualityError> {
    let u: BTreeSet<VertexRef> = target.explicit.clone();
    if u.is_empty() {
        // Degenerate decomposition: a single central part covering the graph.
        return Ok(StarDecompositionCertificate {
            assignment: None,
            elements: Vec::new(),
            tails: Vec::new(),
            central_part: p.universe(),
        });
    }
    let d = delete_and_decompose(p, &u).map_err(|e| DualityError::Internal(e.to_string()))?;
    let mut by_subset: BTreeMap<BTreeSet<VertexRef>, SymbolicVertexSet> = BTreeMap::new();
    for c in &d.explicit {
        let n: BTreeSet<VertexRef> = u
            .iter()
            .copied()
            .filter(|&x| p.edge_between(c, &SymbolicVertexSet::singleton(x)).is_some())
            .collect();
        let entry = by_subset.entry(n).or_default();
        *entry = entry.union(c);
    }
    for (bi, b) in d.bundles.iter().enumerate() {
        let entry = by_subset.entry(b.neighbourhood.clone()).or_default();
        *entry = entry.union(&d.bundle_vertices(p, bi));
    }
    let mut elements = Vec::new();
    for (subset, small) in by_subset {
        if subset.is_empty() {
            return Err(DualityError::Internal(
                "component with empty neighbourhood in a connected graph".into(),
            ));
        }
        elements.push(StarElement {
            separation: crate::separation::OrientedSeparation::new(subset.clone(), small),
            provenance: ElementProvenance::FiniteTarget { subset },
        });
    }
    Ok(StarDecompositionCertificate {
        assignment: None,
        elements,
        tails: Vec::new(),
        central_part: SymbolicVertexSet::from_vertices(u),
    })
}

/// Decides the dichotomy and returns the certificate for the holding side.
/// Certificates are verified before being returned; a verifier rejection is
/// an internal error.
pub fn decide(p: &Presentation, target: &TargetSet) -> Result<DichotomyCertificate, DualityError> {
    let cert = match toughness(p, target) {
        Toughness::NotTough(w) => {
            let star = extract_undominating_star(p, target, &w)?;
            DichotomyCertificate::Star(star)
        }
        Toughness::Tough => {
            let tough_subgraph = build_tough_subgraph(p, target)?;
            let star_decomposition = build_star_decomposition(p, target)?;
            DichotomyCertificate::Tough { tough_subgraph, star_decomposition }
        }
    };
    let payload = match &cert {
        DichotomyCertificate::Star(c) => {
            CertificatePayload::UndominatingStar(c.clone())
        }
        DichotomyCertificate::Tough { tough_subgraph, .. } => {
            CertificatePayload::ToughSubgraph(tough_subgraph.clone())
        }
    };
    let report = crate::verify::verify_payload(p, target, &payload);
    if !report.accepted() {
        return Err(DualityError::CheckerRejected {
            stage: report.first_failure().unwrap_or_default(),
            detail: "fail-closed verification of the primary payload".into(),
        });
    }
    if let DichotomyCertificate::Tough { star_decomposition, .. } = &cert {
        let report = crate::verify::verify_star_decomposition(p, target, star_decomposition);
        if !report.accepted() {
            return Err(DualityError::CheckerRejected {
                stage: report.first_failure().unwrap_or_default(),
                detail: "fail-closed verification of the star-decomposition".into(),
            });
        }
    }
    Ok(cert)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::symbolic::LevelSet;

    #[test]
    fn toughness_of_bundled_instances() {
        let (p, t) = corpus::graded_chain();
        assert_eq!(toughness(&p, &t), Toughness::Tough);
        let (p, t) = corpus::finite_path();
        assert_eq!(toughness(&p, &t), Toughness::Tough);
        let (p, t) = corpus::fan_one_class();
        match toughness(&p, &t) {
            Toughness::NotTough(w) => {
                assert_eq!(w.class, ClassRef::Fan(0));
                assert_eq!(
                    w.witness,
                    [VertexRef::Kernel(0), VertexRef::Kernel(1)].into_iter().collect()
                );
            }
            Toughness::Tough => panic!("masked instance must not be tough"),
        }
    }

    #[test]
    fn masked_graded_witness_is_level_zero() {
        let (p, mut t) = corpus::graded_chain();
        t.class_masks.push(crate::presentation::ClassMask {
            class: ClassRef::Graded(0),
            locals: [0].into_iter().collect(),
        });
        match toughness(&p, &t) {
            Toughness::NotTough(w) => {
                assert_eq!(w.class, ClassRef::Graded(0));
                assert_eq!(w.level, Some(0));
                assert_eq!(w.witness, [VertexRef::Spine(0)].into_iter().collect());
                let cert = extract_undominating_star(&p, &t, &w).unwrap();
                assert_eq!(cert.center, VertexRef::Spine(0));
                assert_eq!(cert.local_path, vec![0]);
            }
            Toughness::Tough => panic!(),
        }
    }

    #[test]
    fn star_extraction_single_vertex_template() {
        let (p, t) = corpus::fan_one_class();
        let Toughness::NotTough(w) = toughness(&p, &t) else { panic!() };
        let cert = extract_undominating_star(&p, &t, &w).unwrap();
        assert_eq!(cert.center, VertexRef::Kernel(0));
        assert_eq!(cert.local_path, vec![0]);
        assert!(cert.copy_selector.is_cofinite());
        let report = crate::verify::verify_undominating_star(&p, &t, &cert);
        assert!(report.accepted(), "{:?}", report.sorted_checks());
    }

    #[test]
    fn star_extraction_longer_template_path() {
        // Template a - b where only b carries the mask and a is attached.
        let mut p = corpus::fan_one_class().0;
        p.fan_classes[0].template = crate::finite_graph::FiniteGraph::with_edges(2, &[(0, 1)]);
        p.fan_classes[0].attachment =
            [(0, VertexRef::Kernel(0)), (0, VertexRef::Kernel(1))].into_iter().collect();
        p.validate().unwrap();
        let t = TargetSet {
            explicit: Default::default(),
            class_masks: vec![crate::presentation::ClassMask {
                class: ClassRef::Fan(0),
                locals: [1].into_iter().collect(),
            }],
            spine_cofinal_from: None,
        };
        let Toughness::NotTough(w) = toughness(&p, &t) else { panic!() };
        let cert = extract_undominating_star(&p, &t, &w).unwrap();
        assert_eq!(cert.local_path, vec![0, 1]);
        assert!(crate::verify::verify_undominating_star(&p, &t, &cert).accepted());
    }

    #[test]
    fn part_of_graded_chain_is_spine() {
        let (p, t) = corpus::graded_chain();
        let pts = build_principal_tree_set(&p, &t).unwrap();
        let part = compute_part(&p, &pts, &t).unwrap();
        let mut spine = SymbolicVertexSet::default();
        spine.spine = LevelSet::tail(0);
        assert_eq!(part, spine);
    }

    #[test]
    fn part_of_empty_orientation_is_everything() {
        let (p, t) = corpus::finite_path();
        let pts = build_principal_tree_set(&p, &t).unwrap();
        let part = compute_part(&p, &pts, &t).unwrap();
        assert_eq!(part, p.universe());
    }

    #[test]
    fn part_of_fan_pair_is_kernel() {
        let (p, t) = corpus::fan_two_classes();
        let pts = build_principal_tree_set(&p, &t).unwrap();
        let part = compute_part(&p, &pts, &t).unwrap();
        assert_eq!(
            part.enumerate_finite().unwrap(),
            (0..3).map(VertexRef::Kernel).collect::<Vec<_>>()
        );
    }

    #[test]
    fn tough_subgraph_of_finite_instance_is_whole_graph() {
        let (p, t) = corpus::finite_path();
        let cert = build_tough_subgraph(&p, &t).unwrap();
        assert_eq!(cert.part_b, p.universe());
        assert!(cert.explicit_paths.is_empty());
        assert!(!cert.spine_pair_rule);
    }

    #[test]
    fn tough_subgraph_fan_pair_no_linkage_needed() {
        // Both critical pairs are kernel edges, so the linkage is empty.
        let (p, t) = corpus::fan_two_classes();
        let cert = build_tough_subgraph(&p, &t).unwrap();
        assert!(cert.explicit_paths.is_empty());
        assert!(crate::verify::verify_tough_subgraph(&p, &t, &cert).accepted());
    }

    #[test]
    fn tough_subgraph_linkage_spine_pairs() {
        // Spine pairs at distance >= 2 get one designated copy each.
        let (p, t) = corpus::graded_chain();
        let cert = build_tough_subgraph(&p, &t).unwrap();
        assert!(cert.spine_pair_rule);
        let lp = spine_rule::designated_path(&p, &t, &cert.part_b, 0, 2).unwrap();
        assert_eq!(lp.path.len(), 3);
        assert_eq!(lp.path[0], VertexRef::Spine(0));
        assert_eq!(lp.path[2], VertexRef::Spine(2));
        match lp.path[1] {
            VertexRef::Graded { class: 0, level: 2, copy: 0, local: 0 } => {}
            other => panic!("unexpected connector {other}"),
        }
        // Adjacent pair is not covered.
        assert!(spine_rule::designated_path(&p, &t, &cert.part_b, 0, 1).is_none());
        // Second pair ending at the same level reserves the next copy.
        let lp13 = spine_rule::designated_path(&p, &t, &cert.part_b, 1, 3).unwrap();
        let lp03 = spine_rule::designated_path(&p, &t, &cert.part_b, 0, 3).unwrap();
        match (lp03.path[1], lp13.path[1]) {
            (
                VertexRef::Graded { level: 3, copy: 0, .. },
                VertexRef::Graded { level: 3, copy: 1, .. },
            ) => {}
            other => panic!("unexpected connectors {other:?}"),
        }
    }

    #[test]
    fn tough_subgraph_explicit_linkage_nonadjacent_pair() {
        // Fan class anchored at the two ends of a path kernel: the pair
        // {k0, k2} is critical but not adjacent, so a copy path links it.
        let p = Presentation {
            kernel: crate::finite_graph::FiniteGraph::with_edges(3, &[(0, 1), (1, 2)]),
            has_spine: false,
            spine_anchor: None,
            fan_classes: vec![crate::presentation::FanClass {
                template: crate::finite_graph::FiniteGraph::new(1),
                attachment: [(0, VertexRef::Kernel(0)), (0, VertexRef::Kernel(2))]
                    .into_iter()
                    .collect(),
            }],
            graded_classes: vec![],
        };
        p.validate().unwrap();
        let t = TargetSet {
            explicit: [VertexRef::Kernel(1)].into_iter().collect(),
            ..Default::default()
        };
        let cert = build_tough_subgraph(&p, &t).unwrap();
        assert_eq!(cert.explicit_paths.len(), 1);
        assert_eq!(cert.explicit_paths[0].path.len(), 3);
        assert!(crate::verify::verify_tough_subgraph(&p, &t, &cert).accepted());
    }

    #[test]
    fn star_decomposition_finite_target() {
        let (p, t) = corpus::finite_path();
        let t = TargetSet {
            explicit: [VertexRef::Kernel(0), VertexRef::Kernel(2)].into_iter().collect(),
            ..t
        };
        let cert = build_star_decomposition(&p, &t).unwrap();
        // Single component k1 with neighbourhood exactly {k0, k2}.
        assert_eq!(cert.elements.len(), 1);
        assert_eq!(
            cert.elements[0].separation.separator,
            [VertexRef::Kernel(0), VertexRef::Kernel(2)].into_iter().collect()
        );
        assert_eq!(
            cert.central_part.enumerate_finite().unwrap(),
            vec![VertexRef::Kernel(0), VertexRef::Kernel(2)]
        );
        assert!(crate::verify::verify_star_decomposition(&p, &t, &cert).accepted());
    }

    #[test]
    fn star_decomposition_single_anchor_target() {
        let (p, _) = corpus::fan_one_class();
        let t = TargetSet {
            explicit: [VertexRef::Kernel(0)].into_iter().collect(),
            ..Default::default()
        };
        let cert = build_star_decomposition(&p, &t).unwrap();
        assert_eq!(cert.elements.len(), 1);
        assert_eq!(
            cert.central_part.enumerate_finite().unwrap(),
            vec![VertexRef::Kernel(0)]
        );
        assert!(crate::verify::verify_star_decomposition(&p, &t, &cert).accepted());
    }

    #[test]
    fn star_decomposition_empty_target_is_trivial() {
        let (p, _) = corpus::fan_one_class();
        let t = TargetSet::default();
        let cert = build_star_decomposition(&p, &t).unwrap();
        assert!(cert.elements.is_empty());
        assert_eq!(cert.central_part, p.universe());
        assert!(crate::verify::verify_star_decomposition(&p, &t, &cert).accepted());
    }

    #[test]
    fn decide_matches_branches() {
        let (p, t) = corpus::fan_one_class();
        assert!(matches!(decide(&p, &t), Ok(DichotomyCertificate::Star(_))));
        let (p, t) = corpus::graded_chain();
        assert!(matches!(decide(&p, &t), Ok(DichotomyCertificate::Tough { .. })));
        let (p, t) = corpus::finite_path();
        match decide(&p, &t).unwrap() {
            DichotomyCertificate::Tough { tough_subgraph, .. } => {
                assert_eq!(tough_subgraph.part_b, p.universe());
            }
            _ => panic!(),
        }
    }

    #[test]
    fn decide_banded_and_mixed() {
        for (p, t) in [corpus::banded_chain(2), corpus::banded_chain(3), corpus::mixed_chain()] {
            assert!(matches!(decide(&p, &t), Ok(DichotomyCertificate::Tough { .. })));
        }
    }
}
