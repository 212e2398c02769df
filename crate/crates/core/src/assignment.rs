//! Strongly admissible component assignments over the critical vertex sets,
//! and the principal tree set they induce.
//!
//! For every critical vertex set `X` the assignment keeps the components of
//! `G - X` whose neighbourhood is exactly `X`, minus at most one excluded
//! component and minus the finitely many components meeting the target set.
//! The exclusion choices must be *admissible*: for incomparable critical
//! sets `X`, `Y`, at most one of the two cross components `C_X(Y)`,
//! `C_Y(X)` may be kept. A heuristic choice (the component holding the
//! spine tail, else the one holding the least surviving kernel vertex,
//! subtracted only when it has full neighbourhood) almost always works; a
//! bounded backtracking search over explicit components covers the rest,
//! and an independent verifier has the final word either way.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corridor::{
    consistency_violation, verify_tree_set, MemberRule, SeparationFamily,
};
use crate::decompose::{
    critical_sets, delete_and_decompose, ComponentDecomposition, ComponentId, CriticalPattern,
};
use crate::presentation::{Presentation, TargetSet};
use crate::separation::OrientedSeparation;
use crate::symbolic::SymbolicVertexSet;
use crate::vertex::{ClassRef, VertexRef};

/// Names one component of some `G - X` in a way that is stable across
/// parameters of a graded pattern.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum ComponentRef {
    /// The explicit component containing the spine tail.
    Tail,
    /// The explicit component containing the given vertex.
    Containing(VertexRef),
    /// One whole copy of a free bundle.
    BundleCopy {
        class: ClassRef,
        level: Option<u32>,
        copy: u32,
    },
}

impl ComponentRef {
    pub fn resolve(&self, d: &ComponentDecomposition) -> Option<ComponentId> {
        match self {
            ComponentRef::Tail => d.tail_component.map(ComponentId::Explicit),
            ComponentRef::Containing(v) => d.component_of(*v),
            ComponentRef::BundleCopy { class, level, copy } => {
                d.bundles.iter().position(|b| {
                    b.class == *class && b.level == *level && b.selects(*copy)
                })
                .map(|bi| ComponentId::BundleCopy(bi, *copy))
            }
        }
    }
}

/// Exclusion and target-removal choices for one explicit critical set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ExplicitAssignment {
    pub set: BTreeSet<VertexRef>,
    /// Excluded full-neighbourhood component, when one must be excluded.
    #[serde(default)]
    pub excluded: Option<ComponentRef>,
    /// Components meeting the target set, removed in the second stage.
    #[serde(default)]
    pub u_removed: Vec<ComponentRef>,
}

/// Parametric choices for one graded window family. The exclusion applies at
/// every level parameter; components meeting the target set are removed per
/// instantiation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct GradedAssignment {
    pub class: u32,
    #[serde(default)]
    pub excluded: Option<ComponentRef>,
    /// Whether the target-meeting components are removed per parameter.
    pub remove_target_meeting: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct AdmissibleAssignment {
    pub explicit: Vec<ExplicitAssignment>,
    pub graded: Vec<GradedAssignment>,
}

#[derive(Debug, Error)]
pub enum AssignmentError {
    #[error("backtracking over excluded-component choices exhausted without an admissible assignment")]
    SearchExhausted,
    #[error("assignment stage failed an internal assertion: {0}")]
    AssertionFailure(String),
}

/// Critical patterns with explicit sets that duplicate a graded window
/// instance removed; the graded rule covers those sets.
pub fn deduped_patterns(p: &Presentation) -> (Vec<CriticalPattern>, Vec<CriticalPattern>) {
    let pats = critical_sets(p);
    let graded: Vec<CriticalPattern> = pats
        .iter()
        .filter(|pt| matches!(pt, CriticalPattern::Graded { .. }))
        .cloned()
        .collect();
    let window_budget = 2 * p.max_band_width() + 4;
    let explicit: Vec<CriticalPattern> = pats
        .into_iter()
        .filter(|pt| match pt {
            CriticalPattern::Explicit { set, .. } => {
                let max_level = set.iter().filter_map(|v| v.spine_level()).max().unwrap_or(0);
                !graded.iter().any(|gp| {
                    (0..=max_level + window_budget)
                        .any(|n| gp.instantiate(p, Some(n)) == *set)
                })
            }
            _ => false,
        })
        .collect();
    (explicit, graded)
}

/// The components of the decomposition meeting the target set: explicit
/// components with nonempty symbolic intersection plus bundle copies holding
/// explicit target vertices. Finite whenever the target is tough.
pub fn target_meeting_refs(
    d: &ComponentDecomposition,
    target: &TargetSet,
    target_set: &SymbolicVertexSet,
) -> Vec<ComponentRef> {
    let mut out = Vec::new();
    for c in &d.explicit {
        if c.intersects(target_set) {
            out.push(ComponentRef::Containing(c.min_vertex().unwrap()));
        }
    }
    for &v in &target.explicit {
        if let Some(ComponentId::BundleCopy(bi, copy)) = d.component_of(v) {
            let b = &d.bundles[bi];
            let r = ComponentRef::BundleCopy { class: b.class, level: b.level, copy };
            if !out.contains(&r) {
                out.push(r);
            }
        }
    }
    out
}

/// Union of the kept components: the full-neighbourhood components of the
/// decomposition, minus the excluded component and the removed ones.
/// Subtracting a component without full neighbourhood, or a reference that
/// names nothing, is a harmless no-op: downstream checks judge the kept
/// family itself, never the bookkeeping.
pub fn kept_small_side(
    p: &Presentation,
    d: &ComponentDecomposition,
    excluded: Option<&ComponentRef>,
    removed: &[ComponentRef],
) -> SymbolicVertexSet {
    let mut small = SymbolicVertexSet::default();
    for (bi, b) in d.bundles.iter().enumerate() {
        if b.neighbourhood == d.deleted {
            small = small.union(&d.bundle_vertices(p, bi));
        }
    }
    for i in crate::decompose::exact_explicit_indices(p, d) {
        small = small.union(&d.explicit[i]);
    }
    for r in excluded.into_iter().chain(removed) {
        if let Some(id) = r.resolve(d) {
            small = small.difference(&d.component_vertices(p, id));
        }
    }
    small
}

/// The oriented separation `(kept components, X)` for one critical set;
/// `None` when the set references invalid vertices.
pub fn principal_separation(
    p: &Presentation,
    set: &BTreeSet<VertexRef>,
    excluded: Option<&ComponentRef>,
    removed: &[ComponentRef],
) -> Option<OrientedSeparation> {
    let d = delete_and_decompose(p, set).ok()?;
    let small = kept_small_side(p, &d, excluded, removed);
    Some(OrientedSeparation::new(set.clone(), small))
}

/// Heuristic exclusion for one decomposition: the tail component when a
/// spine exists, else the component with the least surviving kernel vertex,
/// else the first explicit component, else one bundle copy. Subtraction is a
/// no-op unless the chosen component has full neighbourhood.
fn heuristic_exclusion(p: &Presentation, d: &ComponentDecomposition) -> Option<ComponentRef> {
    if p.has_spine && d.tail_component.is_some() {
        return Some(ComponentRef::Tail);
    }
    for i in 0..p.kernel.vertex_count {
        let v = VertexRef::Kernel(i);
        if !d.deleted.contains(&v) {
            return Some(ComponentRef::Containing(v));
        }
    }
    if let Some(c) = d.explicit.first() {
        return Some(ComponentRef::Containing(c.min_vertex().unwrap()));
    }
    d.bundles.first().map(|b| ComponentRef::BundleCopy {
        class: b.class,
        level: b.level,
        copy: b.min_copy(),
    })
}

/// Exclusion candidates for backtracking: no exclusion, every explicit
/// component, then a bundle copy as a last resort.
fn exclusion_candidates(d: &ComponentDecomposition) -> Vec<Option<ComponentRef>> {
    let mut out: Vec<Option<ComponentRef>> = vec![None];
    out.extend(
        d.explicit
            .iter()
            .map(|c| Some(ComponentRef::Containing(c.min_vertex().unwrap()))),
    );
    if let Some(b) = d.bundles.first() {
        out.push(Some(ComponentRef::BundleCopy {
            class: b.class,
            level: b.level,
            copy: b.min_copy(),
        }));
    }
    out
}

/// Whether the two kept small sides violate the admissibility disjunction
/// for incomparable sets: both cross components kept.
pub fn admissibility_conflict(
    x: &BTreeSet<VertexRef>,
    small_x: &SymbolicVertexSet,
    y: &BTreeSet<VertexRef>,
    small_y: &SymbolicVertexSet,
) -> bool {
    if x.is_subset(y) || y.is_subset(x) {
        return false;
    }
    let y_minus_x = SymbolicVertexSet::from_vertices(y.difference(x).copied());
    let x_minus_y = SymbolicVertexSet::from_vertices(x.difference(y).copied());
    small_x.intersects(&y_minus_x) && small_y.intersects(&x_minus_y)
}

/// Horizon for instantiating graded patterns when checking pairwise
/// conditions: twice the saturation level plus two.
pub fn pattern_horizon(p: &Presentation, target: &TargetSet) -> u32 {
    let pats = critical_sets(p);
    let mut mentioned: Vec<VertexRef> = Vec::new();
    for pt in &pats {
        if let CriticalPattern::Explicit { set, .. } = pt {
            mentioned.extend(set.iter().copied());
        }
    }
    let n_star = p.saturation_level(mentioned.iter(), target);
    2 * n_star + 2
}

/// Builds a strongly admissible assignment before target-removal: exactly
/// one component excluded per critical set, the exclusion choices pairwise
/// admissible.
pub fn build_strongly_admissible(p: &Presentation) -> Result<AdmissibleAssignment, AssignmentError> {
    let (explicit_pats, graded_pats) = deduped_patterns(p);
    let horizon = pattern_horizon(p, &TargetSet::default());

    // Graded families always exclude the tail: their cross components toward
    // higher windows sit in the tail component.
    let graded: Vec<GradedAssignment> = graded_pats
        .iter()
        .map(|pt| {
            let CriticalPattern::Graded { class, .. } = pt else { unreachable!() };
            GradedAssignment {
                class: *class,
                excluded: Some(ComponentRef::Tail),
                remove_target_meeting: true,
            }
        })
        .collect();

    // Pre-compute per-explicit-set data.
    struct Slot {
        set: BTreeSet<VertexRef>,
        decomposition: ComponentDecomposition,
        candidates: Vec<Option<ComponentRef>>,
    }
    let mut slots: Vec<Slot> = Vec::new();
    for pt in &explicit_pats {
        let CriticalPattern::Explicit { set, .. } = pt else { unreachable!() };
        let d = delete_and_decompose(p, set)
            .map_err(|e| AssignmentError::AssertionFailure(e.to_string()))?;
        let mut candidates = exclusion_candidates(&d);
        if let Some(h) = heuristic_exclusion(p, &d) {
            if let Some(pos) = candidates
                .iter()
                .position(|c| c.as_ref().map(|c| c.resolve(&d)) == Some(h.resolve(&d)))
            {
                candidates.remove(pos);
            }
            candidates.insert(0, Some(h));
        }
        if candidates.is_empty() {
            return Err(AssignmentError::AssertionFailure(format!(
                "no exclusion candidate for {set:?}"
            )));
        }
        slots.push(Slot { set: set.clone(), decomposition: d, candidates });
    }

    // Graded instances that explicit choices must stay admissible against.
    let mut graded_instances: Vec<(BTreeSet<VertexRef>, SymbolicVertexSet)> = Vec::new();
    for ga in &graded {
        for n in 0..=horizon {
            let set = p.graded(ga.class).window_vertices(n);
            if slots.iter().any(|s| s.set == set) {
                continue;
            }
            let Some(sep) = principal_separation(p, &set, ga.excluded.as_ref(), &[]) else {
                return Err(AssignmentError::AssertionFailure(format!(
                    "graded exclusion unresolvable at level {n}"
                )));
            };
            graded_instances.push((set, sep.small_side));
        }
    }
    for (i, (xs, xsmall)) in graded_instances.iter().enumerate() {
        for (ys, ysmall) in graded_instances.iter().skip(i + 1) {
            if admissibility_conflict(xs, xsmall, ys, ysmall) {
                return Err(AssignmentError::SearchExhausted);
            }
        }
    }

    // Depth-first search over explicit exclusions, heuristic first.
    let mut chosen: Vec<usize> = Vec::new();
    let mut small_sides: Vec<SymbolicVertexSet> = Vec::new();
    let mut next_candidate = 0usize;
    let mut steps = 0usize;
    const STEP_BUDGET: usize = 100_000;

    fn admissible_so_far(
        slots: &[(BTreeSet<VertexRef>, SymbolicVertexSet)],
        graded_instances: &[(BTreeSet<VertexRef>, SymbolicVertexSet)],
        new: &(BTreeSet<VertexRef>, SymbolicVertexSet),
    ) -> bool {
        slots
            .iter()
            .chain(graded_instances.iter())
            .all(|(ys, ysmall)| !admissibility_conflict(&new.0, &new.1, ys, ysmall))
    }

    loop {
        steps += 1;
        if steps > STEP_BUDGET {
            return Err(AssignmentError::SearchExhausted);
        }
        if chosen.len() == slots.len() {
            break;
        }
        // Try candidates for the current slot starting at `next_candidate`,
        // backtracking when none fits.
        let depth = chosen.len();
        let slot = &slots[depth];
        let from = next_candidate;
        next_candidate = 0;
        let mut advanced = false;
        for ci in from..slot.candidates.len() {
            let cand = slot.candidates[ci].as_ref();
            let small = kept_small_side(p, &slot.decomposition, cand, &[]);
            if small.is_empty() {
                continue;
            }
            let trial = (slot.set.clone(), small);
            let so_far: Vec<(BTreeSet<VertexRef>, SymbolicVertexSet)> = chosen
                .iter()
                .enumerate()
                .map(|(d, _)| (slots[d].set.clone(), small_sides[d].clone()))
                .collect();
            if admissible_so_far(&so_far, &graded_instances, &trial) {
                chosen.push(ci);
                small_sides.push(trial.1);
                advanced = true;
                break;
            }
        }
        if !advanced {
            let Some(prev) = chosen.pop() else {
                return Err(AssignmentError::SearchExhausted);
            };
            small_sides.pop();
            next_candidate = prev + 1;
        }
    }

    let explicit: Vec<ExplicitAssignment> = slots
        .iter()
        .zip(&chosen)
        .map(|(slot, &ci)| ExplicitAssignment {
            set: slot.set.clone(),
            excluded: slot.candidates[ci].clone(),
            u_removed: Vec::new(),
        })
        .collect();
    Ok(AdmissibleAssignment { explicit, graded })
}

/// The principal tree set: family of separations `(kept(X), X)` over all
/// critical sets, with target-meeting components removed.
#[derive(Clone, Debug)]
pub struct PrincipalTreeSet {
    pub assignment: AdmissibleAssignment,
    pub family: SeparationFamily,
    pub horizon: u32,
}

/// Finishes an assignment against a target set and assembles the family.
/// The target must be tough (no class masks).
pub fn build_principal_tree_set(
    p: &Presentation,
    target: &TargetSet,
) -> Result<PrincipalTreeSet, AssignmentError> {
    let mut assignment = build_strongly_admissible(p)?;
    let target_set = target.vertex_set();
    let horizon = pattern_horizon(p, target);

    for ea in &mut assignment.explicit {
        let d = delete_and_decompose(p, &ea.set)
            .map_err(|e| AssignmentError::AssertionFailure(e.to_string()))?;
        ea.u_removed = target_meeting_refs(&d, target, &target_set);
    }

    let family = assignment_family(p, target, &assignment, horizon)?;

    // The kept components must avoid the target entirely and leave a proper
    // separation on both sides.
    for (id, sep) in family.members() {
        if sep.small_side.intersects(&target_set) {
            return Err(AssignmentError::AssertionFailure(format!(
                "{id:?}: kept components meet the target set"
            )));
        }
        if sep.small_side.is_empty() {
            return Err(AssignmentError::AssertionFailure(format!(
                "{id:?}: no components kept"
            )));
        }
    }
    let report = verify_tree_set(p, &family);
    if !report.all_ok() {
        return Err(AssignmentError::AssertionFailure(format!(
            "principal family fails tree-set axioms: {:?}",
            report.violations
        )));
    }
    if let Some((a, b)) = consistency_violation(p, &family.members()) {
        return Err(AssignmentError::AssertionFailure(format!(
            "orientation inconsistent: {a:?} vs {b:?}"
        )));
    }
    Ok(PrincipalTreeSet { assignment, family, horizon })
}

/// The separation family induced by an assignment (explicit members plus one
/// rule per graded family), usable by constructors and verifiers alike.
pub fn assignment_family(
    p: &Presentation,
    target: &TargetSet,
    assignment: &AdmissibleAssignment,
    horizon: u32,
) -> Result<SeparationFamily, AssignmentError> {
    let mut explicit = Vec::new();
    for ea in &assignment.explicit {
        let sep = principal_separation(p, &ea.set, ea.excluded.as_ref(), &ea.u_removed)
            .ok_or_else(|| {
                AssignmentError::AssertionFailure(format!("unresolvable exclusion for {:?}", ea.set))
            })?;
        explicit.push(sep);
    }
    let explicit_sets: Vec<BTreeSet<VertexRef>> =
        assignment.explicit.iter().map(|ea| ea.set.clone()).collect();
    let mut rules = Vec::new();
    for ga in &assignment.graded {
        if ga.class as usize >= p.graded_classes.len() {
            return Err(AssignmentError::AssertionFailure(format!(
                "graded assignment references unknown class {}",
                ga.class
            )));
        }
        let p = p.clone();
        let target = target.clone();
        let ga = ga.clone();
        let explicit_sets = explicit_sets.clone();
        let class = ga.class;
        rules.push(MemberRule::new(format!("principal-g{class}"), 0, move |n| {
            let set = p.graded(class).window_vertices(n);
            if explicit_sets.contains(&set) {
                // Set owned by an explicit pattern; repeat that member so the
                // rule stays total (duplicates are harmless to the family).
            }
            let d = delete_and_decompose(&p, &set).expect("window vertices are valid");
            let removed = if ga.remove_target_meeting {
                target_meeting_refs(&d, &target, &target.vertex_set())
            } else {
                Vec::new()
            };
            let small = kept_small_side(&p, &d, ga.excluded.as_ref(), &removed);
            OrientedSeparation::new(set, small)
        }));
    }
    Ok(SeparationFamily { explicit, rules, horizon })
}
