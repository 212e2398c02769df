//! Independent certificate verification.
//!
//! Every verdict here is recomputed from the presentation, the target set
//! and the certificate's own data, using only the graph model, the
//! separation algebra and finite truncations. Hostile certificates are
//! expected: nothing in a certificate is trusted until checked, and
//! rejection is a verdict, not an error.

use std::collections::{BTreeMap, BTreeSet};

use crate::assignment::{
    assignment_family, deduped_patterns, pattern_horizon, AdmissibleAssignment,
    admissibility_conflict, kept_small_side,
};
use crate::certificate::{
    spine_rule, CertificatePayload, DichotomyCertificate, LinkagePath,
    StarDecompositionCertificate, StarTailRule, ToughSubgraphCertificate,
    UndominatingStarCertificate,
};
use crate::corridor::{
    consistency_violation, corridor_partition, family_part, parliament, stable_union, supremum,
    verify_tree_set, GradeChain, SeparationFamily,
};
use crate::decompose::{
    critical_instances, delete_and_decompose, full_neighbourhood_members, CriticalPattern,
};
use crate::oracle;
use crate::presentation::{Presentation, TargetSet};
use crate::separation::{lessish, star_property_violation, OrientedSeparation, Relation};
use crate::symbolic::SymbolicVertexSet;
use crate::truncation::{materialize, DEFAULT_VERTEX_BUDGET};
use crate::union_find::UnionFind;
use crate::vertex::{ClassRef, VertexRef};

/// Truncation defaults for spot checks.
pub const PROBE_DEPTH: u32 = 12;
pub const PROBE_COPIES: u32 = 5;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Deterministic verification outcome: accept exactly when every check
/// passed. Checks are reported sorted by name.
#[derive(Clone, Debug, Default)]
pub struct VerificationReport {
    checks: Vec<CheckResult>,
}

impl VerificationReport {
    pub fn new() -> Self {
        VerificationReport { checks: Vec::new() }
    }

    pub fn record(&mut self, name: &str, passed: bool, detail: impl Into<String>) {
        self.checks.push(CheckResult { name: name.to_string(), passed, detail: detail.into() });
    }

    pub fn pass(&mut self, name: &str) {
        self.record(name, true, "");
    }

    pub fn fail(&mut self, name: &str, detail: impl Into<String>) {
        self.record(name, false, detail);
    }

    pub fn require(&mut self, name: &str, cond: bool, detail: impl Into<String>) -> bool {
        self.record(name, cond, if cond { String::new() } else { detail.into() });
        cond
    }

    pub fn accepted(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(|c| c.passed)
    }

    /// Name of the alphabetically first failing check.
    pub fn first_failure(&self) -> Option<String> {
        self.sorted_checks()
            .into_iter()
            .find(|c| !c.passed)
            .map(|c| c.name)
    }

    pub fn sorted_checks(&self) -> Vec<CheckResult> {
        let mut out = self.checks.clone();
        out.sort_by(|a, b| a.name.cmp(&b.name));
        out
    }

    pub fn merge_as(&mut self, name: &str, sub: &VerificationReport) {
        match sub.sorted_checks().into_iter().find(|c| !c.passed) {
            None => self.pass(name),
            Some(c) => self.fail(name, format!("{}: {}", c.name, c.detail)),
        }
    }
}

// ---------------------------------------------------------------------------
// Undominating star
// ---------------------------------------------------------------------------

pub fn verify_undominating_star(
    p: &Presentation,
    target: &TargetSet,
    cert: &UndominatingStarCertificate,
) -> VerificationReport {
    let mut r = VerificationReport::new();

    let template = match cert.class {
        ClassRef::Fan(c) => {
            if cert.level.is_some() {
                r.fail("wellFormed", "fan witness carries a level");
                return r;
            }
            p.fan_classes.get(c as usize).map(|fc| &fc.template)
        }
        ClassRef::Graded(g) => {
            if cert.level.is_none() {
                r.fail("wellFormed", "graded witness needs a level");
                return r;
            }
            p.graded_classes.get(g as usize).map(|gc| &gc.template)
        }
    };
    let Some(template) = template else {
        r.fail("wellFormed", "witness class does not exist");
        return r;
    };
    let vertices_ok = p.contains_vertex(cert.center)
        && cert.witness_x.iter().all(|&v| p.contains_vertex(v))
        && cert.local_path.iter().all(|&l| l < template.vertex_count);
    if !r.require("wellFormed", vertices_ok, "certificate references invalid vertices") {
        return r;
    }

    r.require(
        "centerInWitness",
        cert.witness_x.contains(&cert.center),
        format!("center {} outside the witness set", cert.center),
    );
    r.require(
        "infinitelyManyLeaves",
        cert.copy_selector.is_cofinite(),
        "a star attached through finitely many copies is finite",
    );

    // The path must start at a local attached to the center and walk along
    // template edges.
    let path_ok = !cert.local_path.is_empty() && {
        let attached = match cert.class {
            ClassRef::Fan(c) => p.fan(c).attached_locals(cert.center).contains(&cert.local_path[0]),
            ClassRef::Graded(g) => {
                let gc = p.graded(g);
                gc.attachment_locals.contains(&cert.local_path[0])
                    && cert
                        .center
                        .spine_level()
                        .is_some_and(|m| gc.window.contains(cert.level.unwrap(), m))
            }
        };
        attached
            && cert
                .local_path
                .windows(2)
                .all(|w| template.has_edge(w[0], w[1]))
    };
    r.require("starPathValid", path_ok, "path does not run from the center along the template");

    let distinct = {
        let mut seen = BTreeSet::new();
        cert.local_path.iter().all(|l| seen.insert(*l))
    };
    r.require("pathInternallyDisjoint", distinct, "template path repeats a local");

    let leaf_in_target = cert
        .local_path
        .last()
        .is_some_and(|l| target.mask_for(cert.class).is_some_and(|m| m.contains(l)));
    r.require(
        "leavesInTarget",
        leaf_in_target,
        "path leaves are not target vertices in every copy",
    );

    // Every selected copy must be a whole component of G - X with
    // neighbourhood inside X, and distinct copies give distinct components.
    let anchors_inside = match cert.class {
        ClassRef::Fan(c) => p
            .fan(c)
            .anchors()
            .iter()
            .all(|a| cert.witness_x.contains(a)),
        ClassRef::Graded(g) => p
            .graded(g)
            .window_vertices(cert.level.unwrap())
            .iter()
            .all(|a| cert.witness_x.contains(a)),
    };
    let untouched = cert.witness_x.iter().all(|&v| match (v, cert.class) {
        (VertexRef::Fan { class, copy, .. }, ClassRef::Fan(c)) if class == c => {
            !cert.copy_selector.selects(copy)
        }
        (VertexRef::Graded { class, level, copy, .. }, ClassRef::Graded(g))
            if class == g && Some(level) == cert.level =>
        {
            !cert.copy_selector.selects(copy)
        }
        _ => true,
    });
    r.require(
        "leafComponentsDistinct",
        anchors_inside && untouched,
        "selected copies are not whole components separated by the witness set",
    );
    r
}

// ---------------------------------------------------------------------------
// Admissible assignments
// ---------------------------------------------------------------------------

pub fn verify_admissible(p: &Presentation, assignment: &AdmissibleAssignment) -> VerificationReport {
    let mut r = VerificationReport::new();
    let (explicit_pats, graded_pats) = deduped_patterns(p);

    // Exact coverage of the critical vertex sets, nothing more.
    let wanted: BTreeSet<BTreeSet<VertexRef>> = explicit_pats
        .iter()
        .map(|pt| match pt {
            CriticalPattern::Explicit { set, .. } => set.clone(),
            _ => unreachable!(),
        })
        .collect();
    let got: BTreeSet<BTreeSet<VertexRef>> =
        assignment.explicit.iter().map(|ea| ea.set.clone()).collect();
    let graded_ok = graded_pats.iter().all(|pt| {
        let CriticalPattern::Graded { witnesses, .. } = pt else { unreachable!() };
        assignment.graded.iter().any(|ga| witnesses.contains(&ga.class))
    }) && assignment
        .graded
        .iter()
        .all(|ga| (ga.class as usize) < p.graded_classes.len());
    if !r.require(
        "coversCriticalSets",
        wanted == got && graded_ok && assignment.explicit.len() == got.len(),
        format!("assignment covers {:?}, critical sets are {:?}", got, wanted),
    ) {
        return r;
    }

    let horizon = pattern_horizon(p, &TargetSet::default());
    // Materialize every instantiation's pre-removal kept side. Proper means
    // components are kept on the small side and left on the big side.
    let mut kept: Vec<(BTreeSet<VertexRef>, SymbolicVertexSet)> = Vec::new();
    let mut proper = true;
    let mut detail = String::new();
    fn check_proper(
        p: &Presentation,
        set: BTreeSet<VertexRef>,
        small: SymbolicVertexSet,
        kept: &mut Vec<(BTreeSet<VertexRef>, SymbolicVertexSet)>,
        proper: &mut bool,
        detail: &mut String,
    ) {
        let x = SymbolicVertexSet::from_vertices(set.iter().copied());
        if small.is_empty() {
            *proper = false;
            *detail = format!("{set:?}: nothing kept");
        } else if small.union(&x) == p.universe() {
            *proper = false;
            *detail = format!("{set:?}: nothing left on the big side");
        }
        kept.push((set, small));
    }
    for ea in &assignment.explicit {
        match delete_and_decompose(p, &ea.set).ok() {
            Some(d) => {
                let small = kept_small_side(p, &d, ea.excluded.as_ref(), &[]);
                check_proper(p, ea.set.clone(), small, &mut kept, &mut proper, &mut detail);
            }
            None => {
                proper = false;
                detail = format!("{:?}: invalid vertices", ea.set);
            }
        }
    }
    let mut seen_sets: BTreeSet<BTreeSet<VertexRef>> =
        kept.iter().map(|(s, _)| s.clone()).collect();
    for ga in &assignment.graded {
        for n in 0..=horizon {
            let set = p.graded(ga.class).window_vertices(n);
            if !seen_sets.insert(set.clone()) {
                continue;
            }
            match delete_and_decompose(p, &set).ok() {
                Some(d) => {
                    let small = kept_small_side(p, &d, ga.excluded.as_ref(), &[]);
                    check_proper(p, set, small, &mut kept, &mut proper, &mut detail);
                }
                None => {
                    proper = false;
                    detail = format!("graded {} at {n}: invalid window", ga.class);
                }
            }
        }
    }
    r.require("properSeparations", proper, detail);
    r.pass("strongCondition"); // one excluded component per set, by shape

    let mut conflict = None;
    'outer: for (i, (xs, xsmall)) in kept.iter().enumerate() {
        for (ys, ysmall) in kept.iter().skip(i + 1) {
            if admissibility_conflict(xs, xsmall, ys, ysmall) {
                conflict = Some(format!("{xs:?} and {ys:?} keep each other's cross components"));
                break 'outer;
            }
        }
    }
    r.require("admissibleDisjunction", conflict.is_none(), conflict.unwrap_or_default());
    r
}

// ---------------------------------------------------------------------------
// Tough subgraph
// ---------------------------------------------------------------------------

/// Finite working view of the certified subgraph `H = G[B] ∪ L` inside a
/// truncation window.
struct SubgraphProbe {
    verts: Vec<VertexRef>,
    index: BTreeMap<VertexRef, usize>,
    in_b: Vec<bool>,
    /// Edges of `G[B]` among materialized vertices.
    gb_edges: Vec<(usize, usize)>,
    /// Linkage paths as index sequences.
    paths: Vec<Vec<usize>>,
    /// Cliques over materialized critical vertex sets, for the torso.
    torso_cliques: Vec<Vec<usize>>,
}

impl SubgraphProbe {
    fn build(
        p: &Presentation,
        target: &TargetSet,
        part: &SymbolicVertexSet,
        explicit_paths: &[LinkagePath],
        spine_pairs: &[(u32, u32)],
        depth: u32,
        copies: u32,
    ) -> Option<SubgraphProbe> {
        let mut verts: BTreeSet<VertexRef> = part.restrict_to_truncation(depth, copies);
        let mut paths_v: Vec<Vec<VertexRef>> = Vec::new();
        for lp in explicit_paths {
            // Degenerate paths are rejected by the path-shape check; keep
            // the probe total regardless.
            if lp.path.len() < 2 {
                continue;
            }
            paths_v.push(lp.path.clone());
            verts.extend(lp.path.iter().copied());
        }
        for &(i, j) in spine_pairs {
            let lp = spine_rule::designated_path(p, target, part, i, j)?;
            verts.extend(lp.path.iter().copied());
            paths_v.push(lp.path);
        }
        let verts: Vec<VertexRef> = verts.into_iter().collect();
        let index: BTreeMap<VertexRef, usize> =
            verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let in_b: Vec<bool> = verts.iter().map(|&v| part.contains(v)).collect();
        let mut gb_edges = Vec::new();
        for (i, &u) in verts.iter().enumerate() {
            if !in_b[i] {
                continue;
            }
            let nu = p.neighbors(u).ok()?;
            for (j, &v) in verts.iter().enumerate().skip(i + 1) {
                if in_b[j] && nu.contains(v) {
                    gb_edges.push((i, j));
                }
            }
        }
        let paths: Vec<Vec<usize>> = paths_v
            .iter()
            .map(|path| path.iter().map(|v| index[v]).collect())
            .collect();
        let pats = crate::decompose::critical_sets(p);
        let mut torso_cliques = Vec::new();
        for inst in critical_instances(p, &pats, depth) {
            let members: Vec<usize> = inst
                .set
                .iter()
                .filter_map(|v| index.get(v).copied())
                .filter(|&i| in_b[i])
                .collect();
            if members.len() >= 2 {
                torso_cliques.push(members);
            }
        }
        Some(SubgraphProbe { verts, index, in_b, gb_edges, paths, torso_cliques })
    }

    /// Components of `H - X` (by vertex index), with linkage edges included.
    fn h_components(&self, deleted: &BTreeSet<usize>) -> Vec<Vec<usize>> {
        let mut uf = UnionFind::new(self.verts.len());
        let link = |uf: &mut UnionFind, a: usize, b: usize| {
            if !deleted.contains(&a) && !deleted.contains(&b) {
                uf.union(a, b);
            }
        };
        for &(a, b) in &self.gb_edges {
            link(&mut uf, a, b);
        }
        for path in &self.paths {
            for w in path.windows(2) {
                link(&mut uf, w[0], w[1]);
            }
        }
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for i in 0..self.verts.len() {
            if !deleted.contains(&i) {
                groups.entry(uf.find(i)).or_default().push(i);
            }
        }
        groups.into_values().collect()
    }

    /// Components of the torso minus X: `G[B]` edges plus critical cliques.
    fn torso_components(&self, deleted: &BTreeSet<usize>) -> usize {
        let mut uf = UnionFind::new(self.verts.len());
        let link = |uf: &mut UnionFind, a: usize, b: usize| {
            if !deleted.contains(&a) && !deleted.contains(&b) {
                uf.union(a, b);
            }
        };
        for &(a, b) in &self.gb_edges {
            link(&mut uf, a, b);
        }
        for clique in &self.torso_cliques {
            let surviving: Vec<usize> = clique
                .iter()
                .copied()
                .filter(|v| !deleted.contains(v))
                .collect();
            for w in surviving.windows(2) {
                uf.union(w[0], w[1]);
            }
        }
        let mut roots = BTreeSet::new();
        for i in 0..self.verts.len() {
            if self.in_b[i] && !deleted.contains(&i) {
                roots.insert(uf.find(i));
            }
        }
        roots.len()
    }
}

/// Canonical small deleted sets from a pool: all subsets of each size up to
/// `size`, smallest sizes first, lexicographic within a size, capped.
fn sample_subsets(pool: &[usize], size: usize, cap: usize) -> Vec<BTreeSet<usize>> {
    let mut out = Vec::new();
    let n = pool.len();
    for k in 1..=size.min(n) {
        let mut idx: Vec<usize> = (0..k).collect();
        'combs: loop {
            out.push(idx.iter().map(|&i| pool[i]).collect());
            if out.len() >= cap {
                return out;
            }
            let mut i = k;
            while i > 0 {
                i -= 1;
                if idx[i] < i + n - k {
                    idx[i] += 1;
                    for j in i + 1..k {
                        idx[j] = idx[j - 1] + 1;
                    }
                    continue 'combs;
                }
            }
            break;
        }
    }
    out
}

pub fn verify_tough_subgraph(
    p: &Presentation,
    target: &TargetSet,
    cert: &ToughSubgraphCertificate,
) -> VerificationReport {
    let mut r = VerificationReport::new();
    let target_set = target.vertex_set();

    r.merge_as("assignmentAdmissible", &verify_admissible(p, &cert.assignment));
    let horizon = pattern_horizon(p, target);
    let family = match assignment_family(p, target, &cert.assignment, horizon) {
        Ok(f) => f,
        Err(e) => {
            r.fail("treeSetAxioms", e.to_string());
            return r;
        }
    };
    let ts = verify_tree_set(p, &family);
    r.require("treeSetAxioms", ts.all_ok(), format!("{:?}", ts.violations));
    let cons = consistency_violation(p, &family.members());
    r.require("orientationConsistent", cons.is_none(), format!("{cons:?}"));

    let kept_clean = family
        .members()
        .iter()
        .all(|(_, s)| !s.small_side.intersects(&target_set));
    r.require("keptAvoidsTarget", kept_clean, "a kept component meets the target set");

    match family_part(p, &family) {
        Ok(part) => {
            let expected = part.union(&SymbolicVertexSet::from_vertices(
                target.explicit.iter().copied(),
            ));
            r.require(
                "partMatches",
                cert.part_b == expected,
                "certified part differs from the part defined by the assignment",
            );
        }
        Err(e) => r.fail("partMatches", e.to_string()),
    }
    r.require(
        "targetInsidePart",
        target_set.is_subset(&cert.part_b),
        "part is missing target vertices",
    );

    // Linkage path shape: endpoints in the part, inner vertices outside,
    // consecutive edges real, no repeats.
    let mut paths_ok = true;
    let mut path_detail = String::new();
    for lp in &cert.explicit_paths {
        let ok = lp.path.len() >= 2
            && lp.path.iter().all(|&v| p.contains_vertex(v))
            && cert.part_b.contains(lp.path[0])
            && cert.part_b.contains(*lp.path.last().unwrap())
            && lp.path[1..lp.path.len() - 1]
                .iter()
                .all(|&v| !cert.part_b.contains(v))
            && lp.path.windows(2).all(|w| {
                p.neighbors(w[0]).map(|n| n.contains(w[1])).unwrap_or(false)
            })
            && {
                let mut seen = BTreeSet::new();
                lp.path.iter().all(|v| seen.insert(*v))
            };
        if !ok {
            paths_ok = false;
            path_detail = format!("path {:?} is not a valid B-path", lp.path);
            break;
        }
    }
    r.require("linkagePathsValid", paths_ok, path_detail);

    // (L3): every pair sharing a critical vertex set inside the part is an
    // edge of G[B], an explicit path, or covered by the spine rule.
    let pats = crate::decompose::critical_sets(p);
    let probe_level = horizon.max(PROBE_DEPTH);
    let mut l3_ok = true;
    let mut l3_detail = String::new();
    'l3: for inst in critical_instances(p, &pats, probe_level) {
        let members: Vec<VertexRef> = inst
            .set
            .iter()
            .copied()
            .filter(|&v| cert.part_b.contains(v))
            .collect();
        for (ai, &a) in members.iter().enumerate() {
            for &b in &members[ai + 1..] {
                if p.neighbors(a).map(|n| n.contains(b)).unwrap_or(false) {
                    continue;
                }
                let by_rule = match (a, b) {
                    (VertexRef::Spine(i), VertexRef::Spine(j)) => {
                        cert.spine_pair_rule
                            && spine_rule::covers(p, &cert.part_b, i.min(j), i.max(j))
                    }
                    _ => false,
                };
                let by_path = cert.explicit_paths.iter().any(|lp| {
                    lp.ends()
                        .is_some_and(|(x, y)| (x, y) == (a, b) || (x, y) == (b, a))
                });
                if !(by_rule || by_path) {
                    l3_ok = false;
                    l3_detail = format!("pair {a}, {b} has no scheduled B-path");
                    break 'l3;
                }
            }
        }
    }
    r.require("pairsScheduled", l3_ok, l3_detail);

    // Rule paths for probe pairs must be valid B-paths with distinct
    // designated copies.
    let spine_pairs = if cert.spine_pair_rule {
        spine_rule::pairs_up_to(p, &cert.part_b, probe_level)
    } else {
        Vec::new()
    };
    let mut rule_ok = true;
    let mut rule_detail = String::new();
    let mut used_connectors: BTreeSet<VertexRef> = BTreeSet::new();
    for &(i, j) in &spine_pairs {
        match spine_rule::designated_path(p, target, &cert.part_b, i, j) {
            Some(lp) => {
                let inner = lp.path[1];
                let valid = !cert.part_b.contains(inner)
                    && p.neighbors(lp.path[0]).map(|n| n.contains(inner)).unwrap_or(false)
                    && p.neighbors(inner).map(|n| n.contains(lp.path[2])).unwrap_or(false);
                if !valid {
                    rule_ok = false;
                    rule_detail = format!("rule path for ({i},{j}) is not a B-path");
                    break;
                }
                if !used_connectors.insert(inner) {
                    rule_ok = false;
                    rule_detail = format!("connector {inner} reused; unbounded degree");
                    break;
                }
            }
            None => {
                rule_ok = false;
                rule_detail = format!("rule produces no path for ({i},{j})");
                break;
            }
        }
    }
    r.require("l1FiniteDegree", rule_ok, rule_detail);

    // Truncation-level probes: (L2) edge cover, toughness against the torso
    // prediction, and torso connectivity.
    let Some(probe) = SubgraphProbe::build(
        p,
        target,
        &cert.part_b,
        &cert.explicit_paths,
        &spine_pairs,
        PROBE_DEPTH,
        PROBE_COPIES,
    ) else {
        r.fail("toughnessProbe", "could not materialize the probe subgraph");
        return r;
    };
    let b_pool: Vec<usize> = (0..probe.verts.len()).filter(|&i| probe.in_b[i]).collect();

    let mut l2_ok = true;
    let mut l2_detail = String::new();
    'l2: for x in sample_subsets(&b_pool, 4, 2000) {
        // Components of L - X avoiding B must use only edges of paths with
        // both endpoints in X.
        let mut allowed: BTreeSet<(usize, usize)> = BTreeSet::new();
        for path in &probe.paths {
            let ends_in_x =
                x.contains(path.first().unwrap()) && x.contains(path.last().unwrap());
            if ends_in_x {
                for w in path.windows(2) {
                    let e = (w[0].min(w[1]), w[0].max(w[1]));
                    allowed.insert(e);
                }
            }
        }
        // Linkage-only components.
        let mut uf = UnionFind::new(probe.verts.len());
        for path in &probe.paths {
            for w in path.windows(2) {
                if !x.contains(&w[0]) && !x.contains(&w[1]) {
                    uf.union(w[0], w[1]);
                }
            }
        }
        let mut touched: BTreeSet<usize> = BTreeSet::new();
        for path in &probe.paths {
            touched.extend(path.iter().copied());
        }
        let mut avoiding_roots: BTreeSet<usize> = BTreeSet::new();
        for &v in &touched {
            if !x.contains(&v) {
                avoiding_roots.insert(uf.find(v));
            }
        }
        for &v in &touched {
            if !x.contains(&v) && probe.in_b[v] {
                avoiding_roots.remove(&uf.find(v));
            }
        }
        for path in &probe.paths {
            for w in path.windows(2) {
                if x.contains(&w[0]) || x.contains(&w[1]) {
                    continue;
                }
                let root = uf.find(w[0]);
                if avoiding_roots.contains(&root) {
                    let e = (w[0].min(w[1]), w[0].max(w[1]));
                    if !allowed.contains(&e) {
                        l2_ok = false;
                        l2_detail = format!(
                            "B-avoiding linkage edge {:?} not covered by pair paths inside X",
                            (probe.verts[e.0], probe.verts[e.1])
                        );
                        break 'l2;
                    }
                }
            }
        }
    }
    r.require("l2CoveringEdges", l2_ok, l2_detail);

    let mut tough_ok = true;
    let mut tough_detail = String::new();
    for x in sample_subsets(&b_pool, 3, 400) {
        let prediction = probe.torso_components(&x);
        let comps = probe.h_components(&x);
        let meeting_b = comps
            .iter()
            .filter(|c| c.iter().any(|&i| probe.in_b[i]))
            .count();
        if meeting_b > prediction {
            tough_ok = false;
            let xs: Vec<VertexRef> = x.iter().map(|&i| probe.verts[i]).collect();
            tough_detail = format!(
                "deleting {xs:?} leaves {meeting_b} part components, torso predicts {prediction}"
            );
            break;
        }
    }
    r.require("toughnessProbe", tough_ok, tough_detail);

    // Connected sets of the ambient graph stay connected in the torso.
    let mut torso_ok = true;
    let mut torso_detail = String::new();
    if let Ok(trunc) = materialize(p, PROBE_DEPTH.min(8), 3, DEFAULT_VERTEX_BUDGET) {
        'torso: for seed in 0..trunc.vertex_count() {
            let mut ball: BTreeSet<u32> = [seed as u32].into_iter().collect();
            for _ in 0..2 {
                let cur: Vec<u32> = ball.iter().copied().collect();
                for v in cur {
                    ball.extend(trunc.graph.neighbors(v));
                }
            }
            // Restrict the connected ball to B and check torso connectivity.
            let in_probe: Vec<usize> = ball
                .iter()
                .filter_map(|&i| probe.index.get(&trunc.name_of(i)).copied())
                .filter(|&i| probe.in_b[i])
                .collect();
            if in_probe.len() < 2 {
                continue;
            }
            let mut uf = UnionFind::new(probe.verts.len());
            let inside = |a: usize| in_probe.contains(&a);
            for &(a, b) in &probe.gb_edges {
                if inside(a) && inside(b) {
                    uf.union(a, b);
                }
            }
            for clique in &probe.torso_cliques {
                let members: Vec<usize> =
                    clique.iter().copied().filter(|&a| inside(a)).collect();
                for w in members.windows(2) {
                    uf.union(w[0], w[1]);
                }
            }
            let root = uf.find(in_probe[0]);
            if !in_probe.iter().all(|&i| uf.find(i) == root) {
                torso_ok = false;
                torso_detail = format!(
                    "connected set around {} disconnects in the torso",
                    trunc.name_of(seed as u32)
                );
                break 'torso;
            }
        }
    }
    r.require("torsoConnectivity", torso_ok, torso_detail);
    r
}

// ---------------------------------------------------------------------------
// Star decomposition
// ---------------------------------------------------------------------------

/// Materializes the star's elements: the explicit ones plus tail elements up
/// to `tail_count` per tail rule.
fn star_elements(
    p: &Presentation,
    cert: &StarDecompositionCertificate,
    family: Option<&SeparationFamily>,
    tail_count: usize,
) -> Result<Vec<OrientedSeparation>, String> {
    let mut out: Vec<OrientedSeparation> = Vec::new();
    let push = |s: OrientedSeparation, out: &mut Vec<OrientedSeparation>| {
        if !out.contains(&s) {
            out.push(s);
        }
    };
    for e in &cert.elements {
        push(e.separation.clone(), &mut out);
    }
    for tail in &cert.tails {
        let family = family.ok_or("tail rules need an assignment to evaluate")?;
        match tail {
            StarTailRule::CornerChain { anchor, from_position, .. } => {
                let chain = GradeChain::from_anchor(family, anchor.clone(), from_position + tail_count)
                    .map_err(|e| e.to_string())?;
                for j in *from_position..from_position + tail_count {
                    let hi = chain.step(j).map_err(|e| e.to_string())?;
                    let lo = chain.step(j - 1).map_err(|e| e.to_string())?;
                    push(hi.meet(&lo.invert(p)), &mut out);
                }
            }
            StarTailRule::LeafFamily { class, from_param } => {
                let rule = family
                    .rules
                    .iter()
                    .find(|rule| rule.label == format!("principal-g{class}"))
                    .ok_or("leaf family class not in assignment")?;
                for n in *from_param..from_param + tail_count as u32 {
                    push(rule.materialize(n), &mut out);
                }
            }
        }
    }
    Ok(out)
}

pub fn verify_star_decomposition(
    p: &Presentation,
    target: &TargetSet,
    cert: &StarDecompositionCertificate,
) -> VerificationReport {
    let mut r = VerificationReport::new();
    let target_set = target.vertex_set();
    let horizon = pattern_horizon(p, target);

    let family = match &cert.assignment {
        Some(a) => {
            r.merge_as("assignmentAdmissible", &verify_admissible(p, a));
            match assignment_family(p, target, a, horizon) {
                Ok(f) => Some(f),
                Err(e) => {
                    r.fail("assignmentAdmissible", e.to_string());
                    None
                }
            }
        }
        None => None,
    };

    // Tail rules must pick up exactly where the materialized elements stop:
    // a gap would leave some critical vertex set outside every leaf, beyond
    // the reach of bounded probing.
    for tail in &cert.tails {
        let contiguous = match tail {
            StarTailRule::CornerChain { chain, from_position, .. } => {
                let top = cert
                    .elements
                    .iter()
                    .filter_map(|e| match e.provenance {
                        crate::certificate::ElementProvenance::CorridorEnd {
                            chain: c,
                            position,
                        } if c == *chain => Some(position),
                        _ => None,
                    })
                    .max();
                top.is_some_and(|top| *from_position <= top + 1) && *from_position <= 100_000
            }
            StarTailRule::LeafFamily { from_param, .. } => {
                family
                    .as_ref()
                    .is_some_and(|f| *from_param <= f.horizon + 1)
            }
        };
        if !contiguous {
            r.fail("tailContiguous", "tail rule leaves a gap after the explicit elements");
            return r;
        }
    }
    let elements = match star_elements(p, cert, family.as_ref(), 4) {
        Ok(e) => e,
        Err(e) => {
            r.fail("wellFormed", e);
            return r;
        }
    };

    // Element validity: real separations with tight separators.
    let mut valid = true;
    let mut valid_detail = String::new();
    let mut tight = true;
    let mut tight_detail = String::new();
    for (i, s) in elements.iter().enumerate() {
        if let Err(e) = s.validate(p) {
            valid = false;
            valid_detail = format!("element {i}: {e}");
            break;
        }
        let all_touch = s.separator.iter().all(|&x| {
            p.edge_between(&s.small_side, &SymbolicVertexSet::singleton(x)).is_some()
        });
        if !all_touch || s.small_side.is_empty() {
            tight = false;
            tight_detail = format!("element {i}: separator exceeds the side's neighbourhood");
            break;
        }
    }
    r.require("wellFormed", valid, valid_detail);
    r.require("separatorTight", tight, tight_detail);
    if !valid {
        return r;
    }

    let star = star_property_violation(p, &elements);
    r.require(
        "starProperty",
        star.is_none(),
        format!("elements {star:?} are not oriented toward each other"),
    );

    // Tameness of every element: no neighbourhood class of components is
    // infinite on both sides.
    let mut tame = true;
    let mut tame_detail = String::new();
    'tame: for s in &elements {
        let Ok(d) = delete_and_decompose(p, &s.separator) else {
            tame = false;
            tame_detail = "separator contains invalid vertices".into();
            break;
        };
        let side_a = s.side_a();
        let mut infinite_small: BTreeSet<BTreeSet<VertexRef>> = BTreeSet::new();
        let mut infinite_big: BTreeSet<BTreeSet<VertexRef>> = BTreeSet::new();
        for (bi, b) in d.bundles.iter().enumerate() {
            let fam = d.bundle_vertices(p, bi);
            if !fam.intersect(&s.small_side).is_finite() {
                infinite_small.insert(b.neighbourhood.clone());
            }
            if !fam.difference(&side_a).is_finite() {
                infinite_big.insert(b.neighbourhood.clone());
            }
        }
        if let Some(y) = infinite_small.intersection(&infinite_big).next() {
            tame = false;
            tame_detail = format!(
                "components with neighbourhood {y:?} are infinite on both sides of {:?}",
                s.separator
            );
            break 'tame;
        }
    }
    r.require("tameness", tame, tame_detail);

    r.require(
        "targetInCentral",
        target_set.is_subset(&cert.central_part),
        "target vertices escape the central part",
    );

    // Central part recomputation: complement of the union of all small
    // sides, tails resolved by their uniform patterns.
    let central_ok = (|| -> Result<bool, String> {
        let mut small = SymbolicVertexSet::default();
        for e in &cert.elements {
            small = small.union(&e.separation.small_side);
        }
        for tail in &cert.tails {
            let family = family.as_ref().ok_or("tails need an assignment")?;
            let u = match tail {
                StarTailRule::CornerChain { anchor, from_position, .. } => {
                    let chain =
                        GradeChain::from_anchor(family, anchor.clone(), from_position + 4)
                            .map_err(|e| e.to_string())?;
                    stable_union(*from_position as u32, *from_position as u32 + 3, |j| {
                        let j = j as usize;
                        let hi = chain.step(j).expect("prefetched");
                        let lo = chain.step(j - 1).expect("prefetched");
                        hi.meet(&lo.invert(p)).small_side
                    })
                    .map_err(|e| e.to_string())?
                }
                StarTailRule::LeafFamily { class, from_param } => {
                    let rule = family
                        .rules
                        .iter()
                        .find(|rule| rule.label == format!("principal-g{class}"))
                        .ok_or("leaf family class missing")?;
                    stable_union(*from_param, family.horizon.max(from_param + 3), |n| {
                        rule.materialize(n).small_side
                    })
                    .map_err(|e| e.to_string())?
                }
            };
            small = small.union(&u);
        }
        Ok(small.complement(p) == cert.central_part)
    })();
    match central_ok {
        Ok(ok) => {
            r.require("centralMatches", ok, "certified central part differs from recomputation");
        }
        Err(e) => r.fail("centralMatches", e),
    }

    // Every critical vertex set orients the star away from the center on
    // exactly one element.
    let pats = crate::decompose::critical_sets(p);
    let probe_bound = horizon.min(PROBE_DEPTH);
    if target_set.is_empty() && cert.elements.is_empty() && cert.tails.is_empty() {
        // Degenerate single-part decomposition for an empty target; the
        // leaf condition is waived by design.
        r.pass("criticalLivesInLeaf");
    } else {
        let mut lives = true;
        let mut lives_detail = String::new();
        'crit: for inst in critical_instances(p, &pats, probe_bound) {
            let Ok(d) = delete_and_decompose(p, &inst.set) else { continue };
            // The infinite families of full-neighbourhood components; the
            // finitely many explicit ones cannot affect "all but finitely
            // many components".
            let bundles: Vec<SymbolicVertexSet> = d
                .bundles
                .iter()
                .enumerate()
                .filter(|(_, b)| b.neighbourhood == inst.set)
                .map(|(bi, _)| d.bundle_vertices(p, bi))
                .collect();
            let x_set = SymbolicVertexSet::from_vertices(inst.set.iter().copied());
            let mut away = 0usize;
            for s in &elements {
                let side_a = s.side_a();
                let toward_a = x_set.is_subset(&side_a)
                    && bundles.iter().all(|b| b.difference(&side_a).is_finite());
                let toward_b = !x_set.intersects(&s.small_side)
                    && bundles.iter().all(|b| b.intersect(&s.small_side).is_finite());
                match (toward_a, toward_b) {
                    (true, false) => away += 1,
                    (false, true) => {}
                    _ => {
                        lives = false;
                        lives_detail = format!(
                            "{:?} does not orient element with separator {:?}",
                            inst.set, s.separator
                        );
                        break 'crit;
                    }
                }
            }
            if away != 1 {
                lives = false;
                lives_detail =
                    format!("{:?} points away from the center on {away} elements", inst.set);
                break;
            }
        }
        r.require("criticalLivesInLeaf", lives, lives_detail);
    }

    // The infinite-target construction must include the principal part and
    // dominate every principal separation up to one component drop.
    if let Some(family) = &family {
        match family_part(p, family) {
            Ok(part) => {
                let part = part.union(&SymbolicVertexSet::from_vertices(
                    target.explicit.iter().copied(),
                ));
                r.require(
                    "partIncluded",
                    part.is_subset(&cert.central_part),
                    "principal part escapes the central part",
                );
            }
            Err(e) => r.fail("partIncluded", e.to_string()),
        }
        let mut dominated = true;
        let mut dom_detail = String::new();
        'members: for (id, member) in family.members() {
            let set = member.separator.clone();
            let Ok(d) = delete_and_decompose(p, &set) else { continue };
            let members: Vec<SymbolicVertexSet> = full_neighbourhood_members(p, &d)
                .into_iter()
                .filter_map(|m| {
                    let kept = m.intersect(&member.small_side);
                    if kept.is_empty() {
                        None
                    } else {
                        Some(kept)
                    }
                })
                .collect();
            let found = elements.iter().any(|r| lessish(&set, &members, r));
            if !found {
                dominated = false;
                dom_detail = format!("{id:?} is below no star element, even after one drop");
                break 'members;
            }
        }
        r.require("principalDominated", dominated, dom_detail);
    }

    // Finite-target construction: elements must be exactly the grouping of
    // the target's components by neighbourhood.
    if cert.assignment.is_none() {
        let expected = match crate::duality::build_star_decomposition(p, target) {
            Ok(c) => c,
            Err(e) => {
                r.fail("finiteTargetElements", e.to_string());
                return r;
            }
        };
        let mut want: Vec<&OrientedSeparation> =
            expected.elements.iter().map(|e| &e.separation).collect();
        want.sort_by(|a, b| a.separator.cmp(&b.separator));
        let mut got: Vec<&OrientedSeparation> =
            cert.elements.iter().map(|e| &e.separation).collect();
        got.sort_by(|a, b| a.separator.cmp(&b.separator));
        r.require(
            "finiteTargetElements",
            want == got && cert.central_part == expected.central_part,
            "finite-target star differs from the component grouping",
        );
    }
    r
}

// ---------------------------------------------------------------------------
// Payload dispatch
// ---------------------------------------------------------------------------

pub fn verify_payload(
    p: &Presentation,
    target: &TargetSet,
    payload: &CertificatePayload,
) -> VerificationReport {
    match payload {
        CertificatePayload::UndominatingStar(c) => verify_undominating_star(p, target, c),
        CertificatePayload::ToughSubgraph(c) => verify_tough_subgraph(p, target, c),
        CertificatePayload::StarDecomposition(c) => verify_star_decomposition(p, target, c),
        CertificatePayload::Dichotomy(d) => {
            let mut r = VerificationReport::new();
            match d {
                DichotomyCertificate::Star(c) => {
                    r.merge_as("starBranch", &verify_undominating_star(p, target, c));
                    r.require(
                        "branchAgreesWithInstance",
                        !matches!(crate::duality::toughness(p, target), crate::duality::Toughness::Tough),
                        "star branch certificate for a tough instance",
                    );
                }
                DichotomyCertificate::Tough { tough_subgraph, star_decomposition } => {
                    r.merge_as("toughSubgraph", &verify_tough_subgraph(p, target, tough_subgraph));
                    r.merge_as(
                        "starDecomposition",
                        &verify_star_decomposition(p, target, star_decomposition),
                    );
                    r.require(
                        "branchAgreesWithInstance",
                        matches!(crate::duality::toughness(p, target), crate::duality::Toughness::Tough),
                        "tough branch certificate for a non-tough instance",
                    );
                }
            }
            r
        }
    }
}

// ---------------------------------------------------------------------------
// Truncation oracle entry point
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub enum OracleKind {
    Components { deleted: BTreeSet<VertexRef> },
    Critical { max_size: usize },
    Toughness,
}

pub fn oracle_check(
    p: &Presentation,
    target: &TargetSet,
    kind: &OracleKind,
    depth: u32,
    copies: u32,
    budget: usize,
) -> VerificationReport {
    let mut r = VerificationReport::new();
    let trunc = match materialize(p, depth, copies, budget) {
        Ok(t) => t,
        Err(e) => {
            r.fail("materialize", e.to_string());
            return r;
        }
    };
    match kind {
        OracleKind::Components { deleted } => {
            match oracle::check_components_against_truncation(p, &trunc, deleted) {
                Ok(()) => r.pass("componentsAgree"),
                Err(e) => r.fail("componentsAgree", e),
            }
        }
        OracleKind::Critical { max_size } => {
            let found = oracle::brute_force_critical_sets(&trunc, *max_size, copies as usize);
            let margin = p.max_band_width() + 2;
            let interior = |set: &BTreeSet<VertexRef>| {
                set.len() <= *max_size
                    && set
                        .iter()
                        .all(|v| v.level_bound().is_none_or(|l| l + margin <= depth))
            };
            let brute: BTreeSet<BTreeSet<VertexRef>> =
                found.into_iter().filter(|s| interior(s)).collect();
            let pats = crate::decompose::critical_sets(p);
            let symbolic: BTreeSet<BTreeSet<VertexRef>> =
                critical_instances(p, &pats, depth)
                    .into_iter()
                    .map(|i| i.set)
                    .filter(|s| interior(s))
                    .collect();
            r.require(
                "criticalSetsAgree",
                brute == symbolic,
                format!("brute force {brute:?} vs symbolic {symbolic:?}"),
            );
        }
        OracleKind::Toughness => {
            let u_trunc: BTreeSet<VertexRef> = target
                .vertex_set()
                .restrict_to_truncation(depth, copies)
                .into_iter()
                .filter(|v| trunc.contains(*v))
                .collect();
            let threshold = copies as usize;
            let verts: Vec<VertexRef> = trunc.names().to_vec();
            let mut shattered = false;
            'probe: for a in 0..verts.len() {
                for b in a..verts.len() {
                    for c in b..verts.len() {
                        let x: BTreeSet<u32> = [a, b, c]
                            .into_iter()
                            .map(|i| trunc.index_of(verts[i]).unwrap())
                            .collect();
                        let comps = oracle::components_after_deletion(&trunc, &x);
                        let meeting = comps
                            .iter()
                            .filter(|comp| comp.iter().any(|v| u_trunc.contains(v)))
                            .count();
                        if meeting >= threshold {
                            shattered = true;
                            break 'probe;
                        }
                    }
                }
            }
            let symbolic_tough = matches!(
                crate::duality::toughness(p, target),
                crate::duality::Toughness::Tough
            );
            r.require(
                "toughnessAgrees",
                shattered != symbolic_tough,
                format!("truncation probe shattered={shattered}, symbolic tough={symbolic_tough}"),
            );
        }
    }
    r
}

// ---------------------------------------------------------------------------
// Property suite: structural facts about corridors and parliaments
// ---------------------------------------------------------------------------

/// Runs the corridor lemma checks on seeded random consistent partial
/// orientations of the instance's principal tree set.
pub fn property_suite(
    p: &Presentation,
    target: &TargetSet,
    seed: u64,
    rounds: usize,
) -> VerificationReport {
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    let mut r = VerificationReport::new();
    let effective_target = match crate::duality::toughness(p, target) {
        crate::duality::Toughness::Tough => target.clone(),
        crate::duality::Toughness::NotTough(_) => TargetSet::default(),
    };
    let pts = match crate::assignment::build_principal_tree_set(p, &effective_target) {
        Ok(pts) => pts,
        Err(e) => {
            r.fail("principalTreeSet", e.to_string());
            return r;
        }
    };
    r.pass("principalTreeSet");
    let members: Vec<OrientedSeparation> =
        pts.family.members().into_iter().map(|(_, s)| s).collect();
    if members.is_empty() {
        r.pass("vacuous");
        return r;
    }
    let mut rng = StdRng::seed_from_u64(seed);
    let mut sup_nested = true;
    let mut sups_star = true;
    let mut separator_cover = true;
    let mut detail = String::new();
    let mut checked = 0usize;
    let mut attempts = 0usize;
    while checked < rounds && attempts < 40 * rounds + 40 {
        attempts += 1;
        // Random consistent partial orientation: a subset, some members
        // inverted when consistency allows.
        let mut oriented: Vec<OrientedSeparation> = Vec::new();
        for m in &members {
            if !rng.random_bool(0.6) {
                continue;
            }
            let cand = if rng.random_bool(0.15) { m.invert(p) } else { m.clone() };
            oriented.push(cand);
        }
        let pairs_consistent = (0..oriented.len()).all(|i| {
            (0..oriented.len()).all(|j| {
                i == j
                    || oriented[i] == oriented[j]
                    || !(oriented[i].invert(p).le(&oriented[j])
                        && oriented[i].invert(p) != oriented[j])
            })
        });
        if !pairs_consistent || oriented.is_empty() {
            continue;
        }
        checked += 1;
        let partition = corridor_partition(&oriented);
        let sups: Vec<OrientedSeparation> = partition
            .iter()
            .map(|group| {
                supremum(&group.iter().map(|&i| oriented[i].clone()).collect::<Vec<_>>())
            })
            .collect();
        for sup in &sups {
            for m in &members {
                if sup.compare(m, p) == Relation::Crossing {
                    sup_nested = false;
                    detail = format!("supremum crosses a member with separator {:?}", m.separator);
                }
            }
        }
        if star_property_violation(p, &sups).is_some() {
            sups_star = false;
        }
        for (gi, group) in partition.iter().enumerate() {
            let sup = &sups[gi];
            let sep: Vec<VertexRef> = sup.separator.iter().copied().collect();
            for subset in sample_vertex_subsets(&sep, 5) {
                let covered = group.iter().any(|&i| {
                    subset.iter().all(|v| oriented[i].separator.contains(v))
                });
                if !covered {
                    separator_cover = false;
                }
            }
        }
    }
    r.require(
        "orientationsChecked",
        checked >= rounds,
        format!("only {checked} consistent orientations out of {rounds} requested"),
    );
    r.require("corridorSupremaNested", sup_nested, detail.clone());
    r.require("corridorSupremaStar", sups_star, "corridor suprema failed the star property");
    r.require(
        "supremumSeparatorCovered",
        separator_cover,
        "a finite separator subset is in no member separator",
    );

    // Grade-of-first-appearance is strictly monotone along chains of the
    // parliament.
    match parliament(p, &pts.family) {
        Ok(par) => {
            let mono = par.elements.iter().enumerate().all(|(i, a)| {
                par.elements.iter().enumerate().all(|(j, b)| {
                    i == j || !(a.sep.le(&b.sep) && a.sep != b.sep) || a.grade < b.grade
                })
            });
            r.require("gradeMonotoneAlongChains", mono, "a strictly larger element appeared no later");
        }
        Err(e) => r.fail("gradeMonotoneAlongChains", e.to_string()),
    }
    r
}

fn sample_vertex_subsets(pool: &[VertexRef], max_size: usize) -> Vec<Vec<VertexRef>> {
    let mut out = Vec::new();
    let mut stack: Vec<(usize, Vec<VertexRef>)> = vec![(0, Vec::new())];
    while let Some((start, cur)) = stack.pop() {
        if !cur.is_empty() {
            out.push(cur.clone());
            if out.len() > 2000 {
                break;
            }
        }
        if cur.len() == max_size {
            continue;
        }
        for (i, &v) in pool.iter().enumerate().skip(start) {
            let mut next = cur.clone();
            next.push(v);
            stack.push((i + 1, next));
        }
    }
    out
}
