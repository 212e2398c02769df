//! Tree-set structure over separation families: axioms, consistent
//! orientations, corridors and their suprema, parliaments, and the
//! leaf-or-end classification of parliament corridors.
//!
//! Families mix finitely many explicit members with level-parametric member
//! rules. All structural questions are decided on members materialized up to
//! the family's horizon; every conclusion that extends a pattern beyond the
//! horizon is re-verified for stability on the top of the window, and
//! instability is a hard error rather than a silent extrapolation.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::presentation::Presentation;
use crate::separation::{OrientedSeparation, Relation};
use crate::union_find::UnionFind;

/// Level-parametric family member: a pure generator from the parameter to a
/// concrete oriented separation.
#[derive(Clone)]
pub struct MemberRule {
    pub label: String,
    pub first_param: u32,
    gen: Arc<dyn Fn(u32) -> OrientedSeparation + Send + Sync>,
}

impl MemberRule {
    pub fn new(
        label: impl Into<String>,
        first_param: u32,
        gen: impl Fn(u32) -> OrientedSeparation + Send + Sync + 'static,
    ) -> Self {
        MemberRule { label: label.into(), first_param, gen: Arc::new(gen) }
    }

    pub fn materialize(&self, n: u32) -> OrientedSeparation {
        (self.gen)(n)
    }
}

impl fmt::Debug for MemberRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MemberRule({}, from {})", self.label, self.first_param)
    }
}

/// Identifies a member of a family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum MemberId {
    Explicit(usize),
    Rule { rule: usize, param: u32 },
}

/// Finitely many explicit separations plus parametric rules, with a
/// materialization horizon covering the stability window.
#[derive(Clone, Debug, Default)]
pub struct SeparationFamily {
    pub explicit: Vec<OrientedSeparation>,
    pub rules: Vec<MemberRule>,
    pub horizon: u32,
}

impl SeparationFamily {
    pub fn member(&self, id: MemberId) -> OrientedSeparation {
        match id {
            MemberId::Explicit(i) => self.explicit[i].clone(),
            MemberId::Rule { rule, param } => self.rules[rule].materialize(param),
        }
    }

    /// All members materialized up to the horizon.
    pub fn members(&self) -> Vec<(MemberId, OrientedSeparation)> {
        self.members_to(self.horizon)
    }

    pub fn members_to(&self, param_bound: u32) -> Vec<(MemberId, OrientedSeparation)> {
        let mut out = Vec::new();
        for (i, s) in self.explicit.iter().enumerate() {
            out.push((MemberId::Explicit(i), s.clone()));
        }
        for (r, rule) in self.rules.iter().enumerate() {
            for n in rule.first_param..=param_bound {
                out.push((MemberId::Rule { rule: r, param: n }, rule.materialize(n)));
            }
        }
        out
    }

    pub fn is_empty(&self) -> bool {
        self.explicit.is_empty() && self.rules.is_empty()
    }
}

#[derive(Debug, Error)]
pub enum TreeSetError {
    #[error("orientation is inconsistent: {0}")]
    Inconsistent(String),
    #[error("level-parametric behavior failed to stabilize: {0}")]
    Unstable(String),
    #[error("corridor has neither a maximum nor a usable cofinal chain")]
    NoMaxNoChain,
}

/// Outcome of the tree-set axiom checks.
#[derive(Clone, Debug, Default)]
pub struct TreeSetReport {
    pub nested: bool,
    pub regular: bool,
    pub no_trivial: bool,
    pub no_degenerate: bool,
    pub stable: bool,
    pub violations: Vec<String>,
}

impl TreeSetReport {
    pub fn all_ok(&self) -> bool {
        self.nested && self.regular && self.no_trivial && self.no_degenerate && self.stable
    }
}

/// Checks nestedness, regularity, absence of trivial and degenerate
/// elements, and rule stability over the top of the materialization window.
pub fn verify_tree_set(p: &Presentation, family: &SeparationFamily) -> TreeSetReport {
    let mut report = TreeSetReport {
        nested: true,
        regular: true,
        no_trivial: true,
        no_degenerate: true,
        stable: true,
        violations: Vec::new(),
    };
    let members = family.members();
    for (i, (id_a, a)) in members.iter().enumerate() {
        if a.is_small() || a.is_cosmall(p) {
            report.regular = false;
            report.violations.push(format!("{id_a:?} is small or co-small"));
        }
        if a.is_degenerate(p) {
            report.no_degenerate = false;
            report.violations.push(format!("{id_a:?} is degenerate"));
        }
        for (id_b, b) in members.iter().skip(i + 1) {
            if a.compare(b, p) == Relation::Crossing {
                report.nested = false;
                report.violations.push(format!("{id_a:?} crosses {id_b:?}"));
            }
        }
    }
    // Trivial elements: s strictly below both orientations of another member.
    for (id_a, a) in &members {
        for (id_b, b) in &members {
            if a == b || *b == a.invert(p) {
                continue;
            }
            let below = a.le(b) && *a != *b;
            let binv = b.invert(p);
            let below_inv = a.le(&binv) && *a != binv;
            if below && below_inv {
                report.no_trivial = false;
                report
                    .violations
                    .push(format!("{id_a:?} is trivial under {id_b:?}"));
            }
        }
    }
    if let Err(e) = check_rule_stability(p, family) {
        report.stable = false;
        report.violations.push(e.to_string());
    }
    report
}

/// Relations between rule members must depend only on the parameter offset
/// once both parameters are deep into the window.
pub fn check_rule_stability(p: &Presentation, family: &SeparationFamily) -> Result<(), TreeSetError> {
    let h = family.horizon;
    if h < 4 {
        return Ok(());
    }
    for (ri, rule_a) in family.rules.iter().enumerate() {
        for (rj, rule_b) in family.rules.iter().enumerate() {
            for delta in 0..=2u32 {
                let mut seen: Option<Relation> = None;
                for base in h - 3..=h - delta.max(1) {
                    let rel = rule_a
                        .materialize(base)
                        .compare(&rule_b.materialize(base + delta), p);
                    if ri == rj && delta == 0 {
                        continue;
                    }
                    if let Some(prev) = seen {
                        if prev != rel {
                            return Err(TreeSetError::Unstable(format!(
                                "rules {} and {} at offset {delta} flip from {prev:?} to {rel:?} near {base}",
                                rule_a.label, rule_b.label
                            )));
                        }
                    }
                    seen = Some(rel);
                }
            }
        }
        // Explicit members must relate uniformly to deep rule members.
        for (ei, e) in family.explicit.iter().enumerate() {
            let mut seen: Option<Relation> = None;
            for n in h - 2..=h {
                let rel = e.compare(&rule_a.materialize(n), p);
                if let Some(prev) = seen {
                    if prev != rel {
                        return Err(TreeSetError::Unstable(format!(
                            "explicit {ei} vs rule {} flips from {prev:?} to {rel:?} at {n}",
                            rule_a.label
                        )));
                    }
                }
                seen = Some(rel);
            }
        }
    }
    Ok(())
}

/// First pair of members pointing away from each other, if any.
pub fn consistency_violation(
    p: &Presentation,
    members: &[(MemberId, OrientedSeparation)],
) -> Option<(MemberId, MemberId)> {
    for (ia, a) in members {
        let ainv = a.invert(p);
        for (ib, b) in members {
            if ia == ib || *a == *b {
                continue;
            }
            if ainv.le(b) && ainv != *b {
                return Some((*ia, *ib));
            }
        }
    }
    None
}

/// Partition of the given oriented separations into corridors: classes of
/// the relation "some member of the set bounds both from above".
pub fn corridor_partition(members: &[OrientedSeparation]) -> Vec<Vec<usize>> {
    let n = members.len();
    let mut le = vec![vec![false; n]; n];
    for i in 0..n {
        for j in 0..n {
            le[i][j] = members[i].le(&members[j]);
        }
    }
    let mut uf = UnionFind::new(n);
    for i in 0..n {
        for j in i + 1..n {
            if (0..n).any(|r| le[i][r] && le[j][r]) {
                uf.union(i, j);
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for i in 0..n {
        let r = uf.find(i);
        groups.entry(r).or_default().push(i);
    }
    groups.into_values().collect()
}

/// Supremum of a set of oriented separations: union of small sides,
/// intersection of big sides.
pub fn supremum(members: &[OrientedSeparation]) -> OrientedSeparation {
    let mut it = members.iter();
    let first = it.next().expect("supremum of a nonempty set").clone();
    it.fold(first, |acc, s| acc.join(s))
}

/// A corridor of a grade-bounded orientation, materialized.
#[derive(Clone, Debug)]
pub struct Corridor {
    pub members: Vec<MemberId>,
    pub seps: Vec<OrientedSeparation>,
    pub sup: OrientedSeparation,
    /// Member equal to the supremum, when one exists.
    pub max: Option<MemberId>,
}

/// Corridors of `O_{<= grade}` plus rules whose deep members stay singleton
/// corridors at this grade.
#[derive(Clone, Debug)]
pub struct CorridorSet {
    pub grade: u32,
    pub corridors: Vec<Corridor>,
    /// `(rule, from_param)`: all members of the rule from the parameter on
    /// are singleton corridors, continuing uniformly past the horizon.
    pub singleton_tails: Vec<(usize, u32)>,
}

/// Computes the corridors of the members of order at most `grade`.
pub fn corridors(
    p: &Presentation,
    family: &SeparationFamily,
    grade: u32,
) -> Result<CorridorSet, TreeSetError> {
    let all = family.members();
    if let Some((a, b)) = consistency_violation(p, &all) {
        return Err(TreeSetError::Inconsistent(format!("{a:?} and {b:?} point away")));
    }
    let graded: Vec<(MemberId, OrientedSeparation)> = all
        .into_iter()
        .filter(|(_, s)| s.order() as u32 <= grade)
        .collect();
    let seps: Vec<OrientedSeparation> = graded.iter().map(|(_, s)| s.clone()).collect();
    let partition = corridor_partition(&seps);
    let mut corridors = Vec::new();
    for group in partition {
        let members: Vec<MemberId> = group.iter().map(|&i| graded[i].0).collect();
        let gseps: Vec<OrientedSeparation> = group.iter().map(|&i| seps[i].clone()).collect();
        let sup = supremum(&gseps);
        let max = group
            .iter()
            .find(|&&i| seps[i] == sup)
            .map(|&i| graded[i].0);
        corridors.push(Corridor { members, seps: gseps, sup, max });
    }
    corridors.sort_by(|a, b| a.members.cmp(&b.members));

    // Rules whose top-of-window members are singletons continue as
    // singleton corridors for every later parameter: any future witness
    // would also bound the top members, which stayed unbounded.
    let mut singleton_tails = Vec::new();
    for (r, rule) in family.rules.iter().enumerate() {
        if family.horizon < rule.first_param + 3 {
            continue;
        }
        if rule.materialize(family.horizon).order() as u32 > grade {
            continue;
        }
        let singleton_of = |param: u32| {
            corridors.iter().any(|c| {
                c.members.len() == 1 && c.members[0] == MemberId::Rule { rule: r, param }
            })
        };
        if !singleton_of(family.horizon) || !singleton_of(family.horizon - 1) {
            continue;
        }
        let mut from = family.horizon;
        while from > rule.first_param && singleton_of(from - 1) {
            from -= 1;
        }
        singleton_tails.push((r, from));
    }
    Ok(CorridorSet { grade, corridors, singleton_tails })
}

/// One element of a parliament: a corridor supremum at the grade where it
/// first appears.
#[derive(Clone, Debug)]
pub struct ParliamentElement {
    pub grade: u32,
    pub sep: OrientedSeparation,
    /// The member itself, for suprema of singleton corridors.
    pub member: Option<MemberId>,
}

/// The parliament of a consistent orientation: corridor suprema of every
/// grade, plus rules whose members continue as singleton corridors beyond
/// the horizon.
#[derive(Clone, Debug)]
pub struct Parliament {
    pub elements: Vec<ParliamentElement>,
    pub singleton_tails: Vec<(usize, u32)>,
    pub max_grade: u32,
}

pub fn parliament(p: &Presentation, family: &SeparationFamily) -> Result<Parliament, TreeSetError> {
    let members = family.members();
    let max_grade = members
        .iter()
        .map(|(_, s)| s.order() as u32)
        .max()
        .unwrap_or(0);
    let mut elements: Vec<ParliamentElement> = Vec::new();
    let mut tails: Vec<(usize, u32)> = Vec::new();
    for grade in 1..=max_grade {
        let cs = corridors(p, family, grade)?;
        for c in &cs.corridors {
            if elements.iter().any(|e| e.sep == c.sup) {
                continue;
            }
            let member = if c.members.len() == 1 { Some(c.members[0]) } else { c.max };
            elements.push(ParliamentElement { grade, sep: c.sup.clone(), member });
        }
        for &(rule, from) in &cs.singleton_tails {
            match tails.iter_mut().find(|(r, _)| *r == rule) {
                Some(entry) => entry.1 = entry.1.min(from),
                None => tails.push((rule, from)),
            }
        }
    }
    Ok(Parliament { elements, singleton_tails: tails, max_grade })
}

/// A corridor of the parliament with its leaf-or-end classification.
#[derive(Clone, Debug)]
pub struct ParliamentCorridor {
    pub element_ids: Vec<usize>,
    pub target: CorridorTarget,
    /// Singleton-tail rules absorbed into this corridor (mixed families);
    /// they contribute no star elements of their own.
    pub absorbed_tails: Vec<usize>,
}

#[derive(Clone)]
pub enum CorridorTarget {
    /// The corridor has a maximum; its star contribution is that element.
    Leaf(OrientedSeparation),
    /// The corridor is end-like; its star contribution comes from a strictly
    /// increasing cofinal chain of grade suprema.
    End(GradeChain),
}

impl fmt::Debug for CorridorTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CorridorTarget::Leaf(s) => write!(f, "Leaf(order {})", s.order()),
            CorridorTarget::End(c) => write!(f, "End({} steps)", c.steps.len()),
        }
    }
}

/// Canonical cofinal chain of an end-like corridor: the distinct corridor
/// suprema grade by grade, strictly increasing. Steps beyond the cached
/// prefix are regenerated from the family, so the chain is total.
#[derive(Clone)]
pub struct GradeChain {
    pub steps: Vec<OrientedSeparation>,
    anchor: OrientedSeparation,
    gen_family: SeparationFamily,
}

impl GradeChain {
    /// Builds the chain for the corridor containing `anchor`, caching
    /// `prefix` materialized steps.
    pub fn from_anchor(
        family: &SeparationFamily,
        anchor: OrientedSeparation,
        prefix: usize,
    ) -> Result<GradeChain, TreeSetError> {
        let mut chain = GradeChain { steps: Vec::new(), anchor, gen_family: family.clone() };
        chain.steps = chain.compute_steps(prefix)?;
        Ok(chain)
    }

    /// The chain member at position `i`, regenerating past the cached
    /// prefix when needed.
    pub fn step(&self, i: usize) -> Result<OrientedSeparation, TreeSetError> {
        if let Some(s) = self.steps.get(i) {
            return Ok(s.clone());
        }
        Ok(self.compute_steps(i + 1)?[i].clone())
    }

    /// First `count` distinct grade suprema of the anchor's corridor.
    fn compute_steps(&self, count: usize) -> Result<Vec<OrientedSeparation>, TreeSetError> {
        let mut distinct: Vec<OrientedSeparation> = Vec::new();
        let mut grade = 0u32;
        let mut stall = 0u32;
        while distinct.len() < count {
            grade += 1;
            stall += 1;
            if stall > 3 * count as u32 + self.gen_family.horizon + 16 {
                return Err(TreeSetError::Unstable(
                    "grade chain stopped producing new suprema".into(),
                ));
            }
            let Some(sup) = grade_supremum(&self.gen_family, grade, &self.anchor)? else {
                continue;
            };
            if distinct.last() == Some(&sup) {
                continue;
            }
            if let Some(last) = distinct.last() {
                if !last.le(&sup) {
                    return Err(TreeSetError::Unstable(
                        "grade suprema stopped increasing".into(),
                    ));
                }
            }
            distinct.push(sup);
            stall = 0;
        }
        Ok(distinct)
    }
}

/// Supremum of the corridor of `O_{<= grade}` containing `anchor`, or `None`
/// while the anchor's order exceeds the grade. Rule parameters are
/// materialized as far as the grade requires.
pub fn grade_supremum(
    family: &SeparationFamily,
    grade: u32,
    anchor: &OrientedSeparation,
) -> Result<Option<OrientedSeparation>, TreeSetError> {
    let bound = family.horizon.max(grade + 4);
    let members: Vec<(MemberId, OrientedSeparation)> = family
        .members_to(bound)
        .into_iter()
        .filter(|(_, s)| s.order() as u32 <= grade)
        .collect();
    let seps: Vec<OrientedSeparation> = members.iter().map(|(_, s)| s.clone()).collect();
    let partition = corridor_partition(&seps);
    for group in partition {
        if group.iter().any(|&i| seps[i] == *anchor) {
            let gseps: Vec<OrientedSeparation> = group.iter().map(|&i| seps[i].clone()).collect();
            return Ok(Some(supremum(&gseps)));
        }
    }
    Ok(None)
}

/// Union of `f(n)` over all `n >= from`, computed by detecting one of three
/// eventually-uniform patterns on the window `[probe, top]`: a constant
/// tail, a level-shift-stationary tail, or a monotone tail with
/// shift-stationary increments. Anything else is a hard error.
pub fn stable_union(
    from: u32,
    top: u32,
    f: impl Fn(u32) -> crate::symbolic::SymbolicVertexSet,
) -> Result<crate::symbolic::SymbolicVertexSet, TreeSetError> {
    use crate::symbolic::SymbolicVertexSet;
    assert!(top >= from + 3, "stability window too small");
    let probe = top - 3;
    let mut prefix = SymbolicVertexSet::default();
    for n in from..=probe {
        prefix = prefix.union(&f(n));
    }
    let window: Vec<SymbolicVertexSet> = (probe..=top).map(&f).collect();
    // Constant tail.
    if window.iter().all(|s| *s == window[0]) {
        return Ok(prefix);
    }
    // Shift-stationary tail: f(n + 1) = shift_up(f(n)).
    if window.windows(2).all(|w| w[0].shift_up(1) == w[1]) {
        return Ok(prefix.union(&window[0].union_of_upward_shifts()));
    }
    // Monotone with shift-stationary increments.
    let monotone = window.windows(2).all(|w| w[0].is_subset(&w[1]));
    if monotone {
        let diffs: Vec<SymbolicVertexSet> =
            window.windows(2).map(|w| w[1].difference(&w[0])).collect();
        if diffs.windows(2).all(|d| d[0].shift_up(1) == d[1]) {
            return Ok(prefix.union(&diffs[0].union_of_upward_shifts()));
        }
    }
    Err(TreeSetError::Unstable(
        "family union fits no eventually-uniform pattern".into(),
    ))
}

/// The part defined by a family read as a consistent orientation: the
/// complement of the union of all small sides, rule tails resolved by
/// `stable_union`.
pub fn family_part(
    p: &Presentation,
    family: &SeparationFamily,
) -> Result<crate::symbolic::SymbolicVertexSet, TreeSetError> {
    let mut small = crate::symbolic::SymbolicVertexSet::default();
    for s in &family.explicit {
        small = small.union(&s.small_side);
    }
    for rule in &family.rules {
        let top = family.horizon.max(rule.first_param + 3);
        let tail = stable_union(rule.first_param, top, |n| rule.materialize(n).small_side)?;
        small = small.union(&tail);
    }
    Ok(small.complement(p))
}

/// Corridors of the parliament, classified as leaves or ends. The returned
/// leaf tails are rules all whose deep members remain singleton leaf
/// corridors of the parliament.
#[derive(Clone, Debug)]
pub struct ParliamentStructure {
    pub corridors: Vec<ParliamentCorridor>,
    /// `(rule, from_param)` for parametric families of singleton leaf
    /// corridors.
    pub leaf_tails: Vec<(usize, u32)>,
}

pub fn parliament_corridors(
    family: &SeparationFamily,
    par: &Parliament,
) -> Result<ParliamentStructure, TreeSetError> {
    let seps: Vec<OrientedSeparation> = par.elements.iter().map(|e| e.sep.clone()).collect();
    let partition = corridor_partition(&seps);
    let mut corridors = Vec::new();
    let mut absorbed: BTreeSet<usize> = BTreeSet::new();
    for group in &partition {
        // End-like iff the suprema keep strictly growing at the top grades.
        let mut by_grade: Vec<usize> = group.clone();
        by_grade.sort_by_key(|&i| (par.elements[i].grade, par.elements[i].sep.order()));
        let chain: Vec<OrientedSeparation> = {
            let mut out: Vec<OrientedSeparation> = Vec::new();
            for &i in &by_grade {
                let s = &par.elements[i].sep;
                if out.iter().any(|t| t == s) {
                    continue;
                }
                if out.last().is_some_and(|last| !last.le(s)) {
                    continue;
                }
                out.push(s.clone());
            }
            out
        };
        // Anchor at the lowest-order member, when the corridor has one.
        let anchor = by_grade
            .iter()
            .filter_map(|&i| par.elements[i].member.map(|m| family.member(m)))
            .min_by_key(|s| (s.order(), s.separator.clone()));
        // End-like iff the corridor supremum still grows past the top grade.
        let growing = match &anchor {
            Some(a) => {
                let probe = grade_supremum(family, par.max_grade + 2, a)?;
                match probe {
                    Some(sup) => chain.last().is_some_and(|last| *last != sup && last.le(&sup)),
                    None => false,
                }
            }
            None => false,
        };
        let target = if growing {
            // Which singleton tails this chain absorbs: their top members lie
            // below the chain top.
            let top = chain.last().unwrap().clone();
            for &(rule, _) in &par.singleton_tails {
                let probe = family.rules[rule].materialize(family.horizon);
                // Deep tail members exceed the materialized top; test a
                // mid-window member instead.
                let mid = family.rules[rule].materialize(family.horizon.saturating_sub(3));
                if mid.le(&top) || probe.le(&top) {
                    absorbed.insert(rule);
                }
            }
            let anchor = anchor.expect("growing corridors are anchored");
            let gc = GradeChain::from_anchor(family, anchor, chain.len())?;
            if gc.steps != chain {
                return Err(TreeSetError::Unstable(
                    "regenerated grade chain disagrees with parliament suprema".into(),
                ));
            }
            CorridorTarget::End(gc)
        } else {
            CorridorTarget::Leaf(chain.last().unwrap().clone())
        };
        corridors.push(ParliamentCorridor {
            element_ids: group.clone(),
            target,
            absorbed_tails: absorbed.iter().copied().collect(),
        });
    }
    let leaf_tails: Vec<(usize, u32)> = par
        .singleton_tails
        .iter()
        .copied()
        .filter(|(r, _)| !absorbed.contains(r))
        .collect();
    Ok(ParliamentStructure { corridors, leaf_tails })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::symbolic::{CopyFamily, GradedPart, LevelSet, SymbolicVertexSet};
    use crate::vertex::VertexRef;

    fn chain_sep(n: u32) -> OrientedSeparation {
        let separator: BTreeSet<VertexRef> = (0..=n).map(VertexRef::Spine).collect();
        let mut small = SymbolicVertexSet::default();
        let slice = CopyFamily::uniform([0].into_iter().collect());
        small.graded.insert(
            0,
            GradedPart::from_level(slice, LevelSet::Finite((0..=n).collect())),
        );
        OrientedSeparation::new(separator, small)
    }

    fn chain_family(horizon: u32) -> SeparationFamily {
        SeparationFamily {
            explicit: vec![],
            rules: vec![MemberRule::new("chain", 0, chain_sep)],
            horizon,
        }
    }

    #[test]
    fn chain_is_regular_tree_set() {
        let (p, _) = corpus::graded_chain();
        let report = verify_tree_set(&p, &chain_family(8));
        assert!(report.all_ok(), "{:?}", report.violations);
    }

    #[test]
    fn small_member_flagged() {
        let (p, _) = corpus::finite_path();
        // A separation with empty small side is small, not regular.
        let s = OrientedSeparation::new(
            [VertexRef::Kernel(1)].into_iter().collect(),
            SymbolicVertexSet::default(),
        );
        let family = SeparationFamily { explicit: vec![s], rules: vec![], horizon: 0 };
        let report = verify_tree_set(&p, &family);
        assert!(!report.regular);
        assert!(report.nested);
    }

    #[test]
    fn crossing_pair_reported() {
        // Opposite corner separations of a 4-cycle cross.
        let p = crate::presentation::Presentation {
            kernel: crate::finite_graph::FiniteGraph::with_edges(
                4,
                &[(0, 1), (1, 2), (2, 3), (0, 3)],
            ),
            has_spine: false,
            spine_anchor: None,
            fan_classes: vec![],
            graded_classes: vec![],
        };
        p.validate().unwrap();
        let s0 = OrientedSeparation::new(
            [VertexRef::Kernel(0), VertexRef::Kernel(2)].into_iter().collect(),
            SymbolicVertexSet::singleton(VertexRef::Kernel(1)),
        );
        let s1 = OrientedSeparation::new(
            [VertexRef::Kernel(1), VertexRef::Kernel(3)].into_iter().collect(),
            SymbolicVertexSet::singleton(VertexRef::Kernel(0)),
        );
        s0.validate(&p).unwrap();
        s1.validate(&p).unwrap();
        assert_eq!(s0.compare(&s1, &p), Relation::Crossing);
        let family = SeparationFamily { explicit: vec![s0, s1], rules: vec![], horizon: 0 };
        let report = verify_tree_set(&p, &family);
        assert!(!report.nested);
        assert!(report.violations.iter().any(|v| v.contains("crosses")));
    }

    #[test]
    fn chain_corridors_single() {
        let (p, _) = corpus::graded_chain();
        let cs = corridors(&p, &chain_family(8), 3).unwrap();
        // Members of order <= 3: parameters 0, 1, 2 forming one corridor.
        assert_eq!(cs.corridors.len(), 1);
        assert_eq!(cs.corridors[0].members.len(), 3);
        assert_eq!(cs.corridors[0].sup, chain_sep(2));
        assert_eq!(
            cs.corridors[0].max,
            Some(MemberId::Rule { rule: 0, param: 2 })
        );
        assert!(cs.singleton_tails.is_empty());
    }

    #[test]
    fn empty_grade_no_corridors() {
        let (p, _) = corpus::graded_chain();
        let cs = corridors(&p, &chain_family(8), 0).unwrap();
        assert!(cs.corridors.is_empty());
    }

    #[test]
    fn chain_parliament_is_the_chain() {
        let (p, _) = corpus::graded_chain();
        let family = chain_family(8);
        let par = parliament(&p, &family).unwrap();
        // Every grade's single corridor has its top member as supremum.
        assert_eq!(par.elements.len(), 9);
        for (i, e) in par.elements.iter().enumerate() {
            assert_eq!(e.sep, chain_sep(i as u32));
        }
        let structure = parliament_corridors(&family, &par).unwrap();
        assert_eq!(structure.corridors.len(), 1);
        match &structure.corridors[0].target {
            CorridorTarget::End(chain) => {
                assert_eq!(chain.steps[0], chain_sep(0));
                // Regeneration past the horizon.
                let s10 = chain.step(10).unwrap();
                assert_eq!(s10, chain_sep(10));
            }
            other => panic!("expected end target, got {other:?}"),
        }
        assert!(structure.leaf_tails.is_empty());
    }

    #[test]
    fn two_incomparable_members_two_corridors() {
        let (p, _) = corpus::fan_two_classes();
        let mk = |class: u32, ks: [u32; 2]| {
            let mut small = SymbolicVertexSet::default();
            small
                .fan
                .insert(class, CopyFamily::uniform([0].into_iter().collect()));
            OrientedSeparation::new(ks.into_iter().map(VertexRef::Kernel).collect(), small)
        };
        let family = SeparationFamily {
            explicit: vec![mk(0, [0, 1]), mk(1, [1, 2])],
            rules: vec![],
            horizon: 0,
        };
        let cs = corridors(&p, &family, 5).unwrap();
        assert_eq!(cs.corridors.len(), 2);
        for c in &cs.corridors {
            assert_eq!(c.members.len(), 1);
            assert!(c.max.is_some());
        }
        let par = parliament(&p, &family).unwrap();
        let structure = parliament_corridors(&family, &par).unwrap();
        assert_eq!(structure.corridors.len(), 2);
        assert!(structure
            .corridors
            .iter()
            .all(|c| matches!(c.target, CorridorTarget::Leaf(_))));
    }

    #[test]
    fn supremum_of_directed_pair_is_top() {
        let s1 = chain_sep(1);
        let s2 = chain_sep(4);
        assert_eq!(supremum(&[s1, s2.clone()]), s2);
    }

    #[test]
    fn inconsistent_orientation_rejected() {
        let (p, _) = corpus::graded_chain();
        let s = chain_sep(2);
        let family = SeparationFamily {
            explicit: vec![chain_sep(0).invert(&p), s],
            rules: vec![],
            horizon: 0,
        };
        // invert(s(0)) and s(2): invert(invert(s0)) = s0 <= s2, so the pair
        // (invert(s0), s2) points away from each other.
        assert!(matches!(corridors(&p, &family, 9), Err(TreeSetError::Inconsistent(_))));
    }
}

#[cfg(test)]
mod end_corridor_tests {
    use super::*;
    use crate::corpus;
    use crate::separation::star_property_violation;
    use crate::symbolic::{CopyFamily, GradedPart, LevelSet, SymbolicVertexSet};
    use crate::vertex::VertexRef;

    fn chain_sep(n: u32) -> OrientedSeparation {
        let separator: std::collections::BTreeSet<VertexRef> =
            (0..=n).map(VertexRef::Spine).collect();
        let mut small = SymbolicVertexSet::default();
        let slice = CopyFamily::uniform([0].into_iter().collect());
        small.graded.insert(
            0,
            GradedPart::from_level(slice, LevelSet::Finite((0..=n).collect())),
        );
        OrientedSeparation::new(separator, small)
    }

    /// Turning the end-like chain into a star: foot plus corners, all
    /// validated, pairwise star-ordered, and regenerable past the horizon.
    #[test]
    fn chain_to_corner_star_pipeline() {
        let (p, _) = corpus::graded_chain();
        let family = SeparationFamily {
            explicit: vec![],
            rules: vec![MemberRule::new("chain", 0, chain_sep)],
            horizon: 8,
        };
        let par = parliament(&p, &family).unwrap();
        let structure = parliament_corridors(&family, &par).unwrap();
        assert_eq!(structure.corridors.len(), 1);
        let CorridorTarget::End(chain) = &structure.corridors[0].target else {
            panic!("chain family must classify as an end");
        };
        // Assemble the corner star, regenerating two steps past the horizon.
        let mut star = vec![chain.step(0).unwrap()];
        for j in 1..=10 {
            let hi = chain.step(j).unwrap();
            let lo = chain.step(j - 1).unwrap();
            let corner = hi.meet(&lo.invert(&p));
            corner.validate(&p).unwrap();
            assert_eq!(corner.order(), j + 1);
            star.push(corner);
        }
        assert_eq!(star_property_violation(&p, &star), None);
        // The star's part is the complement of the union of small sides;
        // the chain members all dominate it from below.
        let mut small = SymbolicVertexSet::default();
        for s in &star {
            small = small.union(&s.small_side);
        }
        let part = small.complement(&p);
        assert!(part.contains(VertexRef::Spine(0)));
        assert!(part.contains(VertexRef::Spine(500)));
        assert!(!part.contains(VertexRef::Graded { class: 0, level: 4, copy: 9, local: 0 }));
    }

    /// The band family with truncated initial windows keeps a finite
    /// directed corridor at the bottom and singleton leaves above; nothing
    /// classifies as an end.
    #[test]
    fn band_family_corridors_are_leaves() {
        let (p, t) = corpus::banded_chain(3);
        let pts = crate::assignment::build_principal_tree_set(&p, &t).unwrap();
        let par = parliament(&p, &pts.family).unwrap();
        let structure = parliament_corridors(&pts.family, &par).unwrap();
        assert!(structure
            .corridors
            .iter()
            .all(|c| matches!(c.target, CorridorTarget::Leaf(_))));
        assert_eq!(structure.leaf_tails.len(), 1);
    }
}
