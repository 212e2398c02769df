//! Decidable symbolic vertex sets.
//!
//! A `SymbolicVertexSet` denotes a (possibly infinite) vertex set of a
//! presented graph in a canonical normal form: a finite kernel subset, a
//! finite-or-cofinite set of spine levels, and per replicated class an
//! eventually-uniform selection of `(copy, local)` pairs (respectively
//! `(level, copy, local)` triples for graded classes). The form is closed
//! under union, intersection, difference and complement, membership is
//! decidable, and equal sets have equal representations once canonicalized.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::presentation::Presentation;
use crate::vertex::VertexRef;

/// Finite or cofinite set of nonnegative levels.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum LevelSet {
    Finite(BTreeSet<u32>),
    /// All levels except the listed ones.
    Cofinite(BTreeSet<u32>),
}

impl Default for LevelSet {
    fn default() -> Self {
        LevelSet::Finite(BTreeSet::new())
    }
}

impl LevelSet {
    pub fn finite(levels: impl IntoIterator<Item = u32>) -> Self {
        LevelSet::Finite(levels.into_iter().collect())
    }

    pub fn cofinite(missing: impl IntoIterator<Item = u32>) -> Self {
        LevelSet::Cofinite(missing.into_iter().collect())
    }

    /// All levels from `from` upward.
    pub fn tail(from: u32) -> Self {
        LevelSet::Cofinite((0..from).collect())
    }

    pub fn contains(&self, m: u32) -> bool {
        match self {
            LevelSet::Finite(s) => s.contains(&m),
            LevelSet::Cofinite(s) => !s.contains(&m),
        }
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, LevelSet::Finite(s) if s.is_empty())
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, LevelSet::Finite(_))
    }

    pub fn min(&self) -> Option<u32> {
        match self {
            LevelSet::Finite(s) => s.first().copied(),
            LevelSet::Cofinite(s) => Some((0..).find(|m| !s.contains(m)).unwrap()),
        }
    }

    pub fn union(&self, other: &LevelSet) -> LevelSet {
        use LevelSet::*;
        match (self, other) {
            (Finite(a), Finite(b)) => Finite(a.union(b).copied().collect()),
            (Finite(a), Cofinite(b)) | (Cofinite(b), Finite(a)) => {
                Cofinite(b.iter().filter(|m| !a.contains(m)).copied().collect())
            }
            (Cofinite(a), Cofinite(b)) => {
                Cofinite(a.intersection(b).copied().collect())
            }
        }
    }

    pub fn intersect(&self, other: &LevelSet) -> LevelSet {
        use LevelSet::*;
        match (self, other) {
            (Finite(a), Finite(b)) => Finite(a.intersection(b).copied().collect()),
            (Finite(a), Cofinite(b)) | (Cofinite(b), Finite(a)) => {
                Finite(a.iter().filter(|m| !b.contains(m)).copied().collect())
            }
            (Cofinite(a), Cofinite(b)) => Cofinite(a.union(b).copied().collect()),
        }
    }

    pub fn complement(&self) -> LevelSet {
        match self {
            LevelSet::Finite(s) => LevelSet::Cofinite(s.clone()),
            LevelSet::Cofinite(s) => LevelSet::Finite(s.clone()),
        }
    }

    pub fn difference(&self, other: &LevelSet) -> LevelSet {
        self.intersect(&other.complement())
    }

    pub fn is_subset(&self, other: &LevelSet) -> bool {
        self.difference(other).is_empty()
    }

    /// Shifts every level up by `t`.
    pub fn shift_up(&self, t: u32) -> LevelSet {
        match self {
            LevelSet::Finite(s) => LevelSet::Finite(s.iter().map(|m| m + t).collect()),
            LevelSet::Cofinite(s) => {
                let mut missing: BTreeSet<u32> = (0..t).collect();
                missing.extend(s.iter().map(|m| m + t));
                LevelSet::Cofinite(missing)
            }
        }
    }

    /// Levels in `0..=bound` as an explicit list.
    pub fn enumerate_up_to(&self, bound: u32) -> Vec<u32> {
        (0..=bound).filter(|&m| self.contains(m)).collect()
    }
}

/// A set of `(copy, local)` pairs that is uniform in the copy index outside
/// finitely many exceptional copies.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CopyFamily {
    /// Locals selected in every copy not listed in `exceptions`.
    #[serde(default, skip_serializing_if = "BTreeSet::is_empty")]
    pub default: BTreeSet<u32>,
    /// Copies whose local selection differs from the default.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub exceptions: BTreeMap<u32, BTreeSet<u32>>,
}

impl CopyFamily {
    pub fn uniform(locals: BTreeSet<u32>) -> Self {
        CopyFamily { default: locals, exceptions: BTreeMap::new() }
    }

    pub fn single_copy(copy: u32, locals: BTreeSet<u32>) -> Self {
        let mut exceptions = BTreeMap::new();
        exceptions.insert(copy, locals);
        let mut f = CopyFamily { default: BTreeSet::new(), exceptions };
        f.canonicalize();
        f
    }

    pub fn locals_at(&self, copy: u32) -> &BTreeSet<u32> {
        self.exceptions.get(&copy).unwrap_or(&self.default)
    }

    pub fn contains(&self, copy: u32, local: u32) -> bool {
        self.locals_at(copy).contains(&local)
    }

    pub fn is_empty(&self) -> bool {
        self.default.is_empty() && self.exceptions.values().all(|l| l.is_empty())
    }

    /// Finitely many vertices selected overall.
    pub fn is_finite(&self) -> bool {
        self.default.is_empty()
    }

    pub fn canonicalize(&mut self) {
        self.exceptions.retain(|_, l| l != &self.default);
    }

    fn zip(&self, other: &CopyFamily, op: impl Fn(&BTreeSet<u32>, &BTreeSet<u32>) -> BTreeSet<u32>) -> CopyFamily {
        let default = op(&self.default, &other.default);
        let mut exceptions = BTreeMap::new();
        let keys: BTreeSet<u32> = self
            .exceptions
            .keys()
            .chain(other.exceptions.keys())
            .copied()
            .collect();
        for k in keys {
            let v = op(self.locals_at(k), other.locals_at(k));
            if v != default {
                exceptions.insert(k, v);
            }
        }
        CopyFamily { default, exceptions }
    }

    pub fn union(&self, other: &CopyFamily) -> CopyFamily {
        self.zip(other, |a, b| a.union(b).copied().collect())
    }

    pub fn intersect(&self, other: &CopyFamily) -> CopyFamily {
        self.zip(other, |a, b| a.intersection(b).copied().collect())
    }

    pub fn difference(&self, other: &CopyFamily) -> CopyFamily {
        self.zip(other, |a, b| a.difference(b).copied().collect())
    }

    pub fn complement_within(&self, template_size: u32) -> CopyFamily {
        let full: BTreeSet<u32> = (0..template_size).collect();
        let mut out = CopyFamily {
            default: full.difference(&self.default).copied().collect(),
            exceptions: BTreeMap::new(),
        };
        for (&k, l) in &self.exceptions {
            out.exceptions
                .insert(k, full.difference(l).copied().collect());
        }
        out.canonicalize();
        out
    }

    /// Least selected `(copy, local)` pair.
    pub fn min_pair(&self) -> Option<(u32, u32)> {
        let probe_to = self.exceptions.keys().next_back().map_or(0, |k| k + 1);
        for copy in 0..=probe_to {
            if let Some(&local) = self.locals_at(copy).first() {
                return Some((copy, local));
            }
        }
        None
    }

    /// Some copy whose selection includes `local`, preferring the smallest.
    pub fn some_copy_with(&self, local: u32) -> Option<u32> {
        let probe_to = self.exceptions.keys().next_back().map_or(0, |k| k + 1);
        (0..=probe_to).find(|&copy| self.contains(copy, local))
    }

    /// A copy index where both families use their defaults.
    fn fresh_copy(&self, other: &CopyFamily) -> u32 {
        let a = self.exceptions.keys().next_back().map_or(0, |k| k + 1);
        let b = other.exceptions.keys().next_back().map_or(0, |k| k + 1);
        a.max(b)
    }

    /// A copy selected (with `l1`) here and (with `l2`) in `other`.
    pub fn common_copy(&self, l1: u32, other: &CopyFamily, l2: u32) -> Option<u32> {
        let mut candidates: BTreeSet<u32> = self.exceptions.keys().copied().collect();
        candidates.extend(other.exceptions.keys().copied());
        candidates.insert(self.fresh_copy(other));
        candidates
            .into_iter()
            .find(|&i| self.contains(i, l1) && other.contains(i, l2))
    }

    /// All selected pairs when the family is finite.
    pub fn enumerate_finite(&self) -> Option<Vec<(u32, u32)>> {
        if !self.is_finite() {
            return None;
        }
        let mut out = Vec::new();
        for (&copy, locals) in &self.exceptions {
            for &l in locals {
                out.push((copy, l));
            }
        }
        Some(out)
    }
}

/// A set of `(level, copy, local)` triples, eventually uniform in the level.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct GradedPart {
    /// Slice used at every level not listed in `exceptions`.
    #[serde(default, skip_serializing_if = "CopyFamily::is_empty")]
    pub default: CopyFamily,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub exceptions: BTreeMap<u32, CopyFamily>,
}

impl GradedPart {
    pub fn uniform(slice: CopyFamily) -> Self {
        GradedPart { default: slice, exceptions: BTreeMap::new() }
    }

    pub fn single_level(level: u32, slice: CopyFamily) -> Self {
        let mut exceptions = BTreeMap::new();
        exceptions.insert(level, slice);
        let mut p = GradedPart { default: CopyFamily::default(), exceptions };
        p.canonicalize();
        p
    }

    /// The slice at every level of `levels`, empty elsewhere.
    pub fn from_level(slice: CopyFamily, levels: LevelSet) -> Self {
        match levels {
            LevelSet::Finite(set) => {
                let mut exceptions = BTreeMap::new();
                for m in set {
                    exceptions.insert(m, slice.clone());
                }
                let mut p = GradedPart { default: CopyFamily::default(), exceptions };
                p.canonicalize();
                p
            }
            LevelSet::Cofinite(missing) => {
                let mut exceptions = BTreeMap::new();
                for m in missing {
                    exceptions.insert(m, CopyFamily::default());
                }
                let mut p = GradedPart { default: slice, exceptions };
                p.canonicalize();
                p
            }
        }
    }

    pub fn slice_at(&self, level: u32) -> &CopyFamily {
        self.exceptions.get(&level).unwrap_or(&self.default)
    }

    pub fn contains(&self, level: u32, copy: u32, local: u32) -> bool {
        self.slice_at(level).contains(copy, local)
    }

    pub fn is_empty(&self) -> bool {
        self.default.is_empty() && self.exceptions.values().all(|s| s.is_empty())
    }

    pub fn is_finite(&self) -> bool {
        self.default.is_empty() && self.exceptions.values().all(|s| s.is_finite())
    }

    pub fn canonicalize(&mut self) {
        for s in self.exceptions.values_mut() {
            s.canonicalize();
        }
        self.default.canonicalize();
        self.exceptions.retain(|_, s| s != &self.default);
    }

    fn zip(&self, other: &GradedPart, op: impl Fn(&CopyFamily, &CopyFamily) -> CopyFamily) -> GradedPart {
        let default = op(&self.default, &other.default);
        let mut exceptions = BTreeMap::new();
        let keys: BTreeSet<u32> = self
            .exceptions
            .keys()
            .chain(other.exceptions.keys())
            .copied()
            .collect();
        for k in keys {
            let v = op(self.slice_at(k), other.slice_at(k));
            if v != default {
                exceptions.insert(k, v);
            }
        }
        let mut p = GradedPart { default, exceptions };
        p.canonicalize();
        p
    }

    pub fn union(&self, other: &GradedPart) -> GradedPart {
        self.zip(other, |a, b| a.union(b))
    }

    pub fn intersect(&self, other: &GradedPart) -> GradedPart {
        self.zip(other, |a, b| a.intersect(b))
    }

    pub fn difference(&self, other: &GradedPart) -> GradedPart {
        self.zip(other, |a, b| a.difference(b))
    }

    pub fn complement_within(&self, template_size: u32) -> GradedPart {
        let mut out = GradedPart {
            default: self.default.complement_within(template_size),
            exceptions: BTreeMap::new(),
        };
        for (&k, s) in &self.exceptions {
            out.exceptions.insert(k, s.complement_within(template_size));
        }
        out.canonicalize();
        out
    }

    pub fn min_triple(&self) -> Option<(u32, u32, u32)> {
        let probe_to = self.exceptions.keys().next_back().map_or(0, |k| k + 1);
        for level in 0..=probe_to {
            if let Some((copy, local)) = self.slice_at(level).min_pair() {
                return Some((level, copy, local));
            }
        }
        None
    }

    pub fn shift_up(&self, t: u32) -> GradedPart {
        let mut exceptions: BTreeMap<u32, CopyFamily> = self
            .exceptions
            .iter()
            .map(|(&k, v)| (k + t, v.clone()))
            .collect();
        for m in 0..t {
            exceptions.insert(m, CopyFamily::default());
        }
        let mut p = GradedPart { default: self.default.clone(), exceptions };
        p.canonicalize();
        p
    }

    /// Replaces the slice at each level by the union of all slices at that
    /// level and below. Equals the union of all upward shifts of `self`.
    pub fn cumulative_up(&self) -> GradedPart {
        let top = self.exceptions.keys().next_back().map_or(0, |k| k + 1);
        let mut running = CopyFamily::default();
        let mut exceptions = BTreeMap::new();
        for level in 0..=top {
            running = running.union(self.slice_at(level));
            exceptions.insert(level, running.clone());
        }
        let mut p = GradedPart { default: running, exceptions };
        p.canonicalize();
        p
    }

    fn fresh_level(&self, other: &GradedPart) -> u32 {
        let a = self.exceptions.keys().next_back().map_or(0, |k| k + 1);
        let b = other.exceptions.keys().next_back().map_or(0, |k| k + 1);
        a.max(b)
    }

    /// A `(level, copy)` selected (with `l1`) here and (with `l2`) in `other`.
    pub fn common_level_copy(&self, l1: u32, other: &GradedPart, l2: u32) -> Option<(u32, u32)> {
        let mut levels: BTreeSet<u32> = self.exceptions.keys().copied().collect();
        levels.extend(other.exceptions.keys().copied());
        levels.insert(self.fresh_level(other));
        for n in levels {
            if let Some(copy) = self.slice_at(n).common_copy(l1, other.slice_at(n), l2) {
                return Some((n, copy));
            }
        }
        None
    }

    pub fn enumerate_finite(&self) -> Option<Vec<(u32, u32, u32)>> {
        if !self.is_finite() {
            return None;
        }
        let mut out = Vec::new();
        for (&level, slice) in &self.exceptions {
            for (copy, local) in slice.enumerate_finite().unwrap() {
                out.push((level, copy, local));
            }
        }
        Some(out)
    }
}

/// Canonical symbolic vertex set of a presented graph.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SymbolicVertexSet {
    #[serde(default, skip_serializing_if = "BTreeSet::is_empty")]
    pub kernel: BTreeSet<u32>,
    #[serde(default, skip_serializing_if = "LevelSet::is_empty")]
    pub spine: LevelSet,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub fan: BTreeMap<u32, CopyFamily>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub graded: BTreeMap<u32, GradedPart>,
}

impl SymbolicVertexSet {
    pub fn empty() -> Self {
        SymbolicVertexSet::default()
    }

    pub fn singleton(v: VertexRef) -> Self {
        let mut s = SymbolicVertexSet::default();
        s.insert_vertex(v);
        s
    }

    pub fn from_vertices(vs: impl IntoIterator<Item = VertexRef>) -> Self {
        let mut s = SymbolicVertexSet::default();
        for v in vs {
            s.insert_vertex(v);
        }
        s
    }

    pub fn insert_vertex(&mut self, v: VertexRef) {
        match v {
            VertexRef::Kernel(i) => {
                self.kernel.insert(i);
            }
            VertexRef::Spine(m) => {
                self.spine = self.spine.union(&LevelSet::finite([m]));
            }
            VertexRef::Fan { class, copy, local } => {
                let part = self.fan.entry(class).or_default();
                let mut locals = part.locals_at(copy).clone();
                locals.insert(local);
                part.exceptions.insert(copy, locals);
                part.canonicalize();
            }
            VertexRef::Graded { class, level, copy, local } => {
                let part = self.graded.entry(class).or_default();
                let mut slice = part.slice_at(level).clone();
                let mut locals = slice.locals_at(copy).clone();
                locals.insert(local);
                slice.exceptions.insert(copy, locals);
                slice.canonicalize();
                part.exceptions.insert(level, slice);
                part.canonicalize();
            }
        }
        self.canonicalize();
    }

    pub fn contains(&self, v: VertexRef) -> bool {
        match v {
            VertexRef::Kernel(i) => self.kernel.contains(&i),
            VertexRef::Spine(m) => self.spine.contains(m),
            VertexRef::Fan { class, copy, local } => self
                .fan
                .get(&class)
                .is_some_and(|p| p.contains(copy, local)),
            VertexRef::Graded { class, level, copy, local } => self
                .graded
                .get(&class)
                .is_some_and(|p| p.contains(level, copy, local)),
        }
    }

    pub fn canonicalize(&mut self) {
        for p in self.fan.values_mut() {
            p.canonicalize();
        }
        for p in self.graded.values_mut() {
            p.canonicalize();
        }
        self.fan.retain(|_, p| !p.is_empty());
        self.graded.retain(|_, p| !p.is_empty());
        if let LevelSet::Finite(_) = self.spine {
            // already canonical
        }
    }

    pub fn is_empty(&self) -> bool {
        self.kernel.is_empty()
            && self.spine.is_empty()
            && self.fan.values().all(|p| p.is_empty())
            && self.graded.values().all(|p| p.is_empty())
    }

    pub fn is_finite(&self) -> bool {
        self.spine.is_finite()
            && self.fan.values().all(|p| p.is_finite())
            && self.graded.values().all(|p| p.is_finite())
    }

    fn zip(
        &self,
        other: &SymbolicVertexSet,
        kop: impl Fn(&BTreeSet<u32>, &BTreeSet<u32>) -> BTreeSet<u32>,
        sop: impl Fn(&LevelSet, &LevelSet) -> LevelSet,
        fop: impl Fn(&CopyFamily, &CopyFamily) -> CopyFamily,
        gop: impl Fn(&GradedPart, &GradedPart) -> GradedPart,
    ) -> SymbolicVertexSet {
        let empty_f = CopyFamily::default();
        let empty_g = GradedPart::default();
        let mut fan = BTreeMap::new();
        let fkeys: BTreeSet<u32> = self.fan.keys().chain(other.fan.keys()).copied().collect();
        for k in fkeys {
            let v = fop(
                self.fan.get(&k).unwrap_or(&empty_f),
                other.fan.get(&k).unwrap_or(&empty_f),
            );
            fan.insert(k, v);
        }
        let mut graded = BTreeMap::new();
        let gkeys: BTreeSet<u32> = self
            .graded
            .keys()
            .chain(other.graded.keys())
            .copied()
            .collect();
        for k in gkeys {
            let v = gop(
                self.graded.get(&k).unwrap_or(&empty_g),
                other.graded.get(&k).unwrap_or(&empty_g),
            );
            graded.insert(k, v);
        }
        let mut out = SymbolicVertexSet {
            kernel: kop(&self.kernel, &other.kernel),
            spine: sop(&self.spine, &other.spine),
            fan,
            graded,
        };
        out.canonicalize();
        out
    }

    pub fn union(&self, other: &SymbolicVertexSet) -> SymbolicVertexSet {
        self.zip(
            other,
            |a, b| a.union(b).copied().collect(),
            LevelSet::union,
            CopyFamily::union,
            GradedPart::union,
        )
    }

    pub fn intersect(&self, other: &SymbolicVertexSet) -> SymbolicVertexSet {
        self.zip(
            other,
            |a, b| a.intersection(b).copied().collect(),
            LevelSet::intersect,
            CopyFamily::intersect,
            GradedPart::intersect,
        )
    }

    pub fn difference(&self, other: &SymbolicVertexSet) -> SymbolicVertexSet {
        self.zip(
            other,
            |a, b| a.difference(b).copied().collect(),
            LevelSet::difference,
            CopyFamily::difference,
            GradedPart::difference,
        )
    }

    /// Complement relative to the full vertex set of `p`.
    pub fn complement(&self, p: &Presentation) -> SymbolicVertexSet {
        p.universe().difference(self)
    }

    pub fn is_subset(&self, other: &SymbolicVertexSet) -> bool {
        self.difference(other).is_empty()
    }

    pub fn intersects(&self, other: &SymbolicVertexSet) -> bool {
        !self.intersect(other).is_empty()
    }

    /// Canonically least member.
    pub fn min_vertex(&self) -> Option<VertexRef> {
        if let Some(&i) = self.kernel.first() {
            return Some(VertexRef::Kernel(i));
        }
        if let Some(m) = self.spine.min() {
            return Some(VertexRef::Spine(m));
        }
        for (&class, part) in &self.fan {
            if let Some((copy, local)) = part.min_pair() {
                return Some(VertexRef::Fan { class, copy, local });
            }
        }
        for (&class, part) in &self.graded {
            if let Some((level, copy, local)) = part.min_triple() {
                return Some(VertexRef::Graded { class, level, copy, local });
            }
        }
        None
    }

    /// All members in canonical order when the set is finite.
    pub fn enumerate_finite(&self) -> Option<Vec<VertexRef>> {
        if !self.is_finite() {
            return None;
        }
        let mut out: Vec<VertexRef> = self.kernel.iter().map(|&i| VertexRef::Kernel(i)).collect();
        if let LevelSet::Finite(s) = &self.spine {
            out.extend(s.iter().map(|&m| VertexRef::Spine(m)));
        }
        for (&class, part) in &self.fan {
            for (copy, local) in part.enumerate_finite().unwrap() {
                out.push(VertexRef::Fan { class, copy, local });
            }
        }
        for (&class, part) in &self.graded {
            for (level, copy, local) in part.enumerate_finite().unwrap() {
                out.push(VertexRef::Graded { class, level, copy, local });
            }
        }
        out.sort_unstable();
        Some(out)
    }

    /// Members that fall inside the truncation with spine depth `d` and `m`
    /// copies per class (per level for graded classes). Always finite.
    pub fn restrict_to_truncation(&self, d: u32, m: u32) -> BTreeSet<VertexRef> {
        let mut out: BTreeSet<VertexRef> =
            self.kernel.iter().map(|&i| VertexRef::Kernel(i)).collect();
        for lvl in 0..=d {
            if self.spine.contains(lvl) {
                out.insert(VertexRef::Spine(lvl));
            }
        }
        for (&class, part) in &self.fan {
            for copy in 0..m {
                for &local in part.locals_at(copy) {
                    out.insert(VertexRef::Fan { class, copy, local });
                }
            }
        }
        for (&class, part) in &self.graded {
            for level in 0..=d {
                let slice = part.slice_at(level);
                for copy in 0..m {
                    for &local in slice.locals_at(copy) {
                        out.insert(VertexRef::Graded { class, level, copy, local });
                    }
                }
            }
        }
        out
    }

    /// Whether any local of the given fan copy belongs to the set.
    pub fn fan_copy_intersects(&self, class: u32, copy: u32) -> bool {
        self.fan
            .get(&class)
            .is_some_and(|part| !part.locals_at(copy).is_empty())
    }

    /// Whether any local of the given graded copy belongs to the set.
    pub fn graded_copy_intersects(&self, class: u32, level: u32, copy: u32) -> bool {
        self.graded
            .get(&class)
            .is_some_and(|part| !part.slice_at(level).locals_at(copy).is_empty())
    }

    /// Shifts all level-indexed content (spine levels and graded levels) up
    /// by `t`; kernel and fan content is unchanged.
    pub fn shift_up(&self, t: u32) -> SymbolicVertexSet {
        let mut out = SymbolicVertexSet {
            kernel: self.kernel.clone(),
            spine: self.spine.shift_up(t),
            fan: self.fan.clone(),
            graded: self
                .graded
                .iter()
                .map(|(&k, v)| (k, v.shift_up(t)))
                .collect(),
        };
        out.canonicalize();
        out
    }

    /// Union of `shift_up(t)` over all `t >= 0`.
    pub fn union_of_upward_shifts(&self) -> SymbolicVertexSet {
        let spine = match self.spine.min() {
            Some(mu) => LevelSet::tail(mu),
            None => LevelSet::default(),
        };
        let mut out = SymbolicVertexSet {
            kernel: self.kernel.clone(),
            spine,
            fan: self.fan.clone(),
            graded: self
                .graded
                .iter()
                .map(|(&k, v)| (k, v.cumulative_up()))
                .collect(),
        };
        out.canonicalize();
        out
    }
}

impl Presentation {
    /// Finds an edge of the presented graph with one endpoint in `a` and the
    /// other in `b`, if any. Exact over the whole infinite graph.
    pub fn edge_between(
        &self,
        a: &SymbolicVertexSet,
        b: &SymbolicVertexSet,
    ) -> Option<(VertexRef, VertexRef)> {
        // Kernel edges.
        for &(i, j) in &self.kernel.edges {
            if a.kernel.contains(&i) && b.kernel.contains(&j) {
                return Some((VertexRef::Kernel(i), VertexRef::Kernel(j)));
            }
            if a.kernel.contains(&j) && b.kernel.contains(&i) {
                return Some((VertexRef::Kernel(j), VertexRef::Kernel(i)));
            }
        }
        // Kernel-to-spine anchor edge.
        if self.has_spine {
            if let Some(anchor) = self.spine_anchor {
                if a.kernel.contains(&anchor) && b.spine.contains(0) {
                    return Some((VertexRef::Kernel(anchor), VertexRef::Spine(0)));
                }
                if b.kernel.contains(&anchor) && a.spine.contains(0) {
                    return Some((VertexRef::Spine(0), VertexRef::Kernel(anchor)));
                }
            }
        }
        // Consecutive spine edges.
        if let Some(m) = consecutive_level(&a.spine, &b.spine) {
            return Some((VertexRef::Spine(m), VertexRef::Spine(m + 1)));
        }
        if let Some(m) = consecutive_level(&b.spine, &a.spine) {
            return Some((VertexRef::Spine(m + 1), VertexRef::Spine(m)));
        }
        // Fan attachment edges and template edges.
        for (c, fc) in self.fan_classes.iter().enumerate() {
            let c = c as u32;
            for &(local, anchor) in &fc.attachment {
                if a.contains(anchor) {
                    if let Some(copy) = b.fan.get(&c).and_then(|p| p.some_copy_with(local)) {
                        return Some((anchor, VertexRef::Fan { class: c, copy, local }));
                    }
                }
                if b.contains(anchor) {
                    if let Some(copy) = a.fan.get(&c).and_then(|p| p.some_copy_with(local)) {
                        return Some((VertexRef::Fan { class: c, copy, local }, anchor));
                    }
                }
            }
            if let (Some(pa), Some(pb)) = (a.fan.get(&c), b.fan.get(&c)) {
                for &(l1, l2) in &fc.template.edges {
                    if let Some(copy) = pa.common_copy(l1, pb, l2) {
                        return Some((
                            VertexRef::Fan { class: c, copy, local: l1 },
                            VertexRef::Fan { class: c, copy, local: l2 },
                        ));
                    }
                    if let Some(copy) = pa.common_copy(l2, pb, l1) {
                        return Some((
                            VertexRef::Fan { class: c, copy, local: l2 },
                            VertexRef::Fan { class: c, copy, local: l1 },
                        ));
                    }
                }
            }
        }
        // Graded attachment edges and template edges.
        for (g, gc) in self.graded_classes.iter().enumerate() {
            let g = g as u32;
            if let Some(hit) = self.graded_attachment_edge(gc, g, &a.spine, b.graded.get(&g)) {
                return Some(hit);
            }
            if let Some((s, v)) = self.graded_attachment_edge(gc, g, &b.spine, a.graded.get(&g)) {
                return Some((v, s));
            }
            if let (Some(pa), Some(pb)) = (a.graded.get(&g), b.graded.get(&g)) {
                for &(l1, l2) in &gc.template.edges {
                    if let Some((level, copy)) = pa.common_level_copy(l1, pb, l2) {
                        return Some((
                            VertexRef::Graded { class: g, level, copy, local: l1 },
                            VertexRef::Graded { class: g, level, copy, local: l2 },
                        ));
                    }
                    if let Some((level, copy)) = pa.common_level_copy(l2, pb, l1) {
                        return Some((
                            VertexRef::Graded { class: g, level, copy, local: l2 },
                            VertexRef::Graded { class: g, level, copy, local: l1 },
                        ));
                    }
                }
            }
        }
        None
    }

    /// Edge between a spine vertex of `spine` and an attachment local of a
    /// copy selected by `part`, for graded class `g`.
    fn graded_attachment_edge(
        &self,
        gc: &crate::presentation::GradedClass,
        g: u32,
        spine: &LevelSet,
        part: Option<&GradedPart>,
    ) -> Option<(VertexRef, VertexRef)> {
        let part = part?;
        if spine.is_empty() || part.is_empty() {
            return None;
        }
        let exc_top = part.exceptions.keys().next_back().map_or(0, |k| k + 1);
        let spine_top = match spine {
            LevelSet::Finite(s) => s.last().copied().unwrap_or(0),
            LevelSet::Cofinite(s) => s.last().map_or(0, |m| m + 1),
        };
        // Every level whose window can meet the decidable "low" region, plus
        // one fresh high level witnessing the cofinite regions.
        let probe_to = exc_top + spine_top + gc.window.width_bound() + 2;
        for level in 0..=probe_to {
            let slice = part.slice_at(level);
            for &local in &gc.attachment_locals {
                if let Some(copy) = slice.some_copy_with(local) {
                    let (lo, hi) = gc.window.window(level);
                    for m in lo..=hi {
                        if spine.contains(m) {
                            return Some((
                                VertexRef::Spine(m),
                                VertexRef::Graded { class: g, level, copy, local },
                            ));
                        }
                    }
                }
            }
        }
        None
    }
}

/// A level `m` with `m` in `a` and `m + 1` in `b`.
fn consecutive_level(a: &LevelSet, b: &LevelSet) -> Option<u32> {
    match (a, b) {
        (LevelSet::Finite(s), _) => s.iter().copied().find(|&m| b.contains(m + 1)),
        (LevelSet::Cofinite(_), LevelSet::Finite(t)) => t
            .iter()
            .copied()
            .filter(|&m| m > 0)
            .map(|m| m - 1)
            .find(|&m| a.contains(m)),
        (LevelSet::Cofinite(e1), LevelSet::Cofinite(e2)) => {
            let top = e1
                .last()
                .copied()
                .max(e2.last().copied())
                .map_or(0, |m| m + 1);
            Some(top)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use proptest::prelude::*;

    fn probe_panel() -> Vec<VertexRef> {
        let mut vs = Vec::new();
        for i in 0..3 {
            vs.push(VertexRef::Kernel(i));
        }
        for m in [0, 1, 2, 5, 40] {
            vs.push(VertexRef::Spine(m));
        }
        for class in 0..2 {
            for copy in [0, 1, 7, 33] {
                for local in 0..2 {
                    vs.push(VertexRef::Fan { class, copy, local });
                    for level in [0, 1, 3, 21] {
                        vs.push(VertexRef::Graded { class, level, copy, local });
                    }
                }
            }
        }
        vs
    }

    #[derive(Clone, Debug)]
    enum Expr {
        Atom(SymbolicVertexSet),
        Union(Box<Expr>, Box<Expr>),
        Inter(Box<Expr>, Box<Expr>),
        Diff(Box<Expr>, Box<Expr>),
    }

    fn eval(e: &Expr) -> SymbolicVertexSet {
        match e {
            Expr::Atom(s) => s.clone(),
            Expr::Union(a, b) => eval(a).union(&eval(b)),
            Expr::Inter(a, b) => eval(a).intersect(&eval(b)),
            Expr::Diff(a, b) => eval(a).difference(&eval(b)),
        }
    }

    fn truth(e: &Expr, v: VertexRef) -> bool {
        match e {
            Expr::Atom(s) => s.contains(v),
            Expr::Union(a, b) => truth(a, v) || truth(b, v),
            Expr::Inter(a, b) => truth(a, v) && truth(b, v),
            Expr::Diff(a, b) => truth(a, v) && !truth(b, v),
        }
    }

    fn atom_strategy() -> impl Strategy<Value = SymbolicVertexSet> {
        let vertex = prop_oneof![
            (0u32..3).prop_map(VertexRef::Kernel),
            (0u32..6).prop_map(VertexRef::Spine),
            ((0u32..2), (0u32..4), (0u32..2))
                .prop_map(|(class, copy, local)| VertexRef::Fan { class, copy, local }),
            ((0u32..2), (0u32..4), (0u32..4), (0u32..2)).prop_map(
                |(class, level, copy, local)| VertexRef::Graded { class, level, copy, local }
            ),
        ];
        prop_oneof![
            proptest::collection::vec(vertex, 0..4).prop_map(SymbolicVertexSet::from_vertices),
            (0u32..4).prop_map(|from| {
                let mut s = SymbolicVertexSet::default();
                s.spine = LevelSet::tail(from);
                s
            }),
            ((0u32..2), (0u32..2)).prop_map(|(class, local)| {
                let mut s = SymbolicVertexSet::default();
                s.fan
                    .insert(class, CopyFamily::uniform([local].into_iter().collect()));
                s
            }),
            ((0u32..2), (0u32..2)).prop_map(|(class, local)| {
                let mut s = SymbolicVertexSet::default();
                let slice = CopyFamily::uniform([local].into_iter().collect());
                s.graded.insert(class, GradedPart::uniform(slice));
                s
            }),
        ]
    }

    fn expr_strategy() -> impl Strategy<Value = Expr> {
        atom_strategy().prop_map(Expr::Atom).prop_recursive(3, 16, 2, |inner| {
            prop_oneof![
                (inner.clone(), inner.clone())
                    .prop_map(|(a, b)| Expr::Union(Box::new(a), Box::new(b))),
                (inner.clone(), inner.clone())
                    .prop_map(|(a, b)| Expr::Inter(Box::new(a), Box::new(b))),
                (inner.clone(), inner)
                    .prop_map(|(a, b)| Expr::Diff(Box::new(a), Box::new(b))),
            ]
        })
    }

    proptest! {
        #[test]
        fn ops_agree_with_membership(e in expr_strategy()) {
            let s = eval(&e);
            for v in probe_panel() {
                prop_assert_eq!(s.contains(v), truth(&e, v), "at {}", v);
            }
        }

        #[test]
        fn union_commutes(a in expr_strategy(), b in expr_strategy()) {
            let (a, b) = (eval(&a), eval(&b));
            prop_assert_eq!(a.union(&b), b.union(&a));
            prop_assert_eq!(a.intersect(&b), b.intersect(&a));
        }

        #[test]
        fn difference_subset(a in expr_strategy(), b in expr_strategy()) {
            let (a, b) = (eval(&a), eval(&b));
            prop_assert!(a.difference(&b).is_subset(&a));
            prop_assert!(!a.difference(&b).intersects(&b));
        }
    }

    #[test]
    fn complement_involution() {
        let (p, _) = corpus::fan_two_classes();
        let s = SymbolicVertexSet::from_vertices([
            VertexRef::Kernel(0),
            VertexRef::Fan { class: 0, copy: 3, local: 0 },
        ]);
        assert_eq!(s.complement(&p).complement(&p), s);
        assert!(s.complement(&p).union(&s).is_subset(&p.universe()));
        assert_eq!(s.complement(&p).union(&s), p.universe());
    }

    #[test]
    fn cofinite_spine_membership() {
        let mut s = SymbolicVertexSet::default();
        s.spine = LevelSet::tail(3);
        assert!(!s.contains(VertexRef::Spine(2)));
        assert!(s.contains(VertexRef::Spine(3)));
        assert!(s.contains(VertexRef::Spine(1_000_000)));
        assert!(!s.is_finite());
    }

    #[test]
    fn min_vertex_ordering() {
        let s = SymbolicVertexSet::from_vertices([
            VertexRef::Graded { class: 0, level: 0, copy: 0, local: 0 },
            VertexRef::Spine(4),
        ]);
        assert_eq!(s.min_vertex(), Some(VertexRef::Spine(4)));
    }

    #[test]
    fn upward_shift_union() {
        // Content at graded level 2 only; union of shifts covers all levels >= 2.
        let mut s = SymbolicVertexSet::default();
        let slice = CopyFamily::uniform([0].into_iter().collect());
        s.graded.insert(0, GradedPart::single_level(2, slice));
        s.spine = LevelSet::finite([2]);
        let u = s.union_of_upward_shifts();
        assert!(u.contains(VertexRef::Spine(17)));
        assert!(!u.contains(VertexRef::Spine(1)));
        assert!(u.contains(VertexRef::Graded { class: 0, level: 2, copy: 9, local: 0 }));
        assert!(u.contains(VertexRef::Graded { class: 0, level: 90, copy: 9, local: 0 }));
        assert!(!u.contains(VertexRef::Graded { class: 0, level: 1, copy: 9, local: 0 }));
        // Consistency with pointwise shifts.
        for t in 0..4 {
            assert!(s.shift_up(t).is_subset(&u));
        }
    }

    #[test]
    fn edge_detection_graded_chain() {
        let (p, _) = corpus::graded_chain();
        let a = SymbolicVertexSet::singleton(VertexRef::Spine(0));
        let b = SymbolicVertexSet::singleton(VertexRef::Spine(1));
        assert!(p.edge_between(&a, &b).is_some());
        let c = SymbolicVertexSet::singleton(VertexRef::Spine(2));
        assert!(p.edge_between(&a, &c).is_none());
        // Copy at level 5 attaches to spine 0..=5.
        let copy = SymbolicVertexSet::singleton(VertexRef::Graded {
            class: 0,
            level: 5,
            copy: 2,
            local: 0,
        });
        assert!(p.edge_between(&a, &copy).is_some());
        assert!(p.edge_between(&copy, &c).is_some());
        let mut tail = SymbolicVertexSet::default();
        tail.spine = LevelSet::tail(6);
        assert!(p.edge_between(&copy, &tail).is_none());
    }
}
