//! Bundled instances and a seeded random instance generator.
//!
//! The four bundled instances also ship as JSON documents under `instances/`
//! in the repository root; `instance::tests` keeps the files and these
//! builders in sync.

use std::collections::BTreeSet;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::finite_graph::FiniteGraph;
use crate::presentation::{
    ClassMask, FanClass, GradedClass, Presentation, TargetSet, WindowKind,
};
use crate::vertex::{ClassRef, VertexRef};

/// Spine ray plus one prefix-window graded class with a single-vertex
/// template; the target set is the whole spine. Realizes an infinite
/// ascending chain of critical vertex sets.
pub fn graded_chain() -> (Presentation, TargetSet) {
    let p = Presentation {
        kernel: FiniteGraph::new(0),
        has_spine: true,
        spine_anchor: None,
        fan_classes: vec![],
        graded_classes: vec![GradedClass {
            template: FiniteGraph::new(1),
            window: WindowKind::Prefix,
            attachment_locals: [0].into_iter().collect(),
        }],
    };
    let t = TargetSet {
        explicit: BTreeSet::new(),
        class_masks: vec![],
        spine_cofinal_from: Some(0),
    };
    (p, t)
}

/// Three-vertex path with no replicated classes; the target is the whole
/// kernel. A plain finite instance.
pub fn finite_path() -> (Presentation, TargetSet) {
    let p = Presentation {
        kernel: FiniteGraph::with_edges(3, &[(0, 1), (1, 2)]),
        has_spine: false,
        spine_anchor: None,
        fan_classes: vec![],
        graded_classes: vec![],
    };
    let t = TargetSet {
        explicit: (0..3).map(VertexRef::Kernel).collect(),
        class_masks: vec![],
        spine_cofinal_from: None,
    };
    (p, t)
}

/// Triangle kernel with one fan class attached to `{k0, k1}`; the target is a
/// class mask, so infinitely many copies meet it.
pub fn fan_one_class() -> (Presentation, TargetSet) {
    let p = Presentation {
        kernel: FiniteGraph::with_edges(3, &[(0, 1), (0, 2), (1, 2)]),
        has_spine: false,
        spine_anchor: None,
        fan_classes: vec![FanClass {
            template: FiniteGraph::new(1),
            attachment: [(0, VertexRef::Kernel(0)), (0, VertexRef::Kernel(1))]
                .into_iter()
                .collect(),
        }],
        graded_classes: vec![],
    };
    let t = TargetSet {
        explicit: BTreeSet::new(),
        class_masks: vec![ClassMask {
            class: ClassRef::Fan(0),
            locals: [0].into_iter().collect(),
        }],
        spine_cofinal_from: None,
    };
    (p, t)
}

/// Path kernel `k0-k1-k2` with fan classes on `{k0,k1}` and `{k1,k2}`; the
/// target is `{k0, k2}`. Realizes two incomparable critical vertex sets.
pub fn fan_two_classes() -> (Presentation, TargetSet) {
    let p = Presentation {
        kernel: FiniteGraph::with_edges(3, &[(0, 1), (1, 2)]),
        has_spine: false,
        spine_anchor: None,
        fan_classes: vec![
            FanClass {
                template: FiniteGraph::new(1),
                attachment: [(0, VertexRef::Kernel(0)), (0, VertexRef::Kernel(1))]
                    .into_iter()
                    .collect(),
            },
            FanClass {
                template: FiniteGraph::new(1),
                attachment: [(0, VertexRef::Kernel(1)), (0, VertexRef::Kernel(2))]
                    .into_iter()
                    .collect(),
            },
        ],
        graded_classes: vec![],
    };
    let t = TargetSet {
        explicit: [VertexRef::Kernel(0), VertexRef::Kernel(2)].into_iter().collect(),
        class_masks: vec![],
        spine_cofinal_from: None,
    };
    (p, t)
}

/// Names and builders of the bundled corpus, in canonical order.
pub fn bundled() -> Vec<(&'static str, Presentation, TargetSet)> {
    let mut out = Vec::new();
    for (name, (p, t)) in [
        ("graded_chain", graded_chain()),
        ("finite_path", finite_path()),
        ("fan_one_class", fan_one_class()),
        ("fan_two_classes", fan_two_classes()),
    ] {
        out.push((name, p, t));
    }
    out
}

/// Band-window variant of the graded chain; useful in tests because its
/// critical vertex sets are pairwise incomparable once the band slides free
/// of level zero.
pub fn banded_chain(width: u32) -> (Presentation, TargetSet) {
    let p = Presentation {
        kernel: FiniteGraph::new(0),
        has_spine: true,
        spine_anchor: None,
        fan_classes: vec![],
        graded_classes: vec![GradedClass {
            template: FiniteGraph::new(1),
            window: WindowKind::Band { width },
            attachment_locals: [0].into_iter().collect(),
        }],
    };
    let t = TargetSet {
        explicit: BTreeSet::new(),
        class_masks: vec![],
        spine_cofinal_from: Some(0),
    };
    (p, t)
}

/// Kernel anchored to a spine carrying both a prefix class and a band class.
pub fn mixed_chain() -> (Presentation, TargetSet) {
    let p = Presentation {
        kernel: FiniteGraph::with_edges(2, &[(0, 1)]),
        has_spine: true,
        spine_anchor: Some(0),
        fan_classes: vec![FanClass {
            template: FiniteGraph::new(1),
            attachment: [(0, VertexRef::Kernel(0)), (0, VertexRef::Kernel(1))]
                .into_iter()
                .collect(),
        }],
        graded_classes: vec![
            GradedClass {
                template: FiniteGraph::new(1),
                window: WindowKind::Prefix,
                attachment_locals: [0].into_iter().collect(),
            },
            GradedClass {
                template: FiniteGraph::new(1),
                window: WindowKind::Band { width: 2 },
                attachment_locals: [0].into_iter().collect(),
            },
        ],
    };
    let t = TargetSet {
        explicit: BTreeSet::new(),
        class_masks: vec![],
        spine_cofinal_from: Some(0),
    };
    (p, t)
}

/// Star kernel with three fan classes whose anchor sets are pairwise
/// incomparable.
pub fn fan_three_incomparable() -> (Presentation, TargetSet) {
    let p = Presentation {
        kernel: FiniteGraph::with_edges(4, &[(0, 1), (0, 2), (0, 3)]),
        has_spine: false,
        spine_anchor: None,
        fan_classes: vec![
            FanClass {
                template: FiniteGraph::new(1),
                attachment: [(0, VertexRef::Kernel(0)), (0, VertexRef::Kernel(1))]
                    .into_iter()
                    .collect(),
            },
            FanClass {
                template: FiniteGraph::new(1),
                attachment: [(0, VertexRef::Kernel(0)), (0, VertexRef::Kernel(2))]
                    .into_iter()
                    .collect(),
            },
            FanClass {
                template: FiniteGraph::new(1),
                attachment: [(0, VertexRef::Kernel(0)), (0, VertexRef::Kernel(3))]
                    .into_iter()
                    .collect(),
            },
        ],
        graded_classes: vec![],
    };
    let t = TargetSet {
        explicit: [VertexRef::Kernel(1), VertexRef::Kernel(2)].into_iter().collect(),
        class_masks: vec![],
        spine_cofinal_from: None,
    };
    (p, t)
}

/// Seeded random fan-class instance: kernel of at most 8 vertices, at most 4
/// fan classes, an optional spine. About half of the draws carry a class
/// mask, which forces the star branch of the dichotomy.
pub fn random_fan_instance(seed: u64) -> (Presentation, TargetSet) {
    let mut rng = StdRng::seed_from_u64(seed);
    loop {
        if let Some(inst) = try_random_fan_instance(&mut rng) {
            return inst;
        }
    }
}

fn try_random_fan_instance(rng: &mut StdRng) -> Option<(Presentation, TargetSet)> {
    let kernel_n = rng.random_range(1..=8u32);
    let mut kernel = FiniteGraph::new(kernel_n);
    // Random spanning-ish edges first, then sprinkle extras.
    for v in 1..kernel_n {
        let w = rng.random_range(0..v);
        kernel.add_edge(v, w);
    }
    let extra = rng.random_range(0..=kernel_n);
    for _ in 0..extra {
        let a = rng.random_range(0..kernel_n);
        let b = rng.random_range(0..kernel_n);
        kernel.add_edge(a, b);
    }
    let has_spine = rng.random_bool(0.3);
    let spine_anchor = if has_spine { Some(rng.random_range(0..kernel_n)) } else { None };

    let class_count = rng.random_range(1..=4usize);
    let mut fan_classes = Vec::new();
    for _ in 0..class_count {
        let t_n = rng.random_range(1..=3u32);
        let mut template = FiniteGraph::new(t_n);
        for v in 1..t_n {
            let w = rng.random_range(0..v);
            template.add_edge(v, w);
        }
        let anchor_count = rng.random_range(1..=3.min(kernel_n));
        let mut attachment = BTreeSet::new();
        for _ in 0..anchor_count {
            let anchor = if has_spine && rng.random_bool(0.2) {
                VertexRef::Spine(rng.random_range(0..3))
            } else {
                VertexRef::Kernel(rng.random_range(0..kernel_n))
            };
            let local = rng.random_range(0..t_n);
            attachment.insert((local, anchor));
        }
        fan_classes.push(FanClass { template, attachment });
    }
    let p = Presentation {
        kernel,
        has_spine,
        spine_anchor,
        fan_classes,
        graded_classes: vec![],
    };
    p.validate().ok()?;

    let mut explicit: BTreeSet<VertexRef> = BTreeSet::new();
    for i in 0..kernel_n {
        if rng.random_bool(0.4) {
            explicit.insert(VertexRef::Kernel(i));
        }
    }
    let mut class_masks = Vec::new();
    if rng.random_bool(0.5) {
        let class = rng.random_range(0..p.fan_classes.len()) as u32;
        let size = p.fan_classes[class as usize].template.vertex_count;
        class_masks.push(ClassMask {
            class: ClassRef::Fan(class),
            locals: [rng.random_range(0..size)].into_iter().collect(),
        });
    }
    let spine_cofinal_from = if has_spine && rng.random_bool(0.5) {
        Some(rng.random_range(0..3))
    } else {
        None
    };
    if explicit.is_empty() && class_masks.is_empty() && spine_cofinal_from.is_none() {
        explicit.insert(VertexRef::Kernel(0));
    }
    let t = TargetSet { explicit, class_masks, spine_cofinal_from };
    p.validate_target(&t).ok()?;
    Some((p, t))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_instances_validate() {
        for (name, p, t) in bundled() {
            p.validate().unwrap_or_else(|e| panic!("{name}: {e}"));
            p.validate_target(&t).unwrap_or_else(|e| panic!("{name}: {e}"));
        }
        for (p, t) in [banded_chain(2), mixed_chain(), fan_three_incomparable()] {
            p.validate().unwrap();
            p.validate_target(&t).unwrap();
        }
    }

    #[test]
    fn random_instances_deterministic_and_valid() {
        for seed in 0..50 {
            let (p1, t1) = random_fan_instance(seed);
            let (p2, t2) = random_fan_instance(seed);
            assert_eq!(p1, p2);
            assert_eq!(t1, t2);
            p1.validate().unwrap();
            p1.validate_target(&t1).unwrap();
        }
    }
}
