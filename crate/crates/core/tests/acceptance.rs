//! Acceptance suite: every release-gating property, each printed as one
//! pass/fail line. Tolerances and bounds are pinned here, not configured.

use std::collections::BTreeSet;
use std::time::Instant;

use combdual::assignment::build_strongly_admissible;
use combdual::certificate::{CertificatePayload, CopySelector, DichotomyCertificate};
use combdual::corpus;
use combdual::decompose::{critical_instances, critical_sets};
use combdual::duality::{
    build_star_decomposition, build_tough_subgraph, compute_part, decide,
    extract_undominating_star, toughness, Toughness,
};
use combdual::oracle::brute_force_critical_sets;
use combdual::symbolic::{LevelSet, SymbolicVertexSet};
use combdual::truncation::materialize;
use combdual::verify::{
    oracle_check, property_suite, verify_admissible, verify_payload, verify_star_decomposition,
    verify_tough_subgraph, verify_undominating_star, OracleKind,
};
use combdual::vertex::VertexRef;

fn verdict(criterion: &str, ok: bool) {
    println!("{} criterion {criterion}", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "criterion {criterion} failed");
}

/// Criterion 1: the ascending-chain fixture's critical vertex sets are
/// exactly the spine prefixes, cross-checked exhaustively against the
/// truncation oracle over all candidate subsets of size <= 4, in under 10 s.
#[test]
fn criterion_1_reference_fixture_critical_sets() {
    let start = Instant::now();
    let (p, _) = corpus::graded_chain();
    let pats = critical_sets(&p);
    let mut ok = pats.len() == 1;
    // Symbolic answer: exactly the prefix windows.
    for n in 0..=8u32 {
        ok &= pats[0].instantiate(&p, Some(n)) == (0..=n).map(VertexRef::Spine).collect();
    }
    // Exhaustive oracle: every subset of the truncation of size <= 4 that
    // looks critical is an interior prefix window, and conversely.
    let t = materialize(&p, 8, 5, usize::MAX).unwrap();
    let found: BTreeSet<BTreeSet<VertexRef>> =
        brute_force_critical_sets(&t, 4, 5).into_iter().collect();
    let margin = p.max_band_width() + 2;
    let interior = |s: &BTreeSet<VertexRef>| {
        s.iter().all(|v| v.level_bound().map_or(true, |l| l + margin <= 8))
    };
    let expected: BTreeSet<BTreeSet<VertexRef>> = (0..4u32)
        .map(|n| (0..=n).map(VertexRef::Spine).collect())
        .filter(interior)
        .collect();
    let found_interior: BTreeSet<BTreeSet<VertexRef>> =
        found.into_iter().filter(|s| interior(s)).collect();
    ok &= found_interior == expected;
    let elapsed = start.elapsed();
    ok &= elapsed.as_secs_f64() < 10.0;
    println!("  critical-set fixture checked in {elapsed:?}");
    verdict("1 (reference fixture)", ok);
}

/// Criterion 2: the part defined by the principal orientation is exactly the
/// spine; the verifier's toughness probe rejects the subgraph without its
/// linkage and accepts the full construction.
#[test]
fn criterion_2_naive_candidate_negative_control() {
    let (p, t) = corpus::graded_chain();
    let pts = combdual::assignment::build_principal_tree_set(&p, &t).unwrap();
    let part = compute_part(&p, &pts, &t).unwrap();
    let mut spine = SymbolicVertexSet::default();
    spine.spine = LevelSet::tail(0);
    let mut ok = part == spine;

    let cert = build_tough_subgraph(&p, &t).unwrap();
    let full = verify_tough_subgraph(&p, &t, &cert);
    ok &= full.accepted();
    ok &= full
        .sorted_checks()
        .iter()
        .any(|c| c.name == "toughnessProbe" && c.passed);

    let mut naive = cert.clone();
    naive.spine_pair_rule = false;
    let report = verify_tough_subgraph(&p, &t, &naive);
    ok &= !report.accepted();
    ok &= report
        .sorted_checks()
        .iter()
        .any(|c| c.name == "toughnessProbe" && !c.passed);
    verdict("2 (naive candidate rejected)", ok);
}

/// Criterion 3: on the bundled corpus and 200 seeded random instances,
/// decide yields exactly one branch whose verifier accepts, and certificates
/// of the opposite branch are rejected. Under five minutes.
#[test]
fn criterion_3_dichotomy() {
    let start = Instant::now();
    let mut ok = true;

    // Branch-representative certificates for cross-feeding.
    let (sp, st) = corpus::fan_one_class();
    let Toughness::NotTough(w) = toughness(&sp, &st) else { panic!() };
    let star_cert = extract_undominating_star(&sp, &st, &w).unwrap();
    let (tp, tt) = corpus::fan_two_classes();
    let tough_cert = build_tough_subgraph(&tp, &tt).unwrap();

    let mut instances: Vec<(String, _, _)> = corpus::bundled()
        .into_iter()
        .map(|(n, p, t)| (n.to_string(), p, t))
        .collect();
    for seed in 0..200u64 {
        let (p, t) = corpus::random_fan_instance(seed);
        instances.push((format!("random-{seed}"), p, t));
    }
    let total = instances.len();
    let mut star_count = 0usize;
    for (name, p, t) in instances {
        let cert = match decide(&p, &t) {
            Ok(c) => c,
            Err(e) => {
                println!("  {name}: decide failed: {e}");
                ok = false;
                continue;
            }
        };
        let is_star = matches!(cert, DichotomyCertificate::Star(_));
        star_count += usize::from(is_star);
        let accepted = verify_payload(&p, &t, &CertificatePayload::Dichotomy(cert)).accepted();
        if !accepted {
            println!("  {name}: fresh certificate rejected");
            ok = false;
        }
        // The opposite branch's verifier must reject corpus certificates.
        let cross = if is_star {
            verify_tough_subgraph(&p, &t, &tough_cert).accepted()
        } else {
            verify_undominating_star(&p, &t, &star_cert).accepted()
        };
        if cross {
            println!("  {name}: opposite branch certificate accepted");
            ok = false;
        }
    }
    let elapsed = start.elapsed();
    ok &= elapsed.as_secs_f64() < 300.0;
    println!("  {total} instances ({star_count} star-branch) in {elapsed:?}");
    verdict("3 (dichotomy, zero exceptions)", ok);
}

/// Criterion 4: every emitted tough-subgraph certificate passes the linkage
/// obligations and every star-decomposition certificate passes the star,
/// tameness, central-part, leaf and domination checks. Zero tolerance.
#[test]
fn criterion_4_constructive_obligations() {
    let mut ok = true;
    let mut cases: Vec<(String, _, _)> = corpus::bundled()
        .into_iter()
        .map(|(n, p, t)| (n.to_string(), p, t))
        .collect();
    cases.push(("banded2".into(), corpus::banded_chain(2).0, corpus::banded_chain(2).1));
    cases.push(("banded3".into(), corpus::banded_chain(3).0, corpus::banded_chain(3).1));
    cases.push(("mixed".into(), corpus::mixed_chain().0, corpus::mixed_chain().1));
    cases.push((
        "fan3".into(),
        corpus::fan_three_incomparable().0,
        corpus::fan_three_incomparable().1,
    ));
    for seed in 200..240u64 {
        let (p, t) = corpus::random_fan_instance(seed);
        cases.push((format!("random-{seed}"), p, t));
    }
    let tough_obligations =
        ["l1FiniteDegree", "l2CoveringEdges", "pairsScheduled", "linkagePathsValid"];
    let star_obligations =
        ["starProperty", "tameness", "targetInCentral", "criticalLivesInLeaf", "separatorTight"];
    let infinite_obligations = ["partIncluded", "principalDominated"];
    for (name, p, t) in cases {
        if !matches!(toughness(&p, &t), Toughness::Tough) {
            continue;
        }
        let tough = build_tough_subgraph(&p, &t).unwrap();
        let report = verify_tough_subgraph(&p, &t, &tough);
        for check in tough_obligations {
            if !report.sorted_checks().iter().any(|c| c.name == check && c.passed) {
                println!("  {name}: {check} not passed");
                ok = false;
            }
        }
        let star = build_star_decomposition(&p, &t).unwrap();
        let report = verify_star_decomposition(&p, &t, &star);
        for check in star_obligations {
            if !report.sorted_checks().iter().any(|c| c.name == check && c.passed) {
                println!("  {name}: {check} not passed");
                ok = false;
            }
        }
        if star.assignment.is_some() {
            for check in infinite_obligations {
                if !report.sorted_checks().iter().any(|c| c.name == check && c.passed) {
                    println!("  {name}: {check} not passed");
                    ok = false;
                }
            }
        }
    }
    verdict("4 (constructive obligations)", ok);
}

/// Criterion 5: the corridor lemma checks hold on at least 100 seeded random
/// consistent partial orientations per bundled instance, and grades are
/// strictly monotone along parliament chains. Zero tolerance.
#[test]
fn criterion_5_lemma_suite() {
    let mut ok = true;
    for (name, p, t) in corpus::bundled() {
        let report = property_suite(&p, &t, 7, 100);
        if !report.accepted() {
            println!("  {name}: {:?}", report.first_failure());
            ok = false;
        }
    }
    for (name, (p, t)) in
        [("banded2", corpus::banded_chain(2)), ("mixed", corpus::mixed_chain())]
    {
        let report = property_suite(&p, &t, 11, 100);
        if !report.accepted() {
            println!("  {name}: {:?}", report.first_failure());
            ok = false;
        }
    }
    verdict("5 (corridor lemma suite)", ok);
}

/// Criterion 6: the admissibility verifier accepts the constructed
/// assignment on the whole corpus, including instances with two and with
/// three pairwise incomparable critical vertex sets.
#[test]
fn criterion_6_admissibility() {
    let mut ok = true;
    let mut cases: Vec<(String, _)> = corpus::bundled()
        .into_iter()
        .map(|(n, p, _)| (n.to_string(), p))
        .collect();
    cases.push(("fan3".into(), corpus::fan_three_incomparable().0));
    cases.push(("banded3".into(), corpus::banded_chain(3).0));
    cases.push(("mixed".into(), corpus::mixed_chain().0));
    for seed in 300..340u64 {
        cases.push((format!("random-{seed}"), corpus::random_fan_instance(seed).0));
    }
    for (name, p) in cases {
        let assignment = match build_strongly_admissible(&p) {
            Ok(a) => a,
            Err(e) => {
                println!("  {name}: construction failed: {e}");
                ok = false;
                continue;
            }
        };
        let report = verify_admissible(&p, &assignment);
        if !report.accepted() {
            println!("  {name}: {:?}", report.first_failure());
            ok = false;
        }
    }
    verdict("6 (admissibility)", ok);
}

/// Criterion 7: the symbolic decomposition agrees with truncation brute
/// force for every deleted set of size <= 3 drawn from the truncation at
/// depth 12 with 5 copies, on every bundled instance.
#[test]
fn criterion_7_oracle_agreement() {
    let mut ok = true;
    for (name, p, t) in corpus::bundled() {
        let trunc = materialize(&p, 12, 5, usize::MAX).unwrap();
        let verts: Vec<VertexRef> = trunc.names().to_vec();
        let n = verts.len();
        let mut checked = 0usize;
        'outer: for a in 0..n {
            for b in a..n {
                for c in b..n {
                    let x: BTreeSet<VertexRef> =
                        [verts[a], verts[b], verts[c]].into_iter().collect();
                    checked += 1;
                    if let Err(e) =
                        combdual::oracle::check_components_against_truncation(&p, &trunc, &x)
                    {
                        println!("  {name}: {e}");
                        ok = false;
                        break 'outer;
                    }
                }
            }
        }
        println!("  {name}: {checked} deleted sets agree");
        let r = oracle_check(&p, &t, &OracleKind::Toughness, 6, 4, usize::MAX);
        if !r.accepted() {
            println!("  {name}: toughness probe disagrees");
            ok = false;
        }
    }
    verdict("7 (oracle agreement)", ok);
}

/// Criterion 8: each listed single-field tamper flips accept to reject.
/// 100% kill rate required.
#[test]
fn criterion_8_tamper_sensitivity() {
    let mut kills = Vec::new();

    // Star certificate tampers.
    let (p, t) = corpus::fan_one_class();
    let Toughness::NotTough(w) = toughness(&p, &t) else { panic!() };
    let star = extract_undominating_star(&p, &t, &w).unwrap();
    assert!(verify_undominating_star(&p, &t, &star).accepted());
    let mut m = star.clone();
    m.witness_x = [VertexRef::Kernel(0)].into_iter().collect();
    kills.push(("star: witness shrunk", !verify_undominating_star(&p, &t, &m).accepted()));
    let mut m = star.clone();
    m.copy_selector = CopySelector::ExactlyFinitely { members: [0].into_iter().collect() };
    kills.push(("star: finite selector", !verify_undominating_star(&p, &t, &m).accepted()));

    // Tough-subgraph tampers.
    let (p, t) = corpus::graded_chain();
    let tough = build_tough_subgraph(&p, &t).unwrap();
    assert!(verify_tough_subgraph(&p, &t, &tough).accepted());
    let mut m = tough.clone();
    m.spine_pair_rule = false;
    kills.push(("tough: linkage dropped", !verify_tough_subgraph(&p, &t, &m).accepted()));
    let mut m = tough.clone();
    m.part_b.spine = LevelSet::tail(1);
    kills.push(("tough: target vertex removed", !verify_tough_subgraph(&p, &t, &m).accepted()));

    // Star-decomposition tamper.
    let star_dec = build_star_decomposition(&p, &t).unwrap();
    assert!(verify_star_decomposition(&p, &t, &star_dec).accepted());
    let mut m = star_dec.clone();
    m.elements[1].separation.separator.insert(VertexRef::Spine(44));
    kills.push((
        "star-decomposition: separator enlarged",
        !verify_star_decomposition(&p, &t, &m).accepted(),
    ));

    // Admissible-assignment tamper on incomparable sets whose cross
    // components carry full neighbourhoods.
    let p = combdual::presentation::Presentation {
        kernel: combdual::finite_graph::FiniteGraph::with_edges(3, &[(0, 1), (0, 2), (1, 2)]),
        has_spine: false,
        spine_anchor: None,
        fan_classes: vec![
            combdual::presentation::FanClass {
                template: combdual::finite_graph::FiniteGraph::new(1),
                attachment: [(0, VertexRef::Kernel(0)), (0, VertexRef::Kernel(1))]
                    .into_iter()
                    .collect(),
            },
            combdual::presentation::FanClass {
                template: combdual::finite_graph::FiniteGraph::new(1),
                attachment: [(0, VertexRef::Kernel(1)), (0, VertexRef::Kernel(2))]
                    .into_iter()
                    .collect(),
            },
        ],
        graded_classes: vec![],
    };
    let assignment = build_strongly_admissible(&p).unwrap();
    assert!(verify_admissible(&p, &assignment).accepted());
    let mut m = assignment.clone();
    for ea in &mut m.explicit {
        ea.excluded = None;
    }
    kills.push(("assignment: nothing excluded", !verify_admissible(&p, &m).accepted()));

    let mut ok = true;
    for (name, killed) in &kills {
        if !killed {
            println!("  tamper survived: {name}");
            ok = false;
        }
    }
    println!("  {} tampers, all killed: {}", kills.len(), ok);
    verdict("8 (tamper sensitivity)", ok);
}
