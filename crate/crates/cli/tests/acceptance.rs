//! Acceptance suite: the toolkit's headline guarantees, one test per
//! criterion. Counts, tolerances, and time budgets are pinned here.

use std::fs;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use strand_cli::parser::parse;
use strand_cli::resolve::{resolve, Resolved};
use strand_core::aprop::{graph_to_term, term_semantics, term_to_graph, Term};
use strand_core::gen::{
    grow_around, random_composable_pair, random_graph, random_rule, random_term, shuffle_graph,
    GraphGenConfig, TermGenConfig,
};
use strand_core::hypergraph::{find_isomorphism, graph_semantics, InterfacedGraph, Interpretation};
use strand_core::rewrite::{
    apply_decomposition, decompose_raw, find_matches, rewrite_once, terms_iso, Direction,
};
use strand_core::scalar::{Cx, Fp};
use strand_core::tensor::{seeded_tensor_family, IndexSet, Tensor};
use strand_core::theory::{check_theory, CheckOptions, ProofStep};
use strand_core::zx::{cnot, notc, zx_interpretation};

fn fp_interp(seed: u64) -> Interpretation<String, Fp> {
    let index = IndexSet::qubit();
    Interpretation::new(index.clone(), move |label: &String| {
        Some(seeded_tensor_family(seed, label, &index))
    })
}

fn load_frobenius() -> Resolved {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("..")
        .join("..")
        .join("theories")
        .join("frobenius.thy");
    let source = fs::read_to_string(path).expect("shipped theory file");
    resolve(&parse(&source).expect("parses"), "frobenius").expect("resolves")
}

/// Criterion 1: composing interfaced graphs matches contracting their
/// tensors, exactly over Z_p, on 200 random composable pairs of up to
/// five edges each, within 30 seconds.
#[test]
fn c01_composition_equals_contraction() {
    let started = Instant::now();
    let mut rng = StdRng::seed_from_u64(101);
    let config = GraphGenConfig::small();
    let interp = fp_interp(4242);
    for case in 0..200 {
        let (g, h) = random_composable_pair(&mut rng, &config);
        let composed = g.compose(&h).expect("shapes match by construction");
        let direct = graph_semantics(&composed, &interp).unwrap();
        let contracted = graph_semantics(&g, &interp)
            .unwrap()
            .contract(&graph_semantics(&h, &interp).unwrap())
            .unwrap();
        assert!(direct.equiv(&contracted), "case {case}: composition vs contraction differ");
    }
    assert!(started.elapsed() < Duration::from_secs(30), "took {:?}", started.elapsed());
}

/// Criterion 2: stacking matches the tensor product under the same
/// regime.
#[test]
fn c02_stacking_equals_tensor_product() {
    let mut rng = StdRng::seed_from_u64(202);
    let config = GraphGenConfig::small();
    let interp = fp_interp(777);
    for case in 0..200 {
        let (gn, gm) = (rng.gen_range(0..=2), rng.gen_range(0..=2));
        let g = random_graph(&mut rng, &config, gn, gm);
        let (hn, hm) = (rng.gen_range(0..=2), rng.gen_range(0..=2));
        let h = random_graph(&mut rng, &config, hn, hm);
        let stacked = g.stack(&h);
        let direct = graph_semantics(&stacked, &interp).unwrap();
        let product =
            graph_semantics(&g, &interp).unwrap().product(&graph_semantics(&h, &interp).unwrap());
        assert!(direct.equiv(&product), "case {case}: stacking vs product differ");
    }
}

/// Criterion 3: 200 random graphs, shuffled: the isomorphism is found and
/// the tensor semantics agree exactly under three random interpretations.
#[test]
fn c03_isomorphism_soundness() {
    let mut rng = StdRng::seed_from_u64(303);
    let config = GraphGenConfig::small();
    for case in 0..200 {
        let (gn, gm) = (rng.gen_range(0..=3), rng.gen_range(0..=3));
        let g = random_graph(&mut rng, &config, gn, gm);
        let (shuffled, _) = shuffle_graph(&mut rng, &g);
        let witness = find_isomorphism(&g, &shuffled)
            .unwrap_or_else(|| panic!("case {case}: isomorphism not found"));
        assert!(witness.verify(&g, &shuffled), "case {case}: witness fails verification");
        for trial in 0..3 {
            let interp = fp_interp(9000 + case * 3 + trial);
            let a = graph_semantics(&g, &interp).unwrap();
            let b = graph_semantics(&shuffled, &interp).unwrap();
            assert!(a.equiv(&b), "case {case}, trial {trial}: semantics differ");
        }
    }
}

/// Criterion 4: the symmetric-monoidal coherence equations each close by
/// isomorphism in under a second.
#[test]
fn c04_coherence_suite() {
    let f = || Term::gen("f".to_owned(), 1, 2);
    let g = || Term::gen("g".to_owned(), 2, 1);
    let h = || Term::gen("h".to_owned(), 1, 1);

    let equations: Vec<(&str, Term<String>, Term<String>)> = vec![
        ("left unit", Term::Id(1).then(f()), f()),
        ("right unit", f().then(Term::Id(2)), f()),
        ("compose assoc", f().then(g()).then(h()), f().then(g().then(h()))),
        ("stack assoc", f().beside(g()).beside(h()), f().beside(g().beside(h()))),
        ("interchange", f().then(g()).beside(g().then(f())), f().beside(g()).then(g().beside(f()))),
        (
            "swap naturality",
            f().beside(g()).then(Term::Swap(2, 1)),
            Term::Swap(1, 2).then(g().beside(f())),
        ),
        ("swap involution", Term::Swap(2, 1).then(Term::Swap(1, 2)), Term::Id(3)),
        (
            "yanking right",
            Term::Cup(1).beside(Term::Id(1)).then(Term::Id(1).beside(Term::Cap(1))),
            Term::Id(1),
        ),
        (
            "yanking left",
            Term::Id(1).beside(Term::Cup(1)).then(Term::Cap(1).beside(Term::Id(1))),
            Term::Id(1),
        ),
    ];
    for (name, lhs, rhs) in equations {
        let started = Instant::now();
        let witness = terms_iso(&lhs, &rhs).expect("shapes agree");
        let elapsed = started.elapsed();
        assert!(witness.is_some(), "{name}: not closed by isomorphism");
        assert!(elapsed < Duration::from_secs(1), "{name}: took {elapsed:?}");
    }
}

/// Criterion 5: the Frobenius development checks from its theory file -
/// frobL by the five-rewrite script, frobR by two rewrites plus `iso` -
/// in under five seconds, and flipping any rewrite's direction makes the
/// check fail.
#[test]
fn c05_frobenius_replay_and_mutations() {
    let started = Instant::now();
    let resolved = load_frobenius();

    let frobl = &resolved.lemmas[0];
    assert_eq!(frobl.name, "frobL");
    assert_eq!(frobl.proof.len(), 6, "five rewrites and the closing iso");
    let frobr = &resolved.lemmas[1];
    assert_eq!(frobr.name, "frobR");
    assert_eq!(frobr.proof.len(), 3, "two rewrites and the closing iso");

    let report =
        check_theory(&resolved.signature, &resolved.lemmas, &CheckOptions::default()).unwrap();
    assert!(report.all_ok(), "{report:?}");

    // Flip each rewrite's direction, one mutation at a time. Every
    // mutation fails the lemma. A flip that erases the needed match is
    // caught at the flipped step itself; flipping frobL's step 2 leaves a
    // legal (wrong) rewrite whose damage surfaces at step 3, and flipping
    // its step 5 inserts a counit pair that only the final iso can see.
    let expected_failures: [(usize, usize, usize); 7] = [
        // (lemma index, flipped step, step the checker reports)
        (0, 1, 1),
        (0, 2, 3),
        (0, 3, 3),
        (0, 4, 4),
        (0, 5, 6),
        (1, 1, 1),
        (1, 2, 2),
    ];
    for (lemma_index, flip, expected_step) in expected_failures {
        let mut lemmas = resolved.lemmas.clone();
        let ProofStep::Rewrite { reverse, .. } = &mut lemmas[lemma_index].proof[flip - 1] else {
            panic!("step {flip} is a rewrite");
        };
        *reverse = !*reverse;
        let report = check_theory(&resolved.signature, &lemmas, &CheckOptions::default()).unwrap();
        let mutated = &report.lemmas[lemma_index];
        assert_eq!(mutated.status, "failed", "lemma {lemma_index} flip {flip}: {report:?}");
        assert_eq!(
            mutated.failed_step,
            Some(expected_step),
            "lemma {lemma_index} flip {flip}: {:?}",
            mutated.reason
        );
    }

    assert!(started.elapsed() < Duration::from_secs(5), "took {:?}", started.elapsed());
}

/// Criterion 6: 300 random cup/cap-free terms round-trip through
/// extraction with isomorphic graphs.
#[test]
fn c06_extraction_round_trip() {
    let mut rng = StdRng::seed_from_u64(606);
    let config = TermGenConfig::standard(10, 6);
    for case in 0..300 {
        let term = random_term(&mut rng, &config);
        let graph = term_to_graph(&term);
        let extracted =
            graph_to_term(&graph).unwrap_or_else(|| panic!("case {case}: extraction failed"));
        assert!(extracted.is_cup_cap_free(), "case {case}");
        let back = term_to_graph(&extracted);
        assert!(
            find_isomorphism(&back, &graph).is_some(),
            "case {case}: round trip not isomorphic for {term}"
        );
    }
}

/// Criterion 7: 100 planted rewrites, applied forward then reversed,
/// land on a graph isomorphic to the original host; every intermediate
/// stays acyclic and monogamous.
#[test]
fn c07_dpo_inverse_round_trip() {
    let mut rng = StdRng::seed_from_u64(707);
    let config = TermGenConfig::standard(4, 5);
    for case in 0..100 {
        let rule = random_rule(&mut rng, &config, case);
        let host_term = grow_around(&mut rng, rule.lhs.clone(), &config, 5);
        let host = term_to_graph(&host_term);
        assert!(host.is_monogamous() && host.is_acyclic(), "case {case}: bad host");

        let pattern = term_to_graph(&rule.lhs);
        let occurrences = find_matches(&pattern, &host).len();
        assert!(occurrences >= 1, "case {case}: planted pattern not found");
        let occurrence = rng.gen_range(1..=occurrences);

        let forward = rewrite_once(&host, &rule, Direction::Forward, occurrence)
            .unwrap_or_else(|| panic!("case {case}: forward rewrite absent"));
        assert!(
            forward.result.is_monogamous() && forward.result.is_acyclic(),
            "case {case}: intermediate left the acyclic monogamous class"
        );

        let back = rewrite_once(&forward.result, &rule, Direction::Reverse, 1)
            .unwrap_or_else(|| panic!("case {case}: reverse rewrite absent"));
        assert!(
            back.result.is_monogamous() && back.result.is_acyclic(),
            "case {case}: result left the acyclic monogamous class"
        );
        assert!(
            find_isomorphism(&back.result, &host).is_some(),
            "case {case}: round trip is not isomorphic to the host"
        );
    }
}

/// Criterion 8: the ZX constants. One CNOT evaluates to the CNOT matrix
/// over sqrt(2) (cross-checked against a direct basis-state oracle), two
/// CNOTs to I/2, and CNOT;NOTC;CNOT to SWAP/(2 sqrt(2)), all within 1e-9.
#[test]
fn c08_zx_constants() {
    let interp = zx_interpretation();

    let max_diff = |tensor: &Tensor<Cx>, expected: &dyn Fn(&[u64], &[u64]) -> Complex64| {
        let mut worst: f64 = 0.0;
        let index = tensor.index_set().clone();
        index.for_each_vector(tensor.n_in() + tensor.n_out(), |v| {
            let (i, o) = v.split_at(tensor.n_in());
            worst = worst.max((tensor.entry(i, o).0 - expected(i, o)).norm());
        });
        worst
    };

    // oracle: CNOT permutes basis states (a, b) -> (a, a xor b)
    let single = term_semantics(&cnot(), &interp).unwrap();
    let diff = max_diff(&single, &|i, o| {
        if o[0] == i[0] && o[1] == i[0] ^ i[1] {
            Complex64::new(1.0 / 2f64.sqrt(), 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    assert!(diff < 1e-9, "single CNOT deviates by {diff}");

    let double = term_semantics(&cnot().then(cnot()), &interp).unwrap();
    let diff = max_diff(&double, &|i, o| {
        if i == o {
            Complex64::new(0.5, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    assert!(diff < 1e-9, "CNOT;CNOT deviates from I/2 by {diff}");

    let triple = term_semantics(&cnot().then(notc()).then(cnot()), &interp).unwrap();
    let diff = max_diff(&triple, &|i, o| {
        if o[0] == i[1] && o[1] == i[0] {
            Complex64::new(1.0 / (2.0 * 2f64.sqrt()), 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    assert!(diff < 1e-9, "CNOT;NOTC;CNOT deviates from SWAP/(2 sqrt 2) by {diff}");
}

/// Criterion 9: graphs from 50-edge terms decide isomorphism - positive
/// and negative - in under a second each.
#[test]
fn c09_isomorphism_performance() {
    let mut rng = StdRng::seed_from_u64(909);
    let config = TermGenConfig::standard(50, 8);
    for case in 0..5 {
        let term = random_term(&mut rng, &config);
        let graph = term_to_graph(&term);
        assert!(graph.edge_count() >= 40, "case {case}: wanted a large graph");
        let (shuffled, _) = shuffle_graph(&mut rng, &graph);

        let started = Instant::now();
        let witness = find_isomorphism(&graph, &shuffled);
        let positive = started.elapsed();
        assert!(witness.is_some(), "case {case}: isomorphism not found");
        assert!(positive < Duration::from_secs(1), "case {case}: positive took {positive:?}");

        // negative: corrupt one label
        let mutated = InterfacedGraph::from_parts(
            shuffled
                .edges()
                .enumerate()
                .map(|(k, (id, e))| {
                    let label = if k == 0 { "mutated".to_owned() } else { e.label.clone() };
                    (
                        id.raw(),
                        label,
                        e.inputs.iter().map(|v| v.raw()).collect(),
                        e.outputs.iter().map(|v| v.raw()).collect(),
                    )
                })
                .collect(),
            shuffled.extra_vertices().iter().map(|v| v.raw()).collect(),
            shuffled.inputs().iter().map(|v| v.raw()).collect(),
            shuffled.outputs().iter().map(|v| v.raw()).collect(),
        );
        let started = Instant::now();
        let witness = find_isomorphism(&graph, &mutated);
        let negative = started.elapsed();
        assert!(witness.is_none(), "case {case}: mutated graph wrongly isomorphic");
        assert!(negative < Duration::from_secs(1), "case {case}: negative took {negative:?}");
    }
}

/// Criterion 10: dropping an edge from the left context of a
/// decomposition always fails certification, so the rewrite is absent:
/// 100 out of 100 corrupted decompositions are rejected.
#[test]
fn c10_corrupted_decompositions_are_rejected() {
    let mut rng = StdRng::seed_from_u64(1010);
    let config = TermGenConfig::standard(4, 5);
    let mut rejected = 0;
    let mut trials = 0;
    while trials < 100 {
        let rule = random_rule(&mut rng, &config, 10_000 + trials);
        let host_term = grow_around(&mut rng, rule.lhs.clone(), &config, 6);
        let host = term_to_graph(&host_term);
        let pattern = term_to_graph(&rule.lhs);
        let replacement = term_to_graph(&rule.rhs);
        let matches = find_matches(&pattern, &host);
        let Some(mat) = matches.first() else { continue };
        let decomposition = decompose_raw(&host, mat);
        let Some((first_left_edge, _)) = decomposition.left.edges().next() else {
            continue; // need a nonempty left context to corrupt
        };
        // the intact decomposition applies
        assert!(
            apply_decomposition(&host, &decomposition, &replacement).is_some(),
            "trial {trials}: intact decomposition rejected"
        );
        let mut corrupted = decomposition.clone();
        corrupted.left = corrupted.left.without_edge(first_left_edge);
        if apply_decomposition(&host, &corrupted, &replacement).is_none() {
            rejected += 1;
        }
        trials += 1;
    }
    assert_eq!(rejected, 100, "only {rejected}/100 corrupted decompositions were rejected");
}
