//! Structural laws of the diagram language, checked on randomized terms:
//! the two semantic routes agree, the symmetric-monoidal coherence laws
//! hold as graph isomorphisms, and cup/cap-free terms always land in the
//! acyclic monogamous class.

use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;

use strand_core::aprop::{
    graph_to_term, permutation_term, term_semantics, term_to_graph, Permutation, Term,
};
use strand_core::gen::{random_term, TermGenConfig};
use strand_core::hypergraph::{find_isomorphism, InterfacedGraph, Interpretation};
use strand_core::rewrite::terms_iso;
use strand_core::scalar::Fp;
use strand_core::tensor::{seeded_tensor_family, IndexSet};

fn pool_interp(seed: u64) -> Interpretation<String, Fp> {
    let index = IndexSet::qubit();
    Interpretation::new(index.clone(), move |label: &String| {
        Some(seeded_tensor_family(seed, label, &index))
    })
}

#[test]
fn term_and_graph_semantics_agree_on_300_random_terms() {
    let mut rng = StdRng::seed_from_u64(2024);
    let config = TermGenConfig::standard(6, 5);
    let interp = pool_interp(50);
    for case in 0..300 {
        let term = random_term(&mut rng, &config);
        let direct = term_semantics(&term, &interp).unwrap();
        let via_graph =
            strand_core::hypergraph::graph_semantics(&term_to_graph(&term), &interp).unwrap();
        assert!(direct.equiv(&via_graph), "case {case}: {term}");
    }
}

#[test]
fn random_cup_free_terms_are_monogamous_and_acyclic() {
    let mut rng = StdRng::seed_from_u64(77);
    let config = TermGenConfig::standard(8, 6);
    for _ in 0..200 {
        let term = random_term(&mut rng, &config);
        let graph = term_to_graph(&term);
        assert!(graph.is_monogamous(), "{term}");
        assert!(graph.is_acyclic(), "{term}");
    }
}

#[test]
fn smc_coherence_laws_close_by_isomorphism() {
    let mut rng = StdRng::seed_from_u64(4096);
    let config = TermGenConfig::standard(3, 4);
    for _ in 0..40 {
        let f = random_term(&mut rng, &config);
        let g = random_term(&mut rng, &config);
        let h = random_term(&mut rng, &config);

        // unit laws
        assert!(terms_iso(&Term::Id(f.dom()).then(f.clone()), &f).unwrap().is_some());
        assert!(terms_iso(&f.clone().then(Term::Id(f.cod())), &f).unwrap().is_some());

        // associativity of composition
        let gf = strand_core::gen::layered_from(&mut rng, &config, f.cod(), 2);
        let hg = strand_core::gen::layered_from(&mut rng, &config, gf.cod(), 2);
        let left = f.clone().then(gf.clone()).then(hg.clone());
        let right = f.clone().then(gf.clone().then(hg.clone()));
        assert!(terms_iso(&left, &right).unwrap().is_some());

        // associativity of stacking
        let left = f.clone().beside(g.clone()).beside(h.clone());
        let right = f.clone().beside(g.clone().beside(h.clone()));
        assert!(terms_iso(&left, &right).unwrap().is_some());

        // interchange
        let p = strand_core::gen::layered_from(&mut rng, &config, f.cod(), 2);
        let q = strand_core::gen::layered_from(&mut rng, &config, g.cod(), 2);
        let left = f.clone().then(p.clone()).beside(g.clone().then(q.clone()));
        let right = f.clone().beside(g.clone()).then(p.clone().beside(q.clone()));
        assert!(terms_iso(&left, &right).unwrap().is_some());

        // naturality of the braid
        let left = f.clone().beside(g.clone()).then(Term::Swap(f.cod(), g.cod()));
        let right = Term::Swap(f.dom(), g.dom()).then(g.clone().beside(f.clone()));
        assert!(terms_iso(&left, &right).unwrap().is_some());
    }

    // braid involution and both yanking equations, at several widths
    for n in 0..4usize {
        for m in 0..4usize {
            let invol: Term<String> = Term::Swap(n, m).then(Term::Swap(m, n));
            assert!(terms_iso(&invol, &Term::Id(n + m)).unwrap().is_some());
        }
        let snake: Term<String> =
            Term::Cup(n).beside(Term::Id(n)).then(Term::Id(n).beside(Term::Cap(n)));
        assert!(terms_iso(&snake, &Term::Id(n)).unwrap().is_some());
        let snake2: Term<String> =
            Term::Id(n).beside(Term::Cup(n)).then(Term::Cap(n).beside(Term::Id(n)));
        assert!(terms_iso(&snake2, &Term::Id(n)).unwrap().is_some());
    }
}

#[test]
fn extraction_never_emits_cups_or_caps() {
    let mut rng = StdRng::seed_from_u64(99);
    let config = TermGenConfig::standard(7, 5);
    for _ in 0..100 {
        let term = random_term(&mut rng, &config);
        let extracted = graph_to_term(&term_to_graph(&term)).expect("term graphs extract");
        assert!(extracted.is_cup_cap_free());
    }
}

proptest! {
    /// permutation_term really computes the permutation: its graph wires
    /// input p(k) to output position k.
    #[test]
    fn permutation_term_realizes_the_permutation(images in proptest::sample::subsequence((1..=8usize).collect::<Vec<_>>(), 8).prop_shuffle()) {
        let n = images.len();
        let perm = Permutation::try_new(images.clone()).unwrap();
        let term = permutation_term::<String>(&perm);
        let reference: InterfacedGraph<String> = InterfacedGraph::from_parts(
            vec![],
            vec![],
            (1..=n as u32).collect(),
            images.iter().map(|&i| i as u32).collect(),
        );
        prop_assert!(find_isomorphism(&term_to_graph(&term), &reference).is_some());
    }

    /// Extraction round-trips arbitrary well-typed random terms.
    #[test]
    fn extraction_round_trip(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let config = TermGenConfig::standard(5, 5);
        let term = random_term(&mut rng, &config);
        let graph = term_to_graph(&term);
        let back = graph_to_term(&graph).expect("term graphs extract");
        prop_assert!(find_isomorphism(&term_to_graph(&back), &graph).is_some());
    }
}
