//! The syntactic term language for symmetric monoidal diagrams.
//!
//! Terms are built from identities, braids, cups, caps, generators,
//! sequential composition, and stacking. They translate to interfaced
//! hypergraphs by structural recursion, and acyclic monogamous graphs
//! translate back to cup/cap-free terms by left-to-right extraction.
//! Both directions preserve the tensor semantics.

use std::fmt;

use thiserror::Error;

use crate::hypergraph::{
    cap_graph, cup_graph, generator_graph, graph_semantics, id_graph, swap_graph, EdgeId,
    InterfacedGraph, Interpretation, Label, SemanticsError, VertexId,
};
use crate::scalar::Semiring;
use crate::tensor::{cap_tensor, cup_tensor, delta, swap_tensor, Tensor};

/// A diagram term. Arities of composite nodes are computed; `compose`
/// requires the middle arities to agree and is shape-checked at
/// construction by [`Term::then`] or afterwards by [`typecheck`].
#[derive(Clone, PartialEq, Debug)]
pub enum Term<L> {
    Id(usize),
    Swap(usize, usize),
    Cup(usize),
    Cap(usize),
    Compose(Box<Term<L>>, Box<Term<L>>),
    Stack(Box<Term<L>>, Box<Term<L>>),
    Gen(L, usize, usize),
}

impl<L: Label> Term<L> {
    pub fn gen(label: L, n: usize, m: usize) -> Self {
        Term::Gen(label, n, m)
    }

    /// Sequential composition; panics if the middle arities disagree.
    pub fn then(self, other: Term<L>) -> Self {
        assert_eq!(
            self.cod(),
            other.dom(),
            "composition shape mismatch: {} -> {} against {} -> {}",
            self.dom(),
            self.cod(),
            other.dom(),
            other.cod()
        );
        Term::Compose(Box::new(self), Box::new(other))
    }

    /// Parallel composition.
    pub fn beside(self, other: Term<L>) -> Self {
        Term::Stack(Box::new(self), Box::new(other))
    }

    pub fn dom(&self) -> usize {
        match self {
            Term::Id(n) => *n,
            Term::Swap(n, m) => n + m,
            Term::Cup(_) => 0,
            Term::Cap(n) => 2 * n,
            Term::Compose(a, _) => a.dom(),
            Term::Stack(a, b) => a.dom() + b.dom(),
            Term::Gen(_, n, _) => *n,
        }
    }

    pub fn cod(&self) -> usize {
        match self {
            Term::Id(n) => *n,
            Term::Swap(n, m) => n + m,
            Term::Cup(n) => 2 * n,
            Term::Cap(_) => 0,
            Term::Compose(_, b) => b.cod(),
            Term::Stack(a, b) => a.cod() + b.cod(),
            Term::Gen(_, _, m) => *m,
        }
    }

    pub fn node_count(&self) -> usize {
        match self {
            Term::Compose(a, b) | Term::Stack(a, b) => 1 + a.node_count() + b.node_count(),
            _ => 1,
        }
    }

    /// True when the term mentions no cup or cap.
    pub fn is_cup_cap_free(&self) -> bool {
        match self {
            Term::Cup(_) | Term::Cap(_) => false,
            Term::Compose(a, b) | Term::Stack(a, b) => a.is_cup_cap_free() && b.is_cup_cap_free(),
            _ => true,
        }
    }
}

/// A step into a composite term, used to report where typechecking failed.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum PathStep {
    ComposeLeft,
    ComposeRight,
    StackLeft,
    StackRight,
}

impl fmt::Display for PathStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            PathStep::ComposeLeft => ";L",
            PathStep::ComposeRight => ";R",
            PathStep::StackLeft => "*L",
            PathStep::StackRight => "*R",
        };
        write!(f, "{s}")
    }
}

fn render_path(path: &[PathStep]) -> String {
    if path.is_empty() {
        "the root".to_owned()
    } else {
        path.iter().map(|s| s.to_string()).collect::<Vec<_>>().join("")
    }
}

fn render_arities(arities: &[(usize, usize)]) -> String {
    arities.iter().map(|(n, m)| format!("{n} -> {m}")).collect::<Vec<_>>().join(", ")
}

#[derive(Clone, PartialEq, Eq, Debug, Error)]
pub enum TypeError {
    #[error("unknown generator `{label}` at {}", render_path(.path))]
    UnknownGenerator { label: String, path: Vec<PathStep> },
    #[error("generator `{label}` declared {}, used {used_in} -> {used_out} at {}", render_arities(.declared), render_path(.path))]
    GeneratorArity {
        label: String,
        declared: Vec<(usize, usize)>,
        used_in: usize,
        used_out: usize,
        path: Vec<PathStep>,
    },
    #[error("composition mismatch: left ends with {left_cod} wires, right starts with {right_dom} at {}", render_path(.path))]
    ComposeMismatch { left_cod: usize, right_dom: usize, path: Vec<PathStep> },
}

/// Check generator usage and composition shapes against a generator table
/// (label -> declared arities; a label may be declared at several).
pub fn typecheck<L: Label>(
    term: &Term<L>,
    generators: &impl Fn(&L) -> Option<Vec<(usize, usize)>>,
) -> Result<(), TypeError> {
    fn walk<L: Label>(
        term: &Term<L>,
        generators: &impl Fn(&L) -> Option<Vec<(usize, usize)>>,
        path: &mut Vec<PathStep>,
    ) -> Result<(), TypeError> {
        match term {
            Term::Id(_) | Term::Swap(_, _) | Term::Cup(_) | Term::Cap(_) => Ok(()),
            Term::Gen(label, n, m) => match generators(label) {
                None => Err(TypeError::UnknownGenerator {
                    label: label.to_string(),
                    path: path.clone(),
                }),
                Some(declared) if !declared.contains(&(*n, *m)) => Err(TypeError::GeneratorArity {
                    label: label.to_string(),
                    declared,
                    used_in: *n,
                    used_out: *m,
                    path: path.clone(),
                }),
                Some(_) => Ok(()),
            },
            Term::Compose(a, b) => {
                path.push(PathStep::ComposeLeft);
                walk(a, generators, path)?;
                path.pop();
                path.push(PathStep::ComposeRight);
                walk(b, generators, path)?;
                path.pop();
                if a.cod() != b.dom() {
                    return Err(TypeError::ComposeMismatch {
                        left_cod: a.cod(),
                        right_dom: b.dom(),
                        path: path.clone(),
                    });
                }
                Ok(())
            }
            Term::Stack(a, b) => {
                path.push(PathStep::StackLeft);
                walk(a, generators, path)?;
                path.pop();
                path.push(PathStep::StackRight);
                walk(b, generators, path)?;
                path.pop();
                Ok(())
            }
        }
    }
    walk(term, generators, &mut Vec::new())
}

/// Tensor semantics of a term. The term must already typecheck; shape
/// violations in composites are programming errors here.
pub fn term_semantics<L: Label, S: Semiring>(
    term: &Term<L>,
    interp: &Interpretation<L, S>,
) -> Result<Tensor<S>, SemanticsError> {
    let index = interp.index_set();
    Ok(match term {
        Term::Id(n) => delta(*n, index),
        Term::Swap(n, m) => swap_tensor(*n, *m, index),
        Term::Cup(n) => cup_tensor(*n, index),
        Term::Cap(n) => cap_tensor(*n, index),
        Term::Compose(a, b) => term_semantics(a, interp)?
            .contract(&term_semantics(b, interp)?)
            .expect("typechecked composition"),
        Term::Stack(a, b) => term_semantics(a, interp)?.product(&term_semantics(b, interp)?),
        Term::Gen(label, n, m) => interp.tensor_for(label, *n, *m)?,
    })
}

/// The hypergraph of a term, by structural recursion on the term.
pub fn term_to_graph<L: Label>(term: &Term<L>) -> InterfacedGraph<L> {
    match term {
        Term::Id(n) => id_graph(*n),
        Term::Swap(n, m) => swap_graph(*n, *m),
        Term::Cup(n) => cup_graph(*n),
        Term::Cap(n) => cap_graph(*n),
        Term::Compose(a, b) => {
            term_to_graph(a).compose(&term_to_graph(b)).expect("typechecked composition")
        }
        Term::Stack(a, b) => term_to_graph(a).stack(&term_to_graph(b)),
        Term::Gen(label, n, m) => generator_graph(label.clone(), *n, *m),
    }
}

/// A bijection on `{1..n}`, stored as the sequence `p(1), .., p(n)`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Permutation(Vec<usize>);

#[derive(Debug, Error, PartialEq, Eq)]
#[error("sequence is not a permutation of 1..={0}")]
pub struct NotAPermutation(usize);

impl Permutation {
    pub fn try_new(images: Vec<usize>) -> Result<Self, NotAPermutation> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if i < 1 || i > n || seen[i - 1] {
                return Err(NotAPermutation(n));
            }
            seen[i - 1] = true;
        }
        Ok(Permutation(images))
    }

    pub fn identity(n: usize) -> Self {
        Permutation((1..=n).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(k, &i)| i == k + 1)
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }
}

/// A term made of identities and elementary braids whose graph sends input
/// `v_{p(k)}` to output position `k`; the identity permutation is `Id(n)`.
///
/// Synthesis is a bubble network: each emitted layer is
/// `Id ⊗ Swap(1,1) ⊗ Id` at one position.
pub fn permutation_term<L: Label>(perm: &Permutation) -> Term<L> {
    let n = perm.len();
    if perm.is_identity() {
        return Term::Id(n);
    }
    // Entry-level view: appending the layer that braids positions (i, i+1)
    // swaps the entries at those positions of the running image vector.
    // Selection-sort the identity into the target, recording layer indices.
    let target = perm.images();
    let mut work: Vec<usize> = (1..=n).collect();
    let mut layers: Vec<usize> = Vec::new();
    for k in 0..n {
        let j = work[k..].iter().position(|&x| x == target[k]).expect("bijection") + k;
        for i in (k..j).rev() {
            work.swap(i, i + 1);
            layers.push(i); // 0-based left position of the braid
        }
    }
    debug_assert_eq!(work, target);

    let mut acc: Option<Term<L>> = None;
    for i in layers {
        let mut layer = Term::Swap(1, 1);
        if i > 0 {
            layer = Term::Id(i).beside(layer);
        }
        if i + 2 < n {
            layer = layer.beside(Term::Id(n - i - 2));
        }
        acc = Some(match acc {
            None => layer,
            Some(t) => t.then(layer),
        });
    }
    acc.expect("non-identity permutation has at least one layer")
}

/// Left-to-right extraction of a cup/cap-free term from an acyclic
/// monogamous graph; `None` for graphs outside that class.
///
/// The frontier of open wires starts at the graph inputs. Each round takes
/// the ready edge (all input wires on the frontier) with the smallest id,
/// braids its input wires into a contiguous block anchored at the least
/// position any of them occupies (input-less edges anchor at the right
/// end), emits `Id ⊗ generator ⊗ Id`, and splices the edge outputs into
/// the frontier. A final braid lines the frontier up with the outputs.
pub fn graph_to_term<L: Label>(g: &InterfacedGraph<L>) -> Option<Term<L>> {
    if !g.is_monogamous() || !g.is_acyclic() {
        return None;
    }

    let mut frontier: Vec<VertexId> = g.inputs().to_vec();
    let mut remaining: Vec<EdgeId> = g.edges().map(|(id, _)| id).collect();
    let mut acc: Term<L> = Term::Id(g.n_in());

    while !remaining.is_empty() {
        let ready = remaining.iter().copied().find(|id| {
            let e = g.edge(*id).expect("edge id from this graph");
            e.inputs.iter().all(|v| frontier.contains(v))
        })?;
        remaining.retain(|id| *id != ready);
        let edge = g.edge(ready).expect("edge id from this graph");

        let width = frontier.len();
        let positions: Vec<usize> = edge
            .inputs
            .iter()
            .map(|v| frontier.iter().position(|w| w == v).expect("ready edge"))
            .collect();
        let anchor = positions.iter().copied().min().unwrap_or(width);

        // braid the edge's input wires into a block at the anchor,
        // everything else keeping its relative order
        let mut next: Vec<VertexId> = Vec::with_capacity(width);
        next.extend(frontier.iter().take(anchor).copied());
        next.extend(edge.inputs.iter().copied());
        next.extend(
            frontier
                .iter()
                .enumerate()
                .filter_map(|(pos, v)| (pos >= anchor && !positions.contains(&pos)).then_some(*v)),
        );
        let images: Vec<usize> = next
            .iter()
            .map(|v| frontier.iter().position(|w| w == v).expect("same wires") + 1)
            .collect();
        let perm = Permutation::try_new(images).expect("frontier reshuffle");
        if !perm.is_identity() {
            acc = acc.then(permutation_term(&perm));
        }

        let mut layer = Term::Gen(edge.label.clone(), edge.inputs.len(), edge.outputs.len());
        if anchor > 0 {
            layer = Term::Id(anchor).beside(layer);
        }
        let tail = width - anchor - edge.inputs.len();
        if tail > 0 {
            layer = layer.beside(Term::Id(tail));
        }
        acc = acc.then(layer);

        let mut spliced: Vec<VertexId> = next[..anchor].to_vec();
        spliced.extend(edge.outputs.iter().copied());
        spliced.extend(next[anchor + edge.inputs.len()..].iter().copied());
        frontier = spliced;
    }

    if frontier.len() != g.n_out() {
        return None;
    }
    let images: Vec<usize> = g
        .outputs()
        .iter()
        .map(|v| frontier.iter().position(|w| w == v).map(|p| p + 1))
        .collect::<Option<Vec<_>>>()?;
    let perm = Permutation::try_new(images).ok()?;
    if !perm.is_identity() {
        acc = acc.then(permutation_term(&perm));
    }
    Some(acc)
}

/// Check both semantic routes against each other for one term.
pub fn semantics_agree<L: Label, S: Semiring>(
    term: &Term<L>,
    interp: &Interpretation<L, S>,
) -> Result<bool, SemanticsError> {
    let direct = term_semantics(term, interp)?;
    let via_graph = graph_semantics(&term_to_graph(term), interp)?;
    Ok(direct.equiv(&via_graph))
}

impl<L: fmt::Display> Term<L> {
    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, inside_stack: bool) -> fmt::Result {
        match self {
            Term::Id(n) => write!(f, "id {n}"),
            Term::Swap(n, m) => write!(f, "sw {n} {m}"),
            Term::Cup(n) => write!(f, "cup {n}"),
            Term::Cap(n) => write!(f, "cap {n}"),
            Term::Gen(label, _, _) => write!(f, "{label}"),
            Term::Stack(a, b) => {
                a.fmt_prec(f, true)?;
                write!(f, " * ")?;
                b.fmt_prec(f, true)
            }
            Term::Compose(a, b) => {
                if inside_stack {
                    write!(f, "(")?;
                    a.fmt_prec(f, false)?;
                    write!(f, " ; ")?;
                    b.fmt_prec(f, false)?;
                    write!(f, ")")
                } else {
                    a.fmt_prec(f, false)?;
                    write!(f, " ; ")?;
                    b.fmt_prec(f, false)
                }
            }
        }
    }
}

impl<L: fmt::Display> fmt::Display for Term<L> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, false)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraph::find_isomorphism;
    use crate::scalar::Fp;
    use crate::tensor::{seeded_tensor_family, IndexSet};

    fn frob_gens(label: &&'static str) -> Option<Vec<(usize, usize)>> {
        match *label {
            "m" => Some(vec![(2, 1)]),
            "u" => Some(vec![(0, 1)]),
            "n" => Some(vec![(1, 2)]),
            "v" => Some(vec![(1, 0)]),
            _ => None,
        }
    }

    fn interp(seed: u64) -> Interpretation<&'static str, Fp> {
        let index = IndexSet::qubit();
        Interpretation::new(index.clone(), move |label: &&'static str| {
            Some(seeded_tensor_family(seed, label, &index))
        })
    }

    #[test]
    fn typecheck_generators() {
        assert!(typecheck(&Term::gen("m", 2, 1), &frob_gens).is_ok());
        assert!(matches!(
            typecheck(&Term::gen("m", 1, 1), &frob_gens),
            Err(TypeError::GeneratorArity { .. })
        ));
        assert!(matches!(
            typecheck(&Term::gen("q", 1, 1), &frob_gens),
            Err(TypeError::UnknownGenerator { .. })
        ));
    }

    #[test]
    fn typecheck_composition_shape() {
        let bad: Term<&str> = Term::Compose(Box::new(Term::Id(1)), Box::new(Term::Id(2)));
        match typecheck(&bad, &frob_gens) {
            Err(TypeError::ComposeMismatch { left_cod: 1, right_dom: 2, .. }) => {}
            other => panic!("expected compose mismatch, got {other:?}"),
        }
    }

    #[test]
    fn typecheck_reports_position() {
        let bad = Term::Id(1).beside(Term::gen("m", 3, 1));
        match typecheck(&bad, &frob_gens) {
            Err(TypeError::GeneratorArity { path, .. }) => {
                assert_eq!(path, vec![PathStep::StackRight]);
            }
            other => panic!("expected arity error, got {other:?}"),
        }
    }

    #[test]
    fn semantics_of_id_is_delta() {
        let i = interp(5);
        let sem = term_semantics(&Term::<&str>::Id(2), &i).unwrap();
        assert!(sem.equiv(&delta(2, &IndexSet::qubit())));
    }

    #[test]
    fn yanking_gives_identity_semantics() {
        let i = interp(5);
        let snake: Term<&str> =
            Term::Cup(1).beside(Term::Id(1)).then(Term::Id(1).beside(Term::Cap(1)));
        let sem = term_semantics(&snake, &i).unwrap();
        assert!(sem.equiv(&delta(1, &IndexSet::qubit())));
    }

    #[test]
    fn term_and_graph_semantics_agree_spot() {
        let i = interp(13);
        let term =
            Term::gen("n", 1, 2).beside(Term::Id(1)).then(Term::Id(1).beside(Term::gen("m", 2, 1)));
        assert!(semantics_agree(&term, &i).unwrap());

        let snake: Term<&str> =
            Term::Cup(1).beside(Term::Id(1)).then(Term::Id(1).beside(Term::Cap(1)));
        assert!(semantics_agree(&snake, &i).unwrap());
    }

    #[test]
    fn gen_graph_shape() {
        let g = term_to_graph(&Term::gen("m", 2, 1));
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.vertices().len(), 3);
    }

    #[test]
    fn compose_with_id_is_isomorphic() {
        let a = Term::gen("m", 2, 1);
        let composed = a.clone().then(Term::Id(1));
        assert!(find_isomorphism(&term_to_graph(&composed), &term_to_graph(&a)).is_some());
    }

    #[test]
    fn stack_associativity_at_graph_level() {
        let a = Term::gen("m", 2, 1);
        let b = Term::gen("u", 0, 1);
        let c = Term::gen("v", 1, 0);
        let left = a.clone().beside(b.clone()).beside(c.clone());
        let right = a.beside(b.beside(c));
        assert!(find_isomorphism(&term_to_graph(&left), &term_to_graph(&right)).is_some());
    }

    #[test]
    fn permutation_term_identity() {
        let p = Permutation::identity(4);
        assert_eq!(permutation_term::<&str>(&p), Term::Id(4));
    }

    #[test]
    fn permutation_term_transposition() {
        let p = Permutation::try_new(vec![2, 1]).unwrap();
        assert_eq!(permutation_term::<&str>(&p), Term::Swap(1, 1));
    }

    #[test]
    fn permutation_term_reversal_matches_swap_reference() {
        // reversing three wires: its graph has outputs (v3, v2, v1)
        let p = Permutation::try_new(vec![3, 2, 1]).unwrap();
        let g = term_to_graph(&permutation_term::<&str>(&p));
        let reference: InterfacedGraph<&str> = crate::hypergraph::InterfacedGraph::from_parts(
            vec![],
            vec![],
            vec![1, 2, 3],
            vec![3, 2, 1],
        );
        assert!(find_isomorphism(&g, &reference).is_some());
    }

    #[test]
    fn permutation_term_matches_block_swap() {
        // sw 1 2 sends inputs (a, b, c) to (b, c, a): output k is input p(k)
        // with p = [2, 3, 1]
        let p = Permutation::try_new(vec![2, 3, 1]).unwrap();
        let g = term_to_graph(&permutation_term::<&str>(&p));
        let reference = term_to_graph(&Term::<&str>::Swap(1, 2));
        assert!(find_isomorphism(&g, &reference).is_some());
    }

    #[test]
    fn extract_identity_graph() {
        let g: InterfacedGraph<&str> = id_graph(3);
        let t = graph_to_term(&g).unwrap();
        assert!(find_isomorphism(&term_to_graph(&t), &g).is_some());
    }

    #[test]
    fn extract_rejects_cup() {
        let g: InterfacedGraph<&str> = cup_graph(1);
        assert_eq!(graph_to_term(&g), None);
    }

    #[test]
    fn extract_rejects_cycle() {
        let g: InterfacedGraph<&str> = InterfacedGraph::from_parts(
            vec![(1, "f", vec![1], vec![2]), (2, "g", vec![2], vec![1])],
            vec![],
            vec![],
            vec![],
        );
        assert_eq!(graph_to_term(&g), None);
    }

    #[test]
    fn extract_round_trip_spot() {
        let term = Term::gen("u", 0, 1)
            .beside(Term::gen("n", 1, 2))
            .then(Term::gen("m", 2, 1).beside(Term::Id(1)))
            .then(Term::Swap(1, 1));
        let g = term_to_graph(&term);
        let back = graph_to_term(&g).unwrap();
        assert!(back.is_cup_cap_free());
        assert!(find_isomorphism(&term_to_graph(&back), &g).is_some());
    }

    #[test]
    fn extraction_is_deterministic() {
        let term = Term::gen("n", 1, 2).then(Term::gen("m", 2, 1));
        let g = term_to_graph(&term);
        assert_eq!(graph_to_term(&g), graph_to_term(&g));
    }

    #[test]
    fn display_respects_precedence() {
        let t = Term::gen("a", 1, 1).then(Term::gen("b", 1, 1)).beside(Term::gen("c", 1, 1));
        assert_eq!(t.to_string(), "(a ; b) * c");
        let t2 = Term::gen("a", 1, 1).beside(Term::gen("b", 1, 1)).then(Term::gen("c", 2, 2));
        assert_eq!(t2.to_string(), "a * b ; c");
    }
}
