//! Subgraph matching and certified double-pushout rewriting.
//!
//! A rewrite finds a convex embedding of the rule side's graph in the
//! host, splits the host into `before ; (bypass ⊗ matched) ; after`, and
//! swaps the matched part for the other rule side. Soundness never rests
//! on the matcher or the splitter: every decomposition is certified by an
//! isomorphism check against the host before it is used, and a failed
//! certificate simply reports the occurrence as unusable.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::aprop::{permutation_term, term_to_graph, Permutation, Term};
use crate::hypergraph::{
    find_isomorphism, id_graph, EdgeId, GraphError, InterfacedGraph, Isomorphism, Label,
    MatchState, VertexId,
};

/// A named equation between two terms of equal arity.
#[derive(Clone, PartialEq, Debug)]
pub struct Rule<L> {
    pub name: String,
    pub lhs: Term<L>,
    pub rhs: Term<L>,
}

impl<L: Label> Rule<L> {
    pub fn new(name: impl Into<String>, lhs: Term<L>, rhs: Term<L>) -> Self {
        let rule = Rule { name: name.into(), lhs, rhs };
        assert_eq!(rule.lhs.dom(), rule.rhs.dom(), "rule sides must share a domain");
        assert_eq!(rule.lhs.cod(), rule.rhs.cod(), "rule sides must share a codomain");
        rule
    }
}

/// Which way to read a rule.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Direction {
    Forward,
    Reverse,
}

/// An injective, label-respecting, convex embedding of a pattern graph in
/// a host, with 1-based rank among all such embeddings.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Match {
    pub vertex_map: BTreeMap<VertexId, VertexId>,
    pub edge_map: BTreeMap<EdgeId, EdgeId>,
    /// Images of the pattern's input interface.
    pub image_inputs: Vec<VertexId>,
    /// Images of the pattern's output interface.
    pub image_outputs: Vec<VertexId>,
    pub occurrence: usize,
}

/// All convex embeddings of `pattern` in `host`, ordered by the sorted
/// host edge ids of the image, then by the vertex map.
///
/// Pattern interface vertices may land anywhere in the host (condition (a)
/// of isomorphism is dropped along with surjectivity). Pattern vertices
/// untouched by any pattern edge are enumerated over all unused host
/// vertices, ascending.
pub fn find_matches<L: Label>(
    pattern: &InterfacedGraph<L>,
    host: &InterfacedGraph<L>,
) -> Vec<Match> {
    let mut raw: Vec<(BTreeMap<VertexId, VertexId>, BTreeMap<EdgeId, EdgeId>)> = Vec::new();
    let mut state = MatchState::new(pattern, host);
    state.search_edges(&mut |state| {
        let free: Vec<VertexId> = state
            .g_vertices
            .iter()
            .filter(|v| !state.vertex_map.contains_key(v))
            .copied()
            .collect();
        let pool: Vec<VertexId> = state
            .h_vertices
            .iter()
            .filter(|v| !state.used_h_vertices.contains(v))
            .copied()
            .collect();
        let mut assignment = state.vertex_map.clone();
        let edge_map = state.edge_map.clone();
        enumerate_injective(&free, &pool, &mut assignment, &mut |vm| {
            raw.push((vm.clone(), edge_map.clone()));
        });
        false // keep enumerating
    });

    let mut matches: Vec<Match> = raw
        .into_iter()
        .map(|(vertex_map, edge_map)| {
            let image_inputs: Vec<VertexId> =
                pattern.inputs().iter().map(|v| vertex_map[v]).collect();
            let image_outputs: Vec<VertexId> =
                pattern.outputs().iter().map(|v| vertex_map[v]).collect();
            Match { vertex_map, edge_map, image_inputs, image_outputs, occurrence: 0 }
        })
        .filter(|candidate| is_convex(host, candidate))
        .collect();

    matches.sort_by(|a, b| {
        let sorted_image = |m: &Match| {
            let mut v: Vec<EdgeId> = m.edge_map.values().copied().collect();
            v.sort_unstable();
            v
        };
        sorted_image(a)
            .cmp(&sorted_image(b))
            .then_with(|| {
                a.vertex_map.iter().collect::<Vec<_>>().cmp(&b.vertex_map.iter().collect())
            })
            .then_with(|| a.edge_map.iter().collect::<Vec<_>>().cmp(&b.edge_map.iter().collect()))
    });
    for (k, m) in matches.iter_mut().enumerate() {
        m.occurrence = k + 1;
    }
    matches
}

fn enumerate_injective(
    free: &[VertexId],
    pool: &[VertexId],
    assignment: &mut BTreeMap<VertexId, VertexId>,
    emit: &mut impl FnMut(&BTreeMap<VertexId, VertexId>),
) {
    match free.split_first() {
        None => emit(assignment),
        Some((first, rest)) => {
            for candidate in pool {
                if assignment.values().any(|v| v == candidate) {
                    continue;
                }
                assignment.insert(*first, *candidate);
                enumerate_injective(rest, pool, assignment, emit);
                assignment.remove(first);
            }
        }
    }
}

/// Convexity: every directed edge-path between two image edges stays in
/// the image; pattern interface wires count as part of the image layer,
/// so no outside edge may sit both before the layer (feeding a matched
/// input wire or a matched edge) and after it (fed by a matched output
/// wire or a matched edge). Matches that fail this have no left/right
/// split and could never certify.
fn is_convex<L: Label>(host: &InterfacedGraph<L>, candidate: &Match) -> bool {
    let image: BTreeSet<EdgeId> = candidate.edge_map.values().copied().collect();
    let (feeds, fed) = layer_order(host, candidate);
    feeds.intersection(&fed).all(|e| image.contains(e))
}

/// Split the host's edge order around the match's layer: `feeds` can
/// still reach the layer, `fed` is downstream of it. Image edges belong
/// to both sides by construction.
fn layer_order<L: Label>(
    host: &InterfacedGraph<L>,
    candidate: &Match,
) -> (BTreeSet<EdgeId>, BTreeSet<EdgeId>) {
    let image: BTreeSet<EdgeId> = candidate.edge_map.values().copied().collect();
    let successors = host.edge_successors();
    let predecessors = reverse(&successors);
    let vi: BTreeSet<VertexId> = candidate.image_inputs.iter().copied().collect();
    let vj: BTreeSet<VertexId> = candidate.image_outputs.iter().copied().collect();

    let mut feed_seed: BTreeSet<EdgeId> = BTreeSet::new();
    let mut fed_seed: BTreeSet<EdgeId> = BTreeSet::new();
    for (id, e) in host.edges() {
        if image.contains(&id) {
            continue;
        }
        if e.outputs.iter().any(|v| vi.contains(v)) {
            feed_seed.insert(id);
        }
        if e.inputs.iter().any(|v| vj.contains(v)) {
            fed_seed.insert(id);
        }
    }
    let mut feeds = flood(&predecessors, &image);
    feeds.extend(flood(&predecessors, &feed_seed));
    feeds.extend(feed_seed);
    let mut fed = flood(&successors, &image);
    fed.extend(flood(&successors, &fed_seed));
    fed.extend(fed_seed);
    (feeds, fed)
}

fn reverse(successors: &BTreeMap<EdgeId, BTreeSet<EdgeId>>) -> BTreeMap<EdgeId, BTreeSet<EdgeId>> {
    let mut reversed: BTreeMap<EdgeId, BTreeSet<EdgeId>> = BTreeMap::new();
    for (e, outs) in successors {
        reversed.entry(*e).or_default();
        for f in outs {
            reversed.entry(*f).or_default().insert(*e);
        }
    }
    reversed
}

/// Edges reachable from `seed` in one or more steps.
fn flood(
    successors: &BTreeMap<EdgeId, BTreeSet<EdgeId>>,
    seed: &BTreeSet<EdgeId>,
) -> BTreeSet<EdgeId> {
    let mut reached = BTreeSet::new();
    let mut queue: Vec<EdgeId> =
        seed.iter().flat_map(|e| successors.get(e).into_iter().flatten()).copied().collect();
    while let Some(e) = queue.pop() {
        if reached.insert(e) {
            queue.extend(successors.get(&e).into_iter().flatten().copied());
        }
    }
    reached
}

/// A host split into `left ; (id_bypass ⊗ image) ; right`.
///
/// The split is only trusted once [`Decomposition::certify`] has matched
/// the recomposition against the original host.
#[derive(Clone, Debug)]
pub struct Decomposition<L> {
    /// Context before the image: host inputs -> bypass ++ image inputs.
    pub left: InterfacedGraph<L>,
    /// Number of wires running past the image.
    pub bypass: usize,
    /// The matched subgraph, interfaced by the match images.
    pub image: InterfacedGraph<L>,
    /// Context after the image: bypass ++ image outputs -> host outputs.
    pub right: InterfacedGraph<L>,
    pub image_inputs: Vec<VertexId>,
    pub image_outputs: Vec<VertexId>,
    pub bypass_wires: Vec<VertexId>,
}

impl<L: Label> Decomposition<L> {
    /// `left ; (id_bypass ⊗ image) ; right`.
    pub fn recompose(&self) -> Result<InterfacedGraph<L>, GraphError> {
        let middle = id_graph(self.bypass).stack(&self.image);
        self.left.compose(&middle.compose(&self.right)?)
    }

    /// The certificate: an isomorphism from the host onto the
    /// recomposition. Anything less than a verified witness is `None`.
    pub fn certify(&self, host: &InterfacedGraph<L>) -> Option<Isomorphism> {
        let recomposed = self.recompose().ok()?;
        find_isomorphism(host, &recomposed)
    }
}

/// Split the host around a match without certifying the result.
///
/// Edges outside the image go left when they can still feed the image
/// layer (reach a matched input vertex or a matched edge), and also when
/// they are order-incomparable to the image; they go right when the image
/// layer feeds them. Bypass wires are the vertices produced on the left
/// (or at the host input) and consumed on the right (or at the host
/// output), excluding the image interface, in ascending id order.
pub fn decompose_raw<L: Label>(host: &InterfacedGraph<L>, mat: &Match) -> Decomposition<L> {
    let image_edges: BTreeSet<EdgeId> = mat.edge_map.values().copied().collect();
    let vi: BTreeSet<VertexId> = mat.image_inputs.iter().copied().collect();
    let vj: BTreeSet<VertexId> = mat.image_outputs.iter().copied().collect();
    let (feeds, fed) = layer_order(host, mat);

    let mut left_edges: BTreeSet<EdgeId> = BTreeSet::new();
    let mut right_edges: BTreeSet<EdgeId> = BTreeSet::new();
    for (id, _) in host.edges() {
        if image_edges.contains(&id) {
            continue;
        }
        if feeds.contains(&id) {
            left_edges.insert(id);
        } else if fed.contains(&id) {
            right_edges.insert(id);
        } else {
            // incomparable edges ride along in the left context
            left_edges.insert(id);
        }
    }

    // producer/consumer side per vertex; hosts are monogamous so each is
    // unique where it exists
    #[derive(PartialEq, Clone, Copy)]
    enum Side {
        Left,
        Image,
        Right,
    }
    let mut produced_by: BTreeMap<VertexId, Side> = BTreeMap::new();
    let mut consumed_by: BTreeMap<VertexId, Side> = BTreeMap::new();
    for v in host.inputs() {
        produced_by.insert(*v, Side::Left);
    }
    for v in host.outputs() {
        consumed_by.insert(*v, Side::Right);
    }
    for (id, e) in host.edges() {
        let side = if image_edges.contains(&id) {
            Side::Image
        } else if left_edges.contains(&id) {
            Side::Left
        } else {
            Side::Right
        };
        for v in &e.outputs {
            produced_by.insert(*v, side);
        }
        for v in &e.inputs {
            consumed_by.insert(*v, side);
        }
    }

    let bypass_wires: Vec<VertexId> = host
        .vertices()
        .into_iter()
        .filter(|v| {
            produced_by.get(v) == Some(&Side::Left)
                && consumed_by.get(v) == Some(&Side::Right)
                && !vi.contains(v)
                && !vj.contains(v)
        })
        .collect();

    fn raw_ids(vs: &[VertexId]) -> Vec<u32> {
        vs.iter().map(|v| v.raw()).collect()
    }
    let pick = |ids: &BTreeSet<EdgeId>| {
        host.edges()
            .filter(|(id, _)| ids.contains(id))
            .map(|(id, e)| (id.raw(), e.label.clone(), raw_ids(&e.inputs), raw_ids(&e.outputs)))
            .collect::<Vec<_>>()
    };

    let mut left_outputs: Vec<u32> = raw_ids(&bypass_wires);
    left_outputs.extend(mat.image_inputs.iter().map(|v| v.raw()));
    let left = InterfacedGraph::from_parts(
        pick(&left_edges),
        host.extra_vertices().iter().map(|v| v.raw()).collect(),
        raw_ids(host.inputs()),
        left_outputs,
    );

    let image = InterfacedGraph::from_parts(
        pick(&image_edges),
        Vec::new(),
        mat.image_inputs.iter().map(|v| v.raw()).collect(),
        mat.image_outputs.iter().map(|v| v.raw()).collect(),
    );

    let mut right_inputs: Vec<u32> = raw_ids(&bypass_wires);
    right_inputs.extend(mat.image_outputs.iter().map(|v| v.raw()));
    let right = InterfacedGraph::from_parts(
        pick(&right_edges),
        Vec::new(),
        right_inputs,
        raw_ids(host.outputs()),
    );

    Decomposition {
        left,
        bypass: bypass_wires.len(),
        image,
        right,
        image_inputs: mat.image_inputs.clone(),
        image_outputs: mat.image_outputs.clone(),
        bypass_wires,
    }
}

/// Split the host around a match and certify the split; `None` marks the
/// occurrence unusable.
pub fn decompose<L: Label>(
    host: &InterfacedGraph<L>,
    mat: &Match,
) -> Option<(Decomposition<L>, Isomorphism)> {
    let decomposition = decompose_raw(host, mat);
    let certificate = decomposition.certify(host)?;
    Some((decomposition, certificate))
}

/// Substitute `replacement` for the image of a decomposition.
///
/// The decomposition is (re)certified here, so a corrupted split can
/// never produce a result.
pub fn apply_decomposition<L: Label>(
    host: &InterfacedGraph<L>,
    decomposition: &Decomposition<L>,
    replacement: &InterfacedGraph<L>,
) -> Option<(InterfacedGraph<L>, Isomorphism)> {
    let host_iso = decomposition.certify(host)?;
    let middle = id_graph(decomposition.bypass).stack(replacement);
    let result = decomposition.left.compose(&middle.compose(&decomposition.right).ok()?).ok()?;
    Some((result, host_iso))
}

/// Everything a caller needs to audit one rewrite.
#[derive(Clone, Debug)]
pub struct RewriteCertificate<L> {
    pub decomposition: Decomposition<L>,
    /// host ≅ left ; (id ⊗ image) ; right
    pub host_iso: Isomorphism,
    /// rule side ≅ image
    pub pattern_iso: Isomorphism,
}

#[derive(Clone, Debug)]
pub struct RewriteOutcome<L> {
    pub result: InterfacedGraph<L>,
    pub certificate: RewriteCertificate<L>,
}

/// Rewrite the `occurrence`-th convex match (1-based) of the chosen rule
/// side inside the host.
///
/// `None` covers every way the rewrite can be unavailable: a host outside
/// the acyclic monogamous class, cups or caps in the rule, too few
/// occurrences, or a decomposition that fails certification. On a
/// certification failure the rewrite does not silently try the next
/// occurrence.
pub fn rewrite_once<L: Label>(
    host: &InterfacedGraph<L>,
    rule: &Rule<L>,
    direction: Direction,
    occurrence: usize,
) -> Option<RewriteOutcome<L>> {
    if !host.is_monogamous() || !host.is_acyclic() {
        return None;
    }
    let (pattern_term, replacement_term) = match direction {
        Direction::Forward => (&rule.lhs, &rule.rhs),
        Direction::Reverse => (&rule.rhs, &rule.lhs),
    };
    if !pattern_term.is_cup_cap_free() || !replacement_term.is_cup_cap_free() {
        return None;
    }
    let pattern = term_to_graph(pattern_term);
    let replacement = term_to_graph(replacement_term);

    let matches = find_matches(&pattern, host);
    let mat = matches.get(occurrence.checked_sub(1)?)?;

    let decomposition = decompose_raw(host, mat);
    // the match, read as a bijection onto the image, must verify as an
    // isomorphism from the rule side onto the matched part
    let pattern_iso =
        Isomorphism { vertex_map: mat.vertex_map.clone(), edge_map: mat.edge_map.clone() };
    if !pattern_iso.verify(&pattern, &decomposition.image) {
        return None;
    }
    let (result, host_iso) = apply_decomposition(host, &decomposition, &replacement)?;
    debug_assert!(result.is_monogamous() && result.is_acyclic());
    Some(RewriteOutcome {
        result,
        certificate: RewriteCertificate { decomposition, host_iso, pattern_iso },
    })
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("terms have different shapes: {lhs_in} -> {lhs_out} vs {rhs_in} -> {rhs_out}")]
pub struct ShapeMismatch {
    pub lhs_in: usize,
    pub lhs_out: usize,
    pub rhs_in: usize,
    pub rhs_out: usize,
}

/// Decide whether two terms denote the same diagram, by hypergraph
/// isomorphism of their graphs.
pub fn terms_iso<L: Label>(
    lhs: &Term<L>,
    rhs: &Term<L>,
) -> Result<Option<Isomorphism>, ShapeMismatch> {
    if lhs.dom() != rhs.dom() || lhs.cod() != rhs.cod() {
        return Err(ShapeMismatch {
            lhs_in: lhs.dom(),
            lhs_out: lhs.cod(),
            rhs_in: rhs.dom(),
            rhs_out: rhs.cod(),
        });
    }
    Ok(find_isomorphism(&term_to_graph(lhs), &term_to_graph(rhs)))
}

/// Remove extraneous identities: composition with identities, stacking
/// with the empty diagram, and braid layers that cancel. The result's
/// graph is isomorphic to the input's and the term never grows.
pub fn clean<L: Label>(term: &Term<L>) -> Term<L> {
    match term {
        Term::Compose(a, b) => {
            let a = clean(a);
            let b = clean(b);
            if matches!(a, Term::Id(_)) {
                return b;
            }
            if matches!(b, Term::Id(_)) {
                return a;
            }
            if let (Some(pa), Some(pb)) = (permutation_of(&a), permutation_of(&b)) {
                let merged = compose_permutations(&pa, &pb);
                let candidate = permutation_term::<L>(&merged);
                if candidate.node_count() <= 1 + a.node_count() + b.node_count() {
                    return candidate;
                }
            }
            a.then(b)
        }
        Term::Stack(a, b) => {
            let a = clean(a);
            let b = clean(b);
            match (a, b) {
                (Term::Id(0), b) => b,
                (a, Term::Id(0)) => a,
                (Term::Id(n), Term::Id(m)) => Term::Id(n + m),
                (a, b) => a.beside(b),
            }
        }
        other => other.clone(),
    }
}

/// The permutation computed by a term of identities and braids, if it is
/// one: output position `k` carries input `p(k)`.
fn permutation_of<L: Label>(term: &Term<L>) -> Option<Permutation> {
    match term {
        Term::Id(n) => Some(Permutation::identity(*n)),
        Term::Swap(n, m) => {
            let mut images: Vec<usize> = (n + 1..=n + m).collect();
            images.extend(1..=*n);
            Some(Permutation::try_new(images).expect("a braid is a bijection"))
        }
        Term::Compose(a, b) => Some(compose_permutations(&permutation_of(a)?, &permutation_of(b)?)),
        Term::Stack(a, b) => {
            let pa = permutation_of(a)?;
            let pb = permutation_of(b)?;
            let n = pa.len();
            let mut images = pa.images().to_vec();
            images.extend(pb.images().iter().map(|i| i + n));
            Some(Permutation::try_new(images).expect("block sum of bijections"))
        }
        _ => None,
    }
}

/// `a` then `b`: position `k` of the result carries input `a(b(k))`.
fn compose_permutations(a: &Permutation, b: &Permutation) -> Permutation {
    let images: Vec<usize> = b.images().iter().map(|&k| a.images()[k - 1]).collect();
    Permutation::try_new(images).expect("composition of bijections")
}
