//! Labeled directed hypergraphs with ordered input/output interfaces.
//!
//! Edges are primary: each edge carries a label and ordered lists of input
//! and output vertices. The vertex set is computed (edge-incident vertices,
//! interface vertices, plus explicitly recorded extra vertices), so graphs
//! carry no well-formedness proofs. Composition glues the left graph's
//! outputs to the right graph's inputs; stacking is disjoint union with
//! concatenated interfaces. Both mirror contraction and product of the
//! tensor semantics, and isomorphism of graphs implies equivalence of
//! their semantics.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Semiring;
use crate::tensor::{DimensionlessTensor, IndexSet, Tensor};

/// Vertex identifier; positive.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct VertexId(u32);

/// Edge identifier; positive, a separate namespace from vertices.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct EdgeId(u32);

impl VertexId {
    pub fn new(raw: u32) -> Self {
        assert!(raw >= 1, "vertex ids are positive");
        VertexId(raw)
    }

    pub fn raw(self) -> u32 {
        self.0
    }
}

impl EdgeId {
    pub fn new(raw: u32) -> Self {
        assert!(raw >= 1, "edge ids are positive");
        EdgeId(raw)
    }

    pub fn raw(self) -> u32 {
        self.0
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

/// Edge labels: opaque generator names with a theory-supplied equivalence.
///
/// Exact equality is right for finite generator sets; labels carrying real
/// parameters (ZX phases) override [`Label::equiv`] with a toleranced test.
pub trait Label: Clone + fmt::Debug + fmt::Display + Send + Sync + 'static {
    fn equiv(&self, other: &Self) -> bool;
}

impl Label for String {
    fn equiv(&self, other: &Self) -> bool {
        self == other
    }
}

impl Label for &'static str {
    fn equiv(&self, other: &Self) -> bool {
        self == other
    }
}

/// A labeled directed hyperedge. Vertex repetition is allowed on either
/// side.
#[derive(Clone, PartialEq, Debug)]
pub struct Edge<L> {
    pub label: L,
    pub inputs: Vec<VertexId>,
    pub outputs: Vec<VertexId>,
}

impl<L> Edge<L> {
    pub fn new(label: L, inputs: Vec<VertexId>, outputs: Vec<VertexId>) -> Self {
        Edge { label, inputs, outputs }
    }

    fn incident(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.inputs.iter().chain(&self.outputs).copied()
    }
}

/// A bare hypergraph: a finite edge map plus extra (possibly isolated)
/// vertices not referenced by any edge.
#[derive(Clone, PartialEq, Debug, Default)]
pub struct Hypergraph<L> {
    edges: BTreeMap<EdgeId, Edge<L>>,
    extra_vertices: BTreeSet<VertexId>,
}

impl<L: Label> Hypergraph<L> {
    pub fn new(edges: BTreeMap<EdgeId, Edge<L>>, extra_vertices: BTreeSet<VertexId>) -> Self {
        Hypergraph { edges, extra_vertices }
    }

    pub fn empty() -> Self {
        Hypergraph { edges: BTreeMap::new(), extra_vertices: BTreeSet::new() }
    }
}

/// A hypergraph together with ordered input and output vertex vectors.
#[derive(Clone, PartialEq, Debug)]
pub struct InterfacedGraph<L> {
    graph: Hypergraph<L>,
    inputs: Vec<VertexId>,
    outputs: Vec<VertexId>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error(
        "composition arity mismatch: left has {left_out} outputs, right has {right_in} inputs"
    )]
    CompositionArity { left_out: usize, right_in: usize },
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SemanticsError {
    #[error("no interpretation for generator label `{0}`")]
    UnknownLabel(String),
}

impl<L: Label> InterfacedGraph<L> {
    pub fn new(graph: Hypergraph<L>, inputs: Vec<VertexId>, outputs: Vec<VertexId>) -> Self {
        InterfacedGraph { graph, inputs, outputs }
    }

    /// Convenience constructor from raw ids, mostly for tests and builders.
    pub fn from_parts(
        edges: Vec<(u32, L, Vec<u32>, Vec<u32>)>,
        extra: Vec<u32>,
        inputs: Vec<u32>,
        outputs: Vec<u32>,
    ) -> Self {
        let edges = edges
            .into_iter()
            .map(|(id, label, ins, outs)| {
                (
                    EdgeId::new(id),
                    Edge::new(
                        label,
                        ins.into_iter().map(VertexId::new).collect(),
                        outs.into_iter().map(VertexId::new).collect(),
                    ),
                )
            })
            .collect();
        InterfacedGraph {
            graph: Hypergraph::new(edges, extra.into_iter().map(VertexId::new).collect()),
            inputs: inputs.into_iter().map(VertexId::new).collect(),
            outputs: outputs.into_iter().map(VertexId::new).collect(),
        }
    }

    pub fn inputs(&self) -> &[VertexId] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[VertexId] {
        &self.outputs
    }

    pub fn n_in(&self) -> usize {
        self.inputs.len()
    }

    pub fn n_out(&self) -> usize {
        self.outputs.len()
    }

    pub fn edges(&self) -> impl Iterator<Item = (EdgeId, &Edge<L>)> {
        self.graph.edges.iter().map(|(id, e)| (*id, e))
    }

    pub fn edge(&self, id: EdgeId) -> Option<&Edge<L>> {
        self.graph.edges.get(&id)
    }

    pub fn edge_count(&self) -> usize {
        self.graph.edges.len()
    }

    pub fn extra_vertices(&self) -> &BTreeSet<VertexId> {
        &self.graph.extra_vertices
    }

    /// The computed vertex set: interface vertices, edge-incident vertices,
    /// and extra vertices.
    pub fn vertices(&self) -> BTreeSet<VertexId> {
        let mut set: BTreeSet<VertexId> = self.graph.extra_vertices.clone();
        set.extend(self.inputs.iter().copied());
        set.extend(self.outputs.iter().copied());
        for edge in self.graph.edges.values() {
            set.extend(edge.incident());
        }
        set
    }

    fn max_vertex(&self) -> u32 {
        self.vertices().iter().map(|v| v.0).max().unwrap_or(0)
    }

    fn max_edge(&self) -> u32 {
        self.graph.edges.keys().map(|e| e.0).max().unwrap_or(0)
    }

    /// Rename vertices and edges away from `reserved`, keeping identifiers
    /// that are already free. Returns the renamed graph and the renaming.
    pub fn freshen(&self, reserved: &Reserved) -> (InterfacedGraph<L>, Renaming) {
        let mut next_vertex =
            self.max_vertex().max(reserved.vertices.iter().map(|v| v.0).max().unwrap_or(0)) + 1;
        let mut next_edge =
            self.max_edge().max(reserved.edges.iter().map(|e| e.0).max().unwrap_or(0)) + 1;

        let mut vertex_map = BTreeMap::new();
        for v in self.vertices() {
            if reserved.vertices.contains(&v) {
                vertex_map.insert(v, VertexId(next_vertex));
                next_vertex += 1;
            } else {
                vertex_map.insert(v, v);
            }
        }
        let mut edge_map = BTreeMap::new();
        for id in self.graph.edges.keys() {
            if reserved.edges.contains(id) {
                edge_map.insert(*id, EdgeId(next_edge));
                next_edge += 1;
            } else {
                edge_map.insert(*id, *id);
            }
        }

        let renaming = Renaming { vertices: vertex_map, edges: edge_map };
        (self.rename(&renaming), renaming)
    }

    /// Apply a renaming; identifiers missing from the maps are kept.
    pub fn renamed(&self, renaming: &Renaming) -> InterfacedGraph<L> {
        self.rename(renaming)
    }

    fn rename(&self, renaming: &Renaming) -> InterfacedGraph<L> {
        let mv = |v: &VertexId| renaming.vertices.get(v).copied().unwrap_or(*v);
        let edges = self
            .graph
            .edges
            .iter()
            .map(|(id, e)| {
                (
                    renaming.edges.get(id).copied().unwrap_or(*id),
                    Edge::new(
                        e.label.clone(),
                        e.inputs.iter().map(mv).collect(),
                        e.outputs.iter().map(mv).collect(),
                    ),
                )
            })
            .collect();
        InterfacedGraph {
            graph: Hypergraph::new(edges, self.graph.extra_vertices.iter().map(mv).collect()),
            inputs: self.inputs.iter().map(mv).collect(),
            outputs: self.outputs.iter().map(mv).collect(),
        }
    }

    /// Sequential composition: freshen `other`, then glue its inputs onto
    /// our outputs pointwise. Gluing may identify vertices transitively
    /// (repeated interface vertices), so it runs through a union-find.
    pub fn compose(&self, other: &Self) -> Result<Self, GraphError> {
        if self.n_out() != other.n_in() {
            return Err(GraphError::CompositionArity {
                left_out: self.n_out(),
                right_in: other.n_in(),
            });
        }
        let (right, _) = other.freshen(&Reserved::of_graph(self));

        let mut verts: Vec<VertexId> = self.vertices().into_iter().collect();
        verts.extend(right.vertices());
        verts.sort_unstable();
        verts.dedup();
        let index: BTreeMap<VertexId, usize> =
            verts.iter().enumerate().map(|(i, v)| (*v, i)).collect();
        let mut uf = UnionFind::new(verts.len());
        for (a, b) in self.outputs.iter().zip(right.inputs.iter()) {
            uf.union(index[a], index[b]);
        }
        // the representative of a class is its minimal vertex id
        let mut repr: Vec<VertexId> = verts.clone();
        for (i, v) in verts.iter().enumerate() {
            let root = uf.find(i);
            if *v < repr[root] {
                repr[root] = *v;
            }
        }
        let resolved: BTreeMap<VertexId, VertexId> =
            verts.iter().enumerate().map(|(i, v)| (*v, repr[uf.find(i)])).collect();
        let map = |v: &VertexId| resolved[v];

        let mut edges = BTreeMap::new();
        for (id, e) in self.edges().chain(right.edges()) {
            edges.insert(
                id,
                Edge::new(
                    e.label.clone(),
                    e.inputs.iter().map(map).collect(),
                    e.outputs.iter().map(map).collect(),
                ),
            );
        }
        let mut extra: BTreeSet<VertexId> =
            self.graph.extra_vertices.iter().chain(&right.graph.extra_vertices).map(map).collect();

        let inputs: Vec<VertexId> = self.inputs.iter().map(map).collect();
        let outputs: Vec<VertexId> = right.outputs.iter().map(map).collect();

        // keep glued wires that would otherwise fall out of the computed
        // vertex set (a closed loop still contributes a summation index)
        let mut result =
            InterfacedGraph { graph: Hypergraph::new(edges, extra.clone()), inputs, outputs };
        let present = result.vertices();
        for v in &verts {
            let r = map(v);
            if !present.contains(&r) {
                extra.insert(r);
            }
        }
        result.graph.extra_vertices = extra;
        Ok(result)
    }

    /// Parallel composition: disjoint union with concatenated interfaces.
    pub fn stack(&self, other: &Self) -> Self {
        let (right, _) = other.freshen(&Reserved::of_graph(self));
        let mut edges = self.graph.edges.clone();
        edges.extend(right.graph.edges);
        let mut extra = self.graph.extra_vertices.clone();
        extra.extend(right.graph.extra_vertices);
        let mut inputs = self.inputs.clone();
        inputs.extend(right.inputs);
        let mut outputs = self.outputs.clone();
        outputs.extend(right.outputs);
        InterfacedGraph { graph: Hypergraph::new(edges, extra), inputs, outputs }
    }

    /// True iff every vertex has exactly one producer (an edge output slot
    /// or an input-interface occurrence) and exactly one consumer (an edge
    /// input slot or an output-interface occurrence), with multiplicity.
    pub fn is_monogamous(&self) -> bool {
        let mut produced: BTreeMap<VertexId, usize> = BTreeMap::new();
        let mut consumed: BTreeMap<VertexId, usize> = BTreeMap::new();
        for v in &self.inputs {
            *produced.entry(*v).or_default() += 1;
        }
        for v in &self.outputs {
            *consumed.entry(*v).or_default() += 1;
        }
        for e in self.graph.edges.values() {
            for v in &e.inputs {
                *consumed.entry(*v).or_default() += 1;
            }
            for v in &e.outputs {
                *produced.entry(*v).or_default() += 1;
            }
        }
        self.vertices().iter().all(|v| {
            produced.get(v).copied().unwrap_or(0) == 1 && consumed.get(v).copied().unwrap_or(0) == 1
        })
    }

    /// Edge adjacency: `e -> f` iff some output vertex of `e` is an input
    /// vertex of `f`.
    pub fn edge_successors(&self) -> BTreeMap<EdgeId, BTreeSet<EdgeId>> {
        let mut consumers: BTreeMap<VertexId, BTreeSet<EdgeId>> = BTreeMap::new();
        for (id, e) in self.edges() {
            for v in &e.inputs {
                consumers.entry(*v).or_default().insert(id);
            }
        }
        let mut succ: BTreeMap<EdgeId, BTreeSet<EdgeId>> = BTreeMap::new();
        for (id, e) in self.edges() {
            let entry = succ.entry(id).or_default();
            for v in &e.outputs {
                if let Some(cons) = consumers.get(v) {
                    entry.extend(cons.iter().copied());
                }
            }
        }
        succ
    }

    /// True iff the producer-to-consumer reachability relation between
    /// edges has no cycle.
    pub fn is_acyclic(&self) -> bool {
        let succ = self.edge_successors();
        // iterative three-color DFS
        #[derive(Clone, Copy, PartialEq)]
        enum Color {
            White,
            Gray,
            Black,
        }
        let mut color: BTreeMap<EdgeId, Color> =
            succ.keys().map(|id| (*id, Color::White)).collect();
        for &start in succ.keys() {
            if color[&start] != Color::White {
                continue;
            }
            let mut stack: Vec<(EdgeId, Vec<EdgeId>)> =
                vec![(start, succ[&start].iter().copied().collect())];
            color.insert(start, Color::Gray);
            while let Some((node, pending)) = stack.last_mut() {
                if let Some(next) = pending.pop() {
                    match color[&next] {
                        Color::Gray => return false,
                        Color::White => {
                            color.insert(next, Color::Gray);
                            let kids = succ[&next].iter().copied().collect();
                            stack.push((next, kids));
                        }
                        Color::Black => {}
                    }
                } else {
                    color.insert(*node, Color::Black);
                    stack.pop();
                }
            }
        }
        true
    }

    /// A copy of this graph with one edge removed; interfaces untouched.
    pub fn without_edge(&self, id: EdgeId) -> Self {
        let mut copy = self.clone();
        copy.graph.edges.remove(&id);
        copy
    }

    /// Serializable dump with labels rendered via `Display`.
    pub fn dump(&self) -> GraphDump {
        GraphDump {
            edges: self
                .edges()
                .map(|(id, e)| {
                    (
                        id.raw().to_string(),
                        EdgeDump {
                            label: e.label.to_string(),
                            inputs: e.inputs.iter().map(|v| v.raw()).collect(),
                            outputs: e.outputs.iter().map(|v| v.raw()).collect(),
                        },
                    )
                })
                .collect(),
            extra_vertices: self.graph.extra_vertices.iter().map(|v| v.raw()).collect(),
            inputs: self.inputs.iter().map(|v| v.raw()).collect(),
            outputs: self.outputs.iter().map(|v| v.raw()).collect(),
        }
    }

    /// GraphViz rendering: vertices as points, hyperedges as record nodes
    /// with one port per input/output slot, interfaces as plain boxes.
    pub fn to_dot(&self) -> String {
        use std::fmt::Write;
        let mut out = String::new();
        let _ = writeln!(out, "digraph diagram {{");
        let _ = writeln!(out, "  rankdir=LR;");
        for v in self.vertices() {
            let _ = writeln!(out, "  {v} [shape=point, xlabel=\"{v}\"];");
        }
        for (id, e) in self.edges() {
            let ins: Vec<String> = (0..e.inputs.len()).map(|k| format!("<i{k}>")).collect();
            let outs: Vec<String> = (0..e.outputs.len()).map(|k| format!("<o{k}>")).collect();
            let _ = writeln!(
                out,
                "  {id} [shape=record, label=\"{{{{{}}}|{}|{{{}}}}}\"];",
                ins.join("|"),
                e.label,
                outs.join("|")
            );
            for (k, v) in e.inputs.iter().enumerate() {
                let _ = writeln!(out, "  {v} -> {id}:i{k};");
            }
            for (k, v) in e.outputs.iter().enumerate() {
                let _ = writeln!(out, "  {id}:o{k} -> {v};");
            }
        }
        for (k, v) in self.inputs.iter().enumerate() {
            let _ = writeln!(out, "  in{k} [shape=box, label=\"in {k}\"];");
            let _ = writeln!(out, "  in{k} -> {v};");
        }
        for (k, v) in self.outputs.iter().enumerate() {
            let _ = writeln!(out, "  out{k} [shape=box, label=\"out {k}\"];");
            let _ = writeln!(out, "  {v} -> out{k};");
        }
        let _ = writeln!(out, "}}");
        out
    }
}

/// Identifiers a freshening must avoid.
#[derive(Clone, Default, Debug)]
pub struct Reserved {
    pub vertices: BTreeSet<VertexId>,
    pub edges: BTreeSet<EdgeId>,
}

impl Reserved {
    pub fn empty() -> Self {
        Reserved::default()
    }

    pub fn of_graph<L: Label>(g: &InterfacedGraph<L>) -> Self {
        let mut r = Reserved::empty();
        r.absorb(g);
        r
    }

    pub fn absorb<L: Label>(&mut self, g: &InterfacedGraph<L>) {
        self.vertices.extend(g.vertices());
        self.edges.extend(g.graph.edges.keys().copied());
    }
}

/// An injective renaming of vertices and edges.
#[derive(Clone, Debug, Default)]
pub struct Renaming {
    pub vertices: BTreeMap<VertexId, VertexId>,
    pub edges: BTreeMap<EdgeId, EdgeId>,
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // deterministic: smaller index wins as root
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
pub struct GraphDump {
    pub edges: BTreeMap<String, EdgeDump>,
    pub extra_vertices: Vec<u32>,
    pub inputs: Vec<u32>,
    pub outputs: Vec<u32>,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
pub struct EdgeDump {
    pub label: String,
    pub inputs: Vec<u32>,
    pub outputs: Vec<u32>,
}

// ---------------------------------------------------------------------------
// structural graphs

/// `n` through-wires: interface vertices only, no edges.
pub fn id_graph<L: Label>(n: usize) -> InterfacedGraph<L> {
    let vs: Vec<VertexId> = (1..=n as u32).map(VertexId::new).collect();
    InterfacedGraph::new(Hypergraph::empty(), vs.clone(), vs)
}

/// The braid: inputs `v1..v(n+m)`, outputs start at `v(n+1)`.
pub fn swap_graph<L: Label>(n: usize, m: usize) -> InterfacedGraph<L> {
    let vs: Vec<VertexId> = (1..=(n + m) as u32).map(VertexId::new).collect();
    let mut outputs: Vec<VertexId> = vs[n..].to_vec();
    outputs.extend_from_slice(&vs[..n]);
    InterfacedGraph::new(Hypergraph::empty(), vs, outputs)
}

/// `n` vertices, no inputs, each vertex exiting twice: `(v1..vn, v1..vn)`.
pub fn cup_graph<L: Label>(n: usize) -> InterfacedGraph<L> {
    let vs: Vec<VertexId> = (1..=n as u32).map(VertexId::new).collect();
    let mut outputs = vs.clone();
    outputs.extend_from_slice(&vs);
    InterfacedGraph::new(Hypergraph::empty(), Vec::new(), outputs)
}

/// Dual of [`cup_graph`]: each vertex entering twice, no outputs.
pub fn cap_graph<L: Label>(n: usize) -> InterfacedGraph<L> {
    let vs: Vec<VertexId> = (1..=n as u32).map(VertexId::new).collect();
    let mut inputs = vs.clone();
    inputs.extend_from_slice(&vs);
    InterfacedGraph::new(Hypergraph::empty(), inputs, Vec::new())
}

/// One edge with fresh input and output vertices, interfaces matching.
pub fn generator_graph<L: Label>(label: L, n: usize, m: usize) -> InterfacedGraph<L> {
    let ins: Vec<VertexId> = (1..=n as u32).map(VertexId::new).collect();
    let outs: Vec<VertexId> = (n as u32 + 1..=(n + m) as u32).map(VertexId::new).collect();
    let mut edges = BTreeMap::new();
    edges.insert(EdgeId::new(1), Edge::new(label, ins.clone(), outs.clone()));
    InterfacedGraph::new(Hypergraph::new(edges, BTreeSet::new()), ins, outs)
}

// ---------------------------------------------------------------------------
// tensor semantics

type LabelLookup<L, S> = std::sync::Arc<dyn Fn(&L) -> Option<DimensionlessTensor<S>> + Send + Sync>;

/// Assigns a tensor family to every generator label.
#[derive(Clone)]
pub struct Interpretation<L, S> {
    index: IndexSet,
    lookup: LabelLookup<L, S>,
}

impl<L: Label, S: Semiring> Interpretation<L, S> {
    pub fn new(
        index: IndexSet,
        lookup: impl Fn(&L) -> Option<DimensionlessTensor<S>> + Send + Sync + 'static,
    ) -> Self {
        Interpretation { index, lookup: std::sync::Arc::new(lookup) }
    }

    pub fn index_set(&self) -> &IndexSet {
        &self.index
    }

    pub fn family(&self, label: &L) -> Option<DimensionlessTensor<S>> {
        (self.lookup)(label)
    }

    pub fn tensor_for(
        &self,
        label: &L,
        n_in: usize,
        n_out: usize,
    ) -> Result<Tensor<S>, SemanticsError> {
        match (self.lookup)(label) {
            Some(family) => Ok(family.at(n_in, n_out)),
            None => Err(SemanticsError::UnknownLabel(label.to_string())),
        }
    }
}

impl<S: Semiring> Interpretation<String, S> {
    /// Interpretation backed by a name-keyed map.
    pub fn from_named_map(index: IndexSet, map: BTreeMap<String, DimensionlessTensor<S>>) -> Self {
        Interpretation::new(index, move |label: &String| map.get(label).cloned())
    }
}

/// The tensor of a hypergraph with interfaces: sum over assignments of
/// index values to vertices, of interface deltas times edge-tensor entries.
///
/// Interface vertices are forced by the requested entry, so the sum runs
/// only over the remaining free vertices.
pub fn graph_semantics<L: Label, S: Semiring>(
    g: &InterfacedGraph<L>,
    interp: &Interpretation<L, S>,
) -> Result<Tensor<S>, SemanticsError> {
    let index = interp.index_set().clone();
    let verts: Vec<VertexId> = g.vertices().into_iter().collect();
    let slot: BTreeMap<VertexId, usize> = verts.iter().enumerate().map(|(i, v)| (*v, i)).collect();

    struct EdgeEval<S> {
        tensor: Tensor<S>,
        in_slots: Vec<usize>,
        out_slots: Vec<usize>,
    }
    let mut edges: Vec<EdgeEval<S>> = Vec::with_capacity(g.edge_count());
    for (_, e) in g.edges() {
        edges.push(EdgeEval {
            tensor: interp.tensor_for(&e.label, e.inputs.len(), e.outputs.len())?,
            in_slots: e.inputs.iter().map(|v| slot[v]).collect(),
            out_slots: e.outputs.iter().map(|v| slot[v]).collect(),
        });
    }

    let input_slots: Vec<usize> = g.inputs().iter().map(|v| slot[v]).collect();
    let output_slots: Vec<usize> = g.outputs().iter().map(|v| slot[v]).collect();
    let interface: BTreeSet<usize> = input_slots.iter().chain(&output_slots).copied().collect();
    let free: Vec<usize> = (0..verts.len()).filter(|s| !interface.contains(s)).collect();

    let d = index.size();
    let values = index.values().to_vec();
    let mut assignment: Vec<u64> = vec![values[0]; verts.len()];
    let mut in_buf: Vec<u64> = Vec::new();
    let mut out_buf: Vec<u64> = Vec::new();

    let result = Tensor::from_fn(g.n_in(), g.n_out(), &index, |i, o| {
        // force the interface; a repeated interface vertex with two
        // different requested values kills the whole entry
        let mut forced: Vec<Option<u64>> = vec![None; verts.len()];
        for (k, s) in input_slots.iter().enumerate() {
            match forced[*s] {
                Some(v) if v != i[k] => return S::zero(),
                _ => forced[*s] = Some(i[k]),
            }
        }
        for (k, s) in output_slots.iter().enumerate() {
            match forced[*s] {
                Some(v) if v != o[k] => return S::zero(),
                _ => forced[*s] = Some(o[k]),
            }
        }
        for (s, f) in forced.iter().enumerate() {
            if let Some(v) = f {
                assignment[s] = *v;
            }
        }

        let mut acc = S::zero();
        let mut counters = vec![0usize; free.len()];
        for &s in &free {
            assignment[s] = values[0];
        }
        loop {
            let mut term = S::one();
            for e in &edges {
                in_buf.clear();
                in_buf.extend(e.in_slots.iter().map(|s| assignment[*s]));
                out_buf.clear();
                out_buf.extend(e.out_slots.iter().map(|s| assignment[*s]));
                term = term * *e.tensor.entry(&in_buf, &out_buf);
                if term.is_zero() {
                    break;
                }
            }
            acc = acc + term;

            // odometer over the free vertices
            let mut k = free.len();
            loop {
                if k == 0 {
                    return acc;
                }
                k -= 1;
                counters[k] += 1;
                if counters[k] < d {
                    assignment[free[k]] = values[counters[k]];
                    break;
                }
                counters[k] = 0;
                assignment[free[k]] = values[0];
            }
        }
    });
    Ok(result)
}

// ---------------------------------------------------------------------------
// isomorphism

/// A pair of injective maps witnessing an isomorphism of interfaced graphs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Isomorphism {
    pub vertex_map: BTreeMap<VertexId, VertexId>,
    pub edge_map: BTreeMap<EdgeId, EdgeId>,
}

impl Isomorphism {
    /// Check the three isomorphism conditions: interface image, edge
    /// correspondence with equivalent labels, and vertex-set image.
    pub fn verify<L: Label>(&self, g: &InterfacedGraph<L>, h: &InterfacedGraph<L>) -> bool {
        let mv = |v: &VertexId| self.vertex_map.get(v).copied();

        // (a) interfaces map pointwise
        if g.n_in() != h.n_in() || g.n_out() != h.n_out() {
            return false;
        }
        for (gv, hv) in g.inputs().iter().zip(h.inputs()) {
            if mv(gv) != Some(*hv) {
                return false;
            }
        }
        for (gv, hv) in g.outputs().iter().zip(h.outputs()) {
            if mv(gv) != Some(*hv) {
                return false;
            }
        }

        // (b) edge bijection with equivalent labels and mapped sequences
        if g.edge_count() != h.edge_count() || self.edge_map.len() != g.edge_count() {
            return false;
        }
        let mut seen_h_edges = BTreeSet::new();
        for (ge_id, he_id) in &self.edge_map {
            let (Some(ge), Some(he)) = (g.edge(*ge_id), h.edge(*he_id)) else {
                return false;
            };
            if !seen_h_edges.insert(*he_id) || !ge.label.equiv(&he.label) {
                return false;
            }
            if ge.inputs.len() != he.inputs.len() || ge.outputs.len() != he.outputs.len() {
                return false;
            }
            for (gv, hv) in ge.inputs.iter().zip(&he.inputs) {
                if mv(gv) != Some(*hv) {
                    return false;
                }
            }
            for (gv, hv) in ge.outputs.iter().zip(&he.outputs) {
                if mv(gv) != Some(*hv) {
                    return false;
                }
            }
        }

        // (c) the vertex map is an injection of vertices(g) onto vertices(h)
        let gv = g.vertices();
        let hv = h.vertices();
        if self.vertex_map.len() != gv.len() || gv.len() != hv.len() {
            return false;
        }
        let mut image = BTreeSet::new();
        for (from, to) in &self.vertex_map {
            if !gv.contains(from) || !hv.contains(to) || !image.insert(*to) {
                return false;
            }
        }
        true
    }

    /// The inverse witness.
    pub fn invert(&self) -> Isomorphism {
        Isomorphism {
            vertex_map: self.vertex_map.iter().map(|(a, b)| (*b, *a)).collect(),
            edge_map: self.edge_map.iter().map(|(a, b)| (*b, *a)).collect(),
        }
    }

    /// Composition of witnesses: first `self`, then `other`.
    pub fn compose(&self, other: &Isomorphism) -> Isomorphism {
        Isomorphism {
            vertex_map: self
                .vertex_map
                .iter()
                .filter_map(|(a, b)| other.vertex_map.get(b).map(|c| (*a, *c)))
                .collect(),
            edge_map: self
                .edge_map
                .iter()
                .filter_map(|(a, b)| other.edge_map.get(b).map(|c| (*a, *c)))
                .collect(),
        }
    }
}

/// Decide isomorphism of two interfaced graphs.
///
/// The search seeds the vertex map with the forced interface
/// correspondence, matches edges by backtracking over (label, arity)
/// compatible candidates, and pairs leftover isolated vertices by
/// ascending id. Any witness returned has been verified; `None` means no
/// witness exists.
pub fn find_isomorphism<L: Label>(
    g: &InterfacedGraph<L>,
    h: &InterfacedGraph<L>,
) -> Option<Isomorphism> {
    if g.edge_count() != h.edge_count()
        || g.n_in() != h.n_in()
        || g.n_out() != h.n_out()
        || g.vertices().len() != h.vertices().len()
    {
        return None;
    }

    let mut state = MatchState::new(g, h);
    // condition (a) forces the interface correspondence up front
    for (gv, hv) in g.inputs().iter().zip(h.inputs()) {
        if !state.assign(*gv, *hv) {
            return None;
        }
    }
    for (gv, hv) in g.outputs().iter().zip(h.outputs()) {
        if !state.assign(*gv, *hv) {
            return None;
        }
    }

    let mut found = None;
    state.search_edges(&mut |state| {
        // leftover isolated vertices pair off by ascending id
        let g_rest: Vec<VertexId> = state
            .g_vertices
            .iter()
            .filter(|v| !state.vertex_map.contains_key(v))
            .copied()
            .collect();
        let h_rest: Vec<VertexId> = state
            .h_vertices
            .iter()
            .filter(|v| !state.used_h_vertices.contains(v))
            .copied()
            .collect();
        if g_rest.len() != h_rest.len() {
            return false;
        }
        let mut witness =
            Isomorphism { vertex_map: state.vertex_map.clone(), edge_map: state.edge_map.clone() };
        witness.vertex_map.extend(g_rest.iter().copied().zip(h_rest.iter().copied()));
        if witness.verify(state.g, state.h) {
            found = Some(witness);
            true
        } else {
            false
        }
    });
    found
}

/// Shared backtracking state for isomorphism and (in the rewrite module)
/// non-surjective embedding search.
pub(crate) struct MatchState<'a, L: Label> {
    pub g: &'a InterfacedGraph<L>,
    pub h: &'a InterfacedGraph<L>,
    pub g_vertices: Vec<VertexId>,
    pub h_vertices: Vec<VertexId>,
    pub vertex_map: BTreeMap<VertexId, VertexId>,
    pub used_h_vertices: BTreeSet<VertexId>,
    pub edge_map: BTreeMap<EdgeId, EdgeId>,
    pub used_h_edges: BTreeSet<EdgeId>,
    g_edge_ids: Vec<EdgeId>,
    h_edge_ids: Vec<EdgeId>,
}

impl<'a, L: Label> MatchState<'a, L> {
    pub fn new(g: &'a InterfacedGraph<L>, h: &'a InterfacedGraph<L>) -> Self {
        MatchState {
            g,
            h,
            g_vertices: g.vertices().into_iter().collect(),
            h_vertices: h.vertices().into_iter().collect(),
            vertex_map: BTreeMap::new(),
            used_h_vertices: BTreeSet::new(),
            edge_map: BTreeMap::new(),
            used_h_edges: BTreeSet::new(),
            g_edge_ids: g.edges().map(|(id, _)| id).collect(),
            h_edge_ids: h.edges().map(|(id, _)| id).collect(),
        }
    }

    pub fn assign(&mut self, gv: VertexId, hv: VertexId) -> bool {
        match self.vertex_map.get(&gv) {
            Some(existing) => *existing == hv,
            None => {
                if self.used_h_vertices.contains(&hv) {
                    false
                } else {
                    self.vertex_map.insert(gv, hv);
                    self.used_h_vertices.insert(hv);
                    true
                }
            }
        }
    }

    fn unassign(&mut self, gv: VertexId, hv: VertexId) {
        self.vertex_map.remove(&gv);
        self.used_h_vertices.remove(&hv);
    }

    /// Pick the unmatched pattern edge with the most already-mapped
    /// incident vertices; ties go to the smallest id.
    fn next_edge(&self) -> Option<EdgeId> {
        self.g_edge_ids
            .iter()
            .filter(|id| !self.edge_map.contains_key(id))
            .map(|id| {
                let e = self.g.edge(*id).expect("edge id from this graph");
                let mapped = e.incident().filter(|v| self.vertex_map.contains_key(v)).count();
                (*id, mapped)
            })
            .max_by(|(ida, ma), (idb, mb)| ma.cmp(mb).then(idb.cmp(ida)))
            .map(|(id, _)| id)
    }

    /// Backtrack over edge assignments. `done` runs on every complete edge
    /// assignment; returning `true` from it stops the search.
    pub fn search_edges(&mut self, done: &mut dyn FnMut(&mut Self) -> bool) -> bool {
        let Some(ge_id) = self.next_edge() else {
            return done(self);
        };
        let ge = self.g.edge(ge_id).expect("edge id from this graph").clone();
        let h_ids = self.h_edge_ids.clone();
        for he_id in h_ids {
            if self.used_h_edges.contains(&he_id) {
                continue;
            }
            let he = self.h.edge(he_id).expect("edge id from host").clone();
            if he.inputs.len() != ge.inputs.len()
                || he.outputs.len() != ge.outputs.len()
                || !ge.label.equiv(&he.label)
            {
                continue;
            }
            let mut newly = Vec::new();
            let mut ok = true;
            for (gv, hv) in
                ge.inputs.iter().zip(&he.inputs).chain(ge.outputs.iter().zip(&he.outputs))
            {
                let fresh = !self.vertex_map.contains_key(gv);
                if self.assign(*gv, *hv) {
                    if fresh {
                        newly.push((*gv, *hv));
                    }
                } else {
                    ok = false;
                    break;
                }
            }
            if ok {
                self.edge_map.insert(ge_id, he_id);
                self.used_h_edges.insert(he_id);
                if self.search_edges(done) {
                    return true;
                }
                self.edge_map.remove(&ge_id);
                self.used_h_edges.remove(&he_id);
            }
            for (gv, hv) in newly.into_iter().rev() {
                self.unassign(gv, hv);
            }
        }
        false
    }
}
