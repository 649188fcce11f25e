//! Seeded random generation of terms and graphs.
//!
//! The randomized batches in the test suites all draw from here: layered
//! diagram terms (always well-typed, never containing cups or caps),
//! arbitrary interfaced hypergraphs (repetition and isolated vertices
//! included), and random relabelings for isomorphism tests.

use rand::rngs::StdRng;
use rand::Rng;

use crate::aprop::Term;
use crate::hypergraph::{EdgeId, InterfacedGraph, Renaming, VertexId};
use crate::rewrite::Rule;

/// Arity pool and size limits for random terms.
#[derive(Clone, Debug)]
pub struct TermGenConfig {
    /// `(name, inputs, outputs)` per generator.
    pub generators: Vec<(String, usize, usize)>,
    /// How many generator nodes to place.
    pub gen_nodes: usize,
    /// Upper bound on the number of parallel wires.
    pub max_width: usize,
    /// Chance of inserting a braid layer after each generator.
    pub braid_chance: f64,
}

impl TermGenConfig {
    /// A mixed-arity pool that exercises every generator shape.
    pub fn standard(gen_nodes: usize, max_width: usize) -> Self {
        TermGenConfig {
            generators: [
                ("a", 1, 1),
                ("b", 2, 1),
                ("c", 1, 2),
                ("u", 0, 1),
                ("w", 1, 0),
                ("d", 2, 2),
                ("e", 3, 1),
            ]
            .into_iter()
            .map(|(n, i, o)| (n.to_owned(), i, o))
            .collect(),
            gen_nodes,
            max_width,
            braid_chance: 0.3,
        }
    }
}

/// A random cup/cap-free term: layers of `Id ⊗ generator ⊗ Id` and braids
/// over an evolving bundle of wires, occasionally stacked side by side.
pub fn random_term(rng: &mut StdRng, config: &TermGenConfig) -> Term<String> {
    if config.gen_nodes >= 4 && rng.gen_bool(0.4) {
        let left_nodes = rng.gen_range(1..config.gen_nodes);
        let left = TermGenConfig { gen_nodes: left_nodes, ..config.clone() };
        let right = TermGenConfig { gen_nodes: config.gen_nodes - left_nodes, ..config.clone() };
        return random_term(rng, &left).beside(random_term(rng, &right));
    }
    let width = rng.gen_range(0..=config.max_width.min(3));
    layered_from(rng, config, width, config.gen_nodes)
}

/// A random layered term starting from `width` open wires.
pub fn layered_from(
    rng: &mut StdRng,
    config: &TermGenConfig,
    width: usize,
    gen_nodes: usize,
) -> Term<String> {
    let mut width = width;
    let mut acc = Term::Id(width);
    for _ in 0..gen_nodes {
        let candidates: Vec<&(String, usize, usize)> = config
            .generators
            .iter()
            .filter(|(_, n, m)| *n <= width && width - n + m <= config.max_width)
            .collect();
        let Some((name, n, m)) = candidates.get(rng.gen_range(0..candidates.len().max(1))).copied()
        else {
            break;
        };
        let position = rng.gen_range(0..=width - n);
        acc = acc.then(generator_layer(name.clone(), *n, *m, position, width));
        width = width - n + m;

        if width >= 2 && rng.gen_bool(config.braid_chance) {
            let at = rng.gen_range(0..width - 1);
            acc = acc.then(braid_layer(at, width));
        }
    }
    acc
}

fn generator_layer(
    name: String,
    n: usize,
    m: usize,
    position: usize,
    width: usize,
) -> Term<String> {
    let mut layer = Term::Gen(name, n, m);
    if position > 0 {
        layer = Term::Id(position).beside(layer);
    }
    let tail = width - position - n;
    if tail > 0 {
        layer = layer.beside(Term::Id(tail));
    }
    layer
}

fn braid_layer(at: usize, width: usize) -> Term<String> {
    let mut layer: Term<String> = Term::Swap(1, 1);
    if at > 0 {
        layer = Term::Id(at).beside(layer);
    }
    if at + 2 < width {
        layer = layer.beside(Term::Id(width - at - 2));
    }
    layer
}

/// Grow random context around a core term, planting it exactly once.
/// Prepended and appended layers draw from the config's generator pool;
/// sideways growth stacks fresh wires or generators beside the core.
pub fn grow_around(
    rng: &mut StdRng,
    core: Term<String>,
    config: &TermGenConfig,
    layers: usize,
) -> Term<String> {
    let mut host = core;
    for _ in 0..layers {
        match rng.gen_range(0..4) {
            // prepend: layer ; host
            0 => {
                let dom = host.dom();
                let candidates: Vec<&(String, usize, usize)> =
                    config.generators.iter().filter(|(_, _, m)| *m <= dom).collect();
                if let Some((name, n, m)) =
                    candidates.get(rng.gen_range(0..candidates.len().max(1)))
                {
                    let position = rng.gen_range(0..=dom - m);
                    let width = dom - m + n;
                    host = generator_layer(name.clone(), *n, *m, position, width).then(host);
                }
            }
            // append: host ; layer
            1 => {
                let cod = host.cod();
                let candidates: Vec<&(String, usize, usize)> =
                    config.generators.iter().filter(|(_, n, _)| *n <= cod).collect();
                if let Some((name, n, m)) =
                    candidates.get(rng.gen_range(0..candidates.len().max(1)))
                {
                    let position = rng.gen_range(0..=cod - n);
                    host = host.then(generator_layer(name.clone(), *n, *m, position, cod));
                }
            }
            // stack a wire alongside
            2 => {
                host = if rng.gen_bool(0.5) {
                    Term::Id(1).beside(host)
                } else {
                    host.beside(Term::Id(1))
                };
            }
            // stack a generator alongside
            _ => {
                let (name, n, m) = &config.generators[rng.gen_range(0..config.generators.len())];
                let gen = Term::Gen(name.clone(), *n, *m);
                host = if rng.gen_bool(0.5) { gen.beside(host) } else { host.beside(gen) };
            }
        }
    }
    host
}

/// Size limits for arbitrary random graphs.
#[derive(Clone, Debug)]
pub struct GraphGenConfig {
    pub max_edges: usize,
    pub max_arity: usize,
    pub vertex_pool: usize,
    pub labels: Vec<String>,
    pub max_interface: usize,
    pub max_extra: usize,
}

impl GraphGenConfig {
    pub fn small() -> Self {
        GraphGenConfig {
            max_edges: 5,
            max_arity: 2,
            vertex_pool: 6,
            labels: ["f", "g", "h"].into_iter().map(str::to_owned).collect(),
            max_interface: 3,
            max_extra: 1,
        }
    }
}

/// An arbitrary interfaced hypergraph: random edges over a vertex pool
/// (vertices may repeat within an edge), random interfaces (repetition
/// allowed), and possibly isolated extra vertices. Not monogamous or
/// acyclic in general.
pub fn random_graph(
    rng: &mut StdRng,
    config: &GraphGenConfig,
    n_in: usize,
    n_out: usize,
) -> InterfacedGraph<String> {
    let pool = config.vertex_pool as u32;
    let pick = |rng: &mut StdRng| rng.gen_range(1..=pool);
    let edge_count = rng.gen_range(0..=config.max_edges);
    let mut edges = Vec::with_capacity(edge_count);
    for id in 1..=edge_count {
        let label = config.labels[rng.gen_range(0..config.labels.len())].clone();
        let ins = (0..rng.gen_range(0..=config.max_arity)).map(|_| pick(rng)).collect();
        let outs = (0..rng.gen_range(0..=config.max_arity)).map(|_| pick(rng)).collect();
        edges.push((id as u32, label, ins, outs));
    }
    let extra = (0..rng.gen_range(0..=config.max_extra)).map(|_| pick(rng)).collect();
    let inputs = (0..n_in).map(|_| pick(rng)).collect();
    let outputs = (0..n_out).map(|_| pick(rng)).collect();
    InterfacedGraph::from_parts(edges, extra, inputs, outputs)
}

/// A random composable pair `(g: a -> b, h: b -> c)`.
pub fn random_composable_pair(
    rng: &mut StdRng,
    config: &GraphGenConfig,
) -> (InterfacedGraph<String>, InterfacedGraph<String>) {
    let a = rng.gen_range(0..=config.max_interface);
    let b = rng.gen_range(0..=config.max_interface);
    let c = rng.gen_range(0..=config.max_interface);
    (random_graph(rng, config, a, b), random_graph(rng, config, b, c))
}

/// Randomly relabel all vertices and edges of a graph. The witness of the
/// relabeling is returned alongside.
pub fn shuffle_graph(
    rng: &mut StdRng,
    graph: &InterfacedGraph<String>,
) -> (InterfacedGraph<String>, Renaming) {
    let vertices: Vec<VertexId> = graph.vertices().into_iter().collect();
    let edges: Vec<EdgeId> = graph.edges().map(|(id, _)| id).collect();
    let fresh_vertices = sample_distinct(rng, vertices.len());
    let fresh_edges = sample_distinct(rng, edges.len());
    let renaming = Renaming {
        vertices: vertices
            .iter()
            .zip(&fresh_vertices)
            .map(|(v, id)| (*v, VertexId::new(*id)))
            .collect(),
        edges: edges.iter().zip(&fresh_edges).map(|(e, id)| (*e, EdgeId::new(*id))).collect(),
    };
    (graph.renamed(&renaming), renaming)
}

fn sample_distinct(rng: &mut StdRng, count: usize) -> Vec<u32> {
    let mut taken = std::collections::BTreeSet::new();
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let candidate = rng.gen_range(1..=(count as u32 * 50).max(10));
        if taken.insert(candidate) {
            out.push(candidate);
        }
    }
    out
}

/// A rule whose left side draws from the shared generator pool and whose
/// right side is a single uniquely-labeled generator of the same shape,
/// so a reverse rewrite can only target the replacement site.
pub fn random_rule(rng: &mut StdRng, config: &TermGenConfig, unique: usize) -> Rule<String> {
    let width = rng.gen_range(0..=2);
    let nodes = rng.gen_range(1..=3);
    let lhs = layered_from(rng, config, width, nodes);
    let rhs = Term::Gen(format!("uniq_{unique}"), lhs.dom(), lhs.cod());
    Rule { name: format!("planted_{unique}"), lhs, rhs }
}
