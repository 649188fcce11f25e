//! Symmetric-monoidal string diagrams as labeled directed hypergraphs with
//! interfaces, together with the machinery to reason about them:
//!
//! - [`tensor`]: dense semiring tensors, the semantic ground truth;
//! - [`hypergraph`]: interfaced hypergraphs, composition/stacking, tensor
//!   semantics, and isomorphism checking;
//! - [`aprop`]: the syntactic term language (identities, swaps, cups,
//!   caps, generators) with extraction of terms from graphs;
//! - [`rewrite`]: convex subgraph matching and certified double-pushout
//!   rewriting;
//! - [`theory`]: signatures, rules, lemmas with proof scripts, and the
//!   randomized/concrete semantic oracles;
//! - [`zx`]: a concrete instantiation with complex spider semantics.
//!
//! Everything is an immutable value; all operations are pure and results
//! can be freely shared across threads.
//!
//! Two terms denote the same diagram exactly when their hypergraphs are
//! isomorphic, so equalities that hold "up to connectivity" need no
//! rewriting at all:
//!
//! ```
//! use strand_core::aprop::Term;
//! use strand_core::rewrite::terms_iso;
//!
//! let f = || Term::gen("f".to_owned(), 1, 1);
//! let g = || Term::gen("g".to_owned(), 1, 1);
//!
//! // the interchange law: (f ; g) * (g ; f)  ==  (f * g) ; (g * f)
//! let lhs = f().then(g()).beside(g().then(f()));
//! let rhs = f().beside(g()).then(g().beside(f()));
//! assert!(terms_iso(&lhs, &rhs).unwrap().is_some());
//! ```
//!
//! Everything else is a rewrite: match a rule side's graph in a host,
//! split the host around the match, certify the split by isomorphism,
//! and substitute the other side:
//!
//! ```
//! use strand_core::aprop::{term_to_graph, Term};
//! use strand_core::hypergraph::{find_isomorphism, id_graph};
//! use strand_core::rewrite::{rewrite_once, Direction, Rule};
//!
//! // u * id ; m  =  id
//! let unit = Rule::new(
//!     "unit",
//!     Term::gen("u".to_owned(), 0, 1).beside(Term::Id(1)).then(Term::gen("m".to_owned(), 2, 1)),
//!     Term::Id(1),
//! );
//! let host = term_to_graph(&unit.lhs);
//! let rewritten = rewrite_once(&host, &unit, Direction::Forward, 1).unwrap();
//! assert!(find_isomorphism(&rewritten.result, &id_graph(1)).is_some());
//! ```

pub mod aprop;
pub mod gen;
pub mod hypergraph;
pub mod rewrite;
pub mod scalar;
pub mod tensor;
pub mod theory;
pub mod zx;

pub use scalar::{Cx, Fp, Semiring, DEFAULT_MODULUS, DEFAULT_TOLERANCE};
pub use tensor::{IndexSet, Tensor};

/// Dense tensor over the default prime field, for exact identity testing.
pub type FpTensor = Tensor<Fp>;
/// Dense tensor over toleranced double-precision complex numbers.
pub type CxTensor = Tensor<Cx>;

#[cfg(test)]
mod send_sync {
    use super::*;

    fn assert_send_sync<T: Send + Sync>() {}

    #[test]
    fn values_are_shareable() {
        assert_send_sync::<FpTensor>();
        assert_send_sync::<CxTensor>();
        assert_send_sync::<tensor::DimensionlessTensor<Fp>>();
        assert_send_sync::<hypergraph::InterfacedGraph<String>>();
        assert_send_sync::<aprop::Term<String>>();
        assert_send_sync::<theory::Signature<String>>();
        assert_send_sync::<zx::ZXLabel>();
    }
}
