//! ZX-calculus instantiation: complex tensor semantics for Z/X spiders,
//! the Hadamard box, and scalar boxes, plus a fixed-arity phase-zero
//! rewrite theory whose rules are all validated against the semantics
//! before anyone gets to use them.
//!
//! Proportionality is handled by stacking an explicit scalar generator
//! onto the smaller side, so the checker only ever needs plain
//! (toleranced) equality of tensors.

use std::collections::BTreeMap;
use std::f64::consts::{SQRT_2, TAU};
use std::fmt;

use num_complex::Complex64;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::aprop::Term;
use crate::hypergraph::{Interpretation, Label};
use crate::rewrite::Rule;
use crate::scalar::Cx;
use crate::tensor::{delta, DimensionlessTensor, IndexSet, Tensor, TensorError};
use crate::theory::{concrete_model_check, Lemma, ProofStep, Side, Signature};

/// Spider phases and scalar boxes compare within this absolute tolerance.
pub const PHASE_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SpiderColor {
    Z,
    X,
}

/// Generator labels of the ZX theory.
#[derive(Clone, Copy, PartialEq, Debug)]
pub enum ZXLabel {
    /// The Hadamard box; meaningful at shape 1 -> 1 only (zero elsewhere).
    HBox,
    /// A phased spider, interpretable at every shape.
    Spider { color: SpiderColor, phase: f64 },
    /// A scalar box; meaningful at shape 0 -> 0 only (zero elsewhere).
    Const { value: Complex64 },
}

impl ZXLabel {
    pub fn z(phase: f64) -> Self {
        ZXLabel::Spider { color: SpiderColor::Z, phase }
    }

    pub fn x(phase: f64) -> Self {
        ZXLabel::Spider { color: SpiderColor::X, phase }
    }
}

impl fmt::Display for ZXLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ZXLabel::HBox => write!(f, "H"),
            ZXLabel::Spider { color: SpiderColor::Z, phase } => write!(f, "Z({phase})"),
            ZXLabel::Spider { color: SpiderColor::X, phase } => write!(f, "X({phase})"),
            ZXLabel::Const { value } => write!(f, "scalar({}{:+}i)", value.re, value.im),
        }
    }
}

fn phases_equiv(a: f64, b: f64) -> bool {
    let diff = (a - b).rem_euclid(TAU);
    diff <= PHASE_TOLERANCE || (TAU - diff) <= PHASE_TOLERANCE
}

impl Label for ZXLabel {
    fn equiv(&self, other: &Self) -> bool {
        match (self, other) {
            (ZXLabel::HBox, ZXLabel::HBox) => true,
            (
                ZXLabel::Spider { color: c1, phase: p1 },
                ZXLabel::Spider { color: c2, phase: p2 },
            ) => c1 == c2 && phases_equiv(*p1, *p2),
            (ZXLabel::Const { value: v1 }, ZXLabel::Const { value: v2 }) => {
                (v1 - v2).norm() <= PHASE_TOLERANCE
            }
            _ => false,
        }
    }
}

fn qubits() -> IndexSet {
    IndexSet::qubit()
}

/// The 2x2 Hadamard tensor.
pub fn hadamard_tensor() -> Tensor<Cx> {
    Tensor::from_fn(1, 1, &qubits(), |i, o| {
        let sign = if i[0] == 1 && o[0] == 1 { -1.0 } else { 1.0 };
        Cx::real(sign / SQRT_2)
    })
}

fn z_spider_tensor(n: usize, m: usize, phase: f64) -> Tensor<Cx> {
    Tensor::from_fn(n, m, &qubits(), |i, o| {
        let mut value = Complex64::zero();
        if i.iter().chain(o).all(|&v| v == 0) {
            value += Complex64::one();
        }
        if i.iter().chain(o).all(|&v| v == 1) {
            value += Complex64::from_polar(1.0, phase);
        }
        Cx(value)
    })
}

fn x_spider_tensor(n: usize, m: usize, phase: f64) -> Tensor<Cx> {
    // conjugate every leg of the Z spider by a Hadamard
    let h = hadamard_tensor();
    let mut h_in: Tensor<Cx> = delta(0, &qubits());
    for _ in 0..n {
        h_in = h_in.product(&h);
    }
    let mut h_out: Tensor<Cx> = delta(0, &qubits());
    for _ in 0..m {
        h_out = h_out.product(&h);
    }
    h_in.contract(&z_spider_tensor(n, m, phase))
        .and_then(|t| t.contract(&h_out))
        .expect("conjugation preserves shape")
}

/// The standard tensor family of one ZX generator. Spiders fill every
/// shape; the Hadamard and scalar boxes live at their own shape and are
/// zero elsewhere (misuse is caught by signature typechecking, not here).
pub fn zx_interp(label: &ZXLabel) -> DimensionlessTensor<Cx> {
    let label = *label;
    DimensionlessTensor::from_rule(qubits(), move |n, m| match label {
        ZXLabel::Spider { color: SpiderColor::Z, phase } => z_spider_tensor(n, m, phase),
        ZXLabel::Spider { color: SpiderColor::X, phase } => x_spider_tensor(n, m, phase),
        ZXLabel::HBox => {
            if (n, m) == (1, 1) {
                hadamard_tensor()
            } else {
                Tensor::zero(n, m, &qubits())
            }
        }
        ZXLabel::Const { value } => {
            if (n, m) == (0, 0) {
                Tensor::scalar(Cx(value), &qubits())
            } else {
                Tensor::zero(n, m, &qubits())
            }
        }
    })
}

/// Interpretation of every ZX label by [`zx_interp`].
pub fn zx_interpretation() -> Interpretation<ZXLabel, Cx> {
    Interpretation::new(qubits(), |label: &ZXLabel| Some(zx_interp(label)))
}

pub fn z_spider(n: usize, m: usize, phase: f64) -> Term<ZXLabel> {
    Term::Gen(ZXLabel::z(phase), n, m)
}

pub fn x_spider(n: usize, m: usize, phase: f64) -> Term<ZXLabel> {
    Term::Gen(ZXLabel::x(phase), n, m)
}

pub fn hbox() -> Term<ZXLabel> {
    Term::Gen(ZXLabel::HBox, 1, 1)
}

pub fn constant(value: Complex64) -> Term<ZXLabel> {
    Term::Gen(ZXLabel::Const { value }, 0, 0)
}

/// `n` plain wires.
pub fn n_wire(n: usize) -> Term<ZXLabel> {
    Term::Id(n)
}

/// The CNOT diagram: copy on the top wire, xor on the bottom. Its tensor
/// is the CNOT matrix scaled by 1/sqrt(2).
pub fn cnot() -> Term<ZXLabel> {
    z_spider(1, 2, 0.0).beside(Term::Id(1)).then(Term::Id(1).beside(x_spider(2, 1, 0.0)))
}

/// CNOT flipped upside down: xor on the top wire, copy on the bottom.
pub fn notc() -> Term<ZXLabel> {
    Term::Id(1).beside(z_spider(1, 2, 0.0)).then(x_spider(2, 1, 0.0).beside(Term::Id(1)))
}

/// The fixed-arity, phase-zero ZX rewrite theory, with rules shaped for
/// the CNOT cancellation derivation.
pub struct ZxTheory {
    pub signature: Signature<ZXLabel>,
    pub lemmas: Vec<Lemma<ZXLabel>>,
}

#[derive(Debug, Error)]
pub enum ZxTheoryError {
    #[error("rule `{rule}` fails its semantic model check")]
    RuleRefuted { rule: String },
    #[error(transparent)]
    Theory(#[from] crate::theory::TheoryError),
    #[error("model check could not run: {0}")]
    Model(String),
}

/// Generator table shared by the in-process ZX theory, the shipped theory
/// file, and the JSON tensor manifest: name, label, declared shape.
pub fn zx_generator_table() -> Vec<(&'static str, ZXLabel, usize, usize)> {
    vec![
        ("z12", ZXLabel::z(0.0), 1, 2),
        ("z13", ZXLabel::z(0.0), 1, 3),
        ("z11", ZXLabel::z(0.0), 1, 1),
        ("x21", ZXLabel::x(0.0), 2, 1),
        ("x31", ZXLabel::x(0.0), 3, 1),
        ("x11", ZXLabel::x(0.0), 1, 1),
        ("h", ZXLabel::HBox, 1, 1),
        ("half", ZXLabel::Const { value: Complex64::new(0.5, 0.0) }, 0, 0),
        ("root2", ZXLabel::Const { value: Complex64::new(SQRT_2, 0.0) }, 0, 0),
    ]
}

fn zx_rules() -> Vec<Rule<ZXLabel>> {
    let id = Term::<ZXLabel>::Id;
    let half = || constant(Complex64::new(0.5, 0.0));
    let root2 = || constant(Complex64::new(SQRT_2, 0.0));
    vec![
        // fuse two Z spiders joined output-1 to input
        Rule::new(
            "z_fuse",
            z_spider(1, 2, 0.0).then(z_spider(1, 2, 0.0).beside(id(1))),
            z_spider(1, 3, 0.0),
        ),
        // fuse a phase-zero Z knot into its neighbor
        Rule::new(
            "z_fuse11",
            z_spider(1, 2, 0.0).then(z_spider(1, 1, 0.0).beside(id(1))),
            z_spider(1, 2, 0.0),
        ),
        // fuse two X spiders joined output to input-2
        Rule::new(
            "x_fuse",
            id(1).beside(x_spider(2, 1, 0.0)).then(x_spider(2, 1, 0.0)),
            x_spider(3, 1, 0.0),
        ),
        // two parallel wires between a Z and an X spider collapse, at the
        // price of a scalar 1/2
        Rule::new(
            "hopf",
            z_spider(1, 3, 0.0).beside(id(1)).then(id(1).beside(x_spider(3, 1, 0.0))),
            half().beside(z_spider(1, 1, 0.0)).beside(x_spider(1, 1, 0.0)),
        ),
        // X-over-Z bialgebra, scaled by sqrt(2)
        Rule::new(
            "bialg",
            x_spider(2, 1, 0.0).then(z_spider(1, 2, 0.0)),
            root2().beside(
                z_spider(1, 2, 0.0)
                    .beside(z_spider(1, 2, 0.0))
                    .then(id(1).beside(Term::Swap(1, 1)).beside(id(1)))
                    .then(x_spider(2, 1, 0.0).beside(x_spider(2, 1, 0.0))),
            ),
        ),
        // phase-zero 1 -> 1 spiders are plain wires
        Rule::new("z_wire", z_spider(1, 1, 0.0), id(1)),
        Rule::new("x_wire", x_spider(1, 1, 0.0), id(1)),
    ]
}

fn zx_lemmas() -> Vec<Lemma<ZXLabel>> {
    let rw = |rule: &str| ProofStep::Rewrite {
        rule: rule.to_owned(),
        reverse: false,
        occurrence: 1,
        side: Side::Lhs,
    };
    vec![Lemma {
        // two CNOTs cancel to plain wires, up to the scalar 1/2
        name: "cnot_cnot".into(),
        lhs: cnot().then(cnot()),
        rhs: constant(Complex64::new(0.5, 0.0)).beside(n_wire(2)),
        proof: vec![
            rw("z_fuse"),
            rw("x_fuse"),
            rw("hopf"),
            rw("z_wire"),
            rw("x_wire"),
            ProofStep::Iso,
        ],
    }]
}

/// Build the ZX theory, validating every rule against the spider
/// semantics first. A rule that fails the model check aborts the build.
pub fn zx_theory() -> Result<ZxTheory, ZxTheoryError> {
    let mut signature = Signature::new("zx");
    for (name, label, n, m) in zx_generator_table() {
        signature.declare(name, label, n, m);
    }
    for rule in zx_rules() {
        signature.add_rule(rule);
    }
    signature.validate()?;

    let interp = zx_interpretation();
    for rule in &signature.rules {
        let holds = concrete_model_check(&signature, &interp, &rule.lhs, &rule.rhs)
            .map_err(|e| ZxTheoryError::Model(e.to_string()))?;
        if !holds {
            return Err(ZxTheoryError::RuleRefuted { rule: rule.name.clone() });
        }
    }
    Ok(ZxTheory { signature, lemmas: zx_lemmas() })
}

/// A dense complex interpretation for named generators at fixed shapes,
/// as shipped in JSON next to a theory file.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ModelManifest {
    /// Values of the index set (qubit wires are `[0, 1]`).
    pub index: Vec<u64>,
    pub generators: BTreeMap<String, GeneratorEntry>,
}

/// One generator's dense table, row-major with input indices slowest,
/// entries as `[re, im]`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct GeneratorEntry {
    pub inputs: usize,
    pub outputs: usize,
    pub entries: Vec<[f64; 2]>,
}

#[derive(Debug, Error)]
pub enum ManifestError {
    #[error(transparent)]
    Index(#[from] TensorError),
    #[error("generator `{name}` has {found} entries, expected {expected}")]
    EntryCount { name: String, expected: usize, found: usize },
}

impl ModelManifest {
    /// The manifest of the shipped ZX theory: every generator of
    /// [`zx_generator_table`] tabulated by [`zx_interp`].
    pub fn zx() -> Self {
        let index = qubits();
        let generators = zx_generator_table()
            .into_iter()
            .map(|(name, label, n, m)| {
                let tensor = zx_interp(&label).at(n, m);
                let entries = tensor.entries().iter().map(|c| [c.0.re, c.0.im]).collect();
                (name.to_owned(), GeneratorEntry { inputs: n, outputs: m, entries })
            })
            .collect();
        ModelManifest { index: index.values().to_vec(), generators }
    }

    /// String-labeled interpretation: each generator at its declared
    /// shape, zero elsewhere.
    pub fn to_interpretation(&self) -> Result<Interpretation<String, Cx>, ManifestError> {
        let index = IndexSet::new(self.index.clone())?;
        let mut families: BTreeMap<String, DimensionlessTensor<Cx>> = BTreeMap::new();
        for (name, entry) in &self.generators {
            let expected = index.size().pow((entry.inputs + entry.outputs) as u32);
            if entry.entries.len() != expected {
                return Err(ManifestError::EntryCount {
                    name: name.clone(),
                    expected,
                    found: entry.entries.len(),
                });
            }
            let mut next = 0usize;
            let values = entry.entries.clone();
            let tensor = Tensor::from_fn(entry.inputs, entry.outputs, &index, |_, _| {
                let [re, im] = values[next];
                next += 1;
                Cx::new(re, im)
            });
            families.insert(name.clone(), DimensionlessTensor::from_tensor(tensor));
        }
        Ok(Interpretation::from_named_map(index, families))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aprop::{graph_to_term, term_semantics, term_to_graph};
    use crate::hypergraph::find_isomorphism;
    use crate::theory::{check_theory, CheckOptions};

    fn norm_diff_max(t: &Tensor<Cx>, expected: impl Fn(&[u64], &[u64]) -> Complex64) -> f64 {
        let mut worst: f64 = 0.0;
        let index = t.index_set().clone();
        index.for_each_vector(t.n_in() + t.n_out(), |v| {
            let (i, o) = v.split_at(t.n_in());
            let diff = (t.entry(i, o).0 - expected(i, o)).norm();
            worst = worst.max(diff);
        });
        worst
    }

    #[test]
    fn phase_zero_z_spider_is_a_wire() {
        let t = zx_interp(&ZXLabel::z(0.0)).at(1, 1);
        assert!(t.equiv(&delta(1, &qubits())));
    }

    #[test]
    fn hadamard_squares_to_identity() {
        let h = hadamard_tensor();
        let hh = h.contract(&h).unwrap();
        assert!(hh.equiv(&delta(1, &qubits())));
    }

    #[test]
    fn x_spider_is_parity() {
        // X 2 -> 1 at phase 0: entry((a, b), c) = 1/sqrt(2) iff c = a xor b
        let t = zx_interp(&ZXLabel::x(0.0)).at(2, 1);
        let worst = norm_diff_max(&t, |i, o| {
            if o[0] == i[0] ^ i[1] {
                Complex64::new(1.0 / SQRT_2, 0.0)
            } else {
                Complex64::zero()
            }
        });
        assert!(worst < 1e-9, "max deviation {worst}");
    }

    #[test]
    fn phases_compare_modulo_two_pi() {
        assert!(ZXLabel::z(0.0).equiv(&ZXLabel::z(TAU)));
        assert!(ZXLabel::z(1.0).equiv(&ZXLabel::z(1.0 + 2.0 * TAU)));
        assert!(!ZXLabel::z(0.0).equiv(&ZXLabel::z(1.0)));
        assert!(!ZXLabel::z(0.0).equiv(&ZXLabel::x(0.0)));
    }

    #[test]
    fn cnot_tensor_is_scaled_cnot_matrix() {
        let sem = term_semantics(&cnot(), &zx_interpretation()).unwrap();
        let worst = norm_diff_max(&sem, |i, o| {
            if o[0] == i[0] && o[1] == i[0] ^ i[1] {
                Complex64::new(1.0 / SQRT_2, 0.0)
            } else {
                Complex64::zero()
            }
        });
        assert!(worst < 1e-9, "max deviation {worst}");
    }

    #[test]
    fn notc_tensor_is_scaled_notc_matrix() {
        let sem = term_semantics(&notc(), &zx_interpretation()).unwrap();
        let worst = norm_diff_max(&sem, |i, o| {
            if o[0] == i[0] ^ i[1] && o[1] == i[1] {
                Complex64::new(1.0 / SQRT_2, 0.0)
            } else {
                Complex64::zero()
            }
        });
        assert!(worst < 1e-9, "max deviation {worst}");
    }

    #[test]
    fn scalar_boxes_multiply_semantics() {
        let interp = zx_interpretation();
        let plain = term_semantics(&n_wire(1), &interp).unwrap();
        let scaled =
            term_semantics(&constant(Complex64::new(0.25, 0.0)).beside(n_wire(1)), &interp)
                .unwrap();
        assert!(scaled.equiv(&plain.map(|z| Cx(z.0 * 0.25))));
    }

    #[test]
    fn zx_theory_builds_and_rules_hold() {
        let theory = zx_theory().expect("all shipped rules pass the model check");
        assert_eq!(theory.signature.rules.len(), 7);
    }

    #[test]
    fn perturbed_rule_fails_model_check() {
        let theory = zx_theory().unwrap();
        let interp = zx_interpretation();
        // flip one side's phase to pi
        let pi = std::f64::consts::PI;
        let mut signature = theory.signature;
        signature.declare("z12_pi", ZXLabel::z(pi), 1, 2);
        let bad = Rule::new("bad_fuse", z_spider(1, 2, pi), z_spider(1, 2, 0.0));
        let holds = concrete_model_check(&signature, &interp, &bad.lhs, &bad.rhs).unwrap();
        assert!(!holds, "e^(i pi) entries must separate the sides");
    }

    #[test]
    fn cnot_cancellation_checks_by_rewriting() {
        let theory = zx_theory().unwrap();
        let report =
            check_theory(&theory.signature, &theory.lemmas, &CheckOptions::default()).unwrap();
        assert!(report.all_ok(), "{report:?}");
    }

    #[test]
    fn cnot_graph_is_extractable() {
        let g = term_to_graph(&cnot());
        assert!(g.is_monogamous() && g.is_acyclic());
        let back = graph_to_term(&g).unwrap();
        assert!(find_isomorphism(&term_to_graph(&back), &g).is_some());
    }

    #[test]
    fn manifest_round_trips_through_json() {
        let manifest = ModelManifest::zx();
        let json = serde_json::to_string(&manifest).unwrap();
        let parsed: ModelManifest = serde_json::from_str(&json).unwrap();
        assert_eq!(parsed, manifest);

        let interp = parsed.to_interpretation().unwrap();
        let direct = zx_interp(&ZXLabel::z(0.0)).at(1, 2);
        let loaded = interp.tensor_for(&"z12".to_owned(), 1, 2).unwrap();
        assert!(loaded.equiv(&direct));
    }
}
