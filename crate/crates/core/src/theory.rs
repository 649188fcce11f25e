//! Theories: generators with arities, named rules, and lemmas proved by
//! rewrite scripts.
//!
//! A lemma's proof alternates rewrites of either side of the goal with a
//! closing isomorphism check. Checked lemmas become rules for the lemmas
//! after them. Two semantic oracles accompany the checker: a randomized
//! prime-field oracle that hunts for counterexamples, and a concrete
//! model check against user-supplied tensors.

use std::collections::BTreeMap;
use std::time::Instant;

use serde::Serialize;
use thiserror::Error;

use crate::aprop::{term_semantics, term_to_graph, typecheck, Term, TypeError};
use crate::hypergraph::{find_isomorphism, InterfacedGraph, Interpretation, Label, SemanticsError};
use crate::rewrite::{find_matches, rewrite_once, Direction, Rule};
use crate::scalar::{Fp, Semiring};
use crate::tensor::{seeded_tensor_family, IndexSet};

/// One generator declaration: a surface name, the label terms carry, and
/// the declared arity.
#[derive(Clone, Debug)]
pub struct GeneratorDecl<L> {
    pub name: String,
    pub label: L,
    pub inputs: usize,
    pub outputs: usize,
}

/// Generators plus named rules. The label type (with its equivalence)
/// is chosen per theory.
#[derive(Clone, Debug, Default)]
pub struct Signature<L> {
    pub name: String,
    pub generators: Vec<GeneratorDecl<L>>,
    pub rules: Vec<Rule<L>>,
}

#[derive(Debug, Error, PartialEq)]
pub enum TheoryError {
    #[error("duplicate generator `{0}`")]
    DuplicateGenerator(String),
    #[error("duplicate rule or lemma name `{0}`")]
    DuplicateRule(String),
    #[error("rule `{rule}`: {source}")]
    RuleType {
        rule: String,
        #[source]
        source: TypeError,
    },
    #[error("rule `{rule}` relates terms of different shape: {lhs_in} -> {lhs_out} vs {rhs_in} -> {rhs_out}")]
    RuleShape { rule: String, lhs_in: usize, lhs_out: usize, rhs_in: usize, rhs_out: usize },
}

impl<L: Label> Signature<L> {
    pub fn new(name: impl Into<String>) -> Self {
        Signature { name: name.into(), generators: Vec::new(), rules: Vec::new() }
    }

    pub fn declare(&mut self, name: impl Into<String>, label: L, inputs: usize, outputs: usize) {
        self.generators.push(GeneratorDecl { name: name.into(), label, inputs, outputs });
    }

    pub fn add_rule(&mut self, rule: Rule<L>) {
        self.rules.push(rule);
    }

    pub fn generator_by_name(&self, name: &str) -> Option<&GeneratorDecl<L>> {
        self.generators.iter().find(|g| g.name == name)
    }

    pub fn generator_by_label(&self, label: &L) -> Option<&GeneratorDecl<L>> {
        self.generators.iter().find(|g| g.label.equiv(label))
    }

    pub fn rule(&self, name: &str) -> Option<&Rule<L>> {
        self.rules.iter().find(|r| r.name == name)
    }

    /// Arity table for [`typecheck`]: all declared arities of equivalent
    /// labels (a spider-style label may be declared at several shapes).
    pub fn arity_of(&self) -> impl Fn(&L) -> Option<Vec<(usize, usize)>> + '_ {
        move |label| {
            let arities: Vec<(usize, usize)> = self
                .generators
                .iter()
                .filter(|g| g.label.equiv(label))
                .map(|g| (g.inputs, g.outputs))
                .collect();
            if arities.is_empty() {
                None
            } else {
                Some(arities)
            }
        }
    }

    pub fn typecheck(&self, term: &Term<L>) -> Result<(), TypeError> {
        typecheck(term, &self.arity_of())
    }

    /// Unique names, every rule typechecking with equal arities on both
    /// sides.
    pub fn validate(&self) -> Result<(), TheoryError> {
        let mut names = std::collections::BTreeSet::new();
        for g in &self.generators {
            if !names.insert(g.name.clone()) {
                return Err(TheoryError::DuplicateGenerator(g.name.clone()));
            }
        }
        let mut rule_names = std::collections::BTreeSet::new();
        for r in &self.rules {
            if !rule_names.insert(r.name.clone()) {
                return Err(TheoryError::DuplicateRule(r.name.clone()));
            }
            for side in [&r.lhs, &r.rhs] {
                self.typecheck(side)
                    .map_err(|source| TheoryError::RuleType { rule: r.name.clone(), source })?;
            }
            if r.lhs.dom() != r.rhs.dom() || r.lhs.cod() != r.rhs.cod() {
                return Err(TheoryError::RuleShape {
                    rule: r.name.clone(),
                    lhs_in: r.lhs.dom(),
                    lhs_out: r.lhs.cod(),
                    rhs_in: r.rhs.dom(),
                    rhs_out: r.rhs.cod(),
                });
            }
        }
        Ok(())
    }
}

/// Which side of the goal a rewrite acts on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Lhs,
    Rhs,
}

impl std::fmt::Display for Side {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", if *self == Side::Lhs { "lhs" } else { "rhs" })
    }
}

/// One proof step: a directed rewrite at an occurrence, or closing the
/// goal by hypergraph isomorphism.
#[derive(Clone, Debug, PartialEq)]
pub enum ProofStep {
    Rewrite { rule: String, reverse: bool, occurrence: usize, side: Side },
    Iso,
}

/// A named statement with a proof script.
#[derive(Clone, Debug)]
pub struct Lemma<L> {
    pub name: String,
    pub lhs: Term<L>,
    pub rhs: Term<L>,
    pub proof: Vec<ProofStep>,
}

/// Both sides of an in-progress goal, as graphs.
#[derive(Clone, Debug)]
pub struct GoalState<L> {
    pub lhs: InterfacedGraph<L>,
    pub rhs: InterfacedGraph<L>,
}

/// A validated signature plus the rules accumulated so far (signature
/// rules and previously admitted lemmas).
pub struct ProofSession<L> {
    signature: Signature<L>,
    environment: BTreeMap<String, Rule<L>>,
    order: Vec<String>,
}

impl<L: Label> ProofSession<L> {
    pub fn new(signature: Signature<L>) -> Result<Self, TheoryError> {
        signature.validate()?;
        let mut environment = BTreeMap::new();
        let mut order = Vec::new();
        for rule in &signature.rules {
            environment.insert(rule.name.clone(), rule.clone());
            order.push(rule.name.clone());
        }
        Ok(ProofSession { signature, environment, order })
    }

    pub fn signature(&self) -> &Signature<L> {
        &self.signature
    }

    pub fn available_rule(&self, name: &str) -> Option<&Rule<L>> {
        self.environment.get(name)
    }

    /// Rule and admitted-lemma names, in declaration order.
    pub fn rule_names(&self) -> &[String] {
        &self.order
    }

    /// Typecheck a lemma statement and open its goal.
    pub fn begin(&self, lemma: &Lemma<L>) -> Result<GoalState<L>, String> {
        for (side, term) in [("lhs", &lemma.lhs), ("rhs", &lemma.rhs)] {
            self.signature.typecheck(term).map_err(|e| format!("{side}: {e}"))?;
        }
        if lemma.lhs.dom() != lemma.rhs.dom() || lemma.lhs.cod() != lemma.rhs.cod() {
            return Err(format!(
                "statement sides have different shapes: {} -> {} vs {} -> {}",
                lemma.lhs.dom(),
                lemma.lhs.cod(),
                lemma.rhs.dom(),
                lemma.rhs.cod()
            ));
        }
        Ok(GoalState { lhs: term_to_graph(&lemma.lhs), rhs: term_to_graph(&lemma.rhs) })
    }

    /// Run one step. `Ok(true)` means the goal closed by isomorphism.
    pub fn step(&self, state: &mut GoalState<L>, step: &ProofStep) -> Result<bool, String> {
        match step {
            ProofStep::Iso => match find_isomorphism(&state.lhs, &state.rhs) {
                Some(_) => Ok(true),
                None => Err("goal sides are not isomorphic".to_owned()),
            },
            ProofStep::Rewrite { rule, reverse, occurrence, side } => {
                let Some(known) = self.environment.get(rule) else {
                    return Err(format!("unknown rule `{rule}` (not declared or not proven yet)"));
                };
                let direction = if *reverse { Direction::Reverse } else { Direction::Forward };
                let host = match side {
                    Side::Lhs => &state.lhs,
                    Side::Rhs => &state.rhs,
                };
                match rewrite_once(host, known, direction, *occurrence) {
                    Some(outcome) => {
                        match side {
                            Side::Lhs => state.lhs = outcome.result,
                            Side::Rhs => state.rhs = outcome.result,
                        }
                        Ok(false)
                    }
                    None => {
                        let pattern = term_to_graph(if *reverse { &known.rhs } else { &known.lhs });
                        let available = find_matches(&pattern, host).len();
                        if *occurrence > available {
                            Err(format!(
                                "rule `{rule}` has {available} occurrence(s) in the {side}, requested #{occurrence}"
                            ))
                        } else {
                            Err(format!(
                                "occurrence #{occurrence} of rule `{rule}` in the {side} failed decomposition certification"
                            ))
                        }
                    }
                }
            }
        }
    }

    /// Make a checked lemma available to later proofs.
    pub fn admit(&mut self, lemma: &Lemma<L>) {
        self.environment.insert(
            lemma.name.clone(),
            Rule { name: lemma.name.clone(), lhs: lemma.lhs.clone(), rhs: lemma.rhs.clone() },
        );
        self.order.push(lemma.name.clone());
    }
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct LemmaReport {
    pub name: String,
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failed_step: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    pub millis: u128,
}

impl LemmaReport {
    pub fn is_ok(&self) -> bool {
        self.status == "ok"
    }
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct OracleReport {
    pub name: String,
    #[serde(flatten)]
    pub verdict: OracleVerdict,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckReport {
    pub theory: String,
    pub lemmas: Vec<LemmaReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<Vec<OracleReport>>,
}

impl CheckReport {
    pub fn all_ok(&self) -> bool {
        self.lemmas.iter().all(LemmaReport::is_ok)
    }
}

/// Options for [`check_theory`].
#[derive(Clone, Debug, Default)]
pub struct CheckOptions {
    /// Run the randomized oracle on every rule and lemma statement with
    /// this many trials. Verdicts are informational: axioms of a theory
    /// are expected to fail under unconstrained random interpretations.
    pub oracle: Option<OracleConfig>,
}

#[derive(Clone, Copy, Debug)]
pub struct OracleConfig {
    pub trials: u32,
    pub seed: u64,
}

/// Check lemmas in order; each checked lemma becomes a rule for the ones
/// after it. Statuses are deterministic; timings are informational.
pub fn check_theory<L: Label>(
    signature: &Signature<L>,
    lemmas: &[Lemma<L>],
    options: &CheckOptions,
) -> Result<CheckReport, TheoryError> {
    let mut session = ProofSession::new(signature.clone())?;
    let mut reports = Vec::with_capacity(lemmas.len());

    for lemma in lemmas {
        let begun = Instant::now();
        let mut failed: Option<(usize, String)> = None;
        match session.begin(lemma) {
            Err(reason) => failed = Some((0, format!("statement: {reason}"))),
            Ok(mut state) => {
                let mut closed = false;
                for (index, step) in lemma.proof.iter().enumerate() {
                    match session.step(&mut state, step) {
                        Ok(done) => closed = done,
                        Err(reason) => {
                            failed = Some((index + 1, reason));
                            break;
                        }
                    }
                }
                if failed.is_none() && !closed {
                    failed = Some((
                        lemma.proof.len(),
                        "proof must end with a successful `iso`".to_owned(),
                    ));
                }
            }
        }
        let millis = begun.elapsed().as_millis();
        match failed {
            None => {
                session.admit(lemma);
                reports.push(LemmaReport {
                    name: lemma.name.clone(),
                    status: "ok".into(),
                    failed_step: None,
                    reason: None,
                    millis,
                });
            }
            Some((step, reason)) => reports.push(LemmaReport {
                name: lemma.name.clone(),
                status: "failed".into(),
                failed_step: Some(step),
                reason: Some(reason),
                millis,
            }),
        }
    }

    let oracle = options.oracle.map(|config| {
        let mut verdicts = Vec::new();
        for rule in &signature.rules {
            verdicts.push(OracleReport {
                name: rule.name.clone(),
                verdict: oracle_check(signature, &rule.lhs, &rule.rhs, config.trials, config.seed),
            });
        }
        for lemma in lemmas {
            verdicts.push(OracleReport {
                name: lemma.name.clone(),
                verdict: oracle_check(
                    signature,
                    &lemma.lhs,
                    &lemma.rhs,
                    config.trials,
                    config.seed,
                ),
            });
        }
        verdicts
    });

    Ok(CheckReport { theory: signature.name.clone(), lemmas: reports, oracle })
}

/// Outcome of randomized identity testing on one equation.
#[derive(Clone, Debug, Serialize, PartialEq)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum OracleVerdict {
    /// The sides are isomorphic as graphs, so the equation holds under
    /// every interpretation.
    Consistent,
    /// Not isomorphic, but no interpretation separated the sides.
    CounterexampleFree { trials: u32 },
    /// Entries differ under the recorded trial, or the shapes already
    /// disagree.
    Refuted { trial: u32, seed: u64, reason: String },
}

/// Randomized prime-field interpretation of a signature's generators,
/// keyed by generator name, over the two-valued index set.
pub fn randomized_interpretation<L: Label>(
    signature: &Signature<L>,
    seed: u64,
) -> Interpretation<L, Fp> {
    randomized_interpretation_with(signature, seed, IndexSet::qubit())
}

/// As [`randomized_interpretation`] with a chosen index set.
pub fn randomized_interpretation_with<L: Label>(
    signature: &Signature<L>,
    seed: u64,
    index: IndexSet,
) -> Interpretation<L, Fp> {
    let generators = signature.generators.clone();
    Interpretation::new(index.clone(), move |label: &L| {
        generators
            .iter()
            .find(|g| g.label.equiv(label))
            .map(|g| seeded_tensor_family(seed, &g.name, &index))
    })
}

/// Evaluate an equation under randomized interpretations.
///
/// Isomorphic sides are `Consistent` without any sampling. Shape or type
/// errors refute immediately. Otherwise the equation is evaluated under
/// `trials` seeded interpretations; per-trial collision probability is
/// bounded by (polynomial degree)/p with degree at most the edge count.
/// The oracle certifies only isomorphism-closeable equations - a theory's
/// axioms are generally `Refuted` here, which is expected and harmless.
pub fn oracle_check<L: Label>(
    signature: &Signature<L>,
    lhs: &Term<L>,
    rhs: &Term<L>,
    trials: u32,
    seed: u64,
) -> OracleVerdict {
    for term in [lhs, rhs] {
        if let Err(e) = signature.typecheck(term) {
            return OracleVerdict::Refuted { trial: 0, seed, reason: e.to_string() };
        }
    }
    if lhs.dom() != rhs.dom() || lhs.cod() != rhs.cod() {
        return OracleVerdict::Refuted {
            trial: 0,
            seed,
            reason: format!(
                "shape mismatch: {} -> {} vs {} -> {}",
                lhs.dom(),
                lhs.cod(),
                rhs.dom(),
                rhs.cod()
            ),
        };
    }
    if find_isomorphism(&term_to_graph(lhs), &term_to_graph(rhs)).is_some() {
        return OracleVerdict::Consistent;
    }
    for trial in 0..trials {
        let trial_seed = seed.wrapping_add(trial as u64);
        let interp = randomized_interpretation(signature, trial_seed);
        let a = term_semantics(lhs, &interp).expect("typechecked generators are interpreted");
        let b = term_semantics(rhs, &interp).expect("typechecked generators are interpreted");
        if !a.equiv(&b) {
            return OracleVerdict::Refuted {
                trial: trial + 1,
                seed: trial_seed,
                reason: "tensor entries differ".to_owned(),
            };
        }
    }
    OracleVerdict::CounterexampleFree { trials }
}

#[derive(Debug, Error)]
pub enum ModelCheckError {
    #[error(transparent)]
    Type(#[from] TypeError),
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
}

/// Do both sides evaluate to equivalent tensors under a concrete
/// interpretation? Scalar equivalence comes from the semiring (toleranced
/// for floating carriers); [`concrete_model_check_by`] takes a custom
/// comparison.
pub fn concrete_model_check<L: Label, S: Semiring>(
    signature: &Signature<L>,
    interp: &Interpretation<L, S>,
    lhs: &Term<L>,
    rhs: &Term<L>,
) -> Result<bool, ModelCheckError> {
    concrete_model_check_by(signature, interp, lhs, rhs, S::equiv)
}

/// As [`concrete_model_check`] with a caller-chosen entry comparison.
pub fn concrete_model_check_by<L: Label, S: Semiring>(
    signature: &Signature<L>,
    interp: &Interpretation<L, S>,
    lhs: &Term<L>,
    rhs: &Term<L>,
    eq: impl Fn(&S, &S) -> bool,
) -> Result<bool, ModelCheckError> {
    signature.typecheck(lhs)?;
    signature.typecheck(rhs)?;
    if lhs.dom() != rhs.dom() || lhs.cod() != rhs.cod() {
        return Ok(false);
    }
    let a = term_semantics(lhs, interp)?;
    let b = term_semantics(rhs, interp)?;
    Ok(a.equiv_by(&b, eq))
}
