//! Name resolution and shape checking: syntax tree to core theory.
//!
//! Collects as many diagnostics as it can instead of stopping at the
//! first; a successful resolution yields a signature that always passes
//! core validation.

use std::collections::BTreeSet;

use strand_core::aprop::Term;
use strand_core::rewrite::Rule;
use strand_core::theory::{Lemma, ProofStep, Side, Signature};

use crate::ast::{Decl, SideAst, Spanned, StepAst, TermAst, TheoryFileAst};
use crate::lexer::Diagnostic;

#[derive(Debug)]
pub struct Resolved {
    pub signature: Signature<String>,
    pub lemmas: Vec<Lemma<String>>,
}

pub fn resolve(ast: &TheoryFileAst, default_name: &str) -> Result<Resolved, Vec<Diagnostic>> {
    let mut diagnostics = Vec::new();
    let mut signature = Signature::new(
        ast.name.as_ref().map(|n| n.node.clone()).unwrap_or_else(|| default_name.to_owned()),
    );
    let mut lemmas: Vec<Lemma<String>> = Vec::new();
    let mut known_names: BTreeSet<String> = BTreeSet::new();
    // rules and previously resolved lemmas, in file order
    let mut available_rules: BTreeSet<String> = BTreeSet::new();

    for decl in &ast.decls {
        match decl {
            Decl::Gen { name, inputs, outputs } => {
                if !known_names.insert(name.node.clone()) {
                    diagnostics.push(Diagnostic::new(
                        name.span,
                        format!("`{}` is already defined", name.node),
                    ));
                    continue;
                }
                signature.declare(name.node.clone(), name.node.clone(), *inputs, *outputs);
            }
            Decl::Rule { name, lhs, rhs } => {
                if !known_names.insert(name.node.clone()) {
                    diagnostics.push(Diagnostic::new(
                        name.span,
                        format!("`{}` is already defined", name.node),
                    ));
                    continue;
                }
                let Some((lhs, rhs)) = lower_equation(lhs, rhs, &signature, name, &mut diagnostics)
                else {
                    continue;
                };
                signature.add_rule(Rule { name: name.node.clone(), lhs, rhs });
                available_rules.insert(name.node.clone());
            }
            Decl::Lemma { name, lhs, rhs, proof } => {
                if !known_names.insert(name.node.clone()) {
                    diagnostics.push(Diagnostic::new(
                        name.span,
                        format!("`{}` is already defined", name.node),
                    ));
                    continue;
                }
                let Some((lhs, rhs)) = lower_equation(lhs, rhs, &signature, name, &mut diagnostics)
                else {
                    continue;
                };
                let mut steps = Vec::with_capacity(proof.len());
                for step in proof {
                    match step {
                        StepAst::Iso { .. } => steps.push(ProofStep::Iso),
                        StepAst::Rw { reverse, rule, occurrence, side, .. } => {
                            if !available_rules.contains(&rule.node) {
                                diagnostics.push(Diagnostic::new(
                                    rule.span,
                                    format!(
                                        "unknown rule `{}`: not a rule or an earlier lemma",
                                        rule.node
                                    ),
                                ));
                            }
                            steps.push(ProofStep::Rewrite {
                                rule: rule.node.clone(),
                                reverse: *reverse,
                                occurrence: occurrence.unwrap_or(1),
                                side: match side.unwrap_or(SideAst::Lhs) {
                                    SideAst::Lhs => Side::Lhs,
                                    SideAst::Rhs => Side::Rhs,
                                },
                            });
                        }
                    }
                }
                lemmas.push(Lemma { name: name.node.clone(), lhs, rhs, proof: steps });
                available_rules.insert(name.node.clone());
            }
        }
    }

    if diagnostics.is_empty() {
        Ok(Resolved { signature, lemmas })
    } else {
        Err(diagnostics)
    }
}

fn lower_equation(
    lhs: &TermAst,
    rhs: &TermAst,
    signature: &Signature<String>,
    owner: &Spanned<String>,
    diagnostics: &mut Vec<Diagnostic>,
) -> Option<(Term<String>, Term<String>)> {
    let lhs = lower_term(lhs, signature, diagnostics);
    let rhs = lower_term(rhs, signature, diagnostics);
    let (lhs, rhs) = (lhs?, rhs?);
    if lhs.dom() != rhs.dom() || lhs.cod() != rhs.cod() {
        diagnostics.push(Diagnostic::new(
            owner.span,
            format!(
                "`{}`: sides have different shapes: {} -> {} vs {} -> {}",
                owner.node,
                lhs.dom(),
                lhs.cod(),
                rhs.dom(),
                rhs.cod()
            ),
        ));
        return None;
    }
    Some((lhs, rhs))
}

fn lower_term(
    ast: &TermAst,
    signature: &Signature<String>,
    diagnostics: &mut Vec<Diagnostic>,
) -> Option<Term<String>> {
    match ast {
        TermAst::Id(n, _) => Some(Term::Id(*n)),
        TermAst::Swap(n, m, _) => Some(Term::Swap(*n, *m)),
        TermAst::Cup(n, _) => Some(Term::Cup(*n)),
        TermAst::Cap(n, _) => Some(Term::Cap(*n)),
        TermAst::Name(name, span) => match signature.generator_by_name(name) {
            Some(decl) => Some(Term::Gen(name.clone(), decl.inputs, decl.outputs)),
            None => {
                diagnostics.push(Diagnostic::new(*span, format!("unknown generator `{name}`")));
                None
            }
        },
        TermAst::Compose(a, b) => {
            let left = lower_term(a, signature, diagnostics);
            let right = lower_term(b, signature, diagnostics);
            let (left, right) = (left?, right?);
            if left.cod() != right.dom() {
                diagnostics.push(Diagnostic::new(
                    b.span(),
                    format!(
                        "cannot compose: left side ends with {} wire(s), right side starts with {}",
                        left.cod(),
                        right.dom()
                    ),
                ));
                return None;
            }
            Some(left.then(right))
        }
        TermAst::Stack(a, b) => {
            let left = lower_term(a, signature, diagnostics);
            let right = lower_term(b, signature, diagnostics);
            Some(left?.beside(right?))
        }
    }
}
