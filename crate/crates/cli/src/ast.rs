//! Syntax tree for theory files, with source spans on every node, and the
//! pretty-printer that inverts the parser.

use std::fmt::Write;

use crate::lexer::Span;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Spanned<T> {
    pub node: T,
    pub span: Span,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TheoryFileAst {
    /// Optional `theory NAME` header.
    pub name: Option<Spanned<String>>,
    pub decls: Vec<Decl>,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Decl {
    Gen { name: Spanned<String>, inputs: usize, outputs: usize },
    Rule { name: Spanned<String>, lhs: TermAst, rhs: TermAst },
    Lemma { name: Spanned<String>, lhs: TermAst, rhs: TermAst, proof: Vec<StepAst> },
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum TermAst {
    Id(usize, Span),
    Swap(usize, usize, Span),
    Cup(usize, Span),
    Cap(usize, Span),
    Name(String, Span),
    Compose(Box<TermAst>, Box<TermAst>),
    Stack(Box<TermAst>, Box<TermAst>),
}

impl TermAst {
    pub fn span(&self) -> Span {
        match self {
            TermAst::Id(_, s)
            | TermAst::Swap(_, _, s)
            | TermAst::Cup(_, s)
            | TermAst::Cap(_, s)
            | TermAst::Name(_, s) => *s,
            TermAst::Compose(a, _) | TermAst::Stack(a, _) => a.span(),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SideAst {
    Lhs,
    Rhs,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum StepAst {
    Rw {
        reverse: bool,
        rule: Spanned<String>,
        occurrence: Option<usize>,
        side: Option<SideAst>,
        span: Span,
    },
    Iso {
        span: Span,
    },
}

pub fn print_theory(ast: &TheoryFileAst) -> String {
    let mut out = String::new();
    if let Some(name) = &ast.name {
        let _ = writeln!(out, "theory {}", name.node);
        let _ = writeln!(out);
    }
    for decl in &ast.decls {
        match decl {
            Decl::Gen { name, inputs, outputs } => {
                let _ = writeln!(out, "gen {} : {inputs} -> {outputs}", name.node);
            }
            Decl::Rule { name, lhs, rhs } => {
                let _ =
                    writeln!(out, "rule {} : {} = {}", name.node, print_term(lhs), print_term(rhs));
            }
            Decl::Lemma { name, lhs, rhs, proof } => {
                let _ = writeln!(
                    out,
                    "lemma {} : {} = {}",
                    name.node,
                    print_term(lhs),
                    print_term(rhs)
                );
                let _ = writeln!(out, "proof");
                for step in proof {
                    match step {
                        StepAst::Iso { .. } => {
                            let _ = writeln!(out, "  iso");
                        }
                        StepAst::Rw { reverse, rule, occurrence, side, .. } => {
                            let mut line = String::from("  rw ");
                            if *reverse {
                                line.push_str("- ");
                            }
                            line.push_str(&rule.node);
                            if let Some(k) = occurrence {
                                let _ = write!(line, " @ {k}");
                            }
                            if let Some(side) = side {
                                let _ = write!(
                                    line,
                                    " in {}",
                                    if *side == SideAst::Lhs { "lhs" } else { "rhs" }
                                );
                            }
                            let _ = writeln!(out, "{line}");
                        }
                    }
                }
                let _ = writeln!(out, "qed");
            }
        }
    }
    out
}

pub fn print_term(term: &TermAst) -> String {
    let mut out = String::new();
    print_term_into(term, false, &mut out);
    out
}

fn print_term_into(term: &TermAst, inside_stack: bool, out: &mut String) {
    match term {
        TermAst::Id(n, _) => {
            let _ = write!(out, "id {n}");
        }
        TermAst::Swap(n, m, _) => {
            let _ = write!(out, "sw {n} {m}");
        }
        TermAst::Cup(n, _) => {
            let _ = write!(out, "cup {n}");
        }
        TermAst::Cap(n, _) => {
            let _ = write!(out, "cap {n}");
        }
        TermAst::Name(name, _) => {
            let _ = write!(out, "{name}");
        }
        TermAst::Stack(a, b) => {
            print_term_into(a, true, out);
            let _ = write!(out, " * ");
            print_term_into(b, true, out);
        }
        TermAst::Compose(a, b) => {
            if inside_stack {
                let _ = write!(out, "(");
            }
            print_term_into(a, false, out);
            let _ = write!(out, " ; ");
            print_term_into(b, false, out);
            if inside_stack {
                let _ = write!(out, ")");
            }
        }
    }
}
