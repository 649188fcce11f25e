//! Recursive-descent parser for theory files.
//!
//! ```text
//! file   := header? decl*
//! header := "theory" NAME
//! decl   := "gen" NAME ":" INT "->" INT
//!         | "rule" NAME ":" term "=" term
//!         | "lemma" NAME ":" term "=" term "proof" step* "qed"
//! term   := factor (";" factor)*
//! factor := atom ("*" atom)*
//! atom   := "id" INT | "sw" INT INT | "cup" INT | "cap" INT
//!         | NAME | "(" term ")"
//! step   := "rw" "-"? NAME ("@" INT)? ("in" ("lhs"|"rhs"))? | "iso"
//! ```
//!
//! `*` binds tighter than `;`. Comments run from `#` to end of line.

use crate::ast::{Decl, SideAst, Spanned, StepAst, TermAst, TheoryFileAst};
use crate::lexer::{tokenize, Diagnostic, Span, Token, TokenKind};

const KEYWORDS: &[&str] = &[
    "theory", "gen", "rule", "lemma", "proof", "qed", "rw", "iso", "in", "lhs", "rhs", "id", "sw",
    "cup", "cap",
];

pub fn parse(source: &str) -> Result<TheoryFileAst, Diagnostic> {
    let tokens = tokenize(source)?;
    Parser { tokens, pos: 0 }.file()
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn peek_ident(&self) -> Option<&str> {
        match self.peek() {
            Some(Token { kind: TokenKind::Ident(s), .. }) => Some(s),
            _ => None,
        }
    }

    fn here(&self) -> Span {
        self.peek().map(|t| t.span).unwrap_or_else(|| {
            self.tokens.last().map(|t| t.span).unwrap_or(Span { line: 1, col: 1 })
        })
    }

    fn fail<T>(&self, message: impl Into<String>) -> Result<T, Diagnostic> {
        Err(Diagnostic::new(self.here(), message))
    }

    fn expect_kind(&mut self, kind: &TokenKind, what: &str) -> Result<Span, Diagnostic> {
        match self.peek() {
            Some(t) if t.kind == *kind => {
                let span = t.span;
                self.pos += 1;
                Ok(span)
            }
            Some(t) => Err(Diagnostic::new(t.span, format!("expected {what}, found {}", t.kind))),
            None => self.fail(format!("expected {what}, found end of file")),
        }
    }

    fn expect_int(&mut self, what: &str) -> Result<(usize, Span), Diagnostic> {
        match self.peek() {
            Some(Token { kind: TokenKind::Int(value), span }) => {
                let out = (*value, *span);
                self.pos += 1;
                Ok(out)
            }
            Some(t) => Err(Diagnostic::new(t.span, format!("expected {what}, found {}", t.kind))),
            None => self.fail(format!("expected {what}, found end of file")),
        }
    }

    fn expect_name(&mut self, what: &str) -> Result<Spanned<String>, Diagnostic> {
        match self.peek() {
            Some(Token { kind: TokenKind::Ident(name), span }) => {
                if KEYWORDS.contains(&name.as_str()) {
                    return Err(Diagnostic::new(
                        *span,
                        format!("`{name}` is a keyword and cannot be used as {what}"),
                    ));
                }
                let out = Spanned { node: name.clone(), span: *span };
                self.pos += 1;
                Ok(out)
            }
            Some(t) => Err(Diagnostic::new(t.span, format!("expected {what}, found {}", t.kind))),
            None => self.fail(format!("expected {what}, found end of file")),
        }
    }

    fn eat_keyword(&mut self, word: &str) -> bool {
        if self.peek_ident() == Some(word) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn file(&mut self) -> Result<TheoryFileAst, Diagnostic> {
        let name = if self.eat_keyword("theory") {
            Some(self.expect_name("a theory name")?)
        } else {
            None
        };
        let mut decls = Vec::new();
        while let Some(token) = self.peek() {
            match &token.kind {
                TokenKind::Ident(word) if word == "gen" => {
                    self.pos += 1;
                    decls.push(self.gen_decl()?);
                }
                TokenKind::Ident(word) if word == "rule" => {
                    self.pos += 1;
                    decls.push(self.rule_decl()?);
                }
                TokenKind::Ident(word) if word == "lemma" => {
                    self.pos += 1;
                    decls.push(self.lemma_decl()?);
                }
                other => {
                    return Err(Diagnostic::new(
                        token.span,
                        format!("expected `gen`, `rule`, or `lemma`, found {other}"),
                    ));
                }
            }
        }
        Ok(TheoryFileAst { name, decls })
    }

    fn gen_decl(&mut self) -> Result<Decl, Diagnostic> {
        let name = self.expect_name("a generator name")?;
        self.expect_kind(&TokenKind::Colon, "`:`")?;
        let (inputs, _) = self.expect_int("the input arity")?;
        self.expect_kind(&TokenKind::Arrow, "`->`")?;
        let (outputs, _) = self.expect_int("the output arity")?;
        Ok(Decl::Gen { name, inputs, outputs })
    }

    fn rule_decl(&mut self) -> Result<Decl, Diagnostic> {
        let name = self.expect_name("a rule name")?;
        self.expect_kind(&TokenKind::Colon, "`:`")?;
        let lhs = self.term()?;
        self.expect_kind(&TokenKind::Equals, "`=`")?;
        let rhs = self.term()?;
        Ok(Decl::Rule { name, lhs, rhs })
    }

    fn lemma_decl(&mut self) -> Result<Decl, Diagnostic> {
        let name = self.expect_name("a lemma name")?;
        self.expect_kind(&TokenKind::Colon, "`:`")?;
        let lhs = self.term()?;
        self.expect_kind(&TokenKind::Equals, "`=`")?;
        let rhs = self.term()?;
        if !self.eat_keyword("proof") {
            return self.fail("expected `proof`");
        }
        let mut proof = Vec::new();
        loop {
            if self.eat_keyword("qed") {
                break;
            }
            let Some(token) = self.peek().cloned() else {
                return self.fail("expected a proof step or `qed`, found end of file");
            };
            let span = token.span;
            if self.eat_keyword("iso") {
                proof.push(StepAst::Iso { span });
            } else if self.eat_keyword("rw") {
                proof.push(self.rw_step(span)?);
            } else {
                return Err(Diagnostic::new(
                    span,
                    format!("expected `rw`, `iso`, or `qed`, found {}", token.kind),
                ));
            }
        }
        Ok(Decl::Lemma { name, lhs, rhs, proof })
    }

    fn rw_step(&mut self, span: Span) -> Result<StepAst, Diagnostic> {
        let reverse = matches!(self.peek(), Some(Token { kind: TokenKind::Dash, .. }));
        if reverse {
            self.pos += 1;
        }
        let rule = self.expect_name("a rule name")?;
        let occurrence = if matches!(self.peek(), Some(Token { kind: TokenKind::At, .. })) {
            self.pos += 1;
            let (k, at_span) = self.expect_int("an occurrence number after `@`")?;
            if k == 0 {
                return Err(Diagnostic::new(at_span, "occurrences are numbered from 1"));
            }
            Some(k)
        } else {
            None
        };
        let side = if self.eat_keyword("in") {
            if self.eat_keyword("lhs") {
                Some(SideAst::Lhs)
            } else if self.eat_keyword("rhs") {
                Some(SideAst::Rhs)
            } else {
                return self.fail("expected `lhs` or `rhs` after `in`");
            }
        } else {
            None
        };
        Ok(StepAst::Rw { reverse, rule, occurrence, side, span })
    }

    fn term(&mut self) -> Result<TermAst, Diagnostic> {
        let mut acc = self.factor()?;
        while matches!(self.peek(), Some(Token { kind: TokenKind::Semi, .. })) {
            self.pos += 1;
            let rhs = self.factor()?;
            acc = TermAst::Compose(Box::new(acc), Box::new(rhs));
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<TermAst, Diagnostic> {
        let mut acc = self.atom()?;
        while matches!(self.peek(), Some(Token { kind: TokenKind::Star, .. })) {
            self.pos += 1;
            let rhs = self.atom()?;
            acc = TermAst::Stack(Box::new(acc), Box::new(rhs));
        }
        Ok(acc)
    }

    fn atom(&mut self) -> Result<TermAst, Diagnostic> {
        match self.peek().cloned() {
            Some(Token { kind: TokenKind::LParen, .. }) => {
                self.pos += 1;
                let inner = self.term()?;
                self.expect_kind(&TokenKind::RParen, "`)`")?;
                Ok(inner)
            }
            Some(Token { kind: TokenKind::Ident(word), span }) => match word.as_str() {
                "id" => {
                    self.pos += 1;
                    let (n, _) = self.expect_int("a wire count after `id`")?;
                    Ok(TermAst::Id(n, span))
                }
                "sw" => {
                    self.pos += 1;
                    let (n, _) = self.expect_int("the first wire count after `sw`")?;
                    let (m, _) = self.expect_int("the second wire count after `sw`")?;
                    Ok(TermAst::Swap(n, m, span))
                }
                "cup" => {
                    self.pos += 1;
                    let (n, _) = self.expect_int("a wire count after `cup`")?;
                    Ok(TermAst::Cup(n, span))
                }
                "cap" => {
                    self.pos += 1;
                    let (n, _) = self.expect_int("a wire count after `cap`")?;
                    Ok(TermAst::Cap(n, span))
                }
                _ if KEYWORDS.contains(&word.as_str()) => {
                    Err(Diagnostic::new(span, format!("`{word}` cannot appear inside a term")))
                }
                _ => {
                    self.pos += 1;
                    Ok(TermAst::Name(word, span))
                }
            },
            Some(token) => {
                Err(Diagnostic::new(token.span, format!("expected a term, found {}", token.kind)))
            }
            None => self.fail("expected a term, found end of file"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_precedence() {
        let ast = parse("rule r : a ; b * c ; d = e").unwrap();
        let Decl::Rule { lhs, .. } = &ast.decls[0] else { panic!() };
        // a ; (b * c) ; d, left-associated composition
        match lhs {
            TermAst::Compose(first, d) => {
                assert!(matches!(**d, TermAst::Name(ref n, _) if n == "d"));
                match &**first {
                    TermAst::Compose(a, bc) => {
                        assert!(matches!(**a, TermAst::Name(ref n, _) if n == "a"));
                        assert!(matches!(**bc, TermAst::Stack(_, _)));
                    }
                    other => panic!("unexpected shape {other:?}"),
                }
            }
            other => panic!("unexpected shape {other:?}"),
        }
    }

    #[test]
    fn missing_integer_is_reported_at_position() {
        let err = parse("gen m : 2 ->").unwrap_err();
        assert_eq!(err.span.line, 1);
        assert!(err.message.contains("output arity"), "{err}");
    }

    #[test]
    fn step_forms() {
        let src = "lemma l : a = a proof rw - f @ 2 in rhs rw g iso qed";
        let ast = parse(&format!("gen a : 1 -> 1\ngen f : 1 -> 1\ngen g : 1 -> 1\n{src}")).unwrap();
        let Decl::Lemma { proof, .. } = &ast.decls[3] else { panic!() };
        assert_eq!(proof.len(), 3);
        assert!(matches!(
            &proof[0],
            StepAst::Rw { reverse: true, occurrence: Some(2), side: Some(SideAst::Rhs), .. }
        ));
        assert!(matches!(
            &proof[1],
            StepAst::Rw { reverse: false, occurrence: None, side: None, .. }
        ));
        assert!(matches!(&proof[2], StepAst::Iso { .. }));
    }

    #[test]
    fn keywords_are_not_names() {
        assert!(parse("gen id : 1 -> 1").is_err());
        assert!(parse("rule r : proof = proof").is_err());
    }

    #[test]
    fn occurrence_zero_rejected() {
        let err = parse("gen a : 1 -> 1\nlemma l : a = a proof rw f @ 0 iso qed").unwrap_err();
        assert!(err.message.contains("numbered from 1"));
    }
}
