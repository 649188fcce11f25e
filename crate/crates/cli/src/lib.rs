//! Theory-file front end: lexer, parser, name resolution, and the
//! command implementations behind the `strand` binary.
//!
//! The file format is a flat list of declarations:
//!
//! ```text
//! theory frobenius          # optional header
//! gen m : 2 -> 1            # generator with arity
//! rule unitL : u * id 1 ; m = id 1
//! lemma frobR : id 1 * n ; m * id 1 = m ; n
//! proof
//!   rw - frob               # reverse rewrite, occurrence 1, lhs
//!   rw frobL
//!   iso
//! qed
//! ```

pub mod ast;
pub mod commands;
pub mod lexer;
pub mod parser;
pub mod resolve;
