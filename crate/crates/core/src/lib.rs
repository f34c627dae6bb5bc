//! Resource-based Lexical-Functional Grammar.
//!
//! The toolkit has two halves. The resource half represents the
//! functional structure of a sentence as an f-term ([`fterm`]) and decides
//! grammaticality by searching for a reduction of that term to the single
//! resource `t` ([`reduce`]). The classical half pairs c-structures with
//! f-descriptions and solves them by minimal-model construction
//! ([`lfg`]). Both are driven by the same grammar files and chart parser
//! ([`grammar`]); [`oracle`] holds brute-force reference implementations
//! used by the test suites.

pub mod check;
pub mod fterm;
pub mod grammar;
pub mod lfg;
pub mod oracle;
pub mod reduce;

pub use check::{check_sentence, CheckReport, SentenceVerdict};
pub use fterm::{canonicalize, equal, parse_fterm, serialize_fterm, Decls, FTerm};
pub use grammar::{
    instantiate_lfg, instantiate_rlfg, load_grammar, parse_sentence, CStructure, Grammar, Mode,
};
pub use lfg::{solve, solve_relaxed, FDescription, FStructure};
pub use reduce::{is_grammatical, reduce_search, ReductionResult, SearchConfig, Verdict};
