//! F-terms: resource structures built from typed atoms, multisets,
//! attribute embeddings, linear implications, optional resources and
//! path equations.
//!
//! Every term handed out by this module is in canonical form: nested
//! multisets are flattened, singleton multisets collapse to their sole
//! element, and multiset elements are sorted by the token sequence of
//! their serialization. Two terms are equal exactly when their canonical
//! forms serialize to the same string, so derived `Eq`/`Hash` on canonical
//! terms coincide with resource identity.

mod decls;
mod parse;

use std::cmp::Ordering;
use std::fmt;

pub use decls::{Decls, DeclsError, TypeDecl, GOAL_TYPE, METAVARIABLE};
pub use parse::{parse_fterm, parse_fterm_untyped, parse_template, tokenize, FTermError, Token};

/// A sequence of attribute names, as used on either side of a path equation.
pub type AttributePath = Vec<String>;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FTerm {
    Atom(String),
    Multiset(Vec<FTerm>),
    Embed(String, Box<FTerm>),
    Limp(Box<FTerm>, Box<FTerm>),
    Opt(Box<FTerm>),
    PathEq(AttributePath, AttributePath),
}

impl FTerm {
    pub fn atom(name: impl Into<String>) -> Self {
        FTerm::Atom(name.into())
    }

    pub fn embed(attr: impl Into<String>, body: FTerm) -> Self {
        FTerm::Embed(attr.into(), Box::new(body))
    }

    pub fn limp(antecedent: FTerm, consequent: FTerm) -> Self {
        FTerm::Limp(Box::new(antecedent), Box::new(consequent))
    }

    pub fn opt(body: FTerm) -> Self {
        FTerm::Opt(Box::new(body))
    }

    pub fn path_eq<S: Into<String>>(
        src: impl IntoIterator<Item = S>,
        dst: impl IntoIterator<Item = S>,
    ) -> Self {
        FTerm::PathEq(
            src.into_iter().map(Into::into).collect(),
            dst.into_iter().map(Into::into).collect(),
        )
    }

    pub fn multiset(elements: impl IntoIterator<Item = FTerm>) -> Self {
        FTerm::Multiset(elements.into_iter().collect())
    }

    /// The empty multiset, the unit of multiset union.
    pub fn unit() -> Self {
        FTerm::Multiset(Vec::new())
    }

    /// The sentence goal resource `t`.
    pub fn goal() -> Self {
        FTerm::Atom(GOAL_TYPE.to_string())
    }

    pub fn is_goal(&self) -> bool {
        matches!(self, FTerm::Atom(name) if name == GOAL_TYPE)
    }

    pub fn is_unit(&self) -> bool {
        matches!(self, FTerm::Multiset(es) if es.is_empty())
    }

    /// Views a term as a multiset of elements: a multiset yields its
    /// elements, any other term is a singleton.
    pub fn elements(&self) -> &[FTerm] {
        match self {
            FTerm::Multiset(es) => es,
            other => std::slice::from_ref(other),
        }
    }

    pub fn canonicalize(&self) -> FTerm {
        canonicalize(self)
    }

    /// Number of constructor nodes, counting every multiset element.
    pub fn size(&self) -> usize {
        match self {
            FTerm::Atom(_) | FTerm::PathEq(..) => 1,
            FTerm::Multiset(es) => 1 + es.iter().map(FTerm::size).sum::<usize>(),
            FTerm::Embed(_, b) | FTerm::Opt(b) => 1 + b.size(),
            FTerm::Limp(a, b) => 1 + a.size() + b.size(),
        }
    }

    /// Number of linear implications and path equations that can still be
    /// consumed, i.e. those not nested inside another implication.
    pub fn consumable_count(&self) -> usize {
        match self {
            FTerm::Atom(_) => 0,
            FTerm::PathEq(..) | FTerm::Limp(..) => 1,
            FTerm::Multiset(es) => es.iter().map(FTerm::consumable_count).sum(),
            FTerm::Embed(_, b) | FTerm::Opt(b) => b.consumable_count(),
        }
    }

    /// Replaces every occurrence of the atom `name` by `replacement`.
    pub fn substitute(&self, name: &str, replacement: &FTerm) -> FTerm {
        match self {
            FTerm::Atom(a) if a == name => replacement.clone(),
            FTerm::Atom(_) | FTerm::PathEq(..) => self.clone(),
            FTerm::Multiset(es) => {
                FTerm::Multiset(es.iter().map(|e| e.substitute(name, replacement)).collect())
            }
            FTerm::Embed(f, b) => FTerm::embed(f.clone(), b.substitute(name, replacement)),
            FTerm::Limp(a, b) => FTerm::limp(
                a.substitute(name, replacement),
                b.substitute(name, replacement),
            ),
            FTerm::Opt(b) => FTerm::opt(b.substitute(name, replacement)),
        }
    }

    pub fn occurrences(&self, name: &str) -> usize {
        match self {
            FTerm::Atom(a) => usize::from(a == name),
            FTerm::PathEq(..) => 0,
            FTerm::Multiset(es) => es.iter().map(|e| e.occurrences(name)).sum(),
            FTerm::Embed(_, b) | FTerm::Opt(b) => b.occurrences(name),
            FTerm::Limp(a, b) => a.occurrences(name) + b.occurrences(name),
        }
    }
}

/// Brings a term into canonical form. Idempotent.
pub fn canonicalize(term: &FTerm) -> FTerm {
    match term {
        FTerm::Atom(_) | FTerm::PathEq(..) => term.clone(),
        FTerm::Embed(f, b) => FTerm::embed(f.clone(), canonicalize(b)),
        FTerm::Limp(a, b) => FTerm::limp(canonicalize(a), canonicalize(b)),
        FTerm::Opt(b) => FTerm::opt(canonicalize(b)),
        FTerm::Multiset(es) => {
            let mut flat = Vec::with_capacity(es.len());
            for e in es {
                match canonicalize(e) {
                    FTerm::Multiset(inner) => flat.extend(inner),
                    other => flat.push(other),
                }
            }
            if flat.len() == 1 {
                return flat.pop().unwrap();
            }
            sort_elements(&mut flat);
            FTerm::Multiset(flat)
        }
    }
}

/// Sorts multiset elements by the token sequence of their serialization,
/// falling back to the full string.
fn sort_elements(elements: &mut [FTerm]) {
    let mut keyed: Vec<(String, FTerm)> = elements
        .iter()
        .map(|e| (serialize_fterm(e), e.clone()))
        .collect();
    keyed.sort_by(|(a, _), (b, _)| compare_serialized(a, b));
    for (slot, (_, e)) in elements.iter_mut().zip(keyed) {
        *slot = e;
    }
}

/// Total order on serialized terms: token-wise lexicographic, then bytewise.
pub fn compare_serialized(a: &str, b: &str) -> Ordering {
    let ta = token_texts(a);
    let tb = token_texts(b);
    ta.cmp(&tb).then_with(|| a.cmp(b))
}

fn token_texts(s: &str) -> Vec<String> {
    match tokenize(s) {
        Ok(tokens) => tokens.into_iter().map(|(tok, _)| tok.text()).collect(),
        Err(_) => vec![s.to_string()],
    }
}

/// Resource identity: canonical forms serialize identically.
pub fn equal(a: &FTerm, b: &FTerm) -> bool {
    serialize_fterm(&canonicalize(a)) == serialize_fterm(&canonicalize(b))
}

/// Deterministic, round-trippable text for a (canonical) term.
pub fn serialize_fterm(term: &FTerm) -> String {
    let mut out = String::new();
    write_list(term, &mut out);
    out
}

impl fmt::Display for FTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&serialize_fterm(self))
    }
}

fn write_list(term: &FTerm, out: &mut String) {
    match term {
        FTerm::Multiset(es) if es.is_empty() => out.push_str("()"),
        FTerm::Multiset(es) => {
            for (i, e) in es.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write_element(e, out);
            }
        }
        other => write_element(other, out),
    }
}

fn write_parenthesized(term: &FTerm, out: &mut String) {
    out.push('(');
    match term {
        FTerm::Multiset(es) if es.is_empty() => {}
        _ => write_list(term, out),
    }
    out.push(')');
}

fn write_element(term: &FTerm, out: &mut String) {
    match term {
        FTerm::PathEq(src, dst) => {
            out.push_str(&src.join(" "));
            out.push_str(" = ");
            out.push_str(&dst.join(" "));
        }
        FTerm::Limp(a, b) => {
            match a.as_ref() {
                FTerm::Limp(..) | FTerm::PathEq(..) | FTerm::Multiset(_) => {
                    write_parenthesized(a, out)
                }
                other => write_embedding(other, out),
            }
            out.push_str(" -o ");
            match b.as_ref() {
                FTerm::PathEq(..) | FTerm::Multiset(_) => write_parenthesized(b, out),
                other => write_element(other, out),
            }
        }
        other => write_embedding(other, out),
    }
}

fn write_embedding(term: &FTerm, out: &mut String) {
    match term {
        FTerm::Atom(name) => out.push_str(name),
        FTerm::Embed(attr, body) => {
            out.push_str(attr);
            match body.as_ref() {
                FTerm::Atom(_) | FTerm::Embed(..) | FTerm::Opt(_) => {
                    out.push(' ');
                    write_embedding(body, out);
                }
                other => write_parenthesized(other, out),
            }
        }
        FTerm::Opt(body) => {
            write_parenthesized(body, out);
            out.push('?');
        }
        other => write_parenthesized(other, out),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> FTerm {
        parse_fterm_untyped(s).unwrap()
    }

    #[test]
    fn flattens_nested_multisets() {
        let t = FTerm::multiset([
            FTerm::multiset([FTerm::atom("b"), FTerm::atom("a")]),
            FTerm::atom("c"),
        ]);
        assert_eq!(
            canonicalize(&t),
            FTerm::multiset([FTerm::atom("a"), FTerm::atom("b"), FTerm::atom("c")])
        );
    }

    #[test]
    fn singleton_collapses() {
        let t = FTerm::multiset([FTerm::atom("x")]);
        assert_eq!(canonicalize(&t), FTerm::atom("x"));
        let nested = FTerm::multiset([FTerm::multiset([FTerm::multiset([FTerm::atom("x")])])]);
        assert_eq!(canonicalize(&nested), FTerm::atom("x"));
    }

    #[test]
    fn multiset_order_is_insignificant() {
        assert!(equal(&p("A, B"), &p("B, A")));
        assert!(equal(&p("NOM -o e"), &p("NOM -o e")));
        assert_eq!(
            canonicalize(&FTerm::multiset([FTerm::atom("b"), FTerm::atom("a")])),
            canonicalize(&FTerm::multiset([FTerm::atom("a"), FTerm::atom("b")]))
        );
    }

    #[test]
    fn multiplicity_is_significant() {
        assert!(!equal(&p("A"), &p("A, A")));
        assert!(!equal(&p("A, A"), &p("A, A, A")));
    }

    #[test]
    fn empty_multiset_is_not_goal() {
        assert!(!equal(&FTerm::unit(), &FTerm::goal()));
        assert_eq!(serialize_fterm(&FTerm::unit()), "()");
        // the unit vanishes inside a larger multiset
        let t = FTerm::multiset([FTerm::unit(), FTerm::atom("t")]);
        assert_eq!(canonicalize(&t), FTerm::goal());
    }

    #[test]
    fn serializes_nested_terms() {
        let root = FTerm::multiset([
            FTerm::limp(FTerm::embed("SUBJ", FTerm::atom("e")), FTerm::atom("t")),
            FTerm::embed(
                "SUBJ",
                FTerm::multiset([
                    FTerm::limp(FTerm::atom("NOM"), FTerm::atom("e")),
                    FTerm::atom("NOM"),
                ]),
            ),
        ]);
        assert_eq!(
            serialize_fterm(&canonicalize(&root)),
            "SUBJ(NOM, NOM -o e), SUBJ e -o t"
        );
        assert_eq!(serialize_fterm(&FTerm::goal()), "t");
        assert_eq!(serialize_fterm(&FTerm::opt(FTerm::atom("NOM"))), "(NOM)?");
    }

    #[test]
    fn serialization_parenthesizes_by_precedence() {
        let cases = [
            FTerm::embed("SUBJ", FTerm::limp(FTerm::atom("e"), FTerm::atom("t"))),
            FTerm::limp(
                FTerm::limp(FTerm::atom("a"), FTerm::atom("b")),
                FTerm::atom("c"),
            ),
            FTerm::limp(
                FTerm::atom("a"),
                FTerm::limp(FTerm::atom("b"), FTerm::atom("c")),
            ),
            FTerm::embed("F", FTerm::opt(FTerm::atom("x"))),
            FTerm::opt(FTerm::embed("F", FTerm::atom("x"))),
            FTerm::limp(FTerm::path_eq(["A"], ["B"]), FTerm::atom("c")),
            FTerm::embed("F", FTerm::path_eq(["A"], ["B", "C"])),
            FTerm::embed("F", FTerm::unit()),
            FTerm::limp(FTerm::unit(), FTerm::atom("t")),
        ];
        for case in cases {
            let text = serialize_fterm(&case);
            assert_eq!(p(&text), case, "round trip of {text}");
        }
        assert_eq!(
            serialize_fterm(&FTerm::limp(
                FTerm::atom("a"),
                FTerm::limp(FTerm::atom("b"), FTerm::atom("c"))
            )),
            "a -o b -o c"
        );
    }

    #[test]
    fn canonicalize_is_idempotent_on_examples() {
        for s in [
            "SUBJ(NOM, NOM -o e), SUBJ e -o t",
            "XCOMP t -o t, SUBJ = XCOMP SUBJ, SUBJ((NOM)?, ACC -o e)",
            "F(G(b, a), G(a)), (x, (y, z))?",
        ] {
            let once = p(s);
            assert_eq!(canonicalize(&once), once);
        }
    }

    #[test]
    fn consumable_count_ignores_nested_implications() {
        assert_eq!(p("OBJ e -o SUBJ e -o t, OBJ ACC").consumable_count(), 1);
        assert_eq!(
            p("SUBJ(NOM, NOM -o e), SUBJ e -o t, A = B").consumable_count(),
            3
        );
    }
}
