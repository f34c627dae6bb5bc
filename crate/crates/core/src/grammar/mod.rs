//! Grammar files, chart parsing and per-sentence instantiation.
//!
//! A grammar is either resource-based (`mode rlfg`), with f-term templates
//! as annotations, or classical (`mode lfg`), with equation schemata over
//! `^` and `v`. Parsing produces every c-structure for a token sequence;
//! instantiation turns a c-structure into the root f-term or the
//! f-description the checker works on.

mod chart;
mod load;

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::fterm::{canonicalize, FTerm, METAVARIABLE};
use crate::lfg::{FDescription, DOWN, UP};

pub use chart::parse_sentence;
pub use load::load_grammar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Annotations are f-term templates; sentences are checked by reduction.
    Rlfg,
    /// Annotations are equation schemata; sentences are checked by solving.
    Lfg,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Rlfg => "rlfg",
            Mode::Lfg => "lfg",
        })
    }
}

/// A rule annotation or lexical payload.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Annotation {
    Term(FTerm),
    Desc(FDescription),
}

impl fmt::Display for Annotation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Annotation::Term(t) => t.fmt(f),
            Annotation::Desc(d) => d.fmt(f),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RhsElement {
    pub category: String,
    pub optional: bool,
    pub annotation: Annotation,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    pub lhs: String,
    pub rhs: Vec<RhsElement>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexEntry {
    pub word: String,
    pub category: String,
    pub payload: Annotation,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Grammar {
    pub decls: crate::fterm::Decls,
    pub mode: Mode,
    pub start: String,
    pub rules: Vec<Rule>,
    pub lexicon: BTreeMap<String, Vec<LexEntry>>,
}

impl Grammar {
    /// Number of lexical entries (a word may have several).
    pub fn entry_count(&self) -> usize {
        self.lexicon.values().map(Vec::len).sum()
    }

    /// Distinct surface words.
    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.lexicon.keys().map(String::as_str)
    }

    pub fn parse(&self, tokens: &[&str]) -> Result<Vec<CStructure>, GrammarError> {
        parse_sentence(self, tokens)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GrammarError {
    #[error("line {line}, column {col}: {msg}")]
    Syntax {
        line: usize,
        col: usize,
        msg: String,
    },
    #[error("line {line}, column {col}: undeclared {kind} `{name}`")]
    Undeclared {
        line: usize,
        col: usize,
        kind: &'static str,
        name: String,
    },
    #[error("line {line}, column {col}: duplicate declaration of `{name}`")]
    Duplicate {
        line: usize,
        col: usize,
        name: String,
    },
    #[error("unknown word `{0}`")]
    UnknownWord(String),
    #[error("empty sentence")]
    EmptySentence,
    #[error("annotation is not usable in {0} mode")]
    ModeMismatch(Mode),
}

/// A parse tree. Leaves are preterminals carrying their word and lexical
/// payload; internal nodes record which grammar rule licensed them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CStructure {
    pub category: String,
    pub kind: NodeKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NodeKind {
    Leaf { word: String, payload: Annotation },
    Internal { rule: usize, children: Vec<Child> },
}

/// A daughter together with the annotation it receives from the rule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Child {
    pub annotation: Annotation,
    pub node: CStructure,
}

impl CStructure {
    /// The words at the leaves, left to right.
    pub fn leaves(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves<'a>(&'a self, out: &mut Vec<&'a str>) {
        match &self.kind {
            NodeKind::Leaf { word, .. } => out.push(word),
            NodeKind::Internal { children, .. } => {
                children.iter().for_each(|c| c.node.collect_leaves(out))
            }
        }
    }

    /// Categories on the single-daughter spine starting here.
    pub(crate) fn unary_spine(&self) -> Vec<&str> {
        let mut out = vec![self.category.as_str()];
        let mut cur = self;
        while let NodeKind::Internal { children, .. } = &cur.kind {
            if children.len() != 1 {
                break;
            }
            cur = &children[0].node;
            out.push(&cur.category);
        }
        out
    }
}

impl fmt::Display for CStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.category)?;
        match &self.kind {
            NodeKind::Leaf { word, .. } => write!(f, " {word}")?,
            NodeKind::Internal { children, .. } => {
                for c in children {
                    write!(f, " {}", c.node)?;
                }
            }
        }
        f.write_str(")")
    }
}

/// The root f-term of a resource-mode tree: each daughter's f-term is
/// plugged into its annotation template and the results are pooled.
pub fn instantiate_rlfg(tree: &CStructure) -> Result<FTerm, GrammarError> {
    fn go(node: &CStructure) -> Result<FTerm, GrammarError> {
        match &node.kind {
            NodeKind::Leaf { payload, .. } => match payload {
                Annotation::Term(t) => Ok(t.clone()),
                Annotation::Desc(_) => Err(GrammarError::ModeMismatch(Mode::Rlfg)),
            },
            NodeKind::Internal { children, .. } => {
                let mut parts = Vec::with_capacity(children.len());
                for c in children {
                    let Annotation::Term(template) = &c.annotation else {
                        return Err(GrammarError::ModeMismatch(Mode::Rlfg));
                    };
                    parts.push(template.substitute(METAVARIABLE, &go(&c.node)?));
                }
                Ok(FTerm::Multiset(parts))
            }
        }
    }
    Ok(canonicalize(&go(tree)?))
}

/// The f-description of a classical-mode tree. Nodes get variables `f1`,
/// `f2`, ... in pre-order; in a rule annotation `^` is the mother and `v`
/// the daughter, in a lexical payload both denote the preterminal. Every
/// annotation instance becomes its own site.
pub fn instantiate_lfg(tree: &CStructure) -> Result<FDescription, GrammarError> {
    struct State {
        next_var: usize,
        site: usize,
        parts: Vec<FDescription>,
    }

    fn fresh(st: &mut State) -> String {
        st.next_var += 1;
        format!("f{}", st.next_var)
    }

    fn bind(d: &FDescription, up: &str, down: &str, st: &mut State) -> FDescription {
        let out = d
            .map_vars(&|v| match v {
                UP => up.to_string(),
                DOWN => down.to_string(),
                other => other.to_string(),
            })
            .with_site(st.site);
        st.site += 1;
        out
    }

    fn push(st: &mut State, d: FDescription) {
        match d {
            FDescription::And(ds) => st.parts.extend(ds),
            other => st.parts.push(other),
        }
    }

    fn go(node: &CStructure, var: &str, st: &mut State) -> Result<(), GrammarError> {
        match &node.kind {
            NodeKind::Leaf { payload, .. } => {
                let Annotation::Desc(d) = payload else {
                    return Err(GrammarError::ModeMismatch(Mode::Lfg));
                };
                let d = bind(d, var, var, st);
                push(st, d);
            }
            NodeKind::Internal { children, .. } => {
                for c in children {
                    let Annotation::Desc(d) = &c.annotation else {
                        return Err(GrammarError::ModeMismatch(Mode::Lfg));
                    };
                    let child_var = fresh(st);
                    let d = bind(d, var, &child_var, st);
                    push(st, d);
                    go(&c.node, &child_var, st)?;
                }
            }
        }
        Ok(())
    }

    let mut st = State {
        next_var: 0,
        site: 0,
        parts: Vec::new(),
    };
    let root = fresh(&mut st);
    go(tree, &root, &mut st)?;
    Ok(FDescription::And(st.parts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fterm::parse_fterm_untyped;

    const SHE_SNORES: &str = "\
mode rlfg
start S
type e contentful
type t contentful
type NOM vacuous
attr SUBJ
cat S NP VP
S -> NP:{SUBJ(NOM, v)} VP:{v}
lex she NP {NOM -o e}
lex snores VP {SUBJ e -o t}
";

    #[test]
    fn instantiates_she_snores() {
        let g = load_grammar(SHE_SNORES).unwrap();
        let trees = g.parse(&["she", "snores"]).unwrap();
        assert_eq!(trees.len(), 1);
        assert_eq!(trees[0].to_string(), "(S (NP she) (VP snores))");
        let t = instantiate_rlfg(&trees[0]).unwrap();
        assert_eq!(t.to_string(), "SUBJ(NOM, NOM -o e), SUBJ e -o t");
        assert!(instantiate_lfg(&trees[0]).is_err());
    }

    #[test]
    fn identity_template_passes_payload_through() {
        let g = load_grammar(
            "mode rlfg\nstart S\ntype t contentful\ntype e contentful\ncat S V\nS -> V:{v}\nlex go V {e -o t}\n",
        )
        .unwrap();
        let trees = g.parse(&["go"]).unwrap();
        assert_eq!(
            instantiate_rlfg(&trees[0]).unwrap(),
            parse_fterm_untyped("e -o t").unwrap()
        );
    }

    #[test]
    fn lfg_variables_follow_preorder() {
        let g = load_grammar(
            "mode lfg\nstart S\nattr SUBJ PRED\nconst Sandy snore\ncat S NP VP\n\
             S -> NP:{(^ SUBJ)=v} VP:{^=v}\n\
             lex Sandy NP {(^ PRED)=Sandy}\nlex snores VP {(^ PRED)=snore}\n",
        )
        .unwrap();
        let trees = g.parse(&["Sandy", "snores"]).unwrap();
        let d = instantiate_lfg(&trees[0]).unwrap();
        assert_eq!(
            d.to_string(),
            "(f1 SUBJ)=f2 & (f2 PRED)=Sandy & f1=f3 & (f3 PRED)=snore"
        );
        let sites: Vec<usize> = d.equations().iter().map(|e| e.site).collect();
        assert_eq!(sites, vec![0, 1, 2, 3]);
    }

    #[test]
    fn single_word_lfg_tree() {
        let g = load_grammar(
            "mode lfg\nstart S\nattr PRED\nconst rain\ncat S\nlex rains S {(^ PRED)=rain}\n",
        )
        .unwrap();
        let trees = g.parse(&["rains"]).unwrap();
        assert_eq!(
            instantiate_lfg(&trees[0]).unwrap().to_string(),
            "(f1 PRED)=rain"
        );
    }
}
