//! Classical LFG f-descriptions and their solutions.
//!
//! An f-description is a boolean combination of equations. It is solved
//! conjunct by conjunct after expansion to disjunctive normal form: the
//! defining equations of a conjunct determine a unique minimal f-structure
//! (or are inconsistent), and the constraining equations are then checked
//! against that structure without contributing to it.

mod parse;
mod relaxed;
mod solve;

use std::fmt;

pub use parse::{parse_fdescription, parse_fdescription_file, parse_schema, DescError};
pub use relaxed::{solve_relaxed, RelaxedCandidate};
pub use solve::{solve, solve_conjunct, subsumes, verify_constraints, FNode, FStructure};

/// Spelling of the mother metavariable in annotation schemata.
pub const UP: &str = "^";
/// Spelling of the daughter metavariable in annotation schemata.
pub const DOWN: &str = "v";

/// An f-variable followed by a (possibly empty) attribute path.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PathExpr {
    pub var: String,
    pub attrs: Vec<String>,
}

impl PathExpr {
    pub fn new<S: Into<String>>(
        var: impl Into<String>,
        attrs: impl IntoIterator<Item = S>,
    ) -> Self {
        PathExpr {
            var: var.into(),
            attrs: attrs.into_iter().map(Into::into).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Value {
    Path(PathExpr),
    Const(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EqKind {
    Defining,
    Constraining,
}

/// `lhs = rhs` or `lhs =c rhs`. `site` identifies the annotation the
/// equation was instantiated from; only relaxed solving looks at it.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Equation {
    pub lhs: PathExpr,
    pub rhs: Value,
    pub kind: EqKind,
    pub site: usize,
}

impl Equation {
    pub fn defining(lhs: PathExpr, rhs: Value) -> Self {
        Equation {
            lhs,
            rhs,
            kind: EqKind::Defining,
            site: 0,
        }
    }

    pub fn constraining(lhs: PathExpr, rhs: Value) -> Self {
        Equation {
            lhs,
            rhs,
            kind: EqKind::Constraining,
            site: 0,
        }
    }

    pub fn at_site(mut self, site: usize) -> Self {
        self.site = site;
        self
    }

    pub fn is_defining(&self) -> bool {
        self.kind == EqKind::Defining
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FDescription {
    Eq(Equation),
    And(Vec<FDescription>),
    Or(Vec<FDescription>),
}

impl FDescription {
    pub fn conj(eqs: impl IntoIterator<Item = Equation>) -> Self {
        FDescription::And(eqs.into_iter().map(FDescription::Eq).collect())
    }

    /// All equations in left-to-right order.
    pub fn equations(&self) -> Vec<&Equation> {
        let mut out = Vec::new();
        self.collect(&mut out);
        out
    }

    fn collect<'a>(&'a self, out: &mut Vec<&'a Equation>) {
        match self {
            FDescription::Eq(e) => out.push(e),
            FDescription::And(ds) | FDescription::Or(ds) => ds.iter().for_each(|d| d.collect(out)),
        }
    }

    /// Renames f-variables through `rename`, leaving constants alone.
    pub fn map_vars(&self, rename: &impl Fn(&str) -> String) -> FDescription {
        let path = |p: &PathExpr| PathExpr {
            var: rename(&p.var),
            attrs: p.attrs.clone(),
        };
        match self {
            FDescription::Eq(e) => FDescription::Eq(Equation {
                lhs: path(&e.lhs),
                rhs: match &e.rhs {
                    Value::Path(p) => Value::Path(path(p)),
                    c @ Value::Const(_) => c.clone(),
                },
                kind: e.kind,
                site: e.site,
            }),
            FDescription::And(ds) => {
                FDescription::And(ds.iter().map(|d| d.map_vars(rename)).collect())
            }
            FDescription::Or(ds) => {
                FDescription::Or(ds.iter().map(|d| d.map_vars(rename)).collect())
            }
        }
    }

    pub fn with_site(&self, site: usize) -> FDescription {
        match self {
            FDescription::Eq(e) => FDescription::Eq(e.clone().at_site(site)),
            FDescription::And(ds) => {
                FDescription::And(ds.iter().map(|d| d.with_site(site)).collect())
            }
            FDescription::Or(ds) => {
                FDescription::Or(ds.iter().map(|d| d.with_site(site)).collect())
            }
        }
    }
}

/// Expands a description into disjunctive normal form. Conjuncts and the
/// equations inside them keep left-to-right order.
pub fn dnf(d: &FDescription) -> Vec<Vec<Equation>> {
    match d {
        FDescription::Eq(e) => vec![vec![e.clone()]],
        FDescription::Or(ds) => ds.iter().flat_map(dnf).collect(),
        FDescription::And(ds) => {
            let mut acc: Vec<Vec<Equation>> = vec![Vec::new()];
            for child in ds {
                let child = dnf(child);
                let mut next = Vec::with_capacity(acc.len() * child.len());
                for left in &acc {
                    for right in &child {
                        let mut conj = left.clone();
                        conj.extend(right.iter().cloned());
                        next.push(conj);
                    }
                }
                acc = next;
            }
            acc
        }
    }
}

impl fmt::Display for PathExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.attrs.is_empty() {
            f.write_str(&self.var)
        } else {
            write!(f, "({} {})", self.var, self.attrs.join(" "))
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Path(p) => p.fmt(f),
            Value::Const(c) => f.write_str(c),
        }
    }
}

impl fmt::Display for Equation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            EqKind::Defining => write!(f, "{}={}", self.lhs, self.rhs),
            EqKind::Constraining => write!(f, "{}=c {}", self.lhs, self.rhs),
        }
    }
}

impl fmt::Display for FDescription {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn join(f: &mut fmt::Formatter<'_>, ds: &[FDescription], sep: &str) -> fmt::Result {
            for (i, d) in ds.iter().enumerate() {
                if i > 0 {
                    f.write_str(sep)?;
                }
                match d {
                    FDescription::Eq(e) => write!(f, "{e}")?,
                    other => write!(f, "({other})")?,
                }
            }
            Ok(())
        }
        match self {
            FDescription::Eq(e) => write!(f, "{e}"),
            FDescription::And(ds) => join(f, ds, " & "),
            FDescription::Or(ds) => join(f, ds, " | "),
        }
    }
}

/// Orders variable names so that `f2` precedes `f10`.
pub fn var_order(a: &str, b: &str) -> std::cmp::Ordering {
    fn split(s: &str) -> (&str, Option<u64>) {
        let digits = s.trim_start_matches(|c: char| !c.is_ascii_digit());
        let prefix = &s[..s.len() - digits.len()];
        (prefix, digits.parse().ok())
    }
    split(a).cmp(&split(b)).then_with(|| a.cmp(b))
}
