//! Brute-force reference implementations and seeded instance generators.
//!
//! Nothing here is tuned for speed. The reducer re-derives the rewrite
//! relation from scratch and explores every reachable state; the structure
//! enumerator builds every small attribute-value graph a set of defining
//! equations admits. Test suites compare the real engine and solver
//! against these.

use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::fterm::{canonicalize, equal, serialize_fterm, FTerm, GOAL_TYPE};
use crate::lfg::{EqKind, Equation, FNode, FStructure, PathExpr, Value};

/// States the reducer may visit before giving up.
pub const ORACLE_STATE_CAP: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OracleVerdict {
    Grammatical,
    Ungrammatical,
}

impl fmt::Display for OracleVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl FromStr for OracleVerdict {
    type Err = OracleError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "Grammatical" => Ok(OracleVerdict::Grammatical),
            "Ungrammatical" => Ok(OracleVerdict::Ungrammatical),
            other => Err(OracleError::Fixture(format!("unknown verdict {other:?}"))),
        }
    }
}

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("state space exceeds {cap} states")]
    StateSpaceExceeded { cap: usize },
    #[error("invalid generator config: {0}")]
    Config(&'static str),
    #[error("bad fixture: {0}")]
    Fixture(String),
}

// ---------------------------------------------------------------------------
// Reducer

fn members(term: &FTerm) -> Vec<FTerm> {
    match term {
        FTerm::Multiset(es) => es.clone(),
        other => vec![other.clone()],
    }
}

fn drop_indices(es: &[FTerm], a: usize, b: Option<usize>) -> Vec<FTerm> {
    es.iter()
        .enumerate()
        .filter(|&(k, _)| k != a && Some(k) != b)
        .map(|(_, e)| e.clone())
        .collect()
}

fn nest(attrs: &[String], inner: FTerm) -> FTerm {
    match attrs.split_first() {
        None => inner,
        Some((f, rest)) => FTerm::embed(f.clone(), nest(rest, inner)),
    }
}

fn unnest(attrs: &[String], term: &FTerm) -> Option<FTerm> {
    match attrs.split_first() {
        None => Some(term.clone()),
        Some((f, rest)) => match term {
            FTerm::Embed(g, body) if g == f => unnest(rest, body),
            _ => None,
        },
    }
}

/// Every term reachable from `term` in one rewrite, canonicalized.
pub fn oracle_successors(term: &FTerm) -> Vec<FTerm> {
    let es = members(term);
    let mut out: Vec<Vec<FTerm>> = Vec::new();
    for (i, e) in es.iter().enumerate() {
        match e {
            FTerm::Limp(a, b) => {
                for (j, s) in es.iter().enumerate() {
                    if i != j && equal(s, a) {
                        let mut next = drop_indices(&es, i, Some(j));
                        next.push((**b).clone());
                        out.push(next);
                    }
                }
            }
            FTerm::PathEq(from, to) => {
                for (j, s) in es.iter().enumerate() {
                    if i == j {
                        continue;
                    }
                    if let Some(inner) = unnest(from, s) {
                        let mut next = drop_indices(&es, i, Some(j));
                        next.push(nest(to, inner));
                        out.push(next);
                    }
                }
            }
            FTerm::Opt(body) => {
                out.push(drop_indices(&es, i, None));
                let mut kept = drop_indices(&es, i, None);
                kept.push((**body).clone());
                out.push(kept);
            }
            FTerm::Embed(f, body) => {
                if let FTerm::Multiset(parts) = body.as_ref() {
                    if parts.len() > 1 {
                        let mut next = drop_indices(&es, i, None);
                        next.extend(parts.iter().map(|p| FTerm::embed(f.clone(), p.clone())));
                        out.push(next);
                    }
                }
                for (j, s) in es.iter().enumerate().skip(i + 1) {
                    if let FTerm::Embed(g, other) = s {
                        if g == f {
                            let mut next = drop_indices(&es, i, Some(j));
                            next.push(FTerm::embed(
                                f.clone(),
                                FTerm::Multiset(vec![(**body).clone(), (**other).clone()]),
                            ));
                            out.push(next);
                        }
                    }
                }
                for inner in oracle_successors(body) {
                    let mut next = es.clone();
                    next[i] = FTerm::embed(f.clone(), inner);
                    out.push(next);
                }
            }
            FTerm::Atom(_) | FTerm::Multiset(_) => {}
        }
    }
    out.into_iter()
        .map(|es| canonicalize(&FTerm::Multiset(es)))
        .collect()
}

/// Exhaustive search with the default state cap.
pub fn oracle_reduce(term: &FTerm) -> Result<OracleVerdict, OracleError> {
    oracle_reduce_capped(term, ORACLE_STATE_CAP)
}

/// Explores every state reachable from `term`; grammatical iff the goal
/// atom is among them.
pub fn oracle_reduce_capped(term: &FTerm, cap: usize) -> Result<OracleVerdict, OracleError> {
    let goal = FTerm::atom(GOAL_TYPE);
    let start = canonicalize(term);
    let mut seen: HashSet<FTerm> = HashSet::from([start.clone()]);
    let mut queue = VecDeque::from([start]);
    let mut found = false;
    while let Some(state) = queue.pop_front() {
        if equal(&state, &goal) {
            found = true;
        }
        for next in oracle_successors(&state) {
            if !seen.contains(&next) {
                if seen.len() >= cap {
                    return Err(OracleError::StateSpaceExceeded { cap });
                }
                seen.insert(next.clone());
                queue.push_back(next);
            }
        }
    }
    Ok(if found {
        OracleVerdict::Grammatical
    } else {
        OracleVerdict::Ungrammatical
    })
}

// ---------------------------------------------------------------------------
// Generators

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenConfig {
    pub max_depth: usize,
    pub max_multiset_size: usize,
    pub atom_alphabet: Vec<String>,
    pub attr_alphabet: Vec<String>,
    pub seed: u64,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            max_depth: 3,
            max_multiset_size: 3,
            atom_alphabet: ["e", "t", "NOM", "ACC"].map(String::from).to_vec(),
            attr_alphabet: ["SUBJ", "OBJ", "XCOMP"].map(String::from).to_vec(),
            seed: 0,
        }
    }
}

impl GenConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_depth(mut self, depth: usize) -> Self {
        self.max_depth = depth;
        self
    }

    fn validate(&self) -> Result<(), OracleError> {
        if self.atom_alphabet.is_empty() {
            return Err(OracleError::Config("empty atom alphabet"));
        }
        if self.attr_alphabet.is_empty() {
            return Err(OracleError::Config("empty attribute alphabet"));
        }
        if self.max_depth == 0 {
            return Err(OracleError::Config("depth must be at least 1"));
        }
        if self.max_multiset_size < 2 {
            return Err(OracleError::Config("multisets need room for two elements"));
        }
        Ok(())
    }
}

struct Gen<'a> {
    cfg: &'a GenConfig,
    rng: ChaCha8Rng,
}

impl Gen<'_> {
    fn atom(&mut self) -> FTerm {
        FTerm::atom(
            self.cfg
                .atom_alphabet
                .choose(&mut self.rng)
                .unwrap()
                .clone(),
        )
    }

    fn attr(&mut self) -> String {
        self.cfg
            .attr_alphabet
            .choose(&mut self.rng)
            .unwrap()
            .clone()
    }

    fn path(&mut self) -> Vec<String> {
        let len = self.rng.random_range(1..=2);
        (0..len).map(|_| self.attr()).collect()
    }

    fn any(&mut self, depth: usize) -> FTerm {
        if depth <= 1 {
            return self.atom();
        }
        match self.rng.random_range(0..10) {
            0 | 1 => self.atom(),
            2 | 3 => {
                let n = self.rng.random_range(2..=self.cfg.max_multiset_size);
                FTerm::Multiset((0..n).map(|_| self.any(depth - 1)).collect())
            }
            4 | 5 => {
                let f = self.attr();
                FTerm::embed(f, self.any(depth - 1))
            }
            6 | 7 => FTerm::limp(self.any(depth - 1), self.any(depth - 1)),
            8 => FTerm::opt(self.any(depth - 1)),
            _ => FTerm::PathEq(self.path(), self.path()),
        }
    }

    /// A small resource that can serve as an implication antecedent.
    fn resource(&mut self) -> FTerm {
        if self.rng.random_bool(0.3) {
            let f = self.attr();
            FTerm::embed(f, self.atom())
        } else {
            self.atom()
        }
    }

    /// A term built backwards from `target` by inverting rewrites, so that
    /// it reduces to `target`.
    fn derive(&mut self, target: FTerm, depth: usize) -> FTerm {
        if depth <= 1 || self.rng.random_bool(0.25) {
            return target;
        }
        match self.rng.random_range(0..6) {
            0 | 1 => {
                let a = self.resource();
                let producer = self.derive(a.clone(), depth - 1);
                FTerm::Multiset(vec![producer, FTerm::limp(a, target)])
            }
            2 => {
                let noise = self.resource();
                let kept = self.derive(target, depth - 1);
                FTerm::Multiset(vec![kept, FTerm::opt(noise)])
            }
            3 => FTerm::opt(target),
            _ => match target {
                FTerm::Embed(f, body) if self.rng.random_bool(0.5) => {
                    let (to, inner) = match *body {
                        FTerm::Embed(g, inner) if self.rng.random_bool(0.5) => (vec![f, g], *inner),
                        other => (vec![f], other),
                    };
                    let from = self.path();
                    let moved = nest(&from, self.derive(inner, depth - 1));
                    FTerm::Multiset(vec![FTerm::PathEq(from, to), moved])
                }
                FTerm::Embed(f, body) => {
                    let inner = self.derive(*body, depth - 1);
                    FTerm::embed(f, inner)
                }
                FTerm::Multiset(es) => {
                    FTerm::Multiset(es.into_iter().map(|e| self.derive(e, depth - 1)).collect())
                }
                other => {
                    let a = self.resource();
                    let producer = self.derive(a.clone(), depth - 1);
                    FTerm::Multiset(vec![producer, FTerm::limp(a, other)])
                }
            },
        }
    }

    /// Replaces one atom occurrence, chosen uniformly, by a random atom.
    fn mutate(&mut self, term: &FTerm) -> FTerm {
        fn count(t: &FTerm) -> usize {
            match t {
                FTerm::Atom(_) => 1,
                FTerm::Multiset(es) => es.iter().map(count).sum(),
                FTerm::Embed(_, b) | FTerm::Opt(b) => count(b),
                FTerm::Limp(a, b) => count(a) + count(b),
                FTerm::PathEq(..) => 0,
            }
        }
        fn replace(t: &FTerm, k: &mut usize, with: &FTerm) -> FTerm {
            match t {
                FTerm::Atom(_) => {
                    let hit = *k == 0;
                    *k = k.wrapping_sub(1);
                    if hit {
                        with.clone()
                    } else {
                        t.clone()
                    }
                }
                FTerm::Multiset(es) => {
                    FTerm::Multiset(es.iter().map(|e| replace(e, k, with)).collect())
                }
                FTerm::Embed(f, b) => FTerm::embed(f.clone(), replace(b, k, with)),
                FTerm::Opt(b) => FTerm::opt(replace(b, k, with)),
                FTerm::Limp(a, b) => {
                    let a = replace(a, k, with);
                    FTerm::limp(a, replace(b, k, with))
                }
                FTerm::PathEq(..) => t.clone(),
            }
        }
        let n = count(term);
        if n == 0 {
            return term.clone();
        }
        let mut k = self.rng.random_range(0..n);
        let with = self.atom();
        replace(term, &mut k, &with)
    }
}

/// A canonical term over the configured alphabets, determined by the seed.
/// Depth 1 yields a single atom.
pub fn gen_random_fterm(cfg: &GenConfig) -> Result<FTerm, OracleError> {
    cfg.validate()?;
    let mut g = Gen {
        cfg,
        rng: ChaCha8Rng::seed_from_u64(cfg.seed),
    };
    Ok(canonicalize(&g.any(cfg.max_depth)))
}

/// A term constructed to reduce to the goal atom, then with probability
/// one half perturbed by swapping one atom. Seed-determined.
pub fn gen_derivable_fterm(cfg: &GenConfig) -> Result<FTerm, OracleError> {
    cfg.validate()?;
    let mut g = Gen {
        cfg,
        rng: ChaCha8Rng::seed_from_u64(cfg.seed),
    };
    let mut term = g.derive(FTerm::atom(GOAL_TYPE), cfg.max_depth + 1);
    if g.rng.random_bool(0.5) {
        term = g.mutate(&term);
    }
    Ok(canonicalize(&term))
}

/// `count` distinct terms whose serialization is at most `max_len`
/// characters, alternating between the two generators and sweeping seeds
/// upward from `base.seed`.
pub fn gen_corpus(
    base: &GenConfig,
    count: usize,
    max_len: usize,
) -> Result<Vec<FTerm>, OracleError> {
    let mut out = Vec::with_capacity(count);
    let mut seen = HashSet::new();
    let mut seed = base.seed;
    while out.len() < count {
        let cfg = GenConfig {
            max_depth: base.max_depth + (seed % 2) as usize,
            ..base.clone()
        }
        .with_seed(seed);
        let term = if out.len() % 2 == 0 {
            gen_random_fterm(&cfg)?
        } else {
            gen_derivable_fterm(&cfg)?
        };
        seed += 1;
        let text = serialize_fterm(&term);
        if text.chars().count() <= max_len && seen.insert(text) {
            out.push(term);
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Fixture files: one `serialized-term TAB verdict` record per line.

pub fn write_fixture(records: &[(FTerm, OracleVerdict)]) -> String {
    records
        .iter()
        .map(|(t, v)| format!("{}\t{v}\n", serialize_fterm(t)))
        .collect()
}

/// Splits fixture text into (serialized term, verdict) pairs. Blank lines
/// and `#` comments are skipped; terms are left for the caller to parse.
pub fn read_fixture(text: &str) -> Result<Vec<(String, OracleVerdict)>, OracleError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'))
        .map(|(n, l)| {
            let (term, verdict) = l
                .rsplit_once('\t')
                .ok_or_else(|| OracleError::Fixture(format!("line {}: missing tab", n + 1)))?;
            Ok((term.to_string(), verdict.trim().parse()?))
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Structure enumeration

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
enum Elem {
    Node(usize),
    Const(String),
}

#[derive(Debug, Clone, Default)]
struct Partial {
    edges: Vec<BTreeMap<String, Elem>>,
    vars: BTreeMap<String, Elem>,
}

struct Enumerator {
    bound: usize,
    consts: Vec<String>,
}

impl Enumerator {
    /// Every way of choosing an element for an unset slot: an existing
    /// node, a constant, or the next fresh node.
    fn choices(&self, p: &Partial) -> Vec<(Partial, Elem)> {
        let mut out: Vec<(Partial, Elem)> = (0..p.edges.len())
            .map(|n| (p.clone(), Elem::Node(n)))
            .collect();
        out.extend(
            self.consts
                .iter()
                .map(|c| (p.clone(), Elem::Const(c.clone()))),
        );
        if p.edges.len() < self.bound {
            let mut q = p.clone();
            q.edges.push(BTreeMap::new());
            let id = q.edges.len() - 1;
            out.push((q, Elem::Node(id)));
        }
        out
    }

    /// Values of `path`, choosing every unset slot on the way. With a
    /// `target`, the last slot is only ever set to the target itself,
    /// since any other choice fails the equation anyway.
    fn eval(&self, p: &Partial, path: &PathExpr, target: Option<&Elem>) -> Vec<(Partial, Elem)> {
        let pick = |q: &Partial, last: bool| -> Vec<(Partial, Elem)> {
            match target {
                Some(t) if last => vec![(q.clone(), t.clone())],
                _ => self.choices(q),
            }
        };
        let mut frontier: Vec<(Partial, Elem)> = match p.vars.get(&path.var) {
            Some(e) => vec![(p.clone(), e.clone())],
            None => pick(p, path.attrs.is_empty())
                .into_iter()
                .map(|(mut q, e)| {
                    q.vars.insert(path.var.clone(), e.clone());
                    (q, e)
                })
                .collect(),
        };
        for (k, attr) in path.attrs.iter().enumerate() {
            let last = k + 1 == path.attrs.len();
            let mut next = Vec::new();
            for (q, cur) in frontier {
                let Elem::Node(n) = cur else { continue };
                match q.edges[n].get(attr) {
                    Some(e) => {
                        let e = e.clone();
                        next.push((q, e));
                    }
                    None => {
                        for (mut r, e) in pick(&q, last) {
                            r.edges[n].insert(attr.clone(), e.clone());
                            next.push((r, e));
                        }
                    }
                }
            }
            frontier = next;
        }
        frontier
    }

    fn run(&self, eqs: &[&Equation], p: Partial, out: &mut Vec<Partial>) {
        let Some((eq, rest)) = eqs.split_first() else {
            out.push(p);
            return;
        };
        match &eq.rhs {
            Value::Const(c) => {
                let target = Elem::Const(c.clone());
                for (q, left) in self.eval(&p, &eq.lhs, Some(&target)) {
                    if left == target {
                        self.run(rest, q, out);
                    }
                }
            }
            Value::Path(path) => {
                for (q, left) in self.eval(&p, &eq.lhs, None) {
                    for (r, right) in self.eval(&q, path, Some(&left)) {
                        if right == left {
                            self.run(rest, r, out);
                        }
                    }
                }
            }
        }
    }
}

fn to_structure(p: &Partial) -> FStructure {
    let consts: BTreeSet<&String> = p
        .edges
        .iter()
        .flat_map(|m| m.values())
        .chain(p.vars.values())
        .filter_map(|e| match e {
            Elem::Const(c) => Some(c),
            Elem::Node(_) => None,
        })
        .collect();
    let base = p.edges.len();
    let const_id: BTreeMap<&String, usize> = consts
        .iter()
        .enumerate()
        .map(|(i, c)| (*c, base + i))
        .collect();
    let id = |e: &Elem| match e {
        Elem::Node(n) => *n,
        Elem::Const(c) => const_id[c],
    };
    let mut nodes: Vec<FNode> = p
        .edges
        .iter()
        .map(|m| FNode::Complex(m.iter().map(|(a, e)| (a.clone(), id(e))).collect()))
        .collect();
    nodes.extend(consts.iter().map(|c| FNode::Const((*c).clone())));
    let bindings = p.vars.iter().map(|(v, e)| (v.clone(), id(e))).collect();
    FStructure::from_parts(nodes, bindings)
}

/// Every f-structure with at most `bound` complex nodes that satisfies the
/// defining equations in `eqs`, up to isomorphism, smallest first. Only
/// attribute entries some equation mentions are generated, so each result
/// is a quotient of the equations' path structure. Constraining equations
/// are ignored.
pub fn enumerate_structures(eqs: &[Equation], bound: usize) -> Vec<FStructure> {
    let defining: Vec<&Equation> = eqs.iter().filter(|e| e.kind == EqKind::Defining).collect();
    let consts: BTreeSet<String> = defining
        .iter()
        .filter_map(|e| match &e.rhs {
            Value::Const(c) => Some(c.clone()),
            Value::Path(_) => None,
        })
        .collect();
    let en = Enumerator {
        bound,
        consts: consts.into_iter().collect(),
    };
    let mut partials = Vec::new();
    en.run(&defining, Partial::default(), &mut partials);
    let mut seen = HashSet::new();
    let mut out: Vec<(usize, usize, String, FStructure)> = Vec::new();
    for p in &partials {
        let s = to_structure(p);
        let key = s.canonical_key();
        if seen.insert(key.clone()) {
            let edges = p.edges.iter().map(BTreeMap::len).sum();
            out.push((p.edges.len(), edges, key, s));
        }
    }
    out.sort_by(|a, b| (a.0, a.1, &a.2).cmp(&(b.0, b.1, &b.2)));
    out.into_iter().map(|(_, _, _, s)| s).collect()
}
