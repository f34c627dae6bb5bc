//! Simplification of f-terms and the grammaticality decision.
//!
//! A term is viewed at every position as a multiset of elements (a
//! non-multiset term is a singleton). Six local rules rewrite such an
//! element list:
//!
//! * `ApplyLimp`: `α -o β` together with a distinct sibling equal to `α`
//!   become `β`;
//! * `ApplyPathEq`: `f1..fm = g1..gn` together with a sibling
//!   `f1(..fm(α)..)` become `g1(..gn(α)..)`;
//! * `Distribute`: `f(α1, .., αn)` becomes `f α1, .., f αn`;
//! * `Factor`: `f α1, f α2` become `f(α1, α2)`;
//! * `OptDelete` / `OptKeep`: `(α)?` is dropped or becomes `α`.
//!
//! Rules apply at the root and inside attribute bodies, never inside
//! implications or optional bodies. A sentence is grammatical when its
//! term reduces to exactly `t`.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::fterm::{canonicalize, serialize_fterm, FTerm};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Rule {
    ApplyLimp,
    ApplyPathEq,
    Distribute,
    Factor,
    OptDelete,
    OptKeep,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Child indices from the root to a rewritten position. Index `i` selects
/// the `i`-th element of a multiset; index `0` selects an embedding body.
pub type Locus = Vec<usize>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionStep {
    pub rule: Rule,
    pub locus: Locus,
    pub before: FTerm,
    pub after: FTerm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Grammatical,
    Ungrammatical,
    Undecided,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionResult {
    pub verdict: Verdict,
    /// Present iff the verdict is `Grammatical`; shortest by construction.
    pub witness: Option<Vec<ReductionStep>>,
    pub start: FTerm,
    pub states_explored: usize,
    pub limit_hit: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchConfig {
    pub max_states: usize,
    pub max_depth: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            max_states: 100_000,
            max_depth: 200,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReduceError {
    #[error("search undecided after exploring {states_explored} states")]
    Undecided { states_explored: usize },
    #[error("search limits must be positive")]
    InvalidConfig,
    #[error("no witness: verdict is {0:?}")]
    NoWitness(Verdict),
}

/// A rewrite of one element list, before it is spliced back into the term.
struct LocalRewrite {
    rule: Rule,
    locus: Locus,
    replacement: FTerm,
}

/// Every single-step rewrite of `term`, deduplicated and in a fixed order.
pub fn enumerate_steps(term: &FTerm) -> Vec<ReductionStep> {
    let mut local = Vec::new();
    visit(term, &mut Vec::new(), &mut local);
    let mut steps: Vec<ReductionStep> = Vec::with_capacity(local.len());
    let mut seen = std::collections::HashSet::new();
    for rw in local {
        let after = canonicalize(&replace_at(term, &rw.locus, rw.replacement));
        if seen.insert((rw.rule, rw.locus.clone(), serialize_fterm(&after))) {
            steps.push(ReductionStep {
                rule: rw.rule,
                locus: rw.locus,
                before: term.clone(),
                after,
            });
        }
    }
    steps
}

fn visit(node: &FTerm, locus: &mut Locus, out: &mut Vec<LocalRewrite>) {
    rewrite_elements(node.elements(), locus, out);
    match node {
        FTerm::Multiset(es) => {
            for (i, e) in es.iter().enumerate() {
                if let FTerm::Embed(_, body) = e {
                    locus.push(i);
                    locus.push(0);
                    visit(body, locus, out);
                    locus.truncate(locus.len() - 2);
                }
            }
        }
        FTerm::Embed(_, body) => {
            locus.push(0);
            visit(body, locus, out);
            locus.pop();
        }
        _ => {}
    }
}

fn without(elements: &[FTerm], skip: &[usize]) -> Vec<FTerm> {
    elements
        .iter()
        .enumerate()
        .filter(|(i, _)| !skip.contains(i))
        .map(|(_, e)| e.clone())
        .collect()
}

/// Strips the attribute path `path` off `term` when it has exactly the
/// shape `path[0](..path[m-1](α)..)`.
fn strip_path<'a>(term: &'a FTerm, path: &[String]) -> Option<&'a FTerm> {
    let mut cur = term;
    for attr in path {
        match cur {
            FTerm::Embed(f, body) if f == attr => cur = body,
            _ => return None,
        }
    }
    Some(cur)
}

fn wrap_path(path: &[String], body: FTerm) -> FTerm {
    path.iter()
        .rev()
        .fold(body, |acc, attr| FTerm::embed(attr.clone(), acc))
}

fn rewrite_elements(elements: &[FTerm], locus: &Locus, out: &mut Vec<LocalRewrite>) {
    let mut emit = |rule, mut rest: Vec<FTerm>, added: Vec<FTerm>| {
        rest.extend(added);
        out.push(LocalRewrite {
            rule,
            locus: locus.clone(),
            replacement: FTerm::Multiset(rest),
        });
    };

    for (i, e) in elements.iter().enumerate() {
        match e {
            FTerm::Limp(antecedent, consequent) => {
                for (j, s) in elements.iter().enumerate() {
                    if j != i && s == antecedent.as_ref() {
                        emit(
                            Rule::ApplyLimp,
                            without(elements, &[i, j]),
                            vec![(**consequent).clone()],
                        );
                    }
                }
            }
            FTerm::PathEq(src, dst) => {
                for (j, s) in elements.iter().enumerate() {
                    if j == i {
                        continue;
                    }
                    if let Some(body) = strip_path(s, src) {
                        emit(
                            Rule::ApplyPathEq,
                            without(elements, &[i, j]),
                            vec![wrap_path(dst, body.clone())],
                        );
                    }
                }
            }
            FTerm::Embed(attr, body) => {
                if let FTerm::Multiset(parts) = body.as_ref() {
                    if parts.len() >= 2 {
                        let spread = parts
                            .iter()
                            .map(|p| FTerm::embed(attr.clone(), p.clone()))
                            .collect();
                        emit(Rule::Distribute, without(elements, &[i]), spread);
                    }
                }
                for (j, s) in elements.iter().enumerate().skip(i + 1) {
                    if let FTerm::Embed(other, body2) = s {
                        if other == attr {
                            let joined = FTerm::embed(
                                attr.clone(),
                                FTerm::multiset([(**body).clone(), (**body2).clone()]),
                            );
                            emit(Rule::Factor, without(elements, &[i, j]), vec![joined]);
                        }
                    }
                }
            }
            FTerm::Opt(body) => {
                emit(Rule::OptDelete, without(elements, &[i]), vec![]);
                emit(
                    Rule::OptKeep,
                    without(elements, &[i]),
                    vec![(**body).clone()],
                );
            }
            FTerm::Atom(_) | FTerm::Multiset(_) => {}
        }
    }
}

/// Replaces the node at `locus` by `replacement`.
fn replace_at(term: &FTerm, locus: &[usize], replacement: FTerm) -> FTerm {
    let Some((&head, rest)) = locus.split_first() else {
        return replacement;
    };
    match term {
        FTerm::Multiset(es) => {
            let mut es = es.clone();
            es[head] = replace_at(&es[head], rest, replacement);
            FTerm::Multiset(es)
        }
        FTerm::Embed(attr, body) if head == 0 => {
            FTerm::embed(attr.clone(), replace_at(body, rest, replacement))
        }
        _ => panic!("locus {locus:?} does not address a rewritable position"),
    }
}

struct Node {
    term: FTerm,
    depth: usize,
    parent: Option<(usize, Rule, Locus)>,
}

/// Breadth-first search for a reduction of `term` to `t`.
pub fn reduce_search(term: &FTerm, cfg: &SearchConfig) -> ReductionResult {
    let start = canonicalize(term);
    let mut nodes = vec![Node {
        term: start.clone(),
        depth: 0,
        parent: None,
    }];
    if start.is_goal() {
        return ReductionResult {
            verdict: Verdict::Grammatical,
            witness: Some(Vec::new()),
            start,
            states_explored: 1,
            limit_hit: false,
        };
    }
    let mut visited: HashMap<String, usize> = HashMap::new();
    visited.insert(serialize_fterm(&start), 0);
    let mut queue = VecDeque::from([0usize]);
    let mut limit_hit = false;
    let mut expanded = 0usize;

    while let Some(id) = queue.pop_front() {
        let depth = nodes[id].depth;
        let steps = enumerate_steps(&nodes[id].term);
        expanded += 1;
        if depth >= cfg.max_depth {
            if !steps.is_empty() {
                limit_hit = true;
            }
            continue;
        }
        for step in steps {
            let key = serialize_fterm(&step.after);
            if visited.contains_key(&key) {
                continue;
            }
            if nodes.len() >= cfg.max_states {
                limit_hit = true;
                queue.clear();
                break;
            }
            let child = nodes.len();
            visited.insert(key, child);
            let is_goal = step.after.is_goal();
            nodes.push(Node {
                term: step.after,
                depth: depth + 1,
                parent: Some((id, step.rule, step.locus)),
            });
            if is_goal {
                let witness = rebuild_witness(&nodes, child);
                return ReductionResult {
                    verdict: Verdict::Grammatical,
                    witness: Some(witness),
                    start,
                    states_explored: expanded,
                    limit_hit,
                };
            }
            queue.push_back(child);
        }
    }

    ReductionResult {
        verdict: if limit_hit {
            Verdict::Undecided
        } else {
            Verdict::Ungrammatical
        },
        witness: None,
        start,
        states_explored: expanded,
        limit_hit,
    }
}

fn rebuild_witness(nodes: &[Node], goal: usize) -> Vec<ReductionStep> {
    let mut steps = Vec::new();
    let mut cur = goal;
    while let Some((parent, rule, locus)) = &nodes[cur].parent {
        steps.push(ReductionStep {
            rule: *rule,
            locus: locus.clone(),
            before: nodes[*parent].term.clone(),
            after: nodes[cur].term.clone(),
        });
        cur = *parent;
    }
    steps.reverse();
    steps
}

/// `Ok(true)` iff `term` reduces to `t`; an undecided search is an error.
pub fn is_grammatical(term: &FTerm, cfg: &SearchConfig) -> Result<bool, ReduceError> {
    if cfg.max_states == 0 || cfg.max_depth == 0 {
        return Err(ReduceError::InvalidConfig);
    }
    let result = reduce_search(term, cfg);
    match result.verdict {
        Verdict::Grammatical => Ok(true),
        Verdict::Ungrammatical => Ok(false),
        Verdict::Undecided => Err(ReduceError::Undecided {
            states_explored: result.states_explored,
        }),
    }
}

fn format_locus(locus: &[usize]) -> String {
    if locus.is_empty() {
        "root".to_string()
    } else {
        locus
            .iter()
            .map(usize::to_string)
            .collect::<Vec<_>>()
            .join(".")
    }
}

/// Numbered derivation listing. Term lines alternate with step lines;
/// the last line is `t`.
pub fn trace_witness(result: &ReductionResult) -> Result<String, ReduceError> {
    let witness = match (&result.verdict, &result.witness) {
        (Verdict::Grammatical, Some(w)) => w,
        (v, _) => return Err(ReduceError::NoWitness(*v)),
    };
    let mut out = serialize_fterm(&result.start);
    out.push('\n');
    for (n, step) in witness.iter().enumerate() {
        out.push_str(&format!(
            "  ({}) {} at {}\n",
            n + 1,
            step.rule,
            format_locus(&step.locus)
        ));
        out.push_str(&serialize_fterm(&step.after));
        out.push('\n');
    }
    Ok(out)
}

#[derive(Serialize)]
struct StepJson {
    rule: Rule,
    locus: Locus,
    term: String,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct ResultJson {
    verdict: Verdict,
    start: String,
    states_explored: usize,
    limit_hit: bool,
    witness: Option<Vec<StepJson>>,
}

impl Serialize for ReductionResult {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        ResultJson {
            verdict: self.verdict,
            start: serialize_fterm(&self.start),
            states_explored: self.states_explored,
            limit_hit: self.limit_hit,
            witness: self.witness.as_ref().map(|w| {
                w.iter()
                    .map(|s| StepJson {
                        rule: s.rule,
                        locus: s.locus.clone(),
                        term: serialize_fterm(&s.after),
                    })
                    .collect()
            }),
        }
        .serialize(serializer)
    }
}
