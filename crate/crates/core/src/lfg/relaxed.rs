//! Solving with the functionality axiom relaxed across annotation sites.
//!
//! Sites are partitioned into groups; equations from sites in the same
//! group share attribute entries, while different groups may create
//! separate entries for the same attribute on the same node. Every
//! partition that is consistent yields a candidate. Constraining
//! equations are then evaluated inside their own group: they must find a
//! defined value in the entry they themselves address, and entries they
//! address but nobody defined are materialized as `=c` markers.

use std::collections::{BTreeSet, HashSet};

use super::solve::{Content, Graph};
use super::{dnf, EqKind, Equation, FDescription, FStructure, Value};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelaxedCandidate {
    pub structure: FStructure,
    /// Every constraining equation found its value.
    pub satisfied: bool,
    /// Groups of site ids sharing attribute entries.
    pub split: Vec<Vec<usize>>,
}

/// Set partitions of `0..n` as restricted growth strings.
fn partitions(n: usize) -> Vec<Vec<usize>> {
    fn go(i: usize, n: usize, cur: &mut Vec<usize>, max: usize, out: &mut Vec<Vec<usize>>) {
        if i == n {
            out.push(cur.clone());
            return;
        }
        for block in 0..=max + usize::from(i > 0) {
            if i == 0 && block > 0 {
                break;
            }
            cur.push(block);
            go(i + 1, n, cur, max.max(block), out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, &mut Vec::with_capacity(n), 0, &mut out);
    out
}

fn candidate(conj: &[Equation], sites: &[usize], blocks: &[usize]) -> Option<RelaxedCandidate> {
    let label = |site: usize| blocks[sites.binary_search(&site).unwrap()];
    let mut g = Graph::default();
    for eq in conj.iter().filter(|e| e.kind == EqKind::Defining) {
        g.add_defining(eq, label(eq.site)).ok()?;
    }
    let mut satisfied = true;
    for eq in conj.iter().filter(|e| e.kind == EqKind::Constraining) {
        let l = label(eq.site);
        let Ok(Some(target)) = g.resolve(&eq.lhs, l, true) else {
            satisfied = false;
            continue;
        };
        match &eq.rhs {
            Value::Const(c) => {
                let content = g.content(target);
                match content {
                    Content::Const(v) if v == c => {}
                    Content::Unknown => {
                        *content = Content::Checked(c.clone());
                        satisfied = false;
                    }
                    _ => satisfied = false,
                }
            }
            Value::Path(p) => match g.resolve(p, l, true) {
                Ok(Some(other)) if g.find(other) == g.find(target) => {}
                _ => satisfied = false,
            },
        }
    }
    let max_block = blocks.iter().copied().max().unwrap_or(0);
    let split = (0..=max_block)
        .map(|b| {
            sites
                .iter()
                .zip(blocks)
                .filter(|(_, &blk)| blk == b)
                .map(|(&s, _)| s)
                .collect()
        })
        .collect();
    Some(RelaxedCandidate {
        structure: g.extract(),
        satisfied,
        split,
    })
}

/// Candidate structures under relaxed functionality, deduplicated by
/// structure and verdict, in enumeration order.
pub fn solve_relaxed(d: &FDescription) -> Vec<RelaxedCandidate> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for conj in dnf(d) {
        let sites: Vec<usize> = conj
            .iter()
            .map(|e| e.site)
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        for blocks in partitions(sites.len()) {
            if let Some(c) = candidate(&conj, &sites, &blocks) {
                if seen.insert((c.structure.canonical_key(), c.satisfied)) {
                    out.push(c);
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lfg::{parse_fdescription_file, solve};
    use serde_json::json;

    #[test]
    fn bell_numbers() {
        let counts: Vec<usize> = (0..6).map(|n| partitions(n).len()).collect();
        assert_eq!(counts, vec![1, 1, 2, 5, 15, 52]);
    }

    const CONSTRAINING: &str = "(f1 SUBJ)=f2\nf1=f3\n(f2 PRED)=Sandy & (f2 NUM)=SG\n(f3 PRED)=snore & (f3 SUBJ NUM)=c SG\n";

    #[test]
    fn split_subject_fails_constraint() {
        let d = parse_fdescription_file(CONSTRAINING).unwrap();
        let cands = solve_relaxed(&d);
        let failed: Vec<&RelaxedCandidate> = cands
            .iter()
            .filter(|c| !c.satisfied && c.structure.has_repeated_attribute())
            .collect();
        assert!(!failed.is_empty());
        let subj = &failed[0].structure.to_json()["SUBJ"];
        assert!(subj.as_array().unwrap().contains(&json!({"NUM": "=c SG"})));
        assert!(subj
            .as_array()
            .unwrap()
            .contains(&json!({"NUM": "SG", "PRED": "Sandy"})));
        // the standard solution is among the satisfied candidates
        let ok: Vec<&RelaxedCandidate> = cands.iter().filter(|c| c.satisfied).collect();
        assert_eq!(ok.len(), 1);
        assert_eq!(
            ok[0].structure.canonical_key(),
            solve(&d)[0].canonical_key()
        );
    }

    #[test]
    fn defining_clash_avoided_by_splitting() {
        let d = parse_fdescription_file(
            "(f1 SUBJ)=f2\nf1=f3\n(f2 PRED)=professor & (f2 NUM)=PL\n(f3 PRED)=snore & (f3 SUBJ NUM)=SG\n",
        )
        .unwrap();
        assert!(solve(&d).is_empty());
        let cands = solve_relaxed(&d);
        assert!(!cands.is_empty());
        assert!(cands
            .iter()
            .all(|c| c.satisfied && c.structure.has_repeated_attribute()));
    }

    #[test]
    fn no_repeated_attributes_matches_solve() {
        let d = parse_fdescription_file("(f1 A)=f2\n(f2 B)=x\n(f1 C)=y\n").unwrap();
        let cands = solve_relaxed(&d);
        let standard = solve(&d);
        assert_eq!(cands.len(), standard.len());
        for (c, s) in cands.iter().zip(&standard) {
            assert!(c.satisfied);
            assert_eq!(c.structure, *s);
        }
    }
}
