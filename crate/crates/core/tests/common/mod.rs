//! Shared helpers for the integration suites: shipped-file access,
//! proptest strategies, brute-force evaluators and the property checks
//! themselves, so the acceptance target and the property target run the
//! same code.

#![allow(dead_code)]

use std::path::PathBuf;

use proptest::prelude::*;
use proptest::strategy::ValueTree;
use proptest::test_runner::{Config, TestCaseError, TestRng, TestRunner};

use rlfg_core::fterm::{canonicalize, parse_fterm_untyped, serialize_fterm, FTerm};
use rlfg_core::grammar::{load_grammar, Grammar};
use rlfg_core::lfg::{dnf, solve_conjunct, subsumes, Equation, FDescription, PathExpr, Value};
use rlfg_core::oracle::{
    enumerate_structures, gen_derivable_fterm, oracle_reduce, GenConfig, OracleVerdict,
};
use rlfg_core::reduce::{enumerate_steps, reduce_search, Rule, SearchConfig, Verdict};
use rlfg_core::{check_sentence, SentenceVerdict};

// ---------------------------------------------------------------------------
// Shipped files

pub fn shipped(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../grammars")
        .join(name)
}

pub fn read_shipped(name: &str) -> String {
    std::fs::read_to_string(shipped(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn grammar(name: &str) -> Grammar {
    load_grammar(&read_shipped(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn verdict(g: &Grammar, sentence: &str) -> SentenceVerdict {
    let toks: Vec<&str> = sentence.split_whitespace().collect();
    check_sentence(g, &toks, &SearchConfig::default())
        .unwrap()
        .verdict
}

/// (sentence, expected grammatical) pairs from a corpus file.
pub fn corpus(name: &str) -> Vec<(String, bool)> {
    read_shipped(name)
        .lines()
        .filter(|l| !l.trim().is_empty() && !l.starts_with('#'))
        .map(|l| {
            let (s, mark) = l.rsplit_once('\t').expect("corpus lines carry a mark");
            (s.to_string(), mark.trim() == "+")
        })
        .collect()
}

pub const AGREEMENT_CORPUS: [&str; 4] = [
    "Sandy snores",
    "Sandy snore",
    "Professors snores",
    "Professors snore",
];

/// The sentences of the agreement corpus a grammar accepts.
pub fn accepted(g: &Grammar) -> Vec<&'static str> {
    AGREEMENT_CORPUS
        .iter()
        .copied()
        .filter(|s| verdict(g, s) == SentenceVerdict::Grammatical)
        .collect()
}

/// Adds `(^ attr)=value` to every lexical entry selected by `mask`, as a
/// text transformation of the grammar file.
pub fn with_lexical_equation(text: &str, attr: &str, value: &str, mask: u32) -> String {
    let mut out = format!("attr {attr}\nconst {value}\n");
    let mut k = 0;
    for line in text.lines() {
        if line.starts_with("lex ") {
            let selected = mask & (1 << k) != 0;
            k += 1;
            if selected {
                let close = line.rfind('}').unwrap();
                out.push_str(&format!("{}; (^ {attr})={value}}}\n", &line[..close]));
                continue;
            }
        }
        out.push_str(line);
        out.push('\n');
    }
    out
}

// ---------------------------------------------------------------------------
// Strategies

const ATOMS: [&str; 4] = ["e", "t", "NOM", "ACC"];
const ATTRS: [&str; 3] = ["SUBJ", "OBJ", "XCOMP"];

fn arb_path() -> impl Strategy<Value = Vec<String>> {
    prop::collection::vec(
        prop::sample::select(&ATTRS[..]).prop_map(String::from),
        1..3,
    )
}

/// Raw, possibly non-canonical terms over every constructor, including
/// nested and empty multisets.
pub fn arb_fterm() -> impl Strategy<Value = FTerm> {
    let leaf = prop_oneof![
        4 => prop::sample::select(&ATOMS[..]).prop_map(FTerm::atom),
        1 => (arb_path(), arb_path()).prop_map(|(a, b)| FTerm::PathEq(a, b)),
    ];
    leaf.prop_recursive(4, 24, 4, |inner| {
        prop_oneof![
            2 => prop::collection::vec(inner.clone(), 0..4).prop_map(FTerm::Multiset),
            2 => (prop::sample::select(&ATTRS[..]), inner.clone()).prop_map(|(f, b)| FTerm::embed(f, b)),
            2 => (inner.clone(), inner.clone()).prop_map(|(a, b)| FTerm::limp(a, b)),
            1 => inner.prop_map(FTerm::opt),
        ]
    })
}

/// Canonical terms whose serialization fits in `max_len` characters.
pub fn arb_short_term(max_len: usize) -> impl Strategy<Value = FTerm> {
    arb_fterm()
        .prop_map(|t| canonicalize(&t))
        .prop_filter("serialization too long", move |t| {
            serialize_fterm(t).chars().count() <= max_len
        })
}

const VARS: [&str; 3] = ["f1", "f2", "f3"];
const FATTRS: [&str; 3] = ["A", "B", "C"];
const CONSTS: [&str; 3] = ["x", "y", "z"];

fn arb_pathexpr(vars: usize, attrs: usize, max_len: usize) -> impl Strategy<Value = PathExpr> {
    (
        prop::sample::select(&VARS[..vars]),
        prop::collection::vec(prop::sample::select(&FATTRS[..attrs]), 0..=max_len),
    )
        .prop_map(|(v, attrs)| PathExpr::new(v, attrs))
}

/// A defining equation over a small vocabulary.
pub fn arb_equation(vars: usize, attrs: usize, consts: usize) -> impl Strategy<Value = Equation> {
    let rhs = prop_oneof![
        arb_pathexpr(vars, attrs, 2).prop_map(Value::Path),
        prop::sample::select(&CONSTS[..consts]).prop_map(|c| Value::Const(c.to_string())),
    ];
    (arb_pathexpr(vars, attrs, 2), rhs).prop_map(|(l, r)| Equation::defining(l, r))
}

/// Boolean combinations of at most `leaves` equations.
pub fn arb_description(leaves: u32) -> impl Strategy<Value = FDescription> {
    arb_equation(2, 2, 2)
        .prop_map(FDescription::Eq)
        .prop_recursive(3, leaves, 3, |inner| {
            prop_oneof![
                prop::collection::vec(inner.clone(), 1..4).prop_map(FDescription::And),
                prop::collection::vec(inner, 1..4).prop_map(FDescription::Or),
            ]
        })
}

// ---------------------------------------------------------------------------
// Brute-force evaluation of descriptions on total finite structures

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Elem {
    Node(usize),
    Const(usize),
}

/// Every structure over two complex nodes, the constants `x`, `y`, the
/// attributes `A`, `B` and the variables `f1`, `f2`.
struct Total {
    edges: [[Option<Elem>; 2]; 2],
    vars: [Elem; 2],
}

fn all_totals() -> Vec<Total> {
    let values = [Elem::Node(0), Elem::Node(1), Elem::Const(0), Elem::Const(1)];
    let slot: Vec<Option<Elem>> = std::iter::once(None)
        .chain(values.iter().copied().map(Some))
        .collect();
    let mut out = Vec::new();
    for a in &slot {
        for b in &slot {
            for c in &slot {
                for d in &slot {
                    for v1 in values {
                        for v2 in values {
                            out.push(Total {
                                edges: [[*a, *b], [*c, *d]],
                                vars: [v1, v2],
                            });
                        }
                    }
                }
            }
        }
    }
    out
}

impl Total {
    fn path(&self, p: &PathExpr) -> Option<Elem> {
        let mut cur = self.vars[VARS.iter().position(|v| *v == p.var)?];
        for attr in &p.attrs {
            let Elem::Node(n) = cur else { return None };
            cur = self.edges[n][FATTRS.iter().position(|a| a == attr)?]?;
        }
        Some(cur)
    }

    fn holds(&self, eq: &Equation) -> bool {
        let Some(l) = self.path(&eq.lhs) else {
            return false;
        };
        match &eq.rhs {
            Value::Path(p) => self.path(p) == Some(l),
            Value::Const(c) => l == Elem::Const(CONSTS.iter().position(|k| k == c).unwrap()),
        }
    }

    fn satisfies(&self, d: &FDescription) -> bool {
        match d {
            FDescription::Eq(e) => self.holds(e),
            FDescription::And(ds) => ds.iter().all(|d| self.satisfies(d)),
            FDescription::Or(ds) => ds.iter().any(|d| self.satisfies(d)),
        }
    }
}

fn constructor_count(t: &FTerm) -> usize {
    match t {
        FTerm::Atom(_) => 0,
        FTerm::PathEq(..) => 1,
        FTerm::Multiset(es) => es.iter().map(constructor_count).sum(),
        FTerm::Embed(_, b) | FTerm::Opt(b) => constructor_count(b),
        FTerm::Limp(a, b) => 1 + constructor_count(a) + constructor_count(b),
    }
}

fn has_bad_multiset(t: &FTerm) -> bool {
    match t {
        FTerm::Multiset(es) => {
            es.len() == 1
                || es
                    .iter()
                    .any(|e| matches!(e, FTerm::Multiset(_)) || has_bad_multiset(e))
        }
        FTerm::Atom(_) | FTerm::PathEq(..) => false,
        FTerm::Embed(_, b) | FTerm::Opt(b) => has_bad_multiset(b),
        FTerm::Limp(a, b) => has_bad_multiset(a) || has_bad_multiset(b),
    }
}

// ---------------------------------------------------------------------------
// Property checks. Each runs `cases` cases and reports the first failure.

fn runner(cases: u32, deterministic: bool) -> TestRunner {
    let config = Config {
        cases,
        failure_persistence: None,
        max_global_rejects: 100_000,
        ..Config::default()
    };
    if deterministic {
        let rng = TestRng::deterministic_rng(config.rng_algorithm);
        TestRunner::new_with_rng(config, rng)
    } else {
        TestRunner::new(config)
    }
}

fn run<S: Strategy>(
    cases: u32,
    deterministic: bool,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<(), String> {
    runner(cases, deterministic)
        .run(&strategy, test)
        .map_err(|e| e.to_string())
}

pub fn canonicalize_idempotent(cases: u32, det: bool) -> Result<(), String> {
    run(cases, det, arb_fterm(), |t| {
        let once = canonicalize(&t);
        prop_assert_eq!(canonicalize(&once), once.clone());
        prop_assert!(!has_bad_multiset(&once), "{}", once);
        Ok(())
    })
}

pub fn parse_serialize_round_trip(cases: u32, det: bool) -> Result<(), String> {
    run(cases, det, arb_fterm(), |t| {
        let c = canonicalize(&t);
        let text = serialize_fterm(&c);
        let back =
            parse_fterm_untyped(&text).map_err(|e| TestCaseError::fail(format!("{text}: {e}")))?;
        prop_assert_eq!(back, c);
        Ok(())
    })
}

/// A canonical, non-multiset term.
fn arb_body() -> impl Strategy<Value = FTerm> {
    arb_fterm()
        .prop_map(|t| canonicalize(&t))
        .prop_filter("multiset body", |t| !matches!(t, FTerm::Multiset(_)))
}

pub fn distribute_factor_identity(cases: u32, det: bool) -> Result<(), String> {
    let strategy = (
        prop::collection::vec(arb_fterm(), 0..3),
        prop::sample::select(&ATTRS[..]),
        arb_body(),
        arb_body(),
    );
    run(cases, det, strategy, |(rest, f, a1, a2)| {
        let mut split = rest.clone();
        split.push(FTerm::embed(f, a1.clone()));
        split.push(FTerm::embed(f, a2.clone()));
        let split = canonicalize(&FTerm::Multiset(split));
        let mut joined = rest;
        joined.push(FTerm::embed(f, FTerm::Multiset(vec![a1, a2])));
        let joined = canonicalize(&FTerm::Multiset(joined));
        let factors = enumerate_steps(&split);
        prop_assert!(
            factors
                .iter()
                .any(|s| s.rule == Rule::Factor && s.after == joined),
            "no Factor from {} to {}",
            split,
            joined
        );
        let spreads = enumerate_steps(&joined);
        prop_assert!(
            spreads
                .iter()
                .any(|s| s.rule == Rule::Distribute && s.after == split),
            "no Distribute from {} back to {}",
            joined,
            split
        );
        Ok(())
    })
}

pub fn witness_replay(cases: u32, det: bool) -> Result<(), String> {
    let strategy = prop_oneof![
        any::<u64>()
            .prop_map(|seed| gen_derivable_fterm(&GenConfig::default().with_seed(seed)).unwrap()),
        arb_short_term(60),
    ];
    run(cases, det, strategy, |t| {
        let r = reduce_search(&t, &SearchConfig::default());
        prop_assert_eq!(r.witness.is_some(), r.verdict == Verdict::Grammatical);
        let Some(witness) = r.witness else {
            return Ok(());
        };
        let mut state = r.start.clone();
        for step in &witness {
            prop_assert_eq!(&step.before, &state);
            let available = enumerate_steps(&state);
            prop_assert!(
                available.contains(step),
                "step {:?} not available at {}",
                step.rule,
                state
            );
            state = step.after.clone();
        }
        prop_assert!(state.is_goal(), "witness ends in {}", state);
        Ok(())
    })
}

pub fn dnf_preserves_semantics(cases: u32, det: bool) -> Result<(), String> {
    let totals = all_totals();
    run(cases, det, arb_description(6), move |d| {
        let conjuncts = dnf(&d);
        for s in &totals {
            let direct = s.satisfies(&d);
            let expanded = conjuncts.iter().any(|c| c.iter().all(|e| s.holds(e)));
            prop_assert_eq!(direct, expanded, "description {}", d);
        }
        Ok(())
    })
}

pub fn minimal_model(cases: u32, det: bool) -> Result<(), String> {
    let strategy = prop::collection::vec(arb_equation(3, 3, 3), 1..=8);
    run(cases, det, strategy, |eqs| {
        let all = enumerate_structures(&eqs, 4);
        match solve_conjunct(&eqs) {
            None => prop_assert!(
                all.is_empty(),
                "solver says inconsistent, enumeration found {}",
                all[0]
            ),
            Some(model) => {
                for s in &all {
                    prop_assert!(subsumes(&model, s), "{} does not subsume {}", model, s);
                }
                if model.complex_count() <= 4 {
                    let key = model.canonical_key();
                    prop_assert!(
                        all.iter().any(|s| s.canonical_key() == key),
                        "model {} not enumerated",
                        model
                    );
                }
            }
        }
        Ok(())
    })
}

/// Sanity counter for the minimality property: how many of `n` generated
/// conjuncts are consistent.
pub fn consistent_share(n: u32) -> (u32, u32) {
    let mut runner = runner(1, true);
    let strategy = prop::collection::vec(arb_equation(3, 3, 3), 1..=8);
    let mut ok = 0;
    for _ in 0..n {
        let eqs = strategy.new_tree(&mut runner).unwrap().current();
        if solve_conjunct(&eqs).is_some() {
            ok += 1;
        }
    }
    (ok, n)
}

pub fn non_contrastive_feature(cases: u32, det: bool) -> Result<(), String> {
    let text = read_shipped("english-lfg-defining.rlfg");
    let base = accepted(&load_grammar(&text).unwrap());
    let strategy = (
        prop::sample::select(vec!["HISTORICAL-ORIGIN", "REGISTER", "ETYMON"]),
        prop::sample::select(vec!["ROMANCE", "GERMANIC", "CELTIC"]),
        0u32..16,
    );
    run(cases, det, strategy, move |(attr, value, mask)| {
        let g = load_grammar(&with_lexical_equation(&text, attr, value, mask))
            .map_err(|e| TestCaseError::fail(e.to_string()))?;
        prop_assert_eq!(accepted(&g), base.clone());
        Ok(())
    })
}

pub fn engine_matches_oracle(cases: u32, det: bool) -> Result<(), String> {
    run(cases, det, arb_short_term(60), |t| {
        let engine = reduce_search(&t, &SearchConfig::default()).verdict;
        let oracle = oracle_reduce(&t).map_err(|e| TestCaseError::fail(format!("{t}: {e}")))?;
        let expected = match oracle {
            OracleVerdict::Grammatical => Verdict::Grammatical,
            OracleVerdict::Ungrammatical => Verdict::Ungrammatical,
        };
        prop_assert_eq!(engine, expected, "{}", t);
        Ok(())
    })
}

pub fn consuming_steps_shrink(cases: u32, det: bool) -> Result<(), String> {
    run(cases, det, arb_short_term(80), |t| {
        for step in enumerate_steps(&t) {
            if matches!(step.rule, Rule::ApplyLimp | Rule::ApplyPathEq) {
                prop_assert!(
                    constructor_count(&step.after) < constructor_count(&step.before),
                    "{:?}: {} -> {}",
                    step.rule,
                    step.before,
                    step.after
                );
            }
        }
        Ok(())
    })
}

/// Every criterion-level property with its name, for the acceptance report.
pub type PropertyCheck = fn(u32, bool) -> Result<(), String>;

pub fn core_properties() -> Vec<(&'static str, PropertyCheck)> {
    vec![
        ("canonicalize idempotence", canonicalize_idempotent),
        ("parse/serialize round-trip", parse_serialize_round_trip),
        ("Distribute/Factor identity", distribute_factor_identity),
        ("witness replay validity", witness_replay),
        ("dnf semantic preservation", dnf_preserves_semantics),
        ("solve_conjunct minimality", minimal_model),
    ]
}
