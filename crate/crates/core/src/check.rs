//! Whole-sentence checking: parse, instantiate every tree, decide each
//! instance, and aggregate. A sentence is grammatical when some parse is.

use std::fmt;
use std::time::Instant;

use serde::Serialize;
use serde_json::Value as Json;

use crate::grammar::{instantiate_lfg, instantiate_rlfg, Grammar, GrammarError, Mode};
use crate::lfg::{solve, FStructure};
use crate::reduce::{reduce_search, ReductionResult, SearchConfig, Verdict};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum SentenceVerdict {
    Grammatical,
    Ungrammatical,
    NoParse,
    Undecided,
}

impl fmt::Display for SentenceVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// How one parse fared.
#[derive(Debug, Clone)]
pub enum ParseOutcome {
    Reduction {
        fterm: String,
        result: ReductionResult,
    },
    Solution {
        fdescription: String,
        solutions: Vec<FStructure>,
    },
}

impl ParseOutcome {
    pub fn verdict(&self) -> Verdict {
        match self {
            ParseOutcome::Reduction { result, .. } => result.verdict,
            ParseOutcome::Solution { solutions, .. } if solutions.is_empty() => {
                Verdict::Ungrammatical
            }
            ParseOutcome::Solution { .. } => Verdict::Grammatical,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ParseReport {
    pub tree: String,
    pub outcome: ParseOutcome,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct Timings {
    pub parse: f64,
    pub check: f64,
    pub total: f64,
}

#[derive(Debug, Clone)]
pub struct CheckReport {
    pub sentence: Vec<String>,
    pub parses: usize,
    pub verdict: SentenceVerdict,
    pub per_parse: Vec<ParseReport>,
    pub timings_ms: Timings,
    /// Set when a token is missing from the lexicon.
    pub unknown_word: Option<String>,
}

fn ms(since: Instant) -> f64 {
    since.elapsed().as_secs_f64() * 1e3
}

/// Parses `tokens` and decides every parse. Unknown words give a report
/// with verdict `NoParse`; other grammar errors are returned.
pub fn check_sentence(
    g: &Grammar,
    tokens: &[&str],
    cfg: &SearchConfig,
) -> Result<CheckReport, GrammarError> {
    let t0 = Instant::now();
    let sentence = tokens.iter().map(|s| s.to_string()).collect();
    let trees = match g.parse(tokens) {
        Ok(trees) => trees,
        Err(GrammarError::UnknownWord(w)) => {
            let elapsed = ms(t0);
            return Ok(CheckReport {
                sentence,
                parses: 0,
                verdict: SentenceVerdict::NoParse,
                per_parse: Vec::new(),
                timings_ms: Timings {
                    parse: elapsed,
                    check: 0.0,
                    total: elapsed,
                },
                unknown_word: Some(w),
            });
        }
        Err(e) => return Err(e),
    };
    let parse_ms = ms(t0);
    let t1 = Instant::now();
    let mut per_parse = Vec::with_capacity(trees.len());
    for tree in &trees {
        let outcome = match g.mode {
            Mode::Rlfg => {
                let term = instantiate_rlfg(tree)?;
                ParseOutcome::Reduction {
                    fterm: term.to_string(),
                    result: reduce_search(&term, cfg),
                }
            }
            Mode::Lfg => {
                let d = instantiate_lfg(tree)?;
                ParseOutcome::Solution {
                    fdescription: d.to_string(),
                    solutions: solve(&d),
                }
            }
        };
        per_parse.push(ParseReport {
            tree: tree.to_string(),
            outcome,
        });
    }
    let verdicts: Vec<Verdict> = per_parse.iter().map(|p| p.outcome.verdict()).collect();
    let verdict = if trees.is_empty() {
        SentenceVerdict::NoParse
    } else if verdicts.contains(&Verdict::Grammatical) {
        SentenceVerdict::Grammatical
    } else if verdicts.contains(&Verdict::Undecided) {
        SentenceVerdict::Undecided
    } else {
        SentenceVerdict::Ungrammatical
    };
    Ok(CheckReport {
        sentence,
        parses: trees.len(),
        verdict,
        per_parse,
        timings_ms: Timings {
            parse: parse_ms,
            check: ms(t1),
            total: ms(t0),
        },
        unknown_word: None,
    })
}

impl CheckReport {
    pub fn to_json(&self) -> Json {
        let per_parse: Vec<Json> = self
            .per_parse
            .iter()
            .map(|p| match &p.outcome {
                ParseOutcome::Reduction { fterm, result } => serde_json::json!({
                    "tree": p.tree,
                    "fterm": fterm,
                    "result": result,
                }),
                ParseOutcome::Solution {
                    fdescription,
                    solutions,
                } => serde_json::json!({
                    "tree": p.tree,
                    "fdescription": fdescription,
                    "result": {
                        "verdict": p.outcome.verdict(),
                        "solutions": solutions.iter().map(FStructure::to_json).collect::<Vec<_>>(),
                    },
                }),
            })
            .collect();
        let mut out = serde_json::json!({
            "sentence": self.sentence,
            "parses": self.parses,
            "verdict": self.verdict,
            "perParse": per_parse,
            "timingsMs": self.timings_ms,
        });
        if let Some(w) = &self.unknown_word {
            out["unknownWord"] = Json::String(w.clone());
        }
        out
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "sentence: {}", self.sentence.join(" "))?;
        if let Some(w) = &self.unknown_word {
            writeln!(f, "unknown word: {w}")?;
        }
        writeln!(f, "parses: {}", self.parses)?;
        for (i, p) in self.per_parse.iter().enumerate() {
            writeln!(f, "parse {}: {}", i + 1, p.tree)?;
            match &p.outcome {
                ParseOutcome::Reduction { fterm, result } => {
                    writeln!(f, "  f-term: {fterm}")?;
                    writeln!(
                        f,
                        "  result: {:?} after {} states",
                        result.verdict, result.states_explored
                    )?;
                }
                ParseOutcome::Solution {
                    fdescription,
                    solutions,
                } => {
                    writeln!(f, "  f-description: {fdescription}")?;
                    if solutions.is_empty() {
                        writeln!(f, "  result: no solution")?;
                    }
                    for s in solutions {
                        writeln!(f, "  solution: {s}")?;
                    }
                }
            }
        }
        write!(f, "verdict: {}", self.verdict)
    }
}
