use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde_json::{json, Value as Json};

use rlfg_core::lfg::parse_fdescription_file;
use rlfg_core::reduce::trace_witness;
use rlfg_core::{
    check_sentence, instantiate_rlfg, load_grammar, reduce_search, solve, solve_relaxed,
    CheckReport, Grammar, Mode, SearchConfig, SentenceVerdict, Verdict,
};

const EXIT_USAGE: u8 = 4;

#[derive(Parser)]
#[command(
    name = "rlfg",
    version,
    about = "Check sentences against resource-based and classical LFG grammars"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct Limits {
    /// Maximum number of reduction states to explore.
    #[arg(long, default_value_t = SearchConfig::default().max_states)]
    max_states: usize,
    /// Maximum derivation length.
    #[arg(long, default_value_t = SearchConfig::default().max_depth)]
    max_depth: usize,
}

impl From<Limits> for SearchConfig {
    fn from(l: Limits) -> Self {
        SearchConfig {
            max_states: l.max_states,
            max_depth: l.max_depth,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Decide one sentence.
    Check {
        grammar: PathBuf,
        sentence: String,
        #[command(flatten)]
        limits: Limits,
        /// Print the report as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Print the derivation of a grammatical sentence.
    Trace {
        grammar: PathBuf,
        sentence: String,
        #[command(flatten)]
        limits: Limits,
    },
    /// Decide every sentence of a corpus file.
    Batch {
        grammar: PathBuf,
        corpus: PathBuf,
        #[command(flatten)]
        limits: Limits,
        #[arg(long)]
        json: bool,
    },
    /// Solve an f-description file and print its f-structures as JSON.
    Solve {
        fdescription: PathBuf,
        /// List every candidate with functionality relaxed across sites.
        #[arg(long)]
        relaxed: bool,
    },
}

/// A failure that maps to the usage exit code.
#[derive(Debug)]
struct Usage(anyhow::Error);

fn verdict_code(v: SentenceVerdict) -> u8 {
    match v {
        SentenceVerdict::Grammatical => 0,
        SentenceVerdict::Ungrammatical => 1,
        SentenceVerdict::NoParse => 2,
        SentenceVerdict::Undecided => 3,
    }
}

fn read(path: &Path) -> Result<String, Usage> {
    std::fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))
        .map_err(Usage)
}

fn grammar(path: &Path) -> Result<Grammar, Usage> {
    let text = read(path)?;
    load_grammar(&text)
        .with_context(|| format!("{}", path.display()))
        .map_err(Usage)
}

fn check(g: &Grammar, sentence: &str, cfg: &SearchConfig) -> Result<CheckReport, Usage> {
    let tokens: Vec<&str> = sentence.split_whitespace().collect();
    check_sentence(g, &tokens, cfg).map_err(|e| Usage(e.into()))
}

fn print_json(v: &Json) {
    println!(
        "{}",
        serde_json::to_string_pretty(v).expect("JSON values serialize")
    );
}

fn cmd_check(path: &Path, sentence: &str, cfg: SearchConfig, as_json: bool) -> Result<u8, Usage> {
    let g = grammar(path)?;
    let report = check(&g, sentence, &cfg)?;
    if as_json {
        print_json(&report.to_json());
    } else {
        println!("{report}");
    }
    Ok(verdict_code(report.verdict))
}

fn cmd_trace(path: &Path, sentence: &str, cfg: SearchConfig) -> Result<u8, Usage> {
    let g = grammar(path)?;
    if g.mode != Mode::Rlfg {
        return Err(Usage(anyhow::anyhow!("trace needs a grammar in rlfg mode")));
    }
    let tokens: Vec<&str> = sentence.split_whitespace().collect();
    let trees = match g.parse(&tokens) {
        Ok(trees) => trees,
        Err(rlfg_core::grammar::GrammarError::UnknownWord(w)) => {
            eprintln!("no parse: unknown word `{w}`");
            return Ok(verdict_code(SentenceVerdict::NoParse));
        }
        Err(e) => return Err(Usage(e.into())),
    };
    if trees.is_empty() {
        eprintln!("no parse");
        return Ok(verdict_code(SentenceVerdict::NoParse));
    }
    let mut undecided = false;
    for tree in &trees {
        let term = instantiate_rlfg(tree).map_err(|e| Usage(e.into()))?;
        let result = reduce_search(&term, &cfg);
        match result.verdict {
            Verdict::Grammatical => {
                print!(
                    "{}",
                    trace_witness(&result).expect("grammatical results carry a witness")
                );
                return Ok(0);
            }
            Verdict::Undecided => undecided = true,
            Verdict::Ungrammatical => {}
        }
    }
    let v = if undecided {
        SentenceVerdict::Undecided
    } else {
        SentenceVerdict::Ungrammatical
    };
    eprintln!("{}: no derivation of t", v);
    Ok(verdict_code(v))
}

/// A corpus line: the sentence and the expected verdict, if marked.
fn corpus_line(line: &str) -> Option<(&str, Option<bool>)> {
    let line = line.trim_end_matches('\r');
    if line.trim().is_empty() || line.trim_start().starts_with('#') {
        return None;
    }
    Some(match line.rsplit_once('\t') {
        Some((s, "+")) => (s, Some(true)),
        Some((s, "-")) => (s, Some(false)),
        _ => (line, None),
    })
}

fn cmd_batch(path: &Path, corpus: &Path, cfg: SearchConfig, as_json: bool) -> Result<u8, Usage> {
    let g = grammar(path)?;
    let text = read(corpus)?;
    let lines: Vec<(usize, &str, Option<bool>)> = text
        .lines()
        .enumerate()
        .filter_map(|(i, l)| corpus_line(l).map(|(s, e)| (i + 1, s, e)))
        .collect();
    let reports: Vec<CheckReport> = lines
        .par_iter()
        .map(|(_, s, _)| check(&g, s, &cfg))
        .collect::<Result<_, _>>()?;
    let mut mismatches = 0;
    for ((line, s, expected), r) in lines.iter().zip(&reports) {
        let Some(expected) = expected else { continue };
        if (r.verdict == SentenceVerdict::Grammatical) != *expected {
            mismatches += 1;
            let want = if *expected {
                "Grammatical"
            } else {
                "not Grammatical"
            };
            eprintln!("line {line}: {s}: expected {want}, got {}", r.verdict);
        }
    }
    if as_json {
        print_json(&Json::Array(
            reports.iter().map(CheckReport::to_json).collect(),
        ));
    } else {
        for r in &reports {
            println!("{}\t{}", r.verdict, r.sentence.join(" "));
        }
    }
    Ok(u8::from(mismatches > 0))
}

fn cmd_solve(path: &Path, relaxed: bool) -> Result<u8, Usage> {
    let text = read(path)?;
    let d = parse_fdescription_file(&text)
        .with_context(|| format!("{}", path.display()))
        .map_err(Usage)?;
    let out: Vec<Json> = if relaxed {
        solve_relaxed(&d)
            .iter()
            .map(|c| {
                json!({
                    "structure": c.structure.to_json(),
                    "satisfied": c.satisfied,
                    "split": c.split,
                })
            })
            .collect()
    } else {
        solve(&d).iter().map(|s| s.to_json()).collect()
    };
    print_json(&Json::Array(out));
    Ok(0)
}

fn run(cli: Cli) -> Result<u8, Usage> {
    match cli.command {
        Command::Check {
            grammar,
            sentence,
            limits,
            json,
        } => cmd_check(&grammar, &sentence, limits.into(), json),
        Command::Trace {
            grammar,
            sentence,
            limits,
        } => cmd_trace(&grammar, &sentence, limits.into()),
        Command::Batch {
            grammar,
            corpus,
            limits,
            json,
        } => cmd_batch(&grammar, &corpus, limits.into(), json),
        Command::Solve {
            fdescription,
            relaxed,
        } => cmd_solve(&fdescription, relaxed),
    }
}

fn validate(cli: &Cli) -> Result<()> {
    let limits = match &cli.command {
        Command::Check { limits, .. }
        | Command::Trace { limits, .. }
        | Command::Batch { limits, .. } => limits,
        Command::Solve { .. } => return Ok(()),
    };
    if limits.max_states == 0 {
        bail!("--max-states must be positive");
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Err(e) = validate(&cli) {
        eprintln!("error: {e}");
        return ExitCode::from(EXIT_USAGE);
    }
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_lines() {
        assert_eq!(corpus_line("a b\t+"), Some(("a b", Some(true))));
        assert_eq!(corpus_line("a b\t-\r"), Some(("a b", Some(false))));
        assert_eq!(corpus_line("a b"), Some(("a b", None)));
        assert_eq!(corpus_line("  # note"), None);
        assert_eq!(corpus_line("   "), None);
    }

    #[test]
    fn parses_limits() {
        let cli = Cli::try_parse_from(["rlfg", "check", "g", "s", "--max-states", "7"]).unwrap();
        let Command::Check { limits, json, .. } = cli.command else {
            panic!()
        };
        assert_eq!((limits.max_states, limits.max_depth, json), (7, 200, false));
    }
}
