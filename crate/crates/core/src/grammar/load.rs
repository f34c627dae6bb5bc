//! The line-oriented grammar file format.
//!
//! ```text
//! mode rlfg                      # or lfg
//! start S
//! type e contentful              # or vacuous
//! attr SUBJ OBJ
//! cat S NP VP
//! const Sandy SG                 # classical-mode constants
//! S -> NP:{SUBJ(NOM, v)} VP:{v}
//! VP -> V:{v} [ NP:{OBJ v} ]     # bracketed elements are optional
//! lex she NP {NOM -o e}
//! ```
//!
//! Declarations may appear anywhere; rules and entries are checked against
//! the complete table. An element without `:{...}` gets the identity
//! annotation (`v`, or `^=v` in classical mode).

use std::collections::BTreeMap;

use super::{Annotation, Grammar, GrammarError, LexEntry, Mode, RhsElement, Rule};
use crate::fterm::{parse_fterm, parse_template, Decls, DeclsError, FTermError, GOAL_TYPE};
use crate::lfg::{parse_schema, DescError};

/// A word of a line with its 1-based column.
fn words(line: &str) -> Vec<(&str, usize)> {
    let mut out = Vec::new();
    let mut start: Option<usize> = None;
    for (i, c) in line.char_indices() {
        match (c.is_whitespace(), start) {
            (true, Some(s)) => {
                out.push((&line[s..i], s));
                start = None;
            }
            (false, None) => start = Some(i),
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((&line[s..], s));
    }
    out.into_iter()
        .map(|(w, byte)| (w, line[..byte].chars().count() + 1))
        .collect()
}

fn syntax(line: usize, col: usize, msg: impl Into<String>) -> GrammarError {
    GrammarError::Syntax {
        line,
        col,
        msg: msg.into(),
    }
}

fn declared(r: Result<(), DeclsError>, line: usize, col: usize) -> Result<(), GrammarError> {
    r.map_err(|e| match e {
        DeclsError::Duplicate(name) => GrammarError::Duplicate { line, col, name },
        DeclsError::Reserved(name) => syntax(line, col, format!("`{name}` is reserved")),
    })
}

/// Strips a trailing `#` comment.
fn strip_comment(line: &str) -> &str {
    line.split('#').next().unwrap_or("")
}

struct Payload<'a> {
    text: &'a str,
    line: usize,
    /// Column of the first character of `text`.
    col: usize,
}

impl Payload<'_> {
    fn col_at(&self, byte: usize) -> usize {
        self.col + self.text[..byte.min(self.text.len())].chars().count()
    }

    fn term_error(&self, e: FTermError) -> GrammarError {
        match e {
            FTermError::Syntax { pos, msg } => syntax(self.line, self.col_at(pos), msg),
            FTermError::Undeclared { kind, name, pos } => GrammarError::Undeclared {
                line: self.line,
                col: self.col_at(pos),
                kind,
                name,
            },
        }
    }

    fn desc_error(&self, e: DescError) -> GrammarError {
        match e {
            DescError::Syntax { pos, msg } => syntax(self.line, self.col_at(pos), msg),
            DescError::Undeclared { kind, name } => GrammarError::Undeclared {
                line: self.line,
                col: self.col_at(self.text.find(name.as_str()).unwrap_or(0)),
                kind,
                name,
            },
            DescError::Line { source, .. } => self.desc_error(*source),
        }
    }

    fn annotation(&self, mode: Mode, decls: &Decls) -> Result<Annotation, GrammarError> {
        match mode {
            Mode::Rlfg => parse_template(self.text, decls)
                .map(Annotation::Term)
                .map_err(|e| self.term_error(e)),
            Mode::Lfg => parse_schema(self.text, decls)
                .map(Annotation::Desc)
                .map_err(|e| self.desc_error(e)),
        }
    }

    fn lexical(&self, mode: Mode, decls: &Decls) -> Result<Annotation, GrammarError> {
        match mode {
            Mode::Rlfg => parse_fterm(self.text, decls)
                .map(Annotation::Term)
                .map_err(|e| self.term_error(e)),
            Mode::Lfg => self.annotation(mode, decls),
        }
    }
}

/// Reads `{...}` starting at byte `open` of `line`; returns the payload and
/// the byte after the closing brace.
fn braced(line: &str, lineno: usize, open: usize) -> Result<(Payload<'_>, usize), GrammarError> {
    let col = line[..open].chars().count() + 1;
    if !line[open..].starts_with('{') {
        return Err(syntax(lineno, col, "expected `{`"));
    }
    let close = line[open..]
        .find('}')
        .map(|i| open + i)
        .ok_or_else(|| syntax(lineno, col, "unterminated `{`"))?;
    Ok((
        Payload {
            text: &line[open + 1..close],
            line: lineno,
            col: col + 1,
        },
        close + 1,
    ))
}

struct Element<'a> {
    category: &'a str,
    col: usize,
    optional: bool,
    payload: Option<Payload<'a>>,
}

fn rule_body(line: &str, lineno: usize, mut i: usize) -> Result<Vec<Element<'_>>, GrammarError> {
    let col = |b: usize| line[..b].chars().count() + 1;
    let skip_ws = |mut i: usize| {
        while let Some(c) = line[i..].chars().next() {
            if !c.is_whitespace() {
                break;
            }
            i += c.len_utf8();
        }
        i
    };
    let mut out = Vec::new();
    loop {
        i = skip_ws(i);
        if i >= line.len() {
            break;
        }
        let optional = line[i..].starts_with('[');
        if optional {
            i = skip_ws(i + 1);
        }
        let start = i;
        while let Some(c) = line[i..].chars().next() {
            if c.is_whitespace() || matches!(c, ':' | '[' | ']' | '{' | '}') {
                break;
            }
            i += c.len_utf8();
        }
        if i == start {
            return Err(syntax(lineno, col(i), "expected a category"));
        }
        let category = &line[start..i];
        let payload = if line[i..].starts_with(':') {
            let (p, next) = braced(line, lineno, i + 1)?;
            i = next;
            Some(p)
        } else {
            None
        };
        if optional {
            i = skip_ws(i);
            if !line[i..].starts_with(']') {
                return Err(syntax(lineno, col(i), "expected `]`"));
            }
            i += 1;
        }
        out.push(Element {
            category,
            col: col(start),
            optional,
            payload,
        });
    }
    Ok(out)
}

/// Parses and validates a grammar file.
pub fn load_grammar(text: &str) -> Result<Grammar, GrammarError> {
    let lines: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, strip_comment(l)))
        .filter(|(_, l)| !l.trim().is_empty())
        .collect();

    let mut decls = Decls::new();
    let mut mode: Option<(Mode, usize, usize)> = None;
    let mut start: Option<(String, usize, usize)> = None;
    let mut body: Vec<(usize, &str)> = Vec::new();

    for &(lineno, line) in &lines {
        let ws = words(line);
        let (head, head_col) = ws[0];
        let args = &ws[1..];
        let one = |what: &str| -> Result<(&str, usize), GrammarError> {
            match args {
                [(w, c)] => Ok((*w, *c)),
                _ => Err(syntax(
                    lineno,
                    head_col,
                    format!("`{head}` takes exactly one {what}"),
                )),
            }
        };
        match head {
            "mode" => {
                let (m, c) = one("mode")?;
                if mode.is_some() {
                    return Err(syntax(lineno, head_col, "mode given twice"));
                }
                let m = match m {
                    "rlfg" => Mode::Rlfg,
                    "lfg" => Mode::Lfg,
                    other => return Err(syntax(lineno, c, format!("unknown mode `{other}`"))),
                };
                mode = Some((m, lineno, head_col));
            }
            "start" => {
                let (s, c) = one("category")?;
                if start.is_some() {
                    return Err(syntax(lineno, head_col, "start given twice"));
                }
                start = Some((s.to_string(), lineno, c));
            }
            "type" => match args {
                [(name, c), (flag, fc)] => {
                    let contentful = match *flag {
                        "contentful" => true,
                        "vacuous" => false,
                        other => {
                            return Err(syntax(
                                lineno,
                                *fc,
                                format!("expected `contentful` or `vacuous`, found `{other}`"),
                            ))
                        }
                    };
                    declared(decls.declare_type(name, contentful), lineno, *c)?;
                }
                _ => {
                    return Err(syntax(
                        lineno,
                        head_col,
                        "usage: type NAME contentful|vacuous",
                    ))
                }
            },
            "attr" | "cat" | "const" => {
                if args.is_empty() {
                    return Err(syntax(
                        lineno,
                        head_col,
                        format!("`{head}` needs at least one name"),
                    ));
                }
                for &(name, c) in args {
                    let r = match head {
                        "attr" => decls.declare_attr(name),
                        "cat" => decls.declare_cat(name),
                        _ => decls.declare_const(name),
                    };
                    declared(r, lineno, c)?;
                }
            }
            _ => body.push((lineno, line)),
        }
    }

    let (mode, mode_line, mode_col) =
        mode.ok_or_else(|| syntax(1, 1, "missing `mode` directive"))?;
    if mode == Mode::Rlfg && !decls.is_type(GOAL_TYPE) {
        return Err(syntax(
            mode_line,
            mode_col,
            format!("rlfg mode needs the goal type `{GOAL_TYPE}` to be declared"),
        ));
    }

    let check_cat = |name: &str, line: usize, col: usize| {
        if decls.is_cat(name) {
            Ok(())
        } else {
            Err(GrammarError::Undeclared {
                line,
                col,
                kind: "category",
                name: name.to_string(),
            })
        }
    };

    let mut rules = Vec::new();
    let mut lexicon: BTreeMap<String, Vec<LexEntry>> = BTreeMap::new();
    for (lineno, line) in body {
        let ws = words(line);
        let (head, head_col) = ws[0];
        if head == "lex" {
            let [_, (word, _), (cat, cat_col), ..] = ws[..] else {
                return Err(syntax(
                    lineno,
                    head_col,
                    "usage: lex WORD CATEGORY {payload}",
                ));
            };
            check_cat(cat, lineno, cat_col)?;
            let after_cat = line
                .char_indices()
                .nth(cat_col - 1 + cat.chars().count())
                .map_or(line.len(), |(b, _)| b);
            let open = after_cat + (line[after_cat..].len() - line[after_cat..].trim_start().len());
            let (payload, end) = braced(line, lineno, open)?;
            if !line[end..].trim().is_empty() {
                let c = line[..end].chars().count() + 1;
                return Err(syntax(lineno, c, "unexpected text after payload"));
            }
            lexicon.entry(word.to_string()).or_default().push(LexEntry {
                word: word.to_string(),
                category: cat.to_string(),
                payload: payload.lexical(mode, &decls)?,
            });
            continue;
        }
        let Some(arrow) = line.find("->") else {
            return Err(syntax(
                lineno,
                head_col,
                format!("unknown directive `{head}`"),
            ));
        };
        let lhs_words = words(&line[..arrow]);
        let [(lhs, lhs_col)] = lhs_words[..] else {
            return Err(syntax(
                lineno,
                head_col,
                "a rule needs exactly one category before `->`",
            ));
        };
        check_cat(lhs, lineno, lhs_col)?;
        let elements = rule_body(line, lineno, arrow + 2)?;
        if elements.is_empty() {
            let c = line[..arrow].chars().count() + 3;
            return Err(syntax(lineno, c, "empty rule body"));
        }
        let mut rhs = Vec::with_capacity(elements.len());
        for el in elements {
            check_cat(el.category, lineno, el.col)?;
            let annotation = match &el.payload {
                Some(p) => p.annotation(mode, &decls)?,
                None => {
                    let identity = match mode {
                        Mode::Rlfg => "v",
                        Mode::Lfg => "^=v",
                    };
                    Payload {
                        text: identity,
                        line: lineno,
                        col: el.col,
                    }
                    .annotation(mode, &decls)?
                }
            };
            rhs.push(RhsElement {
                category: el.category.to_string(),
                optional: el.optional,
                annotation,
            });
        }
        rules.push(Rule {
            lhs: lhs.to_string(),
            rhs,
        });
    }

    let (start, start_line, start_col) =
        start.ok_or_else(|| syntax(1, 1, "missing `start` directive"))?;
    check_cat(&start, start_line, start_col)?;
    let used = rules.iter().any(|r| r.lhs == start)
        || lexicon.values().flatten().any(|e| e.category == start);
    if !used {
        return Err(syntax(
            start_line,
            start_col,
            format!("start category `{start}` has no rule or lexical entry"),
        ));
    }

    Ok(Grammar {
        decls,
        mode,
        start,
        rules,
        lexicon,
    })
}
