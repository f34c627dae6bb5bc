//! Text syntax for f-descriptions: `(f1 SUBJ NUM)=SG`, `=c` for
//! constraining equations, `&` (or `;`) and `|` with parentheses for
//! grouping. In annotation schemata `^`/`↑` and `v`/`↓` take the place of
//! f-variables; elsewhere f-variables are spelled `f` followed by digits.

use thiserror::Error;

use super::{EqKind, Equation, FDescription, PathExpr, Value, DOWN, UP};
use crate::fterm::Decls;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DescError {
    #[error("syntax error at offset {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("undeclared {kind} `{name}`")]
    Undeclared { kind: &'static str, name: String },
    #[error("line {line}: {source}")]
    Line {
        line: usize,
        #[source]
        source: Box<DescError>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Up,
    LParen,
    RParen,
    Eq,
    EqC,
    And,
    Or,
}

fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '-' || c == '\''
}

fn tokenize(text: &str) -> Result<Vec<(Tok, usize)>, DescError> {
    let mut out = Vec::new();
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut i = 0;
    while i < chars.len() {
        let (pos, c) = chars[i];
        match c {
            c if c.is_whitespace() => i += 1,
            '(' => {
                out.push((Tok::LParen, pos));
                i += 1;
            }
            ')' => {
                out.push((Tok::RParen, pos));
                i += 1;
            }
            '&' | ';' => {
                out.push((Tok::And, pos));
                i += 1;
            }
            '|' => {
                out.push((Tok::Or, pos));
                i += 1;
            }
            '^' | '↑' => {
                out.push((Tok::Up, pos));
                i += 1;
            }
            '↓' => {
                out.push((Tok::Ident(DOWN.to_string()), pos));
                i += 1;
            }
            '=' => {
                // `=c` is constraining only when `c` stands alone
                let constraining = matches!(chars.get(i + 1), Some((_, 'c')))
                    && !chars.get(i + 2).is_some_and(|&(_, n)| is_ident_char(n));
                if constraining {
                    out.push((Tok::EqC, pos));
                    i += 2;
                } else {
                    out.push((Tok::Eq, pos));
                    i += 1;
                }
            }
            c if is_ident_char(c) => {
                let start = i;
                while i < chars.len() && is_ident_char(chars[i].1) {
                    i += 1;
                }
                let name: String = chars[start..i].iter().map(|(_, c)| c).collect();
                out.push((Tok::Ident(name), pos));
            }
            other => {
                return Err(DescError::Syntax {
                    pos,
                    msg: format!("unexpected character `{other}`"),
                })
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Copy)]
enum Vars<'a> {
    /// f-variables `f1`, `f2`, ...; constants and attributes unchecked.
    Named,
    /// `^` and `v`; constants and attributes checked against declarations.
    Schema(&'a Decls),
}

fn is_named_var(name: &str) -> bool {
    name.len() > 1 && name.starts_with('f') && name[1..].chars().all(|c| c.is_ascii_digit())
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
    vars: Vars<'a>,
    site: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, DescError> {
        Err(DescError::Syntax {
            pos: self.toks.get(self.pos).map(|(_, p)| *p).unwrap_or(self.end),
            msg: msg.into(),
        })
    }

    fn var_at(&self, idx: usize) -> Option<String> {
        match (self.toks.get(idx).map(|(t, _)| t), self.vars) {
            (Some(Tok::Up), Vars::Schema(_)) => Some(UP.to_string()),
            (Some(Tok::Ident(n)), Vars::Schema(_)) if n == DOWN => Some(DOWN.to_string()),
            (Some(Tok::Ident(n)), Vars::Named) if is_named_var(n) => Some(n.clone()),
            _ => None,
        }
    }

    fn check_attr(&self, name: &str) -> Result<(), DescError> {
        match self.vars {
            Vars::Schema(d) if !d.is_attr(name) => Err(DescError::Undeclared {
                kind: "attribute",
                name: name.to_string(),
            }),
            _ => Ok(()),
        }
    }

    fn check_const(&self, name: &str) -> Result<(), DescError> {
        match self.vars {
            Vars::Schema(d) if !d.is_const(name) => Err(DescError::Undeclared {
                kind: "constant",
                name: name.to_string(),
            }),
            _ => Ok(()),
        }
    }

    fn disjunction(&mut self) -> Result<FDescription, DescError> {
        let mut parts = vec![self.conjunction()?];
        while self.peek() == Some(&Tok::Or) {
            self.pos += 1;
            parts.push(self.conjunction()?);
        }
        Ok(if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            FDescription::Or(parts)
        })
    }

    fn conjunction(&mut self) -> Result<FDescription, DescError> {
        let mut parts = vec![self.unit()?];
        while self.peek() == Some(&Tok::And) {
            self.pos += 1;
            // tolerate a trailing separator
            if matches!(self.peek(), None | Some(Tok::RParen) | Some(Tok::Or)) {
                break;
            }
            parts.push(self.unit()?);
        }
        Ok(if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            FDescription::And(parts)
        })
    }

    /// True when the tokens at the cursor read `( var attr* )`.
    fn at_path(&self) -> bool {
        if self.peek() != Some(&Tok::LParen) || self.var_at(self.pos + 1).is_none() {
            return false;
        }
        let mut i = self.pos + 2;
        loop {
            match self.toks.get(i).map(|(t, _)| t) {
                Some(Tok::Ident(_)) => i += 1,
                Some(Tok::RParen) => return true,
                _ => return false,
            }
        }
    }

    fn unit(&mut self) -> Result<FDescription, DescError> {
        if self.peek() == Some(&Tok::LParen) && !self.at_path() {
            self.pos += 1;
            let inner = self.disjunction()?;
            if self.peek() != Some(&Tok::RParen) {
                return self.err("expected `)`");
            }
            self.pos += 1;
            return Ok(inner);
        }
        self.equation().map(FDescription::Eq)
    }

    fn path(&mut self) -> Result<PathExpr, DescError> {
        if let Some(var) = self.var_at(self.pos) {
            self.pos += 1;
            return Ok(PathExpr {
                var,
                attrs: Vec::new(),
            });
        }
        if !self.at_path() {
            return self.err("expected an f-variable or `(var ATTR ...)`");
        }
        let var = self.var_at(self.pos + 1).unwrap();
        self.pos += 2;
        let mut attrs = Vec::new();
        while let Some(Tok::Ident(name)) = self.peek().cloned() {
            self.check_attr(&name)?;
            attrs.push(name);
            self.pos += 1;
        }
        self.pos += 1; // `)`
        Ok(PathExpr { var, attrs })
    }

    fn equation(&mut self) -> Result<Equation, DescError> {
        let lhs = self.path()?;
        let kind = match self.peek() {
            Some(Tok::Eq) => EqKind::Defining,
            Some(Tok::EqC) => EqKind::Constraining,
            _ => return self.err("expected `=` or `=c`"),
        };
        self.pos += 1;
        let rhs = if self.var_at(self.pos).is_some() || self.at_path() {
            Value::Path(self.path()?)
        } else if let Some(Tok::Ident(name)) = self.peek().cloned() {
            self.check_const(&name)?;
            self.pos += 1;
            Value::Const(name)
        } else {
            return self.err("expected a value");
        };
        Ok(Equation {
            lhs,
            rhs,
            kind,
            site: self.site,
        })
    }
}

fn run(text: &str, vars: Vars<'_>, site: usize) -> Result<FDescription, DescError> {
    let mut p = Parser {
        toks: tokenize(text)?,
        pos: 0,
        end: text.len(),
        vars,
        site,
    };
    if p.peek().is_none() {
        return Ok(FDescription::And(Vec::new()));
    }
    let d = p.disjunction()?;
    if p.peek().is_some() {
        return p.err("trailing input");
    }
    Ok(d)
}

/// Parses one description over f-variables `f1`, `f2`, ...
pub fn parse_fdescription(text: &str) -> Result<FDescription, DescError> {
    run(text, Vars::Named, 0)
}

/// Parses a description file: each non-blank line (after stripping `#`
/// comments) is one annotation site; lines are conjoined.
pub fn parse_fdescription_file(text: &str) -> Result<FDescription, DescError> {
    let mut parts = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("");
        if line.trim().is_empty() {
            continue;
        }
        let site = parts.len();
        let d = run(line, Vars::Named, site).map_err(|e| DescError::Line {
            line: lineno + 1,
            source: Box::new(e),
        })?;
        parts.push(d);
    }
    Ok(FDescription::And(parts))
}

/// Parses an annotation schema over `^` and `v`.
pub fn parse_schema(text: &str, decls: &Decls) -> Result<FDescription, DescError> {
    run(text, Vars::Schema(decls), 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_defining_and_constraining() {
        let d = parse_fdescription("(f1 SUBJ NUM)=SG & (f1 SUBJ NUM)=c SG").unwrap();
        let eqs = d.equations();
        assert_eq!(eqs.len(), 2);
        assert_eq!(eqs[0].kind, EqKind::Defining);
        assert_eq!(eqs[1].kind, EqKind::Constraining);
        assert_eq!(eqs[1].to_string(), "(f1 SUBJ NUM)=c SG");
    }

    #[test]
    fn constraining_marker_needs_separation() {
        let d = parse_fdescription("(f1 A)=cat").unwrap();
        assert_eq!(d.equations()[0].rhs, Value::Const("cat".into()));
        assert_eq!(d.equations()[0].kind, EqKind::Defining);
        let d = parse_fdescription("(f1 A)=c(f2 B)").unwrap();
        assert_eq!(d.equations()[0].kind, EqKind::Constraining);
    }

    #[test]
    fn grouping_and_disjunction() {
        let d = parse_fdescription("(f1 A)=x & ((f1 B)=y | (f1 C)=z)").unwrap();
        assert!(matches!(&d, FDescription::And(parts) if matches!(parts[1], FDescription::Or(_))));
        let d = parse_fdescription("(f1=f2 | f1=f3)").unwrap();
        assert!(matches!(d, FDescription::Or(_)));
    }

    #[test]
    fn variables_and_paths() {
        let d = parse_fdescription("(f1 SUBJ)=f2; f1=f3").unwrap();
        let eqs = d.equations();
        assert_eq!(
            eqs[0].rhs,
            Value::Path(PathExpr::new("f2", Vec::<String>::new()))
        );
        assert_eq!(eqs[1].lhs, PathExpr::new("f1", Vec::<String>::new()));
    }

    #[test]
    fn schema_metavariables() {
        let mut decls = Decls::new();
        decls.declare_attr("PRED").unwrap();
        decls.declare_attr("HISTORICAL-ORIGIN").unwrap();
        decls.declare_const("Sandy").unwrap();
        decls.declare_const("ROMANCE").unwrap();
        let d = parse_schema(
            "(↑ PRED)=Sandy; ^=v; (^ HISTORICAL-ORIGIN)=ROMANCE;",
            &decls,
        )
        .unwrap();
        let eqs = d.equations();
        assert_eq!(eqs[0].lhs.var, UP);
        assert_eq!(
            eqs[1].rhs,
            Value::Path(PathExpr::new(DOWN, Vec::<String>::new()))
        );
        assert_eq!(eqs[2].lhs.attrs, vec!["HISTORICAL-ORIGIN"]);
        assert_eq!(
            parse_schema("(^ PRED)=Kim", &decls),
            Err(DescError::Undeclared {
                kind: "constant",
                name: "Kim".into()
            })
        );
        assert_eq!(
            parse_schema("(^ CASE)=Sandy", &decls),
            Err(DescError::Undeclared {
                kind: "attribute",
                name: "CASE".into()
            })
        );
    }

    #[test]
    fn files_assign_one_site_per_line() {
        let d =
            parse_fdescription_file("# comment\n(f1 SUBJ)=f2\n\n(f2 NUM)=SG & (f2 PRED)=Sandy\n")
                .unwrap();
        let sites: Vec<usize> = d.equations().iter().map(|e| e.site).collect();
        assert_eq!(sites, vec![0, 1, 1]);
        let err = parse_fdescription_file("(f1 A)=x\n(f1 A)=\n").unwrap_err();
        assert!(matches!(err, DescError::Line { line: 2, .. }));
    }

    #[test]
    fn syntax_errors() {
        assert!(parse_fdescription("(f1 A) x").is_err());
        assert!(parse_fdescription("(Sandy A)=x").is_err());
        assert!(parse_fdescription("(f1 A)=x)").is_err());
        assert!(parse_fdescription("((f1 A)=x").is_err());
    }
}
