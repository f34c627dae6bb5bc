//! Concrete syntax for f-terms.
//!
//! Precedence, loosest first: `,` < `-o` < attribute embedding < atoms and
//! parentheses. `-o` associates to the right. `(α)?` marks an optional
//! resource and `A B = C D` is a path equation. An identifier directly
//! followed by another identifier or `(` is an attribute.

use thiserror::Error;

use super::{canonicalize, Decls, FTerm, METAVARIABLE};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FTermError {
    #[error("syntax error at offset {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("undeclared {kind} `{name}` at offset {pos}")]
    Undeclared {
        kind: &'static str,
        name: String,
        pos: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Token {
    Ident(String),
    LParen,
    RParen,
    Comma,
    Lolli,
    Question,
    Equals,
}

impl Token {
    pub fn text(&self) -> String {
        match self {
            Token::Ident(s) => s.clone(),
            Token::LParen => "(".into(),
            Token::RParen => ")".into(),
            Token::Comma => ",".into(),
            Token::Lolli => "-o".into(),
            Token::Question => "?".into(),
            Token::Equals => "=".into(),
        }
    }
}

fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '\''
}

/// Splits f-term text into tokens paired with their byte offsets.
pub fn tokenize(text: &str) -> Result<Vec<(Token, usize)>, FTermError> {
    let mut tokens = Vec::new();
    let mut chars = text.char_indices().peekable();
    while let Some(&(pos, c)) = chars.peek() {
        match c {
            c if c.is_whitespace() => {
                chars.next();
            }
            '(' | ')' | ',' | '?' | '=' | '⊸' => {
                chars.next();
                let tok = match c {
                    '(' => Token::LParen,
                    ')' => Token::RParen,
                    ',' => Token::Comma,
                    '?' => Token::Question,
                    '=' => Token::Equals,
                    _ => Token::Lolli,
                };
                tokens.push((tok, pos));
            }
            '↓' => {
                chars.next();
                tokens.push((Token::Ident(METAVARIABLE.to_string()), pos));
            }
            '-' => {
                chars.next();
                match chars.next() {
                    Some((_, 'o')) => tokens.push((Token::Lolli, pos)),
                    _ => {
                        return Err(FTermError::Syntax {
                            pos,
                            msg: "expected `-o`".into(),
                        })
                    }
                }
            }
            c if is_ident_char(c) => {
                let mut name = String::new();
                while let Some(&(_, c)) = chars.peek() {
                    if !is_ident_char(c) {
                        break;
                    }
                    name.push(c);
                    chars.next();
                }
                tokens.push((Token::Ident(name), pos));
            }
            other => {
                return Err(FTermError::Syntax {
                    pos,
                    msg: format!("unexpected character `{other}`"),
                })
            }
        }
    }
    Ok(tokens)
}

struct Parser<'a> {
    tokens: Vec<(Token, usize)>,
    pos: usize,
    end: usize,
    decls: Option<&'a Decls>,
    allow_metavar: bool,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(t, _)| t)
    }

    fn peek_at(&self, offset: usize) -> Option<&Token> {
        self.tokens.get(self.pos + offset).map(|(t, _)| t)
    }

    fn offset(&self) -> usize {
        self.tokens
            .get(self.pos)
            .map(|(_, p)| *p)
            .unwrap_or(self.end)
    }

    fn error<T>(&self, msg: impl Into<String>) -> Result<T, FTermError> {
        Err(FTermError::Syntax {
            pos: self.offset(),
            msg: msg.into(),
        })
    }

    fn expect(&mut self, tok: Token) -> Result<(), FTermError> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            self.error(format!("expected `{}`", tok.text()))
        }
    }

    fn check_type(&self, name: &str, pos: usize) -> Result<(), FTermError> {
        if self.allow_metavar && name == METAVARIABLE {
            return Ok(());
        }
        match self.decls {
            Some(d) if !d.is_type(name) => Err(FTermError::Undeclared {
                kind: "type",
                name: name.to_string(),
                pos,
            }),
            _ => Ok(()),
        }
    }

    fn check_attr(&self, name: &str, pos: usize) -> Result<(), FTermError> {
        match self.decls {
            Some(d) if !d.is_attr(name) => Err(FTermError::Undeclared {
                kind: "attribute",
                name: name.to_string(),
                pos,
            }),
            _ => Ok(()),
        }
    }

    fn list(&mut self) -> Result<FTerm, FTermError> {
        if matches!(self.peek(), Some(Token::RParen)) {
            return Ok(FTerm::unit());
        }
        let mut elements = vec![self.element()?];
        while matches!(self.peek(), Some(Token::Comma)) {
            self.pos += 1;
            elements.push(self.element()?);
        }
        Ok(if elements.len() == 1 {
            elements.pop().unwrap()
        } else {
            FTerm::Multiset(elements)
        })
    }

    fn element(&mut self) -> Result<FTerm, FTermError> {
        let mut run = 0;
        while matches!(self.peek_at(run), Some(Token::Ident(_))) {
            run += 1;
        }
        if run > 0 && matches!(self.peek_at(run), Some(Token::Equals)) {
            let src = self.attr_path()?;
            self.expect(Token::Equals)?;
            let dst = self.attr_path()?;
            if dst.is_empty() {
                return self.error("path equation needs a nonempty right-hand side");
            }
            return Ok(FTerm::PathEq(src, dst));
        }
        self.implication()
    }

    fn attr_path(&mut self) -> Result<Vec<String>, FTermError> {
        let mut path = Vec::new();
        while let Some((Token::Ident(name), pos)) = self.tokens.get(self.pos).cloned() {
            self.check_attr(&name, pos)?;
            path.push(name);
            self.pos += 1;
        }
        Ok(path)
    }

    fn implication(&mut self) -> Result<FTerm, FTermError> {
        let antecedent = self.embedding()?;
        if matches!(self.peek(), Some(Token::Lolli)) {
            self.pos += 1;
            let consequent = self.implication()?;
            return Ok(FTerm::limp(antecedent, consequent));
        }
        Ok(antecedent)
    }

    fn embedding(&mut self) -> Result<FTerm, FTermError> {
        match self.tokens.get(self.pos).cloned() {
            Some((Token::Ident(name), pos)) => {
                self.pos += 1;
                if matches!(self.peek(), Some(Token::Ident(_)) | Some(Token::LParen)) {
                    self.check_attr(&name, pos)?;
                    let body = self.embedding()?;
                    Ok(FTerm::embed(name, body))
                } else {
                    self.check_type(&name, pos)?;
                    Ok(FTerm::Atom(name))
                }
            }
            Some((Token::LParen, _)) => {
                self.pos += 1;
                let inner = self.list()?;
                self.expect(Token::RParen)?;
                if matches!(self.peek(), Some(Token::Question)) {
                    self.pos += 1;
                    return Ok(FTerm::opt(inner));
                }
                Ok(inner)
            }
            Some((tok, _)) => self.error(format!("unexpected `{}`", tok.text())),
            None => self.error("unexpected end of input"),
        }
    }
}

fn run_parser(text: &str, decls: Option<&Decls>, allow_metavar: bool) -> Result<FTerm, FTermError> {
    let tokens = tokenize(text)?;
    let mut parser = Parser {
        tokens,
        pos: 0,
        end: text.len(),
        decls,
        allow_metavar,
    };
    if parser.peek().is_none() {
        return parser.error("empty f-term");
    }
    let term = parser.list()?;
    if parser.peek().is_some() {
        return parser.error("trailing input");
    }
    Ok(canonicalize(&term))
}

/// Parses an f-term, checking every atom and attribute against `decls`.
pub fn parse_fterm(text: &str, decls: &Decls) -> Result<FTerm, FTermError> {
    run_parser(text, Some(decls), false)
}

/// Parses an f-term without a declaration table.
pub fn parse_fterm_untyped(text: &str) -> Result<FTerm, FTermError> {
    run_parser(text, None, false)
}

/// Parses an annotation template in which `v` (or `↓`) stands for the
/// daughter's f-term.
pub fn parse_template(text: &str, decls: &Decls) -> Result<FTerm, FTermError> {
    run_parser(text, Some(decls), true)
}
