use std::fmt;

use super::{EntityId, Literal, Term};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.message)
    }
}

/// Recursive-descent reader for the canonical term syntax. Shared by the KB
/// and lexicon loaders, which hand it a sub-slice and a base position.
pub(crate) struct TermReader<'a> {
    src: &'a str,
    pos: usize,
    base_line: usize,
    base_col: usize,
}

impl<'a> TermReader<'a> {
    pub(crate) fn new(src: &'a str) -> Self {
        Self::with_origin(src, 1, 1)
    }

    pub(crate) fn with_origin(src: &'a str, line: usize, column: usize) -> Self {
        TermReader { src, pos: 0, base_line: line, base_col: column }
    }

    pub(crate) fn position(&self) -> usize {
        self.pos
    }

    pub(crate) fn error(&self, message: impl Into<String>) -> ParseError {
        let consumed = &self.src[..self.pos];
        let newlines = consumed.matches('\n').count();
        let column = match consumed.rfind('\n') {
            Some(i) => consumed[i + 1..].chars().count() + 1,
            None => self.base_col + consumed.chars().count(),
        };
        ParseError { line: self.base_line + newlines, column, message: message.into() }
    }

    pub(crate) fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    pub(crate) fn rewind(&mut self, pos: usize) {
        self.pos = pos;
    }

    pub(crate) fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    pub(crate) fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.pos >= self.src.len()
    }

    pub(crate) fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    pub(crate) fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            let found = self.peek().map(|c| format!("'{c}'")).unwrap_or_else(|| "end of input".into());
            Err(self.error(format!("expected '{c}', found {found}")))
        }
    }

    pub(crate) fn ident(&mut self) -> Option<String> {
        self.skip_ws();
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c.is_ascii_alphanumeric() || c == '_' {
                self.pos += 1;
            } else {
                break;
            }
        }
        (self.pos > start).then(|| self.src[start..self.pos].to_string())
    }

    fn quoted(&mut self) -> Result<String, ParseError> {
        // opening quote already consumed
        let mut out = String::new();
        loop {
            match self.peek() {
                None => return Err(self.error("unterminated quoted atom")),
                Some('\'') => {
                    self.pos += 1;
                    return Ok(out);
                }
                Some('\\') => {
                    self.pos += 1;
                    match self.peek() {
                        Some(c) => {
                            out.push(c);
                            self.pos += c.len_utf8();
                        }
                        None => return Err(self.error("dangling escape")),
                    }
                }
                Some(c) => {
                    out.push(c);
                    self.pos += c.len_utf8();
                }
            }
        }
    }

    pub(crate) fn term(&mut self) -> Result<Term, ParseError> {
        self.skip_ws();
        match self.peek() {
            Some('#') => {
                self.pos += 1;
                let name = self.ident().ok_or_else(|| self.error("expected entity id after '#'"))?;
                if name == "user" {
                    Ok(Term::Entity(EntityId::User))
                } else {
                    name.parse::<u64>()
                        .map(|n| Term::Entity(EntityId::Fresh(n)))
                        .map_err(|_| self.error(format!("bad entity id '#{name}'")))
                }
            }
            Some('\'') => {
                self.pos += 1;
                let name = self.quoted()?;
                if self.peek() == Some('(') {
                    let args = self.args()?;
                    Ok(Term::Compound(name, args))
                } else {
                    Ok(Term::Const(name))
                }
            }
            Some(_) => {
                let name = self.ident().ok_or_else(|| {
                    let c = self.peek().unwrap_or(' ');
                    self.error(format!("unexpected character '{c}'"))
                })?;
                // no whitespace allowed between functor and '('
                if self.peek() == Some('(') {
                    let args = self.args()?;
                    self.special(name, args)
                } else if name.starts_with(|c: char| c.is_ascii_uppercase() || c == '_') {
                    Ok(Term::Var(name))
                } else {
                    Ok(Term::Const(name))
                }
            }
            None => Err(self.error("unexpected end of input")),
        }
    }

    fn args(&mut self) -> Result<Vec<Term>, ParseError> {
        self.expect('(')?;
        let mut args = Vec::new();
        if self.eat(')') {
            return Err(self.error("empty argument list"));
        }
        loop {
            args.push(self.term()?);
            if self.eat(',') {
                continue;
            }
            self.expect(')')?;
            return Ok(args);
        }
    }

    fn special(&self, name: String, mut args: Vec<Term>) -> Result<Term, ParseError> {
        match (name.as_str(), args.len()) {
            ("lam", 2) => {
                let body = args.pop().unwrap();
                match args.pop().unwrap() {
                    Term::Var(p) => Ok(Term::Lambda(p, Box::new(body))),
                    other => Err(self.error(format!("lam parameter must be a variable, found {other}"))),
                }
            }
            ("app", 2) => {
                let arg = args.pop().unwrap();
                let fun = args.pop().unwrap();
                Ok(Term::App(Box::new(fun), Box::new(arg)))
            }
            ("ref", 1) => match args.pop().unwrap() {
                Term::Lambda(p, body) => Ok(Term::Ref(p, body)),
                other => Err(self.error(format!("ref restriction must be a lam, found {other}"))),
            },
            ("lam", _) | ("app", _) | ("ref", _) => Err(self.error(format!("wrong number of arguments to {name}"))),
            _ => Ok(Term::Compound(name, args)),
        }
    }
}

pub fn parse_term(src: &str) -> Result<Term, ParseError> {
    let mut r = TermReader::new(src);
    let t = r.term()?;
    if !r.at_end() {
        return Err(r.error("trailing input after term"));
    }
    Ok(t)
}

pub fn parse_literal(src: &str) -> Result<Literal, ParseError> {
    let t = parse_term(src)?;
    Literal::from_term(&t).ok_or_else(|| ParseError { line: 1, column: 1, message: format!("not a literal: {t}") })
}
