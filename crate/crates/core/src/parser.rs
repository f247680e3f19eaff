//! Parser for the formula surface syntax (`.xt` files).
//!
//! ```text
//! expr := 'true' | 'false' | IDENT | '!' expr | '(' expr ')'
//!       | expr '&&' expr | expr '||' expr | expr '->' expr | expr '<->' expr
//!       | 'Xst' '(' expr ')' | 'Xns' '(' expr ')' | 'now_st'
//!       | 'Dist' '(' expr ',' offset ')' | 'Until' '(' expr ',' expr ')'
//!       | 'Since' '(' expr ',' expr ')' | DERIVED '(' args ')'
//! offset := INT | '-' INT | INT '*eps' | 'eps'
//! ```
//!
//! Precedence: `!` > `&&` > `||` > `->` (right-assoc) > `<->`. `#` starts a
//! line comment. Atoms are identifiers, optionally of the compound form
//! `name=value` as produced by the state-machine compiler.

use std::fmt;

use thiserror::Error;

use crate::formula::{expand_derived, DerivedOp, ExpandError, Formula};

#[derive(Debug, Error, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.col, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(u64),
    Bang,
    AndAnd,
    OrOr,
    Arrow,
    Iff,
    LParen,
    RParen,
    Comma,
    Minus,
    Star,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "'{}'", s),
            Tok::Int(n) => write!(f, "'{}'", n),
            Tok::Bang => write!(f, "'!'"),
            Tok::AndAnd => write!(f, "'&&'"),
            Tok::OrOr => write!(f, "'||'"),
            Tok::Arrow => write!(f, "'->'"),
            Tok::Iff => write!(f, "'<->'"),
            Tok::LParen => write!(f, "'('"),
            Tok::RParen => write!(f, "')'"),
            Tok::Comma => write!(f, "','"),
            Tok::Minus => write!(f, "'-'"),
            Tok::Star => write!(f, "'*'"),
            Tok::Eof => write!(f, "end of input"),
        }
    }
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
    line: usize,
    col: usize,
}

type Spanned = (Tok, usize, usize);

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer { src: src.as_bytes(), pos: 0, line: 1, col: 1 }
    }

    fn err(&self, message: impl Into<String>) -> ParseError {
        ParseError { line: self.line, col: self.col, message: message.into() }
    }

    fn bump(&mut self) -> u8 {
        let c = self.src[self.pos];
        self.pos += 1;
        if c == b'\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        c
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn tokenize(mut self) -> Result<Vec<Spanned>, ParseError> {
        let mut toks = Vec::new();
        loop {
            while let Some(c) = self.peek() {
                if c == b'#' {
                    while let Some(c) = self.peek() {
                        if c == b'\n' {
                            break;
                        }
                        self.bump();
                    }
                } else if c.is_ascii_whitespace() {
                    self.bump();
                } else {
                    break;
                }
            }
            let (line, col) = (self.line, self.col);
            let Some(c) = self.peek() else {
                toks.push((Tok::Eof, line, col));
                return Ok(toks);
            };
            let tok = match c {
                b'(' => {
                    self.bump();
                    Tok::LParen
                }
                b')' => {
                    self.bump();
                    Tok::RParen
                }
                b',' => {
                    self.bump();
                    Tok::Comma
                }
                b'!' => {
                    self.bump();
                    Tok::Bang
                }
                b'*' => {
                    self.bump();
                    Tok::Star
                }
                b'&' => {
                    self.bump();
                    if self.peek() == Some(b'&') {
                        self.bump();
                        Tok::AndAnd
                    } else {
                        return Err(self.err("expected '&&'"));
                    }
                }
                b'|' => {
                    self.bump();
                    if self.peek() == Some(b'|') {
                        self.bump();
                        Tok::OrOr
                    } else {
                        return Err(self.err("expected '||'"));
                    }
                }
                b'-' => {
                    self.bump();
                    if self.peek() == Some(b'>') {
                        self.bump();
                        Tok::Arrow
                    } else {
                        Tok::Minus
                    }
                }
                b'<' => {
                    self.bump();
                    if self.peek() == Some(b'-') {
                        self.bump();
                        if self.peek() == Some(b'>') {
                            self.bump();
                            Tok::Iff
                        } else {
                            return Err(self.err("expected '<->'"));
                        }
                    } else {
                        return Err(self.err("expected '<->'"));
                    }
                }
                b'0'..=b'9' => {
                    let mut n: u64 = 0;
                    while let Some(c) = self.peek() {
                        if c.is_ascii_digit() {
                            n = n
                                .checked_mul(10)
                                .and_then(|n| n.checked_add((c - b'0') as u64))
                                .ok_or_else(|| self.err("integer literal too large"))?;
                            self.bump();
                        } else {
                            break;
                        }
                    }
                    Tok::Int(n)
                }
                c if c.is_ascii_alphabetic() || c == b'_' => {
                    let mut name = String::new();
                    while let Some(c) = self.peek() {
                        if c.is_ascii_alphanumeric() || c == b'_' {
                            name.push(self.bump() as char);
                        } else {
                            break;
                        }
                    }
                    // compound atom `name=value`, produced by the machine
                    // compiler for state and variable propositions
                    if self.peek() == Some(b'=') {
                        self.bump();
                        name.push('=');
                        let mut any = false;
                        while let Some(c) = self.peek() {
                            if c.is_ascii_alphanumeric() || c == b'_' {
                                name.push(self.bump() as char);
                                any = true;
                            } else {
                                break;
                            }
                        }
                        if !any {
                            return Err(self.err("expected a value after '='"));
                        }
                    }
                    Tok::Ident(name)
                }
                c => return Err(self.err(format!("unexpected character '{}'", c as char))),
            };
            toks.push((tok, line, col));
        }
    }
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err_here(&self, message: impl Into<String>) -> ParseError {
        let (_, line, col) = self.toks[self.pos];
        let (ref tok, ..) = self.toks[self.pos];
        ParseError { line, col, message: format!("{} (found {})", message.into(), tok) }
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.err_here(format!("expected {}", tok)))
        }
    }

    fn expand_err(&self, e: ExpandError) -> ParseError {
        let (_, line, col) = self.toks[self.pos];
        ParseError { line, col, message: e.to_string() }
    }

    // iff := imp ('<->' imp)*
    fn iff(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.imp()?;
        while *self.peek() == Tok::Iff {
            self.bump();
            let rhs = self.imp()?;
            lhs = lhs.iff(rhs);
        }
        Ok(lhs)
    }

    // imp := or ('->' imp)?   right-associative
    fn imp(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.or()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let rhs = self.imp()?;
            Ok(lhs.implies(rhs))
        } else {
            Ok(lhs)
        }
    }

    fn or(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.and()?;
        while *self.peek() == Tok::OrOr {
            self.bump();
            let rhs = self.and()?;
            lhs = lhs.or(rhs);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.unary()?;
        while *self.peek() == Tok::AndAnd {
            self.bump();
            let rhs = self.unary()?;
            lhs = lhs.and(rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        if *self.peek() == Tok::Bang {
            self.bump();
            Ok(self.unary()?.not())
        } else {
            self.primary()
        }
    }

    fn args(&mut self, n: usize) -> Result<Vec<Formula>, ParseError> {
        self.expect(Tok::LParen)?;
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            if i > 0 {
                self.expect(Tok::Comma)?;
            }
            out.push(self.iff()?);
        }
        self.expect(Tok::RParen)?;
        Ok(out)
    }

    /// offset := INT | '-' INT | INT '*eps' | 'eps'
    fn offset(&mut self) -> Result<Offset, ParseError> {
        match self.bump() {
            Tok::Minus => match self.bump() {
                Tok::Int(n) => Ok(Offset::Std(-(n as i64))),
                _ => Err(self.err_here("expected an integer after '-'")),
            },
            Tok::Int(n) => {
                if *self.peek() == Tok::Star {
                    self.bump();
                    match self.bump() {
                        Tok::Ident(s) if s == "eps" => Ok(Offset::Eps(n)),
                        _ => Err(self.err_here("expected 'eps' after '*'")),
                    }
                } else {
                    Ok(Offset::Std(n as i64))
                }
            }
            Tok::Ident(s) if s == "eps" => Ok(Offset::Eps(1)),
            _ => Err(self.err_here("expected a distance offset")),
        }
    }

    fn primary(&mut self) -> Result<Formula, ParseError> {
        match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let f = self.iff()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            Tok::Ident(name) => {
                match name.as_str() {
                    "true" => {
                        self.bump();
                        return Ok(Formula::tt());
                    }
                    "false" => {
                        self.bump();
                        return Ok(Formula::ff());
                    }
                    "now_st" => {
                        self.bump();
                        return Ok(Formula::now_st());
                    }
                    "Xst" => {
                        self.bump();
                        let mut a = self.args(1)?;
                        return Ok(a.pop().unwrap().next_st());
                    }
                    "Xns" => {
                        self.bump();
                        let mut a = self.args(1)?;
                        return Ok(a.pop().unwrap().next_ns());
                    }
                    "Until" => {
                        self.bump();
                        let mut a = self.args(2)?;
                        let rhs = a.pop().unwrap();
                        return Ok(a.pop().unwrap().until(rhs));
                    }
                    "Since" => {
                        self.bump();
                        let mut a = self.args(2)?;
                        let rhs = a.pop().unwrap();
                        return Ok(a.pop().unwrap().since(rhs));
                    }
                    "Dist" => {
                        self.bump();
                        self.expect(Tok::LParen)?;
                        let f = self.iff()?;
                        self.expect(Tok::Comma)?;
                        let off = self.offset()?;
                        self.expect(Tok::RParen)?;
                        return Ok(match off {
                            Offset::Std(n) => f.dist(n),
                            Offset::Eps(n) => f.dist_eps_n(n),
                        });
                    }
                    "eps" => return Err(self.err_here("'eps' is only valid as a Dist offset")),
                    _ => {}
                }
                if let Some(op) = DerivedOp::from_name(&name) {
                    self.bump();
                    self.expect(Tok::LParen)?;
                    let mut args = Vec::new();
                    let mut bound = None;
                    for i in 0..op.arity() {
                        if i > 0 {
                            self.expect(Tok::Comma)?;
                        }
                        args.push(self.iff()?);
                    }
                    if op.needs_bound() {
                        self.expect(Tok::Comma)?;
                        match self.bump() {
                            Tok::Int(n) => bound = Some(n),
                            _ => {
                                return Err(
                                    self.err_here("expected a natural-number bound")
                                )
                            }
                        }
                    }
                    self.expect(Tok::RParen)?;
                    return expand_derived(op, &args, bound).map_err(|e| self.expand_err(e));
                }
                self.bump();
                Ok(Formula::atom(name))
            }
            _ => Err(self.err_here("expected a formula")),
        }
    }
}

enum Offset {
    Std(i64),
    Eps(u64),
}

/// Parse a formula from source text. Derived operators and `Dist` offset
/// sugar are expanded, so the result contains only core constructors.
pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    let toks = Lexer::new(text).tokenize()?;
    let mut p = Parser { toks, pos: 0 };
    let f = p.iff()?;
    p.expect(Tok::Eof)?;
    Ok(f)
}
