//! Reader for rule files.
//!
//! Clauses are written `head :- b1, b2.` or `head.`; `%` starts a comment that
//! runs to the end of the line. `ε`, `⊤` and `⊥` are accepted as literal
//! symbols.

use std::collections::BTreeMap;

use super::program::{Clause, DatalogProgram};
use super::term::{is_variable_name, Term};
use super::LogicError;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Int(String),
    LParen,
    RParen,
    Comma,
    Neck,
    Dot,
    Epsilon,
    Top,
    Bottom,
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn tokenize(text: &str) -> Result<Vec<Spanned>, LogicError> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    let (mut line, mut col) = (1usize, 1usize);

    macro_rules! bump {
        () => {{
            let c = chars.next();
            if c == Some('\n') {
                line += 1;
                col = 1;
            } else if c.is_some() {
                col += 1;
            }
            c
        }};
    }

    while let Some(&c) = chars.peek() {
        let (l, cl) = (line, col);
        let push = |out: &mut Vec<Spanned>, tok| out.push(Spanned { tok, line: l, col: cl });
        match c {
            c if c.is_whitespace() => {
                bump!();
            }
            '%' => {
                while let Some(&c) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    bump!();
                }
            }
            '(' => {
                bump!();
                push(&mut out, Tok::LParen);
            }
            ')' => {
                bump!();
                push(&mut out, Tok::RParen);
            }
            ',' => {
                bump!();
                push(&mut out, Tok::Comma);
            }
            '.' => {
                bump!();
                push(&mut out, Tok::Dot);
            }
            'ε' => {
                bump!();
                push(&mut out, Tok::Epsilon);
            }
            '⊤' => {
                bump!();
                push(&mut out, Tok::Top);
            }
            '⊥' => {
                bump!();
                push(&mut out, Tok::Bottom);
            }
            ':' => {
                bump!();
                if chars.peek() == Some(&'-') {
                    bump!();
                    push(&mut out, Tok::Neck);
                } else {
                    return Err(LogicError::Syntax {
                        line: l,
                        col: cl,
                        message: "expected ':-'".into(),
                    });
                }
            }
            c if c == '-' || c.is_ascii_digit() => {
                let mut s = String::new();
                if c == '-' {
                    s.push('-');
                    bump!();
                }
                while let Some(&d) = chars.peek() {
                    if d.is_ascii_digit() {
                        s.push(d);
                        bump!();
                    } else {
                        break;
                    }
                }
                if s == "-" {
                    return Err(LogicError::Syntax {
                        line: l,
                        col: cl,
                        message: "dangling '-'".into(),
                    });
                }
                push(&mut out, Tok::Int(s));
            }
            c if c.is_alphabetic() || c == '_' => {
                let mut s = String::new();
                while let Some(&d) = chars.peek() {
                    if d.is_alphanumeric() || d == '_' {
                        s.push(d);
                        bump!();
                    } else {
                        break;
                    }
                }
                push(&mut out, Tok::Ident(s));
            }
            other => {
                return Err(LogicError::Syntax {
                    line: l,
                    col: cl,
                    message: format!("unexpected character {other:?}"),
                })
            }
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    end: (usize, usize),
}

impl Parser {
    fn new(text: &str) -> Result<Parser, LogicError> {
        let toks = tokenize(text)?;
        let lines: Vec<&str> = text.split('\n').collect();
        let end = (lines.len(), lines.last().map_or(0, |l| l.chars().count()) + 1);
        Ok(Parser { toks, pos: 0, end })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    fn here(&self) -> (usize, usize) {
        self.toks.get(self.pos).map_or(self.end, |s| (s.line, s.col))
    }

    fn error(&self, message: impl Into<String>) -> LogicError {
        let (line, col) = self.here();
        LogicError::Syntax {
            line,
            col,
            message: message.into(),
        }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), LogicError> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(format!("expected {what}")))
        }
    }

    fn term(&mut self) -> Result<Term, LogicError> {
        let Some(tok) = self.peek().cloned() else {
            return Err(self.error("unexpected end of input, expected a term"));
        };
        self.pos += 1;
        match tok {
            Tok::Epsilon => Ok(Term::Epsilon),
            Tok::Top => Ok(Term::top()),
            Tok::Bottom => Ok(Term::bottom()),
            Tok::Int(s) => Ok(Term::Const(s)),
            Tok::Ident(name) => {
                if self.peek() == Some(&Tok::LParen) {
                    if is_variable_name(&name) {
                        self.pos -= 1;
                        return Err(self.error(format!("variable {name} cannot take arguments")));
                    }
                    self.pos += 1;
                    let mut args = vec![self.term()?];
                    while self.peek() == Some(&Tok::Comma) {
                        self.pos += 1;
                        args.push(self.term()?);
                    }
                    self.expect(Tok::RParen, "')'")?;
                    Ok(Term::Compound { functor: name, args })
                } else if is_variable_name(&name) {
                    Ok(Term::Var(name))
                } else {
                    Ok(Term::Const(name))
                }
            }
            _ => {
                self.pos -= 1;
                Err(self.error("expected a term"))
            }
        }
    }

    fn atom(&mut self) -> Result<Term, LogicError> {
        let start = self.pos;
        let t = self.term()?;
        if t.predicate().is_none() {
            self.pos = start;
            return Err(self.error("expected an atom of the form p(...)"));
        }
        Ok(t)
    }

    fn clause(&mut self) -> Result<Clause, LogicError> {
        let head = self.atom()?;
        let mut body = Vec::new();
        if self.peek() == Some(&Tok::Neck) {
            self.pos += 1;
            body.push(self.atom()?);
            while self.peek() == Some(&Tok::Comma) {
                self.pos += 1;
                body.push(self.atom()?);
            }
        }
        self.expect(Tok::Dot, "'.' at end of clause")?;
        Ok(Clause { head, body })
    }
}

/// Parses a rule file into a program, keeping clauses in source order.
pub fn parse_program(text: &str) -> Result<DatalogProgram, LogicError> {
    let mut p = Parser::new(text)?;
    let mut clauses = Vec::new();
    while p.peek().is_some() {
        clauses.push(p.clause()?);
    }
    DatalogProgram::new(clauses)
}

/// Parses a single atom such as a query, with an optional trailing `.`.
pub fn parse_atom(text: &str) -> Result<Term, LogicError> {
    let mut p = Parser::new(text)?;
    let t = p.atom()?;
    if p.peek() == Some(&Tok::Dot) {
        p.pos += 1;
    }
    if p.peek().is_some() {
        return Err(p.error("trailing input after atom"));
    }
    Ok(t)
}

/// Parses any single term (ground data or atom).
pub fn parse_term(text: &str) -> Result<Term, LogicError> {
    let mut p = Parser::new(text)?;
    let t = p.term()?;
    if p.peek().is_some() {
        return Err(p.error("trailing input after term"));
    }
    Ok(t)
}

pub(crate) fn check_arities<'a>(
    atoms: impl IntoIterator<Item = &'a Term>,
) -> Result<BTreeMap<String, usize>, LogicError> {
    let mut seen: BTreeMap<String, usize> = BTreeMap::new();
    for atom in atoms {
        if let Some((sym, arity)) = atom.predicate() {
            match seen.get(sym) {
                Some(&a) if a != arity => {
                    return Err(LogicError::DuplicateArity {
                        symbol: sym.to_string(),
                        first: a,
                        second: arity,
                    })
                }
                _ => {
                    seen.insert(sym.to_string(), arity);
                }
            }
        }
    }
    Ok(seen)
}
