//! Recursive-descent parser for the clause language.
//!
//! The accepted language is a small Prolog subset: lowercase atoms, variables
//! starting with an uppercase letter or `_`, integers, quoted atoms, list
//! sugar, `:-`, `,`, prefix `not`, the `=`/`\=` builtins and `%` comments.

use std::fmt;

use crate::syntax::{Builtin, Clause, Literal, Program};
use crate::term::{Term, ANON_PREFIX};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub expected: Vec<String>,
    pub found: String,
    pub message: Option<String>,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: ", self.line, self.column)?;
        if let Some(m) = &self.message {
            write!(f, "{m}; ")?;
        }
        match self.expected.as_slice() {
            [] => write!(f, "unexpected {}", self.found),
            [one] => write!(f, "expected {one}, found {}", self.found),
            many => write!(f, "expected one of {}, found {}", many.join(", "), self.found),
        }
    }
}

pub fn parse_program(text: &str) -> Result<Program, ParseError> {
    let mut p = Parser::new(text)?;
    let mut clauses = Vec::new();
    while !p.at(&Tok::Eof) {
        clauses.push(p.clause()?);
    }
    Ok(Program::new(clauses))
}

/// Parses `?- goal, goal.`; the leading `?-` is optional.
pub fn parse_query(text: &str) -> Result<Vec<Literal>, ParseError> {
    let mut p = Parser::new(text)?;
    p.anon = 0;
    p.eat(&Tok::QueryNeck);
    if p.at(&Tok::End) || p.at(&Tok::Eof) {
        return Err(p.error_here(&["literal"], Some("empty goal")));
    }
    let body = p.body()?;
    p.expect(&Tok::End, &["','", "'.'"])?;
    p.expect(&Tok::Eof, &["end of input"])?;
    Ok(body)
}

pub fn parse_clause(text: &str) -> Result<Clause, ParseError> {
    let mut p = Parser::new(text)?;
    let c = p.clause()?;
    p.expect(&Tok::Eof, &["end of input"])?;
    Ok(c)
}

/// Parses a single term with no trailing `.`.
pub fn parse_term(text: &str) -> Result<Term, ParseError> {
    let mut p = Parser::new(text)?;
    let t = p.term()?;
    p.expect(&Tok::Eof, &["end of input"])?;
    Ok(t)
}

/// Canonical text of a term; [`parse_term`] reads it back unchanged.
pub fn format_term(t: &Term) -> String {
    t.to_string()
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Atom(String),
    Var(String),
    Int(i64),
    LParen,
    RParen,
    LBracket,
    RBracket,
    Bar,
    Comma,
    End,
    Neck,
    QueryNeck,
    Eq,
    NotEq,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Atom(a) => format!("atom '{a}'"),
            Tok::Var(v) => format!("variable {v}"),
            Tok::Int(i) => format!("integer {i}"),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::LBracket => "'['".into(),
            Tok::RBracket => "']'".into(),
            Tok::Bar => "'|'".into(),
            Tok::Comma => "','".into(),
            Tok::End => "'.'".into(),
            Tok::Neck => "':-'".into(),
            Tok::QueryNeck => "'?-'".into(),
            Tok::Eq => "'='".into(),
            Tok::NotEq => "'\\='".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Clone, Copy, Debug)]
struct Pos {
    line: usize,
    column: usize,
    /// No whitespace between this token and the previous one.
    adjacent: bool,
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    column: usize,
}

impl<'a> Lexer<'a> {
    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn err(&self, line: usize, column: usize, found: String, message: &str) -> ParseError {
        ParseError {
            line,
            column,
            expected: Vec::new(),
            found,
            message: Some(message.to_string()),
        }
    }

    fn tokenize(mut self) -> Result<Vec<(Tok, Pos)>, ParseError> {
        let mut out = Vec::new();
        let mut adjacent = false;
        loop {
            // whitespace and comments
            loop {
                match self.chars.peek() {
                    Some(c) if c.is_whitespace() => {
                        self.bump();
                        adjacent = false;
                    }
                    Some('%') => {
                        while let Some(c) = self.bump() {
                            if c == '\n' {
                                break;
                            }
                        }
                        adjacent = false;
                    }
                    _ => break,
                }
            }
            let pos = Pos {
                line: self.line,
                column: self.column,
                adjacent,
            };
            adjacent = true;
            let Some(c) = self.bump() else {
                out.push((Tok::Eof, pos));
                return Ok(out);
            };
            let tok = match c {
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                '[' => Tok::LBracket,
                ']' => Tok::RBracket,
                '|' => Tok::Bar,
                ',' => Tok::Comma,
                '.' => Tok::End,
                '=' => Tok::Eq,
                ':' if self.chars.peek() == Some(&'-') => {
                    self.bump();
                    Tok::Neck
                }
                '?' if self.chars.peek() == Some(&'-') => {
                    self.bump();
                    Tok::QueryNeck
                }
                '\\' if self.chars.peek() == Some(&'=') => {
                    self.bump();
                    Tok::NotEq
                }
                '\'' => Tok::Atom(self.quoted(pos)?),
                c if c.is_ascii_digit() => Tok::Int(self.integer(c, false, pos)?),
                '-' if self.chars.peek().is_some_and(|d| d.is_ascii_digit()) => {
                    let first = self.bump().unwrap();
                    Tok::Int(self.integer(first, true, pos)?)
                }
                c if c.is_ascii_lowercase() => Tok::Atom(self.ident(c)),
                c if c.is_ascii_uppercase() || c == '_' => Tok::Var(self.ident(c)),
                other => {
                    return Err(self.err(
                        pos.line,
                        pos.column,
                        format!("character '{other}'"),
                        "unexpected character",
                    ))
                }
            };
            out.push((tok, pos));
        }
    }

    fn ident(&mut self, first: char) -> String {
        let mut s = String::from(first);
        while let Some(&c) = self.chars.peek() {
            if c.is_ascii_alphanumeric() || c == '_' {
                s.push(c);
                self.bump();
            } else {
                break;
            }
        }
        s
    }

    fn integer(&mut self, first: char, negative: bool, pos: Pos) -> Result<i64, ParseError> {
        let mut s = String::new();
        if negative {
            s.push('-');
        }
        s.push(first);
        while let Some(&c) = self.chars.peek() {
            if c.is_ascii_digit() {
                s.push(c);
                self.bump();
            } else {
                break;
            }
        }
        s.parse()
            .map_err(|_| self.err(pos.line, pos.column, format!("integer {s}"), "integer out of range"))
    }

    fn quoted(&mut self, pos: Pos) -> Result<String, ParseError> {
        let mut s = String::new();
        loop {
            match self.bump() {
                None => return Err(self.err(pos.line, pos.column, "end of input".into(), "unterminated quoted atom")),
                Some('\'') => break,
                Some('\\') => match self.bump() {
                    Some('n') => s.push('\n'),
                    Some(c) => s.push(c),
                    None => {
                        return Err(self.err(pos.line, pos.column, "end of input".into(), "unterminated quoted atom"))
                    }
                },
                Some(c) => s.push(c),
            }
        }
        if s.is_empty() {
            return Err(self.err(pos.line, pos.column, "''".into(), "empty quoted atom"));
        }
        Ok(s)
    }
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    i: usize,
    /// Per-clause counter naming `_` occurrences.
    anon: usize,
}

impl Parser {
    fn new(text: &str) -> Result<Parser, ParseError> {
        let toks = Lexer {
            chars: text.chars().peekable(),
            line: 1,
            column: 1,
        }
        .tokenize()?;
        Ok(Parser { toks, i: 0, anon: 0 })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.i].0
    }

    fn peek_at(&self, k: usize) -> Option<&(Tok, Pos)> {
        self.toks.get(self.i + k)
    }

    fn at(&self, t: &Tok) -> bool {
        self.peek() == t
    }

    fn advance(&mut self) -> Tok {
        let t = self.toks[self.i].0.clone();
        if self.i + 1 < self.toks.len() {
            self.i += 1;
        }
        t
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.at(t) {
            self.advance();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: &Tok, expected: &[&str]) -> Result<(), ParseError> {
        if self.eat(t) {
            Ok(())
        } else {
            Err(self.error_here(expected, None))
        }
    }

    fn error_here(&self, expected: &[&str], message: Option<&str>) -> ParseError {
        let (tok, pos) = &self.toks[self.i];
        ParseError {
            line: pos.line,
            column: pos.column,
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: tok.describe(),
            message: message.map(str::to_string),
        }
    }

    fn clause(&mut self) -> Result<Clause, ParseError> {
        self.anon = 0;
        let head = match self.peek() {
            Tok::Atom(_) => self.term()?,
            _ => return Err(self.error_here(&["clause head"], None)),
        };
        if self.eat(&Tok::End) {
            return Ok(Clause::fact(head));
        }
        self.expect(&Tok::Neck, &["':-'", "'.'"])?;
        let body = self.body()?;
        self.expect(&Tok::End, &["','", "'.'"])?;
        Ok(Clause::rule(head, body))
    }

    fn body(&mut self) -> Result<Vec<Literal>, ParseError> {
        let mut lits = vec![self.literal()?];
        while self.eat(&Tok::Comma) {
            lits.push(self.literal()?);
        }
        Ok(lits)
    }

    fn literal(&mut self) -> Result<Literal, ParseError> {
        if let Tok::Atom(a) = self.peek() {
            if a == "not" {
                let next_is_application = matches!(
                    self.peek_at(1),
                    Some((Tok::LParen, pos)) if pos.adjacent
                );
                if !next_is_application {
                    self.advance();
                    if !matches!(self.peek(), Tok::Atom(_)) {
                        return Err(self.error_here(&["atom"], Some("'not' must be followed by an atom")));
                    }
                    return Ok(Literal::Not(self.term()?));
                }
            }
        }
        let start = self.i;
        let lhs = self.term()?;
        let builtin = match self.peek() {
            Tok::Eq => Some(Builtin::Unify),
            Tok::NotEq => Some(Builtin::NotUnify),
            _ => None,
        };
        if let Some(b) = builtin {
            self.advance();
            let rhs = self.term()?;
            return Ok(Literal::Builtin(b, lhs, rhs));
        }
        match lhs {
            Term::Atom(_) | Term::Compound(_) => Ok(Literal::Pos(lhs)),
            _ => {
                self.i = start;
                Err(self.error_here(&["atom"], Some("literal is not callable")))
            }
        }
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        match self.peek().clone() {
            Tok::Var(name) => {
                self.advance();
                if name == "_" {
                    let n = self.anon;
                    self.anon += 1;
                    Ok(Term::var(format!("{ANON_PREFIX}{n}")))
                } else {
                    Ok(Term::var(name))
                }
            }
            Tok::Int(i) => {
                self.advance();
                Ok(Term::int(i))
            }
            Tok::Atom(name) => {
                self.advance();
                if self.at(&Tok::LParen) {
                    self.advance();
                    let args = self.args()?;
                    Ok(Term::compound(name, args))
                } else {
                    Ok(Term::atom(name))
                }
            }
            Tok::LBracket => {
                self.advance();
                self.list()
            }
            _ => Err(self.error_here(&["term"], None)),
        }
    }

    fn args(&mut self) -> Result<Vec<Term>, ParseError> {
        let mut args = Vec::new();
        loop {
            if self.at(&Tok::Eof) {
                return Err(self.error_here(&["term"], Some("unterminated argument list")));
            }
            args.push(self.term()?);
            match self.peek() {
                Tok::Comma => {
                    self.advance();
                }
                Tok::RParen => {
                    self.advance();
                    return Ok(args);
                }
                Tok::Eof => return Err(self.error_here(&["','", "')'"], Some("unterminated argument list"))),
                _ => return Err(self.error_here(&["','", "')'"], None)),
            }
        }
    }

    fn list(&mut self) -> Result<Term, ParseError> {
        if self.eat(&Tok::RBracket) {
            return Ok(Term::nil());
        }
        let mut items = vec![self.term()?];
        loop {
            match self.peek() {
                Tok::Comma => {
                    self.advance();
                    items.push(self.term()?);
                }
                Tok::Bar => {
                    self.advance();
                    let tail = self.term()?;
                    self.expect(&Tok::RBracket, &["']'"])?;
                    return Ok(Term::list_with_tail(items, tail));
                }
                Tok::RBracket => {
                    self.advance();
                    return Ok(Term::list(items));
                }
                Tok::Eof => return Err(self.error_here(&["','", "'|'", "']'"], Some("unterminated list"))),
                _ => return Err(self.error_here(&["','", "'|'", "']'"], None)),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::PredId;

    #[test]
    fn single_fact() {
        let p = parse_program("parent(tony, abe).").unwrap();
        assert_eq!(p.len(), 1);
        assert!(p.clauses()[0].is_fact());
        assert_eq!(p.predicates().next().unwrap(), &PredId::new("parent", 2));
    }

    #[test]
    fn rule_with_builtin() {
        let p = parse_program("sibling(X,Y) :- parent(Parent, X), parent(Parent, Y), X\\=Y.").unwrap();
        let c = &p.clauses()[0];
        assert_eq!(c.body.len(), 3);
        assert!(matches!(c.body[2], Literal::Builtin(Builtin::NotUnify, _, _)));
    }

    #[test]
    fn unterminated_arguments() {
        let e = parse_program("foo(").unwrap_err();
        assert_eq!(e.line, 1);
        assert_eq!(e.message.as_deref(), Some("unterminated argument list"));
        assert!(!e.expected.is_empty());
    }

    #[test]
    fn list_sugar_desugars() {
        let p = parse_program("initial_state([close(couch1)]).").unwrap();
        let arg = &p.clauses()[0].head.args()[0];
        let expected = Term::compound(
            ".",
            vec![Term::compound("close", vec![Term::atom("couch1")]), Term::nil()],
        );
        assert_eq!(arg, &expected);
    }

    #[test]
    fn queries() {
        let q = parse_query("?- niece(X, Y).").unwrap();
        assert_eq!(q.len(), 1);
        assert_eq!(q[0].to_string(), "niece(X,Y)");
        let q = parse_query("?- complete_task(walk_to_remote, P).").unwrap();
        assert_eq!(q[0].to_string(), "complete_task(walk_to_remote,P)");
        let q = parse_query("niece(X,Y).").unwrap();
        assert_eq!(q.len(), 1);
        let e = parse_query("?- .").unwrap_err();
        assert_eq!(e.message.as_deref(), Some("empty goal"));
    }

    #[test]
    fn naf_and_not_as_functor() {
        let c = parse_clause("p(X) :- q(X), not r(X), not(X).").unwrap();
        assert!(matches!(c.body[1], Literal::Not(_)));
        assert!(matches!(&c.body[2], Literal::Pos(t) if t.to_string() == "not(X)"));
        assert!(parse_clause("p :- not X.").is_err());
        assert!(parse_clause("p :- not not q.").is_err());
    }

    #[test]
    fn anonymous_variables_are_distinct() {
        let c = parse_clause("p(_, _) :- q(_).").unwrap();
        let vars = c.vars();
        assert_eq!(vars.len(), 3);
        assert_eq!(c.to_string(), "p(_,_) :- q(_).");
        assert_eq!(parse_clause(&c.to_string()).unwrap(), c);
    }

    #[test]
    fn comments_and_positions() {
        let e = parse_program("% header\nfoo(a).\nbar(b) :- .\n").unwrap_err();
        assert_eq!((e.line, e.column), (3, 11));
        assert!(parse_program("a. % trailing\n% only comment").is_ok());
    }

    #[test]
    fn head_must_be_callable() {
        assert!(parse_program("X :- a.").is_err());
        assert!(parse_program("1.").is_err());
    }

    #[test]
    fn negative_integers_and_quotes() {
        let t = parse_term("f(-3, 'Hello world', [a|T])").unwrap();
        assert_eq!(t.to_string(), "f(-3,'Hello world',[a|T])");
        assert_eq!(parse_term(&t.to_string()).unwrap(), t);
    }
}
