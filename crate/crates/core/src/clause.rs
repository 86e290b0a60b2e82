//! Reader for the fact-style clause notation shared by facts files and
//! constraint files: `functor(arg, ...).` where an argument is a quoted atom
//! `'...'`, a bare lowercase atom, a non-negative integer, or a bracketed
//! list. `%` starts a comment that runs to the end of the line.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {reason}")]
pub struct SyntaxError {
    pub line: u32,
    pub column: u32,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Term {
    Quoted(String),
    Bare(String),
    Int(u64),
    List(Vec<Term>),
}

impl Term {
    pub fn describe(&self) -> &'static str {
        match self {
            Term::Quoted(_) => "quoted atom",
            Term::Bare(_) => "bare atom",
            Term::Int(_) => "integer",
            Term::List(_) => "list",
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Quoted(s) => f.write_str(&quote_atom(s)),
            Term::Bare(s) => f.write_str(s),
            Term::Int(n) => write!(f, "{n}"),
            Term::List(items) => {
                f.write_str("[")?;
                for (i, t) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{t}")?;
                }
                f.write_str("]")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Clause {
    pub functor: String,
    pub args: Vec<Term>,
    pub line: u32,
    pub column: u32,
}

/// Single-quotes `s`, escaping `\` and `'`.
pub fn quote_atom(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('\'');
    for c in s.chars() {
        if c == '\'' || c == '\\' {
            out.push('\\');
        }
        out.push(c);
    }
    out.push('\'');
    out
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Quoted(String),
    Int(u64),
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Dot,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Quoted(s) => quote_atom(s),
            Tok::Int(n) => n.to_string(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Dot => "`.`".into(),
        }
    }
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: u32,
    column: u32,
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str) -> Self {
        Lexer {
            chars: text.chars().peekable(),
            line: 1,
            column: 1,
        }
    }

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

    fn err(&self, line: u32, column: u32, reason: impl Into<String>) -> SyntaxError {
        SyntaxError {
            line,
            column,
            reason: reason.into(),
        }
    }

    fn tokens(mut self) -> Result<Vec<(Tok, u32, u32)>, SyntaxError> {
        let mut out = Vec::new();
        while let Some(&c) = self.chars.peek() {
            let (line, column) = (self.line, self.column);
            if c.is_whitespace() {
                self.bump();
                continue;
            }
            if c == '%' {
                while self.chars.peek().is_some_and(|&c| c != '\n') {
                    self.bump();
                }
                continue;
            }
            let tok = match c {
                '(' => single(&mut self, Tok::LParen),
                ')' => single(&mut self, Tok::RParen),
                '[' => single(&mut self, Tok::LBracket),
                ']' => single(&mut self, Tok::RBracket),
                ',' => single(&mut self, Tok::Comma),
                '.' => single(&mut self, Tok::Dot),
                '\'' => {
                    self.bump();
                    let mut s = String::new();
                    loop {
                        match self.bump() {
                            None | Some('\n') => {
                                return Err(self.err(line, column, "unterminated quoted atom"))
                            }
                            Some('\'') => break,
                            Some('\\') => match self.bump() {
                                Some(e @ ('\'' | '\\')) => s.push(e),
                                _ => {
                                    return Err(self.err(
                                        self.line,
                                        self.column,
                                        "only \\' and \\\\ escapes are allowed in atoms",
                                    ))
                                }
                            },
                            Some(c) => s.push(c),
                        }
                    }
                    Tok::Quoted(s)
                }
                c if c.is_ascii_digit() => {
                    let mut s = String::new();
                    while let Some(&d) = self.chars.peek().filter(|d| d.is_ascii_digit()) {
                        s.push(d);
                        self.bump();
                    }
                    Tok::Int(
                        s.parse()
                            .map_err(|_| self.err(line, column, "integer out of range"))?,
                    )
                }
                c if c.is_ascii_lowercase() => {
                    let mut s = String::new();
                    while let Some(&d) = self
                        .chars
                        .peek()
                        .filter(|d| d.is_ascii_alphanumeric() || **d == '_')
                    {
                        s.push(d);
                        self.bump();
                    }
                    Tok::Ident(s)
                }
                other => {
                    return Err(self.err(line, column, format!("unexpected character `{other}`")))
                }
            };
            out.push((tok, line, column));
        }
        Ok(out)
    }
}

fn single(lx: &mut Lexer<'_>, tok: Tok) -> Tok {
    lx.bump();
    tok
}

struct Parser {
    toks: Vec<(Tok, u32, u32)>,
    pos: usize,
    eof: (u32, u32),
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    fn here(&self) -> (u32, u32) {
        self.toks
            .get(self.pos)
            .map(|t| (t.1, t.2))
            .unwrap_or(self.eof)
    }

    fn unexpected(&self, expected: &str) -> SyntaxError {
        let (line, column) = self.here();
        let found = self
            .peek()
            .map(Tok::describe)
            .unwrap_or_else(|| "end of input".into());
        SyntaxError {
            line,
            column,
            reason: format!("expected {expected}, found {found}"),
        }
    }

    fn expect(&mut self, tok: Tok, expected: &str) -> Result<(), SyntaxError> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.unexpected(expected))
        }
    }

    fn clause(&mut self) -> Result<Clause, SyntaxError> {
        let (line, column) = self.here();
        let functor = match self.peek() {
            Some(Tok::Ident(s)) => s.clone(),
            _ => return Err(self.unexpected("a functor")),
        };
        self.pos += 1;
        self.expect(Tok::LParen, "`(`")?;
        let args = self.seq(Tok::RParen)?;
        self.expect(Tok::Dot, "`.` ending the clause")?;
        Ok(Clause {
            functor,
            args,
            line,
            column,
        })
    }

    /// Comma-separated terms up to and including `close`.
    fn seq(&mut self, close: Tok) -> Result<Vec<Term>, SyntaxError> {
        let mut items = Vec::new();
        if self.peek() == Some(&close) {
            self.pos += 1;
            return Ok(items);
        }
        loop {
            items.push(self.term()?);
            match self.peek() {
                Some(Tok::Comma) => self.pos += 1,
                Some(t) if *t == close => {
                    self.pos += 1;
                    return Ok(items);
                }
                _ => {
                    return Err(self.unexpected(if close == Tok::RParen {
                        "`,` or `)`"
                    } else {
                        "`,` or `]`"
                    }))
                }
            }
        }
    }

    fn term(&mut self) -> Result<Term, SyntaxError> {
        let t = match self.peek() {
            Some(Tok::Quoted(s)) => Term::Quoted(s.clone()),
            Some(Tok::Ident(s)) => Term::Bare(s.clone()),
            Some(Tok::Int(n)) => Term::Int(*n),
            Some(Tok::LBracket) => {
                self.pos += 1;
                return Ok(Term::List(self.seq(Tok::RBracket)?));
            }
            _ => return Err(self.unexpected("an atom, integer or list")),
        };
        self.pos += 1;
        Ok(t)
    }
}

/// Reads every clause of `text` in order.
pub fn read_clauses(text: &str) -> Result<Vec<Clause>, SyntaxError> {
    let lexer = Lexer::new(text);
    let toks = lexer.tokens()?;
    let eof = {
        let mut line = 1;
        let mut column = 1;
        for c in text.chars() {
            if c == '\n' {
                line += 1;
                column = 1;
            } else {
                column += 1;
            }
        }
        (line, column)
    };
    let mut p = Parser { toks, pos: 0, eof };
    let mut out = Vec::new();
    while p.peek().is_some() {
        out.push(p.clause()?);
    }
    Ok(out)
}
