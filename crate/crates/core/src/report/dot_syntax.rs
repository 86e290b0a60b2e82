//! A minimal reader for the DOT language, enough to check that generated
//! graphs are well formed and to inspect their edges.
//!
//! Supports `strict`, `graph`/`digraph`, node, edge and attribute
//! statements, `ID = ID` statements, subgraphs, ports, quoted and numeral
//! ids, and `//`, `/* */` and `#` comments. HTML labels are not supported.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("DOT syntax error at byte {offset}: {reason}")]
pub struct DotSyntaxError {
    pub offset: usize,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DotEdge {
    pub from: String,
    pub to: String,
    pub attrs: BTreeMap<String, String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DotGraph {
    pub directed: bool,
    pub nodes: BTreeSet<String>,
    pub edges: Vec<DotEdge>,
}

impl DotGraph {
    pub fn edges_with<'a>(
        &'a self,
        key: &'a str,
        value: &'a str,
    ) -> impl Iterator<Item = &'a DotEdge> + 'a {
        self.edges
            .iter()
            .filter(move |e| e.attrs.get(key).map(String::as_str) == Some(value))
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Id(String),
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Eq,
    Semi,
    Comma,
    Colon,
    Arrow,
    Dash,
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, DotSyntaxError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    let err = |offset, reason: &str| DotSyntaxError {
        offset,
        reason: reason.into(),
    };
    let mut line_start = true;
    while i < bytes.len() {
        let c = bytes[i];
        if c == b'\n' {
            line_start = true;
            i += 1;
            continue;
        }
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if c == b'#' && line_start {
            while i < bytes.len() && bytes[i] != b'\n' {
                i += 1;
            }
            continue;
        }
        line_start = false;
        let start = i;
        if text[i..].starts_with("//") {
            while i < bytes.len() && bytes[i] != b'\n' {
                i += 1;
            }
            continue;
        }
        if text[i..].starts_with("/*") {
            match text[i + 2..].find("*/") {
                Some(end) => i += end + 4,
                None => return Err(err(start, "unterminated comment")),
            }
            continue;
        }
        let tok = match c {
            b'{' => Tok::LBrace,
            b'}' => Tok::RBrace,
            b'[' => Tok::LBracket,
            b']' => Tok::RBracket,
            b'=' => Tok::Eq,
            b';' => Tok::Semi,
            b',' => Tok::Comma,
            b':' => Tok::Colon,
            b'-' if text[i..].starts_with("->") => {
                i += 1;
                Tok::Arrow
            }
            b'-' if text[i..].starts_with("--") => {
                i += 1;
                Tok::Dash
            }
            b'"' => {
                let mut s = String::new();
                let mut chars = text[i + 1..].char_indices();
                loop {
                    match chars.next() {
                        None => return Err(err(start, "unterminated string")),
                        Some((j, '"')) => {
                            i += j + 1;
                            break;
                        }
                        Some((_, '\\')) => match chars.next() {
                            Some((_, '"')) => s.push('"'),
                            Some((_, '\\')) => s.push('\\'),
                            Some((_, '\n')) => {}
                            Some((_, other)) => {
                                s.push('\\');
                                s.push(other);
                            }
                            None => return Err(err(start, "unterminated string")),
                        },
                        Some((_, ch)) => s.push(ch),
                    }
                }
                Tok::Id(s)
            }
            b'<' => return Err(err(start, "HTML ids are not supported")),
            c if c.is_ascii_alphabetic() || c == b'_' || c >= 0x80 => {
                let mut end = i;
                for (j, ch) in text[i..].char_indices() {
                    if ch.is_alphanumeric() || ch == '_' {
                        end = i + j + ch.len_utf8();
                    } else {
                        break;
                    }
                }
                let s = text[i..end].to_owned();
                i = end - 1;
                Tok::Id(s)
            }
            c if c.is_ascii_digit() || c == b'.' || c == b'-' => {
                let mut end = i + 1;
                while end < bytes.len() && (bytes[end].is_ascii_digit() || bytes[end] == b'.') {
                    end += 1;
                }
                let s = &text[i..end];
                if s.matches('.').count() > 1 || s == "-" || s == "." || s == "-." {
                    return Err(err(start, "malformed numeral"));
                }
                i = end - 1;
                Tok::Id(s.to_owned())
            }
            _ => return Err(err(start, "unexpected character")),
        };
        out.push((tok, start));
        i += 1;
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
    graph: DotGraph,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    fn fail<T>(&self, reason: &str) -> Result<T, DotSyntaxError> {
        Err(DotSyntaxError {
            offset: self.toks.get(self.pos).map_or(self.end, |t| t.1),
            reason: reason.into(),
        })
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Some(Tok::Id(s)) if s.eq_ignore_ascii_case(kw))
    }

    fn id(&mut self) -> Result<String, DotSyntaxError> {
        match self.peek() {
            Some(Tok::Id(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => self.fail("expected an id"),
        }
    }

    fn graph(&mut self) -> Result<(), DotSyntaxError> {
        if self.keyword("strict") {
            self.pos += 1;
        }
        if self.keyword("digraph") {
            self.graph.directed = true;
        } else if !self.keyword("graph") {
            return self.fail("expected `graph` or `digraph`");
        }
        self.pos += 1;
        if matches!(self.peek(), Some(Tok::Id(_))) {
            self.pos += 1;
        }
        self.block()?;
        if self.peek().is_some() {
            return self.fail("trailing input after graph");
        }
        Ok(())
    }

    fn block(&mut self) -> Result<(), DotSyntaxError> {
        if !self.eat(&Tok::LBrace) {
            return self.fail("expected `{`");
        }
        while !self.eat(&Tok::RBrace) {
            if self.peek().is_none() {
                return self.fail("expected `}`");
            }
            self.stmt()?;
            self.eat(&Tok::Semi);
        }
        Ok(())
    }

    fn attr_lists(&mut self) -> Result<BTreeMap<String, String>, DotSyntaxError> {
        let mut attrs = BTreeMap::new();
        while self.eat(&Tok::LBracket) {
            while !self.eat(&Tok::RBracket) {
                let k = self.id()?;
                if !self.eat(&Tok::Eq) {
                    return self.fail("expected `=` in attribute");
                }
                let v = self.id()?;
                attrs.insert(k, v);
                if !self.eat(&Tok::Comma) {
                    self.eat(&Tok::Semi);
                }
            }
        }
        Ok(attrs)
    }

    fn node_id(&mut self) -> Result<String, DotSyntaxError> {
        let id = self.id()?;
        if self.eat(&Tok::Colon) {
            self.id()?;
            if self.eat(&Tok::Colon) {
                self.id()?;
            }
        }
        Ok(id)
    }

    fn stmt(&mut self) -> Result<(), DotSyntaxError> {
        if self.keyword("subgraph") {
            self.pos += 1;
            if matches!(self.peek(), Some(Tok::Id(_))) {
                self.pos += 1;
            }
            return self.block();
        }
        if self.peek() == Some(&Tok::LBrace) {
            return self.block();
        }
        if self.keyword("graph") || self.keyword("node") || self.keyword("edge") {
            self.pos += 1;
            if self.peek() != Some(&Tok::LBracket) {
                return self.fail("expected attribute list");
            }
            self.attr_lists()?;
            return Ok(());
        }
        let first = self.node_id()?;
        if self.eat(&Tok::Eq) {
            self.id()?;
            return Ok(());
        }
        let op = if self.graph.directed {
            Tok::Arrow
        } else {
            Tok::Dash
        };
        let mut chain = vec![first];
        loop {
            match self.peek() {
                Some(t) if *t == op => {
                    self.pos += 1;
                    chain.push(self.node_id()?);
                }
                Some(Tok::Arrow) | Some(Tok::Dash) => {
                    return self.fail("edge operator does not match graph kind")
                }
                _ => break,
            }
        }
        let attrs = self.attr_lists()?;
        for n in &chain {
            self.graph.nodes.insert(n.clone());
        }
        for w in chain.windows(2) {
            self.graph.edges.push(DotEdge {
                from: w[0].clone(),
                to: w[1].clone(),
                attrs: attrs.clone(),
            });
        }
        Ok(())
    }
}

/// Parses `text` as a DOT graph.
pub fn parse_dot(text: &str) -> Result<DotGraph, DotSyntaxError> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        end: text.len(),
        graph: DotGraph::default(),
    };
    p.graph()?;
    Ok(p.graph)
}
