//! The s-expression poset file grammar.
//!
//! ```text
//! poset   := (poset node* edge*)
//! node    := (node ID label)
//! label   := INTEGER | pointed
//! pointed := (pointed node* edge*)      -- must have a unique minimum
//! edge    := (edge ID ID)               -- first argument below the second
//! ```
//!
//! Whitespace is insignificant and node/edge forms may interleave; printing
//! is canonical (nodes in id order, then edges sorted).

use std::collections::HashMap;

use thiserror::Error;

use super::{normalize, Label, LabeledPoset, PointedPoset, PosetError};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: duplicate node id {id}")]
    DuplicateNode { line: usize, id: usize },
    #[error("line {line}: dangling node id {id}")]
    DanglingNode { line: usize, id: usize },
    #[error("line {line}: order relation has a cycle")]
    CyclicOrder { line: usize },
    #[error("line {line}: poset must contain at least one node")]
    EmptyPoset { line: usize },
    #[error("line {line}: pointed block without unique minimum")]
    NoUniqueMinimum { line: usize },
}

#[derive(Debug, PartialEq)]
enum Tok {
    Open,
    Close,
    Atom(String),
}

fn tokenize(text: &str) -> Vec<(usize, Tok)> {
    let mut out = Vec::new();
    let mut line = 1;
    let mut atom = String::new();
    let mut atom_line = 1;
    for c in text.chars() {
        if c == '(' || c == ')' || c.is_whitespace() {
            if !atom.is_empty() {
                out.push((atom_line, Tok::Atom(std::mem::take(&mut atom))));
            }
            if c == '(' {
                out.push((line, Tok::Open));
            } else if c == ')' {
                out.push((line, Tok::Close));
            }
            if c == '\n' {
                line += 1;
            }
        } else {
            if atom.is_empty() {
                atom_line = line;
            }
            atom.push(c);
        }
    }
    if !atom.is_empty() {
        out.push((atom_line, Tok::Atom(atom)));
    }
    out
}

struct Parser {
    tokens: Vec<(usize, Tok)>,
    pos: usize,
}

impl Parser {
    fn line(&self) -> usize {
        self.tokens
            .get(self.pos)
            .or_else(|| self.tokens.last())
            .map(|(l, _)| *l)
            .unwrap_or(1)
    }

    fn syntax(&self, msg: impl Into<String>) -> ParseError {
        ParseError::Syntax {
            line: self.line(),
            msg: msg.into(),
        }
    }

    fn next(&mut self) -> Option<&(usize, Tok)> {
        let t = self.tokens.get(self.pos);
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect_open(&mut self) -> Result<usize, ParseError> {
        match self.next() {
            Some(&(line, Tok::Open)) => Ok(line),
            _ => {
                self.pos = self.pos.saturating_sub(1);
                Err(self.syntax("expected `(`"))
            }
        }
    }

    fn expect_atom(&mut self) -> Result<(usize, String), ParseError> {
        match self.next() {
            Some((line, Tok::Atom(a))) => Ok((*line, a.clone())),
            _ => {
                self.pos = self.pos.saturating_sub(1);
                Err(self.syntax("expected an atom"))
            }
        }
    }

    fn expect_close(&mut self) -> Result<(), ParseError> {
        match self.next() {
            Some(&(_, Tok::Close)) => Ok(()),
            _ => {
                self.pos = self.pos.saturating_sub(1);
                Err(self.syntax("expected `)`"))
            }
        }
    }

    fn expect_id(&mut self) -> Result<(usize, usize), ParseError> {
        let (line, atom) = self.expect_atom()?;
        let id = atom.parse::<usize>().map_err(|_| ParseError::Syntax {
            line,
            msg: format!("expected a node id, got {atom:?}"),
        })?;
        Ok((line, id))
    }

    /// Parse node/edge forms up to the closing paren of the current block.
    fn parse_body(&mut self, block_line: usize) -> Result<LabeledPoset, ParseError> {
        let mut nodes: Vec<(usize, usize, Label)> = Vec::new(); // (line, declared id, label)
        let mut edges: Vec<(usize, usize, usize)> = Vec::new(); // (line, below, above)
        loop {
            match self.next() {
                Some(&(_, Tok::Close)) => break,
                Some(&(line, Tok::Open)) => {
                    let (_, head) = self.expect_atom()?;
                    match head.as_str() {
                        "node" => {
                            let (_, id) = self.expect_id()?;
                            let label = self.parse_label()?;
                            self.expect_close()?;
                            nodes.push((line, id, label));
                        }
                        "edge" => {
                            let (_, a) = self.expect_id()?;
                            let (_, b) = self.expect_id()?;
                            self.expect_close()?;
                            edges.push((line, a, b));
                        }
                        other => {
                            return Err(ParseError::Syntax {
                                line,
                                msg: format!("expected `node` or `edge`, got {other:?}"),
                            })
                        }
                    }
                }
                _ => return Err(self.syntax("expected `(` or `)`")),
            }
        }

        if nodes.is_empty() {
            return Err(ParseError::EmptyPoset { line: block_line });
        }
        let mut dense: HashMap<usize, usize> = HashMap::new();
        let mut labels = Vec::with_capacity(nodes.len());
        for (line, id, label) in nodes {
            if dense.insert(id, labels.len()).is_some() {
                return Err(ParseError::DuplicateNode { line, id });
            }
            labels.push(label);
        }
        let mut relation = Vec::with_capacity(edges.len());
        for (line, a, b) in edges {
            let da = *dense
                .get(&a)
                .ok_or(ParseError::DanglingNode { line, id: a })?;
            let db = *dense
                .get(&b)
                .ok_or(ParseError::DanglingNode { line, id: b })?;
            relation.push((da, db));
        }
        normalize(labels, &relation).map_err(|e| match e {
            PosetError::CyclicOrder => ParseError::CyclicOrder { line: block_line },
            PosetError::Empty => ParseError::EmptyPoset { line: block_line },
            PosetError::BadNode(id) => ParseError::DanglingNode {
                line: block_line,
                id,
            },
            PosetError::NoUniqueMinimum => ParseError::NoUniqueMinimum { line: block_line },
        })
    }

    fn parse_label(&mut self) -> Result<Label, ParseError> {
        match self.next() {
            Some((line, Tok::Atom(a))) => {
                let line = *line;
                let a = a.clone();
                let v = a.parse::<u32>().map_err(|_| ParseError::Syntax {
                    line,
                    msg: format!("expected a base label or `(pointed ...)`, got {a:?}"),
                })?;
                Ok(Label::Base(v))
            }
            Some(&(line, Tok::Open)) => {
                let (_, head) = self.expect_atom()?;
                if head != "pointed" {
                    return Err(ParseError::Syntax {
                        line,
                        msg: format!("expected `pointed`, got {head:?}"),
                    });
                }
                let poset = self.parse_body(line)?;
                let pointed =
                    PointedPoset::new(poset).map_err(|_| ParseError::NoUniqueMinimum { line })?;
                Ok(Label::Nested(pointed))
            }
            _ => {
                self.pos = self.pos.saturating_sub(1);
                Err(self.syntax("expected a label"))
            }
        }
    }
}

/// Parse the poset file grammar, normalizing the order relation.
pub fn parse_poset(text: &str) -> Result<LabeledPoset, ParseError> {
    let mut p = Parser {
        tokens: tokenize(text),
        pos: 0,
    };
    let open_line = p.expect_open()?;
    let (_, head) = p.expect_atom()?;
    if head != "poset" {
        return Err(ParseError::Syntax {
            line: open_line,
            msg: format!("expected `poset`, got {head:?}"),
        });
    }
    let poset = p.parse_body(open_line)?;
    if p.pos != p.tokens.len() {
        return Err(p.syntax("trailing input after the poset"));
    }
    Ok(poset)
}

fn write_label(label: &Label, out: &mut String) {
    match label {
        Label::Base(v) => out.push_str(&v.to_string()),
        Label::Nested(pp) => {
            out.push_str("(pointed");
            let inner = pp.poset();
            for i in 0..inner.len() {
                out.push_str(&format!(" (node {i} "));
                write_label(inner.label(i), out);
                out.push(')');
            }
            for (a, b) in inner.cover_edges() {
                out.push_str(&format!(" (edge {a} {b})"));
            }
            out.push(')');
        }
    }
}

/// Canonical serialization in the poset grammar; output re-parses to an
/// equal structure.
pub fn poset_to_sexpr(p: &LabeledPoset) -> String {
    let mut out = String::from("(poset\n");
    for i in 0..p.len() {
        out.push_str(&format!("  (node {i} "));
        write_label(p.label(i), &mut out);
        out.push_str(")\n");
    }
    for (a, b) in p.cover_edges() {
        out.push_str(&format!("  (edge {a} {b})\n"));
    }
    out.push_str(")\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poset::singleton;

    #[test]
    fn parse_singleton() {
        let p = parse_poset("(poset (node 0 1))").unwrap();
        assert_eq!(p, singleton(Label::Base(1)));
    }

    #[test]
    fn parse_diamond() {
        let text = "(poset (node 0 0) (node 1 1) (node 2 2) (node 3 0)
                      (edge 0 1) (edge 0 2) (edge 1 3) (edge 2 3))";
        let p = parse_poset(text).unwrap();
        assert_eq!(p.len(), 4);
        assert_eq!(p.cover_edge_count(), 4);
        assert_eq!(p, crate::poset::tests::diamond());
    }

    #[test]
    fn parse_cycle_error() {
        let e = parse_poset("(poset (node 0 0) (node 1 0) (edge 0 1) (edge 1 0))").unwrap_err();
        assert!(matches!(e, ParseError::CyclicOrder { .. }));
    }

    #[test]
    fn parse_dangling_edge() {
        let e = parse_poset("(poset (node 0 0) (edge 0 7))").unwrap_err();
        assert_eq!(e, ParseError::DanglingNode { line: 1, id: 7 });
    }

    #[test]
    fn parse_duplicate_node() {
        let e = parse_poset("(poset (node 0 0) (node 0 1))").unwrap_err();
        assert_eq!(e, ParseError::DuplicateNode { line: 1, id: 0 });
    }

    #[test]
    fn parse_pointed_labels() {
        let text = "(poset (node 0 (pointed (node 0 0) (node 1 1) (edge 0 1))))";
        let p = parse_poset(text).unwrap();
        match p.label(0) {
            Label::Nested(pp) => {
                assert_eq!(pp.least(), 0);
                assert_eq!(pp.poset().len(), 2);
            }
            other => panic!("expected nested label, got {other:?}"),
        }
    }

    #[test]
    fn pointed_without_minimum() {
        let text = "(poset (node 0 (pointed (node 0 0) (node 1 1))))";
        assert!(matches!(
            parse_poset(text).unwrap_err(),
            ParseError::NoUniqueMinimum { .. }
        ));
    }

    #[test]
    fn empty_poset_rejected() {
        assert!(matches!(
            parse_poset("(poset)").unwrap_err(),
            ParseError::EmptyPoset { .. }
        ));
    }

    #[test]
    fn round_trip() {
        let text = "(poset (node 0 (pointed (node 0 0) (node 1 1) (edge 0 1)))
                      (node 1 2) (node 2 0)
                      (edge 0 1) (edge 0 2))";
        let p = parse_poset(text).unwrap();
        let printed = poset_to_sexpr(&p);
        assert_eq!(parse_poset(&printed).unwrap(), p);
    }

    #[test]
    fn error_lines_are_tracked() {
        let text = "(poset\n  (node 0 0)\n  (edge 0 9)\n)";
        assert_eq!(
            parse_poset(text).unwrap_err(),
            ParseError::DanglingNode { line: 3, id: 9 }
        );
    }
}
