//! Line-oriented text format for graphs.
//!
//! ```text
//! # comment
//! alphabet a b
//! node x
//! edge x a y
//! ```
//!
//! The `alphabet` header is optional; without it the alphabet is the set of
//! labels used. Edges may mention nodes that were not declared.

use super::{GraphDb, Label};
use crate::error::{Error, Result};
use std::collections::BTreeSet;

pub(crate) fn is_ident(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn ident(line: usize, s: &str) -> Result<String> {
    if is_ident(s) {
        Ok(s.to_string())
    } else {
        Err(Error::parse(line, format!("invalid identifier `{s}`")))
    }
}

/// Strips a trailing `#` comment.
pub(crate) fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

/// Calls `f(line_number, tokens)` on every non-empty line not claimed by a
/// directive in `graph`; used by the template reader to add its own lines.
pub(crate) fn parse_with<F>(text: &str, mut extra: F) -> Result<GraphDb>
where
    F: FnMut(usize, &[&str]) -> Result<bool>,
{
    let mut header: Option<BTreeSet<Label>> = None;
    let mut nodes = Vec::new();
    let mut edges = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let ln = i + 1;
        let toks: Vec<&str> = strip_comment(raw).split_whitespace().collect();
        let Some(&head) = toks.first() else { continue };
        match head {
            "alphabet" => {
                if header.is_some() || !nodes.is_empty() || !edges.is_empty() {
                    return Err(Error::parse(ln, "alphabet must be the first directive"));
                }
                let mut set = BTreeSet::new();
                for t in &toks[1..] {
                    set.insert(Label::new(ident(ln, t)?));
                }
                header = Some(set);
            }
            "node" => {
                if toks.len() != 2 {
                    return Err(Error::parse(ln, "expected `node <id>`"));
                }
                nodes.push(ident(ln, toks[1])?);
            }
            "edge" => {
                if toks.len() != 4 {
                    return Err(Error::parse(ln, "expected `edge <src> <label> <dst>`"));
                }
                edges.push((ln, ident(ln, toks[1])?, ident(ln, toks[2])?, ident(ln, toks[3])?));
            }
            _ => {
                if !extra(ln, &toks)? {
                    return Err(Error::parse(ln, format!("unknown directive `{head}`")));
                }
            }
        }
    }
    let alphabet = match header {
        Some(h) => h,
        None => edges.iter().map(|(_, _, l, _)| Label::new(l.clone())).collect(),
    };
    let mut g = GraphDb::new(alphabet);
    for n in nodes {
        g.add_node(n);
    }
    for (_, s, l, d) in edges {
        g.add_edge(s, l, d)?;
    }
    Ok(g)
}

pub fn parse_graph(text: &str) -> Result<GraphDb> {
    parse_with(text, |_, _| Ok(false))
}

/// Canonical serialization: header, then nodes, then edges, each sorted.
pub fn serialize_graph(g: &GraphDb) -> String {
    let mut out = String::new();
    out.push_str("alphabet");
    for l in g.alphabet() {
        out.push(' ');
        out.push_str(l.as_str());
    }
    out.push('\n');
    for n in g.nodes() {
        out.push_str(&format!("node {n}\n"));
    }
    for e in g.edges() {
        out.push_str(&format!("edge {} {} {}\n", e.src, e.label, e.dst));
    }
    out
}
