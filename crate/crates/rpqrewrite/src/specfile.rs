//! Spec files: the base alphabet, regular and context-free views, and the
//! query.
//!
//! ```text
//! alphabet a b
//! view V1 = a b*
//! cfgview V2 { S -> a S b | eps ; }
//! query Q = (a b)*
//! ```
//!
//! Without an `alphabet` line the alphabet is the set of letters used by
//! the views and the query. A `cfgview` block may span several lines. An
//! empty right-hand side denotes the empty language.

use crate::automata::{parse_regex, RegexAst};
use crate::cfpq::{parse_cfg_at, regularize_view, Cfg};
use crate::error::{Error, Result};
use crate::graph::{io::is_ident, Label};
use crate::rpq::{QuerySpec, ViewSpec};
use std::collections::BTreeSet;
use std::fmt;

#[derive(Clone, Debug)]
pub enum ViewDef {
    Regular { text: String, ast: RegexAst },
    Context(Cfg),
}

#[derive(Clone, Debug)]
pub struct SpecFile {
    pub sigma: BTreeSet<Label>,
    /// Views in declaration order.
    pub views: Vec<(Label, ViewDef)>,
    pub query: Option<(String, String, QuerySpec)>,
}

impl SpecFile {
    pub fn query(&self) -> Result<&QuerySpec> {
        self.query.as_ref().map(|(_, _, q)| q).ok_or_else(|| Error::Invalid("spec declares no query".into()))
    }

    pub fn has_context_free_views(&self) -> bool {
        self.views.iter().any(|(_, d)| matches!(d, ViewDef::Context(_)))
    }

    /// The regular views; fails when some view is context-free.
    pub fn regular_views(&self) -> Result<ViewSpec> {
        let defs = self
            .views
            .iter()
            .map(|(n, d)| match d {
                ViewDef::Regular { ast, .. } => Ok((n.clone(), ast.clone())),
                ViewDef::Context(_) => Err(Error::Invalid(format!("view `{n}` is context-free; this command needs regular views"))),
            })
            .collect::<Result<Vec<_>>>()?;
        ViewSpec::new(self.sigma.clone(), defs)
    }

    /// Regular views, with every context-free view replaced by its
    /// regularization relative to the query.
    pub fn effective_views(&self) -> Result<ViewSpec> {
        if !self.has_context_free_views() {
            return self.regular_views();
        }
        let q = self.query()?;
        let mut dfas = Vec::new();
        for (n, d) in &self.views {
            let dfa = match d {
                ViewDef::Regular { ast, .. } => crate::automata::to_min_dfa(ast, &self.sigma)?,
                ViewDef::Context(g) => regularize_view(g, q)?,
            };
            dfas.push((n.clone(), dfa));
        }
        ViewSpec::from_dfas(self.sigma.clone(), dfas)
    }

    /// The context-free views.
    pub fn grammars(&self) -> Vec<(Label, Cfg)> {
        self.views
            .iter()
            .filter_map(|(n, d)| match d {
                ViewDef::Context(g) => Some((n.clone(), g.clone())),
                ViewDef::Regular { .. } => None,
            })
            .collect()
    }
}

impl fmt::Display for SpecFile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sigma: Vec<&str> = self.sigma.iter().map(Label::as_str).collect();
        writeln!(f, "alphabet {}", sigma.join(" "))?;
        for (n, d) in &self.views {
            match d {
                ViewDef::Regular { text, .. } => writeln!(f, "view {n} = {text}")?,
                ViewDef::Context(g) => {
                    writeln!(f, "cfgview {n} {{")?;
                    for line in g.to_string().lines() {
                        writeln!(f, "  {line}")?;
                    }
                    writeln!(f, "}}")?;
                }
            }
        }
        if let Some((name, text, _)) = &self.query {
            writeln!(f, "query {name} = {text}")?;
        }
        Ok(())
    }
}

/// Moves a regex error to the line it came from.
fn at_line(e: Error, line: usize) -> Error {
    match e {
        Error::Parse { msg, .. } => Error::Parse { line, msg },
        other => other,
    }
}

fn parse_rhs(re: &str, sigma: &BTreeSet<Label>, ln: usize) -> Result<RegexAst> {
    if re.trim().is_empty() {
        return Ok(RegexAst::Alt(Vec::new()));
    }
    parse_regex(re, sigma).map_err(|e| at_line(e, ln))
}

/// Letters used by a regular expression, for specs without an alphabet.
fn regex_letters(text: &str) -> BTreeSet<Label> {
    text.split(|c: char| "()|*+?".contains(c) || c.is_whitespace())
        .filter(|t| is_ident(t) && *t != "eps")
        .map(Label::from)
        .collect()
}

pub fn parse_spec(text: &str) -> Result<SpecFile> {
    enum Item {
        View(usize, String, String),
        Cfg(usize, String, String),
        Query(usize, String, String),
    }
    let mut sigma: Option<BTreeSet<Label>> = None;
    let mut items = Vec::new();
    let lines: Vec<&str> = text.lines().collect();
    let mut i = 0;
    while i < lines.len() {
        let ln = i + 1;
        let line = crate::graph::io::strip_comment(lines[i]).trim();
        i += 1;
        if line.is_empty() {
            continue;
        }
        let (head, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        let rest = rest.trim();
        match head {
            "alphabet" => {
                if sigma.is_some() || !items.is_empty() {
                    return Err(Error::parse(ln, "alphabet must be the first directive"));
                }
                let mut set = BTreeSet::new();
                for t in rest.split_whitespace() {
                    if !is_ident(t) || t == "eps" {
                        return Err(Error::parse(ln, format!("bad letter `{t}`")));
                    }
                    set.insert(Label::from(t));
                }
                sigma = Some(set);
            }
            "view" | "query" => {
                let (name, re) = rest.split_once('=').ok_or_else(|| Error::parse(ln, format!("expected `{head} <name> = <regex>`")))?;
                let name = name.trim();
                if !is_ident(name) {
                    return Err(Error::parse(ln, format!("bad name `{name}`")));
                }
                let item = if head == "view" { Item::View } else { Item::Query };
                items.push(item(ln, name.to_string(), re.trim().to_string()));
            }
            "cfgview" => {
                let (name, body) = rest.split_once('{').ok_or_else(|| Error::parse(ln, "expected `cfgview <name> { ... }`"))?;
                let name = name.trim();
                if !is_ident(name) {
                    return Err(Error::parse(ln, format!("bad name `{name}`")));
                }
                let mut body = body.to_string();
                while !body.contains('}') {
                    let Some(next) = lines.get(i) else {
                        return Err(Error::parse(ln, format!("unterminated grammar block for `{name}`")));
                    };
                    body.push('\n');
                    body.push_str(crate::graph::io::strip_comment(next));
                    i += 1;
                }
                let (inner, tail) = body.split_once('}').expect("checked above");
                if !tail.trim().is_empty() {
                    return Err(Error::parse(i, format!("unexpected `{}` after grammar block", tail.trim())));
                }
                items.push(Item::Cfg(ln, name.to_string(), inner.to_string()));
            }
            other => return Err(Error::parse(ln, format!("unknown directive `{other}`"))),
        }
    }
    let sigma = sigma.unwrap_or_else(|| {
        let mut s = BTreeSet::new();
        for it in &items {
            if let Item::View(_, _, re) | Item::Query(_, _, re) = it {
                s.extend(regex_letters(re));
            }
        }
        s
    });
    let mut views: Vec<(Label, ViewDef)> = Vec::new();
    let mut query = None;
    for it in items {
        match it {
            Item::View(ln, name, re) => {
                let ast = parse_rhs(&re, &sigma, ln)?;
                views.push((Label::from(name.as_str()), ViewDef::Regular { text: re, ast }));
            }
            Item::Cfg(ln, name, body) => {
                let g = parse_cfg_at(&body, &sigma, ln)?;
                views.push((Label::from(name.as_str()), ViewDef::Context(g)));
            }
            Item::Query(ln, name, re) => {
                if query.is_some() {
                    return Err(Error::parse(ln, "more than one query"));
                }
                let ast = parse_rhs(&re, &sigma, ln)?;
                query = Some((name, re, QuerySpec::new(sigma.clone(), ast)?));
            }
        }
    }
    let mut seen = BTreeSet::new();
    if let Some((n, _)) = views.iter().find(|(n, _)| !seen.insert(n.clone())) {
        return Err(Error::Invalid(format!("view `{n}` defined twice")));
    }
    Ok(SpecFile { sigma, views, query })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::word;

    #[test]
    fn regular_spec() {
        let s = parse_spec("# ex\nalphabet a\nview V1 = a a a\nview V2 = a a a a\nquery Q = a a a a a\n").unwrap();
        assert_eq!(s.regular_views().unwrap().len(), 2);
        assert!(s.query().unwrap().dfa().accepts(&word("aaaaa")));
        let again = parse_spec(&s.to_string()).unwrap();
        assert_eq!(again.to_string(), s.to_string());
    }

    #[test]
    fn inferred_alphabet_and_grammar_block() {
        let text = "view V1 = a b*\ncfgview W {\n  S -> a S b | eps ;\n}\nquery Q = (a b)*\n";
        let s = parse_spec(text).unwrap();
        assert_eq!(s.sigma, ["a", "b"].iter().map(|x| Label::from(*x)).collect());
        assert!(s.has_context_free_views());
        assert!(s.regular_views().is_err());
        let eff = s.effective_views().unwrap();
        assert!(eff.dfas()[1].accepts(&word("aabb")));
        let again = parse_spec(&s.to_string()).unwrap();
        assert_eq!(again.grammars().len(), 1);
    }

    #[test]
    fn errors_carry_lines() {
        assert_eq!(parse_spec("alphabet a\nview V = a c\n").unwrap_err(), Error::UnknownSymbol("c".into()));
        assert!(matches!(parse_spec("alphabet a\n\nview V = (a\n"), Err(Error::Parse { line: 3, .. })));
        assert!(matches!(parse_spec("alphabet a\nfoo\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_spec("cfgview W { S -> a\n"), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn empty_rhs_is_empty_language() {
        let s = parse_spec("alphabet a\nview V = a\nquery Q =\n").unwrap();
        let q = s.query().unwrap();
        assert!(!q.dfa().accepts(&word("")) && !q.dfa().accepts(&word("a")));
        assert_eq!(parse_spec(&s.to_string()).unwrap().to_string(), s.to_string());
    }
}
