//! Regular expressions over labels.
//!
//! Grammar (symbols are whitespace-separated and may be multi-character):
//!
//! ```text
//! alt  := cat ('|' cat)*
//! cat  := post+
//! post := atom ('*' | '+' | '?')*
//! atom := SYMBOL | 'eps' | '(' alt ')'
//! ```

use crate::error::{Error, Result};
use crate::graph::Label;
use std::collections::BTreeSet;
use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum RegexAst {
    Epsilon,
    Symbol(Label),
    Concat(Vec<RegexAst>),
    Alt(Vec<RegexAst>),
    Star(Box<RegexAst>),
    Plus(Box<RegexAst>),
    Opt(Box<RegexAst>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Sym(String),
    LParen,
    RParen,
    Bar,
    Star,
    Plus,
    Quest,
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>> {
    let mut out = Vec::new();
    let mut chars = text.char_indices().peekable();
    while let Some(&(i, c)) = chars.peek() {
        let tok = match c {
            c if c.is_whitespace() => {
                chars.next();
                continue;
            }
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '|' => Tok::Bar,
            '*' => Tok::Star,
            '+' => Tok::Plus,
            '?' => Tok::Quest,
            c if c.is_ascii_alphanumeric() || c == '_' => {
                let mut s = String::new();
                while let Some(&(_, c)) = chars.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' {
                        s.push(c);
                        chars.next();
                    } else {
                        break;
                    }
                }
                out.push((i, Tok::Sym(s)));
                continue;
            }
            other => return Err(Error::parse(1, format!("unexpected character `{other}` at offset {i}"))),
        };
        chars.next();
        out.push((i, tok));
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    at: usize,
    alphabet: &'a BTreeSet<Label>,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(_, t)| t)
    }

    fn err(&self, msg: &str) -> Error {
        let off = self.toks.get(self.at).map(|(i, _)| *i);
        match off {
            Some(i) => Error::parse(1, format!("{msg} at offset {i}")),
            None => Error::parse(1, format!("{msg} at end of input")),
        }
    }

    fn alt(&mut self) -> Result<RegexAst> {
        let mut parts = vec![self.cat()?];
        while self.peek() == Some(&Tok::Bar) {
            self.at += 1;
            parts.push(self.cat()?);
        }
        Ok(if parts.len() == 1 { parts.pop().unwrap() } else { RegexAst::Alt(parts) })
    }

    fn cat(&mut self) -> Result<RegexAst> {
        let mut parts = Vec::new();
        while matches!(self.peek(), Some(Tok::Sym(_)) | Some(Tok::LParen)) {
            parts.push(self.post()?);
        }
        match parts.len() {
            0 => Err(self.err("expected a symbol, `eps` or `(`")),
            1 => Ok(parts.pop().unwrap()),
            _ => Ok(RegexAst::Concat(parts)),
        }
    }

    fn post(&mut self) -> Result<RegexAst> {
        let mut a = self.atom()?;
        loop {
            a = match self.peek() {
                Some(Tok::Star) => RegexAst::Star(Box::new(a)),
                Some(Tok::Plus) => RegexAst::Plus(Box::new(a)),
                Some(Tok::Quest) => RegexAst::Opt(Box::new(a)),
                _ => return Ok(a),
            };
            self.at += 1;
        }
    }

    fn atom(&mut self) -> Result<RegexAst> {
        match self.peek().cloned() {
            Some(Tok::Sym(s)) => {
                self.at += 1;
                if s == "eps" {
                    return Ok(RegexAst::Epsilon);
                }
                let l = Label::new(s.clone());
                if !self.alphabet.contains(&l) {
                    return Err(Error::UnknownSymbol(s));
                }
                Ok(RegexAst::Symbol(l))
            }
            Some(Tok::LParen) => {
                self.at += 1;
                let inner = self.alt()?;
                if self.peek() != Some(&Tok::RParen) {
                    return Err(self.err("expected `)`"));
                }
                self.at += 1;
                Ok(inner)
            }
            _ => Err(self.err("expected a symbol, `eps` or `(`")),
        }
    }
}

/// Parses `text` over the given alphabet.
pub fn parse_regex(text: &str, alphabet: &BTreeSet<Label>) -> Result<RegexAst> {
    let mut p = Parser { toks: tokenize(text)?, at: 0, alphabet };
    let ast = p.alt()?;
    if p.at != p.toks.len() {
        return Err(p.err("unexpected token"));
    }
    Ok(ast)
}

impl RegexAst {
    /// Direct membership test on the syntax tree, independent of automata.
    pub fn matches(&self, w: &[Label]) -> bool {
        self.ends(w, 0).contains(&w.len())
    }

    /// Positions `j` such that `w[i..j]` is in the language.
    fn ends(&self, w: &[Label], i: usize) -> BTreeSet<usize> {
        match self {
            RegexAst::Epsilon => BTreeSet::from([i]),
            RegexAst::Symbol(l) => {
                if w.get(i) == Some(l) {
                    BTreeSet::from([i + 1])
                } else {
                    BTreeSet::new()
                }
            }
            RegexAst::Concat(parts) => {
                let mut cur = BTreeSet::from([i]);
                for p in parts {
                    cur = cur.iter().flat_map(|&j| p.ends(w, j)).collect();
                }
                cur
            }
            RegexAst::Alt(parts) => parts.iter().flat_map(|p| p.ends(w, i)).collect(),
            RegexAst::Star(a) => {
                let mut seen = BTreeSet::from([i]);
                let mut frontier = vec![i];
                while let Some(j) = frontier.pop() {
                    for k in a.ends(w, j) {
                        if seen.insert(k) {
                            frontier.push(k);
                        }
                    }
                }
                seen
            }
            RegexAst::Plus(a) => {
                RegexAst::Concat(vec![(**a).clone(), RegexAst::Star(a.clone())]).ends(w, i)
            }
            RegexAst::Opt(a) => {
                let mut s = a.ends(w, i);
                s.insert(i);
                s
            }
        }
    }

    pub fn symbols(&self) -> BTreeSet<Label> {
        let mut out = BTreeSet::new();
        self.collect_symbols(&mut out);
        out
    }

    fn collect_symbols(&self, out: &mut BTreeSet<Label>) {
        match self {
            RegexAst::Epsilon => {}
            RegexAst::Symbol(l) => {
                out.insert(l.clone());
            }
            RegexAst::Concat(ps) | RegexAst::Alt(ps) => ps.iter().for_each(|p| p.collect_symbols(out)),
            RegexAst::Star(a) | RegexAst::Plus(a) | RegexAst::Opt(a) => a.collect_symbols(out),
        }
    }
}

impl fmt::Display for RegexAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn atomic(a: &RegexAst) -> bool {
            matches!(a, RegexAst::Epsilon | RegexAst::Symbol(_) | RegexAst::Star(_) | RegexAst::Plus(_) | RegexAst::Opt(_))
        }
        match self {
            RegexAst::Epsilon => write!(f, "eps"),
            RegexAst::Symbol(l) => write!(f, "{l}"),
            RegexAst::Concat(ps) => {
                for (i, p) in ps.iter().enumerate() {
                    if i > 0 {
                        write!(f, " ")?;
                    }
                    if matches!(p, RegexAst::Alt(_)) {
                        write!(f, "({p})")?;
                    } else {
                        write!(f, "{p}")?;
                    }
                }
                Ok(())
            }
            RegexAst::Alt(ps) => {
                for (i, p) in ps.iter().enumerate() {
                    if i > 0 {
                        write!(f, " | ")?;
                    }
                    write!(f, "{p}")?;
                }
                Ok(())
            }
            RegexAst::Star(a) | RegexAst::Plus(a) | RegexAst::Opt(a) => {
                let op = match self {
                    RegexAst::Star(_) => "*",
                    RegexAst::Plus(_) => "+",
                    _ => "?",
                };
                let inner_atomic = atomic(a) && !matches!(**a, RegexAst::Star(_) | RegexAst::Plus(_) | RegexAst::Opt(_));
                if inner_atomic {
                    write!(f, "{a}{op}")
                } else {
                    write!(f, "({a}){op}")
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::word;

    fn sigma(ls: &[&str]) -> BTreeSet<Label> {
        ls.iter().map(|l| Label::from(*l)).collect()
    }

    #[test]
    fn parses_fixture_expressions() {
        let s = sigma(&["a", "b", "c"]);
        let q = parse_regex("a b* a | a c* a", &s).unwrap();
        assert!(q.matches(&word("abbba")));
        assert!(q.matches(&word("aa")));
        assert!(!q.matches(&word("abca")));
        let e = parse_regex("eps", &s).unwrap();
        assert!(e.matches(&[]));
        let p = parse_regex("(a | b)+ c?", &s).unwrap();
        assert!(p.matches(&word("abab")));
        assert!(p.matches(&word("bc")));
        assert!(!p.matches(&word("c")));
    }

    #[test]
    fn multi_character_symbols() {
        let s = sigma(&["rg", "gb"]);
        let r = parse_regex("rg gb*", &s).unwrap();
        assert!(r.matches(&word("rg gb gb")));
    }

    #[test]
    fn errors() {
        let s = sigma(&["a"]);
        assert!(matches!(parse_regex("a |", &s), Err(Error::Parse { .. })));
        assert!(matches!(parse_regex("(a", &s), Err(Error::Parse { .. })));
        assert_eq!(parse_regex("a d", &s), Err(Error::UnknownSymbol("d".into())));
    }

    #[test]
    fn display_reparses_to_same_language() {
        let s = sigma(&["a", "b"]);
        let r = parse_regex("(a b | b)* a? (a | eps)+", &s).unwrap();
        let again = parse_regex(&r.to_string(), &s).unwrap();
        assert_eq!(r, again);
    }
}
