//! Context-free views: grammars, intersection with regular languages, and
//! their regularization relative to the query automaton.
//!
//! Grammar text, as found inside a `cfgview Name { ... }` block:
//!
//! ```text
//! S -> a S b | eps ;
//! ```
//!
//! Statements end with `;`. Nonterminals are the symbols with a rule; the
//! first of them is the start symbol unless a `start X ;` statement names
//! another. Every other symbol must be a letter of the base alphabet.

use crate::automata::{Automaton, Dfa};
use crate::error::{Error, Result};
use crate::graph::{io::is_ident, Label, NodeId, Word};
use crate::rpq::{QuerySpec, ViewInstance, ViewSpec};
use crate::template::{build_template, cert_all};
use rayon::prelude::*;
use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Symbol {
    T(Label),
    N(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cfg {
    pub nonterminals: BTreeSet<String>,
    pub terminals: BTreeSet<Label>,
    pub productions: Vec<(String, Vec<Symbol>)>,
    pub start: String,
    bin: Binary,
}

impl Cfg {
    pub fn new(terminals: BTreeSet<Label>, productions: Vec<(String, Vec<Symbol>)>, start: impl Into<String>) -> Result<Self> {
        let start = start.into();
        let mut nonterminals: BTreeSet<String> = productions.iter().map(|(a, _)| a.clone()).collect();
        nonterminals.insert(start.clone());
        for (_, rhs) in &productions {
            for s in rhs {
                match s {
                    Symbol::N(n) if !nonterminals.contains(n) => return Err(Error::UndeclaredSymbol(n.clone())),
                    Symbol::T(t) if !terminals.contains(t) => return Err(Error::UndeclaredSymbol(t.to_string())),
                    _ => {}
                }
            }
        }
        if let Some(n) = nonterminals.iter().find(|n| terminals.contains(&Label::from(n.as_str()))) {
            return Err(Error::Invalid(format!("`{n}` is both a nonterminal and a letter")));
        }
        let bin = Binary::new(&nonterminals, &terminals, &productions, &start);
        Ok(Cfg { nonterminals, terminals, productions, start, bin })
    }

    /// Membership by CYK over the binary form.
    pub fn accepts(&self, w: &[Label]) -> bool {
        let mut letters = Vec::with_capacity(w.len());
        for l in w {
            match self.bin.letters.iter().position(|x| x == l) {
                Some(i) => letters.push(i),
                None => return false,
            }
        }
        self.bin.cyk(&letters)
    }

    /// Words of the language up to `max_len`, by length then
    /// lexicographically.
    pub fn words_up_to(&self, max_len: usize) -> Vec<Word> {
        let letters: Vec<Label> = self.terminals.iter().cloned().collect();
        let mut out = Vec::new();
        let mut layer: Vec<Word> = vec![Vec::new()];
        for len in 0..=max_len {
            out.extend(layer.iter().filter(|w| self.accepts(w)).cloned());
            if len < max_len {
                layer = layer.iter().flat_map(|w| letters.iter().map(move |l| w.iter().cloned().chain([l.clone()]).collect())).collect();
            }
        }
        out
    }
}

impl fmt::Display for Cfg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "start {} ;", self.start)?;
        let mut by_lhs: BTreeMap<&String, Vec<String>> = BTreeMap::new();
        for (a, rhs) in &self.productions {
            let alt = if rhs.is_empty() {
                "eps".to_string()
            } else {
                rhs.iter().map(|s| match s {
                    Symbol::T(t) => t.to_string(),
                    Symbol::N(n) => n.clone(),
                }).collect::<Vec<_>>().join(" ")
            };
            by_lhs.entry(a).or_default().push(alt);
        }
        for (a, alts) in by_lhs {
            writeln!(f, "{a} -> {} ;", alts.join(" | "))?;
        }
        Ok(())
    }
}

/// Parses a grammar body over the letters `sigma`.
pub fn parse_cfg(text: &str, sigma: &BTreeSet<Label>) -> Result<Cfg> {
    parse_cfg_at(text, sigma, 1)
}

/// [`parse_cfg`] with line numbers in errors counted from `first_line`.
pub(crate) fn parse_cfg_at(text: &str, sigma: &BTreeSet<Label>, first_line: usize) -> Result<Cfg> {
    // Strip comments, keep line numbers of each statement's start.
    let mut stmts: Vec<(usize, String)> = Vec::new();
    let mut cur = String::new();
    let mut cur_line = first_line;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("");
        for ch in line.chars() {
            if ch == ';' {
                if !cur.trim().is_empty() {
                    stmts.push((cur_line, cur.trim().to_string()));
                }
                cur.clear();
            } else {
                if cur.trim().is_empty() && !ch.is_whitespace() {
                    cur_line = first_line + i;
                }
                cur.push(ch);
            }
        }
        cur.push(' ');
    }
    if !cur.trim().is_empty() {
        stmts.push((cur_line, cur.trim().to_string()));
    }
    let mut start = None;
    let mut raw_rules: Vec<(usize, String, Vec<Vec<String>>)> = Vec::new();
    for (line, st) in stmts {
        if let Some(rest) = st.strip_prefix("start ") {
            let s = rest.trim();
            if !is_ident(s) {
                return Err(Error::parse(line, format!("bad start symbol `{s}`")));
            }
            start = Some(s.to_string());
            continue;
        }
        let (lhs, rhs) = st.split_once("->").ok_or_else(|| Error::parse(line, format!("expected `->` in `{st}`")))?;
        let lhs = lhs.trim();
        if !is_ident(lhs) {
            return Err(Error::parse(line, format!("bad nonterminal `{lhs}`")));
        }
        let mut alts = Vec::new();
        for alt in rhs.split('|') {
            let syms: Vec<String> = alt.split_whitespace().map(str::to_string).collect();
            if syms.is_empty() {
                return Err(Error::parse(line, "empty alternative; write `eps`"));
            }
            if let Some(s) = syms.iter().find(|s| !is_ident(s)) {
                return Err(Error::parse(line, format!("bad symbol `{s}`")));
            }
            alts.push(if syms == ["eps"] { Vec::new() } else { syms });
        }
        raw_rules.push((line, lhs.to_string(), alts));
    }
    let nts: BTreeSet<String> = raw_rules.iter().map(|(_, a, _)| a.clone()).collect();
    let start = start.or_else(|| raw_rules.first().map(|(_, a, _)| a.clone())).ok_or_else(|| Error::parse(first_line, "grammar has no rules and no start symbol"))?;
    let mut productions = Vec::new();
    for (_, lhs, alts) in raw_rules {
        for alt in alts {
            let rhs = alt
                .into_iter()
                .map(|s| {
                    if nts.contains(&s) {
                        Ok(Symbol::N(s))
                    } else if sigma.contains(&Label::from(s.as_str())) {
                        Ok(Symbol::T(Label::from(s.as_str())))
                    } else if s == "eps" {
                        Err(Error::Invalid("`eps` must stand alone in an alternative".into()))
                    } else {
                        Err(Error::UndeclaredSymbol(s))
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            productions.push((lhs.clone(), rhs));
        }
    }
    Cfg::new(sigma.clone(), productions, start)
}

/// Right-hand side of a binary production.
#[derive(Clone, Debug, PartialEq, Eq)]
enum Rhs {
    Eps,
    Letter(usize),
    Unit(usize),
    Pair(usize, usize),
}

/// Binary normal form: every rule has at most two nonterminals, or one
/// letter, on its right-hand side. Letters are indices into `letters`.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Binary {
    letters: Vec<Label>,
    n: usize,
    start: usize,
    rules: Vec<(usize, Rhs)>,
    nullable: Vec<bool>,
}

impl Binary {
    fn new(nts: &BTreeSet<String>, terminals: &BTreeSet<Label>, prods: &[(String, Vec<Symbol>)], start: &str) -> Binary {
        let letters: Vec<Label> = terminals.iter().cloned().collect();
        let mut ids: HashMap<&str, usize> = nts.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
        let mut n = ids.len();
        let mut rules = Vec::new();
        let mut letter_nt: HashMap<usize, usize> = HashMap::new();
        let start = ids[start];
        let fresh = |n: &mut usize| {
            *n += 1;
            *n - 1
        };
        for (lhs, rhs) in prods {
            let a = ids[lhs.as_str()];
            match rhs.as_slice() {
                [] => rules.push((a, Rhs::Eps)),
                [Symbol::T(t)] => rules.push((a, Rhs::Letter(letters.iter().position(|l| l == t).expect("declared letter")))),
                [Symbol::N(b)] => rules.push((a, Rhs::Unit(ids[b.as_str()]))),
                _ => {
                    let mut syms = Vec::with_capacity(rhs.len());
                    for s in rhs {
                        syms.push(match s {
                            Symbol::N(b) => ids[b.as_str()],
                            Symbol::T(t) => {
                                let c = letters.iter().position(|l| l == t).expect("declared letter");
                                *letter_nt.entry(c).or_insert_with(|| {
                                    let x = fresh(&mut n);
                                    rules.push((x, Rhs::Letter(c)));
                                    x
                                })
                            }
                        });
                    }
                    let mut head = a;
                    for i in 0..syms.len() - 2 {
                        let next = fresh(&mut n);
                        rules.push((head, Rhs::Pair(syms[i], next)));
                        head = next;
                    }
                    rules.push((head, Rhs::Pair(syms[syms.len() - 2], syms[syms.len() - 1])));
                }
            }
        }
        ids.clear();
        let mut nullable = vec![false; n];
        loop {
            let mut changed = false;
            for (a, r) in &rules {
                let null = match r {
                    Rhs::Eps => true,
                    Rhs::Letter(_) => false,
                    Rhs::Unit(b) => nullable[*b],
                    Rhs::Pair(b, c) => nullable[*b] && nullable[*c],
                };
                if null && !nullable[*a] {
                    nullable[*a] = true;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        Binary { letters, n, start, rules, nullable }
    }

    fn cyk(&self, w: &[usize]) -> bool {
        let len = w.len();
        if len == 0 {
            return self.nullable[self.start];
        }
        // table[i][l - 1]: nonterminals deriving w[i..i + l].
        let mut table: Vec<Vec<Vec<bool>>> = vec![vec![Vec::new(); len]; len];
        for l in 1..=len {
            for i in 0..=len - l {
                let mut cell = vec![false; self.n];
                for (a, r) in &self.rules {
                    match r {
                        Rhs::Letter(c) if l == 1 && w[i] == *c => cell[*a] = true,
                        Rhs::Pair(b, c) => {
                            for k in 1..l {
                                if table[i][k - 1][*b] && table[i + k][l - k - 1][*c] {
                                    cell[*a] = true;
                                    break;
                                }
                            }
                        }
                        _ => {}
                    }
                }
                // Closure under unit rules and pairs with a nullable side.
                loop {
                    let mut changed = false;
                    for (a, r) in &self.rules {
                        if cell[*a] {
                            continue;
                        }
                        let hit = match r {
                            Rhs::Unit(b) => cell[*b],
                            Rhs::Pair(b, c) => (self.nullable[*b] && cell[*c]) || (cell[*b] && self.nullable[*c]),
                            _ => false,
                        };
                        if hit {
                            cell[*a] = true;
                            changed = true;
                        }
                    }
                    if !changed {
                        break;
                    }
                }
                table[i][l - 1] = cell;
            }
        }
        table[0][len - 1][self.start]
    }
}

/// How the shortest word for a triple was derived.
#[derive(Clone, Copy, Debug)]
enum Back {
    Eps,
    Letter(usize),
    Unit(usize),
    Pair(usize, usize, usize),
}

/// A shortest word of `L(g) ∩ L(d)`, if any. Computed on triples
/// `(p, A, q)` meaning that `A` derives a word leading `d` from `p` to `q`,
/// taking the least length to a fixpoint.
pub fn cfg_regular_nonempty(g: &Cfg, d: &Dfa) -> Result<Option<Word>> {
    let b = &g.bin;
    let lmap: Vec<usize> = b
        .letters
        .iter()
        .map(|l| d.label_index(l).ok_or_else(|| Error::AlphabetMismatch(format!("letter `{l}` is not in the automaton alphabet"))))
        .collect::<Result<_>>()?;
    let ns = d.num_states();
    let idx = |p: usize, a: usize, q: usize| (p * b.n + a) * ns + q;
    let mut best: Vec<Option<(usize, Back)>> = vec![None; ns * b.n * ns];
    let improve = |best: &mut Vec<Option<(usize, Back)>>, i: usize, len: usize, how: Back| -> bool {
        match best[i] {
            Some((old, _)) if old <= len => false,
            _ => {
                best[i] = Some((len, how));
                true
            }
        }
    };
    loop {
        let mut changed = false;
        for (a, r) in &b.rules {
            let a = *a;
            match *r {
                Rhs::Eps => {
                    for p in 0..ns {
                        changed |= improve(&mut best, idx(p, a, p), 0, Back::Eps);
                    }
                }
                Rhs::Letter(c) => {
                    for p in 0..ns {
                        changed |= improve(&mut best, idx(p, a, d.step(p, lmap[c])), 1, Back::Letter(c));
                    }
                }
                Rhs::Unit(x) => {
                    for p in 0..ns {
                        for q in 0..ns {
                            if let Some((len, _)) = best[idx(p, x, q)] {
                                changed |= improve(&mut best, idx(p, a, q), len, Back::Unit(x));
                            }
                        }
                    }
                }
                Rhs::Pair(x, y) => {
                    for p in 0..ns {
                        for m in 0..ns {
                            let Some((l1, _)) = best[idx(p, x, m)] else { continue };
                            for q in 0..ns {
                                if let Some((l2, _)) = best[idx(m, y, q)] {
                                    changed |= improve(&mut best, idx(p, a, q), l1 + l2, Back::Pair(x, m, y));
                                }
                            }
                        }
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    let p0 = d.initial();
    let hit = (0..ns).filter(|&q| d.is_final(q)).filter_map(|q| best[idx(p0, b.start, q)].map(|(len, _)| (len, q))).min();
    let Some((_, qf)) = hit else { return Ok(None) };
    fn extract(best: &[Option<(usize, Back)>], idx: &dyn Fn(usize, usize, usize) -> usize, letters: &[Label], p: usize, a: usize, q: usize, out: &mut Word) {
        match best[idx(p, a, q)].expect("derived triple").1 {
            Back::Eps => {}
            Back::Letter(c) => out.push(letters[c].clone()),
            Back::Unit(x) => extract(best, idx, letters, p, x, q, out),
            Back::Pair(x, m, y) => {
                extract(best, idx, letters, p, x, m, out);
                extract(best, idx, letters, m, y, q, out);
            }
        }
    }
    let mut w = Vec::new();
    extract(&best, &idx, &b.letters, p0, b.start, qf, &mut w);
    if !g.accepts(&w) || !d.accepts(&w) {
        return Err(Error::CertificateFailure(format!("intersection witness {w:?} does not verify")));
    }
    Ok(Some(w))
}

/// Automaton whose states are the transition functions of `dfa` reachable
/// from the identity; reading a letter composes its function on the right.
/// Returns the automaton (without final states) and the function of each
/// state.
pub fn function_automaton(dfa: &Dfa) -> (Vec<Vec<usize>>, Vec<Vec<usize>>) {
    let n = dfa.num_states();
    let k = dfa.alphabet().len();
    let id: Vec<usize> = (0..n).collect();
    let mut ids: HashMap<Vec<usize>, usize> = HashMap::from([(id.clone(), 0)]);
    let mut funcs = vec![id];
    let mut delta: Vec<Vec<usize>> = Vec::new();
    let mut queue = VecDeque::from([0usize]);
    while let Some(s) = queue.pop_front() {
        let mut row = Vec::with_capacity(k);
        for c in 0..k {
            let f: Vec<usize> = funcs[s].iter().map(|&x| dfa.step(x, c)).collect();
            let next = *ids.entry(f.clone()).or_insert_with(|| {
                funcs.push(f);
                queue.push_back(funcs.len() - 1);
                funcs.len() - 1
            });
            row.push(next);
        }
        if delta.len() <= s {
            delta.resize(s + 1, Vec::new());
        }
        delta[s] = row;
    }
    (delta, funcs)
}

/// The regularization of `L(g)` relative to the query automaton: all words
/// whose transition function equals that of some word of `L(g)`.
pub fn regularize_view(g: &Cfg, q: &QuerySpec) -> Result<Dfa> {
    let dfa = q.dfa();
    if let Some(t) = g.terminals.iter().find(|t| !q.sigma().contains(*t)) {
        return Err(Error::AlphabetMismatch(format!("grammar letter `{t}` is not in the query alphabet")));
    }
    let (delta, _funcs) = function_automaton(dfa);
    let letters = dfa.alphabet().to_vec();
    let good: Vec<Result<bool>> = (0..delta.len())
        .into_par_iter()
        .map(|f| {
            let finals: Vec<bool> = (0..delta.len()).map(|s| s == f).collect();
            let lf = Dfa::from_table(letters.clone(), delta.clone(), 0, finals)?;
            Ok(cfg_regular_nonempty(g, &lf)?.is_some())
        })
        .collect();
    let finals = good.into_iter().collect::<Result<Vec<bool>>>()?;
    Ok(Dfa::from_table(letters, delta, 0, finals)?.minimize())
}

/// Certain answers for context-free views: the same as for the views
/// replaced by their regularizations.
pub fn cert_cfpq(s: &ViewInstance, q: &QuerySpec, views: &[(Label, Cfg)]) -> Result<BTreeSet<(NodeId, NodeId)>> {
    let regular = regularized_views(q, views)?;
    cert_all(s, &build_template(q, &regular)?)
}

/// The view set made of the regularization of every grammar.
pub fn regularized_views(q: &QuerySpec, views: &[(Label, Cfg)]) -> Result<ViewSpec> {
    let dfas = views.iter().map(|(n, g)| Ok((n.clone(), regularize_view(g, q)?))).collect::<Result<Vec<_>>>()?;
    ViewSpec::from_dfas(q.sigma().clone(), dfas)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::{to_min_dfa, word_transition};
    use crate::automata::parse_regex;
    use crate::graph::word;

    fn ab() -> BTreeSet<Label> {
        ["a", "b"].iter().map(|s| Label::from(*s)).collect()
    }

    fn anbn() -> Cfg {
        parse_cfg("S -> a S b | eps ;", &ab()).unwrap()
    }

    fn dfa(re: &str) -> Dfa {
        to_min_dfa(&parse_regex(re, &ab()).unwrap(), &ab()).unwrap()
    }

    #[test]
    fn anbn_membership() {
        let g = anbn();
        for (w, ok) in [("", true), ("ab", true), ("aabb", true), ("aab", false), ("ba", false), ("abab", false)] {
            assert_eq!(g.accepts(&word(w)), ok, "{w}");
        }
        assert_eq!(g.words_up_to(6).len(), 4);
    }

    #[test]
    fn long_rules_and_units() {
        let g = parse_cfg("S -> A b A | B ; A -> a | eps ; B -> b b b", &ab()).unwrap();
        for (w, ok) in [("b", true), ("ab", true), ("aba", true), ("bbb", true), ("bb", false), ("aab", false)] {
            assert_eq!(g.accepts(&word(w)), ok, "{w}");
        }
    }

    #[test]
    fn empty_grammar() {
        let g = parse_cfg("start S ;", &ab()).unwrap();
        assert!(g.words_up_to(5).is_empty());
        assert_eq!(cfg_regular_nonempty(&g, &dfa("(a | b)*")).unwrap(), None);
    }

    #[test]
    fn undeclared_symbol() {
        assert_eq!(parse_cfg("S -> a c", &ab()).unwrap_err(), Error::UndeclaredSymbol("c".into()));
        assert!(matches!(parse_cfg("S a", &ab()), Err(Error::Parse { .. })));
    }

    #[test]
    fn print_parse_roundtrip() {
        let g = parse_cfg("S -> a S b | eps ; T -> S S", &ab()).unwrap();
        let h = parse_cfg(&g.to_string(), &ab()).unwrap();
        assert_eq!(g.productions.len(), h.productions.len());
        for n in 0..7 {
            for w in crate::automata::enumerate_dfa_words(&dfa("(a | b)*"), n) {
                assert_eq!(g.accepts(&w), h.accepts(&w));
            }
        }
    }

    #[test]
    fn intersections() {
        let g = anbn();
        assert_eq!(cfg_regular_nonempty(&g, &dfa("a b")).unwrap(), Some(word("ab")));
        assert_eq!(cfg_regular_nonempty(&g, &dfa("a a*")).unwrap(), None);
        assert_eq!(cfg_regular_nonempty(&g, &dfa("a a a (a | b)*")).unwrap(), Some(word("aaabbb")));
    }

    #[test]
    fn regularization_of_a_regular_grammar() {
        let sigma: BTreeSet<Label> = [Label::from("a")].into();
        let g = parse_cfg("S -> a a a", &sigma).unwrap();
        let q = QuerySpec::parse(&["a"], "a a a a a").unwrap();
        let lv = regularize_view(&g, &q).unwrap();
        assert!(lv.accepts(&word("aaa")));
        let f3 = word_transition(q.dfa(), &word("aaa")).unwrap();
        for w in crate::automata::enumerate_dfa_words(&lv, 8) {
            assert_eq!(word_transition(q.dfa(), &w).unwrap(), f3);
        }
    }

    #[test]
    fn regularization_of_anbn() {
        let g = anbn();
        let q = QuerySpec::parse(&["a", "b"], "(a b)*").unwrap();
        let lv = regularize_view(&g, &q).unwrap();
        assert!(lv.accepts(&word("ab")));
        let fs: BTreeSet<_> = g.words_up_to(8).iter().map(|w| word_transition(q.dfa(), w).unwrap()).collect();
        for w in crate::automata::enumerate_dfa_words(&dfa("(a | b)*"), 8) {
            assert_eq!(lv.accepts(&w), fs.contains(&word_transition(q.dfa(), &w).unwrap()), "{w:?}");
        }
        let empty = parse_cfg("start S", &ab()).unwrap();
        assert!(crate::automata::enumerate_dfa_words(&regularize_view(&empty, &q).unwrap(), 8).is_empty());
    }

    #[test]
    fn cert_for_anbn_view_matches_bounded_search() {
        use crate::oracle::{brute_cert_cfg_bounded, BruteCert};
        let q = QuerySpec::parse(&["a", "b"], "(a b)*").unwrap();
        let views = vec![(Label::from("V"), anbn())];
        let s = crate::graph::GraphDb::from_edges([("x", "V", "y")]);
        let certain = cert_cfpq(&s, &q, &views).unwrap();
        for u in s.nodes() {
            for v in s.nodes() {
                let r = brute_cert_cfg_bounded(&s, u, v, &q, &views, 6, 5_000_000).unwrap();
                assert_eq!(certain.contains(&(u.clone(), v.clone())), matches!(r, BruteCert::NoneFound { .. }), "{u} {v}");
            }
        }
    }

    #[test]
    fn regular_grammars_match_regular_views() {
        use crate::oracle::{fixture, random_db, FixtureId};
        use crate::rpq::apply_view;
        let f = fixture(FixtureId::Ex1);
        let sigma = f.query.sigma().clone();
        let views = vec![
            (Label::from("V1"), parse_cfg("S -> a a a", &sigma).unwrap()),
            (Label::from("V2"), parse_cfg("S -> a a a a", &sigma).unwrap()),
        ];
        let t = build_template(&f.query, &f.views).unwrap();
        let letters: Vec<Label> = sigma.iter().cloned().collect();
        for seed in 0..10 {
            let s = apply_view(&random_db(&letters, 4, 0.3, seed), &f.views, true).unwrap();
            assert_eq!(cert_cfpq(&s, &f.query, &views).unwrap(), cert_all(&s, &t).unwrap());
        }
    }
}
