//! Thompson construction.

use super::regex::RegexAst;
use crate::graph::Label;
use std::collections::{BTreeSet, HashMap};

/// An ε-NFA over label indices of a fixed alphabet.
#[derive(Clone, Debug)]
pub struct Nfa {
    pub alphabet: Vec<Label>,
    pub eps: Vec<Vec<usize>>,
    /// `trans[s]`: (label index, target) pairs.
    pub trans: Vec<Vec<(usize, usize)>>,
    pub initial: usize,
    pub accept: usize,
}

impl Nfa {
    /// Builds the Thompson automaton. Symbols outside `alphabet` produce no
    /// transition (the parser already rejects them).
    pub fn thompson(ast: &RegexAst, alphabet: &[Label]) -> Self {
        let lpos: HashMap<&Label, usize> = alphabet.iter().enumerate().map(|(i, l)| (l, i)).collect();
        let mut b = Builder { eps: Vec::new(), trans: Vec::new(), lpos };
        let (i, f) = b.build(ast);
        Nfa { alphabet: alphabet.to_vec(), eps: b.eps, trans: b.trans, initial: i, accept: f }
    }

    pub fn num_states(&self) -> usize {
        self.eps.len()
    }

    pub fn eps_closure(&self, set: &BTreeSet<usize>) -> BTreeSet<usize> {
        let mut out = set.clone();
        let mut stack: Vec<usize> = set.iter().copied().collect();
        while let Some(s) = stack.pop() {
            for &t in &self.eps[s] {
                if out.insert(t) {
                    stack.push(t);
                }
            }
        }
        out
    }

    pub fn step(&self, set: &BTreeSet<usize>, label: usize) -> BTreeSet<usize> {
        let moved: BTreeSet<usize> = set
            .iter()
            .flat_map(|&s| self.trans[s].iter().filter(|(l, _)| *l == label).map(|&(_, t)| t))
            .collect();
        self.eps_closure(&moved)
    }

    pub fn accepts(&self, w: &[Label]) -> bool {
        let mut cur = self.eps_closure(&BTreeSet::from([self.initial]));
        for l in w {
            let Some(li) = self.alphabet.iter().position(|a| a == l) else { return false };
            cur = self.step(&cur, li);
        }
        cur.contains(&self.accept)
    }
}

struct Builder<'a> {
    eps: Vec<Vec<usize>>,
    trans: Vec<Vec<(usize, usize)>>,
    lpos: HashMap<&'a Label, usize>,
}

impl Builder<'_> {
    fn state(&mut self) -> usize {
        self.eps.push(Vec::new());
        self.trans.push(Vec::new());
        self.eps.len() - 1
    }

    fn build(&mut self, ast: &RegexAst) -> (usize, usize) {
        match ast {
            RegexAst::Epsilon => {
                let (i, f) = (self.state(), self.state());
                self.eps[i].push(f);
                (i, f)
            }
            RegexAst::Symbol(l) => {
                let (i, f) = (self.state(), self.state());
                if let Some(&li) = self.lpos.get(l) {
                    self.trans[i].push((li, f));
                }
                (i, f)
            }
            RegexAst::Concat(parts) => {
                let mut first = None;
                let mut last: Option<usize> = None;
                for p in parts {
                    let (i, f) = self.build(p);
                    match last {
                        Some(prev) => self.eps[prev].push(i),
                        None => first = Some(i),
                    }
                    last = Some(f);
                }
                match (first, last) {
                    (Some(i), Some(f)) => (i, f),
                    _ => self.build(&RegexAst::Epsilon),
                }
            }
            RegexAst::Alt(parts) => {
                let (i, f) = (self.state(), self.state());
                for p in parts {
                    let (pi, pf) = self.build(p);
                    self.eps[i].push(pi);
                    self.eps[pf].push(f);
                }
                (i, f)
            }
            RegexAst::Star(a) | RegexAst::Plus(a) | RegexAst::Opt(a) => {
                let (i, f) = (self.state(), self.state());
                let (ai, af) = self.build(a);
                self.eps[i].push(ai);
                self.eps[af].push(f);
                if !matches!(ast, RegexAst::Plus(_)) {
                    self.eps[i].push(f);
                }
                if !matches!(ast, RegexAst::Opt(_)) {
                    self.eps[af].push(ai);
                }
                (i, f)
            }
        }
    }
}
