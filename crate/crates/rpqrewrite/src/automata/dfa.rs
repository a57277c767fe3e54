use super::nfa::Nfa;
use super::regex::RegexAst;
use crate::error::{Error, Result};
use crate::graph::io::strip_comment;
use crate::graph::Label;
use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

/// Deterministic transition systems over a sorted label alphabet.
pub trait Automaton {
    fn alphabet(&self) -> &[Label];
    fn num_states(&self) -> usize;
    fn initial(&self) -> usize;
    fn step(&self, state: usize, label: usize) -> usize;

    fn label_index(&self, l: &Label) -> Option<usize> {
        self.alphabet().binary_search(l).ok()
    }

    fn run_from(&self, state: usize, w: &[Label]) -> Result<usize> {
        let mut s = state;
        for l in w {
            let li = self.label_index(l).ok_or_else(|| Error::UnknownLabel(l.to_string()))?;
            s = self.step(s, li);
        }
        Ok(s)
    }
}

/// Complete DFA. States are `0..n`; after [`Dfa::canonical`] the initial
/// state is 0 and the rest are numbered in breadth-first order following
/// the sorted alphabet.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Dfa {
    alphabet: Vec<Label>,
    delta: Vec<Vec<usize>>,
    initial: usize,
    finals: Vec<bool>,
}

impl Automaton for Dfa {
    fn alphabet(&self) -> &[Label] {
        &self.alphabet
    }
    fn num_states(&self) -> usize {
        self.delta.len()
    }
    fn initial(&self) -> usize {
        self.initial
    }
    fn step(&self, state: usize, label: usize) -> usize {
        self.delta[state][label]
    }
}

impl Dfa {
    /// Builds a DFA from an explicit table. `alphabet` must be sorted and
    /// every row must have one entry per label.
    pub fn from_table(alphabet: Vec<Label>, delta: Vec<Vec<usize>>, initial: usize, finals: Vec<bool>) -> Result<Self> {
        let n = delta.len();
        if !alphabet.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::Invalid("alphabet must be sorted and duplicate-free".into()));
        }
        if initial >= n || finals.len() != n {
            return Err(Error::UnknownState(initial));
        }
        for row in &delta {
            if row.len() != alphabet.len() {
                return Err(Error::Invalid("transition row has wrong width".into()));
            }
            if let Some(&bad) = row.iter().find(|&&t| t >= n) {
                return Err(Error::UnknownState(bad));
            }
        }
        Ok(Dfa { alphabet, delta, initial, finals })
    }

    pub fn is_final(&self, s: usize) -> bool {
        self.finals[s]
    }

    pub fn finals(&self) -> BTreeSet<usize> {
        (0..self.delta.len()).filter(|&s| self.finals[s]).collect()
    }

    pub fn accepts(&self, w: &[Label]) -> bool {
        self.run_from(self.initial, w).map(|s| self.finals[s]).unwrap_or(false)
    }

    pub fn transitions(&self) -> &[Vec<usize>] {
        &self.delta
    }

    /// States from which no final state is reachable.
    pub fn dead_states(&self) -> BTreeSet<usize> {
        let n = self.delta.len();
        let mut rev = vec![Vec::new(); n];
        for (s, row) in self.delta.iter().enumerate() {
            for &t in row {
                rev[t].push(s);
            }
        }
        let mut live = vec![false; n];
        let mut stack: Vec<usize> = (0..n).filter(|&s| self.finals[s]).collect();
        for &s in &stack {
            live[s] = true;
        }
        while let Some(s) = stack.pop() {
            for &p in &rev[s] {
                if !live[p] {
                    live[p] = true;
                    stack.push(p);
                }
            }
        }
        (0..n).filter(|&s| !live[s]).collect()
    }

    /// Subset construction; the empty subset becomes the dead state.
    pub fn determinize(nfa: &Nfa) -> Dfa {
        let start = nfa.eps_closure(&BTreeSet::from([nfa.initial]));
        let mut ids: HashMap<BTreeSet<usize>, usize> = HashMap::new();
        let mut sets = vec![start.clone()];
        ids.insert(start, 0);
        let mut delta: Vec<Vec<usize>> = Vec::new();
        let mut i = 0;
        while i < sets.len() {
            let mut row = Vec::with_capacity(nfa.alphabet.len());
            for li in 0..nfa.alphabet.len() {
                let next = nfa.step(&sets[i], li);
                let id = *ids.entry(next.clone()).or_insert_with(|| {
                    sets.push(next);
                    sets.len() - 1
                });
                row.push(id);
            }
            delta.push(row);
            i += 1;
        }
        let finals = sets.iter().map(|s| s.contains(&nfa.accept)).collect();
        Dfa { alphabet: nfa.alphabet.clone(), delta, initial: 0, finals }
    }

    /// Hopcroft partition refinement followed by canonical renumbering.
    pub fn minimize(&self) -> Dfa {
        let reach = self.canonical();
        let n = reach.delta.len();
        let k = reach.alphabet.len();
        let mut inv: Vec<Vec<Vec<usize>>> = vec![vec![Vec::new(); n]; k];
        for s in 0..n {
            for c in 0..k {
                inv[c][reach.delta[s][c]].push(s);
            }
        }
        let mut block_of = vec![0usize; n];
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        let (fin, non): (Vec<usize>, Vec<usize>) = (0..n).partition(|&s| reach.finals[s]);
        for b in [fin, non] {
            if !b.is_empty() {
                for &s in &b {
                    block_of[s] = blocks.len();
                }
                blocks.push(b);
            }
        }
        let mut in_work = vec![true; blocks.len()];
        let mut work: Vec<usize> = (0..blocks.len()).collect();
        while let Some(a) = work.pop() {
            in_work[a] = false;
            let splitter = blocks[a].clone();
            for c in 0..k {
                let mut x = vec![false; n];
                let mut touched: BTreeSet<usize> = BTreeSet::new();
                for &t in &splitter {
                    for &s in &inv[c][t] {
                        x[s] = true;
                        touched.insert(block_of[s]);
                    }
                }
                for y in touched {
                    let (inside, outside): (Vec<usize>, Vec<usize>) = blocks[y].iter().partition(|&&s| x[s]);
                    if inside.is_empty() || outside.is_empty() {
                        continue;
                    }
                    let new_id = blocks.len();
                    for &s in &outside {
                        block_of[s] = new_id;
                    }
                    blocks[y] = inside;
                    blocks.push(outside);
                    in_work.push(false);
                    if in_work[y] {
                        in_work[new_id] = true;
                        work.push(new_id);
                    } else {
                        let smaller = if blocks[y].len() <= blocks[new_id].len() { y } else { new_id };
                        in_work[smaller] = true;
                        work.push(smaller);
                    }
                }
            }
        }
        let delta = blocks.iter().map(|b| (0..k).map(|c| block_of[reach.delta[b[0]][c]]).collect()).collect();
        let finals = blocks.iter().map(|b| reach.finals[b[0]]).collect();
        let q = Dfa { alphabet: reach.alphabet.clone(), delta, initial: block_of[reach.initial], finals };
        q.canonical()
    }

    /// Renumbers reachable states breadth-first from the initial state,
    /// following labels in sorted order; unreachable states are dropped.
    pub fn canonical(&self) -> Dfa {
        let mut order = vec![usize::MAX; self.delta.len()];
        let mut seq = vec![self.initial];
        order[self.initial] = 0;
        let mut q = VecDeque::from([self.initial]);
        while let Some(s) = q.pop_front() {
            for &t in &self.delta[s] {
                if order[t] == usize::MAX {
                    order[t] = seq.len();
                    seq.push(t);
                    q.push_back(t);
                }
            }
        }
        Dfa {
            alphabet: self.alphabet.clone(),
            delta: seq.iter().map(|&s| self.delta[s].iter().map(|&t| order[t]).collect()).collect(),
            initial: 0,
            finals: seq.iter().map(|&s| self.finals[s]).collect(),
        }
    }

    /// Same automaton with a different set of accepting states.
    pub fn with_finals(&self, finals: &BTreeSet<usize>) -> Dfa {
        Dfa {
            alphabet: self.alphabet.clone(),
            delta: self.delta.clone(),
            initial: self.initial,
            finals: (0..self.delta.len()).map(|s| finals.contains(&s)).collect(),
        }
    }

    pub fn complement(&self) -> Dfa {
        let mut d = self.clone();
        d.finals.iter_mut().for_each(|f| *f = !*f);
        d
    }

    /// Text dump: `initial s`, `final s` lines, then `s label t` lines.
    pub fn dump(&self) -> String {
        let mut out = format!("initial {}\n", self.initial);
        for s in self.finals() {
            out.push_str(&format!("final {s}\n"));
        }
        for (s, row) in self.delta.iter().enumerate() {
            for (c, &t) in row.iter().enumerate() {
                out.push_str(&format!("{s} {} {t}\n", self.alphabet[c]));
            }
        }
        out
    }

    /// Reads a dump. The alphabet is the set of labels mentioned; missing
    /// transitions go to an added dead state.
    pub fn parse_dump(text: &str) -> Result<Dfa> {
        let mut initial = None;
        let mut finals = BTreeSet::new();
        let mut trans: BTreeMap<(usize, Label), usize> = BTreeMap::new();
        let mut max_state = 0usize;
        let num = |ln: usize, s: &str| s.parse::<usize>().map_err(|_| Error::parse(ln, format!("bad state `{s}`")));
        for (i, raw) in text.lines().enumerate() {
            let ln = i + 1;
            let toks: Vec<&str> = strip_comment(raw).split_whitespace().collect();
            match toks.as_slice() {
                [] => {}
                ["initial", s] => {
                    let s = num(ln, s)?;
                    max_state = max_state.max(s);
                    initial = Some(s);
                }
                ["final", s] => {
                    let s = num(ln, s)?;
                    max_state = max_state.max(s);
                    finals.insert(s);
                }
                [s, l, t] => {
                    let (s, t) = (num(ln, s)?, num(ln, t)?);
                    max_state = max_state.max(s).max(t);
                    if trans.insert((s, Label::from(*l)), t).is_some_and(|old| old != t) {
                        return Err(Error::parse(ln, "nondeterministic transition"));
                    }
                }
                _ => return Err(Error::parse(ln, "expected `initial s`, `final s` or `s label t`")),
            }
        }
        let initial = initial.ok_or_else(|| Error::parse(0, "missing `initial` line"))?;
        let alphabet: Vec<Label> = trans.keys().map(|(_, l)| l.clone()).collect::<BTreeSet<_>>().into_iter().collect();
        let mut n = max_state + 1;
        let complete = (0..n).all(|s| alphabet.iter().all(|l| trans.contains_key(&(s, l.clone()))));
        let dead = if complete { None } else { n += 1; Some(n - 1) };
        let delta = (0..n)
            .map(|s| alphabet.iter().map(|l| trans.get(&(s, l.clone())).copied().unwrap_or_else(|| dead.unwrap())).collect())
            .collect();
        Ok(Dfa { alphabet, delta, initial, finals: (0..n).map(|s| finals.contains(&s)).collect() })
    }
}

/// Thompson NFA, subset construction, Hopcroft minimization, canonical
/// numbering. The result is complete over `alphabet` (a dead state is
/// present whenever some word has no continuation into the language).
pub fn to_min_dfa(ast: &RegexAst, alphabet: &BTreeSet<Label>) -> Result<Dfa> {
    let sigma: Vec<Label> = alphabet.iter().cloned().collect();
    if let Some(bad) = ast.symbols().into_iter().find(|s| !alphabet.contains(s)) {
        return Err(Error::UnknownSymbol(bad.to_string()));
    }
    Ok(Dfa::determinize(&Nfa::thompson(ast, &sigma)).minimize())
}
