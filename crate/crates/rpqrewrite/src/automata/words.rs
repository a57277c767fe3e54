use super::dfa::{to_min_dfa, Automaton, Dfa};
use super::regex::RegexAst;
use crate::error::{Error, Result};
use crate::graph::{Label, Word};
use std::collections::{BTreeSet, HashMap, VecDeque};

/// The state-to-state function induced by a word.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TransitionFn(pub Vec<usize>);

impl TransitionFn {
    pub fn identity(n: usize) -> Self {
        TransitionFn((0..n).collect())
    }

    pub fn apply(&self, s: usize) -> usize {
        self.0[s]
    }

    /// `self` followed by `other`.
    pub fn then(&self, other: &TransitionFn) -> TransitionFn {
        TransitionFn(self.0.iter().map(|&s| other.0[s]).collect())
    }
}

pub fn word_transition<A: Automaton + ?Sized>(a: &A, w: &[Label]) -> Result<TransitionFn> {
    let mut f = TransitionFn::identity(a.num_states());
    for l in w {
        let li = a.label_index(l).ok_or_else(|| Error::UnknownLabel(l.to_string()))?;
        f = TransitionFn(f.0.iter().map(|&s| a.step(s, li)).collect());
    }
    Ok(f)
}

/// Image of a state set under a word.
pub fn lifted_set_transition(dfa: &Dfa, set: &BTreeSet<usize>, w: &[Label]) -> Result<BTreeSet<usize>> {
    if let Some(&bad) = set.iter().find(|&&s| s >= dfa.num_states()) {
        return Err(Error::UnknownState(bad));
    }
    set.iter().map(|&s| dfa.run_from(s, w)).collect()
}

/// All words of length at most `max_len` accepted by `dfa`, ordered by
/// length and then lexicographically.
pub fn enumerate_dfa_words(dfa: &Dfa, max_len: usize) -> Vec<Word> {
    let dead = dfa.dead_states();
    let mut out = Vec::new();
    let mut layer: Vec<(usize, Word)> = vec![(dfa.initial(), Vec::new())];
    for len in 0..=max_len {
        for (s, w) in &layer {
            if dfa.is_final(*s) {
                out.push(w.clone());
            }
        }
        if len == max_len {
            break;
        }
        let mut next = Vec::new();
        for (s, w) in &layer {
            for (c, l) in dfa.alphabet().iter().enumerate() {
                let t = dfa.step(*s, c);
                if !dead.contains(&t) {
                    let mut w2 = w.clone();
                    w2.push(l.clone());
                    next.push((t, w2));
                }
            }
        }
        layer = next;
    }
    out
}

pub fn enumerate_words(ast: &RegexAst, alphabet: &BTreeSet<Label>, max_len: usize) -> Result<Vec<Word>> {
    Ok(enumerate_dfa_words(&to_min_dfa(ast, alphabet)?, max_len))
}

/// Shortest word in both languages (lexicographically least among the
/// shortest), by breadth-first search of the product.
pub fn nonempty_intersection(d1: &Dfa, d2: &Dfa) -> Result<Option<Word>> {
    if d1.alphabet() != d2.alphabet() {
        return Err(Error::AlphabetMismatch("intersection of automata over different alphabets".into()));
    }
    let start = (d1.initial(), d2.initial());
    let mut parent: HashMap<(usize, usize), Option<((usize, usize), usize)>> = HashMap::from([(start, None)]);
    let mut q = VecDeque::from([start]);
    while let Some(p) = q.pop_front() {
        if d1.is_final(p.0) && d2.is_final(p.1) {
            let mut w = Vec::new();
            let mut cur = p;
            while let Some(Some((prev, c))) = parent.get(&cur) {
                w.push(d1.alphabet()[*c].clone());
                cur = *prev;
            }
            w.reverse();
            return Ok(Some(w));
        }
        for c in 0..d1.alphabet().len() {
            let n = (d1.step(p.0, c), d2.step(p.1, c));
            if let std::collections::hash_map::Entry::Vacant(e) = parent.entry(n) {
                e.insert(Some((p, c)));
                q.push_back(n);
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::regex::parse_regex;
    use crate::graph::word;

    fn sigma(ls: &[&str]) -> BTreeSet<Label> {
        ls.iter().map(|l| Label::from(*l)).collect()
    }

    #[test]
    fn lifted_transition_on_a5() {
        let s = sigma(&["a"]);
        let d = to_min_dfa(&parse_regex("a a a a a", &s).unwrap(), &s).unwrap();
        assert_eq!(lifted_set_transition(&d, &BTreeSet::from([0]), &word("aaa")).unwrap(), BTreeSet::from([3]));
        assert_eq!(lifted_set_transition(&d, &BTreeSet::from([99]), &word("a")), Err(Error::UnknownState(99)));
    }

    #[test]
    fn enumerates_mod_six_words() {
        let s = sigma(&["a"]);
        let q = parse_regex("a (a a a a a a)* | a a (a a a a a a)*", &s).unwrap();
        let ws = enumerate_words(&q, &s, 8).unwrap();
        let lens: Vec<usize> = ws.iter().map(|w| w.len()).collect();
        assert_eq!(lens, vec![1, 2, 7, 8]);
    }

    #[test]
    fn enumeration_order_is_length_then_lex() {
        let s = sigma(&["a", "b"]);
        let ws = enumerate_words(&parse_regex("(a | b) (a | b)?", &s).unwrap(), &s, 2).unwrap();
        let txt: Vec<String> = ws.iter().map(|w| crate::graph::format_word(w)).collect();
        assert_eq!(txt, ["a", "b", "aa", "ab", "ba", "bb"]);
    }

    #[test]
    fn intersection_witnesses() {
        let s = sigma(&["a", "b"]);
        let d = |re: &str| to_min_dfa(&parse_regex(re, &s).unwrap(), &s).unwrap();
        assert_eq!(nonempty_intersection(&d("a+"), &d("a a a")).unwrap(), Some(word("aaa")));
        assert_eq!(nonempty_intersection(&d("a+"), &d("b")).unwrap(), None);
        assert_eq!(nonempty_intersection(&d("(a | b) b"), &d("(a | b) (a | b)")).unwrap(), Some(word("ab")));
    }

    #[test]
    fn composition_law() {
        let s = sigma(&["a", "b"]);
        let d = to_min_dfa(&parse_regex("(a b)* a?", &s).unwrap(), &s).unwrap();
        let (u, v) = (word("ab"), word("bba"));
        let uv: Vec<Label> = u.iter().chain(&v).cloned().collect();
        assert_eq!(word_transition(&d, &uv).unwrap(), word_transition(&d, &u).unwrap().then(&word_transition(&d, &v).unwrap()));
    }
}
