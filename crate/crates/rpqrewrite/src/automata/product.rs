use super::dfa::{Automaton, Dfa};
use crate::error::{Error, Result};
use crate::graph::Label;
use std::collections::{HashMap, VecDeque};

/// Lockstep product of the view automata, restricted to reachable states.
///
/// The number of states is written `n_of_v`; it bounds the number of
/// distinct view behaviours a prefix of a path can have.
#[derive(Clone, Debug)]
pub struct ProductDfa {
    alphabet: Vec<Label>,
    /// Component states of each product state.
    pub tuples: Vec<Vec<usize>>,
    delta: Vec<Vec<usize>>,
    /// `view_finals[i][s]`: component `i` accepts in product state `s`.
    pub view_finals: Vec<Vec<bool>>,
}

impl Automaton for ProductDfa {
    fn alphabet(&self) -> &[Label] {
        &self.alphabet
    }
    fn num_states(&self) -> usize {
        self.delta.len()
    }
    fn initial(&self) -> usize {
        0
    }
    fn step(&self, state: usize, label: usize) -> usize {
        self.delta[state][label]
    }
}

impl ProductDfa {
    pub fn n_of_v(&self) -> usize {
        self.delta.len()
    }

    pub fn is_final_for(&self, view: usize, state: usize) -> bool {
        self.view_finals[view][state]
    }
}

pub fn build_view_product(dfas: &[Dfa]) -> Result<ProductDfa> {
    let first = dfas.first().ok_or(Error::EmptyViewSet)?;
    let alphabet = first.alphabet().to_vec();
    if dfas.iter().any(|d| d.alphabet() != alphabet.as_slice()) {
        return Err(Error::AlphabetMismatch("view automata over different alphabets".into()));
    }
    let start: Vec<usize> = dfas.iter().map(|d| d.initial()).collect();
    let mut ids = HashMap::from([(start.clone(), 0usize)]);
    let mut tuples = vec![start];
    let mut delta = Vec::new();
    let mut q = VecDeque::from([0usize]);
    while let Some(s) = q.pop_front() {
        let mut row = Vec::with_capacity(alphabet.len());
        for c in 0..alphabet.len() {
            let next: Vec<usize> = tuples[s].iter().zip(dfas).map(|(&p, d)| d.step(p, c)).collect();
            let id = match ids.get(&next) {
                Some(&id) => id,
                None => {
                    tuples.push(next.clone());
                    ids.insert(next, tuples.len() - 1);
                    q.push_back(tuples.len() - 1);
                    tuples.len() - 1
                }
            };
            row.push(id);
        }
        delta.push(row);
    }
    let view_finals =
        dfas.iter().enumerate().map(|(i, d)| tuples.iter().map(|t| d.is_final(t[i])).collect()).collect();
    Ok(ProductDfa { alphabet, tuples, delta, view_finals })
}
