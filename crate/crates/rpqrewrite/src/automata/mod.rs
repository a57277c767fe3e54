//! Regular expressions and finite automata.
//!
//! Expressions compile through a Thompson NFA and the subset construction
//! into a complete DFA, which is then minimized and renumbered canonically.
//! View automata are combined by [`build_view_product`].

mod dfa;
mod nfa;
mod product;
mod regex;
mod words;

pub use dfa::{to_min_dfa, Automaton, Dfa};
pub use nfa::Nfa;
pub use product::{build_view_product, ProductDfa};
pub use regex::{parse_regex, RegexAst};
pub use words::{
    enumerate_dfa_words, enumerate_words, lifted_set_transition, nonempty_intersection, word_transition,
    TransitionFn,
};
