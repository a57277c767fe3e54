//! A context-free view `a^n b^n` replaced by a regular view with the same
//! certain answers relative to `(a b)*`.

use rpqrewrite::automata::{enumerate_dfa_words, Automaton};
use rpqrewrite::cfpq::{cert_cfpq, regularize_view};
use rpqrewrite::graph::{format_word, GraphDb};
use rpqrewrite::specfile::parse_spec;

const SPEC: &str = "alphabet a b\ncfgview G {\n  S -> a S b | eps ;\n}\nquery Q = (a b)*\n";

fn main() -> rpqrewrite::Result<()> {
    let spec = parse_spec(SPEC)?;
    let q = spec.query()?;
    let (name, g) = &spec.grammars()[0];
    let dfa = regularize_view(g, q)?;
    println!("regularized {name}: {} states", dfa.num_states());
    let words: Vec<String> = enumerate_dfa_words(&dfa, 4).iter().map(|w| format_word(w)).collect();
    println!("words up to length 4: {}", words.join(" "));

    let s = GraphDb::from_edges([("u", "G", "v"), ("v", "G", "w")]);
    println!("certain answers: {:?}", cert_cfpq(&s, q, &spec.grammars())?);
    Ok(())
}
