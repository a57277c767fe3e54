use rpqrewrite::automata::{build_view_product, parse_regex, to_min_dfa, Automaton};
use rpqrewrite::graph::word;
use rpqrewrite::oracle::{fixture, FixtureId};
use rpqrewrite::rpq::sim_classes;

fn main() -> rpqrewrite::Result<()> {
    let sigma = ["a", "b", "c"].into_iter().map(Into::into).collect();
    let ast = parse_regex("a b* a | a c* a", &sigma)?;
    let dfa = to_min_dfa(&ast, &sigma)?;
    println!("minimal DFA of {ast} has {} states", dfa.num_states());
    print!("{}", dfa.dump());

    for id in [FixtureId::Ex1, FixtureId::Ex2, FixtureId::Ex3] {
        let v = fixture(id).views;
        let p = build_view_product(v.dfas())?;
        println!("{id}: N(V) = {}", p.n_of_v());
    }

    // Positions of a path grouped by their view connections to the suffix.
    let v = fixture(FixtureId::Ex1).views;
    let w = word("aaaaaaaaaaaa");
    for k in [0, 4, 8, 12] {
        println!("k = {k:2}: {} classes", sim_classes(&w, &v, k)?.num_classes());
    }
    Ok(())
}
