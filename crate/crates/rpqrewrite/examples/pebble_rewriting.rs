//! The (l, l+1) pebble game as a rewriting for the second example, checked
//! against the query on every path over {a, b, c} up to length 6.

use rpqrewrite::automata::enumerate_words;
use rpqrewrite::automata::RegexAst;
use rpqrewrite::oracle::{figure2_d, figure2_d_prime, fixture, reference_rewriting, FixtureId};
use rpqrewrite::pebble::{default_l, rewrite_eval};
use rpqrewrite::rpq::{apply_view, path_of_word, rpq_eval};
use rpqrewrite::template::{build_template, template_core};

fn main() -> rpqrewrite::Result<()> {
    let f = fixture(FixtureId::Ex2);
    let t = template_core(&build_template(&f.query, &f.views)?);
    println!("core template: {} nodes, default l = {}", t.num_nodes(), default_l(&t, &f.views));

    for (name, d) in [("D", figure2_d()), ("D'", figure2_d_prime())] {
        let s = apply_view(&d, &f.views, false)?;
        println!("{name}: Q = {:?}, game = {:?}", rpq_eval(&d, &f.query)?, rewrite_eval(&s, &t, 1)?);
    }

    let all = RegexAst::Star(Box::new(RegexAst::Alt(f.views.sigma().iter().cloned().map(RegexAst::Symbol).collect())));
    let words = enumerate_words(&all, f.views.sigma(), 6)?;
    let mut bad = 0;
    for w in &words {
        let d = path_of_word(w);
        let s = apply_view(&d, &f.views, false)?;
        let got = rewrite_eval(&s, &t, 1)?;
        let want: std::collections::BTreeSet<_> =
            rpq_eval(&d, &f.query)?.into_iter().filter(|(x, y)| s.contains_node(x) && s.contains_node(y)).collect();
        if got != want || reference_rewriting(FixtureId::Ex2, &s)? != want {
            bad += 1;
        }
    }
    println!("{} paths, {bad} disagreements", words.len());
    Ok(())
}
