//! Certain answers through the template: builds the template of the first
//! example, tests `(x0, x5)` on the view image of the path, and turns the
//! homomorphism into a database that contains the instance in its view
//! image without answering the pair.

use rpqrewrite::graph::io::serialize_graph;
use rpqrewrite::graph::NodeId;
use rpqrewrite::oracle::{figure1_d, fixture, FixtureId};
use rpqrewrite::rpq::{apply_view, rpq_eval};
use rpqrewrite::template::{build_template, cert, cert_all, materialize_counterexample, template_core};

fn main() -> rpqrewrite::Result<()> {
    let f = fixture(FixtureId::Ex1);
    let t = build_template(&f.query, &f.views)?;
    let core = template_core(&t);
    println!("template: {} nodes, core: {} nodes", t.num_nodes(), core.num_nodes());

    let s = apply_view(&figure1_d(), &f.views, false)?;
    println!("cert_all = {:?}", cert_all(&s, &core)?);

    let (u, v) = (NodeId::from("x0"), NodeId::from("x5"));
    let verdict = cert(&s, &u, &v, &core)?;
    let hom = verdict.witness_hom.expect("(x0, x5) is not certain");
    let d = materialize_counterexample(&s, &u, &v, &core, &hom, &f.query, &f.views)?;
    print!("counterexample:\n{}", serialize_graph(&d));
    println!("(x0, x5) answered: {}", rpq_eval(&d, &f.query)?.contains(&(u, v)));
    Ok(())
}
