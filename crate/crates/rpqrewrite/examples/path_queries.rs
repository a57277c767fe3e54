//! Query answers and view images on the first example: the six-node path
//! answers `(x0, x5)`, a second database has a larger view image but no
//! answer.

use rpqrewrite::graph::io::serialize_graph;
use rpqrewrite::oracle::{figure1_d, figure1_d_prime, fixture, FixtureId};
use rpqrewrite::rpq::{apply_view, rpq_eval};

fn main() -> rpqrewrite::Result<()> {
    let f = fixture(FixtureId::Ex1);
    let (d, d2) = (figure1_d(), figure1_d_prime());
    println!("Q(D)  = {:?}", rpq_eval(&d, &f.query)?);
    println!("Q(D') = {:?}", rpq_eval(&d2, &f.query)?);
    let (vd, vd2) = (apply_view(&d, &f.views, false)?, apply_view(&d2, &f.views, false)?);
    print!("V(D):\n{}", serialize_graph(&vd));
    println!("V(D) edges contained in V(D'): {}", vd.edges_subset_of(&vd2));
    Ok(())
}
