//! Deciding whether a view instance is a view image, on the
//! 3-colourability encoding.

use rpqrewrite::graph::GraphDb;
use rpqrewrite::preimage::{find_preimage, gen_3col, PreimageResult};

fn cycle(n: usize) -> GraphDb {
    GraphDb::from_edges((0..n).map(|i| (format!("n{i}"), "e", format!("n{}", (i + 1) % n))))
}

fn complete(n: usize) -> GraphDb {
    GraphDb::from_edges((0..n).flat_map(|i| (i + 1..n).map(move |j| (format!("n{i}"), "e", format!("n{j}")))))
}

fn main() -> rpqrewrite::Result<()> {
    for (name, g) in [("C5", cycle(5)), ("K3", complete(3)), ("K4", complete(4))] {
        let (v, s) = gen_3col(&g)?;
        match find_preimage(&s, &v, g.num_nodes())? {
            PreimageResult::Found(d) => {
                let colours: Vec<String> = d.edges().iter().filter(|e| e.src < e.dst).map(|e| format!("{}-{}:{}", e.src, e.dst, e.label)).collect();
                println!("{name}: colourable, {}", colours.join(" "));
            }
            PreimageResult::NotFoundWithinBound { .. } => println!("{name}: not colourable"),
        }
    }
    Ok(())
}
