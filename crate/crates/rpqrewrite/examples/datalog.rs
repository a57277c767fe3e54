use rpqrewrite::datalog::{datalog_naive_eval, emit_datalog, serialize_datalog};
use rpqrewrite::oracle::{figure2_d, fixture, FixtureId};
use rpqrewrite::pebble::{pebble_solve, GameConfig};
use rpqrewrite::rpq::apply_view;
use rpqrewrite::template::{build_template, template_core};

fn main() -> rpqrewrite::Result<()> {
    let f = fixture(FixtureId::Ex2);
    let t = template_core(&build_template(&f.query, &f.views)?);
    let cfg = GameConfig::new(1, 2)?;
    let p = emit_datalog(&t, cfg)?;
    println!("{} rules, max IDB arity {}, max variables per rule {}", p.rules.len(), p.max_idb_arity(), p.max_rule_vars());
    for line in serialize_datalog(&p).lines().take(6) {
        println!("  {line}");
    }

    let s = apply_view(&figure2_d(), &f.views, false)?;
    let ans = datalog_naive_eval(&p, &s)?;
    println!("goal on V(D): {ans:?}");
    for (x, y) in &ans {
        let r = pebble_solve(&s, x, y, &t, cfg)?;
        println!("  ({x}, {y}): Player 1 wins the (1,2) game: {}", r.player1_wins());
    }
    Ok(())
}
