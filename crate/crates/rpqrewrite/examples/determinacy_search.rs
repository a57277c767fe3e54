//! Bounded determinacy checks over all small unary graphs. `a a a a a` is
//! determined by `a a a` and `a a a a`; `a a` is not, and the search
//! returns a pair of databases with equal views and different answers.

use rpqrewrite::decision::{check_determinacy_bounded, check_monotone_pairs_bounded};
use rpqrewrite::oracle::{fixture, FixtureId};
use rpqrewrite::rpq::QuerySpec;

fn main() -> rpqrewrite::Result<()> {
    let f = fixture(FixtureId::Ex1);
    print!("{}", check_determinacy_bounded(&f.query, &f.views, 4)?);
    let q2 = QuerySpec::parse(&["a"], "a a")?;
    print!("{}", check_determinacy_bounded(&q2, &f.views, 4)?);
    print!("{}", check_monotone_pairs_bounded(&f.query, &f.views, 3)?);
    Ok(())
}
