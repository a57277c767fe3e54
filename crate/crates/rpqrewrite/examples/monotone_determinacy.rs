//! Monotone determinacy of the three examples: the bounded search over
//! query words and the complete bad-word automaton search.

use rpqrewrite::decision::{check_monotone_words, decide_monotone_full, FULL_DECISION_BUDGET};
use rpqrewrite::oracle::{fixture, FixtureId};
use rpqrewrite::template::{build_template, template_core};
use std::time::Instant;

fn main() -> rpqrewrite::Result<()> {
    for id in [FixtureId::Ex1, FixtureId::Ex2, FixtureId::Ex3] {
        let f = fixture(id);
        let t = template_core(&build_template(&f.query, &f.views)?);
        let start = Instant::now();
        let words = check_monotone_words(&f.query, &f.views, &t, 12)?;
        let full = decide_monotone_full(&f.query, &f.views, &t, FULL_DECISION_BUDGET)?;
        println!("{id} ({}):", f.notes);
        println!("  words up to 12: {:?}", words.status);
        println!("  full search:    {:?} {:?}", full.status, full.evidence_word().map(|w| w.len()));
        println!("  {:?}", start.elapsed());
    }
    Ok(())
}
