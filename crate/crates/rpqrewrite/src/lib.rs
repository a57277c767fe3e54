//! Regular path queries answered from view images.
//!
//! A [`rpq::ViewSpec`] fixes a query and views over one alphabet. From a view
//! instance the crate computes certain answers ([`template`]), pebble-game
//! rewritings ([`pebble`], [`datalog`]) and preimage rewritings
//! ([`preimage`]), and decides monotone determinacy ([`decision`]).
//! Context-free views are handled in [`cfpq`]. [`oracle`] holds the
//! brute-force reference implementations used by the tests.

pub mod automata;
pub mod cfpq;
pub mod cli;
pub mod datalog;
pub mod decision;
pub mod error;
pub mod graph;
pub mod oracle;
pub mod rpq;
pub mod specfile;
pub mod pebble;
pub mod preimage;
pub mod template;

pub use error::{Error, Result};
