//! seqmine mines the complete set of sequential patterns from a sequence
//! database under freely composable constraints: minimum frequency,
//! closedness, size bounds, item membership and exclusion, gaps between
//! matched positions, and regular expressions.
//!
//! The engine models mining as constraint satisfaction. A pattern is a row
//! of variables over the alphabet plus an end-of-sequence padding symbol;
//! each database sequence contributes a subsequence automaton tied to a
//! reified `Regular` constraint on a boolean support variable, and a sum
//! over those booleans enforces the frequency threshold. Every additional
//! constraint composes by posting more propagators on the same variables. A
//! brute-force oracle ([`oracle`]) independently re-derives results on small
//! instances for verification.
//!
//! ```
//! use seqmine::miner::{mine_frequent, MiningQuery, Minsup};
//! use seqmine::seqdb::{Format, SequenceDatabase};
//!
//! let db = SequenceDatabase::parse("a b c d a\nd a e\na b d c\nc a\n", Format::Plain)
//!     .expect("well-formed input");
//! let outcome = mine_frequent(&db, &MiningQuery::new(Minsup::Absolute(2)))?;
//! assert_eq!(outcome.patterns.len(), 13);
//! # Ok::<(), seqmine::miner::QueryError>(())
//! ```
//!
//! Each major capability has a runnable example under `examples/`:
//! frequent and closed mining, gap and regex constraints, item constraints,
//! automaton inspection, and oracle cross-checking. The `seqmine` binary
//! exposes the same pipeline behind flags; see the crate README.

pub mod automata;
pub mod bits;
pub mod cli;
pub mod constraints;
pub mod miner;
pub mod oracle;
pub mod seqdb;
pub mod solver;

pub use miner::{
    mine_closed, mine_frequent, ClosedStrategy, MiningOutcome, MiningQuery, Minsup, PatternResult,
};
pub use seqdb::{Format, GapSpec, ItemId, SequenceDatabase};
