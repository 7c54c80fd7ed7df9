//! Mine all frequent sequential patterns from a small database.
//!
//! ```bash
//! cargo run --example frequent
//! ```

use seqmine::miner::{mine_frequent, MiningQuery, Minsup};
use seqmine::seqdb::{Format, SequenceDatabase};

fn main() {
    let db = SequenceDatabase::parse("a b c d a\nd a e\na b d c\nc a\n", Format::Plain)
        .expect("inline database parses");

    let query = MiningQuery::new(Minsup::Absolute(2));
    let outcome = mine_frequent(&db, &query).expect("valid query");

    println!("patterns with support >= 2:");
    for result in &outcome.patterns {
        let tokens: Vec<&str> = result
            .pattern
            .iter()
            .map(|&i| db.alphabet.token(i))
            .collect();
        println!(
            "  {:<8} support {}  sequences {:?}",
            tokens.join(" "),
            result.support,
            result.supporting_sids
        );
    }
    println!(
        "search: {} nodes, {} fails, {} solutions",
        outcome.stats.nodes, outcome.stats.fails, outcome.stats.solutions
    );
}
