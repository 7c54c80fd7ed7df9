//! Closed-pattern mining: drop every pattern that has a longer extension
//! with the same support. Runs both strategies and shows they agree.
//!
//! ```bash
//! cargo run --example closed
//! ```

use seqmine::miner::{mine_closed, mine_frequent, ClosedStrategy, MiningQuery, Minsup};
use seqmine::seqdb::{Format, SequenceDatabase};

fn main() {
    let db = SequenceDatabase::parse("a b c d a\nd a e\na b d c\nc a\n", Format::Plain)
        .expect("inline database parses");
    let query = MiningQuery {
        closed: true,
        ..MiningQuery::new(Minsup::Absolute(2))
    };

    let frequent = mine_frequent(&db, &MiningQuery::new(Minsup::Absolute(2))).unwrap();
    let filtered = mine_closed(&db, &query, ClosedStrategy::FilterFrequent).unwrap();
    let blocked = mine_closed(&db, &query, ClosedStrategy::OptimizeAndBlock).unwrap();

    assert_eq!(filtered.patterns, blocked.patterns);
    println!(
        "{} frequent patterns condense to {} closed ones:",
        frequent.patterns.len(),
        filtered.patterns.len()
    );
    for result in &filtered.patterns {
        let tokens: Vec<&str> = result
            .pattern
            .iter()
            .map(|&i| db.alphabet.token(i))
            .collect();
        println!("  {:<8} support {}", tokens.join(" "), result.support);
    }
    println!("(enumerate-and-filter and minimize-and-block agree)");
}
