//! Gap-constrained matching: bound how many items may sit between two
//! consecutively matched positions.
//!
//! ```bash
//! cargo run --example gap
//! ```

use seqmine::miner::{mine_frequent, MiningQuery, Minsup};
use seqmine::seqdb::{Format, GapSpec, SequenceDatabase};

fn main() {
    let db = SequenceDatabase::parse("a b c d a\nd a e\na b d c\nc a\n", Format::Plain)
        .expect("inline database parses");
    let ca: Vec<_> = ["c", "a"]
        .iter()
        .map(|t| db.alphabet.lookup(t).unwrap())
        .collect();

    for gap in [GapSpec::new(0, Some(2)), GapSpec::new(1, Some(2))] {
        println!(
            "support of <c a> under gap {gap}: {} (sequences {:?})",
            db.support(&ca, Some(gap)),
            db.supporting_sids(&ca, Some(gap)),
        );
    }

    // The same gap plugs into mining: each sequence automaton keeps only
    // the transitions that respect the window.
    let mut query = MiningQuery::new(Minsup::Absolute(2));
    query.gap = Some(GapSpec::new(1, Some(2)));
    let outcome = mine_frequent(&db, &query).unwrap();
    println!("patterns frequent under gap [1,2]:");
    for result in &outcome.patterns {
        let tokens: Vec<&str> = result
            .pattern
            .iter()
            .map(|&i| db.alphabet.token(i))
            .collect();
        println!("  {:<6} support {}", tokens.join(" "), result.support);
    }
}
