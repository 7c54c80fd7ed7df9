//! Require or forbid items in the mined patterns, with occurrence windows.
//!
//! ```bash
//! cargo run --example item_constraints
//! ```

use seqmine::miner::{mine_frequent, ItemConstraint, MiningQuery, Minsup};
use seqmine::seqdb::{Format, SequenceDatabase};

fn main() {
    let db = SequenceDatabase::parse("a b c d a\nd a e\na b d c\nc a\n", Format::Plain)
        .expect("inline database parses");
    let item = |t: &str| db.alphabet.lookup(t).unwrap();

    // Patterns that mention both a and b.
    let mut query = MiningQuery::new(Minsup::Absolute(2));
    query.item_constraints = vec![
        ItemConstraint::contains(vec![item("a")]),
        ItemConstraint::contains(vec![item("b")]),
    ];
    let outcome = mine_frequent(&db, &query).unwrap();
    println!("frequent patterns containing both a and b:");
    for result in &outcome.patterns {
        let tokens: Vec<&str> = result
            .pattern
            .iter()
            .map(|&i| db.alphabet.token(i))
            .collect();
        println!("  {:<8} support {}", tokens.join(" "), result.support);
    }

    // Exclusion is the same constraint with a zero-width window.
    let mut query = MiningQuery::new(Minsup::Absolute(1));
    query.item_constraints = vec![ItemConstraint::excludes(vec![item("a")])];
    let outcome = mine_frequent(&db, &query).unwrap();
    println!("patterns avoiding a entirely:");
    for result in &outcome.patterns {
        let tokens: Vec<&str> = result
            .pattern
            .iter()
            .map(|&i| db.alphabet.token(i))
            .collect();
        println!("  {:<8} support {}", tokens.join(" "), result.support);
    }
}
