//! Restrict mined patterns to a regular language over the alphabet.
//!
//! ```bash
//! cargo run --example regex_filter
//! ```

use seqmine::automata::{compile_regex, pad};
use seqmine::miner::{mine_frequent, MiningQuery, Minsup};
use seqmine::seqdb::{Format, SequenceDatabase};

fn main() {
    let db = SequenceDatabase::parse("a b c d a\nd a e\na b d c\nc a\n", Format::Plain)
        .expect("inline database parses");

    // Braces group like parentheses; juxtaposed single-char tokens
    // concatenate, so `bb` reads as b then b.
    let src = "a*{bb|bc|dc}";
    let automaton = compile_regex(src, &db.alphabet).expect("expression compiles");
    for word in [["a", "b", "c"], ["a", "d", "c"], ["a", "b", "d"]] {
        let items: Vec<_> = word
            .iter()
            .map(|t| db.alphabet.lookup(t).unwrap())
            .collect();
        println!(
            "{src} accepts {:?}: {}",
            word,
            automaton.accepts(&pad(&items, db.ell))
        );
    }

    let mut query = MiningQuery::new(Minsup::Absolute(1));
    query.regex = Some(src.to_string());
    let outcome = mine_frequent(&db, &query).unwrap();
    println!("patterns matching {src}:");
    for result in &outcome.patterns {
        let tokens: Vec<&str> = result
            .pattern
            .iter()
            .map(|&i| db.alphabet.token(i))
            .collect();
        println!("  {:<8} support {}", tokens.join(" "), result.support);
    }
}
