//! Inspect the per-sequence subsequence automata the miner works with, and
//! dump them in the one-edge-per-line debug format.
//!
//! ```bash
//! cargo run --example automaton_export
//! ```

use seqmine::automata::{build_subsequence_automaton, pad};
use seqmine::seqdb::{Format, GapSpec, SequenceDatabase};

fn main() {
    let db = SequenceDatabase::parse("a b d c\n", Format::Plain).expect("inline database parses");
    let seq = &db.sequences[0];
    let allowed: Vec<_> = db.alphabet.ids().collect();
    let token = |id| db.alphabet.token(id).to_string();

    let plain = build_subsequence_automaton(seq, &allowed, None);
    println!(
        "subsequence automaton of <a b d c> ({} states, accepting {:?}):",
        plain.state_count(),
        plain.accepting()
    );
    print!("{}", plain.edge_list_text(token));

    let token = |id| db.alphabet.token(id).to_string();
    let gapped = build_subsequence_automaton(seq, &allowed, Some(GapSpec::new(1, Some(1))));
    println!("\nwith gap [1,1] only gap-respecting transitions survive:");
    print!("{}", gapped.edge_list_text(token));

    let ab: Vec<_> = ["a", "b"]
        .iter()
        .map(|t| db.alphabet.lookup(t).unwrap())
        .collect();
    println!(
        "\n<a b> accepted without gap: {}, with gap [1,1]: {}",
        plain.accepts(&pad(&ab, seq.len())),
        gapped.accepts(&pad(&ab, seq.len()))
    );
}
