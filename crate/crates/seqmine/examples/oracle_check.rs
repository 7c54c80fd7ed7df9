//! Cross-check the engine against the brute-force oracle on randomized
//! small databases.
//!
//! ```bash
//! cargo run --example oracle_check
//! ```

use seqmine::miner::{mine_frequent, MiningQuery, Minsup};
use seqmine::oracle::{oracle_mine, DEFAULT_CANDIDATE_CAP};
use seqmine::seqdb::SequenceDatabase;

/// SplitMix64, so the run is reproducible.
struct Rng(u64);

impl Rng {
    fn below(&mut self, bound: usize) -> usize {
        self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        ((z ^ (z >> 31)) % bound as u64) as usize
    }
}

fn main() {
    let tokens = ["a", "b", "c", "d"];
    let mut rng = Rng(7);
    for case in 1..=20 {
        let seqs: Vec<Vec<&str>> = (0..1 + rng.below(6))
            .map(|_| (0..rng.below(8)).map(|_| tokens[rng.below(4)]).collect())
            .collect();
        let db = SequenceDatabase::from_token_sequences(&seqs);
        let minsup = 1 + rng.below(2.min(db.num_sequences()));
        let query = MiningQuery::new(Minsup::Absolute(minsup));

        let engine = mine_frequent(&db, &query).expect("valid query").patterns;
        let reference = oracle_mine(&db, &query, DEFAULT_CANDIDATE_CAP).expect("small instance");
        assert_eq!(engine, reference, "case {case} diverged");
        println!(
            "case {case:>2}: {} sequences, minsup {minsup} -> {} patterns, engine == oracle",
            db.num_sequences(),
            engine.len()
        );
    }
    println!("all cases agree");
}
