//! Shared helpers for the integration suites: a deterministic generator of
//! small databases and queries, built on a fixed-seed PRNG so every run
//! exercises the same instances.

#![allow(dead_code)]

use seqmine::constraints::SizeConstraint;
use seqmine::miner::{ItemConstraint, MiningQuery, Minsup};
use seqmine::seqdb::{GapSpec, SequenceDatabase};

/// SplitMix64; deterministic and good enough for instance generation.
pub struct Rng(u64);

impl Rng {
    pub fn new(seed: u64) -> Rng {
        Rng(seed)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    /// Uniform value in `0..bound` (bound >= 1).
    pub fn below(&mut self, bound: usize) -> usize {
        (self.next_u64() % bound as u64) as usize
    }

    pub fn chance(&mut self, num: usize, den: usize) -> bool {
        self.below(den) < num
    }
}

pub const TOKENS: [&str; 5] = ["a", "b", "c", "d", "e"];

/// A random database: 1-8 sequences, lengths 0-8, alphabet of at most 5.
pub fn random_db(rng: &mut Rng) -> SequenceDatabase {
    let num_seqs = 1 + rng.below(8);
    let alpha = 1 + rng.below(5);
    let seqs: Vec<Vec<&str>> = (0..num_seqs)
        .map(|_| {
            let len = rng.below(9);
            (0..len).map(|_| TOKENS[rng.below(alpha)]).collect()
        })
        .collect();
    SequenceDatabase::from_token_sequences(&seqs)
}

/// Expressions over whatever tokens the database actually interned.
fn regex_pool(db: &SequenceDatabase) -> Vec<String> {
    let toks: Vec<&str> = db.alphabet.ids().map(|i| db.alphabet.token(i)).collect();
    let mut pool = Vec::new();
    if let Some(t0) = toks.first() {
        pool.push(t0.to_string());
        pool.push(format!("{t0}*"));
        pool.push(format!("{t0}+"));
        pool.push(format!("{{{t0}}}?"));
    }
    if toks.len() >= 2 {
        let (t0, t1) = (toks[0], toks[1]);
        pool.push(format!("{t0} {t1}"));
        pool.push(format!("{t0}|{t1}"));
        pool.push(format!("({t0}|{t1})+"));
        pool.push(format!("{t0}* {t1}"));
    }
    if toks.len() >= 3 {
        let (t0, t1, t2) = (toks[0], toks[1], toks[2]);
        pool.push(format!("{t0}*{{{t1}{t2}|{t2}{t1}}}"));
        pool.push(format!("{t0} {t1}? {t2}*"));
    }
    pool
}

/// A random query against `db`, drawing minsup from 1..=3 (clamped to the
/// database size) and a random subset of the remaining constraints.
pub fn random_query(rng: &mut Rng, db: &SequenceDatabase) -> MiningQuery {
    let m = db.num_sequences();
    let minsup = 1 + rng.below(3.min(m));
    let mut query = MiningQuery::new(Minsup::Absolute(minsup));

    if rng.chance(1, 3) {
        let k = 1 + rng.below(4);
        query.size = Some(match rng.below(3) {
            0 => SizeConstraint::Exact(1 + rng.below(3)),
            1 => SizeConstraint::Min(k),
            _ => SizeConstraint::Max(k),
        });
    }
    if rng.chance(1, 3) {
        let min_gap = rng.below(2);
        let max_gap = if rng.chance(1, 4) {
            None
        } else {
            Some(min_gap + rng.below(3))
        };
        query.gap = Some(GapSpec::new(min_gap, max_gap));
    }
    let alphabet: Vec<_> = db.alphabet.ids().collect();
    if !alphabet.is_empty() && rng.chance(1, 3) {
        let count = 1 + rng.below(2.min(alphabet.len()));
        let mut items = Vec::new();
        for _ in 0..count {
            let item = alphabet[rng.below(alphabet.len())];
            if !items.contains(&item) {
                items.push(item);
            }
        }
        query.item_constraints.push(ItemConstraint::contains(items));
    }
    if !alphabet.is_empty() && rng.chance(1, 4) {
        let item = alphabet[rng.below(alphabet.len())];
        query
            .item_constraints
            .push(ItemConstraint::excludes(vec![item]));
    }
    if rng.chance(1, 4) {
        let pool = regex_pool(db);
        if !pool.is_empty() {
            query.regex = Some(pool[rng.below(pool.len())].clone());
        }
    }
    if rng.chance(1, 4) {
        query.closed = true;
    }
    query
}

/// Deterministic synthetic database for the scalability run.
pub fn synthetic_db(rng: &mut Rng, num_seqs: usize, len: usize, alpha: usize) -> SequenceDatabase {
    let tokens: Vec<String> = (0..alpha).map(|i| format!("t{i:02}")).collect();
    let seqs: Vec<Vec<String>> = (0..num_seqs)
        .map(|_| (0..len).map(|_| tokens[rng.below(alpha)].clone()).collect())
        .collect();
    SequenceDatabase::from_token_sequences(&seqs)
}
