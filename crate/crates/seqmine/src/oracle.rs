//! Brute-force reference miner for validating engine results on small
//! instances. Deliberately avoids the solver, the layered graph, and the
//! automaton constructions: candidate generation, support counting, and
//! regex matching all take separate code paths.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::automata::{parse_regex, RegexAst};
use crate::constraints::SizeConstraint;
use crate::miner::{resolve_minsup, MiningQuery, PatternResult, QueryError};
use crate::seqdb::{is_subsequence, ItemId, SequenceDatabase};

/// Default bound on generate-and-test work (counted in enumerated
/// subsequences, duplicates included).
pub const DEFAULT_CANDIDATE_CAP: usize = 1_000_000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("candidate enumeration exceeded the cap of {cap}")]
    CapacityExceeded { cap: usize },
    #[error(transparent)]
    Query(#[from] QueryError),
}

/// All distinct non-empty subsequences of all database sequences, in
/// lexicographic item-id order. Errors out instead of truncating when the
/// enumeration exceeds `cap` steps.
pub fn enumerate_candidates(
    db: &SequenceDatabase,
    cap: usize,
) -> Result<BTreeSet<Vec<ItemId>>, OracleError> {
    let mut set = BTreeSet::new();
    let mut steps = 0usize;
    for seq in &db.sequences {
        let mut current: Vec<ItemId> = Vec::new();
        subsets(&seq.items, 0, &mut current, &mut set, &mut steps, cap)?;
    }
    Ok(set)
}

fn subsets(
    items: &[ItemId],
    at: usize,
    current: &mut Vec<ItemId>,
    set: &mut BTreeSet<Vec<ItemId>>,
    steps: &mut usize,
    cap: usize,
) -> Result<(), OracleError> {
    if at == items.len() {
        if !current.is_empty() {
            *steps += 1;
            if *steps > cap {
                return Err(OracleError::CapacityExceeded { cap });
            }
            set.insert(current.clone());
        }
        return Ok(());
    }
    subsets(items, at + 1, current, set, steps, cap)?;
    current.push(items[at]);
    subsets(items, at + 1, current, set, steps, cap)?;
    current.pop();
    Ok(())
}

/// Backtracking interpreter over the regex syntax tree; the reference
/// verdict the compiled automata are checked against.
pub fn regex_match(ast: &RegexAst, word: &[ItemId]) -> bool {
    ends_from(ast, word, 0).contains(&word.len())
}

fn ends_from(ast: &RegexAst, word: &[ItemId], start: usize) -> BTreeSet<usize> {
    match ast {
        RegexAst::Literal(id) => {
            if word.get(start) == Some(id) {
                BTreeSet::from([start + 1])
            } else {
                BTreeSet::new()
            }
        }
        RegexAst::Concat(parts) => {
            let mut positions = BTreeSet::from([start]);
            for part in parts {
                let mut next = BTreeSet::new();
                for &p in &positions {
                    next.extend(ends_from(part, word, p));
                }
                positions = next;
                if positions.is_empty() {
                    break;
                }
            }
            positions
        }
        RegexAst::Alternation(branches) => branches
            .iter()
            .flat_map(|b| ends_from(b, word, start))
            .collect(),
        RegexAst::Star(inner) => closure(inner, word, BTreeSet::from([start])),
        RegexAst::Plus(inner) => {
            let once = ends_from(inner, word, start);
            closure(inner, word, once)
        }
        RegexAst::Optional(inner) => {
            let mut positions = ends_from(inner, word, start);
            positions.insert(start);
            positions
        }
        RegexAst::Group(inner) => ends_from(inner, word, start),
    }
}

fn closure(inner: &RegexAst, word: &[ItemId], seed: BTreeSet<usize>) -> BTreeSet<usize> {
    let mut all = seed;
    let mut frontier: Vec<usize> = all.iter().copied().collect();
    while let Some(p) = frontier.pop() {
        for q in ends_from(inner, word, p) {
            if all.insert(q) {
                frontier.push(q);
            }
        }
    }
    all
}

fn size_ok(len: usize, size: Option<SizeConstraint>) -> bool {
    match size {
        None => true,
        Some(SizeConstraint::Exact(k)) => len == k,
        Some(SizeConstraint::Min(k)) => len >= k,
        Some(SizeConstraint::Max(k)) => len <= k,
    }
}

/// Generate-and-test mining: keep every candidate that satisfies the size
/// bounds, item-count windows, regex, and the support threshold.
pub fn oracle_mine(
    db: &SequenceDatabase,
    query: &MiningQuery,
    cap: usize,
) -> Result<Vec<PatternResult>, OracleError> {
    let minsup = resolve_minsup(db, query.minsup).map_err(OracleError::Query)?;
    let regex_ast = match &query.regex {
        Some(src) => Some(parse_regex(src, &db.alphabet).map_err(QueryError::Regex)?),
        None => None,
    };
    let mut results = Vec::new();
    for candidate in enumerate_candidates(db, cap)? {
        if !size_ok(candidate.len(), query.size) {
            continue;
        }
        let mut ok = true;
        for ic in &query.item_constraints {
            let count = candidate.iter().filter(|i| ic.items.contains(i)).count();
            if count < ic.min_count || ic.max_count.is_some_and(|u| count > u) {
                ok = false;
                break;
            }
        }
        if !ok {
            continue;
        }
        if let Some(ast) = &regex_ast {
            if !regex_match(ast, &candidate) {
                continue;
            }
        }
        let sids = db.supporting_sids(&candidate, query.gap);
        if sids.len() < minsup {
            continue;
        }
        results.push(PatternResult {
            support: sids.len(),
            supporting_sids: sids,
            pattern: candidate,
        });
    }
    Ok(results)
}

/// `oracle_mine` filtered by the closedness definition via a pairwise
/// super-pattern and support comparison.
pub fn oracle_closed(
    db: &SequenceDatabase,
    query: &MiningQuery,
    cap: usize,
) -> Result<Vec<PatternResult>, OracleError> {
    let frequent = oracle_mine(db, query, cap)?;
    Ok(frequent
        .iter()
        .filter(|p| {
            !frequent.iter().any(|q| {
                q.support == p.support
                    && q.pattern.len() > p.pattern.len()
                    && is_subsequence(&p.pattern, &q.pattern)
            })
        })
        .cloned()
        .collect())
}
