//! Translate a mining query into a constraint model, enumerate it, and
//! produce verified pattern sets, including closed-pattern mining.

use thiserror::Error;

use crate::automata::{build_subsequence_automaton, compile_regex, RegexError};
use crate::constraints::{
    post_among, post_eos_suffix, post_forbid, post_frequency, post_regular, post_reified_regular,
    post_size, SizeConstraint,
};
use crate::seqdb::{is_subsequence, GapSpec, ItemId, SequenceDatabase};
use crate::solver::{Model, Objective, SearchStats, Solution, Value, VarId};

/// Minimum support, absolute or as a fraction of the database size
/// (resolved with a ceiling).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Minsup {
    Absolute(usize),
    Relative(f64),
}

/// Bound the number of pattern positions taking a value from `items`.
/// `max_count = None` leaves the upper bound at the pattern length.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ItemConstraint {
    pub items: Vec<ItemId>,
    pub min_count: usize,
    pub max_count: Option<usize>,
}

impl ItemConstraint {
    /// Every listed item must appear at least once.
    pub fn contains(items: Vec<ItemId>) -> ItemConstraint {
        ItemConstraint {
            items,
            min_count: 1,
            max_count: None,
        }
    }

    /// None of the listed items may appear.
    pub fn excludes(items: Vec<ItemId>) -> ItemConstraint {
        ItemConstraint {
            items,
            min_count: 0,
            max_count: Some(0),
        }
    }
}

/// A declarative constraint bundle; any subset of constraints may be active
/// at once.
#[derive(Debug, Clone, PartialEq)]
pub struct MiningQuery {
    pub minsup: Minsup,
    pub closed: bool,
    pub size: Option<SizeConstraint>,
    pub gap: Option<GapSpec>,
    pub item_constraints: Vec<ItemConstraint>,
    pub regex: Option<String>,
}

impl MiningQuery {
    pub fn new(minsup: Minsup) -> MiningQuery {
        MiningQuery {
            minsup,
            closed: false,
            size: None,
            gap: None,
            item_constraints: Vec::new(),
            regex: None,
        }
    }
}

/// A mined pattern with its support and supporting sequence ids.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct PatternResult {
    pub pattern: Vec<ItemId>,
    pub support: usize,
    pub supporting_sids: Vec<usize>,
}

/// How the closed set is produced. Both strategies return identical sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ClosedStrategy {
    /// Enumerate all frequent patterns, then filter by the closedness
    /// definition.
    #[default]
    FilterFrequent,
    /// Repeatedly minimize the padding count, blocking each optimum with a
    /// dynamically posted constraint until the model is unsatisfiable, then
    /// apply the same closedness filter.
    OptimizeAndBlock,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum QueryError {
    #[error("minimum support resolves to {resolved}, outside 1..={m}")]
    InvalidMinsup { resolved: usize, m: usize },
    #[error(transparent)]
    Regex(#[from] RegexError),
}

/// Pattern set plus the search statistics that produced it.
#[derive(Debug, Clone)]
pub struct MiningOutcome {
    pub patterns: Vec<PatternResult>,
    pub stats: SearchStats,
}

/// Resolve the minimum support against the database size: relative supports
/// round up, and the result must land in `1..=m`.
pub fn resolve_minsup(db: &SequenceDatabase, minsup: Minsup) -> Result<usize, QueryError> {
    let m = db.num_sequences();
    let resolved = match minsup {
        Minsup::Absolute(a) => a,
        Minsup::Relative(r) => {
            if !r.is_finite() || r < 0.0 {
                return Err(QueryError::InvalidMinsup { resolved: 0, m });
            }
            (r * m as f64).ceil() as usize
        }
    };
    if resolved == 0 || resolved > m {
        return Err(QueryError::InvalidMinsup { resolved, m });
    }
    Ok(resolved)
}

/// Build the constraint model for a query: one reified `Regular` per
/// sequence over its subsequence automaton (gap-restricted when a gap is
/// given), the frequency sum, canonical-form channeling, a default minimum
/// size of one, plus one `Among` per item constraint, the size constraint,
/// and an unreified `Regular` for the expression constraint.
///
/// Automata are built over the frequent items only; no super-pattern of an
/// infrequent item can be frequent.
pub fn build_model(db: &SequenceDatabase, query: &MiningQuery) -> Result<Model, QueryError> {
    let minsup = resolve_minsup(db, query.minsup)?;
    let frequent = db.frequent_items(minsup);
    let eos = db.alphabet.len() as Value;
    let ell = db.ell;

    let mut model = Model::new(eos);
    let pattern: Vec<VarId> = (0..ell)
        .map(|_| model.new_pattern_var(frequent.iter().map(|&i| i.0).chain(std::iter::once(eos))))
        .collect();
    post_eos_suffix(&mut model, &pattern);

    let mut s_vars = Vec::with_capacity(db.num_sequences());
    for seq in &db.sequences {
        let automaton = build_subsequence_automaton(seq, &frequent, query.gap);
        let s = model.new_support_var();
        s_vars.push(s);
        post_reified_regular(&mut model, s, &pattern, &automaton);
    }
    post_frequency(&mut model, &s_vars, minsup);

    for ic in &query.item_constraints {
        let hi = ic.max_count.unwrap_or(ell).min(ell);
        post_among(&mut model, &pattern, &ic.items, ic.min_count, hi);
    }

    if let Some(src) = &query.regex {
        let automaton = compile_regex(src, &db.alphabet)?;
        post_regular(&mut model, &pattern, &automaton);
    }

    // Size pinning happens after the Regular posts so their post-time domain
    // snapshots see the untouched domains.
    let _ = post_size(&mut model, &pattern, SizeConstraint::Min(1));
    if let Some(kind) = query.size {
        let _ = post_size(&mut model, &pattern, kind);
    }
    Ok(model)
}

fn solution_to_result(
    db: &SequenceDatabase,
    query: &MiningQuery,
    solution: &Solution,
) -> PatternResult {
    let pattern: Vec<ItemId> = solution.pattern.iter().map(|&v| ItemId(v)).collect();
    let supporting_sids: Vec<usize> = solution
        .supports
        .iter()
        .map(|i| db.sequences[i].sid)
        .collect();
    let result = PatternResult {
        support: supporting_sids.len(),
        supporting_sids,
        pattern,
    };
    // Self-check before emission: the reified supports must agree with the
    // ground-truth embedding semantics.
    let recomputed = db.supporting_sids(&result.pattern, query.gap);
    assert_eq!(
        result.supporting_sids, recomputed,
        "support mismatch between solver and database for {:?}",
        result.pattern
    );
    result
}

/// The complete, duplicate-free set of patterns satisfying every active
/// constraint, lexicographically ordered by item id.
pub fn mine_frequent(
    db: &SequenceDatabase,
    query: &MiningQuery,
) -> Result<MiningOutcome, QueryError> {
    let mut model = build_model(db, query)?;
    let mut patterns = Vec::new();
    let stats = model.solve_all(&mut |solution| {
        patterns.push(solution_to_result(db, query, solution));
    });
    patterns.sort();
    Ok(MiningOutcome { patterns, stats })
}

/// True iff no strict super-pattern with equal support exists in `frequent`.
pub fn is_closed(p: &PatternResult, frequent: &[PatternResult]) -> bool {
    !frequent.iter().any(|q| {
        q.support == p.support
            && q.pattern.len() > p.pattern.len()
            && is_subsequence(&p.pattern, &q.pattern)
    })
}

fn closed_filter(frequent: Vec<PatternResult>) -> Vec<PatternResult> {
    let keep: Vec<bool> = frequent.iter().map(|p| is_closed(p, &frequent)).collect();
    frequent
        .into_iter()
        .zip(keep)
        .filter(|(_, k)| *k)
        .map(|(p, _)| p)
        .collect()
}

/// Closed patterns: frequent patterns with no strict super-pattern of equal
/// support within the same query's constrained pattern set.
pub fn mine_closed(
    db: &SequenceDatabase,
    query: &MiningQuery,
    strategy: ClosedStrategy,
) -> Result<MiningOutcome, QueryError> {
    match strategy {
        ClosedStrategy::FilterFrequent => {
            let outcome = mine_frequent(db, query)?;
            Ok(MiningOutcome {
                patterns: closed_filter(outcome.patterns),
                stats: outcome.stats,
            })
        }
        ClosedStrategy::OptimizeAndBlock => {
            let mut model = build_model(db, query)?;
            model.set_objective(Objective::MinimizeEosCount);
            let pattern_vars = model.pattern_vars().to_vec();
            let mut stats = SearchStats::default();
            let mut patterns = Vec::new();
            loop {
                let (best, run) = model.solve_minimize();
                stats.absorb(run);
                let Some(solution) = best else { break };
                patterns.push(solution_to_result(db, query, &solution));
                post_forbid(&mut model, &pattern_vars, &solution.pattern);
            }
            patterns.sort();
            Ok(MiningOutcome {
                patterns: closed_filter(patterns),
                stats,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seqdb::Format;

    fn sdb1() -> SequenceDatabase {
        SequenceDatabase::parse("a b c d a\nd a e\na b d c\nc a\n", Format::Plain).unwrap()
    }

    fn item(db: &SequenceDatabase, tok: &str) -> ItemId {
        db.alphabet.lookup(tok).unwrap()
    }

    fn names(db: &SequenceDatabase, results: &[PatternResult]) -> Vec<String> {
        results
            .iter()
            .map(|r| {
                r.pattern
                    .iter()
                    .map(|&i| db.alphabet.token(i))
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .collect()
    }

    #[test]
    fn resolve_minsup_cases() {
        let db = sdb1();
        assert_eq!(resolve_minsup(&db, Minsup::Absolute(2)), Ok(2));
        assert_eq!(resolve_minsup(&db, Minsup::Relative(0.5)), Ok(2));
        assert!(resolve_minsup(&db, Minsup::Absolute(0)).is_err());
        assert!(resolve_minsup(&db, Minsup::Absolute(5)).is_err());
        assert!(resolve_minsup(&db, Minsup::Relative(1.01)).is_err());
    }

    #[test]
    fn build_model_shape() {
        let db = sdb1();
        let query = MiningQuery::new(Minsup::Absolute(2));
        let model = build_model(&db, &query).unwrap();
        assert_eq!(model.pattern_vars().len(), 5);
        assert_eq!(model.support_vars().len(), 4);
        // First pattern variable: frequent items {a,b,c,d}; padding pruned by
        // the default minimum size, e pruned as infrequent.
        let p1 = model.pattern_vars()[0];
        let values = model.store().domain_values(p1);
        assert_eq!(values, vec![0, 1, 2, 3]);
    }

    #[test]
    fn mine_frequent_table_one() {
        let db = sdb1();
        let outcome = mine_frequent(&db, &MiningQuery::new(Minsup::Absolute(2))).unwrap();
        assert_eq!(
            names(&db, &outcome.patterns),
            vec![
                "a", "a b", "a b c", "a b d", "a c", "a d", "b", "b c", "b d", "c", "c a", "d",
                "d a"
            ]
        );
        assert_eq!(outcome.stats.solutions, 13);
        let ab = outcome
            .patterns
            .iter()
            .find(|r| r.pattern == vec![item(&db, "a"), item(&db, "b")])
            .unwrap();
        assert_eq!(ab.support, 2);
        assert_eq!(ab.supporting_sids, vec![1, 3]);
    }

    #[test]
    fn item_constraints_golden() {
        let db = sdb1();
        let mut query = MiningQuery::new(Minsup::Absolute(2));
        query.item_constraints = vec![
            ItemConstraint::contains(vec![item(&db, "a")]),
            ItemConstraint::contains(vec![item(&db, "b")]),
        ];
        let outcome = mine_frequent(&db, &query).unwrap();
        assert_eq!(names(&db, &outcome.patterns), vec!["a b", "a b c", "a b d"]);
    }

    #[test]
    fn exclusion_drops_item_entirely() {
        let db = sdb1();
        let mut query = MiningQuery::new(Minsup::Absolute(1));
        query.item_constraints = vec![ItemConstraint::excludes(vec![item(&db, "e")])];
        let outcome = mine_frequent(&db, &query).unwrap();
        let e = item(&db, "e");
        assert!(!outcome.patterns.is_empty());
        assert!(outcome.patterns.iter().all(|r| !r.pattern.contains(&e)));
    }

    #[test]
    fn min_size_golden() {
        let db = sdb1();
        let mut query = MiningQuery::new(Minsup::Absolute(2));
        query.size = Some(SizeConstraint::Min(3));
        let outcome = mine_frequent(&db, &query).unwrap();
        assert_eq!(names(&db, &outcome.patterns), vec!["a b c", "a b d"]);
    }

    #[test]
    fn max_size_one_yields_frequent_items() {
        let db = sdb1();
        let mut query = MiningQuery::new(Minsup::Absolute(2));
        query.size = Some(SizeConstraint::Max(1));
        let outcome = mine_frequent(&db, &query).unwrap();
        assert_eq!(names(&db, &outcome.patterns), vec!["a", "b", "c", "d"]);
    }

    #[test]
    fn gap_excludes_adjacent_match() {
        let db = sdb1();
        let mut query = MiningQuery::new(Minsup::Absolute(2));
        query.gap = Some(GapSpec::new(1, Some(2)));
        let outcome = mine_frequent(&db, &query).unwrap();
        let ca = vec![item(&db, "c"), item(&db, "a")];
        assert!(!outcome.patterns.iter().any(|r| r.pattern == ca));
    }

    #[test]
    fn regex_constraint_posts_and_mines() {
        let db = sdb1();
        let mut query = MiningQuery::new(Minsup::Absolute(1));
        query.regex = Some("a*{bb|bc|dc}".to_string());
        let outcome = mine_frequent(&db, &query).unwrap();
        let names = names(&db, &outcome.patterns);
        assert!(names.contains(&"a b c".to_string()));
        assert!(names.contains(&"a d c".to_string()));
        assert!(names.iter().all(|n| !n.starts_with("a b d")));
    }

    #[test]
    fn regex_errors_surface_verbatim() {
        let db = sdb1();
        let mut query = MiningQuery::new(Minsup::Absolute(1));
        query.regex = Some("a zzz".to_string());
        match mine_frequent(&db, &query) {
            Err(QueryError::Regex(RegexError::UnknownToken { token })) => {
                assert_eq!(token, "zzz")
            }
            other => panic!("expected unknown-token error, got {other:?}"),
        }
    }

    #[test]
    fn closed_table_one_both_strategies() {
        let db = sdb1();
        let query = MiningQuery {
            closed: true,
            ..MiningQuery::new(Minsup::Absolute(2))
        };
        for strategy in [
            ClosedStrategy::FilterFrequent,
            ClosedStrategy::OptimizeAndBlock,
        ] {
            let outcome = mine_closed(&db, &query, strategy).unwrap();
            assert_eq!(
                names(&db, &outcome.patterns),
                vec!["a", "a b c", "a b d", "c", "c a", "d", "d a"],
                "{strategy:?}"
            );
        }
    }

    #[test]
    fn closed_minsup_four_is_single_item() {
        let db = sdb1();
        let query = MiningQuery {
            closed: true,
            ..MiningQuery::new(Minsup::Absolute(4))
        };
        let outcome = mine_closed(&db, &query, ClosedStrategy::FilterFrequent).unwrap();
        assert_eq!(names(&db, &outcome.patterns), vec!["a"]);
        assert_eq!(outcome.patterns[0].support, 4);
    }

    #[test]
    fn identical_sequences_have_one_closed_pattern() {
        let db = SequenceDatabase::parse("a b a\na b a\na b a\n", Format::Plain).unwrap();
        let query = MiningQuery {
            closed: true,
            ..MiningQuery::new(Minsup::Absolute(3))
        };
        let outcome = mine_closed(&db, &query, ClosedStrategy::OptimizeAndBlock).unwrap();
        assert_eq!(names(&db, &outcome.patterns), vec!["a b a"]);
        assert_eq!(outcome.patterns[0].support, 3);
    }

    #[test]
    fn is_closed_examples() {
        let db = sdb1();
        let frequent = mine_frequent(&db, &MiningQuery::new(Minsup::Absolute(2)))
            .unwrap()
            .patterns;
        let bc = frequent
            .iter()
            .find(|r| r.pattern == vec![item(&db, "b"), item(&db, "c")])
            .unwrap();
        assert!(!is_closed(bc, &frequent));
        let a = frequent
            .iter()
            .find(|r| r.pattern == vec![item(&db, "a")])
            .unwrap();
        assert!(is_closed(a, &frequent));
        let longest = frequent.iter().max_by_key(|r| r.pattern.len()).unwrap();
        assert!(is_closed(longest, &frequent));
    }

    #[test]
    fn unreachable_minsup_is_an_error_only_when_out_of_range() {
        let db = sdb1();
        // minsup above m is a query error at this level.
        assert!(mine_frequent(&db, &MiningQuery::new(Minsup::Absolute(5))).is_err());
        // minsup == m is legal and yields just <a>.
        let outcome = mine_frequent(&db, &MiningQuery::new(Minsup::Absolute(4))).unwrap();
        assert_eq!(names(&db, &outcome.patterns), vec!["a"]);
    }

    #[test]
    fn minimize_finds_longest_frequent_patterns() {
        let db = sdb1();
        // minsup 2: the longest frequent patterns have three items, so the
        // optimum pads ell - 3 = 2 variables.
        let mut model = build_model(&db, &MiningQuery::new(Minsup::Absolute(2))).unwrap();
        model.set_objective(crate::solver::Objective::MinimizeEosCount);
        let (best, _) = model.solve_minimize();
        let best = best.unwrap();
        assert_eq!(best.objective_value, Some(2));
        let witness: Vec<ItemId> = best.pattern.iter().map(|&v| ItemId(v)).collect();
        let abc = vec![item(&db, "a"), item(&db, "b"), item(&db, "c")];
        let abd = vec![item(&db, "a"), item(&db, "b"), item(&db, "d")];
        assert!(witness == abc || witness == abd);

        // minsup 4: only <a> remains, padding four of five variables.
        let mut model = build_model(&db, &MiningQuery::new(Minsup::Absolute(4))).unwrap();
        model.set_objective(crate::solver::Objective::MinimizeEosCount);
        let (best, _) = model.solve_minimize();
        let best = best.unwrap();
        assert_eq!(best.objective_value, Some(4));
        assert_eq!(best.pattern, vec![item(&db, "a").0]);

        // Unsatisfiable: minsup 4 with a minimum size beyond any frequent
        // pattern.
        let mut query = MiningQuery::new(Minsup::Absolute(4));
        query.size = Some(SizeConstraint::Min(2));
        let mut model = build_model(&db, &query).unwrap();
        model.set_objective(crate::solver::Objective::MinimizeEosCount);
        let (best, _) = model.solve_minimize();
        assert!(best.is_none());
    }

    #[test]
    fn forbidding_every_pattern_empties_the_search() {
        let db = sdb1();
        let query = MiningQuery::new(Minsup::Absolute(2));
        let frequent = mine_frequent(&db, &query).unwrap().patterns;
        assert_eq!(frequent.len(), 13);

        let mut model = build_model(&db, &query).unwrap();
        let vars = model.pattern_vars().to_vec();
        for result in &frequent {
            let target: Vec<Value> = result.pattern.iter().map(|i| i.0).collect();
            post_forbid(&mut model, &vars, &target);
        }
        let mut count = 0;
        model.solve_all(&mut |_| count += 1);
        assert_eq!(count, 0);
    }

    #[test]
    fn all_empty_sequences_mine_nothing() {
        let db = SequenceDatabase::from_token_sequences(&[Vec::<&str>::new(), Vec::<&str>::new()]);
        let outcome = mine_frequent(&db, &MiningQuery::new(Minsup::Absolute(1))).unwrap();
        assert!(outcome.patterns.is_empty());
    }
}
