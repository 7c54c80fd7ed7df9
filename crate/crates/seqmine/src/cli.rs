//! Command-line front end: load a database, assemble a query from flags,
//! mine, and emit patterns deterministically.
//!
//! Exit codes: 0 success (including zero patterns), 2 argument or format
//! errors, 3 oracle mismatch, 4 oracle capacity exceeded.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::error::ErrorKind;
use clap::{Parser, ValueEnum};

use crate::miner::{
    mine_closed, mine_frequent, ClosedStrategy, ItemConstraint, MiningOutcome, MiningQuery, Minsup,
    PatternResult, QueryError,
};
use crate::oracle::{oracle_closed, oracle_mine, OracleError, DEFAULT_CANDIDATE_CAP};
use crate::seqdb::{Format, GapSpec, ItemId, SequenceDatabase};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_ORACLE_MISMATCH: i32 = 3;
pub const EXIT_ORACLE_CAPACITY: i32 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum FormatFlag {
    #[default]
    Plain,
    Spmf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum StrategyFlag {
    /// Enumerate all frequent patterns, then filter to the closed ones.
    #[default]
    Filter,
    /// Repeated padding-count minimization with dynamic blocking.
    OptimizeBlock,
}

/// Flag bundle; parses to a valid query or fails before any mining work.
#[derive(Debug, Parser)]
#[command(
    name = "seqmine",
    version,
    about = "Mine sequential patterns under composable constraints"
)]
pub struct CliConfig {
    /// Input sequence database file.
    #[arg(long, value_name = "PATH")]
    pub input: PathBuf,

    /// Input format.
    #[arg(long, value_enum, default_value_t = FormatFlag::Plain)]
    pub format: FormatFlag,

    /// Minimum support: an absolute count or a percentage like "10%".
    #[arg(long, value_name = "N|P%")]
    pub minsup: String,

    /// Mine closed patterns only.
    #[arg(long)]
    pub closed: bool,

    /// Exact pattern size.
    #[arg(long, value_name = "K", conflicts_with_all = ["min_size", "max_size"])]
    pub size: Option<usize>,

    /// Minimum pattern size.
    #[arg(long, value_name = "K", conflicts_with = "max_size")]
    pub min_size: Option<usize>,

    /// Maximum pattern size.
    #[arg(long, value_name = "K")]
    pub max_size: Option<usize>,

    /// Gap constraint "M,N"; N may be "inf".
    #[arg(long, value_name = "M,N")]
    pub gap: Option<String>,

    /// Items that must occur: "tok1,tok2:l,u" (bounds optional; repeatable).
    #[arg(long, value_name = "TOKS[:L,U]")]
    pub contains: Vec<String>,

    /// Items that must not occur: "tok1,tok2" (repeatable).
    #[arg(long, value_name = "TOKS")]
    pub exclude: Vec<String>,

    /// Regular expression over alphabet tokens.
    #[arg(long, value_name = "EXPR")]
    pub regex: Option<String>,

    /// Write patterns here instead of stdout.
    #[arg(long, value_name = "PATH")]
    pub output: Option<PathBuf>,

    /// Print search statistics to stderr.
    #[arg(long)]
    pub stats: bool,

    /// Re-mine with the brute-force oracle and compare.
    #[arg(long)]
    pub oracle_check: bool,

    /// Closed-mining strategy.
    #[arg(long, value_enum, default_value_t = StrategyFlag::Filter)]
    pub strategy: StrategyFlag,
}

struct UsageError(String);

fn parse_minsup(raw: &str) -> Result<Minsup, UsageError> {
    let raw = raw.trim();
    if let Some(pct) = raw.strip_suffix('%') {
        let value: f64 = pct
            .parse()
            .map_err(|_| UsageError(format!("--minsup: bad percentage `{raw}`")))?;
        if !(0.0..=100.0).contains(&value) {
            return Err(UsageError(format!(
                "--minsup: percentage `{raw}` is outside 0..=100"
            )));
        }
        Ok(Minsup::Relative(value / 100.0))
    } else {
        let value: usize = raw
            .parse()
            .map_err(|_| UsageError(format!("--minsup: bad count `{raw}`")))?;
        Ok(Minsup::Absolute(value))
    }
}

fn parse_gap(raw: &str) -> Result<GapSpec, UsageError> {
    let (m, n) = raw
        .split_once(',')
        .ok_or_else(|| UsageError(format!("--gap: expected `M,N`, got `{raw}`")))?;
    let min_gap: usize = m
        .trim()
        .parse()
        .map_err(|_| UsageError(format!("--gap: bad minimum `{m}`")))?;
    let n = n.trim();
    let max_gap = if n.eq_ignore_ascii_case("inf") {
        None
    } else {
        Some(
            n.parse::<usize>()
                .map_err(|_| UsageError(format!("--gap: bad maximum `{n}`")))?,
        )
    };
    if let Some(u) = max_gap {
        if min_gap > u {
            return Err(UsageError(format!("--gap: {min_gap} > {u}")));
        }
    }
    Ok(GapSpec::new(min_gap, max_gap))
}

fn resolve_tokens(flag: &str, raw: &str, db: &SequenceDatabase) -> Result<Vec<ItemId>, UsageError> {
    let mut items = Vec::new();
    for tok in raw.split(',') {
        let tok = tok.trim();
        if tok.is_empty() {
            continue;
        }
        match db.alphabet.lookup(tok) {
            Some(id) => items.push(id),
            None => {
                return Err(UsageError(format!(
                    "{flag}: unknown token `{tok}` (not in the database alphabet)"
                )))
            }
        }
    }
    if items.is_empty() {
        return Err(UsageError(format!("{flag}: no tokens given in `{raw}`")));
    }
    Ok(items)
}

fn parse_contains(raw: &str, db: &SequenceDatabase) -> Result<ItemConstraint, UsageError> {
    let (toks, bounds) = match raw.split_once(':') {
        Some((t, b)) => (t, Some(b)),
        None => (raw, None),
    };
    let items = resolve_tokens("--contains", toks, db)?;
    let (min_count, max_count) = match bounds {
        None => (1, None),
        Some(b) => {
            let (l, u) = match b.split_once(',') {
                Some((l, u)) => (l.trim(), u.trim()),
                None => (b.trim(), ""),
            };
            let min_count: usize = l
                .parse()
                .map_err(|_| UsageError(format!("--contains: bad lower bound `{l}`")))?;
            let max_count = if u.is_empty() {
                None
            } else {
                Some(
                    u.parse::<usize>()
                        .map_err(|_| UsageError(format!("--contains: bad upper bound `{u}`")))?,
                )
            };
            (min_count, max_count)
        }
    };
    if let Some(u) = max_count {
        if min_count > u {
            return Err(UsageError(format!("--contains: {min_count} > {u}")));
        }
    }
    Ok(ItemConstraint {
        items,
        min_count,
        max_count,
    })
}

fn build_query(config: &CliConfig, db: &SequenceDatabase) -> Result<MiningQuery, UsageError> {
    let mut query = MiningQuery::new(parse_minsup(&config.minsup)?);
    query.closed = config.closed;
    query.size = match (config.size, config.min_size, config.max_size) {
        (Some(k), _, _) => Some(crate::constraints::SizeConstraint::Exact(k)),
        (_, Some(k), _) => Some(crate::constraints::SizeConstraint::Min(k)),
        (_, _, Some(k)) => Some(crate::constraints::SizeConstraint::Max(k)),
        _ => None,
    };
    if let Some(gap) = &config.gap {
        query.gap = Some(parse_gap(gap)?);
    }
    for raw in &config.contains {
        query.item_constraints.push(parse_contains(raw, db)?);
    }
    for raw in &config.exclude {
        query
            .item_constraints
            .push(ItemConstraint::excludes(resolve_tokens(
                "--exclude",
                raw,
                db,
            )?));
    }
    query.regex = config.regex.clone();
    Ok(query)
}

fn render_patterns(db: &SequenceDatabase, patterns: &[PatternResult]) -> String {
    let mut out = String::new();
    for r in patterns {
        let tokens: Vec<&str> = r.pattern.iter().map(|&i| db.alphabet.token(i)).collect();
        let sids: Vec<String> = r.supporting_sids.iter().map(|s| s.to_string()).collect();
        out.push_str(&format!(
            "{}\t{}\t{}\n",
            tokens.join(" "),
            r.support,
            sids.join(",")
        ));
    }
    out
}

/// Run with explicit output and error streams; returns the exit code.
pub fn run_with_io(args: &[String], out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let started = Instant::now();
    let mut argv = vec!["seqmine".to_string()];
    argv.extend(args.iter().cloned());
    let config = match CliConfig::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{e}");
                    EXIT_USAGE
                }
            }
        }
    };

    let text = match fs::read_to_string(&config.input) {
        Ok(t) => t,
        Err(e) => {
            let _ = writeln!(err, "--input: cannot read {}: {e}", config.input.display());
            return EXIT_USAGE;
        }
    };
    let format = match config.format {
        FormatFlag::Plain => Format::Plain,
        FormatFlag::Spmf => Format::Spmf,
    };
    let db = match SequenceDatabase::parse(&text, format) {
        Ok(db) => db,
        Err(e) => {
            let _ = writeln!(err, "--input: {e}");
            return EXIT_USAGE;
        }
    };
    let query = match build_query(&config, &db) {
        Ok(q) => q,
        Err(UsageError(msg)) => {
            let _ = writeln!(err, "{msg}");
            return EXIT_USAGE;
        }
    };

    let strategy = match config.strategy {
        StrategyFlag::Filter => ClosedStrategy::FilterFrequent,
        StrategyFlag::OptimizeBlock => ClosedStrategy::OptimizeAndBlock,
    };
    let mined: Result<MiningOutcome, _> = if query.closed {
        mine_closed(&db, &query, strategy)
    } else {
        mine_frequent(&db, &query)
    };
    let outcome = match mined {
        Ok(o) => o,
        Err(e) => {
            let flag = match &e {
                QueryError::InvalidMinsup { .. } => "--minsup",
                QueryError::Regex(_) => "--regex",
            };
            let _ = writeln!(err, "{flag}: {e}");
            return EXIT_USAGE;
        }
    };

    let rendered = render_patterns(&db, &outcome.patterns);
    match &config.output {
        None => {
            if out.write_all(rendered.as_bytes()).is_err() {
                return EXIT_USAGE;
            }
        }
        Some(path) => {
            if let Err(e) = fs::write(path, &rendered) {
                let _ = writeln!(err, "--output: cannot write {}: {e}", path.display());
                return EXIT_USAGE;
            }
        }
    }

    if config.stats {
        let elapsed = started.elapsed();
        let _ = writeln!(err, "patterns: {}", outcome.patterns.len());
        let _ = writeln!(err, "nodes: {}", outcome.stats.nodes);
        let _ = writeln!(err, "fails: {}", outcome.stats.fails);
        let _ = writeln!(err, "time_ms: {}", elapsed.as_millis());
    }

    if config.oracle_check {
        let expected = if query.closed {
            oracle_closed(&db, &query, DEFAULT_CANDIDATE_CAP)
        } else {
            oracle_mine(&db, &query, DEFAULT_CANDIDATE_CAP)
        };
        match expected {
            Err(OracleError::CapacityExceeded { cap }) => {
                let _ = writeln!(err, "--oracle-check: capacity of {cap} candidates exceeded");
                return EXIT_ORACLE_CAPACITY;
            }
            Err(OracleError::Query(e)) => {
                let _ = writeln!(err, "--oracle-check: {e}");
                return EXIT_USAGE;
            }
            Ok(expected) => {
                if expected != outcome.patterns {
                    let _ = writeln!(
                        err,
                        "--oracle-check: MISMATCH (engine {} patterns, oracle {})",
                        outcome.patterns.len(),
                        expected.len()
                    );
                    return EXIT_ORACLE_MISMATCH;
                }
                let _ = writeln!(err, "oracle check passed: {} patterns", expected.len());
            }
        }
    }
    EXIT_OK
}

/// Run against real stdout/stderr; returns the exit code.
pub fn run(args: &[String]) -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with_io(args, &mut stdout.lock(), &mut stderr.lock())
}
