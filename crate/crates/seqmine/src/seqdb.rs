//! Sequence databases: parsing, interning, and the ground-truth subsequence
//! and support semantics everything else is checked against.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

/// Dense index into a database alphabet. The end-of-sequence padding symbol
/// used by the solver and automata layers is deliberately *not* an `ItemId`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ItemId(pub u32);

impl ItemId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// One database sequence. Positions are 1-based in all embedding arithmetic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sequence {
    pub sid: usize,
    pub items: Vec<ItemId>,
}

impl Sequence {
    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }
}

/// Bidirectional token <-> `ItemId` map. Tokens are interned in first
/// appearance order, which makes ids (and hence all output orderings)
/// deterministic for a given input.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Alphabet {
    tokens: Vec<String>,
    index: HashMap<String, ItemId>,
}

impl Alphabet {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn intern(&mut self, token: &str) -> ItemId {
        if let Some(&id) = self.index.get(token) {
            return id;
        }
        let id = ItemId(self.tokens.len() as u32);
        self.tokens.push(token.to_string());
        self.index.insert(token.to_string(), id);
        id
    }

    pub fn lookup(&self, token: &str) -> Option<ItemId> {
        self.index.get(token).copied()
    }

    pub fn token(&self, id: ItemId) -> &str {
        &self.tokens[id.index()]
    }

    pub fn ids(&self) -> impl Iterator<Item = ItemId> + '_ {
        (0..self.tokens.len()).map(|i| ItemId(i as u32))
    }
}

/// Gap constraint `[M, N]`: between every two consecutively matched positions
/// there must be at least `min_gap` and at most `max_gap` items strictly in
/// between. The first match is unrestricted from the sequence start and the
/// last from the sequence end. `max_gap = None` means unbounded.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GapSpec {
    pub min_gap: usize,
    pub max_gap: Option<usize>,
}

impl GapSpec {
    pub fn new(min_gap: usize, max_gap: Option<usize>) -> Self {
        if let Some(n) = max_gap {
            assert!(min_gap <= n, "gap spec requires M <= N");
        }
        GapSpec { min_gap, max_gap }
    }

    /// True iff an edge from matched position `prev` to matched position
    /// `next` (1-based, `prev < next`) respects the gap.
    #[inline]
    pub fn allows(&self, prev: usize, next: usize) -> bool {
        debug_assert!(prev < next);
        let between = next - prev - 1;
        between >= self.min_gap && self.max_gap.is_none_or(|n| between <= n)
    }
}

impl fmt::Display for GapSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.max_gap {
            Some(n) => write!(f, "[{},{}]", self.min_gap, n),
            None => write!(f, "[{},inf]", self.min_gap),
        }
    }
}

/// An interned sequence database. Immutable once parsed; safe to share across
/// any number of concurrent readers.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SequenceDatabase {
    pub alphabet: Alphabet,
    pub sequences: Vec<Sequence>,
    /// Maximum sequence length, 0 for an empty database.
    pub ell: usize,
}

/// Supported input formats.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    /// One sequence per line, whitespace-separated tokens, blank lines skipped.
    Plain,
    /// SPMF integer format: `-1` separates itemsets, `-2` ends a line. Only
    /// singleton itemsets are accepted.
    Spmf,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: itemset with {size} items; only single-item sequences are supported")]
    UnsupportedMultiset { line: usize, size: usize },
    #[error("line {line}: malformed integer `{token}`")]
    MalformedInteger { line: usize, token: String },
    #[error("line {line}: unexpected token `{token}` after -2 terminator")]
    TrailingToken { line: usize, token: String },
    #[error("line {line}: missing -2 line terminator")]
    MissingTerminator { line: usize },
}

impl SequenceDatabase {
    pub fn parse(text: &str, format: Format) -> Result<SequenceDatabase, ParseError> {
        match format {
            Format::Plain => Ok(Self::parse_plain(text)),
            Format::Spmf => Self::parse_spmf(text),
        }
    }

    fn parse_plain(text: &str) -> SequenceDatabase {
        let mut db = SequenceDatabase::default();
        for line in text.lines() {
            let items: Vec<ItemId> = line
                .split_whitespace()
                .map(|tok| db.alphabet.intern(tok))
                .collect();
            if items.is_empty() {
                continue;
            }
            db.push_sequence(items);
        }
        db
    }

    fn parse_spmf(text: &str) -> Result<SequenceDatabase, ParseError> {
        let mut db = SequenceDatabase::default();
        for (idx, line) in text.lines().enumerate() {
            let line_no = idx + 1;
            if line.trim().is_empty() {
                continue;
            }
            let mut items: Vec<ItemId> = Vec::new();
            let mut current_itemset: Vec<&str> = Vec::new();
            let mut terminated = false;
            for tok in line.split_whitespace() {
                if terminated {
                    return Err(ParseError::TrailingToken {
                        line: line_no,
                        token: tok.to_string(),
                    });
                }
                let value: i64 = tok.parse().map_err(|_| ParseError::MalformedInteger {
                    line: line_no,
                    token: tok.to_string(),
                })?;
                match value {
                    -2 => {
                        terminated = true;
                    }
                    -1 => {}
                    v if v >= 0 => {
                        current_itemset.push(tok);
                    }
                    _ => {
                        return Err(ParseError::MalformedInteger {
                            line: line_no,
                            token: tok.to_string(),
                        })
                    }
                }
                if value == -1 || value == -2 {
                    match current_itemset.len() {
                        0 => {}
                        1 => {
                            let id = db.alphabet.intern(current_itemset[0]);
                            items.push(id);
                            current_itemset.clear();
                        }
                        size => {
                            return Err(ParseError::UnsupportedMultiset {
                                line: line_no,
                                size,
                            })
                        }
                    }
                }
            }
            if !terminated {
                return Err(ParseError::MissingTerminator { line: line_no });
            }
            db.push_sequence(items);
        }
        Ok(db)
    }

    fn push_sequence(&mut self, items: Vec<ItemId>) {
        let sid = self.sequences.len() + 1;
        self.ell = self.ell.max(items.len());
        self.sequences.push(Sequence { sid, items });
    }

    /// Build a database directly from token sequences; used by tests and
    /// examples. Empty sequences are legal here.
    pub fn from_token_sequences<S: AsRef<str>>(seqs: &[Vec<S>]) -> SequenceDatabase {
        let mut db = SequenceDatabase::default();
        for seq in seqs {
            let items = seq
                .iter()
                .map(|tok| db.alphabet.intern(tok.as_ref()))
                .collect();
            db.push_sequence(items);
        }
        db
    }

    /// Re-serialize in plain format, one sequence per line.
    pub fn serialize_plain(&self) -> String {
        let mut out = String::new();
        for seq in &self.sequences {
            let line: Vec<&str> = seq
                .items
                .iter()
                .map(|&id| self.alphabet.token(id))
                .collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn num_sequences(&self) -> usize {
        self.sequences.len()
    }

    /// Number of sequences containing `pattern`, each counted once.
    pub fn support(&self, pattern: &[ItemId], gap: Option<GapSpec>) -> usize {
        self.sequences
            .iter()
            .filter(|s| contains(&s.items, pattern, gap))
            .count()
    }

    /// Sids of the sequences containing `pattern`, in ascending order.
    pub fn supporting_sids(&self, pattern: &[ItemId], gap: Option<GapSpec>) -> Vec<usize> {
        self.sequences
            .iter()
            .filter(|s| contains(&s.items, pattern, gap))
            .map(|s| s.sid)
            .collect()
    }

    /// Per-item sequence-level support: each sequence counts at most once per
    /// item regardless of repetitions.
    pub fn item_supports(&self) -> Vec<usize> {
        let mut counts = vec![0usize; self.alphabet.len()];
        let mut seen = vec![usize::MAX; self.alphabet.len()];
        for (k, seq) in self.sequences.iter().enumerate() {
            for &item in &seq.items {
                if seen[item.index()] != k {
                    seen[item.index()] = k;
                    counts[item.index()] += 1;
                }
            }
        }
        counts
    }

    /// Items whose support reaches `minsup`, ascending.
    pub fn frequent_items(&self, minsup: usize) -> Vec<ItemId> {
        self.item_supports()
            .iter()
            .enumerate()
            .filter(|&(_, &c)| c >= minsup)
            .map(|(i, _)| ItemId(i as u32))
            .collect()
    }
}

/// True iff `pattern` embeds into `items` via strictly increasing positions,
/// with every consecutive pair of matched positions respecting `gap` when one
/// is given. The empty pattern embeds everywhere.
pub fn contains(items: &[ItemId], pattern: &[ItemId], gap: Option<GapSpec>) -> bool {
    if pattern.is_empty() {
        return true;
    }
    match gap {
        None => {
            // Greedy earliest match is exact for the unconstrained case.
            let mut pi = 0;
            for &it in items {
                if it == pattern[pi] {
                    pi += 1;
                    if pi == pattern.len() {
                        return true;
                    }
                }
            }
            false
        }
        Some(g) => {
            // Track every position where the prefix matched so far can end.
            let n = items.len();
            let mut reachable = vec![false; n];
            for (j, &it) in items.iter().enumerate() {
                reachable[j] = it == pattern[0];
            }
            for &p in &pattern[1..] {
                let mut next = vec![false; n];
                for (j, &it) in items.iter().enumerate() {
                    if it != p {
                        continue;
                    }
                    // 1-based positions: prev = i+1, next = j+1.
                    next[j] = (0..j).any(|i| reachable[i] && g.allows(i + 1, j + 1));
                }
                reachable = next;
                if reachable.iter().all(|&r| !r) {
                    return false;
                }
            }
            reachable.iter().any(|&r| r)
        }
    }
}

/// Plain subsequence test between two patterns (`p` embeds in `q`).
pub fn is_subsequence(p: &[ItemId], q: &[ItemId]) -> bool {
    contains(q, p, None)
}
