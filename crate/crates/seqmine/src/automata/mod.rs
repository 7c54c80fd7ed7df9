//! Finite automata over items plus the end-of-sequence padding symbol: the
//! per-sequence subsequence automaton, its gap-restricted variant, and
//! compiled regular expressions.

mod regex;

pub use regex::{compile_regex, parse_regex, RegexAst, RegexError};

use std::collections::BTreeSet;
use std::fmt;

use crate::seqdb::{GapSpec, ItemId, Sequence};

/// Transition label: a database item or the reserved padding symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Label {
    Item(ItemId),
    Eos,
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Item(id) => write!(f, "{}", id.0),
            Label::Eos => write!(f, "EOS"),
        }
    }
}

pub type StateId = usize;

/// A finite automaton, possibly nondeterministic. Transitions are kept as a
/// canonical sorted set so that equal automata compare equal and exports are
/// stable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Automaton {
    state_count: usize,
    initial: StateId,
    accepting: BTreeSet<StateId>,
    transitions: Vec<(StateId, Label, StateId)>,
    deterministic: bool,
}

impl Automaton {
    pub fn new(
        state_count: usize,
        initial: StateId,
        accepting: impl IntoIterator<Item = StateId>,
        mut transitions: Vec<(StateId, Label, StateId)>,
    ) -> Automaton {
        let accepting: BTreeSet<StateId> = accepting.into_iter().collect();
        assert!(initial < state_count);
        transitions.sort_unstable();
        transitions.dedup();
        for &(from, _, to) in &transitions {
            assert!(from < state_count && to < state_count);
        }
        for &s in &accepting {
            assert!(s < state_count);
        }
        let deterministic = transitions
            .windows(2)
            .all(|w| (w[0].0, w[0].1) != (w[1].0, w[1].1));
        Automaton {
            state_count,
            initial,
            accepting,
            transitions,
            deterministic,
        }
    }

    pub fn state_count(&self) -> usize {
        self.state_count
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn accepting(&self) -> &BTreeSet<StateId> {
        &self.accepting
    }

    pub fn is_accepting(&self, state: StateId) -> bool {
        self.accepting.contains(&state)
    }

    pub fn transitions(&self) -> &[(StateId, Label, StateId)] {
        &self.transitions
    }

    pub fn is_deterministic(&self) -> bool {
        self.deterministic
    }

    /// NFA acceptance: simulate the set of reachable states over `word` and
    /// report whether any run ends in an accepting state. Labels with no
    /// matching transition simply drop runs.
    pub fn accepts(&self, word: &[Label]) -> bool {
        let mut current: BTreeSet<StateId> = BTreeSet::new();
        current.insert(self.initial);
        for &label in word {
            let mut next = BTreeSet::new();
            for &(from, l, to) in &self.transitions {
                if l == label && current.contains(&from) {
                    next.insert(to);
                }
            }
            if next.is_empty() {
                return false;
            }
            current = next;
        }
        current.iter().any(|s| self.accepting.contains(s))
    }

    /// Plain-text edge list, one `from label to` line per transition, sorted.
    /// Labels are rendered through `token_of` so exports are readable.
    pub fn edge_list_text(&self, token_of: impl Fn(ItemId) -> String) -> String {
        let mut out = String::new();
        for &(from, label, to) in &self.transitions {
            let l = match label {
                Label::Item(id) => token_of(id),
                Label::Eos => "EOS".to_string(),
            };
            out.push_str(&format!("{from} {l} {to}\n"));
        }
        out
    }
}

/// Pad a pattern with trailing `Eos` labels up to `len` positions.
pub fn pad(pattern: &[ItemId], len: usize) -> Vec<Label> {
    assert!(pattern.len() <= len);
    let mut word: Vec<Label> = pattern.iter().map(|&i| Label::Item(i)).collect();
    word.resize(len, Label::Eos);
    word
}

/// Build the automaton whose accepted words (up to trailing padding) are
/// exactly the subsequences of `s` over `allowed` items, restricted to
/// embeddings satisfying `gap` when one is given.
///
/// States are `0..=len(s)`; state 0 is initial, state `len(s)` accepting.
/// From a state `q`, matching the item at position `pos` (1-based) jumps to
/// state `pos`; every state carries an `Eos` edge to the last state, which
/// gives the accepting state its padding self-loop.
pub fn build_subsequence_automaton(
    s: &Sequence,
    allowed: &[ItemId],
    gap: Option<GapSpec>,
) -> Automaton {
    let n = s.len();
    let allowed: BTreeSet<ItemId> = allowed.iter().copied().collect();
    let mut transitions = Vec::new();
    for state in 0..=n {
        for pos in state + 1..=n {
            let item = s.items[pos - 1];
            if !allowed.contains(&item) {
                continue;
            }
            // Items strictly between the previous match and this one must
            // number within [M, N]; the first match is unrestricted.
            if let Some(g) = gap {
                if state != 0 && !g.allows(state, pos) {
                    continue;
                }
            }
            transitions.push((state, Label::Item(item), pos));
        }
        transitions.push((state, Label::Eos, n));
    }
    Automaton::new(n + 1, 0, [n], transitions)
}
