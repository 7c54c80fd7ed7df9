//! Regular expressions over alphabet tokens, compiled to deterministic
//! automata: parse, Thompson construction, subset construction, then the
//! padding closure that makes the result pluggable into fixed-length words.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use thiserror::Error;

use super::{Automaton, Label};
use crate::seqdb::{Alphabet, ItemId};

/// Syntax tree of a pattern expression. Literals are resolved against the
/// database alphabet while parsing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RegexAst {
    Literal(ItemId),
    Concat(Vec<RegexAst>),
    Alternation(Vec<RegexAst>),
    Star(Box<RegexAst>),
    Plus(Box<RegexAst>),
    Optional(Box<RegexAst>),
    Group(Box<RegexAst>),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RegexError {
    #[error("unknown literal token `{token}`")]
    UnknownToken { token: String },
    #[error("syntax error at position {pos}: {message}")]
    Syntax { pos: usize, message: String },
}

fn syntax(pos: usize, message: impl Into<String>) -> RegexError {
    RegexError::Syntax {
        pos,
        message: message.into(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Word(String),
    Pipe,
    Star,
    Plus,
    Question,
    Open(char),
    Close(char),
}

fn lex(src: &str) -> Vec<(usize, Tok)> {
    let mut toks = Vec::new();
    let mut word_start = 0usize;
    let mut word = String::new();
    for (pos, ch) in src.char_indices() {
        let op = match ch {
            '|' => Some(Tok::Pipe),
            '*' => Some(Tok::Star),
            '+' => Some(Tok::Plus),
            '?' => Some(Tok::Question),
            '(' | '{' => Some(Tok::Open(ch)),
            ')' | '}' => Some(Tok::Close(ch)),
            _ => None,
        };
        if op.is_some() || ch.is_whitespace() {
            if !word.is_empty() {
                toks.push((word_start, Tok::Word(std::mem::take(&mut word))));
            }
            if let Some(op) = op {
                toks.push((pos, op));
            }
        } else {
            if word.is_empty() {
                word_start = pos;
            }
            word.push(ch);
        }
    }
    if !word.is_empty() {
        toks.push((word_start, Tok::Word(word)));
    }
    toks
}

/// Split a run of non-operator characters into alphabet tokens, longest
/// token first, so `bb` reads as two `b` literals while a multi-character
/// alphabet token still matches whole.
fn segment_word(word: &str, alphabet: &Alphabet) -> Option<Vec<ItemId>> {
    if let Some(id) = alphabet.lookup(word) {
        return Some(vec![id]);
    }
    let n = word.len();
    let mut step: Vec<Option<ItemId>> = vec![None; n + 1];
    let mut ok = vec![false; n + 1];
    ok[n] = true;
    let mut tokens: Vec<(usize, &str, ItemId)> = alphabet
        .ids()
        .map(|id| {
            let t = alphabet.token(id);
            (t.len(), t, id)
        })
        .collect();
    tokens.sort_by_key(|t| std::cmp::Reverse(t.0));
    for i in (0..n).rev() {
        if !word.is_char_boundary(i) {
            continue;
        }
        for &(len, tok, id) in &tokens {
            if i + len <= n && ok[i + len] && word[i..].starts_with(tok) {
                ok[i] = true;
                step[i] = Some(id);
                break;
            }
        }
    }
    if !ok[0] {
        return None;
    }
    let mut out = Vec::new();
    let mut i = 0;
    while i < n {
        let id = step[i]?;
        out.push(id);
        i += alphabet.token(id).len();
    }
    Some(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    at: usize,
    alphabet: &'a Alphabet,
    src_len: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&(usize, Tok)> {
        self.toks.get(self.at)
    }

    fn alternation(&mut self) -> Result<RegexAst, RegexError> {
        let mut branches = vec![self.concat()?];
        while matches!(self.peek(), Some((_, Tok::Pipe))) {
            self.at += 1;
            branches.push(self.concat()?);
        }
        if branches.len() == 1 {
            Ok(branches.pop().unwrap())
        } else {
            Ok(RegexAst::Alternation(branches))
        }
    }

    fn concat(&mut self) -> Result<RegexAst, RegexError> {
        let mut parts = Vec::new();
        loop {
            match self.peek() {
                Some((_, Tok::Word(_))) | Some((_, Tok::Open(_))) => parts.push(self.postfix()?),
                Some(&(pos, Tok::Star)) | Some(&(pos, Tok::Plus)) | Some(&(pos, Tok::Question)) => {
                    return Err(syntax(pos, "repetition operator with nothing to repeat"))
                }
                _ => break,
            }
        }
        if parts.len() == 1 {
            Ok(parts.pop().unwrap())
        } else {
            Ok(RegexAst::Concat(parts))
        }
    }

    fn postfix(&mut self) -> Result<RegexAst, RegexError> {
        let mut node = self.atom()?;
        loop {
            match self.peek() {
                Some((_, Tok::Star)) => {
                    self.at += 1;
                    node = RegexAst::Star(Box::new(node));
                }
                Some((_, Tok::Plus)) => {
                    self.at += 1;
                    node = RegexAst::Plus(Box::new(node));
                }
                Some((_, Tok::Question)) => {
                    self.at += 1;
                    node = RegexAst::Optional(Box::new(node));
                }
                _ => break,
            }
        }
        Ok(node)
    }

    fn atom(&mut self) -> Result<RegexAst, RegexError> {
        match self.peek().cloned() {
            Some((_, Tok::Word(w))) => {
                self.at += 1;
                let ids =
                    segment_word(&w, self.alphabet).ok_or(RegexError::UnknownToken { token: w })?;
                let mut lits: Vec<RegexAst> = ids.into_iter().map(RegexAst::Literal).collect();
                if lits.len() == 1 {
                    Ok(lits.pop().unwrap())
                } else {
                    Ok(RegexAst::Concat(lits))
                }
            }
            Some((open_pos, Tok::Open(open))) => {
                self.at += 1;
                let inner = self.alternation()?;
                let want = if open == '(' { ')' } else { '}' };
                match self.peek() {
                    Some(&(_, Tok::Close(c))) if c == want => {
                        self.at += 1;
                        Ok(RegexAst::Group(Box::new(inner)))
                    }
                    Some(&(pos, Tok::Close(c))) => Err(syntax(
                        pos,
                        format!("mismatched `{c}` closing group opened with `{open}`"),
                    )),
                    _ => Err(syntax(open_pos, format!("unbalanced `{open}`"))),
                }
            }
            Some((pos, _)) => Err(syntax(pos, "expected a literal or group")),
            None => Err(syntax(self.src_len, "expected a literal or group")),
        }
    }
}

/// Parse a pattern expression, resolving literals against `alphabet`.
pub fn parse_regex(src: &str, alphabet: &Alphabet) -> Result<RegexAst, RegexError> {
    let mut parser = Parser {
        toks: lex(src),
        at: 0,
        alphabet,
        src_len: src.len(),
    };
    let ast = parser.alternation()?;
    match parser.peek() {
        None => Ok(ast),
        Some(&(pos, Tok::Close(c))) => Err(syntax(pos, format!("unexpected `{c}`"))),
        Some(&(pos, _)) => Err(syntax(pos, "trailing input")),
    }
}

/// Thompson-style NFA with epsilon moves; internal to compilation but also
/// exercised directly by the determinization tests.
#[derive(Debug, Clone)]
pub(crate) struct EpsilonNfa {
    pub(crate) state_count: usize,
    pub(crate) start: usize,
    pub(crate) accept: usize,
    /// (from, Some(item) | None for epsilon, to)
    pub(crate) edges: Vec<(usize, Option<ItemId>, usize)>,
}

impl EpsilonNfa {
    fn fresh(&mut self) -> usize {
        self.state_count += 1;
        self.state_count - 1
    }

    fn closure(&self, set: &mut BTreeSet<usize>) {
        let mut stack: Vec<usize> = set.iter().copied().collect();
        while let Some(s) = stack.pop() {
            for &(from, label, to) in &self.edges {
                if from == s && label.is_none() && set.insert(to) {
                    stack.push(to);
                }
            }
        }
    }

    #[cfg(test)]
    pub(crate) fn accepts(&self, word: &[ItemId]) -> bool {
        let mut current = BTreeSet::from([self.start]);
        self.closure(&mut current);
        for &item in word {
            let mut next = BTreeSet::new();
            for &(from, label, to) in &self.edges {
                if label == Some(item) && current.contains(&from) {
                    next.insert(to);
                }
            }
            self.closure(&mut next);
            if next.is_empty() {
                return false;
            }
            current = next;
        }
        current.contains(&self.accept)
    }
}

pub(crate) fn thompson(ast: &RegexAst) -> EpsilonNfa {
    let mut nfa = EpsilonNfa {
        state_count: 0,
        start: 0,
        accept: 0,
        edges: Vec::new(),
    };
    let (s, t) = build(ast, &mut nfa);
    nfa.start = s;
    nfa.accept = t;
    nfa
}

fn build(ast: &RegexAst, nfa: &mut EpsilonNfa) -> (usize, usize) {
    match ast {
        RegexAst::Literal(id) => {
            let s = nfa.fresh();
            let t = nfa.fresh();
            nfa.edges.push((s, Some(*id), t));
            (s, t)
        }
        RegexAst::Concat(parts) => {
            if parts.is_empty() {
                let s = nfa.fresh();
                return (s, s);
            }
            let mut first = None;
            let mut prev_end = 0;
            for part in parts {
                let (s, t) = build(part, nfa);
                match first {
                    None => first = Some(s),
                    Some(_) => nfa.edges.push((prev_end, None, s)),
                }
                prev_end = t;
            }
            (first.unwrap(), prev_end)
        }
        RegexAst::Alternation(branches) => {
            let s = nfa.fresh();
            let t = nfa.fresh();
            for branch in branches {
                let (bs, bt) = build(branch, nfa);
                nfa.edges.push((s, None, bs));
                nfa.edges.push((bt, None, t));
            }
            (s, t)
        }
        RegexAst::Star(inner) => {
            let s = nfa.fresh();
            let t = nfa.fresh();
            let (is, it) = build(inner, nfa);
            nfa.edges.push((s, None, t));
            nfa.edges.push((s, None, is));
            nfa.edges.push((it, None, t));
            nfa.edges.push((it, None, is));
            (s, t)
        }
        RegexAst::Plus(inner) => {
            let s = nfa.fresh();
            let t = nfa.fresh();
            let (is, it) = build(inner, nfa);
            nfa.edges.push((s, None, is));
            nfa.edges.push((it, None, t));
            nfa.edges.push((it, None, is));
            (s, t)
        }
        RegexAst::Optional(inner) => {
            let s = nfa.fresh();
            let t = nfa.fresh();
            let (is, it) = build(inner, nfa);
            nfa.edges.push((s, None, is));
            nfa.edges.push((s, None, t));
            nfa.edges.push((it, None, t));
            (s, t)
        }
        RegexAst::Group(inner) => build(inner, nfa),
    }
}

/// Subset construction over item labels only.
pub(crate) fn determinize(nfa: &EpsilonNfa) -> Automaton {
    let mut start = BTreeSet::from([nfa.start]);
    nfa.closure(&mut start);

    let mut ids: HashMap<BTreeSet<usize>, usize> = HashMap::new();
    let mut worklist = vec![start.clone()];
    ids.insert(start, 0);
    let mut transitions = Vec::new();
    let mut accepting = Vec::new();

    while let Some(set) = worklist.pop() {
        let from = ids[&set];
        if set.contains(&nfa.accept) {
            accepting.push(from);
        }
        let mut by_item: BTreeMap<ItemId, BTreeSet<usize>> = BTreeMap::new();
        for &(f, label, to) in &nfa.edges {
            if let Some(item) = label {
                if set.contains(&f) {
                    by_item.entry(item).or_default().insert(to);
                }
            }
        }
        for (item, mut targets) in by_item {
            nfa.closure(&mut targets);
            let next_id = ids.len();
            let to = *ids.entry(targets.clone()).or_insert_with(|| {
                worklist.push(targets);
                next_id
            });
            transitions.push((from, Label::Item(item), to));
        }
    }
    Automaton::new(ids.len(), 0, accepting, transitions)
}

/// Append the padding closure: from every accepting state an `Eos` edge to a
/// dedicated accepting sink carrying an `Eos` self-loop, so accepted words
/// are exactly language words followed by any run of padding.
pub(crate) fn pad_close(dfa: &Automaton) -> Automaton {
    let sink = dfa.state_count();
    let mut transitions = dfa.transitions().to_vec();
    let mut accepting: Vec<usize> = dfa.accepting().iter().copied().collect();
    for &state in dfa.accepting() {
        transitions.push((state, Label::Eos, sink));
    }
    transitions.push((sink, Label::Eos, sink));
    accepting.push(sink);
    Automaton::new(sink + 1, dfa.initial(), accepting, transitions)
}

/// Compile a pattern expression into a deterministic, padding-closed
/// automaton over the database alphabet.
pub fn compile_regex(src: &str, alphabet: &Alphabet) -> Result<Automaton, RegexError> {
    let ast = parse_regex(src, alphabet)?;
    let nfa = thompson(&ast);
    Ok(pad_close(&determinize(&nfa)))
}
