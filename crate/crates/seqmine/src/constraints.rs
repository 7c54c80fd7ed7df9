//! The propagator library: `Regular` over a layered graph (plain and
//! reified), `Among` via 0/1 channeling, boolean sum thresholds, size
//! pinning, padding-suffix channeling, and dynamic blocking constraints.

use crate::automata::{Automaton, Label};
use crate::bits::BitSet;
use crate::seqdb::ItemId;
use crate::solver::{Failed, Model, PropResult, Propagator, Store, Value, VarId};

/// Size constraint kinds over the pattern variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SizeConstraint {
    Exact(usize),
    Min(usize),
    Max(usize),
}

fn label_value(label: Label, eos: Value) -> Value {
    match label {
        Label::Item(id) => id.0,
        Label::Eos => eos,
    }
}

/// An automaton reindexed for fast layered passes: transitions grouped by
/// solver value, plus whole-label step tables for layers whose domain is
/// still untouched.
struct IndexedAutomaton {
    state_count: usize,
    initial: usize,
    accepting: BitSet,
    /// `by_value[v]` lists the `(from, to)` pairs labeled `v`.
    by_value: Vec<Vec<(u32, u32)>>,
    /// Successors of each state over all labels of the automaton.
    step_all: Vec<BitSet>,
    /// Predecessors of each state over all labels of the automaton.
    pred_all: Vec<BitSet>,
    /// States from which any number (>= 1) of padding labels reaches an
    /// accepting state: an accepting padding self-loop or one hop from it.
    pad_ok: BitSet,
}

impl IndexedAutomaton {
    fn new(automaton: &Automaton, eos: Value) -> IndexedAutomaton {
        let n = automaton.state_count();
        let mut by_value = vec![Vec::new(); eos as usize + 1];
        let mut step_all = vec![BitSet::empty(n); n];
        let mut pred_all = vec![BitSet::empty(n); n];
        for &(from, label, to) in automaton.transitions() {
            let v = label_value(label, eos);
            assert!(
                (v as usize) < by_value.len(),
                "automaton label outside the model value range"
            );
            by_value[v as usize].push((from as u32, to as u32));
            step_all[from].insert(to);
            pred_all[to].insert(from);
        }
        let mut accepting = BitSet::empty(n);
        for &s in automaton.accepting() {
            accepting.insert(s);
        }
        let mut loops = BitSet::empty(n);
        for &(from, label, to) in automaton.transitions() {
            if label == Label::Eos && from == to && accepting.contains(from) {
                loops.insert(from);
            }
        }
        let mut pad_ok = loops.clone();
        for &(from, label, to) in automaton.transitions() {
            if label == Label::Eos && loops.contains(to) {
                pad_ok.insert(from);
            }
        }
        IndexedAutomaton {
            state_count: n,
            initial: automaton.initial(),
            accepting,
            by_value,
            step_all,
            pred_all,
            pad_ok,
        }
    }

    fn labels(&self) -> impl Iterator<Item = Value> + '_ {
        self.by_value
            .iter()
            .enumerate()
            .filter(|(_, pairs)| !pairs.is_empty())
            .map(|(v, _)| v as Value)
    }
}

enum PathDecision {
    Path,
    NoPath,
}

/// `Regular(vars, automaton)`, optionally reified into a boolean.
///
/// With the boolean at 1 (or absent) the layered graph filters the variable
/// domains to exactly the values lying on some accepted word. With the
/// boolean unassigned only dis-entailment is detected (no reachable
/// accepting path forces it to 0) plus entailment once all variables are
/// assigned. With the boolean at 0 the complement is not filtered; the word
/// is rejected by the full-assignment check.
struct RegularPropagator {
    reified: Option<VarId>,
    vars: Vec<VarId>,
    eos: Value,
    aut: IndexedAutomaton,
    /// Domain size of each variable when the constraint was posted; a layer
    /// whose size still matches can step over precomputed tables.
    full_size: Vec<usize>,
    /// Whether the post-time domain covered every automaton label, which is
    /// what makes the whole-label step tables exact.
    full_covers: Vec<bool>,
    forward: Vec<BitSet>,
    backward: Vec<BitSet>,
}

impl RegularPropagator {
    fn new(
        reified: Option<VarId>,
        vars: &[VarId],
        automaton: &Automaton,
        store: &Store,
        eos: Value,
    ) -> Self {
        let aut = IndexedAutomaton::new(automaton, eos);
        let full_size: Vec<usize> = vars.iter().map(|&v| store.size(v)).collect();
        let full_covers: Vec<bool> = vars
            .iter()
            .map(|&v| aut.labels().all(|l| store.contains(v, l)))
            .collect();
        let layers = vars.len() + 1;
        RegularPropagator {
            reified,
            vars: vars.to_vec(),
            eos,
            full_size,
            full_covers,
            forward: vec![BitSet::empty(aut.state_count); layers],
            backward: vec![BitSet::empty(aut.state_count); layers],
            aut,
        }
    }

    fn step_forward(&self, store: &Store, layer: usize, src: &BitSet, dst: &mut BitSet) {
        dst.clear();
        let var = self.vars[layer];
        if self.full_covers[layer] && store.size(var) == self.full_size[layer] {
            for q in src.iter() {
                dst.union_with(&self.aut.step_all[q]);
            }
        } else {
            for v in store.domain(var).iter() {
                for &(from, to) in &self.aut.by_value[v] {
                    if src.contains(from as usize) {
                        dst.insert(to as usize);
                    }
                }
            }
        }
    }

    fn step_backward(&self, store: &Store, layer: usize, src: &BitSet, dst: &mut BitSet) {
        dst.clear();
        let var = self.vars[layer];
        if self.full_covers[layer] && store.size(var) == self.full_size[layer] {
            for q in src.iter() {
                dst.union_with(&self.aut.pred_all[q]);
            }
        } else {
            for v in store.domain(var).iter() {
                for &(from, to) in &self.aut.by_value[v] {
                    if src.contains(to as usize) {
                        dst.insert(from as usize);
                    }
                }
            }
        }
    }

    /// Is there any accepting path through the layered graph under the
    /// current domains? Exploits padding structure: once every remaining
    /// layer still allows the padding label, reaching a pad-absorbing state
    /// settles the question without unrolling the tail.
    fn decide_path(&mut self, store: &Store) -> PathDecision {
        let len = self.vars.len();
        let mut prefix_end = len;
        while prefix_end > 0 && store.contains(self.vars[prefix_end - 1], self.eos) {
            prefix_end -= 1;
        }
        let mut forward = std::mem::take(&mut self.forward);
        forward[0].clear();
        forward[0].insert(self.aut.initial);
        let mut decision = None;
        for layer in 0..len {
            if layer == prefix_end && forward[layer].intersects(&self.aut.pad_ok) {
                decision = Some(PathDecision::Path);
                break;
            }
            let (src, rest) = forward.split_at_mut(layer + 1);
            self.step_forward(store, layer, &src[layer], &mut rest[0]);
            if forward[layer + 1].is_empty() {
                decision = Some(PathDecision::NoPath);
                break;
            }
        }
        let decision = decision.unwrap_or_else(|| {
            if forward[len].intersects(&self.aut.accepting) {
                PathDecision::Path
            } else {
                PathDecision::NoPath
            }
        });
        self.forward = forward;
        decision
    }

    /// Full layered-graph filtering: fails when no accepting path exists,
    /// otherwise keeps exactly the values carried by some surviving arc.
    fn filter(&mut self, store: &mut Store) -> PropResult {
        let len = self.vars.len();
        let mut forward = std::mem::take(&mut self.forward);
        let mut backward = std::mem::take(&mut self.backward);
        forward[0].clear();
        forward[0].insert(self.aut.initial);
        for layer in 0..len {
            let (src, rest) = forward.split_at_mut(layer + 1);
            self.step_forward(store, layer, &src[layer], &mut rest[0]);
        }
        let ok = forward[len].intersects(&self.aut.accepting);
        if !ok {
            self.forward = forward;
            self.backward = backward;
            return Err(Failed);
        }
        backward[len].clear();
        backward[len].union_with(&self.aut.accepting);
        for layer in (0..len).rev() {
            let (head, tail) = backward.split_at_mut(layer + 1);
            self.step_backward(store, layer, &tail[0], &mut head[layer]);
        }
        let mut result = Ok(());
        'layers: for layer in 0..len {
            let var = self.vars[layer];
            let values: Vec<Value> = store.domain_values(var);
            for v in values {
                let supported = self.aut.by_value[v as usize].iter().any(|&(from, to)| {
                    forward[layer].contains(from as usize)
                        && backward[layer + 1].contains(to as usize)
                });
                if !supported && store.remove(var, v).is_err() {
                    result = Err(Failed);
                    break 'layers;
                }
            }
        }
        self.forward = forward;
        self.backward = backward;
        result
    }

    fn simulate_word(&self, store: &Store) -> bool {
        let mut current = BitSet::empty(self.aut.state_count);
        current.insert(self.aut.initial);
        let mut next = BitSet::empty(self.aut.state_count);
        for &var in &self.vars {
            let v = store.value(var);
            next.clear();
            for &(from, to) in &self.aut.by_value[v as usize] {
                if current.contains(from as usize) {
                    next.insert(to as usize);
                }
            }
            if next.is_empty() {
                return false;
            }
            std::mem::swap(&mut current, &mut next);
        }
        current.intersects(&self.aut.accepting)
    }

    fn all_assigned(&self, store: &Store) -> bool {
        self.vars.iter().all(|&v| store.is_assigned(v))
    }
}

impl Propagator for RegularPropagator {
    fn propagate(&mut self, store: &mut Store) -> PropResult {
        match self.reified {
            None => self.filter(store),
            Some(b) if store.is_assigned(b) => {
                if store.value(b) == 1 {
                    self.filter(store)
                } else if self.all_assigned(store) && self.simulate_word(store) {
                    Err(Failed)
                } else {
                    Ok(())
                }
            }
            Some(b) => match self.decide_path(store) {
                PathDecision::NoPath => store.assign(b, 0),
                PathDecision::Path => {
                    if self.all_assigned(store) {
                        store.assign(b, 1)
                    } else {
                        Ok(())
                    }
                }
            },
        }
    }

    fn check(&self, store: &Store) -> bool {
        let accepted = self.simulate_word(store);
        match self.reified {
            None => accepted,
            Some(b) => (store.value(b) == 1) == accepted,
        }
    }
}

/// `Regular(vars, automaton)`: the word spelled by `vars` must be accepted.
pub fn post_regular(model: &mut Model, vars: &[VarId], automaton: &Automaton) {
    let eos = model.eos();
    let prop = RegularPropagator::new(None, vars, automaton, model.store(), eos);
    model.post(Box::new(prop), vars);
}

/// `b = 1 <-> Regular(vars, automaton)` for a padding-closed automaton.
pub fn post_reified_regular(model: &mut Model, b: VarId, vars: &[VarId], automaton: &Automaton) {
    let eos = model.eos();
    let prop = RegularPropagator::new(Some(b), vars, automaton, model.store(), eos);
    let mut watch = vars.to_vec();
    watch.push(b);
    model.post(Box::new(prop), &watch);
}

/// `sum(s_vars) >= minsup` over booleans.
struct FrequencyPropagator {
    s_vars: Vec<VarId>,
    minsup: usize,
}

impl Propagator for FrequencyPropagator {
    fn propagate(&mut self, store: &mut Store) -> PropResult {
        let mut ones = 0;
        let mut open = Vec::new();
        for &v in &self.s_vars {
            if store.is_assigned(v) {
                if store.value(v) == 1 {
                    ones += 1;
                }
            } else {
                open.push(v);
            }
        }
        if ones + open.len() < self.minsup {
            return Err(Failed);
        }
        if ones + open.len() == self.minsup {
            for v in open {
                store.assign(v, 1)?;
            }
        }
        Ok(())
    }

    fn check(&self, store: &Store) -> bool {
        self.s_vars.iter().filter(|&&v| store.value(v) == 1).count() >= self.minsup
    }
}

/// Post the minimum-frequency constraint `sum(s_vars) >= minsup`.
pub fn post_frequency(model: &mut Model, s_vars: &[VarId], minsup: usize) {
    model.post(
        Box::new(FrequencyPropagator {
            s_vars: s_vars.to_vec(),
            minsup,
        }),
        s_vars,
    );
}

/// `b = 1 <-> var takes a value from `set``.
struct ChannelPropagator {
    var: VarId,
    b: VarId,
    set: BitSet,
}

impl ChannelPropagator {
    fn dom_subset_of_set(&self, store: &Store) -> bool {
        store.domain(self.var).iter().all(|v| self.set.contains(v))
    }

    fn dom_disjoint_from_set(&self, store: &Store) -> bool {
        !store.domain(self.var).intersects(&self.set)
    }
}

impl Propagator for ChannelPropagator {
    fn propagate(&mut self, store: &mut Store) -> PropResult {
        if store.is_assigned(self.b) {
            let inside = store.value(self.b) == 1;
            let values = store.domain_values(self.var);
            for v in values {
                if self.set.contains(v as usize) != inside {
                    store.remove(self.var, v)?;
                }
            }
        } else if self.dom_subset_of_set(store) {
            store.assign(self.b, 1)?;
        } else if self.dom_disjoint_from_set(store) {
            store.assign(self.b, 0)?;
        }
        Ok(())
    }

    fn check(&self, store: &Store) -> bool {
        (store.value(self.b) == 1) == self.set.contains(store.value(self.var) as usize)
    }
}

/// `lo <= sum(vars) <= hi` over booleans.
struct BoolSumRangePropagator {
    vars: Vec<VarId>,
    lo: usize,
    hi: usize,
}

impl Propagator for BoolSumRangePropagator {
    fn propagate(&mut self, store: &mut Store) -> PropResult {
        let mut ones = 0;
        let mut open = Vec::new();
        for &v in &self.vars {
            if store.is_assigned(v) {
                if store.value(v) == 1 {
                    ones += 1;
                }
            } else {
                open.push(v);
            }
        }
        if ones > self.hi || ones + open.len() < self.lo {
            return Err(Failed);
        }
        if ones == self.hi {
            for &v in &open {
                store.assign(v, 0)?;
            }
        }
        if ones + open.len() == self.lo {
            for &v in &open {
                store.assign(v, 1)?;
            }
        }
        Ok(())
    }

    fn check(&self, store: &Store) -> bool {
        let ones = self.vars.iter().filter(|&&v| store.value(v) == 1).count();
        self.lo <= ones && ones <= self.hi
    }
}

/// `Among(vars, v_set, lo, hi)`: channel each variable's membership of
/// `v_set` into a fresh boolean and bound the boolean sum.
pub fn post_among(model: &mut Model, vars: &[VarId], v_set: &[ItemId], lo: usize, hi: usize) {
    let mut set = BitSet::empty(model.eos() as usize + 1);
    for &item in v_set {
        set.insert(item.0 as usize);
    }
    let mut bools = Vec::with_capacity(vars.len());
    for &var in vars {
        let b = model.new_bool_var();
        bools.push(b);
        model.post(
            Box::new(ChannelPropagator {
                var,
                b,
                set: set.clone(),
            }),
            &[var, b],
        );
    }
    model.post(
        Box::new(BoolSumRangePropagator {
            vars: bools.clone(),
            lo,
            hi,
        }),
        &bools,
    );
}

/// Pin domains according to a size constraint. Runs once at post time; a
/// wiped-out domain marks the model unsatisfiable at the root, as does a
/// minimum or exact size exceeding the variable count.
pub fn post_size(model: &mut Model, vars: &[VarId], kind: SizeConstraint) -> PropResult {
    let eos = model.eos();
    let store = model.store_mut();
    match kind {
        SizeConstraint::Exact(k) | SizeConstraint::Min(k) if k > vars.len() => {
            store.fail_root();
            return Err(Failed);
        }
        SizeConstraint::Exact(k) => {
            for &v in &vars[..k] {
                store.remove(v, eos)?;
            }
            for &v in &vars[k..] {
                store.assign(v, eos)?;
            }
        }
        SizeConstraint::Min(k) => {
            for &v in &vars[..k] {
                store.remove(v, eos)?;
            }
        }
        SizeConstraint::Max(k) => {
            for &v in &vars[k.min(vars.len())..] {
                store.assign(v, eos)?;
            }
        }
    }
    Ok(())
}

/// Canonical padded form: a padding value is followed only by padding.
struct EosSuffixPropagator {
    vars: Vec<VarId>,
    eos: Value,
}

impl Propagator for EosSuffixPropagator {
    fn propagate(&mut self, store: &mut Store) -> PropResult {
        let n = self.vars.len();
        for i in 0..n.saturating_sub(1) {
            let v = self.vars[i];
            if store.is_assigned(v) && store.value(v) == self.eos {
                store.assign(self.vars[i + 1], self.eos)?;
            }
        }
        for i in (0..n.saturating_sub(1)).rev() {
            if !store.contains(self.vars[i + 1], self.eos) {
                store.remove(self.vars[i], self.eos)?;
            }
        }
        Ok(())
    }

    fn check(&self, store: &Store) -> bool {
        let mut seen_eos = false;
        for &v in &self.vars {
            let is_eos = store.value(v) == self.eos;
            if seen_eos && !is_eos {
                return false;
            }
            seen_eos |= is_eos;
        }
        true
    }
}

/// Post the canonical-form channeling `P_i = EOS => P_{i+1} = EOS`.
pub fn post_eos_suffix(model: &mut Model, vars: &[VarId]) {
    let eos = model.eos();
    model.post(
        Box::new(EosSuffixPropagator {
            vars: vars.to_vec(),
            eos,
        }),
        vars,
    );
}

/// Excludes one full assignment; propagates once all but one variable match.
struct ForbidPropagator {
    vars: Vec<VarId>,
    target: Vec<Value>,
}

impl Propagator for ForbidPropagator {
    fn propagate(&mut self, store: &mut Store) -> PropResult {
        let mut open = None;
        for (i, &v) in self.vars.iter().enumerate() {
            if store.is_assigned(v) {
                if store.value(v) != self.target[i] {
                    return Ok(());
                }
            } else if !store.contains(v, self.target[i]) {
                return Ok(());
            } else {
                if open.is_some() {
                    return Ok(());
                }
                open = Some(i);
            }
        }
        match open {
            None => Err(Failed),
            Some(i) => store.remove(self.vars[i], self.target[i]),
        }
    }

    fn check(&self, store: &Store) -> bool {
        self.vars
            .iter()
            .enumerate()
            .any(|(i, &v)| store.value(v) != self.target[i])
    }
}

/// Dynamically exclude the canonical pattern (padded with the model's
/// padding value) from future solutions.
pub fn post_forbid(model: &mut Model, vars: &[VarId], pattern: &[Value]) {
    assert!(pattern.len() <= vars.len());
    let mut target = pattern.to_vec();
    target.resize(vars.len(), model.eos());
    model.post(
        Box::new(ForbidPropagator {
            vars: vars.to_vec(),
            target,
        }),
        vars,
    );
}
