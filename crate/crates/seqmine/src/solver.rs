//! A minimal finite-domain CSP core: bitset domains with trail-based
//! backtracking, event-driven propagation to fixpoint, depth-first
//! enumeration of all solutions, and branch-and-bound minimization.

use std::collections::VecDeque;

use crate::bits::BitSet;

/// Domain values are small dense integers. Pattern variables range over
/// item ids plus the end-of-sequence padding value; booleans over `{0, 1}`.
pub type Value = u32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct VarId(pub u32);

impl VarId {
    fn index(self) -> usize {
        self.0 as usize
    }
}

/// Marker for a wiped-out domain or a violated constraint.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Failed;

pub type PropResult = Result<(), Failed>;

/// A filtering algorithm attached to a set of variables.
pub trait Propagator {
    /// Remove values that cannot appear in any satisfying assignment of the
    /// constraint given the current domains. Must be sound: never remove a
    /// value that some solution of the constraint uses.
    fn propagate(&mut self, store: &mut Store) -> PropResult;

    /// Decide the constraint on a full assignment.
    fn check(&self, store: &Store) -> bool;
}

/// Variable domains plus the backtracking trail and the propagation queue.
pub struct Store {
    domains: Vec<BitSet>,
    sizes: Vec<u32>,
    trail: Vec<(u32, Value)>,
    level_marks: Vec<usize>,
    watchers: Vec<Vec<u32>>,
    queue: VecDeque<u32>,
    queued: Vec<bool>,
    root_failed: bool,
}

impl Store {
    fn new() -> Store {
        Store {
            domains: Vec::new(),
            sizes: Vec::new(),
            trail: Vec::new(),
            level_marks: Vec::new(),
            watchers: Vec::new(),
            queue: VecDeque::new(),
            queued: Vec::new(),
            root_failed: false,
        }
    }

    pub fn new_var(&mut self, capacity: usize, values: impl IntoIterator<Item = Value>) -> VarId {
        let mut dom = BitSet::empty(capacity);
        let mut size = 0;
        for v in values {
            if !dom.contains(v as usize) {
                dom.insert(v as usize);
                size += 1;
            }
        }
        if size == 0 {
            self.root_failed = true;
        }
        self.domains.push(dom);
        self.sizes.push(size);
        self.watchers.push(Vec::new());
        VarId(self.domains.len() as u32 - 1)
    }

    pub fn num_vars(&self) -> usize {
        self.domains.len()
    }

    #[inline]
    pub fn contains(&self, var: VarId, val: Value) -> bool {
        self.domains[var.index()].contains(val as usize)
    }

    #[inline]
    pub fn size(&self, var: VarId) -> usize {
        self.sizes[var.index()] as usize
    }

    #[inline]
    pub fn is_assigned(&self, var: VarId) -> bool {
        self.sizes[var.index()] == 1
    }

    /// The single value of an assigned variable.
    pub fn value(&self, var: VarId) -> Value {
        debug_assert!(self.is_assigned(var));
        self.domains[var.index()].iter().next().unwrap() as Value
    }

    pub fn domain_values(&self, var: VarId) -> Vec<Value> {
        self.domains[var.index()]
            .iter()
            .map(|v| v as Value)
            .collect()
    }

    pub fn domain(&self, var: VarId) -> &BitSet {
        &self.domains[var.index()]
    }

    fn schedule_watchers(&mut self, var: VarId) {
        for i in 0..self.watchers[var.index()].len() {
            let pid = self.watchers[var.index()][i];
            if !self.queued[pid as usize] {
                self.queued[pid as usize] = true;
                self.queue.push_back(pid);
            }
        }
    }

    fn note_failure(&mut self) {
        if self.level_marks.is_empty() {
            self.root_failed = true;
        }
    }

    /// Mark the model unsatisfiable from the root; for post-time constraints
    /// that cannot be represented over the declared variables.
    pub fn fail_root(&mut self) {
        self.root_failed = true;
    }

    /// Remove `val` from the domain of `var`. Removing the last value fails
    /// and leaves the domain untouched.
    pub fn remove(&mut self, var: VarId, val: Value) -> PropResult {
        if !self.contains(var, val) {
            return Ok(());
        }
        if self.sizes[var.index()] == 1 {
            self.note_failure();
            return Err(Failed);
        }
        self.domains[var.index()].remove(val as usize);
        self.sizes[var.index()] -= 1;
        self.trail.push((var.0, val));
        self.schedule_watchers(var);
        Ok(())
    }

    /// Reduce the domain of `var` to exactly `val`.
    pub fn assign(&mut self, var: VarId, val: Value) -> PropResult {
        if !self.contains(var, val) {
            self.note_failure();
            return Err(Failed);
        }
        if self.sizes[var.index()] == 1 {
            return Ok(());
        }
        let others: Vec<Value> = self.domains[var.index()]
            .iter()
            .map(|v| v as Value)
            .filter(|&v| v != val)
            .collect();
        for v in others {
            self.domains[var.index()].remove(v as usize);
            self.sizes[var.index()] -= 1;
            self.trail.push((var.0, v));
        }
        self.schedule_watchers(var);
        Ok(())
    }

    pub fn push_level(&mut self) {
        self.level_marks.push(self.trail.len());
    }

    /// Undo every removal logged since the matching `push_level`.
    pub fn pop_level(&mut self) {
        let mark = self.level_marks.pop().expect("pop without matching push");
        while self.trail.len() > mark {
            let (var, val) = self.trail.pop().unwrap();
            self.domains[var as usize].insert(val as usize);
            self.sizes[var as usize] += 1;
        }
    }

    fn clear_queue(&mut self) {
        while let Some(pid) = self.queue.pop_front() {
            self.queued[pid as usize] = false;
        }
    }

    #[cfg(test)]
    pub(crate) fn snapshot(&self) -> Vec<BitSet> {
        self.domains.clone()
    }
}

/// Why the objective exists: closed-pattern mining minimizes how many
/// pattern variables are padded out.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Objective {
    MinimizeEosCount,
}

/// Search statistics for one run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub nodes: u64,
    pub fails: u64,
    pub solutions: u64,
}

impl SearchStats {
    pub fn absorb(&mut self, other: SearchStats) {
        self.nodes += other.nodes;
        self.fails += other.fails;
        self.solutions += other.solutions;
    }
}

/// One emitted assignment, in canonical form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solution {
    /// Pattern variable values with the trailing padding stripped.
    pub pattern: Vec<Value>,
    /// Bit `s` set iff support variable `s` took value 1.
    pub supports: BitSet,
    /// Padding count, present when the model carries an objective.
    pub objective_value: Option<usize>,
}

/// A CSP over pattern variables and reified support booleans.
pub struct Model {
    store: Store,
    propagators: Vec<Box<dyn Propagator>>,
    pattern_vars: Vec<VarId>,
    support_vars: Vec<VarId>,
    eos: Value,
    objective: Option<Objective>,
    /// When set, every backtrack verifies that domains were restored
    /// bit-exactly to their pre-branch state.
    pub check_restore: bool,
}

impl Model {
    /// `eos` is the padding value; pattern variables range over `0..=eos`.
    pub fn new(eos: Value) -> Model {
        Model {
            store: Store::new(),
            propagators: Vec::new(),
            pattern_vars: Vec::new(),
            support_vars: Vec::new(),
            eos,
            objective: None,
            check_restore: false,
        }
    }

    pub fn eos(&self) -> Value {
        self.eos
    }

    pub fn store(&self) -> &Store {
        &self.store
    }

    pub fn store_mut(&mut self) -> &mut Store {
        &mut self.store
    }

    pub fn pattern_vars(&self) -> &[VarId] {
        &self.pattern_vars
    }

    pub fn support_vars(&self) -> &[VarId] {
        &self.support_vars
    }

    /// New pattern variable over the given values (capacity `eos + 1`).
    pub fn new_pattern_var(&mut self, values: impl IntoIterator<Item = Value>) -> VarId {
        let var = self.store.new_var(self.eos as usize + 1, values);
        self.pattern_vars.push(var);
        var
    }

    pub fn new_bool_var(&mut self) -> VarId {
        self.store.new_var(2, [0, 1])
    }

    pub fn new_support_var(&mut self) -> VarId {
        let var = self.new_bool_var();
        self.support_vars.push(var);
        var
    }

    /// Install a propagator, watching the given variables; it is scheduled
    /// for the next propagation immediately.
    pub fn post(&mut self, propagator: Box<dyn Propagator>, watch: &[VarId]) {
        let pid = self.propagators.len() as u32;
        self.propagators.push(propagator);
        self.store.queued.push(false);
        for &v in watch {
            self.store.watchers[v.index()].push(pid);
        }
        self.store.queued[pid as usize] = true;
        self.store.queue.push_back(pid);
    }

    pub fn set_objective(&mut self, objective: Objective) {
        self.objective = Some(objective);
    }

    pub fn objective(&self) -> Option<Objective> {
        self.objective
    }

    /// Run all scheduled propagators to fixpoint.
    pub fn propagate(&mut self) -> PropResult {
        if self.store.root_failed {
            self.store.clear_queue();
            return Err(Failed);
        }
        while let Some(pid) = self.store.queue.pop_front() {
            self.store.queued[pid as usize] = false;
            if self.propagators[pid as usize]
                .propagate(&mut self.store)
                .is_err()
            {
                self.store.clear_queue();
                return Err(Failed);
            }
        }
        Ok(())
    }

    /// Schedule every propagator; used together with [`Model::propagate`] to
    /// probe fixpoint idempotence.
    pub fn reschedule_all(&mut self) {
        for pid in 0..self.propagators.len() as u32 {
            if !self.store.queued[pid as usize] {
                self.store.queued[pid as usize] = true;
                self.store.queue.push_back(pid);
            }
        }
    }

    /// Enumerate every solution exactly once, depth-first over the pattern
    /// variables in index order, values ascending (padding value last).
    pub fn solve_all(&mut self, emit: &mut dyn FnMut(&Solution)) -> SearchStats {
        debug_assert!(self.objective.is_none(), "solve_all on an objective model");
        let mut stats = SearchStats::default();
        self.search(&mut stats, &mut |sol, _| emit(sol), &mut None);
        stats
    }

    /// Branch-and-bound minimization of the padding count. Returns a
    /// solution of minimal objective value, or `None` when unsatisfiable.
    pub fn solve_minimize(&mut self) -> (Option<Solution>, SearchStats) {
        debug_assert!(
            self.objective.is_some(),
            "solve_minimize needs an objective"
        );
        let mut stats = SearchStats::default();
        // `incumbent` drives bound pruning inside the search; `best` keeps
        // the witness for the same bound.
        let mut best: Option<(usize, Solution)> = None;
        let mut incumbent: Option<usize> = None;
        self.search(
            &mut stats,
            &mut |sol, obj| {
                if best.as_ref().is_none_or(|(b, _)| obj < *b) {
                    best = Some((obj, sol.clone()));
                }
            },
            &mut incumbent,
        );
        (best.map(|(_, s)| s), stats)
    }

    fn search(
        &mut self,
        stats: &mut SearchStats,
        on_solution: &mut dyn FnMut(&Solution, usize),
        incumbent: &mut Option<usize>,
    ) {
        stats.nodes += 1;
        if self.propagate().is_err() {
            stats.fails += 1;
            return;
        }
        if self.objective.is_some() {
            if let Some(bound) = *incumbent {
                if self.objective_lower_bound() >= bound {
                    stats.fails += 1;
                    return;
                }
            }
        }
        let branch = self
            .pattern_vars
            .iter()
            .copied()
            .find(|&v| !self.store.is_assigned(v));
        match branch {
            None => {
                debug_assert!(
                    (0..self.store.num_vars()).all(|i| self.store.is_assigned(VarId(i as u32))),
                    "pattern variables assigned but some auxiliary variable is not"
                );
                if !self.final_check() {
                    stats.fails += 1;
                    return;
                }
                stats.solutions += 1;
                let sol = self.extract_solution();
                let obj = self.eos_count();
                if self.objective.is_some() && incumbent.is_none_or(|b| obj < b) {
                    *incumbent = Some(obj);
                }
                on_solution(&sol, obj);
            }
            Some(var) => {
                let values = self.store.domain_values(var);
                let snapshot = if self.check_restore {
                    Some((self.store.snapshot_domains(), self.store.sizes.clone()))
                } else {
                    None
                };
                for val in values {
                    self.store.push_level();
                    self.store
                        .assign(var, val)
                        .expect("branch value vanished from domain");
                    self.search(stats, on_solution, incumbent);
                    self.store.pop_level();
                    if let Some((doms, sizes)) = &snapshot {
                        assert!(
                            self.store.domains == *doms && self.store.sizes == *sizes,
                            "backtracking did not restore domains bit-exactly"
                        );
                    }
                }
            }
        }
    }

    /// Every propagator's decision on the current full assignment.
    fn final_check(&self) -> bool {
        self.propagators.iter().all(|p| p.check(&self.store))
    }

    fn eos_count(&self) -> usize {
        self.pattern_vars
            .iter()
            .filter(|&&v| self.store.value(v) == self.eos)
            .count()
    }

    /// Pattern variables already locked to the padding value.
    fn objective_lower_bound(&self) -> usize {
        self.pattern_vars
            .iter()
            .filter(|&&v| self.store.is_assigned(v) && self.store.value(v) == self.eos)
            .count()
    }

    fn extract_solution(&self) -> Solution {
        let mut pattern = Vec::new();
        let mut seen_eos = false;
        for &v in &self.pattern_vars {
            let val = self.store.value(v);
            if val == self.eos {
                seen_eos = true;
            } else {
                debug_assert!(!seen_eos, "solution not in canonical padded form");
                pattern.push(val);
            }
        }
        let mut supports = BitSet::empty(self.support_vars.len().max(1));
        for (i, &v) in self.support_vars.iter().enumerate() {
            if self.store.value(v) == 1 {
                supports.insert(i);
            }
        }
        Solution {
            pattern,
            supports,
            objective_value: self.objective.map(|_| self.eos_count()),
        }
    }
}

impl Store {
    fn snapshot_domains(&self) -> Vec<BitSet> {
        self.domains.clone()
    }
}
