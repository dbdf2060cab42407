//! Conflict-driven stable-model search over a completed program.
//!
//! Two watched literals, first-UIP learning, activity-based branching with
//! false polarity, Luby restarts, and lazy loop nogoods for non-tight
//! programs. Assumptions (active guard selectors and an optional falsified
//! atom) are pseudo-decisions on the lowest levels.

mod heap;
mod restart;

use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::completion::{unfounded_check, ClauseSet, StabilityCheck};
use crate::lit::{normalize_clause, Lit, Var};
use crate::program::{Atom, Interpretation, Program};

use heap::VarHeap;
pub use restart::{luby, RestartSchedule};

const VAR_DECAY: f64 = 0.95;
const CLAUSE_DECAY: f64 = 0.999;
const RESCALE_LIMIT: f64 = 1e100;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolveOutcome {
    Model(Interpretation),
    Unsat,
    /// Only from [`Engine::compute_up_to_next_restart`].
    Restarted,
    /// Cancelled or out of conflict budget.
    Interrupted,
}

/// Branching restriction for one call.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Restriction {
    All,
    /// Search for a stable model in which the atom is false.
    Falsify(Atom),
}

#[derive(Debug, Clone)]
pub struct EngineOptions {
    /// Luby base in conflicts; `None` disables restarts.
    pub restart_base: Option<u64>,
    pub seed: u64,
    pub random_branch_freq: f64,
    /// Total conflicts over the engine's lifetime.
    pub conflict_budget: Option<u64>,
    pub cancel: Vec<Arc<AtomicBool>>,
}

impl Default for EngineOptions {
    fn default() -> Self {
        EngineOptions {
            restart_base: Some(32),
            seed: 0,
            random_branch_freq: 0.02,
            conflict_budget: None,
            cancel: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EngineStats {
    pub conflicts: u64,
    pub decisions: u64,
    pub propagations: u64,
    pub restarts: u64,
    pub learned: u64,
    pub loop_nogoods: u64,
}

/// Handle of a removable group of clauses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Guard(Var);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Mode {
    Complete,
    UpToRestart,
}

#[derive(Debug, Clone)]
struct Clause {
    lits: Vec<Lit>,
    learnt: bool,
    deleted: bool,
    activity: f64,
}

#[derive(Debug, Clone, Copy)]
struct Watcher {
    clause: usize,
    blocker: Lit,
}

const UNDEF: i8 = 0;
const TRUE: i8 = 1;
const FALSE: i8 = -1;
const NO_REASON: usize = usize::MAX;

#[derive(Debug, Clone)]
pub struct Engine {
    program: Program,
    tight: bool,
    base_vars: usize,
    num_atoms: usize,
    eliminated: Vec<bool>,
    reconstruction: Vec<(Var, Vec<Vec<Lit>>)>,
    selector: Vec<bool>,

    assigns: Vec<i8>,
    level: Vec<u32>,
    reason: Vec<usize>,
    trail: Vec<Lit>,
    trail_lim: Vec<usize>,
    qhead: usize,

    clauses: Vec<Clause>,
    watches: Vec<Vec<Watcher>>,
    learnt_count: usize,
    max_learnts: f64,
    learned_units: Vec<Lit>,

    activity: Vec<f64>,
    var_inc: f64,
    clause_inc: f64,
    heap: VarHeap,
    rng: ChaCha8Rng,
    random_branch_freq: f64,
    seen: Vec<bool>,

    restart: RestartSchedule,
    conflict_budget: Option<u64>,
    cancel: Vec<Arc<AtomicBool>>,
    active_guards: Vec<Var>,
    outbox: Vec<Vec<Lit>>,
    ok: bool,
    stats: EngineStats,
}

impl Engine {
    pub fn new(program: &Program, clauses: ClauseSet, options: EngineOptions) -> Engine {
        let n = clauses.num_vars;
        let mut engine = Engine {
            program: program.clone(),
            tight: clauses.is_tight(),
            base_vars: n,
            num_atoms: clauses.num_atoms,
            eliminated: clauses.eliminated.clone(),
            reconstruction: clauses.reconstruction.clone(),
            selector: vec![false; n],
            assigns: vec![UNDEF; n],
            level: vec![0; n],
            reason: vec![NO_REASON; n],
            trail: Vec::with_capacity(n),
            trail_lim: Vec::new(),
            qhead: 0,
            clauses: Vec::with_capacity(clauses.clauses.len()),
            watches: vec![Vec::new(); 2 * n],
            learnt_count: 0,
            max_learnts: (clauses.clauses.len() as f64 / 3.0).max(100.0),
            learned_units: Vec::new(),
            activity: vec![0.0; n],
            var_inc: 1.0,
            clause_inc: 1.0,
            heap: VarHeap::default(),
            rng: ChaCha8Rng::seed_from_u64(options.seed),
            random_branch_freq: options.random_branch_freq,
            seen: vec![false; n],
            restart: RestartSchedule::new(options.restart_base),
            conflict_budget: options.conflict_budget,
            cancel: options.cancel,
            active_guards: Vec::new(),
            outbox: Vec::new(),
            ok: true,
            stats: EngineStats::default(),
        };
        engine.heap.grow(n);
        for v in 0..n {
            if !engine.eliminated[v] {
                engine.heap.insert(Var::from_index(v), &engine.activity);
            }
        }
        for clause in clauses.clauses {
            if !engine.add_clause(clause) {
                break;
            }
        }
        engine
    }

    pub fn program(&self) -> &Program {
        &self.program
    }

    pub fn stats(&self) -> EngineStats {
        EngineStats {
            restarts: self.restart.restarts(),
            ..self.stats
        }
    }

    /// False once a conflict without assumptions has been derived.
    pub fn is_consistent(&self) -> bool {
        self.ok
    }

    pub fn is_eliminated(&self, atom: Atom) -> bool {
        self.eliminated[atom.index()]
    }

    /// Value fixed at decision level 0, if any.
    pub fn level0_value(&self, atom: Atom) -> Option<bool> {
        let v = atom.index();
        match self.assigns[v] {
            UNDEF => None,
            _ if self.level[v] != 0 => None,
            value => Some(value == TRUE),
        }
    }

    pub fn activity(&self, atom: Atom) -> f64 {
        self.activity[atom.index()]
    }

    pub fn add_cancel_flag(&mut self, flag: Arc<AtomicBool>) {
        self.cancel.push(flag);
    }

    // ---- clause database -------------------------------------------------

    /// Adds a clause at decision level 0. Returns false if the clause set
    /// became inconsistent.
    pub fn add_clause(&mut self, lits: Vec<Lit>) -> bool {
        debug_assert_eq!(self.decision_level(), 0);
        if !self.ok {
            return false;
        }
        let Some(lits) = normalize_clause(lits) else {
            return true;
        };
        let mut kept = Vec::with_capacity(lits.len());
        for l in lits {
            match self.value(l) {
                TRUE => return true,
                FALSE => {}
                _ => kept.push(l),
            }
        }
        match kept.len() {
            0 => {
                self.ok = false;
                false
            }
            1 => {
                self.enqueue(kept[0], NO_REASON);
                if self.propagate().is_some() {
                    self.ok = false;
                }
                self.ok
            }
            _ => {
                self.attach(kept, false);
                true
            }
        }
    }

    fn attach(&mut self, lits: Vec<Lit>, learnt: bool) -> usize {
        let index = self.clauses.len();
        self.watches[lits[0].code()].push(Watcher {
            clause: index,
            blocker: lits[1],
        });
        self.watches[lits[1].code()].push(Watcher {
            clause: index,
            blocker: lits[0],
        });
        if learnt {
            self.learnt_count += 1;
        }
        self.clauses.push(Clause {
            lits,
            learnt,
            deleted: false,
            activity: 0.0,
        });
        index
    }

    fn delete_clause(&mut self, index: usize) {
        let clause = &mut self.clauses[index];
        if clause.deleted {
            return;
        }
        clause.deleted = true;
        clause.lits = Vec::new();
        if clause.learnt {
            self.learnt_count -= 1;
        }
    }

    /// Learned clauses over program variables that are currently stored,
    /// including learned units.
    pub fn learned_clauses(&self) -> Vec<Vec<Lit>> {
        let mut out: Vec<Vec<Lit>> = self.learned_units.iter().map(|&l| vec![l]).collect();
        out.extend(
            self.clauses
                .iter()
                .filter(|c| c.learnt && !c.deleted)
                .filter(|c| c.lits.iter().all(|l| !self.selector[l.var().index()]))
                .map(|c| c.lits.clone()),
        );
        out
    }

    /// Learned clauses of length at most two, free of guard selectors, that
    /// were produced since the last call.
    pub fn take_exports(&mut self) -> Vec<Vec<Lit>> {
        std::mem::take(&mut self.outbox)
    }

    /// Adds a clause learned elsewhere over the same clause set. Rejected
    /// (returns false) if it mentions variables this engine does not share.
    pub fn import_clause(&mut self, lits: Vec<Lit>) -> bool {
        let foreign = lits.iter().any(|l| {
            let v = l.var().index();
            v >= self.base_vars || self.eliminated[v]
        });
        if foreign {
            return false;
        }
        self.add_clause(lits);
        true
    }

    // ---- guards ----------------------------------------------------------

    /// Creates a new active guard. Clauses added under it hold only while it
    /// is active.
    pub fn new_guard(&mut self) -> Guard {
        let v = Var::from_index(self.assigns.len());
        self.assigns.push(UNDEF);
        self.level.push(0);
        self.reason.push(NO_REASON);
        self.activity.push(0.0);
        self.seen.push(false);
        self.selector.push(true);
        self.eliminated.push(false);
        self.watches.push(Vec::new());
        self.watches.push(Vec::new());
        self.heap.grow(self.assigns.len());
        self.active_guards.push(v);
        Guard(v)
    }

    /// Adds the constraint "not all of `atoms` are true" under the guard.
    pub fn add_guarded_constraint(&mut self, guard: Guard, atoms: &[Atom]) {
        let mut lits = vec![guard.0.negative()];
        lits.extend(atoms.iter().map(|&a| Var::from(a).negative()));
        self.add_clause(lits);
    }

    /// Deactivates the guard for good and deletes every clause that mentions
    /// it, learned ones included.
    pub fn retract_guard(&mut self, guard: Guard) {
        debug_assert_eq!(self.decision_level(), 0);
        let s = guard.0;
        self.active_guards.retain(|&g| g != s);
        for i in 0..self.clauses.len() {
            if !self.clauses[i].deleted && self.clauses[i].lits.iter().any(|l| l.var() == s) {
                self.delete_clause(i);
            }
        }
        self.watches[s.positive().code()].clear();
        self.watches[s.negative().code()].clear();
        if self.assigns[s.index()] == UNDEF {
            self.enqueue(s.negative(), NO_REASON);
        }
    }

    // ---- trail -----------------------------------------------------------

    #[inline]
    fn value(&self, lit: Lit) -> i8 {
        let v = self.assigns[lit.var().index()];
        if lit.is_positive() {
            v
        } else {
            -v
        }
    }

    fn decision_level(&self) -> usize {
        self.trail_lim.len()
    }

    fn enqueue(&mut self, lit: Lit, reason: usize) {
        let v = lit.var().index();
        debug_assert_eq!(self.assigns[v], UNDEF);
        self.assigns[v] = if lit.is_positive() { TRUE } else { FALSE };
        self.level[v] = self.decision_level() as u32;
        self.reason[v] = reason;
        self.trail.push(lit);
    }

    fn new_decision_level(&mut self) {
        self.trail_lim.push(self.trail.len());
    }

    fn backtrack(&mut self, level: usize) {
        if self.decision_level() <= level {
            return;
        }
        let start = self.trail_lim[level];
        for i in (start..self.trail.len()).rev() {
            let v = self.trail[i].var();
            self.assigns[v.index()] = UNDEF;
            self.reason[v.index()] = NO_REASON;
            if !self.selector[v.index()] {
                self.heap.insert(v, &self.activity);
            }
        }
        self.trail.truncate(start);
        self.trail_lim.truncate(level);
        self.qhead = start;
    }

    /// Unit propagation to fixpoint; returns a falsified clause on conflict.
    fn propagate(&mut self) -> Option<usize> {
        let mut conflict = None;
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            self.stats.propagations += 1;
            let false_lit = !p;
            let mut ws = std::mem::take(&mut self.watches[false_lit.code()]);
            let mut i = 0;
            let mut j = 0;
            while i < ws.len() {
                let w = ws[i];
                i += 1;
                if self.clauses[w.clause].deleted {
                    continue;
                }
                if self.value(w.blocker) == TRUE {
                    ws[j] = w;
                    j += 1;
                    continue;
                }
                let lits = &mut self.clauses[w.clause].lits;
                if lits[0] == false_lit {
                    lits.swap(0, 1);
                }
                let first = lits[0];
                let watcher = Watcher {
                    clause: w.clause,
                    blocker: first,
                };
                if first != w.blocker && self.value(first) == TRUE {
                    ws[j] = watcher;
                    j += 1;
                    continue;
                }
                let lits = &self.clauses[w.clause].lits;
                let replacement = (2..lits.len()).find(|&k| self.value(lits[k]) != FALSE);
                if let Some(k) = replacement {
                    let lits = &mut self.clauses[w.clause].lits;
                    lits.swap(1, k);
                    let new_watch = lits[1];
                    self.watches[new_watch.code()].push(watcher);
                    continue;
                }
                ws[j] = watcher;
                j += 1;
                if self.value(first) == FALSE {
                    conflict = Some(w.clause);
                    self.qhead = self.trail.len();
                    while i < ws.len() {
                        ws[j] = ws[i];
                        j += 1;
                        i += 1;
                    }
                } else {
                    self.enqueue(first, w.clause);
                }
            }
            ws.truncate(j);
            self.watches[false_lit.code()] = ws;
            if conflict.is_some() {
                break;
            }
        }
        conflict
    }

    // ---- learning --------------------------------------------------------

    fn bump_var(&mut self, v: Var) {
        let a = &mut self.activity[v.index()];
        *a += self.var_inc;
        if *a > RESCALE_LIMIT {
            for x in &mut self.activity {
                *x *= 1.0 / RESCALE_LIMIT;
            }
            self.var_inc *= 1.0 / RESCALE_LIMIT;
        }
        self.heap.increased(v, &self.activity);
    }

    fn bump_clause(&mut self, index: usize) {
        let c = &mut self.clauses[index];
        c.activity += self.clause_inc;
        if c.activity > RESCALE_LIMIT {
            for c in self.clauses.iter_mut().filter(|c| c.learnt) {
                c.activity *= 1.0 / RESCALE_LIMIT;
            }
            self.clause_inc *= 1.0 / RESCALE_LIMIT;
        }
    }

    fn decay_activities(&mut self) {
        self.var_inc /= VAR_DECAY;
        self.clause_inc /= CLAUSE_DECAY;
    }

    /// First-UIP analysis. Returns the learned clause, asserting literal
    /// first and a literal of the backjump level second, and that level.
    fn analyze(&mut self, mut conflict: usize) -> (Vec<Lit>, usize) {
        let current = self.decision_level() as u32;
        let mut learnt = vec![Lit::new(Var(0), true)];
        let mut pending = 0usize;
        let mut resolved: Option<Lit> = None;
        let mut index = self.trail.len();
        loop {
            if self.clauses[conflict].learnt {
                self.bump_clause(conflict);
            }
            let skip = usize::from(resolved.is_some());
            for k in skip..self.clauses[conflict].lits.len() {
                let q = self.clauses[conflict].lits[k];
                let v = q.var();
                if self.seen[v.index()] || self.level[v.index()] == 0 {
                    continue;
                }
                self.seen[v.index()] = true;
                self.bump_var(v);
                if self.level[v.index()] == current {
                    pending += 1;
                } else {
                    learnt.push(q);
                }
            }
            loop {
                index -= 1;
                if self.seen[self.trail[index].var().index()] {
                    break;
                }
            }
            let p = self.trail[index];
            self.seen[p.var().index()] = false;
            pending -= 1;
            resolved = Some(p);
            if pending == 0 {
                break;
            }
            conflict = self.reason[p.var().index()];
            debug_assert_ne!(conflict, NO_REASON);
        }
        learnt[0] = !resolved.expect("conflict analysis resolves a literal");
        for l in &learnt[1..] {
            self.seen[l.var().index()] = false;
        }
        let mut backjump = 0;
        if learnt.len() > 1 {
            let mut best = 1;
            for k in 2..learnt.len() {
                if self.level[learnt[k].var().index()] > self.level[learnt[best].var().index()] {
                    best = k;
                }
            }
            learnt.swap(1, best);
            backjump = self.level[learnt[1].var().index()] as usize;
        }
        (learnt, backjump)
    }

    fn learn(&mut self, learnt: Vec<Lit>) {
        self.stats.learned += 1;
        let exportable = learnt.len() <= 2 && learnt.iter().all(|l| !self.selector[l.var().index()]);
        if exportable {
            let mut sorted = learnt.clone();
            sorted.sort_unstable();
            self.outbox.push(sorted);
        }
        if learnt.len() == 1 {
            if !self.selector[learnt[0].var().index()] {
                self.learned_units.push(learnt[0]);
            }
            self.enqueue(learnt[0], NO_REASON);
        } else {
            let asserting = learnt[0];
            let index = self.attach(learnt, true);
            self.bump_clause(index);
            self.enqueue(asserting, index);
        }
    }

    fn is_locked(&self, index: usize) -> bool {
        let first = self.clauses[index].lits[0];
        let v = first.var().index();
        self.reason[v] == index && self.value(first) == TRUE
    }

    /// Deletes half of the long learned clauses, least active first.
    fn reduce_db(&mut self) {
        let mut candidates: Vec<usize> = (0..self.clauses.len())
            .filter(|&i| {
                let c = &self.clauses[i];
                c.learnt && !c.deleted && c.lits.len() > 2
            })
            .collect();
        candidates.sort_by(|&a, &b| {
            self.clauses[a]
                .activity
                .total_cmp(&self.clauses[b].activity)
                .then(a.cmp(&b))
        });
        let half = candidates.len() / 2;
        for &i in &candidates[..half] {
            if !self.is_locked(i) {
                self.delete_clause(i);
            }
        }
    }

    // ---- search ----------------------------------------------------------

    fn cancelled(&self) -> bool {
        self.cancel.iter().any(|f| f.load(Ordering::Relaxed))
            || self
                .conflict_budget
                .is_some_and(|b| self.stats.conflicts >= b)
    }

    fn pick_branch(&mut self) -> Option<Lit> {
        if self.random_branch_freq > 0.0 && !self.heap.is_empty() && self.rng.gen::<f64>() < self.random_branch_freq {
            let i = self.rng.gen_range(0..self.heap.len());
            let v = self.heap.get(i);
            if self.assigns[v.index()] == UNDEF {
                return Some(v.negative());
            }
        }
        while let Some(v) = self.heap.pop(&self.activity) {
            if self.assigns[v.index()] == UNDEF && !self.eliminated[v.index()] {
                return Some(v.negative());
            }
        }
        None
    }

    /// Extends the current total assignment to eliminated variables.
    fn extract_model(&self) -> Vec<bool> {
        let mut values: Vec<bool> = self.assigns[..self.base_vars]
            .iter()
            .map(|&v| v == TRUE)
            .collect();
        for (var, clauses) in self.reconstruction.iter().rev() {
            values[var.index()] = false;
            let forced = clauses.iter().any(|c| {
                c.iter().all(|l| {
                    if l.var() == *var {
                        true
                    } else {
                        !l.eval(values[l.var().index()])
                    }
                }) && c.iter().any(|l| l.var() == *var && l.is_positive())
            });
            values[var.index()] = forced;
        }
        values
    }

    fn solve(&mut self, restriction: Restriction, mode: Mode) -> SolveOutcome {
        debug_assert_eq!(self.decision_level(), 0);
        if !self.ok {
            return SolveOutcome::Unsat;
        }
        if self.propagate().is_some() {
            self.ok = false;
            return SolveOutcome::Unsat;
        }
        let mut assumptions: Vec<Lit> = self.active_guards.iter().map(|g| g.positive()).collect();
        if let Restriction::Falsify(a) = restriction {
            debug_assert!(!self.eliminated[a.index()]);
            assumptions.push(Var::from(a).negative());
        }

        loop {
            if let Some(conflict) = self.propagate() {
                self.stats.conflicts += 1;
                self.restart.on_conflict();
                if self.decision_level() == 0 {
                    self.ok = false;
                    return SolveOutcome::Unsat;
                }
                let (learnt, backjump) = self.analyze(conflict);
                self.backtrack(backjump);
                self.learn(learnt);
                self.decay_activities();
                if self.cancelled() {
                    self.backtrack(0);
                    return SolveOutcome::Interrupted;
                }
                continue;
            }

            if self.restart.is_due() {
                self.restart.restarted();
                self.backtrack(0);
                if mode == Mode::UpToRestart {
                    return SolveOutcome::Restarted;
                }
                continue;
            }
            if self.cancelled() {
                self.backtrack(0);
                return SolveOutcome::Interrupted;
            }
            if self.learnt_count as f64 >= self.max_learnts + self.trail.len() as f64 {
                self.reduce_db();
                self.max_learnts *= 1.1;
            }

            let mut next = None;
            while self.decision_level() < assumptions.len() {
                let p = assumptions[self.decision_level()];
                match self.value(p) {
                    TRUE => self.new_decision_level(),
                    FALSE => {
                        self.backtrack(0);
                        return SolveOutcome::Unsat;
                    }
                    _ => {
                        next = Some(p);
                        break;
                    }
                }
            }
            let next = match next {
                Some(p) => p,
                None => match self.pick_branch() {
                    Some(p) => {
                        self.stats.decisions += 1;
                        p
                    }
                    None => match self.check_model() {
                        Some(model) => {
                            self.backtrack(0);
                            return SolveOutcome::Model(model);
                        }
                        None if !self.ok => return SolveOutcome::Unsat,
                        None => continue,
                    },
                },
            };
            self.new_decision_level();
            self.enqueue(next, NO_REASON);
        }
    }

    /// Validates a total assignment. On rejection the loop nogood has been
    /// added at level 0 and the search continues from there.
    fn check_model(&mut self) -> Option<Interpretation> {
        let values = self.extract_model();
        let model: Interpretation = (1..self.num_atoms)
            .filter(|&i| values[i])
            .map(Atom::from_index)
            .collect();
        if self.tight {
            return Some(model);
        }
        match unfounded_check(&self.program, &model) {
            StabilityCheck::Accept => Some(model),
            StabilityCheck::Reject(nogood) => {
                self.stats.loop_nogoods += 1;
                self.backtrack(0);
                let atoms = self.num_atoms;
                let support: Vec<Lit> = nogood
                    .external_rules
                    .iter()
                    .map(|&r| Var::from_index(atoms + r).positive())
                    .collect();
                for &a in &nogood.loop_atoms {
                    let mut clause = vec![Var::from(a).negative()];
                    clause.extend(support.iter().copied());
                    if !self.add_clause(clause) {
                        break;
                    }
                }
                None
            }
        }
    }

    /// A stable model satisfying the restriction, or `Unsat` if none exists.
    pub fn compute_stable_model(&mut self, restriction: Restriction) -> SolveOutcome {
        self.solve(restriction, Mode::Complete)
    }

    /// As [`Engine::compute_stable_model`], but returns `Restarted` when the
    /// restart threshold fires. Learned clauses are kept.
    pub fn compute_up_to_next_restart(&mut self, restriction: Restriction) -> SolveOutcome {
        self.solve(restriction, Mode::UpToRestart)
    }

    /// Runs [`Engine::compute_up_to_next_restart`] until it returns something
    /// other than `Restarted`, invoking `boundary` at level 0 before each call.
    pub fn compute_stable_model_star(
        &mut self,
        restriction: Restriction,
        boundary: &mut dyn FnMut(&mut Engine),
    ) -> SolveOutcome {
        loop {
            boundary(self);
            match self.compute_up_to_next_restart(restriction) {
                SolveOutcome::Restarted => continue,
                outcome => return outcome,
            }
        }
    }
}

#[cfg(test)]
impl Engine {
    fn decide_for_test(&mut self, lit: Lit) -> Option<usize> {
        self.new_decision_level();
        self.enqueue(lit, NO_REASON);
        self.propagate()
    }

    fn true_at_level(&self, v: Var) -> Option<(bool, u32)> {
        match self.assigns[v.index()] {
            UNDEF => None,
            value => Some((value == TRUE, self.level[v.index()])),
        }
    }

    fn clause_lits(&self, index: usize) -> &[Lit] {
        &self.clauses[index].lits
    }
}
