//! One-shot level-0 simplification of a completed clause set.
//!
//! Unit propagation, subsumption, self-subsuming strengthening, and bounded
//! variable elimination that never grows the clause count. Query atoms and
//! protected variables are never eliminated.

use crate::completion::ClauseSet;
use crate::lit::{normalize_clause, Lit, Var};
use crate::program::{Atom, AtomSet};

/// Elimination is skipped when it would require more resolution steps.
const MAX_RESOLUTION_PAIRS: usize = 400;
/// Subsumption candidates are skipped when the smallest occurrence list is
/// longer than this.
const MAX_SUBSUMPTION_OCCURRENCES: usize = 2000;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SimplificationReport {
    pub fixed_true: AtomSet,
    pub fixed_false: AtomSet,
    pub eliminated: AtomSet,
    pub removed_clauses: usize,
    /// The empty clause was derived.
    pub incoherent: bool,
}

struct Simplifier {
    num_vars: usize,
    clauses: Vec<Option<Vec<Lit>>>,
    occurrences: Vec<Vec<usize>>,
    values: Vec<Option<bool>>,
    frozen: Vec<bool>,
    eliminated: Vec<bool>,
    reconstruction: Vec<(Var, Vec<Vec<Lit>>)>,
    units: Vec<Lit>,
    incoherent: bool,
}

impl Simplifier {
    fn new(cs: &ClauseSet, query: &AtomSet) -> Simplifier {
        let mut frozen = cs.protected.clone();
        frozen.resize(cs.num_vars, false);
        for a in query {
            frozen[a.index()] = true;
        }
        for (v, _) in &cs.reconstruction {
            frozen[v.index()] = true;
        }
        let mut s = Simplifier {
            num_vars: cs.num_vars,
            clauses: Vec::with_capacity(cs.clauses.len()),
            occurrences: vec![Vec::new(); 2 * cs.num_vars],
            values: vec![None; cs.num_vars],
            frozen,
            eliminated: cs.eliminated.clone(),
            reconstruction: cs.reconstruction.clone(),
            units: Vec::new(),
            incoherent: false,
        };
        for c in &cs.clauses {
            if let Some(c) = normalize_clause(c.clone()) {
                s.insert(c);
            }
        }
        s
    }

    fn value(&self, l: Lit) -> Option<bool> {
        self.values[l.var().index()].map(|v| l.eval(v))
    }

    fn insert(&mut self, clause: Vec<Lit>) {
        match clause.len() {
            0 => self.incoherent = true,
            1 => self.assign(clause[0]),
            _ => {
                let index = self.clauses.len();
                for l in &clause {
                    self.occurrences[l.code()].push(index);
                }
                self.clauses.push(Some(clause));
            }
        }
    }

    fn assign(&mut self, l: Lit) {
        match self.value(l) {
            Some(true) => {}
            Some(false) => self.incoherent = true,
            None => {
                self.values[l.var().index()] = Some(l.is_positive());
                self.units.push(l);
            }
        }
    }

    fn remove(&mut self, index: usize) -> Option<Vec<Lit>> {
        let clause = self.clauses[index].take()?;
        for l in &clause {
            self.occurrences[l.code()].retain(|&i| i != index);
        }
        Some(clause)
    }

    fn strengthen(&mut self, index: usize, lit: Lit) {
        let Some(clause) = self.clauses[index].as_mut() else {
            return;
        };
        clause.retain(|&l| l != lit);
        self.occurrences[lit.code()].retain(|&i| i != index);
        if clause.len() == 1 {
            let unit = clause[0];
            self.remove(index);
            self.assign(unit);
        }
    }

    /// Propagates pending units; returns whether anything changed.
    fn propagate(&mut self) -> bool {
        let mut changed = false;
        while let Some(l) = self.units.pop() {
            changed = true;
            for index in self.occurrences[l.code()].clone() {
                self.remove(index);
            }
            for index in self.occurrences[(!l).code()].clone() {
                self.strengthen(index, !l);
            }
            if self.incoherent {
                return true;
            }
        }
        changed
    }

    /// Subsumption and self-subsuming strengthening using `index` as the
    /// smaller clause.
    fn backward_subsume(&mut self, index: usize) -> bool {
        let Some(clause) = self.clauses[index].clone() else {
            return false;
        };
        let pivot = *clause
            .iter()
            .min_by_key(|l| self.occurrences[l.code()].len() + self.occurrences[(!**l).code()].len())
            .expect("stored clauses have at least two literals");
        let mut candidates = self.occurrences[pivot.code()].clone();
        candidates.extend(self.occurrences[(!pivot).code()].iter().copied());
        if candidates.len() > MAX_SUBSUMPTION_OCCURRENCES {
            return false;
        }
        let mut changed = false;
        for other in candidates {
            if other == index {
                continue;
            }
            let Some(target) = self.clauses[other].as_ref() else {
                continue;
            };
            if target.len() < clause.len() {
                continue;
            }
            let mut flipped = None;
            let mut fits = true;
            for &l in &clause {
                if target.binary_search(&l).is_ok() {
                    continue;
                }
                if flipped.is_none() && target.binary_search(&!l).is_ok() {
                    flipped = Some(!l);
                    continue;
                }
                fits = false;
                break;
            }
            if !fits {
                continue;
            }
            changed = true;
            match flipped {
                None => {
                    self.remove(other);
                }
                Some(lit) => self.strengthen(other, lit),
            }
            if self.clauses[index].is_none() {
                break;
            }
        }
        changed
    }

    fn subsume_all(&mut self) -> bool {
        let mut order: Vec<usize> = (0..self.clauses.len())
            .filter(|&i| self.clauses[i].is_some())
            .collect();
        order.sort_by_key(|&i| (self.clauses[i].as_ref().map_or(0, Vec::len), i));
        let mut changed = false;
        for index in order {
            changed |= self.backward_subsume(index);
            if !self.units.is_empty() {
                self.propagate();
            }
            if self.incoherent {
                return true;
            }
        }
        changed
    }

    fn resolve(a: &[Lit], b: &[Lit], var: Var) -> Option<Vec<Lit>> {
        let merged: Vec<Lit> = a
            .iter()
            .chain(b)
            .copied()
            .filter(|l| l.var() != var)
            .collect();
        normalize_clause(merged)
    }

    fn try_eliminate(&mut self, var: Var) -> bool {
        let v = var.index();
        if self.frozen[v] || self.eliminated[v] || self.values[v].is_some() {
            return false;
        }
        let pos = self.occurrences[var.positive().code()].clone();
        let neg = self.occurrences[var.negative().code()].clone();
        if pos.len() * neg.len() > MAX_RESOLUTION_PAIRS {
            return false;
        }
        let budget = pos.len() + neg.len();
        let mut resolvents = Vec::new();
        for &p in &pos {
            for &n in &neg {
                let a = self.clauses[p].as_ref().expect("occurrence lists are exact");
                let b = self.clauses[n].as_ref().expect("occurrence lists are exact");
                if let Some(r) = Self::resolve(a, b, var) {
                    resolvents.push(r);
                    if resolvents.len() > budget {
                        return false;
                    }
                }
            }
        }
        resolvents.sort();
        resolvents.dedup();
        let mut removed = Vec::with_capacity(budget);
        for index in pos.into_iter().chain(neg) {
            removed.extend(self.remove(index));
        }
        self.eliminated[v] = true;
        self.reconstruction.push((var, removed));
        for r in resolvents {
            self.insert(r);
        }
        true
    }

    fn eliminate_all(&mut self) -> bool {
        let mut changed = false;
        for v in 0..self.num_vars {
            if self.try_eliminate(Var::from_index(v)) {
                changed = true;
                self.propagate();
                if self.incoherent {
                    return true;
                }
            }
        }
        changed
    }

    fn run(&mut self) {
        loop {
            let mut changed = self.propagate();
            if self.incoherent {
                return;
            }
            changed |= self.subsume_all();
            if self.incoherent {
                return;
            }
            changed |= self.eliminate_all();
            if self.incoherent || !changed {
                return;
            }
        }
    }
}

/// Simplifies `cs` while keeping the stable models restricted to the
/// surviving variables. Values of fixed variables are kept as unit clauses.
pub fn simplify(cs: &ClauseSet, query: &AtomSet) -> (ClauseSet, SimplificationReport) {
    let mut s = Simplifier::new(cs, query);
    s.run();

    let mut report = SimplificationReport {
        incoherent: s.incoherent,
        ..SimplificationReport::default()
    };
    let mut clauses: Vec<Vec<Lit>> = Vec::new();
    for v in 0..s.num_vars {
        if let Some(value) = s.values[v] {
            clauses.push(vec![Lit::new(Var::from_index(v), value)]);
            if v > 0 && v < cs.num_atoms {
                let atom = Atom::from_index(v);
                if value {
                    report.fixed_true.insert(atom);
                } else {
                    report.fixed_false.insert(atom);
                }
            }
        }
    }
    clauses.extend(s.clauses.into_iter().flatten());
    if s.incoherent {
        clauses.push(Vec::new());
    }
    for v in 1..cs.num_atoms {
        if s.eliminated[v] && !cs.eliminated[v] {
            report.eliminated.insert(Atom::from_index(v));
        }
    }
    report.removed_clauses = cs.clauses.len().saturating_sub(clauses.len());

    let out = ClauseSet {
        clauses,
        eliminated: s.eliminated,
        reconstruction: s.reconstruction,
        ..cs.clone()
    };
    (out, report)
}
