//! Brute-force reference semantics: enumerate every interpretation and keep
//! those equal to the least model of their reduct.
//!
//! Deliberately shares nothing with the search code beyond the program model.

use thiserror::Error;

use crate::program::{Atom, AtomSet, Interpretation, Program};

pub const DEFAULT_ATOM_BOUND: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("program has {atoms} atoms, oracle bound is {bound}")]
pub struct BoundExceeded {
    pub atoms: usize,
    pub bound: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleResult {
    /// In increasing order of the bitmask over atom ids.
    pub stable_models: Vec<Interpretation>,
    /// `None` when there is no stable model.
    pub cautious: Option<AtomSet>,
}

impl OracleResult {
    /// `Q ∩ CC(P)`, or `None` for an incoherent program.
    pub fn cautious_answer(&self, query: &AtomSet) -> Option<AtomSet> {
        self.cautious
            .as_ref()
            .map(|cc| cc.intersection(query).copied().collect())
    }
}

pub fn enumerate_stable_models(program: &Program) -> Result<OracleResult, BoundExceeded> {
    enumerate_stable_models_bounded(program, DEFAULT_ATOM_BOUND)
}

pub fn enumerate_stable_models_bounded(
    program: &Program,
    bound: usize,
) -> Result<OracleResult, BoundExceeded> {
    let atoms: Vec<Atom> = program.atoms().collect();
    if atoms.len() > bound {
        return Err(BoundExceeded {
            atoms: atoms.len(),
            bound,
        });
    }
    let mut stable_models = Vec::new();
    for mask in 0u64..(1u64 << atoms.len()) {
        let candidate: Interpretation = atoms
            .iter()
            .enumerate()
            .filter(|(k, _)| mask >> k & 1 == 1)
            .map(|(_, &a)| a)
            .collect();
        if is_stable_model(program, &candidate) {
            stable_models.push(candidate);
        }
    }
    let cautious = stable_models.split_first().map(|(first, rest)| {
        first
            .iter()
            .filter(|a| rest.iter().all(|m| m.contains(*a)))
            .collect()
    });
    Ok(OracleResult {
        stable_models,
        cautious,
    })
}

/// `I` is stable iff it satisfies every constraint and equals the least
/// model of the reduct `P^I`.
pub fn is_stable_model(program: &Program, candidate: &Interpretation) -> bool {
    let body_holds = |pos: &[Atom], neg: &[Atom], i: &Interpretation| {
        pos.iter().all(|&a| i.contains(a)) && !neg.iter().any(|&a| i.contains(a))
    };
    let violates_constraint = program
        .rules()
        .iter()
        .any(|r| r.head.is_false() && body_holds(&r.pos_body, &r.neg_body, candidate));
    if violates_constraint {
        return false;
    }
    let reduct: Vec<(Atom, &[Atom])> = program
        .rules()
        .iter()
        .filter(|r| !r.head.is_false() && !r.neg_body.iter().any(|&a| candidate.contains(a)))
        .map(|r| (r.head, r.pos_body.as_slice()))
        .collect();
    let mut least = Interpretation::new();
    loop {
        let mut changed = false;
        for &(head, pos) in &reduct {
            if !least.contains(head) && pos.iter().all(|&a| least.contains(a)) {
                least.insert(head);
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    least == *candidate
}
