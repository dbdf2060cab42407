//! Clark completion and the unfounded-set check for non-tight programs.
//!
//! Every rule `r` gets a body variable `β_r ↔ B⁺(r) ∧ ¬B⁻(r)`; every atom is
//! equivalent to the disjunction of the bodies of its defining rules. Classical
//! models of the resulting clauses are the supported models of the program.
//! They coincide with the stable models on tight programs; otherwise a model
//! is validated by [`unfounded_check`] and rejected with a [`LoopNogood`].

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};

use crate::lit::{normalize_clause, Lit, Var};
use crate::program::{Atom, AtomSet, Interpretation, Program, Rule};

#[derive(Debug, Clone)]
pub struct ClauseSet {
    /// Atom variables occupy `0..num_atoms`, the false atom included.
    pub num_atoms: usize,
    pub num_vars: usize,
    pub clauses: Vec<Vec<Lit>>,
    /// Body variable of each rule, indexed like `Program::rules`.
    pub body_var: Vec<Var>,
    /// For each atom, the body variables of its defining rules.
    pub support_map: Vec<Vec<Var>>,
    /// Variables that must survive preprocessing: the false atom, atoms on
    /// positive cycles and the bodies of their rules. Loop nogoods only
    /// mention these.
    pub protected: Vec<bool>,
    /// Set by preprocessing.
    pub eliminated: Vec<bool>,
    /// Eliminated variables with the clauses they occurred in, in elimination
    /// order. Used to extend a model of the remaining clauses.
    pub reconstruction: Vec<(Var, Vec<Vec<Lit>>)>,
    pub(crate) tight: bool,
}

impl ClauseSet {
    /// A plain clause set over `num_atoms` atom variables and no rules.
    pub fn from_clauses(num_atoms: usize, clauses: Vec<Vec<Lit>>) -> ClauseSet {
        let mut protected = vec![false; num_atoms];
        if let Some(first) = protected.first_mut() {
            *first = true;
        }
        ClauseSet {
            num_atoms,
            num_vars: num_atoms,
            clauses,
            body_var: Vec::new(),
            support_map: vec![Vec::new(); num_atoms],
            protected,
            eliminated: vec![false; num_atoms],
            reconstruction: Vec::new(),
            tight: true,
        }
    }

    /// No cycle through positive bodies.
    pub fn is_tight(&self) -> bool {
        self.tight
    }

    /// Values of all variables induced by an interpretation: atoms as given,
    /// body variables by evaluating their rules.
    pub fn assignment(&self, program: &Program, interpretation: &Interpretation) -> Vec<bool> {
        let mut values = vec![false; self.num_vars];
        for atom in interpretation.iter() {
            values[atom.index()] = true;
        }
        for (rule, var) in program.rules().iter().zip(&self.body_var) {
            values[var.index()] = rule.body_holds(interpretation);
        }
        values
    }

    pub fn satisfied_by(&self, values: &[bool]) -> bool {
        self.clauses
            .iter()
            .all(|c| c.iter().any(|l| l.eval(values[l.var().index()])))
    }
}

/// Atoms lying on a cycle of the positive dependency graph.
pub fn positive_cycle_atoms(program: &Program) -> Vec<bool> {
    let n = program.atom_count();
    let mut graph: DiGraph<(), ()> = DiGraph::with_capacity(n, program.rules().len());
    for _ in 0..n {
        graph.add_node(());
    }
    let mut cyclic = vec![false; n];
    for rule in program.rules().iter().filter(|r| !r.is_constraint()) {
        for &b in &rule.pos_body {
            if b == rule.head {
                cyclic[b.index()] = true;
            }
            graph.add_edge(
                NodeIndex::new(rule.head.index()),
                NodeIndex::new(b.index()),
                (),
            );
        }
    }
    for scc in tarjan_scc(&graph) {
        if scc.len() > 1 {
            for node in scc {
                cyclic[node.index()] = true;
            }
        }
    }
    cyclic
}

pub fn complete(program: &Program) -> ClauseSet {
    let num_atoms = program.atom_count();
    let num_rules = program.rules().len();
    let num_vars = num_atoms + num_rules;
    let atom_var = |a: Atom| Var::from(a);
    let body_var: Vec<Var> = (0..num_rules).map(|r| Var::from_index(num_atoms + r)).collect();

    let mut clauses = Vec::with_capacity(3 * num_rules + num_atoms);
    let push = |clauses: &mut Vec<Vec<Lit>>, lits: Vec<Lit>| {
        if let Some(c) = normalize_clause(lits) {
            clauses.push(c);
        }
    };

    // the false atom is false
    push(&mut clauses, vec![atom_var(Atom::FALSE).negative()]);

    let mut support_map = vec![Vec::new(); num_atoms];
    for (rule, &beta) in program.rules().iter().zip(&body_var) {
        // β → body
        for &a in &rule.pos_body {
            push(&mut clauses, vec![beta.negative(), atom_var(a).positive()]);
        }
        for &a in &rule.neg_body {
            push(&mut clauses, vec![beta.negative(), atom_var(a).negative()]);
        }
        // body → β
        let mut long = vec![beta.positive()];
        long.extend(rule.pos_body.iter().map(|&a| atom_var(a).negative()));
        long.extend(rule.neg_body.iter().map(|&a| atom_var(a).positive()));
        push(&mut clauses, long);

        if rule.is_constraint() {
            push(&mut clauses, vec![beta.negative()]);
        } else {
            // β → head
            push(&mut clauses, vec![beta.negative(), atom_var(rule.head).positive()]);
            support_map[rule.head.index()].push(beta);
        }
    }
    // head → some body
    for atom in program.atoms() {
        let mut support = vec![atom_var(atom).negative()];
        support.extend(support_map[atom.index()].iter().map(|v| v.positive()));
        push(&mut clauses, support);
    }

    let cyclic = positive_cycle_atoms(program);
    let tight = !cyclic.iter().any(|&c| c);
    let mut protected = vec![false; num_vars];
    protected[0] = true;
    for (i, &c) in cyclic.iter().enumerate() {
        protected[i] |= c;
    }
    for (rule, var) in program.rules().iter().zip(&body_var) {
        if !rule.is_constraint() && cyclic[rule.head.index()] {
            protected[var.index()] = true;
        }
    }

    ClauseSet {
        num_atoms,
        num_vars,
        clauses,
        body_var,
        support_map,
        protected,
        eliminated: vec![false; num_vars],
        reconstruction: Vec::new(),
        tight,
    }
}

/// A set of atoms that may not be true unless one of its external supports
/// (rules for a loop atom whose positive body avoids the loop) fires.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoopNogood {
    pub loop_atoms: Vec<Atom>,
    /// Indices into `Program::rules`.
    pub external_rules: Vec<usize>,
}

impl LoopNogood {
    pub fn external_support_literals(&self, clauses: &ClauseSet) -> Vec<Lit> {
        self.external_rules
            .iter()
            .map(|&r| clauses.body_var[r].positive())
            .collect()
    }

    /// One clause per loop atom: `¬a ∨ β_1 ∨ … ∨ β_k` over the external supports.
    pub fn clauses(&self, clauses: &ClauseSet) -> Vec<Vec<Lit>> {
        let support = self.external_support_literals(clauses);
        self.loop_atoms
            .iter()
            .map(|&a| {
                let mut c = vec![Var::from(a).negative()];
                c.extend(support.iter().copied());
                c
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StabilityCheck {
    Accept,
    Reject(LoopNogood),
}

/// Least model of the reduct `P^I`, ignoring constraints.
pub fn reduct_least_model(program: &Program, interpretation: &Interpretation) -> AtomSet {
    let n = program.atom_count();
    let mut by_body_atom: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut missing = vec![0usize; program.rules().len()];
    let mut derived = vec![false; n];
    let mut queue = Vec::new();

    let applicable = |r: &Rule| {
        !r.is_constraint() && !r.neg_body.iter().any(|&a| interpretation.contains(a))
    };
    for (i, rule) in program.rules().iter().enumerate() {
        if !applicable(rule) {
            continue;
        }
        missing[i] = rule.pos_body.len();
        for &a in &rule.pos_body {
            by_body_atom[a.index()].push(i);
        }
        if missing[i] == 0 && !derived[rule.head.index()] {
            derived[rule.head.index()] = true;
            queue.push(rule.head);
        }
    }
    while let Some(atom) = queue.pop() {
        for &i in &by_body_atom[atom.index()] {
            missing[i] -= 1;
            let head = program.rules()[i].head;
            if missing[i] == 0 && !derived[head.index()] {
                derived[head.index()] = true;
                queue.push(head);
            }
        }
    }
    (1..n)
        .filter(|&i| derived[i])
        .map(Atom::from_index)
        .collect()
}

/// Accepts `I` iff it is the least model of its own reduct. Otherwise returns
/// the nogood of a terminal strongly connected component of the unfounded
/// atoms `I \ LM(P^I)`.
///
/// `I` must be a model of the completion.
pub fn unfounded_check(program: &Program, interpretation: &Interpretation) -> StabilityCheck {
    let least = reduct_least_model(program, interpretation);
    let unfounded: Vec<Atom> = interpretation
        .iter()
        .filter(|a| !least.contains(a))
        .collect();
    if unfounded.is_empty() {
        return StabilityCheck::Accept;
    }

    let n = program.atom_count();
    let mut node_of = vec![None; n];
    let mut graph: DiGraph<Atom, ()> = DiGraph::with_capacity(unfounded.len(), 0);
    for &a in &unfounded {
        node_of[a.index()] = Some(graph.add_node(a));
    }
    for rule in program.rules() {
        let Some(from) = node_of[rule.head.index()] else {
            continue;
        };
        if rule.is_constraint() || !rule.body_holds(interpretation) {
            continue;
        }
        for &b in &rule.pos_body {
            if let Some(to) = node_of[b.index()] {
                graph.add_edge(from, to, ());
            }
        }
    }
    // components come out in reverse topological order: the first has no
    // edges leaving it
    let sccs = tarjan_scc(&graph);
    let component = &sccs[0];
    let mut in_loop = vec![false; n];
    let mut loop_atoms: Vec<Atom> = component.iter().map(|&node| graph[node]).collect();
    loop_atoms.sort_unstable();
    for &a in &loop_atoms {
        in_loop[a.index()] = true;
    }
    let external_rules = program
        .rules()
        .iter()
        .enumerate()
        .filter(|(_, r)| {
            !r.is_constraint()
                && in_loop[r.head.index()]
                && !r.pos_body.iter().any(|b| in_loop[b.index()])
        })
        .map(|(i, _)| i)
        .collect();
    StabilityCheck::Reject(LoopNogood {
        loop_atoms,
        external_rules,
    })
}
