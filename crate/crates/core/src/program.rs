//! Ground normal programs: atoms, rules, interpretations.
//!
//! Atoms are interned to dense ids. Id 0 is the false atom, so a constraint
//! is simply a rule whose head is [`Atom::FALSE`].

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

/// Textual name of the false atom. It cannot be produced by the parsers.
pub const FALSE_ATOM_NAME: &str = "#false";

const RESERVED_NAMES: [&str; 2] = [FALSE_ATOM_NAME, "⊥"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom(u32);

impl Atom {
    pub const FALSE: Atom = Atom(0);

    pub fn from_index(index: usize) -> Atom {
        Atom(u32::try_from(index).expect("atom index overflows u32"))
    }

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub fn is_false(self) -> bool {
        self.0 == 0
    }
}

pub type AtomSet = BTreeSet<Atom>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProgramError {
    #[error("atom name `{0}` is reserved for the false atom")]
    ReservedName(String),
    #[error("atom name is empty")]
    EmptyName,
    #[error("atom id {0} is not registered in the atom table")]
    UnknownAtom(usize),
}

/// Bijection between atom names and dense ids.
#[derive(Debug, Clone)]
pub struct AtomTable {
    names: Vec<String>,
    ids: HashMap<String, Atom>,
}

impl Default for AtomTable {
    fn default() -> Self {
        AtomTable {
            names: vec![FALSE_ATOM_NAME.to_string()],
            ids: HashMap::new(),
        }
    }
}

impl AtomTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn intern(&mut self, name: &str) -> Result<Atom, ProgramError> {
        if name.is_empty() {
            return Err(ProgramError::EmptyName);
        }
        if RESERVED_NAMES.contains(&name) {
            return Err(ProgramError::ReservedName(name.to_string()));
        }
        if let Some(&atom) = self.ids.get(name) {
            return Ok(atom);
        }
        let atom = Atom::from_index(self.names.len());
        self.names.push(name.to_string());
        self.ids.insert(name.to_string(), atom);
        Ok(atom)
    }

    pub fn get(&self, name: &str) -> Option<Atom> {
        self.ids.get(name).copied()
    }

    pub fn name(&self, atom: Atom) -> &str {
        &self.names[atom.index()]
    }

    /// Number of ids in use, the false atom included.
    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.len() == 1
    }

    /// All atoms except the false atom, in id order.
    pub fn atoms(&self) -> impl Iterator<Item = Atom> + '_ {
        (1..self.names.len()).map(Atom::from_index)
    }

    fn contains(&self, atom: Atom) -> bool {
        atom.index() < self.names.len()
    }
}

/// `head :- pos_body, not neg_body.` Bodies are kept sorted and duplicate-free.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Rule {
    pub head: Atom,
    pub pos_body: Vec<Atom>,
    pub neg_body: Vec<Atom>,
}

impl Rule {
    pub fn new(
        head: Atom,
        pos_body: impl IntoIterator<Item = Atom>,
        neg_body: impl IntoIterator<Item = Atom>,
    ) -> Rule {
        let mut pos_body: Vec<Atom> = pos_body.into_iter().collect();
        let mut neg_body: Vec<Atom> = neg_body.into_iter().collect();
        pos_body.sort_unstable();
        pos_body.dedup();
        neg_body.sort_unstable();
        neg_body.dedup();
        Rule {
            head,
            pos_body,
            neg_body,
        }
    }

    pub fn fact(head: Atom) -> Rule {
        Rule::new(head, [], [])
    }

    pub fn constraint(
        pos_body: impl IntoIterator<Item = Atom>,
        neg_body: impl IntoIterator<Item = Atom>,
    ) -> Rule {
        Rule::new(Atom::FALSE, pos_body, neg_body)
    }

    pub fn is_constraint(&self) -> bool {
        self.head.is_false()
    }

    pub fn atoms(&self) -> impl Iterator<Item = Atom> + '_ {
        std::iter::once(self.head)
            .chain(self.pos_body.iter().copied())
            .chain(self.neg_body.iter().copied())
    }

    /// Body truth under a total interpretation.
    pub fn body_holds(&self, interpretation: &Interpretation) -> bool {
        self.pos_body.iter().all(|&a| interpretation.contains(a))
            && !self.neg_body.iter().any(|&a| interpretation.contains(a))
    }
}

/// A set of atoms read as a total interpretation. Never contains the false atom.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Interpretation(AtomSet);

impl Interpretation {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_atoms(atoms: impl IntoIterator<Item = Atom>) -> Self {
        let set: AtomSet = atoms.into_iter().collect();
        assert!(
            !set.contains(&Atom::FALSE),
            "interpretations never contain the false atom"
        );
        Interpretation(set)
    }

    pub fn contains(&self, atom: Atom) -> bool {
        self.0.contains(&atom)
    }

    pub fn insert(&mut self, atom: Atom) -> bool {
        assert!(!atom.is_false());
        self.0.insert(atom)
    }

    pub fn atoms(&self) -> &AtomSet {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = Atom> + '_ {
        self.0.iter().copied()
    }
}

impl FromIterator<Atom> for Interpretation {
    fn from_iter<T: IntoIterator<Item = Atom>>(iter: T) -> Self {
        Interpretation::from_atoms(iter)
    }
}

/// `I ⊨ r`: the head is true, or the body is false.
pub fn models(interpretation: &Interpretation, rule: &Rule) -> bool {
    (!rule.head.is_false() && interpretation.contains(rule.head)) || !rule.body_holds(interpretation)
}

/// Under- and overestimate of the cautious answers to a query.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Estimates {
    pub under: AtomSet,
    pub over: AtomSet,
}

impl Estimates {
    pub fn new(query: &AtomSet) -> Self {
        Estimates {
            under: AtomSet::new(),
            over: query.clone(),
        }
    }

    pub fn is_closed(&self) -> bool {
        self.under == self.over
    }
}

#[derive(Debug, Clone, Default)]
pub struct Program {
    rules: Vec<Rule>,
    table: AtomTable,
}

impl Program {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn intern(&mut self, name: &str) -> Result<Atom, ProgramError> {
        self.table.intern(name)
    }

    pub fn atom(&self, name: &str) -> Option<Atom> {
        self.table.get(name)
    }

    pub fn name(&self, atom: Atom) -> &str {
        self.table.name(atom)
    }

    pub fn add_rule(&mut self, rule: Rule) -> Result<(), ProgramError> {
        if let Some(bad) = rule.atoms().find(|&a| !self.table.contains(a)) {
            return Err(ProgramError::UnknownAtom(bad.index()));
        }
        self.rules.push(rule);
        Ok(())
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn table(&self) -> &AtomTable {
        &self.table
    }

    /// Number of atom ids, the false atom included.
    pub fn atom_count(&self) -> usize {
        self.table.len()
    }

    pub fn atoms(&self) -> impl Iterator<Item = Atom> + '_ {
        self.table.atoms()
    }

    /// All non-false atoms; the default query.
    pub fn all_atoms(&self) -> AtomSet {
        self.atoms().collect()
    }

    pub fn is_model(&self, interpretation: &Interpretation) -> bool {
        self.rules.iter().all(|r| models(interpretation, r))
    }

    pub fn names<'a>(&'a self, atoms: impl IntoIterator<Item = Atom> + 'a) -> Vec<&'a str> {
        atoms.into_iter().map(|a| self.name(a)).collect()
    }

    /// Looks up every name, panicking on unknown ones. Convenient in tests.
    pub fn atom_set(&self, names: &[&str]) -> AtomSet {
        names
            .iter()
            .map(|n| self.atom(n).unwrap_or_else(|| panic!("unknown atom `{n}`")))
            .collect()
    }

    pub fn display_rule<'a>(&'a self, rule: &'a Rule) -> DisplayRule<'a> {
        DisplayRule {
            program: self,
            rule,
        }
    }
}

pub struct DisplayRule<'a> {
    program: &'a Program,
    rule: &'a Rule,
}

impl fmt::Display for DisplayRule<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rule = self.rule;
        let has_body = !rule.pos_body.is_empty() || !rule.neg_body.is_empty();
        if !rule.is_constraint() {
            f.write_str(self.program.name(rule.head))?;
        }
        if has_body || rule.is_constraint() {
            f.write_str(if rule.is_constraint() { ":-" } else { " :-" })?;
            let literals = rule
                .pos_body
                .iter()
                .map(|&a| self.program.name(a).to_string())
                .chain(
                    rule.neg_body
                        .iter()
                        .map(|&a| format!("not {}", self.program.name(a))),
                );
            for (i, lit) in literals.enumerate() {
                f.write_str(if i == 0 { " " } else { ", " })?;
                f.write_str(&lit)?;
            }
            if !has_body {
                f.write_str(" ")?;
            }
        }
        f.write_str(".")
    }
}

/// Prints the program in the text format accepted by [`crate::ingest::parse_asp`].
impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for rule in &self.rules {
            writeln!(f, "{}", self.display_rule(rule))?;
        }
        Ok(())
    }
}
