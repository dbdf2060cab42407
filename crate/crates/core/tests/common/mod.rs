//! Fixture generators and independent reference answers shared by the
//! integration tests.
#![allow(dead_code)]

use std::fmt::Write as _;

use cautious::algorithms::{
    cautious_reasoning, AlgorithmId, Answer, EstimateEvent, EventKind, EventLog, SolverOptions,
};
use cautious::ingest::{false_atom_name, parse_asp, parse_dimacs, true_atom_name};
use cautious::multi::run_multi;
use cautious::oracle;
use cautious::program::{AtomSet, Program};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const EXAMPLE_PROGRAM: &str = include_str!("../fixtures/example1.lp");
pub const EXAMPLE_QUERY: &str = include_str!("../fixtures/example1_q.txt");

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A fixture: program text, parsed program, query, and the reference answer
/// (`None` for an incoherent program).
#[derive(Debug, Clone)]
pub struct Fixture {
    pub name: String,
    pub text: String,
    pub program: Program,
    pub query: AtomSet,
    pub expected: Option<AtomSet>,
}

/// Random ground normal program over `a1..an` with `n ≤ max_atoms` and at
/// most `max_rules` rules. Roughly half of the programs get positive bodies
/// dense enough to form cycles.
pub fn random_program_text(rng: &mut ChaCha8Rng, max_atoms: usize, max_rules: usize) -> String {
    let n = rng.gen_range(1..=max_atoms);
    let rules = rng.gen_range(n / 2..=max_rules);
    let positive_weight = if rng.gen_bool(0.5) { 0.5 } else { 0.15 };
    let atom = |rng: &mut ChaCha8Rng| format!("a{}", rng.gen_range(1..=n));
    let mut text = String::new();
    for _ in 0..rules {
        let constraint = rng.gen_bool(0.05);
        let head = if constraint { String::new() } else { atom(rng) };
        let mut body = Vec::new();
        for _ in 0..rng.gen_range(0..=3) {
            let b = atom(rng);
            if rng.gen_bool(positive_weight) {
                body.push(b);
            } else if b != head {
                body.push(format!("not {b}"));
            }
        }
        if body.is_empty() {
            if constraint {
                continue;
            }
            writeln!(text, "{head}.").unwrap();
        } else if constraint {
            writeln!(text, ":- {}.", body.join(", ")).unwrap();
        } else {
            writeln!(text, "{head} :- {}.", body.join(", ")).unwrap();
        }
    }
    // make every atom known even when no rule mentions it
    for i in 1..=n {
        let name = format!("a{i}");
        let mentioned = text
            .split(|c: char| !c.is_ascii_alphanumeric())
            .any(|token| token == name);
        if !mentioned {
            writeln!(text, "{name} :- {name}.").unwrap();
        }
    }
    text
}

fn random_query(rng: &mut ChaCha8Rng, program: &Program) -> AtomSet {
    let atoms: Vec<_> = program.atoms().collect();
    if rng.gen_bool(0.5) {
        return atoms.into_iter().collect();
    }
    let k = rng.gen_range(0..=atoms.len());
    atoms.choose_multiple(rng, k).copied().collect()
}

pub fn program_fixture(seed: u64) -> Fixture {
    let mut rng = rng(seed);
    let text = random_program_text(&mut rng, 12, 25);
    let program = parse_asp(&text).expect("generated programs parse");
    let query = random_query(&mut rng, &program);
    let expected = oracle::enumerate_stable_models(&program)
        .expect("fixtures stay within the oracle bound")
        .cautious_answer(&query);
    Fixture {
        name: format!("program seed {seed}"),
        text,
        program,
        query,
        expected,
    }
}

#[derive(Debug, Clone)]
pub struct Cnf {
    pub vars: usize,
    pub clauses: Vec<Vec<i32>>,
}

impl Cnf {
    pub fn dimacs(&self) -> String {
        let mut text = format!("p cnf {} {}\n", self.vars, self.clauses.len());
        for clause in &self.clauses {
            for l in clause {
                write!(text, "{l} ").unwrap();
            }
            text.push_str("0\n");
        }
        text
    }

    fn satisfied(&self, assignment: u32) -> bool {
        self.clauses.iter().all(|c| {
            c.iter().any(|&l| {
                let value = assignment >> (l.unsigned_abs() - 1) & 1 == 1;
                value == (l > 0)
            })
        })
    }

    /// Classical backbone by enumerating all assignments: for each variable,
    /// `Some(value)` if every model agrees on it. `None` if unsatisfiable.
    pub fn backbone(&self) -> Option<Vec<Option<bool>>> {
        assert!(self.vars <= 20);
        let mut always_true = vec![true; self.vars];
        let mut always_false = vec![true; self.vars];
        let mut any = false;
        for assignment in 0u32..(1 << self.vars) {
            if !self.satisfied(assignment) {
                continue;
            }
            any = true;
            for v in 0..self.vars {
                if assignment >> v & 1 == 1 {
                    always_false[v] = false;
                } else {
                    always_true[v] = false;
                }
            }
        }
        any.then(|| {
            (0..self.vars)
                .map(|v| {
                    if always_true[v] {
                        Some(true)
                    } else if always_false[v] {
                        Some(false)
                    } else {
                        None
                    }
                })
                .collect()
        })
    }

    /// Atoms of the encoding that belong to every stable model.
    pub fn cautious_atoms(&self, program: &Program) -> Option<AtomSet> {
        let backbone = self.backbone()?;
        let mut out = AtomSet::new();
        for (v, value) in backbone.iter().enumerate() {
            let name = match value {
                Some(true) => true_atom_name(v + 1),
                Some(false) => false_atom_name(v + 1),
                None => continue,
            };
            out.insert(program.atom(&name).expect("encoding has both atoms"));
        }
        Some(out)
    }
}

pub fn random_cnf(rng: &mut ChaCha8Rng, max_vars: usize) -> Cnf {
    let vars = rng.gen_range(1..=max_vars);
    let count = rng.gen_range(0..=(vars * 4).max(1));
    let clauses = (0..count)
        .map(|_| {
            let len = rng.gen_range(1..=3);
            (0..len)
                .map(|_| {
                    let v = rng.gen_range(1..=vars) as i32;
                    if rng.gen_bool(0.5) {
                        v
                    } else {
                        -v
                    }
                })
                .collect()
        })
        .collect();
    Cnf { vars, clauses }
}

pub fn cnf_fixture(seed: u64) -> Fixture {
    let mut rng = rng(seed ^ 0x5eed_c0de);
    let cnf = random_cnf(&mut rng, 12);
    let text = cnf.dimacs();
    let program = parse_dimacs(&text).expect("generated CNFs parse");
    let query = random_query(&mut rng, &program);
    let expected = cnf
        .cautious_atoms(&program)
        .map(|cc| cc.intersection(&query).copied().collect());
    Fixture {
        name: format!("cnf seed {seed}"),
        text,
        program,
        query,
        expected,
    }
}

pub fn example_fixture(query: Option<&str>) -> Fixture {
    let mut program = parse_asp(EXAMPLE_PROGRAM).unwrap();
    let query = match query {
        Some(text) => cautious::ingest::parse_query(text, &mut program).unwrap(),
        None => program.all_atoms(),
    };
    let expected = oracle::enumerate_stable_models(&program)
        .unwrap()
        .cautious_answer(&query);
    Fixture {
        name: "example".into(),
        text: EXAMPLE_PROGRAM.into(),
        program,
        query,
        expected,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Single(AlgorithmId),
    Multi,
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Mode::Single(alg) => write!(f, "{alg}"),
            Mode::Multi => f.write_str("multi"),
        }
    }
}

pub fn all_modes() -> Vec<Mode> {
    let mut modes: Vec<Mode> = AlgorithmId::all().into_iter().map(Mode::Single).collect();
    modes.push(Mode::Multi);
    modes
}

pub fn run_mode(fixture: &Fixture, mode: Mode, options: &SolverOptions) -> (Answer, EventLog) {
    let mut log = EventLog::default();
    let report = match mode {
        Mode::Single(alg) => cautious_reasoning(&fixture.program, &fixture.query, alg, options, &mut log),
        Mode::Multi => run_multi(&fixture.program, &fixture.query, options, &mut log),
    };
    (report.answer, log)
}

/// Whether the final answer agrees with the reference.
pub fn answer_matches(answer: &Answer, expected: &Option<AtomSet>) -> bool {
    match (answer, expected) {
        (Answer::Complete(got), Some(want)) => got == want,
        (Answer::Incoherent, None) => true,
        _ => false,
    }
}

/// Replays the event stream and checks `U ⊆ expected ⊆ O` after every event.
pub fn check_prefixes(events: &[EstimateEvent], query: &AtomSet, expected: &Option<AtomSet>) -> Result<(), String> {
    let Some(expected) = expected else {
        return Ok(());
    };
    let mut under = AtomSet::new();
    let mut over = query.clone();
    for (i, e) in events.iter().enumerate() {
        match (e.kind, e.atom) {
            (EventKind::UnderestimateAdd, Some(a)) => {
                under.insert(a);
            }
            (EventKind::OverestimateRemove, Some(a)) => {
                over.remove(&a);
            }
            _ => continue,
        }
        if !under.is_subset(expected) || !expected.is_subset(&over) {
            return Err(format!("estimates unsound after event {i}: {e:?}"));
        }
    }
    Ok(())
}

/// No atom is added or removed twice, and no atom is both added and removed.
pub fn check_monotone(events: &[EstimateEvent]) -> Result<(), String> {
    let mut under = AtomSet::new();
    let mut removed = AtomSet::new();
    for e in events {
        match (e.kind, e.atom) {
            (EventKind::UnderestimateAdd, Some(a)) => {
                if !under.insert(a) || removed.contains(&a) {
                    return Err(format!("atom {a:?} reported twice"));
                }
            }
            (EventKind::OverestimateRemove, Some(a)) => {
                if !removed.insert(a) || under.contains(&a) {
                    return Err(format!("atom {a:?} reported twice"));
                }
            }
            _ => {}
        }
    }
    let terminals = events.iter().filter(|e| e.kind.is_terminal()).count();
    if terminals != 1 || !events.last().is_some_and(|e| e.kind.is_terminal()) {
        return Err("terminal event must occur once, last".into());
    }
    Ok(())
}

/// Checks that the CSV columns are monotone and time never decreases.
pub fn check_trace_csv(csv: &str) -> Result<(), String> {
    let mut lines = csv.lines();
    if lines.next() != Some(cautious::protocol::TRACE_HEADER) {
        return Err("missing header".into());
    }
    let mut previous: Option<(u64, u64, u64)> = None;
    for line in lines {
        let fields: Vec<u64> = line
            .split(',')
            .map(|f| f.parse().map_err(|_| format!("bad row {line}")))
            .collect::<Result<_, _>>()?;
        let [t, u, o] = fields[..] else {
            return Err(format!("bad row {line}"));
        };
        if let Some((pt, pu, po)) = previous {
            if t < pt || u < pu || o > po {
                return Err(format!("non-monotone row {line}"));
            }
        }
        previous = Some((t, u, o));
    }
    Ok(())
}
