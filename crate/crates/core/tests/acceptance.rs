//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

mod common;

use std::io::Write;
use std::sync::atomic::AtomicBool;
use std::sync::Arc;
use std::time::{Duration, Instant};

use cautious::algorithms::{
    cautious_reasoning, AlgorithmId, Answer, EventKind, EventLog, Procedure, SearchOutcome,
    SolverOptions,
};
use cautious::cli;
use cautious::ingest::parse_dimacs;
use cautious::protocol::{ProtocolWriter, TraceWriter};
use common::{
    all_modes, answer_matches, check_monotone, check_prefixes, check_trace_csv, cnf_fixture,
    example_fixture, program_fixture, run_mode, Cnf, Fixture, Mode, EXAMPLE_QUERY,
};

const PROGRAM_FIXTURES: u64 = 500;
const CNF_FIXTURES: u64 = 200;
const CONFLICT_BUDGET: u64 = 1_000_000;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(failures: &[String], detail: String) -> Outcome {
    let mut detail = detail;
    if let Some(first) = failures.first() {
        detail = format!("{detail}; {} failure(s), first: {first}", failures.len());
    }
    Outcome {
        passed: failures.is_empty(),
        detail,
    }
}

fn budget_options() -> SolverOptions {
    SolverOptions {
        restart_base: Some(32),
        conflict_budget: Some(CONFLICT_BUDGET),
        ..SolverOptions::default()
    }
}

fn golden_answer() -> Outcome {
    let full = example_fixture(None);
    let q = example_fixture(Some(EXAMPLE_QUERY));
    let start = Instant::now();
    let mut failures = Vec::new();
    let names = |f: &Fixture, answer: &Answer| match answer {
        Answer::Complete(set) => f.program.names(set.iter().copied()).join(" "),
        other => format!("{other:?}"),
    };
    let certain = ["R_in(2,2,2)", "R_in(2,2,3)", "Q(1,1)", "Q(2,2)", "Q(2,3)"];
    let answers = ["Q(1,1)", "Q(2,2)", "Q(2,3)"];
    for mode in all_modes() {
        for (fixture, want) in [(&full, &certain[..]), (&q, &answers[..])] {
            let (answer, _) = run_mode(fixture, mode, &SolverOptions::default());
            let expected = fixture.program.atom_set(want);
            if answer != Answer::Complete(expected) {
                failures.push(format!("{mode}: got {}", names(fixture, &answer)));
            }
        }
    }
    let elapsed = start.elapsed();
    if elapsed >= Duration::from_secs(1) {
        failures.push(format!("took {elapsed:?}"));
    }
    outcome(
        &failures,
        format!(
            "9 modes x 2 queries ({} and {} atoms) in {elapsed:?}",
            full.query.len(),
            q.query.len()
        ),
    )
}

struct SuiteRun {
    fixture: String,
    mode: Mode,
    answer: Answer,
    log: EventLog,
    expected: Option<cautious::program::AtomSet>,
    query: cautious::program::AtomSet,
}

fn suite_fixtures() -> Vec<Fixture> {
    let mut fixtures: Vec<Fixture> = (0..PROGRAM_FIXTURES).map(program_fixture).collect();
    fixtures.extend((0..CNF_FIXTURES).map(cnf_fixture));
    fixtures
}

fn run_suite(fixtures: &[Fixture]) -> (Vec<SuiteRun>, Duration) {
    let start = Instant::now();
    let mut runs = Vec::new();
    for fixture in fixtures {
        for mode in all_modes() {
            let (answer, log) = run_mode(fixture, mode, &budget_options());
            runs.push(SuiteRun {
                fixture: fixture.name.clone(),
                mode,
                answer,
                log,
                expected: fixture.expected.clone(),
                query: fixture.query.clone(),
            });
        }
    }
    (runs, start.elapsed())
}

fn oracle_equivalence(fixtures: &[Fixture], runs: &[SuiteRun], elapsed: Duration) -> Outcome {
    let mut failures: Vec<String> = runs
        .iter()
        .filter(|r| !answer_matches(&r.answer, &r.expected))
        .map(|r| format!("{} {}: got {:?}, expected {:?}", r.fixture, r.mode, r.answer, r.expected))
        .collect();
    if elapsed >= Duration::from_secs(300) {
        failures.push(format!("suite took {elapsed:?}"));
    }
    let non_tight = fixtures
        .iter()
        .filter(|f| !cautious::completion::complete(&f.program).is_tight())
        .count();
    let incoherent = fixtures.iter().filter(|f| f.expected.is_none()).count();
    outcome(
        &failures,
        format!(
            "{PROGRAM_FIXTURES} programs ({non_tight} non-tight, {incoherent} incoherent overall) + {CNF_FIXTURES} CNFs x 9 modes = {} runs, mismatches {}, {elapsed:?}",
            runs.len(),
            runs.iter().filter(|r| !answer_matches(&r.answer, &r.expected)).count()
        ),
    )
}

fn anytime_soundness(runs: &[SuiteRun]) -> Outcome {
    let mut prefixes = 0usize;
    let failures: Vec<String> = runs
        .iter()
        .filter_map(|r| {
            prefixes += r.log.events.len();
            check_prefixes(&r.log.events, &r.query, &r.expected)
                .err()
                .map(|e| format!("{} {}: {e}", r.fixture, r.mode))
        })
        .collect();
    outcome(&failures, format!("{prefixes} event prefixes replayed"))
}

fn monotonicity(fixtures: &[Fixture], runs: &[SuiteRun]) -> Outcome {
    let mut failures = Vec::new();
    let by_name: std::collections::HashMap<&str, &Fixture> =
        fixtures.iter().map(|f| (f.name.as_str(), f)).collect();
    for r in runs {
        if let Err(e) = check_monotone(&r.log.events) {
            failures.push(format!("{} {}: {e}", r.fixture, r.mode));
            continue;
        }
        let fixture = by_name[r.fixture.as_str()];
        let mut out = Vec::new();
        let mut csv = Vec::new();
        {
            let trace = TraceWriter::new(Box::new(&mut csv) as Box<dyn Write>, r.query.len()).unwrap();
            let mut writer = ProtocolWriter::new(&fixture.program, &mut out).with_trace(trace);
            for e in &r.log.events {
                cautious::algorithms::EventSink::event(&mut writer, e);
            }
            writer.finish().unwrap();
        }
        let protocol = String::from_utf8(out).unwrap();
        let mut seen = std::collections::HashSet::new();
        for line in protocol.lines() {
            if let Some(atom) = line.strip_prefix("u ").or_else(|| line.strip_prefix("o ")) {
                if !seen.insert(atom.to_string()) {
                    failures.push(format!("{} {}: {atom} repeated", r.fixture, r.mode));
                }
            }
        }
        if let Err(e) = check_trace_csv(&String::from_utf8(csv).unwrap()) {
            failures.push(format!("{} {}: {e}", r.fixture, r.mode));
        }
    }
    outcome(&failures, format!("{} protocol outputs and traces checked", runs.len()))
}

fn termination(runs: &[SuiteRun]) -> Outcome {
    let failures: Vec<String> = runs
        .iter()
        .filter(|r| matches!(r.answer, Answer::Partial { .. }))
        .map(|r| format!("{} {} ran out of budget", r.fixture, r.mode))
        .collect();
    outcome(
        &failures,
        format!("{} runs within {CONFLICT_BUDGET} conflicts, Luby base 32", runs.len()),
    )
}

fn protocol_lines(fixture: &Fixture, log: &EventLog) -> String {
    let mut out = Vec::new();
    let mut writer = ProtocolWriter::new(&fixture.program, &mut out);
    for e in &log.events {
        cautious::algorithms::EventSink::event(&mut writer, e);
    }
    writer.finish().unwrap();
    String::from_utf8(out).unwrap()
}

fn degeneration(fixtures: &[Fixture]) -> Outcome {
    let mut failures = Vec::new();
    let mut restarts_seen = 0;
    for fixture in fixtures.iter().take(50) {
        for seed in [0u64, 7] {
            let options = SolverOptions {
                restart_base: None,
                seed,
                ..SolverOptions::default()
            };
            let mut traces = Vec::new();
            for procedure in [Procedure::Ict, Procedure::Ipct] {
                let mut log = EventLog::default();
                cautious_reasoning(
                    &fixture.program,
                    &fixture.query,
                    AlgorithmId::new(procedure, false),
                    &options,
                    &mut log,
                );
                restarts_seen += log.outcomes.iter().filter(|o| **o == SearchOutcome::Restarted).count();
                traces.push(protocol_lines(fixture, &log));
            }
            if traces[0] != traces[1] {
                failures.push(format!("{} seed {seed}: traces differ", fixture.name));
            }
        }
    }
    if restarts_seen > 0 {
        failures.push(format!("{restarts_seen} restarts with restarts disabled"));
    }
    outcome(&failures, "50 fixtures x 2 seeds, A3 vs A4 with restarts disabled".into())
}

/// A satisfiable CNF with unit clauses fixing x1 and ¬x2, plus a random
/// part over the remaining variables.
fn early_yield_cnf() -> Cnf {
    let mut rng = common::rng(2024);
    let mut clauses = vec![vec![1], vec![-2], vec![-1, 2, 3]];
    let mut cnf = common::random_cnf(&mut rng, 10);
    cnf.vars = cnf.vars.max(3) + 2;
    for c in &mut cnf.clauses {
        for l in c.iter_mut() {
            *l = l.signum() * (l.abs() + 2);
        }
    }
    clauses.extend(cnf.clauses);
    Cnf {
        vars: cnf.vars,
        clauses,
    }
}

fn early_yield() -> Outcome {
    let mut failures = Vec::new();
    let mut cnf = early_yield_cnf();
    let mut salt = 0;
    while cnf.backbone().is_none() {
        salt += 1;
        cnf.clauses.truncate(3 + cnf.clauses.len().saturating_sub(3) / 2);
        assert!(salt < 20, "could not build a satisfiable instance");
    }
    let program = parse_dimacs(&cnf.dimacs()).unwrap();
    let query = program.all_atoms();
    let options = SolverOptions {
        restart_base: Some(1),
        ..SolverOptions::default()
    };
    let mut details = Vec::new();
    for (procedure, starred) in [
        (Procedure::OverestimateReduction, true),
        (Procedure::Ict, true),
        (Procedure::Ipct, true),
        (Procedure::OverestimateReduction, false),
    ] {
        let alg = AlgorithmId::new(procedure, starred);
        let mut log = EventLog::default();
        cautious_reasoning(&program, &query, alg, &options, &mut log);
        let first = log
            .outcomes
            .iter()
            .position(|o| matches!(o, SearchOutcome::Model | SearchOutcome::Unsat))
            .expect("a search outcome");
        let early = log.events[..log.events_before_outcome[first]]
            .iter()
            .filter(|e| e.kind == EventKind::UnderestimateAdd)
            .count();
        details.push(format!("{alg}: {early}"));
        if starred && early == 0 {
            failures.push(format!("{alg} emitted no early u line"));
        }
        if !starred && early > 0 {
            failures.push(format!("{alg} emitted {early} u lines before its first outcome"));
        }
    }
    outcome(&failures, format!("u lines before first outcome: {}", details.join(", ")))
}

fn multi_agreement(fixtures: &[Fixture]) -> Outcome {
    let mut failures = Vec::new();
    let chosen: Vec<&Fixture> = fixtures
        .iter()
        .step_by(fixtures.len() / 50)
        .take(50)
        .collect();
    for fixture in &chosen {
        for round in 0..3 {
            let (answer, log) = run_mode(fixture, Mode::Multi, &SolverOptions::default());
            if !answer_matches(&answer, &fixture.expected) {
                failures.push(format!("{} round {round}: got {answer:?}", fixture.name));
            }
            if let Err(e) = check_prefixes(&log.events, &fixture.query, &fixture.expected) {
                failures.push(format!("{} round {round}: {e}", fixture.name));
            }
        }
    }
    outcome(&failures, format!("{} fixtures x 3 runs", chosen.len()))
}

fn determinism(fixtures: &[Fixture]) -> Outcome {
    let dir = tempfile::tempdir().expect("temporary directory");
    let mut failures = Vec::new();
    let chosen: Vec<&Fixture> = fixtures
        .iter()
        .step_by(fixtures.len() / 20)
        .take(20)
        .collect();
    for (i, fixture) in chosen.iter().enumerate() {
        let input = dir.path().join(format!("f{i}.in"));
        std::fs::write(&input, &fixture.text).unwrap();
        let query = dir.path().join(format!("f{i}.q"));
        let names = fixture.program.names(fixture.query.iter().copied()).join("\n");
        std::fs::write(&query, names).unwrap();
        for alg in AlgorithmId::all() {
            let mut argv = vec![
                "cautious".to_string(),
                input.display().to_string(),
                "--query".into(),
                query.display().to_string(),
                "--seed".into(),
                "11".into(),
                "--restart-base".into(),
                "4".into(),
            ];
            let algorithm = match alg.procedure {
                Procedure::Enumeration => "enum",
                Procedure::OverestimateReduction => "ored",
                Procedure::Ict => "ict",
                Procedure::Ipct => "ipct",
            };
            argv.extend(["--algorithm".into(), algorithm.into()]);
            if alg.starred {
                argv.push("--starred".into());
            }
            let outputs: Vec<(i32, Vec<u8>)> = (0..2)
                .map(|_| {
                    let mut out = Vec::new();
                    let mut err = Vec::new();
                    let code = cli::run_with_io(&argv, Arc::new(AtomicBool::new(false)), &mut out, &mut err);
                    (code, out)
                })
                .collect();
            if outputs[0] != outputs[1] {
                failures.push(format!("{} {alg}: outputs differ", fixture.name));
            }
        }
    }
    outcome(&failures, format!("{} fixtures x 8 modes x 2 runs via the CLI", chosen.len()))
}

fn main() {
    let mut all_passed = true;
    let mut report = |n: u32, title: &str, o: Outcome| {
        all_passed &= o.passed;
        println!(
            "{} criterion {n} ({title}): {}",
            if o.passed { "PASS" } else { "FAIL" },
            o.detail
        );
    };

    report(1, "golden answer", golden_answer());
    let fixtures = suite_fixtures();
    let (runs, elapsed) = run_suite(&fixtures);
    report(2, "oracle equivalence", oracle_equivalence(&fixtures, &runs, elapsed));
    report(3, "anytime soundness", anytime_soundness(&runs));
    report(4, "monotonicity", monotonicity(&fixtures, &runs));
    report(5, "termination", termination(&runs));
    report(6, "A4 equals A3 without restarts", degeneration(&fixtures));
    report(7, "starred early yield", early_yield());
    report(8, "multi agreement", multi_agreement(&fixtures));
    report(9, "determinism", determinism(&fixtures));

    if !all_passed {
        std::process::exit(1);
    }
}
