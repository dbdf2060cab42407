//! Two cooperating workers: overestimate reduction (W1) and iterative partial
//! coherence testing (W2), both starred. They share estimates and short
//! learned clauses through a coordinator that merges their event streams.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::mpsc::{channel, Receiver, Sender};
use std::sync::Arc;
use std::thread;
use std::time::Instant;

use crate::algorithms::{
    prepare, run_worker, AlgorithmId, Answer, EstimateEvent, EventKind, EventSink, Exchange,
    ExchangeMessage, Inbound, Procedure, RunReport, SolverOptions, WorkerId,
    WorkerSetup,
};
use crate::engine::EngineStats;
use crate::program::{Atom, AtomSet, Estimates, Program};

pub const W1_ALGORITHM: AlgorithmId = AlgorithmId::new(Procedure::OverestimateReduction, true);
pub const W2_ALGORITHM: AlgorithmId = AlgorithmId::new(Procedure::Ipct, true);

/// Fault injection for tests.
#[doc(hidden)]
#[derive(Debug, Clone, Default)]
pub struct Faults {
    /// Worker that never makes progress.
    pub stall: Option<WorkerId>,
    /// Worker that panics on start.
    pub crash: Option<WorkerId>,
    /// Messages delivered to a worker before it starts.
    pub inject: Vec<(WorkerId, ExchangeMessage)>,
}

enum Report {
    Event(EstimateEvent),
    Exchange(WorkerId, ExchangeMessage),
    Coherent(WorkerId),
    Finished(WorkerId, Answer, EngineStats),
    Crashed,
}

struct ChannelSink {
    reports: Sender<Report>,
}

impl EventSink for ChannelSink {
    fn event(&mut self, event: &EstimateEvent) {
        let _ = self.reports.send(Report::Event(event.clone()));
    }

}

struct ChannelExchange {
    id: WorkerId,
    inbox: Receiver<Inbound>,
    reports: Sender<Report>,
}

impl Exchange for ChannelExchange {
    fn inbox(&mut self) -> Vec<Inbound> {
        self.inbox.try_iter().collect()
    }

    fn publish(&mut self, message: ExchangeMessage) {
        let _ = self.reports.send(Report::Exchange(self.id, message));
    }

    fn coherent(&mut self) {
        let _ = self.reports.send(Report::Coherent(self.id));
    }
}

fn peer(id: WorkerId) -> WorkerId {
    match id {
        WorkerId::W1 => WorkerId::W2,
        WorkerId::W2 => WorkerId::W1,
    }
}

struct Merger<'a> {
    estimates: Estimates,
    sink: &'a mut dyn EventSink,
    start: Instant,
}

impl Merger<'_> {
    fn emit(&mut self, kind: EventKind, atom: Option<Atom>, origin: Option<WorkerId>) {
        self.sink.event(&EstimateEvent {
            kind,
            atom,
            t_ms: self.start.elapsed().as_millis() as u64,
            origin,
        });
    }

    fn under(&mut self, atom: Atom, origin: WorkerId) {
        if self.estimates.over.contains(&atom) && self.estimates.under.insert(atom) {
            self.emit(EventKind::UnderestimateAdd, Some(atom), Some(origin));
        }
    }

    fn over(&mut self, atom: Atom, origin: WorkerId) {
        if !self.estimates.under.contains(&atom) && self.estimates.over.remove(&atom) {
            self.emit(EventKind::OverestimateRemove, Some(atom), Some(origin));
        }
    }

    fn partial(&mut self) -> Answer {
        self.emit(EventKind::Partial, None, None);
        Answer::Partial {
            under: self.estimates.under.clone(),
            over: self.estimates.over.clone(),
        }
    }
}

/// Runs both workers and returns as soon as one of them completes.
pub fn run_multi(
    program: &Program,
    query: &AtomSet,
    options: &SolverOptions,
    sink: &mut dyn EventSink,
) -> RunReport {
    run_multi_with_faults(program, query, options, &Faults::default(), sink)
}

#[doc(hidden)]
pub fn run_multi_with_faults(
    program: &Program,
    query: &AtomSet,
    options: &SolverOptions,
    faults: &Faults,
    sink: &mut dyn EventSink,
) -> RunReport {
    let start = Instant::now();
    let prepared = prepare(program, query);
    let mut merger = Merger {
        estimates: Estimates::new(query),
        sink,
        start,
    };
    if prepared.report.incoherent {
        merger.emit(EventKind::Incoherent, None, None);
        return RunReport {
            answer: Answer::Incoherent,
            stats: EngineStats::default(),
            simplification: prepared.report,
        };
    }

    let stop = Arc::new(AtomicBool::new(false));
    let (report_tx, report_rx) = channel::<Report>();
    let (w1_tx, w1_rx) = channel::<Inbound>();
    let (w2_tx, w2_rx) = channel::<Inbound>();
    for (id, message) in &faults.inject {
        let tx = if *id == WorkerId::W1 { &w1_tx } else { &w2_tx };
        let _ = tx.send(Inbound::Exchange(message.clone()));
    }

    let mut answer = None;
    let mut stats = EngineStats::default();
    thread::scope(|scope| {
        for (id, inbox) in [(WorkerId::W1, w1_rx), (WorkerId::W2, w2_rx)] {
            let reports = report_tx.clone();
            let stop = Arc::clone(&stop);
            let clauses = prepared.clauses.clone();
            let mut engine_options = options.engine_options();
            engine_options.cancel.push(Arc::clone(&stop));
            if id == WorkerId::W2 {
                engine_options.seed = options.seed.wrapping_add(1);
            }
            let stall = faults.stall == Some(id);
            let crash = faults.crash == Some(id);
            let selection = options.selection;
            scope.spawn(move || {
                let crash_reports = reports.clone();
                let result = catch_unwind(AssertUnwindSafe(|| {
                    if crash {
                        panic!("injected worker failure");
                    }
                    if stall {
                        while !engine_options.cancel.iter().any(|f| f.load(Ordering::Relaxed)) {
                            thread::sleep(std::time::Duration::from_millis(1));
                        }
                        let _ = reports.send(Report::Finished(
                            id,
                            Answer::Partial {
                                under: AtomSet::new(),
                                over: query.clone(),
                            },
                            EngineStats::default(),
                        ));
                        return;
                    }
                    let setup = WorkerSetup {
                        program,
                        clauses,
                        query,
                        algorithm: if id == WorkerId::W1 { W1_ALGORITHM } else { W2_ALGORITHM },
                        options: engine_options,
                        selection,
                        origin: Some(id),
                        skip_coherence_test: id == WorkerId::W2,
                        start,
                    };
                    let mut sink = ChannelSink {
                        reports: reports.clone(),
                    };
                    let mut exchange = ChannelExchange {
                        id,
                        inbox,
                        reports: reports.clone(),
                    };
                    let (answer, stats) = run_worker(setup, &mut sink, Some(&mut exchange));
                    let _ = reports.send(Report::Finished(id, answer, stats));
                }));
                if result.is_err() {
                    let _ = crash_reports.send(Report::Crashed);
                }
            });
        }
        drop(report_tx);

        let inboxes = [w1_tx, w2_tx];
        let inbox = |id: WorkerId| &inboxes[if id == WorkerId::W1 { 0 } else { 1 }];
        let mut running = 2;
        for report in report_rx.iter() {
            if answer.is_some() {
                // drain until both workers have stopped
                if matches!(report, Report::Finished(..) | Report::Crashed) {
                    running -= 1;
                    if running == 0 {
                        break;
                    }
                }
                continue;
            }
            match report {
                Report::Event(event) => match (event.kind, event.atom) {
                    (EventKind::UnderestimateAdd, Some(a)) => merger.under(a, event.origin.unwrap_or(WorkerId::W1)),
                    (EventKind::OverestimateRemove, Some(a)) => merger.over(a, event.origin.unwrap_or(WorkerId::W1)),
                    _ => {}
                },
                Report::Exchange(from, message) => {
                    let _ = inbox(peer(from)).send(Inbound::Exchange(message));
                }
                Report::Coherent(from) => {
                    let _ = inbox(peer(from)).send(Inbound::PeerCoherent);
                }
                Report::Finished(id, worker_answer, worker_stats) => {
                    running -= 1;
                    stats = add_stats(stats, worker_stats);
                    match worker_answer {
                        Answer::Complete(result) => {
                            for &a in &result {
                                merger.under(a, id);
                            }
                            let extra: Vec<Atom> = merger
                                .estimates
                                .over
                                .difference(&result)
                                .copied()
                                .collect();
                            for a in extra {
                                merger.over(a, id);
                            }
                            merger.emit(EventKind::Complete, None, Some(id));
                            answer = Some(Answer::Complete(result));
                        }
                        Answer::Incoherent => {
                            merger.emit(EventKind::Incoherent, None, Some(id));
                            answer = Some(Answer::Incoherent);
                        }
                        Answer::Partial { .. } => {}
                    }
                    if answer.is_some() {
                        stop.store(true, Ordering::Relaxed);
                    }
                    if running == 0 {
                        break;
                    }
                }
                Report::Crashed => {
                    running -= 1;
                    if running == 0 {
                        break;
                    }
                }
            }
        }
        if answer.is_none() {
            stop.store(true, Ordering::Relaxed);
            answer = Some(merger.partial());
        }
    });

    RunReport {
        answer: answer.expect("coordinator always decides"),
        stats,
        simplification: prepared.report,
    }
}

fn add_stats(a: EngineStats, b: EngineStats) -> EngineStats {
    EngineStats {
        conflicts: a.conflicts + b.conflicts,
        decisions: a.decisions + b.decisions,
        propagations: a.propagations + b.propagations,
        restarts: a.restarts + b.restarts,
        learned: a.learned + b.learned,
        loop_nogoods: a.loop_nogoods + b.loop_nogoods,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algorithms::EventLog;
    use crate::ingest::parse_asp;
    use crate::test_fixtures::EXAMPLE_PROGRAM;

    fn q_atoms(p: &Program) -> AtomSet {
        p.atom_set(&["Q(1,1)", "Q(2,2)", "Q(2,3)", "Q(3,2)", "Q(3,3)"])
    }

    #[test]
    fn example_answer() {
        let p = parse_asp(EXAMPLE_PROGRAM).unwrap();
        for _ in 0..3 {
            let mut log = EventLog::default();
            let report = run_multi(&p, &q_atoms(&p), &SolverOptions::default(), &mut log);
            assert_eq!(report.answer, Answer::Complete(p.atom_set(&["Q(1,1)", "Q(2,2)", "Q(2,3)"])));
            assert_eq!(log.events.last().unwrap().kind, EventKind::Complete);
            assert!(log.events.iter().all(|e| e.origin.is_some()));
        }
    }

    #[test]
    fn survives_a_stalled_or_crashed_worker() {
        let p = parse_asp(EXAMPLE_PROGRAM).unwrap();
        let expected = Answer::Complete(p.atom_set(&["Q(1,1)", "Q(2,2)", "Q(2,3)"]));
        for id in [WorkerId::W1, WorkerId::W2] {
            let stalled = Faults {
                stall: Some(id),
                ..Faults::default()
            };
            let crashed = Faults {
                crash: Some(id),
                ..Faults::default()
            };
            for faults in [stalled, crashed] {
                let mut log = EventLog::default();
                let report = run_multi_with_faults(&p, &q_atoms(&p), &SolverOptions::default(), &faults, &mut log);
                assert_eq!(report.answer, expected, "{faults:?}");
                assert!(log.events.iter().filter(|e| e.atom.is_some()).all(|e| e.origin == Some(peer(id))));
            }
        }
    }

    #[test]
    fn injected_unit_reaches_the_underestimate() {
        let p = parse_asp("x :- not y. y :- not x. a :- x. a :- y.").unwrap();
        let a = p.atom("a").unwrap();
        let query = p.all_atoms();
        let faults = Faults {
            stall: Some(WorkerId::W2),
            inject: vec![(
                WorkerId::W1,
                ExchangeMessage::ShortClause(vec![crate::lit::Var::from(a).positive()]),
            )],
            ..Faults::default()
        };
        let mut log = EventLog::default();
        let report = run_multi_with_faults(&p, &query, &SolverOptions::default(), &faults, &mut log);
        assert!(!report.simplification.fixed_true.contains(&a));
        let first = &log.events[0];
        assert_eq!(first.kind, EventKind::UnderestimateAdd);
        assert_eq!(first.atom, Some(a));
        assert_eq!(first.origin, Some(WorkerId::W1));
        assert_eq!(report.answer, Answer::Complete(p.atom_set(&["a"])));
    }

    #[test]
    fn incoherent_program() {
        let p = parse_asp("a :- not b. b :- not c. c :- not a.").unwrap();
        let mut log = EventLog::default();
        let report = run_multi(&p, &p.all_atoms(), &SolverOptions::default(), &mut log);
        assert_eq!(report.answer, Answer::Incoherent);
        assert_eq!(log.events.last().unwrap().kind, EventKind::Incoherent);
    }

    #[test]
    fn both_workers_failing_gives_partial() {
        let p = parse_asp(EXAMPLE_PROGRAM).unwrap();
        let faults = Faults {
            crash: Some(WorkerId::W1),
            stall: Some(WorkerId::W2),
            ..Faults::default()
        };
        let cancel = Arc::new(AtomicBool::new(false));
        let options = SolverOptions {
            cancel: Some(Arc::clone(&cancel)),
            ..SolverOptions::default()
        };
        let flag = Arc::clone(&cancel);
        let timer = thread::spawn(move || {
            thread::sleep(std::time::Duration::from_millis(50));
            flag.store(true, Ordering::Relaxed);
        });
        let mut log = EventLog::default();
        let report = run_multi_with_faults(&p, &q_atoms(&p), &options, &faults, &mut log);
        timer.join().unwrap();
        assert!(matches!(report.answer, Answer::Partial { .. }));
        assert_eq!(log.events.last().unwrap().kind, EventKind::Partial);
    }
}
