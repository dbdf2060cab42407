//! The cautious-reasoning driver and its four improvement procedures.
//!
//! The driver keeps an underestimate `U` and an overestimate `O` of the
//! cautious consequences within the query, starting from `U = ∅`, `O = Q`,
//! and stops when they meet. Every change is reported to an [`EventSink`] as
//! it happens, so interrupted runs still yield sound partial answers.

use std::fmt;
use std::sync::atomic::AtomicBool;
use std::sync::Arc;
use std::time::Instant;

use crate::completion::{complete, ClauseSet};
use crate::engine::{Engine, EngineOptions, EngineStats, Guard, Restriction, SolveOutcome};
use crate::lit::Lit;
use crate::preprocess::{simplify, SimplificationReport};
use crate::program::{Atom, AtomSet, Estimates, Interpretation, Program};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Procedure {
    /// Enumerate models, blocking each one found.
    Enumeration,
    /// Ask for a model falsifying some atom of the overestimate.
    OverestimateReduction,
    /// Test one candidate at a time until a model or a refutation.
    Ict,
    /// As `Ict`, but reconsider the candidate at every restart.
    Ipct,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AlgorithmId {
    pub procedure: Procedure,
    /// Report level-0 consequences at every restart.
    pub starred: bool,
}

impl AlgorithmId {
    pub const fn new(procedure: Procedure, starred: bool) -> Self {
        AlgorithmId { procedure, starred }
    }

    pub fn all() -> Vec<AlgorithmId> {
        let procedures = [
            Procedure::Enumeration,
            Procedure::OverestimateReduction,
            Procedure::Ict,
            Procedure::Ipct,
        ];
        [false, true]
            .into_iter()
            .flat_map(|starred| procedures.map(|p| AlgorithmId::new(p, starred)))
            .collect()
    }
}

impl Default for AlgorithmId {
    fn default() -> Self {
        AlgorithmId::new(Procedure::Ipct, true)
    }
}

impl fmt::Display for AlgorithmId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = match self.procedure {
            Procedure::Enumeration => 1,
            Procedure::OverestimateReduction => 2,
            Procedure::Ict => 3,
            Procedure::Ipct => 4,
        };
        write!(f, "A{n}{}", if self.starred { "*" } else { "" })
    }
}

/// Candidate selection for the iterative procedures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Selection {
    /// Lowest atom id.
    First,
    /// Highest branching activity, lowest id on ties.
    #[default]
    MaxActivity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum WorkerId {
    W1,
    W2,
}

impl fmt::Display for WorkerId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WorkerId::W1 => "W1",
            WorkerId::W2 => "W2",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EventKind {
    UnderestimateAdd,
    OverestimateRemove,
    Complete,
    Incoherent,
    Partial,
}

impl EventKind {
    pub fn is_terminal(self) -> bool {
        !matches!(self, EventKind::UnderestimateAdd | EventKind::OverestimateRemove)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EstimateEvent {
    pub kind: EventKind,
    pub atom: Option<Atom>,
    pub t_ms: u64,
    pub origin: Option<WorkerId>,
}

/// Outcome of one search call, as seen by a sink.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchOutcome {
    Model,
    Unsat,
    Restarted,
    Interrupted,
}

impl From<&SolveOutcome> for SearchOutcome {
    fn from(outcome: &SolveOutcome) -> Self {
        match outcome {
            SolveOutcome::Model(_) => SearchOutcome::Model,
            SolveOutcome::Unsat => SearchOutcome::Unsat,
            SolveOutcome::Restarted => SearchOutcome::Restarted,
            SolveOutcome::Interrupted => SearchOutcome::Interrupted,
        }
    }
}

pub trait EventSink {
    fn event(&mut self, event: &EstimateEvent);

    /// Called after every search call returns.
    fn search_outcome(&mut self, _outcome: SearchOutcome) {}
}

impl<F: FnMut(&EstimateEvent)> EventSink for F {
    fn event(&mut self, event: &EstimateEvent) {
        self(event)
    }
}

/// Records events and search outcomes in order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EventLog {
    pub events: Vec<EstimateEvent>,
    pub outcomes: Vec<SearchOutcome>,
    /// Number of events emitted before each entry of `outcomes`.
    pub events_before_outcome: Vec<usize>,
}

impl EventSink for EventLog {
    fn event(&mut self, event: &EstimateEvent) {
        self.events.push(event.clone());
    }

    fn search_outcome(&mut self, outcome: SearchOutcome) {
        self.outcomes.push(outcome);
        self.events_before_outcome.push(self.events.len());
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Answer {
    /// `Q ∩ CC(P)`.
    Complete(AtomSet),
    Incoherent,
    /// Interrupted; `under ⊆ Q ∩ CC(P) ⊆ over`.
    Partial { under: AtomSet, over: AtomSet },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunReport {
    pub answer: Answer,
    pub stats: EngineStats,
    pub simplification: SimplificationReport,
}

#[derive(Debug, Clone)]
pub struct SolverOptions {
    /// Luby base in conflicts; `None` disables restarts.
    pub restart_base: Option<u64>,
    pub seed: u64,
    /// `None` uses the default for the procedure.
    pub selection: Option<Selection>,
    pub conflict_budget: Option<u64>,
    pub cancel: Option<Arc<AtomicBool>>,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            restart_base: Some(32),
            seed: 0,
            selection: None,
            conflict_budget: None,
            cancel: None,
        }
    }
}

impl SolverOptions {
    pub fn engine_options(&self) -> EngineOptions {
        EngineOptions {
            restart_base: self.restart_base,
            seed: self.seed,
            conflict_budget: self.conflict_budget,
            cancel: self.cancel.iter().cloned().collect(),
            ..EngineOptions::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExchangeMessage {
    UnderAdd(Atom),
    OverRemove(Atom),
    /// A learned clause of at most two literals.
    ShortClause(Vec<Lit>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Inbound {
    Exchange(ExchangeMessage),
    /// The peer has found a stable model.
    PeerCoherent,
}

/// Connection of a worker to its peer.
pub trait Exchange {
    /// Messages received since the last call.
    fn inbox(&mut self) -> Vec<Inbound>;
    fn publish(&mut self, message: ExchangeMessage);
    /// Announces that a stable model exists.
    fn coherent(&mut self);
}

/// Picks a candidate from a non-empty set.
pub fn one_of(candidates: &AtomSet, selection: Selection, engine: &Engine) -> Atom {
    let mut iter = candidates.iter().copied();
    let first = iter.next().expect("one_of needs a candidate");
    match selection {
        Selection::First => first,
        Selection::MaxActivity => iter.fold(first, |best, a| {
            if engine.activity(a) > engine.activity(best) {
                a
            } else {
                best
            }
        }),
    }
}

/// Completion and simplification shared by every mode.
pub struct Prepared {
    pub clauses: ClauseSet,
    pub report: SimplificationReport,
}

pub fn prepare(program: &Program, query: &AtomSet) -> Prepared {
    let (clauses, report) = simplify(&complete(program), query);
    Prepared { clauses, report }
}

struct Tracker<'a> {
    estimates: Estimates,
    sink: &'a mut dyn EventSink,
    exchange: Option<&'a mut dyn Exchange>,
    start: Instant,
    origin: Option<WorkerId>,
    starred: bool,
    coherent: bool,
}

impl Tracker<'_> {
    fn emit(&mut self, kind: EventKind, atom: Option<Atom>) {
        let event = EstimateEvent {
            kind,
            atom,
            t_ms: self.start.elapsed().as_millis() as u64,
            origin: self.origin,
        };
        self.sink.event(&event);
    }

    fn add_under(&mut self, atoms: impl IntoIterator<Item = Atom>, publish: bool) {
        let mut fresh: Vec<Atom> = atoms
            .into_iter()
            .filter(|a| self.estimates.over.contains(a) && !self.estimates.under.contains(a))
            .collect();
        fresh.sort_unstable();
        fresh.dedup();
        for a in fresh {
            self.estimates.under.insert(a);
            self.emit(EventKind::UnderestimateAdd, Some(a));
            if publish {
                if let Some(x) = self.exchange.as_mut() {
                    x.publish(ExchangeMessage::UnderAdd(a));
                }
            }
        }
    }

    fn remove_over(&mut self, atoms: impl IntoIterator<Item = Atom>, publish: bool) {
        let mut gone: Vec<Atom> = atoms
            .into_iter()
            .filter(|a| self.estimates.over.contains(a) && !self.estimates.under.contains(a))
            .collect();
        gone.sort_unstable();
        gone.dedup();
        for a in gone {
            self.estimates.over.remove(&a);
            self.emit(EventKind::OverestimateRemove, Some(a));
            if publish {
                if let Some(x) = self.exchange.as_mut() {
                    x.publish(ExchangeMessage::OverRemove(a));
                }
            }
        }
    }

    fn intersect_over(&mut self, model: &Interpretation) {
        let gone: Vec<Atom> = self
            .estimates
            .over
            .iter()
            .copied()
            .filter(|&a| !model.contains(a))
            .collect();
        self.remove_over(gone, true);
    }

    fn mark_coherent(&mut self) {
        if !self.coherent {
            self.coherent = true;
            if let Some(x) = self.exchange.as_mut() {
                x.coherent();
            }
        }
    }

    /// Work done with the engine at level 0: exchange with the peer and, for
    /// starred variants, collect the query atoms fixed true.
    fn boundary(&mut self, engine: &mut Engine) {
        if self.exchange.is_some() {
            let inbox = self.exchange.as_mut().map(|x| x.inbox()).unwrap_or_default();
            for message in inbox {
                match message {
                    Inbound::PeerCoherent => self.coherent = true,
                    Inbound::Exchange(ExchangeMessage::UnderAdd(a)) => self.add_under([a], false),
                    Inbound::Exchange(ExchangeMessage::OverRemove(a)) => self.remove_over([a], false),
                    Inbound::Exchange(ExchangeMessage::ShortClause(c)) => {
                        engine.import_clause(c);
                    }
                }
            }
            let exports = engine.take_exports();
            if let Some(x) = self.exchange.as_mut() {
                for clause in exports {
                    x.publish(ExchangeMessage::ShortClause(clause));
                }
            }
        }
        if self.starred {
            let fixed: Vec<Atom> = self
                .estimates
                .over
                .iter()
                .copied()
                .filter(|a| !self.estimates.under.contains(a) && engine.level0_value(*a) == Some(true))
                .collect();
            self.add_under(fixed, true);
        }
    }
}

enum Step {
    Continue,
    Interrupted,
}

struct Reasoner<'a> {
    engine: Engine,
    tracker: Tracker<'a>,
    algorithm: AlgorithmId,
    selection: Selection,
    block_guard: Option<Guard>,
    last_model: Option<Interpretation>,
}

impl Reasoner<'_> {
    /// One search call in the style of the algorithm: plain, or with the
    /// restart-boundary hook for starred variants.
    fn search(&mut self, restriction: Restriction) -> SolveOutcome {
        let outcome = if self.algorithm.starred || self.tracker.exchange.is_some() {
            let tracker = &mut self.tracker;
            self.engine
                .compute_stable_model_star(restriction, &mut |engine| tracker.boundary(engine))
        } else {
            self.engine.compute_stable_model(restriction)
        };
        self.tracker.sink.search_outcome(SearchOutcome::from(&outcome));
        outcome
    }

    fn search_up_to_restart(&mut self, restriction: Restriction) -> SolveOutcome {
        if self.algorithm.starred || self.tracker.exchange.is_some() {
            self.tracker.boundary(&mut self.engine);
        }
        let outcome = self.engine.compute_up_to_next_restart(restriction);
        self.tracker.sink.search_outcome(SearchOutcome::from(&outcome));
        outcome
    }

    fn candidates(&self) -> AtomSet {
        self.tracker
            .estimates
            .over
            .difference(&self.tracker.estimates.under)
            .copied()
            .collect()
    }

    fn step_enumeration(&mut self) -> Step {
        let guard = match self.block_guard {
            Some(g) => g,
            None => {
                let g = self.engine.new_guard();
                self.block_guard = Some(g);
                g
            }
        };
        if let Some(model) = self.last_model.take() {
            let atoms: Vec<Atom> = model.iter().filter(|&a| !self.engine.is_eliminated(a)).collect();
            self.engine.add_guarded_constraint(guard, &atoms);
        }
        match self.search(Restriction::All) {
            SolveOutcome::Model(model) => {
                self.tracker.intersect_over(&model);
                self.last_model = Some(model);
            }
            SolveOutcome::Unsat => {
                let all = self.candidates();
                self.tracker.add_under(all, true);
            }
            _ => return Step::Interrupted,
        }
        Step::Continue
    }

    fn step_overestimate_reduction(&mut self) -> Step {
        let guard = self.engine.new_guard();
        let over: Vec<Atom> = self.tracker.estimates.over.iter().copied().collect();
        self.engine.add_guarded_constraint(guard, &over);
        let outcome = self.search(Restriction::All);
        self.engine.retract_guard(guard);
        match outcome {
            SolveOutcome::Model(model) => {
                self.tracker.mark_coherent();
                self.tracker.intersect_over(&model);
            }
            SolveOutcome::Unsat => {
                let all = self.candidates();
                self.tracker.add_under(all, true);
            }
            _ => return Step::Interrupted,
        }
        Step::Continue
    }

    fn step_coherence_testing(&mut self) -> Step {
        let candidate = one_of(&self.candidates(), self.selection, &self.engine);
        let restriction = Restriction::Falsify(candidate);
        let outcome = match self.algorithm.procedure {
            Procedure::Ipct => self.search_up_to_restart(restriction),
            _ => self.search(restriction),
        };
        match outcome {
            SolveOutcome::Model(model) => {
                self.tracker.mark_coherent();
                self.tracker.intersect_over(&model);
            }
            SolveOutcome::Unsat => self.tracker.add_under([candidate], true),
            SolveOutcome::Restarted => {}
            SolveOutcome::Interrupted => return Step::Interrupted,
        }
        Step::Continue
    }

    fn partial(&mut self) -> Answer {
        self.tracker.emit(EventKind::Partial, None);
        Answer::Partial {
            under: self.tracker.estimates.under.clone(),
            over: self.tracker.estimates.over.clone(),
        }
    }

    fn incoherent(&mut self) -> Answer {
        self.tracker.emit(EventKind::Incoherent, None);
        Answer::Incoherent
    }

    /// Finds a first stable model. `None` means interrupted.
    fn coherence_test(&mut self) -> Option<Answer> {
        match self.search(Restriction::All) {
            SolveOutcome::Model(model) => {
                self.tracker.mark_coherent();
                self.tracker.intersect_over(&model);
                self.last_model = Some(model);
                None
            }
            SolveOutcome::Unsat => Some(self.incoherent()),
            _ => Some(self.partial()),
        }
    }

    fn run(&mut self, skip_coherence_test: bool) -> Answer {
        if !skip_coherence_test {
            if let Some(answer) = self.coherence_test() {
                return answer;
            }
        }
        loop {
            if self.tracker.exchange.is_some() {
                self.tracker.boundary(&mut self.engine);
            }
            if self.tracker.estimates.is_closed() {
                if !self.tracker.coherent {
                    if let Some(answer) = self.coherence_test() {
                        return answer;
                    }
                    continue;
                }
                break;
            }
            let step = match self.algorithm.procedure {
                Procedure::Enumeration => self.step_enumeration(),
                Procedure::OverestimateReduction => self.step_overestimate_reduction(),
                Procedure::Ict | Procedure::Ipct => self.step_coherence_testing(),
            };
            if let Step::Interrupted = step {
                return self.partial();
            }
        }
        self.tracker.emit(EventKind::Complete, None);
        Answer::Complete(self.tracker.estimates.under.clone())
    }
}

/// Everything a single run needs besides the sink.
pub struct WorkerSetup<'a> {
    pub program: &'a Program,
    pub clauses: ClauseSet,
    pub query: &'a AtomSet,
    pub algorithm: AlgorithmId,
    pub options: EngineOptions,
    pub selection: Option<Selection>,
    pub origin: Option<WorkerId>,
    pub skip_coherence_test: bool,
    pub start: Instant,
}

/// Runs one algorithm over an already simplified clause set.
pub fn run_worker<'s>(
    setup: WorkerSetup<'_>,
    sink: &'s mut dyn EventSink,
    exchange: Option<&'s mut dyn Exchange>,
) -> (Answer, EngineStats) {
    let engine = Engine::new(setup.program, setup.clauses, setup.options);
    let mut reasoner = Reasoner {
        engine,
        tracker: Tracker {
            estimates: Estimates::new(setup.query),
            sink,
            exchange,
            start: setup.start,
            origin: setup.origin,
            starred: setup.algorithm.starred,
            coherent: false,
        },
        algorithm: setup.algorithm,
        selection: setup.selection.unwrap_or_default(),
        block_guard: None,
        last_model: None,
    };
    let answer = reasoner.run(setup.skip_coherence_test);
    (answer, reasoner.engine.stats())
}

/// Computes `Q ∩ CC(P)` with the chosen algorithm, streaming every estimate
/// change to `sink`.
pub fn cautious_reasoning(
    program: &Program,
    query: &AtomSet,
    algorithm: AlgorithmId,
    options: &SolverOptions,
    sink: &mut dyn EventSink,
) -> RunReport {
    let start = Instant::now();
    let prepared = prepare(program, query);
    if prepared.report.incoherent {
        sink.event(&EstimateEvent {
            kind: EventKind::Incoherent,
            atom: None,
            t_ms: start.elapsed().as_millis() as u64,
            origin: None,
        });
        return RunReport {
            answer: Answer::Incoherent,
            stats: EngineStats::default(),
            simplification: prepared.report,
        };
    }
    let setup = WorkerSetup {
        program,
        clauses: prepared.clauses,
        query,
        algorithm,
        options: options.engine_options(),
        selection: options.selection,
        origin: None,
        skip_coherence_test: false,
        start,
    };
    let (answer, stats) = run_worker(setup, sink, None);
    RunReport {
        answer,
        stats,
        simplification: prepared.report,
    }
}
