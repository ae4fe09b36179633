//! The worklist fixpoint over trace partitions, the differential soundness
//! harness against the concrete interpreter, a random program generator and
//! a batch layer for running many analyses at once.

mod batch;
mod generate;
mod soundness;

pub use batch::{fuzz, par_map, FuzzCase, FuzzSummary};
pub use generate::{generate_program, GenConfig};
pub use soundness::{check_result, minimize, soundness_check, SoundnessReport, Violation};

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::Write as _;
use std::sync::Arc;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::absem::{initial_state, next_states_with, AState, CallTable, StepResult};
use crate::ir::{Decl, NodeId};
use crate::sensitivity::{Sensitivity, Trace};

/// Worklist discipline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Order {
    #[default]
    Fifo,
    Lifo,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub max_iterations: u64,
    pub wall_clock: Option<Duration>,
    pub order: Order,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_iterations: 1_000_000,
            wall_clock: None,
            order: Order::Fifo,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Stats {
    /// States popped from the worklist.
    pub iterations: u64,
    /// Successor states produced.
    pub states: u64,
    /// Successors joined into an existing partition entry.
    pub joins: u64,
    /// Worklist runs, counting the first.
    pub rounds: u32,
    pub millis: u64,
}

#[derive(Debug, Clone)]
pub struct AnalysisResult {
    pub partition: BTreeMap<Trace, AState>,
    pub stats: Stats,
    /// Statements at which `eval` or `Function` may be called.
    pub warnings: BTreeSet<NodeId>,
    /// False when a limit stopped the analysis; the partition is then not a
    /// sound approximation.
    pub complete: bool,
    /// The call events the partition's contexts were computed from.
    pub calls: CallTable,
}

impl AnalysisResult {
    /// Steps a state the way the analysis did, with its call contexts.
    pub fn step(&self, trace: &Trace, state: &AState, strategy: &dyn Sensitivity) -> StepResult {
        next_states_with(trace, state, strategy, Some(&self.calls))
    }
}

#[derive(Debug, Clone, Error)]
pub enum EngineError {
    #[error("analysis stopped after {} iterations; the partial result is unsound", .0.stats.iterations)]
    LimitExceeded(Box<AnalysisResult>),
}

/// Worklist runs after which [`analyze`] gives up.
const MAX_ROUNDS: u32 = 64;

/// Runs the worklist algorithm from the program's initial state to a fixpoint.
///
/// Call contexts may depend on abstract values, and those grow during a run,
/// so a context computed early can go stale. Each run therefore computes
/// contexts from a table of call events that stays fixed for the run, which
/// makes the run's result independent of worklist order. The events the
/// run's calls actually have are then joined into the table. The analysis
/// stops once they change no context.
pub fn analyze(program: &Arc<Decl>, strategy: &dyn Sensitivity, limits: Limits) -> Result<AnalysisResult, EngineError> {
    let start = Instant::now();
    let mut stats = Stats::default();
    let mut table = CallTable::new();
    loop {
        stats.rounds += 1;
        let round = worklist(program, strategy, limits, &table, start, &mut stats);
        let mut stable = true;
        for (key, seen) in round.seen {
            let caller = &key.0.ctx;
            let old = table.get(&key).cloned().unwrap_or_else(|| seen.emptied());
            let mut grown = old.clone();
            grown.absorb(&seen);
            if strategy.call(caller, &grown) != strategy.call(caller, &old) {
                stable = false;
            }
            table.insert(key, grown);
        }
        let give_up = stats.rounds >= MAX_ROUNDS && !stable;
        if stable || !round.complete || give_up {
            stats.millis = start.elapsed().as_millis() as u64;
            let result = AnalysisResult {
                partition: round.partition,
                stats,
                warnings: round.warnings,
                complete: round.complete && !give_up,
                calls: table,
            };
            return if result.complete {
                Ok(result)
            } else {
                Err(EngineError::LimitExceeded(Box::new(result)))
            };
        }
    }
}

struct Round {
    partition: BTreeMap<Trace, AState>,
    warnings: BTreeSet<NodeId>,
    complete: bool,
    /// Join of the events each call had over the run.
    seen: CallTable,
}

fn worklist(
    program: &Arc<Decl>,
    strategy: &dyn Sensitivity,
    limits: Limits,
    table: &CallTable,
    start: Instant,
    stats: &mut Stats,
) -> Round {
    let (t0, s0) = initial_state(program);
    let mut partition = BTreeMap::new();
    let mut work = VecDeque::new();
    let mut queued = BTreeSet::new();
    let mut warnings = BTreeSet::new();
    let mut seen = CallTable::new();
    partition.insert(t0.clone(), s0);
    queued.insert(t0.clone());
    work.push_back(t0);
    let mut complete = true;
    loop {
        let next = match limits.order {
            Order::Fifo => work.pop_front(),
            Order::Lifo => work.pop_back(),
        };
        let Some(trace) = next else { break };
        queued.remove(&trace);
        if stats.iterations >= limits.max_iterations || limits.wall_clock.is_some_and(|w| start.elapsed() > w) {
            complete = false;
            break;
        }
        stats.iterations += 1;
        let out = next_states_with(&trace, &partition[&trace], strategy, Some(table));
        warnings.extend(out.evals);
        for (site, meth, ev) in out.calls {
            seen.entry((trace.clone(), site, meth))
                .and_modify(|e| e.absorb(&ev))
                .or_insert(ev);
        }
        for (t, s) in out.succs {
            stats.states += 1;
            let changed = match partition.get_mut(&t) {
                None => {
                    partition.insert(t.clone(), s);
                    true
                }
                Some(old) => {
                    if s.leq(old) {
                        false
                    } else {
                        stats.joins += 1;
                        let joined = old.join(&s);
                        debug_assert!(old.leq(&joined));
                        *old = joined;
                        true
                    }
                }
            };
            if changed && queued.insert(t.clone()) {
                work.push_back(t);
            }
        }
    }
    Round {
        partition,
        warnings,
        complete,
        seen,
    }
}

/// A successor not covered by its partition entry.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("successor of {from} at {to} is not below its partition entry")]
pub struct NotAFixpoint {
    pub from: String,
    pub to: String,
}

/// Re-steps every entry and checks that each successor is already covered.
pub fn verify_fixpoint(result: &AnalysisResult, strategy: &dyn Sensitivity) -> Result<(), NotAFixpoint> {
    for (trace, state) in &result.partition {
        for (t, s) in result.step(trace, state, strategy).succs {
            if !result.partition.get(&t).is_some_and(|e| s.leq(e)) {
                return Err(NotAFixpoint {
                    from: trace.to_string(),
                    to: t.to_string(),
                });
            }
        }
    }
    Ok(())
}

/// One line per partition entry: key, program point, store size and a term summary.
pub fn dump(result: &AnalysisResult) -> String {
    let mut out = String::new();
    for (trace, state) in &result.partition {
        let rec = serde_json::json!({
            "key": trace.to_string(),
            "point": format!("{:?}", trace.point),
            "store": state.store.vars.len() + state.store.objs.len(),
            "term": state.term_summary(),
        });
        writeln!(out, "{rec}").expect("writing to a string");
    }
    out
}
