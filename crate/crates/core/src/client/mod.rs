//! The error client: runtime-error sites and eval warnings read off a
//! finished analysis, plus the precision table over the bundled corpus.

mod corpus;

pub use corpus::{corpus, CorpusProgram};

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::sync::Arc;
use std::time::Instant;

use serde::Serialize;
use thiserror::Error;

use crate::engine::{analyze, par_map, AnalysisResult, EngineError, Limits, Stats};
use crate::ir::{node_count, Decl, NodeId};
use crate::model::ErrorKind;
use crate::sensitivity::{parse_sensitivity, ParameterError, Sensitivity};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClientError {
    #[error("the analysis did not reach a fixpoint; its error report would be unsound")]
    IncompleteResult,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Entry {
    pub node: NodeId,
    pub kind: ErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReportStats {
    pub iterations: u64,
    pub partitions: usize,
    pub millis: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Totals {
    /// Distinct (node, kind) pairs.
    pub entries: usize,
    /// Distinct nodes with at least one entry.
    pub nodes: usize,
}

/// Possible runtime errors by statement, ordered by node then kind.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ErrorReport {
    pub program: String,
    pub sensitivity: String,
    pub entries: Vec<Entry>,
    #[serde(rename = "evalWarnings")]
    pub eval_warnings: Vec<NodeId>,
    pub counts: BTreeMap<&'static str, usize>,
    pub totals: Totals,
    pub stats: ReportStats,
}

impl ErrorReport {
    pub fn entry_set(&self) -> BTreeSet<(NodeId, ErrorKind)> {
        self.entries.iter().map(|e| (e.node, e.kind)).collect()
    }

    pub fn count(&self, kind: ErrorKind) -> usize {
        self.counts[kind.as_str()]
    }

    pub fn is_clean(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for e in &self.entries {
            writeln!(out, "node:{} {}", e.node, e.kind.as_str()).expect("writing to a string");
        }
        for n in &self.eval_warnings {
            writeln!(out, "node:{n} EvalWarning").expect("writing to a string");
        }
        let counts: Vec<String> = self.counts.iter().map(|(k, v)| format!("{k}={v}")).collect();
        writeln!(
            out,
            "-- {} ({}): {} entries at {} nodes [{}], {} eval warnings; {} partitions, {} iterations, {} ms",
            self.program,
            self.sensitivity,
            self.totals.entries,
            self.totals.nodes,
            counts.join(" "),
            self.eval_warnings.len(),
            self.stats.partitions,
            self.stats.iterations,
            self.stats.millis,
        )
        .expect("writing to a string");
        out
    }
}

/// Collects the error sites of a complete analysis by re-stepping every
/// partition entry. `strategy` must be the one `result` was computed with.
pub fn report_errors(
    program: &str,
    result: &AnalysisResult,
    strategy: &dyn Sensitivity,
) -> Result<ErrorReport, ClientError> {
    if !result.complete {
        return Err(ClientError::IncompleteResult);
    }
    let mut entries = BTreeSet::new();
    let mut evals = result.warnings.clone();
    for (trace, state) in &result.partition {
        let out = result.step(trace, state, strategy);
        entries.extend(out.errors);
        evals.extend(out.evals);
    }
    let counts = ErrorKind::ALL
        .iter()
        .map(|k| (k.as_str(), entries.iter().filter(|(_, e)| e == k).count()))
        .collect();
    let nodes = entries.iter().map(|(n, _)| *n).collect::<BTreeSet<_>>().len();
    Ok(ErrorReport {
        program: program.to_string(),
        sensitivity: strategy.name(),
        totals: Totals {
            entries: entries.len(),
            nodes,
        },
        entries: entries.into_iter().map(|(node, kind)| Entry { node, kind }).collect(),
        eval_warnings: evals.into_iter().collect(),
        counts,
        stats: stats_of(result),
    })
}

fn stats_of(result: &AnalysisResult) -> ReportStats {
    let Stats {
        iterations, millis, ..
    } = result.stats;
    ReportStats {
        iterations,
        partitions: result.partition.len(),
        millis,
    }
}

#[derive(Debug, Error)]
pub enum AnalyzeError {
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Client(#[from] ClientError),
}

/// Analysis followed by [`report_errors`].
pub fn analyze_and_report(
    name: &str,
    program: &Arc<Decl>,
    strategy: &dyn Sensitivity,
    limits: Limits,
) -> Result<ErrorReport, AnalyzeError> {
    let result = analyze(program, strategy, limits)?;
    Ok(report_errors(name, &result, strategy)?)
}

/// One cell of the precision table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BenchRow {
    pub program: String,
    pub sensitivity: String,
    pub nodes: usize,
    /// `None` when the analysis hit its limits.
    pub entries: Option<usize>,
    pub partitions: usize,
    pub iterations: u64,
    pub millis: u64,
}

/// Analyzes every program under every sensitivity in `specs`.
pub fn bench_table(
    programs: &[CorpusProgram],
    specs: &[&str],
    limits: Limits,
    parallel: bool,
) -> Result<Vec<BenchRow>, ParameterError> {
    let strategies = specs.iter().map(|s| parse_sensitivity(s)).collect::<Result<Vec<_>, _>>()?;
    let jobs: Vec<(usize, usize)> = (0..programs.len())
        .flat_map(|p| (0..strategies.len()).map(move |s| (p, s)))
        .collect();
    Ok(par_map(&jobs, parallel, |&(p, s)| {
        let prog = &programs[p];
        let strategy = strategies[s].as_ref();
        let start = Instant::now();
        let (result, complete) = match analyze(&prog.decl, strategy, limits) {
            Ok(r) => (r, true),
            Err(EngineError::LimitExceeded(r)) => (*r, false),
        };
        let entries = complete.then(|| {
            report_errors(&prog.name, &result, strategy)
                .expect("complete result")
                .totals
                .entries
        });
        BenchRow {
            program: prog.name.clone(),
            sensitivity: strategy.name(),
            nodes: node_count(&prog.decl),
            entries,
            partitions: result.partition.len(),
            iterations: result.stats.iterations,
            millis: start.elapsed().as_millis() as u64,
        }
    }))
}

/// Plain-text rendering of [`bench_table`] rows, one line per program.
pub fn format_table(rows: &[BenchRow]) -> String {
    let mut specs: Vec<&str> = Vec::new();
    let mut by_prog: BTreeMap<&str, Vec<&BenchRow>> = BTreeMap::new();
    for r in rows {
        if !specs.contains(&r.sensitivity.as_str()) {
            specs.push(&r.sensitivity);
        }
        by_prog.entry(&r.program).or_default().push(r);
    }
    let mut out = String::new();
    write!(out, "{:<22}{:>6}", "program", "nodes").expect("writing to a string");
    for s in &specs {
        write!(out, "{:>16}", s).expect("writing to a string");
    }
    out.push('\n');
    for (prog, rs) in by_prog {
        write!(out, "{:<22}{:>6}", prog, rs[0].nodes).expect("writing to a string");
        for s in &specs {
            let cell = match rs.iter().find(|r| r.sensitivity == *s) {
                Some(BenchRow {
                    entries: Some(e),
                    partitions,
                    ..
                }) => format!("{e}/{partitions}"),
                Some(_) => "limit".into(),
                None => "-".into(),
            };
            write!(out, "{cell:>16}").expect("writing to a string");
        }
        out.push('\n');
    }
    out.push_str("cells: error entries / partition entries\n");
    out
}
