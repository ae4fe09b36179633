//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

mod common;

use std::collections::BTreeSet;
use std::path::Path;
use std::process::{Command, ExitCode};
use std::sync::Arc;
use std::time::{Duration, Instant};

use notjs::absem::aeval_exp;
use notjs::client::{analyze_and_report, corpus, CorpusProgram};
use notjs::concrete::{eval_exp, run_with, CValue};
use notjs::domains::{alpha, classify_str, AbsStr, StrClass};
use notjs::engine::{analyze, fuzz, soundness_check, GenConfig, Limits, Order};
use notjs::ir::{name, walk_stmts, BinOp, Exp, StmtKind, UnOp};
use notjs::model::{CallEvent, ErrorKind};
use notjs::sensitivity::{parse_sensitivity, Context, CtxElem, Sensitivity, STANDARD_SET};

use common::*;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn lattice_laws() -> Outcome {
    let start = Instant::now();
    let (mut pairs, mut triples, mut failures) = (0u64, 0u64, Vec::<String>::new());
    macro_rules! laws {
        ($what:expr, $xs:expr, $leq:expr, $join:expr, $triple_sample:expr) => {{
            let xs = $xs;
            for a in &xs {
                for b in &xs {
                    pairs += 1;
                    let j = $join(a, b);
                    if j != $join(b, a) {
                        failures.push(format!("{}: join not commutative", $what));
                    }
                    if !$leq(a, &j) || !$leq(b, &j) {
                        failures.push(format!("{}: join not an upper bound", $what));
                    }
                    if $leq(a, b) != (j == *b) {
                        failures.push(format!("{}: leq disagrees with join", $what));
                    }
                    if $leq(a, b) && $leq(b, a) && a != b {
                        failures.push(format!("{}: leq not antisymmetric", $what));
                    }
                }
                if !$leq(a, a) || $join(a, a) != *a {
                    failures.push(format!("{}: not reflexive/idempotent", $what));
                }
            }
            let ys = &xs[..xs.len().min($triple_sample)];
            for a in ys {
                for b in ys {
                    let j = $join(a, b);
                    for c in ys {
                        triples += 1;
                        if $join(&j, c) != $join(a, &$join(b, c)) {
                            failures.push(format!("{}: join not associative", $what));
                        }
                        if $leq(a, c) && $leq(b, c) && !$leq(&j, c) {
                            failures.push(format!("{}: join not least", $what));
                        }
                        if $leq(a, b) && $leq(b, c) && !$leq(a, c) {
                            failures.push(format!("{}: leq not transitive", $what));
                        }
                    }
                }
            }
        }};
    }
    laws!("AbsNum", abs_nums(), |a: &notjs::domains::AbsNum, b: &notjs::domains::AbsNum| a.leq(b), |a: &notjs::domains::AbsNum, b: &notjs::domains::AbsNum| a.join(b), usize::MAX);
    laws!("AbsBool", abs_bools(), |a: &notjs::domains::AbsBool, b: &notjs::domains::AbsBool| a.leq(*b), |a: &notjs::domains::AbsBool, b: &notjs::domains::AbsBool| a.join(*b), usize::MAX);
    laws!("AbsStr", abs_strs(), |a: &AbsStr, b: &AbsStr| a.leq(b), |a: &AbsStr, b: &AbsStr| a.join(b), usize::MAX);
    laws!("BValue", abs_values(), |a: &notjs::domains::BValue, b: &notjs::domains::BValue| a.leq(b), |a: &notjs::domains::BValue, b: &notjs::domains::BValue| a.join(b), 64);
    let secs = start.elapsed().as_secs_f64();
    ensure(failures.is_empty(), || format!("{} failures, first: {}", failures.len(), failures[0]))?;
    ensure(pairs >= 10_000 && triples >= 100_000, || format!("only {pairs} pairs / {triples} triples"))?;
    ensure(secs < 30.0, || format!("took {secs:.1}s"))?;
    Ok(format!("{pairs} pairs, {triples} triples, 0 failures, {secs:.1}s"))
}

/// Strings an element of the string lattice stands for, over a universe
/// with several members of each category.
fn denotes(a: &AbsStr) -> BTreeSet<&'static str> {
    const UNIVERSE: [&str; 9] = ["1", "2", "7", "foo", "bar", "x", "valueOf", "length", "toString"];
    UNIVERSE
        .into_iter()
        .filter(|s| match a {
            AbsStr::Bot => false,
            AbsStr::Const(c) => &**c == *s,
            AbsStr::SNum => classify_str(s) == StrClass::Numeric,
            AbsStr::SSpl => classify_str(s) == StrClass::Special,
            AbsStr::SNotNumNorSpl => classify_str(s) == StrClass::Other,
            AbsStr::SNotSpl => classify_str(s) != StrClass::Special,
            AbsStr::SNotNum => classify_str(s) != StrClass::Numeric,
            AbsStr::Top => true,
        })
        .collect()
}

fn string_lattice() -> Outcome {
    let c = AbsStr::cnst;
    let els = vec![
        AbsStr::Bot,
        c("1"),
        c("2"),
        c("foo"),
        c("bar"),
        c("valueOf"),
        AbsStr::SNum,
        AbsStr::SNotNumNorSpl,
        AbsStr::SSpl,
        AbsStr::SNotSpl,
        AbsStr::SNotNum,
        AbsStr::Top,
    ];
    let mut deviations = Vec::new();
    for a in &els {
        for b in &els {
            if a.leq(b) != denotes(a).is_subset(&denotes(b)) {
                deviations.push(format!("{a} <= {b}"));
            }
            let want: BTreeSet<_> = denotes(a).union(&denotes(b)).copied().collect();
            let least = els
                .iter()
                .filter(|x| want.is_subset(&denotes(x)))
                .min_by_key(|x| denotes(x).len())
                .expect("top covers everything");
            if a.join(b) != *least {
                deviations.push(format!("{a} join {b} = {} (want {least})", a.join(b)));
            }
        }
    }
    for (a, b, want) in [
        (c("1"), c("2"), AbsStr::SNum),
        (c("foo"), c("bar"), AbsStr::SNotNumNorSpl),
        (c("valueOf"), c("foo"), AbsStr::SNotNum),
        (AbsStr::SNum, AbsStr::SSpl, AbsStr::Top),
    ] {
        if a.join(&b) != want {
            deviations.push(format!("{a} join {b}"));
        }
    }
    ensure(deviations.is_empty(), || format!("{} deviations: {:?}", deviations.len(), deviations))?;
    Ok(format!("{} leq/join table cells, 0 deviations", els.len() * els.len() * 2))
}

fn transformers() -> Outcome {
    let start = Instant::now();
    let heap = Heap::new();
    let alphabet = heap.alphabet();
    let var = |x: &str| Box::new(Exp::Var(name(x)));
    let mut checked = 0u64;
    let mut violations = Vec::new();
    let mut check = |e: &Exp, x: &CValue, y: &CValue| {
        let (store, env, aenv, astore) = heap.bind(x, y);
        let want = alpha(&eval_exp(e, &env, &store), &|a| abs_addr(&store, a));
        checked += 1;
        if !want.leq(&aeval_exp(e, &aenv, &astore)) {
            violations.push(format!("{e:?} x={x:?} y={y:?}"));
        }
    };
    for op in BinOp::ALL {
        for x in &alphabet {
            for y in &alphabet {
                check(&Exp::Bin(op, var("x"), var("y")), x, y);
            }
        }
    }
    for op in UnOp::ALL {
        for x in &alphabet {
            check(&Exp::Un(op, var("x")), x, &CValue::Undef);
        }
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(violations.is_empty(), || format!("{} violations, first: {}", violations.len(), violations[0]))?;
    ensure(secs < 60.0, || format!("took {secs:.1}s"))?;
    Ok(format!("{checked} operator applications, 0 violations, {secs:.1}s"))
}

fn differential() -> Outcome {
    let cfg = GenConfig {
        max_nodes: 200,
        ..GenConfig::default()
    };
    let s = fuzz(0..1000, &STANDARD_SET, 10_000, cfg, Limits::default(), true).map_err(|e| e.to_string())?;
    let detail = format!(
        "{} programs x {} sensitivities, {} concrete states, {} violations, {} incomplete, {:.1}s",
        s.cases / STANDARD_SET.len(),
        STANDARD_SET.len(),
        s.states_checked,
        s.failures.len(),
        s.incomplete,
        s.millis as f64 / 1000.0
    );
    ensure(s.failures.is_empty() && s.incomplete == 0, || detail.clone())?;
    ensure(s.millis < 30 * 60 * 1000, || detail.clone())?;
    Ok(detail)
}

fn has(p: &CorpusProgram, pred: impl Fn(&StmtKind) -> bool) -> bool {
    let mut found = false;
    walk_stmts(&p.decl, &mut |s| found |= pred(&s.kind));
    found
}

fn fixpoint_and_determinism() -> Outcome {
    let programs = corpus();
    ensure(programs.len() >= 15, || format!("only {} bundled programs", programs.len()))?;
    let features = [
        ("exceptions", has_any(&programs, |k| matches!(k, StmtKind::Try { .. } | StmtKind::Throw(_)))),
        ("for-in", has_any(&programs, |k| matches!(k, StmtKind::ForIn { .. }))),
        ("prototypes", has_any(&programs, |k| matches!(k, StmtKind::NewCall { .. }))),
        ("closures", programs.iter().any(|p| p.name.contains("closure"))),
        ("recursion", programs.iter().any(|p| p.name.contains("recursion"))),
    ];
    for (what, ok) in features {
        ensure(ok, || format!("corpus lacks {what}"))?;
    }
    let lifo = Limits {
        order: Order::Lifo,
        ..Limits::default()
    };
    let bin = env!("CARGO_BIN_EXE_notjs");
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus");
    let mut runs = 0;
    for p in &programs {
        for spec in STANDARD_SET {
            let s = parse_sensitivity(spec).map_err(|e| e.to_string())?;
            let a = analyze(&p.decl, s.as_ref(), Limits::default()).map_err(|e| format!("{} {spec}: {e}", p.name))?;
            let b = analyze(&p.decl, s.as_ref(), lifo).map_err(|e| format!("{} {spec}: {e}", p.name))?;
            ensure(a.partition == b.partition, || format!("{} {spec}: FIFO and LIFO partitions differ", p.name))?;
            let file = dir.join(format!("{}.njs", p.name));
            let args = ["analyze", file.to_str().unwrap_or_default(), "--sensitivity", spec, "--format", "json", "--no-timing"];
            let once = Command::new(bin).args(args).output().map_err(|e| e.to_string())?;
            let twice = Command::new(bin).args(args).output().map_err(|e| e.to_string())?;
            ensure(once.status.success() && once.stdout == twice.stdout, || format!("{} {spec}: JSON differs", p.name))?;
            runs += 1;
        }
    }
    Ok(format!("{} programs x {} sensitivities terminate; FIFO = LIFO and JSON identical in all {runs}", programs.len(), STANDARD_SET.len()))
}

fn has_any(programs: &[CorpusProgram], pred: impl Fn(&StmtKind) -> bool + Copy) -> bool {
    programs.iter().any(|p| has(p, pred))
}

fn fs_shape() -> Outcome {
    let fs = parse_sensitivity("fs").map_err(|e| e.to_string())?;
    let mut checked = Vec::new();
    for p in corpus().iter().filter(|p| p.name.starts_with("straight")) {
        let r = analyze(&p.decl, fs.as_ref(), Limits::default()).map_err(|e| e.to_string())?;
        let mut points = BTreeSet::new();
        run_with(&p.decl, 10_000, &mut |s| {
            points.insert(s.point());
        });
        ensure(r.partition.len() == points.len(), || {
            format!("{}: {} partitions for {} reachable points", p.name, r.partition.len(), points.len())
        })?;
        checked.push(format!("{}={}", p.name, points.len()));
    }
    ensure(checked.len() >= 2, || "no straight-line programs".into())?;
    Ok(format!("partition size = reachable points ({})", checked.join(", ")))
}

fn precision() -> Outcome {
    const REFINES: [(&str, &str); 8] = [
        ("stack:1.0", "fs"),
        ("stack:2.1", "stack:1.0"),
        ("stack:5.4", "stack:2.1"),
        ("stack:2.1", "fs"),
        ("stack:5.4", "fs"),
        ("obj:1.0", "fs"),
        ("sig:1.0", "fs"),
        ("mixed:1.0", "fs"),
    ];
    let mut separating = Vec::new();
    for p in corpus() {
        let entries = |spec: &str| -> Result<BTreeSet<_>, String> {
            let s = parse_sensitivity(spec).map_err(|e| e.to_string())?;
            Ok(analyze_and_report(&p.name, &p.decl, s.as_ref(), Limits::default())
                .map_err(|e| e.to_string())?
                .entry_set())
        };
        for (fine, coarse) in REFINES {
            let (a, b) = (entries(fine)?, entries(coarse)?);
            ensure(a.is_subset(&b), || format!("{}: {fine} reports {:?} beyond {coarse}", p.name, a.difference(&b)))?;
        }
        if entries("stack:2.1")?.len() < entries("fs")?.len() {
            separating.push(p.name.clone());
        }
    }
    ensure(!separating.is_empty(), || "no program separates stack:2.1 from fs".into())?;
    Ok(format!("refinement holds on the corpus; stack:2.1 beats fs on {}", separating.join(", ")))
}

/// A user-defined strategy: contexts record the parity of the call depth.
#[derive(Debug)]
struct Parity;

impl Sensitivity for Parity {
    fn name(&self) -> String {
        "parity".into()
    }
    fn heap_depth(&self) -> usize {
        0
    }
    fn call(&self, caller: &Context, _: &CallEvent) -> Context {
        let depth = match caller.elems().first() {
            Some(CtxElem::Token(d)) => *d,
            _ => 0,
        };
        Context::from_vec(vec![CtxElem::Token(1 - depth)])
    }
}

fn pluggability() -> Outcome {
    // The engine and abstract semantics reach strategies only through the trait.
    const INTERNALS: [&str; 8] =
        ["FlowOnly", "Stack {", "Acyclic", "ObjectSens", "Signature", "Mixed {", "CtxElem::", "strategies::"];
    let src = Path::new(env!("CARGO_MANIFEST_DIR")).join("src");
    let mut files = 0;
    for dir in ["engine", "absem", "client"] {
        for entry in std::fs::read_dir(src.join(dir)).map_err(|e| e.to_string())? {
            let path = entry.map_err(|e| e.to_string())?.path();
            let text = std::fs::read_to_string(&path).map_err(|e| e.to_string())?;
            files += 1;
            for needle in INTERNALS {
                ensure(!text.contains(needle), || format!("{} mentions {needle}", path.display()))?;
            }
        }
    }
    // A seventh strategy defined outside the crate runs unchanged.
    let mut checked = 0;
    for p in corpus() {
        let r = soundness_check(&p.decl, &Parity, 100_000, Limits::default()).map_err(|e| e.to_string())?;
        ensure(r.violation.is_none(), || format!("{}: {}", p.name, r.violation.as_ref().map(|v| v.to_string()).unwrap_or_default()))?;
        checked += 1;
    }
    let rec = corpus().into_iter().find(|p| p.name == "recursion").ok_or("no recursion program")?;
    let fs = analyze(&rec.decl, parse_sensitivity("fs").map_err(|e| e.to_string())?.as_ref(), Limits::default())
        .map_err(|e| e.to_string())?;
    let parity = analyze(&rec.decl, &Parity, Limits::default()).map_err(|e| e.to_string())?;
    ensure(parity.partition.len() > fs.partition.len(), || "parity contexts never split a state".into())?;
    Ok(format!("{files} engine/semantics/client files free of strategy internals; parity strategy defined in this test is sound on {checked} programs"))
}

fn forced_errors() -> Outcome {
    let fs = parse_sensitivity("fs").map_err(|e| e.to_string())?;
    let report = |src: &str| -> Result<notjs::client::ErrorReport, String> {
        let p = Arc::new(notjs::ir::parse_program(src).map_err(|e| e.to_string())?);
        analyze_and_report("t", &p, fs.as_ref(), Limits::default()).map_err(|e| e.to_string())
    };
    let only = |r: &notjs::client::ErrorReport, kind: ErrorKind| r.entries.len() == 1 && r.count(kind) == 1;
    let r = report("(decl ((x 5) (y undef)) (call y x undef undef))")?;
    ensure(only(&r, ErrorKind::TypeErrorCallNonFunction), || format!("call of a number: {}", r.to_text()))?;
    let r = report("(decl ((u undef) (v 1)) (:= v (. u \"a\")))")?;
    ensure(only(&r, ErrorKind::TypeErrorPropOnNullUndef), || format!("read from undef: {}", r.to_text()))?;
    let r = report("(decl ((a undef)) (seq (newcall a (. global \"Array\") undef) (.:= a \"length\" \"3.5\")))")?;
    ensure(only(&r, ErrorKind::RangeErrorArrayLength), || format!("length 3.5: {}", r.to_text()))?;
    let r = report("(decl ((x 1) (o undef)) (seq (newcall o (. global \"Object\") undef) (.:= o \"k\" x) (:= x (. o \"k\"))))")?;
    ensure(r.is_clean(), || format!("clean program: {}", r.to_text()))?;
    let r = report("(decl ((f undef) (r undef)) (seq (:= f (. global \"eval\")) (call r f global undef)))")?;
    ensure(r.eval_warnings.len() == 1, || format!("eval: {}", r.to_text()))?;
    Ok("5 forced cases report exactly the expected entries".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("lattice laws", lattice_laws),
        ("string lattice table", string_lattice),
        ("transformer soundness", transformers),
        ("differential soundness", differential),
        ("fixpoint and determinism", fixpoint_and_determinism),
        ("fs shape", fs_shape),
        ("precision ordering", precision),
        ("strategy pluggability", pluggability),
        ("error client", forced_errors),
    ];
    let only: Option<usize> = std::env::var("ACCEPTANCE_ONLY").ok().and_then(|s| s.parse().ok());
    let mut failed = 0;
    for (i, (title, f)) in criteria.iter().enumerate() {
        if only.is_some_and(|n| n != i + 1) {
            continue;
        }
        let start = Instant::now();
        let outcome = f();
        let took = Duration::from_millis(start.elapsed().as_millis() as u64);
        match outcome {
            Ok(detail) => println!("[{}] {title}: PASS ({detail}) [{took:?}]", i + 1),
            Err(reason) => {
                failed += 1;
                println!("[{}] {title}: FAIL ({reason}) [{took:?}]", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
