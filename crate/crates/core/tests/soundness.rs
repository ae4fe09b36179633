use std::collections::{BTreeMap, VecDeque};
use std::sync::Arc;

use notjs::absem::{initial_state, next_states, ATerm};
use notjs::client::{corpus, report_errors};
use notjs::concrete::run;
use notjs::domains::BValue;
use notjs::engine::{
    analyze, check_result, fuzz, generate_program, minimize, soundness_check, AnalysisResult, GenConfig, Limits, Stats,
};
use notjs::ir::{node_count, parse_program, walk_stmts, Decl, StmtKind};
use notjs::sensitivity::{parse_sensitivity, Sensitivity, STANDARD_SET};
use proptest::prelude::*;

const FUEL: u64 = 10_000;

#[test]
fn corpus_is_covered_under_every_strategy() {
    for p in corpus() {
        for spec in STANDARD_SET.iter().chain(&["acyclic:2"]) {
            let s = parse_sensitivity(spec).unwrap();
            let r = soundness_check(&p.decl, s.as_ref(), 100_000, Limits::default()).unwrap();
            assert!(r.violation.is_none(), "{} {spec}: {}", p.name, r.violation.unwrap());
            assert!(r.states_checked > 0);
        }
    }
}

/// A worklist engine with one bug: successors carrying an exception lose it.
fn analyze_dropping_exceptions(p: &Arc<Decl>, strategy: &dyn Sensitivity) -> AnalysisResult {
    let (t0, s0) = initial_state(p);
    let mut partition = BTreeMap::from([(t0.clone(), s0)]);
    let mut work = VecDeque::from([t0]);
    while let Some(t) = work.pop_front() {
        let state = partition[&t].clone();
        for (t2, mut s2) in next_states(&t, &state, strategy).succs {
            if let ATerm::Value(v) = &mut s2.term {
                v.exc = BValue::BOT;
                if v.is_bot() {
                    continue;
                }
            }
            let changed = match partition.get_mut(&t2) {
                None => {
                    partition.insert(t2.clone(), s2);
                    true
                }
                Some(old) if !s2.leq(old) => {
                    *old = old.join(&s2);
                    true
                }
                Some(_) => false,
            };
            if changed && !work.contains(&t2) {
                work.push_back(t2);
            }
        }
    }
    AnalysisResult {
        partition,
        stats: Stats::default(),
        warnings: Default::default(),
        complete: true,
        calls: Default::default(),
    }
}

#[test]
fn dropped_exception_successor_is_detected() {
    let p = corpus().into_iter().find(|p| p.name == "exceptions").unwrap();
    for spec in ["fs", "stack:2.1"] {
        let s = parse_sensitivity(spec).unwrap();
        let broken = analyze_dropping_exceptions(&p.decl, s.as_ref());
        let report = check_result(&p.decl, s.as_ref(), &broken, FUEL);
        assert!(report.violation.is_some(), "{spec}");
        // The unmutated engine passes on the same program.
        let good = analyze(&p.decl, s.as_ref(), Limits::default()).unwrap();
        assert!(check_result(&p.decl, s.as_ref(), &good, FUEL).violation.is_none());
    }
}

#[test]
fn dropped_exceptions_caught_on_generated_throwers() {
    let s = parse_sensitivity("stack:1.0").unwrap();
    let (mut throwers, mut caught) = (0, 0);
    for seed in 0..60 {
        let p = generate_program(seed, GenConfig::default());
        let mut throws = false;
        walk_stmts(&p, &mut |st| throws |= matches!(st.kind, StmtKind::Throw(_)));
        if !throws {
            continue;
        }
        throwers += 1;
        let broken = analyze_dropping_exceptions(&p, s.as_ref());
        caught += usize::from(check_result(&p, s.as_ref(), &broken, FUEL).violation.is_some());
    }
    assert!(throwers >= 10);
    assert!(caught * 2 >= throwers, "{caught}/{throwers}");
}

#[test]
fn minimized_witness_still_fails_and_is_smaller() {
    let s = parse_sensitivity("fs").unwrap();
    let fails = |p: &Arc<Decl>| {
        let broken = analyze_dropping_exceptions(p, s.as_ref());
        check_result(p, s.as_ref(), &broken, FUEL).violation.is_some()
    };
    let p = corpus().into_iter().find(|p| p.name == "exceptions").unwrap().decl;
    assert!(fails(&p));
    let small = minimize(&p, &fails);
    assert!(fails(&small));
    assert!(node_count(&small) < node_count(&p));
}

#[test]
fn concrete_errors_are_reported() {
    let mut programs: Vec<(String, Arc<Decl>)> = corpus().into_iter().map(|p| (p.name, p.decl)).collect();
    programs.extend((0..40).map(|seed| (format!("seed {seed}"), generate_program(seed, GenConfig::default()))));
    let mut seen = 0;
    for (name, p) in programs {
        let concrete = run(&p, 100_000);
        for spec in ["fs", "stack:2.1", "obj:1.0"] {
            let s = parse_sensitivity(spec).unwrap();
            let r = analyze(&p, s.as_ref(), Limits::default()).unwrap();
            let report = report_errors(&name, &r, s.as_ref()).unwrap();
            let entries = report.entry_set();
            for e in &concrete.state.errors {
                assert!(entries.contains(e), "{name} {spec}: {e:?} not reported");
            }
            for n in &concrete.state.eval_calls {
                assert!(report.eval_warnings.contains(n), "{name} {spec}: eval at {n} not reported");
            }
        }
        seen += concrete.state.errors.len();
    }
    assert!(seen > 0);
}

#[test]
fn parallel_and_sequential_fuzz_agree() {
    let specs = ["fs", "stack:2.1", "sig:1.0"];
    let a = fuzz(0..12, &specs, FUEL, GenConfig::default(), Limits::default(), true).unwrap();
    let b = fuzz(0..12, &specs, FUEL, GenConfig::default(), Limits::default(), false).unwrap();
    assert_eq!(a.cases, 36);
    assert_eq!(a.cases, b.cases);
    assert_eq!(a.states_checked, b.states_checked);
    assert!(a.failures.is_empty() && b.failures.is_empty());
}

#[test]
fn straight_line_witness_parses_back() {
    let p = Arc::new(parse_program("(decl ((x 1)) (seq (:= x 2) (throw x) (:= x 3)))").unwrap());
    let small = minimize(&p, &|q| {
        let mut t = false;
        walk_stmts(q, &mut |s| t |= matches!(s.kind, StmtKind::Throw(_)));
        t
    });
    let text = notjs::ir::pretty(&small);
    assert!(text.contains("throw"));
    assert!(!text.contains(":="), "{text}");
    parse_program(&text).unwrap();
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn generated_programs_are_covered(seed in any::<u64>(), spec in prop::sample::select(STANDARD_SET.to_vec())) {
        let p = generate_program(seed, GenConfig::default());
        let s = parse_sensitivity(spec).unwrap();
        let r = soundness_check(&p, s.as_ref(), FUEL, Limits::default()).unwrap();
        prop_assert!(r.violation.is_none(), "seed {} {}: {}", seed, spec, r.violation.unwrap());
    }
}
