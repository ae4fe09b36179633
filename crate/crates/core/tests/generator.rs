use std::path::Path;

use notjs::engine::{generate_program, GenConfig};
use notjs::ir::{node_count, pretty, validate, walk_stmts, StmtKind};
use proptest::prelude::*;

#[test]
fn seed_zero_matches_golden_file() {
    let text = pretty(&generate_program(0, GenConfig::default()));
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/seed0.njs");
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, &text).unwrap();
    }
    let golden = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text, golden);
}

#[test]
fn try_or_forin_in_at_least_thirty_percent() {
    let n = 500;
    let hits = (0..n)
        .filter(|&seed| {
            let p = generate_program(seed, GenConfig::default());
            let mut hit = false;
            walk_stmts(&p, &mut |s| hit |= matches!(s.kind, StmtKind::Try { .. } | StmtKind::ForIn { .. }));
            hit
        })
        .count();
    assert!(hits * 10 >= n as usize * 3, "{hits}/{n}");
}

proptest! {
    #[test]
    fn generated_programs_are_valid_and_bounded(seed in any::<u64>(), max_nodes in 40usize..300) {
        let cfg = GenConfig { max_nodes, ..GenConfig::default() };
        let p = generate_program(seed, cfg);
        prop_assert!(validate(&p).is_empty());
        prop_assert!(node_count(&p) <= max_nodes);
    }

    #[test]
    fn generation_is_deterministic(seed in any::<u64>()) {
        let a = pretty(&generate_program(seed, GenConfig::default()));
        let b = pretty(&generate_program(seed, GenConfig::default()));
        prop_assert_eq!(a, b);
    }

    #[test]
    fn generated_programs_terminate(seed in 0u64..100_000) {
        let p = generate_program(seed, GenConfig::default());
        let r = notjs::concrete::run(&p, 100_000);
        prop_assert!(!matches!(r.outcome, notjs::concrete::Outcome::FuelExhausted(_)));
    }
}
