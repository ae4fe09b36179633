use std::time::Instant;

use super::generate::{generate_program, GenConfig};
use super::soundness::{soundness_check, Violation};
use super::Limits;
use crate::sensitivity::parse_sensitivity;

/// Maps `f` over `items`, on the rayon pool when `parallel` is set and the
/// crate was built with the `parallel` feature. Results keep input order.
pub fn par_map<T, R, F>(items: &[T], parallel: bool, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if parallel {
        use rayon::prelude::*;
        return items.par_iter().map(f).collect();
    }
    let _ = parallel;
    items.iter().map(f).collect()
}

/// One generated program checked under one sensitivity.
#[derive(Debug, Clone)]
pub struct FuzzCase {
    pub seed: u64,
    pub sensitivity: String,
    pub states_checked: u64,
    pub violation: Option<Violation>,
    /// Set when the analysis hit its limits.
    pub incomplete: bool,
}

#[derive(Debug, Clone, Default)]
pub struct FuzzSummary {
    pub cases: usize,
    pub states_checked: u64,
    pub failures: Vec<FuzzCase>,
    pub incomplete: usize,
    pub millis: u64,
}

/// Differential soundness sweep: every seed in `seeds` under every
/// sensitivity in `specs`.
pub fn fuzz(
    seeds: std::ops::Range<u64>,
    specs: &[&str],
    fuel: u64,
    cfg: GenConfig,
    limits: Limits,
    parallel: bool,
) -> Result<FuzzSummary, crate::sensitivity::ParameterError> {
    let strategies = specs.iter().map(|s| parse_sensitivity(s)).collect::<Result<Vec<_>, _>>()?;
    let start = Instant::now();
    let jobs: Vec<(u64, usize)> = seeds.flat_map(|s| (0..strategies.len()).map(move |i| (s, i))).collect();
    let cases = par_map(&jobs, parallel, |&(seed, i)| {
        let program = generate_program(seed, cfg);
        let strategy = &strategies[i];
        match soundness_check(&program, strategy.as_ref(), fuel, limits) {
            Ok(r) => FuzzCase {
                seed,
                sensitivity: strategy.name(),
                states_checked: r.states_checked,
                violation: r.violation,
                incomplete: false,
            },
            Err(_) => FuzzCase {
                seed,
                sensitivity: strategy.name(),
                states_checked: 0,
                violation: None,
                incomplete: true,
            },
        }
    });
    let mut summary = FuzzSummary {
        cases: cases.len(),
        ..FuzzSummary::default()
    };
    for c in cases {
        summary.states_checked += c.states_checked;
        summary.incomplete += usize::from(c.incomplete);
        if c.violation.is_some() {
            summary.failures.push(c);
        }
    }
    summary.millis = start.elapsed().as_millis() as u64;
    Ok(summary)
}
