//! Context and heap sensitivity. A strategy decides the calling context a
//! callee runs in; the engine partitions states by (program point, context)
//! and qualifies allocation sites with a prefix of the context.

mod context;
mod strategies;

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

pub use context::{Context, CtxElem, Trace};
pub use strategies::{Acyclic, FlowOnly, Mixed, ObjectSens, Signature, Stack};

use crate::model::CallEvent;

/// A context-sensitivity strategy.
pub trait Sensitivity: Send + Sync + fmt::Debug {
    /// Canonical spelling, as accepted by [`parse_sensitivity`].
    fn name(&self) -> String;
    /// Number of context elements kept in heap addresses.
    fn heap_depth(&self) -> usize;
    /// Context of a callee invoked from `caller`.
    fn call(&self, caller: &Context, event: &CallEvent) -> Context;
}

pub type Strategy = Arc<dyn Sensitivity>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid sensitivity '{spec}': {msg}")]
pub struct ParameterError {
    pub spec: String,
    pub msg: String,
}

/// Parses `fs`, `stack:K.H`, `acyclic:H`, `obj:K.H`, `sig:K.H` or `mixed:K.H`.
pub fn parse_sensitivity(spec: &str) -> Result<Strategy, ParameterError> {
    let fail = |msg: &str| ParameterError {
        spec: spec.to_string(),
        msg: msg.to_string(),
    };
    let (kind, params) = spec.split_once(':').unwrap_or((spec, ""));
    let num = |s: &str| s.parse::<usize>().map_err(|_| fail("expected a non-negative integer parameter"));
    if kind == "fs" {
        return if params.is_empty() {
            Ok(Arc::new(FlowOnly))
        } else {
            Err(fail("fs takes no parameters"))
        };
    }
    if kind == "acyclic" {
        return Ok(Arc::new(Acyclic { h: num(params)? }));
    }
    let Some((k, h)) = params.split_once('.') else {
        return Err(fail(&format!("expected {kind}:K.H")));
    };
    let (k, h) = (num(k)?, num(h)?);
    if k == 0 {
        return Err(fail(&format!("k must be >= 1 per {kind}:K.H")));
    }
    if h >= k {
        return Err(fail(&format!("h must be < k per {kind}:K.H")));
    }
    match kind {
        "stack" => Ok(Arc::new(Stack { k, h })),
        "obj" => Ok(Arc::new(ObjectSens { k, h })),
        "sig" => Ok(Arc::new(Signature { k, h })),
        "mixed" => Ok(Arc::new(Mixed { k, h })),
        _ => Err(fail("unknown strategy; expected fs, stack, acyclic, obj, sig or mixed")),
    }
}

/// The sensitivity set exercised by the differential experiments.
pub const STANDARD_SET: [&str; 7] = ["fs", "stack:1.0", "stack:2.1", "stack:5.4", "obj:1.0", "sig:1.0", "mixed:1.0"];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_forms() {
        for s in ["fs", "stack:2.1", "acyclic:3", "obj:1.0", "sig:4.2", "mixed:1.0"] {
            assert_eq!(parse_sensitivity(s).unwrap().name(), s);
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        let e = parse_sensitivity("stack:1.2").unwrap_err();
        assert!(e.to_string().contains("h must be < k per stack:K.H"), "{e}");
        assert!(parse_sensitivity("stack:1.1").is_err());
        assert!(parse_sensitivity("stack:0.0").is_err());
        assert!(parse_sensitivity("obj:2").is_err());
        assert!(parse_sensitivity("cfa:1.0").is_err());
        assert!(parse_sensitivity("fs:1").is_err());
        assert!(parse_sensitivity("acyclic:x").is_err());
    }
}
