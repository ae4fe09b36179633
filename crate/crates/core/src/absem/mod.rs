//! Abstract semantics: expression evaluation, abstract machine states and
//! the small-step transition function over them.

mod eval;
mod natives;
mod state;
mod step;

pub use eval::{abs_binop, abs_typeof, abs_unop, aeval_checked, aeval_exp};
pub use state::{AFrame, AKont, AState, ATerm, KontAddr, KontMismatch, KontStore, RetFrame, ValueSet};
pub use step::{builtin_addr, new_object, next_states, next_states_with, CallKey, CallTable, StepResult};

use std::sync::Arc;

use crate::concrete::Store;
use crate::domains::{alpha_heap, AbsAddr};
use crate::ir::Decl;
use crate::model::Point;
use crate::sensitivity::{Context, Trace};

/// The starting partition and state of an analysis of `program`: the
/// abstraction of the concrete builtin heap.
pub fn initial_state(program: &Arc<Decl>) -> (Trace, AState) {
    let (cstore, cenv) = Store::with_builtins();
    let addr = |a| {
        let info = cstore.info(a);
        AbsAddr {
            site: info.site,
            ctx: Context::root(),
            tag: info.tag.clone(),
        }
    };
    let (env, store) = alpha_heap(&cstore, &cenv, &addr);
    let trace = Trace { point: Point::Node(program.id), ctx: Context::root() };
    let state = AState {
        term: ATerm::Decl(program.clone()),
        env,
        store,
        konts: KontStore::new(),
        kont: Arc::new(AKont::Halt),
    };
    (trace, state)
}

