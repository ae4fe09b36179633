//! The reference interpreter: big-step pure expressions and a small-step
//! machine for statements with an explicit continuation stack.

mod heap;
mod machine;
mod value;

pub use heap::{deletable, AllocInfo, CObject, Cell, Code, Env, InvalidLength, Store};
pub use machine::{
    eval_exp, reads_nullish, run, run_with, Completion, ConcreteState, Frame, FrameRecord, Outcome, Run, Term,
};
pub use value::{loose_eq, prim_binop, prim_unop, strict_eq, type_of, Addr, CValue, OBJECT_STRING};
