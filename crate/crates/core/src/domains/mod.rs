//! Abstract domains: constant numbers, boolean sets, the string category
//! lattice, the product value `BValue`, abstract objects and stores.

mod alpha;
mod num;
mod object;
mod store;
mod string;
mod value;

pub use alpha::{alpha, alpha_heap, alpha_obj};
pub use num::{AbsBool, AbsNum};
pub use object::{env_leq, join_env, AbsEnv, AbsObject, ClassMismatch, PutFlags};
pub use store::{AbsStore, VarCell};
pub use string::{classify_str, num_tostr, str_concat, str_tonum, AbsStr, StrClass};
pub use value::{AbsAddr, AddrSet, BValue};
