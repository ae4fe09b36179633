use std::sync::Arc;

use super::num::{AbsBool, AbsNum};
use super::object::{AbsEnv, AbsObject};
use super::string::AbsStr;
use super::store::{AbsStore, VarCell};
use super::value::{AbsAddr, AddrSet, BValue};
use crate::concrete::{Addr, CObject, CValue, Cell, Code, Env, Store};
use crate::ir::MRef;

/// Abstraction of a single concrete value; `addr` places concrete addresses.
pub fn alpha(v: &CValue, addr: &dyn Fn(Addr) -> AbsAddr) -> BValue {
    match v {
        CValue::Num(n) => BValue::num(AbsNum::Const(*n)),
        CValue::Bool(b) => BValue::boolean(AbsBool::from_bool(*b)),
        CValue::Str(s) => BValue::str(AbsStr::Const(s.clone())),
        CValue::Addr(a) => BValue::addr(addr(*a)),
        CValue::Null => BValue::null(),
        CValue::Undef => BValue::undef(),
    }
}

/// Abstraction of a concrete object: every property exact and present.
/// Closure environments are abstracted by `env`.
pub fn alpha_obj(o: &CObject, addr: &dyn Fn(Addr) -> AbsAddr, env: &dyn Fn(&Env) -> AbsEnv) -> AbsObject {
    let mut out = AbsObject::new(o.class, alpha(&o.proto, addr));
    out.exact.clear();
    out.present.clear();
    out.hidden.clear();
    for (k, v) in &o.props {
        out.exact.insert(k.clone(), alpha(v, addr));
        out.present.insert(k.clone());
    }
    out.hidden = o.hidden.clone();
    match &o.code {
        Some(Code::User { env: e, meth }) => {
            out.user.insert(MRef(meth.clone()), env(e));
        }
        Some(Code::Native(n)) => {
            out.natives.insert(*n);
        }
        None => {}
    }
    if let Some(p) = &o.prim {
        out.prim = alpha(p, addr);
    }
    out
}

/// Abstraction of a whole concrete heap and environment, each concrete cell
/// mapped to the single abstract address `addr` gives it.
pub fn alpha_heap(store: &Store, env: &Env, addr: &dyn Fn(Addr) -> AbsAddr) -> (AbsEnv, AbsStore) {
    let abs_env = |e: &Env| -> AbsEnv { e.iter().map(|(x, a)| (x.clone(), AddrSet::from([addr(*a)]))).collect() };
    let mut out = AbsStore::default();
    for (a, cell, _) in store.cells() {
        match cell {
            Cell::Obj(o) => {
                out.objs.insert(addr(a), Arc::new(alpha_obj(o, addr, &abs_env)));
            }
            Cell::Val(v) => {
                out.vars.insert(addr(a), VarCell { val: alpha(v, addr), many: false });
            }
        }
    }
    (abs_env(env), out)
}
