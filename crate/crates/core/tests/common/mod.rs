//! Shared fixtures: finite alphabets of concrete and abstract values.
#![allow(dead_code)]

use std::collections::BTreeSet;

use notjs::concrete::{Addr, CValue, Env, Store};
use notjs::domains::{alpha_heap, AbsAddr, AbsBool, AbsEnv, AbsNum, AbsStore, AbsStr, BValue};
use notjs::ir::{name, NodeId};
use notjs::model::{AddrTag, Builtin, Class, Native, Site};
use notjs::sensitivity::Context;

pub const NUMS: [f64; 12] = [
    0.0,
    -0.0,
    1.0,
    -1.0,
    2.0,
    3.5,
    f64::NAN,
    f64::INFINITY,
    f64::NEG_INFINITY,
    4294967295.0,
    4294967296.0,
    1e21,
];

pub const STRS: [&str; 14] = [
    "", "0", "1", "2", "3.5", "-1", "NaN", "Infinity", "foo", "bar", "valueOf", "length", "prototype", " 1",
];

pub fn prim_alphabet() -> Vec<CValue> {
    let mut out: Vec<CValue> = NUMS.iter().map(|n| CValue::Num(*n)).collect();
    out.extend(STRS.iter().map(|s| CValue::Str(name(s))));
    out.extend([CValue::Bool(true), CValue::Bool(false), CValue::Null, CValue::Undef]);
    out
}

pub fn abs_nums() -> Vec<AbsNum> {
    let mut out = vec![AbsNum::Bot, AbsNum::Top];
    out.extend(NUMS.iter().map(|n| AbsNum::Const(*n)));
    out
}

pub fn abs_bools() -> Vec<AbsBool> {
    vec![AbsBool::BOT, AbsBool::TRUE, AbsBool::FALSE, AbsBool::TOP]
}

pub fn abs_strs() -> Vec<AbsStr> {
    let mut out = vec![
        AbsStr::Bot,
        AbsStr::SNum,
        AbsStr::SNotNumNorSpl,
        AbsStr::SSpl,
        AbsStr::SNotSpl,
        AbsStr::SNotNum,
        AbsStr::Top,
    ];
    out.extend(STRS.iter().map(|s| AbsStr::cnst(s)));
    out
}

pub fn test_addr(i: u32, class: Class) -> AbsAddr {
    AbsAddr {
        site: Site::Node(NodeId(10_000 + i)),
        ctx: Context::root(),
        tag: AddrTag::Obj(class),
    }
}

/// Products of small per-component samples: 3·4·4·3·2·2 = 576 values.
pub fn abs_values() -> Vec<BValue> {
    let nums = [AbsNum::Bot, AbsNum::Const(1.0), AbsNum::Top];
    let strs = [AbsStr::Bot, AbsStr::cnst("1"), AbsStr::cnst("foo"), AbsStr::Top];
    let addrs: [BTreeSet<AbsAddr>; 3] = [
        BTreeSet::new(),
        BTreeSet::from([test_addr(0, Class::Object)]),
        BTreeSet::from([test_addr(0, Class::Object), test_addr(1, Class::Array)]),
    ];
    let mut out = Vec::new();
    for num in nums {
        for bool in abs_bools() {
            for str in &strs {
                for a in &addrs {
                    for null in [false, true] {
                        for undef in [false, true] {
                            out.push(BValue {
                                num,
                                bool,
                                str: str.clone(),
                                addrs: a.clone(),
                                null,
                                undef,
                            });
                        }
                    }
                }
            }
        }
    }
    out
}

/// A concrete heap with builtins, a plain object, an array and access to a
/// builtin function, plus the abstraction of the same heap.
pub struct Heap {
    pub store: Store,
    pub env: Env,
    pub objects: Vec<CValue>,
}

impl Heap {
    pub fn new() -> Heap {
        let (mut store, env) = Store::with_builtins();
        let o = store.alloc_obj(store.new_object(Class::Object), Site::Node(NodeId(9_000)), 0);
        store.put(o, &name("a"), CValue::Num(1.0)).unwrap();
        store.put(o, &name("valueOf"), CValue::Str(name("x"))).unwrap();
        let arr = store.alloc_obj(store.new_object(Class::Array), Site::Node(NodeId(9_001)), 0);
        store.put(arr, &name("0"), CValue::Str(name("foo"))).unwrap();
        let f = store.builtin(Builtin::Fn(Native::Print));
        let objects = vec![CValue::Addr(o), CValue::Addr(arr), CValue::Addr(f)];
        Heap { store, env, objects }
    }

    pub fn alphabet(&self) -> Vec<CValue> {
        let mut out = prim_alphabet();
        out.extend(self.objects.iter().cloned());
        out
    }

    /// Binds `x` and `y`, returning the extended concrete env and the
    /// abstraction of the resulting heap.
    pub fn bind(&self, x: &CValue, y: &CValue) -> (Store, Env, AbsEnv, AbsStore) {
        let mut store = self.store.clone();
        let mut env = self.env.clone();
        for (n, v) in [("x", x), ("y", y)] {
            let a = store.alloc_var(&name(n), v.clone(), Site::Node(NodeId(9_100)), 0);
            env.insert(name(n), a);
        }
        let (aenv, astore) = alpha_heap(&store, &env, &|a| abs_addr(&store, a));
        (store, env, aenv, astore)
    }
}

pub fn abs_addr(store: &Store, a: Addr) -> AbsAddr {
    let info = store.info(a);
    AbsAddr {
        site: info.site,
        ctx: Context::root(),
        tag: info.tag.clone(),
    }
}
