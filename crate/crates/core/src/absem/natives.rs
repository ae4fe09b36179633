use super::step::Stepper;
use crate::conv::to_uint32;
use crate::domains::{num_tostr, str_concat, AbsBool, AbsNum, AbsStore, AbsStr, AddrSet, BValue};
use crate::ir::NodeId;
use crate::model::{to_string_tag, Class, Native, TypeSet, JOIN_LIMIT};

/// One way a native call may end.
pub(super) struct NativeOut {
    pub store: AbsStore,
    pub ret: BValue,
    pub range_error: bool,
    /// The untracked RangeError of an oversized `join`.
    pub host_error: bool,
}

impl NativeOut {
    fn ok(store: AbsStore, ret: BValue) -> NativeOut {
        NativeOut { store, ret, range_error: false, host_error: false }
    }
}

/// Longest `join` evaluated element by element.
const JOIN_UNROLL: f64 = 8.0;

fn length(store: &AbsStore, addrs: &AddrSet) -> AbsNum {
    store
        .get(addrs, &AbsStr::cnst("length"))
        .0
        .to_num()
        .map(|n| to_uint32(n) as f64)
}

fn without_nullish(v: &BValue) -> BValue {
    BValue { null: false, undef: false, ..v.clone() }
}

impl Stepper<'_> {
    /// Abstract semantics of the builtin functions.
    pub(super) fn native(
        &mut self,
        at: NodeId,
        n: Native,
        this: &BValue,
        args: &BValue,
        ctor: Option<&AddrSet>,
        store: &AbsStore,
    ) -> Vec<NativeOut> {
        let arg0 = self.arg(args, 0, store);
        let mut outs = Vec::new();
        let objs = &this.addrs;
        // Receiver-independent natives first.
        let simple = match n {
            Native::ObjectCtor => {
                let mut store = store.clone();
                let ret = match ctor {
                    Some(_) => this.clone(),
                    None => {
                        let mut r = BValue::addrs(arg0.addrs.clone());
                        if arg0.has_prim() {
                            r.join_in(&self.alloc_plain(&mut store, at, Class::Object));
                        }
                        r
                    }
                };
                Some(NativeOut::ok(store, ret))
            }
            Native::ArrayCtor => {
                let mut store = store.clone();
                let ret = match ctor {
                    Some(_) => this.clone(),
                    None => self.alloc_plain(&mut store, at, Class::Array),
                };
                Some(NativeOut::ok(store, ret))
            }
            Native::FunctionCtor | Native::Eval => {
                self.out.evals.push(at);
                Some(NativeOut::ok(store.clone(), BValue::undef()))
            }
            Native::FunctionProto | Native::Print => Some(NativeOut::ok(store.clone(), BValue::undef())),
            Native::ValueOf => Some(NativeOut::ok(store.clone(), this.clone())),
            Native::IsNaN => {
                let r = match arg0.to_num() {
                    AbsNum::Bot => AbsBool::BOT,
                    AbsNum::Const(x) => AbsBool::from_bool(x.is_nan()),
                    AbsNum::Top => AbsBool::TOP,
                };
                Some(NativeOut::ok(store.clone(), BValue::boolean(r)))
            }
            Native::ToString => {
                let mut s = AbsStr::Bot;
                for a in objs {
                    s = s.join(&AbsStr::cnst(to_string_tag(a.class(), TypeSet::OBJ)));
                }
                for bit in [TypeSet::NUM, TypeSet::BOOL, TypeSet::STR, TypeSet::NULL, TypeSet::UNDEF] {
                    if this.type_set().contains(bit) {
                        s = s.join(&AbsStr::cnst(to_string_tag(None, bit)));
                    }
                }
                Some(NativeOut::ok(store.clone(), BValue::str(s)))
            }
            Native::HasOwnProperty => {
                let key = arg0.to_str();
                let mut r = AbsBool::BOT;
                for a in objs {
                    r = r.join(store.obj(a).has_own(&key));
                }
                if this.has_prim() {
                    r = r.join(AbsBool::FALSE);
                }
                Some(NativeOut::ok(store.clone(), BValue::boolean(r)))
            }
            Native::Push | Native::Pop | Native::Join => None,
        };
        if let Some(o) = simple {
            return vec![o];
        }
        if this.has_prim() {
            let ret = if n == Native::Join { BValue::cstr("") } else { BValue::undef() };
            outs.push(NativeOut::ok(store.clone(), ret));
        }
        if objs.is_empty() {
            return outs;
        }
        let len = length(store, objs);
        match n {
            Native::Push => {
                let mut st = store.clone();
                let f1 = st.put(objs, &num_tostr(&len), &arg0);
                let next = len.map(|l| l + 1.0);
                let f2 = st.put(objs, &AbsStr::cnst("length"), &BValue::num(next));
                let ret = if f2.may_succeed { BValue::num(next) } else { BValue::BOT };
                outs.push(NativeOut {
                    store: st,
                    ret,
                    range_error: f1.may_fail || f2.may_fail,
                    host_error: false,
                });
            }
            Native::Pop => {
                if len.leq(&AbsNum::Const(0.0)) || len == AbsNum::Top {
                    let mut st = store.clone();
                    st.put(objs, &AbsStr::cnst("length"), &BValue::cnum(0.0));
                    outs.push(NativeOut::ok(st, BValue::undef()));
                }
                let last = match len {
                    AbsNum::Const(l) if l > 0.0 => Some(AbsNum::Const(l - 1.0)),
                    AbsNum::Top => Some(AbsNum::Top),
                    _ => None,
                };
                if let Some(last) = last {
                    let mut st = store.clone();
                    let key = num_tostr(&last);
                    let v = st.get(objs, &key).0;
                    st.delete(objs, &key);
                    st.put(objs, &AbsStr::cnst("length"), &BValue::num(last));
                    outs.push(NativeOut::ok(st, v));
                }
            }
            Native::Join => {
                let mut sep = AbsStr::Bot;
                if arg0.undef {
                    sep = AbsStr::cnst(",");
                }
                let rest = BValue { undef: false, ..arg0.clone() };
                if !rest.is_bot() {
                    sep = sep.join(&rest.to_str());
                }
                let too_long = match len {
                    AbsNum::Const(l) => l > JOIN_LIMIT,
                    _ => true,
                };
                if too_long {
                    outs.push(NativeOut {
                        store: store.clone(),
                        ret: BValue::BOT,
                        range_error: false,
                        host_error: true,
                    });
                }
                let s = match len {
                    AbsNum::Const(l) if l <= JOIN_UNROLL => {
                        let mut out = AbsStr::cnst("");
                        for i in 0..l as usize {
                            if i > 0 {
                                out = str_concat(&out, &sep);
                            }
                            let v = store.get(objs, &AbsStr::cnst(&i.to_string())).0;
                            let mut piece = without_nullish(&v).to_str();
                            if v.may_be_nullish() {
                                piece = piece.join(&AbsStr::cnst(""));
                            }
                            out = str_concat(&out, &piece);
                        }
                        out
                    }
                    AbsNum::Const(l) if l > JOIN_LIMIT => AbsStr::Bot,
                    _ => AbsStr::Top,
                };
                if !s.is_bot() {
                    outs.push(NativeOut::ok(store.clone(), BValue::str(s)));
                }
            }
            _ => unreachable!(),
        }
        outs
    }
}
