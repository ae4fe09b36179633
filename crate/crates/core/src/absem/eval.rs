use crate::concrete::{loose_eq, strict_eq, CValue};
use crate::conv::{to_int32, to_uint32, utf16_cmp};
use crate::domains::{str_concat, AbsBool, AbsEnv, AbsNum, AbsStore, AbsStr, BValue};
use crate::ir::{BinOp, Exp, UnOp};

/// The primitive part of `v` as a finite list of concrete values, if it is finite.
fn finite_prims(v: &BValue) -> Option<Vec<CValue>> {
    let mut out = Vec::new();
    match v.num {
        AbsNum::Bot => {}
        AbsNum::Const(n) => out.push(CValue::Num(n)),
        AbsNum::Top => return None,
    }
    out.extend(v.bool.values().map(CValue::Bool));
    match &v.str {
        AbsStr::Bot => {}
        AbsStr::Const(s) => out.push(CValue::Str(s.clone())),
        _ => return None,
    }
    if v.null {
        out.push(CValue::Null);
    }
    if v.undef {
        out.push(CValue::Undef);
    }
    Some(out)
}

fn abs_eq(strict: bool, a: &BValue, b: &BValue, store: &AbsStore) -> AbsBool {
    let eq = |x: &CValue, y: &CValue| if strict { strict_eq(x, y) } else { loose_eq(x, y) };
    let mut r = AbsBool::BOT;
    if a.has_prim() && b.has_prim() {
        match (finite_prims(a), finite_prims(b)) {
            (Some(xs), Some(ys)) => {
                for x in &xs {
                    for y in &ys {
                        r = r.join(AbsBool::from_bool(eq(x, y)));
                    }
                }
            }
            _ => r = AbsBool::TOP,
        }
    }
    if !a.addrs.is_empty() && !b.addrs.is_empty() {
        if a.addrs.is_disjoint(&b.addrs) {
            r = r.join(AbsBool::FALSE);
        } else if a.addrs.len() == 1 && a.addrs == b.addrs && !store.is_many(a.addrs.first().expect("one")) {
            r = r.join(AbsBool::TRUE);
        } else {
            r = AbsBool::TOP;
        }
    }
    if (!a.addrs.is_empty() && b.has_prim()) || (a.has_prim() && !b.addrs.is_empty()) {
        r = r.join(AbsBool::FALSE);
    }
    r
}

fn num_op(op: BinOp) -> fn(f64, f64) -> f64 {
    match op {
        BinOp::Add => |a, b| a + b,
        BinOp::Sub => |a, b| a - b,
        BinOp::Mul => |a, b| a * b,
        BinOp::Div => |a, b| a / b,
        BinOp::Mod => |a, b| a % b,
        BinOp::Shl => |a, b| to_int32(a).wrapping_shl(to_uint32(b) & 31) as f64,
        BinOp::Sar => |a, b| (to_int32(a) >> (to_uint32(b) & 31)) as f64,
        BinOp::Shr => |a, b| (to_uint32(a) >> (to_uint32(b) & 31)) as f64,
        BinOp::BitAnd => |a, b| (to_int32(a) & to_int32(b)) as f64,
        BinOp::BitOr => |a, b| (to_int32(a) | to_int32(b)) as f64,
        BinOp::BitXor => |a, b| (to_int32(a) ^ to_int32(b)) as f64,
        _ => unreachable!("not numeric: {op:?}"),
    }
}

fn compare(a: AbsNum, b: AbsNum, f: fn(f64, f64) -> bool) -> AbsBool {
    match (a, b) {
        (AbsNum::Bot, _) | (_, AbsNum::Bot) => AbsBool::BOT,
        (AbsNum::Const(x), AbsNum::Const(y)) => AbsBool::from_bool(f(x, y)),
        _ => AbsBool::TOP,
    }
}

fn str_compare(a: &AbsStr, b: &AbsStr, lt: bool) -> AbsBool {
    match (a, b) {
        (AbsStr::Bot, _) | (_, AbsStr::Bot) => AbsBool::BOT,
        (AbsStr::Const(x), AbsStr::Const(y)) => {
            let o = utf16_cmp(x, y);
            AbsBool::from_bool(if lt { o.is_lt() } else { o.is_le() })
        }
        _ => AbsBool::TOP,
    }
}

/// `instanceof`: possible when the right operand's `prototype` is on the
/// left operand's prototype chain.
fn instance_of(a: &BValue, b: &BValue, store: &AbsStore) -> AbsBool {
    let mut r = AbsBool::BOT;
    if a.is_bot() || b.is_bot() {
        return r;
    }
    if a.has_prim() || b.has_prim() {
        r = AbsBool::FALSE;
    }
    if a.addrs.is_empty() || b.addrs.is_empty() {
        return r;
    }
    let (p, _) = store.get(&b.addrs, &AbsStr::cnst("prototype"));
    if p.has_prim() {
        r = r.join(AbsBool::FALSE);
    }
    let mut chain = crate::domains::AddrSet::new();
    for x in &a.addrs {
        if let Some(o) = store.try_obj(x) {
            chain.extend(store.proto_closure(&o.proto.addrs));
            if o.proto.has_prim() {
                r = r.join(AbsBool::FALSE);
            }
        }
    }
    if p.addrs.is_disjoint(&chain) {
        r.join(AbsBool::FALSE)
    } else {
        AbsBool::TOP
    }
}

/// Abstract binary operator.
pub fn abs_binop(op: BinOp, a: &BValue, b: &BValue, store: &AbsStore) -> BValue {
    if a.is_bot() || b.is_bot() {
        return BValue::BOT;
    }
    match op {
        BinOp::Add
        | BinOp::Sub
        | BinOp::Mul
        | BinOp::Div
        | BinOp::Mod
        | BinOp::Shl
        | BinOp::Sar
        | BinOp::Shr
        | BinOp::BitAnd
        | BinOp::BitOr
        | BinOp::BitXor => BValue::num(a.to_num().map2(&b.to_num(), num_op(op))),
        BinOp::Lt => BValue::boolean(compare(a.to_num(), b.to_num(), |x, y| x < y)),
        BinOp::Le => BValue::boolean(compare(a.to_num(), b.to_num(), |x, y| x <= y)),
        BinOp::And => BValue::boolean(a.to_bool().and(b.to_bool())),
        BinOp::Or => BValue::boolean(a.to_bool().or(b.to_bool())),
        BinOp::StrConcat => BValue::str(str_concat(&a.to_str(), &b.to_str())),
        BinOp::StrLt => BValue::boolean(str_compare(&a.to_str(), &b.to_str(), true)),
        BinOp::StrLe => BValue::boolean(str_compare(&a.to_str(), &b.to_str(), false)),
        BinOp::LooseEq => BValue::boolean(abs_eq(false, a, b, store)),
        BinOp::StrictEq => BValue::boolean(abs_eq(true, a, b, store)),
        BinOp::Dot => {
            let mut v = store.get(&a.addrs, &b.to_str()).0;
            if a.has_prim() {
                v.join_in(&BValue::undef());
            }
            v
        }
        BinOp::In => {
            let mut r = store.get(&b.addrs, &a.to_str()).1;
            if b.has_prim() {
                r = r.join(AbsBool::FALSE);
            }
            BValue::boolean(r)
        }
        BinOp::InstanceOf => BValue::boolean(instance_of(a, b, store)),
    }
}

/// Join of the `typeof` strings of every value in `v`.
pub fn abs_typeof(v: &BValue, store: &AbsStore) -> AbsStr {
    let mut r = AbsStr::Bot;
    let mut add = |s: &str| r = r.join(&AbsStr::cnst(s));
    if !v.num.is_bot() {
        add("number");
    }
    if !v.bool.is_bot() {
        add("boolean");
    }
    if !v.str.is_bot() {
        add("string");
    }
    if v.undef {
        add("undefined");
    }
    if v.null {
        add("object");
    }
    for a in &v.addrs {
        let callable = store.try_obj(a).map_or(AbsBool::FALSE, |o| o.is_callable());
        if callable.may_be_true() {
            add("function");
        }
        if callable.may_be_false() {
            add("object");
        }
    }
    r
}

/// Abstract unary operator.
pub fn abs_unop(op: UnOp, v: &BValue, store: &AbsStore) -> BValue {
    if v.is_bot() {
        return BValue::BOT;
    }
    match op {
        UnOp::Neg => BValue::num(v.to_num().map(|n| -n)),
        UnOp::BitNot => BValue::num(v.to_num().map(|n| !to_int32(n) as f64)),
        UnOp::Not => BValue::boolean(v.to_bool().negate()),
        UnOp::TypeOf => BValue::str(abs_typeof(v, store)),
        UnOp::IsPrim => {
            let mut r = AbsBool::BOT;
            if v.has_prim() {
                r = r.join(AbsBool::TRUE);
            }
            if !v.addrs.is_empty() {
                r = r.join(AbsBool::FALSE);
            }
            BValue::boolean(r)
        }
        UnOp::ToBool => BValue::boolean(v.to_bool()),
        UnOp::ToStr => BValue::str(v.to_str()),
        UnOp::ToNum => BValue::num(v.to_num()),
    }
}

/// Big-step abstract evaluation of a pure expression.
pub fn aeval_exp(e: &Exp, env: &AbsEnv, store: &AbsStore) -> BValue {
    aeval(e, env, store, &mut false)
}

/// Like [`aeval_exp`], also reporting whether some `.` may read from null or undefined.
pub fn aeval_checked(e: &Exp, env: &AbsEnv, store: &AbsStore) -> (BValue, bool) {
    let mut flag = false;
    let v = aeval(e, env, store, &mut flag);
    (v, flag)
}

fn aeval(e: &Exp, env: &AbsEnv, store: &AbsStore, nullish_read: &mut bool) -> BValue {
    match e {
        Exp::Num(n) => BValue::cnum(*n),
        Exp::Bool(b) => BValue::boolean(AbsBool::from_bool(*b)),
        Exp::Str(s) => BValue::str(AbsStr::Const(s.clone())),
        Exp::Undef | Exp::Meth(_) => BValue::undef(),
        Exp::Null => BValue::null(),
        Exp::Var(x) => match env.get(x) {
            Some(addrs) => store.read_var(addrs),
            None => BValue::undef(),
        },
        Exp::Bin(op, l, r) => {
            let a = aeval(l, env, store, nullish_read);
            let b = aeval(r, env, store, nullish_read);
            if *op == BinOp::Dot && a.may_be_nullish() {
                *nullish_read = true;
            }
            abs_binop(*op, &a, &b, store)
        }
        Exp::Un(op, x) => {
            let v = aeval(x, env, store, nullish_read);
            abs_unop(*op, &v, store)
        }
    }
}
