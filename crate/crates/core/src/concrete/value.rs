use std::fmt;

use crate::conv::{number_to_string, string_to_number, to_int32, to_uint32, utf16_cmp};
use crate::ir::{name, BinOp, Name, UnOp};
use crate::model::TypeSet;

/// Concrete store address.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Addr(pub u32);

#[derive(Debug, Clone)]
pub enum CValue {
    Num(f64),
    Bool(bool),
    Str(Name),
    Addr(Addr),
    Null,
    Undef,
}

impl PartialEq for CValue {
    /// Identity, not JavaScript equality: NaN equals NaN, +0 and -0 differ.
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (CValue::Num(a), CValue::Num(b)) => a.to_bits() == b.to_bits() || (a.is_nan() && b.is_nan()),
            (CValue::Bool(a), CValue::Bool(b)) => a == b,
            (CValue::Str(a), CValue::Str(b)) => a == b,
            (CValue::Addr(a), CValue::Addr(b)) => a == b,
            (CValue::Null, CValue::Null) | (CValue::Undef, CValue::Undef) => true,
            _ => false,
        }
    }
}

impl fmt::Display for CValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CValue::Addr(a) => write!(f, "<object #{}>", a.0),
            v => write!(f, "{}", v.to_str()),
        }
    }
}

impl CValue {
    pub fn str(s: &str) -> CValue {
        CValue::Str(name(s))
    }

    pub fn as_addr(&self) -> Option<Addr> {
        match self {
            CValue::Addr(a) => Some(*a),
            _ => None,
        }
    }

    pub fn is_nullish(&self) -> bool {
        matches!(self, CValue::Null | CValue::Undef)
    }

    pub fn type_set(&self) -> TypeSet {
        match self {
            CValue::Num(_) => TypeSet::NUM,
            CValue::Bool(_) => TypeSet::BOOL,
            CValue::Str(_) => TypeSet::STR,
            CValue::Addr(_) => TypeSet::OBJ,
            CValue::Null => TypeSet::NULL,
            CValue::Undef => TypeSet::UNDEF,
        }
    }

    pub fn to_bool(&self) -> bool {
        match self {
            CValue::Num(n) => *n != 0.0 && !n.is_nan(),
            CValue::Bool(b) => *b,
            CValue::Str(s) => !s.is_empty(),
            CValue::Addr(_) => true,
            CValue::Null | CValue::Undef => false,
        }
    }

    pub fn to_num(&self) -> f64 {
        match self {
            CValue::Num(n) => *n,
            CValue::Bool(b) => *b as u8 as f64,
            CValue::Str(s) => string_to_number(s),
            CValue::Addr(_) | CValue::Undef => f64::NAN,
            CValue::Null => 0.0,
        }
    }

    pub fn to_str(&self) -> Name {
        match self {
            CValue::Num(n) => name(&number_to_string(*n)),
            CValue::Bool(b) => name(if *b { "true" } else { "false" }),
            CValue::Str(s) => s.clone(),
            CValue::Addr(_) => name(OBJECT_STRING),
            CValue::Null => name("null"),
            CValue::Undef => name("undefined"),
        }
    }
}

/// `tostr` of any object. Objects carry no user-visible conversion hooks here.
pub const OBJECT_STRING: &str = "[object Object]";

fn num_op(op: BinOp, a: f64, b: f64) -> f64 {
    match op {
        BinOp::Add => a + b,
        BinOp::Sub => a - b,
        BinOp::Mul => a * b,
        BinOp::Div => a / b,
        BinOp::Mod => a % b,
        BinOp::Shl => to_int32(a).wrapping_shl(to_uint32(b) & 31) as f64,
        BinOp::Sar => (to_int32(a) >> (to_uint32(b) & 31)) as f64,
        BinOp::Shr => (to_uint32(a) >> (to_uint32(b) & 31)) as f64,
        BinOp::BitAnd => (to_int32(a) & to_int32(b)) as f64,
        BinOp::BitOr => (to_int32(a) | to_int32(b)) as f64,
        BinOp::BitXor => (to_int32(a) ^ to_int32(b)) as f64,
        _ => unreachable!("not a numeric operator: {op:?}"),
    }
}

/// ECMA `==`. Objects compare by identity and never equal a primitive.
pub fn loose_eq(a: &CValue, b: &CValue) -> bool {
    use CValue::*;
    match (a, b) {
        (Null | Undef, Null | Undef) => true,
        (Null | Undef, _) | (_, Null | Undef) => false,
        (Addr(x), Addr(y)) => x == y,
        (Addr(_), _) | (_, Addr(_)) => false,
        (Str(x), Str(y)) => x == y,
        _ => a.to_num() == b.to_num(),
    }
}

/// ECMA `===`.
pub fn strict_eq(a: &CValue, b: &CValue) -> bool {
    use CValue::*;
    match (a, b) {
        (Num(x), Num(y)) => x == y,
        (Num(_), _) | (_, Num(_)) => false,
        _ => a == b,
    }
}

/// Binary operators over values without consulting the store. `.`, `in` and
/// `instanceof` need the heap and are handled by the caller.
pub fn prim_binop(op: BinOp, a: &CValue, b: &CValue) -> CValue {
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
        | BinOp::BitXor => CValue::Num(num_op(op, a.to_num(), b.to_num())),
        BinOp::Lt => CValue::Bool(a.to_num() < b.to_num()),
        BinOp::Le => CValue::Bool(a.to_num() <= b.to_num()),
        BinOp::And => CValue::Bool(a.to_bool() && b.to_bool()),
        BinOp::Or => CValue::Bool(a.to_bool() || b.to_bool()),
        BinOp::StrConcat => {
            let mut s = a.to_str().to_string();
            s.push_str(&b.to_str());
            CValue::Str(name(&s))
        }
        BinOp::StrLt => CValue::Bool(utf16_cmp(&a.to_str(), &b.to_str()).is_lt()),
        BinOp::StrLe => CValue::Bool(utf16_cmp(&a.to_str(), &b.to_str()).is_le()),
        BinOp::LooseEq => CValue::Bool(loose_eq(a, b)),
        BinOp::StrictEq => CValue::Bool(strict_eq(a, b)),
        BinOp::Dot | BinOp::InstanceOf | BinOp::In => unreachable!("heap operator {op:?}"),
    }
}

/// Unary operators. `typeof` needs to know whether an object is callable.
pub fn prim_unop(op: UnOp, v: &CValue, callable: bool) -> CValue {
    match op {
        UnOp::Neg => CValue::Num(-v.to_num()),
        UnOp::BitNot => CValue::Num(!to_int32(v.to_num()) as f64),
        UnOp::Not => CValue::Bool(!v.to_bool()),
        UnOp::TypeOf => CValue::str(type_of(v, callable)),
        UnOp::IsPrim => CValue::Bool(!matches!(v, CValue::Addr(_))),
        UnOp::ToBool => CValue::Bool(v.to_bool()),
        UnOp::ToStr => CValue::Str(v.to_str()),
        UnOp::ToNum => CValue::Num(v.to_num()),
    }
}

pub fn type_of(v: &CValue, callable: bool) -> &'static str {
    match v {
        CValue::Num(_) => "number",
        CValue::Bool(_) => "boolean",
        CValue::Str(_) => "string",
        CValue::Undef => "undefined",
        CValue::Null => "object",
        CValue::Addr(_) if callable => "function",
        CValue::Addr(_) => "object",
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_and_conversions() {
        assert_eq!(prim_binop(BinOp::Add, &CValue::Num(1.0), &CValue::Num(2.0)), CValue::Num(3.0));
        let nan = prim_binop(BinOp::Div, &CValue::Num(0.0), &CValue::Num(0.0));
        assert_eq!(prim_unop(UnOp::ToStr, &nan, false), CValue::str("NaN"));
        assert_eq!(prim_unop(UnOp::ToBool, &CValue::str(""), false), CValue::Bool(false));
        assert_eq!(prim_binop(BinOp::Mod, &CValue::Num(-7.0), &CValue::Num(3.0)), CValue::Num(-1.0));
        assert_eq!(prim_binop(BinOp::Shr, &CValue::Num(-1.0), &CValue::Num(0.0)), CValue::Num(4294967295.0));
        assert_eq!(prim_binop(BinOp::Shl, &CValue::Num(1.0), &CValue::Num(33.0)), CValue::Num(2.0));
        assert_eq!(prim_binop(BinOp::Add, &CValue::str("1"), &CValue::Bool(true)), CValue::Num(2.0));
    }

    #[test]
    fn equality() {
        let nan = CValue::Num(f64::NAN);
        assert!(!strict_eq(&nan, &nan));
        assert!(strict_eq(&CValue::Num(0.0), &CValue::Num(-0.0)));
        assert!(loose_eq(&CValue::Null, &CValue::Undef));
        assert!(!loose_eq(&CValue::Null, &CValue::Num(0.0)));
        assert!(loose_eq(&CValue::str("1"), &CValue::Bool(true)));
        assert!(loose_eq(&CValue::str(""), &CValue::Num(0.0)));
        assert!(!loose_eq(&CValue::str("a"), &CValue::str("b")));
    }

    #[test]
    fn string_ops() {
        assert_eq!(prim_binop(BinOp::StrConcat, &CValue::Num(1.0), &CValue::Null), CValue::str("1null"));
        assert_eq!(prim_binop(BinOp::StrLt, &CValue::str("10"), &CValue::str("9")), CValue::Bool(true));
        assert_eq!(prim_binop(BinOp::Lt, &CValue::str("10"), &CValue::str("9")), CValue::Bool(false));
        assert_eq!(prim_unop(UnOp::TypeOf, &CValue::Null, false), CValue::str("object"));
    }
}
