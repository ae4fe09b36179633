use std::collections::BTreeSet;
use std::fmt;

use super::num::{AbsBool, AbsNum};
use super::string::{num_tostr, str_tonum, AbsStr};
use crate::ir::name;
use crate::model::{AddrTag, Class, Site, TypeSet};
use crate::sensitivity::Context;

/// Abstract address: allocation site, heap context and what lives there.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AbsAddr {
    pub site: Site,
    pub ctx: Context,
    pub tag: AddrTag,
}

impl AbsAddr {
    pub fn class(&self) -> Option<Class> {
        match self.tag {
            AddrTag::Obj(c) => Some(c),
            AddrTag::Var(_) => None,
        }
    }
}

impl fmt::Display for AbsAddr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.tag {
            AddrTag::Obj(c) => write!(f, "{}{}:{c:?}", self.site, self.ctx),
            AddrTag::Var(x) => write!(f, "{}{}:${x}", self.site, self.ctx),
        }
    }
}

pub type AddrSet = BTreeSet<AbsAddr>;

/// Reduced product of the per-type abstractions. A bottom component means
/// the value cannot have that type.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BValue {
    pub num: AbsNum,
    pub bool: AbsBool,
    pub str: AbsStr,
    pub addrs: AddrSet,
    pub null: bool,
    pub undef: bool,
}

impl Default for BValue {
    fn default() -> Self {
        BValue::BOT
    }
}

impl BValue {
    pub const BOT: BValue = BValue {
        num: AbsNum::Bot,
        bool: AbsBool::BOT,
        str: AbsStr::Bot,
        addrs: BTreeSet::new(),
        null: false,
        undef: false,
    };

    pub fn num(n: AbsNum) -> BValue {
        BValue { num: n, ..BValue::BOT }
    }

    pub fn cnum(n: f64) -> BValue {
        BValue::num(AbsNum::Const(n))
    }

    pub fn boolean(b: AbsBool) -> BValue {
        BValue { bool: b, ..BValue::BOT }
    }

    pub fn str(s: AbsStr) -> BValue {
        BValue { str: s, ..BValue::BOT }
    }

    pub fn cstr(s: &str) -> BValue {
        BValue::str(AbsStr::Const(name(s)))
    }

    pub fn addr(a: AbsAddr) -> BValue {
        BValue::addrs(std::iter::once(a).collect())
    }

    pub fn addrs(addrs: AddrSet) -> BValue {
        BValue { addrs, ..BValue::BOT }
    }

    pub fn null() -> BValue {
        BValue { null: true, ..BValue::BOT }
    }

    pub fn undef() -> BValue {
        BValue { undef: true, ..BValue::BOT }
    }

    /// Every value of every type.
    pub fn top_prim() -> BValue {
        BValue {
            num: AbsNum::Top,
            bool: AbsBool::TOP,
            str: AbsStr::Top,
            addrs: BTreeSet::new(),
            null: true,
            undef: true,
        }
    }

    pub fn is_bot(&self) -> bool {
        self.num.is_bot() && self.bool.is_bot() && self.str.is_bot() && self.addrs.is_empty() && !self.null && !self.undef
    }

    pub fn type_set(&self) -> TypeSet {
        let mut t = TypeSet::default();
        let parts = [
            (!self.num.is_bot(), TypeSet::NUM),
            (!self.bool.is_bot(), TypeSet::BOOL),
            (!self.str.is_bot(), TypeSet::STR),
            (!self.addrs.is_empty(), TypeSet::OBJ),
            (self.null, TypeSet::NULL),
            (self.undef, TypeSet::UNDEF),
        ];
        for (present, bit) in parts {
            if present {
                t = t.union(bit);
            }
        }
        t
    }

    pub fn may_be_nullish(&self) -> bool {
        self.null || self.undef
    }

    /// Whether any non-object component is present.
    pub fn has_prim(&self) -> bool {
        !(self.num.is_bot() && self.bool.is_bot() && self.str.is_bot() && !self.null && !self.undef)
    }

    /// The value with its object component removed.
    pub fn prim_part(&self) -> BValue {
        BValue { addrs: BTreeSet::new(), ..self.clone() }
    }

    pub fn leq(&self, other: &BValue) -> bool {
        self.num.leq(&other.num)
            && self.bool.leq(other.bool)
            && self.str.leq(&other.str)
            && self.addrs.is_subset(&other.addrs)
            && (!self.null || other.null)
            && (!self.undef || other.undef)
    }

    pub fn join(&self, other: &BValue) -> BValue {
        let addrs = if other.addrs.is_empty() {
            self.addrs.clone()
        } else if self.addrs.is_empty() {
            other.addrs.clone()
        } else {
            self.addrs.union(&other.addrs).cloned().collect()
        };
        BValue {
            num: self.num.join(&other.num),
            bool: self.bool.join(other.bool),
            str: self.str.join(&other.str),
            addrs,
            null: self.null || other.null,
            undef: self.undef || other.undef,
        }
    }

    pub fn join_in(&mut self, other: &BValue) {
        if !other.leq(self) {
            *self = self.join(other);
        }
    }

    pub fn to_bool(&self) -> AbsBool {
        let mut r = self.bool;
        if let AbsNum::Const(n) = self.num {
            r = r.join(AbsBool::from_bool(n != 0.0 && !n.is_nan()));
        } else if self.num == AbsNum::Top {
            r = AbsBool::TOP;
        }
        r = r.join(match &self.str {
            AbsStr::Bot => AbsBool::BOT,
            AbsStr::Const(s) => AbsBool::from_bool(!s.is_empty()),
            // Numeric and special strings are never empty.
            AbsStr::SNum | AbsStr::SSpl => AbsBool::TRUE,
            _ => AbsBool::TOP,
        });
        if !self.addrs.is_empty() {
            r = r.join(AbsBool::TRUE);
        }
        if self.null || self.undef {
            r = r.join(AbsBool::FALSE);
        }
        r
    }

    pub fn to_num(&self) -> AbsNum {
        let mut r = self.num;
        for b in self.bool.values() {
            r = r.join(&AbsNum::Const(b as u8 as f64));
        }
        r = r.join(&str_tonum(&self.str));
        if !self.addrs.is_empty() || self.undef {
            r = r.join(&AbsNum::Const(f64::NAN));
        }
        if self.null {
            r = r.join(&AbsNum::Const(0.0));
        }
        r
    }

    pub fn to_str(&self) -> AbsStr {
        let mut r = self.str.join(&num_tostr(&self.num));
        for b in self.bool.values() {
            r = r.join(&AbsStr::cnst(if b { "true" } else { "false" }));
        }
        if !self.addrs.is_empty() {
            r = r.join(&AbsStr::cnst(crate::concrete::OBJECT_STRING));
        }
        if self.null {
            r = r.join(&AbsStr::cnst("null"));
        }
        if self.undef {
            r = r.join(&AbsStr::cnst("undefined"));
        }
        r
    }
}

impl fmt::Display for BValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_bot() {
            return write!(f, "⊥");
        }
        let mut parts = Vec::new();
        if !self.num.is_bot() {
            parts.push(self.num.to_string());
        }
        if !self.bool.is_bot() {
            parts.push(self.bool.to_string());
        }
        if !self.str.is_bot() {
            parts.push(self.str.to_string());
        }
        for a in &self.addrs {
            parts.push(format!("&{a}"));
        }
        if self.null {
            parts.push("null".into());
        }
        if self.undef {
            parts.push("undef".into());
        }
        write!(f, "{}", parts.join("|"))
    }
}
