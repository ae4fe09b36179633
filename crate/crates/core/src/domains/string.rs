use std::fmt;

use super::num::AbsNum;
use crate::conv::{is_numeric_string, number_to_string, numeric_alphabet, string_to_number};
use crate::ir::{name, Name};
use crate::model::SPECIAL_NAMES;

/// The three disjoint string categories.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum StrClass {
    /// Canonical number strings (`s == ToString(ToNumber(s))`).
    Numeric,
    /// Builtin property names that are not numeric.
    Special,
    Other,
}

/// Numeric strings take priority, so "NaN" and "Infinity" are numeric.
pub fn classify_str(s: &str) -> StrClass {
    if is_numeric_string(s) {
        StrClass::Numeric
    } else if SPECIAL_NAMES.contains(&s) {
        StrClass::Special
    } else {
        StrClass::Other
    }
}

const N: u8 = 1;
const S: u8 = 2;
const O: u8 = 4;

fn class_bit(c: StrClass) -> u8 {
    match c {
        StrClass::Numeric => N,
        StrClass::Special => S,
        StrClass::Other => O,
    }
}

/// String lattice: constants below three category elements, which sit below
/// "not special", "not numeric" and top.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AbsStr {
    Bot,
    Const(Name),
    SNum,
    SNotNumNorSpl,
    SSpl,
    SNotSpl,
    SNotNum,
    Top,
}

impl AbsStr {
    pub fn cnst(s: &str) -> AbsStr {
        AbsStr::Const(name(s))
    }

    /// Categories whose strings this element may contain.
    pub fn mask(&self) -> u8 {
        match self {
            AbsStr::Bot => 0,
            AbsStr::Const(s) => class_bit(classify_str(s)),
            AbsStr::SNum => N,
            AbsStr::SNotNumNorSpl => O,
            AbsStr::SSpl => S,
            AbsStr::SNotSpl => N | O,
            AbsStr::SNotNum => S | O,
            AbsStr::Top => N | S | O,
        }
    }

    /// Least non-constant element covering the given categories.
    pub fn from_mask(m: u8) -> AbsStr {
        match m {
            0 => AbsStr::Bot,
            N => AbsStr::SNum,
            S => AbsStr::SSpl,
            O => AbsStr::SNotNumNorSpl,
            x if x == N | O => AbsStr::SNotSpl,
            x if x == S | O => AbsStr::SNotNum,
            _ => AbsStr::Top,
        }
    }

    pub fn is_bot(&self) -> bool {
        matches!(self, AbsStr::Bot)
    }

    pub fn as_const(&self) -> Option<&Name> {
        match self {
            AbsStr::Const(s) => Some(s),
            _ => None,
        }
    }

    pub fn may_be_class(&self, c: StrClass) -> bool {
        self.mask() & class_bit(c) != 0
    }

    /// Membership of a concrete string.
    pub fn contains(&self, s: &str) -> bool {
        match self {
            AbsStr::Const(t) => &**t == s,
            other => other.mask() & class_bit(classify_str(s)) != 0,
        }
    }

    pub fn leq(&self, other: &AbsStr) -> bool {
        match (self, other) {
            (AbsStr::Bot, _) => true,
            (_, AbsStr::Const(t)) => matches!(self, AbsStr::Const(s) if s == t),
            (_, o) => self.mask() & !o.mask() == 0,
        }
    }

    pub fn join(&self, other: &AbsStr) -> AbsStr {
        match (self, other) {
            (AbsStr::Bot, x) | (x, AbsStr::Bot) => x.clone(),
            (AbsStr::Const(a), AbsStr::Const(b)) if a == b => self.clone(),
            _ => AbsStr::from_mask(self.mask() | other.mask()),
        }
    }
}

impl fmt::Display for AbsStr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AbsStr::Bot => write!(f, "⊥"),
            AbsStr::Const(s) => write!(f, "{}", crate::ir::fmt_str(s)),
            other => write!(f, "{other:?}"),
        }
    }
}

/// Whether some string in `a` is a canonical number, judged by alphabet.
fn may_be_numeric_alphabet(a: &AbsStr) -> bool {
    match a {
        AbsStr::Const(s) => s.chars().all(numeric_alphabet),
        // Special names never consist only of number characters, while the
        // numeric and other categories both contain such strings ("" is other).
        other => other.mask() & (N | O) != 0,
    }
}

/// Abstract string concatenation.
pub fn str_concat(a: &AbsStr, b: &AbsStr) -> AbsStr {
    if a.is_bot() || b.is_bot() {
        return AbsStr::Bot;
    }
    if let (AbsStr::Const(x), AbsStr::Const(y)) = (a, b) {
        let mut s = x.to_string();
        s.push_str(y);
        return AbsStr::Const(name(&s));
    }
    match (a, b) {
        (AbsStr::Const(e), x) | (x, AbsStr::Const(e)) if e.is_empty() => return x.clone(),
        _ => {}
    }
    // "other" is kept unconditionally; deciding it exactly is not worth it.
    let mut m = O;
    let special = SPECIAL_NAMES
        .iter()
        .filter(|s| classify_str(s) == StrClass::Special)
        .any(|s| (0..=s.len()).any(|i| a.contains(&s[..i]) && b.contains(&s[i..])));
    if special {
        m |= S;
    }
    if may_be_numeric_alphabet(a) && may_be_numeric_alphabet(b) {
        m |= N;
    }
    AbsStr::from_mask(m)
}

pub fn str_tonum(a: &AbsStr) -> AbsNum {
    match a {
        AbsStr::Bot => AbsNum::Bot,
        AbsStr::Const(s) => AbsNum::Const(string_to_number(s)),
        // No special name parses as a number.
        AbsStr::SSpl => AbsNum::Const(f64::NAN),
        _ => AbsNum::Top,
    }
}

pub fn num_tostr(n: &AbsNum) -> AbsStr {
    match n {
        AbsNum::Bot => AbsStr::Bot,
        AbsNum::Const(x) => AbsStr::Const(name(&number_to_string(*x))),
        AbsNum::Top => AbsStr::SNum,
    }
}
