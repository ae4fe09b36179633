use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};

use crate::conv::number_to_string;

/// Constant-propagation lattice over IEEE doubles. Constants compare by bit
/// pattern, except that all NaNs are one element.
#[derive(Debug, Clone, Copy)]
pub enum AbsNum {
    Bot,
    Const(f64),
    Top,
}

impl AbsNum {
    fn key(&self) -> (u8, u64) {
        match self {
            AbsNum::Bot => (0, 0),
            AbsNum::Const(n) if n.is_nan() => (1, f64::NAN.to_bits()),
            AbsNum::Const(n) => (1, n.to_bits()),
            AbsNum::Top => (2, 0),
        }
    }

    pub fn is_bot(&self) -> bool {
        matches!(self, AbsNum::Bot)
    }

    pub fn leq(&self, other: &AbsNum) -> bool {
        match (self, other) {
            (AbsNum::Bot, _) | (_, AbsNum::Top) => true,
            (AbsNum::Const(_), AbsNum::Const(_)) => self == other,
            _ => false,
        }
    }

    pub fn join(&self, other: &AbsNum) -> AbsNum {
        match (self, other) {
            (AbsNum::Bot, x) | (x, AbsNum::Bot) => *x,
            (AbsNum::Const(_), AbsNum::Const(_)) if self == other => *self,
            _ => AbsNum::Top,
        }
    }

    pub fn as_const(&self) -> Option<f64> {
        match self {
            AbsNum::Const(n) => Some(*n),
            _ => None,
        }
    }

    /// Lifts a unary numeric function.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> AbsNum {
        match self {
            AbsNum::Bot => AbsNum::Bot,
            AbsNum::Const(n) => AbsNum::Const(f(*n)),
            AbsNum::Top => AbsNum::Top,
        }
    }

    /// Lifts a binary numeric function.
    pub fn map2(&self, other: &AbsNum, f: impl Fn(f64, f64) -> f64) -> AbsNum {
        match (self, other) {
            (AbsNum::Bot, _) | (_, AbsNum::Bot) => AbsNum::Bot,
            (AbsNum::Const(a), AbsNum::Const(b)) => AbsNum::Const(f(*a, *b)),
            _ => AbsNum::Top,
        }
    }
}

impl PartialEq for AbsNum {
    fn eq(&self, other: &Self) -> bool {
        self.key() == other.key()
    }
}
impl Eq for AbsNum {}
impl Hash for AbsNum {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.key().hash(state)
    }
}
impl PartialOrd for AbsNum {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for AbsNum {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key().cmp(&other.key())
    }
}

impl fmt::Display for AbsNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AbsNum::Bot => write!(f, "⊥"),
            AbsNum::Const(n) => write!(f, "{}", number_to_string(*n)),
            AbsNum::Top => write!(f, "Num"),
        }
    }
}

/// Powerset of {true, false}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct AbsBool(u8);

impl AbsBool {
    pub const BOT: AbsBool = AbsBool(0);
    pub const TRUE: AbsBool = AbsBool(1);
    pub const FALSE: AbsBool = AbsBool(2);
    pub const TOP: AbsBool = AbsBool(3);

    pub fn from_bool(b: bool) -> AbsBool {
        if b {
            AbsBool::TRUE
        } else {
            AbsBool::FALSE
        }
    }

    pub fn is_bot(self) -> bool {
        self.0 == 0
    }

    pub fn may_be_true(self) -> bool {
        self.0 & 1 != 0
    }

    pub fn may_be_false(self) -> bool {
        self.0 & 2 != 0
    }

    pub fn leq(self, other: AbsBool) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn join(self, other: AbsBool) -> AbsBool {
        AbsBool(self.0 | other.0)
    }

    pub fn values(self) -> impl Iterator<Item = bool> {
        [true, false]
            .into_iter()
            .filter(move |b| if *b { self.may_be_true() } else { self.may_be_false() })
    }

    pub fn negate(self) -> AbsBool {
        AbsBool(((self.0 & 1) << 1) | ((self.0 & 2) >> 1))
    }

    pub fn and(self, other: AbsBool) -> AbsBool {
        self.lift2(other, |a, b| a && b)
    }

    pub fn or(self, other: AbsBool) -> AbsBool {
        self.lift2(other, |a, b| a || b)
    }

    fn lift2(self, other: AbsBool, f: impl Fn(bool, bool) -> bool) -> AbsBool {
        let mut r = AbsBool::BOT;
        for a in self.values() {
            for b in other.values() {
                r = r.join(AbsBool::from_bool(f(a, b)));
            }
        }
        r
    }
}

impl fmt::Display for AbsBool {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            AbsBool::BOT => write!(f, "⊥"),
            AbsBool::TRUE => write!(f, "true"),
            AbsBool::FALSE => write!(f, "false"),
            _ => write!(f, "Bool"),
        }
    }
}
