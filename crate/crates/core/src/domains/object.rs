use std::collections::{BTreeMap, BTreeSet};

use im::OrdMap;
use thiserror::Error;

use super::num::{AbsBool, AbsNum};
use super::string::{classify_str, AbsStr, StrClass};
use super::value::{AddrSet, BValue};
use crate::concrete::deletable;
use crate::conv::array_index;
use crate::ir::{name, MRef, Name};
use crate::model::{valid_array_length, Class, Native, SPECIAL_NAMES};

/// Abstract environment: each variable may live at several addresses.
pub type AbsEnv = OrdMap<Name, AddrSet>;

pub fn join_env(a: &AbsEnv, b: &AbsEnv) -> AbsEnv {
    if a.ptr_eq(b) {
        return a.clone();
    }
    a.clone().union_with(b.clone(), |x, y| if x == y { x } else { x.union(&y).cloned().collect() })
}

pub fn env_leq(a: &AbsEnv, b: &AbsEnv) -> bool {
    a.ptr_eq(b) || a.iter().all(|(x, s)| b.get(x).is_some_and(|t| s.is_subset(t)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("cannot join objects of classes {0:?} and {1:?}")]
pub struct ClassMismatch(pub Class, pub Class);

/// Result of an abstract property write.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct PutFlags {
    /// Some concrete write throws a RangeError (invalid array length).
    pub may_fail: bool,
    /// Some concrete write succeeds.
    pub may_succeed: bool,
}

impl PutFlags {
    pub fn join(self, o: PutFlags) -> PutFlags {
        PutFlags {
            may_fail: self.may_fail || o.may_fail,
            may_succeed: self.may_succeed || o.may_succeed,
        }
    }
}

/// An abstract object. Properties named by special strings, and any other
/// name that has been written or read with a constant key, are tracked
/// exactly; the remaining numeric and "other" names share a summary each.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AbsObject {
    pub class: Class,
    /// A value of `BOT` records that the property is definitely absent.
    pub exact: OrdMap<Name, BValue>,
    pub num: BValue,
    pub other: BValue,
    /// Exact names that every represented object has.
    pub present: BTreeSet<Name>,
    /// Exact names that are non-enumerable in every represented object.
    pub hidden: BTreeSet<Name>,
    pub user: OrdMap<MRef, AbsEnv>,
    pub natives: BTreeSet<Native>,
    pub proto: BValue,
    pub prim: BValue,
    /// More than one concrete object may be represented.
    pub many: bool,
}

impl AbsObject {
    pub fn new(class: Class, proto: BValue) -> AbsObject {
        let mut o = AbsObject {
            class,
            exact: OrdMap::new(),
            num: BValue::BOT,
            other: BValue::BOT,
            present: BTreeSet::new(),
            hidden: BTreeSet::new(),
            user: OrdMap::new(),
            natives: BTreeSet::new(),
            proto,
            prim: BValue::BOT,
            many: false,
        };
        if class == Class::Array {
            o.set_hidden("length", BValue::cnum(0.0));
        }
        o
    }

    pub fn set_hidden(&mut self, key: &str, v: BValue) {
        let k = name(key);
        self.exact.insert(k.clone(), v);
        self.present.insert(k.clone());
        self.hidden.insert(k);
    }

    pub fn is_callable(&self) -> AbsBool {
        if self.user.is_empty() && self.natives.is_empty() {
            AbsBool::FALSE
        } else {
            AbsBool::TRUE
        }
    }

    /// Value of property `k` if it exists; `BOT` if it cannot exist.
    pub fn slot(&self, k: &str) -> BValue {
        if let Some(v) = self.exact.get(k) {
            return v.clone();
        }
        match classify_str(k) {
            StrClass::Numeric => self.num.clone(),
            StrClass::Special => BValue::BOT,
            StrClass::Other => self.other.clone(),
        }
    }

    /// Whether property `k` is an own property.
    pub fn presence(&self, k: &str) -> AbsBool {
        if self.present.contains(k) {
            AbsBool::TRUE
        } else if self.slot(k).is_bot() {
            AbsBool::FALSE
        } else {
            AbsBool::TOP
        }
    }

    /// Join of every own property whose name may be in `key`.
    pub fn slots_matching(&self, key: &AbsStr) -> BValue {
        if let AbsStr::Const(k) = key {
            return self.slot(k);
        }
        let mut v = BValue::BOT;
        for (k, x) in self.exact.iter() {
            if key.contains(k) {
                v.join_in(x);
            }
        }
        if key.may_be_class(StrClass::Numeric) {
            v.join_in(&self.num);
        }
        if key.may_be_class(StrClass::Other) {
            v.join_in(&self.other);
        }
        v
    }

    /// Own-property test for possibly abstract names.
    pub fn has_own(&self, key: &AbsStr) -> AbsBool {
        match key {
            AbsStr::Bot => AbsBool::BOT,
            AbsStr::Const(k) => self.presence(k),
            _ => {
                let mut r = AbsBool::BOT;
                let some_exact = self.exact.iter().any(|(k, v)| key.contains(k) && !v.is_bot());
                let some_summary = (key.may_be_class(StrClass::Numeric) && !self.num.is_bot())
                    || (key.may_be_class(StrClass::Other) && !self.other.is_bot());
                if some_exact || some_summary {
                    r = r.join(AbsBool::TRUE);
                }
                // Some name in the category is always absent.
                r.join(AbsBool::FALSE)
            }
        }
    }

    fn write_slot(&mut self, k: &Name, v: &BValue, strong: bool) {
        if strong {
            self.exact.insert(k.clone(), v.clone());
            self.present.insert(k.clone());
        } else {
            let old = self.slot(k);
            self.exact.insert(k.clone(), old.join(v));
        }
    }

    fn length(&self) -> AbsNum {
        self.slot("length").num
    }

    /// Forgets presence of array elements at or above `from` (all of them when
    /// `from` is unknown); with `strong`, removes them outright.
    fn truncate(&mut self, from: Option<f64>, strong: bool) {
        let doomed: Vec<Name> = self
            .exact
            .keys()
            .filter(|k| array_index(k).is_some_and(|i| from.is_none_or(|n| i as f64 >= n)))
            .cloned()
            .collect();
        for k in doomed {
            self.present.remove(&k);
            if strong {
                self.exact.insert(k, BValue::BOT);
            }
        }
    }

    fn put_const(&mut self, k: &Name, v: &BValue, strong: bool) -> PutFlags {
        if self.class != Class::Array {
            self.write_slot(k, v, strong);
            return PutFlags { may_fail: false, may_succeed: true };
        }
        if &**k == "length" {
            let n = v.to_num();
            let (ok, bad, len) = match n {
                AbsNum::Bot => (false, false, AbsNum::Bot),
                AbsNum::Const(c) if valid_array_length(c) => (true, false, n),
                AbsNum::Const(_) => (false, true, AbsNum::Bot),
                AbsNum::Top => (true, true, AbsNum::Top),
            };
            if ok {
                let strong = strong && !bad;
                self.truncate(len.as_const(), strong);
                self.write_slot(k, &BValue::num(len), strong);
            }
            return PutFlags { may_fail: bad, may_succeed: ok };
        }
        if let Some(i) = array_index(k) {
            let need = i as f64 + 1.0;
            let len = match self.length() {
                AbsNum::Const(l) if l >= need => AbsNum::Const(l),
                AbsNum::Const(_) if strong => AbsNum::Const(need),
                old => old.join(&AbsNum::Const(need)),
            };
            let lk = name("length");
            let old = self.slot("length");
            self.exact.insert(lk, BValue { num: len, ..old });
        }
        self.write_slot(k, v, strong);
        PutFlags { may_fail: false, may_succeed: true }
    }

    /// Writes `v` under `key`. Only constant keys can be updated strongly.
    pub fn put(&mut self, key: &AbsStr, v: &BValue, strong: bool) -> PutFlags {
        let flags = self.put_raw(key, v, strong);
        self.tidy();
        flags
    }

    fn put_raw(&mut self, key: &AbsStr, v: &BValue, strong: bool) -> PutFlags {
        if v.is_bot() {
            return PutFlags::default();
        }
        match key {
            AbsStr::Bot => PutFlags::default(),
            AbsStr::Const(k) => self.put_const(k, v, strong),
            _ => {
                let mut flags = PutFlags { may_fail: false, may_succeed: true };
                let mut names: Vec<Name> = self.exact.keys().filter(|k| key.contains(k)).cloned().collect();
                if key.may_be_class(StrClass::Special) {
                    for s in SPECIAL_NAMES {
                        if classify_str(s) == StrClass::Special && !self.exact.contains_key(s) {
                            names.push(name(s));
                        }
                    }
                }
                for k in names {
                    flags = flags.join(self.put_const(&k, v, false));
                }
                if key.may_be_class(StrClass::Numeric) {
                    self.num.join_in(v);
                    if self.class == Class::Array {
                        let old = self.slot("length");
                        self.exact.insert(name("length"), BValue { num: AbsNum::Top, ..old });
                    }
                }
                if key.may_be_class(StrClass::Other) {
                    self.other.join_in(v);
                }
                flags
            }
        }
    }

    /// Deletes `key`, returning the possible results of the `delete` operator.
    pub fn delete(&mut self, key: &AbsStr, strong: bool) -> AbsBool {
        let r = self.delete_raw(key, strong);
        self.tidy();
        r
    }

    fn delete_raw(&mut self, key: &AbsStr, strong: bool) -> AbsBool {
        match key {
            AbsStr::Bot => AbsBool::BOT,
            AbsStr::Const(k) => {
                if !deletable(self.class, k) {
                    return AbsBool::FALSE;
                }
                self.present.remove(k);
                self.hidden.remove(k);
                if strong {
                    if classify_str(k) == StrClass::Special {
                        self.exact.remove(k);
                    } else {
                        self.exact.insert(k.clone(), BValue::BOT);
                    }
                }
                AbsBool::TRUE
            }
            _ => {
                let mut r = AbsBool::TRUE;
                let names: Vec<Name> = self.exact.keys().filter(|k| key.contains(k)).cloned().collect();
                for k in names {
                    if deletable(self.class, &k) {
                        self.present.remove(&k);
                        self.hidden.remove(&k);
                    } else {
                        r = AbsBool::TOP;
                    }
                }
                r
            }
        }
    }

    /// Names of possibly enumerable own properties.
    pub fn enum_keys(&self) -> AbsStr {
        let mut r = AbsStr::Bot;
        for (k, v) in self.exact.iter() {
            if !v.is_bot() && !self.hidden.contains(k) {
                r = r.join(&AbsStr::Const(k.clone()));
            }
        }
        if !self.num.is_bot() {
            r = r.join(&AbsStr::SNum);
        }
        if !self.other.is_bot() {
            r = r.join(&AbsStr::SNotNumNorSpl);
        }
        r
    }

    /// Drops exact entries that say nothing beyond the summaries, so that
    /// equal objects compare equal.
    fn tidy(&mut self) {
        let redundant: Vec<Name> = self
            .exact
            .iter()
            .filter(|(k, v)| !self.present.contains(*k) && !self.hidden.contains(*k) && **v == self.default_slot(k))
            .map(|(k, _)| k.clone())
            .collect();
        for k in redundant {
            self.exact.remove(&k);
        }
    }

    /// Value a property would have in `self` when it is not an exact key.
    fn default_slot(&self, k: &str) -> BValue {
        match classify_str(k) {
            StrClass::Numeric => self.num.clone(),
            StrClass::Special => BValue::BOT,
            StrClass::Other => self.other.clone(),
        }
    }

    pub fn join(&self, o: &AbsObject) -> Result<AbsObject, ClassMismatch> {
        if self.class != o.class {
            return Err(ClassMismatch(self.class, o.class));
        }
        if self == o {
            return Ok(self.clone());
        }
        let mut exact = self.exact.clone();
        for (k, v) in o.exact.iter() {
            let mine = match self.exact.get(k) {
                Some(x) => x.clone(),
                None => self.default_slot(k),
            };
            exact.insert(k.clone(), mine.join(v));
        }
        for (k, v) in self.exact.iter() {
            if !o.exact.contains_key(k) {
                exact.insert(k.clone(), v.join(&o.default_slot(k)));
            }
        }
        let user = self.user.clone().union_with(o.user.clone(), |a, b| join_env(&a, &b));
        let mut out = AbsObject {
            class: self.class,
            exact,
            num: self.num.join(&o.num),
            other: self.other.join(&o.other),
            present: self.present.intersection(&o.present).cloned().collect(),
            hidden: self.hidden.intersection(&o.hidden).cloned().collect(),
            user,
            natives: self.natives.union(&o.natives).copied().collect(),
            proto: self.proto.join(&o.proto),
            prim: self.prim.join(&o.prim),
            many: self.many || o.many,
        };
        out.tidy();
        Ok(out)
    }

    pub fn leq(&self, o: &AbsObject) -> bool {
        if self == o {
            return true;
        }
        self.class == o.class
            && self.exact.iter().all(|(k, v)| v.leq(&o.slot(k)))
            && o.exact.iter().all(|(k, v)| self.slot(k).leq(v))
            && self.num.leq(&o.num)
            && self.other.leq(&o.other)
            && o.present.is_subset(&self.present)
            && o.hidden.is_subset(&self.hidden)
            && self.user.iter().all(|(m, e)| o.user.get(m).is_some_and(|f| env_leq(e, f)))
            && self.natives.is_subset(&o.natives)
            && self.proto.leq(&o.proto)
            && self.prim.leq(&o.prim)
            && (!self.many || o.many)
    }

    /// Snapshot of the property map, for display and tests.
    pub fn props(&self) -> BTreeMap<Name, BValue> {
        self.exact.iter().map(|(k, v)| (k.clone(), v.clone())).collect()
    }
}
