use std::collections::BTreeSet;
use std::sync::Arc;

use im::OrdMap;

use super::num::AbsBool;
use super::object::{AbsObject, PutFlags};
use super::string::AbsStr;
use super::value::{AbsAddr, AddrSet, BValue};

/// A variable cell.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarCell {
    pub val: BValue,
    pub many: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct AbsStore {
    pub vars: OrdMap<AbsAddr, VarCell>,
    pub objs: OrdMap<AbsAddr, Arc<AbsObject>>,
}

fn join_maps<V: Clone + PartialEq>(
    a: &OrdMap<AbsAddr, V>,
    b: &OrdMap<AbsAddr, V>,
    join: impl Fn(&V, &V) -> V,
) -> OrdMap<AbsAddr, V> {
    if a.ptr_eq(b) {
        return a.clone();
    }
    let (mut out, other) = if a.len() >= b.len() { (a.clone(), b) } else { (b.clone(), a) };
    for (k, v) in other.iter() {
        match out.get(k) {
            Some(x) if x == v => {}
            Some(x) => {
                let j = join(x, v);
                out.insert(k.clone(), j);
            }
            None => {
                out.insert(k.clone(), v.clone());
            }
        }
    }
    out
}

impl AbsStore {
    pub fn obj(&self, a: &AbsAddr) -> &AbsObject {
        self.objs
            .get(a)
            .unwrap_or_else(|| panic!("no object at {a}"))
    }

    pub fn try_obj(&self, a: &AbsAddr) -> Option<&AbsObject> {
        self.objs.get(a).map(|o| &**o)
    }

    pub fn is_many(&self, a: &AbsAddr) -> bool {
        match self.objs.get(a) {
            Some(o) => o.many,
            None => self.vars.get(a).is_some_and(|c| c.many),
        }
    }

    /// Allocates an object. Allocating at an address already in use joins
    /// the objects and marks the address as standing for many objects.
    pub fn alloc_obj(&mut self, a: AbsAddr, obj: AbsObject) {
        let obj = match self.objs.get(&a) {
            Some(old) => {
                let mut j = old.join(&obj).expect("allocation site keeps its class");
                j.many = true;
                j
            }
            None => obj,
        };
        self.objs.insert(a, Arc::new(obj));
    }

    pub fn alloc_var(&mut self, a: AbsAddr, v: BValue) {
        let cell = match self.vars.get(&a) {
            Some(old) => VarCell {
                val: old.val.join(&v),
                many: true,
            },
            None => VarCell { val: v, many: false },
        };
        self.vars.insert(a, cell);
    }

    pub fn read_var(&self, addrs: &AddrSet) -> BValue {
        let mut v = BValue::BOT;
        for a in addrs {
            if let Some(c) = self.vars.get(a) {
                v.join_in(&c.val);
            }
        }
        v
    }

    pub fn write_var(&mut self, addrs: &AddrSet, v: &BValue) {
        let strong = addrs.len() == 1 && !self.is_many(addrs.first().expect("one address"));
        for a in addrs {
            let Some(cell) = self.vars.get(a) else { continue };
            let val = if strong { v.clone() } else { cell.val.join(v) };
            let many = cell.many;
            self.vars.insert(a.clone(), VarCell { val, many });
        }
    }

    pub fn update_obj(&mut self, a: &AbsAddr, f: impl FnOnce(&mut AbsObject)) {
        if let Some(o) = self.objs.get_mut(a) {
            f(Arc::make_mut(o));
        }
    }

    /// Whether a write through `addrs` with `key` may replace the old value.
    pub fn strong(&self, addrs: &AddrSet, key: &AbsStr) -> bool {
        addrs.len() == 1 && key.as_const().is_some() && !self.is_many(addrs.first().expect("one address"))
    }

    /// Property read through prototype chains. The flag says whether the
    /// property was found.
    pub fn get(&self, addrs: &AddrSet, key: &AbsStr) -> (BValue, AbsBool) {
        let mut out = BValue::BOT;
        let mut found = AbsBool::BOT;
        if key.is_bot() {
            return (out, found);
        }
        let mut visited = BTreeSet::new();
        let mut work: Vec<&AbsAddr> = addrs.iter().collect();
        while let Some(a) = work.pop() {
            if !visited.insert(a) {
                continue;
            }
            let Some(o) = self.try_obj(a) else { continue };
            out.join_in(&o.slots_matching(key));
            let p = match key {
                AbsStr::Const(k) => o.presence(k),
                _ => o.has_own(key),
            };
            if p.may_be_true() {
                found = found.join(AbsBool::TRUE);
            }
            if p.may_be_false() {
                work.extend(o.proto.addrs.iter());
                if o.proto.has_prim() {
                    out.join_in(&BValue::undef());
                    found = found.join(AbsBool::FALSE);
                }
            }
        }
        (out, found)
    }

    pub fn put(&mut self, addrs: &AddrSet, key: &AbsStr, v: &BValue) -> PutFlags {
        let strong = self.strong(addrs, key);
        let mut flags = PutFlags::default();
        for a in addrs {
            self.update_obj(a, |o| flags = flags.join(o.put(key, v, strong)));
        }
        flags
    }

    pub fn delete(&mut self, addrs: &AddrSet, key: &AbsStr) -> AbsBool {
        let strong = self.strong(addrs, key);
        let mut r = AbsBool::BOT;
        for a in addrs {
            self.update_obj(a, |o| r = r.join(o.delete(key, strong)));
        }
        r
    }

    /// Enumerable names over the prototype chains of `addrs`.
    pub fn enumerate(&self, addrs: &AddrSet) -> AbsStr {
        let mut out = AbsStr::Bot;
        let mut visited = BTreeSet::new();
        let mut work: Vec<&AbsAddr> = addrs.iter().collect();
        while let Some(a) = work.pop() {
            if !visited.insert(a) {
                continue;
            }
            let Some(o) = self.try_obj(a) else { continue };
            out = out.join(&o.enum_keys());
            work.extend(o.proto.addrs.iter());
        }
        out
    }

    /// Every object reachable through the prototype chains of `addrs`, including themselves.
    pub fn proto_closure(&self, addrs: &AddrSet) -> AddrSet {
        let mut out = AddrSet::new();
        let mut work: Vec<&AbsAddr> = addrs.iter().collect();
        while let Some(a) = work.pop() {
            if !out.insert(a.clone()) {
                continue;
            }
            if let Some(o) = self.try_obj(a) {
                work.extend(o.proto.addrs.iter());
            }
        }
        out
    }

    pub fn join(&self, o: &AbsStore) -> AbsStore {
        AbsStore {
            vars: join_maps(&self.vars, &o.vars, |a, b| VarCell {
                val: a.val.join(&b.val),
                many: a.many || b.many,
            }),
            objs: join_maps(&self.objs, &o.objs, |a, b| {
                Arc::new(a.join(b).expect("addresses determine the class"))
            }),
        }
    }

    pub fn leq(&self, o: &AbsStore) -> bool {
        let vars = self.vars.ptr_eq(&o.vars)
            || self.vars.iter().all(|(a, c)| {
                o.vars
                    .get(a)
                    .is_some_and(|d| c.val.leq(&d.val) && (!c.many || d.many))
            });
        vars && (self.objs.ptr_eq(&o.objs)
            || self
                .objs
                .iter()
                .all(|(a, x)| o.objs.get(a).is_some_and(|y| Arc::ptr_eq(x, y) || x.leq(y))))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ir::{name, NodeId};
    use crate::model::{AddrTag, Class, Site};
    use crate::sensitivity::Context;

    fn addr(n: u32, c: Class) -> AbsAddr {
        AbsAddr {
            site: Site::Node(NodeId(n)),
            ctx: Context::root(),
            tag: AddrTag::Obj(c),
        }
    }

    fn one(a: &AbsAddr) -> AddrSet {
        std::iter::once(a.clone()).collect()
    }

    #[test]
    fn lookup_walks_the_chain() {
        let mut s = AbsStore::default();
        let p = addr(1, Class::Object);
        let o = addr(2, Class::Object);
        let mut po = AbsObject::new(Class::Object, BValue::null());
        po.put(&AbsStr::cnst("f"), &BValue::cnum(3.0), true);
        s.alloc_obj(p.clone(), po);
        s.alloc_obj(o.clone(), AbsObject::new(Class::Object, BValue::addr(p.clone())));
        assert_eq!(s.get(&one(&o), &AbsStr::cnst("f")), (BValue::cnum(3.0), AbsBool::TRUE));
        let (v, found) = s.get(&one(&o), &AbsStr::cnst("g"));
        assert_eq!((v, found), (BValue::undef(), AbsBool::FALSE));
        let (v, found) = s.get(&one(&o), &AbsStr::Top);
        assert_eq!(v, BValue::cnum(3.0).join(&BValue::undef()));
        assert_eq!(found, AbsBool::TOP);
    }

    #[test]
    fn reallocation_makes_weak() {
        let mut s = AbsStore::default();
        let a = addr(1, Class::Object);
        s.alloc_obj(a.clone(), AbsObject::new(Class::Object, BValue::null()));
        assert!(s.strong(&one(&a), &AbsStr::cnst("x")));
        s.alloc_obj(a.clone(), AbsObject::new(Class::Object, BValue::null()));
        assert!(!s.strong(&one(&a), &AbsStr::cnst("x")));
        let two: AddrSet = [a.clone(), addr(2, Class::Object)].into_iter().collect();
        s.alloc_obj(addr(2, Class::Object), AbsObject::new(Class::Object, BValue::null()));
        s.put(&two, &AbsStr::cnst("x"), &BValue::cnum(1.0));
        assert_eq!(s.obj(&a).presence("x"), AbsBool::TOP);
        let v = AbsAddr { tag: AddrTag::Var(name("v")), ..a };
        s.alloc_var(v.clone(), BValue::undef());
        s.write_var(&one(&v), &BValue::cnum(1.0));
        assert_eq!(s.read_var(&one(&v)), BValue::cnum(1.0));
    }
}
