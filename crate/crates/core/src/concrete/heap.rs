use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use indexmap::IndexMap;

use super::value::{Addr, CValue};
use crate::conv::{array_index, to_uint32};
use crate::ir::{name, Meth, Name, GLOBAL};
use crate::model::{builtin_objects, hidden_props, AddrTag, Builtin, Class, Init, Native, Site};

pub type Env = im::OrdMap<Name, Addr>;

#[derive(Debug, Clone)]
pub enum Code {
    User { env: Env, meth: Arc<Meth> },
    Native(Native),
}

#[derive(Debug, Clone)]
pub struct CObject {
    pub class: Class,
    pub props: IndexMap<Name, CValue>,
    /// Non-enumerable own properties.
    pub hidden: BTreeSet<Name>,
    pub proto: CValue,
    pub code: Option<Code>,
    /// Wrapped primitive of Number/String/Boolean objects.
    pub prim: Option<CValue>,
}

impl CObject {
    pub fn new(class: Class, proto: CValue) -> CObject {
        let mut obj = CObject {
            class,
            props: IndexMap::new(),
            hidden: BTreeSet::new(),
            proto,
            code: None,
            prim: None,
        };
        if class == Class::Array {
            obj.set_hidden("length", CValue::Num(0.0));
        }
        obj
    }

    pub fn set_hidden(&mut self, key: &str, v: CValue) {
        let k = name(key);
        self.props.insert(k.clone(), v);
        self.hidden.insert(k);
    }

    pub fn is_callable(&self) -> bool {
        self.code.is_some()
    }
}

#[derive(Debug, Clone)]
pub enum Cell {
    Val(CValue),
    Obj(CObject),
}

/// Where and in which call frame an address was allocated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AllocInfo {
    pub site: Site,
    pub tag: AddrTag,
    pub frame: u32,
}

/// Outcome of a failed property write.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InvalidLength;

#[derive(Debug, Clone, Default)]
pub struct Store {
    cells: Vec<Cell>,
    info: Vec<AllocInfo>,
    builtins: BTreeMap<Builtin, Addr>,
    /// Every address allocated or written, in order.
    log: Vec<Addr>,
}

impl Store {
    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn alloc(&mut self, cell: Cell, info: AllocInfo) -> Addr {
        let a = Addr(self.cells.len() as u32);
        self.cells.push(cell);
        self.info.push(info);
        self.log.push(a);
        a
    }

    pub fn alloc_obj(&mut self, obj: CObject, site: Site, frame: u32) -> Addr {
        let tag = AddrTag::Obj(obj.class);
        self.alloc(Cell::Obj(obj), AllocInfo { site, tag, frame })
    }

    pub fn alloc_var(&mut self, x: &Name, v: CValue, site: Site, frame: u32) -> Addr {
        let tag = AddrTag::Var(x.clone());
        self.alloc(Cell::Val(v), AllocInfo { site, tag, frame })
    }

    /// Addresses in the order they were allocated or written; may repeat.
    pub fn writes(&self) -> &[Addr] {
        &self.log
    }

    pub fn cell(&self, a: Addr) -> &Cell {
        &self.cells[a.0 as usize]
    }

    pub fn info(&self, a: Addr) -> &AllocInfo {
        &self.info[a.0 as usize]
    }

    pub fn cells(&self) -> impl Iterator<Item = (Addr, &Cell, &AllocInfo)> {
        self.cells
            .iter()
            .zip(&self.info)
            .enumerate()
            .map(|(i, (c, info))| (Addr(i as u32), c, info))
    }

    pub fn builtin(&self, b: Builtin) -> Addr {
        self.builtins[&b]
    }

    pub fn read_var(&self, a: Addr) -> CValue {
        match &self.cells[a.0 as usize] {
            Cell::Val(v) => v.clone(),
            Cell::Obj(_) => panic!("address {a:?} holds an object, not a variable"),
        }
    }

    pub fn write_var(&mut self, a: Addr, v: CValue) {
        self.log.push(a);
        self.cells[a.0 as usize] = Cell::Val(v);
    }

    pub fn obj(&self, a: Addr) -> &CObject {
        match &self.cells[a.0 as usize] {
            Cell::Obj(o) => o,
            Cell::Val(_) => panic!("address {a:?} holds a variable, not an object"),
        }
    }

    pub fn obj_mut(&mut self, a: Addr) -> &mut CObject {
        self.log.push(a);
        match &mut self.cells[a.0 as usize] {
            Cell::Obj(o) => o,
            Cell::Val(_) => panic!("address {a:?} holds a variable, not an object"),
        }
    }

    pub fn is_callable(&self, v: &CValue) -> bool {
        v.as_addr().is_some_and(|a| self.obj(a).is_callable())
    }

    /// Property read through the prototype chain; missing properties are undef.
    pub fn get(&self, a: Addr, key: &str) -> CValue {
        let mut cur = Some(a);
        while let Some(a) = cur {
            let o = self.obj(a);
            if let Some(v) = o.props.get(key) {
                return v.clone();
            }
            cur = o.proto.as_addr();
        }
        CValue::Undef
    }

    pub fn has(&self, a: Addr, key: &str) -> bool {
        let mut cur = Some(a);
        while let Some(a) = cur {
            let o = self.obj(a);
            if o.props.contains_key(key) {
                return true;
            }
            cur = o.proto.as_addr();
        }
        false
    }

    /// Property write with array length coupling.
    pub fn put(&mut self, a: Addr, key: &Name, v: CValue) -> Result<(), InvalidLength> {
        let o = self.obj_mut(a);
        if o.class == Class::Array {
            if &**key == "length" {
                let n = v.to_num();
                if to_uint32(n) as f64 != n {
                    return Err(InvalidLength);
                }
                let doomed: Vec<Name> = o
                    .props
                    .keys()
                    .filter(|k| array_index(k).is_some_and(|i| i as f64 >= n))
                    .cloned()
                    .collect();
                for k in doomed {
                    o.props.shift_remove(&k);
                }
                o.props.insert(key.clone(), CValue::Num(n));
                return Ok(());
            }
            if let Some(i) = array_index(key) {
                let len = o.props.get("length").map_or(0.0, |l| l.to_num());
                if i as f64 >= len {
                    o.props.insert(name("length"), CValue::Num(i as f64 + 1.0));
                }
            }
        }
        o.props.insert(key.clone(), v);
        Ok(())
    }

    /// Property deletion; `length` of arrays and functions and `prototype` of
    /// functions cannot be deleted.
    pub fn delete(&mut self, a: Addr, key: &Name) -> bool {
        let o = self.obj_mut(a);
        if !deletable(o.class, key) {
            return false;
        }
        o.props.shift_remove(key);
        o.hidden.remove(key);
        true
    }

    /// Enumerable property names: own properties in insertion order, then
    /// unshadowed prototype properties.
    pub fn enumerate(&self, a: Addr) -> Vec<Name> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        let mut cur = Some(a);
        while let Some(a) = cur {
            let o = self.obj(a);
            for k in o.props.keys() {
                if seen.insert(k.clone()) && !o.hidden.contains(k) {
                    out.push(k.clone());
                }
            }
            cur = o.proto.as_addr();
        }
        out
    }

    /// `instanceof`: whether `f.prototype` is on `v`'s prototype chain.
    pub fn instance_of(&self, v: &CValue, f: &CValue) -> bool {
        let (Some(v), Some(f)) = (v.as_addr(), f.as_addr()) else {
            return false;
        };
        let Some(p) = self.get(f, "prototype").as_addr() else {
            return false;
        };
        let mut cur = self.obj(v).proto.as_addr();
        while let Some(a) = cur {
            if a == p {
                return true;
            }
            cur = self.obj(a).proto.as_addr();
        }
        false
    }

    /// Allocates the builtin object graph and returns the initial environment.
    pub fn with_builtins() -> (Store, Env) {
        let mut store = Store::default();
        let objs = builtin_objects();
        for b in &objs {
            let mut o = CObject::new(b.class, CValue::Null);
            o.code = b.native.map(Code::Native);
            let a = store.alloc_obj(o, Site::Builtin(b.id), 0);
            store.builtins.insert(b.id, a);
        }
        for b in &objs {
            let addr = store.builtins[&b.id];
            let proto = b.proto.map_or(CValue::Null, |p| CValue::Addr(store.builtins[&p]));
            let props: Vec<(&str, CValue)> = b
                .props
                .iter()
                .map(|(k, init)| {
                    let v = match init {
                        Init::Num(n) => CValue::Num(*n),
                        Init::Undef => CValue::Undef,
                        Init::Obj(o) => CValue::Addr(store.builtins[o]),
                    };
                    (*k, v)
                })
                .collect();
            let o = store.obj_mut(addr);
            o.proto = proto;
            for (k, v) in props {
                o.set_hidden(k, v);
            }
        }
        let g = name(GLOBAL);
        let global = CValue::Addr(store.builtins[&Builtin::Global]);
        let ga = store.alloc_var(&g, global, Site::Builtin(Builtin::Global), 0);
        (store, Env::new().update(g, ga))
    }

    /// A fresh object of `class` whose prototype is the builtin appropriate to it.
    pub fn new_object(&self, class: Class) -> CObject {
        let proto = match class {
            Class::Array => Builtin::ArrayProto,
            Class::Function => Builtin::Fn(Native::FunctionProto),
            _ => Builtin::ObjectProto,
        };
        let mut o = CObject::new(class, CValue::Addr(self.builtin(proto)));
        for k in hidden_props(class) {
            if !o.props.contains_key(*k) {
                o.set_hidden(k, CValue::Undef);
            }
        }
        o
    }
}

pub fn deletable(class: Class, key: &str) -> bool {
    !matches!(
        (class, key),
        (Class::Array | Class::Function, "length") | (Class::Function, "prototype")
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn array(store: &mut Store) -> Addr {
        let o = store.new_object(Class::Array);
        store.alloc_obj(o, Site::Builtin(Builtin::Global), 0)
    }

    #[test]
    fn array_length_coupling() {
        let (mut s, _) = Store::with_builtins();
        let a = array(&mut s);
        s.put(a, &name("3"), CValue::Num(7.0)).unwrap();
        assert_eq!(s.get(a, "length"), CValue::Num(4.0));
        s.put(a, &name("length"), CValue::str("1")).unwrap();
        assert_eq!(s.get(a, "3"), CValue::Undef);
        assert_eq!(s.get(a, "length"), CValue::Num(1.0));
        assert_eq!(s.put(a, &name("length"), CValue::str("3.5")), Err(InvalidLength));
        assert_eq!(s.put(a, &name("length"), CValue::Num(-1.0)), Err(InvalidLength));
        assert!(!s.delete(a, &name("length")));
    }

    #[test]
    fn builtin_lookup_and_enumeration() {
        let (mut s, _) = Store::with_builtins();
        let o = s.new_object(Class::Object);
        let a = s.alloc_obj(o, Site::Builtin(Builtin::Global), 0);
        assert!(s.is_callable(&s.get(a, "toString")));
        assert!(s.enumerate(a).is_empty());
        s.put(a, &name("b"), CValue::Num(1.0)).unwrap();
        s.put(a, &name("a"), CValue::Num(2.0)).unwrap();
        s.put(a, &name("b"), CValue::Num(3.0)).unwrap();
        let keys: Vec<String> = s.enumerate(a).iter().map(|k| k.to_string()).collect();
        assert_eq!(keys, ["b", "a"]);
        assert!(s.delete(a, &name("b")));
        assert_eq!(s.enumerate(a).len(), 1);
    }
}
