//! Heap vocabulary shared by the concrete and abstract machines: object
//! classes, allocation sites and the builtin object graph.

use std::fmt;

use serde::Serialize;

use crate::ir::{Name, NodeId};

/// ECMA object class. Fixed for an object's lifetime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Class {
    Object,
    Function,
    Array,
    String,
    Boolean,
    Number,
    Date,
    Error,
    RegExp,
    Arguments,
}

/// Builtin functions implemented natively by both machines.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Native {
    ObjectCtor,
    ArrayCtor,
    FunctionCtor,
    FunctionProto,
    ToString,
    ValueOf,
    HasOwnProperty,
    Push,
    Pop,
    Join,
    IsNaN,
    Eval,
    Print,
}

impl Native {
    pub const ALL: [Native; 13] = [
        Native::ObjectCtor,
        Native::ArrayCtor,
        Native::FunctionCtor,
        Native::FunctionProto,
        Native::ToString,
        Native::ValueOf,
        Native::HasOwnProperty,
        Native::Push,
        Native::Pop,
        Native::Join,
        Native::IsNaN,
        Native::Eval,
        Native::Print,
    ];

    pub fn arity(self) -> f64 {
        match self {
            Native::FunctionProto | Native::ToString | Native::ValueOf | Native::Pop => 0.0,
            _ => 1.0,
        }
    }

    /// Constructors usable with `newcall`, and the class of object they build.
    pub fn construct_class(self) -> Option<Class> {
        match self {
            Native::ObjectCtor | Native::FunctionCtor => Some(Class::Object),
            Native::ArrayCtor => Some(Class::Array),
            _ => None,
        }
    }

    /// Natives that execute dynamically supplied code.
    pub fn is_eval_like(self) -> bool {
        matches!(self, Native::Eval | Native::FunctionCtor)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Builtin {
    Global,
    ObjectProto,
    ArrayProto,
    Fn(Native),
}

/// Static allocation site: a program node or a builtin created before the program runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Site {
    Builtin(Builtin),
    Node(NodeId),
}

impl fmt::Display for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Site::Builtin(b) => write!(f, "{b:?}"),
            Site::Node(n) => write!(f, "n{n}"),
        }
    }
}

/// What an address holds: an object of a class, or a variable's value.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AddrTag {
    Obj(Class),
    Var(Name),
}

/// Initial property values of builtin objects.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Init {
    Num(f64),
    Undef,
    Obj(Builtin),
}

pub struct BuiltinObject {
    pub id: Builtin,
    pub class: Class,
    pub proto: Option<Builtin>,
    pub native: Option<Native>,
    pub props: Vec<(&'static str, Init)>,
}

/// The builtin object graph installed before a program starts. All of these
/// properties are non-enumerable.
pub fn builtin_objects() -> Vec<BuiltinObject> {
    use Builtin as B;
    use Native as N;
    let mut objs = vec![
        BuiltinObject {
            id: B::Global,
            class: Class::Object,
            proto: Some(B::ObjectProto),
            native: None,
            props: vec![
                ("undefined", Init::Undef),
                ("NaN", Init::Num(f64::NAN)),
                ("Infinity", Init::Num(f64::INFINITY)),
                ("isNaN", Init::Obj(B::Fn(N::IsNaN))),
                ("eval", Init::Obj(B::Fn(N::Eval))),
                ("print", Init::Obj(B::Fn(N::Print))),
                ("Object", Init::Obj(B::Fn(N::ObjectCtor))),
                ("Array", Init::Obj(B::Fn(N::ArrayCtor))),
                ("Function", Init::Obj(B::Fn(N::FunctionCtor))),
            ],
        },
        BuiltinObject {
            id: B::ObjectProto,
            class: Class::Object,
            proto: None,
            native: None,
            props: vec![
                ("toString", Init::Obj(B::Fn(N::ToString))),
                ("valueOf", Init::Obj(B::Fn(N::ValueOf))),
                ("hasOwnProperty", Init::Obj(B::Fn(N::HasOwnProperty))),
                ("constructor", Init::Obj(B::Fn(N::ObjectCtor))),
            ],
        },
        BuiltinObject {
            id: B::ArrayProto,
            class: Class::Object,
            proto: Some(B::ObjectProto),
            native: None,
            props: vec![
                ("push", Init::Obj(B::Fn(N::Push))),
                ("pop", Init::Obj(B::Fn(N::Pop))),
                ("join", Init::Obj(B::Fn(N::Join))),
                ("constructor", Init::Obj(B::Fn(N::ArrayCtor))),
            ],
        },
    ];
    for native in Native::ALL {
        let proto = if native == N::FunctionProto {
            B::ObjectProto
        } else {
            B::Fn(N::FunctionProto)
        };
        let mut props = vec![("length", Init::Num(native.arity()))];
        match native {
            N::ObjectCtor => props.push(("prototype", Init::Obj(B::ObjectProto))),
            N::ArrayCtor => props.push(("prototype", Init::Obj(B::ArrayProto))),
            N::FunctionCtor => props.push(("prototype", Init::Obj(B::Fn(N::FunctionProto)))),
            N::FunctionProto => props.push(("constructor", Init::Obj(B::Fn(N::FunctionCtor)))),
            _ => {}
        }
        objs.push(BuiltinObject {
            id: B::Fn(native),
            class: Class::Function,
            proto: Some(proto),
            native: Some(native),
            props,
        });
    }
    objs
}

/// Property names of the builtin model. Strings in this set that are not
/// canonical numeric strings form the "special" string category.
pub const SPECIAL_NAMES: [&str; 18] = [
    "valueOf",
    "toString",
    "hasOwnProperty",
    "constructor",
    "prototype",
    "length",
    "push",
    "pop",
    "join",
    "isNaN",
    "eval",
    "Object",
    "Array",
    "Function",
    "NaN",
    "Infinity",
    "undefined",
    "print",
];

/// Non-enumerable own properties given to objects created by the program.
pub fn hidden_props(class: Class) -> &'static [&'static str] {
    match class {
        Class::Array => &["length"],
        Class::Function => &["length", "prototype"],
        _ => &[],
    }
}

/// The `constructor` back-pointer on a function's fresh prototype object is non-enumerable.
pub const PROTO_OBJECT_HIDDEN: &[&str] = &["constructor"];

/// Array-length values must be unsigned 32-bit integers.
pub fn valid_array_length(n: f64) -> bool {
    n >= 0.0 && n <= u32::MAX as f64 && n.fract() == 0.0
}

/// Set of primitive type tags a value may have, as a bitmask.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize)]
pub struct TypeSet(pub u8);

impl TypeSet {
    pub const NUM: TypeSet = TypeSet(1);
    pub const BOOL: TypeSet = TypeSet(2);
    pub const STR: TypeSet = TypeSet(4);
    pub const OBJ: TypeSet = TypeSet(8);
    pub const NULL: TypeSet = TypeSet(16);
    pub const UNDEF: TypeSet = TypeSet(32);

    pub fn union(self, other: TypeSet) -> TypeSet {
        TypeSet(self.0 | other.0)
    }

    pub fn contains(self, other: TypeSet) -> bool {
        self.0 & other.0 == other.0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }
}

/// What is being invoked by a call.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Callee {
    Method(NodeId),
    Native(Native),
}

/// Number of positional argument type-sets recorded per call.
pub const ARG_TYPES: usize = 4;

/// Information about a call that context-sensitivity strategies may inspect.
/// Both machines produce it: the abstract one from base values, the
/// concrete one from actual values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CallEvent {
    pub site: NodeId,
    pub callee: Callee,
    /// Allocation site and class of every object the receiver may be.
    pub receivers: std::collections::BTreeSet<(Site, Class)>,
    /// Whether the receiver may be the global object.
    pub receiver_global: bool,
    pub self_types: TypeSet,
    pub arg_types: [TypeSet; ARG_TYPES],
}

impl CallEvent {
    /// The same call with nothing known about receiver or arguments.
    pub fn emptied(&self) -> CallEvent {
        CallEvent {
            site: self.site,
            callee: self.callee,
            receivers: Default::default(),
            receiver_global: false,
            self_types: TypeSet::default(),
            arg_types: [TypeSet::default(); ARG_TYPES],
        }
    }

    /// Widens `self` to also describe `other`, a call of the same callee at the same site.
    pub fn absorb(&mut self, other: &CallEvent) {
        self.receivers.extend(other.receivers.iter().cloned());
        self.receiver_global |= other.receiver_global;
        self.self_types = self.self_types.union(other.self_types);
        for (t, o) in self.arg_types.iter_mut().zip(other.arg_types) {
            *t = t.union(o);
        }
    }
}

/// Identity of the continuation frame a completed statement returns into.
/// Within one method body this is determined by the program text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum FrameKey {
    Seq(NodeId, u32),
    While(NodeId),
    Label(NodeId),
    ForIn(NodeId),
    Try(NodeId),
    Catch(NodeId),
    Finally(NodeId),
    /// Completion of a method body, returning to the caller.
    Return(NodeId),
    Halt,
}

/// Program point of a machine state: the statement or declaration about to
/// run, or the frame a completion value is delivered to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Point {
    Node(NodeId),
    Resume(FrameKey),
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Node(n) => write!(f, "n{n}"),
            Point::Resume(k) => write!(f, "{k:?}"),
        }
    }
}

/// Runtime errors tracked by the error client.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum ErrorKind {
    TypeErrorCallNonFunction,
    TypeErrorPropOnNullUndef,
    RangeErrorArrayLength,
}

impl ErrorKind {
    pub const ALL: [ErrorKind; 3] = [
        ErrorKind::TypeErrorCallNonFunction,
        ErrorKind::TypeErrorPropOnNullUndef,
        ErrorKind::RangeErrorArrayLength,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ErrorKind::TypeErrorCallNonFunction => "TypeErrorCallNonFunction",
            ErrorKind::TypeErrorPropOnNullUndef => "TypeErrorPropOnNullUndef",
            ErrorKind::RangeErrorArrayLength => "RangeErrorArrayLength",
        }
    }

    /// The `name` property of the error object thrown.
    pub fn js_name(self) -> &'static str {
        match self {
            ErrorKind::RangeErrorArrayLength => "RangeError",
            _ => "TypeError",
        }
    }
}

/// Longest array `join` the machines will build before throwing a RangeError.
pub const JOIN_LIMIT: f64 = 10_000.0;

/// `Object.prototype.toString` tag for a value of the given type.
pub fn to_string_tag(class: Option<Class>, ty: TypeSet) -> &'static str {
    if let Some(c) = class {
        return match c {
            Class::Object => "[object Object]",
            Class::Function => "[object Function]",
            Class::Array => "[object Array]",
            Class::String => "[object String]",
            Class::Boolean => "[object Boolean]",
            Class::Number => "[object Number]",
            Class::Date => "[object Date]",
            Class::Error => "[object Error]",
            Class::RegExp => "[object RegExp]",
            Class::Arguments => "[object Arguments]",
        };
    }
    match ty {
        TypeSet::NUM => "[object Number]",
        TypeSet::BOOL => "[object Boolean]",
        TypeSet::STR => "[object String]",
        TypeSet::NULL => "[object Null]",
        _ => "[object Undefined]",
    }
}
