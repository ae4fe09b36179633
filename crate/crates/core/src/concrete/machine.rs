use std::collections::BTreeSet;
use std::sync::Arc;

use super::heap::{Code, CObject, Env, Store};
use super::value::{prim_binop, prim_unop, Addr, CValue};
use crate::conv::{number_to_string, to_uint32};
use crate::ir::{name, BinOp, Decl, Exp, Meth, MethBody, Name, NodeId, Stmt, StmtKind, UnOp, ARGS, SELF};
use crate::model::{
    to_string_tag, Builtin, CallEvent, Callee, Class, ErrorKind, FrameKey, Native, Point, Site, TypeSet,
    ARG_TYPES, JOIN_LIMIT,
};

/// How a statement completed.
#[derive(Debug, Clone, PartialEq)]
pub enum Completion {
    Normal(CValue),
    Throw(CValue),
    Jump(Name, CValue),
}

#[derive(Debug, Clone)]
pub enum Term {
    Decl(Arc<Decl>),
    Stmt(Arc<Stmt>),
    Value(Completion),
}

#[derive(Debug, Clone)]
pub enum Frame {
    Seq { seq: Arc<Stmt>, idx: usize },
    While(Arc<Stmt>),
    Label(Arc<Stmt>),
    ForIn { stmt: Arc<Stmt>, obj: Addr, keys: Vec<Name>, next: usize },
    Try(Arc<Stmt>),
    Catch(Arc<Stmt>),
    Finally { stmt: Arc<Stmt>, pending: Completion },
    Ret { target: Name, env: Env, ctor: Option<Addr>, meth: NodeId, caller: u32 },
}

impl Frame {
    pub fn key(&self) -> FrameKey {
        match self {
            Frame::Seq { seq, idx } => FrameKey::Seq(seq.id, *idx as u32),
            Frame::While(s) => FrameKey::While(s.id),
            Frame::Label(s) => FrameKey::Label(s.id),
            Frame::ForIn { stmt, .. } => FrameKey::ForIn(stmt.id),
            Frame::Try(s) => FrameKey::Try(s.id),
            Frame::Catch(s) => FrameKey::Catch(s.id),
            Frame::Finally { stmt, .. } => FrameKey::Finally(stmt.id),
            Frame::Ret { meth, .. } => FrameKey::Return(*meth),
        }
    }
}

/// One activation of a user method. Frame 0 is the top level.
#[derive(Debug, Clone)]
pub struct FrameRecord {
    pub parent: u32,
    pub event: Option<CallEvent>,
}

#[derive(Debug, Clone)]
pub struct ConcreteState {
    pub term: Term,
    pub env: Env,
    pub store: Store,
    pub stack: Vec<Frame>,
    /// Activation the current term runs in.
    pub frame: u32,
    pub frames: Vec<FrameRecord>,
    pub output: Vec<String>,
    /// Runtime errors raised so far, by statement.
    pub errors: Vec<(NodeId, ErrorKind)>,
    /// Statements that invoked `eval` or the `Function` constructor.
    pub eval_calls: Vec<NodeId>,
    pub steps: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    Halted(CValue),
    UncaughtException(CValue),
    FuelExhausted(u64),
}

impl ConcreteState {
    pub fn initial(program: &Decl) -> ConcreteState {
        let (store, env) = Store::with_builtins();
        ConcreteState {
            term: Term::Decl(Arc::new(program.clone())),
            env,
            store,
            stack: Vec::new(),
            frame: 0,
            frames: vec![FrameRecord { parent: 0, event: None }],
            output: Vec::new(),
            errors: Vec::new(),
            eval_calls: Vec::new(),
            steps: 0,
        }
    }

    pub fn is_final(&self) -> bool {
        matches!(self.term, Term::Value(_)) && self.stack.is_empty()
    }

    pub fn outcome(&self) -> Option<Outcome> {
        if !self.is_final() {
            return None;
        }
        match &self.term {
            Term::Value(Completion::Throw(v)) => Some(Outcome::UncaughtException(v.clone())),
            Term::Value(Completion::Normal(v) | Completion::Jump(_, v)) => Some(Outcome::Halted(v.clone())),
            _ => None,
        }
    }

    pub fn point(&self) -> Point {
        match &self.term {
            Term::Decl(d) => Point::Node(d.id),
            Term::Stmt(s) => Point::Node(s.id),
            Term::Value(_) => Point::Resume(self.stack.last().map_or(FrameKey::Halt, Frame::key)),
        }
    }

    pub fn global(&self) -> Addr {
        self.store.builtin(Builtin::Global)
    }

    pub fn lookup_var(&self, x: &str) -> Option<CValue> {
        self.env.get(x).map(|a| self.store.read_var(*a))
    }

    fn var_addr(&self, x: &Name) -> Addr {
        *self.env.get(x).unwrap_or_else(|| panic!("unbound variable {x}"))
    }

    fn assign(&mut self, x: &Name, v: CValue) {
        let a = self.var_addr(x);
        self.store.write_var(a, v);
    }

    pub fn eval(&self, e: &Exp) -> CValue {
        eval_exp(e, &self.env, &self.store)
    }

    fn site(&self, id: NodeId) -> Site {
        Site::Node(id)
    }

    fn alloc(&mut self, obj: CObject, at: NodeId) -> Addr {
        let site = self.site(at);
        self.store.alloc_obj(obj, site, self.frame)
    }

    fn raise(&mut self, at: NodeId, kind: ErrorKind) -> Term {
        self.errors.push((at, kind));
        self.throw_error(at, kind.js_name())
    }

    fn throw_error(&mut self, at: NodeId, js_name: &str) -> Term {
        let mut o = self.store.new_object(Class::Error);
        o.props.insert(name("name"), CValue::str(js_name));
        let a = self.alloc(o, at);
        Term::Value(Completion::Throw(CValue::Addr(a)))
    }

    fn finish(&mut self, target: &Name, v: CValue) -> Term {
        self.assign(target, v.clone());
        Term::Value(Completion::Normal(v))
    }

    /// Takes one machine step. Final states are returned unchanged.
    pub fn step(mut self) -> ConcreteState {
        if self.is_final() {
            return self;
        }
        self.steps += 1;
        let term = std::mem::replace(&mut self.term, Term::Value(Completion::Normal(CValue::Undef)));
        self.term = match term {
            Term::Decl(d) => self.enter_decl(&d),
            Term::Stmt(s) => self.exec(&s),
            Term::Value(c) => self.resume(c),
        };
        self
    }

    fn enter_decl(&mut self, d: &Decl) -> Term {
        let site = self.site(d.id);
        for (x, _) in &d.bindings {
            let a = self.store.alloc_var(x, CValue::Undef, site, self.frame);
            self.env.insert(x.clone(), a);
        }
        for (x, e) in &d.bindings {
            if reads_nullish(e, &self.env, &self.store) {
                self.errors.push((d.id, ErrorKind::TypeErrorPropOnNullUndef));
            }
            let v = self.eval(e);
            self.assign(x, v);
        }
        Term::Stmt(d.body.clone())
    }

    fn exec(&mut self, s: &Arc<Stmt>) -> Term {
        if s.exps().into_iter().any(|e| reads_nullish(e, &self.env, &self.store)) {
            self.errors.push((s.id, ErrorKind::TypeErrorPropOnNullUndef));
        }
        match &s.kind {
            StmtKind::Seq(ss) => match ss.first() {
                None => Term::Value(Completion::Normal(CValue::Undef)),
                Some(first) => {
                    self.stack.push(Frame::Seq { seq: s.clone(), idx: 1 });
                    Term::Stmt(first.clone())
                }
            },
            StmtKind::If(e, a, b) => Term::Stmt(if self.eval(e).to_bool() { a.clone() } else { b.clone() }),
            StmtKind::While(..) => {
                self.stack.push(Frame::While(s.clone()));
                Term::Value(Completion::Normal(CValue::Undef))
            }
            StmtKind::Assign(x, e) => {
                let v = self.eval(e);
                self.finish(x, v)
            }
            StmtKind::SetProp(o, k, v) => {
                let (o, k, v) = (self.eval(o), self.eval(k), self.eval(v));
                match o {
                    CValue::Null | CValue::Undef => self.raise(s.id, ErrorKind::TypeErrorPropOnNullUndef),
                    CValue::Addr(a) => match self.store.put(a, &k.to_str(), v.clone()) {
                        Ok(()) => Term::Value(Completion::Normal(v)),
                        Err(_) => self.raise(s.id, ErrorKind::RangeErrorArrayLength),
                    },
                    _ => Term::Value(Completion::Normal(v)),
                }
            }
            StmtKind::Call { target, callee, receiver, args } => {
                let (f, this, a) = (self.eval(callee), self.eval(receiver), self.eval(args));
                self.call(s.id, target, f, this, a, None)
            }
            StmtKind::ToObj(x, e) => {
                let v = self.eval(e);
                let class = match &v {
                    CValue::Addr(_) => return self.finish(x, v),
                    CValue::Null | CValue::Undef => return self.raise(s.id, ErrorKind::TypeErrorPropOnNullUndef),
                    CValue::Num(_) => Class::Number,
                    CValue::Bool(_) => Class::Boolean,
                    CValue::Str(_) => Class::String,
                };
                let mut o = self.store.new_object(class);
                o.prim = Some(v);
                let a = self.alloc(o, s.id);
                self.finish(x, CValue::Addr(a))
            }
            StmtKind::Delete(x, o, k) => {
                let (o, k) = (self.eval(o), self.eval(k));
                match o {
                    CValue::Null | CValue::Undef => self.raise(s.id, ErrorKind::TypeErrorPropOnNullUndef),
                    CValue::Addr(a) => {
                        let r = self.store.delete(a, &k.to_str());
                        self.finish(x, CValue::Bool(r))
                    }
                    _ => self.finish(x, CValue::Bool(true)),
                }
            }
            StmtKind::NewFun { target, meth, arity } => {
                let f = self.new_function(s.id, meth, *arity);
                self.finish(target, CValue::Addr(f))
            }
            StmtKind::NewCall { target, ctor, args } => {
                let (f, a) = (self.eval(ctor), self.eval(args));
                let class = match self.code_of(&f) {
                    Some(Code::User { .. }) => Class::Object,
                    Some(Code::Native(n)) => match n.construct_class() {
                        Some(c) => c,
                        None => return self.raise(s.id, ErrorKind::TypeErrorCallNonFunction),
                    },
                    None => return self.raise(s.id, ErrorKind::TypeErrorCallNonFunction),
                };
                let fa = f.as_addr().expect("callable");
                let proto = match self.store.get(fa, "prototype") {
                    p @ CValue::Addr(_) => p,
                    _ => CValue::Addr(self.store.builtin(Builtin::ObjectProto)),
                };
                let mut o = self.store.new_object(class);
                o.proto = proto;
                let r = self.alloc(o, s.id);
                self.call(s.id, target, f, CValue::Addr(r), a, Some(r))
            }
            StmtKind::Throw(e) => Term::Value(Completion::Throw(self.eval(e))),
            StmtKind::Try { body, .. } => {
                self.stack.push(Frame::Try(s.clone()));
                Term::Stmt(body.clone())
            }
            StmtKind::Label(_, body) => {
                self.stack.push(Frame::Label(s.clone()));
                Term::Stmt(body.clone())
            }
            StmtKind::Break(l, e) => Term::Value(Completion::Jump(l.clone(), self.eval(e))),
            StmtKind::ForIn { obj, .. } => {
                if let CValue::Addr(a) = self.eval(obj) {
                    let keys = self.store.enumerate(a);
                    self.stack.push(Frame::ForIn { stmt: s.clone(), obj: a, keys, next: 0 });
                }
                Term::Value(Completion::Normal(CValue::Undef))
            }
        }
    }

    fn code_of(&self, f: &CValue) -> Option<Code> {
        f.as_addr().and_then(|a| self.store.obj(a).code.clone())
    }

    fn new_function(&mut self, at: NodeId, meth: &Arc<Meth>, arity: f64) -> Addr {
        let mut fo = self.store.new_object(Class::Function);
        fo.code = Some(Code::User { env: self.env.clone(), meth: meth.clone() });
        fo.set_hidden("length", CValue::Num(arity));
        let f = self.alloc(fo, at);
        let mut p = self.store.new_object(Class::Object);
        p.set_hidden("constructor", CValue::Addr(f));
        let p = self.alloc(p, at);
        self.store.obj_mut(f).set_hidden("prototype", CValue::Addr(p));
        f
    }

    /// Positional argument `i`, read from the arguments object.
    fn arg(&self, args: &CValue, i: usize) -> CValue {
        match args {
            CValue::Addr(a) => self.store.get(*a, &number_to_string(i as f64)),
            _ => CValue::Undef,
        }
    }

    pub fn call_event(&self, site: NodeId, callee: Callee, this: &CValue, args: &CValue) -> CallEvent {
        let mut receivers = BTreeSet::new();
        if let CValue::Addr(a) = this {
            let info = self.store.info(*a);
            receivers.insert((info.site, self.store.obj(*a).class));
        }
        let mut arg_types = [TypeSet::default(); ARG_TYPES];
        for (i, t) in arg_types.iter_mut().enumerate() {
            *t = self.arg(args, i).type_set();
        }
        CallEvent {
            site,
            callee,
            receivers,
            receiver_global: this.as_addr() == Some(self.global()),
            self_types: this.type_set(),
            arg_types,
        }
    }

    fn call(&mut self, at: NodeId, target: &Name, f: CValue, this: CValue, args: CValue, ctor: Option<Addr>) -> Term {
        match self.code_of(&f) {
            None => self.raise(at, ErrorKind::TypeErrorCallNonFunction),
            Some(Code::Native(n)) => match self.native(at, n, this, &args, ctor) {
                Ok(v) => {
                    let v = match (ctor, &v) {
                        (Some(r), v) if !matches!(v, CValue::Addr(_)) => CValue::Addr(r),
                        _ => v,
                    };
                    self.finish(target, v)
                }
                Err(Some(kind)) => self.raise(at, kind),
                Err(None) => self.throw_error(at, "RangeError"),
            },
            Some(Code::User { env, meth }) => {
                let event = self.call_event(at, Callee::Method(meth.id), &this, &args);
                let serial = self.frames.len() as u32;
                self.frames.push(FrameRecord { parent: self.frame, event: Some(event) });
                let caller_env = std::mem::replace(&mut self.env, env);
                self.stack.push(Frame::Ret {
                    target: target.clone(),
                    env: caller_env,
                    ctor,
                    meth: meth.id,
                    caller: self.frame,
                });
                self.frame = serial;
                let site = Site::Node(meth.id);
                for (x, v) in [(name(SELF), this), (name(ARGS), args)] {
                    let a = self.store.alloc_var(&x, v, site, serial);
                    self.env.insert(x, a);
                }
                match &meth.body {
                    MethBody::Decl(d) => Term::Decl(d.clone()),
                    MethBody::Stmt(s) => Term::Stmt(s.clone()),
                }
            }
        }
    }

    fn native(
        &mut self,
        at: NodeId,
        n: Native,
        this: CValue,
        args: &CValue,
        ctor: Option<Addr>,
    ) -> Result<CValue, Option<ErrorKind>> {
        let arg0 = self.arg(args, 0);
        let length = |st: &Self, a: Addr| to_uint32(st.store.get(a, "length").to_num()) as f64;
        Ok(match n {
            Native::ObjectCtor => match (ctor, arg0) {
                (Some(_), _) => this,
                (None, v @ CValue::Addr(_)) => v,
                (None, _) => {
                    let o = self.store.new_object(Class::Object);
                    CValue::Addr(self.alloc(o, at))
                }
            },
            Native::ArrayCtor => match ctor {
                Some(_) => this,
                None => {
                    let o = self.store.new_object(Class::Array);
                    CValue::Addr(self.alloc(o, at))
                }
            },
            Native::FunctionCtor | Native::Eval => {
                self.eval_calls.push(at);
                CValue::Undef
            }
            Native::FunctionProto => CValue::Undef,
            Native::ToString => {
                let class = this.as_addr().map(|a| self.store.obj(a).class);
                CValue::str(to_string_tag(class, this.type_set()))
            }
            Native::ValueOf => this,
            Native::HasOwnProperty => match this {
                CValue::Addr(a) => CValue::Bool(self.store.obj(a).props.contains_key(&*arg0.to_str())),
                _ => CValue::Bool(false),
            },
            Native::Push => match this {
                CValue::Addr(a) => {
                    let len = length(self, a);
                    self.store
                        .put(a, &name(&number_to_string(len)), arg0)
                        .map_err(|_| Some(ErrorKind::RangeErrorArrayLength))?;
                    self.store
                        .put(a, &name("length"), CValue::Num(len + 1.0))
                        .map_err(|_| Some(ErrorKind::RangeErrorArrayLength))?;
                    CValue::Num(len + 1.0)
                }
                _ => CValue::Undef,
            },
            Native::Pop => match this {
                CValue::Addr(a) => {
                    let len = length(self, a);
                    if len == 0.0 {
                        self.store.put(a, &name("length"), CValue::Num(0.0)).expect("zero length");
                        CValue::Undef
                    } else {
                        let k = name(&number_to_string(len - 1.0));
                        let v = self.store.get(a, &k);
                        self.store.delete(a, &k);
                        self.store.put(a, &name("length"), CValue::Num(len - 1.0)).expect("valid length");
                        v
                    }
                }
                _ => CValue::Undef,
            },
            Native::Join => match this {
                CValue::Addr(a) => {
                    let sep = match arg0 {
                        CValue::Undef => name(","),
                        v => v.to_str(),
                    };
                    let len = length(self, a);
                    if len > JOIN_LIMIT {
                        // Host limit on string size, like an engine's "invalid string length".
                        return Err(None);
                    }
                    let mut out = String::new();
                    for i in 0..len as usize {
                        if i > 0 {
                            out.push_str(&sep);
                        }
                        let v = self.store.get(a, &number_to_string(i as f64));
                        if !v.is_nullish() {
                            out.push_str(&v.to_str());
                        }
                    }
                    CValue::Str(name(&out))
                }
                _ => CValue::str(""),
            },
            Native::IsNaN => CValue::Bool(arg0.to_num().is_nan()),
            Native::Print => {
                self.output.push(arg0.to_str().to_string());
                CValue::Undef
            }
        })
    }

    /// Delivers a completion to the innermost frame.
    fn resume(&mut self, c: Completion) -> Term {
        let Some(frame) = self.stack.pop() else {
            return Term::Value(c);
        };
        let normal = matches!(c, Completion::Normal(_));
        match frame {
            Frame::Seq { seq, idx } if normal => {
                let StmtKind::Seq(ss) = &seq.kind else { unreachable!() };
                match ss.get(idx) {
                    Some(next) => {
                        let next = next.clone();
                        self.stack.push(Frame::Seq { seq, idx: idx + 1 });
                        Term::Stmt(next)
                    }
                    None => Term::Value(c),
                }
            }
            Frame::While(s) if normal => {
                let StmtKind::While(guard, body) = &s.kind else { unreachable!() };
                if reads_nullish(guard, &self.env, &self.store) {
                    self.errors.push((s.id, ErrorKind::TypeErrorPropOnNullUndef));
                }
                if self.eval(guard).to_bool() {
                    let body = body.clone();
                    self.stack.push(Frame::While(s));
                    Term::Stmt(body)
                } else {
                    Term::Value(Completion::Normal(CValue::Undef))
                }
            }
            Frame::ForIn { stmt, obj, keys, mut next } if normal => {
                let StmtKind::ForIn { var, body, .. } = &stmt.kind else { unreachable!() };
                while next < keys.len() && !self.store.has(obj, &keys[next]) {
                    next += 1;
                }
                if next == keys.len() {
                    return Term::Value(Completion::Normal(CValue::Undef));
                }
                self.assign(var, CValue::Str(keys[next].clone()));
                let body = body.clone();
                self.stack.push(Frame::ForIn { stmt, obj, keys, next: next + 1 });
                Term::Stmt(body)
            }
            Frame::Label(s) => match c {
                Completion::Jump(l, v) if matches!(&s.kind, StmtKind::Label(m, _) if *m == l) => {
                    Term::Value(Completion::Normal(v))
                }
                c => Term::Value(c),
            },
            Frame::Try(s) => {
                let StmtKind::Try { var, catch, finally, .. } = &s.kind else { unreachable!() };
                match c {
                    Completion::Throw(e) => {
                        self.assign(var, e);
                        let catch = catch.clone();
                        self.stack.push(Frame::Catch(s));
                        Term::Stmt(catch)
                    }
                    pending => {
                        let finally = finally.clone();
                        self.stack.push(Frame::Finally { stmt: s, pending });
                        Term::Stmt(finally)
                    }
                }
            }
            Frame::Catch(s) => {
                let StmtKind::Try { finally, .. } = &s.kind else { unreachable!() };
                let finally = finally.clone();
                self.stack.push(Frame::Finally { stmt: s, pending: c });
                Term::Stmt(finally)
            }
            Frame::Finally { pending, .. } => Term::Value(if normal { pending } else { c }),
            Frame::Ret { target, env, ctor, caller, .. } => {
                self.env = env;
                self.frame = caller;
                match c {
                    Completion::Throw(e) => Term::Value(Completion::Throw(e)),
                    Completion::Normal(v) | Completion::Jump(_, v) => {
                        let v = match (ctor, v) {
                            (Some(r), v) if !matches!(v, CValue::Addr(_)) => CValue::Addr(r),
                            (_, v) => v,
                        };
                        self.finish(&target, v)
                    }
                }
            }
            // Abrupt completions unwind through loops and sequences.
            Frame::Seq { .. } | Frame::While(_) | Frame::ForIn { .. } => Term::Value(c),
        }
    }
}

/// Big-step evaluation of a pure expression. Never allocates or throws.
pub fn eval_exp(e: &Exp, env: &Env, store: &Store) -> CValue {
    match e {
        Exp::Num(n) => CValue::Num(*n),
        Exp::Bool(b) => CValue::Bool(*b),
        Exp::Str(s) => CValue::Str(s.clone()),
        Exp::Undef | Exp::Meth(_) => CValue::Undef,
        Exp::Null => CValue::Null,
        Exp::Var(x) => env.get(x).map_or(CValue::Undef, |a| store.read_var(*a)),
        Exp::Bin(op, l, r) => {
            let (a, b) = (eval_exp(l, env, store), eval_exp(r, env, store));
            match op {
                BinOp::Dot => match a {
                    CValue::Addr(o) => store.get(o, &b.to_str()),
                    _ => CValue::Undef,
                },
                BinOp::In => match b {
                    CValue::Addr(o) => CValue::Bool(store.has(o, &a.to_str())),
                    _ => CValue::Bool(false),
                },
                BinOp::InstanceOf => CValue::Bool(store.instance_of(&a, &b)),
                op => prim_binop(*op, &a, &b),
            }
        }
        Exp::Un(op, x) => {
            let v = eval_exp(x, env, store);
            let callable = *op == UnOp::TypeOf && store.is_callable(&v);
            prim_unop(*op, &v, callable)
        }
    }
}

/// Whether evaluating `e` reads a property of null or undefined.
pub fn reads_nullish(e: &Exp, env: &Env, store: &Store) -> bool {
    match e {
        Exp::Bin(op, l, r) => {
            (*op == BinOp::Dot && eval_exp(l, env, store).is_nullish())
                || reads_nullish(l, env, store)
                || reads_nullish(r, env, store)
        }
        Exp::Un(_, x) => reads_nullish(x, env, store),
        _ => false,
    }
}

/// Result of a complete concrete run.
#[derive(Debug, Clone)]
pub struct Run {
    pub outcome: Outcome,
    pub state: ConcreteState,
}

/// Runs `program` for at most `fuel` steps.
pub fn run(program: &Decl, fuel: u64) -> Run {
    run_with(program, fuel, &mut |_| {})
}

/// Like [`run`], calling `visit` on every state reached, including the first and last.
pub fn run_with(program: &Decl, fuel: u64, visit: &mut dyn FnMut(&ConcreteState)) -> Run {
    let mut state = ConcreteState::initial(program);
    loop {
        visit(&state);
        if let Some(outcome) = state.outcome() {
            return Run { outcome, state };
        }
        if state.steps >= fuel {
            return Run { outcome: Outcome::FuelExhausted(state.steps), state };
        }
        state = state.step();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ir::parse_program;

    fn go(text: &str) -> Run {
        run(&parse_program(text).unwrap(), 10_000)
    }

    #[test]
    fn increments() {
        let r = go("(decl ((x 0)) (:= x (+ x 1)))");
        assert_eq!(r.outcome, Outcome::Halted(CValue::Num(1.0)));
        assert_eq!(r.state.lookup_var("x"), Some(CValue::Num(1.0)));
    }

    #[test]
    fn uncaught_throw_and_fuel() {
        assert_eq!(go("(decl () (throw 7))").outcome, Outcome::UncaughtException(CValue::Num(7.0)));
        let r = run(&parse_program("(decl () (while true (seq)))").unwrap(), 100);
        assert_eq!(r.outcome, Outcome::FuelExhausted(100));
    }

    #[test]
    fn seq_pushes_frame() {
        let d = parse_program("(decl ((x 0)) (seq (:= x 1) (:= x 2)))").unwrap();
        let s = ConcreteState::initial(&d).step().step();
        assert!(matches!(&s.term, Term::Stmt(st) if matches!(st.kind, StmtKind::Assign(..))));
        assert!(matches!(s.stack.last(), Some(Frame::Seq { idx: 1, .. })));
    }

    #[test]
    fn calling_a_number_throws_type_error() {
        let r = go("(decl ((x 5) (y undef)) (call y x undef undef))");
        let Outcome::UncaughtException(CValue::Addr(a)) = r.outcome else { panic!("{:?}", r.outcome) };
        assert_eq!(r.state.store.get(a, "name"), CValue::str("TypeError"));
        assert_eq!(r.state.errors, vec![(NodeId(1), ErrorKind::TypeErrorCallNonFunction)]);
    }

    #[test]
    fn finally_resumes_pending_break() {
        let r = go(
            "(decl ((x 0) (e undef))
               (seq (label L (seq (try (break L 1) e (:= x 10) (:= x (+ x 5))) (:= x 100)))
                    (:= x (+ x 1))))",
        );
        assert_eq!(r.state.lookup_var("x"), Some(CValue::Num(6.0)));
    }

    #[test]
    fn catch_then_finally() {
        let r = go(
            "(decl ((x 0) (e undef))
               (seq (try (throw 3) e (:= x e) (:= x (* x 2))) (:= x x)))",
        );
        assert_eq!(r.state.lookup_var("x"), Some(CValue::Num(6.0)));
        assert_eq!(r.outcome, Outcome::Halted(CValue::Num(6.0)));
    }

    #[test]
    fn method_call_returns_body_completion() {
        let r = go(
            "(decl ((f undef) (a undef) (r undef))
               (seq (newfun f (fun (self args) (label ret (break ret (+ (. args \"0\") 1)))) 1)
                    (newcall a (. global \"Array\") undef)
                    (.:= a \"0\" 41)
                    (call r f global a)))",
        );
        assert_eq!(r.state.lookup_var("r"), Some(CValue::Num(42.0)));
    }

    #[test]
    fn constructor_result_is_receiver() {
        let r = go(
            "(decl ((F undef) (o undef) (v undef))
               (seq (newfun F (fun (self args) (.:= self \"p\" 3)) 0)
                    (.:= (. F \"prototype\") \"q\" 4)
                    (newcall o F undef)
                    (:= v (+ (. o \"p\") (. o \"q\")))))",
        );
        assert_eq!(r.state.lookup_var("v"), Some(CValue::Num(7.0)));
    }

    #[test]
    fn for_in_visits_own_then_proto_keys() {
        let r = go(
            "(decl ((o undef) (k undef) (acc \"\"))
               (seq (newcall o (. global \"Object\") undef)
                    (.:= o \"b\" 1) (.:= o \"a\" 2)
                    (forin k o (:= acc (++ acc k)))))",
        );
        assert_eq!(r.state.lookup_var("acc"), Some(CValue::str("ba")));
    }

    #[test]
    fn array_length_range_error_and_print() {
        let r = go(
            "(decl ((a undef) (p undef) (e undef) (n undef))
               (seq (newcall a (. global \"Array\") undef)
                    (try (.:= a \"length\" \"3.5\") e (call p (. global \"print\") global e) (seq))
                    (newcall n (. global \"Array\") undef) (.:= n \"0\" \"hi\")
                    (call p (. global \"print\") global n)))",
        );
        assert_eq!(r.state.errors.len(), 1);
        assert_eq!(r.state.errors[0].1, ErrorKind::RangeErrorArrayLength);
        assert_eq!(r.state.output, vec!["undefined".to_string(), "hi".into()]);
    }

    #[test]
    fn natives() {
        let r = go(
            "(decl ((a undef) (t undef) (s undef) (h undef) (args undef))
               (seq (newcall a (. global \"Array\") undef)
                    (newcall args (. global \"Array\") undef) (.:= args \"0\" 5)
                    (call t (. a \"push\") a args)
                    (call t (. a \"push\") a args)
                    (.:= args \"0\" \"-\")
                    (call s (. a \"join\") a args)
                    (.:= args \"0\" \"1\")
                    (call h (. a \"hasOwnProperty\") a args)
                    (call t (. a \"pop\") a undef)))",
        );
        assert_eq!(r.state.lookup_var("s"), Some(CValue::str("5-5")));
        assert_eq!(r.state.lookup_var("h"), Some(CValue::Bool(true)));
        assert_eq!(r.state.lookup_var("t"), Some(CValue::Num(5.0)));
        let CValue::Addr(a) = r.state.lookup_var("a").unwrap() else { panic!() };
        assert_eq!(r.state.store.get(a, "length"), CValue::Num(1.0));
    }

    #[test]
    fn step_is_deterministic() {
        let d = parse_program("(decl ((x 0)) (while (< x 3) (:= x (+ x 1))))").unwrap();
        let mut a = ConcreteState::initial(&d);
        let mut b = ConcreteState::initial(&d);
        for _ in 0..12 {
            a = a.step();
            b = b.step();
            assert_eq!(a.point(), b.point());
        }
        assert_eq!(a.lookup_var("x"), Some(CValue::Num(3.0)));
    }
}
