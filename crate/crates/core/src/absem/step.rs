use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use super::eval::{aeval_checked, aeval_exp};
use super::state::{AFrame, AKont, AState, ATerm, KontAddr, KontStore, RetFrame, ValueSet};
use crate::domains::{join_env, AbsAddr, AbsBool, AbsEnv, AbsObject, AbsStore, AbsStr, AddrSet, BValue};
use crate::ir::{name, Decl, Exp, MRef, MethBody, Name, NodeId, SRef, Stmt, StmtKind, ARGS, SELF};
use crate::model::{
    hidden_props, AddrTag, Builtin, CallEvent, Callee, Class, ErrorKind, Native, Point, Site, TypeSet, ARG_TYPES,
};
use crate::sensitivity::{Context, Sensitivity, Trace};

/// Successors of one abstract state, plus what the client needs to know
/// about the transition.
#[derive(Debug, Default)]
pub struct StepResult {
    pub succs: Vec<(Trace, AState)>,
    /// Runtime errors the transition may raise, by statement.
    pub errors: Vec<(NodeId, ErrorKind)>,
    /// Statements that may call `eval` or the `Function` constructor.
    pub evals: Vec<NodeId>,
    /// Every user call made: site, callee and the event as seen in this state.
    pub calls: Vec<(NodeId, NodeId, CallEvent)>,
}

/// A user call as seen from one partition: caller trace, call site, callee.
pub type CallKey = (Trace, NodeId, NodeId);

/// The events call contexts are computed from, fixed for one worklist run.
pub type CallTable = BTreeMap<CallKey, CallEvent>;

/// Address of a builtin object.
pub fn builtin_addr(b: Builtin) -> AbsAddr {
    let class = match b {
        Builtin::Fn(_) => Class::Function,
        _ => Class::Object,
    };
    AbsAddr {
        site: Site::Builtin(b),
        ctx: Context::root(),
        tag: AddrTag::Obj(class),
    }
}

/// A fresh object of `class` with the given prototype and the class's hidden properties.
pub fn new_object(class: Class, proto: BValue) -> AbsObject {
    let mut o = AbsObject::new(class, proto);
    for k in hidden_props(class) {
        if !o.exact.contains_key(*k) {
            o.set_hidden(k, BValue::undef());
        }
    }
    o
}

fn default_proto(class: Class) -> BValue {
    BValue::addr(builtin_addr(match class {
        Class::Array => Builtin::ArrayProto,
        Class::Function => Builtin::Fn(Native::FunctionProto),
        _ => Builtin::ObjectProto,
    }))
}

fn one(a: AbsAddr) -> AddrSet {
    std::iter::once(a).collect()
}

/// Computes every successor of `state`, which sits in partition `trace`.
/// Call contexts come from the event each call has in `state`.
pub fn next_states(trace: &Trace, state: &AState, strategy: &dyn Sensitivity) -> StepResult {
    next_states_with(trace, state, strategy, None)
}

/// Like [`next_states`], but with a table, call contexts come from the
/// table's event for the call, or from an empty event when it has none.
/// The event seen in `state` is still reported in [`StepResult::calls`].
pub fn next_states_with(
    trace: &Trace,
    state: &AState,
    strategy: &dyn Sensitivity,
    table: Option<&CallTable>,
) -> StepResult {
    let mut s = Stepper {
        trace,
        state,
        strategy,
        table,
        out: StepResult::default(),
    };
    s.step();
    s.out
}

pub(super) struct Stepper<'a> {
    trace: &'a Trace,
    state: &'a AState,
    strategy: &'a dyn Sensitivity,
    table: Option<&'a CallTable>,
    pub(super) out: StepResult,
}

impl Stepper<'_> {
    fn heap_ctx(&self) -> Context {
        self.trace.ctx.prefix(self.strategy.heap_depth())
    }

    fn addr_at(&self, at: NodeId, tag: AddrTag) -> AbsAddr {
        AbsAddr {
            site: Site::Node(at),
            ctx: self.heap_ctx(),
            tag,
        }
    }

    fn error(&mut self, at: NodeId, kind: ErrorKind) {
        self.out.errors.push((at, kind));
    }

    fn emit(&mut self, ctx: &Context, term: ATerm, env: AbsEnv, store: AbsStore, konts: KontStore, kont: Arc<AKont>) {
        let point = match &term {
            ATerm::Decl(d) => Point::Node(d.id),
            ATerm::Stmt(s) => Point::Node(s.id),
            ATerm::Value(v) => {
                if v.is_bot() {
                    return;
                }
                Point::Resume(kont.key())
            }
        };
        let trace = Trace { point, ctx: ctx.clone() };
        self.out.succs.push((trace, AState { term, env, store, konts, kont }));
    }

    /// Successor in the same method activation.
    fn local(&mut self, term: ATerm, store: AbsStore, kont: Arc<AKont>) {
        let ctx = self.trace.ctx.clone();
        let env = self.state.env.clone();
        let konts = self.state.konts.clone();
        self.emit(&ctx, term, env, store, konts, kont);
    }

    fn value(&mut self, v: ValueSet, store: AbsStore, kont: Arc<AKont>) {
        self.local(ATerm::Value(v), store, kont);
    }

    fn stmt(&mut self, s: &Arc<Stmt>, store: AbsStore, kont: Arc<AKont>) {
        self.local(ATerm::Stmt(s.clone()), store, kont);
    }

    fn var_addrs(&self, x: &Name) -> AddrSet {
        self.state
            .env
            .get(x)
            .cloned()
            .unwrap_or_else(|| panic!("unbound variable {x}"))
    }

    fn eval(&self, e: &Exp) -> BValue {
        aeval_exp(e, &self.state.env, &self.state.store)
    }

    /// Assigns `x := v` and completes normally with `v`.
    fn finish(&mut self, x: &Name, v: BValue, mut store: AbsStore) {
        if v.is_bot() {
            return;
        }
        store.write_var(&self.var_addrs(x), &v);
        self.value(ValueSet::normal(v), store, self.state.kont.clone());
    }

    /// Throws a fresh error object allocated at `at`.
    fn throw_error(&mut self, at: NodeId, js_name: &str, mut store: AbsStore) {
        let a = self.addr_at(at, AddrTag::Obj(Class::Error));
        let mut o = new_object(Class::Error, default_proto(Class::Error));
        o.put(&AbsStr::cnst("name"), &BValue::cstr(js_name), true);
        store.alloc_obj(a.clone(), o);
        self.value(ValueSet::throw(BValue::addr(a)), store, self.state.kont.clone());
    }

    fn raise(&mut self, at: NodeId, kind: ErrorKind, store: AbsStore) {
        self.error(at, kind);
        self.throw_error(at, kind.js_name(), store);
    }

    pub(super) fn alloc_plain(&self, store: &mut AbsStore, at: NodeId, class: Class) -> BValue {
        let a = self.addr_at(at, AddrTag::Obj(class));
        store.alloc_obj(a.clone(), new_object(class, default_proto(class)));
        BValue::addr(a)
    }

    /// Positional argument `i`.
    pub(super) fn arg(&self, args: &BValue, i: usize, store: &AbsStore) -> BValue {
        let mut v = store.get(&args.addrs, &AbsStr::cnst(&i.to_string())).0;
        if args.has_prim() {
            v.join_in(&BValue::undef());
        }
        v
    }

    fn step(&mut self) {
        match &self.state.term {
            ATerm::Decl(d) => self.enter_decl(&d.clone()),
            ATerm::Stmt(s) => self.exec(&s.clone()),
            ATerm::Value(v) => self.resume(&v.clone()),
        }
    }

    fn enter_decl(&mut self, d: &Arc<Decl>) {
        let mut env = self.state.env.clone();
        let mut store = self.state.store.clone();
        for (x, _) in &d.bindings {
            let a = self.addr_at(d.id, AddrTag::Var(x.clone()));
            store.alloc_var(a.clone(), BValue::undef());
            env.insert(x.clone(), one(a));
        }
        let mut nullish = false;
        for (x, e) in &d.bindings {
            let (v, flag) = aeval_checked(e, &env, &store);
            nullish |= flag;
            if v.is_bot() {
                return;
            }
            store.write_var(&env[x], &v);
        }
        if nullish {
            self.error(d.id, ErrorKind::TypeErrorPropOnNullUndef);
        }
        let ctx = self.trace.ctx.clone();
        let konts = self.state.konts.clone();
        let kont = self.state.kont.clone();
        self.emit(&ctx, ATerm::Stmt(d.body.clone()), env, store, konts, kont);
    }

    fn check_reads(&mut self, at: NodeId, exps: &[&Exp]) {
        let st = self.state;
        if exps.iter().any(|e| aeval_checked(e, &st.env, &st.store).1) {
            self.error(at, ErrorKind::TypeErrorPropOnNullUndef);
        }
    }

    fn exec(&mut self, s: &Arc<Stmt>) {
        self.check_reads(s.id, &s.exps());
        let state = self.state;
        let store = || state.store.clone();
        let kont = state.kont.clone();
        match &s.kind {
            StmtKind::Seq(ss) => match ss.first() {
                None => self.value(ValueSet::normal(BValue::undef()), store(), kont),
                Some(first) => {
                    let k = AKont::push(&kont, AFrame::Seq { seq: SRef(s.clone()), idx: 1 });
                    self.stmt(first, store(), k);
                }
            },
            StmtKind::If(e, a, b) => {
                let g = self.eval(e).to_bool();
                if g.may_be_true() {
                    self.stmt(a, store(), kont.clone());
                }
                if g.may_be_false() {
                    self.stmt(b, store(), kont);
                }
            }
            StmtKind::While(..) => {
                let k = AKont::push(&kont, AFrame::While(SRef(s.clone())));
                self.value(ValueSet::normal(BValue::undef()), store(), k);
            }
            StmtKind::Assign(x, e) => {
                let v = self.eval(e);
                self.finish(x, v, store());
            }
            StmtKind::SetProp(o, k, v) => {
                let (ov, kv, vv) = (self.eval(o), self.eval(k), self.eval(v));
                if ov.is_bot() || kv.is_bot() || vv.is_bot() {
                    return;
                }
                if ov.may_be_nullish() {
                    self.raise(s.id, ErrorKind::TypeErrorPropOnNullUndef, store());
                }
                if !ov.addrs.is_empty() {
                    let mut st = store();
                    let flags = st.put(&ov.addrs, &kv.to_str(), &vv);
                    if flags.may_fail {
                        self.raise(s.id, ErrorKind::RangeErrorArrayLength, store());
                    }
                    if flags.may_succeed {
                        self.value(ValueSet::normal(vv.clone()), st, kont.clone());
                    }
                }
                if !without_nullish(&ov.prim_part()).is_bot() {
                    self.value(ValueSet::normal(vv), store(), kont);
                }
            }
            StmtKind::Call { target, callee, receiver, args } => {
                let (f, this, a) = (self.eval(callee), self.eval(receiver), self.eval(args));
                if f.is_bot() || this.is_bot() || a.is_bot() {
                    return;
                }
                self.call(s.id, target, &f, &this, &a);
            }
            StmtKind::ToObj(x, e) => {
                let v = self.eval(e);
                if v.may_be_nullish() {
                    self.raise(s.id, ErrorKind::TypeErrorPropOnNullUndef, store());
                }
                let mut st = store();
                let mut r = BValue::addrs(v.addrs.clone());
                let wraps = [
                    (Class::Number, BValue::num(v.num)),
                    (Class::Boolean, BValue::boolean(v.bool)),
                    (Class::String, BValue::str(v.str.clone())),
                ];
                for (class, prim) in wraps {
                    if prim.is_bot() {
                        continue;
                    }
                    let a = self.addr_at(s.id, AddrTag::Obj(class));
                    let mut o = new_object(class, default_proto(class));
                    o.prim = prim;
                    st.alloc_obj(a.clone(), o);
                    r.join_in(&BValue::addr(a));
                }
                self.finish(x, r, st);
            }
            StmtKind::Delete(x, o, k) => {
                let (ov, kv) = (self.eval(o), self.eval(k));
                if ov.is_bot() || kv.is_bot() {
                    return;
                }
                if ov.may_be_nullish() {
                    self.raise(s.id, ErrorKind::TypeErrorPropOnNullUndef, store());
                }
                if !ov.addrs.is_empty() {
                    let mut st = store();
                    let r = st.delete(&ov.addrs, &kv.to_str());
                    self.finish(x, BValue::boolean(r), st);
                }
                if !without_nullish(&ov.prim_part()).is_bot() {
                    self.finish(x, BValue::boolean(AbsBool::TRUE), store());
                }
            }
            StmtKind::NewFun { target, meth, arity } => {
                let fa = self.addr_at(s.id, AddrTag::Obj(Class::Function));
                let pa = self.addr_at(s.id, AddrTag::Obj(Class::Object));
                let mut fo = new_object(Class::Function, default_proto(Class::Function));
                fo.user.insert(MRef(meth.clone()), state.env.clone());
                fo.set_hidden("length", BValue::cnum(*arity));
                fo.set_hidden("prototype", BValue::addr(pa.clone()));
                let mut po = new_object(Class::Object, default_proto(Class::Object));
                po.set_hidden("constructor", BValue::addr(fa.clone()));
                let mut st = store();
                st.alloc_obj(fa.clone(), fo);
                st.alloc_obj(pa, po);
                self.finish(target, BValue::addr(fa), st);
            }
            StmtKind::NewCall { target, ctor, args } => {
                let (f, a) = (self.eval(ctor), self.eval(args));
                if f.is_bot() || a.is_bot() {
                    return;
                }
                self.new_call(s.id, target, &f, &a);
            }
            StmtKind::Throw(e) => {
                let v = self.eval(e);
                self.value(ValueSet::throw(v), store(), kont);
            }
            StmtKind::Try { body, .. } => {
                let k = AKont::push(&kont, AFrame::Try(SRef(s.clone())));
                self.stmt(body, store(), k);
            }
            StmtKind::Label(_, body) => {
                let k = AKont::push(&kont, AFrame::Label(SRef(s.clone())));
                self.stmt(body, store(), k);
            }
            StmtKind::Break(l, e) => {
                let v = self.eval(e);
                self.value(ValueSet::jump(l.clone(), v), store(), kont);
            }
            StmtKind::ForIn { obj, .. } => {
                let v = self.eval(obj);
                if !v.addrs.is_empty() {
                    let keys = state.store.enumerate(&v.addrs);
                    let k = AKont::push(&kont, AFrame::ForIn { stmt: SRef(s.clone()), keys });
                    self.value(ValueSet::normal(BValue::undef()), store(), k);
                }
                if v.has_prim() {
                    self.value(ValueSet::normal(BValue::undef()), store(), kont);
                }
            }
        }
    }

    fn call_event(&self, site: NodeId, callee: Callee, this: &BValue, args: &BValue, store: &AbsStore) -> CallEvent {
        let receivers: BTreeSet<(Site, Class)> = this
            .addrs
            .iter()
            .filter_map(|a| a.class().map(|c| (a.site, c)))
            .collect();
        let mut arg_types = [TypeSet::default(); ARG_TYPES];
        for (i, t) in arg_types.iter_mut().enumerate() {
            *t = self.arg(args, i, store).type_set();
        }
        CallEvent {
            site,
            callee,
            receivers,
            receiver_global: this.addrs.contains(&builtin_addr(Builtin::Global)),
            self_types: this.type_set(),
            arg_types,
        }
    }

    fn call(&mut self, at: NodeId, target: &Name, f: &BValue, this: &BValue, args: &BValue) {
        let store = &self.state.store;
        let mut non_function = f.has_prim();
        for fa in &f.addrs {
            let o = store.obj(fa);
            if o.is_callable().may_be_false() {
                non_function = true;
            }
            for (meth, cenv) in o.user.iter() {
                self.enter(at, target, meth, cenv, this, args, None, store.clone());
            }
            for n in &o.natives {
                self.run_native(at, target, *n, this, args, None, store);
            }
        }
        if non_function {
            self.raise(at, ErrorKind::TypeErrorCallNonFunction, store.clone());
        }
    }

    fn new_call(&mut self, at: NodeId, target: &Name, f: &BValue, args: &BValue) {
        let store = &self.state.store;
        let mut non_function = f.has_prim();
        for fa in &f.addrs {
            let o = store.obj(fa);
            if o.is_callable().may_be_false() {
                non_function = true;
            }
            let p = store.get(&one(fa.clone()), &AbsStr::cnst("prototype")).0;
            let mut proto = BValue::addrs(p.addrs.clone());
            if p.has_prim() {
                proto.join_in(&default_proto(Class::Object));
            }
            let receiver = |this: &Self, class: Class| {
                let r = this.addr_at(at, AddrTag::Obj(class));
                let mut st = store.clone();
                st.alloc_obj(r.clone(), new_object(class, proto.clone()));
                (r, st)
            };
            for (meth, cenv) in o.user.iter() {
                let (r, st) = receiver(self, Class::Object);
                self.enter(at, target, meth, cenv, &BValue::addr(r.clone()), args, Some(one(r)), st);
            }
            for n in &o.natives {
                match n.construct_class() {
                    Some(class) => {
                        let (r, st) = receiver(self, class);
                        self.run_native(at, target, *n, &BValue::addr(r.clone()), args, Some(&one(r)), &st);
                    }
                    None => non_function = true,
                }
            }
        }
        if non_function {
            self.raise(at, ErrorKind::TypeErrorCallNonFunction, store.clone());
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn run_native(
        &mut self,
        at: NodeId,
        target: &Name,
        n: Native,
        this: &BValue,
        args: &BValue,
        ctor: Option<&AddrSet>,
        store: &AbsStore,
    ) {
        for out in self.native(at, n, this, args, ctor, store) {
            if out.range_error {
                self.raise(at, ErrorKind::RangeErrorArrayLength, out.store.clone());
            }
            if out.host_error {
                self.throw_error(at, "RangeError", out.store.clone());
            }
            if !out.ret.is_bot() {
                let v = ctor_result(out.ret, ctor);
                self.finish(target, v, out.store);
            }
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn enter(
        &mut self,
        at: NodeId,
        target: &Name,
        meth: &MRef,
        cenv: &AbsEnv,
        this: &BValue,
        args: &BValue,
        ctor: Option<AddrSet>,
        mut store: AbsStore,
    ) {
        let seen = self.call_event(at, Callee::Method(meth.id()), this, args, &store);
        let ctx = match self.table {
            None => self.strategy.call(&self.trace.ctx, &seen),
            Some(t) => match t.get(&(self.trace.clone(), at, meth.id())) {
                Some(ev) => self.strategy.call(&self.trace.ctx, ev),
                None => self.strategy.call(&self.trace.ctx, &seen.emptied()),
            },
        };
        self.out.calls.push((at, meth.id(), seen));
        let ka = KontAddr { meth: meth.id(), ctx: ctx.clone() };
        let rf = RetFrame {
            target: target.clone(),
            env: self.state.env.clone(),
            ctor,
            next: self.state.kont.clone(),
        };
        let mut konts = self.state.konts.clone();
        let mut frames = konts.get(&ka).cloned().unwrap_or_default();
        let rf = match frames.get(self.trace) {
            Some(old) if **old == rf => old.clone(),
            Some(old) => Arc::new(join_ret(old, &rf)),
            None => Arc::new(rf),
        };
        frames.insert(self.trace.clone(), rf);
        konts.insert(ka.clone(), frames);
        let heap = ctx.prefix(self.strategy.heap_depth());
        let mut env = cenv.clone();
        for (x, v) in [(name(SELF), this), (name(ARGS), args)] {
            let a = AbsAddr {
                site: Site::Node(meth.id()),
                ctx: heap.clone(),
                tag: AddrTag::Var(x.clone()),
            };
            store.alloc_var(a.clone(), v.clone());
            env.insert(x, one(a));
        }
        let term = match &meth.0.body {
            MethBody::Decl(d) => ATerm::Decl(d.clone()),
            MethBody::Stmt(s) => ATerm::Stmt(s.clone()),
        };
        self.emit(&ctx, term, env, store, konts, Arc::new(AKont::Ret(ka)));
    }

    fn resume(&mut self, vs: &ValueSet) {
        let kont = self.state.kont.clone();
        match &*kont {
            AKont::Halt => {}
            AKont::Ret(ka) => self.ret(ka, vs),
            AKont::Push(frame, next) => self.resume_frame(frame, next, vs),
        }
    }

    fn ret(&mut self, ka: &KontAddr, vs: &ValueSet) {
        let state = self.state;
        let Some(frames) = state.konts.get(ka) else { return };
        let mut v = vs.normal.clone();
        for j in vs.jumps.values() {
            v.join_in(j);
        }
        for (caller, rf) in frames.iter() {
            if !vs.exc.is_bot() {
                self.emit(
                    &caller.ctx,
                    ATerm::Value(ValueSet::throw(vs.exc.clone())),
                    rf.env.clone(),
                    state.store.clone(),
                    state.konts.clone(),
                    rf.next.clone(),
                );
            }
            if !v.is_bot() {
                let v = ctor_result(v.clone(), rf.ctor.as_ref());
                let mut store = state.store.clone();
                let target = rf.env.get(&rf.target).unwrap_or_else(|| panic!("unbound {}", rf.target));
                store.write_var(target, &v);
                self.emit(
                    &caller.ctx,
                    ATerm::Value(ValueSet::normal(v)),
                    rf.env.clone(),
                    store,
                    state.konts.clone(),
                    rf.next.clone(),
                );
            }
        }
    }

    fn resume_frame(&mut self, frame: &AFrame, next: &Arc<AKont>, vs: &ValueSet) {
        let state = self.state;
        let store = || state.store.clone();
        let here = state.kont.clone();
        let normal = !vs.normal.is_bot();
        match frame {
            AFrame::Seq { seq, idx } => {
                let StmtKind::Seq(ss) = &seq.0.kind else { unreachable!() };
                match ss.get(*idx) {
                    Some(s) if normal => {
                        let k = AKont::push(next, AFrame::Seq { seq: seq.clone(), idx: idx + 1 });
                        self.stmt(s, store(), k);
                        self.value(vs.abrupt(), store(), next.clone());
                    }
                    _ => self.value(vs.clone(), store(), next.clone()),
                }
            }
            AFrame::While(s) => {
                let mut out = vs.abrupt();
                if normal {
                    let StmtKind::While(guard, body) = &s.0.kind else { unreachable!() };
                    self.check_reads(s.id(), &[guard]);
                    let g = self.eval(guard).to_bool();
                    if g.may_be_true() {
                        self.stmt(body, store(), here.clone());
                    }
                    if g.may_be_false() {
                        out.normal = BValue::undef();
                    }
                }
                self.value(out, store(), next.clone());
            }
            AFrame::ForIn { stmt, keys } => {
                let mut out = vs.abrupt();
                if normal {
                    out.normal = BValue::undef();
                    if !keys.is_bot() {
                        let StmtKind::ForIn { var, body, .. } = &stmt.0.kind else { unreachable!() };
                        let mut st = store();
                        st.write_var(&self.var_addrs(var), &BValue::str(keys.clone()));
                        self.stmt(body, st, here.clone());
                    }
                }
                self.value(out, store(), next.clone());
            }
            AFrame::Label(s) => {
                let StmtKind::Label(l, _) = &s.0.kind else { unreachable!() };
                let mut out = vs.clone();
                if let Some(v) = out.jumps.remove(l) {
                    out.normal.join_in(&v);
                }
                self.value(out, store(), next.clone());
            }
            AFrame::Try(s) => {
                let StmtKind::Try { var, catch, finally, .. } = &s.0.kind else { unreachable!() };
                if !vs.exc.is_bot() {
                    let mut st = store();
                    st.write_var(&self.var_addrs(var), &vs.exc);
                    let k = AKont::push(next, AFrame::Catch(s.clone()));
                    self.stmt(catch, st, k);
                }
                let pending = ValueSet { exc: BValue::BOT, ..vs.clone() };
                if !pending.is_bot() {
                    let k = AKont::push(next, AFrame::Finally { stmt: s.clone(), pending });
                    self.stmt(finally, store(), k);
                }
            }
            AFrame::Catch(s) => {
                let StmtKind::Try { finally, .. } = &s.0.kind else { unreachable!() };
                let k = AKont::push(next, AFrame::Finally { stmt: s.clone(), pending: vs.clone() });
                self.stmt(finally, store(), k);
            }
            AFrame::Finally { pending, .. } => {
                let mut out = vs.abrupt();
                if normal {
                    out = out.join(pending);
                }
                self.value(out, store(), next.clone());
            }
        }
    }
}

fn without_nullish(v: &BValue) -> BValue {
    BValue { null: false, undef: false, ..v.clone() }
}

/// The value a call produces: constructor calls return the receiver unless
/// the body returned an object.
fn ctor_result(v: BValue, ctor: Option<&AddrSet>) -> BValue {
    match ctor {
        Some(r) if v.has_prim() => {
            let mut out = BValue::addrs(v.addrs);
            out.join_in(&BValue::addrs(r.clone()));
            out
        }
        _ => v,
    }
}

fn join_ret(a: &RetFrame, b: &RetFrame) -> RetFrame {
    let ctor = match (&a.ctor, &b.ctor) {
        (Some(x), Some(y)) => Some(x.union(y).cloned().collect()),
        (x, y) => x.clone().or_else(|| y.clone()),
    };
    RetFrame {
        target: a.target.clone(),
        env: join_env(&a.env, &b.env),
        ctor,
        next: AKont::join(&a.next, &b.next).expect("one call site has one continuation shape"),
    }
}
