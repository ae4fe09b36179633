use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use crate::absem::{AFrame, AKont, AState, ATerm, ValueSet};
use crate::concrete::{run_with, Addr, CObject, CValue, Cell, Code, Completion, ConcreteState, Env, Frame, Outcome, Term};
use crate::domains::{alpha, AbsAddr, AbsEnv, AbsObject, AbsStore, BValue};
use crate::ir::{Decl, Meth, MethBody, Stmt, StmtKind};
use crate::model::{AddrTag, Class, Point};
use crate::sensitivity::{Context, Sensitivity, Trace};

use super::{analyze, AnalysisResult, EngineError, Limits};

/// The first concrete state not covered by the analysis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    /// Concrete step at which it was found.
    pub step: u64,
    pub point: Point,
    pub context: String,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "step {} at {}{}: {}", self.step, self.point, self.context, self.detail)
    }
}

#[derive(Debug, Clone)]
pub struct SoundnessReport {
    pub outcome: Outcome,
    pub states_checked: u64,
    pub partitions: usize,
    pub violation: Option<Violation>,
}

impl SoundnessReport {
    pub fn violations(&self) -> usize {
        usize::from(self.violation.is_some())
    }
}

/// Analyzes `program`, runs it concretely for at most `fuel` steps and
/// checks that every concrete state is abstracted by a partition entry
/// whose context covers the state's concrete context.
pub fn soundness_check(
    program: &Arc<Decl>,
    strategy: &dyn Sensitivity,
    fuel: u64,
    limits: Limits,
) -> Result<SoundnessReport, EngineError> {
    let result = analyze(program, strategy, limits)?;
    Ok(check_result(program, strategy, &result, fuel))
}

/// The concrete half of [`soundness_check`], against a given analysis result.
pub fn check_result(program: &Decl, strategy: &dyn Sensitivity, result: &AnalysisResult, fuel: u64) -> SoundnessReport {
    let mut by_point: HashMap<Point, Vec<(&Trace, &AState)>> = HashMap::new();
    for (t, s) in &result.partition {
        by_point.entry(t.point).or_default().push((t, s));
    }
    let mut checker = Checker {
        strategy,
        h: strategy.heap_depth(),
        by_point,
        ctxs: Vec::new(),
        checked_upto: HashMap::new(),
        owners: HashMap::new(),
    };
    let mut violation = None;
    let mut states = 0;
    let run = run_with(program, fuel, &mut |s| {
        if violation.is_none() {
            states += 1;
            violation = checker.visit(s);
        }
    });
    SoundnessReport {
        outcome: run.outcome,
        states_checked: states,
        partitions: result.partition.len(),
        violation,
    }
}

struct Checker<'a> {
    strategy: &'a dyn Sensitivity,
    h: usize,
    by_point: HashMap<Point, Vec<(&'a Trace, &'a AState)>>,
    /// Context of each concrete activation.
    ctxs: Vec<Context>,
    /// Per partition entry: length of the concrete write log already checked against it.
    checked_upto: HashMap<&'a Trace, usize>,
    /// Per partition entry: the concrete cell each single abstract address stands for.
    owners: HashMap<&'a Trace, BTreeMap<AbsAddr, Addr>>,
}

type Check = Result<(), String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Check {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

impl<'a> Checker<'a> {
    fn visit(&mut self, s: &ConcreteState) -> Option<Violation> {
        while self.ctxs.len() < s.frames.len() {
            let rec = &s.frames[self.ctxs.len()];
            let ctx = match &rec.event {
                None => Context::root(),
                Some(ev) => self.strategy.call(&self.ctxs[rec.parent as usize], ev),
            };
            self.ctxs.push(ctx);
        }
        let ctx = self.ctxs[s.frame as usize].clone();
        let point = s.point();
        let fail = |detail: String| Violation {
            step: s.steps,
            point,
            context: ctx.to_string(),
            detail,
        };
        let mut candidates: Vec<(&'a Trace, &'a AState)> = self
            .by_point
            .get(&point)
            .map(|v| v.iter().filter(|(t, _)| t.ctx.covers(&ctx)).copied().collect())
            .unwrap_or_default();
        candidates.sort_by_key(|(t, _)| t.ctx != ctx);
        let mut first_err = None;
        for (trace, abs) in candidates {
            let r = self.check_local(s, abs).and_then(|()| self.check_store(s, trace, abs));
            match r {
                Ok(()) => return None,
                Err(e) => {
                    first_err.get_or_insert(e);
                }
            }
        }
        Some(fail(first_err.unwrap_or_else(|| "no partition entry covers this state".into())))
    }

    fn canon(&self, a: Addr, s: &ConcreteState) -> Context {
        self.ctxs[s.store.info(a).frame as usize].prefix(self.h)
    }

    fn addr_covers(&self, x: &AbsAddr, a: Addr, s: &ConcreteState) -> bool {
        let info = s.store.info(a);
        x.site == info.site && x.tag == info.tag && x.ctx.covers(&self.canon(a, s))
    }

    fn covered(&self, v: &CValue, b: &BValue, s: &ConcreteState) -> bool {
        match v {
            CValue::Addr(a) => b.addrs.iter().any(|x| self.addr_covers(x, *a, s)),
            _ => alpha(v, &|_| unreachable!("primitive")).leq(b),
        }
    }

    fn completion_covered(&self, c: &Completion, vs: &ValueSet, s: &ConcreteState) -> bool {
        match c {
            Completion::Normal(v) => self.covered(v, &vs.normal, s),
            Completion::Throw(v) => self.covered(v, &vs.exc, s),
            Completion::Jump(l, v) => vs.jumps.get(l).is_some_and(|b| self.covered(v, b, s)),
        }
    }

    fn env_covered(&self, env: &Env, abs: &AbsEnv, s: &ConcreteState) -> Check {
        for (x, a) in env.iter() {
            let ok = abs.get(x).is_some_and(|set| set.iter().any(|y| self.addr_covers(y, *a, s)));
            ensure(ok, || format!("variable {x} is not bound to a covering address"))?;
        }
        Ok(())
    }

    fn check_local(&self, s: &ConcreteState, abs: &AState) -> Check {
        match (&s.term, &abs.term) {
            (Term::Decl(d), ATerm::Decl(e)) => ensure(d.id == e.id, || "different declaration".into())?,
            (Term::Stmt(x), ATerm::Stmt(y)) => ensure(x.id == y.id, || "different statement".into())?,
            (Term::Value(c), ATerm::Value(vs)) => {
                ensure(self.completion_covered(c, vs, s), || format!("completion {c:?} not in {vs}"))?
            }
            _ => return Err("term kinds differ".into()),
        }
        self.env_covered(&s.env, &abs.env, s)?;
        self.check_kont(s, abs)
    }

    /// Matches the concrete stack down to the innermost return frame.
    fn check_kont(&self, s: &ConcreteState, abs: &AState) -> Check {
        let mut k: &AKont = &abs.kont;
        for f in s.stack.iter().rev() {
            match (f, k) {
                (Frame::Ret { target, env, ctor, meth, caller }, AKont::Ret(ka)) => {
                    ensure(ka.meth == *meth, || "return to a different method".into())?;
                    let callee_ctx = &self.ctxs[s.frame as usize];
                    ensure(ka.ctx.covers(callee_ctx), || "return context does not cover".into())?;
                    let site = s.frames[s.frame as usize].event.as_ref().map(|e| e.site);
                    let caller_ctx = &self.ctxs[*caller as usize];
                    let frames = abs.konts.get(ka).ok_or("no return continuations")?;
                    let ok = frames.iter().any(|(t, rf)| {
                        Some(t.point) == site.map(Point::Node)
                            && t.ctx.covers(caller_ctx)
                            && rf.target == *target
                            && self.env_covered(env, &rf.env, s).is_ok()
                            && ctor.is_none_or(|r| rf.ctor.as_ref().is_some_and(|c| c.iter().any(|x| self.addr_covers(x, r, s))))
                    });
                    return ensure(ok, || "no return continuation covers the caller".into());
                }
                (_, AKont::Push(g, next)) => {
                    self.frame_covered(f, g, s)?;
                    k = next;
                }
                _ => return Err(format!("continuation shape differs at {:?}", f.key())),
            }
        }
        ensure(matches!(k, AKont::Halt), || "abstract continuation is longer".into())
    }

    fn frame_covered(&self, f: &Frame, g: &AFrame, s: &ConcreteState) -> Check {
        let ok = match (f, g) {
            (Frame::Seq { seq, idx }, AFrame::Seq { seq: t, idx: j }) => seq.id == t.id() && idx == j,
            (Frame::While(x), AFrame::While(y))
            | (Frame::Label(x), AFrame::Label(y))
            | (Frame::Try(x), AFrame::Try(y))
            | (Frame::Catch(x), AFrame::Catch(y)) => x.id == y.id(),
            (Frame::ForIn { stmt, keys, next, .. }, AFrame::ForIn { stmt: t, keys: ks }) => {
                stmt.id == t.id() && keys[*next..].iter().all(|k| ks.contains(k))
            }
            (Frame::Finally { stmt, pending }, AFrame::Finally { stmt: t, pending: p }) => {
                stmt.id == t.id() && self.completion_covered(pending, p, s)
            }
            _ => false,
        };
        ensure(ok, || format!("frame {:?} not covered", f.key()))
    }

    /// Checks the cells written since this entry was last used.
    fn check_store(&mut self, s: &ConcreteState, trace: &'a Trace, abs: &AState) -> Check {
        let log = s.store.writes();
        let from = self.checked_upto.get(trace).copied().unwrap_or(0);
        let mut owners = self.owners.get(trace).cloned().unwrap_or_default();
        let mut done = std::collections::BTreeSet::new();
        for &a in &log[from..] {
            if done.insert(a) {
                self.check_cell(s, a, &abs.store, &mut owners)?;
            }
        }
        self.checked_upto.insert(trace, log.len());
        self.owners.insert(trace, owners);
        Ok(())
    }

    fn check_cell(&self, s: &ConcreteState, a: Addr, store: &AbsStore, owners: &mut BTreeMap<AbsAddr, Addr>) -> Check {
        let info = s.store.info(a);
        let lo = AbsAddr {
            site: info.site,
            ctx: Context::root(),
            tag: AddrTag::Obj(Class::Object),
        };
        let matching = |x: &AbsAddr| self.addr_covers(x, a, s);
        let (ok, single) = match s.store.cell(a) {
            Cell::Val(v) => {
                let cands: Vec<_> = store.vars.range(lo..).take_while(|(x, _)| x.site == info.site).filter(|(x, _)| matching(x)).collect();
                let ok = cands.iter().any(|(_, c)| self.covered(v, &c.val, s));
                (ok, (cands.len() == 1 && !cands[0].1.many).then(|| cands[0].0.clone()))
            }
            Cell::Obj(o) => {
                let cands: Vec<_> = store.objs.range(lo..).take_while(|(x, _)| x.site == info.site).filter(|(x, _)| matching(x)).collect();
                let mut err = None;
                let ok = cands.iter().any(|(_, b)| match self.obj_covered(o, b, s) {
                    Ok(()) => true,
                    Err(e) => {
                        err.get_or_insert(e);
                        false
                    }
                });
                if let (false, Some(e)) = (ok, err) {
                    return Err(format!("cell {a:?} ({}): {e}", info.site));
                }
                (ok, (cands.len() == 1 && !cands[0].1.many).then(|| cands[0].0.clone()))
            }
        };
        ensure(ok, || format!("cell {a:?} allocated at {} {:?} is not covered", info.site, info.tag))?;
        if let Some(x) = single {
            let owner = *owners.entry(x.clone()).or_insert(a);
            ensure(owner == a, || format!("{x} is single but stands for {owner:?} and {a:?}"))?;
        }
        Ok(())
    }

    fn obj_covered(&self, o: &CObject, b: &AbsObject, s: &ConcreteState) -> Check {
        ensure(o.class == b.class, || "class differs".into())?;
        for (k, v) in &o.props {
            ensure(self.covered(v, &b.slot(k), s), || format!("property {k} = {v:?} not in {}", b.slot(k)))?;
        }
        for k in &b.present {
            ensure(o.props.contains_key(k), || format!("property {k} claimed present"))?;
        }
        for k in &b.hidden {
            ensure(!o.props.contains_key(k) || o.hidden.contains(k), || format!("property {k} claimed hidden"))?;
        }
        match &o.code {
            None => ensure(b.user.is_empty() && b.natives.is_empty(), || "callable abstraction of a plain object".into())?,
            Some(Code::Native(n)) => ensure(b.natives.contains(n), || format!("native {n:?} missing"))?,
            Some(Code::User { env, meth }) => {
                let m = b
                    .user
                    .iter()
                    .find(|(r, _)| r.id() == meth.id)
                    .ok_or_else(|| format!("closure of method {} missing", meth.id))?;
                self.env_covered(env, m.1, s)?;
            }
        }
        ensure(self.covered(&o.proto, &b.proto, s), || "prototype not covered".into())?;
        if let Some(p) = &o.prim {
            ensure(self.covered(p, &b.prim, s), || "primitive value not covered".into())?;
        }
        Ok(())
    }
}

/// Greedily deletes statements from sequences while `fails` keeps holding,
/// producing a smaller witness for a failing check.
pub fn minimize(program: &Arc<Decl>, fails: &dyn Fn(&Arc<Decl>) -> bool) -> Arc<Decl> {
    let mut cur = program.clone();
    'outer: loop {
        for cand in decl_variants(&cur) {
            let cand = Arc::new(cand);
            if crate::ir::validate(&cand).is_empty() && fails(&cand) {
                cur = cand;
                continue 'outer;
            }
        }
        return cur;
    }
}

fn decl_variants(d: &Decl) -> Vec<Decl> {
    stmt_variants(&d.body)
        .into_iter()
        .map(|body| Decl {
            id: d.id,
            bindings: d.bindings.clone(),
            body,
        })
        .collect()
}

fn with_kind(s: &Stmt, kind: StmtKind) -> Arc<Stmt> {
    Arc::new(Stmt { id: s.id, kind })
}

/// Every statement obtained from `s` by deleting one element of one sequence.
fn stmt_variants(s: &Arc<Stmt>) -> Vec<Arc<Stmt>> {
    let mut out = Vec::new();
    match &s.kind {
        StmtKind::Seq(ss) => {
            for i in 0..ss.len() {
                let mut v = ss.clone();
                v.remove(i);
                out.push(with_kind(s, StmtKind::Seq(v)));
            }
            for (i, c) in ss.iter().enumerate() {
                for c2 in stmt_variants(c) {
                    let mut v = ss.clone();
                    v[i] = c2;
                    out.push(with_kind(s, StmtKind::Seq(v)));
                }
            }
        }
        StmtKind::If(e, a, b) => {
            out.extend(stmt_variants(a).into_iter().map(|a| with_kind(s, StmtKind::If(e.clone(), a, b.clone()))));
            out.extend(stmt_variants(b).into_iter().map(|b| with_kind(s, StmtKind::If(e.clone(), a.clone(), b))));
        }
        StmtKind::While(e, b) => {
            out.extend(stmt_variants(b).into_iter().map(|b| with_kind(s, StmtKind::While(e.clone(), b))));
        }
        StmtKind::Label(l, b) => {
            out.extend(stmt_variants(b).into_iter().map(|b| with_kind(s, StmtKind::Label(l.clone(), b))));
        }
        StmtKind::ForIn { var, obj, body } => {
            out.extend(stmt_variants(body).into_iter().map(|body| {
                with_kind(s, StmtKind::ForIn { var: var.clone(), obj: obj.clone(), body })
            }));
        }
        StmtKind::Try { body, var, catch, finally } => {
            let mk = |body: &Arc<Stmt>, catch: &Arc<Stmt>, finally: &Arc<Stmt>| {
                with_kind(
                    s,
                    StmtKind::Try {
                        body: body.clone(),
                        var: var.clone(),
                        catch: catch.clone(),
                        finally: finally.clone(),
                    },
                )
            };
            out.extend(stmt_variants(body).iter().map(|b| mk(b, catch, finally)));
            out.extend(stmt_variants(catch).iter().map(|c| mk(body, c, finally)));
            out.extend(stmt_variants(finally).iter().map(|f| mk(body, catch, f)));
        }
        StmtKind::NewFun { target, meth, arity } => {
            let bodies: Vec<MethBody> = match &meth.body {
                MethBody::Decl(d) => decl_variants(d).into_iter().map(|d| MethBody::Decl(Arc::new(d))).collect(),
                MethBody::Stmt(b) => stmt_variants(b).into_iter().map(MethBody::Stmt).collect(),
            };
            out.extend(bodies.into_iter().map(|body| {
                with_kind(
                    s,
                    StmtKind::NewFun {
                        target: target.clone(),
                        meth: Arc::new(Meth { id: meth.id, body }),
                        arity: *arity,
                    },
                )
            }));
        }
        _ => {}
    }
    out
}

