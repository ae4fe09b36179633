use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use im::OrdMap;

use crate::domains::{env_leq, join_env, AbsEnv, AbsStore, AbsStr, AddrSet, BValue};
use crate::ir::{Decl, Name, NodeId, SRef, Stmt};
use crate::model::FrameKey;
use crate::sensitivity::{Context, Trace};

/// Completion values reaching a point: a normal value, an exception and
/// per-label jump values. Bottom components are absent.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ValueSet {
    pub normal: BValue,
    pub exc: BValue,
    pub jumps: BTreeMap<Name, BValue>,
}

impl ValueSet {
    pub fn normal(v: BValue) -> ValueSet {
        ValueSet { normal: v, ..ValueSet::default() }
    }

    pub fn throw(v: BValue) -> ValueSet {
        ValueSet { exc: v, ..ValueSet::default() }
    }

    pub fn jump(l: Name, v: BValue) -> ValueSet {
        let mut jumps = BTreeMap::new();
        if !v.is_bot() {
            jumps.insert(l, v);
        }
        ValueSet { jumps, ..ValueSet::default() }
    }

    pub fn is_bot(&self) -> bool {
        self.normal.is_bot() && self.exc.is_bot() && self.jumps.is_empty()
    }

    /// Everything but the normal value.
    pub fn abrupt(&self) -> ValueSet {
        ValueSet {
            normal: BValue::BOT,
            exc: self.exc.clone(),
            jumps: self.jumps.clone(),
        }
    }

    pub fn join(&self, o: &ValueSet) -> ValueSet {
        let mut jumps = self.jumps.clone();
        for (l, v) in &o.jumps {
            jumps.entry(l.clone()).and_modify(|x| x.join_in(v)).or_insert_with(|| v.clone());
        }
        ValueSet {
            normal: self.normal.join(&o.normal),
            exc: self.exc.join(&o.exc),
            jumps,
        }
    }

    pub fn leq(&self, o: &ValueSet) -> bool {
        self.normal.leq(&o.normal)
            && self.exc.leq(&o.exc)
            && self.jumps.iter().all(|(l, v)| o.jumps.get(l).is_some_and(|w| v.leq(w)))
    }
}

impl fmt::Display for ValueSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if !self.normal.is_bot() {
            parts.push(format!("{}", self.normal));
        }
        if !self.exc.is_bot() {
            parts.push(format!("throw {}", self.exc));
        }
        for (l, v) in &self.jumps {
            parts.push(format!("break {l} {v}"));
        }
        write!(f, "{}", parts.join(" | "))
    }
}

/// Address of the continuations of a method activation.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct KontAddr {
    pub meth: NodeId,
    pub ctx: Context,
}

/// Intra-procedural continuation frames.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AFrame {
    Seq { seq: SRef, idx: usize },
    While(SRef),
    Label(SRef),
    ForIn { stmt: SRef, keys: AbsStr },
    Try(SRef),
    Catch(SRef),
    Finally { stmt: SRef, pending: ValueSet },
}

impl AFrame {
    pub fn key(&self) -> FrameKey {
        match self {
            AFrame::Seq { seq, idx } => FrameKey::Seq(seq.id(), *idx as u32),
            AFrame::While(s) => FrameKey::While(s.id()),
            AFrame::Label(s) => FrameKey::Label(s.id()),
            AFrame::ForIn { stmt, .. } => FrameKey::ForIn(stmt.id()),
            AFrame::Try(s) => FrameKey::Try(s.id()),
            AFrame::Catch(s) => FrameKey::Catch(s.id()),
            AFrame::Finally { stmt, .. } => FrameKey::Finally(stmt.id()),
        }
    }
}

/// A continuation: frames of the current method, ending either at the
/// program's halt or at a store-allocated return continuation.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AKont {
    Halt,
    Ret(KontAddr),
    Push(AFrame, Arc<AKont>),
}

/// Raised when two continuations reaching one partition differ in shape.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KontMismatch;

impl AKont {
    pub fn key(&self) -> FrameKey {
        match self {
            AKont::Halt => FrameKey::Halt,
            AKont::Ret(ka) => FrameKey::Return(ka.meth),
            AKont::Push(f, _) => f.key(),
        }
    }

    pub fn push(next: &Arc<AKont>, f: AFrame) -> Arc<AKont> {
        Arc::new(AKont::Push(f, next.clone()))
    }

    pub fn join(a: &Arc<AKont>, b: &Arc<AKont>) -> Result<Arc<AKont>, KontMismatch> {
        if Arc::ptr_eq(a, b) || a == b {
            return Ok(a.clone());
        }
        match (&**a, &**b) {
            (AKont::Push(f, n), AKont::Push(g, m)) => {
                let frame = match (f, g) {
                    (AFrame::ForIn { stmt, keys: k1 }, AFrame::ForIn { stmt: s2, keys: k2 }) if stmt == s2 => {
                        AFrame::ForIn { stmt: stmt.clone(), keys: k1.join(k2) }
                    }
                    (
                        AFrame::Finally { stmt, pending: p1 },
                        AFrame::Finally { stmt: s2, pending: p2 },
                    ) if stmt == s2 => AFrame::Finally { stmt: stmt.clone(), pending: p1.join(p2) },
                    (f, g) if f == g => f.clone(),
                    _ => return Err(KontMismatch),
                };
                Ok(Arc::new(AKont::Push(frame, AKont::join(n, m)?)))
            }
            _ => Err(KontMismatch),
        }
    }

    pub fn leq(a: &AKont, b: &AKont) -> bool {
        match (a, b) {
            (AKont::Push(f, n), AKont::Push(g, m)) => {
                let frame = match (f, g) {
                    (AFrame::ForIn { stmt, keys: k1 }, AFrame::ForIn { stmt: s2, keys: k2 }) => {
                        stmt == s2 && k1.leq(k2)
                    }
                    (AFrame::Finally { stmt, pending: p1 }, AFrame::Finally { stmt: s2, pending: p2 }) => {
                        stmt == s2 && p1.leq(p2)
                    }
                    (f, g) => f == g,
                };
                frame && AKont::leq(n, m)
            }
            _ => a == b,
        }
    }
}

/// Return continuation recorded for one calling partition.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RetFrame {
    pub target: Name,
    pub env: AbsEnv,
    /// Receiver of a `newcall`, returned when the body's value is not an object.
    pub ctor: Option<AddrSet>,
    pub next: Arc<AKont>,
}

impl RetFrame {
    fn join(&self, o: &RetFrame) -> RetFrame {
        let ctor = match (&self.ctor, &o.ctor) {
            (Some(a), Some(b)) => Some(a.union(b).cloned().collect()),
            (a, b) => a.clone().or_else(|| b.clone()),
        };
        RetFrame {
            target: self.target.clone(),
            env: join_env(&self.env, &o.env),
            ctor,
            next: AKont::join(&self.next, &o.next).expect("one call site has one continuation shape"),
        }
    }

    fn leq(&self, o: &RetFrame) -> bool {
        let ctor = match (&self.ctor, &o.ctor) {
            (Some(a), Some(b)) => a.is_subset(b),
            (None, _) => true,
            (Some(_), None) => false,
        };
        ctor && env_leq(&self.env, &o.env) && AKont::leq(&self.next, &o.next)
    }
}

/// Store of return continuations, by callee activation and calling partition.
pub type KontStore = OrdMap<KontAddr, OrdMap<Trace, Arc<RetFrame>>>;

fn join_konts(a: &KontStore, b: &KontStore) -> KontStore {
    if a.ptr_eq(b) {
        return a.clone();
    }
    a.clone().union_with(b.clone(), |x, y| {
        if x.ptr_eq(&y) {
            return x;
        }
        x.union_with(y, |f, g| if f == g { f } else { Arc::new(f.join(&g)) })
    })
}

fn konts_leq(a: &KontStore, b: &KontStore) -> bool {
    a.ptr_eq(b)
        || a.iter().all(|(ka, m)| {
            b.get(ka).is_some_and(|n| {
                m.iter()
                    .all(|(t, f)| n.get(t).is_some_and(|g| Arc::ptr_eq(f, g) || f.leq(g)))
            })
        })
}

#[derive(Debug, Clone)]
pub enum ATerm {
    Decl(Arc<Decl>),
    Stmt(Arc<Stmt>),
    Value(ValueSet),
}

impl PartialEq for ATerm {
    fn eq(&self, o: &Self) -> bool {
        match (self, o) {
            (ATerm::Decl(a), ATerm::Decl(b)) => a.id == b.id,
            (ATerm::Stmt(a), ATerm::Stmt(b)) => a.id == b.id,
            (ATerm::Value(a), ATerm::Value(b)) => a == b,
            _ => false,
        }
    }
}
impl Eq for ATerm {}

/// An abstract machine state. Its partition key is kept beside it by the engine.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AState {
    pub term: ATerm,
    pub env: AbsEnv,
    pub store: AbsStore,
    pub konts: KontStore,
    pub kont: Arc<AKont>,
}

impl AState {
    /// Join of two states sharing a partition.
    pub fn join(&self, o: &AState) -> AState {
        let term = match (&self.term, &o.term) {
            (ATerm::Value(a), ATerm::Value(b)) => ATerm::Value(a.join(b)),
            (a, b) if a == b => a.clone(),
            (a, b) => panic!("states in one partition run different terms: {a:?} / {b:?}"),
        };
        let kont = AKont::join(&self.kont, &o.kont)
            .unwrap_or_else(|_| panic!("continuation shapes differ within a partition at {:?}", self.kont.key()));
        AState {
            term,
            env: join_env(&self.env, &o.env),
            store: self.store.join(&o.store),
            konts: join_konts(&self.konts, &o.konts),
            kont,
        }
    }

    pub fn leq(&self, o: &AState) -> bool {
        let term = match (&self.term, &o.term) {
            (ATerm::Value(a), ATerm::Value(b)) => a.leq(b),
            (a, b) => a == b,
        };
        term && env_leq(&self.env, &o.env)
            && AKont::leq(&self.kont, &o.kont)
            && self.store.leq(&o.store)
            && konts_leq(&self.konts, &o.konts)
    }

    /// One-line summary of the term, for dumps.
    pub fn term_summary(&self) -> String {
        match &self.term {
            ATerm::Decl(_) => "decl".into(),
            ATerm::Stmt(s) => s.head().into(),
            ATerm::Value(v) => v.to_string(),
        }
    }
}
