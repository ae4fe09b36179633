use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use serde::Serialize;

/// Interned-by-sharing identifier used for variables, labels and property names.
pub type Name = Arc<str>;

pub fn name(s: &str) -> Name {
    Arc::from(s)
}

/// Program point and allocation site. Assigned depth-first in parse order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct NodeId(pub u32);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Mod,
    Shl,
    Sar,
    Shr,
    Lt,
    Le,
    BitAnd,
    BitOr,
    BitXor,
    And,
    Or,
    StrConcat,
    StrLt,
    StrLe,
    LooseEq,
    StrictEq,
    Dot,
    InstanceOf,
    In,
}

impl BinOp {
    pub const ALL: [BinOp; 23] = [
        BinOp::Add,
        BinOp::Sub,
        BinOp::Mul,
        BinOp::Div,
        BinOp::Mod,
        BinOp::Shl,
        BinOp::Sar,
        BinOp::Shr,
        BinOp::Lt,
        BinOp::Le,
        BinOp::BitAnd,
        BinOp::BitOr,
        BinOp::BitXor,
        BinOp::And,
        BinOp::Or,
        BinOp::StrConcat,
        BinOp::StrLt,
        BinOp::StrLe,
        BinOp::LooseEq,
        BinOp::StrictEq,
        BinOp::Dot,
        BinOp::InstanceOf,
        BinOp::In,
    ];

    pub fn token(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Mod => "%",
            BinOp::Shl => "<<",
            BinOp::Sar => ">>",
            BinOp::Shr => ">>>",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::BitAnd => "&",
            BinOp::BitOr => "|",
            BinOp::BitXor => "^",
            BinOp::And => "and",
            BinOp::Or => "or",
            BinOp::StrConcat => "++",
            BinOp::StrLt => "s<",
            BinOp::StrLe => "s<=",
            BinOp::LooseEq => "==",
            BinOp::StrictEq => "===",
            BinOp::Dot => ".",
            BinOp::InstanceOf => "instanceof",
            BinOp::In => "in",
        }
    }

    pub fn from_token(tok: &str) -> Option<BinOp> {
        BinOp::ALL.iter().copied().find(|op| op.token() == tok)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum UnOp {
    Neg,
    BitNot,
    Not,
    TypeOf,
    IsPrim,
    ToBool,
    ToStr,
    ToNum,
}

impl UnOp {
    pub const ALL: [UnOp; 8] = [
        UnOp::Neg,
        UnOp::BitNot,
        UnOp::Not,
        UnOp::TypeOf,
        UnOp::IsPrim,
        UnOp::ToBool,
        UnOp::ToStr,
        UnOp::ToNum,
    ];

    pub fn token(self) -> &'static str {
        match self {
            UnOp::Neg => "neg",
            UnOp::BitNot => "bitnot",
            UnOp::Not => "not",
            UnOp::TypeOf => "typeof",
            UnOp::IsPrim => "isprim",
            UnOp::ToBool => "tobool",
            UnOp::ToStr => "tostr",
            UnOp::ToNum => "tonum",
        }
    }

    pub fn from_token(tok: &str) -> Option<UnOp> {
        UnOp::ALL.iter().copied().find(|op| op.token() == tok)
    }
}

/// Pure expressions. No statement form is reachable from here.
#[derive(Debug, Clone)]
pub enum Exp {
    Num(f64),
    Bool(bool),
    Str(Name),
    Undef,
    Null,
    Var(Name),
    Meth(Arc<Meth>),
    Bin(BinOp, Box<Exp>, Box<Exp>),
    Un(UnOp, Box<Exp>),
}

impl PartialEq for Exp {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Exp::Num(a), Exp::Num(b)) => a.to_bits() == b.to_bits() || (a.is_nan() && b.is_nan()),
            (Exp::Bool(a), Exp::Bool(b)) => a == b,
            (Exp::Str(a), Exp::Str(b)) => a == b,
            (Exp::Undef, Exp::Undef) | (Exp::Null, Exp::Null) => true,
            (Exp::Var(a), Exp::Var(b)) => a == b,
            (Exp::Meth(a), Exp::Meth(b)) => a == b,
            (Exp::Bin(o1, l1, r1), Exp::Bin(o2, l2, r2)) => o1 == o2 && l1 == l2 && r1 == r2,
            (Exp::Un(o1, e1), Exp::Un(o2, e2)) => o1 == o2 && e1 == e2,
            _ => false,
        }
    }
}

impl Exp {
    pub fn bin(op: BinOp, lhs: Exp, rhs: Exp) -> Exp {
        Exp::Bin(op, Box::new(lhs), Box::new(rhs))
    }

    pub fn un(op: UnOp, e: Exp) -> Exp {
        Exp::Un(op, Box::new(e))
    }

    pub fn var(x: &str) -> Exp {
        Exp::Var(name(x))
    }

    pub fn str(s: &str) -> Exp {
        Exp::Str(name(s))
    }

    /// Property read `base.key`.
    pub fn dot(base: Exp, key: Exp) -> Exp {
        Exp::bin(BinOp::Dot, base, key)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Stmt {
    pub id: NodeId,
    pub kind: StmtKind,
}

#[derive(Debug, Clone, PartialEq)]
pub enum StmtKind {
    Seq(Vec<Arc<Stmt>>),
    If(Exp, Arc<Stmt>, Arc<Stmt>),
    While(Exp, Arc<Stmt>),
    Assign(Name, Exp),
    SetProp(Exp, Exp, Exp),
    Call {
        target: Name,
        callee: Exp,
        receiver: Exp,
        args: Exp,
    },
    ToObj(Name, Exp),
    Delete(Name, Exp, Exp),
    NewFun {
        target: Name,
        meth: Arc<Meth>,
        arity: f64,
    },
    NewCall {
        target: Name,
        ctor: Exp,
        args: Exp,
    },
    Throw(Exp),
    Try {
        body: Arc<Stmt>,
        var: Name,
        catch: Arc<Stmt>,
        finally: Arc<Stmt>,
    },
    Label(Name, Arc<Stmt>),
    Break(Name, Exp),
    ForIn {
        var: Name,
        obj: Exp,
        body: Arc<Stmt>,
    },
}

impl Stmt {
    pub fn new(kind: StmtKind) -> Stmt {
        Stmt {
            id: NodeId(0),
            kind,
        }
    }

    /// Short head keyword, as in the textual syntax.
    pub fn head(&self) -> &'static str {
        match &self.kind {
            StmtKind::Seq(_) => "seq",
            StmtKind::If(..) => "if",
            StmtKind::While(..) => "while",
            StmtKind::Assign(..) => ":=",
            StmtKind::SetProp(..) => ".:=",
            StmtKind::Call { .. } => "call",
            StmtKind::ToObj(..) => "toobj",
            StmtKind::Delete(..) => "delete",
            StmtKind::NewFun { .. } => "newfun",
            StmtKind::NewCall { .. } => "newcall",
            StmtKind::Throw(_) => "throw",
            StmtKind::Try { .. } => "try",
            StmtKind::Label(..) => "label",
            StmtKind::Break(..) => "break",
            StmtKind::ForIn { .. } => "forin",
        }
    }

    /// Expressions evaluated directly by this statement (not by nested statements).
    pub fn exps(&self) -> Vec<&Exp> {
        match &self.kind {
            StmtKind::Seq(_) | StmtKind::Label(..) | StmtKind::NewFun { .. } | StmtKind::Try { .. } => {
                Vec::new()
            }
            StmtKind::If(e, ..) | StmtKind::While(e, _) => vec![e],
            StmtKind::Assign(_, e) | StmtKind::ToObj(_, e) | StmtKind::Throw(e) | StmtKind::Break(_, e) => {
                vec![e]
            }
            StmtKind::SetProp(a, b, c) => vec![a, b, c],
            StmtKind::Call {
                callee,
                receiver,
                args,
                ..
            } => vec![callee, receiver, args],
            StmtKind::Delete(_, a, b) => vec![a, b],
            StmtKind::NewCall { ctor, args, .. } => vec![ctor, args],
            StmtKind::ForIn { obj, .. } => vec![obj],
        }
    }
}

/// `(decl ((x e) ...) s)`: binds variables for the duration of `body`.
#[derive(Debug, Clone, PartialEq)]
pub struct Decl {
    pub id: NodeId,
    pub bindings: Vec<(Name, Exp)>,
    pub body: Arc<Stmt>,
}

/// A two-parameter method literal; the parameters are always `self` and `args`.
#[derive(Debug, Clone, PartialEq)]
pub struct Meth {
    pub id: NodeId,
    pub body: MethBody,
}

#[derive(Debug, Clone, PartialEq)]
pub enum MethBody {
    Decl(Arc<Decl>),
    Stmt(Arc<Stmt>),
}

pub const SELF: &str = "self";
pub const ARGS: &str = "args";
/// Variable bound to the global object before the program starts.
pub const GLOBAL: &str = "global";

/// Statement handle compared, ordered and hashed by its node id.
#[derive(Debug, Clone)]
pub struct SRef(pub Arc<Stmt>);

impl SRef {
    pub fn id(&self) -> NodeId {
        self.0.id
    }
}

impl std::ops::Deref for SRef {
    type Target = Stmt;
    fn deref(&self) -> &Stmt {
        &self.0
    }
}

impl PartialEq for SRef {
    fn eq(&self, other: &Self) -> bool {
        self.0.id == other.0.id
    }
}
impl Eq for SRef {}
impl PartialOrd for SRef {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for SRef {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.id.cmp(&other.0.id)
    }
}
impl Hash for SRef {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.id.hash(state)
    }
}

/// Method handle compared by node id.
#[derive(Debug, Clone)]
pub struct MRef(pub Arc<Meth>);

impl MRef {
    pub fn id(&self) -> NodeId {
        self.0.id
    }
}

impl PartialEq for MRef {
    fn eq(&self, other: &Self) -> bool {
        self.0.id == other.0.id
    }
}
impl Eq for MRef {}
impl PartialOrd for MRef {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for MRef {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.id.cmp(&other.0.id)
    }
}
impl Hash for MRef {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.id.hash(state)
    }
}

/// Reassigns node ids depth-first in the order the parser would assign them.
pub fn renumber(decl: &Decl) -> Decl {
    let mut next = 0u32;
    renumber_decl(decl, &mut next)
}

fn fresh(next: &mut u32) -> NodeId {
    let id = NodeId(*next);
    *next += 1;
    id
}

fn renumber_decl(decl: &Decl, next: &mut u32) -> Decl {
    let id = fresh(next);
    let bindings = decl
        .bindings
        .iter()
        .map(|(x, e)| (x.clone(), renumber_exp(e, next)))
        .collect();
    let body = Arc::new(renumber_stmt(&decl.body, next));
    Decl { id, bindings, body }
}

fn renumber_meth(m: &Meth, next: &mut u32) -> Meth {
    let id = fresh(next);
    let body = match &m.body {
        MethBody::Decl(d) => MethBody::Decl(Arc::new(renumber_decl(d, next))),
        MethBody::Stmt(s) => MethBody::Stmt(Arc::new(renumber_stmt(s, next))),
    };
    Meth { id, body }
}

fn renumber_exp(e: &Exp, next: &mut u32) -> Exp {
    match e {
        Exp::Meth(m) => Exp::Meth(Arc::new(renumber_meth(m, next))),
        Exp::Bin(op, l, r) => {
            let l = renumber_exp(l, next);
            let r = renumber_exp(r, next);
            Exp::bin(*op, l, r)
        }
        Exp::Un(op, x) => Exp::un(*op, renumber_exp(x, next)),
        other => other.clone(),
    }
}

fn renumber_stmt(s: &Stmt, next: &mut u32) -> Stmt {
    let id = fresh(next);
    let st = |s: &Arc<Stmt>, next: &mut u32| Arc::new(renumber_stmt(s, next));
    let kind = match &s.kind {
        StmtKind::Seq(ss) => StmtKind::Seq(ss.iter().map(|s| st(s, next)).collect()),
        StmtKind::If(e, a, b) => {
            let e = renumber_exp(e, next);
            let a = st(a, next);
            let b = st(b, next);
            StmtKind::If(e, a, b)
        }
        StmtKind::While(e, b) => {
            let e = renumber_exp(e, next);
            StmtKind::While(e, st(b, next))
        }
        StmtKind::Assign(x, e) => StmtKind::Assign(x.clone(), renumber_exp(e, next)),
        StmtKind::SetProp(a, b, c) => {
            let a = renumber_exp(a, next);
            let b = renumber_exp(b, next);
            let c = renumber_exp(c, next);
            StmtKind::SetProp(a, b, c)
        }
        StmtKind::Call {
            target,
            callee,
            receiver,
            args,
        } => {
            let callee = renumber_exp(callee, next);
            let receiver = renumber_exp(receiver, next);
            let args = renumber_exp(args, next);
            StmtKind::Call {
                target: target.clone(),
                callee,
                receiver,
                args,
            }
        }
        StmtKind::ToObj(x, e) => StmtKind::ToObj(x.clone(), renumber_exp(e, next)),
        StmtKind::Delete(x, a, b) => {
            let a = renumber_exp(a, next);
            let b = renumber_exp(b, next);
            StmtKind::Delete(x.clone(), a, b)
        }
        StmtKind::NewFun { target, meth, arity } => StmtKind::NewFun {
            target: target.clone(),
            meth: Arc::new(renumber_meth(meth, next)),
            arity: *arity,
        },
        StmtKind::NewCall { target, ctor, args } => {
            let ctor = renumber_exp(ctor, next);
            let args = renumber_exp(args, next);
            StmtKind::NewCall {
                target: target.clone(),
                ctor,
                args,
            }
        }
        StmtKind::Throw(e) => StmtKind::Throw(renumber_exp(e, next)),
        StmtKind::Try {
            body,
            var,
            catch,
            finally,
        } => {
            let body = st(body, next);
            let catch = st(catch, next);
            let finally = st(finally, next);
            StmtKind::Try {
                body,
                var: var.clone(),
                catch,
                finally,
            }
        }
        StmtKind::Label(l, b) => StmtKind::Label(l.clone(), st(b, next)),
        StmtKind::Break(l, e) => StmtKind::Break(l.clone(), renumber_exp(e, next)),
        StmtKind::ForIn { var, obj, body } => {
            let obj = renumber_exp(obj, next);
            StmtKind::ForIn {
                var: var.clone(),
                obj,
                body: st(body, next),
            }
        }
    };
    Stmt { id, kind }
}

/// Calls `f` on every statement, including those inside method literals.
pub fn walk_stmts<'a>(decl: &'a Decl, f: &mut dyn FnMut(&'a Arc<Stmt>)) {
    for (_, e) in &decl.bindings {
        walk_exp_stmts(e, f);
    }
    walk_stmt(&decl.body, f);
}

fn walk_meth<'a>(m: &'a Meth, f: &mut dyn FnMut(&'a Arc<Stmt>)) {
    match &m.body {
        MethBody::Decl(d) => walk_stmts(d, f),
        MethBody::Stmt(s) => walk_stmt(s, f),
    }
}

fn walk_exp_stmts<'a>(e: &'a Exp, f: &mut dyn FnMut(&'a Arc<Stmt>)) {
    match e {
        Exp::Meth(m) => walk_meth(m, f),
        Exp::Bin(_, l, r) => {
            walk_exp_stmts(l, f);
            walk_exp_stmts(r, f);
        }
        Exp::Un(_, x) => walk_exp_stmts(x, f),
        _ => {}
    }
}

fn walk_stmt<'a>(s: &'a Arc<Stmt>, f: &mut dyn FnMut(&'a Arc<Stmt>)) {
    f(s);
    for e in s.exps() {
        walk_exp_stmts(e, f);
    }
    match &s.kind {
        StmtKind::Seq(ss) => ss.iter().for_each(|s| walk_stmt(s, f)),
        StmtKind::If(_, a, b) => {
            walk_stmt(a, f);
            walk_stmt(b, f);
        }
        StmtKind::While(_, b) | StmtKind::Label(_, b) | StmtKind::ForIn { body: b, .. } => walk_stmt(b, f),
        StmtKind::NewFun { meth, .. } => walk_meth(meth, f),
        StmtKind::Try {
            body,
            catch,
            finally,
            ..
        } => {
            walk_stmt(body, f);
            walk_stmt(catch, f);
            walk_stmt(finally, f);
        }
        _ => {}
    }
}

/// Number of AST nodes that carry ids (decls, methods, statements).
pub fn node_count(decl: &Decl) -> usize {
    let mut count = 0usize;
    count_decl(decl, &mut count);
    count
}

fn count_decl(d: &Decl, n: &mut usize) {
    *n += 1;
    d.bindings.iter().for_each(|(_, e)| count_exp(e, n));
    count_stmt(&d.body, n);
}

fn count_meth(m: &Meth, n: &mut usize) {
    *n += 1;
    match &m.body {
        MethBody::Decl(d) => count_decl(d, n),
        MethBody::Stmt(s) => count_stmt(s, n),
    }
}

fn count_exp(e: &Exp, n: &mut usize) {
    match e {
        Exp::Meth(m) => count_meth(m, n),
        Exp::Bin(_, l, r) => {
            count_exp(l, n);
            count_exp(r, n);
        }
        Exp::Un(_, x) => count_exp(x, n),
        _ => {}
    }
}

fn count_stmt(s: &Stmt, n: &mut usize) {
    *n += 1;
    s.exps().into_iter().for_each(|e| count_exp(e, n));
    match &s.kind {
        StmtKind::Seq(ss) => ss.iter().for_each(|s| count_stmt(s, n)),
        StmtKind::If(_, a, b) => {
            count_stmt(a, n);
            count_stmt(b, n);
        }
        StmtKind::While(_, b) | StmtKind::Label(_, b) | StmtKind::ForIn { body: b, .. } => count_stmt(b, n),
        StmtKind::NewFun { meth, .. } => count_meth(meth, n),
        StmtKind::Try {
            body,
            catch,
            finally,
            ..
        } => {
            count_stmt(body, n);
            count_stmt(catch, n);
            count_stmt(finally, n);
        }
        _ => {}
    }
}
