use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use crate::ir::NodeId;
use crate::model::{Callee, Class, Point, Site, TypeSet, ARG_TYPES};

/// One entry of a calling context.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CtxElem {
    /// A call site.
    Site(NodeId),
    /// Allocation sites of the receiver objects.
    Recv(BTreeSet<(Site, Class)>),
    /// Callee plus type-sets of the receiver and leading arguments.
    Sig {
        callee: Callee,
        self_types: TypeSet,
        args: [TypeSet; ARG_TYPES],
    },
    /// Receiver sites, or the call site when the receiver may be the global object.
    Mixed {
        site: Option<NodeId>,
        recv: BTreeSet<(Site, Class)>,
    },
    /// Free-form element for user-defined strategies.
    Token(u64),
}

impl CtxElem {
    /// Whether this (abstract) element describes every call the `other`
    /// (concrete) element describes.
    pub fn covers(&self, other: &CtxElem) -> bool {
        match (self, other) {
            (CtxElem::Recv(a), CtxElem::Recv(c)) => a.is_superset(c),
            (
                CtxElem::Sig { callee: f, self_types: s, args: a },
                CtxElem::Sig { callee: g, self_types: t, args: b },
            ) => f == g && s.contains(*t) && a.iter().zip(b).all(|(x, y)| x.contains(*y)),
            (CtxElem::Mixed { site: s, recv: a }, CtxElem::Mixed { site: t, recv: c }) => {
                a.is_superset(c) && (t.is_none() || s == t)
            }
            _ => self == other,
        }
    }
}

impl fmt::Display for CtxElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let recv = |f: &mut fmt::Formatter<'_>, r: &BTreeSet<(Site, Class)>| {
            write!(f, "{{")?;
            for (i, (s, c)) in r.iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{s}:{c:?}")?;
            }
            write!(f, "}}")
        };
        match self {
            CtxElem::Site(n) => write!(f, "@{n}"),
            CtxElem::Recv(r) => recv(f, r),
            CtxElem::Sig { callee, self_types, args } => {
                write!(f, "{callee:?}({}", self_types.0)?;
                for a in args {
                    write!(f, ",{}", a.0)?;
                }
                write!(f, ")")
            }
            CtxElem::Mixed { site: Some(n), .. } => write!(f, "@{n}"),
            CtxElem::Mixed { site: None, recv: r } => recv(f, r),
            CtxElem::Token(t) => write!(f, "#{t}"),
        }
    }
}

/// A calling context, most recent element first.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Context(pub Arc<[CtxElem]>);

impl Context {
    pub fn root() -> Context {
        Context(Arc::from(Vec::new()))
    }

    pub fn from_vec(elems: Vec<CtxElem>) -> Context {
        Context(Arc::from(elems))
    }

    pub fn elems(&self) -> &[CtxElem] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `elem` followed by this context, keeping at most `k` elements.
    pub fn push(&self, elem: CtxElem, k: usize) -> Context {
        let mut v = Vec::with_capacity(k.min(self.len() + 1));
        if k > 0 {
            v.push(elem);
            v.extend(self.0.iter().take(k - 1).cloned());
        }
        Context::from_vec(v)
    }

    /// The first `h` elements, used to qualify heap addresses.
    pub fn prefix(&self, h: usize) -> Context {
        if self.len() <= h {
            self.clone()
        } else {
            Context::from_vec(self.0[..h].to_vec())
        }
    }

    pub fn covers(&self, other: &Context) -> bool {
        self.len() == other.len() && self.0.iter().zip(other.0.iter()).all(|(a, c)| a.covers(c))
    }
}

impl fmt::Display for Context {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, "]")
    }
}

/// Partition key of the worklist: a program point qualified by a context.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Trace {
    pub point: Point,
    pub ctx: Context,
}

impl Trace {
    pub fn at(&self, point: Point) -> Trace {
        Trace { point, ctx: self.ctx.clone() }
    }
}

impl fmt::Display for Trace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.point, self.ctx)
    }
}
