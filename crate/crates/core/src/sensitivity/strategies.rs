use super::{Context, CtxElem, Sensitivity};
use crate::model::CallEvent;

/// Flow-sensitive, context-insensitive: one state per program point.
#[derive(Debug, Clone, Copy)]
pub struct FlowOnly;

impl Sensitivity for FlowOnly {
    fn name(&self) -> String {
        "fs".into()
    }
    fn heap_depth(&self) -> usize {
        0
    }
    fn call(&self, _: &Context, _: &CallEvent) -> Context {
        Context::root()
    }
}

/// The top `k` call sites.
#[derive(Debug, Clone, Copy)]
pub struct Stack {
    pub k: usize,
    pub h: usize,
}

impl Sensitivity for Stack {
    fn name(&self) -> String {
        format!("stack:{}.{}", self.k, self.h)
    }
    fn heap_depth(&self) -> usize {
        self.h
    }
    fn call(&self, caller: &Context, ev: &CallEvent) -> Context {
        caller.push(CtxElem::Site(ev.site), self.k)
    }
}

/// The whole call-site stack, with recursive cycles collapsed.
#[derive(Debug, Clone, Copy)]
pub struct Acyclic {
    pub h: usize,
}

impl Sensitivity for Acyclic {
    fn name(&self) -> String {
        format!("acyclic:{}", self.h)
    }
    fn heap_depth(&self) -> usize {
        self.h
    }
    fn call(&self, caller: &Context, ev: &CallEvent) -> Context {
        let site = CtxElem::Site(ev.site);
        match caller.elems().iter().position(|e| *e == site) {
            Some(i) => Context::from_vec(caller.elems()[i..].to_vec()),
            None => caller.push(site, usize::MAX),
        }
    }
}

/// A chain of receiver objects.
#[derive(Debug, Clone, Copy)]
pub struct ObjectSens {
    pub k: usize,
    pub h: usize,
}

impl Sensitivity for ObjectSens {
    fn name(&self) -> String {
        format!("obj:{}.{}", self.k, self.h)
    }
    fn heap_depth(&self) -> usize {
        self.h
    }
    fn call(&self, caller: &Context, ev: &CallEvent) -> Context {
        caller.push(CtxElem::Recv(ev.receivers.clone()), self.k)
    }
}

/// Callee and argument type signatures.
#[derive(Debug, Clone, Copy)]
pub struct Signature {
    pub k: usize,
    pub h: usize,
}

impl Sensitivity for Signature {
    fn name(&self) -> String {
        format!("sig:{}.{}", self.k, self.h)
    }
    fn heap_depth(&self) -> usize {
        self.h
    }
    fn call(&self, caller: &Context, ev: &CallEvent) -> Context {
        let elem = CtxElem::Sig {
            callee: ev.callee,
            self_types: ev.self_types,
            args: ev.arg_types,
        };
        caller.push(elem, self.k)
    }
}

/// Object sensitivity, except calls on the global object use the call site.
#[derive(Debug, Clone, Copy)]
pub struct Mixed {
    pub k: usize,
    pub h: usize,
}

impl Sensitivity for Mixed {
    fn name(&self) -> String {
        format!("mixed:{}.{}", self.k, self.h)
    }
    fn heap_depth(&self) -> usize {
        self.h
    }
    fn call(&self, caller: &Context, ev: &CallEvent) -> Context {
        let elem = CtxElem::Mixed {
            site: ev.receiver_global.then_some(ev.site),
            recv: ev.receivers.clone(),
        };
        caller.push(elem, self.k)
    }
}
