use std::collections::HashSet;
use std::fmt;

use serde::Serialize;

use super::ast::*;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum DiagKind {
    UnboundLabel(String),
    UnboundVariable(String),
    DuplicateBinding(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub node: NodeId,
    pub kind: DiagKind,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            DiagKind::UnboundLabel(l) => write!(f, "node {}: unbound label {l}", self.node),
            DiagKind::UnboundVariable(x) => write!(f, "node {}: unbound variable {x}", self.node),
            DiagKind::DuplicateBinding(x) => write!(f, "node {}: duplicate binding {x}", self.node),
        }
    }
}

/// Checks label binding, variable binding and binding-name distinctness.
/// Labels do not cross method boundaries.
pub fn validate(decl: &Decl) -> Vec<Diagnostic> {
    let mut v = Validator {
        diags: Vec::new(),
        vars: vec![name(GLOBAL)],
        labels: Vec::new(),
    };
    v.decl(decl);
    v.diags
}

struct Validator {
    diags: Vec<Diagnostic>,
    vars: Vec<Name>,
    labels: Vec<Name>,
}

impl Validator {
    fn bound(&self, x: &Name) -> bool {
        self.vars.iter().rev().any(|y| y == x)
    }

    fn use_var(&mut self, node: NodeId, x: &Name) {
        if !self.bound(x) {
            self.diags.push(Diagnostic {
                node,
                kind: DiagKind::UnboundVariable(x.to_string()),
            });
        }
    }

    fn decl(&mut self, d: &Decl) {
        let mark = self.vars.len();
        let mut seen = HashSet::new();
        for (x, _) in &d.bindings {
            if !seen.insert(x.clone()) {
                self.diags.push(Diagnostic {
                    node: d.id,
                    kind: DiagKind::DuplicateBinding(x.to_string()),
                });
            }
            self.vars.push(x.clone());
        }
        for (_, e) in &d.bindings {
            self.exp(d.id, e);
        }
        self.stmt(&d.body);
        self.vars.truncate(mark);
    }

    fn meth(&mut self, m: &Meth) {
        let mark = self.vars.len();
        self.vars.push(name(SELF));
        self.vars.push(name(ARGS));
        let labels = std::mem::take(&mut self.labels);
        match &m.body {
            MethBody::Decl(d) => self.decl(d),
            MethBody::Stmt(s) => self.stmt(s),
        }
        self.labels = labels;
        self.vars.truncate(mark);
    }

    fn exp(&mut self, node: NodeId, e: &Exp) {
        match e {
            Exp::Var(x) => self.use_var(node, x),
            Exp::Meth(m) => self.meth(m),
            Exp::Bin(_, l, r) => {
                self.exp(node, l);
                self.exp(node, r);
            }
            Exp::Un(_, x) => self.exp(node, x),
            _ => {}
        }
    }

    fn stmt(&mut self, s: &Stmt) {
        let id = s.id;
        for e in s.exps() {
            self.exp(id, e);
        }
        match &s.kind {
            StmtKind::Seq(ss) => ss.iter().for_each(|s| self.stmt(s)),
            StmtKind::If(_, a, b) => {
                self.stmt(a);
                self.stmt(b);
            }
            StmtKind::While(_, b) => self.stmt(b),
            StmtKind::Assign(x, _)
            | StmtKind::ToObj(x, _)
            | StmtKind::Delete(x, ..)
            | StmtKind::Call { target: x, .. }
            | StmtKind::NewCall { target: x, .. } => self.use_var(id, x),
            StmtKind::NewFun { target, meth, .. } => {
                self.use_var(id, target);
                self.meth(meth);
            }
            StmtKind::SetProp(..) | StmtKind::Throw(_) => {}
            StmtKind::Try {
                body,
                var,
                catch,
                finally,
            } => {
                self.use_var(id, var);
                self.stmt(body);
                self.stmt(catch);
                self.stmt(finally);
            }
            StmtKind::Label(l, b) => {
                self.labels.push(l.clone());
                self.stmt(b);
                self.labels.pop();
            }
            StmtKind::Break(l, _) => {
                if !self.labels.contains(l) {
                    self.diags.push(Diagnostic {
                        node: id,
                        kind: DiagKind::UnboundLabel(l.to_string()),
                    });
                }
            }
            StmtKind::ForIn { var, body, .. } => {
                self.use_var(id, var);
                self.stmt(body);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ir::parse_program;

    fn diags(text: &str) -> Vec<Diagnostic> {
        validate(&parse_program(text).unwrap())
    }

    #[test]
    fn unbound_label() {
        let d = diags("(decl () (break L undef))");
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].kind, DiagKind::UnboundLabel("L".into()));
    }

    #[test]
    fn unbound_variable() {
        let d = diags("(decl ((x 0)) (:= y 1))");
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].kind, DiagKind::UnboundVariable("y".into()));
    }

    #[test]
    fn duplicate_binding() {
        let d = diags("(decl ((x 0) (x 1)) (seq))");
        assert_eq!(d, vec![Diagnostic { node: NodeId(0), kind: DiagKind::DuplicateBinding("x".into()) }]);
    }

    #[test]
    fn labels_stop_at_method_boundary() {
        let d = diags("(decl ((f undef)) (label L (newfun f (fun (self args) (break L 1)) 0)))");
        assert_eq!(d.len(), 1);
        assert!(matches!(d[0].kind, DiagKind::UnboundLabel(_)));
    }

    #[test]
    fn method_params_and_closure_scope() {
        let ok = "(decl ((f undef) (y 1)) (newfun f (fun (self args) (decl ((z y)) (:= z (. args \"0\")))) 1))";
        assert!(diags(ok).is_empty());
        assert!(diags("(decl () (:= global 1))").is_empty());
        assert_eq!(diags("(decl ((f undef)) (seq (newfun f (fun (self args) (seq)) 0) (:= self 1)))").len(), 1);
    }
}
