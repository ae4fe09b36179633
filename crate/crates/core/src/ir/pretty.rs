use std::fmt::Write;

use super::ast::*;

/// Canonical text for a program; `parse_program` reads it back to an equal AST.
pub fn pretty(decl: &Decl) -> String {
    let mut out = String::new();
    decl_to(&mut out, decl, 0);
    out.push('\n');
    out
}

pub fn pretty_exp(e: &Exp) -> String {
    let mut out = String::new();
    exp_to(&mut out, e, 0);
    out
}

pub fn pretty_stmt(s: &Stmt) -> String {
    let mut out = String::new();
    stmt_to(&mut out, s, 0);
    out
}

pub fn fmt_num(n: f64) -> String {
    if n.is_nan() {
        "nan".into()
    } else if n == f64::INFINITY {
        "inf".into()
    } else if n == f64::NEG_INFINITY {
        "-inf".into()
    } else if n.fract() == 0.0 && n.abs() < 1e16 {
        format!("{n}")
    } else {
        format!("{n:?}")
    }
}

pub fn fmt_str(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            '\r' => out.push_str("\\r"),
            '\0' => out.push_str("\\0"),
            c if c.is_control() => {
                let _ = write!(out, "\\u{{{:x}}}", c as u32);
            }
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn newline(out: &mut String, indent: usize) {
    out.push('\n');
    for _ in 0..indent {
        out.push_str("  ");
    }
}

fn decl_to(out: &mut String, d: &Decl, indent: usize) {
    out.push_str("(decl (");
    for (i, (x, e)) in d.bindings.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        let _ = write!(out, "({x} ");
        exp_to(out, e, indent + 2);
        out.push(')');
    }
    out.push(')');
    newline(out, indent + 1);
    stmt_to(out, &d.body, indent + 1);
    out.push(')');
}

fn meth_to(out: &mut String, m: &Meth, indent: usize) {
    out.push_str("(fun (self args)");
    newline(out, indent + 1);
    match &m.body {
        MethBody::Decl(d) => decl_to(out, d, indent + 1),
        MethBody::Stmt(s) => stmt_to(out, s, indent + 1),
    }
    out.push(')');
}

fn exp_to(out: &mut String, e: &Exp, indent: usize) {
    match e {
        Exp::Num(n) => out.push_str(&fmt_num(*n)),
        Exp::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Exp::Str(s) => out.push_str(&fmt_str(s)),
        Exp::Undef => out.push_str("undef"),
        Exp::Null => out.push_str("null"),
        Exp::Var(x) => out.push_str(x),
        Exp::Meth(m) => meth_to(out, m, indent),
        Exp::Bin(op, l, r) => {
            let _ = write!(out, "({} ", op.token());
            exp_to(out, l, indent);
            out.push(' ');
            exp_to(out, r, indent);
            out.push(')');
        }
        Exp::Un(op, x) => {
            let _ = write!(out, "({} ", op.token());
            exp_to(out, x, indent);
            out.push(')');
        }
    }
}

fn exps_to(out: &mut String, es: &[&Exp], indent: usize) {
    for e in es {
        out.push(' ');
        exp_to(out, e, indent);
    }
}

fn child(out: &mut String, s: &Stmt, indent: usize) {
    newline(out, indent + 1);
    stmt_to(out, s, indent + 1);
}

fn stmt_to(out: &mut String, s: &Stmt, indent: usize) {
    let _ = write!(out, "({}", s.head());
    match &s.kind {
        StmtKind::Seq(ss) => ss.iter().for_each(|s| child(out, s, indent)),
        StmtKind::If(e, a, b) => {
            exps_to(out, &[e], indent);
            child(out, a, indent);
            child(out, b, indent);
        }
        StmtKind::While(e, b) => {
            exps_to(out, &[e], indent);
            child(out, b, indent);
        }
        StmtKind::Assign(x, e) | StmtKind::ToObj(x, e) => {
            let _ = write!(out, " {x}");
            exps_to(out, &[e], indent);
        }
        StmtKind::SetProp(a, b, c) => exps_to(out, &[a, b, c], indent),
        StmtKind::Call {
            target,
            callee,
            receiver,
            args,
        } => {
            let _ = write!(out, " {target}");
            exps_to(out, &[callee, receiver, args], indent);
        }
        StmtKind::Delete(x, a, b) => {
            let _ = write!(out, " {x}");
            exps_to(out, &[a, b], indent);
        }
        StmtKind::NewFun { target, meth, arity } => {
            let _ = write!(out, " {target} ");
            meth_to(out, meth, indent);
            let _ = write!(out, " {}", fmt_num(*arity));
        }
        StmtKind::NewCall { target, ctor, args } => {
            let _ = write!(out, " {target}");
            exps_to(out, &[ctor, args], indent);
        }
        StmtKind::Throw(e) => exps_to(out, &[e], indent),
        StmtKind::Try {
            body,
            var,
            catch,
            finally,
        } => {
            child(out, body, indent);
            newline(out, indent + 1);
            out.push_str(var);
            child(out, catch, indent);
            child(out, finally, indent);
        }
        StmtKind::Label(l, b) => {
            let _ = write!(out, " {l}");
            child(out, b, indent);
        }
        StmtKind::Break(l, e) => {
            let _ = write!(out, " {l}");
            exps_to(out, &[e], indent);
        }
        StmtKind::ForIn { var, obj, body } => {
            let _ = write!(out, " {var}");
            exps_to(out, &[obj], indent);
            child(out, body, indent);
        }
    }
    out.push(')');
}
