use std::sync::Arc;

use thiserror::Error;

use super::ast::*;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at {line}:{col}: {msg}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Pos {
    line: usize,
    col: usize,
}

#[derive(Debug, Clone)]
enum Sx {
    Atom(String, Pos),
    Str(String, Pos),
    List(Vec<Sx>, Pos),
}

impl Sx {
    fn pos(&self) -> Pos {
        match self {
            Sx::Atom(_, p) | Sx::Str(_, p) | Sx::List(_, p) => *p,
        }
    }
}

fn err<T>(pos: Pos, msg: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError {
        line: pos.line,
        col: pos.col,
        msg: msg.into(),
    })
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    pos: Pos,
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str) -> Self {
        Lexer {
            chars: text.chars().peekable(),
            pos: Pos { line: 1, col: 1 },
        }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.pos.line += 1;
            self.pos.col = 1;
        } else {
            self.pos.col += 1;
        }
        Some(c)
    }

    fn skip_trivia(&mut self) {
        while let Some(&c) = self.chars.peek() {
            if c.is_whitespace() {
                self.bump();
            } else if c == ';' {
                while let Some(c) = self.bump() {
                    if c == '\n' {
                        break;
                    }
                }
            } else {
                break;
            }
        }
    }

    fn read(&mut self) -> Result<Option<Sx>, ParseError> {
        self.skip_trivia();
        let start = self.pos;
        let Some(&c) = self.chars.peek() else {
            return Ok(None);
        };
        match c {
            '(' => {
                self.bump();
                let mut items = Vec::new();
                loop {
                    self.skip_trivia();
                    match self.chars.peek() {
                        None => return err(start, "unclosed form"),
                        Some(')') => {
                            self.bump();
                            return Ok(Some(Sx::List(items, start)));
                        }
                        Some(_) => {
                            if let Some(item) = self.read()? {
                                items.push(item);
                            }
                        }
                    }
                }
            }
            ')' => err(start, "unexpected ')'"),
            '"' => {
                self.bump();
                let mut s = String::new();
                loop {
                    match self.bump() {
                        None => return err(start, "unterminated string"),
                        Some('"') => return Ok(Some(Sx::Str(s, start))),
                        Some('\\') => {
                            let esc = self.pos;
                            match self.bump() {
                                Some('n') => s.push('\n'),
                                Some('t') => s.push('\t'),
                                Some('r') => s.push('\r'),
                                Some('0') => s.push('\0'),
                                Some('"') => s.push('"'),
                                Some('\\') => s.push('\\'),
                                Some('u') => {
                                    if self.bump() != Some('{') {
                                        return err(esc, "expected '{' after \\u");
                                    }
                                    let mut hex = String::new();
                                    loop {
                                        match self.bump() {
                                            Some('}') => break,
                                            Some(h) if h.is_ascii_hexdigit() => hex.push(h),
                                            _ => return err(esc, "bad unicode escape"),
                                        }
                                    }
                                    let ch = u32::from_str_radix(&hex, 16)
                                        .ok()
                                        .and_then(char::from_u32);
                                    match ch {
                                        Some(ch) => s.push(ch),
                                        None => return err(esc, "invalid code point"),
                                    }
                                }
                                _ => return err(esc, "unknown escape"),
                            }
                        }
                        Some(ch) => s.push(ch),
                    }
                }
            }
            _ => {
                let mut s = String::new();
                while let Some(&c) = self.chars.peek() {
                    if c.is_whitespace() || c == '(' || c == ')' || c == '"' || c == ';' {
                        break;
                    }
                    s.push(c);
                    self.bump();
                }
                Ok(Some(Sx::Atom(s, start)))
            }
        }
    }
}

/// Parses the parenthesized surface syntax into a `Decl` with fresh node ids.
pub fn parse_program(text: &str) -> Result<Decl, ParseError> {
    let mut lexer = Lexer::new(text);
    let Some(top) = lexer.read()? else {
        return err(lexer.pos, "empty input");
    };
    lexer.skip_trivia();
    if lexer.chars.peek().is_some() {
        return err(lexer.pos, "trailing input after program");
    }
    let mut p = Builder { next: 0 };
    p.decl(&top)
}

struct Builder {
    next: u32,
}

const RESERVED: &[&str] = &["true", "false", "undef", "null", "nan", "inf", "-inf"];

fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' || c == '$' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '$') && !RESERVED.contains(&s)
}

fn parse_number(s: &str) -> Option<f64> {
    match s {
        "nan" => return Some(f64::NAN),
        "inf" => return Some(f64::INFINITY),
        "-inf" => return Some(f64::NEG_INFINITY),
        _ => {}
    }
    let bytes = s.as_bytes();
    let first_digit = match bytes.first()? {
        b'-' | b'+' => bytes.get(1).copied(),
        b => Some(*b),
    };
    match first_digit {
        Some(b) if b.is_ascii_digit() || b == b'.' => {}
        _ => return None,
    }
    if s.chars().any(|c| c.is_ascii_alphabetic() && c != 'e' && c != 'E') {
        return None;
    }
    s.parse().ok()
}

impl Builder {
    fn fresh(&mut self) -> NodeId {
        let id = NodeId(self.next);
        self.next += 1;
        id
    }

    fn list<'s>(&self, sx: &'s Sx, what: &str) -> Result<(&'s str, &'s [Sx], Pos), ParseError> {
        match sx {
            Sx::List(items, pos) => match items.first() {
                Some(Sx::Atom(head, _)) => Ok((head.as_str(), &items[1..], *pos)),
                _ => err(*pos, format!("expected {what} form with a head keyword")),
            },
            other => err(other.pos(), format!("expected {what}")),
        }
    }

    fn ident(&self, sx: &Sx, what: &str) -> Result<Name, ParseError> {
        match sx {
            Sx::Atom(s, p) => {
                if is_ident(s) {
                    Ok(name(s))
                } else {
                    err(*p, format!("expected {what} identifier, found `{s}`"))
                }
            }
            other => err(other.pos(), format!("expected {what} identifier")),
        }
    }

    fn arity(&self, args: &[Sx], n: usize, head: &str, pos: Pos) -> Result<(), ParseError> {
        if args.len() == n {
            Ok(())
        } else {
            err(pos, format!("`{head}` expects {n} operands, found {}", args.len()))
        }
    }

    fn decl(&mut self, sx: &Sx) -> Result<Decl, ParseError> {
        let (head, args, pos) = self.list(sx, "decl")?;
        if head != "decl" {
            return err(pos, format!("expected `decl`, found `{head}`"));
        }
        self.arity(args, 2, head, pos)?;
        let id = self.fresh();
        let Sx::List(binds, bpos) = &args[0] else {
            return err(args[0].pos(), "expected binding list");
        };
        let _ = bpos;
        let mut bindings = Vec::with_capacity(binds.len());
        for b in binds {
            match b {
                Sx::List(pair, p) if pair.len() == 2 => {
                    let x = self.ident(&pair[0], "binding")?;
                    let e = self.exp(&pair[1])?;
                    bindings.push((x, e));
                }
                other => return err(other.pos(), "expected `(ident exp)` binding"),
            }
        }
        let body = Arc::new(self.stmt(&args[1])?);
        Ok(Decl { id, bindings, body })
    }

    fn meth(&mut self, args: &[Sx], pos: Pos) -> Result<Meth, ParseError> {
        self.arity(args, 2, "fun", pos)?;
        match &args[0] {
            Sx::List(ps, p) => {
                let ok = ps.len() == 2
                    && matches!(&ps[0], Sx::Atom(s, _) if s == SELF)
                    && matches!(&ps[1], Sx::Atom(s, _) if s == ARGS);
                if !ok {
                    return err(*p, "method parameters must be `(self args)`");
                }
            }
            other => return err(other.pos(), "method parameters must be `(self args)`"),
        }
        let id = self.fresh();
        let body = match &args[1] {
            Sx::List(items, _) if matches!(items.first(), Some(Sx::Atom(h, _)) if h == "decl") => {
                MethBody::Decl(Arc::new(self.decl(&args[1])?))
            }
            other => MethBody::Stmt(Arc::new(self.stmt(other)?)),
        };
        Ok(Meth { id, body })
    }

    fn exp(&mut self, sx: &Sx) -> Result<Exp, ParseError> {
        match sx {
            Sx::Str(s, _) => Ok(Exp::Str(name(s))),
            Sx::Atom(s, p) => match s.as_str() {
                "true" => Ok(Exp::Bool(true)),
                "false" => Ok(Exp::Bool(false)),
                "undef" => Ok(Exp::Undef),
                "null" => Ok(Exp::Null),
                _ => {
                    if let Some(n) = parse_number(s) {
                        Ok(Exp::Num(n))
                    } else if is_ident(s) {
                        Ok(Exp::Var(name(s)))
                    } else {
                        err(*p, format!("unexpected token `{s}` in expression"))
                    }
                }
            },
            Sx::List(items, pos) => {
                let Some(Sx::Atom(head, _)) = items.first() else {
                    return err(*pos, "expected operator");
                };
                let args = &items[1..];
                if head == "fun" {
                    return Ok(Exp::Meth(Arc::new(self.meth(args, *pos)?)));
                }
                if let Some(op) = BinOp::from_token(head) {
                    self.arity(args, 2, head, *pos)?;
                    let l = self.exp(&args[0])?;
                    let r = self.exp(&args[1])?;
                    return Ok(Exp::bin(op, l, r));
                }
                if let Some(op) = UnOp::from_token(head) {
                    self.arity(args, 1, head, *pos)?;
                    return Ok(Exp::un(op, self.exp(&args[0])?));
                }
                err(*pos, format!("unknown operator `{head}`"))
            }
        }
    }

    fn stmt(&mut self, sx: &Sx) -> Result<Stmt, ParseError> {
        let (head, args, pos) = self.list(sx, "statement")?;
        let id = self.fresh();
        let kind = match head {
            "seq" => {
                let mut ss = Vec::with_capacity(args.len());
                for a in args {
                    ss.push(Arc::new(self.stmt(a)?));
                }
                StmtKind::Seq(ss)
            }
            "if" => {
                self.arity(args, 3, head, pos)?;
                let e = self.exp(&args[0])?;
                let a = Arc::new(self.stmt(&args[1])?);
                let b = Arc::new(self.stmt(&args[2])?);
                StmtKind::If(e, a, b)
            }
            "while" => {
                self.arity(args, 2, head, pos)?;
                let e = self.exp(&args[0])?;
                StmtKind::While(e, Arc::new(self.stmt(&args[1])?))
            }
            ":=" => {
                self.arity(args, 2, head, pos)?;
                let x = self.ident(&args[0], "variable")?;
                StmtKind::Assign(x, self.exp(&args[1])?)
            }
            ".:=" => {
                self.arity(args, 3, head, pos)?;
                let a = self.exp(&args[0])?;
                let b = self.exp(&args[1])?;
                let c = self.exp(&args[2])?;
                StmtKind::SetProp(a, b, c)
            }
            "call" => {
                self.arity(args, 4, head, pos)?;
                let target = self.ident(&args[0], "variable")?;
                let callee = self.exp(&args[1])?;
                let receiver = self.exp(&args[2])?;
                let a = self.exp(&args[3])?;
                StmtKind::Call {
                    target,
                    callee,
                    receiver,
                    args: a,
                }
            }
            "toobj" => {
                self.arity(args, 2, head, pos)?;
                let x = self.ident(&args[0], "variable")?;
                StmtKind::ToObj(x, self.exp(&args[1])?)
            }
            "delete" => {
                self.arity(args, 3, head, pos)?;
                let x = self.ident(&args[0], "variable")?;
                let a = self.exp(&args[1])?;
                let b = self.exp(&args[2])?;
                StmtKind::Delete(x, a, b)
            }
            "newfun" => {
                self.arity(args, 3, head, pos)?;
                let target = self.ident(&args[0], "variable")?;
                let meth = match &args[1] {
                    Sx::List(items, p) if matches!(items.first(), Some(Sx::Atom(h, _)) if h == "fun") => {
                        self.meth(&items[1..], *p)?
                    }
                    other => return err(other.pos(), "expected `(fun (self args) ...)`"),
                };
                let arity = match &args[2] {
                    Sx::Atom(s, p) => match parse_number(s) {
                        Some(n) => n,
                        None => return err(*p, "expected numeric arity"),
                    },
                    other => return err(other.pos(), "expected numeric arity"),
                };
                StmtKind::NewFun {
                    target,
                    meth: Arc::new(meth),
                    arity,
                }
            }
            "newcall" => {
                self.arity(args, 3, head, pos)?;
                let target = self.ident(&args[0], "variable")?;
                let ctor = self.exp(&args[1])?;
                let a = self.exp(&args[2])?;
                StmtKind::NewCall {
                    target,
                    ctor,
                    args: a,
                }
            }
            "throw" => {
                self.arity(args, 1, head, pos)?;
                StmtKind::Throw(self.exp(&args[0])?)
            }
            "try" => {
                self.arity(args, 4, head, pos)?;
                let body = Arc::new(self.stmt(&args[0])?);
                let var = self.ident(&args[1], "catch variable")?;
                let catch = Arc::new(self.stmt(&args[2])?);
                let finally = Arc::new(self.stmt(&args[3])?);
                StmtKind::Try {
                    body,
                    var,
                    catch,
                    finally,
                }
            }
            "label" => {
                self.arity(args, 2, head, pos)?;
                let l = self.ident(&args[0], "label")?;
                StmtKind::Label(l, Arc::new(self.stmt(&args[1])?))
            }
            "break" => {
                self.arity(args, 2, head, pos)?;
                let l = self.ident(&args[0], "label")?;
                StmtKind::Break(l, self.exp(&args[1])?)
            }
            "forin" => {
                self.arity(args, 3, head, pos)?;
                let var = self.ident(&args[0], "variable")?;
                let obj = self.exp(&args[1])?;
                StmtKind::ForIn {
                    var,
                    obj,
                    body: Arc::new(self.stmt(&args[2])?),
                }
            }
            other => return err(pos, format!("unknown statement `{other}`")),
        };
        Ok(Stmt { id, kind })
    }
}
