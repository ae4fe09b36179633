use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ir::{fmt_num, fmt_str, node_count, parse_program, validate, Decl};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GenConfig {
    /// Upper bound on `node_count` of the result.
    pub max_nodes: usize,
    /// Iterations of every generated loop.
    pub loop_bound: u32,
    pub max_functions: usize,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            max_nodes: 200,
            loop_bound: 3,
            max_functions: 4,
        }
    }
}

const GLOBALS: [&str; 4] = ["v0", "v1", "v2", "v3"];
const OBJECTS: [&str; 3] = ["o0", "o1", "o2"];
const KEYS: [&str; 9] = ["a", "b", "0", "1", "2", "length", "valueOf", "toString", "prototype"];
const BINOPS: [&str; 23] = [
    "+", "-", "*", "/", "%", "<<", ">>", ">>>", "<", "<=", "&", "|", "^", "and", "or", "++", "s<", "s<=", "==",
    "===", ".", "instanceof", "in",
];
const UNOPS: [&str; 8] = ["neg", "bitnot", "not", "typeof", "isprim", "tobool", "tostr", "tonum"];
const BUILTIN_METHODS: [&str; 6] = ["push", "pop", "join", "toString", "valueOf", "hasOwnProperty"];

struct Gen {
    rng: ChaCha8Rng,
    cfg: GenConfig,
    /// Remaining statement budget.
    budget: i64,
    labels: Vec<String>,
    /// Variables visible besides the globals: locals of the current function.
    locals: Vec<String>,
    /// Functions that may be called from the code being generated.
    callable: usize,
    loops: usize,
    temps: usize,
    depth: usize,
    /// Variables bound by the top-level declaration besides the fixed ones.
    extra: Vec<String>,
}

impl Gen {
    fn chance(&mut self, p: f64) -> bool {
        self.rng.gen_bool(p)
    }

    fn pick<'a>(&mut self, xs: &[&'a str]) -> &'a str {
        xs.choose(&mut self.rng).copied().expect("non-empty")
    }

    fn literal(&mut self) -> String {
        match self.rng.gen_range(0..9) {
            0 => fmt_num([0.0, 1.0, 2.0, -1.0, 3.5, 10.0][self.rng.gen_range(0..6)]),
            1 => fmt_num([f64::NAN, f64::INFINITY, 4294967296.0][self.rng.gen_range(0..3)]),
            2 => fmt_str(self.pick(&["", "x", "1", "3.5", "a", "length"])),
            3 => fmt_str(self.pick(&KEYS)),
            4 => self.pick(&["true", "false"]).into(),
            5 => "null".into(),
            6 => "undef".into(),
            _ => fmt_num(self.rng.gen_range(0..4) as f64),
        }
    }

    fn var(&mut self) -> String {
        let mut vs: Vec<String> = GLOBALS.iter().chain(OBJECTS.iter()).map(|s| s.to_string()).collect();
        vs.extend(self.locals.iter().cloned());
        vs.choose(&mut self.rng).cloned().expect("non-empty")
    }

    fn object(&mut self) -> String {
        if !self.locals.is_empty() && self.chance(0.3) {
            return self.pick(&["self", "args"]).into();
        }
        self.pick(&OBJECTS).into()
    }

    fn key(&mut self) -> String {
        if self.chance(0.85) {
            fmt_str(self.pick(&KEYS))
        } else {
            self.var()
        }
    }

    fn exp(&mut self, depth: u32) -> String {
        if depth == 0 {
            return match self.rng.gen_range(0..3) {
                0 => self.literal(),
                _ => self.var(),
            };
        }
        match self.rng.gen_range(0..8) {
            0 | 1 => self.exp(0),
            2 | 3 => {
                let (o, k) = (self.object(), self.key());
                format!("(. {o} {k})")
            }
            4 | 5 => {
                let op = self.pick(&BINOPS);
                let (a, b) = (self.exp(depth - 1), self.exp(depth - 1));
                format!("({op} {a} {b})")
            }
            _ => {
                let op = self.pick(&UNOPS);
                format!("({op} {})", self.exp(depth - 1))
            }
        }
    }

    fn target(&mut self) -> String {
        if self.chance(0.5) {
            self.pick(&GLOBALS).into()
        } else {
            self.var()
        }
    }

    fn temp(&mut self) -> String {
        self.temps += 1;
        format!("t{}", self.temps % 3)
    }

    fn block(&mut self, n: usize) -> String {
        let stmts: Vec<String> = (0..n).map(|_| self.stmt()).collect();
        format!("(seq {})", stmts.join(" "))
    }

    fn args_object(&mut self, out: &mut Vec<String>) -> String {
        let a = self.temp();
        out.push(format!("(newcall {a} (. global \"Array\") undef)"));
        for i in 0..self.rng.gen_range(0..3) {
            let e = self.exp(1);
            out.push(format!("(.:= {a} \"{i}\" {e})"));
        }
        a
    }

    fn call(&mut self) -> String {
        let mut pre = Vec::new();
        let target = self.target();
        let (callee, recv) = match self.rng.gen_range(0..6) {
            0..=2 if self.callable > 0 => {
                let f = format!("f{}", self.rng.gen_range(0..self.callable));
                let recv = if self.chance(0.5) { "global".to_string() } else { self.object() };
                (f, recv)
            }
            0..=3 => {
                let o = self.object();
                let m = self.pick(&BUILTIN_METHODS);
                (format!("(. {o} \"{m}\")"), o)
            }
            4 => {
                let f = self.pick(&["print", "isNaN", "Object", "Array"]);
                (format!("(. global \"{f}\")"), "global".into())
            }
            _ if self.locals.is_empty() => {
                let o = self.object();
                (format!("(. {o} \"m\")"), o)
            }
            _ => ("(. global \"isNaN\")".into(), "global".into()),
        };
        let args = self.args_object(&mut pre);
        let kind = if self.chance(0.15) && callee.starts_with('f') { "newcall" } else { "call" };
        let stmt = if kind == "call" {
            format!("(call {target} {callee} {recv} {args})")
        } else {
            format!("(newcall {target} {callee} {args})")
        };
        pre.push(stmt);
        format!("(seq {})", pre.join(" "))
    }

    fn stmt(&mut self) -> String {
        self.budget -= 1;
        let compound = self.budget > 0 && self.depth < 3;
        let roll = self.rng.gen_range(0..100);
        if compound && roll < 40 {
            self.depth += 1;
            let s = self.compound(roll);
            self.depth -= 1;
            return s;
        }
        match roll % 12 {
            0 | 1 => {
                let (x, e) = (self.target(), self.exp(2));
                format!("(:= {x} {e})")
            }
            2 | 3 => {
                let (o, k, e) = (self.object(), self.key(), self.exp(1));
                format!("(.:= {o} {k} {e})")
            }
            4 => {
                let o = self.object();
                let fun = if self.callable > 0 && self.chance(0.7) {
                    format!("f{}", self.rng.gen_range(0..self.callable))
                } else {
                    self.exp(0)
                };
                format!("(.:= {o} \"m\" {fun})")
            }
            5 | 6 => self.call(),
            7 => {
                let (x, e) = (self.target(), self.exp(1));
                format!("(toobj {x} {e})")
            }
            8 => {
                let (x, o, k) = (self.target(), self.exp(0), self.key());
                format!("(delete {x} {o} {k})")
            }
            9 if !self.labels.is_empty() => {
                let l = self.labels.choose(&mut self.rng).cloned().expect("non-empty");
                format!("(break {l} {})", self.exp(1))
            }
            10 if self.chance(0.3) => format!("(throw {})", self.exp(1)),
            _ => {
                let x = self.target();
                let e = if self.chance(0.5) { "(. global \"undefined\")".to_string() } else { self.exp(1) };
                format!("(:= {x} {e})")
            }
        }
    }

    fn compound(&mut self, roll: u32) -> String {
        match roll % 7 {
            0 => {
                let (g, a, b) = (self.exp(2), self.block(2), self.block(1));
                format!("(if {g} {a} {b})")
            }
            1 => {
                self.loops += 1;
                let c = format!("c{}", self.loops);
                self.extra.push(c.clone());
                let body = self.block(2);
                let bound = self.rng.gen_range(1..=self.cfg.loop_bound);
                format!("(seq (:= {c} 0) (while (< {c} {bound}) (seq {body} (:= {c} (+ {c} 1)))))")
            }
            2 | 3 => {
                let x = self.pick(&["e0", "e1"]);
                let body = self.block(2);
                let catch = self.block(1);
                let fin = if self.chance(0.5) { self.block(1) } else { "(seq)".into() };
                format!("(try {body} {x} {catch} {fin})")
            }
            4 => {
                let l = format!("l{}", self.labels.len());
                self.labels.push(l.clone());
                let body = self.block(2);
                self.labels.pop();
                format!("(label {l} {body})")
            }
            _ => {
                self.loops += 1;
                let k = format!("k{}", self.loops);
                self.extra.push(k.clone());
                let o = if self.chance(0.8) { self.object() } else { self.exp(0) };
                let body = self.block(2);
                format!("(forin {k} {o} {body})")
            }
        }
    }

    fn function(&mut self, i: usize) -> String {
        let saved = (std::mem::take(&mut self.labels), std::mem::take(&mut self.locals), self.callable);
        self.callable = i;
        self.labels.push("ret".into());
        self.locals = vec!["self".into(), "args".into(), "p0".into(), "p1".into()];
        let n = self.rng.gen_range(1..4);
        let body = self.block(n);
        let ret = self.exp(1);
        let out = format!(
            "(newfun f{i} (fun (self args) (decl ((p0 (. args \"0\")) (p1 (. args \"1\"))) (label ret (seq {body} (break ret {ret}))))) 2)"
        );
        (self.labels, self.locals, self.callable) = saved;
        out
    }

    fn program(&mut self) -> String {
        let nfun = self.rng.gen_range(0..=self.cfg.max_functions);
        let mut parts = Vec::new();
        for o in OBJECTS {
            let ctor = if self.chance(0.3) { "Array" } else { "Object" };
            parts.push(format!("(newcall {o} (. global \"{ctor}\") undef)"));
        }
        for i in 0..nfun {
            parts.push(self.function(i));
            self.callable = i + 1;
        }
        while self.budget > 0 {
            parts.push(self.stmt());
        }
        let mut binds: Vec<String> = GLOBALS.iter().chain(OBJECTS.iter()).map(|v| format!("({v} undef)")).collect();
        binds.extend(["t0", "t1", "t2", "e0", "e1"].iter().map(|v| format!("({v} undef)")));
        binds.extend(self.extra.iter().map(|v| format!("({v} undef)")));
        binds.extend((0..nfun).map(|i| format!("(f{i} undef)")));
        format!("(decl ({}) (seq {}))", binds.join(" "), parts.join(" "))
    }
}

/// A random well-formed program, deterministic in `seed`. Loops run a
/// bounded number of times and functions only call functions defined
/// before them, so every program terminates.
pub fn generate_program(seed: u64, cfg: GenConfig) -> Arc<Decl> {
    let mut budget = (cfg.max_nodes / 4) as i64;
    let mut attempt = 0u64;
    loop {
        let mut g = Gen {
            rng: ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9e37_79b9).wrapping_add(attempt)),
            cfg,
            budget,
            labels: Vec::new(),
            locals: Vec::new(),
            callable: 0,
            loops: 0,
            temps: 0,
            depth: 0,
            extra: Vec::new(),
        };
        let text = g.program();
        let prog = parse_program(&text).unwrap_or_else(|e| panic!("generated program does not parse: {e}\n{text}"));
        let diags = validate(&prog);
        assert!(diags.is_empty(), "generated program is ill-formed: {diags:?}\n{text}");
        if node_count(&prog) <= cfg.max_nodes {
            return Arc::new(prog);
        }
        attempt += 1;
        budget = (budget * 3 / 4).max(1);
    }
}
