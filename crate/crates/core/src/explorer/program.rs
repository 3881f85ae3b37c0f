//! Client programs: syntax tree, text parser and the flat instruction form
//! the explorer runs.
//!
//! ```text
//! program := item*
//! item    := "var" IDENT "=" value
//!          | "thread" "{" stmts "}"
//! stmts   := (stmt ";"?)*
//! stmt    := "call" (IDENT "=")? OBJ "." METHOD "(" expr? ")"
//!          | "read" IDENT "=" OBJ "." cell
//!          | "write" OBJ "." cell "<-" expr
//!          | "let" IDENT "=" expr
//!          | "await" cond
//!          | "atomic" ("when" cond)? "{" (IDENT "=" expr ";"?)* "}"
//!          | "if" cond "{" stmts "}" ("else" "{" stmts "}")?
//!          | "while" cond "{" stmts "}"
//! cell    := IDENT ("[" INT "]")?
//! expr    := atom ("+" atom)*
//! atom    := value | IDENT | "(" expr ")"
//! cond    := conj ("||" conj)*
//! conj    := neg ("&&" neg)*
//! neg     := "!" neg | "(" cond ")" | "true" | "false" | expr CMP expr
//! CMP     := "==" | "!=" | "<=" | "<" | ">=" | ">"
//! value   := INT | 'sym' | null | EMPTY | unit
//! ```
//!
//! `#` starts a comment. The object prefix `OBJ` (e.g. `Q`) is not
//! interpreted.

use std::collections::BTreeMap;
use std::fmt;

use crate::value::Value;

pub type ClientState = BTreeMap<String, Value>;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Expr {
    Lit(Value),
    Var(String),
    Add(Box<Expr>, Box<Expr>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CmpOp {
    Eq,
    Ne,
    Le,
    Lt,
    Ge,
    Gt,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Cond {
    True,
    False,
    Cmp(CmpOp, Expr, Expr),
    And(Box<Cond>, Box<Cond>),
    Or(Box<Cond>, Box<Cond>),
    Not(Box<Cond>),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Stmt {
    Call {
        target: Option<String>,
        method: String,
        arg: Option<Expr>,
    },
    Read {
        target: String,
        cell: String,
    },
    Write {
        cell: String,
        expr: Expr,
    },
    Assign {
        var: String,
        expr: Expr,
    },
    /// Blocks while `guard` is false, then performs `assigns` in one step.
    Atomic {
        guard: Option<Cond>,
        assigns: Vec<(String, Expr)>,
    },
    If {
        cond: Cond,
        then: Vec<Stmt>,
        els: Vec<Stmt>,
    },
    While {
        cond: Cond,
        body: Vec<Stmt>,
    },
}

impl Stmt {
    pub fn call(target: Option<&str>, method: &str, arg: Option<Value>) -> Stmt {
        Stmt::Call {
            target: target.map(str::to_string),
            method: method.to_string(),
            arg: arg.map(Expr::Lit),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Program {
    pub vars: Vec<(String, Value)>,
    pub threads: Vec<Vec<Stmt>>,
}

impl Program {
    pub fn new(vars: Vec<(String, Value)>, threads: Vec<Vec<Stmt>>) -> Program {
        Program { vars, threads }
    }

    pub fn initial_client(&self) -> ClientState {
        self.vars.iter().cloned().collect()
    }

    /// Every method name called anywhere in the program.
    pub fn methods(&self) -> Vec<String> {
        fn walk(stmts: &[Stmt], out: &mut Vec<String>) {
            for s in stmts {
                match s {
                    Stmt::Call { method, .. } => out.push(method.clone()),
                    Stmt::If { then, els, .. } => {
                        walk(then, out);
                        walk(els, out);
                    }
                    Stmt::While { body, .. } => walk(body, out),
                    _ => {}
                }
            }
        }
        let mut out = Vec::new();
        for t in &self.threads {
            walk(t, &mut out);
        }
        out.sort();
        out.dedup();
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {reason}")]
pub struct ProgramError {
    pub line: usize,
    pub reason: String,
}

/// Evaluation failure; aborts the program.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvalError(pub String);

impl Expr {
    pub fn eval(&self, env: &ClientState) -> Result<Value, EvalError> {
        match self {
            Expr::Lit(v) => Ok(v.clone()),
            Expr::Var(x) => env
                .get(x)
                .cloned()
                .ok_or_else(|| EvalError(format!("undefined variable {x}"))),
            Expr::Add(a, b) => match (a.eval(env)?, b.eval(env)?) {
                (Value::Int(x), Value::Int(y)) => x
                    .checked_add(y)
                    .map(Value::Int)
                    .ok_or_else(|| EvalError("integer overflow".into())),
                (x, y) => Err(EvalError(format!("cannot add {x} and {y}"))),
            },
        }
    }
}

impl Cond {
    pub fn eval(&self, env: &ClientState) -> Result<bool, EvalError> {
        Ok(match self {
            Cond::True => true,
            Cond::False => false,
            Cond::Cmp(op, a, b) => {
                let (x, y) = (a.eval(env)?, b.eval(env)?);
                match op {
                    CmpOp::Eq => x == y,
                    CmpOp::Ne => x != y,
                    _ => {
                        let (Value::Int(x), Value::Int(y)) = (&x, &y) else {
                            return Err(EvalError(format!("cannot order {x} and {y}")));
                        };
                        match op {
                            CmpOp::Le => x <= y,
                            CmpOp::Lt => x < y,
                            CmpOp::Ge => x >= y,
                            _ => x > y,
                        }
                    }
                }
            }
            Cond::And(a, b) => a.eval(env)? && b.eval(env)?,
            Cond::Or(a, b) => a.eval(env)? || b.eval(env)?,
            Cond::Not(a) => !a.eval(env)?,
        })
    }
}

/// Flat instruction; `pc` values index the thread's instruction vector and
/// `len` means finished.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub(crate) enum Instr {
    Call {
        target: Option<String>,
        method: String,
        arg: Option<Expr>,
    },
    Read {
        target: String,
        cell: String,
    },
    Write {
        cell: String,
        expr: Expr,
    },
    Assign {
        var: String,
        expr: Expr,
    },
    Atomic {
        guard: Option<Cond>,
        assigns: Vec<(String, Expr)>,
    },
    /// Test `cond`; fall through when true, go to `target` when false.
    Branch {
        cond: Cond,
        target: usize,
    },
    Jump(usize),
}

pub(crate) struct CompiledThread {
    pub code: Vec<Instr>,
}

impl CompiledThread {
    pub fn compile(stmts: &[Stmt]) -> CompiledThread {
        let mut code = Vec::new();
        emit(stmts, &mut code);
        CompiledThread { code }
    }

    pub fn end(&self) -> usize {
        self.code.len()
    }

    /// Follows jumps so that every stored pc points at a real instruction or
    /// the end.
    pub fn normalize(&self, mut pc: usize) -> usize {
        let mut hops = 0;
        while let Some(Instr::Jump(t)) = self.code.get(pc) {
            pc = *t;
            hops += 1;
            if hops > self.code.len() {
                // A jump-only loop; `while true {}` is compiled with a branch,
                // so this cannot happen for parsed programs.
                break;
            }
        }
        pc
    }
}

fn emit(stmts: &[Stmt], code: &mut Vec<Instr>) {
    for s in stmts {
        match s {
            Stmt::Call { target, method, arg } => code.push(Instr::Call {
                target: target.clone(),
                method: method.clone(),
                arg: arg.clone(),
            }),
            Stmt::Read { target, cell } => code.push(Instr::Read {
                target: target.clone(),
                cell: cell.clone(),
            }),
            Stmt::Write { cell, expr } => code.push(Instr::Write {
                cell: cell.clone(),
                expr: expr.clone(),
            }),
            Stmt::Assign { var, expr } => code.push(Instr::Assign {
                var: var.clone(),
                expr: expr.clone(),
            }),
            Stmt::Atomic { guard, assigns } => code.push(Instr::Atomic {
                guard: guard.clone(),
                assigns: assigns.clone(),
            }),
            Stmt::If { cond, then, els } => {
                let branch = code.len();
                code.push(Instr::Branch {
                    cond: cond.clone(),
                    target: 0,
                });
                emit(then, code);
                let jump = code.len();
                code.push(Instr::Jump(0));
                let else_start = code.len();
                emit(els, code);
                let end = code.len();
                code[branch] = Instr::Branch {
                    cond: cond.clone(),
                    target: else_start,
                };
                code[jump] = Instr::Jump(end);
            }
            Stmt::While { cond, body } => {
                let head = code.len();
                code.push(Instr::Branch {
                    cond: cond.clone(),
                    target: 0,
                });
                emit(body, code);
                code.push(Instr::Jump(head));
                let end = code.len();
                code[head] = Instr::Branch {
                    cond: cond.clone(),
                    target: end,
                };
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Lit(Value),
    Punct(&'static str),
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Lit(v) => write!(f, "`{v}`"),
            Tok::Punct(p) => write!(f, "`{p}`"),
        }
    }
}

const PUNCTS: [&str; 21] = [
    "<-", "==", "!=", "<=", ">=", "&&", "||", "{", "}", "(", ")", "[", "]", ";", "=", "<", ">", "+", "!", ".", ",",
];

fn tokenize(text: &str) -> Result<Vec<(Tok, usize)>, ProgramError> {
    let mut out = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let src = raw.split('#').next().unwrap_or("");
        let bytes = src.as_bytes();
        let mut i = 0;
        let err = |reason: String| ProgramError { line, reason };
        while i < bytes.len() {
            let c = bytes[i] as char;
            if c.is_whitespace() {
                i += 1;
            } else if c == '\'' {
                let close = src[i + 1..]
                    .find('\'')
                    .ok_or_else(|| err("unterminated symbol".into()))?;
                let lit = &src[i..i + close + 2];
                let v = lit.parse().map_err(|e| err(format!("{e}")))?;
                out.push((Tok::Lit(v), line));
                i += close + 2;
            } else if c.is_ascii_digit() || (c == '-' && bytes.get(i + 1).is_some_and(u8::is_ascii_digit)) {
                let start = i;
                i += 1;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let n: i64 = src[start..i]
                    .parse()
                    .map_err(|_| err(format!("bad integer `{}`", &src[start..i])))?;
                out.push((Tok::Lit(Value::Int(n)), line));
            } else if c.is_ascii_alphabetic() || c == '_' {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                let word = &src[start..i];
                let tok = match word {
                    "null" => Tok::Lit(Value::Null),
                    "EMPTY" => Tok::Lit(Value::Empty),
                    "unit" => Tok::Lit(Value::Unit),
                    _ => Tok::Ident(word.to_string()),
                };
                out.push((tok, line));
            } else if let Some(p) = PUNCTS.iter().find(|p| src[i..].starts_with(**p)) {
                out.push((Tok::Punct(p), line));
                i += p.len();
            } else {
                return Err(err(format!("unexpected character `{c}`")));
            }
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl Parser {
    fn line(&self) -> usize {
        self.toks
            .get(self.pos)
            .or_else(|| self.toks.last())
            .map_or(1, |t| t.1)
    }

    fn err<T>(&self, reason: impl Into<String>) -> Result<T, ProgramError> {
        Err(ProgramError {
            line: self.line(),
            reason: reason.into(),
        })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    fn peek_punct(&self, p: &str) -> bool {
        matches!(self.peek(), Some(Tok::Punct(q)) if *q == p)
    }

    fn peek_keyword(&self, k: &str) -> bool {
        matches!(self.peek(), Some(Tok::Ident(w)) if w == k)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|t| t.0.clone());
        self.pos += 1;
        t
    }

    fn eat_punct(&mut self, p: &str) -> bool {
        if self.peek_punct(p) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_punct(&mut self, p: &str) -> Result<(), ProgramError> {
        if self.eat_punct(p) {
            Ok(())
        } else {
            match self.peek() {
                Some(t) => self.err(format!("expected `{p}`, found {t}")),
                None => self.err(format!("expected `{p}`, found end of input")),
            }
        }
    }

    fn ident(&mut self) -> Result<String, ProgramError> {
        match self.peek().cloned() {
            Some(Tok::Ident(s)) => {
                self.pos += 1;
                Ok(s)
            }
            Some(t) => self.err(format!("expected a name, found {t}")),
            None => self.err("expected a name, found end of input"),
        }
    }

    fn program(&mut self) -> Result<Program, ProgramError> {
        let mut program = Program::default();
        while let Some(tok) = self.peek().cloned() {
            match tok {
                Tok::Ident(k) if k == "var" => {
                    self.pos += 1;
                    let name = self.ident()?;
                    self.expect_punct("=")?;
                    let v = match self.bump() {
                        Some(Tok::Lit(v)) => v,
                        _ => return self.err("`var` needs a literal initial value"),
                    };
                    if program.vars.iter().any(|(x, _)| *x == name) {
                        return self.err(format!("variable `{name}` declared twice"));
                    }
                    program.vars.push((name, v));
                    self.eat_punct(";");
                }
                Tok::Ident(k) if k == "thread" => {
                    self.pos += 1;
                    let body = self.block()?;
                    program.threads.push(body);
                }
                t => return self.err(format!("expected `var` or `thread`, found {t}")),
            }
        }
        Ok(program)
    }

    fn block(&mut self) -> Result<Vec<Stmt>, ProgramError> {
        self.expect_punct("{")?;
        let mut stmts = Vec::new();
        while !self.eat_punct("}") {
            if self.peek().is_none() {
                return self.err("unclosed `{`");
            }
            if self.eat_punct(";") {
                continue;
            }
            stmts.push(self.stmt()?);
        }
        Ok(stmts)
    }

    /// `OBJ.` prefix before a method or cell name.
    fn object_prefix(&mut self) -> Result<(), ProgramError> {
        self.ident()?;
        self.expect_punct(".")
    }

    fn cell(&mut self) -> Result<String, ProgramError> {
        let name = self.ident()?;
        if self.eat_punct("[") {
            let idx = match self.bump() {
                Some(Tok::Lit(Value::Int(n))) => n,
                _ => return self.err("cell index must be an integer"),
            };
            self.expect_punct("]")?;
            Ok(format!("{name}[{idx}]"))
        } else {
            Ok(name)
        }
    }

    fn stmt(&mut self) -> Result<Stmt, ProgramError> {
        let line = self.line();
        let kw = self.ident()?;
        match kw.as_str() {
            "call" => {
                // `call y = Q.M(..)` or `call Q.M(..)`.
                let target = if matches!(self.toks.get(self.pos + 1), Some((Tok::Punct("="), _))) {
                    let t = self.ident()?;
                    self.expect_punct("=")?;
                    Some(t)
                } else {
                    None
                };
                self.object_prefix()?;
                let method = self.ident()?;
                self.expect_punct("(")?;
                let arg = if self.peek_punct(")") {
                    None
                } else {
                    Some(self.expr()?)
                };
                self.expect_punct(")")?;
                Ok(Stmt::Call { target, method, arg })
            }
            "read" => {
                let target = self.ident()?;
                self.expect_punct("=")?;
                self.object_prefix()?;
                let cell = self.cell()?;
                Ok(Stmt::Read { target, cell })
            }
            "write" => {
                self.object_prefix()?;
                let cell = self.cell()?;
                self.expect_punct("<-")?;
                Ok(Stmt::Write {
                    cell,
                    expr: self.expr()?,
                })
            }
            "let" => {
                let var = self.ident()?;
                self.expect_punct("=")?;
                Ok(Stmt::Assign {
                    var,
                    expr: self.expr()?,
                })
            }
            "await" => Ok(Stmt::Atomic {
                guard: Some(self.cond()?),
                assigns: vec![],
            }),
            "atomic" => {
                let guard = if self.peek_keyword("when") {
                    self.pos += 1;
                    Some(self.cond()?)
                } else {
                    None
                };
                self.expect_punct("{")?;
                let mut assigns = Vec::new();
                while !self.eat_punct("}") {
                    if self.eat_punct(";") {
                        continue;
                    }
                    let var = self.ident()?;
                    self.expect_punct("=")?;
                    assigns.push((var, self.expr()?));
                }
                Ok(Stmt::Atomic { guard, assigns })
            }
            "if" => {
                let cond = self.cond()?;
                let then = self.block()?;
                let els = if self.peek_keyword("else") {
                    self.pos += 1;
                    self.block()?
                } else {
                    vec![]
                };
                Ok(Stmt::If { cond, then, els })
            }
            "while" => {
                let cond = self.cond()?;
                let body = self.block()?;
                Ok(Stmt::While { cond, body })
            }
            other => Err(ProgramError {
                line,
                reason: format!("unknown statement `{other}`"),
            }),
        }
    }

    fn expr(&mut self) -> Result<Expr, ProgramError> {
        let mut e = self.atom()?;
        while self.eat_punct("+") {
            e = Expr::Add(Box::new(e), Box::new(self.atom()?));
        }
        Ok(e)
    }

    fn atom(&mut self) -> Result<Expr, ProgramError> {
        match self.bump() {
            Some(Tok::Lit(v)) => Ok(Expr::Lit(v)),
            Some(Tok::Ident(x)) => Ok(Expr::Var(x)),
            Some(Tok::Punct("(")) => {
                let e = self.expr()?;
                self.expect_punct(")")?;
                Ok(e)
            }
            Some(t) => {
                self.pos -= 1;
                self.err(format!("expected an expression, found {t}"))
            }
            None => self.err("expected an expression, found end of input"),
        }
    }

    fn cond(&mut self) -> Result<Cond, ProgramError> {
        let mut c = self.conj()?;
        while self.eat_punct("||") {
            c = Cond::Or(Box::new(c), Box::new(self.conj()?));
        }
        Ok(c)
    }

    fn conj(&mut self) -> Result<Cond, ProgramError> {
        let mut c = self.neg()?;
        while self.eat_punct("&&") {
            c = Cond::And(Box::new(c), Box::new(self.neg()?));
        }
        Ok(c)
    }

    fn neg(&mut self) -> Result<Cond, ProgramError> {
        if self.eat_punct("!") {
            return Ok(Cond::Not(Box::new(self.neg()?)));
        }
        if self.peek_keyword("true") {
            self.pos += 1;
            return Ok(Cond::True);
        }
        if self.peek_keyword("false") {
            self.pos += 1;
            return Ok(Cond::False);
        }
        if self.peek_punct("(") {
            // Either a parenthesised condition or an expression operand.
            let save = self.pos;
            self.pos += 1;
            if let Ok(c) = self.cond() {
                if self.eat_punct(")") && !self.at_cmp() {
                    return Ok(c);
                }
            }
            self.pos = save;
        }
        let lhs = self.expr()?;
        let op = match self.bump() {
            Some(Tok::Punct("==")) => CmpOp::Eq,
            Some(Tok::Punct("!=")) => CmpOp::Ne,
            Some(Tok::Punct("<=")) => CmpOp::Le,
            Some(Tok::Punct("<")) => CmpOp::Lt,
            Some(Tok::Punct(">=")) => CmpOp::Ge,
            Some(Tok::Punct(">")) => CmpOp::Gt,
            _ => {
                self.pos -= 1;
                return self.err("expected a comparison");
            }
        };
        Ok(Cond::Cmp(op, lhs, self.expr()?))
    }

    fn at_cmp(&self) -> bool {
        ["==", "!=", "<=", "<", ">=", ">", "+"].iter().any(|p| self.peek_punct(p))
    }
}

pub fn parse_program(text: &str) -> Result<Program, ProgramError> {
    let toks = tokenize(text)?;
    Parser { toks, pos: 0 }.program()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_calls_reads_writes() {
        let p = parse_program(
            "var x = 'x'\n\
             thread { call y = Q.Dequeue() ; write Q.items[1] <- x }\n\
             thread { call Q.Enqueue('c'); read z = Q.items[2] }",
        )
        .unwrap();
        assert_eq!(p.vars, vec![("x".into(), Value::sym("x"))]);
        assert_eq!(
            p.threads[0],
            vec![
                Stmt::call(Some("y"), "Dequeue", None),
                Stmt::Write {
                    cell: "items[1]".into(),
                    expr: Expr::Var("x".into())
                },
            ]
        );
        assert_eq!(
            p.threads[1],
            vec![
                Stmt::call(None, "Enqueue", Some(Value::sym("c"))),
                Stmt::Read {
                    target: "z".into(),
                    cell: "items[2]".into()
                },
            ]
        );
        assert_eq!(p.methods(), vec!["Dequeue".to_string(), "Enqueue".to_string()]);
    }

    #[test]
    fn parses_control_flow() {
        let p = parse_program(
            "var i = 0\n\
             thread {\n\
               while i < 2 { let i = i + 1 }\n\
               if (i == 2) && !(i != 2) { atomic when true { a = 1; b = a } } else { await false }\n\
             }",
        )
        .unwrap();
        assert_eq!(p.threads[0].len(), 2);
        let Stmt::If { cond, then, els } = &p.threads[0][1] else {
            panic!("expected if");
        };
        let env: ClientState = [("i".to_string(), Value::Int(2))].into();
        assert!(cond.eval(&env).unwrap());
        assert!(matches!(&then[0], Stmt::Atomic { assigns, .. } if assigns.len() == 2));
        assert!(matches!(&els[0], Stmt::Atomic { guard: Some(Cond::False), .. }));
    }

    #[test]
    fn errors_name_the_line() {
        let e = parse_program("thread {\n  call Q.Enqueue('c')\n  jump\n}").unwrap_err();
        assert_eq!(e.line, 3);
        assert!(parse_program("thread { let x = }").is_err());
        assert!(parse_program("thread { call Q.Deq(").is_err());
        assert!(parse_program("var x = 1 var x = 2").is_err());
    }

    #[test]
    fn compiled_while_loops_back() {
        let t = CompiledThread::compile(&[Stmt::While {
            cond: Cond::True,
            body: vec![Stmt::Assign {
                var: "x".into(),
                expr: Expr::Lit(Value::Int(1)),
            }],
        }]);
        assert_eq!(t.code.len(), 3);
        assert_eq!(t.normalize(2), 0);
        assert!(matches!(t.code[0], Instr::Branch { target: 3, .. }));
    }

    #[test]
    fn evaluation_errors() {
        let env = ClientState::new();
        assert!(Expr::Var("nope".into()).eval(&env).is_err());
        let bad = Cond::Cmp(CmpOp::Lt, Expr::Lit(Value::sym("a")), Expr::Lit(Value::Int(1)));
        assert!(bad.eval(&env).is_err());
    }
}
