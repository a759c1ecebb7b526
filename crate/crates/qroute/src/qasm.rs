//! OpenQASM 2.0 subset: parser and emitter.
//!
//! Supported input: the 2.0 header, `include "qelib1.inc";`, one or more
//! `qreg`/`creg` declarations, the gates
//! `cx h x y z s sdg t tdg u1 u2 u3 rx ry rz`, `measure`, `barrier` and
//! `//` comments. Multiple quantum registers are flattened into one index
//! space in declaration order; `barrier` is dropped with a warning; measures
//! are deferred to the end of the circuit. Errors carry line and column.

use std::fmt::Write as _;

use thiserror::Error;

use crate::circuit::{
    Circuit, Gate, GateKind, Measure, PassthroughGate, PassthroughPlan, RegSpan, Space,
};
use crate::router::{PhysGate, PhysOp, RoutedCircuit};

#[derive(Debug, Error)]
#[error("line {line}, column {col}: {kind}")]
pub struct QasmError {
    pub line: usize,
    pub col: usize,
    pub kind: QasmErrorKind,
}

#[derive(Debug, Error)]
pub enum QasmErrorKind {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("unsupported gate `{0}`")]
    UnsupportedGate(String),
    #[error("`{0}` is a 3-qubit gate; decompose into elementary gates first")]
    ThreeQubitGate(String),
    #[error("qubit index {0} out of range for register `{1}` of size {2}")]
    IndexOutOfRange(usize, String, usize),
    #[error("unknown register `{0}`")]
    UnknownRegister(String),
    #[error("duplicate register `{0}`")]
    DuplicateRegister(String),
    #[error("gate `{0}` expects {1} parameter(s), got {2}")]
    ParamCount(String, usize, usize),
    #[error("gate `{0}` expects {1} qubit argument(s), got {2}")]
    ArgCount(String, usize, usize),
    #[error("CNOT control and target must differ")]
    DegenerateCnot,
    #[error("broadcast over registers of different sizes")]
    BroadcastMismatch,
    #[error("no qreg declared before first operation")]
    NoQreg,
}

/// Parse result: the full logical circuit plus everything emission needs.
#[derive(Debug, Clone)]
pub struct Parsed {
    pub circuit: Circuit,
    pub plan: PassthroughPlan,
}

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Int(usize),
    Real(f64),
    Str(String),
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Semi,
    Arrow,
    Plus,
    Minus,
    Star,
    Slash,
    Eof,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str) -> Result<Vec<Token>, QasmError> {
    let mut out = Vec::new();
    let mut line = 1usize;
    let mut col = 1usize;
    let mut chars = text.chars().peekable();

    macro_rules! err {
        ($l:expr, $c:expr, $msg:expr) => {
            return Err(QasmError {
                line: $l,
                col: $c,
                kind: QasmErrorKind::Syntax($msg.to_string()),
            })
        };
    }

    while let Some(&ch) = chars.peek() {
        let (tline, tcol) = (line, col);
        match ch {
            '\n' => {
                chars.next();
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => {
                chars.next();
                col += 1;
            }
            '/' => {
                chars.next();
                col += 1;
                if chars.peek() == Some(&'/') {
                    while let Some(&c) = chars.peek() {
                        if c == '\n' {
                            break;
                        }
                        chars.next();
                        col += 1;
                    }
                } else {
                    out.push(Token {
                        tok: Tok::Slash,
                        line: tline,
                        col: tcol,
                    });
                }
            }
            '"' => {
                chars.next();
                col += 1;
                let mut s = String::new();
                loop {
                    match chars.next() {
                        Some('"') => {
                            col += 1;
                            break;
                        }
                        Some('\n') | None => err!(tline, tcol, "unterminated string"),
                        Some(c) => {
                            s.push(c);
                            col += 1;
                        }
                    }
                }
                out.push(Token {
                    tok: Tok::Str(s),
                    line: tline,
                    col: tcol,
                });
            }
            c if c.is_ascii_digit() || c == '.' => {
                let mut s = String::new();
                let mut is_real = false;
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_digit() {
                        s.push(c);
                        chars.next();
                        col += 1;
                    } else if c == '.' || c == 'e' || c == 'E' {
                        is_real = true;
                        s.push(c);
                        chars.next();
                        col += 1;
                        if (c == 'e' || c == 'E')
                            && matches!(chars.peek(), Some('+') | Some('-'))
                        {
                            s.push(chars.next().unwrap());
                            col += 1;
                        }
                    } else {
                        break;
                    }
                }
                let tok = if is_real {
                    match s.parse::<f64>() {
                        Ok(v) => Tok::Real(v),
                        Err(_) => err!(tline, tcol, format!("bad number `{s}`")),
                    }
                } else {
                    match s.parse::<usize>() {
                        Ok(v) => Tok::Int(v),
                        Err(_) => err!(tline, tcol, format!("bad integer `{s}`")),
                    }
                };
                out.push(Token {
                    tok,
                    line: tline,
                    col: tcol,
                });
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut s = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' {
                        s.push(c);
                        chars.next();
                        col += 1;
                    } else {
                        break;
                    }
                }
                out.push(Token {
                    tok: Tok::Ident(s),
                    line: tline,
                    col: tcol,
                });
            }
            '-' => {
                chars.next();
                col += 1;
                if chars.peek() == Some(&'>') {
                    chars.next();
                    col += 1;
                    out.push(Token {
                        tok: Tok::Arrow,
                        line: tline,
                        col: tcol,
                    });
                } else {
                    out.push(Token {
                        tok: Tok::Minus,
                        line: tline,
                        col: tcol,
                    });
                }
            }
            _ => {
                let tok = match ch {
                    '(' => Tok::LParen,
                    ')' => Tok::RParen,
                    '[' => Tok::LBracket,
                    ']' => Tok::RBracket,
                    ',' => Tok::Comma,
                    ';' => Tok::Semi,
                    '+' => Tok::Plus,
                    '*' => Tok::Star,
                    _ => err!(line, col, format!("unexpected character `{ch}`")),
                };
                chars.next();
                col += 1;
                out.push(Token {
                    tok,
                    line: tline,
                    col: tcol,
                });
            }
        }
    }
    out.push(Token {
        tok: Tok::Eof,
        line,
        col,
    });
    Ok(out)
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

/// Gate argument: a single indexed qubit or a whole register.
enum Arg {
    Indexed(String, usize),
    Whole(String),
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn next(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, kind: QasmErrorKind) -> QasmError {
        let t = self.peek();
        QasmError {
            line: t.line,
            col: t.col,
            kind,
        }
    }

    fn error_at(&self, t: &Token, kind: QasmErrorKind) -> QasmError {
        QasmError {
            line: t.line,
            col: t.col,
            kind,
        }
    }

    fn syntax(&self, msg: impl Into<String>) -> QasmError {
        self.error(QasmErrorKind::Syntax(msg.into()))
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<Token, QasmError> {
        if self.peek().tok == tok {
            Ok(self.next())
        } else {
            Err(self.syntax(format!("expected {what}")))
        }
    }

    fn expect_ident(&mut self, what: &str) -> Result<(String, Token), QasmError> {
        let t = self.next();
        match &t.tok {
            Tok::Ident(s) => Ok((s.clone(), t.clone())),
            _ => Err(self.error_at(&t, QasmErrorKind::Syntax(format!("expected {what}")))),
        }
    }

    fn expect_int(&mut self, what: &str) -> Result<usize, QasmError> {
        let t = self.next();
        match t.tok {
            Tok::Int(v) => Ok(v),
            _ => Err(self.error_at(&t, QasmErrorKind::Syntax(format!("expected {what}")))),
        }
    }

    fn parse_arg(&mut self) -> Result<Arg, QasmError> {
        let (name, _) = self.expect_ident("register name")?;
        if self.peek().tok == Tok::LBracket {
            self.next();
            let idx = self.expect_int("qubit index")?;
            self.expect(Tok::RBracket, "`]`")?;
            Ok(Arg::Indexed(name, idx))
        } else {
            Ok(Arg::Whole(name))
        }
    }

    // expr := term (('+'|'-') term)* ; term := factor (('*'|'/') factor)*
    // factor := 'pi' | number | '-' factor | '(' expr ')'
    fn parse_expr(&mut self) -> Result<f64, QasmError> {
        let mut v = self.parse_term()?;
        loop {
            match self.peek().tok {
                Tok::Plus => {
                    self.next();
                    v += self.parse_term()?;
                }
                Tok::Minus => {
                    self.next();
                    v -= self.parse_term()?;
                }
                _ => return Ok(v),
            }
        }
    }

    fn parse_term(&mut self) -> Result<f64, QasmError> {
        let mut v = self.parse_factor()?;
        loop {
            match self.peek().tok {
                Tok::Star => {
                    self.next();
                    v *= self.parse_factor()?;
                }
                Tok::Slash => {
                    self.next();
                    v /= self.parse_factor()?;
                }
                _ => return Ok(v),
            }
        }
    }

    fn parse_factor(&mut self) -> Result<f64, QasmError> {
        let t = self.next();
        match &t.tok {
            Tok::Int(v) => Ok(*v as f64),
            Tok::Real(v) => Ok(*v),
            Tok::Ident(s) if s == "pi" => Ok(std::f64::consts::PI),
            Tok::Minus => Ok(-self.parse_factor()?),
            Tok::LParen => {
                let v = self.parse_expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(v)
            }
            _ => Err(self.error_at(&t, QasmErrorKind::Syntax("expected parameter".into()))),
        }
    }
}

/// Number of angle parameters for each supported single-qubit gate.
fn single_qubit_params(name: &str) -> Option<usize> {
    match name {
        "h" | "x" | "y" | "z" | "s" | "sdg" | "t" | "tdg" => Some(0),
        "u1" | "rx" | "ry" | "rz" => Some(1),
        "u2" => Some(2),
        "u3" => Some(3),
        _ => None,
    }
}

fn is_three_qubit(name: &str) -> bool {
    matches!(name, "ccx" | "cswap" | "ccz" | "toffoli" | "fredkin")
}

/// Parse an OpenQASM 2.0 subset program into a logical circuit plus its
/// passthrough plan.
pub fn parse_qasm(text: &str) -> Result<Parsed, QasmError> {
    let tokens = lex(text)?;
    let mut p = Parser { tokens, pos: 0 };

    // Header.
    let (kw, t) = p.expect_ident("OPENQASM header")?;
    if kw != "OPENQASM" {
        return Err(p.error_at(&t, QasmErrorKind::Syntax("expected OPENQASM header".into())));
    }
    match p.next().tok {
        Tok::Real(v) if (v - 2.0).abs() < 1e-9 => {}
        Tok::Real(v) => {
            return Err(p.syntax(format!("unsupported OPENQASM version {v}")));
        }
        _ => return Err(p.syntax("expected version number")),
    }
    p.expect(Tok::Semi, "`;`")?;

    let mut qregs: Vec<RegSpan> = Vec::new();
    let mut cregs: Vec<(String, usize)> = Vec::new();
    let mut gates: Vec<Gate> = Vec::new();
    let mut items: Vec<PassthroughGate> = Vec::new();
    let mut measures: Vec<Measure> = Vec::new();
    let mut warnings: Vec<String> = Vec::new();
    // Anchor tracker: index of the last core CNOT on each flattened qubit.
    let mut last_core: Vec<Option<usize>> = Vec::new();
    let mut core_count = 0usize;

    let lookup_qubit = |qregs: &[RegSpan],
                        p: &Parser,
                        t: &Token,
                        name: &str,
                        idx: usize|
     -> Result<usize, QasmError> {
        let reg = qregs
            .iter()
            .find(|r| r.name == name)
            .ok_or_else(|| p.error_at(t, QasmErrorKind::UnknownRegister(name.to_string())))?;
        if idx >= reg.size {
            return Err(p.error_at(
                t,
                QasmErrorKind::IndexOutOfRange(idx, name.to_string(), reg.size),
            ));
        }
        Ok(reg.offset + idx)
    };

    loop {
        let t = p.peek().clone();
        let (name, kw_token) = match &t.tok {
            Tok::Eof => break,
            Tok::Ident(s) => (s.clone(), t.clone()),
            _ => return Err(p.syntax("expected statement")),
        };
        p.next();

        match name.as_str() {
            "include" => {
                match p.next().tok {
                    Tok::Str(_) => {}
                    _ => return Err(p.syntax("expected include path string")),
                }
                p.expect(Tok::Semi, "`;`")?;
            }
            "qreg" => {
                let (rname, rt) = p.expect_ident("register name")?;
                p.expect(Tok::LBracket, "`[`")?;
                let size = p.expect_int("register size")?;
                p.expect(Tok::RBracket, "`]`")?;
                p.expect(Tok::Semi, "`;`")?;
                if qregs.iter().any(|r| r.name == rname) {
                    return Err(p.error_at(&rt, QasmErrorKind::DuplicateRegister(rname)));
                }
                let offset = qregs.iter().map(|r| r.size).sum();
                qregs.push(RegSpan {
                    name: rname,
                    offset,
                    size,
                });
                last_core.resize(offset + size, None);
            }
            "creg" => {
                let (rname, rt) = p.expect_ident("register name")?;
                p.expect(Tok::LBracket, "`[`")?;
                let size = p.expect_int("register size")?;
                p.expect(Tok::RBracket, "`]`")?;
                p.expect(Tok::Semi, "`;`")?;
                if cregs.iter().any(|(n, _)| n == &rname) {
                    return Err(p.error_at(&rt, QasmErrorKind::DuplicateRegister(rname)));
                }
                cregs.push((rname, size));
            }
            "barrier" => {
                warnings.push(format!(
                    "line {}: barrier dropped (no fences in the transformation model)",
                    kw_token.line
                ));
                // Consume arguments up to `;`.
                while p.peek().tok != Tok::Semi && p.peek().tok != Tok::Eof {
                    p.next();
                }
                p.expect(Tok::Semi, "`;`")?;
            }
            "measure" => {
                let src_tok = p.peek().clone();
                let src = p.parse_arg()?;
                p.expect(Tok::Arrow, "`->`")?;
                let dst_tok = p.peek().clone();
                let dst = p.parse_arg()?;
                p.expect(Tok::Semi, "`;`")?;
                match (src, dst) {
                    (Arg::Indexed(qn, qi), Arg::Indexed(cn, ci)) => {
                        let qubit = lookup_qubit(&qregs, &p, &src_tok, &qn, qi)?;
                        if !cregs.iter().any(|(n, _)| n == &cn) {
                            return Err(
                                p.error_at(&dst_tok, QasmErrorKind::UnknownRegister(cn))
                            );
                        }
                        measures.push(Measure {
                            qubit,
                            creg: cn,
                            bit: ci,
                        });
                    }
                    (Arg::Whole(qn), Arg::Whole(cn)) => {
                        let qreg = qregs
                            .iter()
                            .find(|r| r.name == qn)
                            .ok_or_else(|| {
                                p.error_at(&src_tok, QasmErrorKind::UnknownRegister(qn.clone()))
                            })?
                            .clone();
                        let csize = cregs
                            .iter()
                            .find(|(n, _)| n == &cn)
                            .ok_or_else(|| {
                                p.error_at(&dst_tok, QasmErrorKind::UnknownRegister(cn.clone()))
                            })?
                            .1;
                        if csize != qreg.size {
                            return Err(
                                p.error_at(&src_tok, QasmErrorKind::BroadcastMismatch)
                            );
                        }
                        for i in 0..qreg.size {
                            measures.push(Measure {
                                qubit: qreg.offset + i,
                                creg: cn.clone(),
                                bit: i,
                            });
                        }
                    }
                    _ => return Err(p.error_at(&src_tok, QasmErrorKind::BroadcastMismatch)),
                }
            }
            "cx" | "CX" => {
                if qregs.is_empty() {
                    return Err(p.error_at(&kw_token, QasmErrorKind::NoQreg));
                }
                let ct = p.peek().clone();
                let control = match p.parse_arg()? {
                    Arg::Indexed(n, i) => lookup_qubit(&qregs, &p, &ct, &n, i)?,
                    Arg::Whole(_) => {
                        return Err(p.error_at(
                            &ct,
                            QasmErrorKind::Syntax("cx requires indexed qubits".into()),
                        ))
                    }
                };
                p.expect(Tok::Comma, "`,`")?;
                let tt = p.peek().clone();
                let target = match p.parse_arg()? {
                    Arg::Indexed(n, i) => lookup_qubit(&qregs, &p, &tt, &n, i)?,
                    Arg::Whole(_) => {
                        return Err(p.error_at(
                            &tt,
                            QasmErrorKind::Syntax("cx requires indexed qubits".into()),
                        ))
                    }
                };
                p.expect(Tok::Semi, "`;`")?;
                if control == target {
                    return Err(p.error_at(&kw_token, QasmErrorKind::DegenerateCnot));
                }
                gates.push(Gate::cnot(control, target));
                last_core[control] = Some(core_count);
                last_core[target] = Some(core_count);
                core_count += 1;
            }
            other => {
                if is_three_qubit(other) {
                    return Err(
                        p.error_at(&kw_token, QasmErrorKind::ThreeQubitGate(other.to_string()))
                    );
                }
                let Some(nparams) = single_qubit_params(other) else {
                    return Err(p.error_at(
                        &kw_token,
                        QasmErrorKind::UnsupportedGate(other.to_string()),
                    ));
                };
                if qregs.is_empty() {
                    return Err(p.error_at(&kw_token, QasmErrorKind::NoQreg));
                }
                let mut params = Vec::new();
                if p.peek().tok == Tok::LParen {
                    p.next();
                    if p.peek().tok != Tok::RParen {
                        params.push(p.parse_expr()?);
                        while p.peek().tok == Tok::Comma {
                            p.next();
                            params.push(p.parse_expr()?);
                        }
                    }
                    p.expect(Tok::RParen, "`)`")?;
                }
                if params.len() != nparams {
                    return Err(p.error_at(
                        &kw_token,
                        QasmErrorKind::ParamCount(other.to_string(), nparams, params.len()),
                    ));
                }
                let at = p.peek().clone();
                let mut args = vec![p.parse_arg()?];
                while p.peek().tok == Tok::Comma {
                    p.next();
                    args.push(p.parse_arg()?);
                }
                p.expect(Tok::Semi, "`;`")?;
                if args.len() != 1 {
                    return Err(p.error_at(
                        &kw_token,
                        QasmErrorKind::ArgCount(other.to_string(), 1, args.len()),
                    ));
                }
                let qubits: Vec<usize> = match &args[0] {
                    Arg::Indexed(n, i) => vec![lookup_qubit(&qregs, &p, &at, n, *i)?],
                    Arg::Whole(n) => {
                        let reg = qregs
                            .iter()
                            .find(|r| r.name == n.as_str())
                            .ok_or_else(|| {
                                p.error_at(&at, QasmErrorKind::UnknownRegister(n.clone()))
                            })?;
                        (reg.offset..reg.offset + reg.size).collect()
                    }
                };
                for q in qubits {
                    let kind = if other == "h" {
                        GateKind::H { target: q }
                    } else {
                        GateKind::Other {
                            name: other.to_string(),
                            params: params.clone(),
                            qubits: vec![q],
                        }
                    };
                    items.push(PassthroughGate {
                        kind: kind.clone(),
                        qubit: q,
                        anchor: last_core[q],
                    });
                    gates.push(Gate::source(kind));
                }
            }
        }
    }

    let num_qubits: usize = qregs.iter().map(|r| r.size).sum();
    if num_qubits == 0 {
        // A program with no qreg: only valid when it also has no operations.
        if !gates.is_empty() || !measures.is_empty() {
            return Err(p.error(QasmErrorKind::NoQreg));
        }
    }

    let circuit = Circuit {
        num_qubits,
        gates,
        space: Space::Logical,
    };
    let plan = PassthroughPlan {
        items,
        measures,
        cregs,
        flattening: qregs,
        warnings,
    };
    Ok(Parsed { circuit, plan })
}

// ---------------------------------------------------------------------------
// Emission
// ---------------------------------------------------------------------------

fn fmt_gate(out: &mut String, kind: &GateKind, wire_of: impl Fn(usize) -> usize) {
    match kind {
        GateKind::Cnot { control, target } => {
            let _ = writeln!(out, "cx q[{}],q[{}];", wire_of(*control), wire_of(*target));
        }
        GateKind::H { target } => {
            let _ = writeln!(out, "h q[{}];", wire_of(*target));
        }
        GateKind::Other {
            name,
            params,
            qubits,
        } => {
            if params.is_empty() {
                let _ = writeln!(out, "{} q[{}];", name, wire_of(qubits[0]));
            } else {
                let ps: Vec<String> = params.iter().map(|v| format!("{v}")).collect();
                let _ = writeln!(out, "{}({}) q[{}];", name, ps.join(","), wire_of(qubits[0]));
            }
        }
    }
}

/// Emit a circuit as-is (one `q` register, gates in order). Used for
/// generated logical circuits.
pub fn emit_plain(circuit: &Circuit) -> String {
    let mut out = String::from("OPENQASM 2.0;\ninclude \"qelib1.inc\";\n");
    let _ = writeln!(out, "qreg q[{}];", circuit.num_qubits);
    for g in &circuit.gates {
        fmt_gate(&mut out, &g.kind, |q| q);
    }
    out
}

/// Emit a routed physical circuit. Each passthrough single-qubit gate lands
/// on the physical wire carrying its logical qubit at its anchor point;
/// measures are re-emitted at the end through the final mapping.
pub fn emit_routed(routed: &RoutedCircuit, plan: &PassthroughPlan) -> String {
    let mut out = String::from("OPENQASM 2.0;\ninclude \"qelib1.inc\";\n");
    let _ = writeln!(out, "qreg q[{}];", routed.num_nodes);
    for (name, size) in &plan.cregs {
        let _ = writeln!(out, "creg {name}[{size}];");
    }

    // Group passthroughs by anchor, preserving source order.
    let mut at_start: Vec<&PassthroughGate> = Vec::new();
    let mut by_anchor: Vec<Vec<&PassthroughGate>> = vec![Vec::new(); routed.core_len()];
    for item in &plan.items {
        match item.anchor {
            None => at_start.push(item),
            Some(k) => by_anchor[k].push(item),
        }
    }

    // Current physical location of each logical qubit.
    let mut loc: Vec<usize> = routed.tau_ini.assignments().to_vec();
    for item in &at_start {
        fmt_gate(&mut out, &item.kind, |_| loc[item.qubit]);
    }

    let emit_phys = |out: &mut String, g: &PhysGate| match *g {
        PhysGate::Cnot { control, target } => {
            let _ = writeln!(out, "cx q[{control}],q[{target}];");
        }
        PhysGate::H { qubit } => {
            let _ = writeln!(out, "h q[{qubit}];");
        }
    };

    for op in &routed.ops {
        match op {
            PhysOp::Swap { u, v, gates } => {
                for g in gates {
                    emit_phys(&mut out, g);
                }
                for l in loc.iter_mut() {
                    if *l == *u {
                        *l = *v;
                    } else if *l == *v {
                        *l = *u;
                    }
                }
            }
            PhysOp::Source { core_idx, gate } => {
                emit_phys(&mut out, gate);
                for item in &by_anchor[*core_idx] {
                    fmt_gate(&mut out, &item.kind, |_| loc[item.qubit]);
                }
            }
            PhysOp::Reversal { core_idx, gates } | PhysOp::Remote { core_idx, gates, .. } => {
                for g in gates {
                    emit_phys(&mut out, g);
                }
                for item in &by_anchor[*core_idx] {
                    fmt_gate(&mut out, &item.kind, |_| loc[item.qubit]);
                }
            }
        }
    }

    for m in &plan.measures {
        let _ = writeln!(out, "measure q[{}] -> {}[{}];", loc[m.qubit], m.creg, m.bit);
    }
    out
}
