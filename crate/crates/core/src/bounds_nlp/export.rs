//! Plain-text model format.
//!
//! ```text
//! # model odd-torus
//! var z_none in [0.0000000000000000e0,1.0000000000000000e0]
//! # sum
//! con (+ z_none z_R ...) = 1.0000000000000000e0
//! obj max (min z_R.C.D.S z_none)
//! ```
//!
//! Expressions are prefix forms over `+ - * sqrt min`, variable names and
//! numbers written with 17 significant digits, so values survive a round
//! trip bit for bit. A `+` whose arguments are all variables, numbers or
//! `(* number variable)` reads back as an affine form. A `#` line directly
//! before a `con` names that constraint; other comments are ignored.

use std::collections::HashMap;
use std::fmt::Write as _;

use super::expr::{Expr, Lin};
use super::model::{Constraint, ModelKind, NlpModel, Rel, VarDecl};
use super::NlpError;

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn write_expr(out: &mut String, e: &Expr, names: &[VarDecl]) {
    match e {
        Expr::Num(v) => out.push_str(&num(*v)),
        Expr::Var(i) => out.push_str(&names[*i].name),
        Expr::Lin(l) => {
            out.push_str("(+");
            for &(i, c) in &l.terms {
                if c == 1.0 {
                    let _ = write!(out, " {}", names[i].name);
                } else {
                    let _ = write!(out, " (* {} {})", num(c), names[i].name);
                }
            }
            if l.constant != 0.0 {
                let _ = write!(out, " {}", num(l.constant));
            }
            out.push(')');
        }
        Expr::Add(xs) => write_op(out, "+", xs.iter(), names),
        Expr::Mul(xs) => write_op(out, "*", xs.iter(), names),
        Expr::Min(xs) => write_op(out, "min", xs.iter(), names),
        Expr::Sub(a, b) => write_op(out, "-", [a.as_ref(), b.as_ref()].into_iter(), names),
        Expr::Sqrt(a) => write_op(out, "sqrt", std::iter::once(a.as_ref()), names),
    }
}

fn write_op<'e>(out: &mut String, op: &str, args: impl Iterator<Item = &'e Expr>, names: &[VarDecl]) {
    out.push('(');
    out.push_str(op);
    for a in args {
        out.push(' ');
        write_expr(out, a, names);
    }
    out.push(')');
}

pub fn export_model(model: &NlpModel) -> String {
    let mut out = String::new();
    if let Some(kind) = model.kind {
        let _ = writeln!(out, "# model {kind}");
    }
    for v in &model.vars {
        let _ = writeln!(out, "var {} in [{},{}]", v.name, num(v.lo), num(v.hi));
    }
    for c in &model.constraints {
        let _ = writeln!(out, "# {}", c.name);
        out.push_str("con ");
        write_expr(&mut out, &c.lhs, &model.vars);
        out.push_str(match c.rel {
            Rel::Eq => " = ",
            Rel::Le => " <= ",
        });
        write_expr(&mut out, &c.rhs, &model.vars);
        out.push('\n');
    }
    out.push_str("obj max ");
    match model.objective.as_slice() {
        [single] => write_expr(&mut out, single, &model.vars),
        branches => write_op(&mut out, "min", branches.iter(), &model.vars),
    }
    out.push('\n');
    out
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Open,
    Close,
    Atom(String),
}

fn tokenize(s: &str) -> Vec<Token> {
    let mut tokens = vec![];
    let mut atom = String::new();
    let flush = |atom: &mut String, tokens: &mut Vec<Token>| {
        if !atom.is_empty() {
            tokens.push(Token::Atom(std::mem::take(atom)));
        }
    };
    for ch in s.chars() {
        match ch {
            '(' | ')' => {
                flush(&mut atom, &mut tokens);
                tokens.push(if ch == '(' { Token::Open } else { Token::Close });
            }
            c if c.is_whitespace() => flush(&mut atom, &mut tokens),
            c => atom.push(c),
        }
    }
    flush(&mut atom, &mut tokens);
    tokens
}

struct ExprParser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    vars: &'a HashMap<String, usize>,
}

impl ExprParser<'_> {
    fn next(&mut self) -> Result<Token, String> {
        let t = self.tokens.get(self.pos).cloned().ok_or("unexpected end of expression")?;
        self.pos += 1;
        Ok(t)
    }

    fn expr(&mut self) -> Result<Expr, String> {
        match self.next()? {
            Token::Close => Err("unexpected ')'".into()),
            Token::Atom(a) => self.atom(&a),
            Token::Open => {
                let op = match self.next()? {
                    Token::Atom(op) => op,
                    _ => return Err("expected an operator after '('".into()),
                };
                let mut args = vec![];
                loop {
                    if self.tokens.get(self.pos) == Some(&Token::Close) {
                        self.pos += 1;
                        break;
                    }
                    args.push(self.expr()?);
                }
                build(&op, args)
            }
        }
    }

    fn atom(&self, a: &str) -> Result<Expr, String> {
        if let Some(&i) = self.vars.get(a) {
            return Ok(Expr::Var(i));
        }
        a.parse::<f64>()
            .map(Expr::Num)
            .map_err(|_| format!("unknown variable or bad number {a:?}"))
    }
}

fn build(op: &str, mut args: Vec<Expr>) -> Result<Expr, String> {
    match op {
        "+" => Ok(as_lin(&args).map(Expr::Lin).unwrap_or(Expr::Add(args))),
        "*" => Ok(Expr::Mul(args)),
        "min" if !args.is_empty() => Ok(Expr::Min(args)),
        "-" if args.len() == 2 => {
            let b = args.pop().expect("two args");
            let a = args.pop().expect("two args");
            Ok(Expr::sub(a, b))
        }
        "sqrt" if args.len() == 1 => Ok(Expr::sqrt(args.pop().expect("one arg"))),
        "min" | "-" | "sqrt" => Err(format!("wrong number of arguments for {op}")),
        other => Err(format!("unknown operator {other:?}")),
    }
}

fn as_lin(args: &[Expr]) -> Option<Lin> {
    let mut lin = Lin::new(vec![], 0.0);
    for a in args {
        match a {
            Expr::Var(i) => lin.terms.push((*i, 1.0)),
            Expr::Num(v) => lin.constant += v,
            Expr::Mul(f) => match f.as_slice() {
                [Expr::Num(c), Expr::Var(i)] => lin.terms.push((*i, *c)),
                _ => return None,
            },
            _ => return None,
        }
    }
    Some(lin)
}

fn parse_bound(s: &str) -> Option<(f64, f64)> {
    let inner = s.strip_prefix('[')?.strip_suffix(']')?;
    let (lo, hi) = inner.split_once(',')?;
    Some((lo.trim().parse().ok()?, hi.trim().parse().ok()?))
}

pub fn parse_model(text: &str) -> Result<NlpModel, NlpError> {
    let mut vars: Vec<VarDecl> = vec![];
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut constraints = vec![];
    let mut objective = None;
    let mut kind = None;
    let mut pending_name: Option<String> = None;

    for (ln, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let err = |message: String| NlpError::Parse { line: ln + 1, message };
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            let comment = comment.trim();
            if let Some(k) = comment.strip_prefix("model ") {
                kind = k.trim().parse::<ModelKind>().ok();
            } else {
                pending_name = Some(comment.to_string());
            }
            continue;
        }
        let name = pending_name.take();
        let parse_expr = |src: &str| -> Result<Expr, NlpError> {
            let mut p = ExprParser {
                tokens: tokenize(src),
                pos: 0,
                vars: &index,
            };
            let e = p.expr().map_err(err)?;
            if p.pos != p.tokens.len() {
                return Err(err("trailing tokens after expression".into()));
            }
            Ok(e)
        };
        if let Some(rest) = line.strip_prefix("var ") {
            let (vname, bound) = rest
                .split_once(" in ")
                .ok_or_else(|| err("expected `var <name> in [lo,hi]`".into()))?;
            let vname = vname.trim().to_string();
            let (lo, hi) = parse_bound(bound.trim()).ok_or_else(|| err(format!("bad bounds {bound:?}")))?;
            if index.insert(vname.clone(), vars.len()).is_some() {
                return Err(err(format!("duplicate variable {vname}")));
            }
            vars.push(VarDecl { name: vname, lo, hi });
        } else if let Some(rest) = line.strip_prefix("con ") {
            let (lhs, rel, rhs) = if let Some((l, r)) = rest.split_once(" <= ") {
                (l, Rel::Le, r)
            } else if let Some((l, r)) = rest.split_once(" = ") {
                (l, Rel::Eq, r)
            } else {
                return Err(err("expected `=` or `<=`".into()));
            };
            constraints.push(Constraint {
                name: name.unwrap_or_else(|| format!("c{}", constraints.len())),
                lhs: parse_expr(lhs)?,
                rel,
                rhs: parse_expr(rhs)?,
            });
        } else if let Some(rest) = line.strip_prefix("obj max ") {
            objective = Some(match parse_expr(rest)? {
                Expr::Min(branches) => branches,
                single => vec![single],
            });
        } else {
            return Err(err(format!("unrecognized line {line:?}")));
        }
    }
    let objective = objective.ok_or(NlpError::Parse {
        line: text.lines().count(),
        message: "missing `obj max` line".into(),
    })?;
    Ok(NlpModel {
        kind,
        vars,
        aggregates: vec![],
        constraints,
        objective,
    })
}
