//! Relational expressions: syntax tree, surface parser and evaluator.
//!
//! Surface syntax, loosest binding first:
//!
//! ```text
//! expr    := union ('+' union)*              relational sum
//! union   := inter (('u' | '|') inter)*
//! inter   := comp ('&' comp)*
//! comp    := postfix ('o' postfix)*          composition
//! postfix := primary ('^' NUM)*              power
//! primary := '(' expr ')' | 0 | diag | full | NAME
//!          | conv(e) | tc(e) | bar(e) | cc(e) | adm(e) | tol(e) | cg(e)
//!          | alt(e, e, NUM)                  alternating composition
//!          | NAME(e)                         operator application
//! ```

use std::cell::RefCell;
use std::collections::HashMap;
use std::fmt;

use crate::admissible::{
    admissible_closure, compatible_closure, congruence_closure, is_admissible, tolerance_closure,
    AdmissibleRelation,
};
use crate::algebra::FiniteAlgebra;
use crate::error::{Error, Result};
use crate::operator::{apply_operator, RelationOperator};
use crate::relation::BinaryRelation;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum RelExpr {
    Var(String),
    Diag,
    Full,
    Compose(Box<RelExpr>, Box<RelExpr>),
    ComposeN(Box<RelExpr>, Box<RelExpr>, usize),
    Power(Box<RelExpr>, usize),
    Converse(Box<RelExpr>),
    Union(Box<RelExpr>, Box<RelExpr>),
    Intersect(Box<RelExpr>, Box<RelExpr>),
    /// Least compatible relation containing the argument (no diagonal).
    CompatibleClosure(Box<RelExpr>),
    /// Least reflexive compatible relation containing the argument.
    AdmissibleClosure(Box<RelExpr>),
    ToleranceClosure(Box<RelExpr>),
    TransitiveClosure(Box<RelExpr>),
    CongruenceClosure(Box<RelExpr>),
    Sum(Box<RelExpr>, Box<RelExpr>),
    OperatorApp(String, Box<RelExpr>),
}

impl RelExpr {
    pub fn parse(text: &str) -> Result<RelExpr> {
        let tokens = tokenize(text)?;
        let mut parser = Parser { tokens, pos: 0 };
        let expr = parser.sum()?;
        match parser.peek() {
            None => Ok(expr),
            Some((offset, tok)) => Err(Error::Parse {
                offset,
                message: format!("unexpected {tok:?}"),
            }),
        }
    }

    pub fn var(name: &str) -> RelExpr {
        RelExpr::Var(name.to_string())
    }

    /// Names of free relation variables, sorted and deduplicated.
    pub fn variables(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out.sort();
        out.dedup();
        out
    }

    fn collect_vars(&self, out: &mut Vec<String>) {
        use RelExpr::*;
        match self {
            Var(name) => out.push(name.clone()),
            Diag | Full => {}
            Compose(a, b) | ComposeN(a, b, _) | Union(a, b) | Intersect(a, b) | Sum(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Power(a, _)
            | Converse(a)
            | CompatibleClosure(a)
            | AdmissibleClosure(a)
            | ToleranceClosure(a)
            | TransitiveClosure(a)
            | CongruenceClosure(a)
            | OperatorApp(_, a) => a.collect_vars(out),
        }
    }
}

impl fmt::Display for RelExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use RelExpr::*;
        match self {
            Var(name) => f.write_str(name),
            Diag => f.write_str("diag"),
            Full => f.write_str("full"),
            Compose(a, b) => write!(f, "({a} o {b})"),
            ComposeN(a, b, n) => write!(f, "alt({a}, {b}, {n})"),
            Power(a, n) => write!(f, "({a})^{n}"),
            Converse(a) => write!(f, "conv({a})"),
            Union(a, b) => write!(f, "({a} u {b})"),
            Intersect(a, b) => write!(f, "({a} & {b})"),
            CompatibleClosure(a) => write!(f, "bar({a})"),
            AdmissibleClosure(a) => write!(f, "adm({a})"),
            ToleranceClosure(a) => write!(f, "tol({a})"),
            TransitiveClosure(a) => write!(f, "tc({a})"),
            CongruenceClosure(a) => write!(f, "cg({a})"),
            Sum(a, b) => write!(f, "({a} + {b})"),
            OperatorApp(name, a) => write!(f, "{name}({a})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Ident(String),
    Num(usize),
    LParen,
    RParen,
    Comma,
    Caret,
    Plus,
    Amp,
    Pipe,
}

fn tokenize(text: &str) -> Result<Vec<(usize, Token)>> {
    let mut out = Vec::new();
    let bytes = text.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        let start = i;
        match c {
            c if c.is_whitespace() => {
                i += 1;
                continue;
            }
            '(' => out.push((start, Token::LParen)),
            ')' => out.push((start, Token::RParen)),
            ',' => out.push((start, Token::Comma)),
            '^' => out.push((start, Token::Caret)),
            '+' => out.push((start, Token::Plus)),
            '&' => out.push((start, Token::Amp)),
            '|' => out.push((start, Token::Pipe)),
            c if c.is_ascii_digit() => {
                while i < bytes.len() && (bytes[i] as char).is_ascii_digit() {
                    i += 1;
                }
                let value = text[start..i].parse().map_err(|_| Error::Parse {
                    offset: start,
                    message: "number too large".into(),
                })?;
                out.push((start, Token::Num(value)));
                continue;
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                while i < bytes.len() {
                    let d = bytes[i] as char;
                    if d.is_ascii_alphanumeric() || d == '_' || d == '\'' {
                        i += 1;
                    } else {
                        break;
                    }
                }
                out.push((start, Token::Ident(text[start..i].to_string())));
                continue;
            }
            other => {
                return Err(Error::Parse {
                    offset: start,
                    message: format!("unexpected character `{other}`"),
                })
            }
        }
        i += 1;
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<(usize, Token)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<(usize, &Token)> {
        self.tokens.get(self.pos).map(|(o, t)| (*o, t))
    }

    fn offset(&self) -> usize {
        self.tokens
            .get(self.pos)
            .map_or_else(|| self.tokens.last().map_or(0, |(o, _)| o + 1), |(o, _)| *o)
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            offset: self.offset(),
            message: message.into(),
        })
    }

    fn eat(&mut self, tok: &Token) -> bool {
        if self.peek().map(|(_, t)| t) == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: Token) -> Result<()> {
        if self.eat(&tok) {
            Ok(())
        } else {
            self.error(format!("expected {tok:?}"))
        }
    }

    fn eat_keyword(&mut self, word: &str) -> bool {
        if matches!(self.peek(), Some((_, Token::Ident(w))) if w == word) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn sum(&mut self) -> Result<RelExpr> {
        let mut lhs = self.union()?;
        while self.eat(&Token::Plus) {
            lhs = RelExpr::Sum(Box::new(lhs), Box::new(self.union()?));
        }
        Ok(lhs)
    }

    fn union(&mut self) -> Result<RelExpr> {
        let mut lhs = self.inter()?;
        while self.eat(&Token::Pipe) || self.eat_keyword("u") {
            lhs = RelExpr::Union(Box::new(lhs), Box::new(self.inter()?));
        }
        Ok(lhs)
    }

    fn inter(&mut self) -> Result<RelExpr> {
        let mut lhs = self.comp()?;
        while self.eat(&Token::Amp) {
            lhs = RelExpr::Intersect(Box::new(lhs), Box::new(self.comp()?));
        }
        Ok(lhs)
    }

    fn comp(&mut self) -> Result<RelExpr> {
        let mut lhs = self.postfix()?;
        while self.eat_keyword("o") {
            lhs = RelExpr::Compose(Box::new(lhs), Box::new(self.postfix()?));
        }
        Ok(lhs)
    }

    fn postfix(&mut self) -> Result<RelExpr> {
        let mut base = self.primary()?;
        while self.eat(&Token::Caret) {
            match self.peek() {
                Some((_, Token::Num(n))) => {
                    let n = *n;
                    self.pos += 1;
                    base = RelExpr::Power(Box::new(base), n);
                }
                _ => return self.error("expected exponent"),
            }
        }
        Ok(base)
    }

    fn number(&mut self) -> Result<usize> {
        match self.peek() {
            Some((_, Token::Num(n))) => {
                let n = *n;
                self.pos += 1;
                Ok(n)
            }
            _ => self.error("expected number"),
        }
    }

    fn primary(&mut self) -> Result<RelExpr> {
        let Some((_, tok)) = self.peek() else {
            return self.error("unexpected end of expression");
        };
        match tok.clone() {
            Token::LParen => {
                self.pos += 1;
                let inner = self.sum()?;
                self.expect(Token::RParen)?;
                Ok(inner)
            }
            Token::Num(0) => {
                self.pos += 1;
                Ok(RelExpr::Diag)
            }
            Token::Ident(name) => {
                if name == "o" || name == "u" {
                    return self.error(format!("`{name}` is reserved"));
                }
                self.pos += 1;
                if !self.eat(&Token::LParen) {
                    return Ok(match name.as_str() {
                        "diag" | "delta" => RelExpr::Diag,
                        "full" => RelExpr::Full,
                        _ => RelExpr::Var(name),
                    });
                }
                let arg = self.sum()?;
                let out = match name.as_str() {
                    "alt" => {
                        self.expect(Token::Comma)?;
                        let second = self.sum()?;
                        self.expect(Token::Comma)?;
                        let n = self.number()?;
                        RelExpr::ComposeN(Box::new(arg), Box::new(second), n)
                    }
                    "conv" => RelExpr::Converse(Box::new(arg)),
                    "tc" => RelExpr::TransitiveClosure(Box::new(arg)),
                    "bar" | "cc" => RelExpr::CompatibleClosure(Box::new(arg)),
                    "adm" => RelExpr::AdmissibleClosure(Box::new(arg)),
                    "tol" => RelExpr::ToleranceClosure(Box::new(arg)),
                    "cg" => RelExpr::CongruenceClosure(Box::new(arg)),
                    _ => RelExpr::OperatorApp(name, Box::new(arg)),
                };
                self.expect(Token::RParen)?;
                Ok(out)
            }
            other => self.error(format!("unexpected {other:?}")),
        }
    }
}

/// Result of evaluating an expression.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Evaluated {
    pub relation: BinaryRelation,
    /// One entry per operator application whose argument had to be closed
    /// to an admissible relation (lenient mode only).
    pub coercions: Vec<String>,
}

/// Everything an expression is evaluated against.
pub struct EvalContext<'a> {
    pub alg: &'a FiniteAlgebra,
    pub env: &'a HashMap<String, BinaryRelation>,
    pub ops: &'a HashMap<String, RelationOperator>,
    /// Reject operator applications on non-admissible arguments instead of
    /// coercing them.
    pub strict: bool,
    /// Optional cache for operator applications and closures.
    pub memo: Option<&'a RefCell<EvalMemo>>,
}

/// Cache keyed by (operator or closure tag, argument).
pub type EvalMemo = HashMap<(String, BinaryRelation), BinaryRelation>;

impl<'a> EvalContext<'a> {
    pub fn new(
        alg: &'a FiniteAlgebra,
        env: &'a HashMap<String, BinaryRelation>,
        ops: &'a HashMap<String, RelationOperator>,
    ) -> Self {
        EvalContext {
            alg,
            env,
            ops,
            strict: false,
            memo: None,
        }
    }

    fn cached(
        &self,
        tag: &str,
        arg: BinaryRelation,
        f: impl FnOnce(&BinaryRelation) -> Result<BinaryRelation>,
    ) -> Result<BinaryRelation> {
        let Some(memo) = self.memo else {
            return f(&arg);
        };
        let key = (tag.to_string(), arg);
        if let Some(hit) = memo.borrow().get(&key) {
            return Ok(hit.clone());
        }
        let value = f(&key.1)?;
        memo.borrow_mut().insert(key, value.clone());
        Ok(value)
    }
}

pub fn eval_rel_expr(expr: &RelExpr, ctx: &EvalContext<'_>) -> Result<Evaluated> {
    let mut coercions = Vec::new();
    let relation = eval(expr, ctx, &mut coercions)?;
    Ok(Evaluated {
        relation,
        coercions,
    })
}

fn eval(
    expr: &RelExpr,
    ctx: &EvalContext<'_>,
    coercions: &mut Vec<String>,
) -> Result<BinaryRelation> {
    use RelExpr::*;
    let n = ctx.alg.size();
    Ok(match expr {
        Var(name) => {
            let r = ctx
                .env
                .get(name)
                .ok_or_else(|| Error::UnboundName(name.clone()))?;
            if r.carrier_size() != n {
                return Err(Error::CarrierMismatch {
                    left: n,
                    right: r.carrier_size(),
                });
            }
            r.clone()
        }
        Diag => BinaryRelation::diagonal(n),
        Full => BinaryRelation::full(n),
        Compose(a, b) => eval(a, ctx, coercions)?.compose(&eval(b, ctx, coercions)?)?,
        ComposeN(a, b, k) => eval(a, ctx, coercions)?.compose_n(&eval(b, ctx, coercions)?, *k)?,
        Power(a, k) => eval(a, ctx, coercions)?.power(*k),
        Converse(a) => eval(a, ctx, coercions)?.converse(),
        Union(a, b) => eval(a, ctx, coercions)?.union(&eval(b, ctx, coercions)?)?,
        Intersect(a, b) => eval(a, ctx, coercions)?.intersection(&eval(b, ctx, coercions)?)?,
        CompatibleClosure(a) => ctx.cached("bar", eval(a, ctx, coercions)?, |r| {
            compatible_closure(ctx.alg, r)
        })?,
        AdmissibleClosure(a) => ctx.cached("adm", eval(a, ctx, coercions)?, |r| {
            Ok(admissible_closure(ctx.alg, r)?.into())
        })?,
        ToleranceClosure(a) => ctx.cached("tol", eval(a, ctx, coercions)?, |r| {
            Ok(tolerance_closure(ctx.alg, r)?.into())
        })?,
        TransitiveClosure(a) => eval(a, ctx, coercions)?.transitive_closure(),
        CongruenceClosure(a) => ctx.cached("cg", eval(a, ctx, coercions)?, |r| {
            Ok(congruence_closure(ctx.alg, r)?.into())
        })?,
        Sum(a, b) => eval(a, ctx, coercions)?.rel_sum(&eval(b, ctx, coercions)?)?,
        OperatorApp(name, a) => {
            let op = ctx
                .ops
                .get(name)
                .ok_or_else(|| Error::UnboundName(name.clone()))?;
            let arg = eval(a, ctx, coercions)?;
            let arg = if is_admissible(ctx.alg, &arg) {
                arg
            } else if ctx.strict {
                return Err(Error::NonAdmissibleArgument(name.clone()));
            } else {
                coercions.push(format!("{name}({a}) argument closed to adm(...)"));
                admissible_closure(ctx.alg, &arg)?.into_relation()
            };
            // Operator names are prefixed so they never collide with closure tags.
            ctx.cached(&format!("op:{name}"), arg, |r| {
                let r = AdmissibleRelation::new_unchecked(r.clone());
                Ok(apply_operator(op, ctx.alg, &r)?.into())
            })?
        }
    })
}
