//! Terms over an algebra's signature.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::algebra::FiniteAlgebra;
use crate::error::{Error, Result};

/// A term tree with numbered variables.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Var(usize),
    App(String, Vec<Term>),
}

/// Values for variables `x0, x1, ..`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Assignment(pub Vec<usize>);

impl Assignment {
    pub fn new(alg: &FiniteAlgebra, values: Vec<usize>) -> Result<Self> {
        if let Some(&bad) = values.iter().find(|&&v| v >= alg.size()) {
            return Err(Error::ElementOutOfRange {
                element: bad,
                size: alg.size(),
            });
        }
        Ok(Assignment(values))
    }
}

impl Term {
    pub fn var(i: usize) -> Term {
        Term::Var(i)
    }

    pub fn app(op: impl Into<String>, args: Vec<Term>) -> Term {
        Term::App(op.into(), args)
    }

    /// One more than the largest variable index, or 0 for ground terms.
    pub fn var_bound(&self) -> usize {
        match self {
            Term::Var(i) => i + 1,
            Term::App(_, args) => args.iter().map(Term::var_bound).max().unwrap_or(0),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::App(_, args) => 1 + args.iter().map(Term::size).sum::<usize>(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Term::Var(_) => 0,
            Term::App(_, args) => 1 + args.iter().map(Term::depth).max().unwrap_or(0),
        }
    }

    /// Checks operation names, arities and that variables stay below `vars`.
    pub fn check(&self, alg: &FiniteAlgebra, vars: usize) -> Result<()> {
        match self {
            Term::Var(i) if *i < vars => Ok(()),
            Term::Var(i) => Err(Error::UnboundVariable {
                index: *i,
                len: vars,
            }),
            Term::App(name, args) => {
                let op = alg
                    .op_index(name)
                    .ok_or_else(|| Error::UnknownOperation(name.clone()))?;
                let arity = alg.operations()[op].arity;
                if arity != args.len() {
                    return Err(Error::ArityMismatch {
                        op: name.clone(),
                        expected: arity,
                        found: args.len(),
                    });
                }
                args.iter().try_for_each(|a| a.check(alg, vars))
            }
        }
    }

    /// Bottom-up evaluation.
    pub fn eval(&self, alg: &FiniteAlgebra, asg: &[usize]) -> Result<usize> {
        match self {
            Term::Var(i) => asg.get(*i).copied().ok_or(Error::UnboundVariable {
                index: *i,
                len: asg.len(),
            }),
            Term::App(name, args) => {
                let op = alg
                    .op_index(name)
                    .ok_or_else(|| Error::UnknownOperation(name.clone()))?;
                let values = args
                    .iter()
                    .map(|a| a.eval(alg, asg))
                    .collect::<Result<Vec<_>>>()?;
                alg.apply_checked(op, &values)
            }
        }
    }

    /// The term operation of arity `arity` as a flat table over `alg`
    /// (same row-major convention as basic operations).
    pub fn operation_table(&self, alg: &FiniteAlgebra, arity: usize) -> Result<Vec<usize>> {
        self.check(alg, arity)?;
        let n = alg.size();
        let len = crate::algebra::checked_pow(n, arity)
            .ok_or_else(|| Error::InvalidArgument("term table too large".into()))?;
        let mut out = Vec::with_capacity(len);
        let mut asg = vec![0; arity];
        for flat in 0..len {
            let mut rest = flat;
            for slot in (0..arity).rev() {
                asg[slot] = rest % n;
                rest /= n;
            }
            out.push(self.eval(alg, &asg)?);
        }
        Ok(out)
    }

    /// Replaces variable `i` by `subst[i]`.
    pub fn substitute(&self, subst: &[Term]) -> Term {
        match self {
            Term::Var(i) => subst[*i].clone(),
            Term::App(name, args) => Term::App(
                name.clone(),
                args.iter().map(|a| a.substitute(subst)).collect(),
            ),
        }
    }

    /// Prefix notation with the given variable names (falls back to `x<i>`).
    pub fn to_prefix(&self, names: &[&str]) -> String {
        let mut out = String::new();
        self.write_prefix(names, &mut out);
        out
    }

    fn write_prefix(&self, names: &[&str], out: &mut String) {
        match self {
            Term::Var(i) => match names.get(*i) {
                Some(name) => out.push_str(name),
                None => out.push_str(&format!("x{i}")),
            },
            Term::App(name, args) => {
                out.push_str(name);
                out.push('(');
                for (k, a) in args.iter().enumerate() {
                    if k > 0 {
                        out.push(',');
                    }
                    a.write_prefix(names, out);
                }
                out.push(')');
            }
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_prefix(&[]))
    }
}

impl Serialize for Term {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}
