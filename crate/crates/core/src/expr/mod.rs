//! Scalar expressions over phase-space coordinates.
//!
//! An [`Expr`] is an immutable tree built from constants, the coordinates
//! `x1..xn` / `p1..pn`, the arithmetic operators and a handful of elementary
//! functions. Expressions are evaluated over any [`Scalar`] algebra, which is
//! how the same tree yields plain values, truncated Taylor jets and
//! extended-precision finite differences.

mod eval;
mod parse;
mod pmp;

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

pub use eval::{evaluate, EvalError, Scalar};
pub use parse::{parse, ParseError};
pub use pmp::{pmp_hamiltonian, ControlAffineSystem, ControlSystemError};

/// Which half of the phase space a coordinate belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum VarKind {
    Position,
    Momentum,
}

/// A coordinate reference. `index` is zero-based; `x1` is `Var::x(0)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Var {
    pub kind: VarKind,
    pub index: usize,
}

impl Var {
    pub fn x(index: usize) -> Self {
        Var {
            kind: VarKind::Position,
            index,
        }
    }

    pub fn p(index: usize) -> Self {
        Var {
            kind: VarKind::Momentum,
            index,
        }
    }

    /// Position in the flat coordinate vector `(x1..xn, p1..pn)`.
    pub fn slot(&self, dim: usize) -> usize {
        match self.kind {
            VarKind::Position => self.index,
            VarKind::Momentum => dim + self.index,
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            VarKind::Position => write!(f, "x{}", self.index + 1),
            VarKind::Momentum => write!(f, "p{}", self.index + 1),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Pow => "^",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Ln,
    Sqrt,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sqrt => "sqrt",
        }
    }

    pub(crate) fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "ln" => Func::Ln,
            "sqrt" => Func::Sqrt,
            _ => return None,
        })
    }
}

/// Expression tree. Constants produced by the parser are non-negative;
/// negative literals are represented as `Neg(Const)`.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Var(Var),
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

impl Expr {
    /// Builds a constant, keeping the non-negative-literal normal form.
    pub fn constant(value: f64) -> Self {
        if value < 0.0 {
            Expr::Neg(Box::new(Expr::Const(-value)))
        } else {
            Expr::Const(value)
        }
    }

    pub fn var(v: Var) -> Self {
        Expr::Var(v)
    }

    pub fn binary(op: BinOp, lhs: Expr, rhs: Expr) -> Self {
        Expr::Binary(op, Box::new(lhs), Box::new(rhs))
    }

    pub fn negate(inner: Expr) -> Self {
        Expr::Neg(Box::new(inner))
    }

    pub fn call(func: Func, arg: Expr) -> Self {
        Expr::Call(func, Box::new(arg))
    }

    /// All coordinates referenced anywhere in the tree.
    pub fn free_variables(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<Var>) {
        match self {
            Expr::Const(_) => {}
            Expr::Var(v) => {
                out.insert(*v);
            }
            Expr::Neg(a) | Expr::Call(_, a) => a.collect_vars(out),
            Expr::Binary(_, a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    /// Smallest dimension the expression is valid in (0 for closed expressions).
    pub fn min_dim(&self) -> usize {
        self.free_variables()
            .iter()
            .map(|v| v.index + 1)
            .max()
            .unwrap_or(0)
    }

    pub fn depends_on_momenta(&self) -> bool {
        self.free_variables()
            .iter()
            .any(|v| v.kind == VarKind::Momentum)
    }

    /// `Some(k)` when the tree is an integral constant, possibly negated.
    pub(crate) fn as_integer_constant(&self) -> Option<i64> {
        let value = match self {
            Expr::Const(c) => *c,
            Expr::Neg(inner) => match inner.as_ref() {
                Expr::Const(c) => -*c,
                _ => return None,
            },
            _ => return None,
        };
        (value.fract() == 0.0 && value.abs() <= i32::MAX as f64).then_some(value as i64)
    }
}

/// Prints a fully parenthesised form that the parser reads back to the same tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => write!(f, "{c}"),
            Expr::Var(v) => write!(f, "{v}"),
            Expr::Neg(a) => write!(f, "(-{a})"),
            Expr::Binary(op, a, b) => write!(f, "({a} {} {b})", op.symbol()),
            Expr::Call(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}

/// A named Hamiltonian on the cotangent bundle of an `dim`-dimensional base.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianSpec {
    pub name: String,
    pub dim: usize,
    pub expr: Expr,
}

impl HamiltonianSpec {
    pub fn new(name: impl Into<String>, dim: usize, expr: Expr) -> Result<Self, ParseError> {
        if dim == 0 {
            return Err(ParseError::ZeroDimension);
        }
        if let Some(v) = expr.free_variables().into_iter().find(|v| v.index >= dim) {
            return Err(ParseError::IndexOutOfRange {
                pos: 0,
                name: v.to_string(),
                dim,
            });
        }
        Ok(HamiltonianSpec {
            name: name.into(),
            dim,
            expr,
        })
    }

    /// Parses `text` in dimension `dim`.
    pub fn parse(name: impl Into<String>, dim: usize, text: &str) -> Result<Self, ParseError> {
        let expr = parse(text, dim)?;
        Ok(HamiltonianSpec {
            name: name.into(),
            dim,
            expr,
        })
    }
}
