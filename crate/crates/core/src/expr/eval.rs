use std::ops::{Add, Mul, Neg, Sub};

use thiserror::Error;

use super::{BinOp, Expr, Func};
use crate::PhasePoint;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("logarithm of non-positive argument {0}")]
    LogDomain(f64),
    #[error("square root of non-positive argument {0}")]
    SqrtDomain(f64),
    #[error("power of base {base} with non-integer exponent {exponent}")]
    PowDomain { base: f64, exponent: f64 },
    #[error("expression refers to coordinate slot {slot} but only {available} are bound")]
    DimensionMismatch { slot: usize, available: usize },
}

/// Arithmetic the evaluator needs from a number type.
///
/// Domain checks happen in the evaluator against [`Scalar::value`], so
/// implementations may assume their arguments are in range.
pub trait Scalar:
    Clone + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self>
{
    /// A constant carrying the same shape (dimension, order) as `self`.
    fn constant_like(&self, c: f64) -> Self;
    /// Leading value, used for domain checks.
    fn value(&self) -> f64;
    fn recip(&self) -> Self;
    fn sin(&self) -> Self;
    fn cos(&self) -> Self;
    fn exp(&self) -> Self;
    fn ln(&self) -> Self;
    fn sqrt(&self) -> Self;
    /// `self^e` for a real constant `e` and positive base.
    fn powf(&self, e: f64) -> Self;
}

impl Scalar for f64 {
    fn constant_like(&self, c: f64) -> Self {
        c
    }
    fn value(&self) -> f64 {
        *self
    }
    fn recip(&self) -> Self {
        1.0 / self
    }
    fn sin(&self) -> Self {
        f64::sin(*self)
    }
    fn cos(&self) -> Self {
        f64::cos(*self)
    }
    fn exp(&self) -> Self {
        f64::exp(*self)
    }
    fn ln(&self) -> Self {
        f64::ln(*self)
    }
    fn sqrt(&self) -> Self {
        f64::sqrt(*self)
    }
    fn powf(&self, e: f64) -> Self {
        f64::powf(*self, e)
    }
}

impl Expr {
    /// Evaluates over any scalar algebra. `vars` holds `(x1..xn, p1..pn)`.
    pub fn eval<S: Scalar>(&self, vars: &[S]) -> Result<S, EvalError> {
        let template = vars.first().ok_or(EvalError::DimensionMismatch {
            slot: 0,
            available: 0,
        })?;
        self.eval_in(vars, template)
    }

    fn eval_in<S: Scalar>(&self, vars: &[S], template: &S) -> Result<S, EvalError> {
        let dim = vars.len() / 2;
        Ok(match self {
            Expr::Const(c) => template.constant_like(*c),
            Expr::Var(v) => {
                let slot = v.slot(dim);
                if v.index >= dim {
                    return Err(EvalError::DimensionMismatch {
                        slot,
                        available: vars.len(),
                    });
                }
                vars[slot].clone()
            }
            Expr::Neg(a) => -a.eval_in(vars, template)?,
            Expr::Call(func, a) => {
                let arg = a.eval_in(vars, template)?;
                match func {
                    Func::Sin => arg.sin(),
                    Func::Cos => arg.cos(),
                    Func::Exp => arg.exp(),
                    Func::Ln => {
                        if arg.value() <= 0.0 {
                            return Err(EvalError::LogDomain(arg.value()));
                        }
                        arg.ln()
                    }
                    Func::Sqrt => {
                        if arg.value() <= 0.0 {
                            return Err(EvalError::SqrtDomain(arg.value()));
                        }
                        arg.sqrt()
                    }
                }
            }
            Expr::Binary(op, a, b) => {
                if *op == BinOp::Pow {
                    return pow(a.eval_in(vars, template)?, b, vars, template);
                }
                let lhs = a.eval_in(vars, template)?;
                let rhs = b.eval_in(vars, template)?;
                match op {
                    BinOp::Add => lhs + rhs,
                    BinOp::Sub => lhs - rhs,
                    BinOp::Mul => lhs * rhs,
                    BinOp::Div => {
                        if rhs.value() == 0.0 {
                            return Err(EvalError::DivisionByZero);
                        }
                        lhs * rhs.recip()
                    }
                    BinOp::Pow => unreachable!(),
                }
            }
        })
    }
}

fn pow<S: Scalar>(base: S, exponent: &Expr, vars: &[S], template: &S) -> Result<S, EvalError> {
    if let Some(k) = exponent.as_integer_constant() {
        if k < 0 && base.value() == 0.0 {
            return Err(EvalError::DivisionByZero);
        }
        let positive = int_pow(&base, k.unsigned_abs());
        return Ok(if k < 0 { positive.recip() } else { positive });
    }
    let e = exponent.eval_in(vars, template)?;
    let b = base.value();
    if let Expr::Const(c) = exponent {
        if b < 0.0 {
            return Err(EvalError::PowDomain {
                base: b,
                exponent: *c,
            });
        }
        return Ok(base.powf(*c));
    }
    if b <= 0.0 {
        return Err(EvalError::PowDomain {
            base: b,
            exponent: e.value(),
        });
    }
    Ok((e * base.ln()).exp())
}

/// Binary exponentiation; exact repeated multiplication for any base sign.
fn int_pow<S: Scalar>(base: &S, mut k: u64) -> S {
    let mut acc = base.constant_like(1.0);
    let mut square = base.clone();
    while k > 0 {
        if k & 1 == 1 {
            acc = acc * square.clone();
        }
        k >>= 1;
        if k > 0 {
            square = square.clone() * square;
        }
    }
    acc
}

/// Plain evaluation at a phase point.
pub fn evaluate(expr: &Expr, point: &PhasePoint) -> Result<f64, EvalError> {
    expr.eval(&point.coords())
}
