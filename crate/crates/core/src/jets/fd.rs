use thiserror::Error;
use twofloat::TwoFloat;

use super::PhasePoint;
use crate::expr::{EvalError, Expr, Scalar};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FdError {
    #[error("finite differences support at most 4 derivatives, got {0}")]
    OrderTooHigh(usize),
    #[error("variable index {index} out of range for {nvars} variables")]
    VariableOutOfRange { index: usize, nvars: usize },
    #[error("evaluation failed at a stencil point: {0}")]
    Eval(#[from] EvalError),
}

/// Coarse central-difference step for a derivative of the given order.
pub fn fd_step(order: usize) -> f64 {
    match order {
        0 | 1 => 1e-6,
        2 => 1e-4,
        _ => 1e-3,
    }
}

/// Nested central finite-difference estimate of a partial derivative.
///
/// Stencils with steps `h` and `h/2` are combined by one Richardson step, so
/// the truncation error is `O(h⁴)`. They are evaluated in double-double
/// arithmetic so the estimate is not limited by cancellation. The oracle
/// shares nothing with the jet engine beyond the expression tree.
pub fn fd_oracle(expr: &Expr, point: &PhasePoint, multi_index: &[usize]) -> Result<f64, FdError> {
    if multi_index.len() > 4 {
        return Err(FdError::OrderTooHigh(multi_index.len()));
    }
    let coords = point.coords();
    if let Some(&index) = multi_index.iter().find(|&&a| a >= coords.len()) {
        return Err(FdError::VariableOutOfRange {
            index,
            nvars: coords.len(),
        });
    }
    if multi_index.is_empty() {
        return Ok(stencil(expr, &coords, multi_index, 0.0)?.hi());
    }
    let h = fd_step(multi_index.len());
    let coarse = stencil(expr, &coords, multi_index, h)?;
    let fine = stencil(expr, &coords, multi_index, h / 2.0)?;
    Ok(((fine * 4.0 - coarse) * recip(TwoFloat::from(3.0))).hi())
}

fn stencil(
    expr: &Expr,
    coords: &[f64],
    multi_index: &[usize],
    h: f64,
) -> Result<TwoFloat, FdError> {
    let k = multi_index.len();
    let mut total = TwoFloat::from(0.0);
    for signs in 0u32..(1 << k) {
        let mut z: Vec<Dd> = coords.iter().map(|&c| Dd(TwoFloat::from(c))).collect();
        let mut weight = 1.0;
        for (bit, &a) in multi_index.iter().enumerate() {
            if signs & (1 << bit) == 0 {
                z[a].0 += h;
            } else {
                z[a].0 -= h;
                weight = -weight;
            }
        }
        let value = expr.eval(&z)?;
        total += value.0 * weight;
    }
    Ok(total * recip(TwoFloat::from((2.0 * h).powi(k as i32))))
}

/// Double-double scalar for the oracle.
#[derive(Debug, Clone, Copy)]
struct Dd(TwoFloat);

impl std::ops::Add for Dd {
    type Output = Dd;
    fn add(self, rhs: Dd) -> Dd {
        Dd(self.0 + rhs.0)
    }
}

impl std::ops::Sub for Dd {
    type Output = Dd;
    fn sub(self, rhs: Dd) -> Dd {
        Dd(self.0 - rhs.0)
    }
}

impl std::ops::Mul for Dd {
    type Output = Dd;
    fn mul(self, rhs: Dd) -> Dd {
        Dd(self.0 * rhs.0)
    }
}

impl std::ops::Neg for Dd {
    type Output = Dd;
    fn neg(self) -> Dd {
        Dd(-self.0)
    }
}

impl Scalar for Dd {
    fn constant_like(&self, c: f64) -> Self {
        Dd(TwoFloat::from(c))
    }
    fn value(&self) -> f64 {
        self.0.hi()
    }
    fn recip(&self) -> Self {
        Dd(recip(self.0))
    }
    fn sin(&self) -> Self {
        Dd(sin_cos(self.0).0)
    }
    fn cos(&self) -> Self {
        Dd(sin_cos(self.0).1)
    }
    fn exp(&self) -> Self {
        Dd(exp(self.0))
    }
    fn ln(&self) -> Self {
        Dd(ln(self.0))
    }
    fn sqrt(&self) -> Self {
        Dd(self.0.sqrt())
    }
    fn powf(&self, e: f64) -> Self {
        Dd(exp(ln(self.0) * e))
    }
}

// The library division and transcendentals are only good to about 1e-17, which the order-3
// stencils would amplify past the oracle tolerance. These use exact
// double-double arithmetic after argument reduction.

fn recip(x: TwoFloat) -> TwoFloat {
    let mut y = TwoFloat::from(1.0 / x.hi());
    for _ in 0..2 {
        y += y * (1.0 - x * y);
    }
    y
}

/// Taylor sum `Σ_{r≥start, r ≡ start mod step} sign^((r-start)/step) x^r / r!`.
fn taylor(x: TwoFloat, start: u32, step: u32, alternate: bool) -> TwoFloat {
    let mut term = TwoFloat::from(1.0);
    for r in 1..=start {
        term = term * x * recip(TwoFloat::from(r as f64));
    }
    let mut total = term;
    let mut r = start;
    while term.hi().abs() > 1e-36 * total.hi().abs().max(1e-300) {
        for _ in 0..step {
            r += 1;
            term = term * x * recip(TwoFloat::from(r as f64));
        }
        if alternate {
            term = -term;
        }
        total += term;
    }
    total
}

fn exp(x: TwoFloat) -> TwoFloat {
    let k = (x.hi() / std::f64::consts::LN_2).round();
    let r = (x - twofloat::consts::LN_2 * k) * (1.0 / 1024.0);
    let mut y = taylor(r, 0, 1, false);
    for _ in 0..10 {
        y = y * y;
    }
    let scale = 2f64.powi(k as i32);
    TwoFloat::new_add(y.hi() * scale, y.lo() * scale)
}

fn ln(x: TwoFloat) -> TwoFloat {
    let mut y = TwoFloat::from(x.hi().ln());
    for _ in 0..2 {
        y += x * exp(-y) - 1.0;
    }
    y
}

fn sin_cos(x: TwoFloat) -> (TwoFloat, TwoFloat) {
    let k = (x.hi() / std::f64::consts::FRAC_PI_2).round();
    let r = x - twofloat::consts::FRAC_PI_2 * k;
    let (s, c) = (taylor(r, 1, 2, true), taylor(r, 0, 2, true));
    match (k as i64).rem_euclid(4) {
        0 => (s, c),
        1 => (c, -s),
        2 => (-s, -c),
        _ => (-c, s),
    }
}
