use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use thiserror::Error;

use super::basis::{factorial, Basis};
use super::MAX_ORDER;
use crate::expr::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum JetError {
    #[error("multi-index of length {requested} exceeds jet order {order}")]
    OrderExceeded { requested: usize, order: usize },
    #[error("variable index {index} out of range for {nvars} variables")]
    VariableOutOfRange { index: usize, nvars: usize },
}

/// Truncated multivariate Taylor polynomial: the value and all partial
/// derivatives up to `order` of a scalar function at a fixed point.
///
/// Coefficients are stored per monomial (the upper simplex of each symmetric
/// derivative tensor), so partials are invariant under permutation of the
/// multi-index by construction.
#[derive(Clone)]
pub struct Jet {
    basis: Arc<Basis>,
    order: usize,
    coeffs: Vec<f64>,
}

impl fmt::Debug for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Jet")
            .field("nvars", &self.basis.nvars)
            .field("order", &self.order)
            .field("coeffs", &self.coeffs)
            .finish()
    }
}

impl Jet {
    pub fn constant(nvars: usize, order: usize, value: f64) -> Jet {
        assert!(order <= MAX_ORDER, "jet order {order} above {MAX_ORDER}");
        let basis = Basis::for_vars(nvars);
        let mut coeffs = vec![0.0; basis.len_upto[order]];
        coeffs[0] = value;
        Jet {
            basis,
            order,
            coeffs,
        }
    }

    /// Seeds coordinate `index` at `value`: unit gradient, no curvature.
    pub fn variable(nvars: usize, order: usize, index: usize, value: f64) -> Jet {
        assert!(index < nvars, "variable {index} out of range for {nvars}");
        let mut jet = Jet::constant(nvars, order, value);
        if order >= 1 {
            jet.coeffs[1 + index] = 1.0;
        }
        jet
    }

    /// Seeds all coordinates of `point`.
    pub fn seed(coords: &[f64], order: usize) -> Vec<Jet> {
        coords
            .iter()
            .enumerate()
            .map(|(i, &v)| Jet::variable(coords.len(), order, i, v))
            .collect()
    }

    fn zeros(basis: Arc<Basis>, order: usize) -> Jet {
        let coeffs = vec![0.0; basis.len_upto[order]];
        Jet {
            basis,
            order,
            coeffs,
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn nvars(&self) -> usize {
        self.basis.nvars
    }

    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    pub fn gradient(&self) -> Vec<f64> {
        (0..self.nvars())
            .map(|a| {
                if self.order >= 1 {
                    self.coeffs[1 + a]
                } else {
                    0.0
                }
            })
            .collect()
    }

    /// Plain partial derivative `∂^|idx| f / ∂z_{idx[0]} ... ∂z_{idx[k]}`.
    pub fn partial(&self, multi_index: &[usize]) -> Result<f64, JetError> {
        if multi_index.len() > self.order {
            return Err(JetError::OrderExceeded {
                requested: multi_index.len(),
                order: self.order,
            });
        }
        let mut exponent = vec![0u8; self.nvars()];
        for &a in multi_index {
            if a >= self.nvars() {
                return Err(JetError::VariableOutOfRange {
                    index: a,
                    nvars: self.nvars(),
                });
            }
            exponent[a] += 1;
        }
        let idx = self
            .basis
            .index_of(&exponent)
            .expect("degree within basis range");
        Ok(self.coeffs[idx] * self.basis.factorial_weight[idx])
    }

    /// Hessian as a dense symmetric matrix.
    pub fn hessian(&self) -> Result<Vec<Vec<f64>>, JetError> {
        let m = self.nvars();
        let mut out = vec![vec![0.0; m]; m];
        for a in 0..m {
            for b in a..m {
                let v = self.partial(&[a, b])?;
                out[a][b] = v;
                out[b][a] = v;
            }
        }
        Ok(out)
    }

    /// Jet of `∂f/∂z_var`, one order lower.
    pub fn derivative(&self, var: usize) -> Jet {
        assert!(self.order >= 1, "cannot differentiate an order-0 jet");
        let order = self.order - 1;
        let mut out = Jet::zeros(self.basis.clone(), order);
        let entries = &self.basis.derivatives[var];
        let upto = self.basis.derivatives_upto[var][self.order];
        for &(src, dst, factor) in &entries[..upto] {
            out.coeffs[dst as usize] += factor * self.coeffs[src as usize];
        }
        out
    }

    /// Drops everything above `order`.
    pub fn truncate(&self, order: usize) -> Jet {
        let order = order.min(self.order);
        Jet {
            basis: self.basis.clone(),
            order,
            coeffs: self.coeffs[..self.basis.len_upto[order]].to_vec(),
        }
    }

    pub fn scale(&self, factor: f64) -> Jet {
        Jet {
            basis: self.basis.clone(),
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| c * factor).collect(),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_finite())
    }

    fn check_compatible(&self, other: &Jet) {
        assert_eq!(
            self.basis.nvars, other.basis.nvars,
            "jets over different variable counts"
        );
    }

    fn zip_with(&self, other: &Jet, f: impl Fn(f64, f64) -> f64) -> Jet {
        self.check_compatible(other);
        let order = self.order.min(other.order);
        let len = self.basis.len_upto[order];
        Jet {
            basis: self.basis.clone(),
            order,
            coeffs: (0..len)
                .map(|i| f(self.coeffs[i], other.coeffs[i]))
                .collect(),
        }
    }

    fn product(&self, other: &Jet) -> Jet {
        self.check_compatible(other);
        let order = self.order.min(other.order);
        let mut out = Jet::zeros(self.basis.clone(), order);
        let table = &self.basis.products[..self.basis.products_upto[order]];
        for &[i, j, t] in table {
            out.coeffs[t as usize] += self.coeffs[i as usize] * other.coeffs[j as usize];
        }
        out
    }

    /// `φ(f)` from the derivatives `φ^(r)(f₀)`, r = 0..=order.
    fn compose(&self, derivs: &[f64]) -> Jet {
        let k = self.order;
        let mut shift = self.clone();
        shift.coeffs[0] = 0.0;
        let mut acc = self.constant_like(derivs[k] / factorial(k));
        for r in (0..k).rev() {
            acc = acc.product(&shift);
            acc.coeffs[0] += derivs[r] / factorial(r);
        }
        acc
    }

    fn compose_with(&self, f: impl Fn(usize) -> f64) -> Jet {
        let derivs: Vec<f64> = (0..=self.order).map(f).collect();
        self.compose(&derivs)
    }
}

impl Add for &Jet {
    type Output = Jet;
    fn add(self, rhs: &Jet) -> Jet {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &Jet {
    type Output = Jet;
    fn sub(self, rhs: &Jet) -> Jet {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Mul for &Jet {
    type Output = Jet;
    fn mul(self, rhs: &Jet) -> Jet {
        self.product(rhs)
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, rhs: Jet) -> Jet {
        &self + &rhs
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, rhs: Jet) -> Jet {
        &self - &rhs
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        &self * &rhs
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

impl Scalar for Jet {
    fn constant_like(&self, c: f64) -> Self {
        let mut out = Jet::zeros(self.basis.clone(), self.order);
        out.coeffs[0] = c;
        out
    }

    fn value(&self) -> f64 {
        self.coeffs[0]
    }

    fn recip(&self) -> Self {
        let v = self.value();
        self.compose_with(|r| {
            let sign = if r % 2 == 0 { 1.0 } else { -1.0 };
            sign * factorial(r) / v.powi(r as i32 + 1)
        })
    }

    fn sin(&self) -> Self {
        let (s, c) = (self.value().sin(), self.value().cos());
        self.compose_with(|r| [s, c, -s, -c][r % 4])
    }

    fn cos(&self) -> Self {
        let (s, c) = (self.value().sin(), self.value().cos());
        self.compose_with(|r| [c, -s, -c, s][r % 4])
    }

    fn exp(&self) -> Self {
        let e = self.value().exp();
        self.compose_with(|_| e)
    }

    fn ln(&self) -> Self {
        let v = self.value();
        self.compose_with(|r| {
            if r == 0 {
                v.ln()
            } else {
                let sign = if r % 2 == 1 { 1.0 } else { -1.0 };
                sign * factorial(r - 1) / v.powi(r as i32)
            }
        })
    }

    fn sqrt(&self) -> Self {
        let v = self.value();
        let root = v.sqrt();
        self.compose_with(|r| {
            let falling: f64 = (0..r).map(|i| 0.5 - i as f64).product();
            falling * root / v.powi(r as i32)
        })
    }

    fn powf(&self, e: f64) -> Self {
        let v = self.value();
        self.compose_with(|r| {
            let falling: f64 = (0..r).map(|i| e - i as f64).product();
            falling * v.powf(e - r as f64)
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn seeded_variable() {
        let v = Jet::variable(4, 3, 0, 1.5);
        assert_eq!(v.value(), 1.5);
        assert_eq!(v.gradient(), vec![1.0, 0.0, 0.0, 0.0]);
        for a in 0..4 {
            for b in 0..4 {
                assert_eq!(v.partial(&[a, b]).unwrap(), 0.0);
                for c in 0..4 {
                    assert_eq!(v.partial(&[a, b, c]).unwrap(), 0.0);
                }
            }
        }
    }

    #[test]
    fn partial_is_permutation_invariant_and_bounded() {
        let z = Jet::seed(&[0.3, -1.2, 0.7], 3);
        let f = &(&z[0] * &z[1]) * &(&z[2] * &z[2]);
        let a = f.partial(&[0, 2, 2]).unwrap();
        assert_eq!(a, f.partial(&[2, 0, 2]).unwrap());
        assert_eq!(a, f.partial(&[2, 2, 0]).unwrap());
        assert_relative_eq!(a, 2.0 * -1.2, epsilon = 1e-15);
        assert_eq!(f.partial(&[]).unwrap(), f.value());
        assert!(matches!(
            f.partial(&[0, 0, 0, 0]),
            Err(JetError::OrderExceeded {
                requested: 4,
                order: 3
            })
        ));
        let c = Jet::constant(3, 3, 4.0);
        assert_eq!(c.partial(&[0]).unwrap(), 0.0);
    }

    #[test]
    fn elementary_function_derivatives() {
        // d^r/dx^r at x = 0.4
        let x = Jet::variable(1, 4, 0, 0.4);
        let check = |f: Jet, expect: [f64; 5]| {
            for (r, e) in expect.iter().enumerate() {
                let idx = vec![0; r];
                assert_relative_eq!(f.partial(&idx).unwrap(), *e, max_relative = 1e-13);
            }
        };
        let (s, c) = 0.4f64.sin_cos();
        check(x.sin(), [s, c, -s, -c, s]);
        check(x.cos(), [c, -s, -c, s, c]);
        let e = 0.4f64.exp();
        check(x.exp(), [e; 5]);
        check(
            x.ln(),
            [
                0.4f64.ln(),
                1.0 / 0.4,
                -1.0 / 0.16,
                2.0 / 0.064,
                -6.0 / 0.0256,
            ],
        );
        check(
            x.recip(),
            [2.5, -1.0 / 0.16, 2.0 / 0.064, -6.0 / 0.0256, 24.0 / 0.01024],
        );
        let r = 0.4f64.sqrt();
        check(
            x.sqrt(),
            [
                r,
                0.5 / r,
                -0.25 / (r * 0.4),
                0.375 / (r * 0.16),
                -0.9375 / (r * 0.064),
            ],
        );
    }

    #[test]
    fn derivative_lowers_order() {
        let z = Jet::seed(&[2.0, 3.0], 4);
        let f = &(&z[0] * &z[0]) * &z[1]; // x^2 y
        let dx = f.derivative(0); // 2xy
        assert_eq!(dx.order(), 3);
        assert_eq!(dx.value(), 12.0);
        assert_eq!(dx.partial(&[0]).unwrap(), 6.0);
        assert_eq!(dx.partial(&[0, 1]).unwrap(), 2.0);
        assert_eq!(dx.partial(&[0, 0, 1]).unwrap(), 0.0);
    }

    #[test]
    fn mixed_orders_truncate_to_minimum() {
        let a = Jet::variable(2, 3, 0, 1.0);
        let b = Jet::variable(2, 1, 1, 2.0);
        assert_eq!((&a * &b).order(), 1);
        assert_eq!((&a + &b).order(), 1);
    }
}
