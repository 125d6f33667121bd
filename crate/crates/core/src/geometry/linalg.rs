use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::expr::Scalar;
use crate::fields::sum_jets;
use crate::jets::Jet;

pub type Matrix = Vec<Vec<f64>>;

/// Reciprocal condition number below which a matrix counts as singular.
pub const RCOND_THRESHOLD: f64 = 1e-12;

fn norm1(m: &DMatrix<f64>) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Inverse by LU with partial pivoting, plus the 1-norm reciprocal condition.
pub fn invert(a: &Matrix, what: &'static str) -> Result<(Matrix, f64)> {
    let n = a.len();
    let m = DMatrix::from_fn(n, n, |i, j| a[i][j]);
    let inv = m.clone().lu().try_inverse();
    let rcond = match &inv {
        Some(inv) => {
            let r = 1.0 / (norm1(&m) * norm1(inv));
            if r.is_finite() {
                r
            } else {
                0.0
            }
        }
        None => 0.0,
    };
    match inv {
        Some(inv) if rcond >= RCOND_THRESHOLD => Ok((
            (0..n)
                .map(|i| (0..n).map(|j| inv[(i, j)]).collect())
                .collect(),
            rcond,
        )),
        _ => Err(Error::Singular { what, rcond }),
    }
}

pub fn jet_values(m: &[Vec<Jet>]) -> Matrix {
    m.iter()
        .map(|row| row.iter().map(Jet::value).collect())
        .collect()
}

pub fn matmul(a: &[Vec<Jet>], b: &[Vec<Jet>]) -> Vec<Vec<Jet>> {
    let n = a.len();
    let cols = b[0].len();
    (0..n)
        .map(|i| {
            (0..cols)
                .map(|j| sum_jets(&a[i][0], (0..b.len()).map(|k| &a[i][k] * &b[k][j])))
                .collect()
        })
        .collect()
}

/// Inverse of a matrix of jets: `Σ_r (−A₀⁻¹B)^r A₀⁻¹` with `A = A₀ + B`,
/// exact up to the jet order because `B` has no constant term.
pub fn invert_jets(a: &[Vec<Jet>], what: &'static str) -> Result<(Vec<Vec<Jet>>, f64)> {
    let (inv0, rcond) = invert(&jet_values(a), what)?;
    let template = &a[0][0];
    let order = template.order();
    let inv0: Vec<Vec<Jet>> = inv0
        .iter()
        .map(|row| row.iter().map(|&v| template.constant_like(v)).collect())
        .collect();
    let shift: Vec<Vec<Jet>> = a
        .iter()
        .map(|row| {
            row.iter()
                .map(|j| j - &j.constant_like(j.value()))
                .collect()
        })
        .collect();
    let step: Vec<Vec<Jet>> = matmul(&inv0, &shift)
        .into_iter()
        .map(|row| row.into_iter().map(|j| -j).collect())
        .collect();
    let mut term = inv0.clone();
    let mut total = inv0;
    for _ in 0..order {
        term = matmul(&step, &term);
        for (row, trow) in total.iter_mut().zip(&term) {
            for (t, x) in row.iter_mut().zip(trow) {
                *t = &*t + x;
            }
        }
    }
    Ok((total, rcond))
}
