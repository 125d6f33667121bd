//! Pointwise tensors of a regular Hamiltonian: metric, canonical nonlinear
//! connection, curvature, Jacobi endomorphism, dynamical covariant derivative
//! and Berwald connection.
//!
//! Index conventions: the first index is the row, `curvature()[i][j][k]` is
//! `R_ijk`, and coordinates are ordered `(x1..xn, p1..pn)`.

mod linalg;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::{HamiltonianSpec, Scalar};
use crate::fields::{
    bracket, check_point, directional, hamiltonian_components, sum_jets, values, PhaseField,
};
use crate::jets::{jet_lift, Jet, MAX_ORDER};
use crate::PhasePoint;

pub use linalg::{invert, Matrix, RCOND_THRESHOLD};
pub(crate) use linalg::{invert_jets, jet_values};

pub type Tensor3 = Vec<Vec<Vec<f64>>>;

/// Jets of `H`, its Hamiltonian field and its metric at one point.
#[derive(Debug, Clone)]
pub(crate) struct Frame {
    pub n: usize,
    pub h: Jet,
    /// `(ξ^1..ξ^n, χ_1..χ_n)`, one order below `h`.
    pub rho: Vec<Jet>,
    pub g_upper: Vec<Vec<Jet>>,
    pub g_lower: Vec<Vec<Jet>>,
    pub rcond: f64,
}

impl Frame {
    /// `order` is the jet order of `H`; the metric comes out two orders lower.
    pub fn new(spec: &HamiltonianSpec, point: &PhasePoint, order: usize) -> Result<Frame> {
        let n = spec.dim;
        check_point(n, point, "Hamiltonian")?;
        if !(2..=MAX_ORDER).contains(&order) {
            return Err(Error::InvalidArgument(format!(
                "frame order {order} out of range"
            )));
        }
        let h = jet_lift(&spec.expr, point, order)?;
        let rho = hamiltonian_components(&h, n);
        let g_upper: Vec<Vec<Jet>> = (0..n)
            .map(|i| (0..n).map(|j| rho[i].derivative(n + j)).collect())
            .collect();
        let (g_lower, rcond) = invert_jets(&g_upper, "momentum Hessian")?;
        Ok(Frame {
            n,
            h,
            rho,
            g_upper,
            g_lower,
            rcond,
        })
    }

    pub fn xi(&self, i: usize) -> &Jet {
        &self.rho[i]
    }

    pub fn chi(&self, i: usize) -> &Jet {
        &self.rho[self.n + i]
    }
}

/// The four coefficient families of the Berwald connection on the adapted
/// basis, each indexed `[i][j][s]`:
/// `𝒟_{δ_i} δ_j = hh[i][j][s] δ_s`, `𝒟_{δ_i} ∂^j = hv[i][j][s] ∂^s`,
/// `𝒟_{∂^i} δ_j = vh[i][j][s] δ_s`, `𝒟_{∂^i} ∂^j = vv[i][j][s] ∂^s`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BerwaldCoefficients {
    pub hh: Tensor3,
    pub hv: Tensor3,
    pub vh: Tensor3,
    pub vv: Tensor3,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Horizontality {
    pub horizontal: bool,
    pub residual: Vec<f64>,
    pub tolerance: f64,
}

/// Every pointwise tensor at one point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeometryReport {
    pub point: PhasePoint,
    pub hamiltonian: f64,
    pub g_upper: Matrix,
    pub g_lower: Matrix,
    pub metric_rcond: f64,
    pub xi: Vec<f64>,
    pub chi: Vec<f64>,
    pub connection: Matrix,
    pub curvature: Tensor3,
    pub jacobi: Matrix,
    pub jacobi_via_curvature: Matrix,
    pub nabla_h: Matrix,
    pub nabla_v: Matrix,
    pub berwald: BerwaldCoefficients,
    pub horizontal: Horizontality,
    pub nabla_j_residual: Matrix,
    pub nabla_metric_residual: Matrix,
}

/// Geometry of a regular Hamiltonian at a point, with the canonical
/// nonlinear connection
/// `𝒩_ij = ½({g_ij, H} − g_ik ∂²H/∂p_k∂x^j − g_jk ∂²H/∂p_k∂x^i)`
/// where `{f, H} = ∂f/∂p_k ∂H/∂x^k − ∂H/∂p_k ∂f/∂x^k = −ρ_H(f)`.
#[derive(Debug, Clone)]
pub struct LocalGeometry {
    point: PhasePoint,
    frame: Frame,
    /// Canonical connection coefficients as order-1 jets.
    conn: Vec<Vec<Jet>>,
}

impl LocalGeometry {
    pub fn new(spec: &HamiltonianSpec, point: &PhasePoint) -> Result<LocalGeometry> {
        let frame = Frame::new(spec, point, MAX_ORDER)?;
        let n = frame.n;
        let conn = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let rho_g = directional(&frame.rho, &frame.g_lower[i][j]);
                        let twist = sum_jets(
                            &rho_g,
                            (0..n).map(|k| {
                                &(&frame.g_lower[i][k] * &frame.xi(k).derivative(j))
                                    + &(&frame.g_lower[j][k] * &frame.xi(k).derivative(i))
                            }),
                        );
                        (&rho_g + &twist).scale(-0.5).truncate(1)
                    })
                    .collect()
            })
            .collect();
        Ok(LocalGeometry {
            point: point.clone(),
            frame,
            conn,
        })
    }

    pub fn dim(&self) -> usize {
        self.frame.n
    }

    pub fn point(&self) -> &PhasePoint {
        &self.point
    }

    pub(crate) fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn hamiltonian(&self) -> f64 {
        self.frame.h.value()
    }

    /// `(g^ij, g_ij)` with `g^ij = ∂²H/∂p_i∂p_j`.
    pub fn metric(&self) -> (Matrix, Matrix) {
        (
            jet_values(&self.frame.g_upper),
            jet_values(&self.frame.g_lower),
        )
    }

    pub fn metric_rcond(&self) -> f64 {
        self.frame.rcond
    }

    /// `(ξ, χ)` with `ξ^i = ∂H/∂p_i`, `χ_i = −∂H/∂x^i`.
    pub fn hamiltonian_vector_field(&self) -> (Vec<f64>, Vec<f64>) {
        let n = self.dim();
        let v = values(&self.frame.rho);
        (v[..n].to_vec(), v[n..].to_vec())
    }

    /// `ρ_H` as jets of order 3.
    pub fn rho_jets(&self) -> &[Jet] {
        &self.frame.rho
    }

    pub fn connection(&self) -> Matrix {
        jet_values(&self.conn)
    }

    /// `δf/δx^i = ∂f/∂x^i + 𝒩_ij ∂f/∂p_j` as jets, one order below `f` (at most 1).
    pub fn adapted_derivative_jets(&self, f: &Jet) -> Vec<Jet> {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let base = f.derivative(i);
                let extra = sum_jets(
                    &base,
                    (0..n).map(|j| &self.conn[i][j] * &f.derivative(n + j)),
                );
                &base + &extra
            })
            .collect()
    }

    pub fn adapted_derivative(&self, f: &Jet) -> Vec<f64> {
        values(&self.adapted_derivative_jets(f))
    }

    /// `R_ijk = δ𝒩_jk/δx^i − δ𝒩_ik/δx^j`.
    pub fn curvature(&self) -> Tensor3 {
        let n = self.dim();
        let delta: Vec<Vec<Vec<f64>>> = (0..n)
            .map(|j| {
                (0..n)
                    .map(|k| self.adapted_derivative(&self.conn[j][k]))
                    .collect()
            })
            .collect();
        // delta[j][k][i] = δ𝒩_jk/δx^i
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| (0..n).map(|k| delta[j][k][i] - delta[i][k][j]).collect())
                    .collect()
            })
            .collect()
    }

    /// `ℛ_jk = ∂²H/∂p_i∂x^j 𝒩_ik + ∂²H/∂p_i∂x^k 𝒩_ji + 𝒩_jl 𝒩_ik g^li
    ///        + ∂²H/∂x^j∂x^k + ρ_H(𝒩_jk)`.
    pub fn jacobi_endomorphism(&self) -> Matrix {
        let n = self.dim();
        let f = &self.frame;
        let nv = self.connection();
        let (gu, _) = self.metric();
        let dxi = |i: usize, j: usize| f.xi(i).derivative(j).value();
        (0..n)
            .map(|j| {
                (0..n)
                    .map(|k| {
                        let mut r = f.h.partial(&[j, k]).expect("order 4 jet");
                        r += directional(&f.rho, &self.conn[j][k]).value();
                        for i in 0..n {
                            r += dxi(i, j) * nv[i][k] + dxi(i, k) * nv[j][i];
                            for l in 0..n {
                                r += nv[j][l] * nv[i][k] * gu[l][i];
                            }
                        }
                        r
                    })
                    .collect()
            })
            .collect()
    }

    /// `ℛ_ij = R_kij ξ^k`, valid when `ρ_H` is horizontal.
    pub fn jacobi_via_curvature(&self) -> Matrix {
        let n = self.dim();
        let r = self.curvature();
        let (xi, _) = self.hamiltonian_vector_field();
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| (0..n).map(|k| r[k][i][j] * xi[k]).sum())
                    .collect()
            })
            .collect()
    }

    /// `χ_i − ξ^k 𝒩_ki`: zero exactly when `ρ_H = ξ^i δ/δx^i`.
    pub fn horizontal_residual(&self) -> Vec<f64> {
        let n = self.dim();
        let nv = self.connection();
        let (xi, chi) = self.hamiltonian_vector_field();
        (0..n)
            .map(|i| chi[i] - (0..n).map(|k| xi[k] * nv[k][i]).sum::<f64>())
            .collect()
    }

    pub fn is_horizontal(&self, tol: f64) -> Horizontality {
        let residual = self.horizontal_residual();
        Horizontality {
            horizontal: max_abs(&residual) < tol,
            residual,
            tolerance: tol,
        }
    }

    /// Coefficient jets (order 1) of `∇δ/δx^j = nabla_h[j][i] δ/δx^i` and
    /// `∇∂/∂p_j = nabla_v[j][i] ∂/∂p_i`.
    pub(crate) fn nabla_jets(&self) -> (Vec<Vec<Jet>>, Vec<Vec<Jet>>) {
        let n = self.dim();
        let f = &self.frame;
        let coupling = |a: usize, b: usize| {
            // 𝒩_ak g^kb
            sum_jets(
                &self.conn[0][0],
                (0..n).map(|k| &self.conn[a][k] * &f.g_upper[k][b]),
            )
        };
        let nh = (0..n)
            .map(|j| {
                (0..n)
                    .map(|i| -(&f.xi(i).derivative(j).truncate(1) + &coupling(j, i)))
                    .collect()
            })
            .collect();
        let nv = (0..n)
            .map(|j| {
                (0..n)
                    .map(|i| &f.xi(j).derivative(i).truncate(1) + &coupling(i, j))
                    .collect()
            })
            .collect();
        (nh, nv)
    }

    pub fn nabla_coefficients(&self) -> (Matrix, Matrix) {
        let (nh, nv) = self.nabla_jets();
        (jet_values(&nh), jet_values(&nv))
    }

    pub fn berwald_coefficients(&self) -> BerwaldCoefficients {
        let n = self.dim();
        let f = &self.frame;
        let (gu, gl) = self.metric();
        let dn_dp = |i: usize, k: usize, r: usize| self.conn[i][k].derivative(n + r).value();
        // δg_jk/δx^i
        let dg: Vec<Vec<Vec<f64>>> = (0..n)
            .map(|j| {
                (0..n)
                    .map(|k| self.adapted_derivative(&f.g_lower[j][k]))
                    .collect()
            })
            .collect();
        let cube = |g: &dyn Fn(usize, usize, usize) -> f64| -> Tensor3 {
            (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| (0..n).map(|s| g(i, j, s)).collect())
                        .collect()
                })
                .collect()
        };
        let hh = cube(&|i, j, s| {
            (0..n)
                .map(|k| {
                    let inner =
                        dg[j][k][i] - (0..n).map(|r| gl[j][r] * dn_dp(i, k, r)).sum::<f64>();
                    gu[k][s] * inner
                })
                .sum()
        });
        let hv = cube(&|i, j, r| -dn_dp(i, r, j));
        let vh = cube(&|_, _, _| 0.0);
        let vv = cube(&|i, j, s| {
            (0..n)
                .map(|k| gl[k][s] * f.g_upper[j][k].derivative(n + i).value())
                .sum()
        });
        BerwaldCoefficients { hh, hv, vh, vv }
    }

    /// Components of `∇𝒥_H` for a candidate connection `n_matrix`:
    /// `ρ_H(g_ij) + g_kj ∂ξ^k/∂x^i − g_ik ∂χ_j/∂p_k + 2N_ij`.
    pub fn nabla_j_residual(&self, n_matrix: &Matrix) -> Result<Matrix> {
        let n = self.dim();
        if n_matrix.len() != n || n_matrix.iter().any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch {
                what: "connection matrix".to_string(),
                expected: n,
                found: n_matrix.len(),
            });
        }
        let f = &self.frame;
        let (_, gl) = self.metric();
        Ok((0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let mut r =
                            directional(&f.rho, &f.g_lower[i][j]).value() + 2.0 * n_matrix[i][j];
                        for k in 0..n {
                            r += gl[k][j] * f.xi(k).derivative(i).value();
                            r -= gl[i][k] * f.chi(j).derivative(n + k).value();
                        }
                        r
                    })
                    .collect()
            })
            .collect())
    }

    /// `∇` applied to `g_ij dx^i ⊗ dx^j`:
    /// `ρ_H(g_ab) − nabla_h[a][k] g_kb − nabla_h[b][k] g_ak`.
    pub fn nabla_metric_residual(&self) -> Matrix {
        let n = self.dim();
        let (nh, _) = self.nabla_coefficients();
        let (_, gl) = self.metric();
        let f = &self.frame;
        (0..n)
            .map(|a| {
                (0..n)
                    .map(|b| {
                        let mut r = directional(&f.rho, &f.g_lower[a][b]).value();
                        for k in 0..n {
                            r -= nh[a][k] * gl[k][b] + nh[b][k] * gl[a][k];
                        }
                        r
                    })
                    .collect()
            })
            .collect()
    }

    /// `∇` applied to `g^ij ∂/∂p_i ⊗ ∂/∂p_j`:
    /// `ρ_H(g^ab) + g^kb nabla_v[k][a] + g^ak nabla_v[k][b]`.
    /// Does not vanish for the canonical connection in general.
    pub fn nabla_vertical_metric_residual(&self) -> Matrix {
        let n = self.dim();
        let (_, nv) = self.nabla_coefficients();
        let (gu, _) = self.metric();
        let f = &self.frame;
        (0..n)
            .map(|a| {
                (0..n)
                    .map(|b| {
                        let mut r = directional(&f.rho, &f.g_upper[a][b]).value();
                        for k in 0..n {
                            r += gu[k][b] * nv[k][a] + gu[a][k] * nv[k][b];
                        }
                        r
                    })
                    .collect()
            })
            .collect()
    }

    pub fn report(&self, horizontal_tol: f64) -> GeometryReport {
        let (g_upper, g_lower) = self.metric();
        let (xi, chi) = self.hamiltonian_vector_field();
        let (nabla_h, nabla_v) = self.nabla_coefficients();
        let connection = self.connection();
        let nabla_j_residual = self
            .nabla_j_residual(&connection)
            .expect("connection has the right shape");
        GeometryReport {
            point: self.point.clone(),
            hamiltonian: self.hamiltonian(),
            g_upper,
            g_lower,
            metric_rcond: self.metric_rcond(),
            xi,
            chi,
            curvature: self.curvature(),
            jacobi: self.jacobi_endomorphism(),
            jacobi_via_curvature: self.jacobi_via_curvature(),
            nabla_h,
            nabla_v,
            berwald: self.berwald_coefficients(),
            horizontal: self.is_horizontal(horizontal_tol),
            nabla_j_residual,
            nabla_metric_residual: self.nabla_metric_residual(),
            connection,
        }
    }

    // Projectors and structures of the canonical connection, acting on
    // vector fields given as `2n` jets.

    fn zero_like(&self, v: &[Jet]) -> Jet {
        v[0].constant_like(0.0).truncate(1)
    }

    /// `h(V) = V^i δ/δx^i`.
    pub fn horizontal_part(&self, v: &[Jet]) -> Vec<Jet> {
        let n = self.dim();
        let zero = self.zero_like(v);
        let mut out: Vec<Jet> = v[..n].to_vec();
        out.extend((0..n).map(|j| sum_jets(&zero, (0..n).map(|i| &v[i] * &self.conn[i][j]))));
        out
    }

    /// `v(V) = V − h(V)`.
    pub fn vertical_part(&self, v: &[Jet]) -> Vec<Jet> {
        let h = self.horizontal_part(v);
        v.iter().zip(&h).map(|(a, b)| a - b).collect()
    }

    /// `𝒥_H(V) = g_ij V^i ∂/∂p_j`.
    pub fn tangent_structure(&self, v: &[Jet]) -> Vec<Jet> {
        let n = self.dim();
        let zero = self.zero_like(v);
        let g = &self.frame.g_lower;
        let mut out = vec![zero.clone(); n];
        out.extend((0..n).map(|j| sum_jets(&zero, (0..n).map(|i| &g[i][j] * &v[i]))));
        out
    }

    /// `(𝔽 + 𝒥_H)(V) = g^sj (vV)_j δ/δx^s`, the horizontal partner of the
    /// vertical part of `V`.
    pub fn horizontal_lift_of_vertical(&self, v: &[Jet]) -> Vec<Jet> {
        let n = self.dim();
        let zero = self.zero_like(v);
        let vert = self.vertical_part(v);
        let g = &self.frame.g_upper;
        let w: Vec<Jet> = (0..n)
            .map(|s| sum_jets(&zero, (0..n).map(|j| &g[s][j] * &vert[n + j])))
            .collect();
        let mut full = w;
        full.extend(vec![zero; n]);
        self.horizontal_part(&full)
    }

    /// Dynamical covariant derivative `∇Y = h[ρ_H, hY] + v[ρ_H, vY]`.
    /// `y` needs jets of order at least 1.
    pub fn dynamical_derivative(&self, y: &[Jet]) -> Vec<f64> {
        let rho = self.rho_jets();
        let h = self.horizontal_part(&bracket(rho, &self.horizontal_part(y)));
        let v = self.vertical_part(&bracket(rho, &self.vertical_part(y)));
        h.iter()
            .zip(&v)
            .map(|(a, b)| a.value() + b.value())
            .collect()
    }

    /// Berwald connection from its bracket form
    /// `𝒟_X Y = v[hX, vY] + h[vX, hY] + 𝒥[vX, (𝔽+𝒥)Y] + (𝔽+𝒥)[hX, 𝒥Y]`.
    pub fn berwald_derivative(&self, x: &[Jet], y: &[Jet]) -> Vec<f64> {
        let (hx, vx) = (self.horizontal_part(x), self.vertical_part(x));
        let (hy, vy) = (self.horizontal_part(y), self.vertical_part(y));
        let terms = [
            self.vertical_part(&bracket(&hx, &vy)),
            self.horizontal_part(&bracket(&vx, &hy)),
            self.tangent_structure(&bracket(&vx, &self.horizontal_lift_of_vertical(y))),
            self.horizontal_lift_of_vertical(&bracket(&hx, &self.tangent_structure(y))),
        ];
        (0..x.len())
            .map(|a| terms.iter().map(|t| t[a].value()).sum())
            .collect()
    }

    /// `𝒟_{ρ_H} Y` from the Berwald coefficients, in natural coordinates.
    pub fn berwald_along_rho(&self, y: &[Jet]) -> Vec<f64> {
        let n = self.dim();
        let b = self.berwald_coefficients();
        let nv = self.connection();
        let (xi, _) = self.hamiltonian_vector_field();
        let rho = self.rho_jets();
        let rho_v: Vec<f64> = values(&self.vertical_part(rho))[n..].to_vec();
        let vert = self.vertical_part(y);
        let yh: Vec<f64> = y[..n].iter().map(Jet::value).collect();
        let yv: Vec<f64> = vert[n..].iter().map(Jet::value).collect();

        let h_coef: Vec<f64> = (0..n)
            .map(|s| {
                let mut c = directional(rho, &y[s]).value();
                for i in 0..n {
                    for j in 0..n {
                        c += yh[j] * (xi[i] * b.hh[i][j][s] + rho_v[i] * b.vh[i][j][s]);
                    }
                }
                c
            })
            .collect();
        let mut out = h_coef.clone();
        for r in 0..n {
            let mut c = directional(rho, &vert[n + r]).value();
            for i in 0..n {
                for j in 0..n {
                    c += yv[j] * (xi[i] * b.hv[i][j][r] + rho_v[i] * b.vv[i][j][r]);
                }
            }
            c += (0..n).map(|s| h_coef[s] * nv[s][r]).sum::<f64>();
            out.push(c);
        }
        out
    }
}

/// Nonlinear connection of a `𝒥`-regular field `ρ = ξ^i ∂/∂x^i + χ_i ∂/∂p_i`:
/// `𝒩_ij = ½(t_ik ∂χ_j/∂p_k − t_kj ∂ξ^k/∂x^i − ρ(t_ij))` with `t^ij = ∂ξ^j/∂p_i`.
pub fn connection_general(rho: &dyn PhaseField, point: &PhasePoint) -> Result<Matrix> {
    let n = rho.dim();
    check_point(n, point, "semispray")?;
    let r = rho.jets(point, 2)?;
    let t_upper: Vec<Vec<Jet>> = (0..n)
        .map(|i| (0..n).map(|j| r[j].derivative(n + i)).collect())
        .collect();
    let (t_lower, _) = invert_jets(&t_upper, "t^ij of the vector field")?;
    let t = jet_values(&t_lower);
    Ok((0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let mut v = -directional(&r, &t_lower[i][j]).value();
                    for k in 0..n {
                        v += t[i][k] * r[n + j].derivative(n + k).value();
                        v -= t[k][j] * r[k].derivative(i).value();
                    }
                    0.5 * v
                })
                .collect()
        })
        .collect())
}

pub fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

pub fn max_abs_matrix(m: &Matrix) -> f64 {
    m.iter().map(|r| max_abs(r)).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests;
