//! Symmetry notions of a Hamiltonian system evaluated as pointwise residuals.

use serde::Serialize;

use crate::error::Result;
use crate::expr::{Expr, HamiltonianSpec};
use crate::fields::{
    bracket, check_order, check_point, directional, sum_jets, values, HamiltonianField, PhaseField,
};
pub use crate::fields::{BaseVectorFieldSpec, CompleteLift, LiftSign, VectorFieldSpec};
use crate::geometry::{jet_values, Frame, LocalGeometry, Matrix};
use crate::jets::{jet_lift, Jet, MAX_ORDER};
use crate::PhasePoint;

/// `[X, Y]` at `point`.
pub fn lie_bracket(x: &dyn PhaseField, y: &dyn PhaseField, point: &PhasePoint) -> Result<Vec<f64>> {
    Ok(values(&bracket(&x.jets(point, 1)?, &y.jets(point, 1)?)))
}

/// `[ρ_H, X]`; zero for an infinitesimal symmetry.
pub fn symmetry_residual(
    h: &HamiltonianSpec,
    x: &dyn PhaseField,
    point: &PhasePoint,
) -> Result<Vec<f64>> {
    lie_bracket(&HamiltonianField { hamiltonian: h }, x, point)
}

/// Vertical components `g_ij [ρ_H, X]^i` of `𝒥_H[ρ_H, X]`; zero for a Newtonoid field.
pub fn newtonoid_residual(
    h: &HamiltonianSpec,
    x: &dyn PhaseField,
    point: &PhasePoint,
) -> Result<Vec<f64>> {
    let frame = Frame::new(h, point, 2)?;
    let b = symmetry_residual(h, x, point)?;
    Ok(lower(&jet_values(&frame.g_lower), &b[..h.dim]))
}

fn lower(g: &Matrix, v: &[f64]) -> Vec<f64> {
    let n = v.len();
    (0..n)
        .map(|j| (0..n).map(|i| g[i][j] * v[i]).sum())
        .collect()
}

/// The Newtonoid field with prescribed position components `X^i`:
/// `Y_k = g_ki (ρ_H(X^i) − X^j ∂²H/∂p_i∂x^j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct NewtonoidLift<'a> {
    pub hamiltonian: &'a HamiltonianSpec,
    pub x_components: Vec<Expr>,
}

impl PhaseField for NewtonoidLift<'_> {
    fn dim(&self) -> usize {
        self.hamiltonian.dim
    }

    fn max_order(&self) -> usize {
        MAX_ORDER - 2
    }

    fn jets(&self, point: &PhasePoint, order: usize) -> Result<Vec<Jet>> {
        let n = self.hamiltonian.dim;
        check_point(n, point, "Newtonoid lift")?;
        check_order(self, order)?;
        if self.x_components.len() != n {
            return Err(crate::Error::DimensionMismatch {
                what: "Newtonoid position components".to_string(),
                expected: n,
                found: self.x_components.len(),
            });
        }
        let frame = Frame::new(self.hamiltonian, point, order + 2)?;
        let x: Vec<Jet> = self
            .x_components
            .iter()
            .map(|e| jet_lift(e, point, order + 1))
            .collect::<std::result::Result<_, _>>()?;
        let w: Vec<Jet> = (0..n)
            .map(|i| {
                let flow = directional(&frame.rho, &x[i]);
                let shear = sum_jets(&flow, (0..n).map(|j| &x[j] * &frame.xi(i).derivative(j)));
                &flow - &shear
            })
            .collect();
        let mut out: Vec<Jet> = x.iter().map(|j| j.truncate(order)).collect();
        out.extend((0..n).map(|k| sum_jets(&w[0], (0..n).map(|i| &frame.g_lower[k][i] * &w[i]))));
        Ok(out)
    }
}

/// Values `(X^i, Y_k)` of the Newtonoid lift at `point`.
pub fn newtonoid_lift(
    h: &HamiltonianSpec,
    x_components: &[Expr],
    point: &PhasePoint,
) -> Result<Vec<f64>> {
    NewtonoidLift {
        hamiltonian: h,
        x_components: x_components.to_vec(),
    }
    .values(point)
}

/// Vertical components of `v(X) − 𝒥_H(∇X)` for the canonical connection.
pub fn newtonoid_invariant_residual(
    h: &HamiltonianSpec,
    x: &dyn PhaseField,
    point: &PhasePoint,
) -> Result<Vec<f64>> {
    let g = LocalGeometry::new(h, point)?;
    let n = g.dim();
    let jets = x.jets(point, 1)?;
    let nabla = g.dynamical_derivative(&jets);
    let (_, gl) = g.metric();
    let j_nabla = lower(&gl, &nabla[..n]);
    let vert = values(&g.vertical_part(&jets));
    Ok((0..n).map(|j| vert[n + j] - j_nabla[j]).collect())
}

pub fn complete_lift(base: &BaseVectorFieldSpec) -> CompleteLift {
    CompleteLift {
        base: base.clone(),
        sign: LiftSign::Minus,
    }
}

/// `[ρ_H, X̃^{C*}]`; zero for a natural symmetry.
pub fn natural_symmetry_residual(
    h: &HamiltonianSpec,
    base: &BaseVectorFieldSpec,
    point: &PhasePoint,
) -> Result<Vec<f64>> {
    symmetry_residual(h, &complete_lift(base), point)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NoetherResidual {
    /// `ℒ_X ω` as a `2n × 2n` antisymmetric matrix.
    pub lie_omega: Matrix,
    /// `X(H)`.
    pub x_of_h: f64,
}

impl NoetherResidual {
    pub fn max_entry(&self) -> f64 {
        crate::geometry::max_abs_matrix(&self.lie_omega)
    }
}

/// `(ℒ_X ω, X(H))` with `ω = dp_i ∧ dx^i`; `ℒ_X ω = AᵀS + SA` for the
/// Jacobian `A` of `X` and `S = [[0, −I], [I, 0]]`.
pub fn noether_residual(
    h: &HamiltonianSpec,
    x: &dyn PhaseField,
    point: &PhasePoint,
) -> Result<NoetherResidual> {
    check_point(h.dim, point, "Hamiltonian")?;
    let n = h.dim;
    let m = 2 * n;
    let jets = x.jets(point, 1)?;
    let a: Matrix = (0..m)
        .map(|r| (0..m).map(|c| jets[r].derivative(c).value()).collect())
        .collect();
    let s = |r: usize, c: usize| -> f64 {
        if r < n && c == r + n {
            -1.0
        } else if r >= n && c + n == r {
            1.0
        } else {
            0.0
        }
    };
    // (AᵀS)_rc = Σ_k A_kr S_kc, (SA)_rc = Σ_k S_rk A_kc
    let lie_omega = (0..m)
        .map(|r| {
            (0..m)
                .map(|c| (0..m).map(|k| a[k][r] * s(k, c) + s(r, k) * a[k][c]).sum())
                .collect()
        })
        .collect();
    let hj = jet_lift(&h.expr, point, 1)?;
    let x_of_h = directional(&jets, &hj).value();
    Ok(NoetherResidual { lie_omega, x_of_h })
}

/// Components of `ℒ_X θ` on `(dx^1..dx^n, dp_1..dp_n)`:
/// `Y_k + p_i ∂X^i/∂x^k` and `p_i ∂X^i/∂p_k`.
pub fn lie_derivative_theta(x: &dyn PhaseField, point: &PhasePoint) -> Result<Vec<f64>> {
    let n = x.dim();
    check_point(n, point, "vector field")?;
    let jets = x.jets(point, 1)?;
    let p = point.p();
    Ok((0..2 * n)
        .map(|k| {
            let pull: f64 = (0..n).map(|i| p[i] * jets[i].derivative(k).value()).sum();
            if k < n {
                jets[n + k].value() + pull
            } else {
                pull
            }
        })
        .collect())
}

/// `∇²(g_ij X^i) + ℛ_ij X^i`, with `(∇V)_i = ρ_H(V_i) + V_j nabla_v[j][i]` on
/// vertical fields. Only the position components of `x` enter.
pub fn invariant_equation_residual(
    h: &HamiltonianSpec,
    x: &dyn PhaseField,
    point: &PhasePoint,
) -> Result<Vec<f64>> {
    let g = LocalGeometry::new(h, point)?;
    let n = g.dim();
    let jets = x.jets(point, 2)?;
    let frame = g.frame();
    let v: Vec<Jet> = (0..n)
        .map(|j| sum_jets(&jets[0], (0..n).map(|i| &frame.g_lower[i][j] * &jets[i])))
        .collect();
    let (_, nv) = g.nabla_jets();
    let nabla = |v: &[Jet]| -> Vec<Jet> {
        (0..n)
            .map(|i| {
                let flow = directional(g.rho_jets(), &v[i]);
                let twist = sum_jets(&flow, (0..n).map(|j| &v[j] * &nv[j][i]));
                &flow + &twist
            })
            .collect()
    };
    let second = nabla(&nabla(&v));
    let phi = g.jacobi_endomorphism();
    let xv: Vec<f64> = jets[..n].iter().map(Jet::value).collect();
    Ok((0..n)
        .map(|j| second[j].value() + (0..n).map(|i| phi[i][j] * xv[i]).sum::<f64>())
        .collect())
}

/// `f * X = fX + f 𝒥_H[ρ_H, X] + ρ_H(f) 𝒥_H X`.
pub fn star_product(
    f: &Expr,
    x: &dyn PhaseField,
    h: &HamiltonianSpec,
    point: &PhasePoint,
) -> Result<Vec<f64>> {
    let parts = StarParts::new(f, x, h, point)?;
    let n = h.dim;
    let mut out: Vec<f64> = parts.x.iter().map(|v| parts.f * v).collect();
    for j in 0..n {
        out[n + j] += parts.f * parts.j_bracket[j] + parts.rho_f * parts.j_x[j];
    }
    Ok(out)
}

/// `fX + ρ_H(f) 𝒥_H X`, the form the product takes on Newtonoid fields.
pub fn star_product_reduced(
    f: &Expr,
    x: &dyn PhaseField,
    h: &HamiltonianSpec,
    point: &PhasePoint,
) -> Result<Vec<f64>> {
    let parts = StarParts::new(f, x, h, point)?;
    let n = h.dim;
    let mut out: Vec<f64> = parts.x.iter().map(|v| parts.f * v).collect();
    for j in 0..n {
        out[n + j] += parts.rho_f * parts.j_x[j];
    }
    Ok(out)
}

struct StarParts {
    f: f64,
    rho_f: f64,
    x: Vec<f64>,
    j_bracket: Vec<f64>,
    j_x: Vec<f64>,
}

impl StarParts {
    fn new(
        f: &Expr,
        x: &dyn PhaseField,
        h: &HamiltonianSpec,
        point: &PhasePoint,
    ) -> Result<StarParts> {
        let n = h.dim;
        let frame = Frame::new(h, point, 2)?;
        let gl = jet_values(&frame.g_lower);
        let fj = jet_lift(f, point, 1)?;
        let xv = x.values(point)?;
        Ok(StarParts {
            f: fj.value(),
            rho_f: directional(&frame.rho, &fj).value(),
            j_bracket: newtonoid_residual(h, x, point)?,
            j_x: lower(&gl, &xv[..n]),
            x: xv,
        })
    }
}

/// `X̃^{C*}(H)`; zero for an invariant base field.
pub fn invariant_vector_field_check(
    h: &HamiltonianSpec,
    base: &BaseVectorFieldSpec,
    point: &PhasePoint,
) -> Result<f64> {
    let lift = complete_lift(base).jets(point, 0)?;
    let hj = jet_lift(&h.expr, point, 1)?;
    Ok(directional(&lift, &hj).value())
}

/// `θ(X̃^{C*}) = p_i X̃^i(x)`.
pub fn momentum_map(base: &BaseVectorFieldSpec, point: &PhasePoint) -> Result<f64> {
    check_point(base.dim(), point, "base field")?;
    let mut total = 0.0;
    for (c, p) in base.components().iter().zip(point.p()) {
        total += p * crate::expr::evaluate(c, point)?;
    }
    Ok(total)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConservationNoether {
    /// `X` with `i_X ω = −df`: `X^i = ∂f/∂p_i`, `Y_i = −∂f/∂x^i`.
    pub field: Vec<f64>,
    pub noether: NoetherResidual,
    /// `ρ_H(f)`; zero when `f` is conserved.
    pub rho_f: f64,
    /// Potential `F = θ(X) − f` with `ℒ_X θ = dF`.
    pub potential: f64,
    /// Largest component of `ℒ_X θ − dF`.
    pub exactness_residual: f64,
    /// The conserved quantity `F − θ(X)`, which equals `−f`.
    pub conservation_value: f64,
}

/// The exact Noether symmetry attached to a function `f`.
pub fn noether_from_conservation(
    f: &Expr,
    h: &HamiltonianSpec,
    point: &PhasePoint,
) -> Result<ConservationNoether> {
    let n = h.dim;
    check_point(n, point, "Hamiltonian")?;
    let spec = HamiltonianSpec::new("f", n, f.clone())
        .map_err(|e| crate::Error::InvalidArgument(e.to_string()))?;
    let x = HamiltonianField { hamiltonian: &spec };
    let field = x.values(point)?;
    let noether = noether_residual(h, &x, point)?;
    let frame_rho = HamiltonianField { hamiltonian: h }.jets(point, 0)?;
    let fj = jet_lift(f, point, 2)?;
    let rho_f = directional(&frame_rho, &fj).value();
    let theta_x: f64 = (0..n).map(|i| point.p()[i] * field[i]).sum();
    let potential = theta_x - fj.value();

    // dF = d(p_i X^i) − df
    let xj = x.jets(point, 1)?;
    let p = Jet::seed(&point.coords(), 1);
    let theta_jet = sum_jets(&p[0], (0..n).map(|i| &p[n + i] * &xj[i]));
    let lie = lie_derivative_theta(&x, point)?;
    let exactness_residual = (0..2 * n)
        .map(|k| (lie[k] - (theta_jet.derivative(k).value() - fj.derivative(k).value())).abs())
        .fold(0.0, f64::max);
    Ok(ConservationNoether {
        field,
        noether,
        rho_f,
        potential,
        exactness_residual,
        conservation_value: potential - theta_x,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use crate::geometry::max_abs;
    use crate::sampling::{sample_points, SampleBox};

    fn example() -> HamiltonianSpec {
        HamiltonianSpec::parse("example", 2, "0.5*(p1^2+(p1*x1+p2)^2)").unwrap()
    }

    fn free() -> HamiltonianSpec {
        HamiltonianSpec::parse("free", 2, "0.5*(p1^2+p2^2)").unwrap()
    }

    fn at(z: [f64; 4]) -> PhasePoint {
        PhasePoint::from_coords(&z).unwrap()
    }

    fn field(x: [&str; 2], p: [&str; 2]) -> VectorFieldSpec {
        VectorFieldSpec::parse(2, &x, &p).unwrap()
    }

    fn base(c: [&str; 2]) -> BaseVectorFieldSpec {
        BaseVectorFieldSpec::parse(2, &c).unwrap()
    }

    fn samples(count: usize) -> Vec<PhasePoint> {
        let b = SampleBox::uniform(2, (-2.0, 2.0), (0.2, 2.0)).unwrap();
        sample_points(&b, count, 5)
    }

    fn exprs(v: [&str; 2]) -> Vec<Expr> {
        v.iter().map(|t| parse(t, 2).unwrap()).collect()
    }

    #[test]
    fn momentum_translation_is_a_symmetry() {
        let h = example();
        let x = field(["0", "p2"], ["0", "0"]);
        for p in samples(100) {
            assert!(max_abs(&symmetry_residual(&h, &x, &p).unwrap()) < 1e-12);
            assert!(max_abs(&newtonoid_residual(&h, &x, &p).unwrap()) < 1e-12);
        }
    }

    #[test]
    fn bracket_basics() {
        let h = example();
        let p = at([1.0, 0.0, 1.0, 1.0]);
        let rho = HamiltonianField { hamiltonian: &h };
        assert_eq!(symmetry_residual(&h, &rho, &p).unwrap(), vec![0.0; 4]);
        let dx1 = field(["1", "0"], ["0", "0"]);
        let r = symmetry_residual(&h, &dx1, &p).unwrap();
        assert_eq!(r[0], -3.0);
        assert_eq!(r[1], -1.0);
        assert_eq!(newtonoid_residual(&h, &dx1, &p).unwrap(), vec![-2.0, 1.0]);
        let zero = VectorFieldSpec::zero(2);
        assert_eq!(newtonoid_residual(&h, &zero, &p).unwrap(), vec![0.0; 2]);
    }

    #[test]
    fn newtonoid_lift_examples() {
        let h = example();
        let p = at([0.4, 1.3, 0.9, -0.6]);
        assert_eq!(
            newtonoid_lift(&h, &exprs(["0", "p2"]), &p).unwrap(),
            vec![0.0, -0.6, 0.0, 0.0]
        );
        assert_eq!(
            newtonoid_lift(&h, &exprs(["0", "0"]), &p).unwrap(),
            vec![0.0; 4]
        );
        let f = free();
        let v = newtonoid_lift(&f, &exprs(["2", "-1"]), &p).unwrap();
        assert_eq!(v, vec![2.0, -1.0, 0.0, 0.0]);
    }

    #[test]
    fn newtonoid_lift_is_newtonoid_and_invariant() {
        let h = example();
        let lifts = [
            NewtonoidLift {
                hamiltonian: &h,
                x_components: exprs(["x2*p1", "x1^2+p2"]),
            },
            NewtonoidLift {
                hamiltonian: &h,
                x_components: exprs(["1", "0"]),
            },
            NewtonoidLift {
                hamiltonian: &h,
                x_components: exprs(["0", "p2"]),
            },
        ];
        for p in samples(100) {
            for lift in &lifts {
                assert!(max_abs(&newtonoid_residual(&h, lift, &p).unwrap()) < 1e-11);
                assert!(max_abs(&newtonoid_invariant_residual(&h, lift, &p).unwrap()) < 1e-9);
            }
        }
        let p = at([1.0, 0.0, 1.0, 1.0]);
        let zero = VectorFieldSpec::zero(2);
        assert_eq!(
            newtonoid_invariant_residual(&h, &zero, &p).unwrap(),
            vec![0.0; 2]
        );
        let dp1 = field(["0", "0"], ["1", "0"]);
        assert!(max_abs(&newtonoid_invariant_residual(&h, &dp1, &p).unwrap()) > 0.1);
    }

    #[test]
    fn complete_lift_preserves_theta() {
        let fields = [
            ["1", "0"],
            ["x1", "0"],
            ["x2", "0"],
            ["x1^2", "x1*x2"],
            ["x2^3-x1", "2*x1*x2^2"],
        ];
        for p in samples(50) {
            for c in fields {
                let lift = complete_lift(&base(c));
                assert!(max_abs(&lie_derivative_theta(&lift, &p).unwrap()) < 1e-12);
            }
        }
        let plus = CompleteLift {
            base: base(["x1", "0"]),
            sign: LiftSign::Plus,
        };
        let p = at([1.0, 0.0, 1.0, 1.0]);
        assert!(max_abs(&lie_derivative_theta(&plus, &p).unwrap()) > 1.0);
    }

    #[test]
    fn natural_and_invariant_base_fields() {
        let h = example();
        let p = at([1.0, 0.0, 1.0, 1.0]);
        assert!(max_abs(&natural_symmetry_residual(&h, &base(["0", "1"]), &p).unwrap()) < 1e-15);
        assert!(max_abs(&natural_symmetry_residual(&h, &base(["x1", "0"]), &p).unwrap()) > 0.1);
        assert_eq!(
            invariant_vector_field_check(&h, &base(["0", "1"]), &p).unwrap(),
            0.0
        );
        assert_eq!(
            invariant_vector_field_check(&h, &base(["1", "0"]), &p).unwrap(),
            2.0
        );
        let f = free();
        let q = at([0.3, -0.2, 1.5, -0.7]);
        assert_eq!(
            natural_symmetry_residual(&f, &base(["2", "-3"]), &q).unwrap(),
            vec![0.0; 4]
        );
        assert_eq!(
            invariant_vector_field_check(&f, &base(["2", "-3"]), &q).unwrap(),
            0.0
        );
    }

    #[test]
    fn momentum_maps() {
        let p = at([1.0, 0.0, 1.0, 1.0]);
        assert_eq!(momentum_map(&base(["0", "1"]), &p).unwrap(), 1.0);
        assert_eq!(momentum_map(&base(["0", "0"]), &p).unwrap(), 0.0);
        assert_eq!(momentum_map(&base(["x1", "0"]), &p).unwrap(), 1.0);
        let q = at([0.5, 2.0, -0.3, 0.75]);
        assert_eq!(momentum_map(&base(["0", "1"]), &q).unwrap(), 0.75);
    }

    #[test]
    fn noether_residuals() {
        let h = example();
        let rho = HamiltonianField { hamiltonian: &h };
        for p in samples(100) {
            let r = noether_residual(&h, &rho, &p).unwrap();
            assert!(r.max_entry() < 1e-12 && r.x_of_h.abs() < 1e-12);
            for a in 0..4 {
                for b in 0..4 {
                    assert_eq!(r.lie_omega[a][b], -r.lie_omega[b][a]);
                }
            }
        }
        let p = at([1.0, 0.0, 1.0, 1.0]);
        let r = noether_residual(&h, &field(["0", "1"], ["0", "0"]), &p).unwrap();
        assert_eq!((r.max_entry(), r.x_of_h), (0.0, 0.0));
        let r = noether_residual(&h, &field(["x1", "0"], ["0", "0"]), &p).unwrap();
        assert!(r.max_entry() > 0.5);
    }

    #[test]
    fn invariant_equation() {
        let h = example();
        let x = field(["0", "p2"], ["0", "0"]);
        for p in samples(20) {
            assert!(max_abs(&invariant_equation_residual(&h, &x, &p).unwrap()) < 1e-9);
        }
        let p = at([1.0, 0.0, 1.0, 1.0]);
        assert_eq!(
            invariant_equation_residual(&h, &VectorFieldSpec::zero(2), &p).unwrap(),
            vec![0.0; 2]
        );

        // flat case: ∇² reduces to ρ_H(ρ_H(X^j)) for X = x1 ∂/∂x1
        let f = free();
        let lift = NewtonoidLift {
            hamiltonian: &f,
            x_components: exprs(["x1", "0"]),
        };
        let q = at([0.3, -0.2, 1.5, -0.7]);
        let r = invariant_equation_residual(&f, &lift, &q).unwrap();
        assert_eq!(r, vec![0.0, 0.0]);
        let lift = NewtonoidLift {
            hamiltonian: &f,
            x_components: exprs(["x1^3", "0"]),
        };
        let r = invariant_equation_residual(&f, &lift, &q).unwrap();
        // ρ(ρ(x1³)) = 6 x1 p1²
        assert!(
            (r[0] - 6.0 * 0.3 * 1.5 * 1.5).abs() < 1e-12 && r[1] == 0.0,
            "{r:?}"
        );
    }

    #[test]
    fn star_products() {
        let h = example();
        let p = at([1.0, 0.0, 1.0, 1.0]);
        let one = parse("1", 2).unwrap();
        let zero = parse("0", 2).unwrap();
        let f = parse("x1*p2+2", 2).unwrap();
        let dx1 = field(["1", "0"], ["0", "0"]);
        let s = star_product(&one, &dx1, &h, &p).unwrap();
        // X + 𝒥[ρ, X]
        assert_eq!(s, vec![1.0, 0.0, -2.0, 1.0]);
        assert_eq!(star_product(&zero, &dx1, &h, &p).unwrap(), vec![0.0; 4]);
        let lift = NewtonoidLift {
            hamiltonian: &h,
            x_components: exprs(["x2", "x1*p1"]),
        };
        for q in samples(20) {
            let a = star_product(&f, &lift, &h, &q).unwrap();
            let b = star_product_reduced(&f, &lift, &h, &q).unwrap();
            for k in 0..4 {
                assert!((a[k] - b[k]).abs() < 1e-11 * b[k].abs().max(1.0));
            }
        }
    }

    #[test]
    fn noether_from_conserved_momentum() {
        let h = example();
        let p = at([0.7, -1.2, 0.4, 1.3]);
        let r = noether_from_conservation(&parse("p2", 2).unwrap(), &h, &p).unwrap();
        assert_eq!(r.field, vec![0.0, 1.0, 0.0, 0.0]);
        assert_eq!(r.noether.max_entry(), 0.0);
        assert_eq!(r.noether.x_of_h, 0.0);
        assert_eq!(r.rho_f, 0.0);
        assert_eq!(r.exactness_residual, 0.0);
        assert_eq!(r.conservation_value, -1.3);

        let r = noether_from_conservation(&h.expr, &h, &p).unwrap();
        let rho = HamiltonianField { hamiltonian: &h }.values(&p).unwrap();
        assert_eq!(r.field, rho);
        assert!(r.exactness_residual < 1e-14);

        let r = noether_from_conservation(&parse("4", 2).unwrap(), &h, &p).unwrap();
        assert_eq!(r.field, vec![0.0; 4]);
        assert_eq!(r.conservation_value, -4.0);
    }
}
