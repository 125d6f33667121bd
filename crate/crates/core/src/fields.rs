//! Vector fields on the cotangent bundle and their jets at a point.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::{parse, Expr, HamiltonianSpec, ParseError, Scalar};
use crate::jets::{jet_lift, Jet, MAX_ORDER};
use crate::PhasePoint;

/// Anything that yields the `2n` components `(X^1..X^n, Y_1..Y_n)` of a
/// vector field as jets at a point.
pub trait PhaseField {
    fn dim(&self) -> usize;

    /// Highest jet order the field can produce.
    fn max_order(&self) -> usize {
        MAX_ORDER
    }

    fn jets(&self, point: &PhasePoint, order: usize) -> Result<Vec<Jet>>;

    fn values(&self, point: &PhasePoint) -> Result<Vec<f64>> {
        Ok(values(&self.jets(point, 0)?))
    }
}

pub(crate) fn check_point(dim: usize, point: &PhasePoint, what: &str) -> Result<()> {
    if point.dim() != dim {
        return Err(Error::DimensionMismatch {
            what: what.to_string(),
            expected: dim,
            found: point.dim(),
        });
    }
    Ok(())
}

pub(crate) fn check_order(field: &dyn PhaseField, order: usize) -> Result<()> {
    if order > field.max_order() {
        return Err(Error::InvalidArgument(format!(
            "field jets are available up to order {}, {order} requested",
            field.max_order()
        )));
    }
    Ok(())
}

/// `X = X^i ∂/∂x^i + Y_i ∂/∂p_i` given by component expressions.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorFieldSpec {
    dim: usize,
    x_components: Vec<Expr>,
    p_components: Vec<Expr>,
}

impl VectorFieldSpec {
    pub fn new(dim: usize, x_components: Vec<Expr>, p_components: Vec<Expr>) -> Result<Self> {
        for (what, comps) in [
            ("x components", &x_components),
            ("p components", &p_components),
        ] {
            if comps.len() != dim {
                return Err(Error::DimensionMismatch {
                    what: what.to_string(),
                    expected: dim,
                    found: comps.len(),
                });
            }
        }
        if let Some(e) = x_components
            .iter()
            .chain(&p_components)
            .find(|e| e.min_dim() > dim)
        {
            return Err(Error::DimensionMismatch {
                what: format!("component `{e}`"),
                expected: dim,
                found: e.min_dim(),
            });
        }
        Ok(VectorFieldSpec {
            dim,
            x_components,
            p_components,
        })
    }

    pub fn parse(dim: usize, x: &[&str], p: &[&str]) -> std::result::Result<Self, FieldParseError> {
        let xs = x
            .iter()
            .map(|t| parse(t, dim))
            .collect::<std::result::Result<_, _>>()?;
        let ps = p
            .iter()
            .map(|t| parse(t, dim))
            .collect::<std::result::Result<_, _>>()?;
        Ok(VectorFieldSpec::new(dim, xs, ps)?)
    }

    pub fn zero(dim: usize) -> Self {
        VectorFieldSpec {
            dim,
            x_components: vec![Expr::Const(0.0); dim],
            p_components: vec![Expr::Const(0.0); dim],
        }
    }

    pub fn x_components(&self) -> &[Expr] {
        &self.x_components
    }

    pub fn p_components(&self) -> &[Expr] {
        &self.p_components
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FieldParseError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Field(#[from] Error),
}

impl PhaseField for VectorFieldSpec {
    fn dim(&self) -> usize {
        self.dim
    }

    fn jets(&self, point: &PhasePoint, order: usize) -> Result<Vec<Jet>> {
        check_point(self.dim, point, "vector field")?;
        check_order(self, order)?;
        self.x_components
            .iter()
            .chain(&self.p_components)
            .map(|e| Ok(jet_lift(e, point, order)?))
            .collect()
    }
}

/// A vector field `X̃ = X̃^i(x) ∂/∂x^i` on the base manifold.
#[derive(Debug, Clone, PartialEq)]
pub struct BaseVectorFieldSpec {
    dim: usize,
    components: Vec<Expr>,
}

impl BaseVectorFieldSpec {
    pub fn new(dim: usize, components: Vec<Expr>) -> Result<Self> {
        if components.len() != dim {
            return Err(Error::DimensionMismatch {
                what: "base field components".to_string(),
                expected: dim,
                found: components.len(),
            });
        }
        if let Some(e) = components.iter().find(|e| e.depends_on_momenta()) {
            return Err(Error::InvalidArgument(format!(
                "base field component `{e}` depends on momenta"
            )));
        }
        if let Some(e) = components.iter().find(|e| e.min_dim() > dim) {
            return Err(Error::DimensionMismatch {
                what: format!("component `{e}`"),
                expected: dim,
                found: e.min_dim(),
            });
        }
        Ok(BaseVectorFieldSpec { dim, components })
    }

    pub fn parse(dim: usize, comps: &[&str]) -> std::result::Result<Self, FieldParseError> {
        let cs = comps
            .iter()
            .map(|t| parse(t, dim))
            .collect::<std::result::Result<_, _>>()?;
        Ok(BaseVectorFieldSpec::new(dim, cs)?)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn components(&self) -> &[Expr] {
        &self.components
    }
}

/// Sign in front of the momentum part of the complete lift.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LiftSign {
    /// `X̃^i ∂/∂x^i − p_j ∂_i X̃^j ∂/∂p_i`, the lift that preserves `θ`.
    #[default]
    Minus,
    /// Same with `+`; kept to demonstrate that it breaks `ℒθ = 0`.
    Plus,
}

/// Complete lift `X̃^{C*}` of a base field to the cotangent bundle.
#[derive(Debug, Clone, PartialEq)]
pub struct CompleteLift {
    pub base: BaseVectorFieldSpec,
    pub sign: LiftSign,
}

impl PhaseField for CompleteLift {
    fn dim(&self) -> usize {
        self.base.dim
    }

    fn max_order(&self) -> usize {
        MAX_ORDER - 1
    }

    fn jets(&self, point: &PhasePoint, order: usize) -> Result<Vec<Jet>> {
        let n = self.base.dim;
        check_point(n, point, "complete lift")?;
        check_order(self, order)?;
        let base: Vec<Jet> = self
            .base
            .components
            .iter()
            .map(|e| jet_lift(e, point, order + 1))
            .collect::<std::result::Result<_, _>>()?;
        let momenta = Jet::seed(&point.coords(), order);
        let sign = match self.sign {
            LiftSign::Minus => -1.0,
            LiftSign::Plus => 1.0,
        };
        let mut out: Vec<Jet> = base.iter().map(|b| b.truncate(order)).collect();
        for i in 0..n {
            let sum = sum_jets(
                &momenta[0],
                (0..n).map(|j| &momenta[n + j] * &base[j].derivative(i)),
            );
            out.push(sum.scale(sign));
        }
        Ok(out)
    }
}

/// The Hamiltonian vector field `ρ_H = ∂H/∂p_i ∂/∂x^i − ∂H/∂x^i ∂/∂p_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianField<'a> {
    pub hamiltonian: &'a HamiltonianSpec,
}

impl PhaseField for HamiltonianField<'_> {
    fn dim(&self) -> usize {
        self.hamiltonian.dim
    }

    fn max_order(&self) -> usize {
        MAX_ORDER - 1
    }

    fn jets(&self, point: &PhasePoint, order: usize) -> Result<Vec<Jet>> {
        let n = self.hamiltonian.dim;
        check_point(n, point, "Hamiltonian")?;
        check_order(self, order)?;
        let h = jet_lift(&self.hamiltonian.expr, point, order + 1)?;
        Ok(hamiltonian_components(&h, n))
    }
}

/// `(∂H/∂p, −∂H/∂x)` one order below `h`.
pub(crate) fn hamiltonian_components(h: &Jet, n: usize) -> Vec<Jet> {
    let mut out: Vec<Jet> = (0..n).map(|i| h.derivative(n + i)).collect();
    out.extend((0..n).map(|i| -h.derivative(i)));
    out
}

/// `Σ terms`, starting from a zero shaped like `template`.
pub(crate) fn sum_jets(template: &Jet, terms: impl IntoIterator<Item = Jet>) -> Jet {
    terms
        .into_iter()
        .fold(template.constant_like(0.0), |acc, t| &acc + &t)
}

/// Directional derivative `V(f) = V^A ∂f/∂z^A`, one order below the inputs.
pub fn directional(v: &[Jet], f: &Jet) -> Jet {
    sum_jets(f, v.iter().enumerate().map(|(a, va)| va * &f.derivative(a)))
}

/// Coordinate Lie bracket `[X, Y]^A = X(Y^A) − Y(X^A)`.
pub fn bracket(x: &[Jet], y: &[Jet]) -> Vec<Jet> {
    assert_eq!(x.len(), y.len(), "bracket of fields of different dimension");
    (0..x.len())
        .map(|a| &directional(x, &y[a]) - &directional(y, &x[a]))
        .collect()
}

pub fn values(v: &[Jet]) -> Vec<f64> {
    v.iter().map(Jet::value).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(z: &[f64]) -> PhasePoint {
        PhasePoint::from_coords(z).unwrap()
    }

    #[test]
    fn textbook_bracket() {
        let a = VectorFieldSpec::parse(2, &["1", "0"], &["0", "0"]).unwrap();
        let b = VectorFieldSpec::parse(2, &["x1", "0"], &["0", "0"]).unwrap();
        let p = pt(&[0.4, -0.3, 1.2, 0.8]);
        let ja = a.jets(&p, 1).unwrap();
        let jb = b.jets(&p, 1).unwrap();
        assert_eq!(values(&bracket(&ja, &jb)), vec![1.0, 0.0, 0.0, 0.0]);
        assert_eq!(values(&bracket(&jb, &jb)), vec![0.0; 4]);
    }

    #[test]
    fn hamiltonian_field_of_example() {
        let h = HamiltonianSpec::parse("h", 2, "0.5*(p1^2+(p1*x1+p2)^2)").unwrap();
        let f = HamiltonianField { hamiltonian: &h };
        let v = f.values(&pt(&[1.0, 0.0, 1.0, 1.0])).unwrap();
        assert_eq!(v, vec![3.0, 2.0, -2.0, 0.0]);
    }

    #[test]
    fn complete_lift_shapes() {
        let p = pt(&[1.5, -0.5, 0.7, 0.9]);
        let lift = |comps: &[&str], sign| CompleteLift {
            base: BaseVectorFieldSpec::parse(2, comps).unwrap(),
            sign,
        };
        // x1 ∂/∂x1 lifts to x1 ∂/∂x1 − p1 ∂/∂p1
        let v = lift(&["x1", "0"], LiftSign::Minus).values(&p).unwrap();
        assert_eq!(v, vec![1.5, 0.0, -0.7, 0.0]);
        // x2 ∂/∂x1 lifts to x2 ∂/∂x1 − p1 ∂/∂p2
        let v = lift(&["x2", "0"], LiftSign::Minus).values(&p).unwrap();
        assert_eq!(v, vec![-0.5, 0.0, 0.0, -0.7]);
        let v = lift(&["0", "1"], LiftSign::Minus).values(&p).unwrap();
        assert_eq!(v, vec![0.0, 1.0, 0.0, 0.0]);
        let v = lift(&["x1", "0"], LiftSign::Plus).values(&p).unwrap();
        assert_eq!(v, vec![1.5, 0.0, 0.7, 0.0]);
    }

    #[test]
    fn validation() {
        assert!(BaseVectorFieldSpec::parse(2, &["p1", "0"]).is_err());
        assert!(BaseVectorFieldSpec::parse(2, &["1"]).is_err());
        assert!(VectorFieldSpec::parse(2, &["1", "0"], &["0"]).is_err());
        let f = VectorFieldSpec::zero(2);
        assert!(f.values(&pt(&[1.0, 2.0])).is_err());
    }
}
