use thiserror::Error;

use super::{BinOp, Expr, HamiltonianSpec, Var};

/// Driftless control-affine system `dx/dt = Σ_a u^a X_a(x)` on an
/// `dim`-dimensional base.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlAffineSystem {
    pub dim: usize,
    pub generators: Vec<Vec<Expr>>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ControlSystemError {
    #[error("a control system needs at least one generator")]
    NoGenerators,
    #[error("generator {index} has {found} components, expected {expected}")]
    DimensionMismatch {
        index: usize,
        found: usize,
        expected: usize,
    },
    #[error("generator {index} depends on momenta or on coordinates beyond the base dimension")]
    InvalidGenerator { index: usize },
}

/// Hamiltonian of the quadratic-cost optimal control problem
/// `min ∫ ½|u|² dt` after eliminating the controls through `∂H/∂u = 0`:
///
/// `H(x, p) = ½ Σ_a (Σ_i p_i X_a^i(x))²`, with optimal controls `u^a = ⟨p, X_a⟩`.
pub fn pmp_hamiltonian(sys: &ControlAffineSystem) -> Result<HamiltonianSpec, ControlSystemError> {
    if sys.generators.is_empty() {
        return Err(ControlSystemError::NoGenerators);
    }
    let mut squares: Option<Expr> = None;
    for (index, gen) in sys.generators.iter().enumerate() {
        if gen.len() != sys.dim {
            return Err(ControlSystemError::DimensionMismatch {
                index,
                found: gen.len(),
                expected: sys.dim,
            });
        }
        if gen
            .iter()
            .any(|c| c.depends_on_momenta() || c.min_dim() > sys.dim)
        {
            return Err(ControlSystemError::InvalidGenerator { index });
        }
        let control = gen
            .iter()
            .enumerate()
            .map(|(i, comp)| Expr::binary(BinOp::Mul, Expr::var(Var::p(i)), comp.clone()))
            .reduce(|acc, term| Expr::binary(BinOp::Add, acc, term))
            .expect("dim >= 1");
        let square = Expr::binary(BinOp::Pow, control, Expr::Const(2.0));
        squares = Some(match squares {
            None => square,
            Some(acc) => Expr::binary(BinOp::Add, acc, square),
        });
    }
    let expr = Expr::binary(BinOp::Mul, Expr::Const(0.5), squares.expect("non-empty"));
    Ok(HamiltonianSpec {
        name: "pmp".to_string(),
        dim: sys.dim,
        expr,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{evaluate, parse};
    use crate::PhasePoint;

    fn system(gens: &[&[&str]]) -> ControlAffineSystem {
        let dim = gens[0].len();
        ControlAffineSystem {
            dim,
            generators: gens
                .iter()
                .map(|g| g.iter().map(|c| parse(c, dim).unwrap()).collect())
                .collect(),
        }
    }

    fn agree(built: &HamiltonianSpec, closed: &str, points: &[[f64; 4]]) {
        let closed = parse(closed, 2).unwrap();
        for z in points {
            let pt = PhasePoint::new(z[..2].to_vec(), z[2..].to_vec()).unwrap();
            let a = evaluate(&built.expr, &pt).unwrap();
            let b = evaluate(&closed, &pt).unwrap();
            assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0), "{a} vs {b}");
        }
    }

    const POINTS: [[f64; 4]; 3] = [
        [1.0, 0.0, 1.0, 1.0],
        [-0.7, 2.0, 0.3, -1.1],
        [1.9, -1.2, 0.2, 1.7],
    ];

    #[test]
    fn control_example() {
        let h = pmp_hamiltonian(&system(&[&["1", "0"], &["x1", "1"]])).unwrap();
        agree(&h, "0.5*(p1^2+(p1*x1+p2)^2)", &POINTS);
    }

    #[test]
    fn free_particle_from_standard_basis() {
        let h = pmp_hamiltonian(&system(&[&["1", "0"], &["0", "1"]])).unwrap();
        agree(&h, "0.5*(p1^2+p2^2)", &POINTS);
    }

    #[test]
    fn single_flat_direction() {
        let h = pmp_hamiltonian(&system(&[&["1", "0"]])).unwrap();
        agree(&h, "0.5*p1^2", &POINTS);
    }

    #[test]
    fn rejects_bad_generators() {
        let mut sys = system(&[&["1", "0"]]);
        sys.generators.push(vec![parse("1", 2).unwrap()]);
        assert!(matches!(
            pmp_hamiltonian(&sys),
            Err(ControlSystemError::DimensionMismatch { index: 1, .. })
        ));
        let sys = system(&[&["p1", "0"]]);
        assert!(matches!(
            pmp_hamiltonian(&sys),
            Err(ControlSystemError::InvalidGenerator { index: 0 })
        ));
        let sys = ControlAffineSystem {
            dim: 2,
            generators: vec![],
        };
        assert_eq!(pmp_hamiltonian(&sys), Err(ControlSystemError::NoGenerators));
    }
}
